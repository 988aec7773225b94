"""Command-line interface: JSONL schema, exit codes, determinism."""

import json

import pytest

from symcone.cli import main


def read_jsonl(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


class TestVerify:
    def test_list_catalog(self, tmp_path, capsys):
        out = tmp_path / "catalog.jsonl"
        assert main(["verify", "--list", "--out", str(out)]) == 0
        records = read_jsonl(out)
        assert len(records) >= 25
        for rec in records:
            assert rec["record"] == "catalog"
            assert rec["id"] and rec["kind"]

    def test_single_check_report(self, tmp_path):
        out = tmp_path / "r.jsonl"
        code = main(["verify", "--only", "newton", "--n", "6", "--samples", "300", "--out", str(out)])
        assert code == 0
        records = read_jsonl(out)
        assert records[0]["record"] == "manifest"
        assert records[0]["schema_version"] == 1
        assert records[0]["seed"] == 0
        assert records[-1]["record"] == "summary"
        results = [r for r in records if r["record"] == "result"]
        assert len(results) == 1
        r = results[0]
        for field in ("id", "kind", "n", "k", "samples", "min_slack", "verdict", "seed"):
            assert field in r
        assert r["id"] == "newton"
        assert r["verdict"] == "PASS"

    def test_n_range_and_only_list(self, tmp_path):
        out = tmp_path / "r.jsonl"
        code = main(
            ["verify", "--only", "newton,maclaurin", "--n", "5..6", "--samples", "100", "--out", str(out)]
        )
        assert code == 0
        results = [r for r in read_jsonl(out) if r["record"] == "result"]
        assert {(r["id"], r["n"]) for r in results} == {
            ("newton", 5), ("newton", 6), ("maclaurin", 5), ("maclaurin", 6)
        }

    def test_unknown_check_is_usage_error(self, tmp_path, capsys):
        assert main(["verify", "--only", "bogus", "--n", "5"]) == 2

    def test_failing_check_exit_one(self, tmp_path):
        out = tmp_path / "r.jsonl"
        # tol 0 turns machine-epsilon identity residue into a failure
        code = main(
            ["verify", "--only", "L4_2_id1", "--n", "6", "--samples", "200", "--tol", "0", "--out", str(out)]
        )
        assert code == 1
        results = [r for r in read_jsonl(out) if r["record"] == "result"]
        assert results[0]["verdict"] == "FAIL"

    def test_pinned_sweep(self, tmp_path):
        out = tmp_path / "r.jsonl"
        code = main(
            [
                "verify", "--only", "C3_1_key", "--n", "5", "--k", "3",
                "--kappa1", "1e4", "--K", "1e3", "--samples", "300", "--out", str(out),
            ]
        )
        assert code == 0
        r = [x for x in read_jsonl(out) if x["record"] == "result"][0]
        assert r["verdict"] == "THRESHOLD"
        assert r["kappa1_star"] == 1e4

    def test_jobs_deterministic_merge(self, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        args = ["verify", "--only", "newton,L5_1_identity", "--n", "5..6", "--samples", "200", "--seed", "7"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--jobs", "2", "--out", str(b)]) == 0
        ra = [r for r in read_jsonl(a) if r["record"] == "result"]
        rb = [r for r in read_jsonl(b) if r["record"] == "result"]
        assert ra == rb

    def test_float_round_trip(self, tmp_path):
        out = tmp_path / "r.jsonl"
        main(["verify", "--only", "newton", "--n", "6", "--samples", "300", "--out", str(out)])
        from symcone import run_check

        rec = [r for r in read_jsonl(out) if r["record"] == "result"][0]
        res = run_check("newton", n=6, samples=300, seed=0)
        assert rec["min_slack"] == res.min_slack  # 17 significant digits round-trip


class TestSearchCommand:
    def test_search_report(self, tmp_path):
        out = tmp_path / "s.jsonl"
        code = main(
            ["search", "--n", "5", "--k", "3", "--kappa1", "1e3", "--restarts", "5", "--out", str(out)]
        )
        assert code == 0
        records = read_jsonl(out)
        assert records[0]["record"] == "manifest"
        assert records[0]["command"] == "search"
        result = [r for r in records if r["record"] == "result"][0]
        assert result["best"] is not None
        assert records[-1]["negative_found"] is False


class TestThresholdCommand:
    def test_threshold_report(self, tmp_path):
        out = tmp_path / "t.jsonl"
        code = main(
            [
                "threshold", "--check", "L3_2", "--n", "5",
                "--lo", "10", "--hi", "1e4", "--samples", "100", "--out", str(out),
            ]
        )
        assert code == 0
        records = read_jsonl(out)
        result = [r for r in records if r["record"] == "result"][0]
        assert result["kappa1_star"] is not None
        assert records[-1]["record"] == "summary"

    def test_unknown_check(self, tmp_path):
        out = tmp_path / "t.jsonl"
        assert main(["threshold", "--check", "bogus", "--n", "5", "--out", str(out)]) == 2


class TestVersionFlag:
    def test_version_exits_zero(self):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
