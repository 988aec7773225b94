"""Garding-cone membership, constrained sampling, and sigma_k normalization.

Gamma_k is the open cone {sigma_1 > 0, ..., sigma_k > 0}; the barred variant
keeps sigma_m > 0 for m < k but allows sigma_k = 0.  Membership uses the
exact sign of the computed double — no tolerance — so that a returned sample
always re-validates with the same code path.

Sampling works in row-parallel batches.  Two constructions are used:

  * box: top block (positions 1..k) log-uniform in [kappa1/n, kappa1], tail
    uniform in [-0.95 (n-k) kappa1 / k, kappa1], sort, reject outside Gamma_k.
  * solve: when a sigma_k range [N0, N] is requested, the last entry is
    solved from sigma_k(kappa) = target via the linearity of sigma_k in each
    single variable.  Rescaling-based normalization cannot hit a sigma_k
    window and a kappa_1 window at once (the rescaled kappa_1 depends only on
    the draw's shape), so the solve construction is the one that terminates.

At large kappa_1 the map kappa -> sigma_k is ill-conditioned: the absolute
term magnitude T_k = sigma_k(|kappa|) can exceed sigma_k by 1/eps and no
float64 vector attains sigma_k in [N0, N] exactly.  The range check therefore
allows a representation-noise margin of 64*eps*T_k, recorded on request.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import DomainError, InvalidInputError, SamplingExhaustedError
from .symfun import _as_vector, batch_coeffs, sigma

__all__ = [
    "ConeVariant",
    "ConeQuery",
    "SampleSpec",
    "in_gamma",
    "tail_sum_check",
    "normalize_sigma_k",
    "sample_gamma",
    "make_rng",
]

_EPS = np.finfo(float).eps
SIGMA_RANGE_NOISE_FACTOR = 64.0
_BATCH = 2048


class ConeVariant(enum.Enum):
    OPEN = "open"
    BARRED = "barred"


@dataclass(frozen=True)
class ConeQuery:
    n: int
    k: int
    variant: ConeVariant = ConeVariant.OPEN

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise InvalidInputError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")


@dataclass(frozen=True)
class SampleSpec:
    """Constraints for one constrained draw inside Gamma_k (OPEN)."""

    n: int
    k: int
    kappa1_target: float
    near_top_index: Optional[int] = None  # 1-based; requires kappa_i > kappa_1 - sqrt(kappa_1)/n
    sigma_k_range: Optional[Tuple[float, float]] = None
    rng_seed: int = 0

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise InvalidInputError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if not (self.kappa1_target > 0):
            raise InvalidInputError("kappa1_target must be > 0")
        if self.sigma_k_range is not None:
            lo, hi = self.sigma_k_range
            if not (0 < lo <= hi):
                raise InvalidInputError(f"sigma_k_range must satisfy 0 < N0 <= N, got {self.sigma_k_range}")
        if self.near_top_index is not None and not 1 <= self.near_top_index <= self.n:
            raise InvalidInputError(f"near_top_index {self.near_top_index} out of range")


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator: independent seeds are independent streams."""
    return np.random.Generator(np.random.Philox(int(seed) & (2**64 - 1)))


def in_gamma(q: ConeQuery, kappa) -> bool:
    arr = _as_vector(kappa)
    if arr.size != q.n:
        raise InvalidInputError(f"dimension mismatch: query n={q.n}, vector n={arr.size}")
    c = batch_coeffs(arr[None, :])[0]
    if q.variant is ConeVariant.OPEN:
        return bool(np.all(c[1 : q.k + 1] > 0.0))
    return bool(np.all(c[1 : q.k] > 0.0) and c[q.k] >= 0.0)


def tail_sum_check(k: int, kappa) -> float:
    """kappa_k + ... + kappa_n (must be > 0 on Gamma_k); input must be sorted."""
    arr = _as_vector(kappa)
    if np.any(np.diff(arr) > 0):
        raise InvalidInputError("tail_sum_check requires kappa sorted descending")
    if not 1 <= k <= arr.size:
        raise InvalidInputError(f"k={k} out of range")
    return float(np.sum(arr[k - 1 :]))


def normalize_sigma_k(kappa, k: int, target: float) -> np.ndarray:
    """Rescale kappa -> t*kappa so sigma_k = target, using homogeneity."""
    arr = _as_vector(kappa)
    if not target > 0:
        raise DomainError(f"target must be > 0, got {target}")
    s = sigma(k, arr)
    if not s > 0:
        raise DomainError(f"sigma_{k}(kappa) = {s} is not positive; cannot normalize")
    t = (target / s) ** (1.0 / k)
    return arr * t


# ---------------------------------------------------------------------------
# Batched constrained sampling.
# ---------------------------------------------------------------------------


def _candidates(
    rng: np.random.Generator,
    B: int,
    n: int,
    k: int,
    kappa1: float,
    near_top: Optional[int],
    solve_range: Optional[Tuple[float, float]],
    wide: bool,
    negative_middle: float,
) -> np.ndarray:
    """One batch of candidate vectors, sorted descending (feasibility unchecked)."""
    X = np.empty((B, n))
    X[:, 0] = kappa1 * (1.0 + rng.uniform(-0.005, 0.005, B))
    sq = np.sqrt(X[:, 0]) / n
    lo_scale = kappa1 * 1e-9 if wide else kappa1 / n
    for j in range(1, n - 1 if solve_range is not None else n):
        if near_top is not None and j < near_top:
            # pin positions 2..i strictly inside (kappa1 - sqrt(kappa1)/n, kappa1)
            X[:, j] = X[:, 0] - rng.uniform(0.0, 1.0, B) * sq
        elif j < k:
            X[:, j] = np.exp(rng.uniform(math.log(lo_scale), math.log(kappa1 * 0.9), B))
            if wide and negative_middle > 0:
                flip = rng.uniform(size=B) < negative_middle
                X[flip, j] = -0.3 * X[flip, j]
        else:
            if solve_range is not None:
                X[:, j] = np.exp(rng.uniform(math.log(lo_scale), math.log(kappa1 * 0.9), B))
                if negative_middle > 0:
                    flip = rng.uniform(size=B) < negative_middle
                    X[flip, j] = -0.3 * X[flip, j]
            else:
                X[:, j] = rng.uniform(-0.95 * (n - k) * kappa1 / k, kappa1, B)
    if solve_range is not None:
        lo, hi = solve_range
        target = np.exp(rng.uniform(math.log(lo), math.log(hi), B))
        pre = X[:, : n - 1]
        c = batch_coeffs(pre)
        denom = c[:, k - 1].copy()
        bad = denom <= 0
        denom[bad] = 1.0
        X[:, n - 1] = (target - c[:, k]) / denom
        X[bad, n - 1] = np.inf  # rejected downstream as unsorted/non-member
    X = -np.sort(-X, axis=1)
    return X


def _feasible_mask(
    X: np.ndarray,
    k: int,
    kappa1: Optional[float],
    near_top: Optional[int],
    sigma_range: Optional[Tuple[float, float]],
    counts: dict,
) -> np.ndarray:
    B, n = X.shape
    ok = np.all(np.isfinite(X), axis=1)
    counts["finite"] += int(B - ok.sum())
    c = batch_coeffs(np.where(ok[:, None], X, 0.0))
    member = np.all(c[:, 1 : k + 1] > 0.0, axis=1)
    counts["gamma_k"] += int((ok & ~member).sum())
    ok &= member
    if kappa1 is not None:
        m = np.abs(X[:, 0] - kappa1) <= 0.01 * kappa1
        counts["kappa1_target"] += int((ok & ~m).sum())
        ok &= m
    if near_top is not None:
        with np.errstate(invalid="ignore"):  # rows already rejected as non-finite
            m = X[:, near_top - 1] > X[:, 0] - np.sqrt(np.maximum(X[:, 0], 0.0)) / n
        m &= ok
        counts["near_top"] += int((ok & ~m).sum())
        ok &= m
    if sigma_range is not None:
        lo, hi = sigma_range
        noise = SIGMA_RANGE_NOISE_FACTOR * _EPS * batch_coeffs(np.abs(X))[:, k]
        m = (c[:, k] >= lo - noise) & (c[:, k] <= hi + noise)
        counts["sigma_k_range"] += int((ok & ~m).sum())
        ok &= m
    return ok


def sample_batch(
    rng: np.random.Generator,
    count: int,
    n: int,
    k: int,
    kappa1: float,
    near_top_index: Optional[int] = None,
    sigma_k_range: Optional[Tuple[float, float]] = None,
    wide: bool = False,
    negative_middle: float = 0.25,
    predicate: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    max_attempts: int = 100_000,
) -> np.ndarray:
    """Draw `count` feasible vectors (rows sorted descending) or raise.

    `predicate`, if given, maps a (B, n) block of feasible rows to a boolean
    keep-mask (used for case conditioning by the lemma registry).
    """
    counts = {
        "finite": 0,
        "gamma_k": 0,
        "kappa1_target": 0,
        "near_top": 0,
        "sigma_k_range": 0,
        "predicate": 0,
    }
    out = []
    got = 0
    attempts = 0
    while got < count:
        if attempts >= max_attempts:
            worst = max(counts, key=counts.get)
            raise SamplingExhaustedError(
                f"sampling exhausted after {attempts} draws ({got}/{count} accepted); "
                f"most-rejecting constraint: {worst} ({counts[worst]} rejections)",
                rejection_counts=counts,
            )
        B = min(_BATCH, max(64, 4 * (count - got)))
        B = min(B, max_attempts - attempts)
        attempts += B
        X = _candidates(rng, B, n, k, kappa1, near_top_index, sigma_k_range, wide, negative_middle)
        ok = _feasible_mask(X, k, kappa1, near_top_index, sigma_k_range, counts)
        X = X[ok]
        if predicate is not None and X.shape[0]:
            keep = predicate(X)
            counts["predicate"] += int(X.shape[0] - keep.sum())
            X = X[keep]
        if X.shape[0]:
            out.append(X)
            got += X.shape[0]
    return np.concatenate(out)[:count]


def sample_gamma(spec: SampleSpec) -> np.ndarray:
    """One feasible vector per the spec; deterministic for a fixed seed."""
    rng = make_rng(spec.rng_seed)
    X = sample_batch(
        rng,
        1,
        spec.n,
        spec.k,
        spec.kappa1_target,
        near_top_index=spec.near_top_index,
        sigma_k_range=spec.sigma_k_range,
    )
    return X[0]


def sample_bar_batch(rng: np.random.Generator, count: int, m: int, boundary_frac: float = 0.4) -> np.ndarray:
    """Vectors in the barred cone of level m (dimension m), sorted descending.

    Interior points are positive vectors; boundary points are constructed
    explicitly by zeroing one entry (sigma_m = 0 exactly), since the boundary
    has measure zero and is unreachable by rejection.
    """
    X = np.exp(rng.uniform(-1.0, 3.0, (count, m)))
    hit = rng.uniform(size=count) < boundary_frac
    cols = rng.integers(0, m, size=count)
    X[hit, cols[hit]] = 0.0
    return -np.sort(-X, axis=1)
