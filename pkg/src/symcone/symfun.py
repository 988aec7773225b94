"""Elementary symmetric functions, exclusion variants, and derivatives.

Everything is built on the coefficient dynamic program for

    prod_i (1 + kappa_i t) = sum_m sigma_m(kappa) t^m,

which evaluates all of sigma_0..sigma_n in one numerically stable O(n^2)
pass (no division, unlike Newton-identity recurrences).

Conventions:
  * sigma_0 = 1, sigma_m = 0 for m < 0 or m > n.
  * sigma_m(kappa|S) is sigma_m of kappa with the entries of S removed.
  * Public index arguments (p, q, exclusion sets) are 1-based positions,
    matching the usual mathematical notation; internal helpers are 0-based.

Derivative facts used throughout:
    d sigma_k / d kappa_p           = sigma_{k-1}(kappa|p)
    d^2 sigma_k / d kappa_p d kappa_q = sigma_{k-2}(kappa|pq)   (p != q)
    d^2 sigma_k / d kappa_p^2         = 0
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "SymTable",
    "sigma",
    "sigma_all",
    "sigma_excl",
    "sigma_d1",
    "sigma_d2",
    "sigma_enum",
    "sigma_fsum",
]

# Residual threshold for the downdating self-check (relative).
_DOWNDATE_RESID_TOL = 1e-12
# Below this fraction of max|kappa| the downdate divisor is considered
# degenerate and we rebuild from scratch instead.
_DOWNDATE_DIVISOR_FLOOR = 1e-8


def _as_vector(kappa) -> np.ndarray:
    arr = np.asarray(kappa, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise InvalidInputError(f"kappa must be a 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("kappa contains non-finite entries")
    return arr


def _coeffs(arr: np.ndarray) -> np.ndarray:
    """Coefficients c[m] = sigma_m(arr), m = 0..n."""
    n = arr.size
    c = np.zeros(n + 1)
    c[0] = 1.0
    for t in range(n):
        c[1 : t + 2] = c[1 : t + 2] + arr[t] * c[0 : t + 1]
    return c


@dataclass(frozen=True)
class SymTable:
    """All sigma_0..sigma_n of one vector, immutable."""

    base: tuple
    n: int
    values: tuple

    def sigma(self, m: int) -> float:
        if m < 0 or m > self.n:
            return 0.0
        return self.values[m]


def sigma_all(kappa) -> SymTable:
    arr = _as_vector(kappa)
    c = _coeffs(arr)
    return SymTable(base=tuple(arr.tolist()), n=arr.size, values=tuple(c.tolist()))


def sigma(k: int, kappa) -> float:
    arr = _as_vector(kappa)
    if k == 0:
        return 1.0
    if k < 0 or k > arr.size:
        return 0.0
    return float(_coeffs(arr)[k])


def _validate_excl(excl, n: int) -> tuple:
    raw = [int(j) for j in excl]
    idx = sorted(set(raw))
    if len(idx) != len(raw):
        raise InvalidInputError(f"duplicate exclusion indices: {excl}")
    if len(idx) > 3:
        raise InvalidInputError(f"at most 3 exclusions supported, got {len(idx)}")
    for j in idx:
        if not 1 <= j <= n:
            raise InvalidInputError(f"exclusion index {j} out of range [1, {n}]")
    return tuple(idx)


def _downdate(c: np.ndarray, x: float, arr_rest: np.ndarray) -> np.ndarray:
    """Remove the factor (1 + x t) from the coefficient vector c.

    Chooses between the forward recurrence (stable for small |x|) and the
    backward recurrence (divides by x, stable for large |x|); a residual
    self-check triggers a full rebuild from arr_rest when either direction
    lost accuracy, and a near-zero divisor forces the rebuild directly.
    """
    n = c.size - 1  # degree before removal
    maxabs = max(abs(x), float(np.max(np.abs(arr_rest))) if arr_rest.size else 0.0)
    out = np.zeros(n)
    if abs(x) < _DOWNDATE_DIVISOR_FLOOR * maxabs:
        if abs(x) == 0.0:
            # exact: removing a zero entry leaves the low coefficients
            return c[:n].copy()
        return _coeffs(arr_rest)
    if abs(x) <= 1.0:
        out[0] = 1.0
        for m in range(1, n):
            out[m] = c[m] - x * out[m - 1]
        resid = c[n] - x * out[n - 1]
        scale = abs(c[n]) + abs(x * out[n - 1])
    else:
        out[n - 1] = c[n] / x
        for m in range(n - 1, 0, -1):
            out[m - 1] = (c[m] - out[m]) / x
        resid = out[0] - 1.0
        scale = 1.0
        out[0] = 1.0
    if abs(resid) > _DOWNDATE_RESID_TOL * (1.0 + scale):
        return _coeffs(arr_rest)
    return out


def sigma_excl(k: int, kappa, excl) -> float:
    """sigma_k of kappa with the (1-based) indices in excl removed."""
    arr = _as_vector(kappa)
    idx = _validate_excl(excl, arr.size)
    m = arr.size - len(idx)
    if k == 0:
        return 1.0
    if k < 0 or k > m:
        return 0.0
    c = _coeffs(arr)
    keep = np.ones(arr.size, dtype=bool)
    for pos, j in enumerate(idx):
        keep[j - 1] = False
        rest = arr[keep]
        c = _downdate(c, arr[j - 1], rest)
    return float(c[k])


def sigma_d1(k: int, kappa, p: int) -> float:
    """First partial: d sigma_k / d kappa_p = sigma_{k-1}(kappa|p)."""
    return sigma_excl(k - 1, kappa, (p,))


def sigma_d2(k: int, kappa, p: int, q: int) -> float:
    """Second partial: sigma_{k-2}(kappa|pq) for p != q, exactly 0 for p == q."""
    arr = _as_vector(kappa)
    for j in (p, q):
        if not 1 <= j <= arr.size:
            raise InvalidInputError(f"index {j} out of range [1, {arr.size}]")
    if p == q:
        return 0.0
    return sigma_excl(k - 2, kappa, (p, q))


# ---------------------------------------------------------------------------
# Oracles: brute-force enumeration, used by tests and by witness re-checks.
# ---------------------------------------------------------------------------


def sigma_enum(k: int, kappa) -> float:
    """Subset-enumeration oracle; O(C(n, k)), intended for n <= 12."""
    arr = _as_vector(kappa)
    if k == 0:
        return 1.0
    if k < 0 or k > arr.size:
        return 0.0
    vals = arr.tolist()
    return float(sum(math.prod(c) for c in itertools.combinations(vals, k)))


def sigma_fsum(k: int, kappa) -> float:
    """Compensated-summation evaluation (exact-rounded sum of term products).

    Used to re-examine suspicious negative findings: each subset product
    carries its own rounding, but the summation itself is exact.
    """
    arr = _as_vector(kappa)
    if k == 0:
        return 1.0
    if k < 0 or k > arr.size:
        return 0.0
    vals = arr.tolist()
    return math.fsum(math.prod(c) for c in itertools.combinations(vals, k))


# ---------------------------------------------------------------------------
# Batched kernels (0-based, internal).  Row-parallel versions of the same
# coefficient DP, used by the samplers and the lemma registry where one check
# touches 10^4 vectors at a time.
# ---------------------------------------------------------------------------


def batch_coeffs(X: np.ndarray) -> np.ndarray:
    """sigma_m for every row: X (B, n) -> (B, n+1)."""
    B, n = X.shape
    c = np.zeros((B, n + 1))
    c[:, 0] = 1.0
    for t in range(n):
        c[:, 1 : t + 2] = c[:, 1 : t + 2] + X[:, t, None] * c[:, 0 : t + 1]
    return c


def batch_coeffs_excl(X: np.ndarray, cols) -> np.ndarray:
    """sigma_m(row | cols) for every row; cols are 0-based column indices."""
    keep = np.ones(X.shape[1], dtype=bool)
    for j in cols:
        keep[j] = False
    return batch_coeffs(X[:, keep])


def batch_excl1_table(X: np.ndarray) -> np.ndarray:
    """T[b, i, m] = sigma_m(row_b | i) for all single exclusions: (B, n, n)."""
    B, n = X.shape
    T = np.empty((B, n, n))
    for i in range(n):
        T[:, i, :] = batch_coeffs_excl(X, (i,))
    return T


def batch_abs_term_sum(X: np.ndarray) -> np.ndarray:
    """Row-wise sum of |terms| of each sigma_m: the conditioning scale.

    Returns (B, n+1) where entry m is sigma_m(|row|) = sum over subsets of
    the absolute term magnitudes.  Used for magnitude-aware tolerances.
    """
    return batch_coeffs(np.abs(X))
