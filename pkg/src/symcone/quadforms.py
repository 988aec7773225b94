"""Quadratic forms of the sigma_k curvature estimate, as explicit matrices.

Index conventions:
  * Public `i`, `p`, `q` arguments are 1-based positions in kappa.
  * The reduced forms (A, B, C, D, H) are (n-1) x (n-1), indexed by the
    positions j != i in increasing order.
  * Off-diagonal entries store the coefficient of the ordered-pair sum
    "sum over p != q" as written, so xi^T M xi reproduces that sum exactly
    (each unordered pair appears twice in both).

All builders have row-parallel batch variants (suffix `_batch`, 0-based i)
used by the lemma registry; the scalar API wraps a batch of one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import DomainError, InvalidInputError, SingularDenominatorError
from .symfun import (
    _as_vector,
    batch_coeffs,
    batch_coeffs_excl,
    batch_excl1_table,
)

__all__ = [
    "QuadForm",
    "KeyParams",
    "TestFnTerms",
    "key_matrix",
    "abcd_matrices",
    "rhs_combination",
    "lemma41_gap",
    "h_matrix",
    "testfn_terms",
    "min_eig",
]

JACOBI_OFFDIAG_TOL = 1e-12
_MAX_SWEEPS = 60


@dataclass(frozen=True)
class QuadForm:
    n: int
    entries: np.ndarray
    label: str

    def __post_init__(self):
        e = self.entries
        if e.shape != (self.n, self.n):
            raise InvalidInputError(f"entries shape {e.shape} != ({self.n}, {self.n})")

    def __call__(self, xi) -> float:
        xi = np.asarray(xi, dtype=float)
        return float(xi @ self.entries @ xi)


@dataclass(frozen=True)
class KeyParams:
    """(k, i, K) plus the derived constant c = 1/(K kappa_i sigma_{k-1}(kappa|i) - 1)."""

    k: int
    i: int  # 1-based
    K: float
    c: float

    @staticmethod
    def for_kappa(kappa, k: int, i: int, K: float) -> "KeyParams":
        arr = _as_vector(kappa)
        if not 1 <= i <= arr.size:
            raise InvalidInputError(f"i={i} out of range [1, {arr.size}]")
        s_ii = float(batch_coeffs_excl(arr[None, :], (i - 1,))[0, k - 1])
        denom = K * arr[i - 1] * s_ii - 1.0
        if not denom > 0:
            raise DomainError(
                f"K*kappa_i*sigma_(k-1)(kappa|i) - 1 = {denom} must be positive for c_(k,K)"
            )
        return KeyParams(k=k, i=i, K=float(K), c=1.0 / denom)


@dataclass(frozen=True)
class TestFnTerms:
    """The five scalar test-function terms, each scaled by e^{-kappa_1}."""

    Ai: float
    Bi: float
    Ci: float
    Di: float
    Ei: float
    small_kappa1: bool = False  # kappa_1 <= 1: the large-scale regime is vacuous

    def combination(self) -> float:
        return self.Ai + self.Bi + self.Ci + self.Di - self.Ei


# ---------------------------------------------------------------------------
# Batch builders (0-based distinguished index).
# ---------------------------------------------------------------------------


def key_matrix_batch(X: np.ndarray, k: int, i0: int, K: float) -> np.ndarray:
    B, n = X.shape
    T1 = batch_excl1_table(X)  # (B, n, n) coefficient tables without one entry
    v = T1[:, :, k - 1] if 0 <= k - 1 <= n - 1 else np.zeros((B, n))  # sigma_k^{jj}
    ki = X[:, i0]
    M = K * ki[:, None, None] * (v[:, :, None] * v[:, None, :])
    S = np.zeros((B, n, n))
    if 0 <= k - 2 <= n - 2:
        for p in range(n):
            for q in range(p + 1, n):
                spq = batch_coeffs_excl(X, (p, q))[:, k - 2]
                S[:, p, q] = spq
                S[:, q, p] = spq
    M -= ki[:, None, None] * S
    idx = np.arange(B)
    M[idx, i0, i0] -= v[:, i0]
    for j in range(n):
        if j == i0:
            continue
        a_j = v[:, j] + (X[:, i0] + X[:, j]) * S[:, i0, j]
        M[idx, j, j] += a_j
    return M


def _reduced_tables(X: np.ndarray, k: int, i0: int, orders: Tuple[int, ...]):
    """sigma_t(kappa|i j) and sigma_t(kappa|i p q) tables on the reduced vector.

    Returns (one, two): one[t][:, a] = sigma_t(kappa | i, idx_a);
    two[t][:, a, b] = sigma_t(kappa | i, idx_a, idx_b) for a != b, where idx
    enumerates positions != i0.
    """
    Y = np.delete(X, i0, axis=1)
    B, m = Y.shape
    one = {}
    two = {}
    T1 = batch_excl1_table(Y)  # (B, m, m): coefficients of (kappa|i,a)
    for t in orders:
        one[t] = T1[:, :, t] if 0 <= t <= m - 1 else np.zeros((B, m))
        two[t] = np.zeros((B, m, m))
    for a in range(m):
        for b in range(a + 1, m):
            c = batch_coeffs_excl(Y, (a, b))
            for t in orders:
                if 0 <= t <= m - 2:
                    two[t][:, a, b] = c[:, t]
                    two[t][:, b, a] = c[:, t]
    return Y, one, two


def abcd_batch(X: np.ndarray, k: int, i0: int):
    B, n = X.shape
    m = n - 1
    Y, one, two = _reduced_tables(X, k, i0, (k - 3, k - 2, k - 1, k))
    offdiag = ~np.eye(m, dtype=bool)
    A = np.where(offdiag, two[k - 2] ** 2 - two[k - 1] * two[k - 3], 0.0)
    Bm = np.where(offdiag, -two[k - 2], 0.0)
    C = np.where(offdiag, two[k] * two[k - 2] - two[k - 1] ** 2, 0.0)
    D = one[k - 1][:, :, None] * one[k - 1][:, None, :]
    idx = np.arange(m)
    A[:, idx, idx] = one[k - 2] ** 2
    Bm[:, idx, idx] = 2.0 * one[k - 2]
    C[:, idx, idx] = Y**2 * one[k - 2] ** 2 - 2.0 * one[k] * one[k - 2]
    # D diagonal is already sigma_{k-1}^2(kappa|ij) from the outer product
    return A, Bm, C, D


def h_matrix_batch(X: np.ndarray, i0: int) -> np.ndarray:
    B, n = X.shape
    m = n - 1
    Y, one, two = _reduced_tables(X, n - 2, i0, (n - 5, n - 3))
    cbar = batch_coeffs(Y)
    s3 = cbar[:, n - 3]
    s5 = cbar[:, n - 5] if n >= 5 else np.ones(B)
    if np.any(s5 == 0.0):
        raise SingularDenominatorError("sigma_{n-5}(kappa|i) vanished in H construction")
    r = 2.0 * s3 / (3.0 * s5)
    offdiag = ~np.eye(m, dtype=bool)
    H = np.where(offdiag, r[:, None, None] * two[n - 5] * two[n - 3] - two[n - 3] ** 2, 0.0)
    diag2 = batch_excl1_table(Y**2)[:, :, n - 3] if 0 <= n - 3 <= m - 1 else np.zeros((B, m))
    idx = np.arange(m)
    H[:, idx, idx] = diag2
    return H


def embed_reduced(M: np.ndarray, n: int, i0: int) -> np.ndarray:
    """Embed a (B, n-1, n-1) reduced form into (B, n, n) with row/col i0 zero."""
    B = M.shape[0]
    out = np.zeros((B, n, n))
    keep = [j for j in range(n) if j != i0]
    out[np.ix_(np.arange(B), keep, keep)] = M
    return out


def rhs_combination_batch(X: np.ndarray, k: int, i0: int, K: float, with_kappa_i_sq: bool) -> np.ndarray:
    A, Bm, C, D = abcd_batch(X, k, i0)
    s_ii = batch_coeffs_excl(X, (i0,))[:, k - 1]
    sk = batch_coeffs(X)[:, k]
    denom = K * X[:, i0] * s_ii - 1.0
    if np.any(denom <= 0):
        raise DomainError("K*kappa_i*sigma_(k-1)(kappa|i) must exceed 1 on every row")
    c = 1.0 / denom
    alpha = X[:, i0] ** 2 if with_kappa_i_sq else np.ones(X.shape[0])
    comb = (
        alpha[:, None, None] * A
        + sk[:, None, None] * Bm
        + C
        - c[:, None, None] * D
    )
    return denom[:, None, None] * comb


def lemma41_gap_batch(X: np.ndarray, k: int, i0: int, K: float, with_kappa_i_sq: bool) -> np.ndarray:
    """LHS - RHS of the section-4 matrix inequality, in consistently scaled form.

    Both sides are multiplied by kappa_i K (sigma_k^{ii})^2 - sigma_k^{ii}
    (positive whenever c > 0), matching the proof's final line; the result is
    PSD iff  keyform >= (1/sigma_k^{ii}) [alpha A + sigma_k B + C - c D].
    """
    n = X.shape[1]
    s_ii = batch_coeffs_excl(X, (i0,))[:, k - 1]
    mult = X[:, i0] * K * s_ii**2 - s_ii
    lhs = mult[:, None, None] * key_matrix_batch(X, k, i0, K)
    rhs = embed_reduced(rhs_combination_batch(X, k, i0, K, with_kappa_i_sq), n, i0)
    return lhs - rhs


# ---------------------------------------------------------------------------
# Scalar API.
# ---------------------------------------------------------------------------


def _check_i(i: int, n: int) -> int:
    if not 1 <= i <= n:
        raise InvalidInputError(f"i={i} out of range [1, {n}]")
    return i - 1


def key_matrix(kappa, params: KeyParams) -> QuadForm:
    arr = _as_vector(kappa)
    i0 = _check_i(params.i, arr.size)
    s_ii = float(batch_coeffs_excl(arr[None, :], (i0,))[0, params.k - 1])
    if not params.K * arr[i0] * s_ii > 1.0:
        raise DomainError("KeyParams invariant K*kappa_i*sigma_(k-1)(kappa|i) > 1 violated")
    M = key_matrix_batch(arr[None, :], params.k, i0, params.K)[0]
    return QuadForm(n=arr.size, entries=M, label="KEY")


def abcd_matrices(kappa, k: int, i: int):
    arr = _as_vector(kappa)
    i0 = _check_i(i, arr.size)
    A, B, C, D = abcd_batch(arr[None, :], k, i0)
    m = arr.size - 1
    return (
        QuadForm(n=m, entries=A[0], label="A"),
        QuadForm(n=m, entries=B[0], label="B"),
        QuadForm(n=m, entries=C[0], label="C"),
        QuadForm(n=m, entries=D[0], label="D"),
    )


def rhs_combination(kappa, params: KeyParams, with_kappa_i_sq: bool) -> QuadForm:
    arr = _as_vector(kappa)
    i0 = _check_i(params.i, arr.size)
    raw = rhs_combination_batch(arr[None, :], params.k, i0, params.K, with_kappa_i_sq)[0]
    # rhs_combination proper is (1/c)[...]; the batch helper returns it
    # pre-multiplied by 1/c's denominator definition, which is the same thing.
    return QuadForm(n=arr.size - 1, entries=raw, label="RHS")


def lemma41_gap(kappa, params: KeyParams, with_kappa_i_sq: bool) -> QuadForm:
    arr = _as_vector(kappa)
    i0 = _check_i(params.i, arr.size)
    G = lemma41_gap_batch(arr[None, :], params.k, i0, params.K, with_kappa_i_sq)[0]
    return QuadForm(n=arr.size, entries=G, label="LHS_MINUS_RHS")


def h_matrix(kappa, i: int) -> QuadForm:
    arr = _as_vector(kappa)
    if arr.size < 5:
        raise InvalidInputError("h_matrix needs n >= 5")
    i0 = _check_i(i, arr.size)
    H = h_matrix_batch(arr[None, :], i0)[0]
    return QuadForm(n=arr.size - 1, entries=H, label="H")


# ---------------------------------------------------------------------------
# Section-3 test-function terms.
# ---------------------------------------------------------------------------


def divdiff_exp_scaled(a, b, top):
    """(e^a - e^b)/(a - b) * e^{-top}, elementwise-stable.

    Uses expm1 for separated arguments and the Taylor series of
    (1 - e^{-d})/d for |d| < 1e-6; the coincidence limit is e^{a - top}.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    hi = np.maximum(a, b)
    d = np.abs(a - b)
    small = d < 1e-6
    dd = np.where(small, 1.0, d)
    series = 1.0 - d / 2.0 + d * d / 6.0 - d**3 / 24.0
    ratio = np.where(small, series, -np.expm1(-dd) / dd)
    return np.exp(hi - top) * ratio


def testfn_terms(kappa, k: int, i: int, h, K: float) -> TestFnTerms:
    """The five section-3 terms for diagonal derivative data h, scaled by e^{-kappa_1}.

    The exponential weights are carried as w_l = e^{kappa_l - kappa_1} and
    P as log P = kappa_1 + log(sum w_l), so the evaluation stays finite for
    kappa_1 far beyond the overflow threshold of e^x.
    """
    arr = _as_vector(kappa)
    hv = np.asarray(h, dtype=float)
    if hv.shape != arr.shape:
        raise InvalidInputError("h must have the same shape as kappa")
    n = arr.size
    i0 = _check_i(i, n)
    top = float(np.max(arr))
    w = np.exp(arr - top)
    W = float(np.sum(w))
    logP = top + math.log(W)
    T1 = batch_excl1_table(arr[None, :])[0]
    skl = T1[:, k - 1] if 0 <= k - 1 <= n - 1 else np.zeros(n)  # sigma_k^{ll}
    gsum = float(skl @ hv)
    spq = 0.0
    for p in range(n):
        for q in range(p + 1, n):
            spq += 2.0 * float(batch_coeffs_excl(arr[None, :], (p, q))[0, k - 2]) * hv[p] * hv[q]
    Ai = w[i0] * (K * gsum**2 - spq)
    Bi = 0.0
    Ci = float(skl[i0] * np.sum(w * hv**2))
    Di = 0.0
    for l in range(n):
        if l == i0:
            continue
        s2 = float(batch_coeffs_excl(arr[None, :], (i0, l))[0, k - 2])
        Bi += 2.0 * s2 * w[l] * hv[l] ** 2
        Di += 2.0 * float(divdiff_exp_scaled(arr[l], arr[i0], top)) * skl[l] * hv[l] ** 2
    Pi_scaled = float(np.sum(w * hv))  # P_i * e^{-kappa_1}
    Ei = (1.0 + logP) / (W * logP) * skl[i0] * Pi_scaled**2
    terms = TestFnTerms(
        Ai=float(Ai), Bi=float(Bi), Ci=float(Ci), Di=float(Di), Ei=float(Ei),
        small_kappa1=bool(top <= 1.0),
    )
    # C_i and D_i are positive-weight sums of squares on Gamma_k.
    member = bool(np.all(batch_coeffs(arr[None, :])[0, 1 : k + 1] > 0.0))
    if member and np.all(np.diff(arr) <= 0):
        assert terms.Ci >= 0.0 and terms.Di >= 0.0, "C_i/D_i positivity violated on Gamma_k"
    return terms


# ---------------------------------------------------------------------------
# Eigenvalues: cyclic Jacobi, batched and scalar.
# ---------------------------------------------------------------------------


def jacobi_min_eig_batch(A: np.ndarray) -> np.ndarray:
    """Least eigenvalue per matrix of a (B, m, m) symmetric stack."""
    A = np.array(A, dtype=float, copy=True)
    B, m, _ = A.shape
    if m == 1:
        return A[:, 0, 0].copy()
    fro = np.sqrt(np.sum(A * A, axis=(1, 2)))
    tol = JACOBI_OFFDIAG_TOL * fro
    offmask = ~np.eye(m, dtype=bool)
    for _ in range(_MAX_SWEEPS):
        off = np.abs(A[:, offmask]).max(axis=1)
        if np.all(off <= tol):
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = A[:, p, q]
                act = np.abs(apq) > 0.0
                if not np.any(act):
                    continue
                app = A[:, p, p]
                aqq = A[:, q, q]
                denom = np.where(act, 2.0 * apq, 1.0)
                with np.errstate(over="ignore"):
                    # tau overflowing to +-inf gives t -> 0, the correct limit
                    tau = np.where(act, (aqq - app) / denom, 0.0)
                    sgn = np.where(tau >= 0.0, 1.0, -1.0)
                    t = np.where(act, sgn / (np.abs(tau) + np.hypot(1.0, tau)), 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rowp = c[:, None] * A[:, p, :] - s[:, None] * A[:, q, :]
                rowq = s[:, None] * A[:, p, :] + c[:, None] * A[:, q, :]
                A[:, p, :] = rowp
                A[:, q, :] = rowq
                colp = c[:, None] * A[:, :, p] - s[:, None] * A[:, :, q]
                colq = s[:, None] * A[:, :, p] + c[:, None] * A[:, :, q]
                A[:, :, p] = colp
                A[:, :, q] = colq
                A[:, p, q] = 0.0
                A[:, q, p] = 0.0
    idx = np.arange(m)
    return A[:, idx, idx].min(axis=1)


def jacobi_eig_single(M: np.ndarray):
    """(eigenvalues ascending, eigenvector matrix) for one symmetric matrix."""
    A = np.array(M, dtype=float, copy=True)
    m = A.shape[0]
    V = np.eye(m)
    if m == 1:
        return A[0, :].copy(), V
    fro = math.sqrt(float(np.sum(A * A)))
    tol = JACOBI_OFFDIAG_TOL * fro
    offmask = ~np.eye(m, dtype=bool)
    for _ in range(_MAX_SWEEPS):
        if np.abs(A[offmask]).max() <= tol:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                sgn = 1.0 if tau >= 0.0 else -1.0
                t = sgn / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                rowp = c * A[p, :] - s * A[q, :]
                rowq = s * A[p, :] + c * A[q, :]
                A[p, :] = rowp
                A[q, :] = rowq
                colp = c * A[:, p] - s * A[:, q]
                colq = s * A[:, p] + c * A[:, q]
                A[:, p] = colp
                A[:, q] = colq
                A[p, q] = A[q, p] = 0.0
                vp = c * V[:, p] - s * V[:, q]
                vq = s * V[:, p] + c * V[:, q]
                V[:, p] = vp
                V[:, q] = vq
    eigs = np.diag(A).copy()
    order = np.argsort(eigs)
    return eigs[order], V[:, order]


def min_eig(M) -> float:
    """Least eigenvalue of a symmetric matrix (QuadForm or ndarray), n <= 64."""
    e = M.entries if isinstance(M, QuadForm) else np.asarray(M, dtype=float)
    if e.ndim != 2 or e.shape[0] != e.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {e.shape}")
    if e.shape[0] > 64:
        raise InvalidInputError("min_eig supports n <= 64")
    if not np.all(np.isfinite(e)):
        raise InvalidInputError("matrix contains non-finite entries")
    return float(jacobi_min_eig_batch(e[None, :, :])[0])
