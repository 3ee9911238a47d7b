"""Small dense matrices, singular values, and the singular value function.

The singular value function of a d x d non-singular matrix A interpolates the
partial products of its singular values a_1 >= ... >= a_d > 0:

    t in [l-1, l], l = 1..d:   a_1 ... a_{l-1} * a_l^(t-l+1)
    t > d:                     (a_1 ... a_d)^(t/d)

with the convention that the value at t = 0 is 1 (empty product), so the
level-n partition sum at t = 0 equals the number of words.  All evaluation is
done in log space; products of contractive matrices at useful depths would
otherwise underflow.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import NumericallySingularError

#: Relative threshold below which the smallest singular value counts as zero.
SINGULAR_RTOL = 1e-14

#: Supported ambient dimensions.
MAX_DIM = 4


def singular_values(A: np.ndarray) -> np.ndarray:
    """Singular values of A, sorted non-increasing, all strictly positive.

    Raises NumericallySingularError if the smallest value is below
    SINGULAR_RTOL times the largest.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not 1 <= A.shape[0] <= MAX_DIM:
        raise ValueError(f"supported dimensions are 1..{MAX_DIM}, got {A.shape[0]}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    svals = np.linalg.svd(A, compute_uv=False)
    if svals[-1] <= SINGULAR_RTOL * svals[0]:
        raise NumericallySingularError(
            f"numerically singular: smallest singular value {svals[-1]:.3e} "
            f"vs largest {svals[0]:.3e}"
        )
    return svals


def singular_values_batch(mats: np.ndarray) -> np.ndarray:
    """Singular values of a stack of matrices, shape (N, d) non-increasing."""
    mats = np.asarray(mats, dtype=float)
    return np.linalg.svd(mats, compute_uv=False)


def svf_exponents(t: float, d: int) -> np.ndarray:
    """Exponent vector e with log alpha^t(A) = e . log(singular values)."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    e = np.zeros(d)
    if t == 0:
        return e
    if t > d:
        e[:] = t / d
        return e
    # smallest integer >= t; for integer t this is t itself
    l = math.ceil(t)
    e[: l - 1] = 1.0
    e[l - 1] = t - l + 1
    return e


def log_svf_from_singular_values(svals: np.ndarray, t: float) -> float:
    return float(svf_exponents(t, len(svals)) @ np.log(svals))


def svf_alpha_t(A: np.ndarray, t: float) -> float:
    """The singular value function alpha^t(A)."""
    return math.exp(log_svf_from_singular_values(singular_values(A), t))


def log_svf_alpha_t(A: np.ndarray, t: float) -> float:
    return log_svf_from_singular_values(singular_values(A), t)


def compound_matrix(A: np.ndarray, k: int) -> np.ndarray:
    """k-th multiplicative compound (exterior power): the matrix of k x k
    minors over lexicographically ordered index subsets.

    Multiplicative by Cauchy-Binet, and its largest singular value is the
    product of the k largest singular values of A.  Products of compounds
    therefore give partial singular-value products of matrix products without
    condition-number amplification (only top singular values are ever read
    off), which keeps the singular value function of long products accurate.
    """
    A = np.asarray(A, dtype=float)
    d = A.shape[0]
    if not 1 <= k <= d:
        raise ValueError(f"compound order must be in 1..{d}, got {k}")
    if k == 1:
        return A.copy()
    subsets = list(itertools.combinations(range(d), k))
    M = np.empty((len(subsets), len(subsets)))
    for r, rows in enumerate(subsets):
        for c, cols in enumerate(subsets):
            M[r, c] = np.linalg.det(A[np.ix_(rows, cols)])
    return M


def svf_compound_terms(t: float, d: int) -> list[tuple[int, float]]:
    """The singular value function as a product of powers of partial products:

        alpha^t(A) = prod over (k, c) of (a_1 ... a_k)^c

    with a_1...a_k read off as the top singular value of the k-th compound.
    Valid for every t >= 0 (empty list at t = 0)."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if t == 0:
        return []
    if t > d:
        return [(d, t / d)]
    l = math.ceil(t)
    terms = [(l, t - l + 1)]
    if l > 1 and l - t > 0:
        terms.append((l - 1, l - t))
    return terms


def word_matrix(maps, w) -> np.ndarray:
    """Left-to-right product A_{w_1} ... A_{w_n}; the empty word gives identity.

    ``maps`` is a stack of matrices of shape (k, d, d) or any object with a
    ``matrices`` attribute holding one (e.g. an affine IFS).
    """
    mats = np.asarray(getattr(maps, "matrices", maps), dtype=float)
    if mats.ndim != 3:
        raise ValueError(f"expected a stack of matrices, got shape {mats.shape}")
    d = mats.shape[1]
    out = np.eye(d)
    for s in w:
        out = out @ mats[s]
    return out
