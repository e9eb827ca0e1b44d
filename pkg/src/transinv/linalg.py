"""Dense linear algebra primitives.

Matrices are plain 2-D numpy arrays (``float64`` or ``complex128``).
The SVD and the Schur square root are delegated to LAPACK through numpy
and scipy; this module owns the contracts around them: ordering, rank
decisions, residual verification and error reporting.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    BranchCutError,
    NumericFailure,
    PreconditionError,
    RankDeficientError,
    ShapeError,
    SvdConvergenceError,
)

__all__ = [
    "ToleranceConfig",
    "SvdFactors",
    "as_matrix",
    "compute_svd",
    "pseudoinverse",
    "transpose_inverse",
    "principal_matrix_sqrt",
    "random_orthogonal",
    "haar_orthogonal",
    "hadamard",
    "frobenius_norm",
    "smallest_singular_value",
    "relative_residual",
]

# imaginary parts below this (relative) are discarded for real input
_REALNESS_SNAP = 1e-10


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds shared by every operation.

    Parameters
    ----------
    rank_rel_tol : float
        Singular values at or below ``rank_rel_tol * sigma_max`` count as zero.
    residual_rel_tol : float
        Acceptance threshold for verified residuals.
    sqrt_axis_margin : float
        Minimum distance (relative to ``max(1, spectral radius)``) between an
        eigenvalue and the closed negative real axis for a principal
        square root to be attempted.
    """

    rank_rel_tol: float = 1e-12
    residual_rel_tol: float = 1e-9
    sqrt_axis_margin: float = 1e-10

    def __post_init__(self):
        for name in ("rank_rel_tol", "residual_rel_tol", "sqrt_axis_margin"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")


DEFAULT_TOL = ToleranceConfig()


def as_matrix(x, name="matrix"):
    """Validate ``x`` as a finite, non-empty 2-D array and return a copy-free view.

    Integer and boolean inputs are promoted to ``float64``; complex inputs
    stay ``complex128``.
    """
    arr = np.asarray(x)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got {arr.ndim}-D")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must have at least one row and column, got {arr.shape}")
    if np.iscomplexobj(arr):
        arr = arr.astype(np.complex128, copy=False)
    else:
        try:
            arr = arr.astype(np.float64, copy=False)
        except (TypeError, ValueError) as exc:
            raise PreconditionError(f"{name} has non-numeric entries") from exc
    if not np.all(np.isfinite(arr)):
        raise PreconditionError(f"{name} contains NaN or Inf entries")
    return arr


def _require_square(arr, name="matrix"):
    if arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"{name} must be square, got {arr.shape[0]}x{arr.shape[1]}")


def _ct(x):
    return x.conj().T


@dataclass(frozen=True, eq=False)
class SvdFactors:
    """Thin SVD ``M = U diag(s) V^H`` with an attached rank decision.

    ``U`` is m x k and ``V`` is n x k with k = min(m, n). ``rank`` counts the
    singular values strictly above ``rank_tol`` (an absolute threshold).
    ``full_U`` / ``full_V`` are the square completions when requested.
    """

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray
    rank_tol: float
    rank: int
    full_U: np.ndarray = None
    full_V: np.ndarray = None

    @property
    def shape(self):
        return (self.U.shape[0], self.V.shape[0])

    @property
    def sigma_max(self):
        return float(self.singular_values[0])

    def reconstruct(self):
        return (self.U * self.singular_values) @ _ct(self.V)


def compute_svd(M, tol=DEFAULT_TOL, full=False):
    """Singular value decomposition with a relative rank decision.

    Parameters
    ----------
    M : array_like, shape (m, n)
        Real or complex matrix.
    tol : ToleranceConfig
    full : bool
        Also return the square bases ``full_U`` (m x m) and ``full_V`` (n x n).

    Returns
    -------
    SvdFactors

    Raises
    ------
    SvdConvergenceError
        If the LAPACK driver fails to converge.
    """
    M = as_matrix(M)
    m, n = M.shape
    k = min(m, n)
    try:
        U, s, Vh = np.linalg.svd(M, full_matrices=full)
    except np.linalg.LinAlgError as exc:
        raise SvdConvergenceError(f"SVD did not converge for {m}x{n} input") from exc
    full_U = full_V = None
    if full:
        full_U, full_V = U, _ct(Vh)
        U, Vh = U[:, :k], Vh[:k]
    rank_tol = tol.rank_rel_tol * float(s[0])
    rank = int(np.count_nonzero(s > rank_tol))
    return SvdFactors(U, s, _ct(Vh), rank_tol, rank, full_U, full_V)


def pseudoinverse(F):
    """Moore-Penrose pseudoinverse from SVD factors.

    Singular values beyond ``F.rank`` are treated as exact zeros.

    >>> pseudoinverse(compute_svd([[2.0, 0.0], [0.0, 0.0]]))
    array([[0.5, 0. ],
           [0. , 0. ]])
    """
    r = F.rank
    return (F.V[:, :r] / F.singular_values[:r]) @ _ct(F.U[:, :r])


def smallest_singular_value(F, nonzero=False):
    """Smallest singular value, or the smallest one above the rank tolerance."""
    if not nonzero:
        return float(F.singular_values[-1])
    if F.rank == 0:
        return 0.0
    return float(F.singular_values[F.rank - 1])


def transpose_inverse(A, tol=DEFAULT_TOL, conjugate=False):
    """Return ``inv(A).T`` (or ``inv(A)^H`` when ``conjugate`` is set).

    Raises
    ------
    RankDeficientError
        If ``A`` is singular at ``tol.rank_rel_tol``; carries ``sigma_min``.
    NumericFailure
        If the verified residual ``||A^T X - I||_F`` exceeds
        ``tol.residual_rel_tol * sqrt(n)``.
    """
    A = as_matrix(A, "A")
    _require_square(A, "A")
    n = A.shape[0]
    try:
        s = np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise SvdConvergenceError("SVD did not converge") from exc
    if s[0] == 0 or s[-1] <= tol.rank_rel_tol * s[0]:
        raise RankDeficientError(
            f"matrix is singular at rank tolerance (sigma_min={s[-1]:.3g}, "
            f"sigma_max={s[0]:.3g})",
            sigma_min=float(s[-1]),
        )
    X = np.linalg.inv(A).T
    At = A.T
    if conjugate:
        X = X.conj()
        At = At.conj()
    residual = np.linalg.norm(At @ X - np.eye(n))
    if residual > tol.residual_rel_tol * np.sqrt(n):
        raise NumericFailure(
            f"transpose-inverse residual {residual:.3g} exceeds tolerance "
            f"(condition number ~{s[0] / s[-1]:.3g})"
        )
    return X


def _axis_distance(lam):
    # distance from lam to the closed ray (-inf, 0]
    if lam.real <= 0:
        return abs(lam.imag)
    return abs(lam)


def principal_matrix_sqrt(S, tol=DEFAULT_TOL, allow_singular=False):
    """Principal square root via the complex Schur method.

    Parameters
    ----------
    S : array_like, shape (n, n)
    tol : ToleranceConfig
    allow_singular : bool
        Tolerate eigenvalues at (within the margin of) the origin. The result
        is then accepted only if its residual verifies, which fails for
        defective zero eigenvalues where no square root exists.

    Returns
    -------
    X : ndarray
        ``X @ X == S`` within ``tol.residual_rel_tol`` (relative to
        ``max(1, ||S||_F)``). Real when ``S`` is real.

    Raises
    ------
    BranchCutError
        Some eigenvalue lies on or near the closed negative real axis.
    """
    S = as_matrix(S, "S")
    _require_square(S, "S")
    try:
        eigs = np.linalg.eigvals(S)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure("eigenvalue iteration did not converge") from exc
    margin = tol.sqrt_axis_margin * max(1.0, float(np.max(np.abs(eigs))))
    bad = [
        lam for lam in eigs
        if _axis_distance(lam) <= margin and not (allow_singular and abs(lam) <= margin)
    ]
    if bad:
        listed = ", ".join(_format_eig(lam) for lam in _dedupe(bad))
        raise BranchCutError(
            f"no principal square root: eigenvalue(s) {listed} on or near the "
            f"closed negative real axis",
            eigenvalues=bad,
        )

    X = scipy.linalg.sqrtm(S)
    if not np.iscomplexobj(S) and np.iscomplexobj(X):
        imag = np.linalg.norm(X.imag)
        if imag <= _REALNESS_SNAP * max(np.linalg.norm(X.real), 1.0) or allow_singular:
            X = X.real.copy()
    if not np.all(np.isfinite(X)):
        raise NumericFailure("square root produced non-finite entries")
    residual = relative_residual(X @ X, S)
    if residual > tol.residual_rel_tol:
        raise NumericFailure(f"square root residual {residual:.3g} exceeds tolerance")
    return X


def _dedupe(values):
    out = []
    for v in values:
        if not any(abs(v - w) <= 1e-12 * max(1.0, abs(v)) for w in out):
            out.append(v)
    return out


def _format_eig(lam):
    lam = complex(lam)
    re = 0.0 if abs(lam.real) < 1e-12 * max(1.0, abs(lam)) else lam.real
    im = 0.0 if abs(lam.imag) < 1e-12 * max(1.0, abs(lam)) else lam.imag
    if im == 0:
        return f"{re:.6g}"
    if re == 0:
        return f"{im:.6g}i"
    return f"{re:.6g}{im:+.6g}i"


def haar_orthogonal(n, rng, complex_=False):
    """Draw an orthogonal (or unitary) n x n matrix from ``rng``.

    QR of a Gaussian matrix with the diagonal of R normalised to be positive,
    which makes the factorisation unique and the result Haar distributed.
    """
    Z = rng.standard_normal((n, n))
    if complex_:
        Z = Z + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    phase = d / np.abs(d)
    return Q * phase


def random_orthogonal(n, seed):
    """Deterministic random orthogonal matrix for a given ``(n, seed)``."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return haar_orthogonal(n, np.random.default_rng(seed))


def hadamard(X, Y):
    X = np.asarray(X)
    Y = np.asarray(Y)
    if X.shape != Y.shape:
        raise ShapeError(f"shape mismatch: {X.shape} vs {Y.shape}")
    return X * Y


def frobenius_norm(X):
    return float(np.linalg.norm(X))


def relative_residual(X, M):
    """``||X - M||_F / max(||M||_F, 1)``."""
    return float(np.linalg.norm(X - M) / max(np.linalg.norm(M), 1.0))
