"""Transpose-inverse splittings ``M = A - A^-T`` and their relatives.

Every constructor returns an immutable :class:`Decomposition` whose
``residual_rel`` was measured by rebuilding ``M`` from ``A`` at
construction time; a record that fails that check is never returned.

The SVD-based forms act on singular values one at a time through the
scalar maps :func:`spectral_shift` (difference) and
:func:`spectral_shift_sum` (sum). The non-transpose forms apply the same
maps to the whole matrix through a principal square root.
"""

import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    BranchCutError,
    InfeasibleError,
    NumericFailure,
    PreconditionError,
    RankDeficientError,
    ShapeError,
)
from .linalg import (
    DEFAULT_TOL,
    as_matrix,
    compute_svd,
    principal_matrix_sqrt,
    pseudoinverse,
    relative_residual,
    transpose_inverse,
    _format_eig,
    _dedupe,
)

__all__ = [
    "Variant",
    "Decomposition",
    "spectral_shift",
    "spectral_shift_sum",
    "decompose",
    "decompose_diff",
    "decompose_diff_pinv",
    "decompose_diff_unitfill",
    "decompose_diff_complex",
    "decompose_sum",
    "decompose_nontranspose_diff",
    "decompose_nontranspose_sum",
    "partner_term",
    "reconstruct",
    "rga",
]

# relative slack below d = 2 still accepted by the sum root (rounds to e = 1)
SUM_FEASIBILITY_SLACK = 1e-12


class Variant(str, enum.Enum):
    DiffNonsingular = "DiffNonsingular"
    DiffPseudoinverse = "DiffPseudoinverse"
    DiffUnitFill = "DiffUnitFill"
    DiffConjugate = "DiffConjugate"
    SumScaled = "SumScaled"
    NonTransposeDiff = "NonTransposeDiff"
    NonTransposeSum = "NonTransposeSum"

    @property
    def cli_name(self):
        return _CLI_NAMES[self]

    @classmethod
    def from_cli(cls, name):
        for variant, cli in _CLI_NAMES.items():
            if cli == name:
                return variant
        raise ValueError(f"unknown variant {name!r}")

    @property
    def is_scaled(self):
        return self in (Variant.SumScaled, Variant.NonTransposeSum)


_CLI_NAMES = {
    Variant.DiffNonsingular: "diff",
    Variant.DiffPseudoinverse: "diff-pinv",
    Variant.DiffUnitFill: "diff-unitfill",
    Variant.DiffConjugate: "diff-complex",
    Variant.SumScaled: "sum",
    Variant.NonTransposeDiff: "nt-diff",
    Variant.NonTransposeSum: "nt-sum",
}


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Result of a splitting.

    Attributes
    ----------
    variant : Variant
    A : ndarray
        The constructed factor.
    scale_c : float
        Outer scale for the sum forms, 1 for the difference forms.
    effective_rank : int
        Rank of the input at the rank tolerance.
    sigma_min : float
        Smallest singular value of the input (smallest nonzero one for
        ``DiffPseudoinverse``).
    residual_rel : float
        ``||reconstruct(self) - M||_F / max(||M||_F, 1)``.
    """

    variant: Variant
    A: np.ndarray
    scale_c: float
    effective_rank: int
    sigma_min: float
    residual_rel: float

    def partner(self, tol=None):
        """The second term paired with ``A``: ``A^-T``, ``pinv(A)^T``, ``inv(A)^H`` or ``inv(A)``."""
        return partner_term(self, DEFAULT_TOL if tol is None else tol)


def _validate_scalar(d, name="d"):
    arr = np.asarray(d, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite, got {d!r}")
    return arr


def _out(arr, d):
    return float(arr) if np.ndim(d) == 0 else arr


def spectral_shift(d):
    """Nonnegative root ``e`` of ``e - 1/e = d``.

    Accepts a scalar or an array of nonnegative values; ``e >= 1`` always.

    >>> spectral_shift(0.0)
    1.0
    >>> round(spectral_shift(1.0), 10)
    1.6180339887
    """
    arr = _validate_scalar(d)
    if np.any(arr < 0):
        raise ValueError(f"d must be nonnegative, got {d!r}")
    return _out(0.5 * (arr + np.hypot(arr, 2.0)), d)


def spectral_shift_sum(d):
    """Larger root ``e`` of ``e + 1/e = d``; real only for ``d >= 2``.

    Values within ``SUM_FEASIBILITY_SLACK`` (relative) below 2 are treated
    as the double root ``e = 1``.

    Raises
    ------
    InfeasibleError
        If some ``d < 2 (1 - SUM_FEASIBILITY_SLACK)``.
    """
    arr = _validate_scalar(d)
    if np.any(arr < 2.0 * (1.0 - SUM_FEASIBILITY_SLACK)):
        worst = float(np.min(arr))
        raise InfeasibleError(
            f"e + 1/e = d has no real solution for d = {worst!r} < 2"
        )
    # (d - 2)(d + 2) avoids cancellation in d**2 - 4 near d = 2
    disc = np.maximum((arr - 2.0) * (arr + 2.0), 0.0)
    return _out(np.maximum(0.5 * (arr + np.sqrt(disc)), 1.0), d)


def _real_input(M, redirect):
    M = as_matrix(M, "M")
    if np.iscomplexobj(M):
        if np.any(M.imag != 0):
            raise PreconditionError(f"M has nonzero imaginary part; use {redirect}")
        M = M.real.copy()
    return M


def _square(M):
    if M.shape[0] != M.shape[1]:
        raise ShapeError(f"M must be square, got {M.shape[0]}x{M.shape[1]}")


def _require_full_rank(F, n, hint):
    if F.rank < n:
        smin = float(F.singular_values[-1])
        raise RankDeficientError(
            f"M is singular at rank tolerance (rank {F.rank} < {n}, "
            f"sigma_min={smin:.3g}); {hint}",
            sigma_min=smin,
        )


def _finish(variant, M, A, tol, scale_c=1.0, rank=None, sigma_min=0.0):
    dec = Decomposition(variant, A, float(scale_c), int(rank), float(sigma_min), 0.0)
    residual = relative_residual(reconstruct(dec, tol), M)
    if not residual <= tol.residual_rel_tol:
        raise NumericFailure(
            f"{variant.value}: reconstruction residual {residual:.3g} exceeds "
            f"{tol.residual_rel_tol:.3g}"
        )
    return replace(dec, residual_rel=residual)


def decompose_diff(M, tol=DEFAULT_TOL):
    """Split a real nonsingular square ``M`` as ``A - A^-T``.

    With ``M = U diag(s) V^T`` the factor is ``A = U diag(e) V^T`` where
    ``e = spectral_shift(s)``, so every singular value of ``A`` is at least 1.
    """
    M = _real_input(M, "the conjugate variant")
    _square(M)
    F = compute_svd(M, tol)
    _require_full_rank(F, M.shape[0], "use the pseudoinverse or unit-fill variant")
    e = spectral_shift(F.singular_values)
    A = (F.U * e) @ F.V.T
    return _finish(Variant.DiffNonsingular, M, A, tol,
                   rank=F.rank, sigma_min=F.singular_values[-1])


def decompose_diff_pinv(M, tol=DEFAULT_TOL):
    """Split a real matrix of any shape and rank as ``A - pinv(A)^T``.

    Only singular values above the rank tolerance are mapped, so ``A`` has
    the same rank as ``M``.
    """
    M = _real_input(M, "the conjugate variant")
    F = compute_svd(M, tol)
    r = F.rank
    e = spectral_shift(F.singular_values[:r])
    A = (F.U[:, :r] * e) @ F.V[:, :r].T
    smin = F.singular_values[r - 1] if r else 0.0
    return _finish(Variant.DiffPseudoinverse, M, A, tol, rank=r, sigma_min=smin)


def decompose_diff_unitfill(M, tol=DEFAULT_TOL):
    """Split a real square, possibly singular, ``M`` as ``A - A^-T`` with ``A`` nonsingular.

    Singular values below the rank tolerance become 1 in ``A``; they cancel
    against their reciprocals. The null-space bases come from the SVD
    routine, so ``A`` is not unique when ``M`` is singular.
    """
    M = _real_input(M, "the conjugate variant")
    _square(M)
    F = compute_svd(M, tol, full=True)
    s = F.singular_values
    e = np.where(s > F.rank_tol, spectral_shift(s), 1.0)
    A = (F.full_U * e) @ F.full_V.T
    return _finish(Variant.DiffUnitFill, M, A, tol, rank=F.rank, sigma_min=s[-1])


def decompose_diff_complex(M, tol=DEFAULT_TOL):
    """Split a complex nonsingular square ``M`` as ``A - inv(A)^H``."""
    M = as_matrix(M, "M").astype(np.complex128)
    _square(M)
    F = compute_svd(M, tol)
    _require_full_rank(F, M.shape[0], "the conjugate variant needs nonsingular input")
    e = spectral_shift(F.singular_values)
    A = (F.U * e) @ F.V.conj().T
    return _finish(Variant.DiffConjugate, M, A, tol,
                   rank=F.rank, sigma_min=F.singular_values[-1])


def decompose_sum(M, tol=DEFAULT_TOL, scale=None):
    """Split a real nonsingular square ``M`` as ``c (A + A^-T)``.

    The default ``c = sigma_min / 2`` rescales ``M`` so its smallest singular
    value is exactly 2, the threshold below which the sum root is complex.
    Passing ``scale`` fixes ``c`` instead; ``scale=1`` is the unscaled form.

    Raises
    ------
    RankDeficientError
        Singular input (zero singular values cannot cancel in a sum).
    InfeasibleError
        ``sigma_min(M) / scale < 2``.
    """
    M = _real_input(M, "a real matrix")
    _square(M)
    F = compute_svd(M, tol)
    _require_full_rank(F, M.shape[0], "the sum form has no singular treatment")
    s = F.singular_values
    c = s[-1] / 2.0 if scale is None else float(scale)
    if not (np.isfinite(c) and c > 0):
        raise PreconditionError(f"scale must be positive, got {scale!r}")
    try:
        e = spectral_shift_sum(s / c)
    except InfeasibleError as exc:
        raise InfeasibleError(
            f"sigma_min(M)/c = {s[-1] / c:.17g} < 2: M = c(A + A^-T) has no real A; "
            "omit the scale to use c = sigma_min/2"
        ) from exc
    A = (F.U * e) @ F.V.T
    return _finish(Variant.SumScaled, M, A, tol, scale_c=c,
                   rank=F.rank, sigma_min=s[-1])


def _branch_error(exc, M, shift, hint):
    # translate offending eigenvalues of M@M + shift*I back to eigenvalues of M
    lam = np.linalg.eigvals(M)
    offending = []
    for mu in exc.eigenvalues:
        dist = np.abs(lam * lam + shift - mu)
        offending.extend(lam[dist <= 1e-8 * max(1.0, abs(mu))])
    names = ", ".join(_format_eig(v) for v in _dedupe(offending)) or "(unresolved)"
    return BranchCutError(f"{exc} (M has eigenvalue(s) {names}); {hint}",
                          eigenvalues=offending)


def decompose_nontranspose_diff(M, tol=DEFAULT_TOL):
    """Split a real square ``M`` as ``A - inv(A)``.

    ``A = (M + sqrt(M^2 + 4I)) / 2`` with the principal square root. Since
    the root commutes with ``M``, ``A (A - M) = I`` and ``inv(A) = A - M``.

    Raises
    ------
    BranchCutError
        ``M`` has an eigenvalue ``+-iy`` with ``y >= 2`` (up to the margin).
    """
    M = _real_input(M, "a real matrix")
    _square(M)
    n = M.shape[0]
    I = np.eye(n)
    try:
        X = principal_matrix_sqrt(M @ M + 4.0 * I, tol)
    except BranchCutError as exc:
        raise _branch_error(exc, M, 4.0, "M = A - inv(A) has no principal solution") from exc
    A = 0.5 * (M + X)
    identity_residual = np.linalg.norm(A @ (A - M) - I)
    if identity_residual > tol.residual_rel_tol * n:
        raise NumericFailure(f"A(A - M) = I violated by {identity_residual:.3g}")
    F = compute_svd(M, tol)
    return _finish(Variant.NonTransposeDiff, M, A, tol,
                   rank=F.rank, sigma_min=F.singular_values[-1])


def decompose_nontranspose_sum(M, c=None, tol=DEFAULT_TOL):
    """Split a real nonsingular square ``M`` as ``c (A + inv(A))``.

    With ``N = M / c``, ``A = (N + sqrt(N^2 - 4I)) / 2`` and
    ``A (A - N) = -I``, so ``inv(A) = N - A``. ``c`` defaults to
    ``sigma_min / 2``; an eigenvalue of ``N^2 - 4I`` exactly at the origin
    (``N`` having eigenvalue +-2, typical of symmetric input at the default
    scale) is accepted when its square root verifies.
    """
    M = _real_input(M, "a real matrix")
    _square(M)
    n = M.shape[0]
    F = compute_svd(M, tol)
    _require_full_rank(F, n, "the sum form has no singular treatment")
    smin = F.singular_values[-1]
    c = smin / 2.0 if c is None else float(c)
    if not (np.isfinite(c) and c > 0):
        raise PreconditionError(f"c must be positive, got {c!r}")
    N = M / c
    I = np.eye(n)
    try:
        X = principal_matrix_sqrt(N @ N - 4.0 * I, tol, allow_singular=True)
    except BranchCutError as exc:
        raise _branch_error(exc, N, -4.0, f"try a different scale than c = {c:.6g}") from exc
    A = 0.5 * (N + X)
    # N = M/c can be large when sigma_min is small; measure against the
    # rounding scale of the product rather than absolutely
    AmN = A - N
    identity_residual = np.linalg.norm(A @ AmN + I) / max(
        1.0, np.linalg.norm(A) * np.linalg.norm(AmN))
    if identity_residual > tol.residual_rel_tol * n:
        raise NumericFailure(f"A(A - M/c) = -I violated by {identity_residual:.3g}")
    return _finish(Variant.NonTransposeSum, M, A, tol, scale_c=c,
                   rank=F.rank, sigma_min=smin)


_CONSTRUCTORS = {
    Variant.DiffNonsingular: decompose_diff,
    Variant.DiffPseudoinverse: decompose_diff_pinv,
    Variant.DiffUnitFill: decompose_diff_unitfill,
    Variant.DiffConjugate: decompose_diff_complex,
    Variant.SumScaled: decompose_sum,
    Variant.NonTransposeDiff: decompose_nontranspose_diff,
    Variant.NonTransposeSum: decompose_nontranspose_sum,
}


def decompose(M, variant, tol=DEFAULT_TOL, scale=None):
    """Dispatch to the constructor for ``variant``."""
    variant = Variant(variant)
    if variant is Variant.NonTransposeSum:
        return decompose_nontranspose_sum(M, scale, tol)
    if variant is Variant.SumScaled:
        return decompose_sum(M, tol, scale)
    if scale is not None:
        raise PreconditionError(f"a scale only applies to the sum variants, not {variant.value}")
    return _CONSTRUCTORS[variant](M, tol)


def partner_term(dec, tol=DEFAULT_TOL):
    A, v = dec.A, dec.variant
    if v in (Variant.DiffNonsingular, Variant.DiffUnitFill, Variant.SumScaled):
        return transpose_inverse(A, tol)
    if v is Variant.DiffPseudoinverse:
        F = replace(compute_svd(A, tol), rank=dec.effective_rank)
        return pseudoinverse(F).T
    if v is Variant.DiffConjugate:
        return transpose_inverse(A, tol, conjugate=True)
    if v in (Variant.NonTransposeDiff, Variant.NonTransposeSum):
        return transpose_inverse(A, tol).T
    raise ValueError(f"unknown variant {v!r}")


def reconstruct(dec, tol=DEFAULT_TOL):
    """Evaluate the right-hand side of the splitting stored in ``dec``."""
    B = partner_term(dec, tol)
    if dec.variant.is_scaled:
        return dec.scale_c * (dec.A + B)
    return dec.A - B


def _pow2_equilibrate(G, sweeps=3):
    # power-of-two scalings are exact, so the RGA is unchanged bit for bit
    # apart from the inversion itself
    G = G.copy()
    for _ in range(sweeps):
        for axis in (1, 0):
            mx = np.max(np.abs(G), axis=axis)
            _, exp = np.frexp(np.where(mx > 0, mx, 1.0))
            scale = np.ldexp(1.0, -exp)
            G = G * (scale[:, None] if axis == 1 else scale[None, :])
    return G


def rga(G, tol=DEFAULT_TOL):
    """Relative gain array ``G o inv(G)^T``.

    ``G`` is balanced by power-of-two row and column scalings first. The RGA
    is invariant under diagonal scaling, so this only changes rounding, and
    it keeps the rank test and the inversion from being fooled by badly
    scaled but well-posed input.
    """
    G = as_matrix(G, "G")
    if G.shape[0] != G.shape[1]:
        raise ShapeError(f"G must be square, got {G.shape[0]}x{G.shape[1]}")
    Gs = _pow2_equilibrate(G)
    return Gs * transpose_inverse(Gs, tol)
