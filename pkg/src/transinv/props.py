"""Property checks, random test ensembles and the verification suite.

A check never raises on a failed property; it returns a :class:`Check`
whose ``passed`` flag records ``residual <= tolerance``. Checks that do not
apply to an input are returned with ``skipped`` set to a reason.
"""

import hashlib
import sys
from dataclasses import dataclass, field

import numpy as np

from .decomp import (
    Variant,
    decompose,
    decompose_diff,
    partner_term,
    reconstruct,
    rga,
)
from .errors import NumericFailure, PreconditionError, TransInvError
from .linalg import (
    DEFAULT_TOL,
    as_matrix,
    compute_svd,
    haar_orthogonal,
    random_orthogonal,
    relative_residual,
    transpose_inverse,
)

__all__ = [
    "Check",
    "VerificationReport",
    "EnsembleSpec",
    "ENSEMBLE_KINDS",
    "check_reconstruction",
    "check_doubly_stochastic",
    "check_rga_scaling_invariance",
    "check_orthonormal_consistency",
    "check_symmetric_identities",
    "generate_ensemble",
    "input_digest",
    "verify_matrix",
    "report_for",
    "run_suite",
]

ENSEMBLE_KINDS = ("gaussian", "prescribed_spectrum", "orthogonal", "rank_deficient",
                  "complex_gaussian")

# relative separation required between singular values for the consistency check
DISTINCT_SPECTRUM_GAP = 1e-6
PSD_SLACK = 1e-9
DOUBLY_STOCHASTIC_TOL = 1e-8
RGA_SCALING_TOL = 1e-10
CONSISTENCY_TOL = 1e-8

# stands in for an unbounded residual when a decomposition throws
_FAILED_RESIDUAL = sys.float_info.max


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float
    passed: bool
    skipped: str = None

    @classmethod
    def measure(cls, name, residual, tolerance):
        residual = float(residual)
        return cls(name, residual, float(tolerance), bool(residual <= tolerance))

    @classmethod
    def skip(cls, name, reason, tolerance=1.0):
        return cls(name, float("nan"), float(tolerance), False, reason)


@dataclass
class VerificationReport:
    variant: Variant
    seed: int
    input_digest: str
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks if c.skipped is None)

    @property
    def failed(self):
        return [c for c in self.checks if c.skipped is None and not c.passed]

    @property
    def skipped(self):
        return [c for c in self.checks if c.skipped is not None]


def input_digest(M):
    """SHA-256 over dtype, shape and raw bytes of ``M``."""
    arr = np.ascontiguousarray(M)
    h = hashlib.sha256()
    h.update(f"{arr.dtype.str}:{arr.shape}".encode())
    h.update(arr.tobytes())
    return h.hexdigest()


def check_reconstruction(M, dec, tol=DEFAULT_TOL.residual_rel_tol, tolerances=DEFAULT_TOL):
    """Relative residual of rebuilding ``M`` from ``dec``."""
    M = as_matrix(M, "M")
    R = reconstruct(dec, tolerances)
    if R.shape != M.shape:
        return Check.measure("reconstruction", _FAILED_RESIDUAL, tol)
    return Check.measure("reconstruction", relative_residual(R, M), tol)


def check_doubly_stochastic(P, tol=DOUBLY_STOCHASTIC_TOL, name="doubly_stochastic"):
    """Largest deviation of any row or column sum from 1.

    Entries may be negative; only the sums matter.
    """
    P = np.asarray(P)
    dev = max(np.max(np.abs(P.sum(axis=1) - 1)), np.max(np.abs(P.sum(axis=0) - 1)))
    return Check.measure(name, dev, tol)


def _diag_entries(d):
    d = np.asarray(d, dtype=np.float64)
    return np.diag(d) if d.ndim == 2 else d


def check_rga_scaling_invariance(G, d1, d2, tol=RGA_SCALING_TOL, tolerances=DEFAULT_TOL):
    """Compare ``rga(D1 G D2)`` with ``rga(G)`` elementwise.

    ``d1`` and ``d2`` may be given as vectors or as diagonal matrices.
    """
    G = as_matrix(G, "G")
    d1, d2 = _diag_entries(d1), _diag_entries(d2)
    base = rga(G, tolerances)
    scaled = rga(d1[:, None] * G * d2[None, :], tolerances)
    residual = np.linalg.norm(scaled - base) / max(np.linalg.norm(base), 1.0)
    return Check.measure("rga_scaling_invariance", residual, tol)


def _distinct_spectrum(s):
    if s.size < 2:
        return True
    return bool(np.min(-np.diff(s)) >= DISTINCT_SPECTRUM_GAP * s[0])


def check_orthonormal_consistency(M, R, tol=CONSISTENCY_TOL, tolerances=DEFAULT_TOL):
    """Residual of ``f(R M R^T) = R f(M) R^T`` where ``f`` maps ``M`` to ``A``.

    Skipped when two singular values of ``M`` are closer than
    ``DISTINCT_SPECTRUM_GAP`` relative to the largest.
    """
    M = as_matrix(M, "M")
    R = as_matrix(R, "R")
    s = compute_svd(M, tolerances).singular_values
    if not _distinct_spectrum(s):
        return Check.skip("orthonormal_consistency",
                          "singular values not separated by 1e-6 relative", tol)
    lhs = decompose_diff(R @ M @ R.T, tolerances).A
    rhs = R @ decompose_diff(M, tolerances).A @ R.T
    residual = np.linalg.norm(lhs - rhs) / max(np.linalg.norm(M), 1.0)
    return Check.measure("orthonormal_consistency", residual, tol)


def check_symmetric_identities(M, dec, tol=DEFAULT_TOL.residual_rel_tol, tolerances=DEFAULT_TOL):
    """Symmetric-difference identities implied by ``M = A - A^-T``.

    ``M A^T = A A^T - I`` and ``inv(A) M = I - inv(A^T A)``, together with
    symmetry of ``M A^T`` and positive semidefiniteness of ``A A^T``.
    """
    M = as_matrix(M, "M")
    A = dec.A
    n = A.shape[0]
    I = np.eye(n)
    scale = max(np.linalg.norm(M), 1.0)
    MAt = M @ A.T
    AAt = A @ A.T
    Ainv = transpose_inverse(A, tolerances).T
    checks = [
        Check.measure("symmetric_difference_transpose",
                      np.linalg.norm(MAt - (AAt - I)) / scale, tol),
        Check.measure("symmetric_difference_inverse",
                      np.linalg.norm(Ainv @ M - (I - np.linalg.inv(A.T @ A))) / scale, tol),
        Check.measure("symmetry_M_At",
                      np.linalg.norm(MAt - MAt.T) / max(np.linalg.norm(MAt), 1.0), tol),
    ]
    lam_min = float(np.min(np.linalg.eigvalsh(0.5 * (AAt + AAt.T))))
    checks.append(Check.measure("psd_A_At", max(0.0, -lam_min) / np.linalg.norm(AAt),
                                PSD_SLACK))
    return checks


@dataclass(frozen=True)
class EnsembleSpec:
    """Recipe for a reproducible batch of random matrices.

    ``condition_number`` applies only to ``prescribed_spectrum``; ``rank``
    applies only to ``rank_deficient`` (default ``min(rows, cols) - 1``).
    """

    rows: int
    cols: int
    kind: str = "gaussian"
    condition_number: float = None
    rank: int = None
    seed: int = 0
    count: int = 1

    def __post_init__(self):
        if self.kind not in ENSEMBLE_KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}; expected one of {ENSEMBLE_KINDS}")
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be positive")
        if self.count < 1:
            raise ValueError("count must be positive")
        if self.condition_number is not None:
            if self.kind != "prescribed_spectrum":
                raise ValueError("condition_number is only valid with prescribed_spectrum")
            if not self.condition_number >= 1:
                raise ValueError("condition_number must be >= 1")
        if self.rank is not None:
            if self.kind != "rank_deficient":
                raise ValueError("rank is only valid with rank_deficient")
            if not 0 <= self.rank <= min(self.rows, self.cols):
                raise ValueError(f"rank {self.rank} infeasible for {self.rows}x{self.cols}")
        if self.kind == "orthogonal" and self.rows != self.cols:
            raise ValueError("orthogonal ensembles must be square")


def _from_spectrum(rng, m, n, sigma):
    k = min(m, n)
    U = haar_orthogonal(m, rng)[:, :k]
    V = haar_orthogonal(n, rng)[:, :k]
    return (U * sigma) @ V.T


def generate_ensemble(spec):
    """Materialise ``spec.count`` matrices; identical specs give identical output."""
    rng = np.random.default_rng(spec.seed)
    m, n = spec.rows, spec.cols
    k = min(m, n)
    out = []
    for _ in range(spec.count):
        if spec.kind == "gaussian":
            M = rng.standard_normal((m, n))
        elif spec.kind == "complex_gaussian":
            M = (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2)
        elif spec.kind == "orthogonal":
            M = haar_orthogonal(n, rng)
        elif spec.kind == "prescribed_spectrum":
            cond = 10.0 if spec.condition_number is None else spec.condition_number
            top = np.log10(cond)
            logs = np.concatenate([[0.0], rng.uniform(-top, 0.0, max(k - 2, 0)), [-top]])[:k]
            if k == 1:
                logs = np.zeros(1)
            M = _from_spectrum(rng, m, n, 10.0 ** np.sort(logs)[::-1])
        else:
            r = max(k - 1, 0) if spec.rank is None else spec.rank
            sigma = np.zeros(k)
            sigma[:r] = np.sort(10.0 ** rng.uniform(-1.0, 0.0, r))[::-1]
            M = _from_spectrum(rng, m, n, sigma)
        out.append(M)
    return out


def _applicability(M, variant, tol):
    """Reason why ``variant`` cannot be applied to ``M``, or None."""
    m, n = M.shape
    is_complex = np.iscomplexobj(M) and np.any(M.imag != 0)
    if variant is Variant.DiffConjugate:
        if m != n:
            return "requires square input"
    else:
        if is_complex:
            return "requires real input"
        if variant is Variant.DiffPseudoinverse:
            return None
        if m != n:
            return "requires square input"
    if variant in (Variant.DiffUnitFill, Variant.NonTransposeDiff):
        return None
    F = compute_svd(M, tol)
    if F.rank < n:
        return f"requires nonsingular input (rank {F.rank} < {n})"
    return None


def _variant_checks(M, dec, tol, seed):
    v = dec.variant
    A = dec.A
    rtol = tol.residual_rel_tol
    n = A.shape[0]
    checks = []
    if v in (Variant.DiffNonsingular, Variant.DiffUnitFill):
        smin = compute_svd(A, tol).singular_values[-1]
        checks.append(Check.measure("singular_value_floor", max(0.0, 1.0 - smin), rtol))
    if v is Variant.DiffNonsingular:
        checks.append(check_doubly_stochastic(A * partner_term(dec, tol),
                                              name="rga_doubly_stochastic"))
        checks.extend(check_symmetric_identities(M, dec, rtol, tol))
        rng = np.random.default_rng(seed)
        d1 = 10.0 ** rng.uniform(-3, 3, n)
        d2 = 10.0 ** rng.uniform(-3, 3, n)
        checks.append(check_rga_scaling_invariance(A, d1, d2, RGA_SCALING_TOL, tol))
        checks.append(check_orthonormal_consistency(M, random_orthogonal(n, seed),
                                                    CONSISTENCY_TOL, tol))
    elif v is Variant.DiffPseudoinverse:
        rank_a = compute_svd(A, tol).rank if A.any() else 0
        checks.append(Check.measure("rank_preservation", abs(rank_a - dec.effective_rank), 0.5))
    elif v is Variant.SumScaled:
        smin = compute_svd(M / dec.scale_c, tol).singular_values[-1]
        checks.append(Check.measure("scaled_sigma_min", abs(smin - 2.0) / 2.0, rtol))
    elif v is Variant.NonTransposeDiff:
        res = np.linalg.norm(A @ (A - M) - np.eye(n)) / n
        checks.append(Check.measure("inverse_identity", res, rtol))
    elif v is Variant.NonTransposeSum:
        res = np.linalg.norm(A @ (A - M / dec.scale_c) + np.eye(n)) / n
        checks.append(Check.measure("inverse_identity", res, rtol))
    return checks


def verify_matrix(M, variant, tol=DEFAULT_TOL, seed=0, scale=None):
    """Decompose ``M`` with ``variant`` and run every applicable check.

    Returns the report and the decomposition (None if it was not built).
    """
    M = as_matrix(M, "M")
    variant = Variant(variant)
    report = VerificationReport(variant, int(seed), input_digest(M))
    reason = _applicability(M, variant, tol)
    if reason is not None:
        report.checks.append(Check.skip("decompose", reason))
        return report, None
    try:
        dec = decompose(M, variant, tol, scale)
    except PreconditionError as exc:
        report.checks.append(Check.skip("decompose", str(exc)))
        return report, None
    except NumericFailure:
        report.checks.append(Check.measure("decompose", _FAILED_RESIDUAL, tol.residual_rel_tol))
        return report, None
    return report_for(M, dec, tol, seed, report), dec


def report_for(M, dec, tol=DEFAULT_TOL, seed=0, report=None):
    """Run the reconstruction check and the variant's property checks on ``dec``."""
    M = as_matrix(M, "M")
    if report is None:
        report = VerificationReport(dec.variant, int(seed), input_digest(M))
    report.checks.append(check_reconstruction(M, dec, tol.residual_rel_tol, tol))
    try:
        report.checks.extend(_variant_checks(M, dec, tol, seed))
    except TransInvError as exc:
        report.checks.append(Check.measure(f"checks_aborted: {exc}", _FAILED_RESIDUAL,
                                           tol.residual_rel_tol))
    return report


def run_suite(specs, variants, tol=DEFAULT_TOL):
    """Run ``verify_matrix`` over every generated matrix and variant.

    Reports are ordered by spec index, then matrix index, then the order of
    ``variants``.
    """
    variants = [Variant(v) for v in variants]
    reports = []
    for spec in specs:
        for M in generate_ensemble(spec):
            for variant in variants:
                report, _ = verify_matrix(M, variant, tol, spec.seed)
                reports.append(report)
    return reports
