"""Express a matrix as the difference of a matrix and its transpose inverse.

>>> import numpy as np
>>> from transinv import decompose_diff, reconstruct
>>> dec = decompose_diff(np.eye(2))
>>> np.allclose(reconstruct(dec), np.eye(2))
True
"""

__version__ = "0.1.0"

from .errors import (
    BranchCutError,
    InfeasibleError,
    NumericFailure,
    PreconditionError,
    RankDeficientError,
    ShapeError,
    SvdConvergenceError,
    TransInvError,
)
from .linalg import (
    SvdFactors,
    ToleranceConfig,
    compute_svd,
    frobenius_norm,
    hadamard,
    principal_matrix_sqrt,
    pseudoinverse,
    random_orthogonal,
    smallest_singular_value,
    transpose_inverse,
)
from .decomp import (
    Decomposition,
    Variant,
    decompose,
    decompose_diff,
    decompose_diff_complex,
    decompose_diff_pinv,
    decompose_diff_unitfill,
    decompose_nontranspose_diff,
    decompose_nontranspose_sum,
    decompose_sum,
    reconstruct,
    rga,
    spectral_shift,
    spectral_shift_sum,
)
from .props import EnsembleSpec, VerificationReport, generate_ensemble, run_suite
from .matrixio import MatrixFileFormat, read_matrix, write_matrix, write_report
