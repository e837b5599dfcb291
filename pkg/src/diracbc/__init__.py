"""Forward and inverse solvers for the one-dimensional dynamical Dirac system.

The forward map takes real potentials ``p, q`` on ``[0, T]`` to the response
function ``r`` on ``[0, 2T]``; the inverse map recovers ``p, q`` from ``r``
through the connecting operator and the per-``xi`` kernel equations.
"""

from ._backend import BACKEND
from .connecting import (
    ConnectingKernel,
    DiscreteConnectingOperator,
    DiscreteControlOperator,
    PositivityReport,
    assemble_discrete_C,
    assemble_discrete_W,
    build_connecting_kernel,
    check_positive_definite,
    factorization_residual,
)
from .core import (
    BoundaryControl,
    Grid,
    Potential,
    ResponseFunction,
    lint_control,
    make_grid,
    sample_control,
    sample_potential,
    trapezoid_weights,
)
from .errors import (
    DiracBCError,
    FormatError,
    IllPosedDataError,
    InvalidArgumentError,
    NumericalError,
    SingularMatrixError,
)
from .forward import (
    CharacteristicField,
    FundamentalKernel,
    WaveField,
    apply_duhamel,
    apply_response_operator,
    diagonal_defect,
    fd_oracle,
    forward,
    response_from_kernel,
    solve_fundamental_kernel,
)
from .inverse import (
    GLKMRowSolution,
    InversionResult,
    InvertOptions,
    RecoveredDiagonal,
    invert,
    recover_diagonal,
    recover_potential,
    solve_glkm_at,
)
from .io import read_control, read_potential, read_response, write_control, write_potential, write_response
from .linalg import hermitian_min_eig, lu_solve
from .neumann import neumann_oracle

__version__ = "0.1.0"
