"""Finite cell method with least-squares stabilized Nitsche boundary
conditions on C1 tensor-product B-splines."""

from .analysis import (
    ConvergenceTable,
    ErrorReport,
    bilinear_form,
    eoc,
    error_norms,
    loglog_slope,
)
from .assembly import MethodParams, ProblemData, SparseSymSystem, assemble_system
from .errors import (
    CapabilityError,
    ConfigurationError,
    DataError,
    FcmError,
    IndefiniteSystemError,
    OutOfDomainError,
    SingularSystemError,
    UnsupportedTopologyError,
)
from .geometry import (
    CutGeometry,
    CutMesh,
    DomainPolygon,
    ShiftSpec,
    boundary_layer_elements,
    cut_elements,
    make_disc_polygon,
)
from .harness import ExperimentConfig, load_config, manufactured_problem
from .kernels import USING_NUMBA
from .solve import (
    SolveReport,
    SpectrumReport,
    extreme_eigenvalues,
    jacobi_scale,
    solve_spd,
)
from .splines import (
    BackgroundGrid,
    TensorSplineSpace,
    build_space,
    eval_field,
    grid_covering,
)

__version__ = "0.1.0"

__all__ = [
    "BackgroundGrid",
    "CapabilityError",
    "ConfigurationError",
    "ConvergenceTable",
    "CutGeometry",
    "CutMesh",
    "DataError",
    "DomainPolygon",
    "ErrorReport",
    "ExperimentConfig",
    "FcmError",
    "IndefiniteSystemError",
    "MethodParams",
    "OutOfDomainError",
    "ProblemData",
    "ShiftSpec",
    "SingularSystemError",
    "SolveReport",
    "SparseSymSystem",
    "SpectrumReport",
    "TensorSplineSpace",
    "UnsupportedTopologyError",
    "USING_NUMBA",
    "assemble_system",
    "bilinear_form",
    "boundary_layer_elements",
    "build_space",
    "cut_elements",
    "eoc",
    "error_norms",
    "eval_field",
    "extreme_eigenvalues",
    "grid_covering",
    "jacobi_scale",
    "load_config",
    "loglog_slope",
    "make_disc_polygon",
    "manufactured_problem",
    "solve_spd",
    "__version__",
]
