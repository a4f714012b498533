"""Contrast-source reconstruction for 2-D inverse medium scattering.

Forward model on a pixel grid, the CSI and SOM solvers with their
l1-proximal (iteratively regularized) variants, and run diagnostics.
"""

from .numeric import inner, norms, soft_threshold
from .forward import (
    FarFieldData,
    Grid,
    IncidentData,
    Kernel,
    ScatteringOperators,
    SolverFailure,
    add_noise,
    apply_T,
    build_operators,
    compute_svd,
    far_field,
    solve_state,
    uniform_directions,
)
from .phantoms import bump_contrast, image_contrast, read_pgm, write_pgm
from .csi import CsiWeights, backprop_init, csi_objective, ircsi_run
from .som import build_split, irsom_run, som_objective
from .diagnostics import (
    IterationRecord,
    SelectionReport,
    discretization_residual,
    relative_error,
    selection_quantities,
    stationarity,
)

__all__ = [
    "inner", "norms", "soft_threshold",
    "FarFieldData", "Grid", "IncidentData", "Kernel", "ScatteringOperators",
    "SolverFailure", "add_noise", "apply_T", "build_operators", "compute_svd",
    "far_field", "solve_state", "uniform_directions",
    "bump_contrast", "image_contrast", "read_pgm", "write_pgm",
    "CsiWeights", "backprop_init", "csi_objective", "ircsi_run",
    "build_split", "irsom_run", "som_objective",
    "IterationRecord", "SelectionReport", "discretization_residual",
    "relative_error", "selection_quantities", "stationarity",
]
