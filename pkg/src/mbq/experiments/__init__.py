"""Multi-run studies: manufactured solutions, decay, stability, wall variants."""

from .initial import InitialCondition, stream_function
from .mms import ConvergenceTable, continuous_forcing, discrete_forcing, exact_arrays, run_mms
from .simulate import RunResult, simulate
from .studies import (
    BCCell,
    BCMatrixReport,
    DecayReport,
    StabilityReport,
    decay_report,
    mean_drift_constant,
    run_bc_matrix,
    run_config,
    run_decay,
    run_stability,
)

__all__ = [
    "BCCell",
    "BCMatrixReport",
    "ConvergenceTable",
    "DecayReport",
    "InitialCondition",
    "RunResult",
    "StabilityReport",
    "continuous_forcing",
    "decay_report",
    "discrete_forcing",
    "exact_arrays",
    "mean_drift_constant",
    "run_bc_matrix",
    "run_config",
    "run_decay",
    "run_mms",
    "run_stability",
    "simulate",
    "stream_function",
]
