from .checks import CheckReport, CheckResult, run_checks
from .config import ExperimentConfig, load_config
from .experiments import ConvergenceResult, ConvergenceRow, run_convergence, run_spectrum
from .reference import reference_spectrum

__all__ = [
    "CheckReport",
    "CheckResult",
    "ConvergenceResult",
    "ConvergenceRow",
    "ExperimentConfig",
    "load_config",
    "reference_spectrum",
    "run_checks",
    "run_convergence",
    "run_spectrum",
]
