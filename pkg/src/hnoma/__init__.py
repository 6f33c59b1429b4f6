"""Monte-Carlo evaluation of eMBB/URLLC coexistence in a multi-cell fog radio access network."""
from .engine import RateReport, Scenario, run_experiment, sweep
from .errors import (InfeasibleBudgetError, InfeasibleFronthaulError, InsufficientSamplesError,
                     InvalidParameterError, PrecoderConvergenceError)
from .model import SystemConfig, Topology, build_topology
from .schemes import SCHEME_NAMES, SchemeConfig

__all__ = [
    "RateReport", "Scenario", "run_experiment", "sweep",
    "InfeasibleBudgetError", "InfeasibleFronthaulError", "InsufficientSamplesError",
    "InvalidParameterError", "PrecoderConvergenceError",
    "SystemConfig", "Topology", "build_topology", "SCHEME_NAMES", "SchemeConfig",
]
