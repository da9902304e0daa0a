"""Motif-aware state assignment for multivariate time series."""

from .core import (
    CollapsedSequence,
    Hyperparameters,
    Motif,
    MotifInstance,
    MotifSet,
    StateAssignment,
    TimeSeries,
    collapse,
    expand,
)
from .driver import MasaResult, check_convergence, run_masa
from .state_model import (
    GaussianState,
    StateModel,
    initialize,
    log_likelihood,
    propose_assignment,
    update_states_model,
)
from .synth import SynthConfig, gen_synthetic

__all__ = [
    "CollapsedSequence",
    "GaussianState",
    "Hyperparameters",
    "MasaResult",
    "Motif",
    "MotifInstance",
    "MotifSet",
    "StateAssignment",
    "StateModel",
    "SynthConfig",
    "TimeSeries",
    "check_convergence",
    "collapse",
    "expand",
    "gen_synthetic",
    "initialize",
    "log_likelihood",
    "propose_assignment",
    "run_masa",
    "update_states_model",
]
