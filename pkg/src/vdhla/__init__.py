"""Variable-depth hybrid learning automata, their baselines and test beds."""

from .automata import (
    FSLA,
    VASLA,
    VSLA,
    AutomatonState,
    DegenerateVectorError,
    PureChance,
    UpdateScheme,
    make_scheme,
    vasla_scale,
    vasla_update,
    vsla_update,
)
from .environments import (
    MarkovSwitchingEnv,
    StateDependentEnv,
    StationaryEnv,
    SteadyStateError,
    effective_stationary,
    steady_state,
)
from .hybrid import AVDHLA, SVDHLA, DepthAction, HybridAutomaton

__version__ = "0.1.0"

__all__ = [
    "AVDHLA", "FSLA", "SVDHLA", "VASLA", "VSLA", "AutomatonState", "DegenerateVectorError",
    "DepthAction", "HybridAutomaton", "MarkovSwitchingEnv", "PureChance", "StateDependentEnv",
    "StationaryEnv", "SteadyStateError", "UpdateScheme", "effective_stationary", "make_scheme",
    "steady_state", "vasla_scale", "vasla_update", "vsla_update",
]
