"""Hidden-orientation model of the two-particle singlet with exact oracles.

Subpackages by concern: ``model`` (the transformation law, densities,
sampling, measurement responses), ``analytic`` (closed-form predictions
and Bell/CHSH expressions), ``quantum`` (dense linear-algebra
reference), ``hidden_values`` (assigned polarization values and the
weak-value match), ``harness`` (seeded Monte Carlo runner), ``cli``.
"""

__version__ = "0.1.0"

from .analytic import (
    ChshSetting,
    JointDistribution,
    bell_inequality_sides,
    chsh_value,
    correlation,
    joint_probabilities,
)
from .harness import EstimateWithError, RunConfig, estimate_chsh, estimate_correlation
from .hidden_values import hidden_triple, verify_weak_value_match
from .model import (
    HiddenConfig,
    MeasurementSetting,
    TrialOutcome,
    b_frame_coordinate,
    circle_transform,
    circle_transform_n,
    measure_pair,
    orientation_density,
    response,
    sample_hidden,
    sample_orientations,
    wrap_angle,
)
from .quantum import bell_state, born_probabilities, heisenberg_evolve, weak_value

__all__ = [
    "ChshSetting",
    "EstimateWithError",
    "HiddenConfig",
    "JointDistribution",
    "MeasurementSetting",
    "RunConfig",
    "TrialOutcome",
    "__version__",
    "b_frame_coordinate",
    "bell_inequality_sides",
    "bell_state",
    "born_probabilities",
    "chsh_value",
    "circle_transform",
    "circle_transform_n",
    "correlation",
    "estimate_chsh",
    "estimate_correlation",
    "heisenberg_evolve",
    "hidden_triple",
    "joint_probabilities",
    "measure_pair",
    "orientation_density",
    "response",
    "sample_hidden",
    "sample_orientations",
    "verify_weak_value_match",
    "weak_value",
    "wrap_angle",
]
