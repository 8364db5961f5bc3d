"""Robust myopic control: probe-based local dynamics learning with worst-case safe selection.

The control loop repeatedly (1) applies m+1 affinely independent probe
controls over short intervals and observes the state at the boundaries,
(2) forms an affine direction estimate v(u, x) valid for any control u, and
(3) picks the next base control by maximizing a goodness function - either
on the observed trajectory (nominal) or over all constant-offset hypothesis
trajectories within a declared observation-error bound (robust max-min).
Hard safety constraints enter as NegInfinity goodness values.
"""

from .backend import BACKEND
from .core import (
    BoundedUniform,
    ConstantOffset,
    ControlGrid,
    GoodnessValue,
    LearnerConfig,
    NEG_INFINITY,
    NoiseModel,
    RegularityConstants,
    State,
    Trajectory,
    enumerate_grid,
    goodness_max,
)
from .learner import (
    LearnedDirection,
    ProbeRecord,
    ProbeSchedule,
    estimate_direction,
    make_schedule,
    solve_lambda,
)

__version__ = "0.1.0"
