"""Suboptimality bound evaluation and the realized-gap oracle.

The bound is the closed-form worst-case distance between the achieved
goodness and the best achievable goodness over the control set, in terms of
the dynamics bounds (M0, M1), the goodness Lipschitz constant L, the probe
parameters (m, epsilon, delta) and the observation error bound Delta. The
empirical gap measures the same quantity on a finished run, using the true
plant derivative - harness-side knowledge the controller never touches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RegularityConstants, Trajectory
from .harness import RunResult, Scenario, run

__all__ = ["BoundInputs", "theorem1_bound", "empirical_gap", "empirical_gaps"]


@dataclass(frozen=True)
class BoundInputs:
    consts: RegularityConstants
    m: int
    epsilon: float
    delta_probe: float
    Delta: float

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.epsilon <= 0 or self.delta_probe <= 0:
            raise ValueError("epsilon and delta_probe must be positive")
        if self.Delta < 0:
            raise ValueError(f"Delta must be >= 0, got {self.Delta}")


def theorem1_bound(b: BoundInputs) -> float:
    """Worst-case goodness gap at learning-cycle end times.

    8 L M0 M1 (m+1)^3 (4 m^{3/2} + delta) eps/delta
      + 2 L (3 Delta + (4 Delta / eps) (1 + 4 m sqrt(m) / delta))
    """
    L, M0, M1 = b.consts.L, b.consts.M0, b.consts.M1
    m, eps, delta = b.m, b.epsilon, b.delta_probe
    learning = 8.0 * L * M0 * M1 * (m + 1) ** 3 * (4.0 * m**1.5 + delta) * eps / delta
    observation = 2.0 * L * (3.0 * b.Delta + (4.0 * b.Delta / eps) * (1.0 + 4.0 * m * np.sqrt(m) / delta))
    return learning + observation


def empirical_gaps(scenario: Scenario, result: RunResult | None = None) -> np.ndarray:
    """Realized per-cycle gap |G at the chosen control - max over the grid|.

    Both sides are evaluated with the true plant derivative on the true
    trajectory, at the cycle-end times where controls were selected. Returns
    +inf for cycles where either side is NegInfinity.
    """
    if result is None:
        result = run(scenario)
    G = scenario.goodness
    gaps = np.empty(len(result.decisions))
    for k, rec in enumerate(result.decisions):
        i = int(np.searchsorted(result.times, rec.t))
        if not np.isclose(result.times[i], rec.t):
            raise ValueError(f"decision time {rec.t} is not an observation instant")
        x_true = result.states_true[i]
        phi_true = Trajectory(result.times[: i + 1], result.states_true[: i + 1])
        values = [
            G.evaluate(phi_true, scenario.plant.deriv(x_true, u)) for u in scenario.grid.points
        ]
        chosen = G.evaluate(phi_true, scenario.plant.deriv(x_true, rec.decision.u))
        best = max(values)
        if not (best.is_finite and chosen.is_finite):
            gaps[k] = np.inf
        else:
            gaps[k] = abs(best.value - chosen.value)
    return gaps


def empirical_gap(scenario: Scenario, cycle_index: int, result: RunResult | None = None) -> float:
    """The realized gap at one cycle end (cycles indexed from 0)."""
    gaps = empirical_gaps(scenario, result)
    if not 0 <= cycle_index < gaps.size:
        raise IndexError(f"cycle {cycle_index} out of range (run had {gaps.size} cycles)")
    return float(gaps[cycle_index])
