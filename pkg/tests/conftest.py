"""Shared test fixtures: probe-record builders and simple goodness functions."""

from __future__ import annotations

import numpy as np
import pytest

from myopic.core import GoodnessValue, LearnerConfig
from myopic.goodness import GoodnessFn
from myopic.learner import LearnedDirection, ProbeRecord, make_schedule


def integrator_probe_record(m: int, eps: float = 0.5, delta: float = 1.0, base=None,
                            x0=None, t0: float = 0.0) -> ProbeRecord:
    """Probe record of the pure integrator x' = u (n = m), built in closed form.

    x_{j+1} = x_j + eps * (u* + du_j), so the learned direction reproduces any
    query control exactly.
    """
    cfg = LearnerConfig(m, eps, delta)
    base = np.zeros(m) if base is None else np.asarray(base, dtype=float)
    sched = make_schedule(base, cfg)
    x = np.zeros(m) if x0 is None else np.asarray(x0, dtype=float)
    states = [x]
    for j in range(m + 1):
        x = x + eps * sched.controls[j]
        states.append(x)
    return ProbeRecord(np.vstack(states), sched, t0)


class VelocityTargetGoodness(GoodnessFn):
    """-||v - v_ref||: finite everywhere, Lipschitz constant exactly 1 in v."""

    lipschitz = 1.0

    def __init__(self, v_ref):
        self.v_ref = np.atleast_1d(np.asarray(v_ref, dtype=float))

    def evaluate(self, phi, v):
        return GoodnessValue.finite(-float(np.linalg.norm(v - self.v_ref)))


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def learned(record: ProbeRecord) -> LearnedDirection:
    return LearnedDirection(record)
