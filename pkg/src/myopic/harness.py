"""Closed-loop experiment harness: scenario contract, run loop, sweeps, output files.

The loop alternates probe cycles (apply u+ + du_j over epsilon-intervals,
observing at the boundaries) with control selection on the observed data.
True states stay on the simulator side of the fence: they drive the plant,
event detection, and metrics, never the controller.
"""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import (
    ControlGrid,
    LearnerConfig,
    NoiseModel,
    State,
    Trajectory,
    as_vector,
)
from .goodness import GoodnessFn
from .learner import LearnedDirection, ProbeRecord, make_schedule
from .optimizer import Decision, PerturbationSet, nominal_select, robust_select
from .plants import IntegratorConfig, Plant, observe, rollout
from .safety import SurfaceModel, UnsafeSet

__all__ = [
    "Scenario",
    "Outcome",
    "DecisionRecord",
    "RunResult",
    "ScenarioError",
    "run",
    "sweep",
    "emit",
]

SWEEPABLE_PARAMETERS = ("error", "delta_ratio", "mode", "tau", "epsilon", "seed")


class ScenarioError(ValueError):
    """Invalid scenario configuration (named field in the message)."""


@dataclass(frozen=True)
class Scenario:
    """Everything one closed-loop experiment needs, fully validated."""

    name: str
    kind: str                      # "obstacle" | "landing" | "custom"
    plant: Plant
    x0: np.ndarray
    goodness: GoodnessFn
    learner: LearnerConfig
    grid: ControlGrid
    integrator: IntegratorConfig
    noise: NoiseModel | None = None
    mode: str = "nominal"          # "nominal" | "robust"
    pset: PerturbationSet | None = None
    unsafe: UnsafeSet | None = None
    surface: SurfaceModel | None = None
    target_position: np.ndarray | None = None
    target_radius: float | None = None
    time_limit: float = 100.0
    seed: int = 0
    raw: dict | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "x0", as_vector(self.x0, "initial state"))
        if self.target_position is not None:
            object.__setattr__(
                self, "target_position", as_vector(self.target_position, "target position")
            )
        self.validate()

    def validate(self) -> None:
        n, m = self.plant.n, self.plant.m
        if self.x0.size != n:
            raise ScenarioError(f"initial state: expected dimension {n}, got {self.x0.size}")
        if self.learner.m != m:
            raise ScenarioError(
                f"learner m: {self.learner.m} does not match plant control dimension {m}"
            )
        if self.grid.m != m:
            raise ScenarioError(f"grid: control dimension {self.grid.m}, plant needs {m}")
        if self.mode not in ("nominal", "robust"):
            raise ScenarioError(f"mode: must be nominal or robust, got {self.mode!r}")
        if self.mode == "robust":
            if self.pset is None:
                raise ScenarioError("pset: robust mode needs a perturbation set")
            if self.pset.offsets.shape[1] != n:
                raise ScenarioError(
                    f"pset: offset dimension {self.pset.offsets.shape[1]}, state has {n}"
                )
        if self.kind == "landing":
            if self.surface is None:
                raise ScenarioError("surface: landing scenarios need a surface model")
            if self.target_position is None:
                raise ScenarioError("termination: landing scenarios need the landing site position")
        if self.kind == "obstacle" and (self.target_position is None or self.target_radius is None):
            raise ScenarioError("termination: obstacle scenarios need target position and radius")
        if self.time_limit <= 0:
            raise ScenarioError(f"time_limit: must be positive, got {self.time_limit}")
        self.integrator.substeps(self.learner.epsilon)  # h must divide epsilon


@dataclass(frozen=True)
class Outcome:
    """Terminal event of a run; `collided` means some true state entered the unsafe set."""

    kind: str                      # "landed" | "reached_target" | "collided" | "timed_out"
    t: float
    error: float | None = None
    location: np.ndarray | None = None


@dataclass(frozen=True)
class DecisionRecord:
    """One selection event: made at time t, applied over the following cycle."""

    t: float
    decision: Decision


@dataclass(frozen=True)
class RunResult:
    scenario: Scenario
    times: np.ndarray              # observation instants
    states_true: np.ndarray
    states_obs: np.ndarray
    fine_times: np.ndarray         # integrator-step resolution (truth only)
    fine_states: np.ndarray
    decisions: tuple[DecisionRecord, ...]
    probe_deltas: np.ndarray
    outcome: Outcome
    cycles: int
    min_unsafe_distance: float
    wall_time_s: float

    @property
    def true_trajectory(self) -> Trajectory:
        return Trajectory(self.times, self.states_true)

    @property
    def observed_trajectory(self) -> Trajectory:
        return Trajectory(self.times, self.states_obs)

    @property
    def control_log(self) -> np.ndarray:
        return np.array([rec.decision.u for rec in self.decisions])


def _first_event(scenario: Scenario, block: np.ndarray) -> tuple[int | None, str | None]:
    """(cut index, event kind) for the earliest event strictly after block[0]."""
    n_pts = block.shape[0]
    kinds = np.full(n_pts, "", dtype=object)
    if scenario.unsafe is not None:
        for i in range(1, n_pts):
            if scenario.unsafe.contains_state(block[i]):
                kinds[i] = "collided"
    if scenario.surface is not None:
        sds = scenario.surface.signed_distances(block[:, :3])
        for i in range(1, n_pts):
            if not kinds[i] and sds[i] <= 0.0:
                kinds[i] = "landed"
    if scenario.target_position is not None and scenario.target_radius is not None:
        k = scenario.target_position.size
        dists = np.linalg.norm(block[:, :k] - scenario.target_position, axis=1)
        for i in range(1, n_pts):
            if not kinds[i] and dists[i] <= scenario.target_radius:
                kinds[i] = "reached_target"
    for i in range(1, n_pts):
        if kinds[i]:
            return i, str(kinds[i])
    return None, None


def _make_outcome(scenario: Scenario, kind: str, t: float, x: np.ndarray) -> Outcome:
    if kind == "collided":
        return Outcome("collided", t, location=x.copy())
    if kind == "landed":
        err = float(np.linalg.norm(x[:3] - scenario.target_position))
        return Outcome("landed", t, error=err, location=x[:3].copy())
    if kind == "reached_target":
        k = scenario.target_position.size
        err = float(np.linalg.norm(x[:k] - scenario.target_position))
        return Outcome("reached_target", t, error=err, location=x[:k].copy())
    return Outcome("timed_out", t)


def run(scenario: Scenario, observation_override=None) -> RunResult:
    """Execute the learn-select-apply loop until touchdown, target, collision, or timeout.

    observation_override (diagnostics only) replaces the noise-model channel:
    a callable State -> State producing the observation fed to the controller.
    """
    t_start = time.perf_counter()
    rng = np.random.default_rng(np.random.SeedSequence(scenario.seed))
    eps = scenario.learner.epsilon
    m = scenario.learner.m

    def observe_state(x_true: State) -> State:
        if observation_override is not None:
            return observation_override(x_true)
        return observe(x_true, scenario.noise, rng)

    x = State(0.0, scenario.x0)
    obs = observe_state(x)
    times = [0.0]
    states_true = [x.x.copy()]
    states_obs = [obs.x.copy()]
    fine_times = [0.0]
    fine_states = [x.x.copy()]
    decisions: list[DecisionRecord] = []
    min_unsafe = (
        scenario.unsafe.distance_state(x.x) if scenario.unsafe is not None else float("inf")
    )

    u_plus = np.zeros(m)  # the first cycle probes around u* = 0
    schedule = make_schedule(u_plus, scenario.learner)
    outcome: Outcome | None = None
    cycles = 0
    h = scenario.integrator.h

    if scenario.unsafe is not None and scenario.unsafe.contains_state(x.x):
        outcome = _make_outcome(scenario, "collided", 0.0, x.x)

    while outcome is None:
        schedule = make_schedule(u_plus, scenario.learner)
        cycle_states = [states_obs[-1]]
        for j in range(m + 1):
            u_apply = schedule.controls[j]
            block = rollout(scenario.plant, x, u_apply, scenario.integrator, eps)
            cut, kind = _first_event(scenario, block)
            upto = block if cut is None else block[: cut + 1]
            if scenario.unsafe is not None:
                dists = np.array([scenario.unsafe.distance_state(row) for row in upto[1:]])
                if dists.size:
                    min_unsafe = min(min_unsafe, float(dists.min()))
            fine_times.extend(x.t + h * np.arange(1, upto.shape[0]))
            fine_states.extend(upto[1:])
            if cut is not None:
                outcome = _make_outcome(scenario, kind, x.t + h * cut, block[cut])
                break
            x = State(x.t + eps, block[-1])
            obs = observe_state(x)
            times.append(x.t)
            states_true.append(x.x.copy())
            states_obs.append(obs.x.copy())
            cycle_states.append(obs.x.copy())
        if outcome is not None:
            break

        record = ProbeRecord(np.vstack(cycle_states), schedule, x.t - (m + 1) * eps)
        ld = LearnedDirection(record)
        phi_obs = Trajectory(np.array(times), np.vstack(states_obs))
        if scenario.mode == "robust":
            decision = robust_select(scenario.grid, scenario.goodness, phi_obs, ld, scenario.pset)
        else:
            decision = nominal_select(scenario.grid, scenario.goodness, phi_obs, ld)
        decisions.append(DecisionRecord(x.t, decision))
        u_plus = decision.u
        cycles += 1

        if x.t >= scenario.time_limit - 1e-9:
            outcome = Outcome("timed_out", x.t)

    return RunResult(
        scenario=scenario,
        times=np.array(times),
        states_true=np.vstack(states_true),
        states_obs=np.vstack(states_obs),
        fine_times=np.array(fine_times),
        fine_states=np.vstack(fine_states),
        decisions=tuple(decisions),
        probe_deltas=schedule.deltas,
        outcome=outcome,
        cycles=cycles,
        min_unsafe_distance=float(min_unsafe),
        wall_time_s=time.perf_counter() - t_start,
    )


def sweep(scenario: Scenario, parameter: str, values) -> list[RunResult]:
    """Independent runs with one scenario parameter swept over the given values.

    Run i uses seed (base seed + i) so runs stay individually reproducible.
    Requires a scenario built from a file/spec dict (the raw config is
    re-built per value).
    """
    if parameter not in SWEEPABLE_PARAMETERS:
        raise ScenarioError(
            f"parameter: {parameter!r} is not sweepable (choose from {SWEEPABLE_PARAMETERS})"
        )
    if scenario.raw is None:
        raise ScenarioError("sweep needs a scenario built from a config (raw spec missing)")
    from .scenario_io import build_scenario  # deferred: scenario_io imports this module

    results = []
    for i, value in enumerate(values):
        raw = json.loads(json.dumps(scenario.raw))  # deep copy of the plain config
        _apply_parameter(raw, parameter, value)
        raw["scenario"]["seed"] = str(int(raw["scenario"].get("seed", "0")) + i)
        results.append(run(build_scenario(raw, name=f"{scenario.name}[{parameter}={value}]")))
    return results


def _apply_parameter(raw: dict, parameter: str, value) -> None:
    if parameter == "error":
        raw.setdefault("noise", {})["magnitude"] = repr(float(value))
    elif parameter == "delta_ratio":
        raw.setdefault("noise", {})["bound_ratio"] = repr(float(value))
    elif parameter == "mode":
        if value not in ("nominal", "robust"):
            raise ScenarioError(f"mode: must be nominal or robust, got {value!r}")
        raw.setdefault("robust", {})["mode"] = str(value)
    elif parameter == "tau":
        raw.setdefault("goodness", {})["tau"] = repr(float(value))
    elif parameter == "epsilon":
        raw.setdefault("learner", {})["epsilon"] = repr(float(value))
    elif parameter == "seed":
        raw.setdefault("scenario", {})["seed"] = str(int(value))


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def emit(result: RunResult, out_dir) -> list[Path]:
    """Write trajectory CSVs, the decision log, and a flat JSON summary.

    Trajectory rows cover observation instants only (completed epsilon
    intervals); event points live in the summary. All values carry 12
    significant digits so reruns with the same scenario and seed are
    byte-identical.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n = result.states_true.shape[1]
    header = "t," + ",".join(f"x{i + 1}" for i in range(n))

    written = []
    for fname, states in (
        ("trajectory_true.csv", result.states_true),
        ("trajectory_obs.csv", result.states_obs),
    ):
        lines = [header]
        for t, row in zip(result.times, states):
            lines.append(",".join([_fmt(t)] + [_fmt(v) for v in row]))
        path = out / fname
        path.write_text("\n".join(lines) + "\n")
        written.append(path)

    m = result.probe_deltas.shape[1]
    lines = ["t," + ",".join(f"u{i + 1}" for i in range(m)) + ",value,worst_offset_index"]
    for rec in result.decisions:
        d = rec.decision
        lines.append(
            ",".join(
                [_fmt(rec.t)]
                + [_fmt(v) for v in d.u]
                + [_fmt(float(d.value)) if d.value.is_finite else "-inf"]
                + [str(d.worst_offset_index)]
            )
        )
    path = out / "decisions.csv"
    path.write_text("\n".join(lines) + "\n")
    written.append(path)

    summary = {
        "scenario": result.scenario.name,
        "mode": result.scenario.mode,
        "seed": result.scenario.seed,
        "outcome": result.outcome.kind,
        "t_end": result.outcome.t,
        "error": result.outcome.error,
        "min_unsafe_distance": result.min_unsafe_distance,
        "cycles": result.cycles,
        "observations": int(result.times.size),
        "wall_time_s": result.wall_time_s,
    }
    if result.outcome.kind == "collided":
        summary["collision_time"] = result.outcome.t
    path = out / "summary.json"
    path.write_text(json.dumps(summary, sort_keys=True, indent=1) + "\n")
    written.append(path)
    return written
