"""Scenario files: a flat INI-style key-value grammar, parsed fail-closed.

Sections and keys are validated against the schema below; anything unknown
is rejected with the offending name. See the bundled scenarios under
`myopic/scenarios/` for complete examples of both scenario kinds.
"""

from __future__ import annotations

import configparser
from importlib import resources
from pathlib import Path

import numpy as np

from .core import BoundedUniform, ConstantOffset, LearnerConfig, RegularityConstants, enumerate_grid
from .goodness import (
    LandingGoodness,
    LandingGoodnessConfig,
    ObstacleGoodness,
    ObstacleGoodnessConfig,
    TubeGuardedGoodness,
)
from .harness import Scenario, ScenarioError
from .optimizer import make_perturbation_set
from .plants import (
    AsteroidPlant,
    DoubleIntegrator,
    IntegratorConfig,
    PointMass,
    TriaxialQuadratic,
)
from .safety import Ellipsoid, Plane, SemiDisk, SphereSet, SphereSurface

__all__ = ["load_scenario", "build_scenario", "bundled_scenario_path", "bundled_scenarios"]

_SCHEMA: dict[str, set[str]] = {
    "scenario": {"kind", "name", "seed", "time_limit"},
    "plant": {"kind", "omega", "mu", "potential", "quad_coeff", "perturbation"},
    "initial": {"state"},
    "learner": {"epsilon", "probe_delta"},
    "grid": {"min", "max", "points"},
    "goodness": {
        "target",
        "obstacle_ref",
        "tau",
        "predict_dt",
        "t_max",
        "collision_check_dt",
        "scan_dt",
    },
    "unsafe": {"kind", "center", "radius", "halfplane_normal", "halfplane_offset"},
    "surface": {"kind", "height", "center", "radius", "semi_axes"},
    "noise": {"kind", "direction", "magnitude", "half_widths", "bound", "bound_ratio"},
    "robust": {"mode", "axes", "samples", "delta"},
    "prediction": {"mode", "M0", "M1", "L", "steps"},
    "termination": {"target_radius"},
    "integrator": {"step"},
}

_REQUIRED = ("scenario", "plant", "initial", "learner", "grid", "goodness", "integrator")


def _vector(text: str, name: str, dim: int | None = None) -> np.ndarray:
    try:
        vals = np.array([float(v) for v in text.replace(",", " ").split()])
    except ValueError as exc:
        raise ScenarioError(f"{name}: cannot parse vector from {text!r}") from exc
    if dim is not None and vals.size != dim:
        raise ScenarioError(f"{name}: expected {dim} entries, got {vals.size}")
    return vals


def _floatval(raw: dict, section: str, key: str, default=None) -> float:
    sec = raw.get(section, {})
    if key not in sec:
        if default is None:
            raise ScenarioError(f"{section}.{key}: required key missing")
        return float(default)
    try:
        return float(sec[key])
    except ValueError as exc:
        raise ScenarioError(f"{section}.{key}: not a number: {sec[key]!r}") from exc


def _intval(raw: dict, section: str, key: str, default=None) -> int:
    v = _floatval(raw, section, key, default)
    if v != int(v):
        raise ScenarioError(f"{section}.{key}: expected an integer, got {v}")
    return int(v)


def _strval(raw: dict, section: str, key: str, default=None) -> str:
    sec = raw.get(section, {})
    if key not in sec:
        if default is None:
            raise ScenarioError(f"{section}.{key}: required key missing")
        return default
    return sec[key].strip()


def _validate_schema(raw: dict) -> None:
    for section, entries in raw.items():
        if section not in _SCHEMA:
            raise ScenarioError(f"unknown section [{section}]")
        for key in entries:
            if key not in _SCHEMA[section]:
                raise ScenarioError(f"unknown key {section}.{key}")
    for section in _REQUIRED:
        if section not in raw:
            raise ScenarioError(f"missing required section [{section}]")


def _build_plant(raw: dict):
    kind = _strval(raw, "plant", "kind")
    if kind == "double_integrator":
        return DoubleIntegrator()
    if kind == "asteroid":
        omega = _floatval(raw, "plant", "omega", 0.0)
        mu = _floatval(raw, "plant", "mu")
        pot_kind = _strval(raw, "plant", "potential", "point_mass")
        if pot_kind == "point_mass":
            potential = PointMass(mu)
        elif pot_kind == "triaxial":
            coeff = _vector(
                _strval(raw, "plant", "quad_coeff"), "plant.quad_coeff", dim=9
            ).reshape(3, 3)
            potential = TriaxialQuadratic(mu, coeff)
        else:
            raise ScenarioError(f"plant.potential: unknown kind {pot_kind!r}")
        p = None
        if "perturbation" in raw.get("plant", {}):
            p = _vector(raw["plant"]["perturbation"], "plant.perturbation", dim=3)
        return AsteroidPlant(omega, potential, p)
    raise ScenarioError(f"plant.kind: unknown kind {kind!r}")


def _build_unsafe(raw: dict):
    if "unsafe" not in raw:
        return None
    kind = _strval(raw, "unsafe", "kind")
    if kind == "semidisk":
        center = _vector(_strval(raw, "unsafe", "center"), "unsafe.center", dim=2)
        radius = _floatval(raw, "unsafe", "radius")
        normal = _vector(
            _strval(raw, "unsafe", "halfplane_normal", "0 1"), "unsafe.halfplane_normal", dim=2
        )
        offset = _floatval(raw, "unsafe", "halfplane_offset", 0.0)
        return SemiDisk(center, radius, normal, offset)
    if kind == "sphere":
        center = _vector(_strval(raw, "unsafe", "center"), "unsafe.center", dim=3)
        return SphereSet(center, _floatval(raw, "unsafe", "radius"))
    raise ScenarioError(f"unsafe.kind: unknown kind {kind!r}")


def _build_surface(raw: dict):
    if "surface" not in raw:
        return None
    kind = _strval(raw, "surface", "kind")
    if kind == "plane":
        return Plane(_floatval(raw, "surface", "height", 0.0))
    if kind == "sphere":
        center = _vector(_strval(raw, "surface", "center", "0 0 0"), "surface.center", dim=3)
        return SphereSurface(center, _floatval(raw, "surface", "radius"))
    if kind == "ellipsoid":
        center = _vector(_strval(raw, "surface", "center", "0 0 0"), "surface.center", dim=3)
        axes = _vector(_strval(raw, "surface", "semi_axes"), "surface.semi_axes", dim=3)
        return Ellipsoid(center, axes)
    raise ScenarioError(f"surface.kind: unknown kind {kind!r}")


def _build_noise(raw: dict, n: int):
    kind = _strval(raw, "noise", "kind", "none") if "noise" in raw else "none"
    if kind == "none":
        return None, 0.0
    if kind == "constant_offset":
        direction = _vector(_strval(raw, "noise", "direction"), "noise.direction", dim=n)
        magnitude = _floatval(raw, "noise", "magnitude", 0.0)
        if magnitude < 0:
            raise ScenarioError(f"noise.magnitude: must be >= 0, got {magnitude}")
        nrm = np.linalg.norm(direction)
        if nrm == 0:
            raise ScenarioError("noise.direction: must be nonzero")
        e = magnitude * direction / nrm
        if "bound" in raw["noise"]:
            bound = _floatval(raw, "noise", "bound")
        else:
            bound = _floatval(raw, "noise", "bound_ratio", 1.0) * magnitude
        try:
            return ConstantOffset(e, bound), bound
        except ValueError as exc:
            raise ScenarioError(f"noise: {exc}") from exc
    if kind == "bounded_uniform":
        hw = _vector(_strval(raw, "noise", "half_widths"), "noise.half_widths", dim=n)
        default_bound = float(np.linalg.norm(hw))
        if "bound" in raw["noise"]:
            bound = _floatval(raw, "noise", "bound")
        else:
            bound = _floatval(raw, "noise", "bound_ratio", 1.0) * default_bound
        try:
            return BoundedUniform(hw, bound), bound
        except ValueError as exc:
            raise ScenarioError(f"noise: {exc}") from exc
    raise ScenarioError(f"noise.kind: unknown kind {kind!r}")


def build_scenario(raw: dict, name: str | None = None) -> Scenario:
    """Construct a validated Scenario from a parsed (section -> key -> str) config."""
    _validate_schema(raw)
    kind = _strval(raw, "scenario", "kind")
    if kind not in ("obstacle", "landing"):
        raise ScenarioError(f"scenario.kind: unknown kind {kind!r}")
    name = name or _strval(raw, "scenario", "name", "scenario")

    plant = _build_plant(raw)
    n, m = plant.n, plant.m
    x0 = _vector(_strval(raw, "initial", "state"), "initial.state", dim=n)

    epsilon = _floatval(raw, "learner", "epsilon")
    learner = LearnerConfig(m, epsilon, _floatval(raw, "learner", "probe_delta"))

    lo = _vector(_strval(raw, "grid", "min"), "grid.min", dim=m)
    hi = _vector(_strval(raw, "grid", "max"), "grid.max", dim=m)
    counts = _vector(_strval(raw, "grid", "points"), "grid.points", dim=m).astype(int)
    grid = enumerate_grid(lo, hi, counts)

    unsafe = _build_unsafe(raw)
    surface = _build_surface(raw)
    noise, noise_bound = _build_noise(raw, n)

    cycle = (m + 1) * epsilon
    tau = _floatval(raw, "goodness", "tau", 0.0)
    if kind == "obstacle":
        if unsafe is None:
            raise ScenarioError("unsafe: obstacle scenarios need an unsafe set")
        target = _vector(_strval(raw, "goodness", "target"), "goodness.target", dim=2)
        ref = (
            _vector(_strval(raw, "goodness", "obstacle_ref"), "goodness.obstacle_ref", dim=2)
            if "obstacle_ref" in raw.get("goodness", {})
            else np.asarray(unsafe.center)
        )
        cfg = ObstacleGoodnessConfig(
            target, ref, tau, _floatval(raw, "goodness", "predict_dt", cycle)
        )
        goodness = ObstacleGoodness(cfg, unsafe)
        target_position = target
        target_radius = _floatval(raw, "termination", "target_radius", 5.0)
    else:
        if unsafe is None or not isinstance(unsafe, SphereSet):
            raise ScenarioError("unsafe: landing scenarios need a sphere unsafe set")
        if surface is None:
            raise ScenarioError("surface: landing scenarios need a surface model")
        target = _vector(_strval(raw, "goodness", "target"), "goodness.target", dim=3)
        cfg = LandingGoodnessConfig(
            r_f=target,
            r_B=unsafe.center,
            R=unsafe.radius,
            tau=tau,
            t_max=_floatval(raw, "goodness", "t_max"),
            collision_check_dt=_floatval(raw, "goodness", "collision_check_dt", 2 * cycle),
            scan_dt=_floatval(raw, "goodness", "scan_dt", epsilon / 4),
        )
        goodness = LandingGoodness(cfg, surface)
        target_position = target
        target_radius = None

    pred_mode = _strval(raw, "prediction", "mode", "direct") if "prediction" in raw else "direct"
    if pred_mode == "tube":
        if unsafe is None:
            raise ScenarioError("prediction: tube mode needs an unsafe set")
        consts = RegularityConstants(
            _floatval(raw, "prediction", "M0"),
            _floatval(raw, "prediction", "M1"),
            _floatval(raw, "prediction", "L"),
        )
        horizon = _floatval(raw, "goodness", "predict_dt", cycle)
        goodness = TubeGuardedGoodness(
            goodness,
            unsafe,
            consts,
            u_max=grid.max_abs,
            Delta=noise_bound,
            horizon=horizon,
            m=m,
            steps=_intval(raw, "prediction", "steps", 8),
        )
    elif pred_mode != "direct":
        raise ScenarioError(f"prediction.mode: must be direct or tube, got {pred_mode!r}")

    mode = _strval(raw, "robust", "mode", "nominal") if "robust" in raw else "nominal"
    pset = None
    if mode == "robust":
        delta = _floatval(raw, "robust", "delta", noise_bound)
        axes = [int(a) for a in _vector(_strval(raw, "robust", "axes"), "robust.axes")]
        samples = _intval(raw, "robust", "samples", 3)
        try:
            pset = make_perturbation_set(delta, axes, samples, n)
        except ValueError as exc:
            raise ScenarioError(f"robust: {exc}") from exc

    try:
        return Scenario(
            name=name,
            kind=kind,
            plant=plant,
            x0=x0,
            goodness=goodness,
            learner=learner,
            grid=grid,
            integrator=IntegratorConfig(_floatval(raw, "integrator", "step")),
            noise=noise,
            mode=mode,
            pset=pset,
            unsafe=unsafe,
            surface=surface,
            target_position=target_position,
            target_radius=target_radius,
            time_limit=_floatval(raw, "scenario", "time_limit"),
            seed=_intval(raw, "scenario", "seed", 0),
            raw=raw,
        )
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario file; unknown sections or keys are rejected."""
    path = Path(path)
    if not path.is_file():
        raise ScenarioError(f"scenario file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as fh:
            parser.read_file(fh, source=str(path))
    except configparser.Error as exc:
        raise ScenarioError(f"parse error in {path}: {exc}") from exc
    raw = {section: dict(parser[section]) for section in parser.sections()}
    return build_scenario(raw, name=path.stem)


def bundled_scenarios() -> dict[str, Path]:
    """Name -> path of the scenario files shipped with the package."""
    base = resources.files("myopic") / "scenarios"
    return {p.name[: -len(".scn")]: Path(str(p)) for p in base.iterdir() if p.name.endswith(".scn")}


def bundled_scenario_path(name: str) -> Path:
    scenarios = bundled_scenarios()
    key = name[: -len(".scn")] if name.endswith(".scn") else name
    if key not in scenarios:
        raise ScenarioError(f"no bundled scenario {name!r} (have: {sorted(scenarios)})")
    return scenarios[key]
