"""Scenario description, config-file parsing and assumption validation.

A scenario file is TOML. Matrices are row-major nested arrays::

    name = "double integrator"
    x0 = [0.0, 0.0]
    horizon = 100
    seed = 0

    [system]
    A = [[1.0, 1.0], [0.0, 1.0]]
    B = [[0.0], [1.0]]

    [state_set]            # raw state constraints, {rows, offsets} or {box}
    box = [3.0, 2.0]

    [input_set]
    rows = [[1.0], [-1.0]]
    offsets = [1.0, 1.0]

    [derive]               # optional: how to obtain a reachable subset
    template = "canonical" # "raw", "canonical" or "none"
    mu_max = 8

    [controller]
    gamma_x = 0.98
    gamma_u = 0.98
    delta = 0.01
    mu = 4                 # optional, otherwise the certified minimum

    [costs]
    Q = [[1.0, 0.0], [0.0, 1.0]]
    R = [[1.0]]
    segments = [{t_from = 0, target = [0.5, 0.0]}]   # or theta/eta pairs
"""
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from .. import geometry, system
from ..controller import ControllerConfig, OgdController
from ..costs import CostSchedule, nearest_steady_state, validate as validate_costs
from ..errors import InfeasibleError
from ..geometry import Polytope
from ..report import Report
from ..system import LtiSystem

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass
class Scenario:
    system: LtiSystem
    X0: Polytope
    U: Polytope
    controller: dict
    costs: dict
    x0: np.ndarray
    horizon: int
    derive: dict = field(default_factory=lambda: {"template": "raw", "mu_max": 8})
    seed: int = 0
    name: str = "scenario"

    def with_horizon(self, horizon):
        return replace(self, horizon=int(horizon))


def scenario_from_dict(data):
    sysd = data["system"]
    derive = {"template": "raw", "mu_max": 8}
    derive.update(data.get("derive", {}))
    return Scenario(
        system=LtiSystem.from_dict(sysd),
        X0=Polytope.from_dict(data["state_set"]),
        U=Polytope.from_dict(data["input_set"]),
        controller=dict(data["controller"]),
        costs=dict(data["costs"]),
        x0=np.asarray(data.get("x0", np.zeros(len(sysd["A"]))), dtype=float),
        horizon=int(data.get("horizon", 100)),
        derive=derive,
        seed=int(data.get("seed", 0)),
        name=str(data.get("name", "scenario")),
    )


def load_scenario(path):
    with open(path, "rb") as fh:
        return scenario_from_dict(tomllib.load(fh))


@dataclass
class Setup:
    """Everything resolved from a scenario that a run needs."""

    scenario: Scenario
    X: Polytope
    Xbar: Polytope
    certificate: object
    cfg: ControllerConfig
    schedule: CostSchedule
    report: Report

    def controller(self):
        return OgdController(self.scenario.system, self.X, self.Xbar, self.scenario.U, self.cfg)


def build_schedule(data, sys, Xbar, U, horizon):
    segments = sorted(data["segments"], key=lambda s: s["t_from"])
    t_from, thetas, etas = [], [], []
    for seg in segments:
        if "target" in seg:
            th, et = nearest_steady_state(sys, Xbar, U, seg["target"])
        else:
            th, et = np.asarray(seg["theta"], dtype=float), np.asarray(seg["eta"], dtype=float)
        t_from.append(int(seg["t_from"]))
        thetas.append(th)
        etas.append(et)
    return CostSchedule(tuple(t_from), np.array(thetas), np.array(etas),
                        data.get("Q"), data.get("R"), None).with_horizon(horizon)


def _set_checks(rep, label, P, required=True):
    rep.add(f"sets: {label} contains the origin in its interior",
            P.contains_origin_interior(), required=required)


def prepare(s):
    """Resolve the derived state set, costs and configuration; return a ``Setup``.

    Never raises on assumption failures: they are recorded in
    ``Setup.report`` and the unresolved fields are left as ``None``.
    """
    rep = Report()
    sys_ = s.system
    setup = Setup(s, None, None, None, None, None, rep)
    if s.X0.dim != sys_.n or s.U.dim != sys_.m or s.x0.size != sys_.n:
        rep.add("dimensions consistent", False, "sets, x0 and system disagree")
        return setup
    rep.add("dimensions consistent", True)
    _set_checks(rep, "raw state set", s.X0)
    _set_checks(rep, "input set", s.U)
    if not rep.passed:
        return setup

    ctl = s.controller
    delta = float(ctl["delta"])
    mu_cfg = ctl.get("mu")
    mu_max = int(s.derive.get("mu_max", 8))
    template = s.derive.get("template", "raw")

    # reachability: the raw set first, a derived subset if needed
    raw = system.check_mu(sys_, s.X0, s.U, int(mu_cfg)) if mu_cfg else \
        system.find_mu(sys_, s.X0, s.U, mu_max)
    raw_detail = f"mu={raw.mu}" if raw.ok else \
        f"pair {raw.pair_index} unreachable: {raw.source.tolist()} -> {raw.target.tolist()}"
    X, cert = s.X0, raw
    if raw.ok or template == "none":
        rep.add("reachability on raw state set", raw.ok, raw_detail)
    else:
        rep.add("reachability on raw state set", False, raw_detail, required=False)
        tmpl = None if template == "raw" else system.canonical_box(sys_)
        grid = tuple(s.derive.get("grid", system.DEFAULT_GRID))
        try:
            X, cert = system.shrink_to_feasible(sys_, s.X0, s.U, mu_max, grid, tmpl)
            rep.add("reachability on derived state set", True,
                    f"template={template} scale={cert.witness_stats['scale']} mu={cert.mu}")
        except InfeasibleError as exc:
            rep.add("reachability on derived state set", False, str(exc))
            return setup
        if mu_cfg and int(mu_cfg) != cert.mu:
            cert = system.check_mu(sys_, X, s.U, int(mu_cfg))
            rep.add(f"reachability with configured mu={mu_cfg}", cert.ok)
            if not cert.ok:
                return setup
    if not cert.ok:
        return setup
    _set_checks(rep, "state set", X)
    rep.add("initial state inside state set", geometry.contains(X, s.x0, 1e-9))

    try:
        Xbar = geometry.shrink(X, delta)
    except InfeasibleError as exc:
        rep.add("shrunk state set nonempty", False, str(exc))
        return setup
    margin = float(Xbar.d.min())
    rep.add("shrunk state set nonempty", margin > 0, f"smallest facet offset {margin:.6g}")

    try:
        schedule = build_schedule(s.costs, sys_, Xbar, s.U, s.horizon)
    except InfeasibleError as exc:
        rep.add("setpoints: steady-state setpoints", False, str(exc))
        return setup
    costs_rep = validate_costs(schedule, sys_, Xbar, s.U)
    for c in costs_rep.checks:
        prefix = "costs" if "curvature" in c.name else "setpoints"
        rep.add(f"{prefix}: {c.name}", c.passed, c.detail, c.residual)

    rank = system.controllability_rank(sys_)
    rep.add("system: controllable pair", rank == sys_.n, f"rank {rank} of {sys_.n}")
    a_norm = system.spectral_norm(sys_)
    if schedule.l_x == schedule.alpha_x:
        rep.add("system: norm bound on A", True, "vacuous for alpha_x = l_x")
    else:
        bound = (schedule.l_x + schedule.alpha_x) / (schedule.l_x - schedule.alpha_x)
        rep.add("system: norm bound on A", a_norm < bound,
                f"||A||={a_norm:.6g} bound={bound:.6g}")

    cfg = ControllerConfig(float(ctl["gamma_x"]), float(ctl["gamma_u"]), delta,
                           int(mu_cfg) if mu_cfg else cert.mu)
    lower, upper_x, upper_u = cfg.step_size_window(sys_, schedule)
    rep.add("step sizes inside admissible window", cfg.in_window(sys_, schedule),
            f"{lower:.6g} < gamma_x={cfg.gamma_x} <= {upper_x:.6g}, "
            f"gamma_u={cfg.gamma_u} <= {upper_u:.6g}")
    setup.X, setup.Xbar, setup.certificate = X, Xbar, cert
    setup.cfg, setup.schedule = cfg, schedule
    return setup


def validate_scenario(s):
    return prepare(s).report


def _toml_value(v):
    if isinstance(v, np.ndarray):
        v = v.tolist()
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k} = {_toml_value(x)}" for k, x in v.items()) + "}"
    raise TypeError(f"cannot encode {type(v).__name__} as TOML")


def scenario_to_toml(s):
    """Serialize ``s`` in the format read by :func:`load_scenario`.

    Floats are written with ``repr`` so a round trip is exact.
    """
    out = [f"name = {_toml_value(s.name)}", f"x0 = {_toml_value(s.x0)}",
           f"horizon = {s.horizon}", f"seed = {s.seed}", ""]
    tables = [("system", s.system.to_dict()), ("state_set", s.X0.to_dict()),
              ("input_set", s.U.to_dict()), ("derive", s.derive),
              ("controller", s.controller)]
    for title, body in tables:
        out.append(f"[{title}]")
        out.extend(f"{k} = {_toml_value(v)}" for k, v in body.items())
        out.append("")
    out.append("[costs]")
    for k, v in s.costs.items():
        if k != "segments":
            out.append(f"{k} = {_toml_value(v)}")
    out.append("segments = [")
    out.extend(f"  {_toml_value(seg)}," for seg in s.costs["segments"])
    out.append("]")
    return "\n".join(out) + "\n"
