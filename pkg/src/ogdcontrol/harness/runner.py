"""Closed-loop runs, post-hoc trace checks, artifacts and horizon sweeps."""
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..analysis import hindsight_optimum, regret, theorem_constants
from ..controller import run
from ..errors import AssumptionError, ConvergenceError, InfeasibleError
from ..report import Report
from .scenario import prepare

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_VIOLATION = 3
EXIT_SOLVER = 4

CONSTRAINT_TOL = 1e-9
IDENTITY_TOL = 1e-8


def recompute_regret(schedule, trace, hindsight):
    """Regret summed directly from the quadratic stage costs."""
    total = 0.0
    for t in range(trace.horizon + 1):
        th, et = schedule.theta(t), schedule.eta(t)
        ex, eu = trace.xs[t] - th, trace.us[t] - et
        hx, hu = hindsight.x_star[t] - th, hindsight.u_star[t] - et
        total += 0.5 * (ex @ schedule.Q @ ex + eu @ schedule.R @ eu
                        - hx @ schedule.Q @ hx - hu @ schedule.R @ hu)
    return float(total)


def check_trace(setup, trace, report=None):
    """Independent post-hoc audit of a trace.

    Recomputes constraint slacks and both prediction identities from the raw
    diagnostics, without reusing the controller's own matrices.
    """
    s = setup.scenario
    A, B = s.system.A, s.system.B
    X, U, mu = setup.X, s.U, trace.mu
    rep = Report()
    x_viol = max(float(np.max(X.C @ x - X.d)) for x in trace.xs)
    u_viol = max(float(np.max(U.C @ u - U.d)) for u in trace.us)
    rep.add("states inside state set", x_viol <= CONSTRAINT_TOL, residual=max(x_viol, 0.0))
    rep.add("inputs inside input set", u_viol <= CONSTRAINT_TOL, residual=max(u_viol, 0.0))

    A_mu = np.linalg.matrix_power(A, mu)
    cols = [np.linalg.matrix_power(A, k) @ B for k in range(mu)]
    ident = 0.0
    for t, d in enumerate(trace.diagnostics):
        # the last applied input multiplies B, the first A^{mu-1} B
        pred = A_mu @ trace.xs[t] + sum(cols[k] @ d.u_hat[mu - 1 - k] for k in range(mu))
        ident = max(ident, float(np.linalg.norm(pred - d.x_pi)))
    rec = 0.0
    for prev, cur in zip(trace.diagnostics, trace.diagnostics[1:]):
        rec = max(rec, float(np.linalg.norm(cur.x_hat - A @ prev.x_pi - B @ cur.v)))
    rep.add("terminal prediction identity", ident <= IDENTITY_TOL, residual=ident)
    rep.add("prediction recursion", rec <= IDENTITY_TOL, residual=rec)

    if report is not None:
        report.extend(rep)
    return rep


@dataclass
class RunResult:
    status: int
    report: Report
    setup: object = None
    trace: object = None
    hindsight: object = None
    regret: object = None
    audit: Report = None
    error: str = ""
    artifacts: dict = field(default_factory=dict)


def execute(s):
    """Validate, run, benchmark and audit a scenario in memory."""
    setup = prepare(s)
    if not setup.report.passed:
        return RunResult(EXIT_VALIDATION, setup.report, setup,
                         error="validation failed: " + "; ".join(c.name for c in setup.report.failures()))
    try:
        ctl = setup.controller()
        trace = run(ctl, setup.schedule, s.x0, s.horizon)
        hs = hindsight_optimum(s.system, setup.X, s.U, setup.schedule, s.x0, s.horizon)
        consts = theorem_constants(s.system, setup.X, s.U, setup.cfg, setup.schedule)
        rr = regret(trace, hs, setup.schedule, consts)
    except (ConvergenceError, InfeasibleError) as exc:
        return RunResult(EXIT_SOLVER, setup.report, setup, error=f"{type(exc).__name__}: {exc}")
    except AssumptionError as exc:
        return RunResult(EXIT_VIOLATION, setup.report, setup, error=f"{type(exc).__name__}: {exc}")
    audit = check_trace(setup, trace)
    gap = abs(recompute_regret(setup.schedule, trace, hs) - rr.regret)
    audit.add("regret recomputation agrees", gap <= 1e-8 * max(1.0, abs(rr.regret)), residual=gap)
    audit.add("regret nonnegative", rr.regret >= -1e-6, residual=min(rr.regret, 0.0))
    audit.add("regret bound holds", rr.bound_satisfied)
    audit.add("prediction error bound holds", rr.prediction_bound_satisfied)
    status = EXIT_OK if audit.passed else EXIT_VIOLATION
    return RunResult(status, setup.report, setup, trace, hs, rr, audit)


def _atomic_write(path, text):
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if np.isnan(v):
            return "nan"
        if np.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return '"' + str(v).replace("\\", "\\\\").replace('"', '\\"') + '"'


def key_value_text(items):
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in items.items())


def diagnostics_csv(trace):
    n = trace.diagnostics[0].x_hat.size
    m = trace.diagnostics[0].v.size
    head = (["t", "alpha", "delta_bar", "g_solved", "identity_residual"]
            + [f"v{i + 1}" for i in range(m)] + [f"x_hat{i + 1}" for i in range(n)]
            + [f"x_pi{i + 1}" for i in range(n)])
    lines = [",".join(head)]
    for d in trace.diagnostics:
        vals = [str(d.t), repr(float(d.alpha)), repr(float(d.delta_bar)),
                "1" if d.g is not None else "0", repr(float(d.identity_residual))]
        vals += [repr(float(x)) for x in np.concatenate([d.v, d.x_hat, d.x_pi])]
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"


def run_scenario(s, out_dir):
    """Run ``s`` and write trace, diagnostics, summary and validation files."""
    res = execute(s)
    paths = {
        "validation": os.path.join(out_dir, "validation.txt"),
        "trace": os.path.join(out_dir, "trace.csv"),
        "diagnostics": os.path.join(out_dir, "diagnostics.csv"),
        "summary": os.path.join(out_dir, "summary.txt"),
    }
    _atomic_write(paths["validation"], "\n".join(res.report.lines()) + "\n")
    summary = {"scenario": s.name, "status": res.status}
    if res.error:
        summary["error"] = res.error
    if res.trace is not None:
        _atomic_write(paths["trace"], res.trace.to_csv(s.system))
        _atomic_write(paths["diagnostics"], diagnostics_csv(res.trace))
        summary.update({
            "horizon": s.horizon,
            "mu": res.setup.cfg.mu,
            "total_cost": res.trace.total_cost(),
            "hindsight_cost": res.hindsight.optimal_cost,
        })
        summary.update(res.regret.summary())
        for c in res.audit.checks:
            key = "check_" + c.name.replace(" ", "_").replace("-", "_")
            summary[key] = c.passed
            if c.residual is not None:
                summary[key + "_residual"] = c.residual
    else:
        paths.pop("trace")
        paths.pop("diagnostics")
    _atomic_write(paths["summary"], key_value_text(summary))
    res.artifacts = paths
    return res


def _sweep_row(s, T):
    res = execute(s.with_horizon(T))
    row = {"horizon": int(T), "status": res.status}
    if res.regret is not None:
        rr = res.regret
        row.update({
            "regret": rr.regret,
            "state_variation": rr.path.state_variation,
            "input_variation": rr.path.input_variation,
            "bound_value": rr.bound_value,
            "bound_satisfied": rr.bound_satisfied,
        })
    return row


def sweep(s, horizons, workers=1):
    """Regret and path length of ``s`` for each horizon in ``horizons``.

    Horizons are independent runs; with ``workers > 1`` they are spread over
    processes. Row order always follows ``horizons``.
    """
    horizons = [int(T) for T in horizons]
    if workers > 1 and len(horizons) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_row, [s] * len(horizons), horizons))
    return [_sweep_row(s, T) for T in horizons]


def sweep_csv(rows):
    cols = ["horizon", "status", "regret", "state_variation", "input_variation",
            "bound_value", "bound_satisfied"]
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join(_fmt(r[c]).strip('"') if c in r else "" for c in cols))
    return "\n".join(lines) + "\n"


__all__ = ["RunResult", "check_trace", "recompute_regret", "execute", "run_scenario", "sweep", "sweep_csv"]
