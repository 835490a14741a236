"""Command-line entry point: solvers, verification battery, figure data.

Commands
--------
solve     Solve the instance described by a YAML config document and write
          CSV/JSON outputs (dispatches on ``run.section``).
verify    Run the invariant battery (reference-solver equivalence, incentive
          audits, identity residuals) on a desk-scale config and emit a
          machine-readable report; exits 5 on any failure.
figures   Reproduce the three figure datasets (continuation NPV and date-2 /
          date-3 consumption against the date-2 discount factor) with the
          baked-in ten-type parameterisation.
reversal  Print the immediate-vs-delayed reward demonstration.

Exit codes: 0 success, 2 config/validation error, 3 solver failure,
4 non-separating equilibrium, 5 verification failure.

All CSV files carry a header row, print numbers with 12 significant digits
and are byte-identical across runs on the same config.  Figure CSVs embed
``# series:`` annotation lines naming each column's role, style and
monotonicity; downstream renderers consume those annotations rather than
recomputing model quantities.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from . import degenerate, oracle, screening
from .degenerate import (
    MechanismConstructionError,
    SolverError,
    mechanism_ic_residuals,
)
from .model import (
    Income,
    IncomeKind,
    ModelConfig,
    Policy,
    ValidationError,
    choice_reversal_demo,
    continuation_value,
    discount_representation,
    validate,
)
from .screening import NonSeparatingError, efficient_subtree
from .utility import UtilityKind, UtilitySpec

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_NON_SEPARATING = 4
EXIT_VERIFY = 5

_UTILITY_KINDS = {
    "sqrt_power": UtilityKind.SQRT_POWER,
    "log": UtilityKind.LOG,
    "isoelastic": UtilityKind.ISOELASTIC,
}
_INCOME_KINDS = {
    "total_npv": IncomeKind.TOTAL_NPV,
    "per_period": IncomeKind.PER_PERIOD,
}


class ConfigError(ValueError):
    """Config document failure, reported with the offending key path."""


# ---------------------------------------------------------------------------
# Config document
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    model: ModelConfig
    section: int
    delta1_index: int | None
    sweep_t: list[int] | None
    sweep_n: list[int] | None
    out_dir: str | None
    formats: list[str]


def _expect_keys(mapping, allowed, required, path):
    if not isinstance(mapping, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(mapping).__name__}")
    unknown = sorted(set(mapping) - set(allowed))
    if unknown:
        raise ConfigError(f"{path}: unknown keys {unknown}")
    missing = sorted(set(required) - set(mapping))
    if missing:
        raise ConfigError(f"{path}: missing keys {missing}")


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _integer(value, path):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    return value


def _number_list(value, path):
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{path}: expected a non-empty list of numbers")
    return [_number(x, f"{path}[{i}]") for i, x in enumerate(value)]


def parse_config(path: str | Path) -> RunConfig:
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}")
    _expect_keys(raw, ["model", "run", "output"], ["model", "run"], "(top level)")

    m = raw["model"]
    _expect_keys(m, ["T", "deltas", "p", "q", "R", "income", "utility"],
                 ["T", "deltas", "p", "q", "R", "income", "utility"], "model")
    _expect_keys(m["income"], ["kind", "value"], ["kind", "value"],
                 "model.income")
    if m["income"]["kind"] not in _INCOME_KINDS:
        raise ConfigError(
            f"model.income.kind: expected one of {sorted(_INCOME_KINDS)}, "
            f"got {m['income']['kind']!r}")
    _expect_keys(m["utility"], ["kind", "param"], ["kind"], "model.utility")
    ukind = m["utility"]["kind"]
    if ukind not in _UTILITY_KINDS:
        raise ConfigError(
            f"model.utility.kind: expected one of {sorted(_UTILITY_KINDS)}, "
            f"got {ukind!r}")
    param = m["utility"].get("param")
    try:
        spec = UtilitySpec(
            _UTILITY_KINDS[ukind],
            None if param is None else _number(param, "model.utility.param"))
    except ValueError as exc:
        raise ConfigError(f"model.utility: {exc}")
    model = ModelConfig(
        T=_integer(m["T"], "model.T"),
        deltas=tuple(_number_list(m["deltas"], "model.deltas")),
        p=tuple(_number_list(m["p"], "model.p")),
        q=tuple(_number_list(m["q"], "model.q")),
        R=_number(m["R"], "model.R"),
        income=Income(_INCOME_KINDS[m["income"]["kind"]],
                      _number(m["income"]["value"], "model.income.value")),
        utility=spec,
    )

    r = raw["run"]
    _expect_keys(r, ["section", "delta1Index", "sweep"], ["section"], "run")
    section = _integer(r["section"], "run.section")
    if section not in (3, 4):
        raise ConfigError(f"run.section: expected 3 or 4, got {section}")
    delta1_index = None
    if "delta1Index" in r:
        delta1_index = _integer(r["delta1Index"], "run.delta1Index")
    sweep_t = sweep_n = None
    if "sweep" in r:
        s = r["sweep"]
        if not isinstance(s, dict) or not (
                set(s) == {"tMin", "tMax"} or set(s) == {"nList"}):
            raise ConfigError(
                "run.sweep: expected either {tMin, tMax} or {nList}")
        if "nList" in s:
            sweep_n = [_integer(x, f"run.sweep.nList[{i}]")
                       for i, x in enumerate(s["nList"])]
        else:
            t_min = _integer(s["tMin"], "run.sweep.tMin")
            t_max = _integer(s["tMax"], "run.sweep.tMax")
            if t_min > t_max:
                raise ConfigError("run.sweep: tMin exceeds tMax")
            sweep_t = list(range(t_min, t_max + 1))

    out_dir = None
    formats = ["csv", "json"]
    if "output" in raw:
        o = raw["output"]
        _expect_keys(o, ["dir", "formats"], [], "output")
        if "dir" in o:
            if not isinstance(o["dir"], str):
                raise ConfigError("output.dir: expected a string")
            out_dir = o["dir"]
        if "formats" in o:
            fmts = o["formats"]
            if (not isinstance(fmts, list)
                    or not set(fmts) <= {"csv", "json"} or not fmts):
                raise ConfigError(
                    "output.formats: expected a non-empty subset of [csv, json]")
            formats = list(dict.fromkeys(fmts))
    return RunConfig(model=model, section=section, delta1_index=delta1_index,
                     sweep_t=sweep_t, sweep_n=sweep_n, out_dir=out_dir,
                     formats=formats)


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _round12(obj):
    """Recursive 12-significant-digit rounding for JSON payloads."""
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.12g}")
    return obj


def write_csv(path: Path, header: list[str], rows: list[list],
              annotations: list[str] | None = None) -> None:
    lines = [f"# {a}" for a in (annotations or [])]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(_round12(payload), indent=2, sort_keys=True)
                    + "\n")


# ---------------------------------------------------------------------------
# solve: degenerate-impatience section
# ---------------------------------------------------------------------------

def _solve_section3(run: RunConfig, out_dir: Path) -> None:
    config = validate(run.model, allow_boundary_q=True)
    from .model import require_degenerate_impatience
    require_degenerate_impatience(config)
    for note in config.notes:
        print(f"note: {note}", file=sys.stderr)

    report = degenerate.welfare_report(config)
    eq, eff = report.equilibrium, report.efficient
    spec = config.utility

    if "csv" in run.formats:
        rows = []
        for t in range(1, config.T + 1):
            rows.append([
                t, eq.path[t - 1], spec.phi(eq.path[t - 1]),
                eff.path[t - 1], spec.phi(eff.path[t - 1]),
                bool(eq.corner[t - 1]), bool(eff.corner[t - 1]),
            ])
        write_csv(out_dir / "path.csv",
                  ["t", "v_eq", "c_eq", "v_eff", "c_eff", "corner_eq",
                   "corner_eff"], rows)

    gap_series = [{
        "T": config.T,
        "benchmarkGap": report.W_A - report.W_E,
        "efficiencyGap": report.V_B - report.V_E,
    }]
    sweep_payload = None
    if run.sweep_t is not None:
        sweep = degenerate.sweep_horizon(config, run.sweep_t)
        gap_series = [{
            "T": e.T,
            "benchmarkGap": e.benchmark_gap,
            "efficiencyGap": e.efficiency_gap,
        } for e in sweep.entries]
        sweep_payload = {
            "sideConditionChecked": sweep.side_condition_checked,
            "sideConditionHolds": sweep.side_condition_holds,
            "warnings": list(sweep.warnings),
        }

    if "json" in run.formats:
        payload = {
            "W_A": report.W_A,
            "W_E": report.W_E,
            "V_B": report.V_B,
            "V_E": report.V_E,
            "tStar": report.t_star,
            "crossingMonotone": report.crossing_monotone,
            "gapSeries": gap_series,
            "lambda": {"equilibrium": eq.lam, "efficient": eff.lam,
                       "benchmark": report.benchmark.lam},
            "notes": list(config.notes),
        }
        if sweep_payload is not None:
            payload["sweep"] = sweep_payload
        write_json(out_dir / "welfare.json", payload)

        mechanism = degenerate.build_full_mechanism(config, eq)
        write_json(out_dir / "mechanism.json",
                   _mechanism_payload(mechanism, config, eq))


def _mechanism_payload(policy: Policy, config: ModelConfig,
                       eq: degenerate.PathSolution) -> dict:
    on_path = [{
        "t": t,
        "v": eq.path[t - 1],
        "c": config.utility.phi(eq.path[t - 1]),
    } for t in range(1, config.T + 1)]
    off_path = []
    for t in range(2, config.T):
        hist = (1,) * (t - 1) + (2,)
        # Every node after the departure carries the same value; read it
        # off the first date-(t+1) successor.
        follow = hist + (1,) * (min(t + 1, config.T - 1) - len(hist))
        vbar = policy.get(t + 1, follow)
        off_path.append({
            "t": t,
            "vAtDeparture": policy.get(t, hist),
            "vbar": vbar,
            "continuationValue": continuation_value(policy, config, hist),
        })
    return {
        "T": config.T,
        "rootIndex": 1,
        "onPath": on_path,
        "offPath": off_path,
        "icResiduals": mechanism_ic_residuals(policy, config),
        "agentValue": degenerate.path_objective(config, eq.path),
    }


# ---------------------------------------------------------------------------
# solve: general-model section
# ---------------------------------------------------------------------------

def _screening_rows(config: ModelConfig, sol, eff_solution) -> list[list]:
    spec = config.utility
    pol = sol.to_policy(config)
    eff_sub = efficient_subtree(eff_solution, config, sol.delta1_index)
    gaps = screening.check_backloading(sol, config).gaps
    rows = []
    for n in range(1, config.n_types + 1):
        cc_eq = screening.continuation_cost(
            pol, config, (sol.delta1_index,), n)
        cc_eff = screening.continuation_cost(
            eff_sub, config, (sol.delta1_index,), n)
        rows.append([
            n, config.delta(n), sol.v1, sol.w[n - 1], sol.z[n - 1],
            spec.phi(sol.w[n - 1]), spec.phi(sol.z[n - 1]),
            cc_eq.date_t_npv, cc_eff.date_t_npv, gaps[n - 1],
        ])
    return rows


def _solve_section4(run: RunConfig, out_dir: Path) -> None:
    config = validate(run.model)
    eff_solution = screening.solve_efficient_policy(config)
    indices = ([run.delta1_index] if run.delta1_index is not None
               else list(range(1, config.n_types + 1)))

    euler_entries = []
    backloading_rows = []
    for idx in indices:
        sol = screening.solve_equilibrium_t3(config, idx)
        if "csv" in run.formats:
            write_csv(
                out_dir / f"screening_delta1_{idx}.csv",
                ["n", "delta2", "v1", "w_n", "z_n", "c2", "c3",
                 "contCostEq", "contCostEff", "gap_g_n"],
                _screening_rows(config, sol, eff_solution))
        pol = sol.to_policy(config)
        eu_eq = screening.check_inverse_euler(pol, config, "equilibrium")
        eff_sub = efficient_subtree(eff_solution, config, idx)
        eu_eff = screening.check_inverse_euler(eff_sub, config, "efficient")
        gaps = screening.check_backloading(sol, config).gaps
        for n in range(1, config.n_types + 1):
            backloading_rows.append([idx, n, config.delta(n), gaps[n - 1]])
        cc = [screening.continuation_cost(pol, config, (idx,), n).date_t_npv
              for n in range(1, config.n_types + 1)]
        entry = {
            "delta1Index": idx,
            "equilibriumEuler": _euler_payload(eu_eq),
            "efficientEuler": _euler_payload(eu_eff),
            "continuationCost": {
                "dateTNpv": cc,
                "min": min(cc),
                "max": max(cc),
                "percentFall": 100.0 * (max(cc) - min(cc)) / max(cc),
            },
            "lambda": sol.lam,
        }
        if config.utility.kind is UtilityKind.LOG:
            gr = screening.log_growth_ratios(config, idx)
            entry["growthRatios"] = {
                "equilibrium": list(gr.equilibrium),
                "efficient": list(gr.efficient),
            }
        euler_entries.append(entry)

    if "csv" in run.formats:
        write_csv(out_dir / "backloading_gaps.csv",
                  ["delta1Index", "n", "delta2", "gap_g_n"],
                  backloading_rows)
    if "json" in run.formats:
        write_json(out_dir / "euler.json", {
            "entries": euler_entries,
            "efficientLambda": eff_solution.lam,
        })


def _euler_payload(report: screening.EulerReport) -> dict:
    return {
        "kind": report.kind,
        "maxAbsResidual": report.max_abs_residual,
        "rows": [{
            "t": r.t,
            "history": list(r.history),
            "lhs": r.lhs,
            "rhs": r.rhs,
            "residual": r.residual,
        } for r in report.rows],
    }


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------

FIGURE_N = 10
FIGURE_DELTA_MIN = 0.5
FIGURE_DELTA_MAX = 1.0
FIGURE_R = 1.5
FIGURE_INCOME = 3.0


def figure_config(n_types: int = FIGURE_N) -> ModelConfig:
    deltas = tuple(
        FIGURE_DELTA_MIN
        + (FIGURE_DELTA_MAX - FIGURE_DELTA_MIN) * i / (n_types - 1)
        for i in range(n_types))
    uniform = (1.0 / n_types,) * n_types
    return ModelConfig(
        T=3, deltas=deltas, p=uniform, q=uniform, R=FIGURE_R,
        income=Income(IncomeKind.TOTAL_NPV, FIGURE_INCOME),
        utility=UtilitySpec(UtilityKind.SQRT_POWER, 0.5))


def cmd_figures(out_dir: Path) -> None:
    config = validate(figure_config())
    idx = config.n_types  # the most patient initial type
    sol = screening.solve_equilibrium_t3(config, idx)
    eff_solution = screening.solve_efficient_policy(config)
    eff_sub = efficient_subtree(eff_solution, config, idx)
    pol = sol.to_policy(config)
    spec = config.utility

    delta2 = [config.delta(n) for n in range(1, config.n_types + 1)]
    cont = [screening.continuation_cost(pol, config, (idx,), n).date_t_npv
            for n in range(1, config.n_types + 1)]
    c2_eq = [spec.phi(w) for w in sol.w]
    c3_eq = [spec.phi(z) for z in sol.z]
    c2_eff = [eff_sub.consumption(spec, 2, (idx, n))
              for n in range(1, config.n_types + 1)]
    c3_eff = [eff_sub.consumption(spec, 3, (idx, n))
              for n in range(1, config.n_types + 1)]

    write_csv(
        out_dir / "figure1.csv", ["delta2", "cont_npv_eq"],
        [[d, c] for d, c in zip(delta2, cont)],
        annotations=[
            "figure: date-2 continuation NPV of equilibrium consumption",
            "xlabel: delta2",
            "ylabel: NPV at the date-2 report (money units)",
            "series: cont_npv_eq role=equilibrium style=black "
            "monotone=increasing",
        ])
    write_csv(
        out_dir / "figure2.csv", ["delta2", "c2_eq", "c2_eff"],
        [[d, a, b] for d, a, b in zip(delta2, c2_eq, c2_eff)],
        annotations=[
            "figure: date-2 consumption by date-2 discount factor",
            "xlabel: delta2",
            "ylabel: date-2 consumption",
            "series: c2_eq role=equilibrium style=black monotone=decreasing",
            "series: c2_eff role=efficient style=grey monotone=flat",
        ])
    write_csv(
        out_dir / "figure3.csv", ["delta2", "c3_eq", "c3_eff"],
        [[d, a, b] for d, a, b in zip(delta2, c3_eq, c3_eff)],
        annotations=[
            "figure: date-3 consumption by date-2 discount factor",
            "xlabel: delta2",
            "ylabel: date-3 consumption",
            "series: c3_eq role=equilibrium style=black monotone=increasing",
            "series: c3_eff role=efficient style=grey monotone=increasing",
        ])


# ---------------------------------------------------------------------------
# reversal
# ---------------------------------------------------------------------------

def cmd_reversal(stream) -> None:
    base = ModelConfig(
        T=3, deltas=(0.4, 0.9), p=(0.75, 0.25), q=(0.75, 0.25), R=1.0,
        income=Income(IncomeKind.TOTAL_NPV, 3.0),
        utility=UtilitySpec(UtilityKind.SQRT_POWER, 0.5))
    firm_certain = ModelConfig(
        T=3, deltas=(0.4, 0.9), p=(1.0, 0.0), q=(0.75, 0.25), R=1.0,
        income=Income(IncomeKind.TOTAL_NPV, 3.0),
        utility=UtilitySpec(UtilityKind.SQRT_POWER, 0.5))

    print("Immediate-vs-delayed reward comparisons "
          "(utility 50 now against 100 one period later)", file=stream)
    for label, cfg in (("shared beliefs p = q = (3/4, 1/4)", base),
                       ("firm-certain variant p = (1, 0)", firm_certain)):
        demo = choice_reversal_demo(cfg, 50.0, 100.0, s=1)
        rep = discount_representation(cfg)
        print(f"\n{label}, deltas = (0.4, 0.9):", file=stream)
        print(f"  problem A (choice now):      immediate with probability "
              f"{_fmt(demo.prob_immediate_a)}", file=stream)
        print(f"  problem B (choice deferred): {demo.choice_b} always",
              file=stream)
        print(f"  mean discount {_fmt(rep.delta_bar)}; "
              f"beta = ({_fmt(rep.betas[0])}, {_fmt(rep.betas[1])}); "
              f"beta above one: {'yes' if rep.beta_exceeds_one else 'no'}",
              file=stream)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    residual: float
    tolerance: float

    def payload(self) -> dict:
        return {"name": self.name, "pass": bool(self.passed),
                "residual": self.residual, "tolerance": self.tolerance}


def _check(checks: list[Check], name: str, residual: float, tol: float):
    checks.append(Check(name, bool(abs(residual) <= tol), float(residual),
                        tol))


def _verify_section3(config: ModelConfig, checks: list[Check]) -> None:
    report = degenerate.welfare_report(config)
    eq = report.equilibrium
    mech = degenerate.build_full_mechanism(config, eq)
    I_T = config.income_npv()

    _check(checks, "budget binds on the equilibrium path",
           eq.budget_residual / I_T, 1e-9)
    for r in mechanism_ic_residuals(mech, config):
        _check(checks, f"impatient-type constraint tight at date {r['t']}",
               r["low"], 1e-10)
        _check(checks, f"patient-type constraint slack at date {r['t']}",
               min(0.0, r["high"]), 1e-10)
    gap = oracle.best_deviation(mech, config, 1).gap
    _check(checks, "no profitable reporting deviation", gap, 1e-8)

    prog = oracle.build_full_program(config, 1)
    full = oracle.solve_full(prog)
    obj = degenerate.path_objective(config, eq.path)
    _check(checks, "reference solver matches the path objective",
           (full.objective_value - obj) / abs(obj), 1e-6)
    low_diff = max(
        abs(full.policy.get(t, (1,) * min(t, config.T - 1)) - eq.path[t - 1])
        for t in range(1, config.T + 1))
    _check(checks, "reference solver matches the path values", low_diff, 1e-5)
    off_diff = max(
        abs(full.policy.get(t, (1,) * (t - 1) + (2,))
            - config.utility.floor_utility)
        for t in range(2, config.T))
    _check(checks, "patient-report utilities pinned at the floor",
           off_diff, 1e-5)
    _check(checks, "mean-discount benchmark dominates",
           min(0.0, report.W_A - report.W_E), 1e-12)
    _check(checks, "efficient surplus dominates",
           min(0.0, report.V_B - report.V_E), 1e-12)


def _verify_section4(config: ModelConfig, checks: list[Check],
                     delta1_index: int | None) -> None:
    indices = ([delta1_index] if delta1_index is not None
               else list(range(1, config.n_types + 1)))
    eff_solution = screening.solve_efficient_policy(config)
    I_T = config.income_npv()
    _check(checks, "efficient budget binds",
           eff_solution.budget_residual / I_T, 1e-9)
    eu = screening.check_inverse_euler(eff_solution.policy, config,
                                       "efficient")
    _check(checks, "efficient marginal-cost identities", eu.max_abs_residual,
           1e-8)

    for idx in indices:
        tag = f"initial type {idx}"
        if config.T == 3:
            sol = screening.solve_equilibrium_t3(config, idx)
            pol = sol.to_policy(config)
            _check(checks, f"{tag}: equilibrium budget binds",
                   sol.budget_residual / I_T, 1e-9)
            _check(checks, f"{tag}: binding upward constraints",
                   float(np.max(np.abs(sol.binding_ic_residuals))), 1e-9)
            prog = oracle.build_full_program(config, idx)
            full = oracle.solve_full(prog)
            obj = screening.reduced_objective(sol, config)
            _check(checks, f"{tag}: reference objective matches",
                   (full.objective_value - obj) / abs(obj), 1e-6)
            sup = float(np.max(np.abs(full.x - prog.flatten(pol))))
            _check(checks, f"{tag}: reference policy matches", sup, 1e-5)
            gaps = screening.check_backloading(sol, config).gaps
            _check(checks, f"{tag}: no distortion at the bottom", gaps[0],
                   1e-8)
            _check(checks, f"{tag}: backloading gaps non-negative",
                   min(0.0, float(np.min(gaps[1:]))), 1e-10)
        else:
            prog = oracle.build_full_program(config, idx)
            full = oracle.solve_full(prog)
            pol = full.policy
            _check(checks, f"{tag}: reference solver stationarity",
                   full.kkt_residual, 1e-7)
        eu = screening.check_inverse_euler(pol, config, "equilibrium")
        _check(checks, f"{tag}: equilibrium marginal-cost identities",
               eu.max_abs_residual, 1e-8)
        gap = oracle.best_deviation(pol, config, idx).gap
        _check(checks, f"{tag}: no profitable reporting deviation", gap, 1e-8)
        w_vals = [pol.get(2, (idx, n)) for n in range(1, config.n_types + 1)]
        _check(checks, f"{tag}: current utility non-increasing in the report",
               min(0.0, -float(np.max(np.diff(w_vals)))), 1e-9)


def cmd_verify(run: RunConfig, stream) -> int:
    from .model import ValidationIssue

    config = validate(run.model, allow_boundary_q=run.section == 3)
    if config.T > oracle.DESK_MAX_T or config.n_types > oracle.DESK_MAX_TYPES:
        raise ValidationError([ValidationIssue(
            "DESK_SCALE",
            f"verification runs the reference solver and needs "
            f"T <= {oracle.DESK_MAX_T}, N <= {oracle.DESK_MAX_TYPES}; "
            f"got T={config.T}, N={config.n_types}")])
    checks: list[Check] = []
    if run.section == 3:
        from .model import require_degenerate_impatience
        require_degenerate_impatience(config)
        _verify_section3(config, checks)
    else:
        _verify_section4(config, checks, run.delta1_index)
    payload = {"checks": [c.payload() for c in checks],
               "allPassed": all(c.passed for c in checks)}
    print(json.dumps(_round12(payload), indent=2, sort_keys=True),
          file=stream)
    for c in checks:
        status = "pass" if c.passed else "FAIL"
        print(f"{status}  {c.name}  (residual {_fmt(c.residual)}, "
              f"tolerance {_fmt(c.tolerance)})", file=sys.stderr)
    return EXIT_OK if payload["allPassed"] else EXIT_VERIFY


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="creditscreen",
        description="Solvers for competitive credit under stochastic "
                    "private discounting")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a config document")
    p_solve.add_argument("--config", required=True)
    p_solve.add_argument("--out", default=None)
    p_solve.add_argument("--format", default=None,
                         help="comma-separated subset of csv,json")

    p_verify = sub.add_parser("verify", help="run the invariant battery")
    p_verify.add_argument("--config", required=True)

    p_fig = sub.add_parser("figures", help="write the figure CSV bundle")
    p_fig.add_argument("--out", required=True)

    sub.add_parser("reversal", help="print the reward-timing demonstration")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "reversal":
            cmd_reversal(sys.stdout)
            return EXIT_OK
        if args.command == "figures":
            out_dir = Path(args.out)
            out_dir.mkdir(parents=True, exist_ok=True)
            cmd_figures(out_dir)
            return EXIT_OK

        run = parse_config(args.config)
        if args.command == "verify":
            return cmd_verify(run, sys.stdout)

        out_dir = Path(args.out or run.out_dir or ".")
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.format:
            fmts = [f.strip() for f in args.format.split(",") if f.strip()]
            if not set(fmts) <= {"csv", "json"} or not fmts:
                raise ConfigError(
                    "--format: expected a non-empty subset of csv,json")
            run.formats = fmts
        if run.section == 3:
            _solve_section3(run, out_dir)
        else:
            _solve_section4(run, out_dir)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NonSeparatingError as exc:
        print(f"non-separating equilibrium: {exc}", file=sys.stderr)
        cand = exc.candidate
        print(f"candidate: v1={_fmt(cand.v1)} lambda={_fmt(cand.lam)}",
              file=sys.stderr)
        print(f"  w: {[_fmt(x) for x in cand.w]}", file=sys.stderr)
        print(f"  z: {[_fmt(x) for x in cand.z]}", file=sys.stderr)
        return EXIT_NON_SEPARATING
    except (SolverError, MechanismConstructionError, oracle.OracleError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
