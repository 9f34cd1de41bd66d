"""Command-line front end: JSON experiment configs in, CSV/JSON reports out.

Commands: simulate, criteria, holonomy, ms-probe, composition-check, sweep.
Output is deterministic: fixed field order and floats rendered with 17
significant digits so doubles round-trip losslessly. Exit codes: 0 success,
2 config validation failure, 3 numerical failure (non-Hermitian input or a
level crossing).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from itertools import combinations
from typing import Optional

import numpy as np

from .effective import accumulate_trapezoid, build_effective, criteria
from .errors import AdiabaticaError
from .models import (
    MSSecondModelParams,
    RotatingModelParams,
    barred_model,
    mixing_angle,
    ms_candidate_evolution,
    ms_second_model,
    rotating_model,
)
from .phases import holonomy, ms_inconsistency_probe, phase_split
from .propagation import (
    coefficient_evolution,
    composition_check,
    propagate,
    stepping_evolution,
)
from .spectral import TimeGrid, build_frames, connection

COMMANDS = ("simulate", "criteria", "holonomy", "ms-probe", "composition-check", "sweep")
TOP_KEYS = {"command", "model", "grid", "epsilon", "energy_offset", "output", "format", "seed", "sweep"}
MODEL_KEYS = {"model", "mu_B", "theta", "omega", "omega0", "tau", "n"}
GRID_KEYS = {"t_start", "t_end", "steps"}
SWEEP_KEYS = {"ratio_min", "ratio_max", "points"}
MODEL_NAMES = ("rotating", "ms_second", "barred_rotating")
GRIDLESS_COMMANDS = ("sweep",)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _to_json(obj, indent: int = 0) -> str:
    """Deterministic JSON with insertion-order keys and 17-significant-digit floats."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f'{pad}  {json.dumps(str(k))}: {_to_json(v, indent + 1)}' for k, v in obj.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = ",\n".join(f"{pad}  {_to_json(v, indent + 1)}" for v in obj)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        if math.isnan(x):
            return "NaN"
        return _fmt(x)
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def _to_csv(header: list[str], rows: list[list]) -> str:
    def render(v) -> str:
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, (float, np.floating)):
            return _fmt(v)
        return str(v)

    lines = [",".join(header)]
    lines.extend(",".join(render(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def validate(config: dict, command: Optional[str] = None) -> list[str]:
    """Collect all config violations; an empty list means the config is valid.

    Never raises on malformed input: wrong types and unknown keys come back
    as violation strings.
    """
    out: list[str] = []
    if not isinstance(config, dict):
        return ["config must be a JSON object"]

    for key in config:
        if key not in TOP_KEYS:
            out.append(f"unknown key {key!r}")

    declared = config.get("command")
    if declared is not None:
        if declared not in COMMANDS:
            out.append(f"command must be one of {COMMANDS}")
        elif command is not None and declared != command:
            out.append(f"config command {declared!r} does not match invoked command {command!r}")
    effective_command = command or declared

    model = config.get("model")
    if not isinstance(model, dict):
        out.append("model block is required and must be an object")
        model = {}
    for key in model:
        if key not in MODEL_KEYS:
            out.append(f"unknown model key {key!r}")
    name = model.get("model")
    if name not in MODEL_NAMES:
        out.append(f"model must be one of {MODEL_NAMES}")
    if name in ("rotating", "barred_rotating"):
        mu_B, theta, omega = model.get("mu_B"), model.get("theta"), model.get("omega")
        if not (_is_number(mu_B) and mu_B > 0):
            out.append("mu_B must be a positive number")
        if not (_is_number(theta) and 0 < theta < math.pi):
            out.append("theta must lie in (0, pi)")
        if effective_command != "sweep" and not (_is_number(omega) and omega != 0):
            out.append("omega must be a nonzero number")
    elif name == "ms_second":
        omega0, tau, n = model.get("omega0"), model.get("tau"), model.get("n")
        if not (_is_number(omega0) and omega0 > 0):
            out.append("omega0 must be a positive number")
        if not (_is_number(tau) and tau > 0):
            out.append("tau must be a positive number")
        if n is not None:
            if not isinstance(n, int) or isinstance(n, bool):
                out.append("n must be an integer")
            elif _is_number(omega0) and _is_number(tau) and tau > 0:
                expected = 2 * n * (2 * math.pi / tau)
                if not math.isclose(omega0, expected, rel_tol=1e-9):
                    out.append("n requires omega0 = 2 * n * (2*pi/tau)")

    if effective_command == "sweep":
        if name is not None and name != "rotating":
            out.append("sweep requires the rotating model")
        sweep = config.get("sweep", {})
        if not isinstance(sweep, dict):
            out.append("sweep block must be an object")
        else:
            for key in sweep:
                if key not in SWEEP_KEYS:
                    out.append(f"unknown sweep key {key!r}")
            lo = sweep.get("ratio_min", 1e-3)
            hi = sweep.get("ratio_max", 1e3)
            points = sweep.get("points", 61)
            if not (_is_number(lo) and lo > 0):
                out.append("ratio_min must be positive")
            if not (_is_number(hi) and _is_number(lo) and hi > lo):
                out.append("ratio_max must exceed ratio_min")
            if not isinstance(points, int) or isinstance(points, bool) or points < 2:
                out.append("points must be an integer >= 2")
    elif "sweep" in config:
        out.append("sweep block is only valid for the sweep command")

    if effective_command == "composition-check" and name is not None and name != "ms_second":
        out.append("composition-check requires the ms_second model")

    needs_grid = effective_command not in GRIDLESS_COMMANDS
    grid = config.get("grid")
    if needs_grid:
        if not isinstance(grid, dict):
            out.append("grid block is required and must be an object")
            grid = {}
        for key in grid:
            if key not in GRID_KEYS:
                out.append(f"unknown grid key {key!r}")
        t_start, t_end, steps = grid.get("t_start"), grid.get("t_end"), grid.get("steps")
        if not _is_number(t_start):
            out.append("t_start must be a number")
        if not _is_number(t_end) or (_is_number(t_start) and not t_end > t_start):
            out.append("t_end must be a number greater than t_start")
        if not isinstance(steps, int) or isinstance(steps, bool) or steps < 16:
            out.append("steps must be an integer >= 16")
    elif grid is not None and not isinstance(grid, dict):
        out.append("grid block must be an object")

    epsilon = config.get("epsilon", 0.1)
    if not (_is_number(epsilon) and epsilon > 0):
        out.append("epsilon must be positive")
    if not _is_number(config.get("energy_offset", 0.0)):
        out.append("energy_offset must be a number")
    fmt = config.get("format", "json")
    if fmt not in ("csv", "json"):
        out.append("format must be 'csv' or 'json'")
    seed = config.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        out.append("seed must be an integer")
    if "output" in config and not isinstance(config["output"], str):
        out.append("output must be a path string")
    return out


def _build_grid(config: dict) -> TimeGrid:
    g = config["grid"]
    return TimeGrid(t_start=float(g["t_start"]), t_end=float(g["t_end"]), steps=int(g["steps"]))


def _build_spec(config: dict, grid: Optional[TimeGrid]):
    model = config["model"]
    name = model["model"]
    if name == "rotating":
        params = RotatingModelParams(
            mu_B=float(model["mu_B"]), theta=float(model["theta"]), omega=float(model["omega"])
        )
        return rotating_model(params), params
    if name == "barred_rotating":
        params = RotatingModelParams(
            mu_B=float(model["mu_B"]), theta=float(model["theta"]), omega=float(model["omega"])
        )
        return barred_model(rotating_model(params), grid), params
    params = MSSecondModelParams(
        omega_0=float(model["omega0"]), tau=float(model["tau"]), regime_n=model.get("n")
    )
    return ms_second_model(params), params


def _frames_pipeline(config: dict):
    grid = _build_grid(config)
    spec, params = _build_spec(config, grid)
    frames = build_frames(spec, grid)
    conn = connection(frames)
    return grid, spec, params, frames, conn


def run_simulate(config: dict):
    grid, spec, _, frames, conn = _frames_pipeline(config)
    levels = list(range(spec.dim))
    result = propagate(spec, grid, levels, frames=frames)
    dt = grid.dt
    dyn = {n: accumulate_trapezoid(frames.energies[:, n], dt) for n in levels}
    geo = {n: accumulate_trapezoid(conn.values[:, n, n].real, dt) for n in levels}

    header = ["t"]
    for n in levels:
        header += [f"psi{n}_re_{i}" for i in range(spec.dim)]
        header += [f"psi{n}_im_{i}" for i in range(spec.dim)]
        header += [f"prob{n}_{m}" for m in range(spec.dim)]
        header += [f"phase_dyn_{n}", f"phase_geo_{n}"]
    rows = []
    for k, t in enumerate(grid.times):
        row = [t]
        for n in levels:
            state = result.states[n][k]
            row += list(state.real) + list(state.imag)
            row += list(np.abs(result.coefficients[n][k]) ** 2)
            row += [dyn[n][k], geo[n][k]]
        rows.append(row)

    payload = {
        "command": "simulate",
        "times": list(grid.times),
        "levels": [
            {
                "level": n,
                "psi_re": [list(v.real) for v in result.states[n]],
                "psi_im": [list(v.imag) for v in result.states[n]],
                "probabilities": [list(np.abs(c) ** 2) for c in result.coefficients[n]],
                "phase_dynamical": list(dyn[n]),
                "phase_geometric": list(geo[n]),
            }
            for n in levels
        ],
    }
    return payload, header, rows


def run_criteria(config: dict):
    _, _, _, frames, conn = _frames_pipeline(config)
    eff = build_effective(frames, conn)
    report = criteria(
        eff,
        epsilon=float(config.get("epsilon", 0.1)),
        energy_offset=float(config.get("energy_offset", 0.0)),
    )
    payload = report.to_dict()
    header = [
        "r_naive", "r_gap", "r_level", "epsilon", "energy_offset",
        "verdict_naive", "verdict_gap", "verdict_level",
    ]
    rows = [[
        report.r_naive, report.r_gap, report.r_level, report.epsilon, report.energy_offset,
        report.verdicts["naive"], report.verdicts["gap"], report.verdicts["level"],
    ]]
    return payload, header, rows


def run_holonomy(config: dict):
    _, spec, _, frames, conn = _frames_pipeline(config)
    header = ["level", "dynamical", "geometric", "holonomy_re", "holonomy_im", "gauge"]
    rows = []
    entries = []
    for n in range(spec.dim):
        split = phase_split(frames, conn, n)
        h = holonomy(frames, conn, n)
        rows.append(
            [n, split.dynamical, split.geometric, h.value.real, h.value.imag, frames.gauge.value]
        )
        entries.append(
            {
                "level": n,
                "dynamical": split.dynamical,
                "geometric": split.geometric,
                "holonomy_re": h.value.real,
                "holonomy_im": h.value.imag,
                "gauge": frames.gauge.value,
            }
        )
    return {"command": "holonomy", "levels": entries}, header, rows


def run_ms_probe(config: dict):
    grid = _build_grid(config)
    spec, _ = _build_spec(config, grid)
    report = ms_inconsistency_probe(spec, grid, level=0)
    header = ["t", "chain_re", "chain_im", "chain_abs", "residual"]
    rows = [
        [t, c.real, c.imag, abs(c), r]
        for t, c, r in zip(report.times, report.chain, report.residual)
    ]
    payload = {
        "command": "ms-probe",
        "level": report.level,
        "phase_convention": report.phase_convention,
        "times": list(report.times),
        "chain_re": list(report.chain.real),
        "chain_im": list(report.chain.imag),
        "chain_abs": [abs(c) for c in report.chain],
        "residual": list(report.residual),
    }
    return payload, header, rows


def run_composition_check(config: dict):
    grid, spec, params, frames, conn = _frames_pipeline(config)
    times = grid.times
    idx = sorted({int(i) for i in np.linspace(0, grid.steps, 9)})
    triples = list(combinations([times[i] for i in idx], 3))

    dev_candidate = composition_check(
        lambda t2, t1: ms_candidate_evolution(params, t2, t1), triples
    )
    axis = np.array([1.0, 0.0, 0.0])
    dev_fixed = composition_check(
        lambda t2, t1: ms_candidate_evolution(params, t2, t1, fixed_direction=axis), triples
    )
    eff = build_effective(frames, conn)
    dev_effective = composition_check(coefficient_evolution(eff), triples)
    stepping = composition_check(stepping_evolution(propagate(spec, grid, [], frames=frames)), triples)

    payload = {
        "command": "composition-check",
        "triples": len(triples),
        "candidate": dev_candidate,
        "candidate_fixed_direction": dev_fixed,
        "effective_stepping": dev_effective,
        "hamiltonian_stepping": stepping,
    }
    header = ["candidate", "candidate_fixed_direction", "effective_stepping", "hamiltonian_stepping"]
    return payload, header, [[dev_candidate, dev_fixed, dev_effective, stepping]]


def run_sweep(config: dict):
    model = config["model"]
    mu_B, theta = float(model["mu_B"]), float(model["theta"])
    sweep = config.get("sweep", {})
    lo = float(sweep.get("ratio_min", 1e-3))
    hi = float(sweep.get("ratio_max", 1e3))
    points = int(sweep.get("points", 61))
    ratios = np.logspace(math.log10(lo), math.log10(hi), points)

    header = [
        "ratio", "omega", "alpha",
        "geometric_phase_plus", "geometric_phase_minus",
        "dynamical_phase_plus", "dynamical_phase_minus",
    ]
    rows = []
    for r in ratios:
        params = RotatingModelParams(mu_B=mu_B, theta=theta, omega=float(r * mu_B))
        a = mixing_angle(params)
        c = math.cos(theta - a)
        T = params.period
        rows.append(
            [
                float(r),
                params.omega,
                a,
                math.pi * (1 + c),
                math.pi * (1 - c),
                -mu_B * math.cos(a) * T,
                +mu_B * math.cos(a) * T,
            ]
        )
    payload = {
        "command": "sweep",
        "mu_B": mu_B,
        "theta": theta,
        "columns": header,
        "rows": [list(row) for row in rows],
    }
    return payload, header, rows


RUNNERS = {
    "simulate": run_simulate,
    "criteria": run_criteria,
    "holonomy": run_holonomy,
    "ms-probe": run_ms_probe,
    "composition-check": run_composition_check,
    "sweep": run_sweep,
}

COLUMN_DOCS = {
    "simulate": "CSV columns: t, psi{n}_re_{i}/psi{n}_im_{i} (state components per initial level n), "
    "prob{n}_{m} = |c_m|^2, phase_dyn_{n}, phase_geo_{n} (accumulated, gauge-dependent).",
    "criteria": "CSV columns: r_naive, r_gap, r_level, epsilon, energy_offset, verdict_*. "
    "JSON additionally carries the worst-case witnesses.",
    "holonomy": "CSV columns: level, dynamical, geometric, holonomy_re, holonomy_im, gauge.",
    "ms-probe": "CSV columns: t, chain_re, chain_im, chain_abs, residual.",
    "composition-check": "CSV columns: candidate, candidate_fixed_direction, effective_stepping, "
    "hamiltonian_stepping (max deviation over sampled triples).",
    "sweep": "CSV columns: ratio, omega, alpha, geometric_phase_plus, geometric_phase_minus, "
    "dynamical_phase_plus, dynamical_phase_minus (per drive period).",
}


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adiabatica",
        description="Adiabaticity criteria, exact propagation, and geometric phases "
        "for driven two-level models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=COLUMN_DOCS[name], epilog=COLUMN_DOCS[name])
        p.add_argument("--config", required=True, help="path to the JSON experiment config")
        p.add_argument("--output", default=None, help="output file (default: stdout)")
        p.add_argument("--format", default=None, choices=("csv", "json"), help="output format")
        p.add_argument("--verbose", action="store_true", help="progress notes on stderr")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = _parser().parse_args(argv)

    try:
        with open(args.config, encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"adiabatica: cannot read config: {exc}", file=sys.stderr)
        return 2

    violations = validate(config, command=args.command)
    if violations:
        for v in violations:
            print(f"adiabatica: invalid config: {v}", file=sys.stderr)
        return 2

    if args.verbose:
        print(f"adiabatica: running {args.command}", file=sys.stderr)
    try:
        payload, header, rows = RUNNERS[args.command](config)
    except AdiabaticaError as exc:
        print(f"adiabatica: numerical error: {exc}", file=sys.stderr)
        return 3

    fmt = args.format or config.get("format", "json")
    text = _to_csv(header, rows) if fmt == "csv" else _to_json(payload) + "\n"
    output = args.output or config.get("output")
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        if args.verbose:
            print(f"adiabatica: wrote {output}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
