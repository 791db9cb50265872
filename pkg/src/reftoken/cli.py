"""Command-line front end producing CSV/JSON artifacts.

Four subcommands: `fig2` (fidelity vs combined noise width, closed form against
the numeric pipeline), `fig3` (best superposition-token fidelity vs width
ratio), `converge-tau` (finite-window kernel approaching the asymptotic one),
and `simulate` (seeded Monte Carlo protocol run against the kernel reference).

Artifacts are deterministic: metadata records the tool version, parameters,
and seed, never wall-clock time. Exit codes: 0 success, 2 usage error,
3 numerical guard failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import gaussian_fidelity, maximize_fidelity
from .channel import (
    asymptotic_kernel,
    finite_tau_kernel,
    identity_kernel,
    kernel_fidelity,
    mc_protocol,
    numeric_fidelity,
)
from .errors import RefTokenError
from .grid import Grid, make_grid
from .povm import Smearing, outcome_distribution
from .states import GaussianSpec, GaussianToken, auto_grid, gaussian_wavefunction

FIG2_TOL = 1e-6
TRACE_TOL = 1e-8

DEFAULTS: dict[str, dict] = {
    "fig2": {
        "deltas": [0.5, 1.0, 2.0],
        "s_min": 0.0,
        "s_max": 5.0,
        "s_step": 0.1,
        "grid_points": 1024,
        "grid_half_width": None,
        "format": "csv",
        "out": None,
    },
    "fig3": {
        "ratio_min": 0.1,
        "ratio_max": 10.0,
        "ratio_points": 50,
        "xbar_scan": False,
        "format": "csv",
        "out": None,
    },
    "converge-tau": {
        "taus": [5.0, 10.0, 20.0, 50.0],
        "sigma": 1.0,
        "smearing": 0.0,
        "system_width": 1.0,
        "grid_points": 1024,
        "grid_half_width": None,
        "format": "csv",
        "out": None,
    },
    "simulate": {
        "sigma": 1.0,
        "smearing": 0.0,
        "system_width": 1.0,
        "tau": 20.0,
        "n_samples": 100_000,
        "seed": None,
        "grid_points": 1024,
        "grid_half_width": None,
        "format": "json",
        "out": None,
    },
}


class _UsageError(Exception):
    pass


class _GuardFailure(Exception):
    pass


def _float_list(value) -> list[float]:
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    try:
        return [float(tok) for tok in str(value).split(",") if tok.strip()]
    except ValueError as exc:
        raise _UsageError(f"cannot parse number list {value!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reftoken",
        description="Reference-token communication channel: figures, convergence, simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", default=None, choices=["csv", "json"])
        p.add_argument("--grid-half-width", type=float, default=None)
        p.add_argument("--grid-points", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--config", default=None, help="JSON file mirroring the flags")

    p2 = sub.add_parser("fig2", help="fidelity vs combined width s for several system widths")
    p2.add_argument("--deltas", default=None, help="comma-separated system widths")
    p2.add_argument("--s-min", type=float, default=None)
    p2.add_argument("--s-max", type=float, default=None)
    p2.add_argument("--s-step", type=float, default=None)
    common(p2)

    p3 = sub.add_parser("fig3", help="best superposition-token fidelity vs width ratio")
    p3.add_argument("--ratio-min", type=float, default=None)
    p3.add_argument("--ratio-max", type=float, default=None)
    p3.add_argument("--ratio-points", type=int, default=None)
    p3.add_argument("--xbar-scan", action="store_const", const=True, default=None,
                    help="also report the packet-separation argmax column")
    common(p3)

    pc = sub.add_parser("converge-tau", help="finite-window kernel against the asymptotic one")
    pc.add_argument("--taus", default=None, help="comma-separated increasing window half-widths")
    pc.add_argument("--sigma", type=float, default=None)
    pc.add_argument("--smearing", type=float, default=None)
    pc.add_argument("--system-width", type=float, default=None)
    common(pc)

    ps = sub.add_parser("simulate", help="seeded Monte Carlo protocol run")
    ps.add_argument("--sigma", type=float, default=None)
    ps.add_argument("--smearing", type=float, default=None)
    ps.add_argument("--system-width", type=float, default=None)
    ps.add_argument("--tau", type=float, default=None)
    ps.add_argument("--n-samples", type=int, default=None)
    common(ps)

    return parser


def _merge_config(args: argparse.Namespace) -> dict:
    merged = dict(DEFAULTS[args.command])
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            data = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise _UsageError(f"cannot read config {config_path}: {exc}") from exc
        if not isinstance(data, dict):
            raise _UsageError("config file must hold a JSON object")
        unknown = sorted(set(data) - set(merged))
        if unknown:
            raise _UsageError(f"config keys not valid for {args.command}: {', '.join(unknown)}")
        merged.update(data)
    for key in merged:
        given = getattr(args, key, None)
        if given is not None:
            merged[key] = given
    return merged


def _format_value(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, (list, tuple)):
        return ",".join(_format_value(v) for v in value)
    return str(value)


def _render(command: str, params: dict, columns: list[str], rows: list[list], fmt: str) -> str:
    if fmt == "csv":
        lines = [f"# reftoken {__version__}", f"# command: {command}"]
        for key in sorted(params):
            lines.append(f"# {key}: {_format_value(params[key])}")
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_format_value(v) for v in row))
        return "\n".join(lines) + "\n"
    payload = {
        "meta": {"tool": "reftoken", "version": __version__, "command": command,
                 "params": params},
        "columns": columns,
        "rows": rows,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _message_state(width: float, cfg: dict):
    spec = GaussianSpec(0.0, 0.0, width)
    n = int(cfg["grid_points"])
    if cfg["grid_half_width"] is not None:
        grid = make_grid(float(cfg["grid_half_width"]), n)
    else:
        grid = auto_grid(spec, n_points=n)
    return gaussian_wavefunction(spec, grid)


def cmd_fig2(cfg: dict) -> str:
    deltas = _float_list(cfg["deltas"])
    if not deltas:
        raise _UsageError("need at least one system width")
    if any(d <= 0 for d in deltas):
        raise _UsageError("system widths must be positive")
    s_min, s_max, s_step = float(cfg["s_min"]), float(cfg["s_max"]), float(cfg["s_step"])
    if s_min < 0 or s_max < s_min or s_step <= 0:
        raise _UsageError(f"invalid s range [{s_min}, {s_max}] step {s_step}")
    count = int(round((s_max - s_min) / s_step)) + 1
    s_values = [s_min + i * s_step for i in range(count)]

    n_points = int(cfg["grid_points"])
    override = None
    if cfg["grid_half_width"] is not None:
        override = make_grid(float(cfg["grid_half_width"]), n_points)

    rows: list[list] = []
    for width in deltas:
        for s in s_values:
            f_analytic = gaussian_fidelity(width, s)
            if s == 0.0:
                # s = 0 means a perfectly localized token read out sharply:
                # the channel is exactly the identity.
                psi = _message_state(width, cfg)
                f_numeric = kernel_fidelity(identity_kernel(psi.grid), psi)
            else:
                report = numeric_fidelity(
                    GaussianSpec(0.0, 0.0, width), GaussianToken(s),
                    system_grid=override, n_points=n_points,
                )
                f_numeric = report.fidelity
            if abs(f_analytic - f_numeric) > FIG2_TOL:
                raise _GuardFailure(
                    f"closed form and pipeline disagree by "
                    f"{abs(f_analytic - f_numeric):.3e} at Delta={width}, s={s}"
                )
            rows.append([width, s, f_analytic, f_numeric])

    params = {k: cfg[k] for k in ("deltas", "s_min", "s_max", "s_step",
                                  "grid_points", "grid_half_width")}
    params["deltas"] = deltas
    return _render("fig2", params, ["Delta", "s", "F_analytic", "F_numeric"], rows,
                   cfg["format"])


def cmd_fig3(cfg: dict) -> str:
    lo, hi, count = float(cfg["ratio_min"]), float(cfg["ratio_max"]), int(cfg["ratio_points"])
    if lo <= 0 or hi < lo or count < 1:
        raise _UsageError(f"invalid ratio ladder [{lo}, {hi}] with {count} points")
    want_xbar = bool(cfg["xbar_scan"])
    ratios = np.geomspace(lo, hi, count)

    columns = ["ratio", "F_max", "p_bar_max_sigma", "beta"]
    if want_xbar:
        columns.append("x_bar_max_sigma")
    rows: list[list] = []
    for ratio in ratios:
        best = maximize_fidelity(float(ratio))
        if best.f_max + 1e-12 < best.beta:
            raise _GuardFailure(
                f"maximum {best.f_max!r} fell below the baseline {best.beta!r} "
                f"at ratio {ratio}"
            )
        row = [best.ratio, best.f_max, best.p_bar_max_sigma, best.beta]
        if want_xbar:
            row.append(best.x_bar_max_sigma)
        rows.append(row)

    params = {k: cfg[k] for k in ("ratio_min", "ratio_max", "ratio_points", "xbar_scan")}
    params["xbar_scan"] = want_xbar
    return _render("fig3", params, columns, rows, cfg["format"])


def cmd_converge_tau(cfg: dict) -> str:
    taus = _float_list(cfg["taus"])
    if len(taus) < 1:
        raise _UsageError("need at least one window half-width")
    if any(t <= 0 for t in taus) or any(b <= a for a, b in zip(taus, taus[1:])):
        raise _UsageError(f"window ladder must be positive and strictly increasing, got {taus}")
    sigma, smearing = float(cfg["sigma"]), float(cfg["smearing"])
    width = float(cfg["system_width"])

    psi = _message_state(width, cfg)
    dist = outcome_distribution(GaussianToken(sigma), Smearing(smearing),
                                n_points=int(cfg["grid_points"]))
    reference = asymptotic_kernel(dist, psi.grid)
    fidelity_inf = kernel_fidelity(reference, psi)

    rows: list[list] = []
    deviations: list[float] = []
    for tau in taus:
        kern = finite_tau_kernel(dist, tau, psi.grid)
        deviation = float(np.max(np.abs(kern.factor - reference.factor)))
        if kern.trace_defect > TRACE_TOL:
            raise _GuardFailure(
                f"window kernel trace error {kern.trace_defect:.3e} at tau={tau}"
            )
        deviations.append(deviation)
        rows.append([tau, deviation, kernel_fidelity(kern, psi), fidelity_inf,
                     kern.trace_defect])
    for (t_a, d_a), (t_b, d_b) in zip(zip(taus, deviations), zip(taus[1:], deviations[1:])):
        if d_b > d_a * (1 + 1e-9):
            raise _GuardFailure(
                f"kernel deviation grew from {d_a:.3e} (tau={t_a}) to {d_b:.3e} (tau={t_b})"
            )

    params = {k: cfg[k] for k in ("taus", "sigma", "smearing", "system_width",
                                  "grid_points", "grid_half_width")}
    params["taus"] = taus
    return _render(
        "converge-tau", params,
        ["tau", "max_abs_deviation", "fidelity_tau", "fidelity_inf", "trace_error"],
        rows, cfg["format"],
    )


def cmd_simulate(cfg: dict) -> str:
    if cfg["format"] != "json":
        raise _UsageError("simulate reports are JSON only")
    if cfg["seed"] is None:
        raise _UsageError("simulate needs --seed for a reproducible run")
    n_samples = int(cfg["n_samples"])
    if n_samples < 1000:
        raise _UsageError(f"need at least 1000 samples, got {n_samples}")
    sigma, smearing = float(cfg["sigma"]), float(cfg["smearing"])
    width, tau = float(cfg["system_width"]), float(cfg["tau"])

    psi = _message_state(width, cfg)
    dist = outcome_distribution(GaussianToken(sigma), Smearing(smearing),
                                n_points=int(cfg["grid_points"]))
    report = mc_protocol(psi, dist, tau=tau, n_samples=n_samples, seed=int(cfg["seed"]))
    f_kernel = kernel_fidelity(finite_tau_kernel(dist, tau, psi.grid), psi)
    deviation = abs(report.fidelity - f_kernel) / report.std_err

    params = {k: cfg[k] for k in ("sigma", "smearing", "system_width", "tau",
                                  "n_samples", "seed", "grid_points", "grid_half_width")}
    payload = {
        "meta": {"tool": "reftoken", "version": __version__, "command": "simulate",
                 "params": params},
        "report": report.as_dict(),
        "reference": {
            "fidelity_kernel": f_kernel,
            "kernel_kind": "finite_tau",
            "deviation_std_errs": deviation,
        },
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


_COMMANDS = {
    "fig2": cmd_fig2,
    "fig3": cmd_fig3,
    "converge-tau": cmd_converge_tau,
    "simulate": cmd_simulate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _merge_config(args)
        text = _COMMANDS[args.command](cfg)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _GuardFailure as exc:
        print(f"guard failure: {exc}", file=sys.stderr)
        return 3
    except RefTokenError as exc:
        print(f"guard failure: {exc}", file=sys.stderr)
        return 3
    _emit(text, cfg["out"])
    return 0


def run() -> None:
    sys.exit(main())
