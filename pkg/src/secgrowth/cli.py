"""Batch driver: every scan and check as a subcommand, JSON config in,
CSV rows plus a JSON verdict sidecar out.

Determinism contract: rerunning any experiment with the same config and
seed writes a byte-identical CSV (floats printed with 17 significant
digits; the sidecar repeats the config hash and seed).  Verdicts use a
dead band: GROWTH needs exponent > 0.2 with r^2 > 0.95, BOUNDED needs
exponent <= 0.1, anything between is INCONCLUSIVE; cancellation checks
report CANCELLED with the worst residual.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BoundedSignal, ConfigInvalid, SecGrowthError

EXPERIMENTS = (
    "toy",
    "propagator",
    "secular-scalar",
    "secular-dirac",
    "secular-loop",
    "cancel-scalar",
    "cancel-dirac",
    "cumulant",
    "decay",
)

_DEFAULTS = {
    "beta": 1.0,
    "mass": 1.0,
    "rel_tol": 1e-8,
    "seed": 7,
    "delta_m2": 0.5,
    "order": 2,
    "coupling": 1.0,
    "trials": 100,
    "kind": "fermi_smooth_part",
    "spatial_offset": 0.0,
    "probe_n": 4,
    "loop_case": "thermal_phi4",
    "mc_samples": 400000,
    "eps": 0.5,
    "d": 1.0,
    "chain_n": 3,
    "switch": {"epsilon": 1.0, "shape": "smoothstep", "k": 5},
    "packet": {"time_width": 1.0, "space_width": 1.0, "amplitude": 1.0},
    "t_grid": {"start": 20.0, "stop": 200.0, "num": 46},
    "window": None,
    "packet_offset": 0.5,
    "axis": 0,
}


def _schema_check(cfg: dict, experiment: str):
    """Structural validation with jsonschema; physics bounds checked after."""
    import jsonschema

    schema = {
        "type": "object",
        "properties": {
            "experiment": {"enum": list(EXPERIMENTS)},
            "beta": {"type": "number", "exclusiveMinimum": 0},
            "mass": {"type": "number", "exclusiveMinimum": 0},
            "rel_tol": {"type": "number", "exclusiveMinimum": 1e-14, "exclusiveMaximum": 1e-2},
            "seed": {"type": "integer", "minimum": 0},
            "delta_m2": {"type": "number"},
            "order": {"type": "integer", "minimum": 1, "maximum": 5},
            "coupling": {"type": "number"},
            "trials": {"type": "integer", "minimum": 1, "maximum": 100000},
            "kind": {"type": "string"},
            "spatial_offset": {"type": "number", "minimum": 0},
            "probe_n": {"type": "integer", "minimum": 2, "maximum": 6},
            "loop_case": {"enum": ["thermal_phi4", "phi3_vacuum", "compact_phi4"]},
            "mc_samples": {"type": "integer", "minimum": 1000},
            "eps": {"type": "number", "exclusiveMinimum": 0},
            "d": {"type": "number", "exclusiveMinimum": 0},
            "chain_n": {"type": "integer", "minimum": 2, "maximum": 5},
            "switch": {
                "type": "object",
                "properties": {
                    "epsilon": {"type": "number", "exclusiveMinimum": 0},
                    "shape": {"enum": ["smoothstep", "sharp"]},
                    "k": {"type": "integer", "minimum": 3, "maximum": 9},
                },
            },
            "packet": {
                "type": "object",
                "properties": {
                    "time_width": {"type": "number", "exclusiveMinimum": 0},
                    "space_width": {"type": "number", "exclusiveMinimum": 0},
                    "amplitude": {"type": "number"},
                },
            },
            "t_grid": {
                "type": "object",
                "properties": {
                    "start": {"type": "number", "exclusiveMinimum": 0},
                    "stop": {"type": "number"},
                    "num": {"type": "integer", "minimum": 2, "maximum": 5000},
                },
                "required": ["start", "stop", "num"],
            },
            "window": {"type": ["array", "null"], "items": {"type": "number"}},
            "packet_offset": {"type": "number"},
            "axis": {"type": "integer", "minimum": 0, "maximum": 2},
        },
        "additionalProperties": False,
    }
    try:
        jsonschema.validate(cfg, schema)
    except jsonschema.ValidationError as exc:
        raise ConfigInvalid(f"config failed schema validation: {exc.message}") from exc
    if cfg.get("experiment", experiment) != experiment:
        raise ConfigInvalid(
            f"config experiment {cfg.get('experiment')!r} does not match subcommand {experiment!r}"
        )


def load_config(path: str | None, experiment: str, overrides: dict) -> dict:
    cfg = {}
    if path is not None:
        try:
            with open(path) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot parse config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigInvalid("config must be a JSON object")
    _schema_check(cfg, experiment)
    merged = dict(_DEFAULTS)
    merged.update(cfg)
    for key, val in overrides.items():
        if val is not None:
            merged[key] = val
    merged["experiment"] = experiment
    return merged


def _config_hash(cfg: dict) -> str:
    return hashlib.sha256(
        json.dumps(cfg, sort_keys=True, default=float).encode()
    ).hexdigest()[:16]


def _grid(cfg) -> np.ndarray:
    g = cfg["t_grid"]
    return np.linspace(float(g["start"]), float(g["stop"]), int(g["num"]))


def _window(cfg, ts) -> tuple[float, float]:
    if cfg.get("window"):
        return float(cfg["window"][0]), float(cfg["window"][1])
    return float(ts[0]), float(ts[-1])


def _switch(cfg):
    from .switching import SwitchFunction

    s = cfg["switch"]
    return SwitchFunction(
        epsilon=float(s.get("epsilon", 1.0)),
        shape=s.get("shape", "smoothstep"),
        k=int(s.get("k", 5)),
    )


def _params(cfg):
    from .propagators import ThermalParams

    beta = cfg["beta"]
    return ThermalParams(np.inf if beta in ("inf", 0) else float(beta), float(cfg["mass"]))


# ----------------------------------------------------------------------
# experiment runners: each returns (header, rows, verdict_dict)
# ----------------------------------------------------------------------


def _growth_verdict(fit) -> dict:
    if fit.exponent > 0.2 and fit.r_squared > 0.95:
        verdict = "GROWTH"
    elif fit.exponent <= 0.1:
        verdict = "BOUNDED"
    else:
        verdict = "INCONCLUSIVE"
    return {
        "verdict": verdict,
        "exponent": fit.exponent,
        "coefficient": fit.coefficient,
        "r_squared": fit.r_squared,
        "window": list(fit.window),
    }


def _run_toy(cfg):
    from .toymodel import fit_order_growth, order_growth_scan

    ts = _grid(cfg)
    scan = order_growth_scan(
        int(cfg["order"]), ts, float(cfg["mass"]), float(cfg["delta_m2"]),
        min(float(cfg["rel_tol"]), 1e-9),
    )
    fit = fit_order_growth(scan, _window(cfg, ts))
    rows = [(t, y, float(cfg["rel_tol"]) * abs(y)) for t, y in scan]
    return ("t", "value", "error_estimate"), rows, _growth_verdict(fit)


def _run_propagator(cfg):
    from .propagators import PropagatorKind, decay_envelope
    from .quadrature import fit_growth_exponent

    ts = _grid(cfg)
    env = decay_envelope(
        PropagatorKind(cfg["kind"]), _params(cfg), list(ts),
        float(cfg["spatial_offset"]), float(cfg["rel_tol"]),
    )
    fit = fit_growth_exponent(env, _window(cfg, ts))
    rows = [(t, y, float(cfg["rel_tol"]) * abs(y)) for t, y in env]
    out = _growth_verdict(fit)
    out["envelope_max_over_min"] = max(y for _, y in env) / min(y for _, y in env)
    return ("t", "value", "error_estimate"), rows, out


def _run_secular_scalar(cfg):
    from .propagators import ThermalParams
    from .quadrature import fit_growth_exponent
    from .scalar_ed import ExternalPotential, secular_scan
    from .switching import SpacetimePoint, TestFunction

    ts = _grid(cfg)
    a = float(cfg["packet_offset"])
    axis = int(cfg["axis"])
    center_f = [0.0, 0.0, 0.0]
    center_g = [0.0, 0.0, 0.0]
    center_f[axis] = a
    center_g[axis] = -a
    pk = cfg["packet"]
    f = TestFunction(
        center=SpacetimePoint(0.0, tuple(center_f)),
        time_width=float(pk.get("time_width", 1.0)),
        space_width=float(pk.get("space_width", 1.0)),
        amplitude=float(pk.get("amplitude", 1.0)),
    )
    g = TestFunction(
        center=SpacetimePoint(0.0, tuple(center_g)),
        time_width=float(pk.get("time_width", 1.0)),
        space_width=float(pk.get("space_width", 1.0)),
        amplitude=float(pk.get("amplitude", 1.0)),
    )
    pot = ExternalPotential("scalar_linear", float(cfg["coupling"]), axis=axis)
    scan = secular_scan(ts, f, g, pot, _params(cfg), _switch(cfg), float(cfg["rel_tol"]))
    fit = fit_growth_exponent(scan, _window(cfg, ts))
    rows = [(t, y, float(cfg["rel_tol"]) * abs(y)) for t, y in scan]
    return ("t", "value", "error_estimate"), rows, _growth_verdict(fit)


def _run_secular_dirac(cfg):
    from .dirac_ed import fit_probe_growth, probe_scan

    ts = _grid(cfg)
    scan = probe_scan(
        int(cfg["probe_n"]), ts, float(cfg["coupling"]), _params(cfg), _switch(cfg)
    )
    fit = fit_probe_growth(scan, _window(cfg, ts))
    rows = [(t, y, env) for t, y, env in scan]
    return ("t", "value", "envelope"), rows, _growth_verdict(fit)


def _run_secular_loop(cfg):
    from .loops import (
        CompactLegConfig,
        StateProfile,
        adiabatic_growth_scan,
        compact_A_scan,
        linear_slope,
        phi3_vacuum_spectral,
        thermal_loop_spectral,
    )
    from .quadrature import fit_growth_exponent

    ts = _grid(cfg)
    m = float(cfg["mass"])
    case = cfg["loop_case"]
    if case == "phi3_vacuum":
        S = phi3_vacuum_spectral(m)
    else:
        S = thermal_loop_spectral(StateProfile.kms(float(cfg["beta"]), m), 4)
    if case == "compact_phi4":
        scan = compact_A_scan(ts, S, CompactLegConfig(mass=m))
    else:
        scan = adiabatic_growth_scan(S, np.linspace(0.05, 4.0, 8), ts)
    rows = [(t, y, float(cfg["rel_tol"]) * abs(y)) for t, y in scan]
    floor = 1e-13 * (1.0 + max(y for _, y in scan))
    if all(y < floor for _, y in scan):
        return ("t", "value", "error_estimate"), rows, {
            "verdict": "BOUNDED",
            "exponent": 0.0,
            "coefficient": 0.0,
            "r_squared": 1.0,
            "note": "zero signal (BoundedSignal)",
            "window": list(_window(cfg, ts)),
        }
    try:
        fit = fit_growth_exponent(scan, _window(cfg, ts))
        out = _growth_verdict(fit)
    except (BoundedSignal, SecGrowthError):
        out = {"verdict": "BOUNDED", "exponent": 0.0, "coefficient": 0.0, "r_squared": 1.0}
    out["linear_slope"] = linear_slope(scan)
    return ("t", "value", "error_estimate"), rows, out


def _run_cancel_scalar(cfg):
    from .scalar_ed import mode_cancellation_residual

    rng = np.random.default_rng(int(cfg["seed"]))
    rows = []
    worst = 0.0
    for trial in range(int(cfg["trials"])):
        wp, wk = rng.uniform(1.0, 10.0, 2)
        if abs(wp - wk) < 1e-6:
            wk += 0.1
        beta = rng.uniform(0.1, 5.0)
        res = mode_cancellation_residual(wp, wk, beta)
        worst = max(worst, res)
        rows.append((trial, res, 0.0))
    return ("trial", "residual", "error_estimate"), rows, {
        "verdict": "CANCELLED" if worst < 1e-12 else "NOT_CANCELLED",
        "residual": worst,
    }


def _run_cancel_dirac(cfg):
    from .dirac_ed import bogoliubov_mode_residuals, fermi_decomposition_residual

    rng = np.random.default_rng(int(cfg["seed"]))
    rows = []
    worst = 0.0
    for trial in range(int(cfg["trials"])):
        wp, wk = rng.uniform(1.0, 10.0, 2)
        if abs(wp - wk) < 1e-6:
            wk += 0.1
        beta = rng.uniform(0.1, 5.0)
        ra, rb = bogoliubov_mode_residuals(wp, wk, beta)
        rf = fermi_decomposition_residual(beta, wp, wk)
        res = max(ra, rb, rf)
        worst = max(worst, res)
        rows.append((trial, res, 0.0))
    return ("trial", "residual", "error_estimate"), rows, {
        "verdict": "CANCELLED" if worst < 1e-12 else "NOT_CANCELLED",
        "residual": worst,
    }


def _run_cumulant(cfg):
    from .cumulants import commutator_truncation_residual, random_ops, random_state

    seed = int(cfg["seed"])
    rows = []
    worst = 0.0
    n = min(int(cfg.get("order", 3)), 4)
    for trial in range(int(cfg["trials"])):
        state = random_state(5, seed + 1000 + trial)
        ops = random_ops(5, n + 1, seed + 5000 + trial)
        res = commutator_truncation_residual(state, ops, n)
        worst = max(worst, res)
        rows.append((trial, res, 0.0))
    return ("trial", "residual", "error_estimate"), rows, {
        "verdict": "CANCELLED" if worst < 1e-10 else "NOT_CANCELLED",
        "residual": worst,
    }


def _run_decay(cfg):
    from .cumulants import decay_product_bound

    res = decay_product_bound(
        int(cfg["chain_n"]), float(cfg["d"]), float(cfg["eps"]),
        int(cfg["mc_samples"]), int(cfg["seed"]),
    )
    rel = abs(res.estimate - res.closed_form) / res.closed_form
    rows = [(0, res.estimate, res.stderr), (1, res.closed_form, 0.0)]
    return ("row", "value", "error_estimate"), rows, {
        "verdict": "CANCELLED" if rel < 0.05 else "NOT_CANCELLED",
        "residual": rel,
        "estimate": res.estimate,
        "closed_form": res.closed_form,
        "stderr": res.stderr,
    }


_RUNNERS = {
    "toy": _run_toy,
    "propagator": _run_propagator,
    "secular-scalar": _run_secular_scalar,
    "secular-dirac": _run_secular_dirac,
    "secular-loop": _run_secular_loop,
    "cancel-scalar": _run_cancel_scalar,
    "cancel-dirac": _run_cancel_dirac,
    "cumulant": _run_cumulant,
    "decay": _run_decay,
}


def run(cfg: dict, out_dir: str) -> dict:
    """Execute one experiment; writes CSV + verdict sidecar, returns verdict."""
    experiment = cfg["experiment"]
    t0 = time.time()
    header, rows, verdict = _RUNNERS[experiment](cfg)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = experiment.replace("-", "_")
    csv_path = out / f"{stem}.csv"
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(f"{float(v):.17g}" for v in row))
    payload = "\n".join(lines) + "\n"
    fd, tmp = tempfile.mkstemp(dir=out, suffix=".csv.tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(payload)
    os.replace(tmp, csv_path)
    sidecar = {
        "experiment": experiment,
        "config_hash": _config_hash(cfg),
        "seed": int(cfg["seed"]),
        "runtime_seconds": round(time.time() - t0, 3),
        "csv": csv_path.name,
        "package_version": __version__,
        **verdict,
    }
    with open(out / f"{stem}_verdict.json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return sidecar


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secgrowth",
        description="Secular-growth scans and cancellation checks (CSV + verdict out)",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--config", type=str, default=None, help="JSON config path")
        p.add_argument("--out", type=str, default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="PRNG seed (u64)")
        p.add_argument("--tol", type=float, default=None, help="relative tolerance")
        return p

    add("toy", help="mass-quench order-n growth scan")
    add("propagator", help="t^{3/2}-scaled decay envelope scan")
    pscan = add("secular-scan", help="first-order secular scans")
    pscan.add_argument("target", choices=["scalar", "dirac", "loop"])
    pcancel = add("cancel-check", help="mode-coefficient cancellation residuals")
    pcancel.add_argument("target", choices=["scalar", "dirac"])
    add("cumulant-check", help="nested-commutator truncation identity")
    add("decay-check", help="chain-decay integral vs closed form")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    threads = os.environ.get("SECGROWTH_THREADS")
    if threads:
        try:
            import threadpoolctl

            threadpoolctl.threadpool_limits(int(threads))
        except Exception:
            pass
    command = args.command
    if command == "secular-scan":
        experiment = f"secular-{args.target}"
    elif command == "cancel-check":
        experiment = f"cancel-{args.target}"
    elif command == "cumulant-check":
        experiment = "cumulant"
    elif command == "decay-check":
        experiment = "decay"
    else:
        experiment = command
    overrides = {"seed": args.seed, "rel_tol": args.tol}
    try:
        cfg = load_config(args.config, experiment, overrides)
        sidecar = run(cfg, args.out)
    except ConfigInvalid as exc:
        print(f"config invalid: {exc}", file=sys.stderr)
        return 2
    except SecGrowthError as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    print(json.dumps(sidecar, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
