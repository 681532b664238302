"""Configuration-driven experiment runner and report generator.

Three subcommands:

* ``run <config> [--out DIR] [--exact] [--threads N]`` — execute every
  requested protocol pair under the configured error model and write a
  report JSON plus decay/plot CSV artifacts.  ``<config>`` is either a JSON
  file path or the name of an embedded preset.
* ``sweep <config> --param theta1_deg --grid 0:2:0.25`` — systematic-bound
  width per twirl group as one model parameter sweeps a grid (exact mode,
  common random circuits across the grid).
* ``ingest <ref.csv> <int.csv> [--unitarity U]`` — re-run the
  fit/estimator/bounds pipeline on externally measured decay data.

Exit codes: 0 success, 2 configuration/input error, 3 runtime error,
4 fit failure.  The default output directory can be set with the
``TWIRLBENCH_OUT`` environment variable; flags override config fields.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, channels, engine, estimators, gauge, groups, noise, presets, streams
from .estimators import (
    FitFailureError,
    IncompleteDataError,
    InfidelityEstimate,
)
from .protocols import ProtocolSpec, TwirlGroup

__all__ = ["ConfigError", "load_config", "run_config", "sweep_config", "ingest_files", "main"]

OUT_ENV = "TWIRLBENCH_OUT"

_GROUPS = tuple(g.value for g in TwirlGroup)


class ConfigError(ValueError):
    """Schema violation; the message names the offending field path."""


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}")


def _check_keys(d: dict, allowed: set, path: str):
    if not isinstance(d, dict):
        _fail(path, f"expected an object, got {type(d).__name__}")
    unknown = set(d) - allowed
    if unknown:
        _fail(f"{path}.{sorted(unknown)[0]}", "unknown key")


def _get(d: dict, key: str, default, types, path: str):
    val = d.get(key, default)
    if types is not None and not isinstance(val, types):
        _fail(f"{path}.{key}", f"expected {types}, got {type(val).__name__}")
    return val


_MODEL_KEYS = {
    "fixed_coherent": {
        "model", "theta2_deg", "theta1_deg", "generator2", "generator1",
        "dep2", "dep1", "placement",
    },
    "overrotation": {"model", "delta2", "delta1", "placement"},
    "adversarial": {"model", "theta_deg", "twirl_sign"},
}


def build_model(cfg: dict, path: str = "model"):
    """Instantiate an error model from its config block (angles in degrees)."""
    if not isinstance(cfg, dict):
        _fail(path, "expected an object")
    kind = cfg.get("model")
    if kind not in _MODEL_KEYS:
        _fail(f"{path}.model", f"expected one of {sorted(_MODEL_KEYS)}, got {kind!r}")
    _check_keys(cfg, _MODEL_KEYS[kind], path)
    num = (int, float)
    try:
        if kind == "fixed_coherent":
            return noise.FixedCoherent(
                theta2=np.deg2rad(_get(cfg, "theta2_deg", 0.0, num, path)),
                theta1=np.deg2rad(_get(cfg, "theta1_deg", 0.0, num, path)),
                generator2=_get(cfg, "generator2", "ZZ", str, path),
                generator1=_get(cfg, "generator1", "Z", str, path),
                dep2=float(_get(cfg, "dep2", 1.0, num, path)),
                dep1=float(_get(cfg, "dep1", 1.0, num, path)),
                placement=_get(cfg, "placement", "monolithic", str, path),
            )
        if kind == "overrotation":
            return noise.Overrotation(
                delta2=float(_get(cfg, "delta2", 0.0, num, path)),
                delta1=float(_get(cfg, "delta1", 0.0, num, path)),
                placement=_get(cfg, "placement", "compiled", str, path),
            )
        return noise.Adversarial(
            theta=np.deg2rad(_get(cfg, "theta_deg", 10.0, num, path)),
            twirl_sign=_get(cfg, "twirl_sign", 1, int, path),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


_TOP_KEYS = {
    "name", "seed", "model", "protocols", "interleaved", "shots", "depths",
    "estimator", "fit", "bootstrap", "xrb", "gauge", "sweep", "out", "exact",
    "threads",
}


def validate_config(cfg: dict) -> dict:
    """Validate a raw config dict; returns it with defaults filled in."""
    _check_keys(cfg, _TOP_KEYS, "config")
    out = dict(cfg)
    if "seed" not in cfg or not isinstance(cfg["seed"], int) or isinstance(cfg["seed"], bool):
        _fail("config.seed", "a mandatory integer seed is required")
    if "model" not in cfg:
        _fail("config.model", "an error model block is required")
    build_model(cfg["model"])  # raises ConfigError on bad blocks

    protos = _get(cfg, "protocols", list(_GROUPS), list, "config")
    if not protos:
        _fail("config.protocols", "at least one twirl group is required")
    for i, g in enumerate(protos):
        if g not in _GROUPS:
            _fail(f"config.protocols[{i}]", f"expected one of {_GROUPS}, got {g!r}")
    out["protocols"] = protos

    inter = _get(cfg, "interleaved", "cnot", str, "config")
    if inter != "cnot":
        _fail("config.interleaved", f"only 'cnot' is supported, got {inter!r}")
    out["interleaved"] = inter

    shots = _get(cfg, "shots", 1500, int, "config")
    if shots < 1:
        _fail("config.shots", f"shots must be positive, got {shots}")
    out["shots"] = shots

    depths = _get(cfg, "depths", None, (dict, type(None)), "config")
    if depths is not None:
        _check_keys(depths, {"reference", "interleaved"}, "config.depths")
        for arm, lst in depths.items():
            if not isinstance(lst, list) or not lst:
                _fail(f"config.depths.{arm}", "expected a non-empty list of depths")
            if any(not isinstance(m, int) or m < 1 for m in lst):
                _fail(f"config.depths.{arm}", f"depths must be integers >= 1: {lst}")
    out["depths"] = depths

    est = _get(cfg, "estimator", "ratio", str, "config")
    if est not in ("ratio", "irb"):
        _fail("config.estimator", f"expected 'ratio' or 'irb', got {est!r}")
    out["estimator"] = est

    fit = _get(cfg, "fit", "Ap_fixedB", str, "config")
    if fit not in ("ApB", "Ap_fixedB"):
        _fail("config.fit", f"expected 'ApB' or 'Ap_fixedB', got {fit!r}")
    out["fit"] = fit

    boot = _get(cfg, "bootstrap", {}, dict, "config")
    _check_keys(boot, {"n_resamples", "alpha"}, "config.bootstrap")
    out["bootstrap"] = {
        "n_resamples": _get(boot, "n_resamples", 1000, int, "config.bootstrap"),
        "alpha": _get(boot, "alpha", 0.05, (int, float), "config.bootstrap"),
    }

    xrb = _get(cfg, "xrb", {}, dict, "config")
    _check_keys(xrb, {"enabled", "circuits_per_depth"}, "config.xrb")
    out["xrb"] = {
        "enabled": _get(xrb, "enabled", False, bool, "config.xrb"),
        "circuits_per_depth": _get(xrb, "circuits_per_depth", 100, int, "config.xrb"),
    }

    gcfg = _get(cfg, "gauge", {}, dict, "config")
    _check_keys(gcfg, {"enabled", "origin", "n", "m"}, "config.gauge")
    out["gauge"] = {
        "enabled": _get(gcfg, "enabled", False, bool, "config.gauge"),
        "origin": _get(gcfg, "origin", "U_R", str, "config.gauge"),
        "n": _get(gcfg, "n", 10_000, int, "config.gauge"),
        "m": _get(gcfg, "m", 10_000, int, "config.gauge"),
    }

    sweep = _get(cfg, "sweep", None, (dict, type(None)), "config")
    if sweep is not None:
        _check_keys(sweep, {"param", "grid", "shots"}, "config.sweep")
        if cfg["model"].get("model") != "fixed_coherent":
            _fail("config.sweep", "sweeps require the fixed_coherent model")
        param = _get(sweep, "param", None, str, "config.sweep")
        if param not in ("theta1_deg", "theta2_deg"):
            _fail("config.sweep.param", f"unsupported sweep parameter {param!r}")
        parse_grid(_get(sweep, "grid", None, str, "config.sweep"))
        sweep = dict(sweep)
        sweep.setdefault("shots", 150)
    out["sweep"] = sweep

    out["out"] = _get(cfg, "out", None, (str, type(None)), "config")
    out["exact"] = _get(cfg, "exact", False, bool, "config")
    out["threads"] = _get(cfg, "threads", 1, int, "config")
    out.setdefault("name", "custom")
    return out


def parse_grid(text) -> list[float]:
    """Parse a start:stop:step grid spec with inclusive endpoints."""
    if not isinstance(text, str):
        _fail("config.sweep.grid", "expected a start:stop:step string")
    parts = text.split(":")
    if len(parts) != 3:
        _fail("config.sweep.grid", f"expected start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        _fail("config.sweep.grid", f"non-numeric grid bounds in {text!r}")
    if step <= 0 or stop < start:
        _fail("config.sweep.grid", f"need step > 0 and stop >= start in {text!r}")
    n = int(round((stop - start) / step))
    return [start + k * step for k in range(n + 1)]


def load_config(source: str) -> dict:
    """Load a config from a preset name or a JSON file path."""
    if source in presets.PRESETS:
        return validate_config(presets.preset_config(source))
    path = Path(source)
    if not path.exists():
        _fail("config", f"{source!r} is neither a file nor a preset "
              f"(presets: {', '.join(presets.preset_names())})")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        _fail("config", f"invalid JSON in {source}: {exc}")
    return validate_config(raw)


# ---------------------------------------------------------------------------
# fitting helpers shared by run and ingest


def fit_protocol(points, group: TwirlGroup, interleaved: bool, fit_model: str = "Ap_fixedB"):
    """Fit the decay(s) of one experiment arm, per the group's structure."""
    group = TwirlGroup(group)
    if group is TwirlGroup.PAULI:
        return estimators.fit_per_pauli(points)
    if group is TwirlGroup.LOCAL_CLIFFORD and not interleaved:
        return {
            lab: estimators.fit_decay(
                [q for q in points if q.label == lab], model=fit_model,
                baseline_guess=0.5,
            )
            for lab in ("marginal_a", "marginal_b")
        }
    survival = [q for q in points if q.label == "survival"]
    return estimators.fit_decay(survival, model=fit_model, baseline_guess=0.25)


def arm_infidelity(points, group, interleaved: bool, fit_model: str = "Ap_fixedB") -> float:
    fits = fit_protocol(points, group, interleaved, fit_model)
    return estimators.protocol_infidelity(fits, group, interleaved=interleaved)


def _effective_p(eps: float) -> float:
    return channels.depolarizing_from_infidelity(eps, 4)


def combine_estimate(eps_ef, eps_e, method: str) -> float:
    if method == "irb":
        return estimators.interleaved_estimate_irb(
            _effective_p(eps_ef), _effective_p(eps_e)
        )
    return estimators.interleaved_estimate_ratio(eps_ef, eps_e)


def theory_infidelity(model) -> float:
    """Process infidelity of the error the model injects on the interleaved CNOT."""
    err = model.twoq_error_ptm(groups.CX_AB, "interleaved")
    if err is None:
        return 0.0
    return channels.process_infidelity(err)


def _fit_params(fits) -> dict:
    if isinstance(fits, dict):
        return {lab: {k: float(v) for k, v in f.params.items()} for lab, f in fits.items()}
    return {k: float(v) for k, v in fits.params.items()}


# ---------------------------------------------------------------------------
# run


def _single_decay(group: TwirlGroup, interleaved: bool) -> bool:
    """Whether the arm is described by one exponential (so p is defined)."""
    return group in (TwirlGroup.HAAR, TwirlGroup.CLIFFORD) or (
        group is TwirlGroup.LOCAL_CLIFFORD and interleaved
    )


def run_group_pair(group: str, cfg: dict, model, xrb_points=None) -> dict:
    """Reference + interleaved experiments for one twirl group."""
    group = TwirlGroup(group)
    depths = cfg["depths"] or {}
    arms = {}
    for arm, inter in (("reference", None), ("interleaved", "cnot")):
        spec = ProtocolSpec(
            group=group,
            interleaved=inter,
            depths=tuple(depths.get(arm, ())),
            shots=cfg["shots"],
            seed=cfg["seed"],
        )
        points, records = engine.run_experiment(
            spec, model, exact=cfg["exact"], threads=cfg["threads"]
        )
        arms[arm] = {"spec": spec, "points": points, "records": records}

    fit_model = cfg["fit"]
    eps = {
        arm: arm_infidelity(a["points"], group, arm == "interleaved", fit_model)
        for arm, a in arms.items()
    }
    epsilon = combine_estimate(eps["interleaved"], eps["reference"], cfg["estimator"])
    sys_low, sys_high = estimators.systematic_bounds(eps["interleaved"], eps["reference"])

    stat = (None, None)
    if not cfg["exact"]:
        value_groups = [
            estimators.values_from_records(arms["reference"]["spec"], arms["reference"]["records"]),
            estimators.values_from_records(arms["interleaved"]["spec"], arms["interleaved"]["records"]),
        ]

        def statistic(ref_pts, int_pts):
            e_e = arm_infidelity(ref_pts, group, False, fit_model)
            e_ef = arm_infidelity(int_pts, group, True, fit_model)
            return combine_estimate(e_ef, e_e, cfg["estimator"])

        stat = estimators.bootstrap_ci(
            value_groups,
            statistic,
            n_resamples=cfg["bootstrap"]["n_resamples"],
            seed=cfg["seed"],
            alpha=cfg["bootstrap"]["alpha"],
        )

    xrb = None
    if xrb_points is not None and _single_decay(group, True) and _single_decay(group, False):
        unit = estimators.unitarity_from_xrb(xrb_points)
        ref_fit = fit_protocol(arms["reference"]["points"], group, False, fit_model)
        int_fit = fit_protocol(arms["interleaved"]["points"], group, True, fit_model)
        bounds = estimators.xrb_bounds(int_fit.p, ref_fit.p, unit.u)
        xrb = {
            "unitarity": unit.u,
            "unitarity_stderr": unit.stderr,
            "eps_low": bounds.eps_low,
            "eps_high": bounds.eps_high,
        }

    estimate = InfidelityEstimate(
        epsilon=epsilon,
        method=cfg["estimator"],
        stat_low=stat[0],
        stat_high=stat[1],
        sys_low=sys_low,
        sys_high=sys_high,
        xrb_low=None if xrb is None else xrb["eps_low"],
        xrb_high=None if xrb is None else xrb["eps_high"],
    )
    return {
        "group": group.value,
        "eps_reference": eps["reference"],
        "eps_interleaved": eps["interleaved"],
        "estimate": estimate,
        "xrb": xrb,
        "arms": arms,
    }


def _estimate_json(est: InfidelityEstimate) -> dict:
    return {
        "epsilon": float(est.epsilon),
        "method": est.method,
        "stat_ci": None if est.stat_low is None else [float(est.stat_low), float(est.stat_high)],
        "sys_bounds": [float(est.sys_low), float(est.sys_high)],
        "xrb_bounds": None if est.xrb_low is None else [float(est.xrb_low), float(est.xrb_high)],
        "unphysical_negative": bool(est.unphysical_negative),
    }


def _config_hash(cfg: dict) -> str:
    clean = {k: v for k, v in cfg.items() if k not in ("out", "threads")}
    return hashlib.sha256(json.dumps(clean, sort_keys=True).encode()).hexdigest()[:16]


def _resolve_out(cfg: dict, flag_out: str | None) -> Path:
    base = flag_out or cfg.get("out") or os.environ.get(OUT_ENV) or "twirlbench-out"
    out = Path(base) / cfg["name"]
    out.mkdir(parents=True, exist_ok=True)
    return out


def run_config(cfg: dict, out_dir: Path) -> dict:
    """Execute a validated config and write artifacts; returns the report."""
    model = build_model(cfg["model"])
    xrb_points = None
    if cfg["xrb"]["enabled"]:
        spec = ProtocolSpec(
            group=TwirlGroup.CLIFFORD, interleaved=None,
            shots=cfg["shots"], seed=cfg["seed"],
        )
        xrb_points = engine.run_xrb_experiment(
            spec, model, exact=cfg["exact"],
            circuits_per_depth=cfg["xrb"]["circuits_per_depth"],
            threads=cfg["threads"],
        )
        (out_dir / "decays_xrb.csv").write_text(engine.decays_to_csv(xrb_points))

    results = []
    for group in cfg["protocols"]:
        res = run_group_pair(group, cfg, model, xrb_points=xrb_points)
        for arm in ("reference", "interleaved"):
            csv_text = engine.decays_to_csv(res["arms"][arm]["points"])
            (out_dir / f"decays_{group}_{arm}.csv").write_text(csv_text)
        results.append(res)

    gauge_reports = None
    if cfg["gauge"]["enabled"]:
        gauge_reports = [
            gauge.gauge_report(
                model, TwirlGroup(group),
                origin=cfg["gauge"]["origin"],
                n=cfg["gauge"]["n"], m=cfg["gauge"]["m"],
                seed=cfg["seed"],
            )
            for group in cfg["protocols"]
        ]

    report = {
        "name": cfg["name"],
        "provenance": {
            "config_hash": _config_hash(cfg),
            "tool_version": __version__,
            "seed": cfg["seed"],
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        },
        "theory_infidelity": theory_infidelity(model),
        "protocols": [
            {
                "group": r["group"],
                "eps_reference": float(r["eps_reference"]),
                "eps_interleaved": float(r["eps_interleaved"]),
                "estimate": _estimate_json(r["estimate"]),
                "xrb": None if r["xrb"] is None
                else {k: float(v) for k, v in r["xrb"].items()},
            }
            for r in results
        ],
        "gauge": gauge_reports,
    }
    (out_dir / "report.json").write_text(json.dumps(report, indent=2))

    # plot-ready summary: one row per protocol with estimate and bounds
    with (out_dir / "plot_data.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([
            "group", "epsilon", "stat_low", "stat_high",
            "sys_low", "sys_high", "xrb_low", "xrb_high", "theory",
        ])
        for r in results:
            e = r["estimate"]
            w.writerow([
                r["group"], e.epsilon, e.stat_low, e.stat_high,
                e.sys_low, e.sys_high, e.xrb_low, e.xrb_high,
                report["theory_infidelity"],
            ])
    return report


# ---------------------------------------------------------------------------
# sweep


def sweep_config(cfg: dict, out_dir: Path) -> list[dict]:
    """Systematic-bound width per group across the configured parameter grid.

    Runs in exact mode with the same seed (hence the same random circuits)
    at every grid point, so widths vary smoothly with the parameter.
    """
    sweep = cfg["sweep"]
    if sweep is None:
        _fail("config.sweep", "sweep settings are required (flags or config)")
    values = parse_grid(sweep["grid"])
    rows = []
    for val in values:
        model_cfg = dict(cfg["model"])
        model_cfg[sweep["param"]] = val
        model = build_model(model_cfg)
        row = {"value": val}
        for group in cfg["protocols"]:
            group = TwirlGroup(group)
            eps = {}
            for arm, inter in (("reference", None), ("interleaved", "cnot")):
                spec = ProtocolSpec(
                    group=group, interleaved=inter,
                    shots=sweep["shots"], seed=cfg["seed"],
                )
                points, _ = engine.run_experiment(
                    spec, model, exact=True, threads=cfg["threads"]
                )
                eps[arm] = arm_infidelity(points, group, inter is not None, cfg["fit"])
            lo, hi = estimators.systematic_bounds(eps["interleaved"], eps["reference"])
            row[group.value] = hi - lo
        rows.append(row)
    with (out_dir / f"sweep_{sweep['param']}.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([sweep["param"]] + list(cfg["protocols"]))
        for row in rows:
            w.writerow([row["value"]] + [row[g] for g in cfg["protocols"]])
    return rows


# ---------------------------------------------------------------------------
# ingest


def _read_decay_csv(path: str) -> list[engine.DecayPoint]:
    points = []
    try:
        fh = open(path, newline="")
    except OSError as exc:
        _fail("ingest", f"cannot open {path}: {exc}")
    with fh:
        reader = csv.DictReader(fh)
        expected = ["depth", "label", "mean", "stderr", "n"]
        if reader.fieldnames != expected:
            _fail("ingest", f"{path}: expected header {','.join(expected)}, "
                  f"got {reader.fieldnames}")
        for lineno, row in enumerate(reader, start=2):
            try:
                points.append(engine.DecayPoint(
                    depth=int(row["depth"]),
                    label=row["label"],
                    mean=float(row["mean"]),
                    stderr=float(row["stderr"]),
                    n=int(row["n"]),
                ))
            except (TypeError, ValueError) as exc:
                _fail("ingest", f"{path}:{lineno}: malformed row ({exc})")
    if not points:
        _fail("ingest", f"{path}: no decay points")
    return points


def _infer_group(ref_points) -> TwirlGroup:
    """Best-effort protocol inference from the reference arm's labels."""
    labels = {q.label for q in ref_points}
    if "marginal_a" in labels:
        return TwirlGroup.LOCAL_CLIFFORD
    if "survival" in labels:
        return TwirlGroup.CLIFFORD
    return TwirlGroup.PAULI


def ingest_files(
    ref_csv: str,
    int_csv: str,
    unitarity: float | None = None,
    group: str | None = None,
    method: str = "ratio",
    fit_model: str = "Ap_fixedB",
) -> dict:
    """Fit externally measured decays and assemble the estimate report."""
    ref_points = _read_decay_csv(ref_csv)
    int_points = _read_decay_csv(int_csv)
    grp = _infer_group(ref_points) if group is None else TwirlGroup(group)
    eps_e = arm_infidelity(ref_points, grp, False, fit_model)
    eps_ef = arm_infidelity(int_points, grp, True, fit_model)
    epsilon = combine_estimate(eps_ef, eps_e, method)
    sys_low, sys_high = estimators.systematic_bounds(eps_ef, eps_e)
    xrb = None
    if unitarity is not None:
        ref_fit = fit_protocol(ref_points, grp, False, fit_model)
        int_fit = fit_protocol(int_points, grp, True, fit_model)
        if not (_single_decay(grp, False) and _single_decay(grp, True)):
            _fail("ingest", "--unitarity needs a single-exponential protocol")
        bounds = estimators.xrb_bounds(int_fit.p, ref_fit.p, unitarity)
        xrb = [bounds.eps_low, bounds.eps_high]
    est = InfidelityEstimate(
        epsilon=epsilon, method=method,
        sys_low=sys_low, sys_high=sys_high,
        xrb_low=None if xrb is None else xrb[0],
        xrb_high=None if xrb is None else xrb[1],
    )
    return {
        "group": grp.value,
        "eps_reference": float(eps_e),
        "eps_interleaved": float(eps_ef),
        "estimate": _estimate_json(est),
    }


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twirlbench",
        description="Interleaved randomized-benchmarking simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a config or preset")
    p_run.add_argument("config", help="JSON config path or preset name")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--exact", action="store_true", help="exact statistics, no shot noise")
    p_run.add_argument("--threads", type=int, default=None)

    p_sweep = sub.add_parser("sweep", help="systematic-bound width vs a model parameter")
    p_sweep.add_argument("config", help="JSON config path or preset name")
    p_sweep.add_argument("--param", default=None, help="model parameter to sweep")
    p_sweep.add_argument("--grid", default=None, help="start:stop:step (inclusive)")
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--threads", type=int, default=None)

    p_in = sub.add_parser("ingest", help="analyze externally measured decay CSVs")
    p_in.add_argument("ref_csv", help="reference-arm decay CSV")
    p_in.add_argument("int_csv", help="interleaved-arm decay CSV")
    p_in.add_argument("--unitarity", type=float, default=None)
    p_in.add_argument("--group", default=None, choices=_GROUPS)
    p_in.add_argument("--estimator", default="ratio", choices=("ratio", "irb"))
    p_in.add_argument("--fit", default="Ap_fixedB", choices=("ApB", "Ap_fixedB"))
    p_in.add_argument("--out", default=None, help="write the report JSON here")
    return parser


def _dispatch(args) -> int:
    if args.command == "ingest":
        report = ingest_files(
            args.ref_csv, args.int_csv,
            unitarity=args.unitarity, group=args.group,
            method=args.estimator, fit_model=args.fit,
        )
        text = json.dumps(report, indent=2)
        if args.out:
            Path(args.out).write_text(text)
        print(text)
        return 0

    cfg = load_config(args.config)
    if args.threads is not None:
        cfg["threads"] = args.threads
    if args.command == "run" and args.exact:
        cfg["exact"] = True
    if args.command == "sweep":
        sweep = dict(cfg.get("sweep") or {})
        if args.param:
            sweep["param"] = args.param
        if args.grid:
            sweep["grid"] = args.grid
        sweep.setdefault("shots", 150)
        cfg["sweep"] = sweep
        cfg = validate_config(cfg)
    out_dir = _resolve_out(cfg, args.out)

    if cfg.get("sweep"):
        rows = sweep_config(cfg, out_dir)
        print(json.dumps(rows, indent=2))
    else:
        report = run_config(cfg, out_dir)
        print(json.dumps(report, indent=2))
    print(f"artifacts written to {out_dir}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (FitFailureError,) as exc:
        print(f"fit failure: {exc}", file=sys.stderr)
        return 4
    except (IncompleteDataError, estimators.InconsistentMeasurementsError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 — CLI boundary
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
