"""
Command-line entry point.

    python -m coupled_ch simulate  --config run.cfg [--out DIR]
    python -m coupled_ch criterion --config run.cfg [--out DIR]
    python -m coupled_ch sweep     --config run.cfg [--out DIR]
    python -m coupled_ch selftest  [--seed N]

Outputs (in ``--out``, default the config's ``output``):
run.csv + summary.json (simulate), report.json (criterion), sweep.csv (sweep).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import criterion as crit
from .characteristics import (
    InsufficientSamplesError,
    displacement_check,
    jacobian_positivity,
    monotonicity_check,
    riccati_residual,
)
from .config import ConfigError, RunConfig, build_initial, format_number, load_config, parse_config, with_parameter
from .evolution import run

log = logging.getLogger(__name__)

CSV_HEADER = ["t", "E", "min_slope", "min_slope_x", "q", "w_at_q", "wx_at_q", "M", "N", "g", "dt"]
SWEEP_HEADER = [
    "value",
    "margin",
    "satisfied",
    "x0",
    "E0",
    "K",
    "tstar",
    "g0",
    "termination",
    "break_time",
    "break_ratio",
]

SUMMARY_SCHEMA = {
    "type": "object",
    "required": [
        "termination",
        "break_time",
        "break_location",
        "t_final",
        "steps",
        "E0",
        "max_energy_drift",
        "criterion",
        "tstar",
        "interval",
        "interval_mod1",
        "containment",
        "checks",
    ],
    "properties": {
        "termination": {"enum": ["reached_t_end", "breaking_detected", "dt_underflow", "nonfinite_state"]},
        "break_time": {"type": ["number", "null"]},
        "break_location": {"type": ["number", "null"]},
        "t_final": {"type": "number"},
        "steps": {"type": "integer", "minimum": 0},
        "E0": {"type": "number", "minimum": 0},
        "max_energy_drift": {"type": "number", "minimum": 0},
        "criterion": {"type": ["object", "null"]},
        "tstar": {"type": ["number", "null"]},
        "interval": {"type": ["array", "null"], "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "interval_mod1": {"type": ["array", "null"], "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "containment": {"type": ["boolean", "null"]},
        "checks": {
            "type": "object",
            "required": ["apriori_ok", "displacement_ok", "jacobian_ok", "monotonicity_ok", "riccati_ok"],
            "additionalProperties": {"type": ["boolean", "null"]},
        },
    },
}


def _num(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return format_number(x)


def _round_trip(obj):
    """Replace floats by their 17-digit representation (and NaN by None)."""
    if isinstance(obj, dict):
        return {k: _round_trip(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_trip(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return None if not math.isfinite(x) else float(format(x, ".17g"))
    return obj


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(_round_trip(payload), indent=2, sort_keys=True) + "\n")


def _out_dir(cfg: RunConfig, out) -> Path:
    path = Path(out if out is not None else cfg.output)
    path.mkdir(parents=True, exist_ok=True)
    return path


# ----------------------------------------------------------------------------
# criterion
# ----------------------------------------------------------------------------


def cmd_criterion(cfg: RunConfig, out=None) -> dict:
    z0 = build_initial(cfg.initial, cfg.grid())
    report = crit.evaluate(z0).to_dict()
    _write_json(_out_dir(cfg, out) / "report.json", report)
    print(json.dumps(_round_trip(report), sort_keys=True))
    return report


# ----------------------------------------------------------------------------
# simulate
# ----------------------------------------------------------------------------


def simulate(cfg: RunConfig):
    """Run one configured experiment; returns (record, criterion report, summary)."""
    z0 = build_initial(cfg.initial, cfg.grid())
    report = crit.evaluate(z0)
    tracks = [report.x0] if cfg.track == "auto" else list(cfg.track)
    record = run(
        z0,
        cfg.t_end,
        cfg.step_control(),
        tracks=tracks,
        output_stride=cfg.output_stride,
        apriori=cfg.apriori,
    )
    return record, report, summarize(record, report)


def summarize(record, report) -> dict:
    E0 = record.E0
    checks = {
        "apriori_ok": (not any(r.violated for _, r in record.apriori)) if record.apriori else None,
        "displacement_ok": None,
        "jacobian_ok": None,
        "monotonicity_ok": None,
        "riccati_ok": None,
    }
    if record.tracks:
        track = record.tracks[0]
        checks["displacement_ok"] = displacement_check(track, E0)
        checks["jacobian_ok"] = jacobian_positivity(track)
        if report.satisfied and math.isclose(track.x0, report.x0):
            checks["monotonicity_ok"] = all(monotonicity_check(track, report.K).values())
            try:
                res = riccati_residual(track, report.K, upto=_resolved_rows(record))
                floor = -1e-3 * np.maximum(1.0, res.g**2)
                checks["riccati_ok"] = bool(np.all(res.g_residual >= floor))
            except InsufficientSamplesError:
                checks["riccati_ok"] = None
            track.riccati_ok = checks["riccati_ok"]

    containment = None
    if report.satisfied and record.break_location is not None:
        containment = crit.in_arc(record.break_location, *report.interval)
    return {
        "termination": record.termination,
        "break_time": record.break_time,
        "break_location": record.break_location,
        "t_final": record.times[-1],
        "steps": len(record.times) - 1,
        "E0": E0,
        "max_energy_drift": float(np.max(record.energy_drift())),
        "criterion": report.to_dict(),
        "tstar": report.tstar,
        "interval": report.interval,
        "interval_mod1": report.interval_mod1,
        "containment": containment,
        "break_over_tstar": (record.break_time / report.tstar) if (record.break_time and report.tstar) else None,
        "checks": checks,
    }


def _resolved_rows(record) -> int:
    """Number of leading rows with min slope >= -100 sqrt(E0)."""
    limit = -100.0 * math.sqrt(record.E0)
    slopes = np.asarray(record.min_slope)
    bad = np.nonzero(slopes < limit)[0]
    return int(bad[0]) if bad.size else slopes.size


def csv_rows(record, stride: int):
    """Output rows: every ``stride``-th accepted step plus the final one."""
    count = len(record.times)
    idx = list(range(0, count, stride))
    if idx[-1] != count - 1:
        idx.append(count - 1)
    track = record.tracks[0] if record.tracks else None
    if track is not None:
        M, N, g, q = track.M, track.N, track.g, track.q
    for i in idx:
        row = [record.times[i], record.energy[i], record.min_slope[i], record.min_slope_location[i]]
        if track is None:
            row += [None] * 6
        else:
            row += [q[i], track.w[i], track.wx[i], M[i], N[i], g[i]]
        row.append(record.dt[i])
        yield row


def write_run_csv(path: Path, record, stride: int) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in csv_rows(record, stride):
            w.writerow([_num(x) for x in row])


def cmd_simulate(cfg: RunConfig, out=None) -> dict:
    outdir = _out_dir(cfg, out)
    record, _, summary = simulate(cfg)
    write_run_csv(outdir / "run.csv", record, cfg.output_stride)
    _write_json(outdir / "summary.json", summary)
    print(f"termination={record.termination} t={record.times[-1]:.6g} steps={summary['steps']}")
    return summary


# ----------------------------------------------------------------------------
# sweep
# ----------------------------------------------------------------------------


def _sweep_member(args):
    cfg, value = args
    member = with_parameter(cfg, cfg.sweep.parameter, value)
    z0 = build_initial(member.initial, member.grid())
    report = crit.evaluate(z0)
    termination = break_time = ratio = None
    if member.sweep.simulate and report.satisfied:
        record = run(z0, member.t_end, member.step_control())
        termination, break_time = record.termination, record.break_time
        ratio = break_time / report.tstar if break_time is not None else None
    return [
        value,
        report.margin,
        report.satisfied,
        report.x0,
        report.E0,
        report.K,
        report.tstar,
        report.g0,
        termination,
        break_time,
        ratio,
    ]


def sweep_rows(cfg: RunConfig):
    jobs = [(cfg, float(v)) for v in cfg.sweep.values()]
    if cfg.sweep.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.sweep.workers) as pool:
            return list(pool.map(_sweep_member, jobs))  # map keeps family order
    return [_sweep_member(job) for job in jobs]


def cmd_sweep(cfg: RunConfig, out=None):
    rows = sweep_rows(cfg)
    with open(_out_dir(cfg, out) / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for row in rows:
            w.writerow(["" if x is None else (x if isinstance(x, str) else _num(x)) for x in row])
    return rows


# ----------------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coupled-ch", description="Coupled periodic Camassa-Holm blowup laboratory")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("simulate", "criterion", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value configuration file (defaults apply when omitted)")
        p.add_argument("--out", help="output directory (overrides the config's 'output')")
        p.add_argument("--seed", type=int, default=0, help="unused outside selftest; accepted for uniformity")
    p = sub.add_parser("selftest")
    p.add_argument("--config", help="ignored")
    p.add_argument("--out", help="ignored")
    p.add_argument("--seed", type=int, default=0, help="seed for randomised test fields")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "selftest":
        from .selftest import run_selftest

        return 0 if run_selftest(seed=args.seed) else 1
    try:
        cfg = load_config(args.config) if args.config else parse_config("")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2
    if args.command == "simulate":
        cmd_simulate(cfg, args.out)
    elif args.command == "criterion":
        cmd_criterion(cfg, args.out)
    else:
        cmd_sweep(cfg, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
