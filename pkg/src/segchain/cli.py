"""Command-line front end: presets, single runs, sweeps, figure grids, checks.

Subcommands
-----------
single    one (scheme, stage, L0, Nr) evaluation; optional CSV row and oracle
          cross-check
sweep     grid over exactly one axis (L0, distance, or Nr), CSV out
figure    the fig4a / fig4b / fig5 / fig6 data grids, CSV per figure
validate  the self-check suite (fast | full), line-oriented report
stages    print the built-in hardware presets

CSV schema: header + one record per grid point, columns (scheme, stage,
L0_km, Nr, L_km, e_Z, e_X, r_inf, R_bit_hz, K_hz, C_K, p_end[, plob_hz]);
floats carry 12 significant digits, rows are sorted, and a fixed config +
seed reproduces the bytes exactly.

Exit codes: 0 success, 1 usage, 2 validation failure, 3 I/O.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from .metrics import (
    PLOB_ALPHA_DB_KM,
    PLOB_CLOCK_HZ,
    PerformanceReport,
    build_report,
    max_range,
    plob_bound,
)
from .params import DEFAULT_NMUX, STAGES, HardwareParams, SchemeId, load_stage

COLUMNS = ["scheme", "stage", "L0_km", "Nr", "L_km", "e_Z", "e_X",
           "r_inf", "R_bit_hz", "K_hz", "C_K", "p_end"]
HW_KEYS = ("p_cou", "eta_d", "alpha_db_km", "f0", "beta", "delta", "tcoh_s")
FIGURE_IDS = ("fig4a", "fig4b", "fig5", "fig6")
_L0_GRID = [5.0 * k for k in range(1, 31)]  # 5..150 km
_FIG_DISTANCES = [100.0 * k for k in range(1, 101)]  # 100..10000 km


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; remap onto our code 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args, parser)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 3
    try:
        if args.command == "single":
            return _cmd_single(cfg, parser)
        if args.command == "sweep":
            return _cmd_sweep(cfg, parser)
        if args.command == "figure":
            return _cmd_figure(cfg)
        if args.command == "validate":
            return _cmd_validate(cfg)
        return _cmd_stages()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def _build_parser() -> _Parser:
    parser = _Parser(prog="segchain",
                     description="Repeater-chain performance engine and self-checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, axis_grids: bool = False) -> None:
        kind = str if axis_grids else float
        p.add_argument("--config", help="flat key=value file; flags override it")
        p.add_argument("--scheme", help="seg-ed | seg-noed | seg-prob | peg-ed")
        p.add_argument("--stage", type=int, choices=(1, 2, 3), help="hardware preset")
        p.add_argument("--l0-km", dest="l0_km", type=kind, help="hop length")
        p.add_argument("--distance-km", dest="distance_km", type=kind,
                       help="total distance; Nr = max(1, round(L/L0) - 1)")
        p.add_argument("--nr", type=kind, help="number of swap stations")
        p.add_argument("--nmux", type=int, help="multiplexed channels per hop")
        p.add_argument("--out", help="output CSV path (sweeps) or directory (figures)")
        p.add_argument("--seed", type=int, help="seed recorded for reproducibility")
        p.add_argument("--oracle", action="store_true",
                       help="cross-check the run against the brute-force oracle")

    p_single = sub.add_parser("single", help="evaluate one configuration")
    common(p_single)
    p_sweep = sub.add_parser("sweep", help="sweep one axis; grids look like 5:150:5 or 10,20,50")
    common(p_sweep, axis_grids=True)
    p_fig = sub.add_parser("figure", help="emit one figure's data grid as CSV")
    p_fig.add_argument("figure_id", choices=FIGURE_IDS)
    common(p_fig)
    p_val = sub.add_parser("validate", help="run the self-check suite")
    p_val.add_argument("level", nargs="?", default="fast", choices=("fast", "full"))
    p_val.add_argument("--config", help="flat key=value file; flags override it")
    p_val.add_argument("--seed", type=int, help="seed for the stochastic checks")
    sub.add_parser("stages", help="print the hardware presets")
    return parser


# ------------------------------------------------------------- configuration


class RunConfig(dict):
    """Merged defaults <- config file <- explicit flags, attribute-styled."""

    def __getattr__(self, key):
        try:
            return self[key]
        except KeyError as exc:
            raise AttributeError(key) from exc


_DEFAULTS = {
    "scheme": "seg-ed", "stage": 2, "l0_km": 50.0, "distance_km": None,
    "nr": None, "nmux": DEFAULT_NMUX, "out": None, "seed": 0, "oracle": False,
    "level": "fast", "figure_id": None,
}


def _merge_config(args: argparse.Namespace, parser: _Parser) -> RunConfig:
    cfg = RunConfig(_DEFAULTS)
    cfg["command"] = args.command
    path = getattr(args, "config", None)
    if path:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    parser.error(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, value = (part.strip() for part in line.split("=", 1))
                if key not in _DEFAULTS and key not in HW_KEYS:
                    parser.error(f"{path}:{lineno}: unknown key {key!r}")
                cfg[key] = value.lower() in ("1", "true", "yes") if key == "oracle" else value
    for key in _DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None and flag is not False:
            cfg[key] = flag
    return cfg


def _hardware(cfg: RunConfig, parser: _Parser) -> tuple[HardwareParams, str]:
    """Resolve the preset plus any overrides; label rows 'custom' if overridden."""
    hw = load_stage(int(cfg.stage))
    overrides = {k: float(cfg[k]) for k in HW_KEYS if k in cfg}
    if overrides:
        return replace(hw, **overrides), "custom"
    return hw, str(int(cfg.stage))


def _scheme(cfg: RunConfig, parser: _Parser) -> SchemeId:
    try:
        return SchemeId(str(cfg.scheme))
    except ValueError:
        parser.error(f"unknown scheme {cfg.scheme!r} "
                     f"(choose from {', '.join(s.value for s in SchemeId)})")


def _nr_for_distance(l_km: float, l0_km: float) -> int:
    return max(1, round(l_km / l0_km) - 1)


# ------------------------------------------------------------------ csv rows


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return f"{value:.12g}"


def _row(report: PerformanceReport, stage: str, plob: float | None = None) -> dict:
    row = {
        "scheme": report.scheme.value, "stage": stage,
        "L0_km": report.l0_km, "Nr": report.nr, "L_km": report.l_km,
        "e_Z": report.e_z, "e_X": report.e_x, "r_inf": report.r_inf,
        "R_bit_hz": report.r_bit_hz, "K_hz": report.k_hz,
        "C_K": report.c_k, "p_end": report.p_end,
    }
    if plob is not None:
        row["plob_hz"] = plob
    return row


def _zero_row(scheme: SchemeId, stage: str, l0_km: float) -> dict:
    return {"scheme": scheme.value, "stage": stage, "L0_km": l0_km, "Nr": 0,
            "L_km": 0.0, "e_Z": 0.0, "e_X": 0.0, "r_inf": 0.0,
            "R_bit_hz": 0.0, "K_hz": 0.0, "C_K": math.inf, "p_end": 0.0}


def _sort_key(row: dict):
    return (row["scheme"], row["stage"], row["L0_km"], row["L_km"], row["Nr"])


def _write_csv(rows: list[dict], columns: list[str], out: str | None) -> None:
    rows = sorted(rows, key=_sort_key)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    text = buffer.getvalue()
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ------------------------------------------------------------------- single


def _cmd_single(cfg: RunConfig, parser: _Parser) -> int:
    scheme = _scheme(cfg, parser)
    hw, stage = _hardware(cfg, parser)
    l0 = float(cfg.l0_km)
    if (cfg.nr is None) == (cfg.distance_km is None):
        parser.error("single needs exactly one of --nr / --distance-km")
    nr = int(float(cfg.nr)) if cfg.nr is not None \
        else _nr_for_distance(float(cfg.distance_km), l0)
    if nr < 1:
        parser.error("need Nr >= 1")
    report = build_report(scheme, hw, l0, nr, int(cfg.nmux))
    row = _row(report, stage, plob_bound(report.l_km))
    for column, value in row.items():
        print(f"{column:>9}  {_fmt(value)}")
    if cfg.out:
        _write_csv([row], COLUMNS + ["plob_hz"], str(cfg.out))
    if cfg.oracle:
        return _oracle_single(scheme, hw, l0, nr, int(cfg.nmux), int(cfg.seed), report)
    return 0


def _oracle_single(scheme: SchemeId, hw: HardwareParams, l0: float, nr: int,
                   nmux: int, seed: int, report: PerformanceReport) -> int:
    from .validation import CheckResult, format_report

    if scheme is SchemeId.SEG_PROB:
        from .oracle.trajectories import TrajectoryConfig, run_trajectories

        stats = run_trajectories(scheme, TrajectoryConfig(hw=hw, l0_km=l0, nr=nr, nmux=nmux),
                                 100_000, seed=seed)
        dev = max(abs(stats.p_end - report.p_end) / stats.p_end_se,
                  abs(stats.e_z - report.e_z) / max(stats.e_z_se, 1e-30),
                  abs(stats.e_x - report.e_x) / max(stats.e_x_se, 1e-30))
        checks = [CheckResult("oracle-single-trajectories", dev, 3.0,
                              note="sigma distance at 1e5 samples")]
    else:
        from .alt import qkd_error_vectors, scheme_timing
        from .ghz import ghz_amplitudes
        from .oracle import density

        import numpy as np

        timing = scheme_timing(scheme, hw, l0, nmux)
        noise = hw.noise()
        if scheme is SchemeId.SEG_NOED:
            rho = density.oracle_noed_chain(nr, timing.tau_hop, noise)
            bell = np.stack([ghz_amplitudes(s, 2) for s in range(4)], axis=1).real
            diag = np.real(np.diag(bell.T @ rho @ bell))
            v_z, v_x = qkd_error_vectors(noise.delta)
            dev = max(abs(report.e_z - float(v_z @ diag)),
                      abs(report.e_x - float(v_x @ diag)))
        else:
            orc = density.oracle_chain(nr, timing, noise,
                                       memory=scheme is SchemeId.SEG_ED)
            p_end = math.prod(16.0 * p for p in orc.p_refs)
            dev = max(abs(report.e_z - orc.e_z), abs(report.e_x - orc.e_x),
                      abs(report.p_end - p_end), orc.off_diagonal_mass)
        checks = [CheckResult("oracle-single-density", dev, 1e-10)]
    print(format_report(checks))
    return 0 if all(c.passed for c in checks) else 2


# -------------------------------------------------------------------- sweep


def _parse_grid(text: str, parser: _Parser, integer: bool = False) -> list:
    cast = int if integer else float
    try:
        if ":" in text:
            start, stop, step = (float(p) for p in text.split(":"))
            if step <= 0:
                raise ValueError
            values, v = [], start
            while v <= stop + 1e-9:
                values.append(cast(round(v, 9)))
                v += step
            return values
        return [cast(float(p)) for p in text.split(",")]
    except ValueError:
        parser.error(f"bad grid {text!r}: use start:stop:step or comma-separated values")


def _cmd_sweep(cfg: RunConfig, parser: _Parser) -> int:
    scheme = _scheme(cfg, parser)
    hw, stage = _hardware(cfg, parser)
    axes = {k: str(cfg[k]) for k in ("l0_km", "distance_km", "nr")
            if cfg[k] is not None and any(c in str(cfg[k]) for c in ":,")}
    if len(axes) != 1:
        parser.error("sweep needs a grid (start:stop:step or a,b,c) on exactly one "
                     "of --l0-km / --distance-km / --nr")
    axis = next(iter(axes))
    nmux = int(cfg.nmux)
    points: list[tuple[float, int]] = []  # (l0_km, nr)
    if axis == "l0_km":
        if (cfg.nr is None) == (cfg.distance_km is None):
            parser.error("an L0 sweep needs exactly one of --nr / --distance-km")
        for value in _parse_grid(axes[axis], parser):
            nr = int(float(cfg.nr)) if cfg.nr is not None \
                else _nr_for_distance(float(cfg.distance_km), value)
            points.append((value, nr))
    elif axis == "distance_km":
        l0 = float(cfg.l0_km)
        points = [(l0, _nr_for_distance(l, l0)) for l in _parse_grid(axes[axis], parser)]
    else:
        l0 = float(cfg.l0_km)
        points = [(l0, nr) for nr in _parse_grid(axes[axis], parser, integer=True)]
    if any(nr < 1 for _, nr in points):
        parser.error("every sweep point needs Nr >= 1")

    with_plob = axis == "distance_km"
    rows = []
    for l0, nr in points:
        report = build_report(scheme, hw, l0, nr, nmux)
        rows.append(_row(report, stage, plob_bound(report.l_km) if with_plob else None))
    _write_csv(rows, COLUMNS + ["plob_hz"] if with_plob else COLUMNS, cfg.out)
    return 0


# ------------------------------------------------------------------- figure


def _report_row(task: tuple) -> dict:
    scheme_value, stage, l0_km, nr, nmux, with_plob = task
    report = build_report(SchemeId(scheme_value), load_stage(stage), l0_km, nr, nmux)
    return _row(report, str(stage), plob_bound(report.l_km) if with_plob else None)


def _range_row(task: tuple) -> dict:
    scheme_value, stage, l0_km, nmux = task
    scheme, hw = SchemeId(scheme_value), load_stage(stage)
    found = max_range(scheme, hw, l0_km, nmux)
    if found.nr == 0:
        return _zero_row(scheme, str(stage), l0_km)
    return _row(build_report(scheme, hw, l0_km, found.nr, nmux), str(stage))


def _figure_tasks(figure_id: str, nmux: int) -> tuple:
    schemes = [s.value for s in SchemeId]
    if figure_id == "fig4a":
        tasks = [(s, stage, l0, nmux) for s in schemes
                 for stage in (1, 2, 3) for l0 in _L0_GRID]
        return _range_row, tasks, COLUMNS
    if figure_id == "fig4b":
        tasks = [(s, stage, l0, _nr_for_distance(l, l0), nmux, True)
                 for s in schemes for stage in (1, 2, 3)
                 for l in (1000.0, 1500.0) for l0 in _L0_GRID]
        return _report_row, tasks, COLUMNS + ["plob_hz"]
    # fig5 / fig6 share one grid: K and C_K versus L at L0 = 50 km
    tasks = [(s, stage, 50.0, _nr_for_distance(l, 50.0), nmux, True)
             for s in schemes for stage in (2, 3) for l in _FIG_DISTANCES]
    return _report_row, tasks, COLUMNS + ["plob_hz"]


def _cmd_figure(cfg: RunConfig) -> int:
    figure_id = str(cfg.figure_id)
    worker, tasks, columns = _figure_tasks(figure_id, int(cfg.nmux))
    with ProcessPoolExecutor() as pool:
        rows = list(pool.map(worker, tasks, chunksize=1))
    out_dir = str(cfg.out) if cfg.out else "figures"
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{figure_id}.csv")
    _write_csv(rows, columns, path)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


# ------------------------------------------------------- validate and stages


def _cmd_validate(cfg: RunConfig) -> int:
    from .validation import format_report, run_validation

    results = run_validation(str(cfg.level), seed=int(cfg.seed))
    print(format_report(results))
    return 0 if all(r.passed for r in results) else 2


def _cmd_stages() -> int:
    header = f"{'stage':>5}  " + "  ".join(f"{k:>11}" for k in HW_KEYS)
    print(header)
    for n, hw in STAGES.items():
        print(f"{n:>5}  " + "  ".join(f"{getattr(hw, k):>11g}" for k in HW_KEYS))
    print("c = 200000 km/s, Nmux = 12 in all stages")
    return 0


if __name__ == "__main__":
    sys.exit(main())
