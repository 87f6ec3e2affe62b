"""Command-line front end: validate a config, run sweeps, write results.

Subcommands:

* ``simulate <config> [--seed N] [--out DIR] [--dry-run] [--workers N]`` —
  run the configured SNR sweep and write the results CSV, a plain-text
  summary (BER and complexity tables) and a plot script next to it.
* ``dump-channel <config>`` — print the derived channel matrix A as CSV.
* ``complexity <config>`` — print closed-form and measured squaring counts.

Exit codes: 0 success, 1 invalid configuration/usage, 2 runtime failure.
Nothing here ever seeds from the clock: ``--seed`` overrides the config
seed, and with neither present ``simulate`` refuses to run.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import replace

from .config import ConfigError, build_plan, parse_config
from .constellation import make_constellation
from .harness import run_point, run_sweep, write_csv
from .scenario import build_channel, write_channel_csv

__all__ = ["main", "entry_point"]

# Nominal complexity ratios for the five-satellite benchmark, in percent of
# the full joint-search count; printed beside measured values when the
# configured detector matches an entry.
_REFERENCE_PCT = {
    "8psk": {
        ("jml", None): 100.0,
        ("lgsd", (2, 3, 2)): 67.0,
        ("lgsd", (2, 2, 1)): 35.0,
        ("lgsd", (2, 2, 2)): 63.0,
        ("lgsd", (2, 3, 1)): 39.0,
        ("lgsd", (3, 2, 1)): 53.0,
    },
    "16apsk": {
        ("jml", None): 100.0,
        ("lgsd", (2, 3, 2)): 16.0,
        ("lgsd", (3, 3, 2)): 24.0,
        ("lgsd", (3, 4, 3)): 35.0,
        ("lgsd", (4, 3, 2)): 32.0,
        ("lgsd", (4, 4, 3)): 46.0,
    },
}


def _atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_config(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError([f"cannot read config file: {exc}"]) from None
    return parse_config(text)


def _closed_form(plan) -> int:
    const = make_constellation(plan.constellation)
    n = plan.scenario.num_satellites
    return 2 * n * const.size ** n


def _reference_pct(plan, spec):
    table = _REFERENCE_PCT.get(plan.constellation.strip().lower(), {})
    if spec.algorithm == "jml":
        return table.get(("jml", None))
    c = spec.config
    return table.get(("lgsd", (c.overall_iters, c.ble_iters, c.glo_iters)))


def _ber_table(plan, records) -> str:
    snrs = list(plan.snr_points)
    central = {(r.detector, r.snr_db): r for r in records if r.satellite == 0}
    width = max(len(d.label) for d in plan.detectors)
    width = max(width, len("detector"))
    head = "detector".ljust(width) + "".join(
        f" | {snr:8.1f} dB" for snr in snrs)
    rows = [head, "-" * len(head)]
    for spec in plan.detectors:
        cells = []
        for snr in snrs:
            rec = central[(spec.label, snr)]
            cells.append(f" | {rec.ber:11.3e}")
        rows.append(spec.label.ljust(width) + "".join(cells))
    return "\n".join(rows)


def _complexity_table(plan, records) -> str:
    const = make_constellation(plan.constellation)
    closed = _closed_form(plan)
    n = plan.scenario.num_satellites
    mean = {}
    for rec in records:
        if rec.satellite == 0:
            mean.setdefault(rec.detector, []).append(rec.mean_squarings)
    width = max(max(len(d.label) for d in plan.detectors), len("detector"))
    head = (f"{'detector'.ljust(width)} | squarings/vector | % of joint "
            f"search | reference %")
    rows = [head, "-" * len(head)]
    for spec in plan.detectors:
        vals = mean[spec.label]
        measured = sum(vals) / len(vals)
        pct = 100.0 * measured / closed
        ref = _reference_pct(plan, spec)
        ref_txt = f"{ref:.0f}" if ref is not None else "-"
        rows.append(f"{spec.label.ljust(width)} | {measured:16.1f} "
                    f"| {pct:17.1f} | {ref_txt:>11}")
    rows.append(f"joint-search closed form: 2*N*B^N = {closed} "
                f"(N={n}, B={const.size})")
    return "\n".join(rows)


def _summary_text(plan, records) -> str:
    parts = [
        "BER per SNR point (central satellite, index 0)",
        "",
        _ber_table(plan, records),
        "",
        "Complexity (mean squarings per received vector, all SNR points)",
        "",
        _complexity_table(plan, records),
        "",
    ]
    return "\n".join(parts)


_PLOT_TEMPLATE = '''\
#!/usr/bin/env python3
"""Plot BER-vs-SNR curves (central satellite) from {csv_name}."""
import csv
import os
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
curves = defaultdict(list)
with open(os.path.join(here, {csv_name!r})) as fh:
    for row in csv.DictReader(fh):
        if int(row["satellite"]) == 0:
            curves[row["detector"]].append(
                (float(row["snr_db"]), float(row["ber"]),
                 float(row["ci_lo"]), float(row["ci_hi"])))

fig, ax = plt.subplots(figsize=(7, 5))
for label in sorted(curves):
    pts = sorted(curves[label])
    snr = [p[0] for p in pts]
    ber = [max(p[1], 1e-12) for p in pts]
    lo = [max(p[2], 1e-12) for p in pts]
    hi = [max(p[3], 1e-12) for p in pts]
    ax.semilogy(snr, ber, marker="o", label=label)
    ax.fill_between(snr, lo, hi, alpha=0.2)
ax.set_xlabel("SNR (dB)")
ax.set_ylabel("BER, central satellite")
ax.grid(True, which="both", alpha=0.3)
ax.legend()
out = os.path.join(here, {png_name!r})
fig.savefig(out, dpi=150, bbox_inches="tight")
print("wrote", out)
'''


def _plot_script(csv_name: str) -> str:
    png_name = os.path.splitext(csv_name)[0] + ".png"
    return _PLOT_TEMPLATE.format(csv_name=csv_name, png_name=png_name)


def _cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    plan = build_plan(cfg, seed=args.seed)
    a = build_channel(plan.scenario)
    if args.dry_run:
        print(f"config OK: channel matrix A is {a.shape[0]} x {a.shape[1]} "
              f"(chains x satellites)")
        print(f"snr points: {', '.join(str(s) for s in plan.snr_points)}")
        print(f"detectors: {', '.join(d.label for d in plan.detectors)}")
        print(f"seed: {plan.master_seed}")
        return 0

    out_dir = args.out or "."
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}",
              file=sys.stderr)
        return 2

    records = run_sweep(plan, workers=args.workers)

    csv_path = os.path.join(out_dir, cfg.results_csv)
    summary_path = os.path.join(out_dir, cfg.summary_txt)
    plot_path = os.path.join(out_dir, cfg.plot_script)
    summary = _summary_text(plan, records)
    try:
        write_csv(records, csv_path)
        _atomic_write_text(summary_path, summary)
        _atomic_write_text(plot_path,
                           _plot_script(os.path.basename(cfg.results_csv)))
    except OSError as exc:
        print(f"error: writing results failed: {exc}", file=sys.stderr)
        return 2
    print(summary)
    print(f"wrote {csv_path}, {summary_path}, {plot_path}")
    return 0


def _cmd_dump_channel(args) -> int:
    cfg = _load_config(args.config)
    a = build_channel(cfg.to_scenario())
    write_channel_csv(a, sys.stdout)
    return 0


def _cmd_complexity(args) -> int:
    cfg = _load_config(args.config)
    plan = build_plan(cfg, seed=cfg.seed if cfg.seed is not None else 0)
    # a short fixed probe is enough: squaring counts are per-vector and
    # essentially SNR-independent
    snr = plan.snr_points[len(plan.snr_points) // 2]
    probe = replace(plan, snr_points=(snr,), min_symbols=1_000,
                    max_bit_errors=1,
                    max_symbols=max(2_000, plan.scenario.num_satellites * 256))
    records = run_point(probe, snr, chunk_trials=256, chunks_per_round=1)
    trials = records[0].bits_sent // make_constellation(
        plan.constellation).bits_per_symbol
    print(_complexity_table(probe, records))
    print(f"(measured over {trials} vectors at {snr} dB, "
          f"seed {probe.master_seed})")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="satrx",
        description="Overloaded multi-satellite reception simulator: "
                    "joint-search and list-based group detection over a "
                    "multi-feed dish front end.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run the configured BER sweep")
    p_sim.add_argument("config", help="path to an INI run configuration")
    p_sim.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
    p_sim.add_argument("--out", default=None, metavar="DIR",
                       help="output directory (default: current)")
    p_sim.add_argument("--dry-run", action="store_true",
                       help="validate and show derived dimensions only")
    p_sim.add_argument("--workers", type=int, default=1,
                       help="worker processes (results are identical "
                            "for any value)")
    p_sim.set_defaults(func=_cmd_simulate)

    p_dump = sub.add_parser("dump-channel",
                            help="print the channel matrix A as CSV")
    p_dump.add_argument("config")
    p_dump.set_defaults(func=_cmd_dump_channel)

    p_cpx = sub.add_parser("complexity",
                           help="print closed-form and measured "
                                "squaring counts")
    p_cpx.add_argument("config")
    p_cpx.set_defaults(func=_cmd_complexity)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; fold that into the
        # validation code and keep --help's success status
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except ConfigError as exc:
        print("error: invalid configuration:", file=sys.stderr)
        for err in exc.errors:
            print(f"  - {err}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry_point() -> None:
    """Console-script hook."""
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
