"""Command-line front end: run, sweep, select, report.

Configs are flat `key = value` files (see ExperimentConfig and
ScenarioSpec field names; scenario fields are prefixed `scenario.` and
sweep grids `sweep.`). Errors print a single JSON line to stderr; contract
violations exit 2, anything else unexpected exits 1.
"""

from __future__ import annotations

import argparse
import json
import pathlib
import sys

from .errors import ContractViolation
from .harness import (
    config_from_flat,
    config_text,
    emit_reports,
    load_records,
    one_region_out_select,
    parse_config_file,
    run_experiment,
    save_records,
    sweep,
)


def _load_config(args) -> tuple:
    flat, grid = ({}, {}) if args.config is None else parse_config_file(args.config)
    if getattr(args, "method", None):
        flat["method"] = args.method
    if getattr(args, "seed", None):
        flat["seeds"] = args.seed
    if flat.get("method") == "baseline":
        flat.setdefault("memory_weight", "0.0")
        flat.setdefault("context_weight", "0.0")
    elif flat.get("method") == "vendi":
        flat.setdefault("context_weight", "0.0")
    elif flat.get("method") == "context_only":
        flat.setdefault("memory_weight", "0.0")
    return config_from_flat(flat), grid


def _summary_lines(rec) -> list:
    if rec.error is not None:
        return [f"{rec.config_hash}: FAILED ({rec.error})"]
    agg = rec.aggregate
    return [
        f"{rec.config_hash} method={rec.config.method} "
        f"avg_f1={agg.average.f1:.4f} worst_f1={agg.worst.f1:.4f} "
        f"[{agg.worst_region}] vendi={rec.mean_output_vendi:.3f}",
    ]


def _cmd_run(args) -> int:
    config, grid = _load_config(args)
    if grid:
        raise ContractViolation("config has sweep.* keys; use the sweep command")
    record = run_experiment(config)
    out = pathlib.Path(args.out)
    paths = emit_reports([record], out)
    save_records([record], out / "records.json")
    (out / "config.txt").write_text(config_text(config))
    for line in _summary_lines(record):
        print(line)
    for path in paths:
        print(f"wrote {path}")
    print(f"wrote {out / 'records.json'}")
    return 0 if record.error is None else 1


def _cmd_sweep(args) -> int:
    config, grid = _load_config(args)
    if not grid:
        raise ContractViolation("sweep needs at least one sweep.* key in the config")
    records = sweep(config, grid)
    out = pathlib.Path(args.out)
    paths = emit_reports(records, out)
    save_records(records, out / "records.json")
    for rec in records:
        for line in _summary_lines(rec):
            print(line)
    for path in paths:
        print(f"wrote {path}")
    print(f"wrote {out / 'records.json'}")
    return 0 if all(r.error is None for r in records) else 1


def _cmd_select(args) -> int:
    records = load_records(args.records)
    selection = one_region_out_select(records)
    lines = []
    for held_out in sorted(selection):
        rec = selection[held_out]
        rest = [r for r in sorted(rec.aggregate.per_region) if r != held_out]
        mean_f1 = sum(rec.aggregate.per_region[r].f1 for r in rest) / len(rest)
        lines.append(
            f"held_out={held_out} pick={rec.config_hash} "
            f"method={rec.config.method} rest_mean_f1={mean_f1!r}"
        )
    text = "".join(line + "\n" for line in lines)
    print(text, end="")
    if args.out:
        out = pathlib.Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "selection.txt").write_text(text)
        print(f"wrote {out / 'selection.txt'}")
    return 0


def _cmd_report(args) -> int:
    records = load_records(args.records)
    paths = emit_reports(records, args.out)
    for path in paths:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vendiguide",
        description="Diversity-guided sampling experiments on synthetic worlds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute one configured run")
    run_p.add_argument("--config", help="flat key = value config file")
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument("--method", help="override the configured method")
    run_p.add_argument("--seed", help="override seeds, comma separated")
    run_p.set_defaults(func=_cmd_run)

    sweep_p = sub.add_parser("sweep", help="run every point of a config grid")
    sweep_p.add_argument("--config", required=True, help="config file with sweep.* keys")
    sweep_p.add_argument("--out", required=True, help="output directory")
    sweep_p.add_argument("--method", help="override the base method")
    sweep_p.add_argument("--seed", help="override seeds, comma separated")
    sweep_p.set_defaults(func=_cmd_sweep)

    select_p = sub.add_parser(
        "select", help="pick the best run per held-out region from saved records"
    )
    select_p.add_argument("--records", required=True, help="records.json from a sweep")
    select_p.add_argument("--out", help="directory for selection.txt")
    select_p.set_defaults(func=_cmd_select)

    report_p = sub.add_parser("report", help="re-emit tables from saved records")
    report_p.add_argument("--records", required=True, help="records.json path")
    report_p.add_argument("--out", required=True, help="output directory")
    report_p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ContractViolation as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 2
    except Exception as exc:  # pragma: no cover - safety net
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
