"""``gevrey-nse run``: execute one scenario and write its record.

Exit codes: 0 when every verdict is PASS or OBSERVATIONAL, 1 on any FAIL,
2 on a configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .experiments import ConfigError, ExperimentConfig, FAIL, run_scenario

log = logging.getLogger("gevrey_nse")


def _set_dotted(d: dict, key: str, raw: str):
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    parts = key.split(".")
    for p in parts[:-1]:
        d = d.setdefault(p, {})
        if not isinstance(d, dict):
            raise ConfigError(f"cannot set {key}: {p} is not a mapping")
    d[parts[-1]] = value


def build_config(args) -> ExperimentConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    if args.scenario:
        data["scenario"] = args.scenario
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        _set_dotted(data, k.strip(), v)
    if args.seed is not None:
        data["seeds"] = [args.seed]
        data.setdefault("initial", {})["seed"] = args.seed
    if args.out:
        data["out"] = args.out
    return ExperimentConfig.from_dict(data)


def emit(record, cfg: ExperimentConfig, kind: str) -> Path | None:
    if not cfg.out:
        return None
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True, default=str))
    stem = f"{cfg.scenario}-{record.config_hash}"
    if kind == "csv":
        path = out / f"{stem}.csv"
        record.write_csv(path)
        record.write_jsonl(out / f"{stem}.verdicts.jsonl")
    elif kind == "jsonl":
        path = out / f"{stem}.jsonl"
        record.write_jsonl(path)
    else:
        path = out / f"{stem}.plot"
        record.write_plotdata(path)
        record.write_jsonl(out / f"{stem}.verdicts.jsonl")
    return path


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gevrey-nse", description="Gevrey-norm experiments on Galerkin Navier-Stokes trajectories.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one scenario")
    r.add_argument("--config", help="JSON file matching ExperimentConfig")
    r.add_argument("--scenario", help="override the scenario name")
    r.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a field; dotted keys, JSON values")
    r.add_argument("--out", help="output directory")
    r.add_argument("--seed", type=int, help="single seed (overrides seeds and initial.seed)")
    r.add_argument("--emit", choices=("csv", "jsonl", "plotdata"), default="jsonl")
    r.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = build_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    log.info("running %s (config %s)", cfg.scenario, cfg.config_hash())
    record = run_scenario(cfg)
    for note in record.notes:
        log.info(note)
    path = emit(record, cfg, args.emit)
    for v in record.verdicts:
        line = f"{v.status:13s} {v.name}: {v.invariant}"
        if v.first_violation:
            line += f" (first violation {v.first_violation})"
        print(line)
    if path:
        print(f"wrote {path}")
    return 1 if record.status == FAIL else 0


if __name__ == "__main__":
    sys.exit(main())
