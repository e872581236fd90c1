"""Command line entry point: ``mostowkit list`` and ``mostowkit run <id> [options]``.

Exit status: 0 when every check passes, 1 when a check fails, 2 on a usage or
configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import EXPERIMENTS, ConfigError
from .runner import output_dir, run, write_artifacts


def list_experiments() -> list[tuple[str, str]]:
    return [(e.id, e.anchor) for e in EXPERIMENTS.values()]


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_overrides(extra: list[str]) -> dict:
    """``--key value`` pairs to a params dict; values are JSON when they parse as JSON."""
    out: dict = {}
    i = 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--") or len(tok) == 2:
            raise ConfigError(f"{tok}: expected --<param> <value>")
        key = tok[2:].replace("-", "_")
        if "=" in key:
            key, val = key.split("=", 1)
            i += 1
        elif i + 1 < len(extra):
            val = extra[i + 1]
            i += 2
        else:
            raise ConfigError(f"params.{key}: missing value")
        out[key] = _parse_value(val)
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mostowkit", description="Numerical experiments for rigidity lemmas.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list experiment ids")
    r = sub.add_parser("run", help="run an experiment; unknown --key value pairs override params")
    r.add_argument("experiment")
    r.add_argument("--config", help="JSON config file")
    r.add_argument("--seed", type=int)
    r.add_argument("--out", help="output directory (default $MOSTOWKIT_OUT or ./mostowkit-out)")
    r.add_argument("--plots", action="store_true", help="also write an SVG plot (needs matplotlib)")
    return ap


def load_config(args, extra: list[str]) -> dict:
    cfg: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"config: cannot read {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON at line {exc.lineno}: {exc.msg}") from None
        if not isinstance(cfg, dict):
            raise ConfigError("config: expected a JSON object")
        if cfg.get("experiment", args.experiment) != args.experiment:
            raise ConfigError(f"experiment: config names {cfg['experiment']!r} but {args.experiment!r} was requested")
    cfg = dict(cfg)
    cfg["experiment"] = args.experiment
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.out is not None:
        cfg["out"] = args.out
    if args.plots:
        cfg["plots"] = True
    overrides = parse_overrides(extra)
    if overrides:
        params = cfg.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("params: expected an object")
        cfg["params"] = {**params, **overrides}
    return cfg


def main(argv=None) -> int:
    ap = build_parser()
    args, extra = ap.parse_known_args(argv)
    if args.command == "list":
        if extra:
            ap.error(f"unrecognized arguments: {' '.join(extra)}")
        for eid, anchor in list_experiments():
            print(f"{eid:<14} {anchor}")
        return 0
    try:
        cfg = load_config(args, extra)
        report = run(cfg)
        paths = write_artifacts(report, output_dir(cfg.get("out")), bool(cfg.get("plots")))
    except ConfigError as exc:
        print(f"mostowkit: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"mostowkit: error: out: cannot write artifacts: {exc}", file=sys.stderr)
        return 2
    except ImportError:
        print("mostowkit: error: plots: matplotlib is not installed", file=sys.stderr)
        return 2
    status = "PASS" if report.passed else "FAIL"
    print(f"{report.experiment}: {status} ({len(report.rows) - report.failed_rows}/{len(report.rows)} rows ok, "
          f"{report.wall_time:.2f}s)")
    for p in paths:
        print(f"  wrote {p}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
