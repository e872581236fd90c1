"""Run a configured experiment and write JSON/CSV (and optionally SVG) artifacts."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .experiments import EXPERIMENTS, ConfigError, resolve_params
from .hyperbolic import DomainError

CONFIG_KEYS = {"experiment", "seed", "params", "out", "plots"}
DEFAULT_OUT = "mostowkit-out"


@dataclass
class RunReport:
    experiment: str
    anchor: str
    seed: int
    params: dict
    config_digest: str
    rows: list
    passed: bool
    wall_time: float = 0.0
    artifacts: list = field(default_factory=list)

    @property
    def failed_rows(self) -> int:
        return sum(1 for r in self.rows if r.get("pass") is False)

    def to_dict(self) -> dict:
        # wall time is left out so reruns with the same seed are byte-identical
        return {"experiment": self.experiment, "anchor": self.anchor, "version": __version__,
                "passed": self.passed,
                "seed": self.seed, "config_digest": self.config_digest, "params": self.params,
                "row_count": len(self.rows), "failed_rows": self.failed_rows, "rows": self.rows}


def _plain(v):
    if isinstance(v, (bool, str)) or v is None:
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_plain(x) for x in v]
    return str(v)


def normalize_config(config: dict) -> dict:
    if not isinstance(config, dict):
        raise ConfigError("config: expected a JSON object")
    extra = set(config) - CONFIG_KEYS
    if extra:
        raise ConfigError(f"{sorted(extra)[0]}: unknown config field; known: {sorted(CONFIG_KEYS)}")
    exp_id = config.get("experiment")
    if exp_id not in EXPERIMENTS:
        raise ConfigError(f"experiment: unknown id {exp_id!r}; run 'list' for the ids")
    seed = config.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed: expected a nonnegative integer, got {seed!r}")
    plots = config.get("plots", False)
    if not isinstance(plots, bool):
        raise ConfigError(f"plots: expected true or false, got {plots!r}")
    out = config.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError(f"out: expected a directory path, got {out!r}")
    params = resolve_params(EXPERIMENTS[exp_id], config.get("params", {}))
    return {"experiment": exp_id, "seed": seed, "params": params, "out": out, "plots": plots}


def config_digest(cfg: dict) -> str:
    payload = json.dumps({k: cfg[k] for k in ("experiment", "seed", "params")}, sort_keys=True,
                         separators=(",", ":"), default=str)
    return hashlib.sha256(payload.encode()).hexdigest()


def run(config: dict) -> RunReport:
    """Validate ``config``, run the experiment and return its report (no files written)."""
    cfg = normalize_config(config)
    exp = EXPERIMENTS[cfg["experiment"]]
    rng = np.random.default_rng(cfg["seed"])
    t0 = time.perf_counter()
    try:
        rows, passed = exp.runner(dict(cfg["params"]), rng)
    except DomainError as exc:
        raise ConfigError(f"params: {exc}") from None
    except ConfigError as exc:
        msg = str(exc)
        raise ConfigError(msg if msg.startswith("params") else f"params.{msg}") from None
    wall = time.perf_counter() - t0
    return RunReport(exp.id, exp.anchor, cfg["seed"], _plain(cfg["params"]), config_digest(cfg),
                     [_plain(r) for r in rows], bool(passed), wall)


def output_dir(cfg_out: str | None) -> Path:
    return Path(cfg_out or os.environ.get("MOSTOWKIT_OUT") or DEFAULT_OUT)


def write_artifacts(report: RunReport, out: Path, plots: bool = False) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / f"{report.experiment}.json"
    json_path.write_text(json.dumps(report.to_dict(), indent=1) + "\n")
    csv_path = out / f"{report.experiment}.csv"
    fields: list[str] = []
    for r in report.rows:
        fields.extend(k for k in r if k not in fields)
    with csv_path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in report.rows:
            w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    paths = [json_path, csv_path]
    if plots:
        paths.append(_plot(report, out / f"{report.experiment}.svg"))
    report.artifacts = [str(p) for p in paths]
    return paths


def _num(v):
    if v is None:
        return math.nan
    try:
        return float(Fraction(v)) if isinstance(v, str) else float(v)
    except (TypeError, ValueError):
        return math.nan


def _plot(report: RunReport, path: Path) -> Path:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "mostowkit"
    fig, ax = plt.subplots(figsize=(6, 4))
    rows = report.rows
    if report.experiment == "asterisk-scan":
        xs, ys = [r["x"] for r in rows], [r["y"] for r in rows]
        ok = [r["is_asterisk"] for r in rows]
        ax.scatter(xs, ys, c=["tab:green" if o else "tab:red" for o in ok], marker="s")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
    else:
        idx = np.arange(len(rows))
        ax.plot(idx, [_num(r.get("observed")) for r in rows], ".", label="observed")
        ax.plot(idx, [_num(r.get("bound")) for r in rows], "-", label="bound")
        ax.set_xlabel("row")
        ax.legend()
    ax.set_title(report.anchor.split(":")[0])
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
