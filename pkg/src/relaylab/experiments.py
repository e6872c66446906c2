"""Experiment runners: config resolution, sweeps, CSV and summary emission.

Each experiment produces one row per (protocol, axis point, method) in a
fixed order with a fixed CSV schema, so identical specs yield byte-identical
files. A JSON sidecar records the fully resolved spec and package version.
"""

import csv
import json
import logging
import math
import os
import subprocess
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .analytic import adb_closed, c11_closed, c22_closed
from .channel import ChannelConfig
from .power import (
    PROTOCOLS,
    OptimizationError,
    PowerBudget,
    maximize_throughput,
    ratio_point,
)
from .simulate import (
    SimConfig,
    ThroughputEstimate,
    adb_component_estimates,
    sim_adb,
    sim_crs,
    sim_df,
    sim_sfd_mmrs,
)

__all__ = [
    "EXPERIMENTS",
    "CSV_COLUMNS",
    "ConfigError",
    "ExperimentSpec",
    "SweepRow",
    "SweepResult",
    "resolve_spec",
    "load_spec",
    "run_experiment",
    "write_csv",
    "write_summary",
    "parse_csv",
    "emit",
]

log = logging.getLogger("relaylab")

EXPERIMENTS = (
    "ratio-sweep",
    "snr-sweep",
    "grouping-sweep",
    "antenna-sweep",
    "relay-sweep",
    "validate",
)

CSV_COLUMNS = (
    "protocol", "L", "M", "N_R", "snr_db",
    "ps", "pr", "throughput", "std_error", "method",
)

METHODS = ("analytic", "monte-carlo")

_SIMULATORS = {
    "adb": sim_adb,
    "crs": sim_crs,
    "df": sim_df,
    "sfd-mmrs": sim_sfd_mmrs,
}


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentSpec:
    experiment: str
    channel: ChannelConfig
    sim: SimConfig
    grid: tuple
    snr_db: float = 10.0
    total_antennas: int = 48
    tolerance: float = 1e-3
    methods: tuple = METHODS
    output_path: str = ""


@dataclass(frozen=True)
class SweepRow:
    protocol: str
    L: int
    M: int
    N_R: int
    snr_db: float
    ps: float
    pr: float
    throughput: float
    std_error: float
    method: str


@dataclass
class SweepResult:
    spec: ExperimentSpec
    rows: List[SweepRow]
    summary: dict = field(default_factory=dict)


def _snr_linear(snr_db: float) -> float:
    return 10.0 ** (snr_db / 10.0)


def _reject_unknown(raw: dict, allowed, where: str):
    unknown = sorted(set(raw) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown {where} keys: {', '.join(unknown)}")


def _build(cls, raw: dict, where: str):
    try:
        return cls(**raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {where} section: {exc}") from exc


def _default_grid(experiment: str, channel: ChannelConfig) -> tuple:
    if experiment == "ratio-sweep":
        return tuple(float(r) for r in np.geomspace(1e-2, 1e2, 25))
    if experiment == "snr-sweep":
        return tuple(float(s) for s in range(0, 21, 2))
    if experiment == "grouping-sweep":
        return tuple(range(1, channel.L))
    if experiment == "antenna-sweep":
        return (1, 2, 3, 4, 5, 6)
    if experiment == "relay-sweep":
        return (2, 4, 6, 8, 12)
    return tuple(
        (g, s, p)
        for g in (1, 2, 3)
        for s in (1, 2, 3)
        for p in (0.1, 1.0, 10.0)
    )


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _validate_grid(spec: ExperimentSpec) -> tuple:
    exp, grid = spec.experiment, spec.grid
    if len(grid) == 0:
        raise ConfigError("grid must be non-empty")
    if exp == "ratio-sweep":
        if not all(isinstance(r, (int, float)) and 0 < r < math.inf for r in grid):
            raise ConfigError("ratio grid entries must be positive finite numbers")
        return tuple(float(r) for r in grid)
    if exp == "snr-sweep":
        if not all(isinstance(s, (int, float)) and math.isfinite(s) for s in grid):
            raise ConfigError("snr grid entries must be finite numbers (dB)")
        return tuple(float(s) for s in grid)
    if exp == "grouping-sweep":
        if not all(_is_int(m) and 1 <= m <= spec.channel.L - 1 for m in grid):
            raise ConfigError(
                f"grouping grid entries must be integers in [1, {spec.channel.L - 1}]"
            )
        return tuple(grid)
    if exp == "antenna-sweep":
        if not all(_is_int(n) and n >= 1 for n in grid):
            raise ConfigError("antenna grid entries must be positive integers")
        return tuple(grid)
    if exp == "relay-sweep":
        for L in grid:
            if not _is_int(L) or L < 2 or L % 2:
                raise ConfigError(f"relay grid entries must be even integers >= 2, got {L!r}")
            if spec.total_antennas % L:
                raise ConfigError(
                    f"L={L} does not divide total_antennas={spec.total_antennas}"
                )
        return tuple(grid)
    cleaned = []
    for entry in grid:
        entry = tuple(entry) if isinstance(entry, (list, tuple)) else (entry,)
        if len(entry) != 3:
            raise ConfigError("validate grid entries must be [group_size, shape, power]")
        g, s, p = entry
        if not (_is_int(g) and g >= 1 and _is_int(s) and s >= 1):
            raise ConfigError("validate group_size and shape must be positive integers")
        if not (isinstance(p, (int, float)) and 0 < p < math.inf):
            raise ConfigError("validate power must be positive and finite")
        cleaned.append((g, s, float(p)))
    return tuple(cleaned)


def resolve_spec(raw: dict) -> ExperimentSpec:
    """Build a fully validated ExperimentSpec from a raw config mapping.

    Unknown keys anywhere are rejected; omitted sections fall back to the
    defaults (L=4, M=2, N_R=3 channel; 10^6 slots, seed 42; per-experiment
    grid)."""
    _reject_unknown(
        raw,
        (
            "experiment", "channel", "sim", "grid", "snr_db",
            "total_antennas", "tolerance", "methods", "output_path",
        ),
        "config",
    )
    experiment = raw.get("experiment")
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            f"experiment must be one of {', '.join(EXPERIMENTS)}; got {experiment!r}"
        )

    channel_raw = dict(raw.get("channel", {}))
    _reject_unknown(
        channel_raw,
        ("L", "M", "N_R", "sigma_g2", "sigma_h2", "noise_r", "noise_d"),
        "channel",
    )
    channel_raw = {"L": 4, "M": 2, "N_R": 3, **channel_raw}
    channel = _build(ChannelConfig, channel_raw, "channel")

    sim_raw = dict(raw.get("sim", {}))
    _reject_unknown(sim_raw, ("slots", "seed", "workers"), "sim")
    sim = _build(SimConfig, sim_raw, "sim")

    methods = raw.get("methods", list(METHODS))
    if isinstance(methods, str):
        methods = [methods]
    if not methods or not set(methods) <= set(METHODS):
        raise ConfigError(f"methods must be a non-empty subset of {METHODS}")
    methods = tuple(m for m in METHODS if m in methods)

    snr_db = raw.get("snr_db", 10.0)
    if not isinstance(snr_db, (int, float)) or not math.isfinite(snr_db):
        raise ConfigError(f"snr_db must be a finite number, got {snr_db!r}")
    total_antennas = raw.get("total_antennas", 48)
    if not _is_int(total_antennas) or total_antennas < 2:
        raise ConfigError(f"total_antennas must be an integer >= 2, got {total_antennas!r}")
    tolerance = raw.get("tolerance", 1e-3)
    if not isinstance(tolerance, (int, float)) or not 0 < tolerance < 1:
        raise ConfigError(f"tolerance must be in (0, 1), got {tolerance!r}")
    output_path = raw.get("output_path", f"{experiment}.csv")
    if not isinstance(output_path, str) or not output_path:
        raise ConfigError("output_path must be a non-empty string")

    spec = ExperimentSpec(
        experiment=experiment,
        channel=channel,
        sim=sim,
        grid=tuple(raw["grid"]) if "grid" in raw else _default_grid(experiment, channel),
        snr_db=float(snr_db),
        total_antennas=total_antennas,
        tolerance=float(tolerance),
        methods=methods,
        output_path=output_path,
    )
    return replace(spec, grid=_validate_grid(spec))


def load_spec(path: str) -> ExperimentSpec:
    """Read and resolve a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    return resolve_spec(raw)


def _analytic_evaluator(cfg: ChannelConfig) -> Callable:
    def evaluate(ps: float, pr: float) -> ThroughputEstimate:
        return ThroughputEstimate(
            adb_closed(ps, pr, cfg).c_adb, 0.0, "analytic", 0
        )
    return evaluate


def _mc_evaluator(protocol: str, cfg: ChannelConfig, sim: SimConfig) -> Callable:
    simulator = _SIMULATORS[protocol]
    return lambda ps, pr: simulator(cfg, sim, ps, pr)


def _row(protocol, cfg, snr_db, ps, pr, est) -> SweepRow:
    return SweepRow(
        protocol=protocol,
        L=cfg.L,
        M=cfg.M,
        N_R=cfg.N_R,
        snr_db=float(snr_db),
        ps=float(ps),
        pr=float(pr),
        throughput=est.value,
        std_error=est.std_error,
        method=est.method,
    )


def _evaluators(spec, protocol, cfg):
    """(method, evaluator) pairs for one protocol in method order; only the
    alternating scheme has an analytic form."""
    out = []
    if "analytic" in spec.methods and protocol == "adb":
        out.append(("analytic", _analytic_evaluator(cfg)))
    if "monte-carlo" in spec.methods:
        out.append(("monte-carlo", _mc_evaluator(protocol, cfg, spec.sim)))
    return out


def run_ratio_sweep(spec: ExperimentSpec) -> SweepResult:
    """Throughput of every protocol along its budget curve over the ratio grid."""
    cfg = spec.channel
    snr = _snr_linear(spec.snr_db)
    rows, peaks = [], {}
    for protocol in PROTOCOLS:
        budget = PowerBudget(protocol, snr, cfg.L)
        evaluators = _evaluators(spec, protocol, cfg)
        for ratio in spec.grid:
            point = ratio_point(budget, ratio)
            for method, evaluate in evaluators:
                est = evaluate(point.ps, point.pr)
                if not math.isfinite(est.value):
                    log.warning(
                        "skipping %s %s row at ratio %g: non-finite value",
                        protocol, method, ratio,
                    )
                    continue
                rows.append(_row(protocol, cfg, spec.snr_db, point.ps, point.pr, est))
                key = f"{protocol}/{method}"
                if key not in peaks or est.value > peaks[key]["throughput"]:
                    peaks[key] = {"ratio": float(ratio), "throughput": est.value}
    return SweepResult(spec, rows, {"peaks": peaks})


def _cmax(spec, protocol, cfg, snr_db):
    """Optimal-split rows for one protocol at one SNR, method-ordered."""
    budget = PowerBudget(protocol, _snr_linear(snr_db), cfg.L)
    rows = []
    for method, evaluate in _evaluators(spec, protocol, cfg):
        point, est = maximize_throughput(budget, evaluate, spec.tolerance)
        rows.append(_row(protocol, cfg, snr_db, point.ps, point.pr, est))
    return rows


def run_snr_sweep(spec: ExperimentSpec) -> SweepResult:
    """Per-protocol maximum throughput across the SNR (dB) grid."""
    rows = []
    for protocol in PROTOCOLS:
        for snr_db in spec.grid:
            rows.extend(_cmax(spec, protocol, spec.channel, snr_db))
    return SweepResult(spec, rows)


def run_grouping_sweep(spec: ExperimentSpec) -> SweepResult:
    """Alternating-scheme maximum throughput for each group split M."""
    rows = []
    for m in spec.grid:
        cfg = replace(spec.channel, M=m)
        rows.extend(_cmax(spec, "adb", cfg, spec.snr_db))
    return SweepResult(spec, rows)


def run_antenna_sweep(spec: ExperimentSpec) -> SweepResult:
    """Per-protocol maximum throughput as antennas per relay grow."""
    rows = []
    for protocol in PROTOCOLS:
        for n_r in spec.grid:
            cfg = replace(spec.channel, N_R=n_r)
            rows.extend(_cmax(spec, protocol, cfg, spec.snr_db))
    return SweepResult(spec, rows)


def run_relay_sweep(spec: ExperimentSpec) -> SweepResult:
    """Alternating-scheme maximum throughput while splitting a fixed antenna
    budget across more relays (N_R = total/L, M = L/2)."""
    rows = []
    base = spec.channel
    for L in spec.grid:
        cfg = ChannelConfig(
            L=L,
            M=L // 2,
            N_R=spec.total_antennas // L,
            sigma_g2=base.sigma_g2,
            sigma_h2=base.sigma_h2,
            noise_r=base.noise_r,
            noise_d=base.noise_d,
        )
        rows.extend(_cmax(spec, "adb", cfg, spec.snr_db))
    return SweepResult(spec, rows)


def run_validate(spec: ExperimentSpec) -> SweepResult:
    """Closed-form terms against their Monte Carlo estimates over a grid of
    (group_size, shape, power) triples.

    Broadcast terms (c11/c21) are exact, so gaps should sit at Monte Carlo
    noise level; beamforming terms (c22/c12) carry the moment-matching
    approximation gap. Gaps land in the summary; the CSV holds the paired
    values, one term per protocol label."""
    base = spec.channel
    sigma_g2, sigma_h2 = base.sigma_g2, base.sigma_h2
    per_term: Dict[str, list] = {t: [] for t in ("c11", "c12", "c21", "c22")}
    gaps = []
    for g, s, p in spec.grid:
        cfg = ChannelConfig(
            L=2 * g, M=g, N_R=s,
            sigma_g2=sigma_g2, sigma_h2=sigma_h2,
            noise_r=base.noise_r, noise_d=base.noise_d,
        )
        mc = adb_component_estimates(cfg, spec.sim, p, p)
        exact = c11_closed(p / cfg.noise_r, g, s, sigma_g2)
        approx = c22_closed(p / cfg.noise_d, g, s, sigma_h2)
        closed = {"c11": exact, "c21": exact, "c22": approx, "c12": approx}
        snr_db = 10.0 * math.log10(p)
        for term in per_term:
            mean, se = mc[term]
            if "analytic" in spec.methods:
                est = ThroughputEstimate(closed[term], 0.0, "analytic", 0)
                per_term[term].append(_row(term, cfg, snr_db, p, p, est))
            if "monte-carlo" in spec.methods:
                est = ThroughputEstimate(mean, se, "monte-carlo", spec.sim.slots)
                per_term[term].append(_row(term, cfg, snr_db, p, p, est))
            gaps.append({
                "term": term,
                "group_size": g,
                "shape": s,
                "power": p,
                "analytic": closed[term],
                "monte_carlo": mean,
                "std_error": se,
                "rel_gap": (closed[term] - mean) / mean if mean else 0.0,
            })
    rows = [r for term in sorted(per_term) for r in per_term[term]]
    exact_gaps = [
        abs(e["analytic"] - e["monte_carlo"]) / e["std_error"]
        for e in gaps if e["term"] in ("c11", "c21") and e["std_error"]
    ]
    approx_gaps = [
        abs(e["rel_gap"]) for e in gaps if e["term"] in ("c22", "c12")
    ]
    summary = {
        "gaps": gaps,
        "max_exact_gap_se": max(exact_gaps, default=0.0),
        "max_approx_gap_rel": max(approx_gaps, default=0.0),
    }
    return SweepResult(spec, rows, summary)


_RUNNERS = {
    "ratio-sweep": run_ratio_sweep,
    "snr-sweep": run_snr_sweep,
    "grouping-sweep": run_grouping_sweep,
    "antenna-sweep": run_antenna_sweep,
    "relay-sweep": run_relay_sweep,
    "validate": run_validate,
}


def run_experiment(spec: ExperimentSpec) -> SweepResult:
    return _RUNNERS[spec.experiment](spec)


def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_csv(result: SweepResult, path: str):
    """Emit rows in the fixed schema; shortest round-trip float text, LF
    line endings, so identical results are identical bytes."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in result.rows:
            rec = asdict(row)
            fh.write(",".join(_format_cell(rec[c]) for c in CSV_COLUMNS) + "\n")


def parse_csv(path: str) -> List[SweepRow]:
    """Read back a sweep CSV into rows (exact round-trip of write_csv)."""
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ConfigError(f"unexpected CSV header in {path}")
        for rec in reader:
            rows.append(SweepRow(
                protocol=rec["protocol"],
                L=int(rec["L"]),
                M=int(rec["M"]),
                N_R=int(rec["N_R"]),
                snr_db=float(rec["snr_db"]),
                ps=float(rec["ps"]),
                pr=float(rec["pr"]),
                throughput=float(rec["throughput"]),
                std_error=float(rec["std_error"]),
                method=rec["method"],
            ))
    return rows


def _version_info() -> dict:
    try:
        from importlib.metadata import version
        pkg = version("relaylab")
    except Exception:
        pkg = "unknown"
    try:
        described = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=os.path.dirname(os.path.abspath(__file__)),
            capture_output=True, text=True, timeout=5,
        ).stdout.strip() or None
    except Exception:
        described = None
    return {"package": pkg, "git": described}


def _spec_as_dict(spec: ExperimentSpec) -> dict:
    return {
        "experiment": spec.experiment,
        "channel": asdict(spec.channel),
        "sim": asdict(spec.sim),
        "grid": [list(g) if isinstance(g, tuple) else g for g in spec.grid],
        "snr_db": spec.snr_db,
        "total_antennas": spec.total_antennas,
        "tolerance": spec.tolerance,
        "methods": list(spec.methods),
        "output_path": spec.output_path,
    }


def write_summary(result: SweepResult, path: str):
    """JSON sidecar with the resolved spec, version, and run summary."""
    payload = {
        "experiment": result.spec.experiment,
        "spec": _spec_as_dict(result.spec),
        "version": _version_info(),
        "row_count": len(result.rows),
        "summary": result.summary,
    }
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def emit(result: SweepResult, output_path: Optional[str] = None) -> Tuple[str, str]:
    """Write the CSV and its sidecar; returns both paths."""
    path = output_path or result.spec.output_path
    stem = os.path.splitext(path)[0]
    summary_path = stem + ".summary.json"
    write_csv(result, path)
    write_summary(result, summary_path)
    return path, summary_path
