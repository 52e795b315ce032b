"""Capture-to-report pipeline behind the ``analyze`` subcommand.

Report building is pure: ``build_session_report`` returns the report
dict plus every export file as text, and ``analyze_capture`` only then
touches the filesystem. Everything is deterministic for fixed inputs,
so two runs produce byte-identical output trees.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import (
    DomainError,
    NotConverged,
    TooFewPoints,
    VoipQosError,
    ZeroVariance,
)
from ..evt import default_candidates, fit_gev_mle, select_model
from ..ingest.capture import parse_jsonl, parse_pcap
from ..ingest.codecs import load_codec_map
from ..ingest.sessions import AssemblyConfig, CallSession, assemble_sessions
from ..metrics import (
    DEFAULT_OVERHEAD_BYTES,
    MetricSeries,
    bandwidth_series,
    jitter_series,
    loss_summary,
    moving_std,
    rtt_series,
    sip_delays,
    xr_metric_series,
)
from ..stats import bivariate_hist, empirical_cdf, pca

#: Fits require this many values; mirrors the fitting module's floor.
MIN_FIT_POINTS = 20


@dataclass(frozen=True)
class AnalysisConfig:
    inputs: tuple
    fmt: str = "auto"  # pcap | jsonl | auto (by file extension)
    out_dir: str = "voipqos-out"
    payload_type_map: dict = field(default_factory=load_codec_map)
    sigma_window: float = 1.0
    bandwidth_window: float = 1.0
    overhead_bytes: int = DEFAULT_OVERHEAD_BYTES
    scenario_tag: str = ""
    fit_targets: tuple = ("jitter", "rtt")
    candidates: tuple | None = None  # family names; None fits GEV only
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.inputs:
            raise DomainError("at least one input capture is required")
        if self.fmt not in ("auto", "pcap", "jsonl"):
            raise DomainError(f"format must be pcap or jsonl, got {self.fmt!r}")
        if not self.sigma_window > 0 or not self.bandwidth_window > 0:
            raise DomainError("windows must be positive")
        if self.overhead_bytes < 0:
            raise DomainError("overhead_bytes must be >= 0")
        bad = set(self.fit_targets) - {"jitter", "rtt"}
        if bad:
            raise DomainError(f"unknown fit targets: {sorted(bad)}")


def read_records(path: str | Path, fmt: str = "auto"):
    """Load packet records from one capture file."""
    p = Path(path)
    if fmt == "auto":
        suffix = p.suffix.lower()
        if suffix in (".pcap", ".cap"):
            fmt = "pcap"
        elif suffix in (".jsonl", ".json"):
            fmt = "jsonl"
        else:
            raise DomainError(
                f"cannot infer format of {p.name!r}; pass --format pcap|jsonl"
            )
    if fmt == "pcap":
        return parse_pcap(p.read_bytes())
    return parse_jsonl(p.read_text())


def _series_summary(series: MetricSeries) -> dict:
    v = series.values()
    return {
        "unit": series.unit,
        "count": int(len(v)),
        "mean": float(np.mean(v)),
        "std": float(np.std(v, ddof=1)) if len(v) >= 2 else 0.0,
        "min": float(np.min(v)),
        "max": float(np.max(v)),
        "csv": f"{series.name}.csv",
    }


def _fit_entry(values: np.ndarray, ranked_families: tuple | None) -> dict:
    if len(values) < MIN_FIT_POINTS:
        return {"skipped": f"need >= {MIN_FIT_POINTS} values, have {len(values)}"}
    try:
        fit = fit_gev_mle(values)
    except NotConverged as exc:
        fit = exc.fit  # best iterate, reported with converged=false
    except (VoipQosError, ValueError) as exc:
        return {"skipped": f"fit failed: {exc}"}
    entry = fit.to_json_dict()
    if ranked_families is not None:
        by_name = {c.family: c for c in default_candidates()}
        try:
            chosen = [by_name[name] for name in ranked_families]
        except KeyError as exc:
            raise DomainError(f"unknown candidate family {exc.args[0]!r}") from exc
        ranking = select_model(values, chosen)
        entry["ranking"] = [f.to_json_dict() for f in ranking]
    return entry


def _session_span(session: CallSession) -> tuple[float, float]:
    times = [p.capture_ts for p in session.rtp_fwd]
    times += [p.capture_ts for p in session.rtp_rev]
    times += [b.report_ts for b in session.xr_blocks]
    times += [m.capture_ts for m in session.sip_dialog]
    return (min(times), max(times)) if times else (0.0, 0.0)


def build_session_report(
    session: CallSession, config: AnalysisConfig
) -> tuple[dict, dict]:
    """Compute every metric and export for one session.

    Returns (report dict, {relative filename: file text}); the report's
    export references are exactly the returned filenames.
    """
    files: dict[str, str] = {}
    metrics: dict[str, dict] = {}
    series_by_name: dict[str, MetricSeries] = {}

    # media metrics run on the forward (caller -> callee) stream; when a
    # capture only saw the reverse leg, that is the stream we have
    stream = session.rtp_fwd if len(session.rtp_fwd) >= 2 else session.rtp_rev

    jitter = None
    if len(stream) >= 2 and session.clock_rate:
        jitter = jitter_series(stream, clock_rate=session.clock_rate)
        sigma_j = moving_std(jitter, window=config.sigma_window)
        series_by_name["jitter"] = jitter
        series_by_name["sigma_j"] = sigma_j
    if stream:
        series_by_name["bandwidth"] = bandwidth_series(
            stream,
            window=config.bandwidth_window,
            overhead_bytes=config.overhead_bytes,
        )
    rtt = rtt_series(session.xr_blocks)
    if len(rtt):
        series_by_name["rtt"] = rtt
    for which in ("r_factor", "signal_level"):
        xr_series = xr_metric_series(session.xr_blocks, which)
        if len(xr_series):
            series_by_name[which] = xr_series
    if "signal_level" in series_by_name:
        series_by_name["sigma_sl"] = moving_std(
            series_by_name["signal_level"], window=config.sigma_window
        )

    for name, series in series_by_name.items():
        if len(series) == 0:
            continue
        metrics[name] = _series_summary(series)
        files[f"{name}.csv"] = series.to_csv()

    exports: dict = {
        "series_csv": {n: f"{n}.csv" for n in sorted(metrics)},
        "bandwidth_sigma_hist": None,
        "cdf": {},
        "pca": None,
    }

    if jitter is not None and "bandwidth" in series_by_name:
        bw = series_by_name["bandwidth"]
        bw_at_jitter = np.interp(jitter.times(), bw.times(), bw.values())
        hist = bivariate_hist(
            bw_at_jitter,
            series_by_name["sigma_j"].values(),
            x_label="bandwidth (kbps)",
            y_label="sigma_j (ms)",
        )
        files["bandwidth_sigma_hist.json"] = (
            json.dumps(hist.to_json_dict(), sort_keys=True, indent=2) + "\n"
        )
        files["bandwidth_sigma_hist.csv"] = hist.to_csv()
        exports["bandwidth_sigma_hist"] = {
            "json": "bandwidth_sigma_hist.json",
            "csv": "bandwidth_sigma_hist.csv",
        }

    for name in ("sigma_j", "rtt"):
        series = series_by_name.get(name)
        if series is not None and len(series):
            cdf = empirical_cdf(series.values())
            fname = f"{name}_cdf.json"
            files[fname] = (
                json.dumps(cdf.to_json_dict(), sort_keys=True, indent=2) + "\n"
            )
            exports["cdf"][name] = fname

    if jitter is not None and len(jitter) >= 2:
        columns = [
            ("jitter", jitter.values()),
            ("sigma_j", series_by_name["sigma_j"].values()),
        ]
        bw = series_by_name["bandwidth"]
        columns.append(
            ("bandwidth", np.interp(jitter.times(), bw.times(), bw.values()))
        )
        if "rtt" in series_by_name and len(series_by_name["rtt"]) >= 2:
            r = series_by_name["rtt"]
            columns.append(
                ("rtt", np.interp(jitter.times(), r.times(), r.values()))
            )
        matrix = np.column_stack([c[1] for c in columns])
        try:
            result = pca(
                matrix,
                k=matrix.shape[1],
                standardize=True,
                variables=tuple(c[0] for c in columns),
            )
            files["pca.json"] = (
                json.dumps(result.to_json_dict(), sort_keys=True, indent=2) + "\n"
            )
            exports["pca"] = "pca.json"
        except (ZeroVariance, TooFewPoints):
            pass  # constant metric or too little data: no projection

    loss = None
    if stream:
        summary = loss_summary(stream)
        loss = {
            "expected": summary.expected,
            "received": summary.received,
            "loss_pct": summary.loss_pct,
        }

    delays = None
    if session.sip_dialog:
        d = sip_delays(session.sip_dialog)
        delays = {"csd": d.csd, "sdd": d.sdd}

    fits = {}
    for target in config.fit_targets:
        source = series_by_name.get(target)
        values = source.values() if source is not None else np.empty(0)
        fits[target] = _fit_entry(values, config.candidates)

    start, end = _session_span(session)
    report = {
        "session": {
            "id": session.session_id,
            "codec": session.codec,
            "clock_rate": session.clock_rate,
            "scenario": session.scenario_tag,
            "rtp_fwd": len(session.rtp_fwd),
            "rtp_rev": len(session.rtp_rev),
            "xr_blocks": len(session.xr_blocks),
            "sip_messages": len(session.sip_dialog),
            "start": start,
            "end": end,
            "duration": end - start,
        },
        "metrics": metrics,
        "loss": loss,
        "sip_delays": delays,
        "fits": fits,
        "exports": exports,
    }
    return report, files


def _safe_dir_name(session_id: str, taken: set) -> str:
    base = re.sub(r"[^-._a-zA-Z0-9]", "_", session_id) or "session"
    name = base
    counter = 2
    while name in taken:
        name = f"{base}.{counter}"
        counter += 1
    taken.add(name)
    return name


def analyze_capture(config: AnalysisConfig) -> tuple[list, int]:
    """Run the full pipeline; returns (reports, unparsed record count)."""
    records = []
    for path in config.inputs:
        records.extend(read_records(path, config.fmt))
    result = assemble_sessions(
        records,
        AssemblyConfig(
            payload_type_map=config.payload_type_map,
            scenario_tag=config.scenario_tag,
        ),
    )
    out_root = Path(config.out_dir)
    out_root.mkdir(parents=True, exist_ok=True)
    reports = []
    taken: set = set()
    for session in result.sessions:
        report, files = build_session_report(session, config)
        dir_name = _safe_dir_name(report["session"]["id"], taken)
        report["session"]["directory"] = dir_name
        session_dir = out_root / dir_name
        session_dir.mkdir(parents=True, exist_ok=True)
        for name, content in files.items():
            (session_dir / name).write_text(content)
        (session_dir / "report.json").write_text(
            json.dumps(report, sort_keys=True, indent=2) + "\n"
        )
        reports.append(report)
    return reports, len(result.residue)
