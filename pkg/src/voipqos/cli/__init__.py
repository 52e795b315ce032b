"""Command-line interface.

Subcommands:
  analyze  capture file(s) -> per-session metric/fit reports
  fit      values file -> ranked distribution fits
  synth    scenario JSON -> synthetic capture (closes the test loop)
  report   session reports -> one cross-scenario comparison document

Exit codes: 0 success, 1 fatal error (diagnostic on stderr), 2 partial
success (the capture held records that could not be parsed).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from ..errors import NotConverged, VoipQosError
from ..evt import default_candidates, fit_gev_mle, select_model
from ..ingest.codecs import load_codec_map
from .analyze import AnalysisConfig, analyze_capture
from .report import merge_reports
from .synth import load_scenario, synth_to_file

__all__ = [
    "AnalysisConfig",
    "analyze_capture",
    "build_parser",
    "entrypoint",
    "load_scenario",
    "merge_reports",
    "synth_to_file",
]


def _parse_candidates(text: str | None) -> tuple | None:
    if text is None:
        return None
    names = tuple(part.strip() for part in text.split(",") if part.strip())
    if not names:
        raise VoipQosError("--candidates given but no family names found")
    known = {c.family for c in default_candidates()}
    unknown = set(names) - known
    if unknown:
        raise VoipQosError(
            f"unknown families {sorted(unknown)}; choose from {sorted(known)}"
        )
    return names


def _cmd_analyze(args) -> int:
    config = AnalysisConfig(
        inputs=tuple(args.input),
        fmt=args.format,
        out_dir=args.out,
        payload_type_map=load_codec_map(args.codecs_map),
        sigma_window=args.sigma_window,
        bandwidth_window=args.bw_window,
        scenario_tag=args.scenario,
        candidates=_parse_candidates(args.candidates),
        seed=args.seed,
    )
    reports, residue = analyze_capture(config)
    if not reports:
        print("warning: no call sessions found in the input", file=sys.stderr)
    print(f"wrote {len(reports)} session report(s) under {args.out}")
    for report in reports:
        meta = report["session"]
        print(f"  {meta['directory']}: codec={meta['codec']} "
              f"rtp={meta['rtp_fwd']}+{meta['rtp_rev']} xr={meta['xr_blocks']}")
    if residue:
        print(
            f"warning: {residue} record(s) were not parseable as RTP/RTCP/SIP",
            file=sys.stderr,
        )
        return 2
    return 0


def _read_values(path: str) -> list:
    values = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        text = line.strip()
        if not text:
            continue
        try:
            values.append(float(text))
        except ValueError:
            raise VoipQosError(
                f"{path}:{lineno}: not a number: {text!r}"
            ) from None
    return values


def _cmd_fit(args) -> int:
    values = _read_values(args.input)
    names = _parse_candidates(args.candidates)
    chosen = None
    if names is not None:
        by_name = {c.family: c for c in default_candidates()}
        chosen = [by_name[n] for n in names]
    ranking = select_model(values, chosen)
    gev_detail = None
    try:
        gev_detail = fit_gev_mle(values).to_json_dict()
    except NotConverged as exc:
        gev_detail = exc.fit.to_json_dict()
    except (VoipQosError, ValueError) as exc:
        gev_detail = {"skipped": f"fit failed: {exc}"}
    out = {
        "target": args.target,
        "n": len(values),
        "ranking": [f.to_json_dict() for f in ranking],
        "gev": gev_detail,
    }
    text = json.dumps(out, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote fit report to {args.out}")
    else:
        print(text, end="")
    return 0


def _cmd_synth(args) -> int:
    spec = load_scenario(args.scenario)
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    fmt = args.format
    if fmt == "auto":
        fmt = "jsonl" if Path(args.out).suffix.lower() in (".jsonl", ".json") \
            else "pcap"
    count = synth_to_file(spec, args.out, fmt)
    print(f"wrote {count} records to {args.out} ({fmt})")
    return 0


def _cmd_report(args) -> int:
    merged = merge_reports(args.input)
    text = json.dumps(merged, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote merged report to {args.out}")
    else:
        print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="voipqos",
        description="Offline VoIP call quality analysis and modelling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="decode captures and report per call")
    pa.add_argument("--input", nargs="+", required=True,
                    help="capture file(s), pcap or jsonl")
    pa.add_argument("--format", choices=["auto", "pcap", "jsonl"],
                    default="auto", help="capture format (default: by extension)")
    pa.add_argument("--out", default="voipqos-out",
                    help="output directory (default: voipqos-out)")
    pa.add_argument("--sigma-window", type=float, default=1.0,
                    help="moving-deviation window, seconds (default 1.0)")
    pa.add_argument("--bw-window", type=float, default=1.0,
                    help="bandwidth moving-average window, seconds (default 1.0)")
    pa.add_argument("--seed", type=int, default=0,
                    help="deterministic seed recorded in the run (default 0)")
    pa.add_argument("--codecs-map", default=None,
                    help="JSON file mapping payload types to codec names")
    pa.add_argument("--candidates", default=None,
                    help="comma-separated families to rank alongside each fit")
    pa.add_argument("--scenario", default="",
                    help="scenario tag stored with every session")
    pa.set_defaults(func=_cmd_analyze)

    pf = sub.add_parser("fit", help="fit distributions to a values file")
    pf.add_argument("--input", required=True,
                    help="text file, one numeric value per line")
    pf.add_argument("--target", choices=["jitter", "rtt"], default="jitter",
                    help="what the values measure (labels the report)")
    pf.add_argument("--candidates", default=None,
                    help="comma-separated candidate families (default: all)")
    pf.add_argument("--out", default=None,
                    help="output JSON path (default: stdout)")
    pf.set_defaults(func=_cmd_fit)

    ps = sub.add_parser("synth", help="generate a synthetic call capture")
    ps.add_argument("--scenario", required=True, help="scenario JSON file")
    ps.add_argument("--out", required=True, help="capture path to write")
    ps.add_argument("--format", choices=["auto", "pcap", "jsonl"],
                    default="auto", help="output format (default: by extension)")
    ps.add_argument("--seed", type=int, default=None,
                    help="override the scenario's seed")
    ps.set_defaults(func=_cmd_synth)

    pr = sub.add_parser("report", help="merge session reports for comparison")
    pr.add_argument("--input", nargs="+", required=True,
                    help="report.json files or directories holding them")
    pr.add_argument("--out", default=None,
                    help="output JSON path (default: stdout)")
    pr.set_defaults(func=_cmd_report)

    return parser


def entrypoint(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (VoipQosError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(entrypoint())
