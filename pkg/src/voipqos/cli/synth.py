"""Synthetic call generator: closes the generate -> analyze -> fit loop.

A scenario JSON file declares one call:

    {
      "codec": "G711-A",            // catalogue name
      "duration": 60.0,             // seconds of media
      "interval": 0.02,             // packetization interval, seconds
      "loss_probability": 0.01,     // per-packet Bernoulli drop
      "seed": 0,                    // drives every random stream
      "jitter_model": {"xi": -0.32, "sigma": 2.46, "mu": 6.85},  // ms, or null
      "rtt_model":    {"xi": 0.21,  "sigma": 12.07, "mu": 123.9},// ms, or null
      "xr_interval": 5.0,           // seconds between XR reports
      "base_delay": 0.05,           // constant one-way transit, seconds
      "payload_type": 8,            // optional; static codecs have defaults
      "scenario_tag": "mobile",     // free-form label
      "call_id": "synth-1",
      "sip": {"invite": 1.0, "ringing": 2.392, "answer": 3.0,
              "bye": 64.0, "bye_ok": 64.1981}   // optional, absolute seconds
    }

Jitter is injected as GEV-distributed one-way transit perturbations, so
the receiver-side J_n series is a difference process whose distribution
is NOT the injected model; round-trip delay is carried verbatim in XR
blocks (quantized to the wire's integer milliseconds) and is directly
recoverable. Identical scenario + seed yields identical bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import BadSpec, DomainError
from ..evt import GevParams, gev_sample
from ..ingest.capture import PacketRecord, write_jsonl, write_pcap
from ..ingest.codecs import CODECS, STATIC_PAYLOAD_TYPES
from ..ingest.rtcp_xr import VoipMetricsBlock, encode_xr_packet
from ..ingest.rtp import encode_rtp
from ..ingest.sip import format_sip_request, format_sip_response

CALLER_ADDR = "10.0.0.1"
CALLEE_ADDR = "10.0.0.2"
CALLER_MEDIA_PORT = 40000
CALLEE_MEDIA_PORT = 42000
SIP_PORT = 5060
FWD_SSRC = 0xA0000001
XR_SENDER_SSRC = 0xB0000001


@dataclass(frozen=True)
class SipTimes:
    invite: float
    ringing: float
    answer: float
    bye: float
    bye_ok: float

    def __post_init__(self) -> None:
        order = (self.invite, self.ringing, self.answer, self.bye, self.bye_ok)
        if any(not math.isfinite(t) or t < 0 for t in order):
            raise BadSpec("SIP event times must be finite and >= 0")
        if sorted(order) != list(order):
            raise BadSpec("SIP event times must be non-decreasing")


@dataclass(frozen=True)
class ScenarioSpec:
    codec: str
    duration: float
    interval: float
    seed: int = 0
    loss_probability: float = 0.0
    jitter_model: GevParams | None = None
    rtt_model: GevParams | None = None
    xr_interval: float = 5.0
    base_delay: float = 0.05
    payload_type: int | None = None
    payload_bytes: int | None = None
    scenario_tag: str = ""
    call_id: str = "synth-1"
    sip: SipTimes | None = None

    def __post_init__(self) -> None:
        if self.codec not in CODECS:
            raise BadSpec(
                f"unknown codec {self.codec!r}; catalogue: {sorted(CODECS)}"
            )
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise BadSpec("duration must be > 0 seconds")
        if not (math.isfinite(self.interval) and self.interval > 0):
            raise BadSpec("packetization interval must be > 0 seconds")
        if not 0.0 <= self.loss_probability < 1.0:
            raise BadSpec("loss_probability must be in [0, 1)")
        if not (math.isfinite(self.xr_interval) and self.xr_interval > 0):
            raise BadSpec("xr_interval must be > 0 seconds")
        if not (math.isfinite(self.base_delay) and self.base_delay >= 0):
            raise BadSpec("base_delay must be >= 0 seconds")

    def resolved_payload_type(self) -> int:
        if self.payload_type is not None:
            if not 0 <= self.payload_type <= 127:
                raise BadSpec(f"payload_type {self.payload_type} outside 0..127")
            return self.payload_type
        static = {name: pt for pt, name in STATIC_PAYLOAD_TYPES.items()}
        if self.codec in static:
            return static[self.codec]
        raise BadSpec(
            f"codec {self.codec!r} has no static payload type; "
            "set \"payload_type\" in the scenario"
        )

    def samples_per_packet(self) -> int:
        clock = CODECS[self.codec].clock_rate
        exact = self.interval * clock
        if abs(exact - round(exact)) > 1e-9 or round(exact) < 1:
            raise BadSpec(
                f"interval {self.interval}s is not a whole number of "
                f"{clock} Hz clock ticks"
            )
        return int(round(exact))

    def resolved_payload_bytes(self) -> int:
        if self.payload_bytes is not None:
            if self.payload_bytes < 0:
                raise BadSpec("payload_bytes must be >= 0")
            return self.payload_bytes
        rate = CODECS[self.codec].bitrate_kbps
        if rate is None:
            raise BadSpec(
                f"codec {self.codec!r} is variable-bitrate; "
                "set \"payload_bytes\" in the scenario"
            )
        exact = rate * 1000.0 / 8.0 * self.interval
        return max(1, int(round(exact)))

    def sip_times(self) -> SipTimes:
        if self.sip is not None:
            return self.sip
        answer = 3.0
        bye = answer + self.duration + 1.0
        return SipTimes(
            invite=1.0, ringing=2.392, answer=answer, bye=bye,
            bye_ok=bye + 0.1981,
        )


def _gev_from_json(obj, what: str) -> GevParams | None:
    if obj is None:
        return None
    if not isinstance(obj, dict) or set(obj) != {"xi", "sigma", "mu"}:
        raise BadSpec(f"{what} must be an object with keys xi, sigma, mu")
    try:
        return GevParams(
            xi=float(obj["xi"]), sigma=float(obj["sigma"]), mu=float(obj["mu"])
        )
    except (TypeError, ValueError, DomainError) as exc:
        raise BadSpec(f"bad {what}: {exc}") from exc


def load_scenario(source: str | Path | dict) -> ScenarioSpec:
    """Parse and validate a scenario file (or pre-parsed dict)."""
    if isinstance(source, (str, Path)):
        try:
            raw = json.loads(Path(source).read_text())
        except OSError as exc:
            raise BadSpec(f"cannot read scenario file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise BadSpec(f"scenario is not valid JSON: {exc}") from exc
    else:
        raw = source
    if not isinstance(raw, dict):
        raise BadSpec("scenario must be a JSON object")
    known = {
        "codec", "duration", "interval", "seed", "loss_probability",
        "jitter_model", "rtt_model", "xr_interval", "base_delay",
        "payload_type", "payload_bytes", "scenario_tag", "call_id", "sip",
    }
    unknown = set(raw) - known
    if unknown:
        raise BadSpec(f"unknown scenario keys: {sorted(unknown)}")
    for key in ("codec", "duration", "interval"):
        if key not in raw:
            raise BadSpec(f"scenario is missing required key {key!r}")
    sip = None
    if raw.get("sip") is not None:
        s = raw["sip"]
        if not isinstance(s, dict):
            raise BadSpec("sip must be an object of event times")
        need = {"invite", "ringing", "answer", "bye", "bye_ok"}
        if set(s) != need:
            raise BadSpec(f"sip must have exactly the keys {sorted(need)}")
        sip = SipTimes(**{k: float(v) for k, v in s.items()})
    try:
        return ScenarioSpec(
            codec=str(raw["codec"]),
            duration=float(raw["duration"]),
            interval=float(raw["interval"]),
            seed=int(raw.get("seed", 0)),
            loss_probability=float(raw.get("loss_probability", 0.0)),
            jitter_model=_gev_from_json(raw.get("jitter_model"), "jitter_model"),
            rtt_model=_gev_from_json(raw.get("rtt_model"), "rtt_model"),
            xr_interval=float(raw.get("xr_interval", 5.0)),
            base_delay=float(raw.get("base_delay", 0.05)),
            payload_type=(
                None if raw.get("payload_type") is None
                else int(raw["payload_type"])
            ),
            payload_bytes=(
                None if raw.get("payload_bytes") is None
                else int(raw["payload_bytes"])
            ),
            scenario_tag=str(raw.get("scenario_tag", "")),
            call_id=str(raw.get("call_id", "synth-1")),
            sip=sip,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, BadSpec):
            raise
        raise BadSpec(f"bad scenario value: {exc}") from exc


def _sip_record(ts: float, payload: bytes, from_caller: bool) -> PacketRecord:
    src, dst = (
        (CALLER_ADDR, CALLEE_ADDR) if from_caller else (CALLEE_ADDR, CALLER_ADDR)
    )
    return PacketRecord(
        ts=ts, src_addr=src, dst_addr=dst, src_port=SIP_PORT, dst_port=SIP_PORT,
        transport="udp", payload=payload,
    )


def generate_records(spec: ScenarioSpec) -> list[PacketRecord]:
    """Render one scripted call as time-ordered packet records."""
    times = spec.sip_times()
    cid = spec.call_id
    records = [
        _sip_record(
            times.invite,
            format_sip_request(
                "INVITE", "sip:b@remote", cid, 1, media_port=CALLER_MEDIA_PORT
            ),
            from_caller=True,
        ),
        _sip_record(
            times.ringing,
            format_sip_response(180, "Ringing", cid, 1, "INVITE"),
            from_caller=False,
        ),
        _sip_record(
            times.answer,
            format_sip_response(
                200, "OK", cid, 1, "INVITE", media_port=CALLEE_MEDIA_PORT
            ),
            from_caller=False,
        ),
        _sip_record(
            times.bye,
            format_sip_request("BYE", "sip:b@remote", cid, 2),
            from_caller=True,
        ),
        _sip_record(
            times.bye_ok,
            format_sip_response(200, "OK", cid, 2, "BYE"),
            from_caller=False,
        ),
    ]

    pt = spec.resolved_payload_type()
    samples = spec.samples_per_packet()
    payload = bytes(spec.resolved_payload_bytes())
    n = int(round(spec.duration / spec.interval))
    jitter_ms = (
        gev_sample(spec.jitter_model, n, seed=spec.seed + 1)
        if spec.jitter_model is not None
        else np.zeros(n)
    )
    drop = np.random.default_rng(spec.seed + 2).random(n)
    for k in range(n):
        if drop[k] < spec.loss_probability:
            continue  # the sequence number still advances: a real loss
        send = times.answer + k * spec.interval
        arrival = send + spec.base_delay + jitter_ms[k] / 1000.0
        records.append(
            PacketRecord(
                ts=arrival,
                src_addr=CALLER_ADDR,
                dst_addr=CALLEE_ADDR,
                src_port=CALLER_MEDIA_PORT,
                dst_port=CALLEE_MEDIA_PORT,
                transport="udp",
                payload=encode_rtp(
                    payload_type=pt,
                    seq=k % 65536,
                    rtp_ts=(k * samples) % 2**32,
                    ssrc=FWD_SSRC,
                    media=payload,
                ),
            )
        )

    if spec.rtt_model is not None:
        n_xr = int(spec.duration / spec.xr_interval)
        rtt_ms = gev_sample(spec.rtt_model, n_xr, seed=spec.seed + 3)
        for j in range(n_xr):
            ts = times.answer + (j + 1) * spec.xr_interval
            delay = int(np.clip(np.round(rtt_ms[j]), 0, 0xFFFF))
            block = VoipMetricsBlock(
                source_ssrc=FWD_SSRC,
                round_trip_delay=delay,
                r_factor=93,
                signal_level=-12,
            )
            records.append(
                PacketRecord(
                    ts=ts,
                    src_addr=CALLEE_ADDR,
                    dst_addr=CALLER_ADDR,
                    src_port=CALLEE_MEDIA_PORT + 1,
                    dst_port=CALLER_MEDIA_PORT + 1,
                    transport="udp",
                    payload=encode_xr_packet(XR_SENDER_SSRC, [block]),
                )
            )

    records.sort(key=lambda r: r.ts)
    return records


def synth_to_file(spec: ScenarioSpec, out_path: str | Path, fmt: str) -> int:
    """Generate and write the capture; returns the record count."""
    if fmt not in ("pcap", "jsonl"):
        raise BadSpec(f"unknown capture format {fmt!r}; use pcap or jsonl")
    records = generate_records(spec)
    data = write_pcap(records) if fmt == "pcap" else write_jsonl(records)
    if isinstance(data, str):
        Path(out_path).write_text(data)
    else:
        Path(out_path).write_bytes(data)
    return len(records)
