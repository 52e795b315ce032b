"""Per-call quality metrics over decoded sessions.

Each metric comes back as a MetricSeries (unit-tagged time series) or a
small summary dataclass. Jitter follows the absolute-difference form

    J_n = |(t_r(n) - t_t(n)) - (t_r(n-1) - t_t(n-1))|

with the send time t_t reconstructed from the RTP timestamp at the codec
clock rate; the unknown constant clock offset between endpoints cancels
in the difference, so no synchronization is needed. No exponential
smoothing is applied by default - the optional ``rfc3550`` flag of
jitter_series enables the classic 1/16 estimator for cross-checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EmptyData, TooFewPackets
from .ingest.rtcp_xr import UNAVAILABLE, VoipMetricsBlock
from .ingest.rtp import RtpPacket
from .ingest.sip import SipMessage

#: Fixed unit per metric name; MetricSeries construction enforces it.
UNIT_BY_NAME = {
    "jitter": "ms",
    "sigma_j": "ms",
    "bandwidth": "kbps",
    "rtt": "ms",
    "r_factor": "score",
    "signal_level": "dBm",
    "sigma_sl": "dBm",
}

#: moving_std output name per input name.
_SIGMA_NAME = {"jitter": "sigma_j", "signal_level": "sigma_sl"}

#: Default per-packet transport overhead: IPv4 (20) + UDP (8) bytes.
DEFAULT_OVERHEAD_BYTES = 28


@dataclass(frozen=True)
class MetricSeries:
    """Named, unit-tagged sequence of (time, value) samples."""

    name: str
    unit: str
    samples: tuple

    def __post_init__(self) -> None:
        if self.name not in UNIT_BY_NAME:
            raise DomainError(f"unknown metric name {self.name!r}")
        if self.unit != UNIT_BY_NAME[self.name]:
            raise DomainError(
                f"metric {self.name!r} must carry unit "
                f"{UNIT_BY_NAME[self.name]!r}, got {self.unit!r}"
            )
        object.__setattr__(self, "samples", tuple(tuple(s) for s in self.samples))
        prev = -math.inf
        for t, v in self.samples:
            if not (math.isfinite(t) and math.isfinite(v)):
                raise DomainError("sample times and values must be finite")
            if t <= prev:
                raise DomainError("sample times must be strictly increasing")
            prev = t

    @classmethod
    def create(cls, name: str, samples) -> "MetricSeries":
        return cls(name=name, unit=UNIT_BY_NAME.get(name, ""), samples=tuple(samples))

    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.samples], dtype=float)

    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.samples], dtype=float)

    def __len__(self) -> int:
        return len(self.samples)

    def to_csv(self) -> str:
        lines = ["t,value,unit"]
        for t, v in self.samples:
            lines.append(f"{t!r},{v!r},{self.unit}")
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "unit": self.unit,
            "samples": [[t, v] for t, v in self.samples],
        }


@dataclass(frozen=True)
class LossSummary:
    expected: int
    received: int
    loss_pct: float


@dataclass(frozen=True)
class SipDelays:
    csd: float | None  # call setup delay, seconds
    sdd: float | None  # session disconnect delay, seconds


def unroll(values, modulus: int) -> list[int]:
    """Undo modular wrap-around by accumulating signed deltas."""
    it = iter(values)
    try:
        first = next(it)
    except StopIteration:
        return []
    half = modulus // 2
    out = [int(first)]
    for v in it:
        delta = ((int(v) - out[-1] + half) % modulus) - half
        out.append(out[-1] + delta)
    return out


def jitter_series(
    stream: list[RtpPacket], clock_rate: float, rfc3550: bool = False
) -> MetricSeries:
    """Per-packet jitter in ms; one sample per packet from the second on.

    With ``rfc3550`` set, applies the classic running estimator
    J <- J + (|D| - J)/16 instead of reporting |D| directly.
    """
    if not clock_rate > 0:
        raise DomainError(f"clock rate must be positive, got {clock_rate}")
    if len(stream) < 2:
        raise TooFewPackets(f"jitter needs >= 2 packets, got {len(stream)}")
    send_ts = np.array(unroll((p.rtp_ts for p in stream), 2**32), dtype=float)
    t_t = send_ts / float(clock_rate)
    t_r = np.array([p.capture_ts for p in stream], dtype=float)
    transit = t_r - t_t
    diffs = np.abs(np.diff(transit)) * 1000.0
    if rfc3550:
        j = 0.0
        smoothed = []
        for d in diffs:
            j += (d - j) / 16.0
            smoothed.append(j)
        diffs = smoothed
    return MetricSeries.create(
        "jitter", zip((p.capture_ts for p in stream[1:]), diffs)
    )


def moving_std(series: MetricSeries, window: float = 1.0) -> MetricSeries:
    """Sample standard deviation over the trailing window (t-window, t].

    Defined at every input sample time; windows holding fewer than two
    samples yield 0. Output is named sigma_j for jitter input and
    sigma_sl for signal_level input.
    """
    if not window > 0:
        raise DomainError(f"window must be positive, got {window}")
    out_name = _SIGMA_NAME.get(series.name)
    if out_name is None:
        raise DomainError(
            f"no moving-deviation metric defined for {series.name!r}"
        )
    t = series.times()
    v = series.values()
    out = []
    lo = 0
    for i in range(len(t)):
        while t[lo] <= t[i] - window:
            lo += 1
        sd = float(np.std(v[lo : i + 1], ddof=1)) if i - lo + 1 >= 2 else 0.0
        out.append((t[i], sd))
    return MetricSeries.create(out_name, out)


def bandwidth_series(
    stream: list[RtpPacket],
    window: float = 1.0,
    overhead_bytes: int = DEFAULT_OVERHEAD_BYTES,
) -> MetricSeries:
    """Moving-average consumed bandwidth in kbps at each packet time.

    Each packet contributes payload + RTP header + ``overhead_bytes``
    (defaults to IPv4+UDP) to the window sum.
    """
    if not window > 0:
        raise DomainError(f"window must be positive, got {window}")
    if overhead_bytes < 0:
        raise DomainError("overhead_bytes must be >= 0")
    if not stream:
        return MetricSeries.create("bandwidth", [])
    t = np.array([p.capture_ts for p in stream], dtype=float)
    size = np.array(
        [p.payload_len + p.header_len + overhead_bytes for p in stream], dtype=float
    )
    out = []
    lo = 0
    acc = 0.0
    for i in range(len(t)):
        acc += size[i]
        while t[lo] <= t[i] - window:
            acc -= size[lo]
            lo += 1
        out.append((t[i], acc * 8.0 / window / 1000.0))
    return MetricSeries.create("bandwidth", out)


def loss_summary(stream: list[RtpPacket]) -> LossSummary:
    """Packet loss from the unrolled sequence-number span."""
    if not stream:
        raise TooFewPackets("loss needs at least one packet")
    seqs = unroll((p.seq for p in stream), 2**16)
    expected = max(seqs) - min(seqs) + 1
    received = len(set(seqs))
    loss_pct = max(0.0, 100.0 * (expected - received) / expected)
    return LossSummary(expected=expected, received=received, loss_pct=loss_pct)


def rtt_series(xr: list[VoipMetricsBlock]) -> MetricSeries:
    """Round-trip delay over report times, ms.

    A round_trip_delay of 0 marks "not measured" and is skipped. Blocks
    sharing one report time (one compound reporting several streams)
    keep only the first; feed per-direction block lists to avoid that.
    """
    out = []
    seen = set()
    for b in sorted(xr, key=lambda b: b.report_ts):
        if b.round_trip_delay == 0 or b.report_ts in seen:
            continue
        seen.add(b.report_ts)
        out.append((b.report_ts, float(b.round_trip_delay)))
    return MetricSeries.create("rtt", out)


def r_factor(r0: float, is_: float, id_: float, ieff: float, a: float) -> float:
    """E-model rating R0 - Is - Id - Ieff + A, clamped to [0, 100]."""
    return float(min(100.0, max(0.0, r0 - is_ - id_ - ieff + a)))


def xr_metric_series(xr: list[VoipMetricsBlock], which: str) -> MetricSeries:
    """Project r_factor or signal_level over report times; 127 skipped."""
    if which not in ("r_factor", "signal_level"):
        raise DomainError(f"which must be r_factor or signal_level, got {which!r}")
    out = []
    seen = set()
    for b in sorted(xr, key=lambda b: b.report_ts):
        value = getattr(b, which)
        if value == UNAVAILABLE or b.report_ts in seen:
            continue
        seen.add(b.report_ts)
        out.append((b.report_ts, float(value)))
    return MetricSeries.create(which, out)


def sip_delays(dialog: list[SipMessage]) -> SipDelays:
    """Call setup delay (INVITE to 180) and disconnect delay (BYE to 200).

    Responses match on the CSeq number and method of their request;
    unrelated messages in between are ignored. A missing endpoint leaves
    that delay absent.
    """
    invite = next(
        (
            m
            for m in dialog
            if m.kind == "request" and m.method_or_status == "INVITE"
        ),
        None,
    )
    bye = next(
        (m for m in dialog if m.kind == "request" and m.method_or_status == "BYE"),
        None,
    )

    def first_response(code: int, request: SipMessage | None) -> SipMessage | None:
        if request is None:
            return None
        for m in dialog:
            if (
                m.kind == "response"
                and m.method_or_status == code
                and m.cseq == request.cseq
                and m.cseq_method == request.method_or_status
                and m.capture_ts >= request.capture_ts
            ):
                return m
        return None

    ringing = first_response(180, invite)
    bye_ok = first_response(200, bye)
    return SipDelays(
        csd=ringing.capture_ts - invite.capture_ts if ringing else None,
        sdd=bye_ok.capture_ts - bye.capture_ts if bye_ok else None,
    )
