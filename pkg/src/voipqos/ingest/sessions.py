"""Assemble packet records into bidirectional call sessions.

Classification is structural: payloads whose first byte carries protocol
version 2 are RTP or RTCP (told apart by the RTCP packet-type range in
the second byte), anything else is offered to the SIP parser. RTP
streams are grouped by (ssrc, 5-tuple), SIP messages by Call-ID, and
streams are bound to the dialog whose SDP audio ports they use. Nothing
is dropped silently: unclassifiable or unbindable packets come back in
the residue list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from ..errors import (
    BadVersion,
    DomainError,
    MissingHeader,
    NotSip,
    TooShort,
    Truncated,
)
from .capture import PacketRecord
from .codecs import CODECS, load_codec_map
from .rtcp_xr import VoipMetricsBlock, parse_rtcp_xr
from .rtp import RtpPacket, parse_rtp
from .sip import SipMessage, parse_sip


@dataclass(frozen=True)
class AssemblyConfig:
    payload_type_map: dict[int, str] = field(default_factory=load_codec_map)
    scenario_tag: str = ""


@dataclass
class CallSession:
    session_id: str
    codec: str | None
    clock_rate: int | None
    rtp_fwd: list[RtpPacket]
    rtp_rev: list[RtpPacket]
    xr_blocks: list[VoipMetricsBlock]
    sip_dialog: list[SipMessage]
    scenario_tag: str = ""

    @property
    def rtp_count(self) -> int:
        return len(self.rtp_fwd) + len(self.rtp_rev)


class AssemblyResult(NamedTuple):
    sessions: list[CallSession]
    residue: list[PacketRecord]


class _Stream(NamedTuple):
    key: tuple
    packets: list[RtpPacket]
    record: PacketRecord  # representative packet for endpoint info


def _classify(rec: PacketRecord):
    """Return ("rtp", RtpPacket) | ("xr", blocks) | ("sip", msg) | None."""
    p = rec.payload
    if len(p) >= 2 and p[0] >> 6 == 2:
        if 200 <= p[1] <= 207:
            try:
                return "xr", parse_rtcp_xr(p, rec.ts)
            except (Truncated, BadVersion, DomainError):
                return None
        try:
            return "rtp", parse_rtp(p, rec.ts)
        except (TooShort, BadVersion, DomainError):
            return None
    try:
        return "sip", parse_sip(p, rec.ts)
    except (NotSip, MissingHeader):
        return None


def _dialog_ports(dialog: list[SipMessage]) -> dict[str, int | None]:
    """Caller media port (first INVITE SDP) and callee port (its 200)."""
    caller = callee = None
    invite_cseq = None
    for msg in dialog:
        if msg.kind == "request" and msg.method_or_status == "INVITE":
            if caller is None and msg.media_port is not None:
                caller = msg.media_port
            if invite_cseq is None:
                invite_cseq = msg.cseq
        elif (
            msg.kind == "response"
            and msg.method_or_status == 200
            and msg.cseq_method == "INVITE"
            and (invite_cseq is None or msg.cseq == invite_cseq)
            and callee is None
            and msg.media_port is not None
        ):
            callee = msg.media_port
    return {"caller": caller, "callee": callee}


def assemble_sessions(
    records: list[PacketRecord], config: AssemblyConfig | None = None
) -> AssemblyResult:
    """Group records into call sessions; see the module docstring."""
    cfg = config or AssemblyConfig()

    dialogs: dict[str, list[SipMessage]] = {}
    streams: dict[tuple, _Stream] = {}
    xr_records: list[tuple[PacketRecord, list[VoipMetricsBlock]]] = []
    residue: list[PacketRecord] = []

    for rec in records:
        got = _classify(rec)
        if got is None:
            residue.append(rec)
            continue
        kind, obj = got
        if kind == "sip":
            dialogs.setdefault(obj.call_id, []).append(obj)
        elif kind == "rtp":
            key = (obj.ssrc, rec.src_addr, rec.src_port, rec.dst_addr, rec.dst_port)
            if key not in streams:
                streams[key] = _Stream(key, [], rec)
            streams[key].packets.append(obj)
        else:  # xr
            if obj:
                xr_records.append((rec, obj))
            else:
                residue.append(rec)  # RTCP without VoIP metrics

    for dialog in dialogs.values():
        dialog.sort(key=lambda m: m.capture_ts)
    ordered_streams = sorted(
        streams.values(), key=lambda s: s.packets[0].capture_ts
    )

    sessions: list[CallSession] = []
    bound: set[tuple] = set()

    # dialog-bound sessions, in dialog start order
    for call_id, dialog in sorted(
        dialogs.items(), key=lambda kv: kv[1][0].capture_ts
    ):
        ports = _dialog_ports(dialog)
        port_set = {v for v in ports.values() if v is not None}
        mine = [
            s
            for s in ordered_streams
            if s.key not in bound
            and (s.record.dst_port in port_set or s.record.src_port in port_set)
        ]
        fwd, rev = _pick_directions(mine, ports)
        for s in mine:
            if s is fwd or s is rev:
                bound.add(s.key)
        sessions.append(
            _build_session(call_id, fwd, rev, dialog, cfg)
        )
        # streams that matched the ports but lost the direction contest
        # stay unbound and fall through to rtp-only grouping below

    # RTP-only sessions from leftover streams, paired by mirrored endpoints
    leftovers = [s for s in ordered_streams if s.key not in bound]
    used: set[tuple] = set()
    for s in leftovers:
        if s.key in used:
            continue
        used.add(s.key)
        _ssrc, src, sport, dst, dport = s.key
        mirror = None
        for other in leftovers:
            if other.key in used:
                continue
            _, osrc, osport, odst, odport = other.key
            if (osrc, osport, odst, odport) == (dst, dport, src, sport):
                mirror = other
                used.add(other.key)
                break
        session_id = f"rtp-{s.packets[0].ssrc:08x}"
        sessions.append(_build_session(session_id, s, mirror, [], cfg))

    # attach XR blocks to the session owning the reported stream
    for rec, blocks in xr_records:
        target = _find_xr_session(sessions, rec, blocks)
        if target is None:
            residue.append(rec)
        else:
            target.xr_blocks.extend(blocks)

    for session in sessions:
        session.xr_blocks.sort(key=lambda b: b.report_ts)
    sessions.sort(key=_session_start)
    return AssemblyResult(sessions, residue)


def _session_start(s: CallSession) -> float:
    times = []
    if s.sip_dialog:
        times.append(s.sip_dialog[0].capture_ts)
    if s.rtp_fwd:
        times.append(s.rtp_fwd[0].capture_ts)
    if s.rtp_rev:
        times.append(s.rtp_rev[0].capture_ts)
    return min(times) if times else 0.0


def _pick_directions(mine: list[_Stream], ports: dict):
    """Choose forward (caller->callee) and reverse streams.

    The stream sent TO the callee's port is the caller's (forward); the
    one sent to the caller's port is reverse. Without SDP information,
    first-seen is forward.
    """
    fwd = rev = None
    callee, caller = ports.get("callee"), ports.get("caller")
    for s in mine:
        if callee is not None and s.record.dst_port == callee and fwd is None:
            fwd = s
        elif caller is not None and s.record.dst_port == caller and rev is None:
            rev = s
    for s in mine:
        if s is fwd or s is rev:
            continue
        if fwd is None:
            fwd = s
        elif rev is None:
            rev = s
    return fwd, rev


def _build_session(
    session_id: str,
    fwd: _Stream | None,
    rev: _Stream | None,
    dialog: list[SipMessage],
    cfg: AssemblyConfig,
) -> CallSession:
    codec = clock_rate = None
    lead = fwd or rev
    if lead is not None:
        name = cfg.payload_type_map.get(lead.packets[0].payload_type)
        if name is not None:
            codec = name
            clock_rate = CODECS[name].clock_rate
    return CallSession(
        session_id=session_id,
        codec=codec,
        clock_rate=clock_rate,
        rtp_fwd=sorted(fwd.packets, key=lambda p: p.capture_ts) if fwd else [],
        rtp_rev=sorted(rev.packets, key=lambda p: p.capture_ts) if rev else [],
        xr_blocks=[],
        sip_dialog=dialog,
        scenario_tag=cfg.scenario_tag,
    )


def _find_xr_session(
    sessions: list[CallSession], rec: PacketRecord, blocks: list[VoipMetricsBlock]
) -> CallSession | None:
    reported = {b.source_ssrc for b in blocks}
    for session in sessions:
        ssrcs = {p.ssrc for p in session.rtp_fwd[:1]} | {
            p.ssrc for p in session.rtp_rev[:1]
        }
        if reported & ssrcs:
            return session
    # fall back to port adjacency: RTCP rides the media port or media+1,
    # and the SDP of the dialog is where those ports are declared
    for session in sessions:
        ports = _dialog_ports(session.sip_dialog)
        candidates = set()
        for v in ports.values():
            if v is not None:
                candidates |= {v, v + 1}
        if rec.src_port in candidates or rec.dst_port in candidates:
            return session
    return None
