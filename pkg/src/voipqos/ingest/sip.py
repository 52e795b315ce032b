"""Header-subset SIP parsing: start line, Call-ID, CSeq, tags, media port.

Deliberately not a transaction state machine; the signalling delays need
only the INVITE/180/BYE/200 events, plus the SDP audio port for binding
RTP streams to their dialog.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import MissingHeader, NotSip

_METHODS = (
    "INVITE", "ACK", "BYE", "CANCEL", "OPTIONS", "REGISTER",
    "PRACK", "SUBSCRIBE", "NOTIFY", "PUBLISH", "INFO", "REFER",
    "MESSAGE", "UPDATE",
)
_REQUEST_RE = re.compile(r"^([A-Z]+) (\S+) SIP/2\.0$")
_STATUS_RE = re.compile(r"^SIP/2\.0 (\d{3})(?: (.*))?$")
_CSEQ_RE = re.compile(r"^(\d+)\s+(\S+)$")
_TAG_RE = re.compile(r";\s*tag=([^;\s]+)", re.IGNORECASE)
_AUDIO_RE = re.compile(r"^m=audio\s+(\d+)\s", re.MULTILINE)


@dataclass(frozen=True)
class SipMessage:
    kind: str  # "request" | "response"
    method_or_status: str | int  # method token or integer status code
    call_id: str
    cseq: int
    cseq_method: str
    capture_ts: float
    from_tag: str | None = None
    to_tag: str | None = None
    media_port: int | None = None


def _headers(lines: list[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    for line in lines:
        if not line:
            break  # blank line ends the header section
        name, sep, value = line.partition(":")
        if sep:
            key = name.strip().lower()
            if key not in out:  # first occurrence wins
                out[key] = value.strip()
    return out


def parse_sip(payload: bytes | str, capture_ts: float) -> SipMessage:
    """Decode one SIP message from UDP payload text."""
    if isinstance(payload, bytes):
        try:
            text = payload.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise NotSip("payload is not UTF-8 text") from exc
    else:
        text = payload
    lines = text.split("\r\n") if "\r\n" in text else text.split("\n")
    if not lines:
        raise NotSip("empty payload")

    start = lines[0].strip()
    m = _STATUS_RE.match(start)
    if m:
        code = int(m.group(1))
        if not 100 <= code <= 699:
            raise NotSip(f"status code {code} outside 100..699")
        kind: str = "response"
        method_or_status: str | int = code
    else:
        m = _REQUEST_RE.match(start)
        if m and m.group(1) in _METHODS:
            kind = "request"
            method_or_status = m.group(1)
        else:
            raise NotSip(f"start line is not SIP: {start[:60]!r}")

    headers = _headers(lines[1:])
    call_id = headers.get("call-id")
    if not call_id:
        raise MissingHeader("no Call-ID header")
    cseq_raw = headers.get("cseq")
    if not cseq_raw:
        raise MissingHeader("no CSeq header")
    cm = _CSEQ_RE.match(cseq_raw)
    if not cm:
        raise MissingHeader(f"unusable CSeq: {cseq_raw!r}")

    def tag(header: str) -> str | None:
        value = headers.get(header)
        if value:
            t = _TAG_RE.search(value)
            if t:
                return t.group(1)
        return None

    media_port = None
    mp = _AUDIO_RE.search(text)
    if mp:
        media_port = int(mp.group(1))

    return SipMessage(
        kind=kind,
        method_or_status=method_or_status,
        call_id=call_id,
        cseq=int(cm.group(1)),
        cseq_method=cm.group(2).upper(),
        capture_ts=capture_ts,
        from_tag=tag("from"),
        to_tag=tag("to"),
        media_port=media_port,
    )


def format_sip_request(
    method: str,
    uri: str,
    call_id: str,
    cseq: int,
    from_addr: str = "<sip:a@local>",
    to_addr: str = "<sip:b@remote>",
    from_tag: str | None = "atag",
    media_port: int | None = None,
) -> bytes:
    """Render a minimal SIP request, with SDP audio line when asked."""
    from_hdr = from_addr + (f";tag={from_tag}" if from_tag else "")
    lines = [
        f"{method} {uri} SIP/2.0",
        f"From: {from_hdr}",
        f"To: {to_addr}",
        f"Call-ID: {call_id}",
        f"CSeq: {cseq} {method}",
    ]
    body = ""
    if media_port is not None:
        body = (
            "v=0\r\no=- 0 0 IN IP4 0.0.0.0\r\ns=call\r\n"
            f"c=IN IP4 0.0.0.0\r\nt=0 0\r\nm=audio {media_port} RTP/AVP 8\r\n"
        )
        lines.append("Content-Type: application/sdp")
    lines.append(f"Content-Length: {len(body)}")
    return ("\r\n".join(lines) + "\r\n\r\n" + body).encode()


def format_sip_response(
    status: int,
    reason: str,
    call_id: str,
    cseq: int,
    cseq_method: str,
    to_tag: str | None = "btag",
    media_port: int | None = None,
) -> bytes:
    to_hdr = "<sip:b@remote>" + (f";tag={to_tag}" if to_tag else "")
    lines = [
        f"SIP/2.0 {status} {reason}",
        "From: <sip:a@local>;tag=atag",
        f"To: {to_hdr}",
        f"Call-ID: {call_id}",
        f"CSeq: {cseq} {cseq_method}",
    ]
    body = ""
    if media_port is not None:
        body = (
            "v=0\r\no=- 0 0 IN IP4 0.0.0.0\r\ns=call\r\n"
            f"c=IN IP4 0.0.0.0\r\nt=0 0\r\nm=audio {media_port} RTP/AVP 8\r\n"
        )
        lines.append("Content-Type: application/sdp")
    lines.append(f"Content-Length: {len(body)}")
    return ("\r\n".join(lines) + "\r\n\r\n" + body).encode()
