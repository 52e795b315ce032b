"""RTP fixed-header parsing and encoding."""

from __future__ import annotations

import struct
from dataclasses import dataclass

from ..errors import BadVersion, DomainError, TooShort

_FIXED_LEN = 12


@dataclass(frozen=True)
class RtpPacket:
    version: int
    payload_type: int
    seq: int  # 16-bit wrap-around counter
    rtp_ts: int  # 32-bit wrap-around counter, codec clock units
    ssrc: int
    payload_len: int
    capture_ts: float  # receive time t_r of the jitter formula
    header_len: int

    def __post_init__(self) -> None:
        if self.version != 2:
            raise BadVersion(f"RTP version must be 2, got {self.version}")
        if not 0 <= self.payload_type <= 127:
            raise DomainError(f"payload type {self.payload_type} outside 0..127")
        if not 0 <= self.seq <= 0xFFFF:
            raise DomainError(f"seq {self.seq} outside 16-bit range")
        if not 0 <= self.rtp_ts <= 0xFFFFFFFF:
            raise DomainError(f"rtp_ts {self.rtp_ts} outside 32-bit range")
        if not 0 <= self.ssrc <= 0xFFFFFFFF:
            raise DomainError(f"ssrc {self.ssrc} outside 32-bit range")
        if self.payload_len < 0 or self.header_len < _FIXED_LEN:
            raise DomainError("negative payload length or impossible header length")


def parse_rtp(payload: bytes, capture_ts: float) -> RtpPacket:
    """Decode one RTP packet from UDP payload bytes.

    ``header_len`` covers the fixed header plus CSRC list and, when the
    X bit is set, the full header extension; ``payload_len`` is whatever
    remains after it.
    """
    if len(payload) < _FIXED_LEN:
        raise TooShort(f"RTP needs >= {_FIXED_LEN} bytes, got {len(payload)}")
    b0 = payload[0]
    version = b0 >> 6
    if version != 2:
        raise BadVersion(f"RTP version must be 2, got {version}")
    cc = b0 & 0x0F
    has_ext = bool(b0 & 0x10)
    pt = payload[1] & 0x7F
    seq, rtp_ts, ssrc = struct.unpack(">HII", payload[2:12])
    header_len = _FIXED_LEN + 4 * cc
    if len(payload) < header_len:
        raise TooShort("CSRC list extends past end of packet")
    if has_ext:
        if len(payload) < header_len + 4:
            raise TooShort("extension header cut short")
        (_profile, ext_words) = struct.unpack(
            ">HH", payload[header_len : header_len + 4]
        )
        header_len += 4 + 4 * ext_words
        if len(payload) < header_len:
            raise TooShort("extension body extends past end of packet")
    return RtpPacket(
        version=version,
        payload_type=pt,
        seq=seq,
        rtp_ts=rtp_ts,
        ssrc=ssrc,
        payload_len=len(payload) - header_len,
        capture_ts=capture_ts,
        header_len=header_len,
    )


def encode_rtp(
    payload_type: int, seq: int, rtp_ts: int, ssrc: int, media: bytes
) -> bytes:
    """Build a minimal RTP packet (no CSRC, no extension, marker clear)."""
    if not 0 <= payload_type <= 127:
        raise DomainError(f"payload type {payload_type} outside 0..127")
    return (
        struct.pack(
            ">BBHII", 0x80, payload_type, seq & 0xFFFF, rtp_ts & 0xFFFFFFFF, ssrc
        )
        + media
    )
