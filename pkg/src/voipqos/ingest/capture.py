"""Capture-file reading and writing: classic pcap and line-delimited JSON.

The pcap side is bit-exact for the classic format: 24-byte global header
(either byte order, dispatched on the magic), 16-byte record headers with
separate second/microsecond fields, and Ethernet or raw-IPv4 link types.
Only UDP packets become records; everything else is skipped, because all
three protocols of interest ride UDP here.

The jsonl side is the human-writable twin used for diffable fixtures:
one JSON object per line with keys ts, src, dst, sport, dport, proto,
payload_hex.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

from ..errors import BadMagic, BadRecord, DomainError, Truncated

MAGIC = 0xA1B2C3D4
LINKTYPE_ETHERNET = 1
LINKTYPE_RAW_IPV4 = 101

_GLOBAL_HEADER = struct.Struct("IHHiIII")  # magic, vmaj, vmin, zone, figs, snap, link
_RECORD_HEADER = struct.Struct("IIII")  # ts_sec, ts_usec, incl_len, orig_len


@dataclass(frozen=True)
class PacketRecord:
    """One captured UDP packet."""

    ts: float  # seconds since epoch, microsecond resolution
    src_addr: str
    dst_addr: str
    src_port: int
    dst_port: int
    transport: str  # always "udp" for records produced here
    payload: bytes

    def __post_init__(self) -> None:
        if not (self.ts >= 0.0 and self.ts == self.ts):  # finite, non-negative
            raise DomainError(f"capture timestamp must be >= 0, got {self.ts}")
        for port in (self.src_port, self.dst_port):
            if not 0 <= port <= 65535:
                raise DomainError(f"port {port} outside 0..65535")


def _split_ts(ts: float) -> tuple[int, int]:
    sec = int(ts)
    usec = int(round((ts - sec) * 1e6))
    if usec >= 1_000_000:  # rounding carry at the second boundary
        sec += 1
        usec -= 1_000_000
    return sec, usec


def _ipv4(addr: str) -> bytes:
    parts = addr.split(".")
    try:
        if len(parts) == 4:
            return bytes(int(p) for p in parts)
    except ValueError:
        pass
    raise DomainError(f"address {addr!r} is not dotted-quad IPv4")


def _checksum(header: bytes) -> int:
    total = sum(struct.unpack(f">{len(header) // 2}H", header))
    while total >> 16:
        total = (total & 0xFFFF) + (total >> 16)
    return ~total & 0xFFFF


def _build_frame(rec: PacketRecord) -> bytes:
    udp_len = 8 + len(rec.payload)
    udp = struct.pack(">HHHH", rec.src_port, rec.dst_port, udp_len, 0) + rec.payload
    ip_len = 20 + udp_len
    ip_wo_csum = struct.pack(
        ">BBHHHBBH4s4s",
        0x45, 0, ip_len, 0, 0, 64, 17, 0,
        _ipv4(rec.src_addr), _ipv4(rec.dst_addr),
    )
    ip = ip_wo_csum[:10] + struct.pack(">H", _checksum(ip_wo_csum)) + ip_wo_csum[12:]
    eth = b"\x02\x00\x00\x00\x00\x02" + b"\x02\x00\x00\x00\x00\x01" + b"\x08\x00"
    return eth + ip + udp


def _parse_ipv4(ts: float, data: bytes) -> PacketRecord | None:
    if len(data) < 20:
        return None
    first = data[0]
    if first >> 4 != 4:
        return None
    ihl = (first & 0x0F) * 4
    if ihl < 20 or len(data) < ihl + 8:
        return None
    proto = data[9]
    if proto != 17:  # not UDP
        return None
    src = ".".join(str(b) for b in data[12:16])
    dst = ".".join(str(b) for b in data[16:20])
    sport, dport, udp_len, _ = struct.unpack(">HHHH", data[ihl : ihl + 8])
    end = ihl + max(udp_len, 8)
    payload = bytes(data[ihl + 8 : min(end, len(data))])
    return PacketRecord(
        ts=ts, src_addr=src, dst_addr=dst,
        src_port=sport, dst_port=dport, transport="udp", payload=payload,
    )


def parse_pcap(data: bytes) -> list[PacketRecord]:
    """Decode a classic capture file into UDP packet records, in order.

    Raises BadMagic when the first four bytes are not the classic magic
    in either byte order, and Truncated when a record header or body
    extends past the end of the input.
    """
    if len(data) < 4:
        raise BadMagic("input shorter than a capture magic")
    (magic_le,) = struct.unpack("<I", data[:4])
    if magic_le == MAGIC:
        endian = "<"
    elif magic_le == 0xD4C3B2A1:
        endian = ">"
    else:
        raise BadMagic(f"not a classic capture file (magic {magic_le:#010x})")
    if len(data) < 24:
        raise Truncated("global header cut short")
    header = struct.Struct(endian + _GLOBAL_HEADER.format)
    _, _, _, _, _, _, linktype = header.unpack(data[:24])
    rec_header = struct.Struct(endian + _RECORD_HEADER.format)

    records: list[PacketRecord] = []
    off = 24
    while off < len(data):
        if off + 16 > len(data):
            raise Truncated("record header cut short")
        sec, usec, incl, _orig = rec_header.unpack(data[off : off + 16])
        off += 16
        if off + incl > len(data):
            raise Truncated("record body extends past end of file")
        frame = data[off : off + incl]
        off += incl
        ts = sec + usec / 1e6  # division is correctly rounded, multiplication by 1e-6 is not
        if linktype == LINKTYPE_ETHERNET:
            if len(frame) < 14 or frame[12:14] != b"\x08\x00":
                continue  # not IPv4
            rec = _parse_ipv4(ts, frame[14:])
        elif linktype == LINKTYPE_RAW_IPV4:
            rec = _parse_ipv4(ts, frame)
        else:
            continue  # unknown link type: skip records, keep walking
        if rec is not None:
            records.append(rec)
    return records


def write_pcap(records: list[PacketRecord]) -> bytes:
    """Encode records as a little-endian classic capture file (Ethernet)."""
    out = [struct.pack("<IHHiIII", MAGIC, 2, 4, 0, 0, 65535, LINKTYPE_ETHERNET)]
    for rec in records:
        frame = _build_frame(rec)
        sec, usec = _split_ts(rec.ts)
        out.append(struct.pack("<IIII", sec, usec, len(frame), len(frame)))
        out.append(frame)
    return b"".join(out)


_JSONL_KEYS = ("ts", "src", "dst", "sport", "dport", "proto", "payload_hex")


def parse_jsonl(text: str) -> list[PacketRecord]:
    """Decode the line-delimited JSON record format; blank lines skipped."""
    records: list[PacketRecord] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise BadRecord(f"line {lineno}: not valid JSON ({exc.msg})") from exc
        if not isinstance(obj, dict):
            raise BadRecord(f"line {lineno}: expected a JSON object")
        missing = [k for k in _JSONL_KEYS if k not in obj]
        if missing:
            raise BadRecord(f"line {lineno}: missing keys {missing}")
        if obj["proto"] != "udp":
            continue
        try:
            payload = bytes.fromhex(obj["payload_hex"])
        except ValueError as exc:
            raise BadRecord(f"line {lineno}: payload_hex is not hex") from exc
        try:
            records.append(
                PacketRecord(
                    ts=float(obj["ts"]),
                    src_addr=str(obj["src"]),
                    dst_addr=str(obj["dst"]),
                    src_port=int(obj["sport"]),
                    dst_port=int(obj["dport"]),
                    transport="udp",
                    payload=payload,
                )
            )
        except (TypeError, ValueError, DomainError) as exc:
            raise BadRecord(f"line {lineno}: {exc}") from exc
    return records


def write_jsonl(records: list[PacketRecord]) -> str:
    lines = []
    for rec in records:
        lines.append(
            json.dumps(
                {
                    "ts": rec.ts,
                    "src": rec.src_addr,
                    "dst": rec.dst_addr,
                    "sport": rec.src_port,
                    "dport": rec.dst_port,
                    "proto": rec.transport,
                    "payload_hex": rec.payload.hex(),
                },
                sort_keys=True,
            )
        )
    return "\n".join(lines) + ("\n" if lines else "")
