"""Core flow-record types, CSV ingestion and IPv4 /16 prefix helpers.

Everything downstream works on immutable values defined here: a flow is a
(src, dst, proto, bpp_out, bpp_in) observation, flows are grouped by
FlowKey, and "same type" of traffic is decided by PatternKey equality.
Only IPv4 is supported; IPv6 input is rejected at parse time so that
/16-prefix diversity counts stay meaningful.
"""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass
from typing import Iterable, NamedTuple

PROTOCOLS = ("tcp", "udp")
ROLES = ("bot", "legit_p2p", "background_p2p", "background")


class FlowParseError(ValueError):
    """Malformed flow or label file content, with file/line context."""

    def __init__(self, path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


def ip_value(addr: str) -> int:
    """Integer value of a dotted-quad IPv4 address."""
    return int(ipaddress.IPv4Address(addr))


def prefix16(addr: str) -> int:
    """Leading 16 bits of an IPv4 address: first_octet * 256 + second_octet."""
    return ip_value(addr) >> 16


class PatternKey(NamedTuple):
    """Statistical flow pattern: protocol plus both bytes-per-packet values.

    Two flow clusters are considered the same type of traffic exactly when
    their patterns are equal.
    """

    proto: str
    bpp_out: int
    bpp_in: int


class FlowKey(NamedTuple):
    """Clustering key: (source host, protocol, bpp out, bpp in).

    Tuple comparison doubles as the total order used for deterministic
    grouping and iteration.
    """

    src: str
    proto: str
    bpp_out: int
    bpp_in: int

    @property
    def pattern(self) -> PatternKey:
        return PatternKey(self.proto, self.bpp_out, self.bpp_in)


@dataclass(frozen=True, slots=True)
class FlowRecord:
    """One 5-tuple flow observation."""

    src: str
    dst: str
    proto: str
    bpp_out: int
    bpp_in: int

    def __post_init__(self):
        if self.src == self.dst:
            raise ValueError(f"flow source and destination are equal: {self.src}")
        if self.proto not in PROTOCOLS:
            raise ValueError(f"unknown protocol: {self.proto!r}")
        if self.bpp_out < 0 or self.bpp_in < 0:
            raise ValueError("bytes-per-packet values must be nonnegative")

    @property
    def key(self) -> FlowKey:
        return FlowKey(self.src, self.proto, self.bpp_out, self.bpp_in)

    @property
    def pattern(self) -> PatternKey:
        return PatternKey(self.proto, self.bpp_out, self.bpp_in)


@dataclass(frozen=True, slots=True)
class HostLabel:
    """Ground-truth role of one host plus its botnet/application group name."""

    host: str
    role: str
    group: str = ""

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role: {self.role!r}")
        if self.role in ("bot", "legit_p2p") and not self.group:
            raise ValueError(f"role {self.role!r} requires a group name")


def derive_bpp(total_bytes: int, total_packets: int) -> int:
    """Bytes-per-packet as floor(total_bytes / total_packets)."""
    if total_packets < 1:
        raise ValueError("total_packets must be at least 1")
    if total_bytes < 0:
        raise ValueError("total_bytes must be nonnegative")
    return total_bytes // total_packets


def _is_ipv4(text: str) -> bool:
    try:
        ipaddress.IPv4Address(text)
    except ipaddress.AddressValueError:
        return False
    return True


def _is_int(text: str) -> bool:
    try:
        int(text)
    except ValueError:
        return False
    return True


def parse_flow_file(path) -> list[FlowRecord]:
    """Read a flow CSV: one `src_ip,dst_ip,proto,bpp_out,bpp_in` per line.

    Blank lines and '#' comments are skipped. A single header row is
    tolerated: the first non-comment line is dropped when its bpp columns
    are not integers and its first column is not an address.
    """
    flows: list[FlowRecord] = []
    first_data_line = True
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 5:
                raise FlowParseError(
                    path, line_no, f"expected 5 comma-separated fields, got {len(parts)}"
                )
            if first_data_line:
                first_data_line = False
                if not _is_int(parts[3]) and not _is_int(parts[4]) and not _is_ipv4(parts[0]):
                    continue
            src, dst, proto, out_s, in_s = parts
            for name, value in (("src_ip", src), ("dst_ip", dst)):
                if not _is_ipv4(value):
                    raise FlowParseError(
                        path, line_no, f"{name} is not a valid IPv4 address: {value!r}"
                    )
            if proto not in PROTOCOLS:
                raise FlowParseError(
                    path, line_no, f"unknown proto {proto!r} (expected tcp or udp)"
                )
            bpps = []
            for name, value in (("bpp_out", out_s), ("bpp_in", in_s)):
                if not _is_int(value):
                    raise FlowParseError(path, line_no, f"{name} is not an integer: {value!r}")
                n = int(value)
                if n < 0:
                    raise FlowParseError(path, line_no, f"{name} is negative: {n}")
                bpps.append(n)
            if src == dst:
                raise FlowParseError(path, line_no, f"src_ip equals dst_ip: {src}")
            flows.append(FlowRecord(src, dst, proto, bpps[0], bpps[1]))
    return flows


def write_flow_file(path, flows: Iterable[FlowRecord]) -> None:
    """Write flows in the CSV format understood by parse_flow_file."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# src_ip,dst_ip,proto,bpp_out,bpp_in\n")
        for f in flows:
            fh.write(f"{f.src},{f.dst},{f.proto},{f.bpp_out},{f.bpp_in}\n")


def parse_label_file(path) -> dict[str, HostLabel]:
    """Read a label CSV: one `host_ip,role,group` per line ('#' comments)."""
    labels: dict[str, HostLabel] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 3:
                raise FlowParseError(
                    path, line_no, f"expected 3 comma-separated fields, got {len(parts)}"
                )
            host, role, group = parts
            if not _is_ipv4(host):
                raise FlowParseError(path, line_no, f"host_ip is not a valid IPv4 address: {host!r}")
            if role not in ROLES:
                raise FlowParseError(path, line_no, f"unknown role {role!r}")
            try:
                labels[host] = HostLabel(host, role, group)
            except ValueError as exc:
                raise FlowParseError(path, line_no, str(exc)) from exc
    return labels


def write_label_file(path, labels: dict[str, HostLabel]) -> None:
    """Write host labels sorted by address for stable output."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# host_ip,role,group\n")
        for host in sorted(labels, key=ip_value):
            label = labels[host]
            fh.write(f"{label.host},{label.role},{label.group}\n")
