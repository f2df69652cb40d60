"""OLSR HELLO messages carrying closeness values in the reserved fields.

Wire layout (network byte order)::

     0                   1                   2                   3
     0 1 2 3 4 5 6 7 8 9 0 1 2 3 4 5 6 7 8 9 0 1 2 3 4 5 6 7 8 9 0 1
    +-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+
    |                      Originator Address                       |
    +-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+
    |           Closeness           |     Htime     |  Willingness  |
    +-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+
    |   Link Code   | Nb_Closeness  |       Link Message Size       |
    +-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+
    |                  Neighbor Interface Address                   |
    +-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+
    :                 (one link block per neighbour)                :

Closeness is unsigned 16-bit fixed point (value * 65535) and Nb_Closeness
unsigned 8-bit fixed point (value * 255). Every link block advertises a
single neighbour, so Link Message Size is always 8.
"""

from __future__ import annotations

import ipaddress
import struct
from dataclasses import dataclass

_HEADER = struct.Struct("!IHBB")
_LINK = struct.Struct("!BBHI")
LINK_MESSAGE_SIZE = _LINK.size

CLOSENESS_SCALE = 0xFFFF
NB_CLOSENESS_SCALE = 0xFF


class HelloDecodeError(ValueError):
    pass


@dataclass(frozen=True)
class LinkEntry:
    link_code: int
    neighbor_address: int
    nb_closeness: float


@dataclass(frozen=True)
class HelloMessage:
    originator: int
    closeness: float
    htime: int
    willingness: int
    links: tuple[LinkEntry, ...] = ()


def _fixed(value: float, scale: int, name: str) -> int:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} {value} outside [0, 1]")
    return int(round(value * scale))


def _check_uint(value: int, bits: int, name: str) -> None:
    if not 0 <= value < (1 << bits):
        raise ValueError(f"{name} {value} does not fit in {bits} bits")


def encode_hello(m: HelloMessage) -> bytes:
    _check_uint(m.originator, 32, "originator")
    _check_uint(m.htime, 8, "htime")
    _check_uint(m.willingness, 8, "willingness")
    out = bytearray(
        _HEADER.pack(
            m.originator,
            _fixed(m.closeness, CLOSENESS_SCALE, "closeness"),
            m.htime,
            m.willingness,
        )
    )
    for link in m.links:
        _check_uint(link.link_code, 8, "link code")
        _check_uint(link.neighbor_address, 32, "neighbor address")
        out += _LINK.pack(
            link.link_code,
            _fixed(link.nb_closeness, NB_CLOSENESS_SCALE, "nb_closeness"),
            LINK_MESSAGE_SIZE,
            link.neighbor_address,
        )
    return bytes(out)


def decode_hello(data: bytes) -> HelloMessage:
    if len(data) < _HEADER.size:
        raise HelloDecodeError(f"truncated header: {len(data)} < {_HEADER.size} bytes")
    originator, closeness, htime, willingness = _HEADER.unpack_from(data, 0)
    links = []
    offset = _HEADER.size
    while offset < len(data):
        if len(data) - offset < _LINK.size:
            raise HelloDecodeError(f"truncated link block at byte {offset}")
        code, nb, size, addr = _LINK.unpack_from(data, offset)
        if size != LINK_MESSAGE_SIZE:
            raise HelloDecodeError(
                f"link block at byte {offset} declares size {size}, expected {LINK_MESSAGE_SIZE}"
            )
        links.append(LinkEntry(code, addr, nb / NB_CLOSENESS_SCALE))
        offset += size
    return HelloMessage(
        originator, closeness / CLOSENESS_SCALE, htime, willingness, tuple(links)
    )


def address_of(label: str) -> int:
    """32-bit address for an IPv4 node label such as ``10.2.1.5``."""
    return int(ipaddress.IPv4Address(label))


def hello_for(g, node: int, closeness, htime: int = 0, willingness: int = 3) -> HelloMessage:
    """HELLO that ``node`` would broadcast, advertising every 1-hop neighbour.

    Addresses come from IPv4 labels when present, otherwise the node id.
    """

    def addr(v: int) -> int:
        try:
            return address_of(g.label(v))
        except ValueError:
            return v

    links = tuple(
        LinkEntry(0x06, addr(w), closeness[w]) for w in sorted(g.neighbors(node))
    )
    return HelloMessage(addr(node), closeness[node], htime, willingness, links)
