import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import path_graph
from meshsocial.graph import load_edge_list
from meshsocial.centrality import closeness_centrality
from meshsocial.stdma.hello import (
    HelloDecodeError,
    HelloMessage,
    LinkEntry,
    address_of,
    decode_hello,
    encode_hello,
    hello_for,
)

u8 = st.integers(0, 255)
u32 = st.integers(0, 2**32 - 1)
unit = st.floats(0.0, 1.0)
links = st.builds(LinkEntry, u8, u32, unit)
messages = st.builds(HelloMessage, u32, unit, u8, u8, st.lists(links, max_size=12).map(tuple))


def test_full_closeness_is_all_ones():
    b = encode_hello(HelloMessage(1, 1.0, 0, 3))
    assert b[4:6] == b"\xff\xff"
    assert decode_hello(b).closeness == 1.0


def test_known_field_value():
    b = encode_hello(HelloMessage(0x0A020101, 0.720, 6, 3, (LinkEntry(6, 0x0A020102, 0.5),)))
    assert struct.unpack("!H", b[4:6])[0] == 47185
    assert b[:4] == bytes([10, 2, 1, 1])
    assert len(b) == 8 + 8
    assert b[8:] == bytes([6, 128, 0, 8, 10, 2, 1, 2])


@given(messages)
@settings(max_examples=2_000)
def test_round_trip_within_quantization(m):
    d = decode_hello(encode_hello(m))
    assert (d.originator, d.htime, d.willingness) == (m.originator, m.htime, m.willingness)
    assert abs(d.closeness - m.closeness) <= 0.5 / 65535 + 1e-12
    assert len(d.links) == len(m.links)
    for a, b in zip(d.links, m.links):
        assert (a.link_code, a.neighbor_address) == (b.link_code, b.neighbor_address)
        assert abs(a.nb_closeness - b.nb_closeness) <= 0.5 / 255 + 1e-12


@given(messages)
def test_reencode_is_identity_on_bytes(m):
    b = encode_hello(m)
    assert encode_hello(decode_hello(b)) == b


def test_truncated_header():
    with pytest.raises(HelloDecodeError):
        decode_hello(b"\x00" * 7)


def test_truncated_link():
    b = encode_hello(HelloMessage(1, 0.5, 0, 0, (LinkEntry(6, 2, 0.5),)))
    with pytest.raises(HelloDecodeError):
        decode_hello(b[:-1])


def test_bad_link_size():
    b = bytearray(encode_hello(HelloMessage(1, 0.5, 0, 0, (LinkEntry(6, 2, 0.5),))))
    b[10:12] = b"\x00\x04"
    with pytest.raises(HelloDecodeError):
        decode_hello(bytes(b))


@pytest.mark.parametrize(
    "m",
    [
        HelloMessage(1, 1.5, 0, 0),
        HelloMessage(1, -0.1, 0, 0),
        HelloMessage(2**32, 0.5, 0, 0),
        HelloMessage(1, 0.5, 256, 0),
        HelloMessage(1, 0.5, 0, 0, (LinkEntry(256, 1, 0.5),)),
        HelloMessage(1, 0.5, 0, 0, (LinkEntry(6, 1, 2.0),)),
    ],
)
def test_out_of_range(m):
    with pytest.raises(ValueError):
        encode_hello(m)


def test_hello_for_uses_ipv4_labels():
    g = load_edge_list("10.2.1.1 10.2.1.2\n10.2.1.2 10.2.1.3\n")
    close = closeness_centrality(g).scores
    mid = next(v for v in g.nodes if g.label(v) == "10.2.1.2")
    m = hello_for(g, mid, close)
    assert m.originator == address_of("10.2.1.2")
    assert {lk.neighbor_address for lk in m.links} == {address_of("10.2.1.1"), address_of("10.2.1.3")}
    assert m.closeness == 1.0


def test_hello_for_falls_back_to_ids():
    g = path_graph(3)
    m = hello_for(g, 1, {0: 2 / 3, 1: 1.0, 2: 2 / 3})
    assert m.originator == 1
    assert [lk.neighbor_address for lk in m.links] == [0, 2]
