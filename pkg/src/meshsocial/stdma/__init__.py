"""Socially-aware lottery STDMA: elections, simulation and HELLO codec."""

from meshsocial.stdma.hello import HelloDecodeError, HelloMessage, LinkEntry, decode_hello, encode_hello
from meshsocial.stdma.sim import (
    Elections,
    Flow,
    Mode,
    ScheduleConflictError,
    StdmaConfig,
    StdmaResult,
    all_pairs_flows,
    simulate,
    sweep,
)
from meshsocial.stdma.tickets import (
    StaleViewError,
    Ticket,
    TwoHopView,
    build_schedule,
    draw_ticket,
    form_slot_id,
    ticket_count,
    two_hop_view,
)

__all__ = [
    "Elections",
    "Flow",
    "HelloDecodeError",
    "HelloMessage",
    "LinkEntry",
    "Mode",
    "ScheduleConflictError",
    "StaleViewError",
    "StdmaConfig",
    "StdmaResult",
    "Ticket",
    "TwoHopView",
    "all_pairs_flows",
    "build_schedule",
    "decode_hello",
    "draw_ticket",
    "encode_hello",
    "form_slot_id",
    "simulate",
    "sweep",
    "ticket_count",
    "two_hop_view",
]
