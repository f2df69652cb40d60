"""Command-line entry point: ``meshsocial <command> [options]``.

Every run writes its CSV and a ``manifest.json`` into the output directory
(``--out``, else ``$MESHSOCIAL_OUTPUT_DIR``, else ``./out``). Passing a
manifest back through ``--config`` replays the run.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from meshsocial import __version__
from meshsocial.attack import (
    AttackConfig,
    RecomputeMode,
    default_max_removals,
    parse_metrics,
    run_attack_experiment,
)
from meshsocial.centrality import ConvergenceError, compute
from meshsocial.graph import Graph, GraphError, format_edge_list, load_edge_list, random_geometric_graph
from meshsocial.io import (
    ATTACK_SCHEMA,
    CENTRALITY_SCHEMA,
    STDMA_SCHEMA,
    RunManifest,
    file_digest,
    load_config,
    write_csv,
)
from meshsocial.stdma.sim import (
    Flow,
    Mode,
    ScheduleConflictError,
    StdmaConfig,
    StdmaResult,
    SweepRow,
    all_pairs_flows,
    simulate,
    sweep,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVARIANT = 3
OUTPUT_ENV = "MESHSOCIAL_OUTPUT_DIR"
NON_CONFIG_KEYS = {"command", "config", "out", "quiet", "_commands"}

log = logging.getLogger("meshsocial")


class UsageError(Exception):
    pass


def _rates(text: str) -> list[float]:
    """``650,1000`` or ``start:stop:step`` (inclusive)."""
    text = str(text)
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        if step <= 0:
            raise ValueError("rate step must be positive")
        out, k = [], 0
        while start + k * step <= stop + 1e-9:
            out.append(start + k * step)
            k += 1
        return out
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="meshsocial", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or ./out)")
    common.add_argument("--config", help="JSON config or run manifest; flags override it")
    common.add_argument("--quiet", action="store_true", help="no progress on stderr")
    sub = p.add_subparsers(dest="command", metavar="command")
    p.set_defaults(_commands=sub.choices)

    c = sub.add_parser("centrality", parents=[common], help="centrality scores per node")
    c.add_argument("--topo", help="edge-list file")
    c.add_argument("--metrics", default="all", help="comma list or 'all'")

    a = sub.add_parser("attack", parents=[common], help="coordinated-attack hop curves")
    a.add_argument("--topo")
    a.add_argument("--metrics", default="betweenness,closeness,degree")
    a.add_argument("--removals", type=int, help="default: 5, or 20%% of nodes above 25")
    a.add_argument("--trials", type=int, default=10)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--recompute", action="store_true", help="re-rank after every removal")

    s = sub.add_parser("stdma", parents=[common], help="one lottery-STDMA simulation")
    s.add_argument("--topo")
    _stdma_flags(s)
    s.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.SOCIAL.value)
    s.add_argument("--rate", type=float, default=650.0, help="per-flow rate, bits/s")
    s.add_argument("--flows", default="all-pairs", help="'all-pairs' or file of 'src dst [rate]'")
    s.add_argument("--seed", type=int, default=0)

    w = sub.add_parser("sweep", parents=[common], help="delay-vs-throughput table over rates")
    w.add_argument("--topo", help="fixed topology; omit to draw one geometric graph per seed")
    w.add_argument("--nodes", type=int, default=19)
    w.add_argument("--degree", type=float, default=8.0)
    _stdma_flags(w)
    w.add_argument("--rates", default="650:1350:100")
    w.add_argument("--seeds", type=int, default=20, help="number of seeds")
    w.add_argument("--seed", type=int, default=0, help="first seed")

    g = sub.add_parser("gen-topo", parents=[common], help="connected random geometric graph")
    g.add_argument("--n", type=int, default=200)
    g.add_argument("--degree", type=float, default=8.0)
    g.add_argument("--seed", type=int, default=0)
    return p


def _stdma_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--frame", type=int, default=20)
    p.add_argument("--scale", type=int, default=10)
    p.add_argument("--duration", type=float, default=30.0, help="seconds of traffic")
    p.add_argument("--drain", type=float, default=0.0, help="extra seconds without new traffic")
    p.add_argument("--packet-size", type=int, default=500)
    p.add_argument("--slot", type=float, default=0.005, help="slot duration, seconds")


def _parse(argv: Sequence[str]) -> argparse.Namespace:
    parser = build_parser()
    argv = list(argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        try:
            command, cfg = load_config(known.config)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {known.config}: {exc}") from exc
        commands = parser.get_default("_commands")
        if command and not any(a in commands for a in argv):
            argv.insert(0, command)
        cmd = next((a for a in argv if a in commands), None)
        if cmd is None:
            raise UsageError("no command given")
        subparser = commands[cmd]
        valid = {a.dest for a in subparser._actions}
        unknown = sorted(set(cfg) - valid)
        if unknown:
            raise UsageError(f"config keys not understood by {cmd}: {unknown}")
        subparser.set_defaults(**cfg)
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_usage(sys.stderr)
        raise UsageError("no command given")
    return args


def _load_topo(path: str | None) -> Graph:
    if not path:
        raise UsageError("--topo is required")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read topology {path}: {exc.strerror or exc}") from exc
    return load_edge_list(text)


def _load_flows(source: str, g: Graph, rate: float) -> tuple[Flow, ...]:
    if source == "all-pairs":
        return all_pairs_flows(g, rate)
    by_label = {g.label(v): v for v in g.nodes}
    flows = []
    try:
        text = Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read flows {source}: {exc.strerror or exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split("#", 1)[0].split()
        if not parts:
            continue
        if len(parts) not in (2, 3) or parts[0] not in by_label or parts[1] not in by_label:
            raise UsageError(f"{source} line {lineno}: expected 'src dst [rate]' with known labels")
        r = float(parts[2]) if len(parts) == 3 else rate
        flows.append(Flow(by_label[parts[0]], by_label[parts[1]], r))
    return tuple(flows)


def _stdma_kwargs(args: argparse.Namespace) -> dict[str, Any]:
    return dict(
        frame_size=args.frame,
        ticket_scale=args.scale,
        sim_duration=args.duration,
        drain=args.drain,
        packet_size=args.packet_size,
        slot_duration=args.slot,
    )


def _stdma_row(mode: str, rate: float, r: StdmaResult) -> dict[str, Any]:
    return {
        "mode": mode,
        "rate": rate,
        "throughput_bps": r.throughput_bps,
        "mean_delay_s": r.mean_delay,
        "p95_delay_s": r.p95_delay,
        "delivered": r.delivered,
        "generated": r.generated,
    }


def _sweep_row(r: SweepRow) -> dict[str, Any]:
    row = {c: getattr(r, c) for c in STDMA_SCHEMA.columns}
    row["mode"] = r.mode.value
    return row


def run_command(args: argparse.Namespace, out: Path) -> dict[str, str]:
    """Execute one command, writing its outputs into ``out``; returns input digests."""
    inputs: dict[str, str] = {}
    topo = getattr(args, "topo", None)
    if topo or args.command in ("centrality", "attack", "stdma"):
        g = _load_topo(topo)
        inputs[topo] = file_digest(topo)

    if args.command == "centrality":
        rows = []
        for metric in parse_metrics(args.metrics):
            log.info("computing %s centrality", metric.value)
            scores = compute(g, metric)
            rows += [
                {"node_label": g.label(v), "metric": metric.value, "value": x}
                for v, x in scores.scores.items()
            ]
        write_csv(rows, CENTRALITY_SCHEMA, out / "centrality.csv")

    elif args.command == "attack":
        removals = args.removals if args.removals is not None else default_max_removals(len(g))
        cfg = AttackConfig(
            g,
            parse_metrics(args.metrics),
            removals,
            args.trials,
            args.seed,
            RecomputeMode.RECOMPUTE if args.recompute else RecomputeMode.STATIC,
        )
        log.info("attacking %d nodes with %d removals", len(g), removals)
        write_csv(run_attack_experiment(cfg).rows(), ATTACK_SCHEMA, out / "attack.csv")

    elif args.command == "stdma":
        flows = _load_flows(args.flows, g, args.rate)
        if args.flows != "all-pairs":
            inputs[args.flows] = file_digest(args.flows)
        cfg = StdmaConfig(g, flows, Mode(args.mode), seed=args.seed, **_stdma_kwargs(args))
        log.info("simulating %d slots, %d flows", cfg.n_slots, len(flows))
        res = simulate(cfg)
        write_csv([_stdma_row(args.mode, args.rate, res)], STDMA_SCHEMA, out / "stdma.csv")

    elif args.command == "sweep":
        seeds = [args.seed + k for k in range(args.seeds)]
        if topo:
            graphs = [g] * len(seeds)
        else:
            graphs = [random_geometric_graph(args.nodes, args.degree, s) for s in seeds]
        rates = _rates(args.rates)
        log.info("sweeping %d rates x %d seeds", len(rates), len(seeds))
        rows = sweep(graphs, rates, seeds, **_stdma_kwargs(args))
        write_csv(
            [_sweep_row(r) for r in rows], STDMA_SCHEMA, out / "sweep.csv"
        )

    elif args.command == "gen-topo":
        g = random_geometric_graph(args.n, args.degree, args.seed)
        (out / "topology.txt").write_text(format_edge_list(g), encoding="utf-8")
    return inputs


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = _parse(argv)
    except UsageError as exc:
        print(f"meshsocial: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    out = Path(args.out or os.environ.get(OUTPUT_ENV) or "out")
    config = {k: v for k, v in vars(args).items() if k not in NON_CONFIG_KEYS}
    try:
        out.mkdir(parents=True, exist_ok=True)
        inputs = run_command(args, out)
        RunManifest(
            command=args.command,
            config=config,
            seed=int(config.get("seed", 0)),
            output_dir=str(out),
            tool_version=__version__,
            inputs=inputs,
        ).write(out)
    except ScheduleConflictError as exc:
        print(f"meshsocial: schedule invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (UsageError, GraphError, ConvergenceError, ValueError, OSError) as exc:
        print(f"meshsocial: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    log.info("wrote %s", out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
