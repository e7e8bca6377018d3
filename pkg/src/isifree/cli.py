"""Command-line entry point (``isifree``).

Every failure prints one JSON object to stderr, e.g.
``{"error": "StateSpaceError", "message": "..."}``, and exits nonzero.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from .capacity import channel_capacity, path_count_table
from .codec import ModulationCode, decode, encode, format_stream, parse_stream
from .errors import IsiFreeError
from .evaluation import MIN_MC_BITS, SweepConfig, format_table, reproduce_table2, run_monte_carlo, sweep, sweep_csv
from .graph import ChannelSpec, build_constraint_graph
from .synthesis import synthesize
from .synthesis.dp import BISECTION_TOL
from .synthesis.search import FAMILIES


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D401
        _fail("UsageError", message, code=2)


def _fail(kind: str, message: str, code: int = 1):
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    raise SystemExit(code)


def _spec(args) -> ChannelSpec:
    return ChannelSpec(args.k, args.num_types)


def cmd_capacity(args) -> None:
    spec = _spec(args)
    graph = build_constraint_graph(spec)
    res = channel_capacity(spec)
    print(f"lambda={res.lam:.10f}")
    print(f"capacity={res.capacity_bits_per_symbol:.10f}")
    if args.paths:
        print("m,N(m),log2N/m")
        for m, n, r in path_count_table(graph, spec.start_state, args.paths):
            print(f"{m},{n},{r:.10f}")


def cmd_synthesize(args) -> None:
    res = synthesize(_spec(args), args.depth, tol=args.tol, family=args.family)
    res.code.save(args.out)
    print(f"rate={res.rate:.10f}")
    print(f"capacity={res.capacity_bound:.10f}")
    print(f"gap={res.gap:.10f}")


def cmd_encode(args) -> None:
    code = ModulationCode.load(args.code)
    bits = "".join(Path(args.inp).read_text().split())
    if set(bits) - {"0", "1"}:
        _fail("InputError", "bit file may only contain 0 and 1")
    symbols, _pad = encode(code, bits)
    Path(args.out).write_text(format_stream(symbols, len(bits)))


def cmd_decode(args) -> None:
    code = ModulationCode.load(args.code)
    symbols, n_bits = parse_stream(Path(args.inp).read_text())
    Path(args.out).write_text(decode(code, symbols, n_bits) + "\n")


def cmd_rate(args) -> None:
    report = run_monte_carlo(ModulationCode.load(args.code), args.bits, args.seed)
    print(json.dumps(report.to_dict()))


def cmd_table2(args) -> None:
    sys.stdout.write(format_table(reproduce_table2(family=args.family)))


def cmd_sweep(args) -> None:
    config = SweepConfig.load(args.config)
    config.out = args.out
    if args.workers is not None:
        config.workers = args.workers
    rows = sweep(config)
    if args.out is None:
        sys.stdout.write(sweep_csv(rows))
    bad = sum(1 for r in rows if r["error"])
    if bad:
        print(json.dumps({"warning": "failed cells", "count": bad}), file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="isifree", description="ISI-free modulation codes for molecular channels")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def spec_args(sp):
        sp.add_argument("--k", type=int, required=True, help="channel memory in slots")
        sp.add_argument("--num-types", type=int, required=True, help="number of molecule types N")

    sp = sub.add_parser("capacity", help="Perron eigenvalue and capacity")
    spec_args(sp)
    sp.add_argument("--paths", type=int, default=0, metavar="M", help="also print path counts up to M")
    sp.set_defaults(func=cmd_capacity)

    sp = sub.add_parser("synthesize", help="optimal delay-limited code")
    spec_args(sp)
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--tol", type=float, default=BISECTION_TOL)
    sp.add_argument("--family", choices=FAMILIES, default="block")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_synthesize)

    for name, func, what in (("encode", cmd_encode, "bits to symbols"), ("decode", cmd_decode, "symbols to bits")):
        sp = sub.add_parser(name, help=what)
        sp.add_argument("--code", required=True)
        sp.add_argument("--in", dest="inp", required=True)
        sp.add_argument("--out", required=True)
        sp.set_defaults(func=func)

    sp = sub.add_parser("rate", help="Monte-Carlo rate check")
    sp.add_argument("--code", required=True)
    sp.add_argument("--bits", type=int, default=10**6)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_rate)

    sp = sub.add_parser("table2", help="k=1, N=2 rates for MCSK, d=1..5 and capacity")
    sp.add_argument("--family", choices=FAMILIES, default="block")
    sp.set_defaults(func=cmd_table2)

    sp = sub.add_parser("sweep", help="rates over a (k, N, d) grid as CSV")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out")
    sp.add_argument("--workers", type=int)
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if getattr(args, "bits", None) is not None and args.bits < MIN_MC_BITS:
        _fail("ValueError", f"--bits must be >= {MIN_MC_BITS}")
    try:
        args.func(args)
    except (IsiFreeError, ValueError, OSError, json.JSONDecodeError) as exc:
        _fail(type(exc).__name__, str(exc))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
