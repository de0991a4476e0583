"""Command-line entry point: ``bvddmc {gen,eval,convert,check,bench}``.

Exit status: 0 no bad events, 1 bad events reported, 2 usage or model
error, 3 solver unknown or timeout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .arrays import convert_arrays
from .bench import ARRAYS, COLUMNS, MODES, matrix
from .bmc import Options, check
from .btor2 import BtorError, dumps, parse
from .emulator import EvaluationError, input_slots, run_enumerated
from .propagate import PropagationError
from .riscu.benchmarks import corpus, generate_benchmarks, sample
from .riscu.isa import AsmError, assemble
from .riscu.model import GenerationError, MachineConfig, generate_model, input_bytes, manifest
from .smt import DEFAULT_SOLVER

EXIT_OK, EXIT_BAD, EXIT_USAGE, EXIT_UNKNOWN = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read_model(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse(text)


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# -- subcommands ------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.corpus:
        for p in generate_benchmarks(args.corpus, expected=not args.no_expected):
            print(p)
        return EXIT_OK
    if not args.source:
        raise _Usage("gen needs an assembly file or --corpus DIR")
    src = Path(args.source)
    cfg = MachineConfig(
        bytes_to_read=args.bytestoread,
        heap_allowance=args.heapallowance,
        stack_allowance=args.stackallowance,
        virtual_address_space=args.virtualaddressspace,
        bad_exit_code=not args.Pnobadexitcode,
        division_by_zero=not args.Pnodivisionbyzero,
        division_overflow=not args.Pnodivisionoverflow,
        invalid_addresses=not args.Pnoinvalidaddresses,
        segfaults=not args.Pnosegfaults,
    )
    program = assemble(src.read_text())
    model = generate_model(program, cfg)
    stem = Path(args.o) if args.o else src.with_suffix("")
    stem.with_suffix(".btor2").write_text(dumps(model))
    stem.with_suffix(".json").write_text(json.dumps(manifest(program, cfg, model), indent=1) + "\n")
    print(stem.with_suffix(".btor2"))
    return EXIT_OK


def cmd_eval(args) -> int:
    model = _read_model(args.model)
    nbytes = args.bytes
    if nbytes is None:
        nbytes = input_bytes(model)
        if nbytes is None:
            nbytes = len(input_slots(model))
    table = run_enumerated(model, args.kmax, nbytes)
    lines = []
    hit = False
    for inp, r in sorted(table.table.items()):
        key = "".join(f"{v:02x}" for v in inp) or "-"
        if r is None:
            lines.append(f"{key}\t-\t-")
        else:
            hit = True
            lines.append(f"{key}\t{r[0]}\t{','.join(r[1])}")
    _write(args.o, "\n".join(lines) + "\n")
    return EXIT_BAD if hit else EXIT_OK


def cmd_convert(args) -> int:
    model = convert_arrays(_read_model(args.model), args.array, args.recursive_array)
    _write(args.o, dumps(model))
    return EXIT_OK


def _options(args) -> Options:
    backend, block = None, 8
    if args.use_CFLOBVDD is not None:
        backend, block = "CFLOBVDD", args.use_CFLOBVDD
    elif args.use_ROABVDD:
        backend = "ROABVDD"
    return Options(
        kmin=args.kmin, kmax=args.kmax, backend=backend, block_bits=block,
        propagate=args.propagate, array=args.array, recursive_array=args.recursive_array,
        check_termination=args.check_termination, unconstraining_bad=args.unconstraining_bad,
        print_pc=args.print_pc, print_transition=args.print_transition, branching=args.branching,
        solver=args.solver or None, timeout=args.timeout if args.timeout > 0 else None,
        max_paths=args.max_paths,
    )


def cmd_check(args) -> int:
    model = _read_model(args.model)
    report = check(model, _options(args), out=print)
    for e in report.events:
        print(e.line())
    for msg in report.messages:
        print(f"note: {msg}", file=sys.stderr)
    if report.status in ("unknown", "timeout"):
        print(f"status: {report.status}", file=sys.stderr)
    if args.json:
        _write(args.json, report.dumps() + "\n")
    return report.exit_code()


def cmd_bench(args) -> int:
    samples = corpus(include_large=not args.small)
    if args.samples:
        samples = [sample(n) for n in args.samples.split(",")]
    if args.corpus:
        generate_benchmarks(args.corpus, expected=False)
    modes = args.modes.split(",") if args.modes else list(MODES)
    for m in modes:
        if m not in MODES:
            raise _Usage(f"unknown mode {m!r}; choose from {', '.join(MODES)}")
    arrays = [int(a) for a in args.arrays.split(",")] if args.arrays else list(ARRAYS)
    out = open(args.o, "w") if args.o and args.o != "-" else sys.stdout
    try:
        print("\t".join(COLUMNS), file=out, flush=True)
        for row in matrix(samples, modes, arrays, args.timeout or None, args.solver, args.jobs,
                          args.block_bits):
            print(row.tsv(), file=out, flush=True)
            if row.status in ("unknown", "timeout"):
                print(f"note: {row.sample} {row.mode} array={row.array}: {row.status}", file=sys.stderr)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


class _Usage(Exception):
    pass


# -- parser -----------------------------------------------------------------


def _flag(p, name, **kw):
    """Register ``-name`` and ``--name`` as the same option."""
    p.add_argument(f"-{name}", f"--{name}", **kw)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="bvddmc", allow_abbrev=False,
                 description="Bounded model checking of BTOR2 models with bitvector decision diagrams.")
    ap.add_argument("--version", action="version", version=f"bvddmc {__version__}")
    sub = ap.add_subparsers(dest="cmd", parser_class=_Parser)

    g = sub.add_parser("gen", allow_abbrev=False, help="generate a RISC-U machine model from assembly")
    g.add_argument("source", nargs="?", help="assembly file")
    _flag(g, "bytestoread", type=int, default=1)
    _flag(g, "heapallowance", type=int, default=4096)
    _flag(g, "stackallowance", type=int, default=2048)
    _flag(g, "virtualaddressspace", type=int, default=32)
    for name in ("Pnobadexitcode", "Pnodivisionbyzero", "Pnodivisionoverflow",
                 "Pnoinvalidaddresses", "Pnosegfaults"):
        _flag(g, name, action="store_true")
    g.add_argument("-o", metavar="NAME", help="output stem (writes NAME.btor2 and NAME.json)")
    g.add_argument("--corpus", metavar="DIR", help="write the benchmark corpus to DIR instead")
    g.add_argument("--no-expected", action="store_true", help="skip oracle verdicts in corpus manifests")
    g.set_defaults(fn=cmd_gen)

    e = sub.add_parser("eval", allow_abbrev=False, help="exhaustive least-k table over the input bytes")
    e.add_argument("model")
    _flag(e, "kmax", type=int, default=100)
    _flag(e, "bytes", type=int, default=None,
          help="input positions to enumerate, at most 2 (default: the model's bytes-to-read)")
    e.add_argument("-o", metavar="FILE")
    e.set_defaults(fn=cmd_eval)

    c = sub.add_parser("convert", allow_abbrev=False, help="convert small arrays into bitvector states")
    c.add_argument("model")
    _flag(c, "array", type=int, default=8)
    c.add_argument("--recursive-array", action="store_true")
    c.add_argument("-o", metavar="FILE")
    c.set_defaults(fn=cmd_convert)

    k = sub.add_parser("check", allow_abbrev=False, help="bounded model check")
    k.add_argument("model")
    _flag(k, "kmin", type=int, default=0)
    _flag(k, "kmax", type=int, default=100)
    k.add_argument("--use-ROABVDD", action="store_true")
    k.add_argument("--use-CFLOBVDD", type=int, metavar="b", choices=(1, 2, 4, 8))
    _flag(k, "propagate", type=int, default=8)
    _flag(k, "array", type=int, default=8)
    k.add_argument("--recursive-array", action="store_true")
    k.add_argument("--print-pc", action="store_true")
    k.add_argument("--check-termination", action="store_true")
    k.add_argument("--unconstraining-bad", action="store_true")
    k.add_argument("--print-transition", action="store_true")
    k.add_argument("--branching", action="store_true")
    k.add_argument("--max-paths", type=int, default=1024)
    k.add_argument("--solver", default=DEFAULT_SOLVER, help='solver command, "" for none')
    k.add_argument("--timeout", type=float, default=900.0, help="seconds, 0 for none")
    k.add_argument("--json", metavar="FILE", help="write the JSON report ('-' for stdout)")
    k.set_defaults(fn=cmd_check)

    b = sub.add_parser("bench", allow_abbrev=False, help="run the mode x array matrix over the corpus")
    b.add_argument("--samples", help="comma-separated sample names")
    b.add_argument("--small", action="store_true", help="skip samples reading more than two bytes")
    b.add_argument("--modes", help=f"comma-separated subset of {','.join(MODES)}")
    b.add_argument("--arrays", help="comma-separated array sizes (default 0,4,8)")
    b.add_argument("--timeout", type=float, default=300.0)
    b.add_argument("--solver", default=None)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--block-bits", type=int, default=8, choices=(1, 2, 4, 8))
    b.add_argument("--corpus", metavar="DIR", help="also write the generated corpus to DIR")
    b.add_argument("-o", metavar="FILE", help="TSV output (default stdout)")
    b.set_defaults(fn=cmd_bench)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if not getattr(args, "fn", None):
        ap.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return args.fn(args)
    except _Usage as e:
        print(f"bvddmc: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, BtorError, AsmError, GenerationError, EvaluationError, PropagationError,
            KeyError) as e:
        print(f"bvddmc: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
