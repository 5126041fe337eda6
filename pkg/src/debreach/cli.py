"""Command-line front end.

Exit status: 0 on success, 1 for usage errors, 2 when the input data is
rejected (malformed markers, corrupt stream, bad facts file, unreadable file).
"""
from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

from . import attack, bench
from .codec import CompressMode, compress, zlib_unwrap_inflate, zlib_wrap
from .annotation import strip_markers
from .deflate import BLOCK_KINDS
from .errors import CorruptStream, FactsParseError, InvalidArgument, MalformedAnnotation
from .inflate import inflate_stream
from .instrument import SafetyInfo, build_ddg, find_instrumentation_points
from .lz77 import MatchConfig
from .taint import format_derived, parse_derived, parse_facts, solve_taint

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
DATA_ERRORS = (MalformedAnnotation, CorruptStream, FactsParseError, InvalidArgument, OSError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_bytes(text: str) -> bytes:
    """``hex:``-prefixed hex digits, or the literal text as UTF-8."""
    if text.startswith("hex:"):
        try:
            return bytes.fromhex(text[4:])
        except ValueError:
            raise UsageError(f"bad hex value {text!r}") from None
    return text.encode()


def write_atomic(path, data: bytes | str) -> None:
    """Write to a temporary file next to ``path`` and rename it into place."""
    if isinstance(data, str):
        data = data.encode()
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _emit(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        write_atomic(out, text)


def _config(args) -> MatchConfig:
    return MatchConfig(strict_gt=args.strict_gt)


def cmd_compress(args) -> int:
    mode = CompressMode.parse(args.mode)
    if mode is CompressMode.DEBREACH and args.nonce is None:
        raise UsageError("debreach mode requires --nonce")
    nonce = parse_bytes(args.nonce) if args.nonce is not None else None
    data = Path(args.input).read_bytes()
    out = compress(data, nonce, mode, _config(args), args.block)
    payload = bytes(out)
    if args.zlib:
        clean = strip_markers(data, nonce)[0] if nonce is not None else data
        payload = zlib_wrap(payload, clean)
    write_atomic(args.output, payload)
    if args.verbose:
        print(f"{len(data)} -> {len(payload)} bytes ({out.n_blocks} {args.block} block(s))",
              file=sys.stderr)
    return EXIT_OK


def cmd_inflate(args) -> int:
    data = Path(args.input).read_bytes()
    write_atomic(args.output, zlib_unwrap_inflate(data) if args.zlib else inflate_stream(data))
    return EXIT_OK


def cmd_taint(args) -> int:
    facts = parse_facts(Path(args.facts).read_text())
    _emit(format_derived(solve_taint(facts)), args.out)
    return EXIT_OK


def cmd_instrument(args) -> int:
    facts = parse_facts(Path(args.facts).read_text())
    derived = parse_derived(Path(args.derived).read_text())
    ddg = build_ddg(derived.data_dep, derived.tainted_sink)
    plan = find_instrumentation_points(derived.tainted_sink, ddg,
                                       SafetyInfo(facts.unsafe_op, facts.contexts()))
    _emit(plan.format(), args.out)
    return EXIT_OK


def _template(args) -> attack.PageTemplate:
    return attack.PageTemplate.load(args.template) if args.template else attack.PageTemplate.default()


def _alphabet(args) -> bytes:
    alphabet = parse_bytes(args.alphabet) if args.alphabet else attack.EMAIL_ALPHABET
    if not alphabet:
        raise UsageError("alphabet must not be empty")
    return alphabet


def cmd_attack(args) -> int:
    secret = parse_bytes(args.secret)
    oracle = attack.CompressionOracle(_template(args), secret, args.mode, _config(args), args.block)
    max_len = args.max_len if args.max_len is not None else len(secret)
    t = attack.recover_secret(oracle, parse_bytes(args.prefix), _alphabet(args), max_len)
    write_atomic(args.transcript, t.format())
    print(f"recovered={t.recovered.decode('latin-1')} status={t.status} "
          f"oracle_calls={t.oracle_calls} success={t.recovered == secret}")
    return EXIT_OK


def cmd_leak(args) -> int:
    secret = parse_bytes(args.secret)
    max_n = args.max_n if args.max_n is not None else len(secret)
    report = attack.measure_leak(_template(args), secret, _alphabet(args), args.mode, max_n,
                                 parse_bytes(args.prefix), args.agg, _config(args), args.block)
    _emit(report.to_csv(), args.csv)
    return EXIT_OK


def cmd_bench(args) -> int:
    fractions = args.taint_fraction or [0.0]
    rows = bench.bench_corpus(bench.corpus_files(args.corpus), fractions, args.seed, args.block,
                              _config(args), args.workers)
    _emit(bench.rows_to_csv(rows), args.csv)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="debreach", description="Taint-aware DEFLATE compression toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    modes = [m.value for m in CompressMode]

    def lz_opts(sp):
        sp.add_argument("--strict-gt", action="store_true",
                        help="emit only matches longer than the minimum match length")

    c = sub.add_parser("compress", help="compress a (possibly marker-annotated) file")
    c.add_argument("--mode", choices=modes, default="debreach")
    c.add_argument("--nonce", help="marker nonce, literal or hex:..; required in debreach mode")
    c.add_argument("--block", choices=BLOCK_KINDS, default="dynamic")
    c.add_argument("--zlib", action="store_true", help="wrap the output in a zlib container")
    c.add_argument("-v", "--verbose", action="store_true")
    lz_opts(c)
    c.add_argument("input")
    c.add_argument("output")
    c.set_defaults(func=cmd_compress)

    i = sub.add_parser("inflate", help="decompress a raw DEFLATE (or --zlib) file")
    i.add_argument("--zlib", action="store_true")
    i.add_argument("input")
    i.add_argument("output")
    i.set_defaults(func=cmd_inflate)

    t = sub.add_parser("taint", help="derive Tainted/DataDep/TaintedSink from a facts file")
    t.add_argument("--facts", required=True)
    t.add_argument("--out", help="derived-relations file (default: stdout)")
    t.set_defaults(func=cmd_taint)

    n = sub.add_parser("instrument", help="compute annotation points for tainted sinks")
    n.add_argument("--facts", required=True, help="facts with UnsafeOp and Context lines")
    n.add_argument("--derived", required=True, help="output of the taint subcommand")
    n.add_argument("--out", help="Instrument lines (default: stdout)")
    n.set_defaults(func=cmd_instrument)

    def attack_opts(sp):
        sp.add_argument("--mode", choices=modes, default="standard")
        sp.add_argument("--secret", required=True)
        sp.add_argument("--prefix", default=attack.DEFAULT_PREFIX.decode(),
                        help="bytes the attacker already knows precede the secret")
        sp.add_argument("--alphabet", help="candidate bytes (default: e-mail characters)")
        sp.add_argument("--template", help="page with {{SECRET}} and {{INJECT}} slots")
        sp.add_argument("--block", choices=BLOCK_KINDS, default=attack.ATTACK_BLOCK)
        lz_opts(sp)

    a = sub.add_parser("attack", help="run the byte-by-byte compression-oracle attack")
    attack_opts(a)
    a.add_argument("--max-len", type=int)
    a.add_argument("--transcript", required=True, help="log file: pos,guess_byte_hex,size")
    a.set_defaults(func=cmd_attack)

    lr = sub.add_parser("leak-report", help="size difference of correct vs wrong next-byte guesses",
                        description="CSV columns: n,diff_bytes")
    attack_opts(lr)
    lr.add_argument("--max-n", type=int)
    lr.add_argument("--agg", choices=("min", "mean"), default="min")
    lr.add_argument("--csv", help="output file (default: stdout)")
    lr.set_defaults(func=cmd_leak)

    b = sub.add_parser("bench", help="compression ratios of a corpus in all modes",
                       description="CSV columns: " + ",".join(bench.CSV_COLUMNS))
    b.add_argument("--corpus", required=True)
    b.add_argument("--taint-fraction", type=float, action="append",
                   help="repeatable; default 0")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--block", choices=BLOCK_KINDS, default="dynamic")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--csv", help="output file (default: stdout)")
    lz_opts(b)
    b.set_defaults(func=cmd_bench)
    return p


def run_cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except DATA_ERRORS as e:
        print(f"debreach: error: {e}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
