"""Command line front end: ``tournacolor <verb> [files] [flags]``.

Exit codes: 0 success, 1 invalid input, 2 contract violation, 3 budget
exceeded.  Orderings are printed with 1-based labels; vertex ids in files and
in printed sets are 0-based like the file formats.
"""

from __future__ import annotations

import argparse
import io
import os
import sys
import tempfile
import time
from dataclasses import replace
from fractions import Fraction
from typing import Optional, Sequence

from . import engine
from .core import (Tournament, VertexSet, _is_transitive_mask, bits, format_coloring,
                   format_tournament, greedy_log_transitive, random_tournament, read_coloring,
                   read_tournament, verify_coloring)
from .errors import InputError, InternalContractViolation, ParseError, TournaError
from .oracles import OracleBudget, max_transitive_exact
from .patterns import (CATALOG, SEARCH_LIMIT, Pattern, catalog, check_ordering, constellation_report,
                       find_constellation_ordering, find_galaxy_ordering, is_constellation_ordering,
                       is_galaxy_ordering, parse_ordering, read_pattern)
from .sequences import Report, SequenceParams, parse_sequence, validate_sequence

VERBS = ("gen", "recognize", "color", "transitive", "verify", "verify-seq", "bench")
EXIT = {"input": 1, "contract": 2, "budget": 3}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational p/q, got {text!r}") from None


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--n", type=_nonneg)
    common.add_argument("--seed", type=int)
    common.add_argument("--pattern", help="catalog name or pattern file")
    common.add_argument("--ordering", help="file holding one ordering line (0-based ids)")
    common.add_argument("--mode", choices=("strict", "relaxed"))
    common.add_argument("--lambda", dest="lam", type=_fraction)
    common.add_argument("--Lambda", dest="Lambda", type=_fraction)
    common.add_argument("--k", type=_nonneg)
    common.add_argument("--epsilon", type=_fraction)
    common.add_argument("--c", type=_fraction, help="size constant for verify-seq")
    common.add_argument("--oracle", action="store_true")
    common.add_argument("--oracle-cap", dest="oracle_cap", type=_nonneg)
    common.add_argument("--fallback", choices=("oracle", "greedy", "singleton"))
    common.add_argument("--jobs", type=_positive, default=1,
                        help="accepted for scripts; searches run in this process")
    common.add_argument("--out", help="output path (written atomically); stdout when absent")
    common.add_argument("--config", help="key=value configuration file")

    p = _Parser(prog="tournacolor", description="Colour H-free tournaments and check the pieces.")
    sub = p.add_subparsers(dest="verb", metavar="verb", parser_class=_Parser)
    sub.required = True
    sub.add_parser("gen", parents=[common], help="write a random tournament")
    r = sub.add_parser("recognize", parents=[common], help="constellation and galaxy verdicts")
    r.add_argument("pattern_file", nargs="?", help="pattern file (alternative to --pattern)")
    c = sub.add_parser("color", parents=[common], help="colour a tournament")
    c.add_argument("tournament")
    t = sub.add_parser("transitive", parents=[common], help="extract one transitive set")
    t.add_argument("tournament")
    v = sub.add_parser("verify", parents=[common], help="check a coloring file")
    v.add_argument("tournament")
    v.add_argument("coloring")
    s = sub.add_parser("verify-seq", parents=[common], help="validate a sequence file")
    s.add_argument("tournament")
    s.add_argument("sequence")
    b = sub.add_parser("bench", parents=[common], help="time each stage on a random tournament")
    b.add_argument("tournament", nargs="?")
    return p


# io helpers

def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_tournament(path: str) -> Tournament:
    return read_tournament(io.StringIO(_read_text(path)))


def _load_host(spec: str) -> Tournament:
    """A tournament file, a pattern file (ordering line ignored) or a catalog name."""
    if spec in CATALOG and not os.path.exists(spec):
        return catalog(spec).tournament
    return read_pattern(io.StringIO(_read_text(spec))).tournament


def atomic_write(path: str, text: str) -> None:
    """Write text to path via a temporary file in the same directory and a rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=d)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str, out) -> None:
    if args.out:
        atomic_write(args.out, text)
    else:
        out.write(text)


def compress_ordering(theta: Sequence[int]) -> str:
    """1-based labels with ascending consecutive runs written a..b."""
    labels = [v + 1 for v in theta]
    parts, i = [], 0
    while i < len(labels):
        j = i
        while j + 1 < len(labels) and labels[j + 1] == labels[j] + 1:
            j += 1
        if j - i >= 2:
            parts.append(f"{labels[i]}..{labels[j]}")
        else:
            parts.extend(str(x) for x in labels[i:j + 1])
        i = j + 1
    return ",".join(parts)


def _load_pattern(args, positional: Optional[str] = None) -> Pattern:
    spec = positional or args.pattern
    if spec is None:
        raise InputError("a pattern is required (--pattern NAME|FILE)")
    if positional is None and spec in CATALOG:
        pat = catalog(spec)
    elif os.path.exists(spec):
        pat = read_pattern(io.StringIO(_read_text(spec)), os.path.basename(spec))
    else:
        raise InputError(f"{spec!r} is neither a catalog pattern ({', '.join(sorted(CATALOG))}) nor a file")
    if args.ordering:
        lines = [l for l in _read_text(args.ordering).splitlines() if l.strip()]
        if len(lines) != 1:
            raise ParseError("ordering file must hold exactly one line", 1)
        pat = replace(pat, ordering=parse_ordering(lines[0], pat.tournament.n))
    return pat


def _config(args) -> engine.EngineConfig:
    cfg = engine.parse_config(_read_text(args.config)) if args.config else engine.EngineConfig()
    over = {}
    for attr, key in (("mode", "mode"), ("lam", "lam"), ("k", "k"), ("Lambda", "Lambda"),
                      ("epsilon", "epsilon"), ("oracle_cap", "oracle_cap"), ("fallback", "fallback"),
                      ("seed", "seed")):
        v = getattr(args, attr)
        if v is not None:
            over[key] = v
    return replace(cfg, **over)


# verbs

def _gen(args, out, err) -> int:
    if args.n is None:
        raise InputError("gen needs --n")
    T = random_tournament(args.n, args.seed or 0)
    _emit(args, format_tournament(T), out)
    return 0


def _verdict(H: Tournament, theta: tuple, test, search, explicit: bool) -> str:
    if test(H, theta):
        return f"yes, ordering {compress_ordering(theta)}"
    if explicit:
        return f"no, under ordering {compress_ordering(theta)}"
    if H.n > SEARCH_LIMIT:
        return (f"no, under ordering {compress_ordering(theta)} "
                f"(search skipped: {H.n} vertices exceed the limit of {SEARCH_LIMIT})")
    found = search(H)
    if found is None:
        total = 1
        for i in range(2, H.n + 1):
            total *= i
        return f"no, none of the {total} orderings"
    return f"yes, ordering {compress_ordering(found)}"


def _recognize(args, out, err) -> int:
    pat = _load_pattern(args, args.pattern_file)
    H = pat.tournament
    theta = check_ordering(H, pat.ordering)
    explicit = args.ordering is not None
    out.write(f"constellation: {_verdict(H, theta, is_constellation_ordering, find_constellation_ordering, explicit)}\n")
    out.write(f"galaxy: {_verdict(H, theta, is_galaxy_ordering, find_galaxy_ordering, explicit)}\n")
    return 0


def _usable_ordering(pat: Pattern, explicit: bool) -> tuple[Optional[tuple], str]:
    H = pat.tournament
    theta = check_ordering(H, pat.ordering)
    reason = constellation_report(H, theta)
    if reason is None:
        return theta, ""
    if explicit or H.n > SEARCH_LIMIT:
        return None, reason
    found = find_constellation_ordering(H)
    if found is None:
        return None, "the pattern admits no constellation ordering"
    return found, ""


def _color(args, out, err) -> int:
    T = _load_tournament(args.tournament)
    pat = _load_pattern(args)
    cfg = _config(args)
    theta, reason = _usable_ordering(pat, args.ordering is not None)
    if theta is None:
        err.write(f"note: {pat.name} is not a constellation ({reason}); "
                  "classes come from the fallback ladder\n")
        run = engine.color_with_fallback(T, cfg)
    else:
        run = engine.color_h_free_detailed(pat.tournament, T, cfg, theta)
    col = run.coloring
    if not verify_coloring(T, col):
        raise InternalContractViolation("produced coloring is improper")
    text = format_coloring(col)
    line = f"classes: {col.num_colors}\n"
    if args.out:
        atomic_write(args.out, text)
        out.write(line)
    else:
        out.write(text)
        err.write(line)
    return 0


def _transitive(args, out, err) -> int:
    T = _load_host(args.tournament)
    if args.oracle:
        cap = args.oracle_cap if args.oracle_cap is not None else 24
        S = max_transitive_exact(T, None, OracleBudget(max_n=cap))
        how = "oracle"
    elif args.pattern:
        pat = _load_pattern(args)
        cfg = _config(args)
        theta, _ = _usable_ordering(pat, args.ordering is not None)
        log: list = []
        if theta is None:
            m, how = engine.fallback_extract(T, T.vertices().mask, cfg)
        else:
            m = engine._chain_extract(pat.tournament, theta, T, T.vertices().mask, cfg, log)
            how = log[-1][0] if log else "chain"
        S = VertexSet(m)
    else:
        S = greedy_log_transitive(T)
        how = "greedy"
    if not _is_transitive_mask(T, S.mask):
        raise InternalContractViolation(f"{how} returned a non-transitive set")
    text = f"transitive set ({how}, size {len(S)}): {' '.join(str(v) for v in S)}\n"
    _emit(args, text, out)
    return 0


def _triangle(T: Tournament, m: int) -> Optional[tuple]:
    for u in bits(m):
        for v in bits(T.out[u] & m):
            w = T.out[v] & T.inn[u] & m
            if w:
                return u, v, (w & -w).bit_length() - 1
    return None


def _verify(args, out, err) -> int:
    T = _load_tournament(args.tournament)
    col = read_coloring(io.StringIO(_read_text(args.coloring)))
    if verify_coloring(T, col):
        out.write(f"proper: {col.num_colors} classes\n")
        return 0
    for c, s in col.classes().items():
        tri = _triangle(T, s.mask)
        if tri:
            out.write(f"improper: class {c} contains the directed triangle {tri[0]} -> {tri[1]} -> {tri[2]}\n")
            break
    return 2


def _verify_seq(args, out, err) -> int:
    T = _load_tournament(args.tournament)
    seq = parse_sequence(T, _read_text(args.sequence))
    # Without --c only nonemptiness is checked: ceil(c * n**eps) = 1.
    # Without --lambda densities are not constrained.
    c = args.c if args.c is not None else Fraction(1, T.n + 1)
    lam = args.lam if args.lam is not None else Fraction(0)
    eps = args.epsilon if args.epsilon is not None else Fraction(1)
    rep = validate_sequence(T, seq, SequenceParams(c, lam, eps))
    if args.lam is None:
        rep = Report(*_kept(rep, "density"))
    kind = seq.kind() or "m"
    if rep.ok:
        out.write(f"{kind}-sequence of length {len(seq)}: valid\n")
        return 0
    out.write(f"{kind}-sequence of length {len(seq)}: {rep}\n")
    return 2


def _kept(rep: Report, drop: str) -> tuple:
    vs = tuple(v for v in rep.violations if v.kind != drop)
    return not vs, vs


def _bench(args, out, err) -> int:
    if args.tournament:
        T = _load_tournament(args.tournament)
    else:
        T = random_tournament(args.n if args.n is not None else 64, args.seed or 0)
    pat = _load_pattern(args) if args.pattern else catalog("fig3")
    cfg = _config(args)
    rows = []

    def stage(name, fn):
        t0 = time.perf_counter()
        res = fn()
        rows.append((name, time.perf_counter() - t0, res))

    stage("greedy", lambda: f"size {len(greedy_log_transitive(T))}")
    if T.n <= cfg.oracle_cap:
        stage("oracle", lambda: f"size {len(max_transitive_exact(T))}")
    h = pat.tournament.n
    lam = cfg.lam if cfg.lam is not None else Fraction(1, 4)
    k = cfg.k if cfg.k is not None else 2

    def find_l():
        try:
            r = engine.find_l_sequence(T, pat.tournament, lam, k, engine.RELAXED)
        except TournaError as exc:
            return type(exc).__name__
        return "certificate" if not hasattr(r, "elements") else f"sequence of length {len(r)}"

    stage("find_l_sequence", find_l)
    theta, _ = _usable_ordering(pat, args.ordering is not None)

    def colour():
        if theta is None:
            run = engine.color_with_fallback(T, cfg)
        else:
            run = engine.color_h_free_detailed(pat.tournament, T, cfg, theta)
        return f"{run.coloring.num_colors} classes"

    stage("color", colour)
    width = max(len(r[0]) for r in rows)
    text = "".join(f"{name:<{width}}  {secs:9.4f} s  {res}\n" for name, secs, res in rows)
    _emit(args, text, out)
    return 0


_HANDLERS = {"gen": _gen, "recognize": _recognize, "color": _color, "transitive": _transitive,
             "verify": _verify, "verify-seq": _verify_seq, "bench": _bench}


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.verb](args, out, err)
    except TournaError as exc:
        err.write(f"error ({exc.category}): {exc}\n")
        payload = getattr(exc, "payload", None)
        if payload is not None:
            err.write(f"report: {payload}\n")
        return EXIT[exc.category]
    except KeyError as exc:
        err.write(f"error (input): {exc.args[0] if exc.args else exc}\n")
        return 1
    except OSError as exc:
        err.write(f"error (input): {exc}\n")
        return 1


def main() -> None:
    sys.exit(run())
