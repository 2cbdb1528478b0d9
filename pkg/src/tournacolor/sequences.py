"""Sequences of vertex sets and exact validators for their density contracts.

Validators never raise on a failed check.  They return a :class:`Report`
listing every violation (indices are 1-based, as in the definitions) and
only raise when the request itself is malformed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, TextIO, Union

from .core import Tournament, VertexSet, _is_transitive_mask, _split_lines, as_mask, edge_count
from .errors import BadIndexSet, InvariantViolation, ParseError, RolePatternMismatch
from .exact import Monomial, at_most_times, ceil_times_power

LINEAR = "linear"
TRANSITIVE = "transitive"

Number = Union[int, Fraction, Monomial]


@dataclass(frozen=True)
class MSequence:
    """Ordered disjoint vertex sets tagged linear or transitive."""

    host: Tournament
    elements: tuple  # of (VertexSet, role)

    def __post_init__(self):
        els = tuple((VertexSet(s), r) for s, r in self.elements)
        seen = 0
        for i, (s, r) in enumerate(els, start=1):
            if r not in (LINEAR, TRANSITIVE):
                raise InvariantViolation(f"element {i} has unknown role {r!r}")
            if s.mask & seen:
                raise InvariantViolation(f"element {i} overlaps an earlier element")
            if s.mask >> self.host.n:
                raise InvariantViolation(f"element {i} names vertices outside the host")
            seen |= s.mask
        object.__setattr__(self, "elements", els)

    @classmethod
    def linear(cls, T: Tournament, sets: Iterable) -> "MSequence":
        return cls(T, tuple((VertexSet(s), LINEAR) for s in sets))

    @classmethod
    def transitive(cls, T: Tournament, sets: Iterable) -> "MSequence":
        return cls(T, tuple((VertexSet(s), TRANSITIVE) for s in sets))

    @classmethod
    def mixed(cls, T: Tournament, sets: Iterable) -> "MSequence":
        """Alternate linear, transitive, linear, ... starting with linear."""
        return cls(T, tuple((VertexSet(s), LINEAR if i % 2 == 0 else TRANSITIVE)
                            for i, s in enumerate(sets)))

    def __len__(self) -> int:
        return len(self.elements)

    def sets(self) -> list[VertexSet]:
        return [s for s, _ in self.elements]

    def roles(self) -> list[str]:
        return [r for _, r in self.elements]

    def linear_sets(self) -> list[VertexSet]:
        return [s for s, r in self.elements if r == LINEAR]

    def transitive_sets(self) -> list[VertexSet]:
        return [s for s, r in self.elements if r == TRANSITIVE]

    def kind(self) -> Optional[str]:
        roles = self.roles()
        if all(r == LINEAR for r in roles):
            return "l"
        if all(r == TRANSITIVE for r in roles):
            return "t"
        if len(roles) % 2 == 1 and all(r == (LINEAR if i % 2 == 0 else TRANSITIVE)
                                       for i, r in enumerate(roles)):
            return "m"
        return None

    def without(self, index: int) -> "MSequence":
        """Copy with the element at 1-based ``index`` removed."""
        els = list(self.elements)
        del els[index - 1]
        return MSequence(self.host, tuple(els))


@dataclass(frozen=True)
class SequenceParams:
    c: Number
    lam: Number = Fraction(0)
    eps: Fraction = Fraction(1)
    Lambda: Optional[Fraction] = None
    M: Optional[Number] = None
    f: Optional[Fraction] = None
    xi: Optional[Fraction] = None

    def __post_init__(self):
        for name in ("lam", "eps"):
            v = getattr(self, name)
            if not isinstance(v, Monomial) and not hasattr(v, "hi"):
                object.__setattr__(self, name, Fraction(v))
        if not isinstance(self.c, Monomial):
            object.__setattr__(self, "c", Fraction(self.c))
        if not isinstance(self.c, Monomial) and not self.c > 0:
            raise ValueError("c must be positive")
        if not isinstance(self.lam, Monomial) and not (0 <= self.lam < 1):
            raise ValueError("lambda must lie in [0,1)")
        if not (0 < _eps_upper(self.eps) <= 1):
            raise ValueError("epsilon must lie in (0,1]")


@dataclass(frozen=True)
class Violation:
    kind: str  # "density", "vertex-density", "size", "transitive", "strong", "big", "saturation"
    where: tuple
    detail: str

    def __str__(self) -> str:
        return f"{self.kind} {self.where}: {self.detail}"


@dataclass(frozen=True)
class Report:
    ok: bool
    violations: tuple = field(default=())

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "invalid:\n" + "\n".join(f"  {v}" for v in self.violations)


def _report(violations: list) -> Report:
    return Report(not violations, tuple(violations))


@dataclass(frozen=True)
class LogBound:
    """The real number log2(x) - offset, compared exactly against sizes."""

    x: Number
    offset: int = 0

    def met_by(self, size: int) -> bool:
        # size >= log2(x) - offset  <=>  2**(size + offset) >= x
        if Monomial.of(self.x) <= 1:
            return size + self.offset >= 0
        return Monomial.pow2(size + self.offset) >= self.x


def _forward_ok(T: Tournament, xm: int, ym: int, lam: Number) -> tuple[bool, Fraction]:
    total = xm.bit_count() * ym.bit_count()
    e = edge_count(T, xm, ym)
    return at_most_times(total - e, lam, total), Fraction(e, total)


def _density_checks(T, seq, pairs, lam, out):
    sets = seq.sets()
    for i, j in pairs:
        xm, ym = sets[i].mask, sets[j].mask
        if not xm or not ym:
            continue
        ok, d = _forward_ok(T, xm, ym, lam)
        if not ok:
            out.append(Violation("density", (i + 1, j + 1), f"d = {d} < 1 - lambda"))


def _vertex_checks(T, seq, pairs, lam, out):
    """For each (i, j): every v in elem i sends >= (1-lam) into elem j, and
    every w in elem j receives >= (1-lam) from elem i."""
    sets = seq.sets()
    for i, j in pairs:
        xm, ym = sets[i].mask, sets[j].mask
        if not xm or not ym:
            continue
        ny, nx = ym.bit_count(), xm.bit_count()
        for v in sets[i]:
            miss = ny - (T.out[v] & ym).bit_count()
            if not at_most_times(miss, lam, ny):
                out.append(Violation("vertex-density", (i + 1, j + 1, v),
                                     f"d({{{v}}}, elem {j + 1}) = {Fraction(ny - miss, ny)}"))
        for w in sets[j]:
            miss = nx - (T.inn[w] & xm).bit_count()
            if not at_most_times(miss, lam, nx):
                out.append(Violation("vertex-density", (i + 1, j + 1, w),
                                     f"d(elem {i + 1}, {{{w}}}) = {Fraction(nx - miss, nx)}"))


def _eps_upper(eps):
    hi = getattr(eps, "hi", None)
    return Fraction(hi) if hi is not None else Fraction(eps)


def _size_checks(T, seq, p: SequenceParams, out):
    n = T.n
    lin_floor = ceil_times_power(p.c, n) if n else 0
    tr_floor = ceil_times_power(p.c, n, _eps_upper(p.eps)) if n else 0
    for i, (s, r) in enumerate(seq.elements, start=1):
        need = lin_floor if r == LINEAR else tr_floor
        if len(s) < need or len(s) == 0:
            out.append(Violation("size", (i,), f"|elem| = {len(s)} < {max(need, 1)}"))
        if r == TRANSITIVE and not _is_transitive_mask(T, s.mask):
            out.append(Violation("transitive", (i,), "transitive-role set contains a cycle"))


def matches_kind(seq: MSequence, kind: str) -> bool:
    roles = seq.roles()
    if kind == "l":
        return all(r == LINEAR for r in roles)
    if kind == "t":
        return all(r == TRANSITIVE for r in roles)
    if kind == "m":
        return len(roles) % 2 == 1 and all(
            r == (LINEAR if i % 2 == 0 else TRANSITIVE) for i, r in enumerate(roles))
    raise ValueError(f"unknown kind {kind!r}")


def _require(seq: MSequence, kind: str):
    if not matches_kind(seq, kind):
        raise RolePatternMismatch(f"sequence roles {seq.roles()} do not form an {kind}-sequence")


def _all_pairs(k: int):
    return [(i, j) for i in range(k) for j in range(i + 1, k)]


def _m_pairs(k2: int):
    """Ordered element pairs (a, b), a < b, constrained in an m-sequence of
    length k2 = 2k+1.  Element index 2i (0-based) is A_{i+1}, 2i+1 is T_{i+1}.

    A_i -> A_j (i<j), T_i -> T_j (i<j), A_i -> T_j (i<=j), T_i -> A_j (i<j):
    in element positions this is every a < b.
    """
    return _all_pairs(k2)


def validate_l_sequence(T: Tournament, seq: MSequence, p: SequenceParams) -> Report:
    _require(seq, "l")
    out: list = []
    _size_checks(T, seq, p, out)
    _density_checks(T, seq, _all_pairs(len(seq)), p.lam, out)
    return _report(out)


def validate_t_sequence(T: Tournament, seq: MSequence, p: SequenceParams) -> Report:
    _require(seq, "t")
    out: list = []
    _size_checks(T, seq, p, out)
    _density_checks(T, seq, _all_pairs(len(seq)), p.lam, out)
    return _report(out)


def validate_m_sequence(T: Tournament, seq: MSequence, p: SequenceParams) -> Report:
    _require(seq, "m")
    out: list = []
    _size_checks(T, seq, p, out)
    _density_checks(T, seq, _m_pairs(len(seq)), p.lam, out)
    return _report(out)


def validate_sequence(T: Tournament, seq: MSequence, p: SequenceParams,
                      kind: Optional[str] = None) -> Report:
    kind = kind or seq.kind()
    if kind == "l":
        return validate_l_sequence(T, seq, p)
    if kind == "t":
        return validate_t_sequence(T, seq, p)
    if kind == "m":
        return validate_m_sequence(T, seq, p)
    raise RolePatternMismatch(f"roles {seq.roles()} match no sequence kind")


def validate_smooth(T: Tournament, seq: MSequence, p: SequenceParams,
                    kind: Optional[str] = None) -> Report:
    """Plain checks plus every single-vertex bound of the smooth variant."""
    base = validate_sequence(T, seq, p, kind)
    out = list(base.violations)
    # In all three kinds every ordered pair of element positions a < b is
    # constrained, in both single-vertex directions.
    _vertex_checks(T, seq, _all_pairs(len(seq)), p.lam, out)
    return _report(out)


def _t_index(seq: MSequence) -> list[int]:
    return [i for i, (_, r) in enumerate(seq.elements) if r == TRANSITIVE]


def validate_strong(T: Tournament, seq: MSequence, I: Iterable[int]) -> Report:
    """Density exactly 1 between the I-indexed transitive sets (1-based)."""
    idx = _t_index(seq)
    I = sorted(set(int(i) for i in I))
    bad = [i for i in I if not 1 <= i <= len(idx)]
    if bad:
        raise BadIndexSet(f"indices {bad} do not name transitive elements (1..{len(idx)})")
    sets = seq.sets()
    out = []
    for a in range(len(I)):
        for b in range(a + 1, len(I)):
            xm, ym = sets[idx[I[a] - 1]].mask, sets[idx[I[b] - 1]].mask
            if not xm or not ym:
                continue
            e = edge_count(T, xm, ym)
            if e != xm.bit_count() * ym.bit_count():
                out.append(Violation("strong", (I[a], I[b]),
                                     f"d(T_{I[a]}, T_{I[b]}) = {Fraction(e, xm.bit_count() * ym.bit_count())}"))
    return _report(out)


def validate_M_big(seq: MSequence, M) -> Report:
    out = []
    for t, i in enumerate(_t_index(seq), start=1):
        size = len(seq.elements[i][0])
        ok = M.met_by(size) if isinstance(M, LogBound) else size >= M
        if not ok:
            out.append(Violation("big", (t,), f"|T_{t}| = {size} < {M}"))
    return _report(out)


@dataclass(frozen=True)
class SaturatedPair:
    A1: VertexSet
    T1: VertexSet


def validate_saturated(T: Tournament, pair, c: Number, eps) -> Report:
    A1, T1 = (pair.A1, pair.T1) if isinstance(pair, SaturatedPair) else pair
    am, tm = as_mask(A1), as_mask(T1)
    n = T.n
    out = []
    if am & tm:
        out.append(Violation("saturation", ("overlap",), "A1 and T1 intersect"))
    if not _is_transitive_mask(T, tm):
        out.append(Violation("transitive", ("T1",), "T1 contains a cycle"))
    need_a = ceil_times_power(c, n)
    if am.bit_count() < max(need_a, 1):
        out.append(Violation("size", ("A1",), f"|A1| = {am.bit_count()} < {need_a}"))
    need_t = ceil_times_power(c, n, _eps_upper(eps))
    if tm.bit_count() < max(need_t, 1):
        out.append(Violation("size", ("T1",), f"|T1| = {tm.bit_count()} < {need_t}"))
    if am and tm and not am & tm:
        total = am.bit_count() * tm.bit_count()
        e = edge_count(T, am, tm)
        if e != total and e != 0:
            out.append(Violation("saturation", ("density",),
                                 f"d(A1,T1) = {Fraction(e, total)}, neither direction complete"))
    return _report(out)


# text format

def format_sequence(seq: MSequence, kind: Optional[str] = None) -> str:
    kind = kind or seq.kind() or "m"
    lines = [f"{kind} {len(seq)}"]
    for s, r in seq.elements:
        lines.append(" ".join([r, str(len(s))] + [str(v) for v in s]))
    return "\n".join(lines) + "\n"


def parse_sequence(T: Tournament, text: str) -> MSequence:
    lines = [(i, l) for i, l in enumerate(_split_lines(text), start=1) if l.strip()]
    if not lines:
        raise ParseError("missing header", 1)
    no, head = lines[0]
    parts = head.split()
    if len(parts) != 2 or parts[0] not in ("l", "t", "m") or not parts[1].isdigit():
        raise ParseError("header must be 'kind k' with kind in l, t, m", no)
    kind, k = parts[0], int(parts[1])
    body = lines[1:]
    if len(body) != k:
        raise ParseError(f"header announces {k} elements, found {len(body)}", no)
    els = []
    for no, line in body:
        parts = line.split()
        if len(parts) < 2 or parts[0] not in (LINEAR, TRANSITIVE) or not all(x.isdigit() for x in parts[1:]):
            raise ParseError("element line must be 'role size v1 v2 ...'", no)
        size = int(parts[1])
        verts = [int(x) for x in parts[2:]]
        if len(verts) != size:
            raise ParseError(f"size {size} does not match {len(verts)} listed vertices", no)
        if any(v >= T.n for v in verts):
            raise ParseError("vertex outside the tournament", no)
        if len(set(verts)) != len(verts):
            raise ParseError("repeated vertex", no)
        els.append((VertexSet(verts), parts[0]))
    seq = MSequence(T, tuple(els))
    if not matches_kind(seq, kind):
        raise RolePatternMismatch(f"roles do not match declared kind {kind!r}")
    return seq


def read_sequence(T: Tournament, stream: TextIO) -> MSequence:
    return parse_sequence(T, stream.read())


def write_sequence(seq: MSequence, stream: TextIO) -> None:
    stream.write(format_sequence(seq))
