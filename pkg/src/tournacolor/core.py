"""Tournaments as bitset adjacency, exact densities, transitivity and I/O.

Vertices are 0..n-1.  Row ``out[v]`` is an int whose bit ``u`` is set when
the edge v->u exists.  Vertex sets are ints used as bitmasks and wrapped in
:class:`VertexSet` at API boundaries.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, TextIO, Union

from .errors import (
    ArityMismatch,
    EmptySet,
    InvariantViolation,
    NotTransitive,
    Overlap,
    ParseError,
    PartialColoring,
)

Ordering = tuple  # tuple of distinct vertices; positions are 1-based in formulas


def bits(mask: int) -> Iterator[int]:
    """Yield the set bits of mask in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


class VertexSet:
    """Immutable set of vertices stored as a bitmask."""

    __slots__ = ("mask",)

    def __init__(self, members: Union[int, Iterable[int], "VertexSet"] = 0):
        if isinstance(members, VertexSet):
            self.mask = members.mask
        elif isinstance(members, int):
            if members < 0:
                raise ValueError("negative mask")
            self.mask = members
        else:
            self.mask = mask_of(members)

    @classmethod
    def range(cls, n: int) -> "VertexSet":
        return cls((1 << n) - 1)

    def __iter__(self) -> Iterator[int]:
        return bits(self.mask)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, v: int) -> bool:
        return v >= 0 and (self.mask >> v) & 1 == 1

    def __bool__(self) -> bool:
        return self.mask != 0

    def __or__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.mask | as_mask(other))

    def __and__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.mask & as_mask(other))

    def __sub__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.mask & ~as_mask(other))

    def __eq__(self, other) -> bool:
        if isinstance(other, VertexSet):
            return self.mask == other.mask
        if isinstance(other, (set, frozenset)):
            return self.mask == mask_of(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.mask)

    def sorted(self) -> list[int]:
        return list(bits(self.mask))

    def min(self) -> int:
        if not self.mask:
            raise EmptySet("empty vertex set has no minimum")
        return (self.mask & -self.mask).bit_length() - 1

    def __repr__(self) -> str:
        return f"VertexSet({self.sorted()})"


def as_mask(s) -> int:
    if isinstance(s, VertexSet):
        return s.mask
    if isinstance(s, int):
        raise TypeError("pass a VertexSet or an iterable of vertices, not a bare int")
    return mask_of(s)


@dataclass(frozen=True)
class Tournament:
    """Complete oriented graph on vertices 0..n-1."""

    n: int
    out: tuple = field(repr=False)
    inn: tuple = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        n = self.n
        if n < 0:
            raise InvariantViolation("negative vertex count")
        out = tuple(int(r) for r in self.out)
        if len(out) != n:
            raise InvariantViolation(f"expected {n} rows, got {len(out)}")
        full = (1 << n) - 1
        for v, row in enumerate(out):
            if row & ~full:
                raise InvariantViolation(f"row {v} names a vertex outside 0..{n - 1}")
            if (row >> v) & 1:
                raise InvariantViolation(f"diagonal entry ({v},{v}) is set")
        inn = [0] * n
        for v, row in enumerate(out):
            for u in bits(row):
                inn[u] |= 1 << v
        for v in range(n):
            if out[v] & inn[v]:
                u = (out[v] & inn[v]).bit_length() - 1
                raise InvariantViolation(f"pair ({v},{u}) oriented both ways")
            if (out[v] | inn[v]) != full ^ (1 << v):
                missing = full ^ (1 << v) ^ (out[v] | inn[v])
                u = (missing & -missing).bit_length() - 1
                raise InvariantViolation(f"pair ({v},{u}) has no edge")
        object.__setattr__(self, "out", out)
        object.__setattr__(self, "inn", tuple(inn))

    # constructors
    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence[int]]) -> "Tournament":
        n = len(rows)
        out = []
        for i, r in enumerate(rows):
            if len(r) != n:
                raise InvariantViolation(f"row {i} has length {len(r)}, expected {n}")
            out.append(mask_of(j for j, x in enumerate(r) if int(x)))
        return cls(n, tuple(out))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Tournament":
        out = [0] * n
        for u, v in edges:
            out[u] |= 1 << v
        return cls(n, tuple(out))

    @classmethod
    def transitive(cls, n: int) -> "Tournament":
        """The transitive tournament with i -> j for i < j."""
        full = (1 << n) - 1
        return cls(n, tuple(full & ~((1 << (i + 1)) - 1) for i in range(n)))

    @classmethod
    def from_ordering(cls, order: Sequence[int], backward: Iterable[tuple[int, int]]) -> "Tournament":
        """Tournament on the vertices of ``order`` where every edge points
        forward except the listed ``(later, earlier)`` backward pairs."""
        n = len(order)
        pos = {v: i for i, v in enumerate(order)}
        if sorted(pos) != list(range(n)):
            raise InvariantViolation("ordering must list each of 0..n-1 once")
        back = set()
        for a, b in backward:
            if pos[a] <= pos[b]:
                raise InvariantViolation(f"({a},{b}) is not backward under the ordering")
            back.add((a, b))
        edges = []
        for i, u in enumerate(order):
            for w in order[i + 1:]:
                edges.append((w, u) if (w, u) in back else (u, w))
        return cls.from_edges(n, edges)

    # queries
    def has_edge(self, u: int, v: int) -> bool:
        return (self.out[u] >> v) & 1 == 1

    def vertices(self) -> VertexSet:
        return VertexSet.range(self.n)

    def matrix(self) -> list[list[int]]:
        return [[(self.out[i] >> j) & 1 for j in range(self.n)] for i in range(self.n)]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits(self.out[u])]

    def induced(self, s) -> tuple["Tournament", list[int]]:
        """Subtournament on s relabelled 0..|s|-1, plus the label map."""
        verts = list(bits(as_mask(s)))
        index = {v: i for i, v in enumerate(verts)}
        out = []
        for v in verts:
            out.append(mask_of(index[u] for u in bits(self.out[v] & mask_of(verts))))
        return Tournament(len(verts), tuple(out)), verts

    def relabel(self, perm: Sequence[int]) -> "Tournament":
        """Tournament where vertex perm[i] of self becomes vertex i."""
        index = {v: i for i, v in enumerate(perm)}
        return Tournament.from_edges(self.n, [(index[u], index[v]) for u, v in self.edges()])

    def flip(self, u: int, v: int) -> "Tournament":
        """Copy with the edge between u and v reversed."""
        out = list(self.out)
        if self.has_edge(u, v):
            out[u] &= ~(1 << v)
            out[v] |= 1 << u
        else:
            out[v] &= ~(1 << u)
            out[u] |= 1 << v
        return Tournament(self.n, tuple(out))

    def __len__(self) -> int:
        return self.n


def edge_count(T: Tournament, xmask: int, ymask: int) -> int:
    """Number of edges x->y with x in X and y in Y."""
    out = T.out
    return sum((out[x] & ymask).bit_count() for x in bits(xmask))


def directed_density(T: Tournament, X, Y) -> Fraction:
    xm, ym = as_mask(X), as_mask(Y)
    if not xm or not ym:
        raise EmptySet("directed density needs nonempty sets")
    if xm & ym:
        raise Overlap("directed density needs disjoint sets")
    return Fraction(edge_count(T, xm, ym), xm.bit_count() * ym.bit_count())


def _is_transitive_mask(T: Tournament, m: int) -> bool:
    # A tournament is transitive iff its score sequence is 0,1,...,size-1.
    seen = 0
    out = T.out
    for v in bits(m):
        d = (out[v] & m).bit_count()
        if (seen >> d) & 1:
            return False
        seen |= 1 << d
    return True


def is_transitive(T: Tournament, S=None) -> bool:
    m = T.vertices().mask if S is None else as_mask(S)
    return _is_transitive_mask(T, m)


def transitive_ordering(T: Tournament, S=None) -> Ordering:
    m = T.vertices().mask if S is None else as_mask(S)
    if not _is_transitive_mask(T, m):
        raise NotTransitive("set induces a directed cycle")
    out = T.out
    return tuple(sorted(bits(m), key=lambda v: (-(out[v] & m).bit_count(), v)))


def _greedy_mask(T: Tournament, m: int) -> int:
    chosen = 0
    out, inn = T.out, T.inn
    while m:
        v = (m & -m).bit_length() - 1
        chosen |= 1 << v
        rest = m ^ (1 << v)
        n_in = inn[v] & rest
        if 2 * n_in.bit_count() >= rest.bit_count():
            m = n_in
        else:
            m = out[v] & rest
    return chosen


def greedy_log_transitive(T: Tournament, S=None) -> VertexSet:
    """Transitive subset of size at least ceil(log2|S|) - 1.

    Repeatedly keep the lowest vertex and continue inside its larger
    neighbourhood, preferring the in-neighbourhood on ties.
    """
    m = T.vertices().mask if S is None else as_mask(S)
    if not m:
        raise EmptySet("greedy extraction needs a nonempty set")
    return VertexSet(_greedy_mask(T, m))


def substitute(H: Tournament, parts: Sequence[Tournament]) -> Tournament:
    """Replace vertex i of H by a copy of parts[i]."""
    if len(parts) != H.n:
        raise ArityMismatch(f"need {H.n} parts, got {len(parts)}")
    offsets = []
    total = 0
    for F in parts:
        offsets.append(total)
        total += F.n
    edges = []
    for i, F in enumerate(parts):
        oi = offsets[i]
        edges.extend((oi + u, oi + v) for u, v in F.edges())
        for j in bits(H.out[i]):
            oj = offsets[j]
            edges.extend((oi + a, oj + b) for a in range(F.n) for b in range(parts[j].n))
    return Tournament.from_edges(total, edges)


@dataclass(frozen=True)
class Coloring:
    """Total map vertex -> positive colour id."""

    color: dict

    def classes(self) -> dict[int, VertexSet]:
        acc: dict[int, int] = {}
        for v, c in self.color.items():
            acc[c] = acc.get(c, 0) | (1 << v)
        return {c: VertexSet(m) for c, m in sorted(acc.items())}

    @property
    def num_colors(self) -> int:
        return len(set(self.color.values()))

    @classmethod
    def from_classes(cls, classes: Iterable) -> "Coloring":
        color = {}
        for i, s in enumerate(classes, start=1):
            for v in VertexSet(s):
                color[v] = i
        return cls(dict(sorted(color.items())))


def verify_coloring(T: Tournament, col: Coloring) -> bool:
    """True iff no colour class contains a directed triangle."""
    missing = [v for v in range(T.n) if v not in col.color]
    if missing:
        raise PartialColoring(f"vertex {missing[0]} has no colour")
    stray = [v for v in col.color if not 0 <= v < T.n]
    if stray:
        raise InvariantViolation(f"vertex {stray[0]} is not in the tournament")
    for s in col.classes().values():
        if not _is_transitive_mask(T, s.mask):
            return False
    return True


def random_tournament(n: int, seed: int) -> Tournament:
    """Each pair oriented by an independent fair coin from random.Random(seed)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    rng = random.Random(seed)
    out = [0] * n
    for i in range(n):
        k = n - i - 1
        if k == 0:
            break
        r = rng.getrandbits(k)
        for t in range(k):
            j = i + 1 + t
            if (r >> t) & 1:
                out[i] |= 1 << j
            else:
                out[j] |= 1 << i
    return Tournament(n, tuple(out))


# text formats

def format_tournament(T: Tournament) -> str:
    lines = [str(T.n)]
    for i in range(T.n):
        lines.append("".join("1" if (T.out[i] >> j) & 1 else "0" for j in range(T.n)))
    return "\n".join(lines) + "\n"


def parse_tournament_lines(lines: list[str], start: int = 1) -> Tournament:
    """Parse a tournament from lines; ``start`` is the file line number of lines[0]."""
    if not lines or lines[0].strip() == "":
        raise ParseError("missing vertex count", start)
    head = lines[0].strip()
    if not head.isdigit():
        raise ParseError(f"vertex count {head!r} is not a decimal integer", start)
    n = int(head)
    if len(lines) < n + 1:
        raise ParseError(f"expected {n} matrix rows, found {len(lines) - 1}", start + len(lines))
    out = []
    for i in range(n):
        row = lines[i + 1]
        lineno = start + i + 1
        if len(row) != n:
            raise ParseError(f"row has {len(row)} characters, expected {n}", lineno)
        m = 0
        for j, ch in enumerate(row):
            if ch == "1":
                m |= 1 << j
            elif ch != "0":
                raise ParseError(f"unexpected character {ch!r}", lineno)
        out.append(m)
    return Tournament(n, tuple(out))


def _split_lines(text: str) -> list[str]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def read_tournament(stream: TextIO) -> Tournament:
    lines = _split_lines(stream.read())
    T = parse_tournament_lines(lines)
    extra = [i for i in range(T.n + 1, len(lines)) if lines[i].strip()]
    if extra:
        raise ParseError("trailing content after matrix", extra[0] + 1)
    return T


def write_tournament(T: Tournament, stream: TextIO) -> None:
    stream.write(format_tournament(T))


def format_coloring(col: Coloring) -> str:
    return "".join(f"{v} {c}\n" for v, c in sorted(col.color.items()))


def read_coloring(stream: TextIO) -> Coloring:
    color = {}
    for lineno, line in enumerate(_split_lines(stream.read()), start=1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise ParseError("expected 'vertex_id color_id'", lineno)
        v, c = int(parts[0]), int(parts[1])
        if c < 1:
            raise ParseError("colour ids are positive", lineno)
        if v in color:
            raise ParseError(f"vertex {v} coloured twice", lineno)
        color[v] = c
    return Coloring(dict(sorted(color.items())))


def write_coloring(col: Coloring, stream: TextIO) -> None:
    stream.write(format_coloring(col))


@dataclass(frozen=True)
class EmbeddingCertificate:
    """Injective map from the vertices of H into T preserving every edge."""

    mapping: dict

    def verify(self, T: Tournament, H: Tournament) -> bool:
        m = self.mapping
        if sorted(m) != list(range(H.n)) or len(set(m.values())) != H.n:
            return False
        if any(not 0 <= x < T.n for x in m.values()):
            return False
        return all(T.has_edge(m[u], m[v]) for u, v in H.edges())
