"""Forbidden patterns: backward-edge graphs, stars, partitions, recognition."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

from .core import Tournament, _split_lines, parse_tournament_lines
from .errors import BadOrdering, NotConstellation, NotStarForest, ParseError, TooLarge

SEARCH_LIMIT = 9


@dataclass(frozen=True)
class BackwardGraph:
    base: tuple
    edges: frozenset  # of (u, v) with u earlier than v under base

    def neighbours(self) -> dict[int, set]:
        adj = {v: set() for v in self.base}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def positions(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.base)}


@dataclass(frozen=True)
class Star:
    center: int
    leaves: tuple  # in ordering order
    side: str  # "left" or "right"

    @property
    def vertices(self) -> frozenset:
        return frozenset((self.center,) + self.leaves)


@dataclass(frozen=True)
class StarDecomposition:
    stars: tuple
    singletons: tuple
    base: tuple

    def centers(self) -> set:
        return {s.center for s in self.stars}

    def leaves(self) -> set:
        return {v for s in self.stars for v in s.leaves}


@dataclass(frozen=True)
class InterstellarGraph:
    nodes: tuple  # leaf tuples, one per star, in star order
    edges: frozenset  # of index pairs (i, j), i < j

    def components(self) -> list[list[int]]:
        parent = list(range(len(self.nodes)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in self.edges:
            parent[find(i)] = find(j)
        groups: dict[int, list[int]] = {}
        for i in range(len(self.nodes)):
            groups.setdefault(find(i), []).append(i)
        return sorted(groups.values())


@dataclass(frozen=True)
class ThetaPartition:
    blocks: tuple  # of (tag, tuple of vertices in ordering order); tag "W" or "M"

    def block_of(self) -> dict[int, int]:
        return {v: i for i, (_, vs) in enumerate(self.blocks) for v in vs}


@dataclass(frozen=True)
class ZetaMap:
    pos: dict
    h: int


def check_ordering(H: Tournament, theta: Sequence[int]) -> tuple:
    theta = tuple(int(v) for v in theta)
    if sorted(theta) != list(range(H.n)):
        raise BadOrdering(f"ordering {theta} is not a permutation of 0..{H.n - 1}")
    return theta


def backward_edge_graph(H: Tournament, theta: Sequence[int]) -> BackwardGraph:
    theta = check_ordering(H, theta)
    edges = set()
    for i, u in enumerate(theta):
        for v in theta[i + 1:]:
            if H.has_edge(v, u):
                edges.add((u, v))
    return BackwardGraph(theta, frozenset(edges))


def star_decomposition(B: BackwardGraph) -> StarDecomposition:
    adj = B.neighbours()
    pos = B.positions()
    seen: set = set()
    stars, singles = [], []
    for v in B.base:
        if v in seen:
            continue
        comp, stack = [], [v]
        seen.add(v)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        comp.sort(key=pos.__getitem__)
        if len(comp) == 1:
            singles.append(comp[0])
            continue
        m = sum(len(adj[x]) for x in comp) // 2
        if len(comp) == 2:
            center = comp[1]  # two-vertex star: the later vertex is the center
        else:
            hubs = [x for x in comp if len(adj[x]) == len(comp) - 1]
            if m != len(comp) - 1 or len(hubs) != 1:
                raise NotStarForest(f"component {comp} is not a star", comp)
            center = hubs[0]
        if center == comp[-1]:
            side = "right"
        elif center == comp[0]:
            side = "left"
        else:
            raise NotStarForest(f"component {comp} has its center between leaves", comp)
        leaves = tuple(x for x in comp if x != center)
        stars.append(Star(center, leaves, side))
    return StarDecomposition(tuple(stars), tuple(singles), B.base)


def interstellar_graph(D: StarDecomposition, theta: Sequence[int]) -> InterstellarGraph:
    pos = {v: i for i, v in enumerate(theta)}
    nodes = tuple(s.leaves for s in D.stars)
    spans = [(min(pos[x] for x in L), max(pos[x] for x in L)) for L in nodes]
    edges = set()
    for i, j in itertools.combinations(range(len(nodes)), 2):
        (l1, r1), (l2, r2) = spans[i], spans[j]
        if l1 < r2 and l2 < r1:
            edges.add((i, j))
    return InterstellarGraph(nodes, frozenset(edges))


def _partition(theta: tuple, D: StarDecomposition) -> ThetaPartition:
    pos = {v: i for i, v in enumerate(theta)}
    G = interstellar_graph(D, theta)
    hulls = []
    for comp in G.components():
        ps = [pos[x] for i in comp for x in G.nodes[i]]
        hulls.append((min(ps), max(ps)))
    hulls.sort()
    blocks = []
    prev = -1
    for lo, hi in hulls:
        if lo > prev + 1:
            blocks.append(("M", theta[prev + 1:lo]))
        blocks.append(("W", theta[lo:hi + 1]))
        prev = hi
    if prev + 1 < len(theta):
        blocks.append(("M", theta[prev + 1:]))
    return ThetaPartition(tuple(blocks))


def theta_partition(H: Tournament, theta: Sequence[int]) -> ThetaPartition:
    theta = check_ordering(H, theta)
    D = star_decomposition(backward_edge_graph(H, theta))
    return _partition(theta, D)


def constellation_report(H: Tournament, theta: Sequence[int]) -> Optional[str]:
    """None when theta is a constellation ordering, else the failed check."""
    theta = check_ordering(H, theta)
    try:
        D = star_decomposition(backward_edge_graph(H, theta))
    except NotStarForest as exc:
        return f"not a star ordering: {exc}"
    block = _partition(theta, D).block_of()
    for s in D.stars:
        clash = [x for x in s.leaves if block[x] == block[s.center]]
        if clash:
            return f"center {s.center} shares a block with leaves {clash}"
    return None


def is_constellation_ordering(H: Tournament, theta: Sequence[int]) -> bool:
    try:
        return constellation_report(H, theta) is None
    except BadOrdering:
        return False


def _orderings(H: Tournament):
    if H.n > SEARCH_LIMIT:
        raise TooLarge(f"ordering search is limited to {SEARCH_LIMIT} vertices, got {H.n}")
    return itertools.permutations(range(H.n))


def find_constellation_ordering(H: Tournament) -> Optional[tuple]:
    for theta in _orderings(H):
        if constellation_report(H, theta) is None:
            return theta
    return None


def is_galaxy_ordering(H: Tournament, theta: Sequence[int]) -> bool:
    if not is_constellation_ordering(H, theta):
        return False
    pos = {v: i for i, v in enumerate(theta)}
    D = star_decomposition(backward_edge_graph(H, theta))
    for s in D.stars:
        for t in D.stars:
            if s is t:
                continue
            lo = min(pos[x] for x in t.leaves)
            hi = max(pos[x] for x in t.leaves)
            if lo < pos[s.center] < hi:
                return False
    return True


def find_galaxy_ordering(H: Tournament) -> Optional[tuple]:
    for theta in _orderings(H):
        if is_galaxy_ordering(H, theta):
            return theta
    return None


def zeta_map(H: Tournament, theta: Sequence[int]) -> ZetaMap:
    """Positions in a strong m-sequence assigned to the vertices of H.

    The i-th leaf goes to i(2h+1)+1.  Every other vertex, singletons
    included, counts as a center: the r-th of them after the j-th leaf goes
    to j(2h+1)+2r.
    """
    theta = check_ordering(H, theta)
    reason = constellation_report(H, theta)
    if reason is not None:
        raise NotConstellation(reason)
    D = star_decomposition(backward_edge_graph(H, theta))
    leaves = D.leaves()
    h = H.n
    pos = {}
    i = r = 0
    for v in theta:
        if v in leaves:
            i += 1
            r = 0
            pos[v] = i * (2 * h + 1) + 1
        else:
            r += 1
            pos[v] = i * (2 * h + 1) + 2 * r
    return ZetaMap(pos, h)


# catalog

@dataclass(frozen=True)
class Pattern:
    name: str
    tournament: Tournament
    ordering: tuple
    orderings: dict = field(default_factory=dict, compare=False)


def _from_labels(labels: Sequence[int], backward, extra: Optional[dict] = None) -> tuple:
    index = {lab: i for i, lab in enumerate(labels)}
    T = Tournament.from_ordering(list(range(len(labels))), [(index[a], index[b]) for a, b in backward])
    named = {k: tuple(index[x] for x in v) for k, v in (extra or {}).items()}
    return T, named


def _cycle5() -> Tournament:
    return Tournament.from_edges(5, [(i, (i + d) % 5) for i in range(5) for d in (1, 2)])


def _build_catalog() -> dict:
    one_to = lambda n: list(range(1, n + 1))
    cat = {}
    c5 = _cycle5()
    cat["c5"] = Pattern("c5", c5, tuple(range(5)), {
        "tree": (0, 1, 2, 3, 4),
        "cyclic": tuple(x - 1 for x in (4, 1, 3, 5, 2)),
    })
    specs = {
        "t6": (one_to(6), [(4, 1), (6, 3), (6, 1), (5, 2)]),
        "t6_1": (one_to(6), [(4, 1), (5, 1), (5, 2), (6, 3)]),
        # Listed as pairs; each is oriented from its later vertex so that it
        # is backward under the identity ordering.
        "t6_2": (one_to(6), [(3, 1), (3, 2), (4, 2), (6, 5)]),
        "fig1": (one_to(11), [(6, 1), (3, 1), (10, 2), (10, 5), (11, 4), (11, 7), (11, 9)]),
        "fig2": (list(range(10)), [(5, 0), (5, 2), (5, 4), (6, 3), (8, 3), (9, 3)]),
        "fig3": (one_to(8), [(3, 1), (5, 1), (8, 6), (7, 4), (7, 2)]),
    }
    for name, (labels, back) in specs.items():
        T, _ = _from_labels(labels, back)
        cat[name] = Pattern(name, T, tuple(range(len(labels))))
    return cat


CATALOG = _build_catalog()


def catalog(name: str) -> Pattern:
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown pattern {name!r}; known: {', '.join(sorted(CATALOG))}") from None


def parse_ordering(line: str, n: int, lineno: int = 1) -> tuple:
    parts = line.split()
    if not all(p.isdigit() for p in parts):
        raise ParseError("ordering must be whitespace-separated vertex ids", lineno)
    theta = tuple(int(p) for p in parts)
    if sorted(theta) != list(range(n)):
        raise BadOrdering(f"line {lineno}: ordering is not a permutation of 0..{n - 1}")
    return theta


def read_pattern(stream: TextIO, name: str = "file") -> Pattern:
    """Tournament file, optionally followed by one ordering line."""
    lines = _split_lines(stream.read())
    H = parse_tournament_lines(lines)
    rest = [(i + 1, lines[i]) for i in range(H.n + 1, len(lines)) if lines[i].strip()]
    if len(rest) > 1:
        raise ParseError("at most one ordering line may follow the matrix", rest[1][0])
    theta = parse_ordering(rest[0][1], H.n, rest[0][0]) if rest else tuple(range(H.n))
    return Pattern(name, H, theta)
