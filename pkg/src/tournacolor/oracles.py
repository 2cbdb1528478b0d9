"""Exhaustive baselines: maximum transitive set, embeddings, chromatic number."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import Coloring, EmbeddingCertificate, Tournament, VertexSet, _is_transitive_mask, bits
from .errors import BudgetExceeded


@dataclass(frozen=True)
class OracleBudget:
    max_n: int = 24
    time_cap: float = 60.0
    node_cap: int = 50_000_000


DEFAULT = OracleBudget()


class _Clock:
    def __init__(self, budget: OracleBudget):
        self.budget = budget
        self.start = time.monotonic()
        self.nodes = 0

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget.node_cap:
            raise BudgetExceeded(f"search exceeded {self.budget.node_cap} nodes")
        if self.nodes & 0xFFF == 0 and time.monotonic() - self.start > self.budget.time_cap:
            raise BudgetExceeded(f"search exceeded {self.budget.time_cap} s")


def max_transitive_exact(T: Tournament, S=None, budget: OracleBudget = DEFAULT) -> VertexSet:
    """A maximum transitive subset of T (restricted to S when given).

    Dynamic programme over candidate sets: best(C) is the largest transitive
    set inside C, and best(C) = max over v in C of {v} + best(C & N+(v)),
    v being the source of the transitive order.  Ties go to the lowest
    source at every level, which makes the answer the lexicographically
    first maximum set when read in transitive order.
    """
    mask = T.vertices().mask if S is None else VertexSet(S).mask
    size = mask.bit_count()
    if size > budget.max_n:
        raise BudgetExceeded(f"exact transitive search is capped at {budget.max_n} vertices, got {size}")
    out = T.out
    clock = _Clock(budget)
    memo: dict[int, tuple[int, int]] = {0: (0, 0)}

    def best(c: int) -> tuple[int, int]:
        hit = memo.get(c)
        if hit is not None:
            return hit
        clock.tick()
        top, top_set = 0, 0
        for v in bits(c):
            nxt = c & out[v]
            if 1 + nxt.bit_count() <= top:
                continue
            k, s = best(nxt)
            if k + 1 > top:
                top, top_set = k + 1, s | (1 << v)
        memo[c] = (top, top_set)
        return top, top_set

    return VertexSet(best(mask)[1])


def contains_subtournament(T: Tournament, H: Tournament,
                           budget: OracleBudget = DEFAULT) -> Optional[EmbeddingCertificate]:
    """An embedding of H into T, or None after an exhaustive search."""
    h = H.n
    if h > T.n:
        return None
    if h == 0:
        return EmbeddingCertificate({})
    clock = _Clock(budget)
    # Vertices with many backward edges under the identity ordering first.
    back = [sum(1 for u in bits(H.inn[v]) if u > v) + sum(1 for u in bits(H.out[v]) if u < v)
            for v in range(h)]
    order = sorted(range(h), key=lambda v: (-back[v], v))
    hout = [H.out[v].bit_count() for v in range(h)]
    hin = [H.inn[v].bit_count() for v in range(h)]
    full = T.vertices().mask
    fits = [0] * h
    for v in range(h):
        for x in range(T.n):
            if T.out[x].bit_count() >= hout[v] and T.inn[x].bit_count() >= hin[v]:
                fits[v] |= 1 << x
    image = [0] * h

    def extend(depth: int, used: int) -> bool:
        if depth == h:
            return True
        clock.tick()
        v = order[depth]
        cand = fits[v] & ~used & full
        for u in order[:depth]:
            x = image[u]
            cand &= T.out[x] if H.has_edge(u, v) else T.inn[x]
            if not cand:
                return False
        for x in bits(cand):
            image[v] = x
            if extend(depth + 1, used | (1 << x)):
                return True
        return False

    if extend(0, 0):
        cert = EmbeddingCertificate({v: image[v] for v in range(h)})
        assert cert.verify(T, H)
        return cert
    return None


def exact_chromatic(T: Tournament, order: Optional[Sequence[int]] = None,
                    budget: OracleBudget = OracleBudget(max_n=12)) -> tuple[int, Coloring]:
    """Minimum number of transitive classes, by branch and bound.

    Vertices are placed in ``order`` (default 0..n-1) into an existing class
    or a new one; a branch is cut once it needs as many classes as the best
    colouring found so far.
    """
    n = T.n
    if n > budget.max_n:
        raise BudgetExceeded(f"exact colouring is capped at {budget.max_n} vertices, got {n}")
    if n == 0:
        return 0, Coloring({})
    order = list(range(n)) if order is None else list(order)
    clock = _Clock(budget)
    best = [n + 1, None]
    classes: list[int] = []

    def place(i: int):
        if len(classes) >= best[0]:
            return
        if i == n:
            best[0], best[1] = len(classes), list(classes)
            return
        clock.tick()
        v = order[i]
        for c in range(len(classes)):
            m = classes[c] | (1 << v)
            if _is_transitive_mask(T, m):
                prev = classes[c]
                classes[c] = m
                place(i + 1)
                classes[c] = prev
        if len(classes) + 1 < best[0]:
            classes.append(1 << v)
            place(i + 1)
            classes.pop()

    place(0)
    col = Coloring.from_classes(VertexSet(m) for m in best[1])
    return best[0], col
