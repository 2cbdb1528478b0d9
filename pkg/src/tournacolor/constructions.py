"""Planted instances: tournaments built around a prescribed sequence."""

from __future__ import annotations

import random
from typing import Sequence

from .core import Tournament, VertexSet
from .sequences import LINEAR, TRANSITIVE, MSequence


def layered(sizes: Sequence[int], roles: Sequence[str], seed: int = 0,
            backward: float = 0.0, extra: int = 0) -> tuple[Tournament, MSequence]:
    """Host whose consecutive blocks form a sequence with the given roles.

    Edges between blocks point forward except that each cross pair is
    reversed with probability ``backward``.  Linear blocks are random inside,
    transitive blocks are ordered.  ``extra`` random vertices are appended
    after the last block.
    """
    if len(sizes) != len(roles):
        raise ValueError("sizes and roles differ in length")
    rng = random.Random(seed)
    n = sum(sizes) + extra
    block = []
    for b, s in enumerate(sizes):
        block.extend([b] * s)
    block.extend([-1] * extra)
    out = [0] * n
    for u in range(n):
        for v in range(u + 1, n):
            bu, bv = block[u], block[v]
            if bu == bv and bu >= 0 and roles[bu] == TRANSITIVE:
                fwd = True
            elif bu == bv or bu < 0 or bv < 0:
                fwd = rng.random() < 0.5
            else:
                fwd = rng.random() >= backward
            if fwd:
                out[u] |= 1 << v
            else:
                out[v] |= 1 << u
    T = Tournament(n, tuple(out))
    sets, start = [], 0
    for s in sizes:
        sets.append(VertexSet(range(start, start + s)))
        start += s
    return T, MSequence(T, tuple(zip(sets, roles)))


def mixed_roles(length: int) -> list[str]:
    return [LINEAR if i % 2 == 0 else TRANSITIVE for i in range(length)]
