#!/usr/bin/env python3
"""Walk the built-in pattern catalog.

For every pattern print the backward edges under its stored ordering, the
star decomposition, the block partition and the two verdicts.  Patterns
small enough are also searched over all orderings.
"""

from tournacolor.patterns import (CATALOG, SEARCH_LIMIT, backward_edge_graph, constellation_report,
                                  find_constellation_ordering, is_galaxy_ordering, star_decomposition,
                                  theta_partition)
from tournacolor.errors import NotStarForest


def section(title: str) -> None:
    print("\n" + "-" * 72)
    print(title)
    print("-" * 72)


def label(vs) -> str:
    return "{" + ",".join(str(v + 1) for v in vs) + "}"


for name, pat in CATALOG.items():
    H, theta = pat.tournament, pat.ordering
    section(f"{name}: {H.n} vertices, ordering {' '.join(str(v + 1) for v in theta)}")
    B = backward_edge_graph(H, theta)
    print("backward edges:", " ".join(f"{u + 1}-{v + 1}" for u, v in sorted(B.edges)) or "none")
    try:
        D = star_decomposition(B)
    except NotStarForest as exc:
        print("star decomposition fails:", exc)
    else:
        for s in D.stars:
            print(f"  {s.side:5} star, center {s.center + 1}, leaves {label(s.leaves)}")
        print("  blocks:", " ".join(f"{tag}{label(vs)}" for tag, vs in theta_partition(H, theta).blocks))
    reason = constellation_report(H, theta)
    print("constellation:", "yes" if reason is None else f"no ({reason})")
    print("galaxy:", "yes" if is_galaxy_ordering(H, theta) else "no")
    if reason is not None and H.n <= SEARCH_LIMIT:
        found = find_constellation_ordering(H)
        print("search over all orderings:", "none" if found is None else " ".join(str(v + 1) for v in found))
