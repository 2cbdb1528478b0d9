import itertools

from hypothesis import settings, strategies as st

from tournacolor.core import Tournament

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def tournaments(draw, min_n=0, max_n=10):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    flips = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Tournament.from_edges(n, [(u, v) if f else (v, u) for (u, v), f in zip(pairs, flips)])


def all_tournaments(n):
    pairs = list(itertools.combinations(range(n), 2))
    for code in range(1 << len(pairs)):
        yield Tournament.from_edges(n, [(u, v) if (code >> i) & 1 else (v, u)
                                        for i, (u, v) in enumerate(pairs)])


def cycle3():
    return Tournament.from_edges(3, [(0, 1), (1, 2), (2, 0)])


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
