"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run under pytest (lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

import itertools
import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import ACCEPTANCE_LINES, all_tournaments, cycle3  # noqa: E402
from tournacolor import engine  # noqa: E402
from tournacolor.constructions import layered, mixed_roles  # noqa: E402
from tournacolor.core import (EmbeddingCertificate, Tournament, VertexSet, directed_density,  # noqa: E402
                              edge_count, greedy_log_transitive, is_transitive, random_tournament,
                              verify_coloring)
from tournacolor.engine import (EngineConfig, Graph, c_of, certify_merge_identity, clique_lambda_bound,  # noqa: E402
                                coloring_driver_report, driver_bound_holds, epsilon_of, find_clique,
                                find_l_sequence, find_strong_m_sequence, ladder_extractor,
                                make_smooth_detailed, oracle_extractor, poly_trans_detailed,
                                required_m_length, strict_constants, strong_length)
from tournacolor.errors import InsufficientSize, PreconditionViolated  # noqa: E402
from tournacolor.exact import LogRatio  # noqa: E402
from tournacolor.oracles import contains_subtournament, exact_chromatic, max_transitive_exact  # noqa: E402
from tournacolor.patterns import (CATALOG, catalog, find_constellation_ordering,  # noqa: E402
                                  is_constellation_ordering, is_galaxy_ordering)
from tournacolor.sequences import (MSequence, SequenceParams, validate_l_sequence,  # noqa: E402
                                   validate_m_sequence, validate_smooth)

F = Fraction


def record(num: int, ok: bool, detail: str, elapsed: float, limit: float) -> None:
    in_time = elapsed < limit
    verdict = "PASS" if ok and in_time else "FAIL"
    line = f"{verdict} criterion {num}: {detail} [{elapsed:.2f} s, limit {limit:g} s]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
    assert in_time, line


# 1

def test_criterion_01_strict_constants():
    t0 = time.perf_counter()
    a, b = strict_constants(2), strict_constants(3)
    ok = a.log2_inv_epsilon == 2 ** 201 and b.log2_inv_epsilon == 2 ** 451
    record(1, ok, "log2(1/eps) is 2^201 for h=2 and 2^451 for h=3 (integer equality)",
           time.perf_counter() - t0, 1)


# 2

def test_criterion_02_density_theorem():
    t0 = time.perf_counter()
    rng = random.Random(2)
    hosts = []
    for i in range(40):
        n = rng.randint(4, 60)
        p = rng.choice([0.0, 0.02, 0.1, 0.3, 0.5])
        out = [0] * n
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() >= p:
                    out[u] |= 1 << v
                else:
                    out[v] |= 1 << u
        hosts.append(Tournament(n, tuple(out)))
    violations = nontrivial = 0
    for _ in range(10_000):
        T = rng.choice(hosts)
        vs = list(range(T.n))
        rng.shuffle(vs)
        cut = rng.randint(1, T.n - 1)
        X, Y = vs[:cut], vs[cut:]
        X1 = rng.sample(X, rng.randint(1, len(X)))
        Y1 = rng.sample(Y, rng.randint(1, len(Y)))
        d = directed_density(T, X, Y)
        lam = (1 - d) + F(rng.randint(0, 5), 100)
        c1 = F(len(X1), len(X)) * F(rng.randint(50, 100), 100)
        c2 = F(len(Y1), len(Y)) * F(rng.randint(50, 100), 100)
        bound = 1 - lam / (c1 * c2)
        nontrivial += bound > 0
        if directed_density(T, X1, Y1) < bound:
            violations += 1
    record(2, violations == 0,
           f"10000 instances, {violations} violations of d(X1,Y1) >= 1 - lam/(c1 c2) "
           f"({nontrivial} with a positive bound)", time.perf_counter() - t0, 30)


# 3

def _greedy_eps(n: int) -> LogRatio:
    return LogRatio(max(math.ceil(math.log2(n)) - 1, 1), max(n, 2))


def test_criterion_03_coloring_driver():
    t0 = time.perf_counter()
    bad_colourings = bound_fail = breaches = count = 0
    oracle = oracle_extractor()
    ladder = ladder_extractor(EngineConfig(oracle_cap=24))
    cases = [(T, oracle) for n in range(1, 7) for T in all_tournaments(n)]
    cases += [(random_tournament((32, 64, 128)[i % 3], 1000 + i), ladder) for i in range(200)]
    for T, ex in cases:
        eps = _greedy_eps(T.n)
        rep = coloring_driver_report(T, ex, eps, strict=False)
        count += 1
        if not verify_coloring(T, rep.coloring):
            bad_colourings += 1
        if rep.breaches:
            breaches += 1
        elif not driver_bound_holds(T.n, rep.coloring.num_colors, eps):
            bound_fail += 1
    exhaustive = sum(1 << (n * (n - 1) // 2) for n in range(1, 7))
    record(3, bad_colourings == 0 and bound_fail == 0 and exhaustive >= 10 ** 4,
           f"{exhaustive} labelled tournaments n<=6 plus 200 random n in {{32,64,128}}: "
           f"{bad_colourings} improper, {bound_fail} bound failures, {breaches} runs with a contract breach",
           time.perf_counter() - t0, 120)


# 4

def _kpartite(rng, k, sizes, lam):
    starts = list(itertools.accumulate([0] + sizes))
    n = starts[-1]
    cls = [((1 << sizes[i]) - 1) << starts[i] for i in range(k)]
    full = (1 << n) - 1
    adj = []
    for i in range(k):
        for v in range(starts[i], starts[i + 1]):
            adj.append(full & ~cls[i])
    for i, j in itertools.combinations(range(k), 2):
        total = sizes[i] * sizes[j]
        drop = math.floor(lam * total)
        for t in rng.sample(range(total), drop):
            u = starts[i] + t // sizes[j]
            v = starts[j] + t % sizes[j]
            adj[u] &= ~(1 << v)
            adj[v] &= ~(1 << u)
    return Graph(tuple(adj)), cls


def test_criterion_04_find_clique():
    t0 = time.perf_counter()
    rng = random.Random(4)
    wrong = preconds = 0
    for _ in range(1000):
        k = rng.randint(1, 7)
        sizes = [rng.randint(1, 40) for _ in range(k)]
        lam = clique_lambda_bound(k) * F(rng.randint(0, 999), 1000)
        G, cls = _kpartite(rng, k, sizes, lam)
        try:
            got = find_clique(G, cls, lam)
        except PreconditionViolated:
            preconds += 1
            continue
        ok = len(got) == k and all((cls[i] >> v) & 1 for i, v in enumerate(got)) and G.is_clique(got)
        wrong += not ok
    record(4, wrong == 0 and preconds == 0,
           f"1000 k-partite instances (k<=7, classes<=40): {wrong} non-transversal or non-clique outputs, "
           f"{preconds} PreconditionViolated", time.perf_counter() - t0, 60)


# 5

def test_criterion_05_make_smooth():
    t0 = time.perf_counter()
    rng = random.Random(5)
    failures, done, seed = 0, 0, 0
    while done < 500:
        seed += 1
        L = rng.choice([1, 3, 5, 7])
        sizes = [rng.randint(6, 16) for _ in range(L)]
        T, seq = layered(sizes, mixed_roles(L), seed=seed, backward=rng.choice([0, 0.002, 0.005]))
        f = rng.choice([F(0), F(1, 4), F(1, 2)])
        sets = seq.sets()
        lam = F(0)
        for i, j in itertools.combinations(range(L), 2):
            total = len(sets[i]) * len(sets[j])
            lam = max(lam, F(total - edge_count(T, sets[i].mask, sets[j].mask), total))
        if 4 * lam * L >= (1 - f) ** 2:
            continue  # outside the regime where the smoothed lambda stays below 1
        c = F(min(sizes), T.n)
        params = SequenceParams(c, lam, 1)
        subsets = []
        for (C, role) in seq.elements:
            members = sorted(C)
            need = math.ceil((1 - f) * len(members))
            parts = 2 if role == "transitive" and 2 * need <= len(members) and rng.random() < 0.5 else 1
            rng.shuffle(members)
            subsets.append([VertexSet(members[p * need:(p + 1) * need]) for p in range(parts)])
        out = make_smooth_detailed(seq, subsets, f, params)
        smooth_ok = validate_smooth(T, out.sequence, SequenceParams(c * (1 - f) / 2, 4 * lam * L / (1 - f) ** 2, 1))
        floor = (1 - f) * c * T.n / 2
        floor_ok = all(len(p & VertexSet(S)) >= floor
                       for pieces, subs in zip(out.pieces, subsets) for p, S in zip(pieces, subs))
        failures += not (smooth_ok and floor_ok)
        done += 1
    record(5, failures == 0,
           f"500 constructed m-sequences: {failures} outputs failing validate_smooth at "
           f"(c(1-f)/2, 4 lam L/(1-f)^2) or the floor (1-f)cn/2", time.perf_counter() - t0, 60)


# 6

def test_criterion_06_find_l():
    t0 = time.perf_counter()
    rng = random.Random(6)
    names = sorted(CATALOG)
    seqs = certs = short = bad = 0
    for run in range(300):
        H = catalog(names[run % len(names)]).tournament
        n = rng.randint(20, 400)
        k = rng.randint(1, 3)
        lam = rng.choice([F(1, 4), F(1, 2), F(3, 4)])
        if run % 3 == 0:
            T = random_tournament(n, run)
        else:
            T = Tournament.transitive(n)
            for _ in range(rng.randint(0, n // 10)):
                u, v = rng.sample(range(n), 2)
                T = T.flip(u, v)
        try:
            res = find_l_sequence(T, H, lam, k)
        except InsufficientSize:
            short += 1
            continue
        if isinstance(res, EmbeddingCertificate):
            certs += 1
            image = sorted(res.mapping.values())
            sub, _ = T.induced(image)
            bad += not (res.verify(T, H) and contains_subtournament(sub, H) is not None)
        else:
            seqs += 1
            bad += not validate_l_sequence(T, res, SequenceParams(c_of(H.n, k, lam), lam))
    record(6, bad == 0 and seqs > 0 and certs > 0,
           f"300 relaxed runs: {seqs} sequences and {certs} certificates, {bad} failing their check, "
           f"{short} InsufficientSize", time.perf_counter() - t0, 120)


# 7

def test_criterion_07_recognition():
    t0 = time.perf_counter()
    checks = {
        "fig1 constellation": is_constellation_ordering(catalog("fig1").tournament, range(11)),
        "fig3 galaxy": is_galaxy_ordering(catalog("fig3").tournament, range(8)),
        "fig2 constellation": is_constellation_ordering(catalog("fig2").tournament, range(10)),
        "fig2 not galaxy": not is_galaxy_ordering(catalog("fig2").tournament, range(10)),
        "c5 no ordering": find_constellation_ordering(catalog("c5").tournament) is None,
    }
    failed = [k for k, v in checks.items() if not v]
    record(7, not failed, "fixtures " + ", ".join(checks) + (f"; failed: {failed}" if failed else ""),
           time.perf_counter() - t0, 5)


# 8

def test_criterion_08_oracles():
    t0 = time.perf_counter()
    worse = count = 0
    for n in range(1, 7):
        for T in all_tournaments(n):
            count += 1
            worse += len(greedy_log_transitive(T)) > len(max_transitive_exact(T))
    c5 = len(max_transitive_exact(catalog("c5").tournament))
    chi = exact_chromatic(cycle3())[0]
    record(8, worse == 0 and c5 == 3 and chi == 2,
           f"{count} tournaments n<=6 with greedy > exact {worse} times; max transitive of C5 = {c5}; "
           f"chromatic number of the 3-cycle = {chi}", time.perf_counter() - t0, 60)


# 9

def test_criterion_09_merge_identity():
    t0 = time.perf_counter()
    rng = random.Random(9)
    fails = 0
    for _ in range(1000):
        q = rng.randint(2, 10 ** 4)
        c = F(rng.randint(1, q - 1), q)
        n = rng.randint(1, 10 ** 6)
        eb = epsilon_of(c)
        fails += not (eb.identity_holds() and certify_merge_identity(c, n))
    record(9, fails == 0, f"1000 (c, n) pairs: {fails} failing c^eps = 1-c or (cn)^eps + c n^eps >= n^eps",
           time.perf_counter() - t0, 10)


# 10

def _single_star(h):
    return Tournament.from_ordering(list(range(h)), [(h - 1, 0)])


def test_criterion_10_relaxed_pipeline():
    t0 = time.perf_counter()
    notes, ok = [], True
    for h in (2, 3):
        L = strong_length(h)
        T, seq = layered([12] * L, mixed_roles(L), seed=h)
        res = poly_trans_detailed(_single_star(h), tuple(range(h)), T, seq, SequenceParams(F(12, T.n), 0, F(1, 3)),
                                  oracle_extractor())
        good = is_transitive(T, res.vertices) and res.bound_met
        ok &= good
        notes.append(f"poly_trans h={h}: |set|={len(res.vertices)} transitive and bound met = {good}")
    h = 3
    K = required_m_length(h)
    chunks = {i * (2 * h + 2) - 1 for i in range(1, 2 ** (h + 1) + 1)}
    T, seq = layered([60 if i in chunks else 2 for i in range(K)], mixed_roles(K), seed=0)
    r = find_strong_m_sequence(_single_star(h), tuple(range(h)), T, seq, SequenceParams(F(2, T.n), 0, 1))
    within = r.state0_events <= r.turan_bound
    ok &= within
    notes.append(f"find_strong h=3: {r.state0_events} state-0 events, Turan bound {r.turan_bound}")
    record(10, ok, "; ".join(notes), time.perf_counter() - t0, 60)


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
