import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import cycle3
from tournacolor import engine
from tournacolor.constructions import layered, mixed_roles
from tournacolor.core import (EmbeddingCertificate, Tournament, VertexSet, is_transitive, random_tournament,
                              substitute, verify_coloring)
from tournacolor.engine import (ParamState, c_of, certify_merge_identity, clique_lambda_bound, epsilon_of,
                                find_clique, find_l_sequence, find_m_sequence, find_strong_m_sequence,
                                Graph, lambda_schedule, make_smooth, make_smooth_detailed, merge_saturated,
                                oracle_extractor, poly_trans_detailed, required_m_length, strict_constants,
                                strong_length, substitution_epsilon, turan_bound, whole_if_transitive)
from tournacolor.errors import (DomainError, InsufficientSize, NotConstellation, NotSaturated,
                                PreconditionViolated)
from tournacolor.exact import Monomial
from tournacolor.oracles import contains_subtournament
from tournacolor.patterns import catalog
from tournacolor.sequences import (MSequence, SequenceParams, validate_l_sequence, validate_m_sequence,
                                   validate_smooth, validate_strong)

F = Fraction


# parameter rules

def test_rules_by_hand():
    v = {"c": F(1, 2), "lam": F(1, 100), "xi": F(1, 4)}
    h, k = 2, 3
    s0 = engine.RULES["state0"](dict(v), h=h, k=k)
    assert s0 == {"c": F(1, 2) * F(1, 4) / 4, "lam": F(1, 100) * 4 * 4 * 3 * 16, "xi": F(1, 8)}
    t = 1 - F(1, 100) * 2 * 4  # 1 - lam h / xi = 23/25
    s1 = engine.RULES["state1"](dict(v), h=h, k=k)
    assert s1["c"] == F(1, 2) * F(1, 4) * t / 2
    assert s1["lam"] == F(1, 100) * 4 * k * (h + 1) / (F(1, 16) * t * t)
    assert s1["xi"] == F(1, 4) * t / 2
    core = engine.RULES["core"](dict(v), h=h, k=k)
    assert core["lam"] == F(1, 100) * 4 * k / (F(1, 16) * t * t)
    sm = engine.RULES["smooth"](dict(v), f=F(1, 3), L=5)
    assert sm["c"] == F(1, 2) * F(2, 3) / 2 and sm["lam"] == F(1, 100) * 20 / F(4, 9)


def test_shrink_outside_regime():
    with pytest.raises(InsufficientSize):
        engine.RULES["core"]({"c": F(1), "lam": F(1, 2), "xi": F(1, 4)}, h=2, k=1)


@given(st.lists(st.sampled_from(["smooth", "state0", "state1", "core"]), max_size=6),
       st.integers(2, 5), st.integers(1, 9))
def test_param_state_replays(rules, h, k):
    ps = ParamState("relaxed", {"c": F(1, 3), "lam": F(1, 10 ** 9), "xi": F(1, 2 * (h + 2))})
    for r in rules:
        try:
            if r == "smooth":
                ps.apply(r, f=F(1, 4), L=k)
            else:
                ps.apply(r, h=h, k=k)
        except InsufficientSize:
            break
    assert ps.replay() == ps.values


# schedules and constants

def test_lambda_schedule_examples():
    assert lambda_schedule(F(1, 2), 1, 2, 0) == F(1, 256)
    assert lambda_schedule(F(1, 2), 1, 2, 1) == F(1, 2 ** 64)


@given(st.fractions(min_value=F(1, 100), max_value=F(99, 100)), st.integers(1, 3), st.integers(2, 4))
def test_lambda_schedule_decreasing(lam, k, h):
    vals = [Monomial.of(lambda_schedule(lam, k, h, i)) for i in range(k + 1)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_c_of_examples():
    assert c_of(2, 0, F(1, 2)) == 1
    assert c_of(2, 1, F(1, 2)) == F(1, 2 ** 131)
    with pytest.raises(DomainError):
        c_of(2, 1, F(3, 2))


def test_strict_constants():
    a, b = strict_constants(2), strict_constants(3)
    assert a.log2_inv_epsilon == 2 ** 201 and b.log2_inv_epsilon == 2 ** 451
    assert strict_constants(2).thresholds == a.thresholds
    for name in a.thresholds:
        if name.endswith("lambda_max"):
            assert b.thresholds[name] < a.thresholds[name]
        else:
            assert b.thresholds[name] > a.thresholds[name]


def test_epsilon_of():
    assert epsilon_of(F(1, 2)).exact == 1
    e = epsilon_of(F(1, 4))
    assert float(e) == pytest.approx((2 - math.log2(3)) / 2, abs=1e-12)
    assert e.identity_holds()
    assert certify_merge_identity(F(1, 4), 1000)
    with pytest.raises(DomainError):
        epsilon_of(F(1))


# Find-L-Sequence

def test_find_l_base_case():
    T = random_tournament(7, 0)
    seq = find_l_sequence(T, cycle3(), F(1, 4), 0)
    assert seq.sets() == [T.vertices()]
    assert validate_l_sequence(T, seq, SequenceParams(1, F(1, 4)))


def test_find_l_transitive_host():
    T = Tournament.transitive(40)
    H = catalog("c5").tournament
    seq = find_l_sequence(T, H, F(1, 4), 2)
    assert len(seq) == 4
    assert validate_l_sequence(T, seq, SequenceParams(c_of(5, 2, F(1, 4)), F(1, 4)))


def test_find_l_planted_copies():
    H = catalog("c5").tournament
    for seed in range(6):
        T = substitute(H, [random_tournament(6, seed + i) for i in range(5)])
        try:
            res = find_l_sequence(T, H, F(1, 2), 1)
        except InsufficientSize:
            continue
        if isinstance(res, EmbeddingCertificate):
            assert res.verify(T, H) and contains_subtournament(T, H) is not None
        else:
            assert validate_l_sequence(T, res, SequenceParams(c_of(5, 1, F(1, 2)), F(1, 2)))


def test_find_l_never_certifies_on_free_input():
    H = catalog("c5").tournament
    for seed in range(40):
        T = random_tournament(20, seed)
        if contains_subtournament(T, H) is None:
            try:
                res = find_l_sequence(T, H, F(1, 4), 1)
            except InsufficientSize:
                continue
            assert not isinstance(res, EmbeddingCertificate)


def test_find_l_strict_reports_threshold():
    with pytest.raises(InsufficientSize) as exc:
        find_l_sequence(random_tournament(30, 1), cycle3(), strict_constants(3).lambda_init, 9, "strict")
    assert exc.value.log2_required[0] > 1000


# Find-Clique

def _dense_instance(rng, k, sizes, miss):
    classes, start = [], 0
    for s in sizes:
        classes.append(list(range(start, start + s)))
        start += s
    edges = []
    for i in range(k):
        for j in range(i + 1, k):
            pairs = [(u, v) for u in classes[i] for v in classes[j]]
            drop = set(rng.sample(range(len(pairs)), miss(len(pairs))))
            edges += [p for t, p in enumerate(pairs) if t not in drop]
    return Graph.from_edges(start, edges), classes


def test_find_clique_single_class():
    G = Graph.from_edges(3, [])
    assert find_clique(G, [VertexSet([1, 2])], 0) == [1]


def test_find_clique_complete_multipartite():
    G, classes = _dense_instance(random.Random(0), 3, [2, 2, 2], lambda m: 0)
    assert find_clique(G, [VertexSet(c) for c in classes], 0) == [0, 2, 4]


def test_find_clique_random_dense():
    rng = random.Random(1)
    for _ in range(50):
        k = rng.randint(2, 4)
        sizes = [rng.randint(20, 40) for _ in range(k)]
        bound = clique_lambda_bound(k)
        G, classes = _dense_instance(rng, k, sizes, lambda m: int(m * bound * F(9, 10)))
        clique = find_clique(G, [VertexSet(c) for c in classes], bound * F(9, 10))
        assert G.is_clique(clique) and [any(v in c for v in clique) for c in classes] == [True] * k


def test_find_clique_preconditions():
    G, classes = _dense_instance(random.Random(2), 2, [3, 3], lambda m: 0)
    with pytest.raises(PreconditionViolated):
        find_clique(G, [VertexSet(c) for c in classes], clique_lambda_bound(2))
    sparse = Graph.from_edges(6, [])
    with pytest.raises(PreconditionViolated):
        find_clique(sparse, [VertexSet(c) for c in classes], 0)


# MakeSmooth

def test_make_smooth_all_forward():
    T, seq = layered([8, 4, 8, 4, 8], mixed_roles(5), seed=3)
    p = SequenceParams(F(1, 8), 0, F(1, 2))
    out = make_smooth_detailed(seq, [[s] for s in seq.sets()], 0, p)
    assert validate_smooth(T, out.sequence, SequenceParams(F(1, 16), 0, F(1, 2)))
    assert all(2 * len(a) >= len(b) for a, b in zip(out.sequence.sets(), seq.sets()))


def test_make_smooth_noisy_and_split():
    T, seq = layered([16, 8, 16], mixed_roles(3), seed=5, backward=0.002)
    p = SequenceParams(F(1, 8), F(1, 60), F(1, 2))
    assert validate_m_sequence(T, seq, p)
    A1, T1, A2 = seq.sets()
    t = sorted(T1)
    subsets = [[A1], [VertexSet(t[:4]), VertexSet(t[4:])], [A2]]
    f = F(1, 2)
    out = make_smooth(seq, subsets, f, p)
    assert validate_smooth(T, out, SequenceParams(p.c * (1 - f) / 2, p.lam * 12 / (1 - f) ** 2, p.eps))


def test_make_smooth_preconditions():
    T, seq = layered([4, 2, 4], mixed_roles(3))
    p = SequenceParams(F(1, 8), 0, F(1, 2))
    A1, T1, A2 = seq.sets()
    with pytest.raises(PreconditionViolated):
        make_smooth(seq, [[VertexSet(sorted(A1)[:1])], [T1], [A2]], 0, p)
    with pytest.raises(PreconditionViolated):
        make_smooth(seq, [[A1], [T1], [A2]], 1, p)


# Find-M-Sequence

def _forward_lseq():
    T, seq = layered([10, 10, 10], ["linear", "transitive", "linear"], seed=7)
    return T, MSequence.linear(T, seq.sets())


def test_find_m_forward_oracle():
    T, lseq = _forward_lseq()
    out = find_m_sequence(T, lseq, F(1, 4), F(1, 2), oracle_extractor(), c=F(1, 3), lam=0)
    assert out.kind() == "m" and len(out) == 3
    assert out.sets()[1].mask & ~lseq.sets()[1].mask == 0
    assert validate_m_sequence(T, out, SequenceParams(F(1, 30), F(1, 4), F(1, 2)))


def test_find_m_whole_middle():
    T, lseq = _forward_lseq()
    out = find_m_sequence(T, lseq, F(1, 4), F(1, 2), whole_if_transitive, c=F(1, 3), lam=0)
    assert out.sets()[1] == lseq.sets()[1]


def test_find_m_lambda_bound():
    T, lseq = _forward_lseq()
    with pytest.raises(PreconditionViolated):
        find_m_sequence(T, lseq, F(1, 4), F(1, 2), oracle_extractor(), c=F(1, 3), lam=F(1, 100))


# FindStrong-M-Sequence and PolyTrans

def _single_star(h):
    return Tournament.from_ordering(list(range(h)), [(h - 1, 0)])


def _strong_input(h, size):
    K = required_m_length(h)
    chunks = {i * (2 * h + 2) - 1 for i in range(1, 2 ** (h + 1) + 1)}
    sizes = [size if i in chunks else 2 for i in range(K)]
    return layered(sizes, mixed_roles(K), seed=0)


def test_find_strong_strict_threshold():
    T, seq = _strong_input(2, 30)
    with pytest.raises(InsufficientSize) as exc:
        find_strong_m_sequence(_single_star(2), (0, 1), T, seq, SequenceParams(F(2, T.n), 0, 1), "strict")
    assert "2^(2^(8h+2))" in str(exc.value)


def test_find_strong_relaxed_h2():
    H = _single_star(2)
    T, seq = _strong_input(2, 30)
    r = find_strong_m_sequence(H, (0, 1), T, seq, SequenceParams(F(2, T.n), 0, 1))
    assert len(r.sequence) == strong_length(2)
    assert validate_strong(T, r.sequence, r.I)
    assert r.state0_events <= r.turan_bound == turan_bound(8, 2)
    assert r.params.replay() == r.params.values
    if r.state0_events:
        assert len(r.edges) >= 1


def test_poly_trans_constructed():
    for h in (2, 3):
        L = strong_length(h)
        T, seq = layered([12] * L, mixed_roles(L), seed=h)
        res = poly_trans_detailed(_single_star(h), tuple(range(h)), T, seq,
                                  SequenceParams(F(12, T.n), 0, F(1, 3)), oracle_extractor())
        assert is_transitive(T, res.vertices) and res.bound_met


def test_poly_trans_strict_threshold():
    h = 2
    L = strong_length(h)
    T, seq = layered([12] * L, mixed_roles(L), seed=0)
    with pytest.raises(InsufficientSize) as exc:
        poly_trans_detailed(_single_star(h), (0, 1), T, seq, SequenceParams(F(12, T.n), 0, F(1, 3)),
                            oracle_extractor(), mode="strict")
    assert "2^(21h^2)/c" in str(exc.value)


# driver, merge, substitution

def test_driver_examples():
    T = Tournament.transitive(10)
    assert engine.coloring_driver(T, whole_if_transitive, F(1, 2)).num_colors == 1


def test_driver_oracle_third():
    for n in range(2, 15):
        T = random_tournament(n, n)
        rep = engine.coloring_driver_report(T, oracle_extractor(), F(1, 3), strict=False)
        assert verify_coloring(T, rep.coloring)
        if not rep.breaches:
            assert engine.driver_bound_holds(n, rep.coloring.num_colors, F(1, 3))


def test_driver_singletons():
    T = random_tournament(12, 0)
    # a single vertex meets |S|^eps only in the limit eps = 0
    col = engine.coloring_driver(T, engine.singleton_extractor, 0)
    assert col.num_colors == 12 and engine.driver_bound_holds(12, 12, 0)


def test_merge_saturated():
    T = Tournament.transitive(16)
    A1, T1 = VertexSet(range(8, 16)), VertexSet(range(8))
    merged = merge_saturated(T, A1, T1, oracle_extractor(), F(1, 2))
    assert len(merged) == 16 and is_transitive(T, merged)
    with pytest.raises(NotSaturated):
        merge_saturated(T.flip(0, 8), A1, T1, oracle_extractor(), F(1, 2))


def test_substitution_epsilon():
    assert substitution_epsilon(1, 1, 1) == F(1, 2)
    prev = F(0)
    for eF in (F(1, 100), F(1, 10), F(1, 2), F(1)):
        e = substitution_epsilon(F(1, 100), eF, 3)
        assert 0 < e < F(1, 3) and e > prev
        prev = e


# Color-H-free

def test_color_small_cases():
    H = catalog("fig3").tournament
    assert engine.color_h_free(H, Tournament.transitive(20)).num_colors == 1
    col = engine.color_h_free(H, cycle3())
    assert col.num_colors == 2 and verify_coloring(cycle3(), col)


def test_color_random_hosts():
    for name in ("fig1", "fig2", "fig3"):
        p = catalog(name)
        for seed in range(2):
            T = random_tournament(128, seed)
            col = engine.color_h_free(p.tournament, T, theta=p.ordering)
            assert verify_coloring(T, col) and col.num_colors <= T.n


def test_color_rejects_non_constellation():
    with pytest.raises(NotConstellation):
        engine.color_h_free(catalog("c5").tournament, random_tournament(10, 0))


def test_config_parsing():
    cfg = engine.parse_config("mode=strict\nlambda=1/8\nk=3\n# comment\nfallback=greedy\n")
    assert cfg.mode == "strict" and cfg.lam == F(1, 8) and cfg.k == 3 and cfg.fallback == "greedy"
    from tournacolor.errors import ParseError
    with pytest.raises(ParseError):
        engine.parse_config("colour=3\n")
    with pytest.raises(DomainError):
        engine.parse_config("fallback=magic\n")
