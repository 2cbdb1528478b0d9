"""Sequence construction, PolyTrans, Color-H-free and the coloring driver.

Every operation runs in one of two modes.  ``strict`` keeps the published
constants as exact prime-power monomials and stops with InsufficientSize as
soon as an input falls below a threshold, which at desk scale is always.
``relaxed`` takes user rationals so the control flow can be exercised.  All
sequences are validated before they are returned.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from mpmath import iv

from .core import (
    Coloring,
    EmbeddingCertificate,
    Tournament,
    VertexSet,
    _greedy_mask,
    _is_transitive_mask,
    as_mask,
    bits,
    edge_count,
    transitive_ordering,
)
from .errors import (
    ContractError,
    DomainError,
    EmptyResult,
    ExtractorBroke,
    InsufficientSize,
    InternalContractViolation,
    NotConstellation,
    NotSaturated,
    PreconditionViolated,
)
from .exact import (
    _IV_LOCK,
    LogRatio,
    Monomial,
    at_least_times,
    at_most_times,
    coloring_bound_holds,
    power_at_least,
    power_at_least_real,
)
from .oracles import OracleBudget, max_transitive_exact
from .patterns import (
    backward_edge_graph,
    check_ordering,
    constellation_report,
    find_constellation_ordering,
    star_decomposition,
    theta_partition,
)
from .sequences import (
    LINEAR,
    TRANSITIVE,
    LogBound,
    MSequence,
    SequenceParams,
    SaturatedPair,
    matches_kind,
    validate_l_sequence,
    validate_M_big,
    validate_m_sequence,
    validate_saturated,
    validate_sequence,
    validate_smooth,
    validate_strong,
)

Number = Union[int, Fraction, Monomial]
Extractor = Callable[[Tournament, VertexSet], VertexSet]

STRICT = "strict"
RELAXED = "relaxed"
_EXPAND_LIMIT = 1 << 16


def _check_mode(mode: str) -> str:
    if mode not in (STRICT, RELAXED):
        raise DomainError(f"mode must be strict or relaxed, got {mode!r}")
    return mode


def _tidy(x: Monomial, keep: bool) -> Number:
    """A Fraction when x is rational and small, unless keep asks for Monomial."""
    if not keep and x.is_rational() and x.bit_size() <= _EXPAND_LIMIT:
        return x.to_fraction()
    return x


def _as_fraction(x: Number, what: str) -> Fraction:
    if isinstance(x, Monomial):
        if x.is_rational() and x.bit_size() <= _EXPAND_LIMIT:
            return x.to_fraction()
        raise DomainError(f"{what} = {x!r} is too extreme for a rational update")
    return Fraction(x)


# parameter ledger

def _rule_smooth(v: dict, f, L) -> dict:
    f = Fraction(f)
    out = dict(v)
    out["c"] = v["c"] * (1 - f) / 2
    out["lam"] = v["lam"] * 4 * L / (1 - f) ** 2
    return out


def _shrink(v: dict, h: int) -> Fraction:
    lam, xi = _as_fraction(v["lam"], "lambda"), Fraction(v["xi"])
    t = 1 - lam * h / xi
    if t <= 0:
        raise InsufficientSize(f"1 - lambda*h/xi = {t} is not positive; lambda left the workable range")
    return t


def _rule_state0(v: dict, h, k) -> dict:
    out = dict(v)
    xi = Fraction(v["xi"])
    out["c"] = v["c"] * xi / (2 * h)
    out["lam"] = v["lam"] * 4 * h * h * k / xi ** 2
    out["xi"] = Fraction(1, 2 * (h + 2))
    return out


def _rule_state1(v: dict, h, k) -> dict:
    out = dict(v)
    xi, t = Fraction(v["xi"]), _shrink(v, h)
    out["c"] = v["c"] * xi * t / 2
    out["lam"] = v["lam"] * 4 * k * (h + 1) / (xi ** 2 * t ** 2)
    out["xi"] = xi * t / 2
    return out


def _rule_core(v: dict, h, k) -> dict:
    out = dict(v)
    xi, t = Fraction(v["xi"]), _shrink(v, h)
    out["c"] = v["c"] * xi * t / 2
    out["lam"] = v["lam"] * 4 * k / (xi ** 2 * t ** 2)
    out["xi"] = xi * t / 2
    return out


def _rule_set(v: dict, **values) -> dict:
    out = dict(v)
    out.update(values)
    return out


RULES = {
    "smooth": _rule_smooth,
    "state0": _rule_state0,
    "state1": _rule_state1,
    "core": _rule_core,
    "set": _rule_set,
}


@dataclass
class ParamState:
    """Running values of c, lam, xi (and friends) with an audit trail.

    ``history`` holds (rule, arguments, values after) triples; ``replay``
    re-applies the rules to the initial values.
    """

    mode: str
    values: dict
    history: list = field(default_factory=list)
    initial: dict = field(default_factory=dict)

    def __post_init__(self):
        _check_mode(self.mode)
        if not self.initial:
            self.initial = dict(self.values)

    def apply(self, rule: str, **args) -> dict:
        self.values = RULES[rule](dict(self.values), **args)
        self.history.append((rule, dict(args), dict(self.values)))
        return self.values

    def __getitem__(self, key):
        return self.values[key]

    def replay(self) -> dict:
        v = dict(self.initial)
        for rule, args, _ in self.history:
            v = RULES[rule](v, **args)
        return v

    def params(self, eps=Fraction(1), **extra) -> SequenceParams:
        return SequenceParams(self.values["c"], self.values["lam"], eps, **extra)


# schedules and constants

def _check_common(lam: Number, k: int, h: int):
    if not isinstance(lam, Monomial):
        lam = Fraction(lam)
        if not 0 < lam < 1:
            raise DomainError(f"lambda must lie in (0,1), got {lam}")
    lm = Monomial.of(lam)
    if lm.compare(1) >= 0:
        raise DomainError(f"lambda must lie in (0,1), got {lam!r}")
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if h < 2:
        raise DomainError(f"h must be >= 2, got {h}")
    return lm


def lambda_schedule(lam: Number, k: int, h: int, i: int) -> Number:
    """lambda_i = (lam^2 / (4^k h^(4k)))^(2^i h^(2i)), exactly.

    A Fraction when the value is small enough to expand (and lam was given
    as a rational), otherwise a Monomial.
    """
    lm = _check_common(lam, k, h)
    if not 0 <= i <= k:
        raise DomainError(f"level i must lie in 0..{k}, got {i}")
    base = lm ** 2 / (Monomial.of(4) ** k * Monomial.of(h) ** (4 * k))
    return _tidy(base ** (2 ** i * h ** (2 * i)), isinstance(lam, Monomial))


def c_of(h: int, k: int, lam: Number) -> Number:
    """Size constant lambda_k^(hk) / (2^k h^(2k)) of an l-sequence of length 2^k."""
    _check_common(lam, k, h)
    lk = Monomial.of(lambda_schedule(lam, k, h, k))
    val = lk ** (h * k) / (Monomial.pow2(k) * Monomial.of(h) ** (2 * k))
    return _tidy(val, isinstance(lam, Monomial))


def _find_l_min_n(h: int, k: int, lam: Number) -> Monomial:
    lk = Monomial.of(lambda_schedule(lam, k, h, k))
    return Monomial.pow2(k + 1) * (h + 1) * Monomial.of(h) ** (2 * k) / lk ** (h * k)


@dataclass(frozen=True)
class StrictConstants:
    h: int
    log2_inv_epsilon: int
    log2_lambda_init: int
    k: int
    lambda_init: Monomial
    thresholds: dict  # name -> Monomial

    def log2_threshold(self, name: str) -> tuple[float, float]:
        lo, hi, _ = self.thresholds[name].log2_interval()
        return lo, hi


def strict_constants(h: int) -> StrictConstants:
    if h < 2:
        raise DomainError(f"h must be >= 2, got {h}")
    lam0 = Monomial.pow2(-(2 ** (9 * h)))
    k = 2 * h + 3
    th = {
        "find_l_sequence.n": _find_l_min_n(h, k, lam0),
        "find_strong_m_sequence.M": Monomial.of(2 * (h + 2)) * Monomial.pow2(2 ** (8 * h + 2)),
        "find_strong_m_sequence.lambda_max": Monomial.pow2(-(2 ** (5 * h + 6))),
        "poly_trans.lambda_max": Monomial.pow2(-25 * h * h) / h,
        "poly_trans.n_times_c": Monomial.pow2(21 * h * h),
    }
    return StrictConstants(h, 2 ** (50 * h * h + 1), -(2 ** (9 * h)), k, lam0, th)


# epsilon_c


def _mpf_to_fraction(raw) -> Fraction:
    sign, man, exp, _ = raw
    v = Fraction(int(man)) * (Fraction(2) ** int(exp))
    return -v if sign else v


def _c_interval(c: Fraction):
    return iv.mpf(c.numerator) / c.denominator


def _eps_interval(eb: "EpsilonBound"):
    if eb.exact is not None:
        return _c_interval(eb.exact)
    return iv.mpf([_c_interval(eb.lo).a, _c_interval(eb.hi).b])


def _eps_prec(c: Fraction) -> int:
    return 96 + 2 * max(c.denominator.bit_length(), c.numerator.bit_length())


@dataclass(frozen=True)
class EpsilonBound:
    """The exponent log(1-c)/log(c) enclosed in [lo, hi]."""

    c: Fraction
    lo: Fraction
    hi: Fraction
    exact: Optional[Fraction] = None

    def __float__(self) -> float:
        return float((self.lo + self.hi) / 2)

    def identity_holds(self) -> bool:
        """Interval check that c^eps = 1 - c."""
        prec = _eps_prec(self.c)
        with _IV_LOCK:
            old = iv.prec
            iv.prec = prec
            try:
                e = _eps_interval(self)
                lhs = _c_interval(self.c) ** e
                rhs = 1 - _c_interval(self.c)
                d = lhs - rhs
                tol = iv.mpf(2) ** (-(prec // 2))
                return bool(d.a <= 0 <= d.b) and bool((d.b - d.a) <= tol)
            finally:
                iv.prec = old


def epsilon_of(c: Number) -> EpsilonBound:
    if isinstance(c, Monomial):
        c = _as_fraction(c, "c")
    c = Fraction(c)
    if not 0 < c < 1:
        raise DomainError(f"c must lie in (0,1), got {c}")
    if c == Fraction(1, 2):
        return EpsilonBound(c, Fraction(1), Fraction(1), Fraction(1))
    prec = _eps_prec(c)
    with _IV_LOCK:
        old = iv.prec
        iv.prec = prec
        try:
            x = _c_interval(c)
            r = iv.log(1 - x) / iv.log(x)
            lo, hi = (_mpf_to_fraction(x) for x in r._mpi_)
        finally:
            iv.prec = old
    return EpsilonBound(c, lo, hi)


def certify_merge_identity(c: Number, n: int) -> bool:
    """Interval certificate that (cn)^e + c n^e >= n^e for e = epsilon_of(c).

    Both sides agree exactly in real arithmetic, so the check asks that the
    enclosure of the difference contains zero and is narrow, beside the
    identity c^e = 1 - c itself.
    """
    eb = epsilon_of(c)
    if not eb.identity_holds():
        return False
    c = eb.c
    prec = _eps_prec(c) + 2 * n.bit_length()
    with _IV_LOCK:
        old = iv.prec
        iv.prec = prec
        try:
            e = _eps_interval(eb)
            x = _c_interval(c)
            N = iv.mpf(n)
            lhs = (x * N) ** e + x * N ** e
            rhs = N ** e
            d = lhs - rhs
            tol = rhs * iv.mpf(2) ** (-(_eps_prec(c) // 2))
            return bool(d.b >= 0) and bool(d.a >= -tol.b)
        finally:
            iv.prec = old


# Find-L-Sequence


class _LFinder:
    def __init__(self, T: Tournament, H: Tournament, lam: Number, k: int):
        self.T, self.H, self.k = T, H, k
        self.lam = lam
        self.h = H.n
        self._lam_i: dict = {}
        self._need: dict = {}

    def lam_at(self, level: int):
        if level not in self._lam_i:
            self._lam_i[level] = lambda_schedule(self.lam, self.k, self.h, level)
        return self._lam_i[level]

    def need(self, level: int, size: int) -> int:
        """Smallest count with count >= lambda_level * size (at least 1)."""
        key = (level, size)
        if key not in self._need:
            x = self.lam_at(level)
            if isinstance(x, Monomial):
                v = (x * size).ceil()
            else:
                v = math.ceil(Fraction(x) * size)
            self._need[key] = max(v, 1)
        return self._need[key]

    def run(self, mask: int, level: int):
        if level == 0:
            return [mask]
        h = self.h
        m = mask.bit_count() // (h + 1)
        if m == 0:
            raise InsufficientSize(
                f"a set of {mask.bit_count()} vertices at level {level} cannot be split into "
                f"{h} parts of size floor(n/{h + 1}) >= 1")
        vs = list(bits(mask))
        sets = {j: sum(1 << v for v in vs[j * m:(j + 1) * m]) for j in range(h)}
        return self.core(list(range(h)), sets, level, [])

    def core(self, Hr: list, sets: dict, level: int, pivots: list):
        T, H = self.T, self.H
        if len(Hr) == 1:
            t = Hr[0]
            low = (sets[t] & -sets[t]).bit_length() - 1
            return EmbeddingCertificate(dict(pivots + [(t, low)]))
        t1, rest = Hr[0], Hr[1:]
        need = {j: self.need(level, sets[j].bit_count()) for j in rest}
        fwd = {j: H.has_edge(t1, j) for j in rest}
        fail_count = {j: 0 for j in rest}
        fail_sets: list = []
        for v in bits(sets[t1]):
            nbr = {j: (T.out[v] if fwd[j] else T.inn[v]) & sets[j] for j in rest}
            failing = [j for j in rest if nbr[j].bit_count() < need[j]]
            if not failing:
                return self.core(rest, nbr, level, pivots + [(t1, v)])
            for j in failing:
                fail_count[j] += 1
            fail_sets.append((v, failing))
        jstar = max(rest, key=lambda j: (fail_count[j], -rest.index(j)))
        W = sum(1 << v for v, fs in fail_sets if jstar in fs)
        Sj = sets[jstar]
        A = self.run(W, level - 1)
        if isinstance(A, EmbeddingCertificate):
            return A
        B = self.run(Sj, level - 1)
        if isinstance(B, EmbeddingCertificate):
            return B
        total = W.bit_count() * Sj.bit_count()
        if at_most_times(total - edge_count(T, W, Sj), self.lam_at(level), total):
            return A + B
        return B + A


def find_l_sequence(T: Tournament, H: Tournament, lam: Number, k: int, mode: str = RELAXED):
    """An all-linear sequence of length 2^k, or a certified copy of H in T."""
    _check_mode(mode)
    h = H.n
    if h < 2:
        raise DomainError("the pattern needs at least two vertices")
    _check_common(lam, k, h)
    if mode == STRICT:
        need = _find_l_min_n(h, k, lam)
        if Monomial.of(max(T.n, 1)) < need:
            lo, hi, _ = need.log2_interval()
            raise InsufficientSize(
                f"find_l_sequence needs n >= 2^(k+1)(h+1)h^(2k)/lambda_k^(hk), log2 in [{lo:.6g}, {hi:.6g}]",
                required=repr(need), log2_required=(lo, hi))
    c = c_of(h, k, lam)
    if k == 0:
        seq = MSequence.linear(T, [T.vertices()])
    else:
        res = _LFinder(T, H, lam, k).run(T.vertices().mask, k)
        if isinstance(res, EmbeddingCertificate):
            if not res.verify(T, H):
                raise InternalContractViolation("assembled copy of H is not a copy", res)
            return res
        seq = MSequence.linear(T, [VertexSet(m) for m in res])
    rep = validate_l_sequence(T, seq, SequenceParams(c, lam))
    if not rep:
        if mode == STRICT:
            raise InternalContractViolation(f"l-sequence failed validation: {rep}", rep)
        need = _find_l_min_n(h, k, lam)
        lo, hi, _ = need.log2_interval()
        raise InsufficientSize(
            f"l-sequence outside its guarantee at n = {T.n} (the guarantee needs log2 n in "
            f"[{lo:.6g}, {hi:.6g}]): {rep}", required=repr(need), log2_required=(lo, hi))
    return seq


# Find-Clique


@dataclass(frozen=True)
class Graph:
    """Undirected graph as neighbour bitmasks."""

    adj: tuple

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError("loops are not allowed")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(tuple(adj))

    @property
    def n(self) -> int:
        return len(self.adj)

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.adj[u] >> v) & 1)

    def edge_count(self, xm: int, ym: int) -> int:
        return sum((self.adj[x] & ym).bit_count() for x in bits(xm))

    def is_clique(self, vertices) -> bool:
        vs = list(vertices)
        return all(self.has_edge(a, b) for a, b in itertools.combinations(vs, 2))


def clique_lambda_bound(k: int) -> Fraction:
    return Fraction(1, 3 ** (2 * k + 1) * k)


def find_clique(G: Graph, classes: Sequence, lam) -> list[int]:
    """One vertex per class, pairwise adjacent, for dense k-partite G."""
    masks = [as_mask(c) if not isinstance(c, int) else c for c in classes]
    k = len(masks)
    if k == 0:
        raise PreconditionViolated("find_clique needs at least one class")
    lam = Fraction(lam)
    if not 0 <= lam < clique_lambda_bound(k):
        raise PreconditionViolated(f"lambda = {lam} is not below 1/(3^(2k+1)k) = {clique_lambda_bound(k)}")
    seen = 0
    for i, m in enumerate(masks):
        if not m:
            raise PreconditionViolated(f"class {i + 1} is empty")
        if m & seen:
            raise PreconditionViolated(f"class {i + 1} overlaps an earlier class")
        seen |= m
    for i, j in itertools.combinations(range(k), 2):
        total = masks[i].bit_count() * masks[j].bit_count()
        e = G.edge_count(masks[i], masks[j])
        if not total - e <= lam * total:
            raise PreconditionViolated(f"d(V_{i + 1}, V_{j + 1}) = {Fraction(e, total)} < 1 - lambda")
    chosen = []
    cur = masks
    while len(cur) > 1:
        kk = len(cur)
        thr = 1 - 2 * kk * lam
        bad = 0
        for m in cur[1:]:
            s = m.bit_count()
            for v in bits(cur[0]):
                if (G.adj[v] & m).bit_count() < thr * s:
                    bad |= 1 << v
        cand = cur[0] & ~bad
        if not cand:
            raise InternalContractViolation("no eligible vertex in the first class", cur)
        v1 = (cand & -cand).bit_length() - 1
        chosen.append(v1)
        cur = [m & G.adj[v1] for m in cur[1:]]
        if any(not m for m in cur):
            raise InternalContractViolation("a class lost every vertex", cur)
        lam = lam / (1 - 2 * kk * lam) ** 2
    chosen.append((cur[0] & -cur[0]).bit_length() - 1)
    if not G.is_clique(chosen):
        raise InternalContractViolation("transversal is not a clique", chosen)
    return chosen


# MakeSmooth


@dataclass(frozen=True)
class SmoothOutput:
    sequence: MSequence
    pieces: tuple  # per element: tuple of VertexSet, C'_i intersected with each S_i^j
    params: SequenceParams


def _floor_times(x: Number, s: int) -> int:
    if isinstance(x, Monomial):
        return (x * s).floor() if s else 0
    v = Fraction(x) * s
    return v.numerator // v.denominator


def make_smooth_detailed(seq: MSequence, subsets: Sequence, f, params: SequenceParams) -> SmoothOutput:
    T = seq.host
    L = len(seq)
    f = Fraction(f)
    if not 0 <= f < 1:
        raise PreconditionViolated(f"f must lie in [0,1), got {f}")
    if len(subsets) != L:
        raise PreconditionViolated(f"{len(subsets)} subset lists for {L} elements")
    subs: list = []
    for i, ((C, role), parts) in enumerate(zip(seq.elements, subsets), start=1):
        ms = [as_mask(p) for p in parts]
        if not ms:
            raise PreconditionViolated(f"element {i} has no subsets")
        if role == LINEAR and len(ms) != 1:
            raise PreconditionViolated(f"linear element {i} must have exactly one subset")
        seen = 0
        for m in ms:
            if m & ~C.mask:
                raise PreconditionViolated(f"a subset of element {i} leaves the element")
            if m & seen:
                raise PreconditionViolated(f"subsets of element {i} overlap")
            seen |= m
            if m.bit_count() < (1 - f) * len(C):
                raise PreconditionViolated(
                    f"a subset of element {i} has {m.bit_count()} < (1-f)|C_{i}| = {(1 - f) * len(C)} vertices")
        subs.append(ms)
    rep = validate_sequence(T, seq, params)
    if not rep:
        raise PreconditionViolated(f"input sequence is not valid at the given parameters: {rep}")
    x = params.lam * 2 * L / (1 - f) ** 2 if not isinstance(params.lam, Monomial) else \
        params.lam * Fraction(2 * L) / (1 - f) ** 2
    allow: dict[int, int] = {}

    def allowed(s: int) -> int:
        if s not in allow:
            allow[s] = _floor_times(x, s)
        return allow[s]

    out, inn = T.out, T.inn
    pieces = []
    for i in range(L):
        mine = []
        for m in subs[i]:
            keep = 0
            for v in bits(m):
                ok = True
                for j in range(L):
                    if j == i:
                        continue
                    row = out[v] if i < j else inn[v]
                    for S in subs[j]:
                        s = S.bit_count()
                        if s - (row & S).bit_count() > allowed(s):
                            ok = False
                            break
                    if not ok:
                        break
                if ok:
                    keep |= 1 << v
            mine.append(keep)
        if not any(mine):
            raise EmptyResult(f"element {i + 1} lost every vertex while smoothing")
        pieces.append(mine)
    new_seq = MSequence(T, tuple((VertexSet(sum(p)), role) for p, (_, role) in zip(pieces, seq.elements)))
    new_lam = params.lam * 4 * L / (1 - f) ** 2
    new_params = SequenceParams(params.c * (1 - f) / 2, new_lam, params.eps)
    rep = validate_smooth(T, new_seq, new_params, kind=seq.kind() if matches_kind(seq, "m") else None)
    if not rep:
        raise InternalContractViolation(f"smoothed sequence failed validation: {rep}", rep)
    for i, (p, m) in enumerate(zip(pieces, subs), start=1):
        for piece, S in zip(p, m):
            if 2 * piece.bit_count() < (1 - f) * len(seq.elements[i - 1][0]):
                raise InternalContractViolation(f"element {i}: a piece fell below (1-f)|C_i|/2")
    return SmoothOutput(new_seq, tuple(tuple(VertexSet(q) for q in p) for p in pieces), new_params)


def make_smooth(seq: MSequence, subsets: Sequence, f, params: SequenceParams) -> MSequence:
    """Smooth ``seq`` keeping vertices well connected to every subset.

    ``subsets[i]`` lists the disjoint parts S_i^j of element i.  The result
    is smooth at (c(1-f)/2, 4 lam L/(1-f)^2).
    """
    return make_smooth_detailed(seq, subsets, f, params).sequence


def smooth_whole(seq: MSequence, params: SequenceParams) -> SmoothOutput:
    return make_smooth_detailed(seq, [[s] for s in seq.sets()], 0, params)


# extractors


def _check_extractor(T: Tournament, S: int, out, eps, who: str = "extractor") -> int:
    m = as_mask(out)
    if m & ~S:
        raise ExtractorBroke(f"{who} returned vertices outside its input")
    if not m:
        raise ExtractorBroke(f"{who} returned an empty set")
    if not _is_transitive_mask(T, m):
        raise ExtractorBroke(f"{who} returned a set with a directed cycle")
    if not power_at_least_real(m.bit_count(), S.bit_count(), eps):
        raise ExtractorBroke(
            f"{who} returned {m.bit_count()} vertices from {S.bit_count()}, below |S|^eps with eps = {eps!r}")
    return m


def oracle_extractor(budget: OracleBudget = OracleBudget()) -> Extractor:
    def extract(T: Tournament, S: VertexSet) -> VertexSet:
        return max_transitive_exact(T, S, budget)
    return extract


def greedy_extractor(T: Tournament, S: VertexSet) -> VertexSet:
    return VertexSet(_greedy_mask(T, as_mask(S)))


def singleton_extractor(T: Tournament, S: VertexSet) -> VertexSet:
    return VertexSet([VertexSet(S).min()])


def whole_if_transitive(T: Tournament, S: VertexSet) -> VertexSet:
    m = as_mask(S)
    if _is_transitive_mask(T, m):
        return VertexSet(m)
    return singleton_extractor(T, S)


# Find-M-Sequence


def find_m_sequence(T: Tournament, lseq: MSequence, Lambda, eps, extractor: Extractor, *,
                    c: Number, lam: Number) -> MSequence:
    """Turn an odd l-sequence into an m-sequence of the same length."""
    Lambda = Fraction(Lambda)
    if not matches_kind(lseq, "l") or len(lseq) % 2 == 0:
        raise PreconditionViolated("find_m_sequence needs an l-sequence of odd length")
    k = (len(lseq) - 1) // 2
    if not 0 < Lambda < 1:
        raise PreconditionViolated(f"Lambda must lie in (0,1), got {Lambda}")
    bound = Lambda / (4 * (2 * k + 1) * 3 ** (4 * k + 3))
    if lam and Monomial.of(lam) > bound:
        raise PreconditionViolated(f"lambda = {lam!r} exceeds Lambda/(4(2k+1)3^(4k+3)) = {bound}")
    rep = validate_l_sequence(T, lseq, SequenceParams(c, lam))
    if not rep:
        raise PreconditionViolated(f"input l-sequence is not valid: {rep}")
    sets = [s.mask for s in lseq.sets()]
    classes: list[list[int]] = []
    for idx, A in enumerate(sets):
        if idx % 2 == 0:
            classes.append([A])
            continue
        R, chunks = A, []
        while R and 2 * R.bit_count() >= A.bit_count():
            tr1 = _greedy_mask(T, R)
            tr2 = _check_extractor(T, R, extractor(T, VertexSet(R)), eps)
            pick = tr1 if tr1.bit_count() >= tr2.bit_count() else tr2
            chunks.append(pick)
            R &= ~pick
        classes.append(chunks)
    nodes = [m for cl in classes for m in cl]
    owner = [ci for ci, cl in enumerate(classes) for _ in cl]
    edges = []
    for a, b in itertools.combinations(range(len(nodes)), 2):
        if owner[a] == owner[b]:
            continue
        x, y = (a, b) if owner[a] < owner[b] else (b, a)
        X, Y = nodes[x], nodes[y]
        total = X.bit_count() * Y.bit_count()
        if total - edge_count(T, X, Y) <= Lambda * total:
            edges.append((a, b))
    G = Graph.from_edges(len(nodes), edges)
    cls_masks, start = [], 0
    for cl in classes:
        cls_masks.append(sum(1 << (start + t) for t in range(len(cl))))
        start += len(cl)
    lam_g = Fraction(0)
    for i, j in itertools.combinations(range(len(cls_masks)), 2):
        total = cls_masks[i].bit_count() * cls_masks[j].bit_count()
        lam_g = max(lam_g, Fraction(total - G.edge_count(cls_masks[i], cls_masks[j]), total))
    pick = find_clique(G, cls_masks, lam_g)
    out = MSequence.mixed(T, [VertexSet(nodes[p]) for p in sorted(pick, key=lambda p: owner[p])])
    c2 = (Monomial.of(c) / 2) ** Fraction(eps) if not isinstance(eps, LogRatio) else None
    cnew = min(c2, Monomial.of(c)) if c2 is not None else Monomial.of(c)
    p = SequenceParams(_tidy(cnew, isinstance(c, Monomial)), Lambda, eps)
    rep = validate_m_sequence(T, out, p)
    big = validate_M_big(out, LogBound(Monomial.of(c) * T.n, 2))
    if not rep or not big:
        raise InternalContractViolation(f"m-sequence failed validation: {rep} {big}", (rep, big))
    return out


# FindStrong-M-Sequence


def strong_length(h: int) -> int:
    return 2 * h * h + 4 * h + 1


def required_m_length(h: int) -> int:
    return 2 ** (h + 2) * (h + 1) + 2 * h + 1


def strong_index_set(h: int) -> list[int]:
    return [j * h + 1 for j in range(1, h + 1)]


def turan_bound(N: int, h: int) -> int:
    """Most state-0 events before an h-clique must exist in a graph on N nodes."""
    if h <= 2:
        return 1
    return math.floor(Fraction(h - 2, h - 1) * N * N / 2) + 1


@dataclass
class StarSearchState:
    sigma: list  # remaining stars
    G: list  # adjacency sets over chunk ids
    S: list  # current independent chunk ids, sorted
    masks: list  # element sets of the current sequence
    colour: dict  # vertex -> colour 1..h+1 for vertices of S-chunks
    state0: int = 0
    state1: int = 0
    hits: list = field(default_factory=list)


@dataclass(frozen=True)
class StrongResult:
    sequence: MSequence
    I: tuple
    params: ParamState
    state0_events: int
    state1_events: int
    turan_bound: int
    edges: tuple


@dataclass(frozen=True)
class _Shape:
    """Stars, blocks and in-block positions of H under theta."""

    stars: tuple
    block: dict  # vertex -> block index
    rank: dict  # vertex -> 1-based position inside its block
    nblocks: int


def _shape(H: Tournament, theta) -> _Shape:
    theta = check_ordering(H, theta)
    reason = constellation_report(H, theta)
    if reason is not None:
        raise NotConstellation(reason)
    D = star_decomposition(backward_edge_graph(H, theta))
    P = theta_partition(H, theta)
    block, rank = {}, {}
    for b, (_, vs) in enumerate(P.blocks):
        for r, v in enumerate(vs, start=1):
            block[v], rank[v] = b, r
    return _Shape(D.stars, block, rank, len(P.blocks))


def _element_of(masks: list) -> dict:
    return {v: i for i, m in enumerate(masks) for v in bits(m)}


def _forward_filter(T: Tournament, masks: list, where: dict, D: int, e: int, anchors: list) -> int:
    """Vertices of D (inside element e) whose edges to the anchors agree with
    the sequence order; anchors in the same element impose nothing."""
    keep = D
    for a in anchors:
        ea = where[a]
        if ea < e:
            keep &= T.out[a]
        elif ea > e:
            keep &= T.inn[a]
    return keep


def _search_star(T: Tournament, H: Tournament, star, X: int, Ys: list):
    """(rho, [r_i]) realising the star, or (None, failing sets per rho)."""
    fails = []
    for rho in bits(X):
        picks, bad = [], []
        for i, (y, Y) in enumerate(zip(star.leaves, Ys)):
            row = T.out[rho] if H.has_edge(star.center, y) else T.inn[rho]
            cand = row & Y
            if cand:
                picks.append((cand & -cand).bit_length() - 1)
            else:
                bad.append(i)
        if not bad:
            return rho, picks
        fails.append((rho, bad))
    return None, fails


def _pigeonhole(fails: list, q: int) -> tuple[int, int]:
    count = [0] * q
    for _, bad in fails:
        for i in bad:
            count[i] += 1
    istar = max(range(q), key=lambda i: (count[i], -i))
    C = sum(1 << rho for rho, bad in fails if istar in bad)
    return istar, C


def _slice_colour(T: Tournament, m: int, h: int) -> dict:
    order = transitive_ordering(T, VertexSet(m))
    w = len(order) // (h + 2)
    col = {}
    for idx, v in enumerate(order):
        j = idx // w + 1 if w else h + 1
        col[v] = j if j <= h else h + 1
    return col


def _choose_independent(G: list, N: int, h: int, hits: list) -> Optional[list]:
    """Independent h-set: most common-neighbour pairs, then fewest hits, then
    lexicographically first."""
    def score(S):
        common = sum(len(G[a] & G[b]) for a, b in itertools.combinations(S, 2))
        return (-common, sum(hits[x] for x in S), S)

    if math.comb(N, h) <= 200_000:
        best = None
        for S in itertools.combinations(range(N), h):
            if any(b in G[a] for a, b in itertools.combinations(S, 2)):
                continue
            sc = score(S)
            if best is None or sc < best:
                best = sc
        return list(best[2]) if best else None
    S: list = []
    for x in sorted(range(N), key=lambda x: (hits[x], x)):
        if all(x not in G[y] for y in S):
            S.append(x)
            if len(S) == h:
                return sorted(S)
    return None


def _find_clique_exact(G: list, N: int, h: int) -> Optional[list]:
    def grow(cl, cand):
        if len(cl) == h:
            return cl
        for x in sorted(cand):
            if x > (cl[-1] if cl else -1):
                r = grow(cl + [x], cand & G[x])
                if r:
                    return r
        return None
    return grow([], set(range(N)))


def _strong_subsequence(seq_masks: list, T: Tournament, clique_t: list, h: int):
    """Pick an m-subsequence of length 2h^2+4h+1 with the clique chunks at a
    strong index set; return (sets, I)."""
    Kt_in = (len(seq_masks) - 1) // 2
    Kt = h * h + 2 * h
    for I in (strong_index_set(h), [j * (h + 1) for j in range(1, h + 1)]):
        chosen, ok = [], True
        bounds = [0] + clique_t + [Kt_in + 1]
        targets = [0] + I + [Kt + 1]
        for g in range(len(bounds) - 1):
            need = targets[g + 1] - targets[g] - 1
            avail = list(range(bounds[g] + 1, bounds[g + 1]))
            if len(avail) < need:
                ok = False
                break
            chosen.extend(avail[:need])
            if g < len(clique_t):
                chosen.append(clique_t[g])
        if not ok:
            continue
        # t-index u is element 2u-1 (0-based); linear A_a is element 2a-2.
        lin = [chosen[0]] + [chosen[p + 1] for p in range(len(chosen) - 1)] + [chosen[-1] + 1]
        sets = [seq_masks[2 * lin[0] - 2]]
        for p, u in enumerate(chosen):
            sets.append(seq_masks[2 * u - 1])
            sets.append(seq_masks[2 * lin[p + 1] - 2])
        return sets, I
    raise InternalContractViolation("no strong index set fits the clique", clique_t)


def find_strong_m_sequence(H: Tournament, theta, T: Tournament, mseq: MSequence,
                           params: SequenceParams, mode: str = RELAXED) -> StrongResult:
    _check_mode(mode)
    h = H.n
    shape = _shape(H, theta)
    if not shape.stars:
        raise PreconditionViolated("the pattern has no backward edge under theta")
    if mode == STRICT:
        need = strict_constants(h).thresholds["find_strong_m_sequence.M"]
        M = params.M if params.M is not None else min((len(s) for s in mseq.transitive_sets()), default=0)
        if Monomial.of(max(M, 1)) < need:
            raise InsufficientSize(f"find_strong_m_sequence needs M >= 2(h+2)*2^(2^(8h+2)) = {need!r}",
                                   required=repr(need), log2_required=need.log2_interval()[:2])
    K = required_m_length(h)
    if len(mseq) != K or not matches_kind(mseq, "m"):
        raise PreconditionViolated(f"need an m-sequence of length {K}, got {len(mseq)} ({mseq.kind()})")
    rep = validate_m_sequence(T, mseq, params)
    if not rep:
        raise PreconditionViolated(f"input m-sequence is not valid: {rep}")
    if params.M is not None and not validate_M_big(mseq, params.M):
        raise PreconditionViolated("input m-sequence is not M-big")
    eps = params.eps
    ps = ParamState(mode, {"c": params.c, "lam": params.lam, "xi": Fraction(1, 2 * (h + 2))})
    sm = smooth_whole(mseq, params)
    ps.apply("smooth", f=0, L=K)
    N = 2 ** (h + 1)
    chi = 2 * h + 1
    pos = [i * chi + i - 1 for i in range(1, N + 1)]  # 0-based element index of chunk i
    st = StarSearchState(list(shape.stars), [set() for _ in range(N)], list(range(h)),
                         [s.mask for s in sm.sequence.sets()], {}, hits=[0] * N)
    roles = mseq.roles()
    bound = turan_bound(N, h)

    def current() -> MSequence:
        return MSequence(T, tuple((VertexSet(m), r) for m, r in zip(st.masks, roles)))

    def recolour():
        st.colour = {}
        for cid in st.S:
            m = st.masks[pos[cid]]
            if m.bit_count() < h + 2:
                raise InsufficientSize(f"chunk {cid + 1} has {m.bit_count()} < h+2 vertices to colour")
            st.colour.update(_slice_colour(T, m, h))

    def coloured(cid: int, colour: int) -> int:
        return sum(1 << v for v in bits(st.masks[pos[cid]]) if st.colour.get(v) == colour)

    recolour()
    while True:
        if not st.sigma:
            raise InternalContractViolation("every star was realised; T contains the pattern", st)
        star = st.sigma[0]
        nc, nl = shape.block[star.center], shape.block[star.leaves[0]]
        cc, cl = st.S[nc], st.S[nl]
        X = coloured(cc, shape.rank[star.center])
        Ys = [coloured(cl, shape.rank[y]) for y in star.leaves]
        if not X or not all(Ys):
            raise InsufficientSize("a colour class of a designated chunk is empty")
        rho, res = _search_star(T, H, star, X, Ys)
        if rho is not None:
            # state 1: shrink every coloured class towards rho and the r_i
            st.state1 += 1
            anchors = [rho] + res
            removed = X | sum(Ys)
            where = _element_of(st.masks)
            subsets = []
            for e, m in enumerate(st.masks):
                classes: dict = {}
                for v in bits(m & ~removed):
                    classes.setdefault(st.colour.get(v, 0), 0)
                    classes[st.colour.get(v, 0)] |= 1 << v
                parts = [_forward_filter(T, st.masks, where, D, e, anchors) for _, D in sorted(classes.items())]
                parts = [p for p in parts if p]
                if not parts:
                    raise InsufficientSize(f"element {e + 1} lost every vertex after a star was found")
                subsets.append(parts)
            vals = dict(ps.values)
            t = _shrink(vals, h)
            one_minus_f = Fraction(vals["xi"]) * t
            try:
                out = make_smooth_detailed(current(), [[VertexSet(p) for p in ps_] for ps_ in subsets],
                                           1 - one_minus_f, SequenceParams(ps["c"], ps["lam"], eps))
            except PreconditionViolated as exc:
                raise InsufficientSize(f"state-1 shrink outside its regime: {exc}") from exc
            ps.apply("state1", h=h, k=K)
            st.masks = [s.mask for s in out.sequence.sets()]
            st.colour = {v: c for v, c in st.colour.items() if any((m >> v) & 1 for m in st.masks)}
            st.sigma = st.sigma[1:]
            continue
        # state 0: pigeonhole a complete pair and record it in G
        st.state0 += 1
        if st.state0 > bound:
            raise InternalContractViolation(f"state 0 reached {st.state0} times, above the Turan bound {bound}")
        istar, Cset = _pigeonhole(res, len(star.leaves))
        Lset = Ys[istar]
        first, second = (Cset, Lset) if pos[cc] < pos[cl] else (Lset, Cset)
        if edge_count(T, first, second) != first.bit_count() * second.bit_count():
            raise InternalContractViolation("pigeonhole pair is not complete")
        st.masks[pos[cc]], st.masks[pos[cl]] = Cset, Lset
        st.G[cc].add(cl)
        st.G[cl].add(cc)
        st.hits[cc] += 1
        st.hits[cl] += 1
        xi = Fraction(ps["xi"])
        mid = SequenceParams(ps["c"] * xi / h, ps["lam"] * (Fraction(h) / xi) ** 2 if ps["lam"] else 0, eps)
        try:
            out = smooth_whole(current(), mid)
        except (PreconditionViolated, EmptyResult) as exc:
            raise InsufficientSize(f"state-0 resmoothing outside its regime: {exc}") from exc
        ps.apply("state0", h=h, k=K)
        st.masks = [s.mask for s in out.sequence.sets()]
        clique = _find_clique_exact(st.G, N, h)
        if clique:
            clique_t = [(cid + 1) * (h + 1) for cid in clique]
            sets, I = _strong_subsequence(st.masks, T, clique_t, h)
            seq = MSequence.mixed(T, [VertexSet(m) for m in sets])
            p = SequenceParams(ps["c"], ps["lam"], eps)
            r1, r2 = validate_m_sequence(T, seq, p), validate_strong(T, seq, I)
            if not r1 or not r2:
                raise InternalContractViolation(f"strong sequence failed validation: {r1} {r2}", (r1, r2))
            edges = tuple(sorted((a, b) for a in range(N) for b in st.G[a] if a < b))
            return StrongResult(seq, tuple(I), ps, st.state0, st.state1, bound, edges)
        S = _choose_independent(st.G, N, h, st.hits)
        if S is None:
            raise InternalContractViolation("G has neither an h-clique nor an independent h-set")
        st.S = S
        st.sigma = list(shape.stars)
        recolour()


# PolyTrans


def strong_placement(H: Tournament, theta, I: Sequence[int]) -> dict:
    """1-based element positions for vertices of H inside a strong sequence.

    Leaves sit on the strong transitive elements T_{I[i]} (element 2 I[i]);
    the r-th non-leaf after the j-th leaf takes the r-th linear element
    after it.  Vertices of one star therefore pair a linear element with a
    transitive one.
    """
    theta = check_ordering(H, theta)
    D = star_decomposition(backward_edge_graph(H, theta))
    leaves = D.leaves()
    I = list(I)
    place, j, r = {}, 0, 0
    for v in theta:
        if v in leaves:
            j += 1
            r = 0
            if j > len(I):
                raise PreconditionViolated("more leaves than strong elements")
            place[v] = 2 * I[j - 1]
        else:
            r += 1
            p = (2 * I[j - 1] if j else 0) + 2 * r - 1
            if j < len(I) and p >= 2 * I[j]:
                raise PreconditionViolated("too many non-leaves between two leaves for the index set")
            place[v] = p
    return place


@dataclass(frozen=True)
class PolyTransResult:
    vertices: VertexSet
    epsilon: EpsilonBound
    bound_met: bool
    params: ParamState
    stars_removed: int


def poly_trans_detailed(H: Tournament, theta, T: Tournament, strong: MSequence, params: SequenceParams,
                        P: Extractor, I: Optional[Sequence[int]] = None, mode: str = RELAXED,
                        c_hat: Optional[Number] = None) -> PolyTransResult:
    _check_mode(mode)
    h = H.n
    shape = _shape(H, theta)
    I = list(I) if I is not None else strong_index_set(h)
    if mode == STRICT:
        th = strict_constants(h).thresholds
        if Monomial.of(params.c) * max(T.n, 1) < th["poly_trans.n_times_c"]:
            need = th["poly_trans.n_times_c"] / Monomial.of(params.c)
            raise InsufficientSize(f"poly_trans needs n >= 2^(21h^2)/c = {need!r}", required=repr(need),
                                   log2_required=need.log2_interval()[:2])
        if params.lam and Monomial.of(params.lam) > th["poly_trans.lambda_max"]:
            raise InsufficientSize("poly_trans needs lambda <= 1/(2^(25h^2) h)")
    if len(strong) != strong_length(h) or not matches_kind(strong, "m"):
        raise PreconditionViolated(f"need an m-sequence of length {strong_length(h)}")
    if not validate_m_sequence(T, strong, params):
        raise PreconditionViolated("input sequence is not valid at the given parameters")
    if not validate_strong(T, strong, I):
        raise PreconditionViolated(f"input sequence is not strong for I = {I}")
    eps = params.eps
    L = len(strong)
    ps = ParamState(mode, {"c": params.c, "lam": params.lam, "xi": Fraction(1, 6)})
    sm = smooth_whole(strong, params)
    ps.apply("smooth", f=0, L=L)
    roles = strong.roles()
    masks = [s.mask for s in sm.sequence.sets()]
    place = {v: p - 1 for v, p in strong_placement(H, theta, I).items()}  # 0-based
    colour: dict = {}
    for v, e in place.items():
        m = masks[e]
        order = transitive_ordering(T, VertexSet(m)) if roles[e] == TRANSITIVE else tuple(bits(m))
        third = len(order) // 3
        if third == 0:
            raise InsufficientSize(f"element {e + 1} has {len(order)} < 3 vertices to colour")
        for idx, u in enumerate(order):
            colour[u] = v + 1 if idx < third else -1
    c_hat = c_hat if c_hat is not None else Monomial.of(params.c) / Monomial.pow2(7 * h * h)
    eb = epsilon_of(c_hat)
    sigma = list(shape.stars)
    removed = 0

    def cls(v: int) -> int:
        return sum(1 << u for u in bits(masks[place[v]]) if colour.get(u) == v + 1)

    while True:
        if not sigma:
            raise InternalContractViolation("every star was realised; T contains the pattern", colour)
        star = sigma[0]
        X = cls(star.center)
        Ys = [cls(y) for y in star.leaves]
        if not X or not all(Ys):
            raise InsufficientSize("a vertex colour class is empty")
        tau, res = _search_star(T, H, star, X, Ys)
        if tau is not None:
            anchors = [tau] + res
            gone = X | sum(Ys)
            where = _element_of(masks)
            subsets = []
            for e, m in enumerate(masks):
                classes: dict = {}
                for u in bits(m & ~gone):
                    key = colour.get(u, 0)
                    classes[key] = classes.get(key, 0) | (1 << u)
                parts = [_forward_filter(T, masks, where, D, e, anchors) for _, D in sorted(classes.items())]
                parts = [p for p in parts if p]
                if not parts:
                    raise InsufficientSize(f"element {e + 1} lost every vertex after a star was found")
                if roles[e] == LINEAR:
                    parts = [sum(parts)]
                subsets.append(parts)
            t = _shrink(dict(ps.values), h)
            one_minus_f = Fraction(ps["xi"]) * t
            seq_now = MSequence(T, tuple((VertexSet(m), r) for m, r in zip(masks, roles)))
            try:
                out = make_smooth_detailed(seq_now, [[VertexSet(p) for p in q] for q in subsets],
                                           1 - one_minus_f, SequenceParams(ps["c"], ps["lam"], eps))
            except (PreconditionViolated, EmptyResult) as exc:
                raise InsufficientSize(f"core shrink outside its regime: {exc}") from exc
            ps.apply("core", h=h, k=L)
            masks = [s.mask for s in out.sequence.sets()]
            sigma = sigma[1:]
            removed += 1
            continue
        jstar, Cset = _pigeonhole(res, len(star.leaves))
        Tset = Ys[jstar]
        side_c, side_t = place[star.center], place[star.leaves[jstar]]
        first, second = (Cset, Tset) if side_c < side_t else (Tset, Cset)
        if edge_count(T, first, second) != first.bit_count() * second.bit_count():
            raise InternalContractViolation("pigeonhole pair is not complete")
        parts = []
        for m, e in ((Cset, side_c), (Tset, side_t)):
            if roles[e] == TRANSITIVE:
                parts.append(m)
            else:
                parts.append(_check_extractor(T, m, P(T, VertexSet(m)), eps, "P"))
        result = parts[0] | parts[1]
        if not _is_transitive_mask(T, result):
            raise InternalContractViolation("merged set is not transitive")
        met = power_at_least(result.bit_count(), T.n, eb.hi)
        return PolyTransResult(VertexSet(result), eb, met, ps, removed)


def poly_trans(H: Tournament, theta, T: Tournament, strong: MSequence, params: SequenceParams,
               P: Extractor, I: Optional[Sequence[int]] = None, mode: str = RELAXED) -> VertexSet:
    return poly_trans_detailed(H, theta, T, strong, params, P, I, mode).vertices


# coloring driver


@dataclass(frozen=True)
class DriverReport:
    coloring: Coloring
    calls: int
    breaches: tuple  # (call index, |input|, |output|)
    phases: tuple  # sizes at which a new halving phase started


def coloring_driver_report(T: Tournament, extractor: Extractor, eps, strict: bool = True) -> DriverReport:
    """Repeatedly extract transitive classes, halving phase by halving phase.

    With ``strict`` a contract breach raises ExtractorBroke; otherwise it is
    recorded and the undersized (but transitive) class is used.
    """
    remaining = T.vertices().mask
    colour, calls, breaches, phases = {}, 0, [], []
    c = 0
    while remaining:
        start = remaining.bit_count()
        phases.append(start)
        while remaining and 2 * remaining.bit_count() >= start:
            out = as_mask(extractor(T, VertexSet(remaining)))
            calls += 1
            try:
                m = _check_extractor(T, remaining, VertexSet(out), eps)
            except ExtractorBroke:
                if strict or not out or out & ~remaining or not _is_transitive_mask(T, out):
                    raise
                breaches.append((calls, remaining.bit_count(), out.bit_count()))
                m = out
            c += 1
            for v in bits(m):
                colour[v] = c
            remaining &= ~m
    return DriverReport(Coloring(colour), calls, tuple(breaches), tuple(phases))


def coloring_driver(T: Tournament, extractor: Extractor, eps) -> Coloring:
    return coloring_driver_report(T, extractor, eps).coloring


def driver_bound_holds(n: int, colors: int, eps) -> bool:
    """colors <= n^(1-eps) log2 n."""
    return coloring_bound_holds(n, colors, eps)


# merging and substitution


def merge_saturated(T: Tournament, A1, T1, extractor: Extractor, c: Number) -> VertexSet:
    eb = epsilon_of(c)
    rep = validate_saturated(T, SaturatedPair(VertexSet(A1), VertexSet(T1)), c, eb)
    if not rep:
        raise NotSaturated(f"pair is not saturated: {rep}")
    am = as_mask(A1)
    S = _check_extractor(T, am, extractor(T, VertexSet(am)), eb)
    out = S | as_mask(T1)
    if not _is_transitive_mask(T, out):
        raise InternalContractViolation("merged set is not transitive")
    return VertexSet(out)


def substitution_epsilon(eps_H, eps_F, h: int) -> Fraction:
    """Supremum eps_F / (eps_H + h eps_F) of admissible substitution factors."""
    eps_H, eps_F = Fraction(eps_H), Fraction(eps_F)
    if not (0 < eps_H <= 1 and 0 < eps_F <= 1):
        raise DomainError("coefficients must lie in (0,1]")
    if h < 1:
        raise DomainError("h must be >= 1")
    return eps_F / (eps_H + h * eps_F)


# Color-H-free


@dataclass(frozen=True)
class EngineConfig:
    mode: str = RELAXED
    lam: Optional[Fraction] = None  # defaults: 2^(-2^(9h)) strict, 1/4 relaxed
    k: Optional[int] = None  # default 2h+3
    Lambda: Fraction = Fraction(1, 4)
    epsilon: Fraction = Fraction(1, 2)
    oracle_cap: int = 18
    fallback: str = "oracle"
    seed: int = 0

    def __post_init__(self):
        _check_mode(self.mode)
        if self.fallback not in ("oracle", "greedy", "singleton"):
            raise DomainError(f"fallback must be oracle, greedy or singleton, got {self.fallback!r}")
        if self.oracle_cap < 0:
            raise DomainError("oracle_cap must be >= 0")


_CONFIG_KEYS = {"mode", "lambda", "k", "Lambda", "epsilon", "oracle_cap", "fallback", "seed"}


def parse_config(text: str) -> EngineConfig:
    """Flat ``key=value`` lines; ``#`` starts a comment."""
    from .errors import ParseError
    vals: dict = {}
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected key=value", no)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ParseError(f"unknown key {key!r}", no)
        try:
            if key in ("lambda", "Lambda", "epsilon"):
                vals[{"lambda": "lam"}.get(key, key)] = Fraction(value)
            elif key in ("k", "oracle_cap", "seed"):
                vals[key] = int(value)
            else:
                vals[key] = value
        except ValueError:
            raise ParseError(f"bad value for {key}: {value!r}", no) from None
    return EngineConfig(**vals)


def fallback_extract(T: Tournament, S: int, cfg: EngineConfig) -> tuple[int, str]:
    size = S.bit_count()
    if cfg.fallback == "oracle" and size <= min(cfg.oracle_cap, 24):
        return max_transitive_exact(T, VertexSet(S), OracleBudget(max_n=max(cfg.oracle_cap, 1))).mask, "oracle"
    if cfg.fallback in ("oracle", "greedy"):
        return _greedy_mask(T, S), "greedy"
    return S & -S, "singleton"


def ladder_extractor(config: "EngineConfig" = None) -> Extractor:
    """Exact search while the input fits the oracle cap, then greedy or singleton."""
    cfg = config or EngineConfig()

    def extract(T: Tournament, S: VertexSet) -> VertexSet:
        return VertexSet(fallback_extract(T, as_mask(S), cfg)[0])
    return extract


_REGIME = (InsufficientSize, PreconditionViolated, EmptyResult, DomainError, ExtractorBroke)


def _chain_extract(H: Tournament, theta, T: Tournament, S: int, cfg: EngineConfig, log: list) -> int:
    """One colour class inside S via the full chain, falling back on the ladder."""
    h = H.n
    sub, labels = T.induced(VertexSet(S))
    lam = cfg.lam if cfg.lam is not None else (
        strict_constants(h).lambda_init if cfg.mode == STRICT else Fraction(1, 4))
    k = cfg.k if cfg.k is not None else 2 * h + 3
    try:
        lseq = find_l_sequence(sub, H, lam, k, cfg.mode)
        if isinstance(lseq, EmbeddingCertificate):
            raise PreconditionViolated("the remaining tournament contains the pattern")
        K = required_m_length(h)
        if len(lseq) < K:
            raise InsufficientSize(f"l-sequence of length {len(lseq)} is shorter than {K}")
        lseq = MSequence.linear(sub, lseq.sets()[:K])

        def recurse(T2: Tournament, S2: VertexSet) -> VertexSet:
            m = _chain_extract(H, theta, T2, as_mask(S2), cfg, log)
            return VertexSet(m)

        c = c_of(h, k, lam)
        mseq = find_m_sequence(sub, lseq, cfg.Lambda, cfg.epsilon, recurse, c=c, lam=lam)
        p = SequenceParams(min(Monomial.of(c), (Monomial.of(c) / 2) ** cfg.epsilon), cfg.Lambda, cfg.epsilon)
        strong = find_strong_m_sequence(H, theta, sub, mseq, p, cfg.mode)
        got = poly_trans(H, theta, sub, strong.sequence, strong.params.params(cfg.epsilon), recurse,
                         strong.I, cfg.mode)
        m = sum(1 << labels[v] for v in got)
        log.append(("chain", m.bit_count(), ""))
        return m
    except _REGIME as exc:
        m, how = fallback_extract(T, S, cfg)
        log.append((how, m.bit_count(), str(exc).splitlines()[0][:200]))
        return m


@dataclass(frozen=True)
class ColoringRun:
    coloring: Coloring
    theta: tuple
    log: tuple  # (source, class size, reason the chain stopped)


def color_h_free_detailed(H: Tournament, T: Tournament, config: EngineConfig = EngineConfig(),
                          theta=None) -> ColoringRun:
    if theta is None:
        theta = find_constellation_ordering(H)
        if theta is None:
            raise NotConstellation("the pattern admits no constellation ordering")
    else:
        theta = check_ordering(H, theta)
        reason = constellation_report(H, theta)
        if reason is not None:
            raise NotConstellation(reason)
    remaining = T.vertices().mask
    colour, log, c = {}, [], 0
    while remaining:
        m = _chain_extract(H, theta, T, remaining, config, log)
        if not m or m & ~remaining or not _is_transitive_mask(T, m):
            raise InternalContractViolation("class extraction returned an unusable set")
        c += 1
        for v in bits(m):
            colour[v] = c
        remaining &= ~m
    return ColoringRun(Coloring(colour), tuple(theta), tuple(log))


def color_h_free(H: Tournament, T: Tournament, config: EngineConfig = EngineConfig(), theta=None) -> Coloring:
    """Proper coloring of T whose classes come from the chain or the fallback ladder."""
    return color_h_free_detailed(H, T, config, theta).coloring


def color_with_fallback(T: Tournament, config: EngineConfig = EngineConfig()) -> ColoringRun:
    """Coloring from the fallback ladder alone, for patterns outside the chain's reach."""
    remaining = T.vertices().mask
    colour, log, c = {}, [], 0
    while remaining:
        m, how = fallback_extract(T, remaining, config)
        c += 1
        for v in bits(m):
            colour[v] = c
        remaining &= ~m
        log.append((how, m.bit_count(), "fallback only"))
    return ColoringRun(Coloring(colour), (), tuple(log))
