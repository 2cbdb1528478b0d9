#!/usr/bin/env python3
"""The relaxed chain on planted inputs.

A layered tournament whose blocks are complete to each other is a valid
m-sequence with density 1 everywhere.  We feed one to FindStrong-M-Sequence
for a three-vertex single-star pattern, watch the parameter ledger, and
then run PolyTrans on a planted strong sequence with the exact oracle as
the inner extractor.
"""

from fractions import Fraction

from tournacolor.constructions import layered, mixed_roles
from tournacolor.core import Tournament, is_transitive
from tournacolor.engine import (find_strong_m_sequence, oracle_extractor, poly_trans_detailed,
                                required_m_length, strong_length)
from tournacolor.sequences import SequenceParams, validate_strong

h = 3
H = Tournament.from_ordering([0, 1, 2], [(2, 0)])  # one right star: center 3, leaf 1
theta = (0, 1, 2)

K = required_m_length(h)
chunks = {i * (2 * h + 2) - 1 for i in range(1, 2 ** (h + 1) + 1)}
T, seq = layered([60 if i in chunks else 2 for i in range(K)], mixed_roles(K), seed=0)
print(f"m-sequence of length {K} on {T.n} vertices, {len(chunks)} large transitive chunks")

r = find_strong_m_sequence(H, theta, T, seq, SequenceParams(Fraction(2, T.n), 0, 1))
print(f"strong sequence of length {len(r.sequence)}, index set {r.I}")
print(f"state-0 events {r.state0_events} (Turan bound {r.turan_bound}), state-1 events {r.state1_events}")
print("strong check:", bool(validate_strong(T, r.sequence, r.I)))
print("parameter ledger:")
for rule, args, values in r.params.history:
    c = values["c"]
    print(f"  {rule:6} {args}  c ~ {float(c):.3g}  lambda = {values['lam']}")
print("replay reproduces the final values:", r.params.replay() == r.params.values)

L = strong_length(h)
T2, strong = layered([12] * L, mixed_roles(L), seed=h)
res = poly_trans_detailed(H, theta, T2, strong, SequenceParams(Fraction(12, T2.n), 0, Fraction(1, 3)),
                          oracle_extractor())
print(f"\nPolyTrans on {T2.n} vertices: transitive set of size {len(res.vertices)}, "
      f"transitive = {is_transitive(T2, res.vertices)}, relaxed bound met = {res.bound_met}")
