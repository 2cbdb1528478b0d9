#!/usr/bin/env python3
"""Print the exact constants of the strict regime.

All values are kept as powers of primes with rational exponents, so even
log2(1/eps) = 2^(50 h^2 + 1) is an ordinary Python integer and the size
thresholds are compared exactly.  The point of the demo is the scale: no
tournament that fits in memory gets past the first threshold.
"""

from tournacolor.engine import strict_constants
from tournacolor.errors import InsufficientSize
from tournacolor.engine import find_l_sequence
from tournacolor.core import random_tournament
from tournacolor.patterns import catalog

for h in (2, 3, 4):
    sc = strict_constants(h)
    print(f"h = {h}")
    print(f"  log2(1/eps) = 2^{sc.log2_inv_epsilon.bit_length() - 1}")
    print(f"  lambda_init = 2^({sc.log2_lambda_init}), k = {sc.k}")
    for name in sc.thresholds:
        lo, hi = sc.log2_threshold(name)
        print(f"  {name:34} log2 in [{lo:.6g}, {hi:.6g}]")

print("\nstrict Find-L-Sequence on a random tournament with 200 vertices:")
H = catalog("fig3").tournament
try:
    find_l_sequence(random_tournament(200, 0), H, strict_constants(H.n).lambda_init, strict_constants(H.n).k,
                    "strict")
except InsufficientSize as exc:
    print("  InsufficientSize:", exc)
