"""Exact positive quantities with rational exponents.

Engine constants such as lambda_k^(hk) are far too large to expand as
fractions, so they are kept as products of prime powers with rational
exponents.  Equality is structural (unique factorisation); order is decided by
interval evaluation of the logarithm at increasing precision, which always
terminates because distinct monomials have distinct logarithms.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import gcd
from typing import Union

from mpmath import iv

Number = Union[int, Fraction, "Monomial"]

_IV_LOCK = threading.Lock()
_TRIAL_LIMIT = 100_000
_MAX_EXPAND_BITS = 1 << 22


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    if n % 2 == 0:
        e = (n & -n).bit_length() - 1
        out[2] = e
        n >>= e
    p = 3
    while p * p <= n and p < _TRIAL_LIMIT:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
        p += 2
    if n > 1:
        # Cofactor is prime or a product of primes above the trial limit.
        # Parameters in practice never reach this branch.
        out[n] = out.get(n, 0) + 1
    return out


def iroot_floor(x: int, q: int) -> int:
    """Largest s with s**q <= x, for x >= 0."""
    if x < 0:
        raise ValueError("negative radicand")
    if x < 2 or q == 1:
        return x
    s = 1 << -(-x.bit_length() // q)
    while True:
        t = ((q - 1) * s + x // s ** (q - 1)) // q
        if t >= s:
            break
        s = t
    while s ** q > x:
        s -= 1
    while (s + 1) ** q <= x:
        s += 1
    return s


class Monomial:
    """A positive real prod(p ** e_p) with e_p rational."""

    __slots__ = ("exps",)

    def __init__(self, exps=()):
        items = {}
        for p, e in dict(exps).items():
            e = Fraction(e)
            if e:
                items[int(p)] = e
        self.exps = tuple(sorted(items.items()))

    @classmethod
    def of(cls, x: Number) -> "Monomial":
        if isinstance(x, Monomial):
            return x
        x = Fraction(x)
        if x <= 0:
            raise ValueError("Monomial needs a positive value")
        exps: dict[int, Fraction] = {}
        for p, e in _factor(x.numerator).items() if x.numerator > 1 else ():
            exps[p] = exps.get(p, Fraction(0)) + e
        for p, e in _factor(x.denominator).items() if x.denominator > 1 else ():
            exps[p] = exps.get(p, Fraction(0)) - e
        return cls(exps)

    @classmethod
    def pow2(cls, e) -> "Monomial":
        return cls({2: Fraction(e)})

    # arithmetic
    def __mul__(self, other: Number) -> "Monomial":
        other = Monomial.of(other)
        d = dict(self.exps)
        for p, e in other.exps:
            d[p] = d.get(p, Fraction(0)) + e
        return Monomial(d)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "Monomial":
        return self * Monomial.of(other).inverse()

    def __rtruediv__(self, other: Number) -> "Monomial":
        return Monomial.of(other) * self.inverse()

    def inverse(self) -> "Monomial":
        return Monomial({p: -e for p, e in self.exps})

    def __pow__(self, k) -> "Monomial":
        k = Fraction(k)
        return Monomial({p: e * k for p, e in self.exps})

    # inspection
    def log2_exponent_of_two(self) -> Fraction | None:
        """The exponent e when the value is exactly 2**e, else None."""
        if not self.exps:
            return Fraction(0)
        if len(self.exps) == 1 and self.exps[0][0] == 2:
            return self.exps[0][1]
        return None

    def is_rational(self) -> bool:
        return all(e.denominator == 1 for _, e in self.exps)

    def bit_size(self) -> int:
        total = 0
        for p, e in self.exps:
            total += int(abs(e) * p.bit_length()) + 1
        return total

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("irrational monomial")
        if self.bit_size() > _MAX_EXPAND_BITS:
            raise OverflowError("monomial too large to expand")
        num, den = 1, 1
        for p, e in self.exps:
            if e > 0:
                num *= p ** int(e)
            else:
                den *= p ** int(-e)
        return Fraction(num, den)

    def log2_interval(self, prec: int = 96):
        with _IV_LOCK:
            old = iv.prec
            iv.prec = prec
            try:
                acc = iv.mpf(0)
                for p, e in self.exps:
                    acc += iv.log(iv.mpf(p)) * (iv.mpf(e.numerator) / e.denominator)
                acc /= iv.log(iv.mpf(2))
                return float(acc.a), float(acc.b), acc
            finally:
                iv.prec = old

    def log2(self) -> float:
        lo, hi, _ = self.log2_interval()
        return (lo + hi) / 2

    def sign_of_log(self) -> int:
        """Sign of log(value): -1, 0 or 1, decided exactly."""
        if not self.exps:
            return 0
        mag = max(abs(e) for _, e in self.exps)
        prec = 64 + int(mag).bit_length() + max(p.bit_length() for p, _ in self.exps)
        while True:
            with _IV_LOCK:
                old = iv.prec
                iv.prec = prec
                try:
                    acc = iv.mpf(0)
                    for p, e in self.exps:
                        acc += iv.log(iv.mpf(p)) * (iv.mpf(e.numerator) / e.denominator)
                    if acc.a > 0:
                        return 1
                    if acc.b < 0:
                        return -1
                finally:
                    iv.prec = old
            prec *= 2
            if prec > 1 << 20:
                raise ArithmeticError("comparison did not separate")

    def compare(self, other: Number) -> int:
        return (self / Monomial.of(other)).sign_of_log()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, Monomial)):
            try:
                return self.exps == Monomial.of(other).exps
            except ValueError:
                return False
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.exps)

    def __lt__(self, other: Number) -> bool:
        return self.compare(other) < 0

    def __le__(self, other: Number) -> bool:
        return self.compare(other) <= 0

    def __gt__(self, other: Number) -> bool:
        return self.compare(other) > 0

    def __ge__(self, other: Number) -> bool:
        return self.compare(other) >= 0

    def _estimate(self) -> int:
        """An integer within a few units of the value, from interval logs."""
        _, hi, _ = self.log2_interval(64)
        prec = max(64, int(hi) + 64)
        with _IV_LOCK:
            old = iv.prec
            iv.prec = prec
            try:
                acc = iv.mpf(0)
                for p, e in self.exps:
                    acc += iv.log(iv.mpf(p)) * (iv.mpf(e.numerator) / e.denominator)
                return int(iv.exp(acc).a)
            finally:
                iv.prec = old

    def _root_bounds(self) -> tuple[int, Fraction] | None:
        q = 1
        for _, e in self.exps:
            q = q * e.denominator // gcd(q, e.denominator)
        if q > 64:
            return None
        try:
            return q, (self ** q).to_fraction()
        except OverflowError:
            return None

    def ceil(self) -> int:
        """Smallest integer >= value."""
        if self.compare(1) <= 0:
            return 1
        exact = self._root_bounds()
        if exact is not None:
            q, r = exact
            s = iroot_floor(r.numerator // r.denominator, q)
            while Fraction(s) ** q < r:
                s += 1
            return s
        s = max(1, self._estimate())
        while s > 1 and self.compare(s - 1) <= 0:
            s -= 1
        while self.compare(s) > 0:
            s += 1
        return s

    def floor(self) -> int:
        if self.compare(1) < 0:
            return 0
        exact = self._root_bounds()
        if exact is not None:
            q, r = exact
            s = iroot_floor(r.numerator // r.denominator, q)
            while Fraction(s + 1) ** q <= r:
                s += 1
            return s
        s = max(1, self._estimate())
        while s > 1 and self.compare(s) < 0:
            s -= 1
        while self.compare(s + 1) >= 0:
            s += 1
        return s

    def __repr__(self) -> str:
        e2 = self.log2_exponent_of_two()
        if e2 is not None:
            return f"2^({e2})"
        if self.is_rational() and self.bit_size() < 256:
            return str(self.to_fraction())
        return "*".join(f"{p}^({e})" for p, e in self.exps)


def as_monomial(x: Number) -> Monomial:
    return Monomial.of(x)


def at_most_times(count: int, x: Number, total: int) -> bool:
    """Exact test of count <= x * total for integers count, total >= 0."""
    if count <= 0:
        return True
    if total <= 0:
        return False
    if not isinstance(x, Monomial):
        return count <= Fraction(x) * total
    return Monomial.of(count) <= x * total


def at_least_times(count: int, x: Number, total: int) -> bool:
    """Exact test of count >= x * total."""
    if total <= 0:
        return True
    if count <= 0:
        return False
    if not isinstance(x, Monomial):
        return count >= Fraction(x) * total
    return Monomial.of(count) >= x * total


def ceil_times_power(c: Number, n: int, eps: Number = 1) -> int:
    """Exact ceil(c * n**eps) for c > 0, n >= 1 and eps rational."""
    if n <= 0:
        return 0
    if not isinstance(c, Monomial) and Fraction(eps) == 1:
        v = Fraction(c) * n
        return -((-v.numerator) // v.denominator)
    return (Monomial.of(c) * Monomial.of(n) ** Fraction(eps)).ceil()


def power_at_least(size: int, m: int, eps) -> bool:
    """Exact test of size >= m**eps (eps rational)."""
    if m <= 1:
        return size >= 1 or m == 0
    if size <= 0:
        return False
    return Monomial.of(size) >= Monomial.of(m) ** Fraction(eps)


class LogRatio:
    """The real exponent log(a) / log(b) for integers a >= 1, b >= 2."""

    __slots__ = ("a", "b")

    def __init__(self, a: int, b: int):
        if a < 1 or b < 2:
            raise ValueError("LogRatio needs a >= 1 and b >= 2")
        self.a, self.b = int(a), int(b)

    def interval(self, prec: int = 200):
        with _IV_LOCK:
            old = iv.prec
            iv.prec = prec
            try:
                r = iv.log(iv.mpf(self.a)) / iv.log(iv.mpf(self.b))
                return r
            finally:
                iv.prec = old

    def __float__(self) -> float:
        r = self.interval(64)
        return float((r.a + r.b) / 2)

    def __repr__(self) -> str:
        return f"log({self.a})/log({self.b})"


def _log_compare(s: int, m: int, ratio: LogRatio) -> int:
    """Sign of log(s)*log(b) - log(m)*log(a); 0 when not separated at 256 bits."""
    if s == ratio.a and m == ratio.b:
        return 0
    with _IV_LOCK:
        old = iv.prec
        iv.prec = 256
        try:
            d = iv.log(iv.mpf(s)) * iv.log(iv.mpf(ratio.b)) - iv.log(iv.mpf(m)) * iv.log(iv.mpf(ratio.a))
            if d.a > 0:
                return 1
            if d.b < 0:
                return -1
            return 0
        finally:
            iv.prec = old


def power_at_least_real(size: int, m: int, eps) -> bool:
    """size >= m**eps for eps rational, a LogRatio, or an object with lo/hi.

    For a LogRatio an unresolved comparison at 256 bits is taken as
    equality; distinct integer logarithm products differ far above that
    resolution at any size a tournament can have.
    """
    if m <= 1:
        return size >= min(m, 1)
    if size <= 0:
        return False
    if isinstance(eps, LogRatio):
        return _log_compare(size, m, eps) >= 0
    lo = getattr(eps, "lo", None)
    if lo is not None:
        return power_at_least(size, m, lo)
    return power_at_least(size, m, eps)


def coloring_bound_holds(n: int, colors: int, eps) -> bool:
    """colors <= n**(1 - eps) * log2(n), decided exactly or by intervals."""
    if n <= 1:
        return colors <= max(n, 1)
    if isinstance(eps, LogRatio) and eps.b == n:
        # n**(1-eps) = n / a, so the bound is colors * a <= n * log2(n).
        return Monomial.pow2(colors * eps.a) <= Monomial.of(n) ** n
    if isinstance(eps, (int, Fraction)):
        e = Fraction(eps)
        # colors <= n**(1-e) log2 n  <=>  2**(colors / n**(1-e)) <= n
        with _IV_LOCK:
            old = iv.prec
            iv.prec = 200
            try:
                bound = iv.mpf(n) ** (1 - iv.mpf(e.numerator) / e.denominator) * iv.log(iv.mpf(n)) / iv.log(iv.mpf(2))
                return not (colors > bound.b)
            finally:
                iv.prec = old
    if isinstance(eps, LogRatio):
        r = eps.interval(200)
        with _IV_LOCK:
            old = iv.prec
            iv.prec = 200
            try:
                bound = iv.mpf(n) ** (1 - r) * iv.log(iv.mpf(n)) / iv.log(iv.mpf(2))
                return not (colors > bound.b)
            finally:
                iv.prec = old
    raise TypeError(f"unsupported exponent {eps!r}")
