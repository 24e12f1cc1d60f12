"""Exact prime enumeration and the sieve-based counting functions.

All counts are inclusive at the right endpoint (``p <= x``) and interval sums
are half-open ``(x, a*x]``.  Real arguments are compared against integer
primes exactly: only ``floor(x)`` matters, and it is computed without
rounding for ints, floats, Fractions and mpmath numbers alike.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import gmpy2
import mpmath
import numpy as np

from .exceptions import DomainError, OutOfRangeError, ResourceError
from .precision import PrecisionContext, resolve

DEFAULT_LIMIT = 10**8
DEFAULT_SEGMENT_SIZE = 1 << 20
DEFAULT_MEMORY_BUDGET = 2 << 30  # bytes


def to_fraction(x) -> Fraction:
    """Exact rational value of an int, float, Fraction or mpmath real."""
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise DomainError(f"non-finite argument {x!r}")
        return Fraction(x)
    if isinstance(x, mpmath.mpf):
        if not mpmath.isfinite(x):
            raise DomainError(f"non-finite argument {x!r}")
        man, exp = x.man_exp
        return Fraction(int(man)) * Fraction(2) ** int(exp)
    if isinstance(x, np.integer):
        return Fraction(int(x))
    if isinstance(x, np.floating):
        return Fraction(float(x))
    raise TypeError(f"cannot interpret {type(x).__name__} as a real number")


def floor_real(x) -> int:
    return math.floor(to_fraction(x))


def iroot(m: int, n: int) -> int:
    """Largest integer r with r**n <= m (m >= 0, n >= 1)."""
    if m < 0 or n < 1:
        raise DomainError(f"iroot needs m >= 0 and n >= 1, got ({m}, {n})")
    if n == 1 or m < 2:
        return m
    if n == 2:
        return math.isqrt(m)
    if m.bit_length() <= 1000:
        r = int(round(float(m) ** (1.0 / n)))
    else:
        r = 1 << (m.bit_length() // n)
    # float guess may be off by one (or more for huge m) at perfect powers
    while r**n > m:
        r -= 1
    while (r + 1) ** n <= m:
        r += 1
    return r


def _small_primes(limit: int) -> np.ndarray:
    """Plain sieve of Eratosthenes; used for base primes and as a reference."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags)


def reference_sieve(limit: int) -> np.ndarray:
    """Non-segmented sieve over one flat array, kept as a cross-check."""
    return _small_primes(int(limit))


def _estimated_bytes(limit: int, segment_size: int) -> int:
    if limit < 100:
        return 4096
    n_primes = 1.26 * limit / math.log(limit)
    itemsize = 4 if limit < 2**32 else 8
    return int(n_primes * itemsize + 2 * segment_size)


class SieveHandle:
    """Segmented odd-only sieve up to ``limit``.

    Construction is the only mutating step; afterwards the prime table is a
    read-only array and every query is safe from multiple threads.
    """

    def __init__(self, limit: int = DEFAULT_LIMIT, segment_size: int = DEFAULT_SEGMENT_SIZE,
                 workers: int = 1, memory_budget: int = DEFAULT_MEMORY_BUDGET):
        limit = int(limit)
        if limit < 0:
            raise DomainError(f"limit must be >= 0, got {limit}")
        if segment_size < 2:
            raise ValueError("segment_size must be >= 2")
        need = _estimated_bytes(limit, segment_size)
        if need > memory_budget:
            raise ResourceError(
                f"sieve to {limit} needs ~{need / 2**20:.0f} MiB, budget is {memory_budget / 2**20:.0f} MiB")
        self.limit = limit
        self.segment_size = int(segment_size)
        self.workers = max(1, int(workers))
        primes = self._build()
        primes.flags.writeable = False
        self._primes = primes

    def _build(self) -> np.ndarray:
        limit = self.limit
        dtype = np.uint32 if limit < 2**32 else np.uint64
        if limit < 2:
            return np.zeros(0, dtype=dtype)
        base = _small_primes(math.isqrt(limit))[1:]  # odd base primes
        # segments cover odd numbers [lo, hi); index i <-> lo + 2i
        span = 2 * self.segment_size
        bounds = [(lo, min(lo + span, limit + 1)) for lo in range(3, limit + 1, span)]

        def run(bound):
            lo, hi = bound
            mask = np.ones((hi - lo + 1) // 2, dtype=bool)
            for p in base:
                p = int(p)
                if p * p >= hi:
                    break
                start = max(p * p, -(-lo // p) * p)
                if start % 2 == 0:
                    start += p
                if start < hi:
                    mask[(start - lo) // 2 :: p] = False
            return (lo + 2 * np.flatnonzero(mask)).astype(dtype)

        if self.workers > 1 and len(bounds) > 1:
            with ThreadPoolExecutor(self.workers) as pool:
                chunks = list(pool.map(run, bounds))
        else:
            chunks = [run(b) for b in bounds]
        return np.concatenate([np.array([2], dtype=dtype), *chunks])

    @property
    def primes(self) -> np.ndarray:
        return self._primes

    def __len__(self) -> int:
        return len(self._primes)

    def __repr__(self) -> str:
        return f"SieveHandle(limit={self.limit}, segment_size={self.segment_size})"

    def check(self, x, what: str = "x") -> int:
        """floor(x), after verifying that x lies within the sieve."""
        m = floor_real(x)
        if m > self.limit:
            raise OutOfRangeError(f"{what}={x} exceeds sieve limit {self.limit}")
        return m

    def count_upto(self, m: int) -> int:
        """pi(m) for an integer m <= limit (no range check)."""
        if m < 2:
            return 0
        return int(np.searchsorted(self._primes, m, side="right"))

    def is_prime(self, n: int) -> bool:
        n = int(n)
        if n > self.limit:
            raise OutOfRangeError(f"n={n} exceeds sieve limit {self.limit}")
        if n < 2:
            return False
        i = np.searchsorted(self._primes, n)
        return i < len(self._primes) and int(self._primes[i]) == n

    def between(self, lo, hi) -> np.ndarray:
        """Primes p with lo < p <= hi (hi checked against the limit)."""
        m_hi = self.check(hi, "upper endpoint")
        m_lo = floor_real(lo)
        if m_hi <= m_lo:
            return self._primes[:0]
        i = self.count_upto(m_lo) if m_lo >= 2 else 0
        j = self.count_upto(m_hi)
        return self._primes[i:j]


def enumerate_primes(limit: int, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> list[int]:
    """All primes <= limit in increasing order."""
    return SieveHandle(limit, memory_budget=memory_budget).primes.tolist()


def mobius(n: int) -> int:
    n = int(n)
    if n <= 0:
        raise DomainError(f"mobius needs n >= 1, got {n}")
    result = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            result = -result
        d += 1 if d == 2 else 2
    if n > 1:
        result = -result
    return result


def prime_count(x, sieve: SieveHandle) -> int:
    """pi(x): number of primes p <= x."""
    return sieve.count_upto(sieve.check(x))


@dataclass(frozen=True)
class PrimePowerTally:
    """Counts of prime powers p**k <= x, split by exponent k."""

    x: object
    by_exponent: dict = field(default_factory=dict)

    def __getitem__(self, k: int) -> int:
        return self.by_exponent.get(k, 0)

    @property
    def pi(self) -> int:
        return self[1]

    @property
    def pi_star(self) -> int:
        """All prime powers > 1 up to x."""
        return sum(self.by_exponent.values())

    @property
    def pi_tilde(self) -> int:
        """Composite prime powers (exponent >= 2) up to x."""
        return self.pi_star - self.pi


def prime_power_count(x, sieve: SieveHandle) -> PrimePowerTally:
    m = sieve.check(x)
    tally = {}
    k = 1
    while m >= 2**k:
        tally[k] = sieve.count_upto(iroot(m, k))
        k += 1
    return PrimePowerTally(x=x, by_exponent=tally)


def _riemann_exact(m: int, sieve: SieveHandle, root: int = 1) -> Fraction:
    """Pi(y) for y = m**(1/root), in exact rationals; only floor(y**(1/k)) is used."""
    total = Fraction(0)
    k = 1
    while True:
        r = iroot(m, root * k)
        if r < 2:
            break
        total += Fraction(sieve.count_upto(r), k)
        k += 1
    return total


def riemann_prime_count(x, sieve: SieveHandle, ctx: PrecisionContext | None = None,
                        exact: bool = False):
    """Pi(x) = sum over n <= log2(x) of pi(x**(1/n)) / n.

    Accumulates exactly; ``exact=True`` returns the Fraction itself.
    """
    value = _riemann_exact(sieve.check(x), sieve)
    if exact:
        return value
    with resolve(ctx).workdps():
        return mpmath.mpf(value.numerator) / value.denominator


def pi_from_Pi_mobius(x, sieve: SieveHandle) -> Fraction:
    """Recover pi(x) as sum of mu(n)/n * Pi(x**(1/n)); exact, so it equals pi(x)."""
    m = sieve.check(x)
    total = Fraction(0)
    n = 1
    while m >= 2**n:
        mu = mobius(n)
        if mu:
            total += Fraction(mu, n) * _riemann_exact(m, sieve, root=n)
        n += 1
    return total


def _gmp_bits(ctx: PrecisionContext) -> int:
    return int(ctx.working_digits * 3.33) + 16


def _fsum_mpfr(values) -> mpmath.mpf:
    return mpmath.mpf(gmpy2.fsum(values))


def power_sum(x, s, sieve: SieveHandle, ctx: PrecisionContext | None = None):
    """pi_s(x) = sum of p**s over primes p <= x, for real or complex s."""
    ctx = resolve(ctx)
    primes = sieve.primes[: prime_count(x, sieve)]
    s = mpmath.mpmathify(s)
    with ctx.workdps():
        if isinstance(s, mpmath.mpc) and s.imag == 0:
            s = s.real
        if isinstance(s, mpmath.mpf) and s == int(s) and s >= 0:
            k = int(s)
            if k == 0:
                return mpmath.mpf(len(primes))
            return mpmath.mpf(sum(int(p) ** k for p in primes.tolist()))
        with gmpy2.context(gmpy2.get_context(), precision=_gmp_bits(ctx)):
            if isinstance(s, mpmath.mpf):
                e = gmpy2.mpfr(str(s))
                return _fsum_mpfr(gmpy2.mpfr(p) ** e for p in primes.tolist())
            e = gmpy2.mpc(gmpy2.mpfr(str(s.real)), gmpy2.mpfr(str(s.imag)))
            re, im = [], []
            for p in primes.tolist():
                v = gmpy2.mpfr(p) ** e
                re.append(v.real)
                im.append(v.imag)
            return mpmath.mpc(_fsum_mpfr(re), _fsum_mpfr(im))


def reciprocal_sum_interval(x, a, sieve: SieveHandle, ctx: PrecisionContext | None = None):
    """Sum of 1/p over primes x < p <= a*x."""
    ctx = resolve(ctx)
    a_q = to_fraction(a)
    if a_q <= 1:
        raise DomainError(f"need a > 1, got {a}")
    x_q = to_fraction(x)
    primes = sieve.between(x_q, a_q * x_q).tolist()
    with ctx.workdps():
        if not primes:
            return mpmath.mpf(0)
        with gmpy2.context(gmpy2.get_context(), precision=_gmp_bits(ctx)):
            return _fsum_mpfr(1 / gmpy2.mpfr(p) for p in primes)


def log_mertens_product_interval(x, a, s, sieve: SieveHandle, ctx: PrecisionContext | None = None):
    """-(1/s) * sum of log(1 - s/p) over primes x < p <= a*x.

    This is log of prod (1 - s/p)**(-1/s); it tends to the reciprocal sum as s -> 0.
    """
    ctx = resolve(ctx)
    a_q = to_fraction(a)
    if a_q <= 1:
        raise DomainError(f"need a > 1, got {a}")
    s = mpmath.mpf(s)
    if s == 0:
        raise DomainError("s = 0 is excluded (use reciprocal_sum_interval)")
    if s == int(s) and _is_prime_int(int(s)):
        raise DomainError(f"s = {int(s)} is prime")
    x_q = to_fraction(x)
    primes = sieve.between(x_q, a_q * x_q).tolist()
    with ctx.workdps():
        if not primes:
            return mpmath.mpf(0)
        if s >= primes[0]:
            raise DomainError(f"1 - s/p <= 0 for p = {primes[0]} (s = {s})")
        with gmpy2.context(gmpy2.get_context(), precision=_gmp_bits(ctx)):
            gs = gmpy2.mpfr(str(s))
            total = _fsum_mpfr(gmpy2.log1p(-gs / p) for p in primes)
        return -total / s


def _is_prime_int(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))
