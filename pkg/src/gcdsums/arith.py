"""Prime sieving, factorization, and the multiplicative functions of the project.

Exact integer work (totient, divisor counts, primorials) stays in Python's
unbounded integers; real-valued multiplicative functions are evaluated in
binary64 from the prime-power decomposition.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np

from .errors import DomainError, ResourceError
from .sets import IntegerSet

# One entry per integer up to the sieve limit; int32 below 2^31.
SPF_ENTRY_BUDGET = 1 << 29
DEFAULT_SIEVE_LIMIT = 10**7


@dataclass(frozen=True)
class AlphaParam:
    """The exponent of the GCD sum, restricted to the open interval (0, 1/2)."""

    alpha: float

    def __post_init__(self) -> None:
        a = float(self.alpha)
        if not (0.0 < a < 0.5):
            raise DomainError(f"alpha must satisfy 0 < alpha < 1/2, got {self.alpha}")
        object.__setattr__(self, "alpha", a)


def as_alpha(alpha: Union[AlphaParam, float]) -> AlphaParam:
    return alpha if isinstance(alpha, AlphaParam) else AlphaParam(float(alpha))


@dataclass(frozen=True)
class FactoredNat:
    """A positive integer together with its prime factorization."""

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.value < 1:
            raise DomainError(f"value must be positive, got {self.value}")
        prod = 1
        prev_p = 1
        for p, e in self.factors:
            if p <= prev_p:
                raise DomainError("primes must be strictly increasing")
            if e < 1:
                raise DomainError(f"exponent of {p} must be >= 1")
            prod *= p**e
            prev_p = p
        if prod != self.value:
            raise DomainError(
                f"factorization product {prod} does not match value {self.value}"
            )

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)


class SpfTable:
    """Smallest-prime-factor table for 2..limit, immutable after construction."""

    def __init__(self, limit: int, spf: np.ndarray):
        self.limit = limit
        self.spf = spf
        self._primes: Optional[list[int]] = None

    def primes(self) -> list[int]:
        """All primes up to the table limit, ascending (computed once, cached)."""
        if self._primes is None:
            idx = np.arange(self.spf.size)
            self._primes = idx[(idx >= 2) & (self.spf == idx)].tolist()
        return self._primes


def spf_sieve(limit: int) -> SpfTable:
    """Build a smallest-prime-factor table covering 1..limit."""
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    if limit + 1 > SPF_ENTRY_BUDGET:
        raise ResourceError(
            f"sieve of {limit + 1} entries exceeds budget of {SPF_ENTRY_BUDGET}"
        )
    dtype = np.int32 if limit < 2**31 else np.int64
    spf = np.zeros(limit + 1, dtype=dtype)
    spf[2::2] = 2
    for p in range(3, math.isqrt(limit) + 1, 2):
        if spf[p] == 0:
            spf[p] = p
            block = spf[p * p :: 2 * p]
            block[block == 0] = p
    # untouched odd entries are prime
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf[0] = 0
    if limit >= 1:
        spf[1] = 1
    return SpfTable(limit, spf)


_default_table: Optional[SpfTable] = None
_default_limit = DEFAULT_SIEVE_LIMIT


def set_default_sieve_limit(limit: int) -> None:
    """Change the limit used when factorize() builds its shared table."""
    global _default_table, _default_limit
    _default_limit = limit
    _default_table = None


def default_table() -> SpfTable:
    global _default_table
    if _default_table is None:
        _default_table = spf_sieve(_default_limit)
    return _default_table


def factorize(n: int, table: Optional[SpfTable] = None) -> FactoredNat:
    """Factor n using the sieve table, with trial division beyond its range."""
    if n < 1:
        raise DomainError(f"cannot factor non-positive {n}")
    if n == 1:
        return FactoredNat(1, ())
    if table is None:
        table = default_table()
    factors: list[tuple[int, int]] = []
    m = n
    if m > table.limit:
        primes = table.primes()
        i = 0
        while m > table.limit and i < len(primes):
            p = primes[i]
            if p * p > m:
                break
            if m % p == 0:
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                factors.append((p, e))
            i += 1
        if m > table.limit:
            if i < len(primes) and primes[i] * primes[i] > m:
                factors.append((m, 1))
                m = 1
            else:
                # leftover exceeds the table's reach: plain odd trial division
                q = table.limit + 1 + (table.limit % 2)
                while q * q <= m:
                    if m % q == 0:
                        e = 0
                        while m % q == 0:
                            m //= q
                            e += 1
                        factors.append((q, e))
                    q += 2
                if m > 1:
                    factors.append((m, 1))
                    m = 1
    spf = table.spf
    while m > 1:
        p = int(spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        factors.append((p, e))
    factors.sort()
    return FactoredNat(n, tuple(factors))


def as_factored(n: Union[int, FactoredNat], table: Optional[SpfTable] = None) -> FactoredNat:
    return n if isinstance(n, FactoredNat) else factorize(n, table)


# ---------------------------------------------------------------------------
# exact integer-valued functions


def euler_phi(n: Union[int, FactoredNat]) -> int:
    """Euler totient, exact: product of p^(e-1)*(p-1)."""
    fn = as_factored(n)
    result = 1
    for p, e in fn.factors:
        result *= p ** (e - 1) * (p - 1)
    return result


def omega(n: Union[int, FactoredNat]) -> int:
    """Number of distinct prime factors."""
    return len(as_factored(n).factors)


def divisor_count(n: Union[int, FactoredNat]) -> int:
    fn = as_factored(n)
    result = 1
    for _, e in fn.factors:
        result *= e + 1
    return result


def mobius(n: Union[int, FactoredNat]) -> int:
    fn = as_factored(n)
    if any(e >= 2 for _, e in fn.factors):
        return 0
    return -1 if len(fn.factors) % 2 else 1


def divisors(n: Union[int, FactoredNat]) -> list[int]:
    """All divisors of n, sorted ascending."""
    fn = as_factored(n)
    divs = [1]
    for p, e in fn.factors:
        pk = 1
        extended = list(divs)
        for _ in range(e):
            pk *= p
            extended.extend(d * pk for d in divs)
        divs = extended
    divs.sort()
    return divs


# ---------------------------------------------------------------------------
# real-valued multiplicative functions


def g_fn(m: Union[int, FactoredNat], alpha: Union[AlphaParam, float]) -> float:
    """Divisor power sum g(m) = sum over d|m of d^(alpha - 1/2), >= 1."""
    a = as_alpha(alpha).alpha
    fm = as_factored(m)
    result = 1.0
    for p, e in fm.factors:
        q = float(p) ** (a - 0.5)
        term = 1.0
        qk = 1.0
        for _ in range(e):
            qk *= q
            term += qk
        result *= term
    return result


def _g_prime_power(p: int, e: int, a: float) -> float:
    q = float(p) ** (a - 0.5)
    term = 1.0
    qk = 1.0
    for _ in range(e):
        qk *= q
        term += qk
    return term


def h_fn(n: Union[int, FactoredNat], alpha: Union[AlphaParam, float]) -> float:
    """h(n) = sum over d|n of d^(2*alpha-1) / g(n/d), evaluated multiplicatively."""
    a = as_alpha(alpha).alpha
    fn = as_factored(n)
    result = 1.0
    for p, e in fn.factors:
        acc = 0.0
        for l in range(e + 1):
            acc += float(p) ** ((2 * a - 1) * l) / _g_prime_power(p, e - l, a)
        result *= acc
    return result


def f_fn(n: Union[int, FactoredNat], alpha: Union[AlphaParam, float]) -> float:
    """The construction's multiplicative weight, a product over distinct p | n.

    Defined for squarefree n; non-squarefree input is evaluated over the
    distinct primes anyway but triggers a warning.
    """
    a = as_alpha(alpha).alpha
    fn = as_factored(n)
    if not fn.is_squarefree():
        warnings.warn(
            f"f evaluated on non-squarefree argument {fn.value}; "
            "using distinct primes only",
            stacklevel=2,
        )
    result = 1.0
    for p, _ in fn.factors:
        result *= _f_prime(p, a)
    return result


def _f_prime(p: int, a: float) -> float:
    ip = 1.0 / p
    num = float(p) ** (2 * a - 1) * (1 - ip) ** (2 * a) + (1 - ip)
    den = ip * (1 - ip) + (1 - ip) ** (2 - 2 * a)
    return num / den


def jordan_j(e: Union[int, FactoredNat], s: float) -> float:
    """Multiplicative kernel with sum over e|n of j_s(e) = n^s.

    j_s(p^k) = p^(s*k) - p^(s*(k-1)).
    """
    fe = as_factored(e)
    result = 1.0
    for p, k in fe.factors:
        result *= float(p) ** (s * k) - float(p) ** (s * (k - 1))
    return result


# ---------------------------------------------------------------------------
# sieved batch evaluation


def multiplicative_sieve(
    limit: int,
    prime_power_value: Callable[[int, int], float],
    table: Optional[SpfTable] = None,
) -> np.ndarray:
    """Values of a multiplicative function for 0..limit (index 0 set to 0).

    prime_power_value(p, e) supplies the value at p^e; results are combined
    along smallest-prime-factor chains.
    """
    if table is None or table.limit < limit:
        table = default_table() if _default_limit >= limit else spf_sieve(limit)
    spf = table.spf
    vals = np.empty(limit + 1, dtype=np.float64)
    vals[0] = 0.0
    if limit >= 1:
        vals[1] = 1.0
    ppow = np.zeros(limit + 1, dtype=np.int64)
    ecnt = np.zeros(limit + 1, dtype=np.int16)
    cache: dict[tuple[int, int], float] = {}
    for n in range(2, limit + 1):
        p = int(spf[n])
        m = n // p
        if m % p == 0:
            pw = int(ppow[m]) * p
            e = int(ecnt[m]) + 1
        else:
            pw = p
            e = 1
        ppow[n] = pw
        ecnt[n] = e
        key = (p, e)
        v = cache.get(key)
        if v is None:
            v = prime_power_value(p, e)
            cache[key] = v
        vals[n] = vals[n // pw] * v
    return vals


def jordan_sieve(limit: int, s: float, table: Optional[SpfTable] = None) -> np.ndarray:
    """j_s(n) for n in 0..limit via the multiplicative sieve."""
    return multiplicative_sieve(
        limit, lambda p, e: float(p) ** (s * e) - float(p) ** (s * (e - 1)), table
    )


def h_sieve(limit: int, alpha: Union[AlphaParam, float], table: Optional[SpfTable] = None) -> np.ndarray:
    """h(n) for n in 0..limit via the multiplicative sieve."""
    a = as_alpha(alpha).alpha

    def hpp(p: int, e: int) -> float:
        return sum(
            float(p) ** ((2 * a - 1) * l) / _g_prime_power(p, e - l, a)
            for l in range(e + 1)
        )

    return multiplicative_sieve(limit, hpp, table)


# ---------------------------------------------------------------------------
# primes, primorials, smooth numbers


def primes_upto(bound: float) -> list[int]:
    """All primes p <= bound, ascending."""
    n = int(math.floor(bound))
    if n < 2:
        return []
    if n + 1 > SPF_ENTRY_BUDGET:
        raise ResourceError(f"prime sieve to {n} exceeds entry budget")
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).tolist()


def primorial(bound: float) -> FactoredNat:
    """Product of all primes <= bound, as an exact factored integer."""
    ps = primes_upto(bound)
    value = 1
    for p in ps:
        value *= p
    return FactoredNat(value, tuple((p, 1) for p in ps))


@dataclass(frozen=True)
class SmoothEnumeration:
    """Result of enumerating smooth squarefree numbers, with shortfall flag."""

    values: IntegerSet
    shortfall: bool


def squarefree_smooth_enumerate(smooth_bound: float, count: int) -> SmoothEnumeration:
    """The `count` smallest squarefree integers with all prime factors <= smooth_bound.

    Only 2^pi(smooth_bound) such integers exist; if fewer than `count` do,
    all of them are returned and the shortfall flag is set.
    """
    if smooth_bound < 2:
        raise DomainError(f"smooth_bound must be >= 2, got {smooth_bound}")
    if count < 1:
        raise DomainError(f"count must be positive, got {count}")
    ps = primes_upto(smooth_bound)
    # ascending generation: each subset product is pushed once, tagged by the
    # index of its largest prime so extensions stay canonical
    import heapq

    heap: list[tuple[int, int]] = [(1, -1)]
    out: list[int] = []
    while heap and len(out) < count:
        v, i = heapq.heappop(heap)
        out.append(v)
        for j in range(i + 1, len(ps)):
            heapq.heappush(heap, (v * ps[j], j))
    shortfall = len(out) < count
    return SmoothEnumeration(IntegerSet(tuple(out)), shortfall)


# ---------------------------------------------------------------------------
# zeta on the real axis


_ZETA_CUTOFF = 10**4


@lru_cache(maxsize=256)
def zeta_real(s: float) -> float:
    """Riemann zeta for real s > 1 via Euler-Maclaurin through the B_4 term.

    The computed remainder bound (first dropped term, B_6) is required to be
    below 1e-13; the cutoff grows until it is.
    """
    s = float(s)
    if s <= 1.0:
        raise DomainError(f"zeta_real requires s > 1, got {s}")
    K = _ZETA_CUTOFF
    while True:
        rem = abs(s * (s + 1) * (s + 2) * (s + 3) * (s + 4)) / 30240.0 * K ** (-s - 5)
        if rem <= 1e-13:
            break
        if K > 10**7:
            raise ResourceError("Euler-Maclaurin cutoff exhausted")
        K *= 4
    n = np.arange(1, K + 1, dtype=np.float64)
    partial = math.fsum((n ** (-s)).tolist())
    tail = K ** (1 - s) / (s - 1)
    tail -= 0.5 * K ** (-s)
    tail += s / 12.0 * K ** (-s - 1)
    tail -= s * (s + 1) * (s + 2) / 720.0 * K ** (-s - 3)
    return partial + tail
