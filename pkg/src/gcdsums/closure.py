"""Divisor-closure transformation and its guarantees.

The transform compresses, for one prime p at a time, each class of elements
sharing a p-free part into a contiguous block of p-powers on that part.  Full
sweeps over the prime list repeat until a fixpoint; the result has the same
cardinality, is divisor closed, and dominates the original GCD sum once the
2^omega weight is attached.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Optional, Union

from . import arith, sums
from .arith import AlphaParam, SpfTable, as_factored
from .errors import DomainError
from .sets import IntegerSet

_MAX_PASSES = 10**4


def is_divisor_closed(s: IntegerSet) -> bool:
    """True iff every divisor of every element belongs to the set."""
    have = set(s)
    return all(all(d in have for d in arith.divisors(m)) for m in s)


@dataclass(frozen=True)
class ClosureTrace:
    passes: int
    per_pass: tuple[tuple[int, int, int], ...]  # (prime, classes changed, snapshot hash)
    final: IntegerSet


def _p_free(m: int, p: int) -> int:
    while m % p == 0:
        m //= p
    return m


def closure_transform(s: IntegerSet, table: Optional[SpfTable] = None) -> ClosureTrace:
    """Apply the prime-by-prime exponent compression until a fixpoint."""
    if len(s) == 0:
        raise DomainError("cannot transform an empty set")
    cur = list(s)
    steps: list[tuple[int, int, int]] = []
    passes = 0
    while True:
        passes += 1
        if passes > _MAX_PASSES:
            raise RuntimeError("closure transform failed to reach a fixpoint")
        primes = sorted({p for m in cur for p, _ in as_factored(m, table).factors})
        changed = False
        for p in primes:
            groups: dict[int, list[int]] = defaultdict(list)
            for m in cur:
                groups[_p_free(m, p)].append(m)
            nxt: list[int] = []
            n_changed = 0
            for rep, members in groups.items():
                repl = [rep * p**i for i in range(len(members))]
                if sorted(members) != repl:
                    n_changed += 1
                nxt.extend(repl)
            nxt.sort()
            if n_changed:
                changed = True
            cur = nxt
            steps.append((p, n_changed, hash(tuple(cur))))
        if not changed:
            break
    final = IntegerSet(tuple(cur))
    assert len(final) == len(s)
    return ClosureTrace(passes=passes, per_pass=tuple(steps), final=final)


@dataclass(frozen=True)
class ClosureInequalityCheck:
    lhs: float
    rhs: float
    passed: bool


def closure_inequality_check(
    s: IntegerSet, alpha: Union[AlphaParam, float], table: Optional[SpfTable] = None
) -> ClosureInequalityCheck:
    """Plain GCD sum of the input against the 2^omega-weighted sum of its
    divisor closure."""
    lhs = sums.gcd_sum_naive(s, alpha).value
    closed = closure_transform(s, table).final
    rhs = sums.weighted_gcd_sum_2omega(closed, alpha, table).value
    return ClosureInequalityCheck(lhs=lhs, rhs=rhs, passed=lhs <= rhs * (1 + 1e-12))


@dataclass(frozen=True)
class DivideOutCheck:
    quotient_size: int
    bound: float
    passed: bool


def divideout_check(s: IntegerSet, p: int, table: Optional[SpfTable] = None) -> DivideOutCheck:
    """Halving bound for dividing a prime out of a divisor-closed squarefree set."""
    facs = {m: as_factored(m, table) for m in s}
    if any(not f.is_squarefree() for f in facs.values()):
        raise DomainError("precondition failed: set contains a non-squarefree element")
    if not is_divisor_closed(s):
        raise DomainError("precondition failed: set is not divisor closed")
    if p not in s or len(facs[p].factors) != 1:
        raise DomainError(f"precondition failed: {p} is not a prime member of the set")
    quotient = {m // p for m in s if m % p == 0}
    bound = len(s) / 2
    return DivideOutCheck(
        quotient_size=len(quotient), bound=bound, passed=len(quotient) <= bound
    )
