"""Lower-bound set construction and its identity/estimate verifiers.

The construction picks a smoothness bound M = N^delta, the primorial k of the
primes up to M, a family A of the smallest M-smooth squarefree numbers, the
complementary divisors D = {k/a}, and for each d in D the first
[N phi(d) / k] integers coprime to k/d.  The final set is the disjoint union
of the dilated families d*S_d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from . import arith, sums
from .arith import AlphaParam, FactoredNat, SpfTable, as_alpha, as_factored
from .errors import BudgetError, DomainError
from .sets import IntegerSet


@dataclass(frozen=True)
class ConstructionParams:
    n_target: int
    delta: float
    alpha: AlphaParam

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", as_alpha(self.alpha))
        if self.n_target < 2:
            raise DomainError(f"n_target must be >= 2, got {self.n_target}")
        if not (0.0 < self.delta < 1.0):
            raise DomainError(f"delta must lie in (0,1), got {self.delta}")


@dataclass(frozen=True)
class SdFamily:
    d: int
    s_set: IntegerSet
    s_max: int  # 0 when the quota is empty


@dataclass(frozen=True)
class ConstructionOutput:
    smoothness_bound: float
    k: FactoredNat
    A: IntegerSet
    D: IntegerSet
    sd_families: tuple[SdFamily, ...]
    M_set: IntegerSet
    shortfall: bool


def build_construction(
    params: ConstructionParams,
    table: Optional[SpfTable] = None,
    squarefree_only: bool = False,
) -> ConstructionOutput:
    """Build the extremal set; all output invariants are verified before return.

    squarefree_only additionally restricts each S_d to squarefree s coprime to
    d, so the final set is squarefree (exploration mode, no bound is claimed).
    """
    n_target = params.n_target
    m_bound = float(n_target) ** params.delta
    if m_bound < 2:
        raise DomainError(
            f"smoothness bound N^delta = {m_bound:.3f} < 2; raise N or delta"
        )
    k = arith.primorial(m_bound)
    target_a = _floor_cbrt(n_target)
    enum = arith.squarefree_smooth_enumerate(m_bound, max(target_a, 1))
    a_set = enum.values
    d_values = sorted(k.value // a for a in a_set)
    families: list[SdFamily] = []
    elements: list[int] = []
    for d in d_values:
        a = k.value // d
        phi_d = _phi_of_cofactor(k, a)
        quota = n_target * phi_d // k.value
        members: list[int] = []
        s = 0
        while len(members) < quota:
            s += 1
            if math.gcd(s, a) != 1:
                continue
            if squarefree_only and (
                math.gcd(s, d) != 1 or not as_factored(s, table).is_squarefree()
            ):
                continue
            members.append(s)
        s_set = IntegerSet(tuple(members))
        families.append(SdFamily(d=d, s_set=s_set, s_max=members[-1] if members else 0))
        elements.extend(d * s for s in members)
    if len(set(elements)) != len(elements):
        raise AssertionError("dilated families d*S_d are not pairwise disjoint")
    m_set = IntegerSet.from_iterable(elements)
    out = ConstructionOutput(
        smoothness_bound=m_bound,
        k=k,
        A=a_set,
        D=IntegerSet(tuple(d_values)),
        sd_families=tuple(families),
        M_set=m_set,
        shortfall=enum.shortfall,
    )
    _check_invariants(out, params)
    return out


def _floor_cbrt(n: int) -> int:
    t = round(n ** (1 / 3))
    while t**3 > n:
        t -= 1
    while (t + 1) ** 3 <= n:
        t += 1
    return t


def _phi_of_cofactor(k: FactoredNat, a: int) -> int:
    """phi(k/a) for squarefree k and a | k, from k's prime list."""
    result = 1
    for p, _ in k.factors:
        if a % p != 0:
            result *= p - 1
    return result


def _check_invariants(out: ConstructionOutput, params: ConstructionParams) -> None:
    k = out.k.value
    for a in out.A:
        fa = arith.factorize(a)
        if not fa.is_squarefree():
            raise AssertionError(f"A member {a} is not squarefree")
        if any(p > out.smoothness_bound for p, _ in fa.factors):
            raise AssertionError(f"A member {a} is not {out.smoothness_bound}-smooth")
    if sorted(out.D) != sorted(k // a for a in out.A):
        raise AssertionError("D is not {k/a : a in A}")
    total = 0
    for fam in out.sd_families:
        a = k // fam.d
        phi_d = _phi_of_cofactor(out.k, a)
        if len(fam.s_set) != params.n_target * phi_d // k:
            raise AssertionError(f"|S_d| quota violated for d={fam.d}")
        if any(math.gcd(s, a) != 1 for s in fam.s_set):
            raise AssertionError(f"coprimality to k/d violated for d={fam.d}")
        total += len(fam.s_set)
    if total != len(out.M_set):
        raise AssertionError("dilated families overlap")
    # with a shortfall, A exhausts all divisors of k and the quotas can sum
    # exactly to N; the strict bound only holds for a proper subfamily
    if not out.shortfall and len(out.M_set) >= params.n_target:
        raise AssertionError(f"|M| = {len(out.M_set)} not below N = {params.n_target}")
    if out.shortfall and len(out.M_set) > params.n_target:
        raise AssertionError("cardinality exceeds N even with shortfall")


# ---------------------------------------------------------------------------
# reports and identity checks


@dataclass(frozen=True)
class LowerBoundReport:
    sum: float
    scale: float
    ratio: float


def lower_bound_report(
    params: ConstructionParams,
    out: Optional[ConstructionOutput] = None,
    table: Optional[SpfTable] = None,
) -> LowerBoundReport:
    """GCD sum of the constructed set against N^(2-2a) (log N)^(2a)."""
    if out is None:
        out = build_construction(params, table)
    a = params.alpha.alpha
    total = sums.gcd_sum_fast(out.M_set, a, table).value
    n = params.n_target
    scale = n ** (2 - 2 * a) * math.log(n) ** (2 * a)
    return LowerBoundReport(sum=total, scale=scale, ratio=total / scale)


@dataclass(frozen=True)
class IdentityCheck:
    lhs: float
    rhs: float
    rel_err: float


def _require_squarefree(k: FactoredNat) -> None:
    if not k.is_squarefree():
        raise DomainError(f"k = {k.value} must be squarefree")


def mult1_check(
    k: Union[int, FactoredNat], c: int, alpha: Union[AlphaParam, float]
) -> IdentityCheck:
    """Single-sum totient identity over the divisors of squarefree k."""
    fk = as_factored(k)
    _require_squarefree(fk)
    if fk.value % c != 0:
        raise DomainError(f"{c} does not divide k = {fk.value}")
    a = as_alpha(alpha).alpha
    kv = fk.value
    divs = arith.divisors(fk)
    phi = {d: arith.euler_phi(arith.factorize(d)) for d in divs}
    phi_kc = phi[kv // c]
    phi_c = phi[c]
    terms = [
        math.gcd(c, d) ** (2 * a)
        * (phi_kc * phi[kv // d]) ** a
        * (phi_c * phi[d]) ** (1 - a)
        for d in divs
    ]
    lhs = math.fsum(terms) / kv**2
    prod = 1.0
    for p, _ in fk.factors:
        ip = 1.0 / p
        prod *= ip * (1 - ip) + (1 - ip) ** (2 - 2 * a)
    rhs = prod * (c / kv) * arith.f_fn(arith.factorize(kv // c), a)
    return IdentityCheck(lhs=lhs, rhs=rhs, rel_err=_rel_err(lhs, rhs))


def mult10_factor(p: int, alpha: Union[AlphaParam, float]) -> float:
    """Per-prime factor of the double-sum identity's product side."""
    a = as_alpha(alpha).alpha
    ip = 1.0 / p
    return (
        float(p) ** (2 * a - 2) * (1 - ip) ** (2 * a)
        + 2 * ip * (1 - ip)
        + (1 - ip) ** (2 - 2 * a)
    )


_MULT10_OMEGA_LIMIT = 10


def mult10_check(k: Union[int, FactoredNat], alpha: Union[AlphaParam, float]) -> IdentityCheck:
    """Double-sum totient identity; cost 4^omega(k), refused above omega 10."""
    fk = as_factored(k)
    _require_squarefree(fk)
    if len(fk.factors) > _MULT10_OMEGA_LIMIT:
        raise BudgetError(
            f"omega(k) = {len(fk.factors)} exceeds the 4^omega budget limit"
        )
    a = as_alpha(alpha).alpha
    kv = fk.value
    divs = arith.divisors(fk)
    phi = {d: arith.euler_phi(arith.factorize(d)) for d in divs}
    terms = []
    for c in divs:
        pc = phi[kv // c] ** a * phi[c] ** (1 - a)
        for d in divs:
            terms.append(
                math.gcd(c, d) ** (2 * a) * pc * phi[kv // d] ** a * phi[d] ** (1 - a)
            )
    lhs = math.fsum(terms) / kv**2
    rhs = 1.0
    for p, _ in fk.factors:
        rhs *= mult10_factor(p, a)
    return IdentityCheck(lhs=lhs, rhs=rhs, rel_err=_rel_err(lhs, rhs))


def _rel_err(x: float, y: float) -> float:
    scale = max(abs(x), abs(y), 1e-300)
    return abs(x - y) / scale


@dataclass(frozen=True)
class ProdScanRow:
    bound: float
    product: float
    ratio: float


def prod_lower_bound_scan(
    bounds: Sequence[float], alpha: Union[AlphaParam, float]
) -> list[ProdScanRow]:
    """Product of the per-prime factors up to each bound, against (log M)^(2a)."""
    a = as_alpha(alpha).alpha
    rows = []
    srt = sorted(bounds)
    primes = arith.primes_upto(srt[-1]) if srt else []
    prod = 1.0
    i = 0
    for m in srt:
        while i < len(primes) and primes[i] <= m:
            prod *= mult10_factor(primes[i], a)
            i += 1
        rows.append(ProdScanRow(bound=m, product=prod, ratio=prod / math.log(m) ** (2 * a)))
    return rows


@dataclass(frozen=True)
class RankinTailCheck:
    tail: float
    budget: float
    product: float
    head: float
    passed: bool


_RANKIN_BUDGET = 10**6


def rankin_tail_check(params: ConstructionParams) -> RankinTailCheck:
    """Tail mass of the smooth squarefree f(n)/n series beyond the head of the
    construction, against one third of the full Euler product."""
    a = params.alpha.alpha
    m_bound = float(params.n_target) ** params.delta
    ps = arith.primes_upto(m_bound)
    if 2 ** len(ps) > _RANKIN_BUDGET:
        raise BudgetError(
            f"2^{len(ps)} smooth squarefree terms exceed the {_RANKIN_BUDGET} budget"
        )
    weights = [arith.f_fn(arith.factorize(p), a) / p for p in ps]
    product = 1.0
    for w in weights:
        product *= 1.0 + w
    head_cut = _floor_cbrt(params.n_target)
    terms = [(1, 1.0)]
    for p, w in zip(ps, weights):
        terms.extend((n * p, v * w) for n, v in terms[:])
    head = math.fsum(v for n, v in terms if n <= head_cut)
    tail = product - head
    budget = product / 3.0
    return RankinTailCheck(
        tail=tail, budget=budget, product=product, head=head, passed=tail <= budget
    )


@dataclass(frozen=True)
class SdBoundsRow:
    d: int
    size: int
    size_threshold: float
    size_ok: bool  # asymptotic, reported but never asserted
    s_max: int
    s_max_bound: float
    bound_applicable: bool  # requires |S_d| >= k/d
    s_max_ok: bool


def sd_bounds_check(out: ConstructionOutput, params: ConstructionParams) -> list[SdBoundsRow]:
    """Per-d report of family sizes and maxima against their stated bounds."""
    n = params.n_target
    k = out.k.value
    threshold = n ** (2 / 3) / (2 * math.log(n))
    rows = []
    for fam in out.sd_families:
        a = k // fam.d
        phi_d = _phi_of_cofactor(out.k, a)
        phi_kd = arith.euler_phi(arith.factorize(a))
        s_bound = 2 * n * phi_d / (fam.d * phi_kd)
        applicable = len(fam.s_set) >= a
        rows.append(
            SdBoundsRow(
                d=fam.d,
                size=len(fam.s_set),
                size_threshold=threshold,
                size_ok=len(fam.s_set) >= threshold,
                s_max=fam.s_max,
                s_max_bound=s_bound,
                bound_applicable=applicable,
                s_max_ok=(fam.s_max <= s_bound) if applicable else True,
            )
        )
    return rows
