"""Primitive-element densities in F_q[t]/(Q) and the sieve quantities.

The indicator of primitivity on the unit group decomposes over characters:
f(x) = sum over squarefree m | N-1 of mu(m)/m times the sum of chi(x) over
the m characters with chi^m principal.  Summing it over A_d splits the
primitive count into the main term q^d phi(N-1)/(N-1) plus character-sum
corrections, which is exactly what `density_experiment` measures; the sieve
route recomputes the same count from congruence classes of discrete logs.

Densities and targets are carried as exact rationals; floating point enters
only through character-sum magnitudes and the epsilon bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .algebra import Field, Poly
from .characters import all_char_sums_Ad, unit_dlog_histogram
from .intfact import FactoredInteger, factor_integer, is_prime, mobius
from .residue import Modulus, is_primitive
from .smooth import dickman_rho

__all__ = [
    "FactoredInteger",
    "factor_integer",
    "is_prime",
    "mobius",
    "EpsilonBound",
    "epsilon_bound",
    "best_epsilon_bound",
    "schedule_degree",
    "IndicatorReport",
    "primitivity_indicator_check",
    "DensityReport",
    "density_experiment",
    "SieveReport",
    "sieve_quantities",
]


# ---------------------------------------------------------------------------
# epsilon bound and the degree schedule
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EpsilonBound:
    """rho(d/r) q^(C2 d log d / r^2) + C3 n q^(-r/2), with its range flag."""

    value: float
    in_range: bool  # 2 log_q n <= r <= d <= n
    q: int
    d: int
    r: int
    n: int
    C2: float
    C3: float


def epsilon_bound(q: int, d: int, r: int, n: int, C2: float = 1.0, C3: float = 1.0) -> EpsilonBound:
    if d < 1 or r < 1:
        raise ValueError("need d >= 1 and r >= 1")
    logd = math.log(d) if d > 1 else 0.0
    main = dickman_rho(d / r) * q ** (C2 * d * logd / (r * r))
    tail = C3 * n * q ** (-r / 2.0)
    in_range = 2 * math.log(n, q) <= r <= d <= n
    return EpsilonBound(main + tail, in_range, q, d, r, n, C2, C3)


def best_epsilon_bound(q: int, d: int, n: int, C2: float = 1.0, C3: float = 1.0) -> EpsilonBound:
    """Minimum of the bound over r = 1..d (the free smoothness parameter)."""
    best = None
    for r in range(1, d + 1):
        cand = epsilon_bound(q, d, r, n, C2, C3)
        if best is None or cand.value < best.value:
            best = cand
    return best


def schedule_degree(q: int, n: int, eps: float, C: float) -> int:
    """The degree d = (2 log_q n + 2 log_q(1/eps)) C log(1/eps)/loglog(1/eps).

    C is a caller-supplied constant (no default is asserted); eps must be
    below 1/e so the iterated logarithm is positive.
    """
    if not 0 < eps < 1 / math.e:
        raise ValueError("eps must lie in (0, 1/e)")
    L = math.log(1 / eps)
    d = (2 * math.log(n, q) + 2 * math.log(1 / eps, q)) * C * L / math.log(L)
    return max(1, math.ceil(d))


# ---------------------------------------------------------------------------
# indicator reconstruction
# ---------------------------------------------------------------------------


@dataclass
class IndicatorReport:
    """Characterwise indicator vs direct primitivity, on units and over A_d.

    The principal character sums the unit count of A_d, which is q^d only
    while d < n; main_term uses the exact unit count so the decomposition
    identity is exact for every d, and main_term_qd_form keeps the q^d shape
    for the d < n regime.
    """

    q: int
    n: int
    group_order: int
    phi: int
    max_unit_deviation: float
    primitive_count_units: int
    d: Optional[int] = None
    total_over_Ad: Optional[float] = None
    direct_count_Ad: Optional[int] = None
    unit_count_Ad: Optional[int] = None
    main_term: Optional[Fraction] = None  # unit_count * phi / (N-1)
    main_term_qd_form: Optional[Fraction] = None  # q^d * phi / (N-1)
    correction: Optional[float] = None

    @property
    def decomposition_error(self) -> Optional[float]:
        if self.d is None:
            return None
        return abs(float(self.main_term) + self.correction - self.direct_count_Ad)

    @property
    def decomposition_error_qd_form(self) -> Optional[float]:
        if self.d is None:
            return None
        return abs(float(self.main_term_qd_form) + self.correction - self.direct_count_Ad)


def primitivity_indicator_check(modulus: Modulus, d: Optional[int] = None) -> IndicatorReport:
    """Verify f(x) = sum_{m | N-1} mu(m)/m sum_{chi^m principal} chi(x) pointwise.

    The right side is summed as honest complex numbers (roots of unity from
    exact phases); the left side is the power-test primitivity predicate.
    With d given, the same decomposition is summed over A_d and compared to
    the direct primitive count.
    """
    if not modulus.is_irreducible:
        raise ValueError("the indicator decomposition needs an irreducible modulus")
    field = modulus.field
    order = modulus.unit_group.group_order  # N - 1
    fact = factor_integer(order) if order > 1 else FactoredInteger(1, ())
    sfd = fact.squarefree_divisors()
    # rhs over every unit, indexed by dlog j: sum_m mu(m)/m sum_{i<m} zeta^(j i (N-1)/m)
    js = np.arange(order, dtype=np.int64)
    rhs = np.zeros(order, dtype=np.complex128)
    for m in sfd:
        mu = mobius(factor_integer(m))
        if mu == 0:
            continue
        inner = np.zeros(order, dtype=np.complex128)
        stride = order // m
        for i in range(m):
            phases = (js * (i * stride)) % order
            inner += np.exp(2j * np.pi * phases / order)
        rhs += (mu / m) * inner
    # direct predicate through the independent power test
    table = modulus.dlog_table
    indicator = np.zeros(order, dtype=np.float64)
    gen = modulus.unit_group.generators[0]
    cur = Poly.one(field)
    for j in range(order):
        indicator[j] = 1.0 if is_primitive(cur, modulus, fact) else 0.0
        cur = (cur * gen) % modulus.poly
    max_dev = float(np.max(np.abs(rhs - indicator))) if order else 0.0
    prim_units = int(indicator.sum())
    rep = IndicatorReport(
        q=field.q,
        n=modulus.n,
        group_order=order,
        phi=fact.phi if order > 1 else 1,
        max_unit_deviation=max_dev,
        primitive_count_units=prim_units,
    )
    if d is None:
        return rep
    # decomposition summed over A_d
    sums = all_char_sums_Ad(modulus, d)
    hist, _ = unit_dlog_histogram(modulus, d)
    unit_count = int(hist.sum())
    total = 0j
    correction = 0j  # nonprincipal character contributions only
    for m in sfd:
        mu = mobius(factor_integer(m))
        if mu == 0:
            continue
        stride = order // m
        inner = sum(sums[(i * stride) % order] for i in range(m))
        total += (mu / m) * inner
        if m > 1:
            inner_np = inner - sums[0]  # drop the principal term
            correction += (mu / m) * inner_np
    rep.d = d
    rep.total_over_Ad = float(total.real)
    rep.direct_count_Ad = _primitive_count_over_Ad(modulus, d, fact)
    rep.unit_count_Ad = unit_count
    rep.main_term = Fraction(unit_count) * Fraction(fact.phi, order)
    rep.main_term_qd_form = Fraction(field.q**d) * Fraction(fact.phi, order)
    rep.correction = float(correction.real)
    return rep


def _primitive_count_over_Ad(modulus: Modulus, d: int, fact: FactoredInteger, workers: int = 1) -> int:
    """|Q(d)|: primitive f in A_d, counted from the dlog histogram."""
    hist, _ = unit_dlog_histogram(modulus, d, workers)
    order = modulus.unit_group.group_order
    js = np.arange(order, dtype=np.int64)
    coprime = np.gcd(js, order) == 1
    return int(hist[coprime].sum())


# ---------------------------------------------------------------------------
# density experiment
# ---------------------------------------------------------------------------


@dataclass
class DensityReport:
    """Primitive density over A_d against phi(N-1)/(N-1), with exact bounds.

    char_bound_holds certifies the decomposition inequality
    |count - units * phi/(N-1)| <= 2^omega * max|A(d, chi)|, which reduces
    to the density form when d < n (all of A_d then consists of units).
    """

    q: int
    n: int
    d: int
    Q_text: str
    count: int
    unit_count: int
    density: Fraction
    target: Fraction
    deviation: Fraction
    omega: int
    eps: float
    eps_r: int
    predicted_bound: float  # 2^omega * eps
    max_char_norm: float  # max over nonprincipal chi of |A(d, chi)| / q^d
    char_bound: float  # 2^omega * max_char_norm
    char_bound_holds: bool

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "n": self.n,
            "d": self.d,
            "Q": self.Q_text,
            "count": self.count,
            "unit_count": self.unit_count,
            "density": f"{self.density.numerator}/{self.density.denominator}",
            "density_float": float(self.density),
            "target": f"{self.target.numerator}/{self.target.denominator}",
            "target_float": float(self.target),
            "deviation": f"{self.deviation.numerator}/{self.deviation.denominator}",
            "deviation_float": float(self.deviation),
            "omega": self.omega,
            "eps": self.eps,
            "eps_r": self.eps_r,
            "predicted_bound": self.predicted_bound,
            "max_char_norm": self.max_char_norm,
            "char_bound": self.char_bound,
            "char_bound_holds": self.char_bound_holds,
        }


def density_experiment(
    q: int,
    n: int,
    d: int,
    Q: Optional[Poly] = None,
    C2: float = 1.0,
    C3: float = 1.0,
    workers: int = 1,
) -> DensityReport:
    """Count primitive f in A_d mod the canonical (or given) irreducible Q.

    The density and its target phi(N-1)/(N-1) stay exact rationals; the
    report pairs the observed deviation with the epsilon bound and with the
    exact character-sum bound 2^omega max |A(d, chi)| / q^d from the
    indicator decomposition.
    """
    field = Field.of_order(q)
    modulus = Modulus.irreducible(field, n) if Q is None else Modulus(Q)
    if modulus.n != n:
        raise ValueError("explicit Q must have degree n")
    order = q**n - 1
    fact = factor_integer(order)
    count = _primitive_count_over_Ad(modulus, d, fact, workers)
    hist, _ = unit_dlog_histogram(modulus, d, workers)
    unit_count = int(hist.sum())
    density = Fraction(count, q**d)
    target = Fraction(fact.phi, order)
    deviation = abs(density - target)
    sums = all_char_sums_Ad(modulus, d, workers)
    max_norm = float(np.max(np.abs(sums[1:])) / q**d) if order > 1 else 0.0
    eb = best_epsilon_bound(q, d, n, C2, C3)
    omega = fact.omega
    char_bound = 2.0**omega * max_norm
    decomposition_gap = abs(float(Fraction(count) - Fraction(unit_count) * target))
    return DensityReport(
        q=q,
        n=n,
        d=d,
        Q_text=str(modulus.poly),
        count=count,
        unit_count=unit_count,
        density=density,
        target=target,
        deviation=deviation,
        omega=omega,
        eps=eb.value,
        eps_r=eb.r,
        predicted_bound=2.0**omega * eb.value,
        max_char_norm=max_norm,
        char_bound=char_bound,
        char_bound_holds=bool(decomposition_gap <= char_bound * q**d + 1e-9),
    )


# ---------------------------------------------------------------------------
# sieve quantities
# ---------------------------------------------------------------------------


@dataclass
class SieveReport:
    """S_m, T, A, B for the shifted-sieve route to the primitive count."""

    q: int
    n: int
    d: int
    Q_text: str
    radical: int
    S: dict[int, int]  # m | radical -> count of units with dlog = 0 mod m
    T: int  # units with gcd(dlog, radical) = 1
    A: int  # q^d
    B_observed: Fraction  # max_m |S_m - A/m|
    char_identity_max_err: float  # S_m vs (1/m) sum_{chi^m principal} A(d, chi)
    eps: float
    eps_B: float  # q^d * eps
    B_within_eps: bool
    lower_bound: Optional[float] = None  # c1 A/(log l + 1)^2 - c2 l^2 B, if constants given

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "n": self.n,
            "d": self.d,
            "Q": self.Q_text,
            "radical": self.radical,
            "S": {str(m): v for m, v in self.S.items()},
            "T": self.T,
            "A": self.A,
            "B_observed": f"{self.B_observed.numerator}/{self.B_observed.denominator}",
            "B_observed_float": float(self.B_observed),
            "char_identity_max_err": self.char_identity_max_err,
            "eps": self.eps,
            "eps_B": self.eps_B,
            "B_within_eps": self.B_within_eps,
            "lower_bound": self.lower_bound,
        }


def sieve_quantities(
    q: int,
    n: int,
    d: int,
    Q: Optional[Poly] = None,
    c1: Optional[float] = None,
    c2: Optional[float] = None,
    workers: int = 1,
) -> SieveReport:
    """Exact S_m for every m dividing the radical of N-1, plus T, A, B.

    Gamma = A_d, U = dlog to the canonical generator, W = 1.  T must equal
    the direct primitive count; each S_m is checked against the character
    identity S_m = (1/m) sum over chi with chi^m principal of A(d, chi).
    The sieve lower bound is evaluated only with caller-supplied constants.
    """
    field = Field.of_order(q)
    modulus = Modulus.irreducible(field, n) if Q is None else Modulus(Q)
    order = q**n - 1
    fact = factor_integer(order)
    radical = fact.radical
    hist, _ = unit_dlog_histogram(modulus, d, workers)
    js = np.arange(order, dtype=np.int64)
    S = {}
    for m in fact.squarefree_divisors():
        S[m] = int(hist[js % m == 0].sum())
    T = int(hist[np.gcd(js, radical) == 1].sum())
    A = q**d
    B_obs = max(abs(Fraction(A, m) - S[m]) for m in S)
    sums = all_char_sums_Ad(modulus, d, workers)
    max_err = 0.0
    for m in S:
        stride = order // math.gcd(order, m)
        # chi with chi^m principal: exponents k with k*m = 0 mod order
        k_count = order // stride
        ident = sum(sums[(i * stride) % order] for i in range(k_count)) / m
        max_err = max(max_err, abs(ident - S[m]))
    eb = best_epsilon_bound(q, d, n)
    lower = None
    if c1 is not None and c2 is not None:
        ell = fact.omega
        lower = c1 * A / (math.log(ell) + 1) ** 2 - c2 * ell * ell * float(A) * eb.value
    return SieveReport(
        q=q,
        n=n,
        d=d,
        Q_text=str(modulus.poly),
        radical=radical,
        S=S,
        T=T,
        A=A,
        B_observed=B_obs,
        char_identity_max_err=float(max_err),
        eps=eb.value,
        eps_B=float(A) * eb.value,
        B_within_eps=bool(float(B_obs) <= float(A) * eb.value + 1e-9),
        lower_bound=lower,
    )
