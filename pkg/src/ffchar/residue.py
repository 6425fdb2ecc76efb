"""The quotient ring F_q[t]/(Q): unit group, discrete logs, primitivity.

Q must be squarefree (irreducible or a squarefree composite); anything else
is rejected at Modulus construction.  The unit group is a product of cyclic
components, one per irreducible factor Q_i, of order q^(deg Q_i) - 1.  Each
component gets a deterministic generator (least residue code that generates)
and a discrete-log table, either a full lookup array or baby-step giant-step
above a configurable size threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Union

import numpy as np

from .algebra import Field, Poly, factorize, lex_least_irreducible
from .intfact import FactoredInteger, factor_integer
from .vecpoly import vadd_poly_codes

__all__ = [
    "Modulus",
    "UnitComponent",
    "UnitGroupView",
    "DlogTable",
    "NotAUnitError",
    "find_generator",
    "dlog",
    "is_primitive",
    "is_primitive_via_dlog",
]

FULL_TABLE_LIMIT = 1 << 22  # component order above this switches to BSGS


class NotAUnitError(ValueError):
    """Raised when a discrete log is requested for a non-unit residue."""


class Modulus:
    """A squarefree modulus Q with its factor structure."""

    def __init__(self, poly: Poly):
        if poly.is_zero or poly.degree < 1:
            raise ValueError("modulus must have degree >= 1")
        if not poly.is_monic:
            poly = poly.monic()
        fac = factorize(poly)
        bad = [(str(p), m) for p, m in fac.factors if m > 1]
        if bad:
            raise ValueError(
                f"modulus {poly} is not squarefree (repeated factors: {bad}); "
                "only irreducible or squarefree-composite moduli are supported"
            )
        self.field: Field = poly.field
        self.poly: Poly = poly
        self.n: int = poly.degree
        self.irreducible_factors: tuple[Poly, ...] = tuple(p for p, _ in fac.factors)
        self.kind: str = (
            "irreducible" if len(self.irreducible_factors) == 1 else "squarefree-composite"
        )
        self._hist_cache: dict = {}

    @classmethod
    def irreducible(cls, field: Field, n: int) -> "Modulus":
        """The canonical degree-n modulus: least monic irreducible."""
        return cls(lex_least_irreducible(field, n))

    @classmethod
    def from_text(cls, field: Field, text: str) -> "Modulus":
        return cls(Poly.from_string(field, text))

    @property
    def is_irreducible(self) -> bool:
        return self.kind == "irreducible"

    @cached_property
    def unit_group(self) -> "UnitGroupView":
        return find_generator(self)

    @cached_property
    def dlog_table(self) -> "DlogTable":
        return DlogTable(self)

    def reduce(self, f: Poly) -> Poly:
        return f % self.poly

    def __eq__(self, other):
        return isinstance(other, Modulus) and self.field is other.field and self.poly == other.poly

    def __hash__(self):
        return hash((id(self.field), self.poly.coeffs))

    def __repr__(self):
        return f"Modulus(q={self.field.q}, Q={self.poly})"


@dataclass(frozen=True)
class UnitComponent:
    """One cyclic factor: residues mod the irreducible Q_i."""

    poly: Poly
    degree: int
    order: int
    order_factorization: FactoredInteger
    generator: Poly


class UnitGroupView:
    """Unit group of F_q[t]/(Q) as a product of verified cyclic components."""

    def __init__(self, modulus: Modulus, components: tuple[UnitComponent, ...]):
        self.modulus = modulus
        self.components = components
        self.group_order = math.prod(c.order for c in components)
        self.component_orders = tuple(c.order for c in components)
        self.exponent = math.lcm(*(max(c.order, 1) for c in components))
        self.generators = tuple(c.generator for c in components)

    def __repr__(self):
        return f"UnitGroupView({self.modulus!r}, order={self.group_order})"


def find_generator(modulus: Modulus) -> UnitGroupView:
    """Verified generator per component, deterministically the least one.

    A candidate g passes iff g^(m/l) != 1 for every prime l dividing the
    component order m; the first residue in enumeration order that passes is
    kept, so every run picks the same generators.
    """
    comps = []
    q = modulus.field.q
    for Qi in modulus.irreducible_factors:
        ni = Qi.degree
        order = q**ni - 1
        fact = factor_integer(order) if order > 1 else FactoredInteger(1, ())
        gen = None
        for code in range(1, q**ni):
            x = Poly.from_code(modulus.field, code)
            if all(x.powmod(order // ell, Qi) != Poly.one(modulus.field) for ell in fact.primes):
                gen = x
                break
        if gen is None:
            raise AssertionError(f"no generator found mod {Qi}")  # cyclic group: impossible
        comps.append(UnitComponent(Qi, ni, order, fact, gen))
    return UnitGroupView(modulus, tuple(comps))


class DlogTable:
    """Discrete logs to the per-component generators.

    strategy "full-table" stores g^i -> i for the whole component (numpy
    int64, indexed by residue code); "baby-step-giant-step" stores only
    sqrt(order) baby steps.  The choice is per component by order, with the
    threshold overridable.
    """

    def __init__(self, modulus: Modulus, strategy: Optional[str] = None, table_limit: int = FULL_TABLE_LIMIT):
        self.modulus = modulus
        self.units = modulus.unit_group
        self._component_tables = []
        self.strategies = []
        for comp in self.units.components:
            use_full = comp.order <= table_limit if strategy is None else (strategy == "full-table")
            if strategy == "baby-step-giant-step":
                use_full = False
            if use_full:
                self._component_tables.append(("full-table", self._build_full(comp)))
            else:
                self._component_tables.append(("baby-step-giant-step", self._build_bsgs(comp)))
            self.strategies.append(self._component_tables[-1][0])

    @property
    def strategy(self) -> str:
        return self.strategies[0] if len(self.strategies) == 1 else tuple(self.strategies)

    def _build_full(self, comp: UnitComponent) -> np.ndarray:
        field = self.modulus.field
        size = field.q**comp.degree
        table = np.full(size, -1, dtype=np.int64)
        cur = Poly.one(field)
        for i in range(comp.order):
            table[cur.code()] = i
            cur = (cur * comp.generator) % comp.poly
        assert cur == Poly.one(field), "generator order mismatch"
        return table

    def _build_bsgs(self, comp: UnitComponent):
        field = self.modulus.field
        m = math.isqrt(comp.order) + 1
        baby = {}
        cur = Poly.one(field)
        for j in range(m):
            baby.setdefault(cur.code(), j)
            cur = (cur * comp.generator) % comp.poly
        # giant stride g^(-m) mod Q_i
        stride = comp.generator.powmod(comp.order - (m % comp.order), comp.poly)
        return (m, baby, stride)

    def _component_dlog(self, idx: int, residue: Poly) -> int:
        comp = self.units.components[idx]
        kind, data = self._component_tables[idx]
        r = residue % comp.poly
        if r.is_zero:
            raise NotAUnitError(f"{residue} shares the factor {comp.poly} with the modulus")
        if kind == "full-table":
            val = int(data[r.code()])
            assert val >= 0
            return val
        m, baby, stride = data
        cur = r
        for i in range(m):
            j = baby.get(cur.code())
            if j is not None:
                return (i * m + j) % comp.order
            cur = (cur * stride) % comp.poly
        raise AssertionError("BSGS failed on a unit residue")

    def dlog(self, x: Union[Poly, int]) -> Union[int, tuple[int, ...]]:
        """Discrete log of the unit x; int for irreducible Q, tuple per component otherwise."""
        f = Poly.from_code(self.modulus.field, x) if isinstance(x, int) else x
        g = f.gcd(self.modulus.poly)
        if g != Poly.one(self.modulus.field):
            raise NotAUnitError(f"gcd({f}, {self.modulus.poly}) = {g} != 1")
        vals = tuple(self._component_dlog(i, f) for i in range(len(self.units.components)))
        return vals[0] if self.modulus.is_irreducible else vals

    # -- vectorized enumeration support (irreducible, full-table only) ----

    def dlogs_of_monic_degree(self, d: int, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
        """dlog of (f mod Q) for the monic degree-d stream slice [start, stop).

        Requires an irreducible modulus with a full table.  Non-units (the
        multiples of Q, possible once d >= n) come back as -1.
        """
        if not self.modulus.is_irreducible:
            raise ValueError("vector dlogs require an irreducible modulus")
        kind, table = self._component_tables[0]
        if kind != "full-table":
            raise ValueError("vector dlogs require the full-table strategy")
        field = self.modulus.field
        q, n = field.q, self.modulus.n
        total = q**d
        if stop is None:
            stop = total
        if not 0 <= start <= stop <= total:
            raise ValueError("bad slice")
        if d < n:
            base = q**d
            return table[base + start : base + stop]
        # reduce blocks of q^n consecutive codes: they share the high part
        block = q**n
        out = np.empty(stop - start, dtype=np.int64)
        low = np.arange(block, dtype=np.int64)
        pos = start
        Q = self.modulus.poly
        while pos < stop:
            hi = pos // block  # index over the high coefficient part
            lo0 = pos - hi * block
            lo1 = min(block, lo0 + (stop - pos))
            # high part polynomial: x^d + (digits of hi) * x^n, reduced mod Q
            head = Poly.from_code(field, q**d + hi * block)
            rcode = (head % Q).code()
            codes = vadd_poly_codes(field, low[lo0:lo1], rcode, n)
            out[pos - start : pos - start + (lo1 - lo0)] = table[codes]
            pos += lo1 - lo0
        return out


def dlog(x: Union[Poly, int], table: DlogTable) -> Union[int, tuple[int, ...]]:
    """g^dlog(x) = x for the table's generator(s); NotAUnitError on non-units."""
    return table.dlog(x)


def is_primitive(x: Union[Poly, int], modulus: Modulus, fact: Optional[FactoredInteger] = None) -> bool:
    """Power test: x generates the full unit group of the irreducible modulus.

    True iff x is nonzero mod Q and x^((N-1)/p) != 1 for every prime p
    dividing N-1 = q^n - 1.  The zero residue is simply non-primitive.
    """
    if not modulus.is_irreducible:
        raise ValueError("primitivity is defined for irreducible moduli")
    f = Poly.from_code(modulus.field, x) if isinstance(x, int) else x
    r = f % modulus.poly
    if r.is_zero:
        return False
    order = modulus.field.q**modulus.n - 1
    if fact is None:
        fact = factor_integer(order)
    if fact.value != order:
        raise ValueError("fact must factor q^n - 1")
    one = Poly.one(modulus.field)
    return all(r.powmod(order // p, modulus.poly) != one for p in fact.primes)


def is_primitive_via_dlog(x: Union[Poly, int], modulus: Modulus, fact: Optional[FactoredInteger] = None) -> bool:
    """Equivalent test through the dlog: gcd(dlog(x), N-1) = 1."""
    if not modulus.is_irreducible:
        raise ValueError("primitivity is defined for irreducible moduli")
    f = Poly.from_code(modulus.field, x) if isinstance(x, int) else x
    if (f % modulus.poly).is_zero:
        return False
    order = modulus.field.q**modulus.n - 1
    return math.gcd(modulus.dlog_table.dlog(f), order) == 1
