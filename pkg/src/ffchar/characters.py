"""Multiplicative characters modulo Q with exact root-of-unity values.

A character is determined by one exponent per cyclic component of the unit
group; its value at a unit x is zeta_M^phase where M is the group exponent
and the integer phase is computed exactly from discrete logs.  Floating
point enters only when a finished phase histogram is rendered to a complex
number, so accumulated sums carry a provable error bound (emitted alongside
each sum) instead of silent drift.

Two evaluation routes coexist and are cross-checked in the tests:

* per-character: exact phase histogram folded from the dlog histogram, then
  a compensated (Kahan) rendering sum in a fixed order;
* whole dual group at once (irreducible Q): the complex sums for every
  character are the conjugate DFT of the integer dlog histogram.

Both start from the same integer histograms, which parallel workers merge
by plain integer addition, so results are bit-identical for any worker
count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional, Union

import numpy as np

from .algebra import Poly, enumerate_monic
from .residue import Modulus, NotAUnitError

__all__ = [
    "CharValue",
    "Character",
    "CharSum",
    "all_characters",
    "principal_character",
    "character_from_label",
    "characters_with_power_principal",
    "chi_eval",
    "character_sum_Ad",
    "unit_dlog_histogram",
    "all_char_sums_Ad",
    "phase_to_complex",
]

_COMPOSITE_HIST_LIMIT = 1 << 22

_cos_sin_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _cos_sin(M: int) -> tuple[np.ndarray, np.ndarray]:
    if M not in _cos_sin_cache:
        ang = 2.0 * np.pi * np.arange(M) / M
        _cos_sin_cache[M] = (np.cos(ang), np.sin(ang))
    return _cos_sin_cache[M]


def phase_to_complex(phase: int, M: int) -> complex:
    """zeta_M^phase as a complex double."""
    a = 2.0 * math.pi * (phase % M) / M
    return complex(math.cos(a), math.sin(a))


@dataclass(frozen=True)
class CharValue:
    """Either zero or an exact M-th root of unity, stored as a phase index."""

    order: int
    phase: Optional[int]  # None encodes the value 0

    @property
    def is_zero(self) -> bool:
        return self.phase is None

    def to_complex(self) -> complex:
        if self.phase is None:
            return 0j
        return phase_to_complex(self.phase, self.order)

    def __mul__(self, other: "CharValue") -> "CharValue":
        if self.order != other.order:
            raise ValueError("cannot multiply values of different orders")
        if self.phase is None or other.phase is None:
            return CharValue(self.order, None)
        return CharValue(self.order, (self.phase + other.phase) % self.order)


@dataclass(frozen=True)
class Character:
    """A multiplicative character mod Q, one exponent per unit-group component."""

    modulus: Modulus
    exponents: tuple[int, ...]

    def __post_init__(self):
        orders = self.modulus.unit_group.component_orders
        if len(self.exponents) != len(orders):
            raise ValueError("one exponent per unit-group component required")
        for k, m in zip(self.exponents, orders):
            if not 0 <= k < max(m, 1):
                raise ValueError(f"exponent {k} out of range [0, {m})")

    @property
    def value_order(self) -> int:
        """M: all values are M-th roots of unity (the unit-group exponent)."""
        return self.modulus.unit_group.exponent

    @property
    def is_principal(self) -> bool:
        return all(k == 0 for k in self.exponents)

    @property
    def order(self) -> int:
        """Least m >= 1 with chi^m principal."""
        out = 1
        for k, m in zip(self.exponents, self.modulus.unit_group.component_orders):
            if k:
                out = math.lcm(out, m // math.gcd(m, k))
        return out

    @property
    def label(self) -> str:
        inner = ",".join(str(k) for k in self.exponents)
        return f"chi[{inner}]"

    def power(self, j: int) -> "Character":
        orders = self.modulus.unit_group.component_orders
        return Character(self.modulus, tuple((k * j) % max(m, 1) for k, m in zip(self.exponents, orders)))

    def conjugate(self) -> "Character":
        orders = self.modulus.unit_group.component_orders
        return Character(self.modulus, tuple((-k) % max(m, 1) for k, m in zip(self.exponents, orders)))

    def phase_of_dlog(self, dlogs: Union[int, tuple[int, ...]]) -> int:
        """Exact phase index of chi at a unit with the given component dlogs."""
        if isinstance(dlogs, int):
            dlogs = (dlogs,)
        M = self.value_order
        total = 0
        for k, d, m in zip(self.exponents, dlogs, self.modulus.unit_group.component_orders):
            total += k * d * (M // m)
        return total % M


def principal_character(modulus: Modulus) -> Character:
    return Character(modulus, tuple(0 for _ in modulus.unit_group.components))


def all_characters(modulus: Modulus) -> Iterator[Character]:
    """The full dual group, exactly once each, in exponent-product order."""
    orders = modulus.unit_group.component_orders
    idx = [0] * len(orders)
    while True:
        yield Character(modulus, tuple(idx))
        for i in range(len(orders) - 1, -1, -1):
            idx[i] += 1
            if idx[i] < max(orders[i], 1):
                break
            idx[i] = 0
        else:
            return


def character_from_label(modulus: Modulus, label: str) -> Character:
    body = label.strip()
    if body.startswith("chi[") and body.endswith("]"):
        body = body[4:-1]
    return Character(modulus, tuple(int(tok) for tok in body.split(",")))


def characters_with_power_principal(modulus: Modulus, m: int) -> list[Character]:
    """All chi with chi^m principal; for cyclic groups these number gcd(m, N-1)."""
    out = []
    for chi in all_characters(modulus):
        if chi.power(m).is_principal:
            out.append(chi)
    return out


def chi_eval(chi: Character, f: Poly) -> CharValue:
    """chi(f): zero when gcd(f, Q) != 1, else the exact root of unity.

    Depends only on f mod Q (periodic extension to all of F_q[t]).
    """
    modulus = chi.modulus
    M = chi.value_order
    table = modulus.dlog_table
    try:
        d = table.dlog(f)
    except NotAUnitError:
        return CharValue(M, None)
    return CharValue(M, chi.phase_of_dlog(d))


# ---------------------------------------------------------------------------
# histograms over A_d
# ---------------------------------------------------------------------------


def _flat_strides(orders: tuple[int, ...]) -> list[int]:
    strides = [1] * len(orders)
    for i in range(len(orders) - 2, -1, -1):
        strides[i] = strides[i + 1] * max(orders[i + 1], 1)
    return strides


def unit_dlog_histogram(modulus: Modulus, d: int, workers: int = 1) -> tuple[np.ndarray, int]:
    """(histogram over flattened dlog indices, non-unit count) for f in A_d.

    The histogram has group_order entries; entry j counts the monic degree-d
    polynomials whose reduction is the unit with flattened dlog j.  Cached
    per (modulus, d); exact integers, so worker partitioning cannot change
    the result.
    """
    key = ("hist", d)
    if key in modulus._hist_cache:
        return modulus._hist_cache[key]
    units = modulus.unit_group
    order = units.group_order
    total = modulus.field.q**d
    if modulus.is_irreducible and modulus.dlog_table.strategies[0] == "full-table":
        table = modulus.dlog_table
        nchunks = max(1, min(workers * 4, total))
        bounds = [total * i // nchunks for i in range(nchunks + 1)]

        def work(i):
            vec = table.dlogs_of_monic_degree(d, bounds[i], bounds[i + 1])
            nonunit = int((vec < 0).sum())
            return np.bincount(vec[vec >= 0], minlength=order), nonunit

        if workers > 1 and nchunks > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(work, range(nchunks)))
        else:
            parts = [work(i) for i in range(nchunks)]
        hist = np.zeros(order, dtype=np.int64)
        nonunits = 0
        for h, nu in parts:
            hist += h
            nonunits += nu
    else:
        if order > _COMPOSITE_HIST_LIMIT:
            raise ValueError(f"group order {order} too large for a dense histogram")
        strides = _flat_strides(units.component_orders)
        table = modulus.dlog_table
        hist = np.zeros(order, dtype=np.int64)
        nonunits = 0
        for f in enumerate_monic(modulus.field, d):
            try:
                dl = table.dlog(f)
            except NotAUnitError:
                nonunits += 1
                continue
            if isinstance(dl, int):
                dl = (dl,)
            hist[sum(x * s for x, s in zip(dl, strides))] += 1
        assert hist.sum() + nonunits == total
    modulus._hist_cache[key] = (hist, nonunits)
    return hist, nonunits


def _phase_weights(chi: Character) -> np.ndarray:
    """Phase index of chi at every flattened dlog index (exact ints)."""
    units = chi.modulus.unit_group
    orders = units.component_orders
    M = units.exponent
    strides = _flat_strides(orders)
    idx = np.arange(units.group_order, dtype=np.int64)
    total = np.zeros_like(idx)
    for k, m, s in zip(chi.exponents, orders, strides):
        comp = (idx // s) % max(m, 1)
        total += (k * (M // m)) * comp
    return total % M


@dataclass(frozen=True)
class CharSum:
    """A rendered character sum with its accumulation error bound."""

    value: complex
    err_bound: float
    n_terms: int

    def __complex__(self):
        return self.value

    @property
    def magnitude(self) -> float:
        return abs(self.value)


def _render_phase_counts(counts: np.ndarray, M: int) -> tuple[complex, float, int]:
    """Kahan-compensated sum of counts[a] * zeta_M^a in fixed phase order."""
    cos_t, sin_t = _cos_sin(M)
    nz = np.nonzero(counts)[0]
    re = im = 0.0
    cre = cim = 0.0
    n_terms = 0
    for a in nz:
        c = float(counts[a])
        n_terms += int(counts[a])
        y = c * cos_t[a] - cre
        t = re + y
        cre = (t - re) - y
        re = t
        y = c * sin_t[a] - cim
        t = im + y
        cim = (t - im) - y
        im = t
    err = 1e-15 * max(n_terms, 1)
    return complex(re, im), err, n_terms


def character_sum_Ad(chi: Character, d: int, workers: int = 1) -> CharSum:
    """A(d, chi) = sum of chi(f) over monic f of degree exactly d.

    Exact phase accumulation (integer histogram), rendered once with
    compensated summation; the bound on the rendering error is emitted with
    the sum.
    """
    if d < 0:
        raise ValueError("degree must be >= 0")
    hist, _ = unit_dlog_histogram(chi.modulus, d, workers)
    M = chi.value_order
    phases = _phase_weights(chi)
    counts = np.zeros(M, dtype=np.int64)
    np.add.at(counts, phases, hist)
    value, err, n_terms = _render_phase_counts(counts, M)
    return CharSum(value, err, n_terms)


def all_char_sums_Ad(modulus: Modulus, d: int, workers: int = 1) -> np.ndarray:
    """A(d, chi_k) for every character of an irreducible modulus, k-indexed.

    chi_k maps the generator to zeta_(N-1)^k, so the vector of sums is the
    conjugate DFT of the dlog histogram.  Entry 0 is the principal sum, i.e.
    the number of units in A_d.
    """
    if not modulus.is_irreducible:
        raise ValueError("bulk character sums require an irreducible modulus")
    hist, _ = unit_dlog_histogram(modulus, d, workers)
    return np.conj(np.fft.fft(hist.astype(np.float64)))


def character_by_index(modulus: Modulus, k: int) -> Character:
    """chi_k for an irreducible modulus (exponent k on the single component)."""
    if not modulus.is_irreducible:
        raise ValueError("index form requires an irreducible modulus")
    return Character(modulus, (k,))
