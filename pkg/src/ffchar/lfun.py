"""L-polynomials of non-principal characters and related prime sums.

The generating polynomial sum_m A(m, chi) z^m of a non-principal character
mod Q (deg Q = n) has degree at most n-1; its inverse roots alpha_i, defined
by the product form prod (1 - alpha_i z), all have modulus 1 or sqrt(q).
This module builds the coefficients from exact character sums, extracts the
inverse roots (companion-matrix eigenvalues of the reversed polynomial plus
one Newton step each), and verifies the root-modulus dichotomy numerically.

Also here: character sums over irreducibles of fixed degree with their
(n+1) q^(k/2) / k bound, von Mangoldt weighted sums (the logarithmic
derivative route to the same bound), and the Mertens-style partial product
over primes of bounded degree, accumulated in exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import irreducibles_up_to, monic_irreducible_count
from .characters import (
    CharSum,
    Character,
    _render_phase_counts,
    character_sum_Ad,
)
from .residue import Modulus, NotAUnitError

__all__ = [
    "LPolynomial",
    "WeilReport",
    "PrimeCharSum",
    "MertensResult",
    "build_lpolynomial",
    "build_all_lpolynomials",
    "verify_weil",
    "prime_char_sum",
    "von_mangoldt_sum",
    "mertens_product",
    "inverse_root_power_sum",
    "TRAILING_COEFF_TOL",
]

TRAILING_COEFF_TOL = 1e-9  # |A(m, chi)| below this counts as an exact zero


@dataclass
class LPolynomial:
    """Coefficients A(0..n-1, chi), extracted inverse roots, and a residual witness."""

    chi: Character
    coeffs: np.ndarray  # complex128, length n = deg Q
    inverse_roots: np.ndarray  # complex128, with multiplicity
    root_residual: float  # max |L(1/alpha_i)| over the roots

    @property
    def degree(self) -> int:
        """Numerical degree: trailing coefficients under the zero threshold dropped."""
        d = len(self.coeffs) - 1
        while d > 0 and abs(self.coeffs[d]) < TRAILING_COEFF_TOL:
            d -= 1
        return d

    def eval_at(self, z: complex) -> complex:
        acc = 0j
        for c in self.coeffs[::-1]:
            acc = acc * z + c
        return acc


def _extract_inverse_roots(coeffs: np.ndarray) -> tuple[np.ndarray, float]:
    """Inverse roots of sum c_m z^m (c_0 = 1) with one Newton step of polish.

    They are the eigenvalue-roots of the reversed polynomial
    R(w) = sum_m c_m w^(D-m); residual reported as max |L(1/alpha)|.
    """
    D = len(coeffs) - 1
    if D <= 0:
        return np.zeros(0, dtype=np.complex128), 0.0
    rev = np.asarray(coeffs, dtype=np.complex128)  # already highest w power first
    roots = np.roots(rev)
    dcoef = rev[:-1] * np.arange(D, 0, -1)
    vals = np.polyval(rev, roots)
    dvals = np.polyval(dcoef, roots)
    step = np.where(np.abs(dvals) > 1e-12, vals / np.where(dvals == 0, 1, dvals), 0)
    roots = roots - step
    lvals = np.abs(np.polyval(rev, roots)) / np.maximum(np.abs(roots) ** D, 1e-300)
    residual = float(lvals.max(initial=0.0))
    return roots, residual


def build_lpolynomial(chi: Character, workers: int = 1) -> LPolynomial:
    """Coefficients by exact character sums for m = 0..n-1, then root extraction."""
    if chi.is_principal:
        raise ValueError("the principal character has no L-polynomial (it is not a polynomial)")
    n = chi.modulus.n
    coeffs = np.zeros(n, dtype=np.complex128)
    for m in range(n):
        coeffs[m] = character_sum_Ad(chi, m, workers).value
    d = n - 1
    while d > 0 and abs(coeffs[d]) < TRAILING_COEFF_TOL:
        d -= 1
    roots, residual = _extract_inverse_roots(coeffs[: d + 1])
    return LPolynomial(chi, coeffs, roots, residual)


def build_all_lpolynomials(modulus: Modulus, workers: int = 1) -> dict[int, LPolynomial]:
    """Every non-principal chi_k of an irreducible modulus at once (DFT bulk path)."""
    from .characters import all_char_sums_Ad, character_by_index

    n = modulus.n
    order = modulus.unit_group.group_order
    rows = [all_char_sums_Ad(modulus, m, workers) for m in range(n)]
    out = {}
    for k in range(1, order):
        coeffs = np.array([rows[m][k] for m in range(n)], dtype=np.complex128)
        d = n - 1
        while d > 0 and abs(coeffs[d]) < TRAILING_COEFF_TOL:
            d -= 1
        roots, residual = _extract_inverse_roots(coeffs[: d + 1])
        out[k] = LPolynomial(character_by_index(modulus, k), coeffs, roots, residual)
    return out


@dataclass
class WeilReport:
    """Root-modulus verdict: every inverse root near modulus 1 or sqrt(q)."""

    chi_label: str
    q: int
    tol: float
    roots: list[dict]  # {re, im, modulus, class}
    residuals: float
    max_deviation: float

    @property
    def passed(self) -> bool:
        return all(r["class"] != "violation" for r in self.roots)

    def to_json_record(self, coeffs=None) -> dict:
        rec = {
            "chi": self.chi_label,
            "roots": self.roots,
            "residuals": self.residuals,
        }
        if coeffs is not None:
            rec["coeffs"] = [[float(c.real), float(c.imag)] for c in coeffs]
        return rec


def verify_weil(L: LPolynomial, tol: float = 1e-6) -> WeilReport:
    """Check each inverse root modulus against {1, sqrt(q)} at the given tolerance.

    Violations are reported, never raised: at these scales they would signal
    numerical failure of the root extraction, not of the mathematics.
    """
    q = L.chi.modulus.field.q
    sq = math.sqrt(q)
    roots = []
    max_dev = 0.0
    for a in L.inverse_roots:
        mod = abs(a)
        dev = min(abs(mod - 1.0), abs(mod - sq))
        max_dev = max(max_dev, dev)
        if abs(mod - 1.0) <= tol:
            cls = "unit"
        elif abs(mod - sq) <= tol:
            cls = "sqrt_q"
        else:
            cls = "violation"
        roots.append({"re": float(a.real), "im": float(a.imag), "modulus": float(mod), "class": cls})
    return WeilReport(L.chi.label, q, tol, roots, L.root_residual, max_dev)


# ---------------------------------------------------------------------------
# prime-degree character sums
# ---------------------------------------------------------------------------


def _irreducible_dlogs(modulus: Modulus, k: int) -> np.ndarray:
    """Flattened dlogs of every P in I_k reduced mod Q; -1 where P divides Q.

    Cached per modulus, since these drive both prime sums and smooth-sum
    generation.
    """
    key = ("irr_dlogs", k)
    if key in modulus._hist_cache:
        return modulus._hist_cache[key]
    from .characters import _flat_strides

    table = modulus.dlog_table
    strides = _flat_strides(modulus.unit_group.component_orders)
    I_k = irreducibles_up_to(modulus.field, k)[k - 1]
    out = np.empty(len(I_k), dtype=np.int64)
    for i, P in enumerate(I_k):
        try:
            dl = table.dlog(P)
        except NotAUnitError:
            out[i] = -1
            continue
        if isinstance(dl, int):
            dl = (dl,)
        out[i] = sum(x * s for x, s in zip(dl, strides))
    modulus._hist_cache[key] = out
    return out


def _phases_from_flat(chi: Character, flat: np.ndarray, power: int = 1) -> np.ndarray:
    """Exact phase of chi at (unit with flattened dlog index)^power, vectorized."""
    from .characters import _flat_strides

    units = chi.modulus.unit_group
    orders = units.component_orders
    M = units.exponent
    strides = _flat_strides(orders)
    total = np.zeros(flat.shape, dtype=np.int64)
    for kexp, m, s in zip(chi.exponents, orders, strides):
        comp = (flat // s) % max(m, 1)
        comp = (comp * power) % max(m, 1)
        total += (kexp * (M // m)) * comp
    return total % M


@dataclass(frozen=True)
class PrimeCharSum:
    """sum_{P in I_k} chi(P) next to its proven bound (n+1) q^(k/2) / k."""

    value: complex
    bound: float
    n_primes: int
    err_bound: float


def prime_char_sum(chi: Character, k: int) -> PrimeCharSum:
    if k < 1:
        raise ValueError("k must be >= 1")
    modulus = chi.modulus
    flat = _irreducible_dlogs(modulus, k)
    units = flat[flat >= 0]
    M = chi.value_order
    phases = _phases_from_flat(chi, units)
    counts = np.zeros(M, dtype=np.int64)
    np.add.at(counts, phases, 1)
    value, err, n_terms = _render_phase_counts(counts, M)
    q, n = modulus.field.q, modulus.n
    bound = (n + 1) * q ** (k / 2.0) / k
    return PrimeCharSum(value, bound, len(flat), err)


def von_mangoldt_sum(chi: Character, k: int) -> CharSum:
    """sum over monic f of degree k of Lambda(f) chi(f).

    Lambda is supported on prime powers, so the sum runs over P^(k/l) for
    l | k, P in I_l, each weighted by l = deg P; chi(P^e) carries the exact
    phase e * phase(P).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    modulus = chi.modulus
    M = chi.value_order
    counts = np.zeros(M, dtype=np.int64)
    for ell in range(1, k + 1):
        if k % ell:
            continue
        flat = _irreducible_dlogs(modulus, ell)
        units = flat[flat >= 0]
        phases = _phases_from_flat(chi, units, power=k // ell)
        np.add.at(counts, phases, ell)
    value, err, n_terms = _render_phase_counts(counts, M)
    return CharSum(value, err, n_terms)


def inverse_root_power_sum(L: LPolynomial, k: int) -> complex:
    """sum_i alpha_i^k over the extracted inverse roots."""
    if L.inverse_roots.size == 0:
        return 0j
    return complex((L.inverse_roots**k).sum())


# ---------------------------------------------------------------------------
# Mertens partial product
# ---------------------------------------------------------------------------

_EULER_GAMMA = float(np.euler_gamma)


def _big_ratio_to_float(num: int, den: int) -> float:
    """num/den for huge ints without normalizing a Fraction (no giant gcd)."""
    shift = 64 - (num.bit_length() - den.bit_length())
    if shift >= 0:
        mant = (num << shift) // den
    else:
        mant = num // (den << -shift)
    return mant * 2.0 ** (-shift)


@dataclass(frozen=True)
class MertensResult:
    q: int
    k: int
    product: float
    ratio: float  # product / (e^gamma * k)


def mertens_product(q: int, k: int) -> MertensResult:
    """prod over irreducible P with deg P <= k of (1 - q^(-deg P))^(-1).

    Accumulated exactly as a ratio of integers, prod_j (q^j / (q^j - 1))^pi_j,
    and rendered to a double only at the end; returned with its ratio to
    e^gamma * k.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    num, den = 1, 1
    for j in range(1, k + 1):
        pj = monic_irreducible_count(q, j)
        num *= (q**j) ** pj
        den *= (q**j - 1) ** pj
    product = _big_ratio_to_float(num, den)
    return MertensResult(q, k, product, product / (math.exp(_EULER_GAMMA) * k))
