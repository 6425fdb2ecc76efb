"""Smooth polynomials: exact counts, smooth character sums, Dickman density.

N(d, r) counts the r-smooth monic polynomials of degree d (no irreducible
factor of degree above r).  Two fully independent routes are implemented and
must agree exactly:

* generating function: N(d, r) is the z^d coefficient of
  prod_{k<=r} (1 - z^k)^(-pi_k), computed in integer power-series arithmetic
  with pi_k from the necklace formula;
* enumeration: classify every monic degree-d polynomial by its maximal
  factor degree (vectorized batch sweep from `vecpoly`).

Character sums over the r-smooth slice are generated from factor multisets
over I_1..I_r with a degree budget, never by filtering all of A_d, so the
cost tracks N(d, r) instead of q^d.

The Dickman function rho solves u rho(u) = int_{u-1}^u rho with rho = 1 on
[0, 1].  Unit panels carry degree-16 Chebyshev expansions obtained by
integrating rho(t-1)/t panel by panel.  The march is performed in mpmath
working precision sized to u_max: each panel end multiplies relative error
by roughly rho(m)/rho(m+1), so a double-precision march is garbage long
before u = 30 (verified: negative values by u = 20).  Only the finished
panel coefficients are stored, as doubles, which keeps evaluation cheap and
accurate to ~1e-14 relative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import mpmath
import numpy as np

from .algebra import Field, irreducibles_up_to, monic_irreducible_count
from .characters import CharSum, Character, _render_phase_counts
from .residue import Modulus, NotAUnitError
from .vecpoly import max_factor_degree_profile

__all__ = [
    "smooth_count",
    "SmoothCountTable",
    "smooth_count_by_enumeration",
    "max_degree_profile_cached",
    "smooth_char_sum",
    "smooth_dlog_histogram",
    "DickmanTable",
    "dickman_rho",
    "default_dickman_table",
    "dickman_residual",
    "soundararajan_check",
    "SoundararajanReport",
]


# ---------------------------------------------------------------------------
# exact counting
# ---------------------------------------------------------------------------


def smooth_count(q: int, d: int, r: int) -> int:
    """Exact N(d, r) via integer power-series coefficient extraction."""
    if d < 0:
        raise ValueError("d must be >= 0")
    if r < 1:
        raise ValueError("r must be >= 1")
    series = [0] * (d + 1)
    series[0] = 1
    for k in range(1, min(r, d) + 1):
        pk = monic_irreducible_count(q, k)
        new = [0] * (d + 1)
        for j in range(d // k + 1):
            c = math.comb(pk - 1 + j, j)
            for i in range(d - k * j + 1):
                if series[i]:
                    new[i + k * j] += c * series[i]
        series = new
    return series[d]


@dataclass(frozen=True)
class SmoothCountTable:
    """N(d, r) for d = 0..d_max at fixed r, tagged with how it was computed."""

    q: int
    d_max: int
    r: int
    counts: tuple[int, ...]
    method: str  # "generating-function" | "enumeration"

    @classmethod
    def build(cls, q: int, d_max: int, r: int) -> "SmoothCountTable":
        return cls(q, d_max, r, tuple(smooth_count(q, d, r) for d in range(d_max + 1)), "generating-function")

    @classmethod
    def build_by_enumeration(cls, field: Field, d_max: int, r: int) -> "SmoothCountTable":
        counts = tuple(smooth_count_by_enumeration(field, d, r) for d in range(d_max + 1))
        return cls(field.q, d_max, r, counts, "enumeration")


@lru_cache(maxsize=64)
def max_degree_profile_cached(field: Field, d: int) -> np.ndarray:
    return max_factor_degree_profile(field, d)


def smooth_count_by_enumeration(field: Field, d: int, r: int) -> int:
    """Independent exhaustive count: classify every f in A_d by max factor degree."""
    if r < 1:
        raise ValueError("r must be >= 1")
    profile = max_degree_profile_cached(field, d)
    return int((profile <= r).sum())


# ---------------------------------------------------------------------------
# smooth character sums by multiset generation
# ---------------------------------------------------------------------------


def _smooth_factor_basis(modulus: Modulus, r: int):
    """Irreducibles of degree <= r in canonical (degree, code) order.

    Each entry is (degree, component-dlog tuple or None); None marks the
    factors of Q itself, whose multiples are non-units.
    """
    key = ("smooth_basis", r)
    if key in modulus._hist_cache:
        return modulus._hist_cache[key]
    table = modulus.dlog_table
    basis = []
    for level in irreducibles_up_to(modulus.field, r):
        for P in level:
            try:
                dl = table.dlog(P)
            except NotAUnitError:
                basis.append((P.degree, None))
                continue
            basis.append((P.degree, (dl,) if isinstance(dl, int) else dl))
    modulus._hist_cache[key] = basis
    return basis


def _visit_smooth_multisets(modulus: Modulus, d: int, r: int, visit: Callable):
    """Call visit(component_dlogs | None) once per r-smooth monic f in A_d.

    Factor multisets over the canonical basis with an exact degree budget;
    None flags products sharing a factor with Q.  Iterative stack, so deep
    bases cannot hit the recursion limit.
    """
    basis = _smooth_factor_basis(modulus, r)
    orders = modulus.unit_group.component_orders
    zero = tuple(0 for _ in orders)
    if d == 0:
        visit(zero)
        return
    # stack entries: (basis index, remaining budget, acc dlogs, unit flag)
    stack = [(0, d, zero, True)]
    while stack:
        i, budget, acc, unit = stack.pop()
        if budget == 0:
            visit(acc if unit else None)
            continue
        if i >= len(basis):
            continue
        deg, dl = basis[i]
        if deg > budget:
            continue  # basis is degree-sorted: nothing later fits either
        # multiplicity 0 branch first so multiplicities pop in ascending order
        stack.append((i + 1, budget, acc, unit))
        cur = acc
        u = unit
        for a in range(1, budget // deg + 1):
            if dl is None:
                u = False
            else:
                cur = tuple((x + y) % m for x, y, m in zip(cur, dl, orders))
            stack.append((i + 1, budget - a * deg, cur, u))


def smooth_char_sum(chi: Character, d: int, r: int) -> CharSum:
    """sum of chi(f) over r-smooth monic f of degree exactly d.

    Exact phase accumulation over generated factor multisets; products that
    share a factor with Q contribute chi(f) = 0 and are skipped.
    """
    if d < 0 or r < 1:
        raise ValueError("need d >= 0 and r >= 1")
    M = chi.value_order
    counts = np.zeros(M, dtype=np.int64)

    def visit(dlogs):
        if dlogs is None:
            return
        counts[chi.phase_of_dlog(dlogs)] += 1

    _visit_smooth_multisets(chi.modulus, d, r, visit)
    value, err, n_terms = _render_phase_counts(counts, M)
    return CharSum(value, err, n_terms)


def smooth_dlog_histogram(modulus: Modulus, d: int, r: int) -> tuple[np.ndarray, int]:
    """(flattened-dlog histogram, non-unit count) over the r-smooth slice of A_d.

    Cached; the histogram plays the same role for P(d, r) that
    `unit_dlog_histogram` plays for A_d, so the bulk DFT path applies.
    """
    key = ("smooth_hist", d, r)
    if key in modulus._hist_cache:
        return modulus._hist_cache[key]
    from .characters import _flat_strides

    units = modulus.unit_group
    strides = _flat_strides(units.component_orders)
    hist = np.zeros(units.group_order, dtype=np.int64)
    state = {"nonunits": 0}

    def visit(dlogs):
        if dlogs is None:
            state["nonunits"] += 1
            return
        hist[sum(x * s for x, s in zip(dlogs, strides))] += 1

    _visit_smooth_multisets(modulus, d, r, visit)
    out = (hist, state["nonunits"])
    modulus._hist_cache[key] = out
    return out


def all_smooth_char_sums(modulus: Modulus, d: int, r: int) -> np.ndarray:
    """Smooth-slice sums for every chi_k of an irreducible modulus (DFT bulk)."""
    if not modulus.is_irreducible:
        raise ValueError("bulk sums require an irreducible modulus")
    hist, _ = smooth_dlog_histogram(modulus, d, r)
    return np.conj(np.fft.fft(hist.astype(np.float64)))


# ---------------------------------------------------------------------------
# Dickman function
# ---------------------------------------------------------------------------


class DickmanTable:
    """Unit panels of Chebyshev coefficients for rho on [0, u_max]."""

    panel_length = 1.0

    def __init__(self, u_max: int = 30, degree: int = 16):
        if u_max < 1:
            raise ValueError("u_max must be >= 1")
        self.u_max = int(u_max)
        self.degree = int(degree)
        self.coeffs = self._march(self.u_max, self.degree)

    @staticmethod
    def _march(u_max: int, N: int) -> np.ndarray:
        # precision sized to the total decay: log10(1/rho(u_max)) ~ u log10 u
        dps = max(50, 40 + int(1.7 * u_max * math.log10(max(u_max, 2))))
        with mpmath.workdps(dps):
            one = mpmath.mpf(1)
            xs = [mpmath.cos(mpmath.pi * j / N) for j in range(N + 1)]
            cosjk = [[mpmath.cos(mpmath.pi * j * k / N) for j in range(N + 1)] for k in range(N + 1)]

            def vals_to_coeffs(v):
                c = []
                for k in range(N + 1):
                    s = mpmath.mpf(0)
                    for j in range(N + 1):
                        w = one / 2 if j in (0, N) else one
                        s += w * v[j] * cosjk[k][j]
                    c.append(2 * s / N)
                c[0] /= 2
                c[N] /= 2
                return c

            def clenshaw(c, x):
                b1 = b2 = mpmath.mpf(0)
                for ck in reversed(c[1:]):
                    b1, b2 = 2 * x * b1 - b2 + ck, b1
                return x * b1 - b2 + c[0]

            panels = [[one] + [mpmath.mpf(0)] * N]  # rho = 1 on [0, 1]
            for m in range(1, u_max):
                prev = panels[m - 1]
                gv = []
                for x in xs:
                    t = m + (x + one) / 2
                    gv.append(clenshaw(prev, 2 * (t - m) - 1) / t)  # rho(t-1) in [m-1, m] local coords
                gc = vals_to_coeffs(gv)
                anti = [mpmath.mpf(0)] * (N + 2)
                anti[1] = (2 * gc[0] - gc[2]) / 2
                for k in range(2, N + 1):
                    anti[k] = (gc[k - 1] - (gc[k + 1] if k + 1 <= N else 0)) / (2 * k)
                anti[N + 1] = gc[N] / (2 * (N + 1))
                anti = [a / 2 for a in anti]  # dt = dx/2 on a unit panel
                rho_m = clenshaw(prev, one)
                g_left = clenshaw(anti, -one)
                cur = [-a for a in anti]
                cur[0] += rho_m + g_left
                panels.append(cur)
            out = np.zeros((u_max, N + 2), dtype=np.float64)
            for m, c in enumerate(panels):
                for k, ck in enumerate(c):
                    out[m, k] = float(ck)
        return out

    def rho(self, u: float) -> float:
        if u < 0:
            raise ValueError("rho is defined for u >= 0")
        if u > self.u_max:
            raise ValueError(f"u = {u} beyond the table range {self.u_max}")
        if u <= 1.0:
            return 1.0
        m = min(int(math.floor(u)), self.u_max - 1)
        x = 2.0 * (u - m) - 1.0
        return float(np.polynomial.chebyshev.chebval(x, self.coeffs[m]))

    def rho_many(self, us) -> np.ndarray:
        return np.array([self.rho(float(u)) for u in np.atleast_1d(us)])


_default_table: Optional[DickmanTable] = None


def default_dickman_table(u_max: int = 30) -> DickmanTable:
    global _default_table
    if _default_table is None or _default_table.u_max < u_max:
        _default_table = DickmanTable(u_max=max(u_max, 30))
    return _default_table


def dickman_rho(u: float, table: Optional[DickmanTable] = None) -> float:
    """rho(u) from the default (or given) panel table; grows the table on demand."""
    if u < 0:
        raise ValueError("rho is defined for u >= 0")
    if table is None:
        table = default_dickman_table(int(math.ceil(u)) if u > 30 else 30)
    return table.rho(u)


def dickman_residual(table: DickmanTable, u: float, npts: int = 64) -> float:
    """|u rho(u) - int_{u-1}^u rho| via independent Gauss-Legendre quadrature.

    The quadrature splits at integer points: rho is analytic inside unit
    panels but loses derivatives at the panel joints, which would stall a
    single Gauss rule across them.
    """
    if u <= 1:
        return 0.0
    nodes, weights = np.polynomial.legendre.leggauss(npts)
    cuts = [u - 1.0]
    cuts += [float(j) for j in range(math.ceil(u - 1.0), math.floor(u) + 1) if u - 1.0 < j < u]
    cuts.append(u)
    integral = 0.0
    for a, b in zip(cuts, cuts[1:]):
        if b <= a:
            continue
        ts = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        integral += 0.5 * (b - a) * float(np.dot(weights, table.rho_many(ts)))
    return abs(u * table.rho(u) - integral)


# ---------------------------------------------------------------------------
# smooth-count vs Dickman prediction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SoundararajanReport:
    """Exact N(d, r) against the q^d rho(d/r) prediction."""

    q: int
    d: int
    r: int
    n_exact: int
    prediction: float
    ratio: float
    normalized_exponent: Optional[float]  # log_q(ratio) * r^2 / (d log d)
    in_range: bool  # log_q(d log^2 d) <= r <= d

    def csv_row(self) -> str:
        ne = "" if self.normalized_exponent is None else repr(self.normalized_exponent)
        return f"{self.d},{self.r},{self.n_exact},{self.prediction!r},{self.ratio!r},{ne}"

    CSV_HEADER = "d,r,N_exact,qd_rho,ratio,normalized_exponent"


def soundararajan_check(q: int, d: int, r: int, table: Optional[DickmanTable] = None) -> SoundararajanReport:
    if d < 1 or r < 1:
        raise ValueError("need d >= 1 and r >= 1")
    n_exact = smooth_count(q, d, r)
    rho = dickman_rho(d / r, table)
    prediction = float(q**d) * rho
    ratio = float(n_exact) / prediction
    if d >= 2:
        norm = math.log(ratio, q) * r * r / (d * math.log(d))
    else:
        norm = None
    lo = math.log(d * math.log(d) ** 2, q) if d >= 2 else float("-inf")
    in_range = lo <= r <= d
    return SoundararajanReport(q, d, r, n_exact, prediction, ratio, norm, in_range)
