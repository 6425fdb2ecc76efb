"""Exact arithmetic in F_q (q = p^e) and the polynomial ring F_q[t].

Field elements are encoded as integers in [0, q): an element with power-basis
coordinates (c_0, ..., c_{e-1}) over F_p has code sum c_i p^i.  Polynomials
are tuples of element codes, lowest degree first, with no trailing zeros; the
zero polynomial is the empty tuple and its degree is None (there is no -inf
arithmetic anywhere, operations state nonzero/monic preconditions instead).

Enumeration order is fixed once and for all: the code of a polynomial is
sum coeff_i * q^i, and streams run over ascending codes, so the constant
term varies fastest.  "Least" polynomial always means least code.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np

from .intfact import factor_integer, is_prime

__all__ = [
    "Field",
    "FieldElement",
    "Poly",
    "Factorization",
    "poly_mul_mod",
    "enumerate_monic",
    "monic_code_range",
    "is_irreducible",
    "irreducibles_up_to",
    "monic_irreducible_count",
    "factorize",
    "is_smooth",
    "max_factor_degree",
    "lex_least_irreducible",
]

_EXTENSION_TABLE_LIMIT = 1 << 16  # q above this is out of scope


class Field:
    """F_q with q = p^e, interned so equal parameters give the same object.

    Scalar arithmetic works on integer codes.  Prime fields reduce mod p;
    extension fields use exp/log tables over a fixed multiplicative
    generator, built once at construction.  The defining polynomial is the
    least monic irreducible of degree e over F_p (least code), so every run
    constructs the same field.
    """

    _registry: dict = {}

    def __init__(self, p: int, e: int, defining_poly=None, _token=None):
        if _token is not Field._registry:
            raise TypeError("use Field.get(p, e)")
        self.p = p
        self.e = e
        self.q = p**e
        self.defining_poly: Optional[tuple[int, ...]] = defining_poly
        if e > 1:
            self._build_tables()
        self._irr_cache: list[list["Poly"]] = []  # _irr_cache[k-1] = I_k

    @classmethod
    def get(cls, p: int, e: int = 1, defining_poly=None) -> "Field":
        if not is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if e < 1:
            raise ValueError("extension degree must be >= 1")
        if p**e > _EXTENSION_TABLE_LIMIT:
            raise ValueError(f"q = {p}**{e} exceeds the supported bound 2^16")
        key = (p, e, tuple(defining_poly) if defining_poly else None)
        if key not in cls._registry:
            if e == 1:
                fld = cls(p, 1, None, _token=cls._registry)
            else:
                base = cls.get(p, 1)
                if defining_poly is None:
                    mod = _least_irreducible_codes(base, e)
                else:
                    mod = tuple(int(c) % p for c in defining_poly)
                    fpoly = Poly(base, mod)
                    if fpoly.degree != e or not fpoly.is_monic:
                        raise ValueError("defining polynomial must be monic of degree e")
                    if not is_irreducible(fpoly):
                        raise ValueError("defining polynomial is not irreducible over F_p")
                fld = cls(p, e, mod, _token=cls._registry)
            cls._registry[key] = fld
        return cls._registry[key]

    @classmethod
    def of_order(cls, q: int) -> "Field":
        """Field with q elements; q must be a prime power."""
        fi = factor_integer(q)
        if fi.omega != 1:
            raise ValueError(f"q = {q} is not a prime power")
        p, e = fi.prime_powers[0]
        return cls.get(p, e)

    # -- extension-field tables ------------------------------------------

    def _slow_mul(self, a: int, b: int) -> int:
        """Bootstrap multiplication via base-p convolution mod defining_poly."""
        p, e, mod = self.p, self.e, self.defining_poly
        da = _digits(a, p, e)
        db = _digits(b, p, e)
        prod = [0] * (2 * e - 1)
        for i, ai in enumerate(da):
            if ai:
                for j, bj in enumerate(db):
                    prod[i + j] = (prod[i + j] + ai * bj) % p
        for i in range(2 * e - 2, e - 1, -1):
            c = prod[i]
            if c:
                prod[i] = 0
                for j in range(e):
                    prod[i - e + j] = (prod[i - e + j] - c * mod[j]) % p
        return sum(c * p**i for i, c in enumerate(prod[:e]))

    def _build_tables(self):
        q = self.q
        fi = factor_integer(q - 1)
        gen = None
        for cand in range(2, q):
            if all(self._slow_pow(cand, (q - 1) // ell) != 1 for ell in fi.primes):
                gen = cand
                break
        if gen is None:  # q - 1 == 1: F_2 only, handled as prime field
            raise AssertionError("no multiplicative generator found")
        exp = np.zeros(2 * (q - 1), dtype=np.int32)
        log = np.full(q, -1, dtype=np.int64)
        cur = 1
        for i in range(q - 1):
            exp[i] = cur
            log[cur] = i
            cur = self._slow_mul(cur, gen)
        exp[q - 1 :] = exp[: q - 1]
        self._exp = exp
        self._log = log
        self._gen = gen
        if self.p != 2 and q <= 256:
            codes = np.arange(q)
            dig = np.stack(
                [(codes // self.p**i) % self.p for i in range(self.e)]
            )
            summed = ((dig[:, :, None] + dig[:, None, :]) % self.p)
            powers = np.array([self.p**i for i in range(self.e)])
            self._addtab = np.tensordot(powers, summed, axes=(0, 0)).astype(np.int32)
        else:
            self._addtab = None

    def _slow_pow(self, a: int, n: int) -> int:
        r = 1
        while n:
            if n & 1:
                r = self._slow_mul(r, a)
            a = self._slow_mul(a, a)
            n >>= 1
        return r

    # -- scalar arithmetic on codes --------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        if self._addtab is not None:
            return int(self._addtab[a, b])
        p = self.p
        out, shift = 0, 1
        for _ in range(self.e):
            out += ((a + b) % p) * shift
            a //= p
            b //= p
            shift *= p
        return out

    def neg(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        p = self.p
        out, shift = 0, 1
        for _ in range(self.e):
            out += ((-a) % p) * shift
            a //= p
            shift *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return int(self._exp[self._log[a] + self._log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero field element")
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        return int(self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)])

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(a), -n)
        if self.e == 1:
            return pow(a, n, self.p)
        if a == 0:
            return 0 if n else 1
        return int(self._exp[(self._log[a] * n) % (self.q - 1)])

    # -- vectorized arithmetic on numpy code arrays -----------------------

    def vadd(self, a, b):
        if self.e == 1:
            return (a + b) % self.p
        if self.p == 2:
            return np.bitwise_xor(a, b)
        if self._addtab is not None:
            return self._addtab[a, b]
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        pa, pb, shift = np.asarray(a), np.asarray(b), 1
        for _ in range(self.e):
            out += ((pa + pb) % self.p) * shift
            pa, pb = pa // self.p, pb // self.p
            shift *= self.p
        return out

    def vneg(self, a):
        if self.e == 1:
            return (-np.asarray(a)) % self.p
        if self.p == 2:
            return np.asarray(a)
        out = np.zeros(np.asarray(a).shape, dtype=np.int64)
        pa, shift = np.asarray(a), 1
        for _ in range(self.e):
            out += ((-pa) % self.p) * shift
            pa = pa // self.p
            shift *= self.p
        return out

    def vsub(self, a, b):
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b):
        if self.e == 1:
            return (np.asarray(a, dtype=np.int64) * b) % self.p
        a = np.asarray(a)
        b = np.asarray(b)
        out = self._exp[self._log[a] + self._log[b]].astype(np.int64)
        np.copyto(out, 0, where=(a == 0) | (b == 0))
        return out

    def element(self, code: int) -> "FieldElement":
        return FieldElement(self, int(code) % self.q)

    def elements(self) -> Iterator["FieldElement"]:
        return (FieldElement(self, c) for c in range(self.q))

    def __repr__(self):
        if self.e == 1:
            return f"Field(p={self.p})"
        return f"Field(p={self.p}, e={self.e}, q={self.q})"

    def __hash__(self):
        return hash((self.p, self.e, self.defining_poly))

    def __eq__(self, other):
        return self is other


def _digits(code: int, base: int, width: int) -> list[int]:
    out = []
    for _ in range(width):
        out.append(code % base)
        code //= base
    return out


@dataclass(frozen=True)
class FieldElement:
    """A single element of F_q, wrapping its integer code."""

    field: Field
    code: int

    @property
    def rep(self) -> tuple[int, ...]:
        """Power-basis coordinates over F_p, constant coordinate first."""
        return tuple(_digits(self.code, self.field.p, self.field.e))

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.code, other.code))

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.code, other.code))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.code))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.code, other.code))

    def inv(self):
        return FieldElement(self.field, self.field.inv(self.code))

    def __pow__(self, n: int):
        return FieldElement(self.field, self.field.pow(self.code, n))

    def __bool__(self):
        return self.code != 0


# ---------------------------------------------------------------------------
# tuple-level polynomial kernels (coefficients low to high, trimmed)
# ---------------------------------------------------------------------------


def _trim(c: Sequence[int]) -> tuple[int, ...]:
    n = len(c)
    while n and c[n - 1] == 0:
        n -= 1
    return tuple(c[:n])


def _padd(F: Field, a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] = F.add(out[i], x)
    return _trim(out)


def _psub(F: Field, a, b):
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, x in enumerate(b):
        out[i] = F.sub(out[i], x)
    return _trim(out)


def _pmul(F: Field, a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    if F.e == 1:
        p = F.p
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] = (out[i + j] + x * y) % p
    else:
        mul, add = F.mul, F.add
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = add(out[i + j], mul(x, y))
    return _trim(out)


def _pdivmod(F: Field, a, m):
    if not m:
        raise ZeroDivisionError("division by zero polynomial")
    da, dm = len(a) - 1, len(m) - 1
    if da < dm:
        return (), a
    inv_lead = F.inv(m[-1])
    rem = list(a)
    quo = [0] * (da - dm + 1)
    for i in range(da, dm - 1, -1):
        c = rem[i]
        if c:
            c = F.mul(c, inv_lead)
            quo[i - dm] = c
            for j in range(dm + 1):
                rem[i - dm + j] = F.sub(rem[i - dm + j], F.mul(c, m[j]))
    return _trim(quo), _trim(rem)


def _pmod(F: Field, a, m):
    return _pdivmod(F, a, m)[1]


def _pgcd(F: Field, a, b):
    while b:
        a, b = b, _pmod(F, a, b)
    if a:
        inv_lead = F.inv(a[-1])
        if a[-1] != 1:
            a = tuple(F.mul(c, inv_lead) for c in a)
    return a


def _pmulmod(F: Field, a, b, m):
    return _pmod(F, _pmul(F, a, b), m)


def _ppowmod(F: Field, a, n: int, m):
    r = (1,)
    a = _pmod(F, a, m)
    while n:
        if n & 1:
            r = _pmulmod(F, r, a, m)
        n >>= 1
        if n:
            a = _pmulmod(F, a, a, m)
    return r


def _ppow(F: Field, a, n: int):
    r = (1,)
    while n:
        if n & 1:
            r = _pmul(F, r, a)
        n >>= 1
        if n:
            a = _pmul(F, a, a)
    return r


_X = (0, 1)


def _frobenius_iterates(F: Field, m, count: int):
    """Yield x^(q^j) mod m for j = 1..count."""
    h = _ppowmod(F, _X, F.q, m)
    yield h
    for _ in range(count - 1):
        h = _ppowmod(F, h, F.q, m)
        yield h


# ---------------------------------------------------------------------------
# public polynomial type
# ---------------------------------------------------------------------------


class Poly:
    """A polynomial over F_q in canonical form (no trailing zeros)."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: Field, coeffs: Sequence[int]):
        q = field.q
        for c in coeffs:
            if not 0 <= c < q:
                raise ValueError(f"coefficient code {c} out of range for q={q}")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", _trim(tuple(int(c) for c in coeffs)))

    def __setattr__(self, *a):
        raise AttributeError("Poly is immutable")

    # constructors

    @classmethod
    def zero(cls, field: Field) -> "Poly":
        return cls(field, ())

    @classmethod
    def one(cls, field: Field) -> "Poly":
        return cls(field, (1,))

    @classmethod
    def t(cls, field: Field) -> "Poly":
        return cls(field, (0, 1))

    @classmethod
    def from_code(cls, field: Field, code: int) -> "Poly":
        q = field.q
        coeffs = []
        while code:
            coeffs.append(code % q)
            code //= q
        return cls(field, coeffs)

    @classmethod
    def from_string(cls, field: Field, text: str) -> "Poly":
        return _parse_poly(field, text)

    # structure

    @property
    def degree(self) -> Optional[int]:
        """Degree, or None for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else None

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def code(self) -> int:
        out = 0
        for c in reversed(self.coeffs):
            out = out * self.field.q + c
        return out

    def coefficient_elements(self) -> tuple[FieldElement, ...]:
        return tuple(FieldElement(self.field, c) for c in self.coeffs)

    def leading_coefficient(self) -> FieldElement:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return FieldElement(self.field, self.coeffs[-1])

    # arithmetic

    def _wrap(self, coeffs) -> "Poly":
        p = object.__new__(Poly)
        object.__setattr__(p, "field", self.field)
        object.__setattr__(p, "coeffs", coeffs)
        return p

    def __add__(self, other: "Poly") -> "Poly":
        return self._wrap(_padd(self.field, self.coeffs, other.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self._wrap(_psub(self.field, self.coeffs, other.coeffs))

    def __neg__(self) -> "Poly":
        return self._wrap(tuple(self.field.neg(c) for c in self.coeffs))

    def __mul__(self, other: "Poly") -> "Poly":
        return self._wrap(_pmul(self.field, self.coeffs, other.coeffs))

    def __pow__(self, n: int) -> "Poly":
        return self._wrap(_ppow(self.field, self.coeffs, n))

    def __divmod__(self, other: "Poly"):
        q, r = _pdivmod(self.field, self.coeffs, other.coeffs)
        return self._wrap(q), self._wrap(r)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self._wrap(_pmod(self.field, self.coeffs, other.coeffs))

    def gcd(self, other: "Poly") -> "Poly":
        return self._wrap(_pgcd(self.field, self.coeffs, other.coeffs))

    def monic(self) -> "Poly":
        if self.is_zero or self.is_monic:
            return self
        inv = self.field.inv(self.coeffs[-1])
        return self._wrap(tuple(self.field.mul(c, inv) for c in self.coeffs))

    def derivative(self) -> "Poly":
        F = self.field
        out = [F.mul(c, i % F.p) for i, c in enumerate(self.coeffs) if i >= 1]
        # i mod p is an F_p scalar; scalar codes 0..p-1 embed as field codes
        return self._wrap(_trim(out))

    def evaluate(self, x: int) -> int:
        """Evaluate at the field element with code x (Horner)."""
        F = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, x), c)
        return acc

    def powmod(self, n: int, modulus: "Poly") -> "Poly":
        return self._wrap(_ppowmod(self.field, self.coeffs, n, modulus.coeffs))

    # comparisons, hashing, rendering

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.field is other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((id(self.field), self.coeffs))

    def __lt__(self, other: "Poly"):
        return self.code() < other.code()

    def __str__(self):
        return _poly_to_str(self)

    def __repr__(self):
        return f"Poly(q={self.field.q}, {_poly_to_str(self)!r})"


def _poly_to_str(f: Poly) -> str:
    if f.is_zero:
        return "0"
    terms = []
    for i in range(len(f.coeffs) - 1, -1, -1):
        c = f.coeffs[i]
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
        else:
            var = "t" if i == 1 else f"t^{i}"
            terms.append(var if c == 1 else f"{c}*{var}")
    return "+".join(terms)


def _parse_poly(field: Field, text: str) -> Poly:
    """Parse either "1,1,0,1" (codes, low to high) or human form "t^3+t+1"."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty polynomial text")
    if "," in s or s.lstrip("-").isdigit():
        codes = [int(tok) % field.q for tok in s.split(",")]
        return Poly(field, codes)
    coeffs: dict[int, int] = {}
    s = s.replace("-", "+-")
    for term in s.split("+"):
        if not term:
            continue
        neg = term.startswith("-")
        if neg:
            term = term[1:]
        if "t" in term:
            head, _, tail = term.partition("t")
            coef = int(head.rstrip("*")) if head else 1
            power = int(tail[1:]) if tail.startswith("^") else (1 if not tail else None)
            if power is None:
                raise ValueError(f"cannot parse term {term!r}")
        else:
            coef = int(term)
            power = 0
        coef %= field.q
        if neg:
            coef = field.neg(coef)
        coeffs[power] = field.add(coeffs.get(power, 0), coef)
    width = max(coeffs) + 1 if coeffs else 0
    return Poly(field, [coeffs.get(i, 0) for i in range(width)])


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def poly_mul_mod(a: Poly, b: Poly, m: Poly) -> Poly:
    """a*b reduced mod m; m must be nonconstant."""
    if m.is_zero:
        raise ZeroDivisionError("zero modulus")
    if m.degree < 1:
        raise ValueError("modulus must have degree >= 1")
    return (a * b) % m


def monic_code_range(field: Field, d: int) -> range:
    """Codes of all monic polynomials of degree exactly d, in stream order."""
    if d < 0:
        raise ValueError("degree must be >= 0")
    return range(field.q**d, 2 * field.q**d)


def enumerate_monic(field: Field, d: int, start: int = 0, stop: Optional[int] = None) -> Iterator[Poly]:
    """Stream the q^d monic polynomials of degree exactly d.

    Lexicographic in the coefficient vector with the constant term varying
    fastest; start/stop index into [0, q^d) so workers can partition the
    stream and resume it.
    """
    r = monic_code_range(field, d)
    lo = r.start + start
    hi = r.stop if stop is None else r.start + stop
    for code in range(lo, hi):
        yield Poly.from_code(field, code)


def monic_irreducible_count(q: int, k: int) -> int:
    """pi_k by the necklace formula (1/k) sum_{e|k} mu(e) q^(k/e)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    total = 0
    for e in range(1, k + 1):
        if k % e == 0:
            total += mobius_small(e) * q ** (k // e)
    assert total % k == 0
    return total // k


@lru_cache(maxsize=None)
def mobius_small(n: int) -> int:
    """Mobius for small machine ints (divisor lattice work)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    res, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            res = -res
        p += 1
    if m > 1:
        res = -res
    return res


def is_irreducible(f: Poly) -> bool:
    """Frobenius-based irreducibility test for monic f of degree >= 1.

    Checks x^(q^d) = x mod f together with gcd(x^(q^(d/l)) - x, f) = 1 for
    every prime l dividing d.
    """
    if not f.is_monic:
        raise ValueError("is_irreducible requires a monic polynomial")
    d = f.degree
    if d is None or d < 1:
        raise ValueError("is_irreducible requires degree >= 1")
    if d == 1:
        return True
    F = f.field
    m = f.coeffs
    need = {d // ell for ell in factor_integer(d).primes}
    h = None
    for j, hj in enumerate(_frobenius_iterates(F, m, d), start=1):
        if j in need:
            g = _pgcd(F, _psub(F, hj, _X), m)
            if g != (1,):
                return False
        if j == d:
            h = hj
    return h == _X


def _least_irreducible_codes(field: Field, d: int) -> tuple[int, ...]:
    for code in monic_code_range(field, d):
        f = Poly.from_code(field, code)
        if is_irreducible(f):
            return f.coeffs
    raise AssertionError("no irreducible found")  # impossible: pi_d > 0


def lex_least_irreducible(field: Field, d: int) -> Poly:
    """The least-code monic irreducible of degree d (deterministic pick)."""
    return Poly(field, _least_irreducible_codes(field, d))


_BATCH_ENUM_LIMIT = 4 * 10**6


def irreducibles_up_to(field: Field, r: int) -> list[list[Poly]]:
    """[I_1, ..., I_r]: all monic irreducibles by degree, each list in code order.

    Degrees with q^k within the batch budget come from the vectorized
    max-factor-degree profile (irreducible iff the profile equals k); larger
    degrees fall back to an early-exit distinct-degree screen.  Every |I_k|
    is cross-checked against the necklace formula.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    cache = field._irr_cache
    for k in range(len(cache) + 1, r + 1):
        q = field.q
        if k == 1:
            found = [Poly.from_code(field, c) for c in monic_code_range(field, 1)]
        elif q**k <= _BATCH_ENUM_LIMIT:
            from .vecpoly import max_factor_degree_profile

            profile = max_factor_degree_profile(field, k)
            base = q**k
            found = [Poly.from_code(field, base + int(j)) for j in np.nonzero(profile == k)[0]]
        else:
            found = []
            for code in monic_code_range(field, k):
                coeffs = _decode(field, code, k)
                if _ddf_screen_irreducible(field, coeffs, k):
                    found.append(Poly(field, coeffs))
        expected = monic_irreducible_count(field.q, k)
        if len(found) != expected:
            raise AssertionError(
                f"irreducible screen found {len(found)} of degree {k}, necklace formula says {expected}"
            )
        cache.append(found)
    return [list(cache[k - 1]) for k in range(1, r + 1)]


def _decode(field: Field, code: int, degree: int) -> tuple[int, ...]:
    q = field.q
    out = []
    for _ in range(degree + 1):
        out.append(code % q)
        code //= q
    return tuple(out)


def _ddf_screen_irreducible(F: Field, m: tuple[int, ...], k: int) -> bool:
    """True iff m (monic, degree k >= 2) has no factor of degree <= k // 2."""
    h = _ppowmod(F, _X, F.q, m)
    for _ in range(k // 2):
        if _pgcd(F, _psub(F, h, _X), m) != (1,):
            return False
        h = _ppowmod(F, h, F.q, m)
    return True


# ---------------------------------------------------------------------------
# factorization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Factorization:
    """Multiset of monic irreducible factors with multiplicities, plus the unit."""

    factors: tuple[tuple[Poly, int], ...]  # sorted by (degree, code)
    unit: FieldElement

    def product(self) -> Poly:
        field = self.unit.field
        out = Poly(field, (self.unit.code,))
        for f, mult in self.factors:
            out = out * f**mult
        return out

    def max_factor_degree(self) -> int:
        """0 for constants."""
        return max((f.degree for f, _ in self.factors), default=0)


def factorize(f: Poly) -> Factorization:
    """Complete factorization into monic irreducibles; rejects the zero polynomial."""
    if f.is_zero:
        raise ValueError("cannot factor the zero polynomial")
    F = f.field
    unit = f.coeffs[-1]
    work = f.monic().coeffs
    raw = _factor_monic(F, work)
    polys = sorted(((Poly(F, c), m) for c, m in raw.items()), key=lambda t: (t[0].degree, t[0].code()))
    return Factorization(tuple(polys), FieldElement(F, unit))


def _factor_monic(F: Field, m: tuple[int, ...]) -> dict[tuple[int, ...], int]:
    out: dict[tuple[int, ...], int] = {}
    stack: list[tuple[tuple[int, ...], int]] = [(m, 1)]
    while stack:
        g, mult = stack.pop()
        dg = len(g) - 1
        if dg == 0:
            continue
        if dg == 1:
            out[g] = out.get(g, 0) + mult
            continue
        der = _derivative(F, g)
        if not der:
            root = _pth_root(F, g)
            stack.append((root, mult * F.p))
            continue
        gc = _pgcd(F, g, der)
        if len(gc) - 1 > 0:
            quo, rem = _pdivmod(F, g, gc)
            assert not rem
            stack.append((gc, mult))
            stack.append((quo, mult))
            continue
        for irr, cnt in _factor_squarefree(F, g).items():
            out[irr] = out.get(irr, 0) + cnt * mult
    return out


def _derivative(F: Field, g):
    out = [F.mul(c, i % F.p) for i, c in enumerate(g) if i >= 1]
    return _trim(out)


def _pth_root(F: Field, g):
    """For g with g' = 0: g = h(x^p)^... actually g = (p-th root)(x)^p; return that root."""
    p, e, q = F.p, F.e, F.q
    root = []
    for i in range(0, len(g), p):
        c = g[i]
        # c^(p^(e-1)) is the p-th root of c in F_q
        root.append(F.pow(c, p ** (e - 1)) if e > 1 else c)
    return _trim(root)


def _factor_squarefree(F: Field, m) -> dict[tuple[int, ...], int]:
    """Distinct-degree then equal-degree splitting of squarefree monic m."""
    out: dict[tuple[int, ...], int] = {}
    rem = m
    k = 0
    h = _X
    while len(rem) - 1 > 0:
        k += 1
        if 2 * k > len(rem) - 1:
            out[rem] = 1
            break
        h = _ppowmod(F, h, F.q, rem)
        g = _pgcd(F, _psub(F, h, _X), rem)
        if len(g) - 1 > 0:
            for irr in _equal_degree_split(F, g, k):
                out[irr] = 1
            quo, r0 = _pdivmod(F, rem, g)
            assert not r0
            rem = quo
            h = _pmod(F, h, rem)
    return out


def _equal_degree_split(F: Field, g, k: int) -> list[tuple[int, ...]]:
    """Split squarefree g (all factors of degree k) into its irreducibles.

    Deterministic: splitting candidates are enumerated in code order, so
    factorizations are reproducible run to run.
    """
    parts = [g]
    done: list[tuple[int, ...]] = []
    q = F.q
    while parts:
        m = parts.pop()
        dm = len(m) - 1
        if dm == k:
            done.append(m)
            continue
        split = None
        for cand_code in itertools.count(q):  # degree >= 1 candidates
            c = _decode_any(F, cand_code)
            if F.p == 2:
                tr = _trace_map(F, c, m, k)
            else:
                tr = _psub(F, _ppowmod(F, c, (q**k - 1) // 2, m), (1,))
            gcd = _pgcd(F, tr, m)
            if 0 < len(gcd) - 1 < dm:
                split = gcd
                break
        quo, r0 = _pdivmod(F, m, split)
        assert not r0
        parts.append(split)
        parts.append(quo)
    return done


def _decode_any(F: Field, code: int) -> tuple[int, ...]:
    q = F.q
    out = []
    while code:
        out.append(code % q)
        code //= q
    return tuple(out)


def _trace_map(F: Field, c, m, k: int):
    """Absolute trace sum c + c^2 + ... + c^(2^(k*e - 1)) mod m (char 2 splitter)."""
    total = _pmod(F, c, m)
    cur = total
    for _ in range(k * F.e - 1):
        cur = _pmulmod(F, cur, cur, m)
        total = _padd(F, total, cur)
    return total


def max_factor_degree(f: Poly) -> int:
    """Largest degree among the irreducible factors of nonzero f (0 for constants)."""
    return factorize(f).max_factor_degree()


def is_smooth(f: Poly, r: int) -> bool:
    """True iff every irreducible factor of monic nonzero f has degree <= r."""
    if f.is_zero:
        raise ValueError("is_smooth requires a nonzero polynomial")
    if not f.is_monic:
        raise ValueError("is_smooth requires a monic polynomial")
    return max_factor_degree(f) <= r
