"""Batched fixed-shape polynomial arithmetic over small fields.

All monic polynomials of degree d are processed as one coefficient matrix of
shape (d, N): column j holds the lower coefficients (c_0, ..., c_{d-1}) of
the polynomial with code q^d + j, the leading 1 being implicit.  Residues mod
those moduli use the same (d, N) layout.  Every operation is exact integer
work (mod-p arithmetic or exp/log table gathers), so batch results agree bit
for bit with the scalar kernels in `algebra`.

The payoff is `max_factor_degree_profile`: the largest irreducible-factor
degree of every monic degree-d polynomial in one sweep, which powers both
exhaustive smooth counting and irreducible enumeration.  It relies on the
divisibility characterization: f is k-smooth iff every irreducible factor of
f divides prod_{j<=k} (x^(q^j) - x), iff f divides that product raised to
any power >= deg f.
"""

from __future__ import annotations

import math

import numpy as np

from .algebra import Field

__all__ = [
    "monic_lower_coeffs",
    "vec_modmul",
    "vec_pow_q_mod",
    "max_factor_degree_profile",
    "vadd_poly_codes",
]


def monic_lower_coeffs(field: Field, d: int, start: int = 0, stop=None) -> np.ndarray:
    """(d, N) matrix of lower coefficients of monic degree-d polys, code order."""
    q = field.q
    if stop is None:
        stop = q**d
    offsets = np.arange(start, stop, dtype=np.int64)
    out = np.empty((d, offsets.size), dtype=np.int64)
    rem = offsets
    for i in range(d):
        out[i] = rem % q
        rem = rem // q
    return out


def _conv_modp(p: int, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    da, db = A.shape[0], B.shape[0]
    C = np.zeros((da + db - 1, A.shape[1]), dtype=np.int64)
    for i in range(da):
        Ai = A[i]
        for j in range(db):
            C[i + j] += Ai * B[j]
    C %= p
    return C


def _conv_table(field: Field, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    da, db = A.shape[0], B.shape[0]
    C = np.zeros((da + db - 1, A.shape[1]), dtype=np.int64)
    for i in range(da):
        Ai = A[i]
        for j in range(db):
            C[i + j] = field.vadd(C[i + j], field.vmul(Ai, B[j]))
    return C


def vec_modmul(field: Field, A: np.ndarray, B: np.ndarray, F: np.ndarray) -> np.ndarray:
    """A*B mod (x^d + F) columnwise; A, B, F all of shape (d, N)."""
    d = F.shape[0]
    C = _conv_modp(field.p, A, B) if field.e == 1 else _conv_table(field, A, B)
    for i in range(2 * d - 2, d - 1, -1):
        c = C[i]
        # x^i = x^(i-d) * (-F) mod modulus
        red = field.vmul(c, F)  # (d, N) row-broadcast of c against F rows
        for j in range(d):
            C[i - d + j] = field.vsub(C[i - d + j], red[j])
    return C[:d]


def vec_pow_q_mod(field: Field, H: np.ndarray, F: np.ndarray) -> np.ndarray:
    """H^q mod (x^d + F) by square-and-multiply on the bits of q."""
    q = field.q
    bits = bin(q)[3:]  # q >= 2, leading bit consumed by initializing with H
    R = H
    for b in bits:
        R = vec_modmul(field, R, R, F)
        if b == "1":
            R = vec_modmul(field, R, H, F)
    return R


def max_factor_degree_profile(field: Field, d: int) -> np.ndarray:
    """Largest irreducible-factor degree of every monic degree-d poly.

    Returns an int8 array of length q^d in code order (entry j describes the
    polynomial with code q^d + j).  Exhaustive and exact; the inner loop
    discards columns as soon as their maximal factor degree is known.
    """
    q = field.q
    if d < 0:
        raise ValueError("degree must be >= 0")
    if d == 0:
        return np.zeros(1, dtype=np.int8)
    if d == 1:
        return np.ones(q, dtype=np.int8)
    N = q**d
    F = monic_lower_coeffs(field, d)
    out = np.zeros(N, dtype=np.int8)
    alive = np.arange(N, dtype=np.int64)
    H = np.zeros((d, N), dtype=np.int64)
    H[1] = 1  # the polynomial x
    CUM = np.zeros((d, N), dtype=np.int64)
    CUM[0] = 1
    squarings = max(1, math.ceil(math.log2(d)))  # 2^squarings >= d
    for k in range(1, d + 1):
        H = vec_pow_q_mod(field, H, F)
        HX = H.copy()
        HX[1] = field.vsub(HX[1], np.int64(1))
        CUM = vec_modmul(field, CUM, HX, F)
        P = CUM
        for _ in range(squarings):
            P = vec_modmul(field, P, P, F)
        done = ~P.any(axis=0)
        if done.any():
            out[alive[done]] = k
            keep = ~done
            alive = alive[keep]
            F = F[:, keep]
            H = H[:, keep]
            CUM = CUM[:, keep]
        if alive.size == 0:
            break
    assert alive.size == 0, "every polynomial has a maximal factor degree <= d"
    return out


def vadd_poly_codes(field: Field, codes: np.ndarray, c: int, width: int) -> np.ndarray:
    """Coefficientwise sum of the polynomial with code c and each code in codes.

    width bounds the number of base-q coefficient slots touched.  For
    characteristic 2 this is a plain xor; otherwise base-p digits are added
    mod p.
    """
    if field.p == 2:
        return np.bitwise_xor(codes, c)
    p = field.p
    ndig = width * field.e
    out = np.zeros_like(codes)
    rem = codes
    cc = c
    shift = 1
    for _ in range(ndig):
        out += ((rem % p + cc % p) % p) * shift
        rem = rem // p
        cc //= p
        shift *= p
    return out
