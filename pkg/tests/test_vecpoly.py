import numpy as np
import pytest

from ffchar.algebra import Field, Poly, factorize, monic_irreducible_count
from ffchar.vecpoly import (
    max_factor_degree_profile,
    monic_lower_coeffs,
    vadd_poly_codes,
    vec_modmul,
)

F2 = Field.get(2)
F3 = Field.get(3)
F4 = Field.get(2, 2)
F5 = Field.get(5)


@pytest.mark.parametrize("F,d", [(F2, 6), (F3, 4), (F4, 3), (F5, 3)])
def test_profile_matches_scalar_factorize(F, d):
    prof = max_factor_degree_profile(F, d)
    for j in range(F.q**d):
        f = Poly.from_code(F, F.q**d + j)
        assert prof[j] == factorize(f).max_factor_degree()


def test_profile_degree_counts_are_exhaustive():
    for F in (F2, F3, F4):
        for d in range(7):
            prof = max_factor_degree_profile(F, d)
            assert prof.size == F.q**d
            assert int((prof == d).sum()) == (
                monic_irreducible_count(F.q, d) if d >= 1 else 1
            )


def test_vec_modmul_matches_scalar():
    rng = np.random.default_rng(5)
    for F in (F2, F3, F4, F5):
        d = 4
        N = min(50, F.q**d)
        Fm = monic_lower_coeffs(F, d)[:, :N]
        A = rng.integers(0, F.q, size=(d, N))
        B = rng.integers(0, F.q, size=(d, N))
        C = vec_modmul(F, A, B, Fm)
        for j in range(N):
            m = Poly(F, list(Fm[:, j]) + [1])
            a = Poly(F, A[:, j])
            b = Poly(F, B[:, j])
            want = (a * b) % m
            got = Poly(F, C[:, j])
            assert got == want


def test_vadd_poly_codes_matches_poly_add():
    rng = np.random.default_rng(9)
    for F in (F2, F3, F4, F5):
        width = 4
        codes = rng.integers(0, F.q**width, size=64, dtype=np.int64)
        c = int(rng.integers(0, F.q**width))
        out = vadd_poly_codes(F, codes, c, width)
        cp = Poly.from_code(F, c)
        for code, got in zip(codes, out):
            want = (Poly.from_code(F, int(code)) + cp).code()
            assert int(got) == want
