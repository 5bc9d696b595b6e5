"""Exact field arithmetic, dominant-eigenvalue extraction, and kernels."""

import math
import random
from fractions import Fraction

import pytest

from hyptile.algebraic import (
    AlgebraicNumber,
    NumberField,
    nullspace_vector,
    perron_eigenvalue,
    poly_eval,
)


F = Fraction


def golden() -> AlgebraicNumber:
    lam = perron_eigenvalue([[1, 1], [1, 0]])
    assert isinstance(lam, AlgebraicNumber)
    return lam


class TestNumberField:
    def test_rejects_degree_below_two(self):
        with pytest.raises(ValueError):
            NumberField((F(-2), F(1)), F(1), F(3))

    def test_rejects_non_straddling_interval(self):
        with pytest.raises(ValueError):
            NumberField((F(-1), F(-1), F(1)), F(2), F(3))

    def test_refine_narrows_and_keeps_root(self):
        fld = NumberField((F(-1), F(-1), F(1)), F(1), F(2))
        for _ in range(30):
            fld.refine()
        assert fld.hi - fld.lo < F(1, 10**8)
        root = 0.5 * (1 + math.sqrt(5))
        assert fld.lo < F(root).limit_denominator(10**12) < fld.hi

    def test_generator_satisfies_minpoly(self):
        lam = golden()
        assert lam * lam - lam - 1 == 0


class TestFieldArithmetic:
    def test_golden_identities(self):
        lam = golden()
        assert lam * lam == lam + 1
        assert 1 / lam == lam - 1
        assert (2 * lam - 1) * (2 * lam - 1) == 5

    def test_float_value(self):
        assert float(golden()) == pytest.approx((1 + 5**0.5) / 2, abs=1e-12)

    def test_sign_and_order(self):
        lam = golden()
        assert lam.sign() == 1
        assert (lam - 2).sign() == -1
        assert (lam - lam).sign() == 0
        assert 1 < lam < 2
        assert lam > F(8, 5)
        assert lam < F(13, 8)

    def test_fraction_mixing(self):
        lam = golden()
        x = lam / 2 + F(1, 3)
        y = (3 * lam + 2) / 6
        assert x == y

    def test_division_by_zero_element(self):
        lam = golden()
        with pytest.raises(ZeroDivisionError):
            _ = lam / (lam - lam)

    def test_random_ring_identities(self):
        lam = golden()
        rng = random.Random(7)
        for _ in range(40):
            a = F(rng.randint(-9, 9)) + F(rng.randint(-9, 9)) * lam
            b = F(rng.randint(-9, 9)) + F(rng.randint(-9, 9)) * lam
            assert (a + b) * (a - b) == a * a - b * b
            if b != 0:
                assert (a / b) * b == a

    def test_cross_field_mixing_rejected(self):
        lam = golden()
        mu = perron_eigenvalue([[2, 1], [1, 1]])  # x^2 - 3x + 1 root
        with pytest.raises(ValueError):
            _ = lam + mu

    def test_float_agrees_with_resolvent(self):
        # root of x^3 - x - 1 (plastic number), from its companion matrix
        lam = perron_eigenvalue([[0, 0, 1], [1, 0, 1], [0, 1, 0]])
        assert float(lam) == pytest.approx(1.3247179572447460, abs=1e-12)
        assert lam * lam * lam == lam + 1


class TestPerron:
    def test_rational_dominant_root(self):
        assert perron_eigenvalue([[1, 1], [1, 1]]) == F(2)
        assert perron_eigenvalue([[3]]) == F(3)
        assert perron_eigenvalue([[0, 2], [2, 0]]) == F(2)

    def test_tribonacci(self):
        lam = perron_eigenvalue([[1, 1, 1], [1, 0, 0], [0, 1, 0]])
        assert lam * lam * lam == lam * lam + lam + 1
        assert float(lam) == pytest.approx(1.8392867552141612, abs=1e-12)

    def test_reducible_characteristic_poly(self):
        # block diag: rational eigenvalues {3, 1} beat the golden ratio block
        mat = [[3, 0, 0], [0, 1, 1], [0, 1, 0]]
        assert perron_eigenvalue(mat) == F(3)

    def test_irrational_beats_rational(self):
        # block diag: golden ratio (1.618) dominates the rational 1
        mat = [[1, 0, 0], [0, 1, 1], [0, 1, 0]]
        lam = perron_eigenvalue(mat)
        assert isinstance(lam, AlgebraicNumber)
        assert lam * lam == lam + 1

    def test_poly_eval_horner(self):
        assert poly_eval((F(-1), F(-1), F(1)), F(2)) == F(1)


class TestNullspace:
    def test_rational_kernel(self):
        v = nullspace_vector([[F(-1), F(1)], [F(1), F(-1)]])
        assert v[0] == v[1] != 0

    def test_field_kernel_matches_eigenvector(self):
        lam = golden()
        mat = [[1 - lam, 1], [1, 0 - lam]]
        v = nullspace_vector(mat)
        # (M - lam I) v = 0 for M = [[1,1],[1,0]]: v0 = lam * v1
        assert v[0] == lam * v[1]

    def test_trivial_kernel_rejected(self):
        with pytest.raises(ValueError):
            nullspace_vector([[F(1), F(0)], [F(0), F(1)]])

    def test_fat_kernel_rejected(self):
        with pytest.raises(ValueError):
            nullspace_vector([[F(0), F(0)], [F(0), F(0)]])

    def test_mixed_int_entries(self):
        v = nullspace_vector([[-2, 2], [2, -2]])
        assert v[0] == v[1]
