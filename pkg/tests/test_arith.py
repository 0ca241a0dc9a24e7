import cmath
import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cuspmoment.arith import (
    additive_twist,
    divisor_sigma,
    factorize,
    kloosterman,
    mobius,
    mod_inverse,
    mod_inverse_array,
    num_divisors,
    sigma,
)
from cuspmoment.errors import DomainError


class TestModInverse:
    @pytest.mark.parametrize("c", [2, 3, 10, 97])
    def test_one_is_self_inverse(self, c):
        assert mod_inverse(1, c) == 1

    def test_small_case(self):
        assert mod_inverse(3, 7) == 5

    def test_modulus_one(self):
        assert mod_inverse(5, 1) == 0

    def test_not_coprime(self):
        with pytest.raises(DomainError):
            mod_inverse(2, 4)

    def test_exhaustive_small_moduli(self):
        for c in range(2, 400):
            for n in range(1, c):
                if math.gcd(n, c) == 1:
                    assert n * mod_inverse(n, c) % c == 1

    @settings(max_examples=300)
    @given(st.integers(2, 10_000), st.integers(1, 10**9))
    def test_property(self, c, n):
        if math.gcd(n, c) == 1:
            inv = mod_inverse(n, c)
            assert 0 <= inv < c and n * inv % c == 1

    def test_vectorised_matches_scalar(self):
        rng = np.random.default_rng(3)
        c = rng.integers(1, 5000, 2000)
        n = rng.integers(1, 5000, 2000)
        keep = np.gcd(c, n) == 1
        c, n = c[keep], n[keep]
        inv = mod_inverse_array(n, c)
        assert all(int(i) == mod_inverse(int(a), int(b)) for i, a, b in zip(inv, n, c))


class TestAdditiveTwist:
    def test_trivial_modulus(self):
        assert additive_twist(3, 5, 1) == 1

    def test_quarter(self):
        assert abs(additive_twist(1, 1, 4) - 1j) < 1e-15

    def test_exact_reduction(self):
        assert abs(additive_twist(5, 3, 7) - cmath.exp(2j * math.pi / 7)) < 1e-15

    def test_huge_l_keeps_precision(self):
        l = 10**18 + 1
        assert abs(additive_twist(1, l, 10**6) - cmath.exp(2j * math.pi / 10**6)) < 1e-15

    @given(st.integers(0, 10**6), st.integers(1, 10**12), st.integers(1, 10**5))
    def test_unit_modulus(self, n_star, l, c):
        assert abs(abs(additive_twist(n_star, l, c)) - 1) <= 1e-15


class TestKloosterman:
    def test_small_values(self):
        assert kloosterman(1, 1, 1) == 1
        assert kloosterman(1, 1, 2) == pytest.approx(1, abs=1e-14)

    def test_weil_bound(self):
        for c in range(1, 501):
            assert abs(kloosterman(1, 1, c)) <= num_divisors(c) * math.sqrt(c) + 1e-9

    def test_symmetry(self):
        for c in range(1, 201):
            for m, n in ((1, 2), (3, 5)):
                assert kloosterman(m, n, c) == pytest.approx(kloosterman(n, m, c), abs=1e-9)

    def test_prime_modulus_ramanujan_sum(self):
        # S(0, 1; p) is a Ramanujan sum equal to mu(p) = -1
        assert kloosterman(0, 1, 13) == pytest.approx(-1, abs=1e-12)


class TestMultiplicative:
    def test_examples(self):
        assert mobius(1) == 1 and sigma(1) == 1
        assert mobius(4) == 0
        assert sigma(6) == 12

    def test_against_sympy(self):
        for m in range(1, 3000):
            assert mobius(m) == int(sympy.mobius(m))
            assert sigma(m) == int(sympy.divisor_sigma(m))
            assert divisor_sigma(m, 3) == int(sympy.divisor_sigma(m, 3))

    def test_factorize_roundtrip(self):
        for m in (1, 2, 360, 9973, 10**7 - 1, 2**20 * 3**5):
            assert math.prod(p**e for p, e in factorize(m)) == m

    def test_multiplicativity_random_pairs(self):
        rng = np.random.default_rng(11)
        checked = 0
        while checked < 1000:
            a, b = (int(v) for v in rng.integers(1, 3000, 2))
            if math.gcd(a, b) != 1:
                continue
            assert mobius(a * b) == mobius(a) * mobius(b)
            assert sigma(a * b) == sigma(a) * sigma(b)
            checked += 1
