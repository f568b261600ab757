"""Tests for class groups, cusp counts and growth statistics."""

import math
import random

import pytest

from bianchivoronoi.arith import (
    ArithmeticGuard,
    CohomologySplit,
    class_group,
    cusp_dimension,
    euler_phi,
    factorize,
    growth_stats,
    reduce_form,
    reduced_forms,
    rohlfs_lower_bound,
    torsion_order,
)
from bianchivoronoi.qfield import is_fundamental

FUNDAMENTAL_TO_500 = [D for D in range(-3, -501, -1) if is_fundamental(D)]


def kronecker(a, n):
    """Kronecker symbol (a / n), textbook recursion."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    k = 1
    if n < 0:
        n = -n
        if a < 0:
            k = -1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            k = -k
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                k = -k
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            k = -k
        a %= n
    return k if n == 1 else 0


def dirichlet_class_number(D):
    """h(D) from the analytic class number formula, exact for D < 0."""
    w = 6 if D == -3 else 4 if D == -4 else 2
    s = sum(kronecker(D, a) * a for a in range(1, -D))
    h = w * abs(s) // (2 * (-D))
    assert w * abs(s) % (2 * (-D)) == 0
    return h


def transform(form, g):
    """Act on a binary quadratic form by an integer matrix ((p, q), (r, s))."""
    a, b, c = form
    (p, q), (r, s) = g
    a2 = a * p * p + b * p * r + c * r * r
    c2 = a * q * q + b * q * s + c * s * s
    b2 = 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s
    return (a2, b2, c2)


def random_sl2z(rng, steps=8):
    m = [[1, 0], [0, 1]]
    for _ in range(steps):
        k = rng.randint(-3, 3)
        if rng.random() < 0.5:
            m = [[m[0][0] + k * m[1][0], m[0][1] + k * m[1][1]], m[1]]
        else:
            m = [m[0], [m[1][0] + k * m[0][0], m[1][1] + k * m[0][1]]]
    return ((m[0][0], m[0][1]), (m[1][0], m[1][1]))


class TestKroneckerOracle:
    def test_chi_minus_four(self):
        assert [kronecker(-4, a) for a in range(1, 5)] == [1, 0, -1, 0]

    def test_chi_minus_three(self):
        assert [kronecker(-3, a) for a in range(1, 4)] == [1, -1, 0]

    def test_chi_minus_seven(self):
        assert [kronecker(-7, a) for a in range(1, 8)] == [1, 1, -1, 1, -1, -1, 0]


class TestEulerPhi:
    def test_brute_force(self):
        for n in range(1, 200):
            brute = sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)
            assert euler_phi(n) == brute

    def test_factorize_round_trip(self):
        rng = random.Random(3)
        for _ in range(60):
            n = rng.randint(1, 10 ** 6)
            prod = 1
            for p, e in factorize(n).items():
                assert all(p % q for q in range(2, min(p, 1000)) if q * q <= p)
                prod *= p ** e
            assert prod == n


class TestReducedForms:
    def test_discriminants_and_reduction_conditions(self):
        for D in FUNDAMENTAL_TO_500[:40]:
            for a, b, c in reduced_forms(D):
                assert b * b - 4 * a * c == D
                assert -a < b <= a <= c
                if a == c or b == a:
                    assert b >= 0

    def test_counts_match_dirichlet_formula(self):
        for D in FUNDAMENTAL_TO_500:
            assert len(reduced_forms(D)) == dirichlet_class_number(D)

    def test_reduce_form_round_trip(self):
        rng = random.Random(9)
        for D in (-23, -84, -231, -487):
            forms = reduced_forms(D)
            for _ in range(40):
                f = rng.choice(forms)
                g = random_sl2z(rng)
                assert reduce_form(transform(f, g)) == f

    def test_reduce_form_idempotent(self):
        for D in (-40, -107):
            for f in reduced_forms(D):
                assert reduce_form(f) == f


class TestClassGroup:
    def test_known_structures(self):
        known = {
            -3: (), -4: (), -15: (2,), -23: (3,), -40: (2,),
            -84: (2, 2), -107: (3,), -120: (2, 2), -231: (2, 6),
            -296: (10,), -359: (19,), -487: (7,), -599: (25,),
            -1007: (30,), -1247: (26,),
        }
        for D, invs in known.items():
            cg = class_group(D)
            assert cg.elementary_divisors == invs
            assert cg.h == torsion_order(invs)

    def test_group_axioms_random(self):
        rng = random.Random(21)
        for D in (-47, -84, -231):
            cg = class_group(D)
            ident = cg.identity()
            for _ in range(25):
                f, g, k = (rng.choice(cg.forms) for _ in range(3))
                assert cg.compose(f, g) == cg.compose(g, f)
                assert cg.compose(cg.compose(f, g), k) == cg.compose(f, cg.compose(g, k))
                inv = reduce_form((f[0], -f[1], f[2]))
                assert cg.compose(f, inv) == ident

    def test_lagrange_and_exponent(self):
        for D in FUNDAMENTAL_TO_500[:30]:
            cg = class_group(D)
            ident = cg.identity()
            exponent = cg.elementary_divisors[-1] if cg.elementary_divisors else 1
            for f in cg.forms:
                assert cg.power(f, exponent) == ident

    def test_two_torsion_matches_genus_theory(self):
        # number of classes killed by 2 equals 2**(t-1) for t prime divisors of D
        for D in FUNDAMENTAL_TO_500[:40]:
            cg = class_group(D)
            ident = cg.identity()
            killed = sum(1 for f in cg.forms if cg.compose(f, f) == ident)
            t = len(factorize(-D))
            assert killed == 2 ** (t - 1)

    def test_element_counts_per_invariant(self):
        for D in (-84, -231, -420):
            cg = class_group(D)
            ident = cg.identity()
            for d in cg.elementary_divisors:
                killed = sum(1 for f in cg.forms if cg.power(f, d) == ident)
                expected = 1
                for e in cg.elementary_divisors:
                    expected *= math.gcd(e, d)
                assert killed == expected


class FakeHomology:
    def __init__(self, betti, torsion=None):
        self.betti = betti
        self.torsion = torsion or {1: (), 2: (), 3: ()}


class FakeClassGroup:
    def __init__(self, h):
        self.h = h


class TestCuspDimension:
    def test_gl_split(self):
        split = cusp_dimension(FakeHomology({1: 6, 2: 1}), FakeClassGroup(6), "gl", -87)
        assert (split.cusp_dim, split.eis_dim_H1, split.eis_dim_H2) == (1, 0, 5)

    def test_sl_split(self):
        split = cusp_dimension(FakeHomology({1: 2, 2: 3}), FakeClassGroup(2), "sl", -35)
        assert (split.cusp_dim, split.eis_dim_H1, split.eis_dim_H2) == (1, 2, 1)

    def test_sl_special_units(self):
        split = cusp_dimension(FakeHomology({1: 0, 2: 0}), FakeClassGroup(1), "sl", -3)
        assert (split.cusp_dim, split.eis_dim_H1) == (0, 0)

    def test_inconsistent_betti_two_raises(self):
        with pytest.raises(ArithmeticGuard):
            cusp_dimension(FakeHomology({1: 6, 2: 2}), FakeClassGroup(6), "gl", -87)

    def test_negative_cusp_raises(self):
        with pytest.raises(ArithmeticGuard):
            cusp_dimension(FakeHomology({1: 6, 2: 0}), FakeClassGroup(9), "gl", -87)


class TestRohlfsBound:
    def test_hand_computed_values(self):
        # phi(107) = 106, odd divisor sum 1, h = 3, one prime:
        # ceil((106 + 2 - 36 - 24 + 16) / 24) = ceil(64/24) = 3
        assert rohlfs_lower_bound(-107, 3) == 3
        # phi(35) = 24, odd divisor sum 35 - 24 = 11, h = 2, two primes:
        # ceil((24 + 22 - 24 - 48 + 16) / 24) = ceil(-10/24) = 0
        assert rohlfs_lower_bound(-35, 2) == 0
        # phi(231) = 120, odd divisor sum 111, h = 12, three primes:
        # ceil((120 + 222 - 144 - 96 + 16) / 24) = ceil(118/24) = 5
        assert rohlfs_lower_bound(-231, 12) == 5
        # phi(599) = 598, h = 25, one prime:
        # ceil((598 + 2 - 300 - 24 + 16) / 24) = ceil(292/24) = 13
        assert rohlfs_lower_bound(-599, 25) == 13

    def test_even_discriminants_use_odd_divisors_only(self):
        # phi(40) = 16, odd divisors of 40 below 40 sum phi to 5, h = 2:
        # ceil((16 + 10 - 24 - 48 + 16) / 24) = ceil(-30/24) = -1 -> 0
        assert rohlfs_lower_bound(-40, 2) == 0

    def test_never_negative(self):
        for D in FUNDAMENTAL_TO_500[:50]:
            h = len(reduced_forms(D))
            assert rohlfs_lower_bound(D, h) >= 0


class TestGrowthStats:
    def test_torsion_order(self):
        assert torsion_order(()) == 1
        assert torsion_order((2, 6)) == 12

    def test_logtor_exponents(self):
        hres = FakeHomology({1: 0, 2: 0}, {1: (2,), 2: (), 3: ()})
        assert growth_stats(hres, "gl", -10).logtor == pytest.approx(math.log(2) / 100.0)
        hres = FakeHomology({1: 0, 2: 0}, {1: (3,), 2: (), 3: ()})
        assert growth_stats(hres, "sl", -4).logtor == pytest.approx(math.log(3) / 8.0)

    def test_z_d_counts_all_cyclic_factors(self):
        hres = FakeHomology({1: 3, 2: 0}, {1: (2, 4), 2: (), 3: ()})
        assert growth_stats(hres, "gl", -40).z_d == 5

    def test_rohlfs_gap_only_for_sl(self):
        hres = FakeHomology({1: 2, 2: 3}, {1: (), 2: (), 3: ()})
        split = CohomologySplit(1, 2, 1)
        cg = FakeClassGroup(2)
        assert growth_stats(hres, "gl", -35, split=split, cg=cg).rohlfs_gap is None
        # cusp_dim 1 minus the bound 0 at D = -35
        assert growth_stats(hres, "sl", -35, split=split, cg=cg).rohlfs_gap == 1
