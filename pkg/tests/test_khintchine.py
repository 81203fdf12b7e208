import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pytest import approx

from cubeharmonic.khintchine import (
    best_ratio_even,
    best_ratio_low,
    compositions,
    enumerated_moment,
    even_moment,
    even_moment_gradient,
    even_moments,
    gaussian_dominant,
    holder_reverse_constant,
    khintchine_p4_closed_form,
)

from conftest import cube_points


def brute_moment(a, power):
    """Average of (sum a_j x_j)^power over explicitly listed points."""
    pts = cube_points(len(a))
    return sum(sum(aj * xj for aj, xj in zip(a, x)) ** power for x in pts) / len(pts)


class TestCompositions:
    def test_count(self):
        got = list(compositions(3, 4))
        assert len(got) == math.comb(3 + 4 - 1, 4 - 1)
        assert len(set(got)) == len(got)
        assert all(sum(c) == 3 and len(c) == 4 for c in got)

    def test_single_part(self):
        assert list(compositions(5, 1)) == [(5,)]


class TestEvenMoment:
    @pytest.mark.parametrize("s", [1, 2, 3, 6])
    def test_single_coordinate(self, s):
        assert even_moment([1.7], s) == approx(1.7 ** (2 * s), rel=1e-14)

    def test_pair(self):
        assert brute_moment([1, 1], 4) == 8
        assert even_moment([1, 1], 2) == 8

    def test_triple(self):
        assert brute_moment([1, 1, 1], 4) == 21
        assert even_moment([1, 1, 1], 2) == 21

    @pytest.mark.parametrize("s", [1, 2, 3, 4])
    def test_against_enumeration(self, rng, s):
        for ell in (1, 3, 6, 9, 12):
            a = rng.standard_normal(ell)
            ref = enumerated_moment(a, 2 * s)
            assert even_moment(a, s) == approx(ref, rel=1e-10)

    def test_enumeration_helper_matches_brute(self, rng):
        a = rng.standard_normal(5)
        assert enumerated_moment(a, 6) == approx(brute_moment(list(a), 6), rel=1e-12)

    def test_symmetries(self, rng):
        a = rng.standard_normal(7)
        base = even_moment(a, 3)
        for perm in itertools.islice(itertools.permutations(range(7)), 0, 5000, 997):
            assert even_moment(a[list(perm)], 3) == approx(base, rel=1e-13)
        flips = rng.choice([-1.0, 1.0], size=7)
        assert even_moment(a * flips, 3) == approx(base, rel=1e-13)

    def test_rejects(self):
        with pytest.raises(ValueError):
            even_moment([1.0], 0)
        with pytest.raises(ValueError):
            even_moment(np.ones(17), 2)
        with pytest.raises(ValueError):
            even_moment([1.0], 7)
        with pytest.raises(ValueError):
            even_moment([], 2)

    def test_batched_matches_single(self, rng):
        a = rng.standard_normal((20, 5))
        got = even_moments(a, 3)
        assert np.allclose(got, [even_moment(row, 3) for row in a], rtol=1e-14, atol=0)

    def test_gradient_finite_difference(self, rng):
        a = rng.standard_normal(6)
        g = even_moment_gradient(a, 3)
        h = 1e-6
        for i in range(6):
            e = np.zeros(6)
            e[i] = h
            fd = (even_moment(a + e, 3) - even_moment(a - e, 3)) / (2 * h)
            assert g[i] == approx(fd, rel=1e-6, abs=1e-8)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(-50, 50), min_size=1, max_size=12))
    def test_p4_bound(self, a):
        s2 = sum(x * x for x in a)
        assert even_moment(a, 2) <= 3 * s2 * s2 * (1 + 1e-12) + 1e-300

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-10, 10), min_size=1, max_size=10), st.integers(1, 4))
    def test_gaussian_domination(self, a, s):
        s2 = sum(x * x for x in a)
        assert even_moment(a, s) <= gaussian_dominant(s) * s2**s * (1 + 1e-12) + 1e-300

    def test_p4_formula(self, rng):
        a = rng.standard_normal(8)
        s2 = np.sum(a**2)
        assert even_moment(a, 2) == approx(3 * s2**2 - 2 * np.sum(a**4), rel=1e-13)


def grid_ratio_even_two():
    """Max over the coefficient circle of (E f^4)^(1/4) / ||f||_2 for ell = 2."""
    best = 0.0
    for t in np.linspace(0, np.pi / 2, 20001):
        a = [math.cos(t), math.sin(t)]
        best = max(best, brute_moment(a, 4) ** 0.25)
    return best


class TestBestRatioEven:
    def test_ell_one(self):
        assert best_ratio_even(1, 2).ratio == approx(1.0, abs=1e-12)

    def test_ell_two_against_grid(self):
        res = best_ratio_even(2, 2)
        assert grid_ratio_even_two() == approx(2**0.25, abs=1e-8)
        assert res.ratio == approx(2**0.25, abs=1e-9)
        assert np.allclose(np.abs(res.vector), [2**-0.5, 2**-0.5], atol=1e-6)

    def test_ell_ten(self):
        ratio, vec = best_ratio_even(10, 2, seed=1)
        assert ratio == approx(2.8**0.25, abs=1e-9)
        assert ratio == approx(1.293569, abs=1e-6)

    @pytest.mark.parametrize("ell", range(2, 13))
    def test_closed_form_p4(self, ell):
        r = best_ratio_even(ell, 2, restarts=8)
        assert r.ratio**4 + 2 / ell == approx(3.0, abs=1e-6)
        assert r.ratio == approx(khintchine_p4_closed_form(ell), abs=1e-9)

    def test_higher_moment_not_below_structured(self):
        # all-equal vector is one of the starts, so the search can only improve on it
        ell = 5
        r = best_ratio_even(ell, 3, restarts=4)
        flat = enumerated_moment(np.ones(ell) / math.sqrt(ell), 6) ** (1 / 6)
        assert r.ratio >= flat - 1e-12
        assert r.ratio == approx(enumerated_moment(r.vector, 6) ** (1 / 6), rel=1e-12)

    def test_deterministic(self):
        a = best_ratio_even(6, 3, restarts=4, seed=9)
        b = best_ratio_even(6, 3, restarts=4, seed=9)
        assert a.ratio == b.ratio and np.array_equal(a.vector, b.vector)


class TestBestRatioLow:
    @pytest.mark.parametrize("q", [0.5, 1.0, 1.5])
    def test_ell_one(self, q):
        assert best_ratio_low(1, q).ratio == approx(1.0, abs=1e-12)

    def test_ell_two_q_one(self):
        # grid oracle over the circle of coefficients
        grid = min(
            brute_moment_abs([math.cos(t), math.sin(t)], 1.0)
            for t in np.linspace(0, np.pi / 2, 20001)
        )
        assert grid == approx(2**-0.5, abs=1e-8)
        res = best_ratio_low(2, 1.0)
        assert res.ratio == approx(2**-0.5, abs=1e-9)
        assert 1 / res.ratio == approx(math.sqrt(2), abs=1e-8)
        assert 1 / res.ratio <= holder_reverse_constant(1.0)

    def test_rejects_q(self):
        for q in (0.0, 2.0, -1.0, 3.0):
            with pytest.raises(ValueError):
                best_ratio_low(3, q)

    @pytest.mark.parametrize("q", [0.5, 1.0, 1.7])
    def test_reverse_bound_holds(self, q):
        for ell in (3, 6):
            r = best_ratio_low(ell, q, restarts=6)
            assert 1 / r.ratio <= holder_reverse_constant(q) + 1e-9


def brute_moment_abs(a, q):
    pts = cube_points(len(a))
    return sum(abs(sum(aj * xj for aj, xj in zip(a, x))) ** q for x in pts) / len(pts)


class TestHolderConstant:
    def test_q_one(self):
        # interpolation: ||f||_2 <= ||f||_1^(1/3) ||f||_4^(2/3), ||f||_4 <= 3^(1/4)||f||_2
        # gives ||f||_2^(1/3) <= 3^(1/6) ||f||_1^(1/3), i.e. C = 3^(1/2)
        assert holder_reverse_constant(1.0) == approx(math.sqrt(3), rel=1e-15)
        assert holder_reverse_constant(1.0) == approx(1.732051, abs=1e-6)

    def test_limit_at_two(self):
        assert 1.0 < holder_reverse_constant(1.999) < 1.001

    def test_decreasing(self):
        qs = np.linspace(0.05, 1.95, 50)
        vals = [holder_reverse_constant(q) for q in qs]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_rejects(self):
        with pytest.raises(ValueError):
            holder_reverse_constant(2.0)
        with pytest.raises(ValueError):
            holder_reverse_constant(0.0)
