import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blochsim.exceptions import ResourceCapError, ValidationError
from blochsim.nonuniform import DisintegrationDensity, epsilon_probability
from blochsim.universal import (
    CellularDensity,
    approximate_density,
    average_over_structures,
    average_profile,
    boundary_position,
    cellular_probability,
    flatten_multidim,
    identity_check,
    split_index,
    structure_table,
    uniform_reference,
)
from oracles import brute_force_average


class TestCellular:
    def test_all_breakable(self):
        for n in range(1, 8):
            cells = (1,) * n
            for i in range(n + 1):
                assert cellular_probability(cells, i) == Fraction(n - i, n)

    def test_single_breakable_on_left(self):
        assert cellular_probability((1, 0), 1) == 1

    @given(st.lists(st.integers(0, 1), min_size=1, max_size=12).filter(any))
    def test_trivial_ends(self, cells):
        assert cellular_probability(cells, 0) == 1
        assert cellular_probability(cells, len(cells)) == 0

    def test_invalid(self):
        with pytest.raises(ValidationError):
            CellularDensity((0, 0, 0))
        with pytest.raises(ValidationError):
            CellularDensity(())
        with pytest.raises(ValidationError):
            CellularDensity((1, 2))
        with pytest.raises(ValidationError):
            cellular_probability((1, 1), 3)

    def test_str(self):
        assert str(CellularDensity((1, 0, 1))) == "d-d"


class TestAverages:
    @pytest.mark.parametrize("n", range(1, 11))
    def test_against_brute_force(self, n):
        profile = average_profile(n)
        for i in range(n + 1):
            assert profile[i] == brute_force_average(n, i)

    def test_small_cases(self):
        assert average_over_structures(2, 1) == Fraction(1, 2)
        assert average_over_structures(1, 0) == 1
        assert average_over_structures(12, 5) == Fraction(7, 12)

    def test_uniform_equality_up_to_16(self):
        for n in range(1, 17):
            assert average_profile(n) == [uniform_reference(n, i) for i in range(n + 1)]

    def test_table_independent_of_workers(self):
        assert structure_table(18, workers=1) == structure_table(18, workers=4)

    def test_table_counts(self):
        # T[k][n] sums k over the C(n, k) structures with k breakable cells
        from math import comb
        T = structure_table(9)
        assert [T[k][9] for k in range(10)] == [k * comb(9, k) for k in range(10)]

    def test_cap(self):
        with pytest.raises(ResourceCapError):
            average_over_structures(21, 3)
        with pytest.raises(ResourceCapError):
            structure_table(8, cap=6)

    def test_bad_index(self):
        with pytest.raises(ValidationError):
            average_over_structures(4, 5)


class TestIdentities:
    def test_examples(self):
        assert identity_check(2).weighted_lhs == Fraction(5, 3)
        assert identity_check(3).plain_lhs == Fraction(15, 4)
        rep = identity_check(0)
        assert (rep.weighted_lhs, rep.plain_lhs) == (0, 1)

    def test_up_to_256(self):
        assert all(identity_check(n).holds for n in range(257))

    def test_negative(self):
        with pytest.raises(ValidationError):
            identity_check(-1)


class TestBoundaries:
    @given(n=st.integers(1, 50), data=st.data())
    def test_round_trip(self, n, data):
        i = data.draw(st.integers(0, n))
        assert split_index(boundary_position(n, i), n) == i

    def test_values(self):
        assert boundary_position(4, 0) == 1
        assert boundary_position(4, 4) == -1
        assert boundary_position(4, 1) == Fraction(1, 2)

    def test_not_a_boundary(self):
        with pytest.raises(ValidationError):
            split_index(Fraction(1, 3), 4)


def cellular_cdf_errors(approx, target, m, ell):
    """Largest gap between the cellular and target probabilities at cell boundaries."""
    n = m * ell
    errs = []
    for i in range(n + 1):
        x = boundary_position(n, i)
        p_cell = cellular_probability(approx.density, i)
        p_target = Fraction(target.mass_below(float(x))).limit_denominator(10 ** 12)
        errs.append(abs(float(p_cell) - float(p_target)))
    return max(errs)


class TestApproximation:
    @pytest.mark.parametrize("m,ell", [(1, 1), (3, 5), (4, 8)])
    def test_uniform_target(self, m, ell):
        a = approximate_density(DisintegrationDensity.uniform(), m, ell)
        assert a.deviation == 0
        assert a.density.cells == (1,) * (m * ell)

    @pytest.mark.parametrize("ell,tol", [(8, 0.1), (64, 0.01)])
    def test_epsilon_half(self, ell, tol):
        target = DisintegrationDensity.epsilon(0.5)
        a = approximate_density(target, 4, ell)
        assert a.density.n == 4 * ell
        for i in range(4 * ell + 1):
            x = boundary_position(4 * ell, i)
            exact = epsilon_probability(x, Fraction(1, 2))[0]
            assert abs(cellular_probability(a.density, i) - exact) <= tol

    @pytest.mark.parametrize("target", [
        DisintegrationDensity.epsilon(0.3),
        DisintegrationDensity(pieces=((-1.0, 0.2, 0.25), (0.2, 1.0, 0.875))),
        DisintegrationDensity(pieces=((-1.0, 1.0, 0.25),), atoms=((0.1, 0.5),)),
    ])
    def test_non_increasing_in_ell(self, target):
        devs = [approximate_density(target, 5, ell).deviation for ell in range(1, 25)]
        assert all(a >= b for a, b in zip(devs, devs[1:]))
        assert devs[-1] < devs[0] or devs[0] == 0

    def test_deviation_is_realized(self):
        target = DisintegrationDensity.epsilon(0.3)
        m, ell = 5, 7
        a = approximate_density(target, m, ell)
        cells = np.array(a.density.cells).reshape(m, ell)
        frac = [Fraction(int(c), int(cells.sum())) for c in cells.sum(axis=1)]
        (a0, b0, h), = target.pieces
        edges = [Fraction(-1) + Fraction(2 * k, m) for k in range(m + 1)]
        # exact masses of the stored float piece
        mass = [Fraction(h) * max(Fraction(0), min(Fraction(b0), edges[k + 1]) - max(Fraction(a0), edges[k]))
                for k in range(m)]
        mass = [x / sum(mass) for x in mass]
        assert max(abs(f - w) for f, w in zip(frac, mass)) == a.deviation

    def test_minimax_by_search(self):
        # compare with brute force over every count vector for a tiny case
        target = DisintegrationDensity(pieces=((-1.0, 0.0, 0.2), (0.0, 1.0, 0.8)))
        m, ell = 3, 3
        w = []
        for k in range(m):
            lo, hi = Fraction(-1) + Fraction(2 * k, m), Fraction(-1) + Fraction(2 * k + 2, m)
            w.append(Fraction(2, 10) * max(0, min(hi, 0) - lo) + Fraction(8, 10) * max(0, hi - max(lo, 0)))
        best = min(max(abs(Fraction(c, sum(cs)) - x) for c, x in zip(cs, w))
                   for cs in itertools.product(range(ell + 1), repeat=m) if sum(cs))
        assert approximate_density(target, m, ell).deviation == best

    def test_single_atom(self):
        target = DisintegrationDensity(atoms=((0.37, 1.0),))
        for m in (2, 4, 8):
            a = approximate_density(target, m, 4)
            assert a.deviation <= Fraction(1, m)
            x = 0.37
            n = a.density.n
            for i in range(n + 1):
                if boundary_position(n, i) < x - 2 / m:
                    assert cellular_probability(a.density, i) == 0

    def test_cdf_gap_shrinks(self):
        target = DisintegrationDensity.epsilon(0.3)
        gaps = [cellular_cdf_errors(approximate_density(target, m, m), target, m, m)
                for m in (2, 4, 8, 16)]
        assert gaps[-1] < gaps[0]
        assert gaps[-1] < 0.1

    def test_invalid(self):
        with pytest.raises(ValidationError):
            approximate_density(DisintegrationDensity.uniform(), 0, 3)


class TestFlatten:
    def test_right_column(self):
        cells, i = flatten_multidim(np.ones((2, 2)), [[0, 1], [0, 1]])
        assert i == 2
        assert cellular_probability(cells, i) == Fraction(1, 2)

    def test_single_inside(self):
        grid = np.zeros((3, 3))
        grid[1, 2] = 1
        mask = np.zeros((3, 3), dtype=bool)
        mask[1:, 1:] = True
        cells, i = flatten_multidim(grid, mask)
        assert cellular_probability(cells, i) == 1

    @settings(max_examples=60)
    @given(st.integers(0, 2 ** 32 - 1), st.sampled_from([(3, 3), (2, 5), (2, 2, 3)]))
    def test_matches_grid_count(self, seed, shape):
        rng = np.random.default_rng(seed)
        grid = rng.integers(0, 2, shape)
        grid.flat[0] = 1
        mask = rng.integers(0, 2, shape).astype(bool)
        cells, i = flatten_multidim(grid, mask)
        assert cells.n == grid.size
        assert i == int((~mask).sum())
        assert cellular_probability(cells, i) == Fraction(int(grid[mask].sum()), int(grid.sum()))

    def test_errors(self):
        with pytest.raises(ValidationError):
            flatten_multidim(np.zeros((0,)), np.zeros((0,)))
        with pytest.raises(ValidationError):
            flatten_multidim(np.ones((2, 2)), np.ones((3,)))
