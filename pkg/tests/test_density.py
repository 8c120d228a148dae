from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bvkit.density import (
    AC_AT_RESOLUTION,
    NOT_AC,
    DensityGrid,
    ac_modulus,
    bv_density,
    density_grid,
    integrate,
    monotone_density,
    reconstruction_error,
    shifted_monotone_density,
)
from bvkit.errors import PreconditionError, SpecFormatError
from bvkit.model import (
    build_cantor_iterate,
    build_zigzag,
    piecewise_linear,
)

F = Fraction


class TestMonotoneDensity:
    def test_identity_unit_density(self, identity):
        d = monotone_density(identity, grid=[F(i, 8) for i in range(9)],
                             h=F(1, 64))
        assert set(d.values) == {F(1)}

    def test_square_forward_window(self, square01):
        # ((x+h)^2 - x^2)/h = 2x + h exactly at x = 1/2
        h = 2.0 ** -10
        d = monotone_density(square01, grid=[0.5], h=h)
        assert d.values[0] == 1 + h

    def test_cantor_plateau_interior_vanishes(self, cantor2):
        d = monotone_density(cantor2, grid=[F(1, 2)], h=F(1, 100))
        assert d.values[0] == 0

    def test_left_window_at_right_edge(self, identity):
        d = monotone_density(identity, grid=[F(1)], h=F(1, 32))
        assert d.values[0] == 1

    def test_requires_nondecreasing(self, zigzag):
        with pytest.raises(PreconditionError):
            monotone_density(zigzag, grid=[F(1, 2)], h=F(1, 64))

    def test_explicit_grid_needs_window(self, identity):
        with pytest.raises(SpecFormatError):
            monotone_density(identity, grid=[F(1, 2)])


class TestShiftedDensity:
    def test_identity(self, identity):
        d = shifted_monotone_density(identity, grid=[F(1, 3)], h=F(1, 64))
        assert d.values[0] == 1

    def test_constant_zero(self):
        flat = piecewise_linear([(0, 0), (1, 0)])
        d = shifted_monotone_density(flat, grid=[F(1, 4), F(1, 2)], h=F(1, 64))
        assert set(d.values) == {F(0)}

    def test_square_matches_direct(self, square01):
        h = 2.0 ** -10
        d = shifted_monotone_density(square01, grid=[0.5], h=h)
        assert abs(d.values[0] - (1 + h)) < 1e-12


class TestBVDensity:
    def test_decreasing_reference(self):
        neg = piecewise_linear([(0, 0), (1, -1)])
        d = bv_density(neg, grid=[F(1, 4), F(3, 4)], h=F(1, 64))
        assert set(d.values) == {F(-1)}

    def test_zigzag_local_slopes(self, zigzag):
        d = bv_density(zigzag, grid=[F(3, 8), F(1, 8)], h=F(1, 64))
        assert d.values[0] == -4
        assert d.values[1] == 4

    def test_identity(self, identity):
        d = bv_density(identity, grid=[F(2, 7)], h=F(1, 64))
        assert d.values[0] == 1

    def test_cubic_approximates_derivative(self, cubic):
        d = bv_density(cubic, grid=[0.5], h=2.0 ** -12)
        assert abs(d.values[0] - 0.75) < 1e-2


class TestIntegrate:
    def test_unit_density(self):
        grid = tuple(F(i, 10) for i in range(11))
        d = DensityGrid(grid, tuple(F(1) for _ in grid), F(1, 40), "monotone_density")
        assert integrate(d, F(7, 10)) == F(7, 10)
        assert integrate(d, F(3, 4)) == F(3, 4)  # partial cell interpolates

    def test_linear_density_exact(self):
        grid = tuple(F(i, 16) for i in range(17))
        d = DensityGrid(grid, tuple(2 * x for x in grid), F(1, 64), "bv_difference")
        assert integrate(d, 1) == 1

    def test_zero_density(self):
        grid = tuple(F(i, 4) for i in range(5))
        d = DensityGrid(grid, tuple(F(0) for _ in grid), F(1, 16), "monotone_density")
        assert integrate(d, F(2, 3)) == 0

    def test_outside_span_rejected(self):
        d = DensityGrid((F(0), F(1)), (F(1), F(1)), F(1, 4), "monotone_density")
        with pytest.raises(SpecFormatError):
            integrate(d, 2)


class TestReconstruction:
    def test_identity_exact(self, identity):
        d = bv_density(identity, grid=[F(i, 16) for i in range(17)], h=F(1, 64))
        report = reconstruction_error(identity, d)
        assert report.sup_error == 0

    def test_square_window_bias_bound(self, square01):
        grid, h = density_grid(square01, 4096, h=2.0 ** -10)
        d = bv_density(square01, grid, 2.0 ** -10)
        report = reconstruction_error(square01, d)
        assert report.sup_error <= 2.0 ** -9

    def test_first_order_convergence(self, square01, zigzag):
        for model in (square01, zigzag):
            grid, h = density_grid(model, 2048)
            err = reconstruction_error(model, bv_density(model, grid, h)).sup_error
            grid2, h2 = density_grid(model, 2048, h=h / 2)
            err2 = reconstruction_error(model, bv_density(model, grid2, h2)).sup_error
            assert 0.4 * float(err) <= float(err2) <= 0.6 * float(err)

    def test_cantor8_aligned_grid_bound(self):
        c8 = build_cantor_iterate(8)
        grid, h = density_grid(c8, 1024)
        report = reconstruction_error(c8, bv_density(c8, grid, h))
        assert report.sup_error <= F(1, 128)

    def test_cantor_mass_concentrates_as_level_grows(self):
        # at a fixed window the measure of the dead zone of the recovered
        # density grows with the iterate level: the limit object keeps
        # F(1) - F(0) out of reach of any fixed-resolution density.
        # prediction: sum over plateaus of max(0, len - h), e.g. 5/9 - 3h
        # at level 2
        h = F(1, 4096)
        zero_measures = []
        integrals = []
        for level in (2, 4, 6):
            ck = build_cantor_iterate(level)
            grid, _ = density_grid(ck, 512, h=h)
            d = bv_density(ck, grid, h)
            zero_measures.append(sum(
                x1 - x0
                for (x0, v0), (x1, v1) in zip(zip(d.grid, d.values),
                                              zip(d.grid[1:], d.values[1:]))
                if v0 == 0 and v1 == 0))
            integrals.append(integrate(d, 1))
        assert zero_measures == sorted(zero_measures)
        assert zero_measures[0] == F(5, 9) - 3 * h
        assert zero_measures[-1] > F(8, 10)
        # while the mass concentrates, the finite-level integral stays ~1
        for total in integrals:
            assert abs(total - 1) < F(1, 10)


class TestModulus:
    def test_identity_exact(self, identity):
        report = ac_modulus(identity, [F(1, 2) ** j for j in range(1, 9)])
        for j in range(1, 9):
            assert report.omega(F(1, 2) ** j) == F(1, 2) ** j
        assert report.verdict == AC_AT_RESOLUTION

    def test_zigzag_exact_four_delta(self, zigzag):
        deltas = [F(1), F(1, 2), F(1, 8), F(1, 64)]
        report = ac_modulus(zigzag, deltas)
        for delta in deltas:
            assert report.omega(delta) == 4 * delta
        assert report.verdict == AC_AT_RESOLUTION

    def test_cantor_pins_at_one(self):
        for level in (2, 4, 6):
            ck = build_cantor_iterate(level)
            deltas = [F(2, 3) ** j for j in range(1, level + 1)]
            report = ac_modulus(ck, deltas)
            assert report.omega(F(2, 3) ** level) == 1
            assert report.verdict == NOT_AC

    def test_collections_are_feasible(self, zigzag):
        report = ac_modulus(zigzag, [F(1, 4)])
        delta, omega, chosen = report.samples[0]
        assert chosen.measure <= delta
        total = 0
        for comp in chosen:
            total += abs(zigzag.evaluate(comp.hi) - zigzag.evaluate(comp.lo))
        assert total == omega

    @given(st.lists(st.tuples(st.integers(0, 255), st.integers(1, 16)),
                    min_size=1, max_size=5))
    @settings(max_examples=40, deadline=None)
    def test_random_collections_never_beat_omega(self, raw):
        # oracle: omega is the sup over feasible collections, so every
        # explicit disjoint collection must come in at or below it
        zz = build_zigzag()
        spans = []
        cursor = F(0)
        for start, width in sorted(raw):
            lo = max(cursor, F(start, 256))
            hi = lo + F(width, 16 * 256)
            if hi > 1:
                break
            spans.append((lo, hi))
            cursor = hi
        if not spans:
            return
        delta = sum(hi - lo for lo, hi in spans)
        total = sum(abs(zz.evaluate(hi) - zz.evaluate(lo)) for lo, hi in spans)
        report = ac_modulus(zz, [delta])
        assert total <= report.omega(delta)

    def test_omega_monotone(self, square01):
        report = ac_modulus(square01, [0.5 ** j for j in range(1, 9)])
        values = [w for _, w, _ in report.samples]
        assert values == sorted(values)

    def test_curved_profile_is_lower_bound(self, square01):
        # analytic optimum on [0, 1] places the budget at the steep end:
        # omega(delta) = 1 - (1 - delta)^2; the sliced greedy stays below
        report = ac_modulus(square01, [0.25])
        exact = 1 - (1 - 0.25) ** 2
        got = report.omega(0.25)
        assert got <= exact + 1e-12
        assert got >= exact - 0.01
