"""Acceptance suite: one test per release criterion, each printing a
single PASS line on success (pytest -s shows them; any failure names its
criterion).  Tolerances are pinned here, not deferred."""

import time
from fractions import Fraction

from bvkit.certificate import MINUS, PLUS, shift_certificate, variation_certificate
from bvkit.corpus import CorpusConfig, default_corpus, run_corpus
from bvkit.density import (
    AC_AT_RESOLUTION,
    NOT_AC,
    ac_modulus,
    bv_density,
    density_grid,
    reconstruction_error,
)
from bvkit.intervals import IntervalSet
from bvkit.measure import (
    FAILS,
    PASSES,
    cantor_family,
    image_measure,
    lusin_probe,
    measure,
    shrinking_family,
)
from bvkit.model import build_cantor_iterate, build_identity, build_zigzag
from bvkit.variation import (
    jordan_decomposition,
    total_variation,
    uniform_approx,
    variation_function,
)

F = Fraction

CORPUS = default_corpus()
BY_NAME = {entry.name: entry for entry in CORPUS}


def report(number: int, name: str) -> None:
    print(f"ACCEPTANCE {number:2d} {name}: PASS")


def pick_small_set(model, eps, count=2):
    """First shrinking-family level whose set and image both fit under
    eps/2; deterministic and arithmetic-matched to the model."""
    family = shrinking_family((model.a, model.b), count=count)
    for level in range(1, 64):
        candidate = family.level(level)
        if 2 * measure(candidate) < eps and \
                2 * image_measure(model, candidate) < eps:
            return candidate
    raise AssertionError("no feasible family level")


def test_criterion_1_variation_exactness():
    start = time.perf_counter()
    for level in range(1, 11):
        estimate = total_variation(build_cantor_iterate(level), 1)
        assert estimate.lower == 1 and estimate.upper == 1
    assert total_variation(build_zigzag()).lower == 4
    assert total_variation(build_identity()).lower == 1
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"variation battery took {elapsed:.2f}s"
    report(1, "variation exactness")


def test_criterion_2_approximant_bracket():
    epsilons = [F(1, 2) ** k for k in range(1, 11)]
    for entry in CORPUS:
        model = entry.model
        grid = model.verification_grid(4096)
        p = variation_function(model)
        # the knot partition serves every epsilon; the defect is computed
        # once and compared against each budget
        gaps = None
        for eps in epsilons:
            eps_m = eps if model.exact else float(eps)
            u = uniform_approx(model, eps_m, verify_points=0)
            if gaps is None:
                gaps = [p(x) - u.evaluate(x) for x in grid]
                sup_gap = max(gaps)
                min_gap = min(gaps)
            assert min_gap >= 0, f"{entry.name}: negative defect {min_gap}"
            assert sup_gap < eps_m, \
                f"{entry.name}: defect {sup_gap} outside [0, {eps_m})"
            # uniform convergence: sup defect under eps = 2^-k stays <= 2^-k
            assert sup_gap <= eps_m
    report(2, "uniform approximant bracket")


def test_criterion_3_decomposition_identities():
    for entry in CORPUS:
        model = entry.model
        decomposition = jordan_decomposition(model)
        grid = model.verification_grid(4096)
        prev_p = prev_n = None
        grace = 0 if model.exact else 10 * model.tol
        for x in grid:
            p_val = decomposition.p.evaluate(x)
            n_val = decomposition.n.evaluate(x)
            if prev_p is not None:
                assert p_val - prev_p >= -grace, f"{entry.name}: p decreased"
                assert n_val - prev_n >= -grace, f"{entry.name}: n decreased"
            prev_p, prev_n = p_val, n_val
            if model.exact:
                assert p_val - n_val == model.evaluate(x), \
                    f"{entry.name}: F != p - n at {x}"
            else:
                assert abs(p_val - n_val - model.evaluate(x)) <= 1e-9
        assert decomposition.p.evaluate(model.a) == 0
    report(3, "decomposition identities")


def test_criterion_4_lusin_separation():
    # diagonal middle-thirds probe: the level-j iterate spreads the level-j
    # stage over everything, exactly
    for j in range(1, 9):
        cj = build_cantor_iterate(j)
        probe = lusin_probe(cj, cantor_family(), j)
        assert probe.verdict == FAILS
        for level, mu, img in probe.levels:
            assert mu == F(2, 3) ** level
            assert img == 1
    # quadratic with the left-anchored shrink: image measure is exactly 4^-j
    square = BY_NAME["square"].model
    probe = lusin_probe(square, shrinking_family((0, 1)), 8)
    assert probe.verdict == PASSES
    for level, mu, img in probe.levels:
        assert mu == F(1, 2) ** level
        assert img == F(1, 4) ** level
    report(4, "null-image separation")


def test_criterion_5_shift_certificate_budget():
    nondecreasing = [e for e in CORPUS if e.model.is_nondecreasing()]
    assert {e.name for e in nondecreasing} >= {
        "identity", "square", "cubic", "cantor_2", "cantor_4", "cantor_6",
        "cantor_8"}
    for entry in nondecreasing:
        model = entry.model
        for k in (1, 2, 3):
            eps = F(1, 10) ** k if model.exact else 10.0 ** -k
            nullset = pick_small_set(model, eps, count=3)
            trace = shift_certificate(model, nullset, eps)
            assert trace.ok, f"{entry.name} eps={eps}"
            assert trace.shift_bound < 2 * eps, \
                f"{entry.name}: {trace.shift_bound} vs 2*{eps}"
            assert trace.g_n1_measure <= measure(trace.n1)
    report(5, "shift certificate closes below 2*eps")


def test_criterion_6_variation_certificate_budget():
    for name in ("zigzag", "square", "cubic", "mixed"):
        model = BY_NAME[name].model
        start = time.perf_counter()
        for k in (1, 2, 3, 4):
            eps = F(1, 10) ** k if model.exact else 10.0 ** -k
            nullset = pick_small_set(model, eps)
            trace = variation_certificate(model, nullset, eps)
            assert trace.ok, f"{name} eps={eps}"
            for cell in trace.cells:
                assert cell.p_sum < 5 * eps, \
                    f"{name} eps={eps}: p cover {cell.p_sum}"
                assert cell.n_sum < 9 * eps, \
                    f"{name} eps={eps}: n cover {cell.n_sum}"
        elapsed = time.perf_counter() - start
        assert elapsed < 10.0, f"{name} took {elapsed:.1f}s"
    report(6, "variation certificate closes below 5/9 eps")


# max |slope| per entry: identity/neg_slope 1; square d(x^2)=2x <= 2 on [0,1];
# cubic 3x^2 <= 3 on [-1,1]; zigzag 4; mixed max(2x on [0,1], 1) = 2;
# x*sin(1/x): |sin| + |cos|/x <= 1 + 10 on [0.1, 1]; x^2*sin(1/x):
# |2x sin| + |cos| <= 3.
_SLOPE_BOUNDS = {
    "identity": 1, "neg_slope": 1, "square": 2, "cubic": 3, "zigzag": 4,
    "mixed": 2, "xsin_trunc": 11, "x2sin_trunc": 3,
}


def test_criterion_7_reconstruction():
    for name, slope in _SLOPE_BOUNDS.items():
        model = BY_NAME[name].model
        grid, h = density_grid(model, 4096)
        density = bv_density(model, grid, h)
        err = reconstruction_error(model, density).sup_error
        assert err <= 2 * h * slope, \
            f"{name}: error {err} above 2h*slope = {2 * float(h) * slope}"
        grid2, h2 = density_grid(model, 4096, h=h / 2)
        err2 = reconstruction_error(model, bv_density(model, grid2, h2)).sup_error
        if float(err) > 1e-13:
            ratio = float(err2) / float(err)
            assert 0.4 <= ratio <= 0.6, f"{name}: halving ratio {ratio:.3f}"
        else:
            assert float(err2) <= 1e-13, f"{name}: error reappeared"
    report(7, "reconstruction error and first-order convergence")


def test_criterion_8_modulus_dichotomy():
    identity = BY_NAME["identity"].model
    rep = ac_modulus(identity, [F(1, 2) ** j for j in range(1, 9)])
    for delta, omega, _ in rep.samples:
        assert omega == delta
    assert rep.verdict == AC_AT_RESOLUTION

    zigzag = BY_NAME["zigzag"].model
    deltas = [F(1), F(1, 4), F(1, 16), F(1, 128)]
    rep = ac_modulus(zigzag, deltas)
    for delta in deltas:
        assert rep.omega(delta) == 4 * delta
    assert rep.verdict == AC_AT_RESOLUTION

    for level in (2, 4, 6, 8):
        ck = BY_NAME[f"cantor_{level}"].model
        deltas = [F(2, 3) ** j for j in range(1, level + 1)]
        rep = ac_modulus(ck, deltas)
        assert rep.omega(F(2, 3) ** level) == 1
        assert rep.verdict == NOT_AC
    report(8, "modulus dichotomy")


def test_criterion_9_equivalence_table():
    table = run_corpus(CORPUS, CorpusConfig(grid_points=512))
    assert table.all_agree, [
        (row.name, row.mismatches, row.error) for row in table.rows
        if not row.agree]
    for row in table.rows:
        measured = row.measured
        assert measured["ac"] == (measured["continuous"] and measured["bv"]
                                  and measured["lusin"]), row.name
    assert len(table.rows) == len(CORPUS)
    report(9, "equivalence table agreement")


def _band_intervals(cell, band):
    return sorted((float(p.interval.lo), float(p.interval.hi))
                  for p in cell.cover if p.band == band)


def test_criterion_10_mirror_symmetry():
    for entry in CORPUS:
        model = entry.model
        span = model.b - model.a
        knots = model.knots()
        anchor = knots[len(knots) // 2] if len(knots) > 2 else model.b
        width = span / 500
        nullset = IntervalSet.closed(anchor - width, anchor)
        eps = F(1, 10) if model.exact else 0.1
        if not 2 * image_measure(model, nullset) < eps:
            nullset = IntervalSet.closed(anchor - width / 50, anchor)
        trace = variation_certificate(model, nullset, eps)
        reflected = model.reflect()
        mirrored = nullset.affine(-1, model.a + model.b)
        trace_m = variation_certificate(reflected, mirrored, eps)

        cells_m = list(trace_m.cells)[::-1]
        assert len(trace.cells) == len(cells_m), entry.name
        close = (lambda u, v: u == v) if model.exact else \
            (lambda u, v: abs(u - v) <= 1e-6)
        for a, b in zip(trace.cells, cells_m):
            pa, mb = _band_intervals(a, PLUS), _band_intervals(b, MINUS)
            ma, pb = _band_intervals(a, MINUS), _band_intervals(b, PLUS)
            assert len(pa) == len(mb) and all(
                close(x0, y0) and close(x1, y1)
                for (x0, x1), (y0, y1) in zip(pa, mb)), entry.name
            assert len(ma) == len(pb) and all(
                close(x0, y0) and close(x1, y1)
                for (x0, x1), (y0, y1) in zip(ma, pb)), entry.name
            assert close(a.plus_sum, b.minus_sum), entry.name
            assert close(a.minus_sum, b.plus_sum), entry.name
            assert close(a.p_sum, b.p_sum), entry.name
            assert close(a.f_sum, b.f_sum), entry.name
        assert close(trace.max_p_sum, trace_m.max_p_sum), entry.name
        # the n budget closes on both sides (its value is not mirror
        # invariant: reflecting exchanges the roles of rise and fall)
        assert trace.max_n_sum < 9 * eps and trace_m.max_n_sum < 9 * eps
    report(10, "mirror symmetry of the family ledgers")
