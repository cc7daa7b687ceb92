import math

import numpy as np
import pytest

from lyapspec import maps
from lyapspec.errors import NotParabolicError, OutOfDomainError, ZeroAlphaError
from lyapspec.pressure import find_root_d, pressure_series
from lyapspec.slide import legendre, support_line
from lyapspec.spectrum import (
    GUARD,
    OUT_OF_DOMAIN,
    dom_L,
    spectrum_at_zero,
    spectrum_curve,
    spectrum_point,
)

from conftest import GAUSS_EXPONENT

LN2 = math.log(2)


def test_gauss_typical_level(gauss_curve):
    p = spectrum_point(gauss_curve, GAUSS_EXPONENT)
    assert p.case == "interior"
    assert p.L == pytest.approx(1.0, abs=0.03)
    assert abs(p.L - 1.0) <= p.L_err
    assert p.t_alpha == pytest.approx(1.0, abs=0.05)


def test_dyadic_level(dyadic_curve):
    p = spectrum_point(dyadic_curve, 2 * LN2)
    assert p.L == pytest.approx(1.0, abs=1e-9)
    assert p.t_alpha == pytest.approx(1.0, abs=1e-9)
    assert p.F == pytest.approx(2 * LN2, abs=1e-9)


def test_dyadic_closed_form_spectrum(dyadic_curve):
    # t_alpha solves log2 / (1 - 2^-t) = alpha
    for alpha in np.linspace(0.8, 5.0, 9):
        t = -math.log2(1 - LN2 / alpha)
        exact = t + math.log(2.0 ** -t / (1 - 2.0 ** -t)) / alpha
        assert spectrum_point(dyadic_curve, alpha).L == pytest.approx(exact, abs=1e-9)


def test_renyi_near_zero(renyi_curve):
    assert spectrum_point(renyi_curve, 1e-3).L == pytest.approx(1.0, abs=1e-6)


def test_mp_plateau_region(mp_curve):
    f = mp_curve.slide
    alpha = 0.5 * -f.b_f
    p = spectrum_point(mp_curve, alpha)
    assert p.case == "boundary_parabolic"
    assert p.L == f.d
    assert p.t_alpha_label == "at_d"


def test_logdir5_dashed_segment(logdir_curves):
    c = logdir_curves[5]
    f = c.slide
    lim = pressure_series(c.map.partition, 0.5)[0]
    assert f.limit_at_t_inf == pytest.approx(lim, abs=1e-9)
    pts = spectrum_curve(c, -f.a_f + 0.1, -f.a_f + 6, 12)
    for p in pts:
        assert p.case == "boundary_discontinuous"
        assert p.t_alpha_label == "at_t_inf"
        assert p.L == pytest.approx(0.5 + lim / p.alpha, abs=1e-12)


def test_logdir1_has_no_dashed_segment(logdir_curves):
    c = logdir_curves[1]
    assert c.slide.a_f == -math.inf
    assert dom_L(c).dashed_from is None
    pts = spectrum_curve(c, 2.2, 30.0, 15)
    assert {p.case for p in pts} == {"interior"}


def test_guard_band_is_continuous(logdir_curves):
    c = logdir_curves[5]
    edge = -c.slide.a_f
    vals = [spectrum_point(c, edge + k * GUARD / 2).L for k in (-4, -1, 0, 1, 4)]
    assert max(vals) - min(vals) < 1e-5


def test_three_branch_curve(three_branch_curve):
    c = three_branch_curve
    pts = spectrum_curve(c, LN2 + 1e-3, math.log(4) - 1e-3, 41)
    peak = max(pts, key=lambda p: p.L)
    assert peak.L == pytest.approx(1.0, abs=1e-3)
    top = spectrum_point(c, 1.5 * LN2)
    assert top.L == pytest.approx(1.0, abs=1e-9)
    assert top.t_alpha == pytest.approx(1.0, abs=1e-9)


def test_dom_L_examples(dyadic_curve, renyi_curve, gauss_curve, logdir_curves):
    assert dom_L(dyadic_curve).alpha_min == pytest.approx(LN2, abs=1e-7)
    r = dom_L(renyi_curve)
    assert r.alpha_min == 0.0 and r.parabolic
    g = dom_L(gauss_curve)
    # the midpoint curve underestimates -b_P = 0.9624 (see ledger)
    assert 0.85 < g.alpha_min < 0.9624 + 0.01
    assert g.alpha_max == math.inf
    d5 = dom_L(logdir_curves[5])
    assert d5.dashed_from == pytest.approx(-logdir_curves[5].slide.a_f)


def test_spectrum_at_zero(renyi_curve, mp_curve, gauss_curve):
    assert spectrum_at_zero(renyi_curve) == pytest.approx(1.0, abs=1e-6)
    assert spectrum_at_zero(mp_curve) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(NotParabolicError):
        spectrum_at_zero(gauss_curve)


def test_errors(gauss_curve, dyadic_curve):
    with pytest.raises(ZeroAlphaError):
        spectrum_point(gauss_curve, 0.0)
    with pytest.raises(OutOfDomainError):
        spectrum_point(gauss_curve, -1.0)
    with pytest.raises(OutOfDomainError):
        spectrum_point(dyadic_curve, 0.5)  # below alpha_min = log 2
    with pytest.raises(OutOfDomainError):
        spectrum_curve(gauss_curve, 3.0, 2.0, 5)


def test_out_of_domain_points_are_flagged(dyadic_curve):
    pts = spectrum_curve(dyadic_curve, 0.3, 2.0, 8)
    flagged = [p for p in pts if p.case == OUT_OF_DOMAIN]
    assert flagged and all(p.alpha < LN2 for p in flagged)
    assert all(math.isnan(p.L) for p in flagged)
    assert all(p.ok for p in pts if p.alpha > LN2)


@pytest.mark.parametrize("fixture,lo,hi", [
    ("gauss_curve", 1.0, 8.0),
    ("dyadic_curve", 0.75, 6.0),
    ("mp_curve", 0.05, 8.0),
])
def test_invariants(fixture, lo, hi, request):
    curve = request.getfixturevalue(fixture)
    f = curve.slide
    pts = spectrum_curve(curve, lo, hi, 25)
    assert all(p.ok for p in pts)
    for p in pts:
        assert -1e-12 <= p.L <= f.d + 1e-6
        assert abs(p.alpha * p.L - p.F) <= 1e-8 * max(1.0, abs(p.F))
        assert abs(legendre(f, p.alpha) / p.alpha - p.L) <= 1e-8
        line = support_line(f, p.alpha)
        assert line.x_intercept == pytest.approx(p.L, abs=1e-8)
        assert line.intercept == pytest.approx(p.F, abs=1e-8)
        if p.case == "interior":
            assert -curve.estimator.slope(p.t_alpha) == pytest.approx(p.alpha, abs=1e-6)
    F = np.array([p.F for p in pts])
    assert np.all(np.diff(F, 2) <= 1e-8)


def test_grid_deterministic_across_workers(gauss_curve):
    a = spectrum_curve(gauss_curve, 1.2, 4.0, 8, workers=1)
    b = spectrum_curve(gauss_curve, 1.2, 4.0, 8, workers=3)
    assert a == b
