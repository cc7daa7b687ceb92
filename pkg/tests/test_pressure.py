import json
import math

import numpy as np
import pytest
from scipy.special import zeta

from lyapspec import maps
from lyapspec.errors import DivergentError, NoRootError, UnsupportedTailError, ValidationError
from lyapspec.pressure import (
    PressureCurve,
    _estimator_for,
    classify_type,
    detect_t_inf,
    find_root_d,
    partition_sum_bounds,
    pressure_curve,
    pressure_series,
    truncated_pressure,
)
from lyapspec.slide import CType, Kind, check_slide_shape

from conftest import dyadic_closed_form

LN2 = math.log(2)


def gauss_transfer_pressure(t, m=48, N=600):
    """log of the leading eigenvalue of the Gauss transfer operator.

    Chebyshev collocation on [0, 1]: (L f)(x) = sum_n (n + x)^(-2t) f(1/(n + x)),
    f represented by barycentric interpolation, the n > N tail by Hurwitz zeta
    sums with a first-order expansion of f at 0.  Independent of the library.
    """
    k = np.arange(m)
    x = 0.5 * (1 - np.cos((2 * k + 1) * np.pi / (2 * m)))
    w = (-1.0) ** k * np.sin((2 * k + 1) * np.pi / (2 * m))

    def interp(y):
        d = y[:, None] - x[None, :]
        hit = d == 0
        d[hit] = 1.0
        r = w[None, :] / d
        r = r / r.sum(axis=1, keepdims=True)
        rows = hit.any(axis=1)
        r[rows] = hit[rows].astype(float)
        return r

    M = np.zeros((m, m))
    for n in range(1, N + 1):
        M += ((n + x) ** (-2 * t))[:, None] * interp(1.0 / (n + x))
    l0 = interp(np.array([0.0]))[0]
    l1 = (interp(np.array([1e-6]))[0] - l0) / 1e-6
    M += zeta(2 * t, N + 1 + x)[:, None] * l0 + zeta(2 * t + 1, N + 1 + x)[:, None] * l1
    return math.log(max(np.linalg.eigvals(M).real))


# ---------------------------------------------------------------- the oracle itself


def test_transfer_oracle_sanity():
    assert abs(gauss_transfer_pressure(1.0)) < 1e-7
    assert gauss_transfer_pressure(0.8) > 0 > gauss_transfer_pressure(1.2)


# ---------------------------------------------------------------- series


def test_series_examples():
    seq = maps.dyadic_sequence()
    assert pressure_series(seq, 1.0)[0] == pytest.approx(0.0, abs=1e-15)
    assert pressure_series(seq, 2.0)[0] == pytest.approx(math.log(1 / 3), abs=1e-14)
    assert pressure_series(maps.log_dirichlet_sequence(1), 0.5)[0] == math.inf
    assert pressure_series(maps.log_dirichlet_sequence(1), 0.4)[0] == math.inf


def test_series_discontinuous_limit_is_finite():
    v, err = pressure_series(maps.log_dirichlet_sequence(5), 0.5)
    assert math.isfinite(v) and err < 1e-6


def test_series_error_bars_contain_brute_force():
    seq = maps.log_dirichlet_sequence(5)
    t = 0.9
    n = np.arange(1, 3_000_001)
    brute = math.log(math.fsum((seq.lengths(n.size) ** t).tolist()))
    v, err = pressure_series(seq, t)
    assert brute <= v + err  # the brute sum misses a positive tail
    assert v - brute < 1e-3


# ---------------------------------------------------------------- certified brackets


def test_gauss_bracket_at_one():
    lo, hi = partition_sum_bounds(maps.gauss(), 1.0, 2, 2000)
    assert lo <= 0.0 <= hi
    assert hi - lo < 0.35  # depth-2 width; see the ledger for the 0.05 target


def test_renyi_bracket_on_plateau():
    lo, hi = partition_sum_bounds(maps.renyi(), 1.5, 3, 200)
    assert lo <= 0.0 <= hi


@pytest.mark.parametrize("depth", [1, 2, 3])
def test_dyadic_bracket_collapses(depth):
    lo, hi = partition_sum_bounds(maps.dyadic_luroth(), 1.0, depth, 200)
    assert lo <= 1e-12 and hi >= -1e-12
    assert hi - lo <= 1e-9


@pytest.mark.parametrize("t", [0.3, 0.7, 1.0, 2.5, 6.0])
def test_closed_form_luroth_inside_brackets(t, three_branch):
    for T, exact in [
        (maps.dyadic_luroth(), dyadic_closed_form(t)),
        (three_branch, math.log(2.0 ** -t + 2 * 4.0 ** -t)),
    ]:
        lo, hi = partition_sum_bounds(T, t, 2, 200)
        assert lo - 1e-12 <= exact <= hi + 1e-12


@pytest.mark.parametrize("t", [0.6, 0.8, 1.0, 1.5, 2.0, 3.0])
def test_gauss_transfer_value_inside_brackets(t):
    exact = gauss_transfer_pressure(t)
    for depth, cutoff in [(1, 20000), (2, 2000), (3, 200)]:
        lo, hi = partition_sum_bounds(maps.gauss(), t, depth, cutoff)
        assert lo <= exact <= hi
    mid = _estimator_for(maps.gauss(), 2, 2000).value(t)
    lo, hi = partition_sum_bounds(maps.gauss(), t, 2, 2000)
    assert abs(mid - exact) <= 0.5 * (hi - lo)


@pytest.mark.parametrize("t", [0.6, 1.0, 1.7])
def test_depth_consistency(t):
    b = [partition_sum_bounds(maps.gauss(), t, n, c) for n, c in [(1, 20000), (2, 2000), (3, 200)]]
    for (l1, h1), (l2, h2) in zip(b, b[1:]):
        assert max(l1, l2) <= min(h1, h2)


def test_divergent_below_t_inf():
    with pytest.raises(DivergentError):
        partition_sum_bounds(maps.gauss(), 0.4, 2, 200)


def test_finite_subsystem_brackets_the_cycle_value():
    T = maps.gauss().restrict([1, 2])
    v = truncated_pressure(maps.gauss(), 2, 0.7)
    lo, hi = partition_sum_bounds(T, 0.7, 3, 200)
    assert lo <= v <= hi


# ---------------------------------------------------------------- structure


def test_t_inf_examples(three_branch):
    assert detect_t_inf(maps.gauss()) == 0.5
    assert detect_t_inf(maps.renyi()) == 0.5
    assert detect_t_inf(maps.map_from_record("luroth-logdir-1")) == 0.5
    assert detect_t_inf(maps.dyadic_luroth()) == 0.0
    assert detect_t_inf(three_branch) == -math.inf
    assert detect_t_inf(maps.gauss().restrict([1, 2])) == -math.inf


def test_t_inf_unsupported():
    T = maps.luroth(maps.finite_sequence([0.3, 0.2]))
    with pytest.raises(UnsupportedTailError):
        detect_t_inf(T)


def test_classify_examples():
    assert classify_type(maps.map_from_record("luroth-logdir-1")) is CType.CONTINUOUS
    assert classify_type(maps.map_from_record("luroth-logdir-5")) is CType.DISCONTINUOUS
    assert classify_type(maps.gauss()) is CType.CONTINUOUS
    assert classify_type(maps.renyi()) is CType.CONTINUOUS
    assert classify_type(maps.map_from_record("mp")) is CType.DISCONTINUOUS


def test_slope_trend_near_t_inf():
    """m=1: P' keeps falling as t -> 1/2+; m=5: it settles."""
    levels = [0.5 + 10.0 ** -k for k in (2, 3, 4)]
    s1 = [_estimator_for(maps.map_from_record("luroth-logdir-1")).slope(t) for t in levels]
    s5 = [_estimator_for(maps.map_from_record("luroth-logdir-5")).slope(t) for t in levels]
    d1, d5 = np.diff(s1), np.diff(s5)
    assert np.all(d1 < 0) and abs(d1[1]) > abs(d1[0])
    assert np.all(d5 < 0) and abs(d5[1]) < 0.2 * abs(d5[0])


# ---------------------------------------------------------------- truncation


def test_truncated_dyadic():
    assert truncated_pressure(maps.dyadic_luroth(), 10, 1.0) == pytest.approx(math.log(1 - 2.0 ** -10), abs=1e-15)


def test_truncated_finite_luroth_matches_series(three_branch):
    for t in (0.3, 1.0, 2.0):
        assert truncated_pressure(three_branch, 3, t) == pressure_series(three_branch.partition, t)[0]


def test_truncated_gauss_increasing():
    vals = [truncated_pressure(maps.gauss(), b, 1.0) for b in (2, 3, 5, 10)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 0


def test_truncated_validation():
    with pytest.raises(ValidationError):
        truncated_pressure(maps.gauss(), 0, 1.0)


# ---------------------------------------------------------------- curves


def test_gauss_curve(gauss_curve):
    c = gauss_curve
    assert c.kind is Kind.NON_PARABOLIC and c.ctype is CType.CONTINUOUS
    assert c.t_inf == 0.5
    assert np.all(np.diff(c.p_mid) < 0)
    check_slide_shape(c.t, c.p_mid)
    assert np.all(c.p_lower <= c.p_mid) and np.all(c.p_mid <= c.p_upper)
    assert find_root_d(c) == pytest.approx(1.0, abs=0.02)
    lo, hi = partition_sum_bounds(c.map, find_root_d(c), 2, 2000)
    assert lo <= 0 <= hi


def test_dyadic_curve_closed_form(dyadic_curve):
    exact = np.array([dyadic_closed_form(t) for t in dyadic_curve.t])
    assert np.max(np.abs(dyadic_curve.p_mid - exact)) <= 1e-9
    assert np.max(np.abs(dyadic_curve.p_lower - exact)) <= 1e-9
    assert np.max(np.abs(dyadic_curve.p_upper - exact)) <= 1e-9
    slope = np.array([-LN2 / (1 - 2.0 ** -t) for t in dyadic_curve.t])
    assert np.max(np.abs(dyadic_curve.p_prime - slope)) <= 1e-9
    assert find_root_d(dyadic_curve) == pytest.approx(1.0, abs=1e-9)


def test_renyi_curve(renyi_curve):
    c = renyi_curve
    assert c.kind is Kind.PARABOLIC and c.ctype is CType.CONTINUOUS
    plateau = c.t >= 1.0
    assert np.all(np.abs(c.p_mid[plateau]) < 1e-9)
    assert np.all(c.p_mid[~plateau] > 0)
    assert find_root_d(c) == pytest.approx(1.0, abs=1e-9)


def test_restricted_gauss_root():
    c = pressure_curve(maps.gauss().restrict([1, 2]), 0.2, 1.5, steps=20)
    assert find_root_d(c) == pytest.approx(0.531, abs=0.01)


def test_no_root():
    with pytest.raises(NoRootError):
        find_root_d(pressure_curve(maps.gauss(), 0.6, 0.9, steps=5))


@pytest.mark.parametrize("fixture", ["gauss_curve", "dyadic_curve", "renyi_curve", "mp_curve"])
def test_curves_certify_as_slides(fixture, request, logdir_curves):
    curve = request.getfixturevalue(fixture)
    f = curve.slide
    assert f.kind is curve.kind and f.ctype is curve.ctype
    for c in logdir_curves.values():
        assert c.slide.ctype is c.ctype


def test_mp_curve(mp_curve):
    assert mp_curve.kind is Kind.PARABOLIC and mp_curve.ctype is CType.DISCONTINUOUS
    assert find_root_d(mp_curve) == pytest.approx(1.0, abs=1e-6)
    assert mp_curve.slide.b_f < -0.5  # not differentiable at d


def test_invalid_curve_arguments():
    G = maps.gauss()
    for kw in [dict(t_min=2, t_max=1), dict(t_min=0.6, t_max=1, steps=1), dict(t_min=0.6, t_max=1, depth=7),
               dict(t_min=0.6, t_max=1, cutoff=3), dict(t_min=math.nan, t_max=1)]:
        with pytest.raises(ValidationError):
            pressure_curve(G, **kw)


def test_curve_record_round_trip(gauss_curve, renyi_curve, logdir_curves):
    for c in (gauss_curve, renyi_curve, logdir_curves[5]):
        back = PressureCurve.from_record(json.loads(json.dumps(c.to_record())))
        assert back == c
        assert back.slide.d == c.slide.d


def test_curve_record_rejects_garbage():
    with pytest.raises(ValidationError):
        PressureCurve.from_record({"map": {"family": "gauss"}})


def test_curve_deterministic_across_workers():
    a = pressure_curve(maps.gauss(), 0.6, 2.0, steps=12, workers=1)
    b = pressure_curve(maps.gauss(), 0.6, 2.0, steps=12, workers=3)
    assert a == b
