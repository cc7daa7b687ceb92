"""Slide functions: convex, non-increasing pressures and their Legendre geometry.

A slide function is +inf below ``t_inf``, convex and non-increasing, and has a
zero at ``d``.  Parabolic slides vanish identically beyond ``d``.  This module
builds validated slide objects from evaluators and computes support lines, the
Newton map, the S-Newton map and the Legendre transform ``F(a) = inf f(t) + a t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    ConvergenceError,
    DerivativeZeroError,
    DivisionError,
    DomainError,
    InfiniteValueError,
    NoSupportLineError,
    ValidationError,
)

MINUS_INF = -math.inf
T_MAX = 1e3
SLOPE_TOL = 1e-12
CONVEX_SLACK = 1e-8
EDGE_EPS = 1e-12
DERIV_TOL = 1e-14


class Kind(str, Enum):
    PARABOLIC = "parabolic"
    NON_PARABOLIC = "non-parabolic"


class CType(str, Enum):
    CONTINUOUS = "continuous"
    DISCONTINUOUS = "discontinuous"


class Case(str, Enum):
    INTERIOR = "interior"
    BOUNDARY_DISCONTINUOUS = "boundary_discontinuous"
    BOUNDARY_PARABOLIC = "boundary_parabolic"


# ---------------------------------------------------------------- limits

H_LADDER = 10.0 ** -np.arange(2, 9)


def ladder_limit(values, what="limit"):
    """Extrapolate the limit of a sequence sampled on a geometric ladder.

    Monotone growth whose increments do not shrink by at least half per rung is
    read as divergence.  Otherwise Aitken's delta-squared extrapolation is
    applied and the last two extrapolants must agree.
    """
    v = np.asarray(values, dtype=float)
    if np.any(np.isnan(v)):
        raise ConvergenceError(f"{what}: evaluator returned nan on the ladder")
    if np.any(np.isinf(v)):
        return float(v[np.isinf(v)][-1])
    if abs(v[-1]) > 1e12:
        return math.copysign(math.inf, v[-1])
    dv = np.diff(v)
    tail = dv[-3:]
    if np.all(tail > 0) or np.all(tail < 0):
        ratios = np.abs(tail[1:] / tail[:-1])
        if np.all(ratios >= 0.5):
            return math.copysign(math.inf, tail[-1])
    ext = []
    for k in range(2, len(v)):
        d1, d2 = v[k - 1] - v[k - 2], v[k] - v[k - 1]
        if d1 == 0.0 or d2 == 0.0:
            ext.append(v[k])
            continue
        r = d2 / d1
        ext.append(v[k] + d2 * r / (1.0 - r) if abs(r) < 1.0 else v[k])
    a, b = ext[-2], ext[-1]
    if abs(a - b) <= 1e-7 * (1.0 + abs(b)):
        return float(b)
    raise ConvergenceError(f"{what} did not stabilise; last extrapolants {a!r}, {b!r}")


def one_sided_limit(g, t0, side=+1, what="limit"):
    """Limit of g(t) as t -> t0 from the given side (t0 may be +-inf)."""
    if math.isinf(t0):
        pts = [math.copysign(10.0 ** k, t0) for k in range(0, 7)]
    else:
        scale = max(1.0, abs(t0))
        pts = [t0 + side * h * scale for h in H_LADDER]
    return ladder_limit([g(t) for t in pts], what)


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class SlideSpec:
    """Everything needed to build a slide function.

    ``value`` and ``slope`` are evaluated only on the open interior.  Analytic
    overrides for the boundary quantities skip the numerical limits.
    """

    value: Callable[[float], float]
    slope: Callable[[float], float]
    t_inf: float
    kind: Kind | str
    d: Optional[float] = None
    a_f: Optional[float] = None
    b_f: Optional[float] = None
    limit_at_t_inf: Optional[float] = None
    grid_size: int = 512
    t_max: float = T_MAX
    family: str = "custom"
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SupportLine:
    slope: float
    intercept: float
    tangency_t: float
    case: Case

    def __call__(self, t):
        return self.slope * t + self.intercept

    @property
    def x_intercept(self):
        return -self.intercept / self.slope


@dataclass(frozen=True, eq=False)
class SlideFunction:
    t_inf: float
    d: float
    kind: Kind
    ctype: CType
    a_f: float
    b_f: float
    limit_at_t_inf: float
    t_max: float
    family: str
    params: dict
    _value: Callable[[float], float] = field(repr=False)
    _slope: Callable[[float], float] = field(repr=False)

    @property
    def parabolic(self):
        return self.kind is Kind.PARABOLIC

    def value_at(self, t):
        t = float(t)
        if t < self.t_inf:
            return math.inf
        if t == self.t_inf:
            return self.limit_at_t_inf
        if self.parabolic and t >= self.d:
            return 0.0
        return float(self._value(t))

    def slope_at(self, t):
        t = float(t)
        if t <= self.t_inf:
            raise DomainError(f"slope requested at t={t} <= t_inf={self.t_inf}")
        if self.parabolic and t > self.d:
            return 0.0
        return float(self._slope(t))

    def interior_bounds(self):
        """Search interval for slope inversion and minimisation."""
        lo = -self.t_max if math.isinf(self.t_inf) else self.t_inf + EDGE_EPS * max(1.0, abs(self.t_inf))
        if self.parabolic:
            hi = self.d - EDGE_EPS * max(1.0, abs(self.d))
        else:
            hi = max(self.t_max, self.d + 1.0)
        return lo, hi

    def to_record(self):
        return {
            "t_inf": _enc(self.t_inf),
            "d": self.d,
            "kind": self.kind.value,
            "ctype": self.ctype.value,
            "family": self.family,
            "params": dict(self.params),
        }


def _enc(x):
    return "minus-infinity" if x == MINUS_INF else x


# ---------------------------------------------------------------- building


def _find_zero(spec, lo, hi):
    """Locate d as the first point where the value reaches zero."""
    g = spec.value
    if math.isinf(lo):
        lo = -spec.t_max
    step = 1.0
    while g(hi) > 0:
        hi += step
        step *= 2
        if hi > spec.t_max:
            raise DomainError("value never reaches zero below t_max")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, abs(hi)):
            break
    return hi


def validation_grid(t_inf, d, kind, n=512, t_max=T_MAX):
    """Grid refined geometrically towards t_inf and d."""
    half = max(n // 2, 8)
    if math.isinf(t_inf):
        w = np.geomspace(1e-6, 50.0, half)
        pts = np.concatenate([d - w, d + w, [d]])
    else:
        span = d - t_inf
        u = np.geomspace(1e-8, 1.0, half)
        pts = np.concatenate([t_inf + span * u, d - span * u[:-1]])
        if kind is Kind.NON_PARABOLIC:
            far = min(t_max, d + 20.0 * max(span, 1.0))
            pts = np.concatenate([pts, d + (far - d) * np.geomspace(1e-6, 1.0, half // 2)])
        else:
            pts = np.concatenate([pts, d + span * np.linspace(0.0, 1.0, 8)[1:]])
    pts = np.unique(pts)
    return pts[pts > t_inf]


def check_slide_shape(ts, fs, slack=CONVEX_SLACK):
    """Raise ValidationError if sampled values are increasing or non-convex."""
    ts = np.asarray(ts, float)
    fs = np.asarray(fs, float)
    if np.any(~np.isfinite(fs)):
        i = int(np.argmax(~np.isfinite(fs)))
        raise ValidationError(f"non-finite value {fs[i]} at t={ts[i]}")
    scale = 1.0 + np.abs(fs)
    inc = np.diff(fs) - slack * scale[:-1]
    if np.any(inc > 0):
        i = int(np.argmax(inc > 0))
        raise ValidationError(f"value increases between t={ts[i]} and t={ts[i + 1]}")
    t0, t1, t2 = ts[:-2], ts[1:-1], ts[2:]
    chord = ((t2 - t1) * fs[:-2] + (t1 - t0) * fs[2:]) / (t2 - t0)
    bump = fs[1:-1] - chord - slack * scale[1:-1]
    if np.any(bump > 0):
        i = int(np.argmax(bump > 0)) + 1
        raise ValidationError(f"convexity fails at t={ts[i]} (excess {bump[i - 1]:.3e})")


def build_slide(spec: SlideSpec) -> SlideFunction:
    """Validate a specification and fill in boundary slopes and limits."""
    kind = Kind(spec.kind)
    t_inf = float(spec.t_inf)
    if math.isnan(t_inf) or t_inf == math.inf:
        raise DomainError("t_inf must be finite or minus infinity")
    if spec.d is None:
        start = (-spec.t_max if math.isinf(t_inf) else t_inf)
        d = _find_zero(spec, start, (0.0 if math.isinf(t_inf) else t_inf) + 1.0)
    else:
        d = float(spec.d)
    if not d > t_inf:
        raise DomainError(f"d={d} must exceed t_inf={t_inf}")

    ts = validation_grid(t_inf, d, kind, spec.grid_size, spec.t_max)
    fs = np.array([0.0 if (kind is Kind.PARABOLIC and t >= d) else spec.value(t) for t in ts])
    check_slide_shape(ts, fs)
    fd = spec.value(d)
    if abs(fd) > 1e-8:
        raise ValidationError(f"value at d={d} is {fd}, not zero")

    a_f = spec.a_f
    if a_f is None:
        a_f = one_sided_limit(spec.slope, t_inf, +1, "slope at t_inf")
    lim = spec.limit_at_t_inf
    if lim is None:
        lim = one_sided_limit(spec.value, t_inf, +1, "value at t_inf")
    b_f = spec.b_f
    if b_f is None:
        if kind is Kind.PARABOLIC:
            b_f = one_sided_limit(spec.slope, d, -1, "slope at d")
        else:
            b_f = one_sided_limit(spec.slope, math.inf, +1, "slope at infinity")
    if b_f > 1e-9:
        raise ValidationError(f"b_f={b_f} is positive")
    b_f = min(float(b_f), 0.0)
    ctype = CType.CONTINUOUS if lim == math.inf else CType.DISCONTINUOUS
    return SlideFunction(
        t_inf=t_inf, d=d, kind=kind, ctype=ctype, a_f=float(a_f), b_f=b_f,
        limit_at_t_inf=float(lim), t_max=float(spec.t_max), family=spec.family,
        params=dict(spec.params), _value=spec.value, _slope=spec.slope,
    )


def boundary_slopes(f: SlideFunction):
    """(a_f, b_f): slope limits at t_inf+ and at d- (or at infinity)."""
    return f.a_f, f.b_f


# ---------------------------------------------------------------- Newton and Legendre


def newton_map(f: SlideFunction, t: float) -> float:
    """Classical Newton step t - f(t)/f'(t)."""
    if t < f.t_inf:
        raise InfiniteValueError(f"f is +inf at t={t} < t_inf")
    v = f.value_at(t)
    if math.isinf(v):
        raise InfiniteValueError(f"f is +inf at t={t}")
    if t == f.t_inf:
        raise InfiniteValueError("no derivative at t_inf")
    s = f.slope_at(t)
    if abs(s) < DERIV_TOL:
        raise DerivativeZeroError(f"f'({t}) = {s}")
    return t - v / s


def slope_inverse(f: SlideFunction, target: float) -> float:
    """Bisection for the t with f'(t) = target on the open interior."""
    lo, hi = f.interior_bounds()
    if f.slope_at(lo) >= target:
        return lo
    if f.slope_at(hi) <= target:
        return hi
    while hi - lo > SLOPE_TOL:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f.slope_at(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _case(f: SlideFunction, alpha: float) -> Case:
    s = -alpha
    if s > 0:
        raise NoSupportLineError(f"slope -alpha={s} is positive")
    if f.ctype is CType.DISCONTINUOUS and s <= f.a_f and not math.isinf(f.a_f):
        return Case.BOUNDARY_DISCONTINUOUS
    if f.parabolic and f.b_f <= s < 0:
        return Case.BOUNDARY_PARABOLIC
    if f.a_f < s < f.b_f:
        return Case.INTERIOR
    raise NoSupportLineError(
        f"alpha={alpha} matches no support line case (a_f={f.a_f}, b_f={f.b_f}, "
        f"{f.kind.value}, {f.ctype.value})"
    )


def support_line(f: SlideFunction, alpha: float) -> SupportLine:
    """Support line of slope -alpha, in whichever case applies."""
    case = _case(f, alpha)
    if case is Case.INTERIOR:
        t = slope_inverse(f, -alpha)
        return SupportLine(-alpha, f.value_at(t) + alpha * t, t, case)
    if case is Case.BOUNDARY_DISCONTINUOUS:
        return SupportLine(-alpha, f.limit_at_t_inf + alpha * f.t_inf, f.t_inf, case)
    return SupportLine(-alpha, alpha * f.d, f.d, case)


def s_newton_case(f: SlideFunction, alpha: float):
    """S-Newton value together with its case and tangency abscissa."""
    case = _case(f, alpha)
    if case is Case.BOUNDARY_PARABOLIC:
        return f.d, case, f.d
    if alpha == 0:
        raise DivisionError("alpha = 0")
    if case is Case.INTERIOR:
        t = slope_inverse(f, -alpha)
        return t + f.value_at(t) / alpha, case, t
    return f.t_inf + f.limit_at_t_inf / alpha, case, f.t_inf


def s_newton(f: SlideFunction, alpha: float) -> float:
    """x-intercept of the support line of slope -alpha."""
    return s_newton_case(f, alpha)[0]


def minimise_conjugate(f: SlideFunction, alpha: float):
    """(min, argmin) of f(t) + alpha t over the open interior."""
    lo, hi = f.interior_bounds()
    res = minimize_scalar(
        lambda t: f.value_at(t) + alpha * t, bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-11, "maxiter": 1000},
    )
    # convex objective: a minimum pinned at the search edge is taken exactly there
    cands = [(float(res.fun), float(res.x))]
    for t in (lo, hi):
        cands.append((f.value_at(t) + alpha * t, t))
    return min(cands)


def legendre(f: SlideFunction, alpha: float) -> float:
    """F(alpha) = inf_t f(t) + alpha t by the five-case formula.

    The interior case is found by derivative-free minimisation so that it does
    not share code with the slope inversion used by ``s_newton``.
    """
    s = -alpha
    if s > 0:
        return -math.inf
    if math.isinf(f.t_inf) and s <= f.a_f:
        if s < f.a_f:
            return -math.inf
        return one_sided_limit(lambda t: f.value_at(t) + alpha * t, f.t_inf, +1, "F at -inf")
    if f.ctype is CType.DISCONTINUOUS and s <= f.a_f:
        return f.limit_at_t_inf + alpha * f.t_inf
    if f.parabolic and f.b_f <= s:
        return alpha * f.d
    if not f.parabolic and s >= f.b_f:
        if s > f.b_f:
            return -math.inf
        return one_sided_limit(lambda t: f.value_at(t) + alpha * t, math.inf, +1, "F at +inf")
    return minimise_conjugate(f, alpha)[0]


# ---------------------------------------------------------------- analytic families


def _power_spec(c, gamma, d, t_inf):
    def value(t):
        return c * (d - t) ** gamma if t < d else 0.0

    def slope(t):
        return -c * gamma * (d - t) ** (gamma - 1) if t < d else 0.0

    return SlideSpec(
        value, slope, t_inf, Kind.PARABOLIC, d=d,
        a_f=-c * gamma * (d - t_inf) ** (gamma - 1), b_f=0.0,
        limit_at_t_inf=c * (d - t_inf) ** gamma,
        family="power", params={"c": c, "gamma": gamma, "d": d, "t_inf": t_inf},
    )


def _product_spec(r1, r2, t_inf):
    # f(t) = (r1 - t)(r2 - t) on (t_inf, r1), zero afterwards; needs r1 < r2.
    def value(t):
        return (r1 - t) * (r2 - t) if t < r1 else 0.0

    def slope(t):
        return 2 * t - r1 - r2 if t < r1 else 0.0

    return SlideSpec(
        value, slope, t_inf, Kind.PARABOLIC, d=r1,
        a_f=2 * t_inf - r1 - r2, b_f=r1 - r2,
        limit_at_t_inf=(r1 - t_inf) * (r2 - t_inf),
        family="product", params={"r1": r1, "r2": r2, "t_inf": t_inf},
    )


def _loggeom_spec(q, t_shift):
    # f(t) = log(q^u / (1 - q^u)), u = t - t_shift, 0 < q < 1.
    lq = math.log(q)

    def value(t):
        u = t - t_shift
        return u * lq - math.log(-math.expm1(u * lq))

    def slope(t):
        u = t - t_shift
        return lq / -math.expm1(u * lq)

    return SlideSpec(
        value, slope, t_shift, Kind.NON_PARABOLIC, d=t_shift + math.log(2.0) / -lq,
        a_f=-math.inf, b_f=lq, limit_at_t_inf=math.inf,
        family="loggeom", params={"q": q, "t_shift": t_shift},
    )


_FAMILIES = {"power": _power_spec, "product": _product_spec, "loggeom": _loggeom_spec}


def power_slide(c=1.0, gamma=2.0, d=1.0, t_inf=0.0) -> SlideFunction:
    """Parabolic discontinuous slide c (d - t)^gamma on (t_inf, d)."""
    return build_slide(_power_spec(c, gamma, d, t_inf))


def product_slide(r1=1.0, r2=2.0, t_inf=0.0) -> SlideFunction:
    """Parabolic slide (r1 - t)(r2 - t) with a corner at d = r1."""
    return build_slide(_product_spec(r1, r2, t_inf))


def loggeom_slide(q=0.5, t_shift=0.0) -> SlideFunction:
    """Non-parabolic continuous slide log(q^u/(1-q^u)); q=1/2 is dyadic Luroth."""
    return build_slide(_loggeom_spec(q, t_shift))


def slide_from_record(rec: dict) -> SlideFunction:
    """Rebuild an analytic-family slide from its structured record."""
    fam = rec.get("family")
    if fam not in _FAMILIES:
        raise ValidationError(f"unknown slide family {fam!r}")
    spec = _FAMILIES[fam](**rec.get("params", {}))
    f = build_slide(spec)
    if "kind" in rec and rec["kind"] != f.kind.value:
        raise ValidationError("record kind disagrees with family")
    return f


def sample(f: SlideFunction, ts):
    """Rows (t, f, f') on a grid; slope is nan where undefined."""
    rows = []
    for t in ts:
        v = f.value_at(t)
        try:
            s = f.slope_at(t)
        except DomainError:
            s = math.nan
        rows.append((float(t), v, s))
    return rows
