"""Lyapunov spectrum from a pressure curve.

L(alpha) is computed twice: as F(alpha)/alpha with F the Legendre transform of
the pressure, and as the S-Newton value, the x-intercept of the support line of
slope -alpha.  The two must agree; the S-Newton value is reported.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._parallel import ordered_map
from .errors import (
    ConvergenceError,
    DivisionError,
    NoSupportLineError,
    NotParabolicError,
    OutOfDomainError,
    ZeroAlphaError,
)
from .pressure import PressureCurve
from .slide import Case, CType, legendre, minimise_conjugate, s_newton_case

GUARD = 1e-6
AGREE_TOL = 1e-8
OUT_OF_DOMAIN = "out_of_domain"


@dataclass(frozen=True)
class SpectrumPoint:
    """One level alpha: tangency abscissa, Legendre value F and spectrum L = F / alpha."""

    alpha: float
    t_alpha: float
    F: float
    L: float
    L_err: float
    case: str

    @property
    def ok(self):
        return self.case != OUT_OF_DOMAIN

    @property
    def t_alpha_label(self):
        if self.case == Case.BOUNDARY_DISCONTINUOUS.value:
            return "at_t_inf"
        if self.case == Case.BOUNDARY_PARABOLIC.value:
            return "at_d"
        return self.t_alpha


@dataclass(frozen=True)
class LDomain:
    """Dom(L) = [alpha_min, inf) split into its formula regions (alpha values).

    ``interior`` is the open range of tangency at an interior t; ``dashed_from``
    starts the boundary range through (t_inf, lim P); ``plateau_to`` ends the
    range whose support lines pass through (d, 0).
    """

    alpha_min: float
    alpha_max: float
    interior: tuple
    dashed_from: Optional[float]
    plateau_to: Optional[float]
    parabolic: bool


def dom_L(curve: PressureCurve) -> LDomain:
    f = curve.slide
    lo = -f.b_f
    hi = -f.a_f
    dashed = hi if (f.ctype is CType.DISCONTINUOUS and math.isfinite(hi)) else None
    plateau = lo if f.parabolic else None
    return LDomain(
        alpha_min=0.0 if f.parabolic else lo, alpha_max=math.inf,
        interior=(lo, hi), dashed_from=dashed, plateau_to=plateau, parabolic=f.parabolic,
    )


def _in_guard(f, alpha):
    s = -alpha
    near_a = f.ctype is CType.DISCONTINUOUS and math.isfinite(f.a_f) and abs(s - f.a_f) <= GUARD
    near_b = f.parabolic and abs(s - f.b_f) <= GUARD
    return near_a or near_b


def _guarded(curve, f, alpha):
    """Evaluate every formula that may apply and keep the lowest support line."""
    cands = []
    if f.ctype is CType.DISCONTINUOUS:
        cands.append((f.limit_at_t_inf + alpha * f.t_inf, f.t_inf, Case.BOUNDARY_DISCONTINUOUS))
    if f.parabolic:
        cands.append((alpha * f.d, f.d, Case.BOUNDARY_PARABOLIC))
    F_int, t_int = minimise_conjugate(f, alpha)
    cands.append((F_int, t_int, Case.INTERIOR))
    F, t, case = min(cands, key=lambda c: c[0])
    return F, t, case


def spectrum_point(curve: PressureCurve, alpha: float) -> SpectrumPoint:
    """L(alpha) by the S-Newton map, cross-checked against the Legendre transform."""
    alpha = float(alpha)
    if alpha == 0:
        raise ZeroAlphaError("alpha = 0: use spectrum_at_zero")
    if not alpha > 0 or math.isnan(alpha):
        raise OutOfDomainError(f"alpha={alpha} must be positive")
    f = curve.slide
    if _in_guard(f, alpha):
        F, t, case = _guarded(curve, f, alpha)
        L = F / alpha
        dt = 0.0
    else:
        try:
            L, case, t = s_newton_case(f, alpha)
        except (NoSupportLineError, DivisionError) as exc:
            raise OutOfDomainError(str(exc)) from None
        F = legendre(f, alpha)
        if case is Case.INTERIOR:
            _, t_leg = minimise_conjugate(f, alpha)
            dt = abs(t_leg - t)
        else:
            dt = 0.0
        if not abs(F / alpha - L) <= AGREE_TOL * max(1.0, abs(L)):
            raise ConvergenceError(
                f"Legendre and S-Newton routes disagree at alpha={alpha}: {F / alpha!r} vs {L!r}")
    w = curve.width_at(t)
    return SpectrumPoint(alpha, float(t), float(F), float(L), float(w / alpha + dt), Case(case).value)


def _safe_point(curve, alpha):
    try:
        return spectrum_point(curve, alpha)
    except (OutOfDomainError, ZeroAlphaError):
        nan = math.nan
        return SpectrumPoint(float(alpha), nan, nan, nan, nan, OUT_OF_DOMAIN)


def spectrum_curve(curve: PressureCurve, alpha_min, alpha_max, steps=50, workers=None):
    """Spectrum on a uniform alpha grid; inadmissible levels are flagged, not raised."""
    alpha_min, alpha_max, steps = float(alpha_min), float(alpha_max), int(steps)
    if not alpha_min < alpha_max or steps < 2:
        raise OutOfDomainError(f"invalid alpha range [{alpha_min}, {alpha_max}] x {steps}")
    curve.slide
    alphas = np.linspace(alpha_min, alpha_max, steps)
    return ordered_map(lambda a: _safe_point(curve, a), list(alphas), workers)


def spectrum_at_zero(curve: PressureCurve, levels=20, tol=1e-6) -> float:
    """lim L(alpha) as alpha -> 0+ along alpha = 2^-k."""
    if not curve.slide.parabolic:
        raise NotParabolicError("the spectrum at zero needs a parabolic pressure")
    vals = [spectrum_point(curve, 2.0 ** -k).L for k in range(1, levels + 1)]
    tail = vals[-4:]
    if max(tail) - min(tail) > tol:
        raise ConvergenceError(f"L(2^-k) does not stabilise: {tail}")
    return vals[-1]
