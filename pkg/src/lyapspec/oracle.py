"""Brute-force level-set oracle for finite linear (Luroth-type) systems.

All words of a fixed depth are enumerated.  Those whose Birkhoff average of
log(1/a) lies within delta of alpha form the level set, and the cover exponent
s solves sum |I_w|^s = 1 over them.  The reference value comes from the closed
form pressure log sum a_i^t, conjugated independently of the slide module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ._parallel import ordered_map
from .errors import EmptyLevelSetError, OutOfDomainError, ValidationError

MAX_BRANCHES = 12
MAX_DEPTH = 16
MAX_WORDS = 50_000_000
S_RANGE = (0.0, 1.5)
BISECTIONS = 60
SUFFIX_WORDS = 2_000_000


def _check_lengths(lengths):
    a = np.asarray(lengths, dtype=float).ravel()
    if not 2 <= a.size <= MAX_BRANCHES:
        raise ValidationError(f"need 2..{MAX_BRANCHES} lengths, got {a.size}")
    if np.any(~(a > 0)) or np.any(a >= 1):
        raise ValidationError("lengths must lie in (0, 1)")
    if math.fsum(a.tolist()) > 1 + 1e-12:
        raise ValidationError("lengths sum to more than 1")
    return a


def finite_pressure_exact(lengths, t) -> float:
    """log sum a_i^t with compensated summation."""
    a = _check_lengths(lengths)
    e = float(t) * np.log(a)
    m = float(e.max())
    return m + math.log(math.fsum(np.exp(e - m).tolist()))


def finite_pressure_slope(lengths, t) -> float:
    """sum a_i^t log a_i / sum a_i^t."""
    a = _check_lengths(lengths)
    la = np.log(a)
    e = float(t) * la
    w = np.exp(e - e.max())
    return math.fsum((w * la).tolist()) / math.fsum(w.tolist())


def finite_legendre(lengths, alpha) -> float:
    """L(alpha) = (1/alpha) inf_t {log sum a_i^t + alpha t} for a finite system."""
    a = _check_lengths(lengths)
    alpha = float(alpha)
    la = -np.log(a)
    lo, hi = float(la.min()), float(la.max())
    if alpha <= 0 or alpha < lo - 1e-12 or alpha > hi + 1e-12:
        raise OutOfDomainError(f"alpha={alpha} outside [{lo}, {hi}]")
    if abs(alpha - hi) <= 1e-12 or abs(alpha - lo) <= 1e-12:
        edge = hi if abs(alpha - hi) <= 1e-12 else lo
        mult = int(np.sum(np.abs(la - edge) <= 1e-12))
        return math.log(mult) / alpha
    if hi - lo < 1e-12:
        return math.log(a.size) / alpha
    g = lambda t: finite_pressure_slope(a, t) + alpha
    t_lo, t_hi = -1.0, 1.0
    while g(t_lo) > 0:
        t_lo *= 2
    while g(t_hi) < 0:
        t_hi *= 2
    t = brentq(g, t_lo, t_hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return t + finite_pressure_exact(a, t) / alpha


def finite_legendre_inf(lengths, alpha) -> float:
    """alpha L(alpha) as a direct numerical infimum (second, independent route)."""
    a = _check_lengths(lengths)
    res = minimize_scalar(lambda t: finite_pressure_exact(a, t) + alpha * t,
                          bracket=(-1.0, 1.0), method="brent", options={"xtol": 1e-12})
    return float(res.fun)


@dataclass(frozen=True)
class LevelSetEstimate:
    """Finite-depth cover of the level set {lambda = alpha}."""

    alpha: float
    delta: float
    depth: int
    count: int
    cover_exponent: float
    legendre_value: float


def _suffix_logs(la, k):
    """log-lengths (sum of log a) of all words of length k, lexicographic."""
    out = np.zeros(1)
    for _ in range(k):
        out = (out[:, None] + la[None, :]).ravel()
    return out


def _level_block(prefix_logs, suffix, n, alpha, delta):
    """Distinct matching log-lengths with multiplicities for one prefix block."""
    logs = (prefix_logs[:, None] + suffix[None, :]).ravel()
    hit = np.abs(-logs / n - alpha) < delta
    if not hit.any():
        return np.empty(0), np.empty(0, dtype=np.int64)
    v, c = np.unique(logs[hit], return_counts=True)
    return v, c


def _level_counts(a, alpha, delta, depth, workers=None):
    la = np.log(a)
    m = a.size
    k_suf = depth
    while m ** k_suf > SUFFIX_WORDS:
        k_suf -= 1
    suffix = _suffix_logs(la, k_suf)
    prefix = _suffix_logs(la, depth - k_suf)
    per = max(1, SUFFIX_WORDS // suffix.size)
    blocks = [prefix[i:i + per] for i in range(0, prefix.size, per)]
    parts = ordered_map(lambda p: _level_block(p, suffix, depth, alpha, delta), blocks, workers)
    vals = np.concatenate([p[0] for p in parts])
    cnts = np.concatenate([p[1] for p in parts])
    return vals, cnts


def _cover_exponent(vals, cnts):
    """s in S_RANGE with sum cnt exp(s val) = 1, by bisection."""
    lc = np.log(cnts.astype(float))

    def log_sum(s):
        e = lc + s * vals
        mx = float(e.max())
        return mx + math.log(math.fsum(np.exp(e - mx).tolist()))

    lo, hi = S_RANGE
    if log_sum(hi) >= 0:
        return hi
    if log_sum(lo) <= 0:
        return lo
    for _ in range(BISECTIONS):
        mid = 0.5 * (lo + hi)
        if log_sum(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def enumerate_level_set(lengths, alpha, delta=0.02, depth=14, workers=None) -> LevelSetEstimate:
    """Count depth-n cylinders with Birkhoff average within delta of alpha and solve their cover exponent."""
    a = _check_lengths(lengths)
    depth = int(depth)
    alpha, delta = float(alpha), float(delta)
    if not 1 <= depth <= MAX_DEPTH:
        raise ValidationError(f"depth must lie in 1..{MAX_DEPTH}")
    if a.size ** depth > MAX_WORDS:
        raise ValidationError(f"{a.size}^{depth} words exceed the enumeration cap {MAX_WORDS}")
    if not delta > 0:
        raise ValidationError("delta must be positive")
    vals, cnts = _level_counts(a, alpha, delta, depth, workers)
    count = int(cnts.sum())
    if count == 0:
        raise EmptyLevelSetError(f"no depth-{depth} cylinder has average within {delta} of {alpha}")
    try:
        ref = finite_legendre(a, alpha)
    except OutOfDomainError:
        ref = math.nan
    return LevelSetEstimate(alpha, delta, depth, count, _cover_exponent(vals, cnts), ref)


@dataclass(frozen=True)
class OracleRow:
    alpha: float
    count: int
    cover_exponent: float
    legendre_value: float
    abs_dev: float


@dataclass(frozen=True)
class OracleReport:
    rows: List[OracleRow]
    delta: float
    depth: int

    @property
    def max_deviation(self):
        devs = [r.abs_dev for r in self.rows if not math.isnan(r.abs_dev)]
        return max(devs) if devs else math.nan

    @property
    def gaps(self):
        return [r.alpha for r in self.rows if r.count == 0]


def alpha_grid(lengths, steps=11, margin=0.05):
    """Uniform grid strictly inside [min log(1/a), max log(1/a)]."""
    la = -np.log(_check_lengths(lengths))
    lo, hi = float(la.min()) + margin, float(la.max()) - margin
    if steps == 1 or hi <= lo:
        return [0.5 * (lo + hi)] if hi >= lo else [float(la.min())]
    return list(np.linspace(lo, hi, int(steps)))


def oracle_vs_legendre(lengths, alphas, delta=0.02, depth=14, workers=None) -> OracleReport:
    """Cover exponent against the closed-form spectrum on a grid; empty levels are gaps."""
    rows = []
    for alpha in alphas:
        try:
            est = enumerate_level_set(lengths, alpha, delta, depth, workers)
        except EmptyLevelSetError:
            try:
                ref = finite_legendre(lengths, alpha)
            except OutOfDomainError:
                ref = math.nan
            rows.append(OracleRow(float(alpha), 0, math.nan, ref, math.nan))
            continue
        rows.append(OracleRow(est.alpha, est.count, est.cover_exponent, est.legendre_value,
                              abs(est.cover_exponent - est.legendre_value)))
    return OracleReport(rows, float(delta), int(depth))
