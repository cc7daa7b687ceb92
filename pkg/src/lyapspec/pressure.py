"""Topological pressure of MRL maps.

Two kinds of numbers are produced for every t:

* a certified bracket ``[lower, upper]`` from depth-n partition sums.  The sup
  of |(T^n)'|^-t over each cylinder is bounded at its endpoints, symbols above
  the cutoff are bounded analytically, and the sub/super-multiplicativity of
  these sums turns them into bounds on P(t) itself;
* a smooth estimate used as the working curve, from one of four estimators:

  ``SeriesEstimator``    log sum a_n^t, exact for Luroth-type maps;
  ``EndpointEstimator``  midpoint of the endpoint bracket (full Gauss map);
  ``CycleEstimator``     cycle expansion over periodic points (finite Mobius systems);
  ``InducedEstimator``   first return to the complement of the parabolic branch
                         (Renyi and Manneville-Pomeau), P(t) = s with S(t, s) = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import mpmath
import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp, zeta as hurwitz

from ._expsum import ExpSumTable
from ._parallel import ordered_map
from .errors import (
    DivergentError,
    NoRootError,
    UnsupportedTailError,
    ValidationError,
)
from .maps import (
    Family,
    GeometricTail,
    MRLMap,
    PartitionSequence,
    PowerLogTail,
    finite_sequence,
    map_from_record,
)
from .slide import MINUS_INF, CType, Kind, SlideFunction, SlideSpec, build_slide

DEFAULT_CUTOFF = {1: 20_000, 2: 2_000, 3: 200}
BLOCK_WORDS = 400_000
CYCLE_BUDGET = 30_000_000
CYCLE_MAX_DEPTH = 10
PLATEAU_TOL = 1e-3
ROOT_XTOL = 1e-14


def default_cutoff(depth):
    return DEFAULT_CUTOFF.get(int(depth), 100)


# ---------------------------------------------------------------- series


def _series_logs(seq: PartitionSequence, t, scale=1.0):
    """(estimate, lower, upper) of log sum (scale a_n)^t, in log space."""
    t = float(t)
    shift = t * math.log(scale)
    h = seq.head_array
    head = float(logsumexp(t * np.log(h))) if h.size else -math.inf
    tl = seq.tail
    if tl is None:
        return head + shift, head + shift, head + shift
    if not tl.converges(t):
        return math.inf, math.inf, math.inf
    start = seq.n_head + 1
    if isinstance(tl, GeometricTail):
        lr = t * math.log(tl.ratio)
        lt = t * math.log(tl.scale) + start * lr - math.log(-math.expm1(lr))
        v = float(np.logaddexp(head, lt)) + shift
        return v, v, v
    tb = seq.tail_power_sum(t, start)
    out = []
    for b in (tb.estimate, tb.lower, tb.upper):
        if math.isinf(head):
            out.append(math.log(b) + shift if b > 0 else -math.inf)
        else:
            out.append(head + (math.log1p(math.exp(math.log(b) - head)) if b > 0 else 0.0) + shift)
    return tuple(out)


def pressure_series(seq: PartitionSequence, t):
    """log sum a_n^t with an absolute error bound; +inf where the series diverges."""
    est, lo, hi = _series_logs(seq, t)
    if math.isinf(est):
        return est, 0.0
    return est, max(hi - est, est - lo, 0.0)


def _series_slope(seq: PartitionSequence, t, scale=1.0):
    """d/dt log sum (scale a_n)^t: the weighted mean of log(scale a_n)."""
    t = float(t)
    ls = math.log(scale)
    tl = seq.tail
    h = seq.head_array
    if h.size:
        e = t * np.log(h)
        m = float(e.max())
        w = np.exp(e - m)
        s0 = float(w.sum())
        s1 = float(np.dot(w, np.log(h)))
    else:
        m, s0, s1 = 0.0, 0.0, 0.0
    if tl is not None:
        if not tl.converges(t):
            return -math.inf
        start = seq.n_head + 1
        if isinstance(tl, GeometricTail) and not h.size:
            lr = math.log(tl.ratio)
            return ls + math.log(tl.scale) + start * lr + lr / math.expm1(-t * lr)
        tb = seq.tail_power_sum(t, start).estimate
        if tb > 0:
            s0 += math.exp(math.log(tb) - m)
            s1 -= math.exp(math.log(-seq.tail_log_sum(t, start)) - m)
    return ls + s1 / s0


# ---------------------------------------------------------------- endpoint sums


def _word_exponents(T: MRLMap, first, syms, depth):
    """Endpoint exponents -log|phi_w'| at y=0 and y=1 for words first x syms^(depth-1).

    Returns (c_small, c_large) flattened in lexicographic word order.
    """
    y = np.array([0.0, 1.0])
    ld = np.zeros(2)
    for k in range(depth):
        a = first if k == depth - 1 else syms
        a = np.asarray(a).reshape((-1,) + (1,) * y.ndim)
        ld = ld + T.inv_log_deriv(a, y)
        y = T.inv(a, y)
    c = -ld
    return c.min(axis=-1).ravel(), c.max(axis=-1).ravel()


def _symbol_bounds(T: MRLMap, t, syms):
    """Per-symbol bounds s_a >= sup |phi_a'|^t (t >= 0), as an array over syms."""
    syms = np.asarray(syms)
    if T.family in (Family.GAUSS, Family.RENYI):
        return syms.astype(float) ** (-2.0 * t)
    seq, sc = T._lum()
    out = np.ones(syms.shape)
    lin = syms > 0
    out[lin] = (sc * seq.lengths_of(syms[lin])) ** t
    return out


def _symbol_tail(T: MRLMap, t, cutoff):
    """(sum, d/dt sum) of per-symbol bounds over symbols above the cutoff."""
    if T.branches is not None:
        extra = np.array([b for b in T.branches if b > cutoff])
        if extra.size == 0:
            return 0.0, 0.0
        s = _symbol_bounds(T, t, extra)
        if T.family in (Family.GAUSS, Family.RENYI):
            lg = -2.0 * np.log(extra)
        else:
            lg = np.where(extra > 0, np.log(np.maximum(_symbol_bounds(T, 1.0, extra), 1e-300)), 0.0)
        return float(s.sum()), float(np.dot(s, lg))
    if T.family in (Family.GAUSS, Family.RENYI):
        if 2 * t <= 1:
            raise DivergentError(f"symbol tail diverges at t={t} <= 1/2")
        z = mpmath.zeta(2 * t, cutoff + 1)
        dz = mpmath.zeta(2 * t, cutoff + 1, 1)
        return float(z), float(2 * dz)
    seq, sc = T._lum()
    if not seq.tail.converges(t):
        raise DivergentError(f"symbol tail diverges at t={t}")
    tb = seq.tail_power_sum(t, cutoff + 1)
    tl = seq.tail_log_sum(t, cutoff + 1)
    return sc ** t * tb.upper, sc ** t * (tl + math.log(sc) * tb.estimate)


class EndpointSums:
    """Endpoint exponent tables for all depth-n words with symbols up to a cutoff."""

    def __init__(self, T: MRLMap, depth: int, cutoff: int):
        self.map = T
        self.depth = int(depth)
        self.cutoff = int(cutoff)
        syms = T.symbols(None if T.branches is not None else cutoff)
        self.symbols = syms
        per_block = max(1, BLOCK_WORDS // max(1, syms.size ** (self.depth - 1)))
        blocks = [syms[i:i + per_block] for i in range(0, syms.size, per_block)]
        parts = ordered_map(lambda b: _word_exponents(T, b, syms, self.depth), blocks)
        ones = [np.ones(p[0].size) for p in parts]
        self.small = ExpSumTable([(p[0], w) for p, w in zip(parts, ones)])
        self.large = ExpSumTable([(p[1], w) for p, w in zip(parts, ones)])
        self.count = self.small.count

    def _tail(self, t):
        """(tail, d tail/dt) for words using at least one symbol above the cutoff."""
        T = self.map
        if T.branches is not None:
            return 0.0, 0.0
        if t < 0:
            raise DivergentError("negative t on an infinite branch set")
        n = self.depth
        s = _symbol_bounds(T, t, self.symbols)
        zin = float(s.sum())
        if T.family in (Family.GAUSS, Family.RENYI):
            dzin = float(np.dot(s, -2.0 * np.log(self.symbols)))
        else:
            seq, sc = T._lum()
            lg = np.zeros(s.shape)
            lin = self.symbols > 0
            lg[lin] = np.log(sc * seq.lengths_of(self.symbols[lin]))
            dzin = float(np.dot(s, lg))
        zout, dzout = _symbol_tail(T, t, self.cutoff)
        tail = zin ** n * math.expm1(n * math.log1p(zout / zin))
        dtail = n * ((zin + zout) ** (n - 1) * (dzin + dzout) - zin ** (n - 1) * dzin)
        return tail, dtail

    def bounds(self, t):
        """(lower, upper, d lower/dt, d upper/dt) for P(t)."""
        t = float(t)
        n = self.depth
        lo_tab, hi_tab = (self.large, self.small) if t >= 0 else (self.small, self.large)
        llo, slo = lo_tab.log_sum_and_slope(t)
        lhi, shi = hi_tab.log_sum_and_slope(t)
        tail, dtail = self._tail(t)
        if tail:
            r = tail * math.exp(-lhi)
            upper = (lhi + math.log1p(r)) / n
            dupper = (shi + dtail * math.exp(-lhi)) / (1.0 + r) / n
        else:
            upper, dupper = lhi / n, shi / n
        return llo / n, upper, slo / n, dupper


@lru_cache(maxsize=8)
def endpoint_sums(T: MRLMap, depth: int, cutoff: int) -> EndpointSums:
    return EndpointSums(T, depth, cutoff)


def partition_sum_bounds(T: MRLMap, t, depth=2, cutoff=None):
    """Certified bracket (lower, upper) for P(t) from depth-n endpoint sums."""
    depth = int(depth)
    if depth < 1:
        raise ValidationError("depth must be at least 1")
    cutoff = default_cutoff(depth) if cutoff is None else int(cutoff)
    if cutoff < 1:
        raise ValidationError("cutoff must be positive")
    t = float(t)
    if T.family is Family.LUROTH:
        seq = _luroth_sequence(T)
        est, lo, hi = _series_logs(seq, t)
        if math.isinf(est):
            raise DivergentError(f"series diverges at t={t}")
        return lo, hi
    if T.branches is None and T.family in (Family.GAUSS, Family.RENYI) and t <= 0.5:
        raise DivergentError(f"symbol tail diverges at t={t} <= 1/2")
    lower, upper, _, _ = endpoint_sums(T, depth, cutoff).bounds(t)
    if T.parabolic_point is not None:
        lower = max(lower, 0.0)
        upper = max(upper, 0.0)
    return lower, upper


def _luroth_sequence(T: MRLMap):
    seq = T.partition
    if T.branches is None:
        return seq
    return finite_sequence(seq.lengths_of(np.array(T.branches)))


# ---------------------------------------------------------------- estimators


class Estimator:
    """Smooth pressure estimate with boundary data.

    ``value`` and ``slope`` are memoised.  ``boundary`` returns analytic
    values for a_f, b_f and the limit at t_inf where known (None otherwise).
    """

    name = "estimator"
    kind = Kind.NON_PARABOLIC
    t_inf = MINUS_INF

    def __init__(self):
        self._vals = {}
        self._slopes = {}

    def value(self, t):
        t = float(t)
        v = self._vals.get(t)
        if v is None:
            v = math.inf if t < self.t_inf else self._value(t)
            self._vals[t] = v
        return v

    def slope(self, t):
        t = float(t)
        v = self._slopes.get(t)
        if v is None:
            v = self._slope(t)
            self._slopes[t] = v
        return v

    def boundary(self):
        return {}

    @property
    def d(self):
        return None

    def _value(self, t):
        raise NotImplementedError

    def _slope(self, t):
        raise NotImplementedError


def _power_log_boundary(seq, value_at_t_inf):
    """Analytic a_f and limit at t_inf for power-log tails."""
    tl = seq.tail
    out = {}
    if isinstance(tl, PowerLogTail):
        ratio = tl.q / tl.p
        out["limit_at_t_inf"] = math.inf if ratio <= 1 else value_at_t_inf()
        if ratio <= 2:
            out["a_f"] = -math.inf
    elif isinstance(tl, GeometricTail):
        out["limit_at_t_inf"] = math.inf
        out["a_f"] = -math.inf
    return out


class SeriesEstimator(Estimator):
    """P(t) = log sum (scale a_n)^t for maps with linear branches."""

    name = "series"

    def __init__(self, seq: PartitionSequence, scale=1.0):
        super().__init__()
        self.seq = seq
        self.scale = float(scale)
        self.t_inf = seq.abscissa

    def value(self, t):
        t = float(t)
        if t == self.t_inf:
            return _series_logs(self.seq, t, self.scale)[0]
        return super().value(t)

    def _value(self, t):
        return _series_logs(self.seq, t, self.scale)[0]

    def _slope(self, t):
        return _series_slope(self.seq, t, self.scale)

    def boundary(self):
        seq = self.seq
        h = seq.head_array
        tops = list(h)
        if seq.tail is not None:
            tops.append(float(seq.tail.terms(seq.n_head + 1)))
        out = {"b_f": math.log(self.scale * max(tops))}
        if seq.finite:
            out["a_f"] = math.log(self.scale * float(h.min()))
            out["limit_at_t_inf"] = math.inf
        else:
            out.update(_power_log_boundary(seq, lambda: self.value(self.t_inf)))
        return out


class EndpointEstimator(Estimator):
    """Midpoint of the certified endpoint bracket."""

    name = "endpoint-midpoint"

    def __init__(self, T: MRLMap, depth: int, cutoff: int):
        super().__init__()
        self.map = T
        self.depth = depth
        self.cutoff = cutoff
        self.t_inf = 0.5 if T.branches is None else MINUS_INF
        self.sums = endpoint_sums(T, depth, cutoff)

    def _both(self, t):
        if t <= self.t_inf:
            return math.inf, -math.inf
        lo, hi, dlo, dhi = self.sums.bounds(t)
        return 0.5 * (lo + hi), 0.5 * (dlo + dhi)

    def _value(self, t):
        return self._both(t)[0]

    def _slope(self, t):
        return self._both(t)[1]

    def boundary(self):
        n = self.depth
        out = {"b_f": -0.5 * (self.sums.small.c_min + self.sums.large.c_min) / n}
        if self.map.branches is None:
            out.update(a_f=-math.inf, limit_at_t_inf=math.inf)
        else:
            out.update(a_f=-0.5 * (self.sums.small.c_max + self.sums.large.c_max) / n,
                       limit_at_t_inf=math.inf)
        return out


# -- cycle expansion


def _mobius(T: MRLMap, a):
    """2x2 integer matrices of the inverse branches as Mobius maps."""
    a = np.asarray(a, dtype=float)
    M = np.zeros(a.shape + (2, 2))
    if T.family is Family.GAUSS:
        M[..., 0, 1] = 1.0
        M[..., 1, 0] = 1.0
        M[..., 1, 1] = a
    else:
        M[..., 0, 0] = 1.0
        M[..., 0, 1] = a - 1.0
        M[..., 1, 0] = 1.0
        M[..., 1, 1] = a
    return M


def _cycle_block(T: MRLMap, first, syms, n):
    """(c, weight) for the period-n points of words first x syms^(n-1)."""
    P = _mobius(T, first)
    M = _mobius(T, syms)
    for _ in range(n - 1):
        P = np.einsum("...ij,bjk->...bik", P, M)
    P = P.reshape(-1, 2, 2)
    a, b, c, d = P[:, 0, 0], P[:, 0, 1], P[:, 1, 0], P[:, 1, 1]
    disc = np.sqrt((d - a) ** 2 + 4.0 * b * c)
    y = np.where(b == 0, 0.0, 2.0 * b / np.where(b == 0, 1.0, (d - a) + disc))
    det = a * d - b * c
    den = c * y + d
    expo = 2.0 * np.log(den)
    dphi = det / den ** 2
    return expo, 1.0 / (1.0 - dphi)


class CycleEstimator(Estimator):
    """Cycle expansion of det(1 - z L_t) for a finite Mobius system."""

    name = "cycle-expansion"

    def __init__(self, T: MRLMap, budget=CYCLE_BUDGET):
        super().__init__()
        self.map = T
        syms = np.array(T.branches)
        m = syms.size
        depth, total = 0, 0
        while depth < CYCLE_MAX_DEPTH and total + m ** (depth + 1) <= budget:
            depth += 1
            total += m ** depth
        self.depth = max(depth, 1)
        self.tables = []
        lo, hi = math.inf, -math.inf
        for n in range(1, self.depth + 1):
            per = max(1, BLOCK_WORDS // max(1, m ** (n - 1)))
            blocks = [syms[i:i + per] for i in range(0, m, per)]
            parts = ordered_map(lambda b, n=n: _cycle_block(T, b, syms, n), blocks)
            tab = ExpSumTable(parts)
            self.tables.append(tab)
            lo = min(lo, tab.c_min / n)
            hi = max(hi, tab.c_max / n)
        self.exp_min, self.exp_max = lo, hi

    def _solve(self, t):
        mu = self.exp_min if t >= 0 else self.exp_max
        D = self.depth
        tr = np.zeros(D + 1)
        dtr = np.zeros(D + 1)
        for n, tab in enumerate(self.tables, start=1):
            ls, sl = tab.log_sum_and_slope(t)
            tr[n] = math.exp(ls + t * n * mu)
            dtr[n] = tr[n] * (sl + n * mu)
        lg = np.zeros(D + 1)
        dlg = np.zeros(D + 1)
        lg[1:] = -tr[1:] / np.arange(1, D + 1)
        dlg[1:] = -dtr[1:] / np.arange(1, D + 1)
        c = np.zeros(D + 1)
        dc = np.zeros(D + 1)
        c[0] = 1.0
        for k in range(1, D + 1):
            j = np.arange(1, k + 1)
            c[k] = np.sum(j * lg[j] * c[k - j]) / k
            dc[k] = np.sum(j * (dlg[j] * c[k - j] + lg[j] * dc[k - j])) / k
        roots = np.roots(c[::-1])
        real = roots[(np.abs(roots.imag) <= 1e-9 * np.abs(roots)) & (roots.real > 0)].real
        if real.size == 0:
            raise NoRootError(f"cycle expansion has no positive root at t={t}")
        z = float(real.min())
        pw = z ** np.arange(D + 1)
        dz_dt = -np.dot(dc, pw) / np.dot(c[1:] * np.arange(1, D + 1), pw[:-1])
        return -math.log(z) - t * mu, -dz_dt / z - mu

    def _value(self, t):
        return self._solve(t)[0]

    def _slope(self, t):
        return self._solve(t)[1]

    def boundary(self):
        return {"a_f": -self.exp_max, "b_f": -self.exp_min, "limit_at_t_inf": math.inf}


# -- induced systems


def _expint_integral(gamma, s, x0):
    """Integral of exp(-s x) x^-gamma over [x0, inf) as an mpf (inf when divergent)."""
    if s <= 0:
        if gamma <= 1:
            return mpmath.inf
        return mpmath.mpf(x0) ** (1 - gamma) / (gamma - 1)
    return mpmath.expint(gamma, s * x0) * mpmath.mpf(x0) ** (1 - gamma)


class InducedEstimator(Estimator):
    """P(t) = s where sum_k w_k(t) exp(-s (k+1)) + tail(t, s) = exp(-pre(t)).

    Subclasses supply ``_log_weights(t)`` (pre(t), log w_k) for k = 0..K and
    ``_tail(t, s)`` returning (tail, -d tail/ds) as mpf values.
    """

    name = "induced"
    kind = Kind.PARABOLIC
    K = 1000

    def __init__(self):
        super().__init__()
        self._lw = {}
        self._k1 = np.arange(1, self.K + 2, dtype=float)

    def _weights(self, t):
        r = self._lw.get(t)
        if r is None:
            r = self._log_weights(t)
            self._lw[t] = r
        return r

    def log_s(self, t, s, deriv=False):
        """log S(t, s) and optionally d/ds log S."""
        pre, lw = self._weights(t)
        if math.isinf(pre):
            return (pre, 0.0) if deriv else pre
        e = lw - s * self._k1
        m = float(e.max())
        g = np.exp(e - m)
        s0 = float(g.sum())
        s1 = float(np.dot(g, self._k1))
        head_bound = math.exp(float(lw[-1]) - s * (self.K + 1) - m)
        if s * self.K > 60 and head_bound * 1e3 / max(s, 1e-300) < 1e-17 * s0:
            tail, dtail = 0.0, 0.0
        else:
            tm, dm = self._tail(t, s)
            if mpmath.isinf(tm) or mpmath.isinf(dm):
                if mpmath.isinf(tm):
                    return (math.inf, -math.inf) if deriv else math.inf
                tail, dtail = float(tm * mpmath.exp(-m)), math.inf
            else:
                tail, dtail = float(tm * mpmath.exp(-m)), float(dm * mpmath.exp(-m))
        val = pre + m + math.log(s0 + tail)
        if not deriv:
            return val
        return val, -(s1 + dtail) / (s0 + tail)

    @cached_property
    def d(self):
        """Root of S(t, 0) = 1."""
        f = lambda t: self.log_s(t, 0.0)
        lo = self.t_inf + 1e-9 if not math.isinf(self.t_inf) else 0.0
        step = 1.0
        while not f(lo) > 0:
            if not math.isinf(self.t_inf):
                raise NoRootError("induced sum is below one just above t_inf")
            lo -= step
            step *= 2
        hi = max(lo, 0.0) + 1.0
        while f(hi) > 0:
            hi += 1.0
        return brentq(f, lo, hi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)

    def _root(self, t):
        if math.isinf(self._weights(t)[0]):
            return math.inf
        if t >= self.d:
            return 0.0
        f = lambda s: self.log_s(t, s)
        lo = 0.0
        if math.isinf(f(lo)):
            lo = 1e-12
            if not f(lo) > 0:
                return lo
        hi = 1.0
        while f(hi) > 0:
            lo, hi = hi, 2 * hi
        return brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)

    def _value(self, t):
        return self._root(t)

    def _dlog_dt(self, t, s):
        h = 1e-5 * max(1.0, abs(t))
        lo = t - h
        if not math.isinf(self.t_inf) and lo <= self.t_inf:
            h = 0.5 * (t - self.t_inf)
            lo = t - h
        return (self.log_s(t + h, s) - self.log_s(lo, s)) / (2 * h)

    def _slope(self, t):
        if t >= self.d:
            return 0.0
        s = self.value(t)
        _, ds = self.log_s(t, s, deriv=True)
        if math.isinf(ds):
            return 0.0
        return -self._dlog_dt(t, s) / ds

    def boundary(self):
        d = self.d
        _, ds = self.log_s(d, 0.0, deriv=True)
        b = 0.0 if math.isinf(ds) else min(-self._dlog_dt(d, 0.0) / ds, 0.0)
        return {"b_f": b}


class InducedRenyi(InducedEstimator):
    """Renyi map induced on [1/2, 1): symbols (a, k), a >= 2, k >= 0 parabolic steps."""

    name = "induced-renyi"
    J = 8

    def __init__(self, symbols=None):
        super().__init__()
        k = np.arange(self.K + 1, dtype=float)
        u1, u2 = 1.0 / (k + 2), 1.0 / (k + 1)
        self.u1, self.u2 = u1, u2
        self.log2d = np.log(2.0 * (u2 - u1))
        self.ubar = 0.5 * (u1 + u2)
        self.eps2 = (0.5 * (u2 - u1)) ** 2
        self.symbols = None if symbols is None else np.array(sorted(symbols), dtype=float)
        self.t_inf = 0.5 if symbols is None else MINUS_INF

    def _log_weights(self, t):
        if self.symbols is None:
            if t <= 0.5:
                return math.inf, None
            acc = np.zeros(self.K + 1)
            coef = 1.0
            for j in range(self.J):
                acc += coef * self.eps2 ** j * hurwitz(2 * t + 2 * j, 2.0 + self.ubar)
                coef *= (t + j) / (j + 1)
            inner = np.log(acc)
        else:
            a = self.symbols[:, None]
            inner = logsumexp(-t * np.log((a + self.u1) * (a + self.u2)), axis=0)
        return 0.0, t * self.log2d + inner

    @lru_cache(maxsize=4096)
    def _zsums(self, t):
        if self.symbols is None:
            return tuple(mpmath.zeta(2 * t + j, 2) for j in range(3))
        a = [mpmath.mpf(float(v)) for v in self.symbols]
        return tuple(mpmath.fsum(v ** (-2 * t - j) for v in a) for j in range(3))

    def _tail(self, t, s):
        z0, z1, z2 = self._zsums(t)
        X = self.K + 2.0
        g = 2 * t
        coefs = (z0, -2 * t * z1, t * z0 / 4 + t * (2 * t + 1) * z2)
        body = mpmath.fsum(c * _expint_integral(g + i, s, X) for i, c in enumerate(coefs))
        lead = z0 * mpmath.exp(-s * X) * mpmath.mpf(X) ** (-g)
        corr = lead * (g / X + s) / 24
        pref = mpmath.mpf(2) ** t * mpmath.exp(s / 2)
        tail = pref * (body - corr)
        dbody = mpmath.fsum(c * _expint_integral(g + i - 1, s, X) for i, c in enumerate(coefs))
        dtail = pref * dbody - tail / 2
        return tail, dtail


@lru_cache(maxsize=8)
def _mp_orbit(s, K):
    """x_0 = 1, x_{k+1} + x_{k+1}^(1+s) = x_k for k = 0..K."""
    x = np.empty(K + 2)
    x[0] = 1.0
    v = 0.6
    for k in range(K + 1):
        y = x[k]
        v = min(v, y)
        for _ in range(60):
            f = v + v ** (1 + s) - y
            nv = v - f / (1 + (1 + s) * v ** s)
            if nv <= 0:
                nv = 0.5 * v
            if abs(nv - v) <= 1e-16 * v:
                v = nv
                break
            v = nv
        x[k + 1] = v
    return x


class InducedMP(InducedEstimator):
    """Manneville-Pomeau map induced on the linear part [c, 1].

    S(t, s) = A(t) G(t, s) with A(t) = sum a_n^t over the linear branches and
    G(t, s) = sum_k g_k^t exp(-s (k+1)), g_k = x_{k+1}^(1+s') the length of the
    parabolic cylinder entered after the linear step.
    """

    name = "induced-mp"
    K = 20_000

    def __init__(self, sp: float, seq: PartitionSequence):
        super().__init__()
        self.sp = float(sp)
        self.seq = seq
        self.t_inf = seq.abscissa
        x = _mp_orbit(self.sp, self.K)
        self.log_g = (1 + self.sp) * np.log(x[1:])
        xk = x[self.K]
        self.k0 = xk ** (-self.sp) / self.sp - self.K

    def value(self, t):
        t = float(t)
        if t == self.t_inf and not self.seq.finite:
            return self._root(t)
        return super().value(t)

    def _log_weights(self, t):
        pre = _series_logs(self.seq, t)[0]
        return pre, t * self.log_g

    def _tail(self, t, s):
        sp = self.sp
        g = t * (1 + sp) / sp
        Z = self.K + 2 + self.k0 - 0.5
        pref = mpmath.exp(s * self.k0) * mpmath.mpf(sp) ** (-g)
        lead = mpmath.exp(-s * Z) * mpmath.mpf(Z) ** (-g)
        tail = pref * (_expint_integral(g, s, Z) - lead * (g / Z + s) / 24)
        dtail = pref * _expint_integral(g - 1, s, Z) - self.k0 * tail
        return tail, dtail

    def boundary(self):
        out = super().boundary()
        if not self.seq.finite:
            out.update(_power_log_boundary(self.seq, lambda: self.value(self.t_inf)))
        else:
            out["limit_at_t_inf"] = math.inf
        return out


def make_estimator(T: MRLMap, depth=2, cutoff=None) -> Estimator:
    """Choose the estimator matching the map's structure."""
    cutoff = default_cutoff(depth) if cutoff is None else int(cutoff)
    fam = T.family
    if fam is Family.LUROTH:
        return SeriesEstimator(_luroth_sequence(T))
    if fam is Family.MP:
        seq = T.partition
        if T.branches is not None:
            lin = np.array([b for b in T.branches if b > 0])
            seq = finite_sequence(seq.lengths_of(lin)) if lin.size else None
        if T.parabolic_point is None:
            return SeriesEstimator(seq, 1.0 - T.c)
        if seq is None:
            raise ValidationError("a single parabolic branch has no repeller")
        return InducedMP(T.s, seq)
    if T.branches is None:
        if fam is Family.GAUSS:
            return EndpointEstimator(T, depth, cutoff)
        return InducedRenyi()
    if T.parabolic_point is not None:
        others = [b for b in T.branches if b != 1]
        if not others:
            raise ValidationError("a single parabolic branch has no repeller")
        return InducedRenyi(others)
    return CycleEstimator(T)


# ---------------------------------------------------------------- structure


def detect_t_inf(T: MRLMap) -> float:
    """Abscissa of convergence of the pressure (minus infinity for finite systems)."""
    if T.branches is not None:
        return MINUS_INF
    if T.mr_constants is not None:
        return 1.0 / T.mr_constants[0]
    seq = T.partition
    if seq.tail is None:
        if abs(seq.total - 1.0) > 1e-9:
            raise UnsupportedTailError(
                f"partition head sums to {seq.total:.12g}; an infinite tail must be given explicitly")
        return MINUS_INF
    return float(seq.abscissa)


def classify_type(T: MRLMap) -> CType:
    """Continuous iff P(t) -> +inf as t -> t_inf+."""
    detect_t_inf(T)
    if T.branches is not None or T.mr_constants is not None:
        return CType.CONTINUOUS
    tl = T.partition.tail
    if isinstance(tl, PowerLogTail) and tl.q / tl.p > 1:
        return CType.DISCONTINUOUS
    return CType.CONTINUOUS


def truncated_pressure(T: MRLMap, branches: int, t) -> float:
    """Pressure of the sub-system on the first ``branches`` branches."""
    branches = int(branches)
    if branches < 1:
        raise ValidationError("branches must be at least 1")
    sub = T.first_branches(branches)
    return _estimator_for(sub).value(float(t))


@lru_cache(maxsize=32)
def _estimator_for(T: MRLMap, depth=2, cutoff=None) -> Estimator:
    return make_estimator(T, depth, cutoff)


# ---------------------------------------------------------------- curves


@dataclass(frozen=True, eq=False)
class PressureCurve:
    """Sampled pressure with certified brackets and the validated slide built from it."""

    map: MRLMap
    t: np.ndarray
    p_lower: np.ndarray
    p_upper: np.ndarray
    p_mid: np.ndarray
    p_prime: np.ndarray
    t_inf: float
    d: float
    kind: Kind
    ctype: CType
    meta: dict = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, PressureCurve):
            return NotImplemented
        arrays = ("t", "p_lower", "p_upper", "p_mid", "p_prime")
        return (
            self.map == other.map
            and all(np.array_equal(getattr(self, a), getattr(other, a)) for a in arrays)
            and self.t_inf == other.t_inf and self.d == other.d
            and self.kind == other.kind and self.ctype == other.ctype
            and self.meta == other.meta
        )

    __hash__ = None

    @property
    def classification(self):
        return self.kind, self.ctype

    @property
    def width(self):
        return self.p_upper - self.p_lower

    @cached_property
    def estimator(self) -> Estimator:
        return _estimator_for(self.map, self.meta.get("depth", 2), self.meta.get("cutoff"))

    @cached_property
    def slide(self) -> SlideFunction:
        return _build_curve_slide(self.map, self.estimator, self.t_inf, self.d, self.kind)

    def width_at(self, t):
        """Bracket width at t, interpolated on the grid (inf outside it)."""
        w = self.width
        ok = np.isfinite(w)
        if not ok.any() or t < self.t[0] or t > self.t[-1]:
            return math.inf
        return float(np.interp(t, self.t[ok], w[ok]))

    def to_record(self):
        """JSON-ready record; non-finite floats become the strings inf, -inf, nan."""
        return {
            "map": self.map.record(),
            "t_inf": encode_float(self.t_inf),
            "d": encode_float(self.d),
            "kind": self.kind.value,
            "ctype": self.ctype.value,
            "estimator_meta": {k: encode_float(v) for k, v in sorted(self.meta.items())},
            "columns": {
                name: [encode_float(v) for v in getattr(self, name)]
                for name in CURVE_COLUMNS
            },
        }

    @classmethod
    def from_record(cls, rec):
        try:
            cols = {name: np.array([decode_float(v) for v in rec["columns"][name]], dtype=float)
                    for name in CURVE_COLUMNS}
            meta = {k: decode_float(v) for k, v in rec.get("estimator_meta", {}).items()}
            return cls(
                map_from_record(rec["map"]), cols["t"], cols["p_lower"], cols["p_upper"],
                cols["p_mid"], cols["p_prime"], decode_float(rec["t_inf"]), decode_float(rec["d"]),
                Kind(rec["kind"]), CType(rec["ctype"]), meta,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed curve record: {exc}") from None


CURVE_COLUMNS = ("t", "p_lower", "p_upper", "p_mid", "p_prime")


def encode_float(x):
    if isinstance(x, (float, np.floating)) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, np.floating):
        return float(x)
    return x


def decode_float(x):
    if x in ("inf", "-inf", "nan"):
        return float(x)
    return x


def _build_curve_slide(T, est, t_inf, d, kind) -> SlideFunction:
    over = est.boundary()
    spec = SlideSpec(
        value=est.value, slope=est.slope, t_inf=t_inf, kind=kind, d=d,
        a_f=over.get("a_f"), b_f=over.get("b_f"), limit_at_t_inf=over.get("limit_at_t_inf"),
        family=f"pressure:{T.name}", params={"estimator": est.name},
    )
    return build_slide(spec)


def _root_on_grid(t, mid, est, kind, tol=PLATEAU_TOL):
    """d from midpoints: sign change refined on the estimator, or plateau start."""
    fin = np.isfinite(mid)
    if kind is Kind.PARABOLIC:
        flat = np.flatnonzero(fin & (mid <= tol))
        if flat.size == 0:
            raise NoRootError("no plateau on the grid")
        if est.d is not None:
            return float(est.d)
        i = int(flat[0])
        if i == 0:
            raise NoRootError("plateau starts at or before the first grid point")
        lo, hi = float(t[i - 1]), float(t[i])
        for _ in range(200):
            m = 0.5 * (lo + hi)
            if est.value(m) > 0:
                lo = m
            else:
                hi = m
            if hi - lo <= ROOT_XTOL:
                break
        return hi
    pos = fin & (mid > 0)
    neg = fin & (mid <= 0)
    idx = np.flatnonzero(pos[:-1] & neg[1:])
    if idx.size == 0:
        raise NoRootError("midpoints never change sign on the grid")
    i = int(idx[0])
    if mid[i + 1] == 0:
        return float(t[i + 1])
    return brentq(est.value, float(t[i]), float(t[i + 1]), xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)


def find_root_d(curve: PressureCurve) -> float:
    """d = Dim_H of the repeller: the zero (or plateau start) of the pressure."""
    return _root_on_grid(curve.t, curve.p_mid, curve.estimator, curve.kind)


def pressure_curve(T: MRLMap, t_min, t_max, steps=50, depth=2, cutoff=None, tol=PLATEAU_TOL,
                   workers=None) -> PressureCurve:
    """Certified brackets and estimator values on a uniform grid."""
    t_min, t_max, steps, depth = float(t_min), float(t_max), int(steps), int(depth)
    if not (math.isfinite(t_min) and math.isfinite(t_max)) or not t_min < t_max:
        raise ValidationError(f"invalid range [{t_min}, {t_max}]")
    if steps < 2:
        raise ValidationError("steps must be at least 2")
    if depth not in (1, 2, 3, 4):
        raise ValidationError("depth must lie in 1..4")
    cutoff = default_cutoff(depth) if cutoff is None else int(cutoff)
    if cutoff < 10:
        raise ValidationError("cutoff must be at least 10")
    t_inf = detect_t_inf(T)
    ctype = classify_type(T)
    kind = Kind.PARABOLIC if T.parabolic_point is not None else Kind.NON_PARABOLIC
    est = _estimator_for(T, depth, cutoff)
    ts = np.linspace(t_min, t_max, steps)

    def point(t):
        try:
            lo, hi = partition_sum_bounds(T, t, depth, cutoff)
        except DivergentError:
            lo, hi = math.inf, math.inf
        v = est.value(t)
        p = est.slope(t) if math.isfinite(v) and t > t_inf else math.nan
        return lo, hi, v, p

    if T.family is not Family.LUROTH and T.branches is None:
        endpoint_sums(T, depth, cutoff)
    rows = ordered_map(point, list(ts), workers)
    lo, hi, mid, pp = (np.array(c, dtype=float) for c in zip(*rows))
    d = _root_on_grid(ts, mid, est, kind, tol)
    meta = {
        "depth": depth, "cutoff": cutoff, "estimator": est.name,
        "tail": _tail_method(T), "tol": tol,
    }
    curve = PressureCurve(T, ts, lo, hi, mid, pp, t_inf, float(d), kind, ctype, meta)
    curve.__dict__["estimator"] = est
    return curve


def _tail_method(T: MRLMap):
    if T.branches is not None:
        return "none"
    if T.family in (Family.GAUSS, Family.RENYI):
        return "hurwitz-zeta"
    tl = T.partition.tail
    if tl is None:
        return "none"
    return "geometric-closed-form" if isinstance(tl, GeometricTail) else "integral-comparison"
