"""Countable Markov interval maps: Gauss, Renyi, Luroth and infinite Manneville-Pomeau.

Every map is a frozen ``MRLMap`` record.  Branch n of a map is an interval
``I_n`` that T sends onto [0, 1]; index 0 is the parabolic branch of the
Manneville-Pomeau family.  A map may be restricted to a finite set of branches,
which gives the finite sub-systems used for truncation.

Luroth-type partitions are ``PartitionSequence`` objects: an explicit head of
lengths followed by an analytic tail, either power-log
``scale (n + shift)^-p log^-q (n + shift)`` or geometric ``scale ratio^n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import NamedTuple, Optional, Union

import mpmath
import numpy as np
from scipy.optimize import brentq

from ._parallel import ordered_map
from .errors import ConvergenceError, DegenerateError, DomainError, ValidationError

# ---------------------------------------------------------------- partitions


def _expint_mp(beta, gamma, u0):
    """Integral of exp(-beta u) u^-gamma over [u0, inf), as an mpf."""
    if beta < 0 or (beta == 0 and gamma <= 1):
        return mpmath.inf
    u0 = mpmath.mpf(u0)
    if beta == 0:
        return u0 ** (1.0 - gamma) / (gamma - 1.0)
    return _expint(gamma, beta * u0) * u0 ** (1.0 - gamma)


def _expint(n, z):
    """E_n(z), falling back to the large-(n + z) expansion where the series stalls."""
    z = mpmath.mpf(z)
    w = z + n
    if w < 1000:
        try:
            return mpmath.expint(n, z)
        except (mpmath.libmp.NoConvergence, ValueError):
            pass
    return mpmath.exp(-z) / w * (1 + n / w ** 2 + n * (n - 2 * z) / w ** 4)


def _expint_tail(beta, gamma, u0, factor=1.0):
    """factor times the integral of exp(-beta u) u^-gamma over [u0, inf)."""
    return float(factor * _expint_mp(beta, gamma, u0))


@dataclass(frozen=True)
class PowerLogTail:
    """Terms scale (n + shift)^-p log^-q (n + shift)."""

    p: float
    q: float = 0.0
    scale: float = 1.0
    shift: float = 0.0

    def terms(self, n):
        x = np.asarray(n, dtype=float) + self.shift
        with np.errstate(divide="ignore"):
            return self.scale * x ** -self.p * np.log(x) ** -self.q

    def log_terms(self, n):
        x = np.asarray(n, dtype=float) + self.shift
        return math.log(self.scale) - self.p * np.log(x) - self.q * np.log(np.log(x))

    @property
    def abscissa(self):
        return 1.0 / self.p

    def converges(self, t):
        pt, qt = self.p * t, self.q * t
        return pt > 1 or (pt == 1 and qt > 1)

    def integral(self, t, n0):
        """Integral of term(x)^t over [n0, inf)."""
        u0 = math.log(n0 + self.shift)
        return _expint_tail(self.p * t - 1.0, self.q * t, u0, mpmath.mpf(self.scale) ** t)

    def integral_log(self, t, n0):
        """Integral of term(x)^t log term(x) over [n0, inf)."""
        u0 = math.log(n0 + self.shift)
        beta, gam = self.p * t - 1.0, self.q * t
        if not self.converges(t):
            return -math.inf
        i0 = _expint_mp(beta, gam, u0)
        i1 = _expint_mp(beta, gam - 1.0, u0)
        if self.q == 0:
            jl = 0.0
        elif beta == 0:
            jl = mpmath.mpf(u0) ** (1 - gam) * (1 + (gam - 1) * math.log(u0)) / (gam - 1) ** 2
        else:
            jl = -mpmath.diff(lambda g: mpmath.expint(g, beta * u0) * mpmath.mpf(u0) ** (1 - g), gam)
        sc = mpmath.mpf(self.scale) ** t
        return float(sc * (math.log(self.scale) * i0 - self.p * i1 - self.q * jl))

    def record(self):
        return {"kind": "power_log", "p": self.p, "q": self.q, "scale": self.scale, "shift": self.shift}


@dataclass(frozen=True)
class GeometricTail:
    """Terms scale ratio^n."""

    ratio: float
    scale: float = 1.0

    def terms(self, n):
        return self.scale * self.ratio ** np.asarray(n, dtype=float)

    def log_terms(self, n):
        return math.log(self.scale) + np.asarray(n, dtype=float) * math.log(self.ratio)

    abscissa = 0.0

    def converges(self, t):
        return t > 0

    def record(self):
        return {"kind": "geometric", "ratio": self.ratio, "scale": self.scale}


Tail = Union[PowerLogTail, GeometricTail, None]


class SumBounds(NamedTuple):
    lower: float
    upper: float
    estimate: float


@dataclass(frozen=True)
class PartitionSequence:
    """Interval lengths a_1, a_2, ... of a Luroth-type partition."""

    head: tuple = ()
    tail: Tail = None

    def __post_init__(self):
        head = tuple(float(a) for a in self.head)
        object.__setattr__(self, "head", head)
        if any(not (a > 0) for a in head):
            raise ValidationError("partition lengths must be positive")
        if self.tail is None and not head:
            raise ValidationError("empty partition")
        if isinstance(self.tail, GeometricTail) and not 0 < self.tail.ratio < 1:
            raise ValidationError("geometric ratio must lie in (0, 1)")
        if isinstance(self.tail, PowerLogTail) and not self.tail.p > 1:
            raise ValidationError("power-log tail needs p > 1")

    # -- basic access

    @property
    def finite(self):
        return self.tail is None

    @property
    def n_head(self):
        return len(self.head)

    @cached_property
    def head_array(self):
        return np.array(self.head, dtype=float)

    def a(self, n):
        """Length a_n (n >= 1)."""
        n = int(n)
        if n < 1:
            raise DomainError(f"branch index {n} < 1")
        if n <= self.n_head:
            return self.head[n - 1]
        if self.tail is None:
            raise DomainError(f"branch {n} beyond a finite partition of {self.n_head}")
        return float(self.tail.terms(n))

    def lengths(self, count):
        """First ``count`` lengths (fewer for a shorter finite partition)."""
        count = int(count)
        if self.tail is None:
            return self.head_array[:count].copy()
        k = min(count, self.n_head)
        extra = self.tail.terms(np.arange(self.n_head + 1, count + 1)) if count > k else np.empty(0)
        return np.concatenate([self.head_array[:k], extra])

    @property
    def abscissa(self):
        """Abscissa of convergence of the Dirichlet series sum a_n^t."""
        return -math.inf if self.tail is None else self.tail.abscissa

    def converges_at_abscissa(self):
        """Whether sum a_n^t stays finite as t decreases to the abscissa."""
        if self.tail is None:
            return False
        if isinstance(self.tail, GeometricTail):
            return False
        tl = self.tail
        return tl.q / tl.p > 1

    # -- tail sums

    def tail_power_sum(self, t, start):
        """Bounds and estimate for sum_{n >= start} a_n^t, start > n_head."""
        tl = self.tail
        if tl is None:
            return SumBounds(0.0, 0.0, 0.0)
        if not tl.converges(t):
            return SumBounds(math.inf, math.inf, math.inf)
        if isinstance(tl, GeometricTail):
            lr = t * math.log(tl.ratio)
            v = tl.scale ** t * math.exp(start * lr) / -math.expm1(lr)
            return SumBounds(v, v, v)
        f0 = float(tl.terms(start)) ** t
        integ = tl.integral(t, start)
        x = start + tl.shift
        dlog = -tl.p * t / x - tl.q * t / (x * math.log(x))
        est = integ + 0.5 * f0 - f0 * dlog / 12.0
        return SumBounds(integ, integ + f0, est)

    def tail_log_sum(self, t, start):
        """Estimate of sum_{n >= start} a_n^t log a_n."""
        tl = self.tail
        if tl is None:
            return 0.0
        if not tl.converges(t):
            return -math.inf
        if isinstance(tl, GeometricTail):
            r = tl.ratio ** t
            lr, ls = math.log(tl.ratio), math.log(tl.scale)
            base = tl.scale ** t * r ** start
            # sum_{k>=0} r^k (ls + (start + k) lr)
            return base * ((ls + start * lr) / (1 - r) + lr * r / (1 - r) ** 2)
        g = lambda x: float(tl.terms(x)) ** t * float(tl.log_terms(x))
        h = 1e-3 * start
        dg = (g(start + h) - g(start - h)) / (2 * h)
        return tl.integral_log(t, start) + 0.5 * g(start) - dg / 12.0

    def power_sum(self, t):
        """Bounds for the full series sum a_n^t."""
        head = math.fsum((self.head_array ** t).tolist()) if self.head else 0.0
        tb = self.tail_power_sum(t, self.n_head + 1)
        return SumBounds(head + tb.lower, head + tb.upper, head + tb.estimate)

    def log_power_sum(self, t):
        """Estimate of sum a_n^t log a_n."""
        h = self.head_array
        head = math.fsum((h ** t * np.log(h)).tolist()) if self.head else 0.0
        return head + self.tail_log_sum(t, self.n_head + 1)

    @cached_property
    def total(self):
        return self.power_sum(1.0).estimate

    # -- endpoints

    @cached_property
    def head_endpoints(self):
        """t_1 .. t_{B+1} with t_1 = 1 and t_{n+1} = t_n - a_n."""
        cs = np.concatenate([[0.0], np.cumsum(self.head_array)]) if self.head else np.zeros(1)
        ends = 1.0 - cs
        if self.tail is None:
            ends[-1] = max(ends[-1], 0.0)
        return ends

    def _tail_ratio(self, n):
        """t_n / t_{B+1} for n > B."""
        start = self.n_head + 1
        if isinstance(self.tail, GeometricTail):
            return self.tail.ratio ** float(n - start)
        return self.tail_power_sum(1.0, n).estimate / self._tail_base

    @cached_property
    def _tail_base(self):
        return self.tail_power_sum(1.0, self.n_head + 1).estimate

    def endpoint(self, n):
        """Tail sum t_n = a_n + a_{n+1} + ..., normalised so that t_1 = 1."""
        n = int(n)
        if n <= self.n_head + 1:
            return float(self.head_endpoints[n - 1])
        if self.tail is None:
            return 0.0
        return float(self.head_endpoints[-1] * self._tail_ratio(n))

    def index_of(self, y):
        """Unique n with t_{n+1} < y <= t_n (y > 0)."""
        ends = self.head_endpoints
        if y > ends[-1]:
            # ends descending; count entries >= y
            k = int(np.searchsorted(-ends, -y, side="right"))
            return k
        if self.tail is None:
            raise DomainError(f"{y} lies below the last partition interval")
        base = ends[-1]
        start = self.n_head + 1
        if isinstance(self.tail, GeometricTail):
            n = start + int(math.floor(math.log(y / base) / math.log(self.tail.ratio)))
            n = max(n, start)
            while self.endpoint(n) < y:
                n -= 1
            while self.endpoint(n + 1) >= y:
                n += 1
            return n
        lo, hi = start, start + 1
        while self.endpoint(hi) >= y:
            lo, hi = hi, 2 * hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.endpoint(mid) >= y:
                lo = mid
            else:
                hi = mid
        return lo

    def endpoints_of(self, n):
        """Vectorised t_n."""
        n = np.asarray(n, dtype=np.int64)
        ends = self.head_endpoints
        inside = n <= self.n_head + 1
        if np.all(inside):
            return ends[n - 1]
        out = np.empty(n.shape)
        out[inside] = ends[n[inside] - 1]
        if isinstance(self.tail, GeometricTail):
            out[~inside] = ends[-1] * self.tail.ratio ** (n[~inside] - self.n_head - 1).astype(float)
        else:
            out[~inside] = [self.endpoint(int(k)) for k in n[~inside]]
        return out

    def lengths_of(self, n):
        """Vectorised a_n."""
        n = np.asarray(n, dtype=np.int64)
        if self.n_head and np.all(n <= self.n_head):
            return self.head_array[n - 1]
        out = np.empty(n.shape)
        inside = n <= self.n_head
        out[inside] = self.head_array[n[inside] - 1]
        if self.tail is None and np.any(~inside):
            raise DomainError("branch beyond finite partition")
        out[~inside] = self.tail.terms(n[~inside])
        return out

    def record(self):
        return {"head": list(self.head), "tail": None if self.tail is None else self.tail.record()}


def dyadic_sequence():
    """a_n = 2^-n."""
    return PartitionSequence((), GeometricTail(0.5, 1.0))


def finite_sequence(lengths):
    return PartitionSequence(tuple(lengths), None)


def log_dirichlet_sequence(m, head=10_000, shift=10.0):
    """Normalised a_n proportional to (n + shift)^-2 log^-2m (n + shift)."""
    raw = PowerLogTail(2.0, 2.0 * m, 1.0, shift)
    n = np.arange(1, head + 1)
    vals = raw.terms(n)
    tail = PartitionSequence((), raw).tail_power_sum(1.0, head + 1).estimate
    c_m = math.fsum(vals.tolist()) + tail
    return PartitionSequence(tuple((vals / c_m).tolist()), PowerLogTail(2.0, 2.0 * m, 1.0 / c_m, shift))


def sequence_from_record(rec):
    tail = rec.get("tail")
    if tail is not None:
        kind = tail.get("kind", "power_log")
        if kind == "geometric":
            tail = GeometricTail(float(tail["ratio"]), float(tail.get("scale", 1.0)))
        elif kind == "power_log":
            tail = PowerLogTail(float(tail["p"]), float(tail.get("q", 0.0)),
                                float(tail.get("scale", 1.0)), float(tail.get("shift", 0.0)))
        else:
            raise ValidationError(f"unknown tail kind {kind!r}")
    return PartitionSequence(tuple(rec.get("head", ())), tail)


# ---------------------------------------------------------------- maps


class Family(str, Enum):
    GAUSS = "gauss"
    RENYI = "renyi"
    LUROTH = "luroth"
    MP = "mp"


@dataclass(frozen=True)
class MRLMap:
    """A map of one of the four families, optionally restricted to finitely many branches."""

    family: Family
    partition: Optional[PartitionSequence] = None
    s: Optional[float] = None
    branches: Optional[tuple] = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        fam = self.family
        if fam in (Family.LUROTH, Family.MP) and self.partition is None:
            raise ValidationError(f"{fam.value} needs a partition sequence")
        if fam is Family.MP and (self.s is None or not 0 < self.s <= 1):
            raise ValidationError("manneville_pomeau needs 0 < s <= 1")
        if self.branches is not None:
            br = tuple(sorted(set(int(b) for b in self.branches)))
            if not br:
                raise ValidationError("empty branch set")
            low = 0 if fam is Family.MP else 1
            if br[0] < low:
                raise ValidationError(f"branch index below {low}")
            if self.partition is not None and self.partition.finite and br[-1] > self.partition.n_head:
                raise ValidationError("branch beyond finite partition")
            object.__setattr__(self, "branches", br)
        if not self.name:
            object.__setattr__(self, "name", fam.value)

    # -- structure

    @property
    def finite(self):
        return self.branches is not None or (self.partition is not None and self.partition.finite)

    @property
    def mr_constants(self):
        """(K, C) of the Markov-Renyi sandwich C^-1 n^K <= |T'| <= C n^K."""
        if self.family in (Family.GAUSS, Family.RENYI):
            return (2.0, 4.0)
        return None

    @property
    def parabolic_point(self):
        if self.family is Family.RENYI and (self.branches is None or 1 in self.branches):
            return 0.0
        if self.family is Family.MP and (self.branches is None or 0 in self.branches):
            return 0.0
        return None

    @property
    def parabolic_symbol(self):
        if self.parabolic_point is None:
            return None
        return 1 if self.family is Family.RENYI else 0

    @cached_property
    def c(self):
        """Right end of the parabolic branch of Manneville-Pomeau (c + c^(1+s) = 1)."""
        if self.family is not Family.MP:
            return None
        return brentq(lambda x: x + x ** (1 + self.s) - 1.0, 0.5, 1.0, xtol=1e-16, rtol=1e-15)

    def symbols(self, cutoff):
        """Allowed symbols up to ``cutoff`` (all of them for finite systems)."""
        if self.branches is not None:
            return np.array([b for b in self.branches if b <= cutoff] if cutoff else self.branches)
        if self.partition is not None and self.partition.finite:
            top = self.partition.n_head if cutoff is None else min(cutoff, self.partition.n_head)
        else:
            top = cutoff
        low = 0 if self.family is Family.MP else 1
        return np.arange(low, top + 1)

    def restrict(self, branches):
        """Finite sub-system on the given branch indices."""
        return replace(self, branches=tuple(branches), name=f"{self.family.value}[{len(tuple(branches))}]")

    def first_branches(self, count):
        """Sub-system on the first ``count`` branches (plus the parabolic one for MP)."""
        low = 0 if self.family is Family.MP else 1
        return self.restrict(range(low, low + int(count) + (1 if low == 0 else 0)))

    def _lum(self):
        """(partition, scale) of the linear part; scale is 1-c for MP."""
        if self.family is Family.LUROTH:
            return self.partition, 1.0
        return self.partition, 1.0 - self.c

    def branch_length(self, n):
        """Length of I_n for linear branches."""
        seq, sc = self._lum()
        return sc * seq.a(n)

    # -- vectorised kernels

    def _check_symbol(self, n):
        if self.branches is not None and int(n) not in self.branches:
            raise DomainError(f"branch {n} not in restricted set")
        if self.family is Family.MP and n == 0:
            return
        if n < 1:
            raise DomainError(f"branch index {n} < 1")
        if self.partition is not None and self.partition.finite and n > self.partition.n_head:
            raise DomainError(f"branch {n} beyond finite partition")

    def inv(self, n, y):
        """Inverse branch phi_n(y), vectorised over n and y."""
        n = np.asarray(n)
        y = np.asarray(y, dtype=float)
        fam = self.family
        if fam is Family.GAUSS:
            return 1.0 / (n + y)
        if fam is Family.RENYI:
            return 1.0 - 1.0 / (n + y)
        if fam is Family.LUROTH:
            seq = self.partition
            return seq.endpoints_of(n) - seq.lengths_of(n) * y
        # Manneville-Pomeau
        n, y = np.broadcast_arrays(n, y)
        out = np.empty(np.shape(y), dtype=float)
        par = n == 0
        if np.any(par):
            out[par] = _mp_parabolic_inverse(y[par], self.s)
        lin = ~par
        if np.any(lin):
            seq, sc = self._lum()
            ends = seq.endpoints_of(n[lin])
            lens = seq.lengths_of(n[lin])
            out[lin] = 1.0 - sc * ends + sc * lens * y[lin]
        return out

    def inv_log_deriv(self, n, y):
        """log |phi_n'(y)| (non-positive), vectorised."""
        n = np.asarray(n)
        y = np.asarray(y, dtype=float)
        fam = self.family
        if fam in (Family.GAUSS, Family.RENYI):
            return -2.0 * np.log(n + y)
        if fam is Family.LUROTH:
            return np.log(self.partition.lengths_of(n)) + 0.0 * y
        n, y = np.broadcast_arrays(n, y)
        out = np.empty(np.shape(y), dtype=float)
        par = n == 0
        if np.any(par):
            x = _mp_parabolic_inverse(y[par], self.s)
            out[par] = -np.log1p((1 + self.s) * x ** self.s)
        lin = ~par
        if np.any(lin):
            seq, sc = self._lum()
            out[lin] = np.log(sc * seq.lengths_of(n[lin]))
        return out

    @property
    def orientation(self):
        """+1 if inverse branches preserve orientation, -1 if they reverse it."""
        return -1 if self.family in (Family.GAUSS, Family.LUROTH) else 1

    def step(self, x):
        """Vectorised forward step: (branch, T x, log|T'(x)|); branch -1 marks excluded points."""
        x = np.asarray(x, dtype=float)
        fam = self.family
        n = np.full(x.shape, -1, dtype=np.int64)
        tx = np.full(x.shape, np.nan)
        ld = np.full(x.shape, np.nan)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if fam is Family.GAUSS:
                ok = (x > 0) & (x <= 1)
                inv = np.where(ok, 1.0 / np.where(ok, x, 1.0), 1.0)
                k = np.floor(inv)
                # enforce (1/(k+1), 1/k] bit-exactly
                k = np.where(x > 1.0 / np.maximum(k, 1.0), k - 1, k)
                k = np.where(x <= 1.0 / (k + 1.0), k + 1, k)
                k = np.maximum(k, 1.0)
                n = np.where(ok, k, -1).astype(np.int64)
                tx = np.where(ok, np.clip(inv - k, 0.0, 1.0), np.nan)
                ld = np.where(ok, -2.0 * np.log(x), np.nan)
            elif fam is Family.RENYI:
                ok = (x >= 0) & (x < 1)
                inv = np.where(ok, 1.0 / (1.0 - np.where(ok, x, 0.0)), 1.0)
                k = np.maximum(np.floor(inv), 1.0)
                # enforce [(k-1)/k, k/(k+1)) bit-exactly
                k = np.where(x < (k - 1.0) / k, k - 1, k)
                k = np.where(x >= k / (k + 1.0), k + 1, k)
                k = np.maximum(k, 1.0)
                n = np.where(ok, k, -1).astype(np.int64)
                tx = np.where(ok, np.clip(inv - k, 0.0, 1.0), np.nan)
                ld = np.where(ok, -2.0 * np.log1p(-np.where(ok, x, 0.0)), np.nan)
            elif fam is Family.LUROTH:
                n, tx, ld = _luroth_step(self.partition, x, 1.0)
            else:
                c = self.c
                par = (x >= 0) & (x < c)
                lin = (x >= c) & (x < 1)
                if np.any(par):
                    xp = x[par]
                    n[par] = 0
                    tx[par] = np.minimum(xp + xp ** (1 + self.s), 1.0)
                    ld[par] = np.log1p((1 + self.s) * xp ** self.s)
                if np.any(lin):
                    y = (1.0 - x[lin]) / (1.0 - c)
                    nn, tt, ll = _luroth_step(self.partition, y, 1.0 - c)
                    n[lin], tx[lin], ld[lin] = nn, tt, ll
        if self.branches is not None:
            bad = ~np.isin(n, np.array(self.branches))
            n = np.where(bad, -1, n)
            tx = np.where(bad, np.nan, tx)
            ld = np.where(bad, np.nan, ld)
        return n, tx, ld

    def record(self):
        rec = {"family": self.family.value}
        if self.partition is not None:
            rec.update(self.partition.record())
        if self.s is not None:
            rec["s"] = self.s
        if self.branches is not None:
            rec["branches"] = list(self.branches)
        return rec


def _luroth_step(seq: PartitionSequence, y, scale):
    """Luroth step on y in (0, 1]: branch, (t_n - y)/a_n, -log(scale a_n)."""
    y = np.asarray(y, dtype=float)
    n = np.full(y.shape, -1, dtype=np.int64)
    ty = np.full(y.shape, np.nan)
    ld = np.full(y.shape, np.nan)
    ends = seq.head_endpoints
    ok = (y > 0) & (y <= 1)
    head = ok & (y > ends[-1])
    if np.any(head):
        k = np.searchsorted(-ends, -y[head], side="right")
        n[head] = k
    deep = ok & ~head
    if np.any(deep) and isinstance(seq.tail, GeometricTail):
        n[deep] = _geometric_index(seq, y[deep])
    elif np.any(deep) and seq.tail is not None:
        idx = np.flatnonzero(deep)
        n[idx] = [seq.index_of(float(v)) for v in y[idx]]
    good = n > 0
    if np.any(good):
        nn = n[good]
        tn = seq.endpoints_of(nn)
        an = seq.lengths_of(nn)
        ty[good] = np.clip((tn - y[good]) / an, 0.0, 1.0)
        ld[good] = -np.log(scale * an)
    return n, ty, ld


def _geometric_index(seq, y):
    """Vectorised index lookup below the head for a geometric tail."""
    base = seq.head_endpoints[-1]
    start = seq.n_head + 1
    r = seq.tail.ratio
    k = np.maximum(np.floor(np.log(y / base) / math.log(r)), 0.0)
    # t_n = base r^(n - start); fix rounding at the interval ends
    k = np.where(base * r ** k < y, k - 1, k)
    k = np.where(base * r ** (k + 1) >= y, k + 1, k)
    return (start + np.maximum(k, 0)).astype(np.int64)


def _mp_parabolic_inverse(y, s, iters=64):
    """Solve x + x^(1+s) = y by vectorised bisection on [0, y]."""
    y = np.asarray(y, dtype=float)
    lo = np.zeros_like(y)
    hi = y.copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        big = mid + mid ** (1 + s) > y
        hi = np.where(big, mid, hi)
        lo = np.where(big, lo, mid)
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------- constructors


def gauss():
    return MRLMap(Family.GAUSS)


def renyi():
    return MRLMap(Family.RENYI)


def luroth(seq: PartitionSequence, name=""):
    return MRLMap(Family.LUROTH, partition=seq, name=name or "luroth")


def dyadic_luroth():
    return luroth(dyadic_sequence(), "luroth-dyadic")


def manneville_pomeau(s: float, seq: PartitionSequence, name=""):
    return MRLMap(Family.MP, partition=seq, s=float(s), name=name or "mp")


# ---------------------------------------------------------------- scalar operations


def _check_x(x):
    x = float(x)
    if not 0.0 <= x <= 1.0 or math.isnan(x):
        raise DomainError(f"x={x} outside [0, 1]")
    return x


def branch_of(T: MRLMap, x: float) -> int:
    """Index n with x in I_n."""
    x = _check_x(x)
    n, _, _ = T.step(np.array([x]))
    if n[0] < 0:
        raise DomainError(f"x={x} is not in any branch of {T.name}")
    return int(n[0])


def apply(T: MRLMap, x: float) -> float:
    """T(x)."""
    x = _check_x(x)
    if x == 0.0 and T.family is Family.LUROTH:
        return 0.0
    n, tx, _ = T.step(np.array([x]))
    if n[0] < 0:
        raise DomainError(f"x={x} is excluded from the domain of {T.name}")
    return float(tx[0])


def log_deriv(T: MRLMap, x: float) -> float:
    """log |T'(x)|."""
    x = _check_x(x)
    n, _, ld = T.step(np.array([x]))
    if n[0] < 0:
        raise DomainError(f"x={x} is excluded from the domain of {T.name}")
    return float(ld[0])


def inverse_branch(T: MRLMap, n: int, y: float) -> float:
    """The x in I_n with T(x) = y."""
    y = _check_x(y)
    T._check_symbol(n)
    return float(T.inv(np.array(n), np.array(y)))


@dataclass(frozen=True)
class CylinderWord:
    symbols: tuple

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(a) for a in self.symbols))
        if not self.symbols:
            raise ValidationError("cylinder word must be non-empty")

    @property
    def depth(self):
        return len(self.symbols)

    def extend(self, a):
        return CylinderWord(self.symbols + (int(a),))


def _word(w):
    return w if isinstance(w, CylinderWord) else CylinderWord(tuple(w))


def compose_inverse(T: MRLMap, w, y):
    """phi_{a_1} o ... o phi_{a_n}(y) together with log|(that map)'(y)|."""
    w = _word(w)
    y = np.asarray(y, dtype=float)
    logd = np.zeros_like(y)
    for a in reversed(w.symbols):
        logd = logd + T.inv_log_deriv(a, y)
        y = T.inv(a, y)
    return y, logd


def cylinder_interval(T: MRLMap, w) -> tuple:
    """Closure of the cylinder of w as (left, right)."""
    w = _word(w)
    for a in w.symbols:
        T._check_symbol(a)
    ends, _ = compose_inverse(T, w, np.array([0.0, 1.0]))
    lo, hi = float(min(ends)), float(max(ends))
    if not hi - lo >= 1e-300:
        raise DegenerateError(f"cylinder {w.symbols} has width {hi - lo}")
    return lo, hi


def periodic_point(T: MRLMap, w, max_iter=10_000) -> float:
    """Fixed point of the composed inverse branch of w."""
    w = _word(w)
    for a in w.symbols:
        T._check_symbol(a)
    lo, hi = cylinder_interval(T, w)
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        nx = float(compose_inverse(T, w, np.array([x]))[0][0])
        if abs(nx - x) <= 4e-16 * max(abs(x), 1e-300) or nx == x:
            x = nx
            break
        x = nx
    else:
        raise ConvergenceError(f"no fixed point for word {w.symbols} after {max_iter} iterations")
    resid = abs(float(compose_inverse(T, w, np.array([x]))[0][0]) - x)
    if resid >= 1e-12:
        raise ConvergenceError(f"fixed point residual {resid} for word {w.symbols}")
    return x


def birkhoff_log_deriv(T: MRLMap, x: float, n: int) -> float:
    """sum_{k<n} log |T'(T^k x)|."""
    x = _check_x(x)
    total = 0.0
    for k in range(int(n)):
        br, tx, ld = T.step(np.array([x]))
        if br[0] < 0:
            raise DomainError(f"orbit leaves the domain at step {k} (x={x})")
        total += float(ld[0])
        x = float(tx[0])
    return total


def orbit(T: MRLMap, x: float, n: int):
    """Rows (step, x, log_deriv) along the first n points of the orbit."""
    rows = []
    x = _check_x(x)
    for k in range(int(n)):
        br, tx, ld = T.step(np.array([x]))
        if br[0] < 0:
            raise DomainError(f"orbit leaves the domain at step {k} (x={x})")
        rows.append((k, x, float(ld[0])))
        x = float(tx[0])
    return rows


# ---------------------------------------------------------------- Monte Carlo


class LyapunovEstimate(tuple):
    """(mean, stderr) with the number of resampled orbits attached."""

    def __new__(cls, mean, stderr, resampled=0):
        obj = super().__new__(cls, (mean, stderr))
        obj.resampled = int(resampled)
        return obj

    @property
    def mean(self):
        return self[0]

    @property
    def stderr(self):
        return self[1]


MC_BLOCK = 1000
JITTER = 2.0 ** -44


def _mc_block(T: MRLMap, seed, block, count, steps):
    rng = np.random.default_rng([int(seed), int(block)])
    linear = T.family in (Family.LUROTH, Family.MP)
    sums = np.zeros(count)
    todo = np.arange(count)
    resampled = 0
    for attempt in range(50):
        x = rng.random(todo.size)
        acc = np.zeros(todo.size)
        alive = np.ones(todo.size, dtype=bool)
        for _ in range(steps):
            n, tx, ld = T.step(x)
            alive &= n >= 0
            acc += np.where(alive, ld, 0.0)
            x = np.where(alive, tx, 0.5)
            if linear:
                # linear branches shift bits out exactly; keep the orbit generic
                x = np.clip(x + JITTER * (rng.random(x.size) - 0.5), 1e-300, 1.0 - 1e-16)
        sums[todo[alive]] = acc[alive]
        todo = todo[~alive]
        if todo.size == 0:
            break
        resampled += todo.size
    else:
        raise ConvergenceError("orbits keep hitting excluded points")
    return sums / steps, resampled


def lyapunov_mc(T: MRLMap, orbits: int, steps: int, seed: int, workers=None) -> LyapunovEstimate:
    """Monte-Carlo mean of the finite-time Lyapunov exponent from uniform starts.

    Orbits are cut into fixed blocks, each with its own seeded stream, so the
    result does not depend on the worker count.
    """
    if orbits < 1 or steps < 1:
        raise ValidationError("orbits and steps must be positive")
    blocks = [(b, min(MC_BLOCK, orbits - b * MC_BLOCK)) for b in range((orbits + MC_BLOCK - 1) // MC_BLOCK)]
    out = ordered_map(lambda bc: _mc_block(T, seed, bc[0], bc[1], steps), blocks, workers)
    vals = np.concatenate([o[0] for o in out])
    res = sum(o[1] for o in out)
    stderr = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else math.nan
    return LyapunovEstimate(float(vals.mean()), stderr, res)


# ---------------------------------------------------------------- records

PRESETS = {
    "gauss": {"family": "gauss"},
    "renyi": {"family": "renyi"},
    "luroth-dyadic": {"family": "luroth", "dyadic": True},
    "dyadic": {"family": "luroth", "dyadic": True},
    "luroth-logdir-1": {"family": "luroth", "log_dirichlet": 1},
    "luroth-logdir-5": {"family": "luroth", "log_dirichlet": 5},
    "mp": {"family": "mp", "s": 0.5, "log_dirichlet": 5},
}


def _sequence_of(rec):
    if rec.get("dyadic"):
        return dyadic_sequence()
    if "log_dirichlet" in rec:
        m = rec["log_dirichlet"]
        if not isinstance(m, (int, float)) or not m > 0:
            raise ValidationError("log_dirichlet needs a positive exponent m")
        return log_dirichlet_sequence(float(m))
    if "head" not in rec and "tail" not in rec:
        return None
    head = rec.get("head", [])
    if not isinstance(head, (list, tuple)):
        raise ValidationError("head must be a list of lengths")
    tail = rec.get("tail")
    if tail is not None and not isinstance(tail, dict):
        raise ValidationError("tail must be a record")
    try:
        return sequence_from_record({"head": [float(v) for v in head], "tail": tail})
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed partition record: {exc}") from None


def map_from_record(rec) -> MRLMap:
    """Build a map from a record such as {"family": "mp", "s": 0.5, "log_dirichlet": 5}.

    A string is taken as a preset name.  Lengths go in "head"/"tail", or the
    shorthands "dyadic": true and "log_dirichlet": m.  "branches" restricts.
    """
    if isinstance(rec, str):
        if rec not in PRESETS:
            raise ValidationError(f"unknown map preset {rec!r}; known: {', '.join(sorted(PRESETS))}")
        name = rec
        rec = PRESETS[rec]
    else:
        if not isinstance(rec, dict):
            raise ValidationError("map record must be an object")
        name = str(rec.get("name", ""))
    fam = rec.get("family")
    try:
        fam = Family(fam)
    except ValueError:
        raise ValidationError(f"unknown family {fam!r}") from None
    seq = _sequence_of(rec)
    s = rec.get("s")
    if fam in (Family.GAUSS, Family.RENYI) and seq is not None:
        raise ValidationError(f"{fam.value} takes no partition")
    if s is not None and fam is not Family.MP:
        raise ValidationError("only manneville_pomeau takes s")
    if s is not None and not isinstance(s, (int, float)):
        raise ValidationError("s must be a number")
    T = MRLMap(fam, partition=seq, s=None if s is None else float(s), name=name)
    if rec.get("branches") is not None:
        br = rec["branches"]
        if not isinstance(br, (list, tuple)) or not all(isinstance(b, int) for b in br):
            raise ValidationError("branches must be a list of integers")
        T = replace(T, branches=tuple(br), name=name or T.name)
    return T
