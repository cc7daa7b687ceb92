"""Fast evaluation of log sum_i w_i exp(-t c_i) for millions of fixed c_i.

The c_i are binned with width h; each bin stores the moments of (c_i - centre)
so that the sum at any |t| <= T_SWITCH is a short Taylor series per bin.  The
truncation error is below (T_SWITCH h / 2)^(K+1) / (K+1)!, far below double
precision.  Beyond T_SWITCH only the extreme bins matter and raw values are used.
"""
import math

import numpy as np
from scipy.special import logsumexp

H_BIN = 0.005
ORDER = 16
T_SWITCH = 200.0
EDGE = 10.0
RAW_LIMIT = 2_000_000


class ExpSumTable:
    def __init__(self, chunks):
        """chunks: iterable of (c, w) array pairs, combined in the given order."""
        chunks = [(np.asarray(c, float).ravel(), np.asarray(w, float).ravel()) for c, w in chunks]
        c_all = np.concatenate([c for c, _ in chunks]) if chunks else np.empty(0)
        if c_all.size == 0:
            raise ValueError("empty exponential sum")
        self.count = c_all.size
        self.c_min = float(c_all.min())
        self.c_max = float(c_all.max())
        self.origin = self.c_min - 0.5 * H_BIN
        nb = int(math.floor((self.c_max - self.origin) / H_BIN)) + 1
        mom = np.zeros((ORDER + 1, nb))
        lo_c, lo_w, hi_c, hi_w = [], [], [], []
        for c, w in chunks:
            b = np.floor((c - self.origin) / H_BIN).astype(np.int64)
            b = np.clip(b, 0, nb - 1)
            delta = c - (self.origin + (b + 0.5) * H_BIN)
            p = w.copy()
            for k in range(ORDER + 1):
                mom[k] += np.bincount(b, weights=p, minlength=nb)
                p = p * delta
            low = c <= self.c_min + EDGE
            lo_c.append(c[low])
            lo_w.append(w[low])
            high = c >= self.c_max - EDGE
            hi_c.append(c[high])
            hi_w.append(w[high])
        keep = mom[0] != 0
        self.centres = (self.origin + (np.arange(nb) + 0.5) * H_BIN)[keep]
        self.moments = mom[:, keep]
        self.low = (np.concatenate(lo_c), np.concatenate(lo_w))
        hc = np.concatenate(hi_c)
        self.high = (hc, np.concatenate(hi_w)) if hc.size <= RAW_LIMIT else None
        fact = np.array([math.factorial(k) for k in range(ORDER + 2)], dtype=float)
        self._fact = fact

    def _poly(self, t):
        k = np.arange(ORDER + 1)
        coef = (-t) ** k / self._fact[: ORDER + 1]
        p0 = coef @ self.moments
        # d/dt sum w exp(-t delta) = -sum w delta exp(-t delta)
        coef1 = -((-t) ** k[:-1]) / self._fact[: ORDER]
        p1 = coef1 @ self.moments[1:]
        return p0, p1

    def _raw(self, t):
        if t > 0:
            c, w = self.low
        else:
            if self.high is None:
                raise OverflowError("negative t beyond the compressed range")
            c, w = self.high
        e = -t * c
        m = e.max()
        s0 = np.sum(w * np.exp(e - m))
        s1 = np.sum(-c * w * np.exp(e - m))
        return m + math.log(s0), s1 / s0

    def log_sum(self, t):
        """log sum w exp(-t c)."""
        return self.log_sum_and_slope(t)[0]

    def log_sum_and_slope(self, t):
        """(log S(t), S'(t)/S(t))."""
        t = float(t)
        if abs(t) > T_SWITCH:
            return self._raw(t)
        p0, p1 = self._poly(t)
        e = -t * self.centres
        m = float(e.max())
        g = np.exp(e - m)
        s0 = float(np.sum(g * p0))
        s1 = float(np.sum(g * (-self.centres * p0 + p1)))
        return m + math.log(s0), s1 / s0
