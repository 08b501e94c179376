"""Pure-Python kernel backend.

Mirrors the compiled extension operation for operation; the loops use the
same floating-point expressions in the same order so both backends produce
identical doubles (the exponential cost kind may differ in the last ulp,
numpy's vectorized exp vs libm).  This module is also the only path that
supports custom value distributions (the compiled core handles the uniform
case).
"""
import math

import numpy as np


def _cost_value(kind, mu, t):
    if kind == 1:
        return 1.0 - mu * t
    if kind == 2:
        return math.exp(-mu * t)
    if kind == 3:
        return 1.0 / (1.0 + mu * t)
    return 1.0


def _cost_slope(kind, mu, t):
    if kind == 1:
        return -mu
    if kind == 2:
        return -mu * math.exp(-mu * t)
    if kind == 3:
        q = 1.0 + mu * t
        return -mu / (q * q)
    return 0.0


def _cost_value_arr(kind, mu, t):
    t = np.asarray(t, dtype=float)
    if kind == 1:
        return 1.0 - mu * t
    if kind == 2:
        return np.exp(-mu * t)
    if kind == 3:
        return 1.0 / (1.0 + mu * t)
    return np.ones_like(t)


def _cost_slope_arr(kind, mu, t):
    t = np.asarray(t, dtype=float)
    if kind == 1:
        return np.full_like(t, -mu)
    if kind == 2:
        return -mu * np.exp(-mu * t)
    if kind == 3:
        q = 1.0 + mu * t
        return -mu / (q * q)
    return np.zeros_like(t)


def _bid_slope(v, b, n, ck, mu, s, cdf, pdf):
    # db/dv = g/G * (c(s-b) v - b) / (1 + c'(s-b) v); g/G = (n-1) f/F
    t = s - b
    if cdf is None:
        gg = (n - 1) / v
    else:
        gg = (n - 1) * float(pdf(v)) / float(cdf(v))
    return gg * (_cost_value(ck, mu, t) * v - b) / (1.0 + _cost_slope(ck, mu, t) * v)


def _rk4(v, b, h, n, ck, mu, s, cdf, pdf):
    k1 = _bid_slope(v, b, n, ck, mu, s, cdf, pdf)
    k2 = _bid_slope(v + 0.5 * h, b + 0.5 * h * k1, n, ck, mu, s, cdf, pdf)
    k3 = _bid_slope(v + 0.5 * h, b + 0.5 * h * k2, n, ck, mu, s, cdf, pdf)
    k4 = _bid_slope(v + h, b + h * k3, n, ck, mu, s, cdf, pdf)
    return b + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_step(v0, b0, h, n, dist_code, cost_code, mu, s, cdf=None, pdf=None):
    """One classical fourth-order step of the bid-curve equation."""
    return _rk4(v0, b0, h, n, cost_code, mu, s, cdf, pdf)


def dutch_curve(n, dist_code, cost_code, mu, s, v_max, steps, cdf=None, pdf=None):
    """Integrate the descending-phase bid curve from b(0) = 0.

    The equation is singular at v = 0 (g/G ~ (n-1)/v), so the first step is
    taken on the series start b ~ a*v with a = (n-1) c(s)/n.  Early steps are
    internally subdivided to keep (n-1) h_sub / v within the stability region
    of the integrator.  Integration stops at the first point where b would
    exceed the starting price s.

    Returns (v_nodes, b_nodes, crossed, v_lo, b_lo, v_hi): the valid grid
    nodes plus, when crossed, the bracket [v_lo, v_hi] containing b = s with
    b(v_lo) = b_lo <= s.
    """
    v = np.linspace(0.0, v_max, steps + 1)
    b = np.zeros(steps + 1)
    h = v_max / steps
    a1 = (n - 1) * _cost_value(cost_code, mu, s) / n
    b1 = a1 * h
    if b1 >= s:
        # crossing inside the first cell; caller resolves via the series
        return v[:1].copy(), b[:1].copy(), True, 0.0, 0.0, v[1]
    b[1] = b1
    count = 2
    for m in range(1, steps):
        vm = v[m]
        bm = b[m]
        den = 1.0 + _cost_slope(cost_code, mu, s - bm) * vm
        if den < 1e-12:
            raise RuntimeError(
                "bid-curve denominator 1 + c'(s-b) v vanished; time cost "
                "violates c' > -1")
        q = (n - 1 + 2 * m - 1) // (2 * m)
        if q < 1:
            q = 1
        hs = h / q
        for j in range(q):
            vj = vm + j * hs
            bn = _rk4(vj, bm, hs, n, cost_code, mu, s, cdf, pdf)
            if bn < bm:
                raise RuntimeError(
                    f"bid curve decreased at v={vj:.6g}; integration unstable")
            if bn > s:
                return v[:count].copy(), b[:count].copy(), True, vj, bm, vj + hs
            bm = bn
        b[m + 1] = bm
        count += 1
        if bm == s:
            return v[:count].copy(), b[:count].copy(), True, v[m + 1], s, v[m + 1]
    return v[:count].copy(), b[:count].copy(), False, 0.0, 0.0, 0.0


def english_exit_batch(v, s, cost_code, mu, bisect_iters=30, newton_iters=3):
    """Solve c(m - s) v - m = 0 elementwise: bisection bracket, Newton polish.

    The residual is strictly decreasing in m (its slope is c' v - 1 <= -1),
    positive at m = 0 and negative at m = 1 + s, so the bracket always holds.
    """
    v = np.asarray(v, dtype=float)
    lo = np.zeros(v.shape)
    hi = np.full(v.shape, 1.0 + s)
    for _ in range(bisect_iters):
        mid = 0.5 * (lo + hi)
        r = _cost_value_arr(cost_code, mu, mid - s) * v - mid
        neg = r < 0.0
        hi = np.where(neg, mid, hi)
        lo = np.where(neg, lo, mid)
    m = 0.5 * (lo + hi)
    for _ in range(newton_iters):
        r = _cost_value_arr(cost_code, mu, m - s) * v - m
        dr = _cost_slope_arr(cost_code, mu, m - s) * v - 1.0
        m = m - r / dr
        m = np.minimum(np.maximum(m, 0.0), 1.0 + s)
    return m


def _pick_tied(ties, u):
    # r-th set bit per row, r = floor(u * count)
    tc = ties.sum(axis=1)
    r = (u * tc).astype(np.int64)
    r = np.minimum(r, tc - 1)
    csum = np.cumsum(ties, axis=1)
    sel = (csum == (r + 1)[:, None]) & ties
    return sel.argmax(axis=1)


def play_auctions(values, bids, exits, p, s, tick, tie_u):
    """Play the clock protocol for a batch of auctions.

    values, bids, exits: (draws, n) arrays of private values, descending-phase
    claim prices b(v) and ascending-phase exit prices m(v).  Opening move:
    bid iff v >= p.  No opener: the clock descends from s in steps of tick,
    first claim wins (price floored at 0).  One opener: sale at s, duration 0.
    Several: the clock ascends from s; a bidder exits once the price exceeds
    her exit level; the last one standing pays the price at the second-to-last
    exit.  Ties within one tick break uniformly via tie_u.

    Returns (phase, winner, price, duration, no_winner_count); phase codes
    0 = descending, 1 = solo opener, 2 = contested ascending.
    """
    values = np.asarray(values, dtype=float)
    d, n = values.shape
    phase = np.empty(d, dtype=np.int8)
    winner = np.empty(d, dtype=np.int64)
    price = np.empty(d, dtype=float)
    duration = np.empty(d, dtype=float)
    isbid = values >= p
    nbid = isbid.sum(axis=1)
    no_winner = 0

    dm = nbid == 0
    if dm.any():
        k = np.ceil((s - np.asarray(bids, dtype=float)[dm]) / tick)
        k = np.maximum(k, 1.0)
        kmin = k.min(axis=1)
        pr = s - kmin * tick
        pr = np.maximum(pr, 0.0)
        phase[dm] = 0
        winner[dm] = _pick_tied(k == kmin[:, None], tie_u[dm])
        price[dm] = pr
        duration[dm] = s - pr
        nw = kmin > math.ceil(s / tick)  # unreachable for bids >= 0
        if nw.any():
            no_winner = int(nw.sum())
            idx = np.flatnonzero(dm)[nw]
            winner[idx] = -1
            price[idx] = 0.0
            duration[idx] = s

    sm = nbid == 1
    if sm.any():
        phase[sm] = 1
        winner[sm] = isbid[sm].argmax(axis=1)
        price[sm] = s
        duration[sm] = 0.0

    cm = nbid >= 2
    if cm.any():
        e = np.floor((np.asarray(exits, dtype=float)[cm] - s) / tick) + 1.0
        e = np.maximum(e, 1.0)
        e[~isbid[cm]] = -1.0
        top2 = np.partition(e, n - 2, axis=1)[:, n - 2:]
        e2 = top2[:, 0]
        e1 = top2[:, 1]
        phase[cm] = 2
        winner[cm] = _pick_tied(e == e1[:, None], tie_u[cm])
        price[cm] = s + e2 * tick
        duration[cm] = e2 * tick

    return phase, winner, price, duration, no_winner
