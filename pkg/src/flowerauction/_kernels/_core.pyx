# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: bid-curve integration, exit-price roots, clock playout.

Every entry point mirrors flowerauction._kernels._reference operation for
operation, with identical floating-point expressions in identical order, so
the two backends agree bit for bit, except that the exponential cost kind
may differ in the last ulp (libm exp here vs numpy's vectorized exp in the
batch routines there).  Keep the two modules in lockstep when editing.
"""
from libc.math cimport ceil as c_ceil, exp as c_exp, floor as c_floor

import numpy as np


cdef inline double _cost_value(int kind, double mu, double t) noexcept nogil:
    if kind == 1:
        return 1.0 - mu * t
    if kind == 2:
        return c_exp(-mu * t)
    if kind == 3:
        return 1.0 / (1.0 + mu * t)
    return 1.0


cdef inline double _cost_slope(int kind, double mu, double t) noexcept nogil:
    cdef double q
    if kind == 1:
        return -mu
    if kind == 2:
        return -mu * c_exp(-mu * t)
    if kind == 3:
        q = 1.0 + mu * t
        return -mu / (q * q)
    return 0.0


cdef inline double _bid_slope(double v, double b, int n, int ck, double mu,
                              double s) noexcept nogil:
    cdef double t = s - b
    cdef double gg = (n - 1) / v
    return gg * (_cost_value(ck, mu, t) * v - b) / (1.0 + _cost_slope(ck, mu, t) * v)


cdef inline double _rk4(double v, double b, double h, int n, int ck, double mu,
                        double s) noexcept nogil:
    cdef double k1 = _bid_slope(v, b, n, ck, mu, s)
    cdef double k2 = _bid_slope(v + 0.5 * h, b + 0.5 * h * k1, n, ck, mu, s)
    cdef double k3 = _bid_slope(v + 0.5 * h, b + 0.5 * h * k2, n, ck, mu, s)
    cdef double k4 = _bid_slope(v + h, b + h * k3, n, ck, mu, s)
    return b + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_step(double v0, double b0, double h, int n, int dist_code,
             int cost_code, double mu, double s):
    if dist_code != 0:
        raise ValueError("compiled kernel supports the uniform distribution only")
    return _rk4(v0, b0, h, n, cost_code, mu, s)


def dutch_curve(int n, int dist_code, int cost_code, double mu, double s,
                double v_max, int steps):
    if dist_code != 0:
        raise ValueError("compiled kernel supports the uniform distribution only")
    v_arr = np.linspace(0.0, v_max, steps + 1)
    b_arr = np.zeros(steps + 1)
    cdef double[::1] v = v_arr
    cdef double[::1] b = b_arr
    cdef double h = v_max / steps
    cdef double a1 = (n - 1) * _cost_value(cost_code, mu, s) / n
    cdef double b1 = a1 * h
    cdef int count, m, q, j
    cdef double vm, bm, den, hs, vj, bn
    if b1 >= s:
        return v_arr[:1].copy(), b_arr[:1].copy(), True, 0.0, 0.0, v[1]
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
            bn = _rk4(vj, bm, hs, n, cost_code, mu, s)
            if bn < bm:
                raise RuntimeError(
                    f"bid curve decreased at v={vj:.6g}; integration unstable")
            if bn > s:
                return v_arr[:count].copy(), b_arr[:count].copy(), True, vj, bm, vj + hs
            bm = bn
        b[m + 1] = bm
        count += 1
        if bm == s:
            return v_arr[:count].copy(), b_arr[:count].copy(), True, v[m + 1], s, v[m + 1]
    return v_arr[:count].copy(), b_arr[:count].copy(), False, 0.0, 0.0, 0.0


def english_exit_batch(v_in, double s, int cost_code, double mu,
                       int bisect_iters=30, int newton_iters=3):
    v_arr = np.ascontiguousarray(v_in, dtype=np.float64).ravel()
    out_arr = np.empty(v_arr.shape[0])
    cdef double[::1] v = v_arr
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, nv = v.shape[0]
    cdef int it
    cdef double lo, hi, mid, r, dr, m_, vv
    with nogil:
        for i in range(nv):
            vv = v[i]
            lo = 0.0
            hi = 1.0 + s
            for it in range(bisect_iters):
                mid = 0.5 * (lo + hi)
                r = _cost_value(cost_code, mu, mid - s) * vv - mid
                if r < 0.0:
                    hi = mid
                else:
                    lo = mid
            m_ = 0.5 * (lo + hi)
            for it in range(newton_iters):
                r = _cost_value(cost_code, mu, m_ - s) * vv - m_
                dr = _cost_slope(cost_code, mu, m_ - s) * vv - 1.0
                m_ = m_ - r / dr
                if m_ < 0.0:
                    m_ = 0.0
                if m_ > 1.0 + s:
                    m_ = 1.0 + s
            out[i] = m_
    return out_arr.reshape(np.shape(v_in))


def play_auctions(values_in, bids_in, exits_in, double p, double s,
                  double tick, tie_u_in):
    values = np.ascontiguousarray(values_in, dtype=np.float64)
    bids = np.ascontiguousarray(bids_in, dtype=np.float64)
    exits = np.ascontiguousarray(exits_in, dtype=np.float64)
    tie_u = np.ascontiguousarray(tie_u_in, dtype=np.float64)
    cdef double[:, ::1] V = values
    cdef double[:, ::1] B = bids
    cdef double[:, ::1] E = exits
    cdef double[::1] U = tie_u
    cdef Py_ssize_t d = V.shape[0], n = V.shape[1], i, j, w, cnt, r
    phase_arr = np.empty(d, dtype=np.int8)
    winner_arr = np.empty(d, dtype=np.int64)
    price_arr = np.empty(d, dtype=np.float64)
    dur_arr = np.empty(d, dtype=np.float64)
    cdef signed char[::1] PH = phase_arr
    cdef long long[::1] W = winner_arr
    cdef double[::1] PR = price_arr
    cdef double[::1] DU = dur_arr
    ebuf_arr = np.empty(n)
    cdef double[::1] ebuf = ebuf_arr
    cdef double kfloor = c_ceil(s / tick)
    cdef long long no_winner = 0
    cdef Py_ssize_t nbid
    cdef double k, kmin, e, e1, e2, pr
    with nogil:
        for i in range(d):
            nbid = 0
            for j in range(n):
                if V[i, j] >= p:
                    nbid += 1
            if nbid == 0:
                # descending clock from s: first claim wins, floor at price 0
                kmin = 1e300
                for j in range(n):
                    k = c_ceil((s - B[i, j]) / tick)
                    if k < 1.0:
                        k = 1.0
                    ebuf[j] = k
                    if k < kmin:
                        kmin = k
                pr = s - kmin * tick
                if pr < 0.0:
                    pr = 0.0
                cnt = 0
                for j in range(n):
                    if ebuf[j] == kmin:
                        cnt += 1
                r = <Py_ssize_t>(U[i] * cnt)
                if r >= cnt:
                    r = cnt - 1
                cnt = 0
                w = 0
                for j in range(n):
                    if ebuf[j] == kmin:
                        if cnt == r:
                            w = j
                            break
                        cnt += 1
                PH[i] = 0
                W[i] = w
                PR[i] = pr
                DU[i] = s - pr
                if kmin > kfloor:
                    no_winner += 1
                    W[i] = -1
                    PR[i] = 0.0
                    DU[i] = s
            elif nbid == 1:
                # lone opener buys at the starting price immediately
                w = 0
                for j in range(n):
                    if V[i, j] >= p:
                        w = j
                        break
                PH[i] = 1
                W[i] = w
                PR[i] = s
                DU[i] = 0.0
            else:
                # ascending clock among openers; price set by second-to-last exit
                e1 = -2.0
                e2 = -2.0
                for j in range(n):
                    if V[i, j] >= p:
                        e = c_floor((E[i, j] - s) / tick) + 1.0
                        if e < 1.0:
                            e = 1.0
                    else:
                        e = -1.0
                    ebuf[j] = e
                    if e > e1:
                        e2 = e1
                        e1 = e
                    elif e > e2:
                        e2 = e
                cnt = 0
                for j in range(n):
                    if ebuf[j] == e1:
                        cnt += 1
                r = <Py_ssize_t>(U[i] * cnt)
                if r >= cnt:
                    r = cnt - 1
                cnt = 0
                w = 0
                for j in range(n):
                    if ebuf[j] == e1:
                        if cnt == r:
                            w = j
                            break
                        cnt += 1
                PH[i] = 2
                W[i] = w
                PR[i] = s + e2 * tick
                DU[i] = e2 * tick
    return phase_arr, winner_arr, price_arr, dur_arr, int(no_winner)
