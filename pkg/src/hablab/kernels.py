"""Hot 1D time-stepping kernels: fused IMEX loops over a prefactored
tridiagonal implicit matrix.

Two interchangeable backends:

* numba ``@njit`` kernels (default when numba imports cleanly), and
* a vectorized numpy/scipy fallback using LAPACK banded solves.

Set ``HABLAB_NO_NUMBA=1`` to force the fallback.  2D problems do not pass
through here; they use sparse LU factorizations in `dynamics`.
``benchmarks/bench_kernels.py`` compares the two paths.
"""

from __future__ import annotations

import os

import numpy as np
from scipy.linalg import solve_banded

_ENV_OFF = os.environ.get("HABLAB_NO_NUMBA", "").strip().lower() in {"1", "true", "yes"}
if _ENV_OFF:
    HAS_NUMBA = False
else:
    try:
        from numba import njit

        HAS_NUMBA = True
    except ImportError:
        HAS_NUMBA = False


def backend() -> str:
    return "numba" if HAS_NUMBA else "numpy"


# Status codes returned by the evolve kernels.
STATUS_OK = 0
STATUS_UNSTABLE = 1


if HAS_NUMBA:

    @njit(cache=True, nogil=True)
    def _thomas_factor(sub, dia, sup):
        # No pivoting: the implicit matrix is a diagonally dominant M-matrix.
        n = dia.shape[0]
        cp = np.empty(n)
        dp = np.empty(n)
        dp[0] = dia[0]
        cp[0] = sup[0] / dia[0]
        for i in range(1, n):
            dp[i] = dia[i] - sub[i] * cp[i - 1]
            if i < n - 1:
                cp[i] = sup[i] / dp[i]
        return cp, dp

    @njit(cache=True, nogil=True)
    def _thomas_solve(sub, cp, dp, rhs, out):
        n = rhs.shape[0]
        out[0] = rhs[0] / dp[0]
        for i in range(1, n):
            out[i] = (rhs[i] - sub[i] * out[i - 1]) / dp[i]
        for i in range(n - 2, -1, -1):
            out[i] -= cp[i] * out[i + 1]

    @njit(cache=True, nogil=True)
    def _evolve_1d_nb(
        u0,
        n_steps,
        dt,
        sub,
        dia,
        sup,
        react_w,
        m_vals,
        w,
        measure,
        norm_steps,
        snap_steps,
        sup_cap,
    ):
        n = u0.shape[0]
        cp, dp = _thomas_factor(sub, dia, sup)
        n_norm = norm_steps.shape[0]
        n_snap = snap_steps.shape[0]
        times = np.empty(n_norm)
        sups = np.empty(n_norm)
        l2s = np.empty(n_norm)
        means = np.empty(n_norm)
        snaps = np.empty((n_snap, n))
        u = u0.copy()
        rhs = np.empty(n)
        nxt = np.empty(n)
        clip_total = 0.0
        clip_count = 0
        j_norm = 0
        j_snap = 0
        status = STATUS_OK
        for k in range(n_steps + 1):
            if j_snap < n_snap and snap_steps[j_snap] == k:
                for i in range(n):
                    snaps[j_snap, i] = u[i]
                j_snap += 1
            if j_norm < n_norm and norm_steps[j_norm] == k:
                s = 0.0
                q = 0.0
                mn = 0.0
                for i in range(n):
                    if u[i] > s:
                        s = u[i]
                    q += w[i] * u[i] * u[i]
                    mn += w[i] * u[i]
                times[j_norm] = k * dt
                sups[j_norm] = s
                l2s[j_norm] = np.sqrt(q)
                means[j_norm] = mn / measure
                j_norm += 1
                if s > sup_cap:
                    status = STATUS_UNSTABLE
                    break
            if k == n_steps:
                break
            for i in range(n):
                r = react_w[i] * u[i] * (m_vals[i] - u[i])
                rhs[i] = w[i] * (u[i] + dt * r)
            _thomas_solve(sub, cp, dp, rhs, nxt)
            for i in range(n):
                v = nxt[i]
                if v < 0.0:
                    clip_total += -v
                    clip_count += 1
                    v = 0.0
                u[i] = v
        return (
            times[:j_norm],
            sups[:j_norm],
            l2s[:j_norm],
            means[:j_norm],
            snaps[:j_snap],
            u,
            clip_total,
            clip_count,
            status,
        )

    @njit(cache=True, nogil=True)
    def _march_1d_nb(u0, max_steps, dt, sub, dia, sup, react_w, m_vals, w, rate_tol):
        n = u0.shape[0]
        cp, dp = _thomas_factor(sub, dia, sup)
        u = u0.copy()
        rhs = np.empty(n)
        nxt = np.empty(n)
        rate = np.inf
        steps = 0
        for k in range(max_steps):
            for i in range(n):
                r = react_w[i] * u[i] * (m_vals[i] - u[i])
                rhs[i] = w[i] * (u[i] + dt * r)
            _thomas_solve(sub, cp, dp, rhs, nxt)
            delta = 0.0
            for i in range(n):
                v = nxt[i]
                if v < 0.0:
                    v = 0.0
                dmag = abs(v - u[i])
                if dmag > delta:
                    delta = dmag
                u[i] = v
            steps = k + 1
            rate = delta / dt
            if rate < rate_tol:
                break
        return u, steps, rate


# -- numpy/scipy fallback -----------------------------------------------------


def _banded(sub, dia, sup):
    n = dia.shape[0]
    ab = np.zeros((3, n))
    ab[0, 1:] = sup[:-1]
    ab[1] = dia
    ab[2, :-1] = sub[1:]
    return ab


def _evolve_1d_np(
    u0,
    n_steps,
    dt,
    sub,
    dia,
    sup,
    react_w,
    m_vals,
    w,
    measure,
    norm_steps,
    snap_steps,
    sup_cap,
):
    ab = _banded(sub, dia, sup)
    n = u0.shape[0]
    times, sups, l2s, means = [], [], [], []
    snaps = []
    u = u0.copy()
    clip_total = 0.0
    clip_count = 0
    norm_set = {int(s) for s in norm_steps}
    snap_set = {int(s) for s in snap_steps}
    status = STATUS_OK
    for k in range(n_steps + 1):
        if k in snap_set:
            snaps.append(u.copy())
        if k in norm_set:
            times.append(k * dt)
            sups.append(float(u.max()))
            l2s.append(float(np.sqrt(w @ u**2)))
            means.append(float(w @ u / measure))
            if sups[-1] > sup_cap:
                status = STATUS_UNSTABLE
                break
        if k == n_steps:
            break
        rhs = w * (u + dt * react_w * u * (m_vals - u))
        u = solve_banded((1, 1), ab, rhs)
        neg = u < 0.0
        if np.any(neg):
            clip_total += float(-u[neg].sum())
            clip_count += int(neg.sum())
            u[neg] = 0.0
    return (
        np.asarray(times),
        np.asarray(sups),
        np.asarray(l2s),
        np.asarray(means),
        np.asarray(snaps) if snaps else np.empty((0, n)),
        u,
        clip_total,
        clip_count,
        status,
    )


def _march_1d_np(u0, max_steps, dt, sub, dia, sup, react_w, m_vals, w, rate_tol):
    ab = _banded(sub, dia, sup)
    u = u0.copy()
    rate = np.inf
    steps = 0
    for k in range(max_steps):
        rhs = w * (u + dt * react_w * u * (m_vals - u))
        nxt = np.maximum(solve_banded((1, 1), ab, rhs), 0.0)
        rate = float(np.max(np.abs(nxt - u)) / dt)
        u = nxt
        steps = k + 1
        if rate < rate_tol:
            break
    return u, steps, rate


def solve_tridiagonal(sub, dia, sup, rhs):
    """One tridiagonal solve through the active backend."""
    if HAS_NUMBA:
        cp, dp = _thomas_factor(sub, dia, sup)
        out = np.empty_like(rhs)
        _thomas_solve(sub, cp, dp, rhs, out)
        return out
    return solve_banded((1, 1), _banded(sub, dia, sup), rhs)


def evolve_1d(*args):
    """Fused IMEX evolution; dispatches on the active backend."""
    if HAS_NUMBA:
        return _evolve_1d_nb(*args)
    return _evolve_1d_np(*args)


def march_1d(*args):
    """March toward a steady state until max|du|/dt drops below tolerance."""
    if HAS_NUMBA:
        return _march_1d_nb(*args)
    return _march_1d_np(*args)
