"""Numba-compiled inner loops for the simulator and the tuning harness.

These kernels exist purely for speed: tuning a controller means thousands of
10^4-step closed-loop simulations, which is hours in plain Python and seconds
compiled.  The step math mirrors the reference operations in ``dynamics``,
``fuzzy`` and ``controllers`` term by term; the test suite cross-checks the
kernels against step-by-step composition of those operations.

In synchronization mode the master system is integrated inside the same loop
(and with the same compiled arithmetic) as the slave, so a slave started on
the master's initial state tracks it exactly, and the master samples are
bitwise identical to an ``open_loop`` run from the same state.
"""

import math

import numpy as np
from numba import njit

RULE_COUNT = 9
MF_PER_INPUT = 3

# Below this, a firing-strength sum is treated as underflowed and the
# normalized vector falls back to uniform (mirrors fuzzy.normalize).
UNDERFLOW_SUM = 1e-300


@njit(cache=True, nogil=True)
def _rhs(x1, x2, tau, u, eps, mu, f_m, f_e, om, phi):
    dx1 = x2
    dx2 = (
        -2.0 * eps * mu * x2
        + (0.1667 * x1 - 0.1667 * (x1 * x1 * x1))
        + eps * (f_m + f_e * (om * om) * math.cos(om * tau + phi))
        + u
    )
    return dx1, dx2


@njit(cache=True, nogil=True)
def _rk4(x1, x2, tau, dt, u, eps, mu, f_m, f_e, om, phi):
    a1, a2 = _rhs(x1, x2, tau, u, eps, mu, f_m, f_e, om, phi)
    b1, b2 = _rhs(x1 + 0.5 * dt * a1, x2 + 0.5 * dt * a2, tau + 0.5 * dt, u,
                  eps, mu, f_m, f_e, om, phi)
    c1, c2 = _rhs(x1 + 0.5 * dt * b1, x2 + 0.5 * dt * b2, tau + 0.5 * dt, u,
                  eps, mu, f_m, f_e, om, phi)
    d1, d2 = _rhs(x1 + dt * c1, x2 + dt * c2, tau + dt, u,
                  eps, mu, f_m, f_e, om, phi)
    nx1 = x1 + (dt / 6.0) * (a1 + 2.0 * b1 + 2.0 * c1 + d1)
    nx2 = x2 + (dt / 6.0) * (a2 + 2.0 * b2 + 2.0 * c2 + d2)
    return nx1, nx2


@njit(cache=True, nogil=True)
def open_loop(x10, x20, n, dt, eps, mu, f_m, f_e, om, phi):
    """Integrate n steps with u = 0. Returns (x1, x2, abort_index).

    abort_index is -1 on success, otherwise the first sample index holding a
    non-finite state (samples beyond it are zero).
    """
    x1 = np.zeros(n + 1)
    x2 = np.zeros(n + 1)
    x1[0] = x10
    x2[0] = x20
    for k in range(n):
        tau = k * dt
        nx1, nx2 = _rk4(x1[k], x2[k], tau, dt, 0.0, eps, mu, f_m, f_e, om, phi)
        x1[k + 1] = nx1
        x2[k + 1] = nx2
        if not (math.isfinite(nx1) and math.isfinite(nx2)):
            return x1, x2, k + 1
    return x1, x2, -1


@njit(cache=True, nogil=True)
def _fis_gains(e, de, e_c, e_sl, e_su, de_c, de_sl, de_su,
               th_kp, th_ki, th_kd, m):
    """Type-reduced (Kp, Ki, Kd) for one (error, error-derivative) pair."""
    gel = np.empty(MF_PER_INPUT)
    geu = np.empty(MF_PER_INPUT)
    gdl = np.empty(MF_PER_INPUT)
    gdu = np.empty(MF_PER_INPUT)
    for i in range(MF_PER_INPUT):
        d = e - e_c[i]
        q = d * d
        gel[i] = math.exp(-q / (e_sl[i] * e_sl[i]))
        geu[i] = math.exp(-q / (e_su[i] * e_su[i]))
        d = de - de_c[i]
        q = d * d
        gdl[i] = math.exp(-q / (de_sl[i] * de_sl[i]))
        gdu[i] = math.exp(-q / (de_su[i] * de_su[i]))

    zl = np.empty(RULE_COUNT)
    zu = np.empty(RULE_COUNT)
    sl = 0.0
    su = 0.0
    for i in range(MF_PER_INPUT):
        for j in range(MF_PER_INPUT):
            wl = gel[i] * gdl[j]
            wu = geu[i] * gdu[j]
            zl[MF_PER_INPUT * i + j] = wl
            zu[MF_PER_INPUT * i + j] = wu
            sl += wl
            su += wu
    if sl < UNDERFLOW_SUM:
        for r in range(RULE_COUNT):
            zl[r] = 1.0 / RULE_COUNT
    else:
        for r in range(RULE_COUNT):
            zl[r] /= sl
    if su < UNDERFLOW_SUM:
        for r in range(RULE_COUNT):
            zu[r] = 1.0 / RULE_COUNT
    else:
        for r in range(RULE_COUNT):
            zu[r] /= su

    kp = 0.0
    ki = 0.0
    kd = 0.0
    for r in range(RULE_COUNT):
        zc = m * zu[r] + (1.0 - m) * zl[r]
        kp += th_kp[r] * zc
        ki += th_ki[r] * zc
        kd += th_kd[r] * zc
    # Convex combination cannot leave [min th, max th]; clip rounding dust so
    # the bound holds exactly (mirrors fuzzy.biglarbegian_output).
    kp = min(max(kp, np.min(th_kp)), np.max(th_kp))
    ki = min(max(ki, np.min(th_ki)), np.max(th_ki))
    kd = min(max(kd, np.min(th_kd)), np.max(th_kd))
    return kp, ki, kd


@njit(cache=True, nogil=True)
def closed_loop_pid(px10, px20, sync, mx10, mx20, n, dt,
                    eps, mu, f_m, f_e, om, phi,
                    meps, mmu, mf_m, mf_e, mom, mphi,
                    kp, ki, kd, u_max):
    """Fixed-gain PID regulation/synchronization run.

    Plant and (in sync mode) master advance in lockstep; the reference is 0
    in regulation mode and the master's first state otherwise.  Returns
    (x1, x2, ref, e, u, abort_index); e and u have one entry per control
    step, the state arrays one per sample.
    """
    x1 = np.zeros(n + 1)
    x2 = np.zeros(n + 1)
    ref = np.zeros(n + 1)
    e_arr = np.zeros(n)
    u_arr = np.zeros(n)
    x1[0] = px10
    x2[0] = px20
    m1 = mx10
    m2 = mx20
    acc = 0.0
    prev_e = 0.0
    for k in range(n):
        tau = k * dt
        r = m1 if sync else 0.0
        ref[k] = r
        e = r - x1[k]
        ed = 0.0 if k == 0 else (e - prev_e) / dt
        prev_e = e
        acc += ki * e * dt
        if acc > u_max:
            acc = u_max
        elif acc < -u_max:
            acc = -u_max
        u = kp * e + acc + kd * ed
        e_arr[k] = e
        u_arr[k] = u
        nx1, nx2 = _rk4(x1[k], x2[k], tau, dt, u, eps, mu, f_m, f_e, om, phi)
        x1[k + 1] = nx1
        x2[k + 1] = nx2
        if sync:
            m1, m2 = _rk4(m1, m2, tau, dt, 0.0, meps, mmu, mf_m, mf_e, mom, mphi)
        if not (math.isfinite(nx1) and math.isfinite(nx2)
                and math.isfinite(m1) and math.isfinite(m2)):
            return x1, x2, ref, e_arr, u_arr, k + 1
    ref[n] = m1 if sync else 0.0
    return x1, x2, ref, e_arr, u_arr, -1


@njit(cache=True, nogil=True)
def closed_loop_fpid(px10, px20, sync, mx10, mx20, n, dt,
                     eps, mu, f_m, f_e, om, phi,
                     meps, mmu, mf_m, mf_e, mom, mphi,
                     e_c, e_sl, e_su, de_c, de_sl, de_su,
                     th_kp, th_ki, th_kd, m, u_max):
    """Fuzzy-PID run with per-step gain scheduling.

    Same contract as closed_loop_pid plus a (n, 3) array of the scheduled
    (Kp, Ki, Kd) values.
    """
    x1 = np.zeros(n + 1)
    x2 = np.zeros(n + 1)
    ref = np.zeros(n + 1)
    e_arr = np.zeros(n)
    u_arr = np.zeros(n)
    gains = np.zeros((n, 3))
    x1[0] = px10
    x2[0] = px20
    m1 = mx10
    m2 = mx20
    acc = 0.0
    prev_e = 0.0
    for k in range(n):
        tau = k * dt
        r = m1 if sync else 0.0
        ref[k] = r
        e = r - x1[k]
        ed = 0.0 if k == 0 else (e - prev_e) / dt
        prev_e = e
        kp, ki, kd = _fis_gains(e, ed, e_c, e_sl, e_su, de_c, de_sl, de_su,
                                th_kp, th_ki, th_kd, m)
        acc += ki * e * dt
        if acc > u_max:
            acc = u_max
        elif acc < -u_max:
            acc = -u_max
        u = kp * e + acc + kd * ed
        e_arr[k] = e
        u_arr[k] = u
        gains[k, 0] = kp
        gains[k, 1] = ki
        gains[k, 2] = kd
        nx1, nx2 = _rk4(x1[k], x2[k], tau, dt, u, eps, mu, f_m, f_e, om, phi)
        x1[k + 1] = nx1
        x2[k + 1] = nx2
        if sync:
            m1, m2 = _rk4(m1, m2, tau, dt, 0.0, meps, mmu, mf_m, mf_e, mom, mphi)
        if not (math.isfinite(nx1) and math.isfinite(nx2)
                and math.isfinite(m1) and math.isfinite(m2)):
            return x1, x2, ref, e_arr, u_arr, gains, k + 1
    ref[n] = m1 if sync else 0.0
    return x1, x2, ref, e_arr, u_arr, gains, -1
