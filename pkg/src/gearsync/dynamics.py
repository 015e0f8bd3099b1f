"""Chaotic spur-gear plant and fixed-step RK4 integration.

The plant is a forced Duffing-type oscillator in dimensionless time: a
double-well cubic restoring term, weak damping, and a small harmonic mesh
force.  A fixed step is used throughout so that repeated simulations are
deterministic and tuning costs are comparable run to run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels

DEFAULT_DT = 0.01
DEFAULT_PORTRAIT_HORIZON = 500.0
DEFAULT_MAX_STEPS = 10_000_000


class NonFiniteState(RuntimeError):
    """The state became NaN/Inf during integration."""


class StepBudgetExceeded(RuntimeError):
    """The requested horizon needs more steps than the configured budget."""


class LengthMismatch(ValueError):
    """Trajectories under comparison are not sampled on the same grid."""


@dataclass(frozen=True)
class SpurGearParams:
    """Physical and forcing constants of the gear oscillator.

    Defaults are the nominal chaotic operating point.  ``epsilon`` scales
    both the damping and the mesh force; ``omega_e`` and ``phi_e`` are the
    excitation frequency and phase.
    """

    epsilon: float = 0.01
    mu: float = 9.0
    f_m: float = 1.0
    f_e: float = 30.0
    omega_e: float = 0.5
    phi_e: float = 0.0

    def __post_init__(self):
        values = (self.epsilon, self.mu, self.f_m, self.f_e,
                  self.omega_e, self.phi_e)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("gear parameters must be finite")
        # epsilon = 0 is allowed: it is the undamped/unforced limit used by
        # the conservation sanity checks.
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.omega_e <= 0:
            raise ValueError(f"omega_e must be > 0, got {self.omega_e}")

    @classmethod
    def nominal(cls) -> "SpurGearParams":
        return cls()


@dataclass(frozen=True)
class GearState:
    """Dimensionless displacement, velocity and time."""

    x1: float
    x2: float
    tau: float = 0.0


@dataclass
class Trajectory:
    """Uniformly sampled (tau, x1, x2, u) time series."""

    dt: float
    tau: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        self.tau = np.asarray(self.tau, dtype=float)
        self.x1 = np.asarray(self.x1, dtype=float)
        self.x2 = np.asarray(self.x2, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        n = self.tau.size
        if any(a.size != n for a in (self.x1, self.x2, self.u)):
            raise ValueError("trajectory columns must have equal length")
        if n == 0:
            raise ValueError("trajectory must hold at least one sample")
        if n > 1:
            gaps = np.diff(self.tau)
            # Tolerance is relative to the time scale: taus materialized as
            # k*dt already wobble by ~ulp(tau_end), which exceeds 1e-12*dt
            # on long horizons.
            tol = 1e-12 * max(1.0, abs(float(self.tau[-1])))
            if np.any(gaps <= 0) or np.max(np.abs(gaps - self.dt)) > tol:
                raise ValueError("taus must increase uniformly by dt")

    def __len__(self) -> int:
        return int(self.tau.size)


def gear_rhs(state: GearState, u: float, params: SpurGearParams):
    """Time derivative (dx1, dx2) of the gear oscillator under control u."""
    dx1 = state.x2
    dx2 = (
        -2.0 * params.epsilon * params.mu * state.x2
        + (0.1667 * state.x1 - 0.1667 * (state.x1 * state.x1 * state.x1))
        + params.epsilon * (params.f_m + params.f_e
                            * (params.omega_e * params.omega_e)
                            * math.cos(params.omega_e * state.tau + params.phi_e))
        + u
    )
    return dx1, dx2


def rk4_step(state: GearState, dt: float, u: float, params: SpurGearParams,
             rhs=gear_rhs) -> GearState:
    """One classical 4-stage Runge-Kutta step with u held constant.

    ``rhs`` is injectable so surrogate dynamics (with known analytic
    solutions) can exercise the stepper; it must map (state, u, params) to
    (dx1, dx2).  dt = 0 is the identity.
    """
    if dt < 0:
        raise ValueError(f"dt must be >= 0, got {dt}")
    x1, x2, tau = state.x1, state.x2, state.tau
    a1, a2 = rhs(state, u, params)
    b1, b2 = rhs(GearState(x1 + 0.5 * dt * a1, x2 + 0.5 * dt * a2,
                           tau + 0.5 * dt), u, params)
    c1, c2 = rhs(GearState(x1 + 0.5 * dt * b1, x2 + 0.5 * dt * b2,
                           tau + 0.5 * dt), u, params)
    d1, d2 = rhs(GearState(x1 + dt * c1, x2 + dt * c2, tau + dt), u, params)
    stages = (a1, a2, b1, b2, c1, c2, d1, d2)
    nx1 = x1 + (dt / 6.0) * (a1 + 2.0 * b1 + 2.0 * c1 + d1)
    nx2 = x2 + (dt / 6.0) * (a2 + 2.0 * b2 + 2.0 * c2 + d2)
    if not all(math.isfinite(v) for v in (*stages, nx1, nx2)):
        raise NonFiniteState(f"non-finite state in RK4 step from tau={tau}")
    return GearState(nx1, nx2, tau + dt)


def simulate_open_loop(init, t_end: float, dt: float = DEFAULT_DT,
                       params: SpurGearParams | None = None,
                       max_steps: int = DEFAULT_MAX_STEPS) -> Trajectory:
    """Integrate the uncontrolled plant from (x1, x2) at tau = 0.

    Raises StepBudgetExceeded before integrating if t_end/dt needs more than
    ``max_steps`` steps, and NonFiniteState if the state blows up (the run is
    aborted rather than clamped).
    """
    if params is None:
        params = SpurGearParams.nominal()
    if t_end <= 0 or dt <= 0:
        raise ValueError("t_end and dt must be > 0")
    n = int(round(t_end / dt))
    if n < 1:
        raise ValueError(f"horizon {t_end} is shorter than one step of {dt}")
    if n > max_steps:
        raise StepBudgetExceeded(f"{n} steps exceed the budget of {max_steps}")
    x10, x20 = float(init[0]), float(init[1])
    x1, x2, abort = kernels.open_loop(
        x10, x20, n, dt, params.epsilon, params.mu, params.f_m,
        params.f_e, params.omega_e, params.phi_e)
    if abort >= 0:
        raise NonFiniteState(
            f"state became non-finite near tau={abort * dt:.6g}")
    tau = np.arange(n + 1) * dt
    return Trajectory(dt=dt, tau=tau, x1=x1, x2=x2, u=np.zeros(n + 1))


def divergence_metric(a: Trajectory, b: Trajectory) -> float:
    """Largest Euclidean (x1, x2) distance between two same-grid runs."""
    if len(a) != len(b):
        raise LengthMismatch(f"sample counts differ: {len(a)} vs {len(b)}")
    if a.dt != b.dt:
        raise LengthMismatch(f"step sizes differ: {a.dt} vs {b.dt}")
    return float(np.max(np.hypot(a.x1 - b.x1, a.x2 - b.x2)))
