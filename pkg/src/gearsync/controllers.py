"""Discrete-time PID and fuzzy-PID control laws.

Both laws share the same error bookkeeping: a backward-difference error
derivative (zero on the first call) and a rectangle-rule integral that
accumulates gain*error*dt with the gain inside the integral, clamped to
+-u_max against windup.  The fuzzy variants re-evaluate (Kp, Ki, Kd) every
step from the interval type-II inference engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fuzzy import GAIN_MAX, GAIN_MIN, IT2FisConfig, evaluate_gains

DEFAULT_U_MAX = 50.0

KIND_PID = "pid"
KIND_FPID_T1 = "fpid_t1"
KIND_FPID_T2 = "fpid_t2"
CONTROLLER_KINDS = (KIND_PID, KIND_FPID_T1, KIND_FPID_T2)


@dataclass(frozen=True)
class PidGains:
    kp: float
    ki: float
    kd: float

    def __post_init__(self):
        for name in ("kp", "ki", "kd"):
            v = getattr(self, name)
            if not (GAIN_MIN <= v <= GAIN_MAX):
                raise ValueError(
                    f"{name} must lie in [{GAIN_MIN}, {GAIN_MAX}], got {v}")


@dataclass
class ControllerState:
    """Mutable per-run bookkeeping: integral accumulator and error history."""

    integral_acc: float = 0.0
    prev_error: float = 0.0
    initialized: bool = False
    u_max: float = DEFAULT_U_MAX


@dataclass(frozen=True)
class ControllerSpec:
    """Tagged controller description: fixed-gain PID or fuzzy PID (type I/II)."""

    kind: str
    gains: PidGains | None = None
    fis: IT2FisConfig | None = None

    def __post_init__(self):
        if self.kind not in CONTROLLER_KINDS:
            raise ValueError(f"unknown controller kind {self.kind!r}")
        if self.kind == KIND_PID:
            if self.gains is None or self.fis is not None:
                raise ValueError("pid controllers take gains only")
        else:
            if self.fis is None or self.gains is not None:
                raise ValueError(f"{self.kind} controllers take a FIS config only")
            if self.kind == KIND_FPID_T1 and not self.fis.is_type1:
                raise ValueError(
                    "fpid_t1 requires sigma_lower == sigma_upper on every MF")

    @classmethod
    def pid(cls, gains: PidGains) -> "ControllerSpec":
        return cls(KIND_PID, gains=gains)

    @classmethod
    def fpid_t1(cls, fis: IT2FisConfig) -> "ControllerSpec":
        return cls(KIND_FPID_T1, fis=fis)

    @classmethod
    def fpid_t2(cls, fis: IT2FisConfig) -> "ControllerSpec":
        return cls(KIND_FPID_T2, fis=fis)


def error_derivative(e: float, state: ControllerState, dt: float) -> float:
    """Backward-difference derivative; 0 on the first call (no history)."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    ed = (e - state.prev_error) / dt if state.initialized else 0.0
    state.prev_error = e
    state.initialized = True
    return ed


def _accumulate(state: ControllerState, ki: float, e: float, dt: float) -> float:
    acc = state.integral_acc + ki * e * dt
    acc = min(max(acc, -state.u_max), state.u_max)
    state.integral_acc = acc
    return acc


def pid_step(e: float, state: ControllerState, gains: PidGains,
             dt: float) -> float:
    """One fixed-gain PID update; mutates state, returns the control force."""
    ed = error_derivative(e, state, dt)
    acc = _accumulate(state, gains.ki, e, dt)
    return gains.kp * e + acc + gains.kd * ed


def fpid_step(e: float, state: ControllerState, cfg: IT2FisConfig, dt: float):
    """One fuzzy-PID update.

    Returns (u, scheduled_gains); the gains are logged per step so runs can
    be inspected after the fact.
    """
    ed = error_derivative(e, state, dt)
    kp, ki, kd = evaluate_gains(e, ed, cfg)
    acc = _accumulate(state, ki, e, dt)
    u = kp * e + acc + kd * ed
    return u, PidGains(kp, ki, kd)


def controller_step(spec: ControllerSpec, e: float, state: ControllerState,
                    dt: float):
    """Dispatch one step of either law; returns (u, gains used this step)."""
    if spec.kind == KIND_PID:
        return pid_step(e, state, spec.gains, dt), spec.gains
    return fpid_step(e, state, spec.fis, dt)


def controller_to_json_dict(spec: ControllerSpec) -> dict:
    d = {"kind": spec.kind}
    if spec.kind == KIND_PID:
        d.update(kp=spec.gains.kp, ki=spec.gains.ki, kd=spec.gains.kd)
    else:
        d.update(spec.fis.to_json_dict())
    return d


def controller_from_json_dict(d: dict) -> ControllerSpec:
    kind = d.get("kind")
    if kind == KIND_PID:
        return ControllerSpec.pid(PidGains(float(d["kp"]), float(d["ki"]),
                                           float(d["kd"])))
    if kind in (KIND_FPID_T1, KIND_FPID_T2):
        return ControllerSpec(kind, fis=IT2FisConfig.from_json_dict(d))
    raise ValueError(f"unknown controller kind {kind!r}")
