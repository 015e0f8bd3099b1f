"""Integral error indices (IAE, ITAE) and the tuning cost built on them.

Both indices use the left-endpoint rectangle rule on the control-step error
sequence, matching the controllers' own integral discretization: sample k
carries time k*dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class EmptySequence(ValueError):
    """An index was requested for an empty error sequence."""


@dataclass(frozen=True)
class IndexReport:
    """IAE/ITAE summary of one run."""

    iae: float
    itae: float
    horizon: float
    dt: float


def _as_errors(errors, dt: float) -> np.ndarray:
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    e = np.asarray(errors, dtype=float)
    if e.size == 0:
        raise EmptySequence("no error samples")
    return e


def iae(errors, dt: float) -> float:
    """Integral of |e|: sum |e_k| * dt."""
    e = _as_errors(errors, dt)
    return float(np.sum(np.abs(e)) * dt)


def itae(errors, dt: float) -> float:
    """Time-weighted integral of |e|: sum (k*dt) * |e_k| * dt."""
    e = _as_errors(errors, dt)
    t = np.arange(e.size) * dt
    return float(np.sum(t * np.abs(e)) * dt)


def report(errors, dt: float) -> IndexReport:
    e = _as_errors(errors, dt)
    return IndexReport(iae=iae(e, dt), itae=itae(e, dt),
                       horizon=e.size * dt, dt=dt)


def cost(rep: IndexReport, w_iae: float = 1.0, w_itae: float = 1.0) -> float:
    """Weighted index sum; non-finite indices (aborted runs) map to +inf."""
    if w_iae < 0 or w_itae < 0:
        raise ValueError("weights must be nonnegative")
    if w_iae == 0 and w_itae == 0:
        raise ValueError("at least one weight must be positive")
    if not (math.isfinite(rep.iae) and math.isfinite(rep.itae)):
        return math.inf
    return w_iae * rep.iae + w_itae * rep.itae
