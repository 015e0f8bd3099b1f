"""Interval type-II fuzzy inference with closed-form type reduction.

Antecedents are Gaussian sets whose sigma is uncertain (a lower/upper pair),
consequents are singletons, and the t-norm is the product.  Type reduction is
the Biglarbegian m-blend: the crisp output is a convex combination of the
normalized upper and lower firing averages, so no iterative reduction is
needed.  A type-I system is the degenerate case sigma_lower == sigma_upper.

Membership grades use exp(-(x - c)^2 / sigma^2), i.e. without the 1/2 factor
of the probabilist's Gaussian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MF_PER_INPUT = 3
RULE_COUNT = MF_PER_INPUT * MF_PER_INPUT

# Firing sums below this are treated as underflowed; the normalized vector
# falls back to uniform.  Gaussians are analytically positive, so this only
# guards floating-point underflow far from every center.
_UNDERFLOW_SUM = 1e-300

GAIN_MIN = 0.0
GAIN_MAX = 10.0


@dataclass(frozen=True)
class IT2GaussianMF:
    """Gaussian set with uncertain sigma: grades span [lower, upper]."""

    center: float
    sigma_lower: float
    sigma_upper: float

    def __post_init__(self):
        if not math.isfinite(self.center):
            raise ValueError("MF center must be finite")
        if not 0.0 < self.sigma_lower <= self.sigma_upper:
            raise ValueError(
                f"need 0 < sigma_lower <= sigma_upper, got "
                f"{self.sigma_lower}, {self.sigma_upper}")

    @classmethod
    def type1(cls, center: float, sigma: float) -> "IT2GaussianMF":
        """Degenerate interval set with a crisp sigma."""
        return cls(center, sigma, sigma)


@dataclass(frozen=True, eq=False)
class IT2FisConfig:
    """Full inference configuration for the three scheduled gains.

    Three sets per input, full 3x3 rule grid in row-major (error-set,
    derivative-set) order, and one consequent singleton per rule per gain.
    ``m`` blends the upper and lower firing averages.
    """

    e_mfs: tuple
    de_mfs: tuple
    theta_kp: np.ndarray
    theta_ki: np.ndarray
    theta_kd: np.ndarray
    m: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "e_mfs", tuple(self.e_mfs))
        object.__setattr__(self, "de_mfs", tuple(self.de_mfs))
        for name in ("theta_kp", "theta_ki", "theta_kd"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (RULE_COUNT,):
                raise ValueError(f"{name} must hold {RULE_COUNT} singletons")
            if np.any(arr < GAIN_MIN) or np.any(arr > GAIN_MAX):
                raise ValueError(
                    f"{name} entries must lie in [{GAIN_MIN}, {GAIN_MAX}]")
            object.__setattr__(self, name, arr)
        if len(self.e_mfs) != MF_PER_INPUT or len(self.de_mfs) != MF_PER_INPUT:
            raise ValueError(f"each input needs exactly {MF_PER_INPUT} MFs")
        if not all(isinstance(mf, IT2GaussianMF)
                   for mf in (*self.e_mfs, *self.de_mfs)):
            raise TypeError("MFs must be IT2GaussianMF instances")
        if not 0.0 <= self.m <= 1.0:
            raise ValueError(f"m must lie in [0, 1], got {self.m}")

    @property
    def is_type1(self) -> bool:
        return all(mf.sigma_lower == mf.sigma_upper
                   for mf in (*self.e_mfs, *self.de_mfs))

    def to_json_dict(self) -> dict:
        def mfs(seq):
            return [{"center": mf.center,
                     "sigma_lower": mf.sigma_lower,
                     "sigma_upper": mf.sigma_upper} for mf in seq]
        return {
            "e_mfs": mfs(self.e_mfs),
            "de_mfs": mfs(self.de_mfs),
            "theta_kp": list(self.theta_kp),
            "theta_ki": list(self.theta_ki),
            "theta_kd": list(self.theta_kd),
            "m": self.m,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "IT2FisConfig":
        def mfs(items):
            return tuple(IT2GaussianMF(f["center"], f["sigma_lower"],
                                       f["sigma_upper"]) for f in items)
        return cls(e_mfs=mfs(d["e_mfs"]), de_mfs=mfs(d["de_mfs"]),
                   theta_kp=np.array(d["theta_kp"], dtype=float),
                   theta_ki=np.array(d["theta_ki"], dtype=float),
                   theta_kd=np.array(d["theta_kd"], dtype=float),
                   m=float(d["m"]))


@dataclass(frozen=True, eq=False)
class FiringVectors:
    """Normalized lower/upper rule firing strengths (each sums to 1)."""

    zeta_lower: np.ndarray
    zeta_upper: np.ndarray

    def __post_init__(self):
        for name in ("zeta_lower", "zeta_upper"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (RULE_COUNT,):
                raise ValueError(f"{name} must hold {RULE_COUNT} entries")
            if np.any(arr < 0):
                raise ValueError(f"{name} entries must be nonnegative")
            if abs(arr.sum() - 1.0) > 1e-12:
                raise ValueError(f"{name} must sum to 1")
            object.__setattr__(self, name, arr)


def mf_grades(x: float, mf: IT2GaussianMF):
    """(lower, upper) membership grades of x in an interval Gaussian set."""
    q = (x - mf.center) * (x - mf.center)
    mu_lower = math.exp(-q / (mf.sigma_lower * mf.sigma_lower))
    mu_upper = math.exp(-q / (mf.sigma_upper * mf.sigma_upper))
    return mu_lower, mu_upper


def rule_firings(e: float, de: float, cfg: IT2FisConfig):
    """Per-rule product firing strengths (w_lower, w_upper), row-major.

    Rule 3*i + j pairs the i-th error set with the j-th derivative set.
    """
    e_lo = np.empty(MF_PER_INPUT)
    e_up = np.empty(MF_PER_INPUT)
    de_lo = np.empty(MF_PER_INPUT)
    de_up = np.empty(MF_PER_INPUT)
    for i in range(MF_PER_INPUT):
        e_lo[i], e_up[i] = mf_grades(e, cfg.e_mfs[i])
        de_lo[i], de_up[i] = mf_grades(de, cfg.de_mfs[i])
    w_lower = np.outer(e_lo, de_lo).ravel()
    w_upper = np.outer(e_up, de_up).ravel()
    return w_lower, w_upper


def normalize(w_lower, w_upper) -> FiringVectors:
    """Normalize each firing band to sum 1, falling back to uniform on underflow."""
    w_lower = np.asarray(w_lower, dtype=float)
    w_upper = np.asarray(w_upper, dtype=float)
    if np.any(w_lower < 0) or np.any(w_upper < 0):
        raise ValueError("firing strengths must be nonnegative")

    def norm(w):
        s = float(w.sum())
        if s < _UNDERFLOW_SUM:
            return np.full(w.size, 1.0 / w.size)
        return w / s

    return FiringVectors(zeta_lower=norm(w_lower), zeta_upper=norm(w_upper))


def biglarbegian_output(zeta: FiringVectors, theta, m: float) -> float:
    """Crisp output theta . (m*zeta_upper + (1-m)*zeta_lower).

    The result is clipped to [min theta, max theta]: it is a convex
    combination of the singletons, so any excursion is rounding dust and the
    clip makes the boundedness guarantee exact.
    """
    if not 0.0 <= m <= 1.0:
        raise ValueError(f"m must lie in [0, 1], got {m}")
    theta = np.asarray(theta, dtype=float)
    combined = m * zeta.zeta_upper + (1.0 - m) * zeta.zeta_lower
    out = float(theta @ combined)
    return min(max(out, float(theta.min())), float(theta.max()))


def evaluate_gains(e: float, de: float, cfg: IT2FisConfig):
    """Scheduled (Kp, Ki, Kd) for one (error, error-derivative) pair."""
    w_lower, w_upper = rule_firings(e, de, cfg)
    zeta = normalize(w_lower, w_upper)
    return (biglarbegian_output(zeta, cfg.theta_kp, cfg.m),
            biglarbegian_output(zeta, cfg.theta_ki, cfg.m),
            biglarbegian_output(zeta, cfg.theta_kd, cfg.m))
