"""Whale optimization: population search over a box with three move phases.

Agents either explore around a random peer (while the shrinking coefficient
is still large), tighten an encirclement of the best agent, or take a
logarithmic-spiral step toward it; the phase mix shifts from exploration to
exploitation as the control parameter ``a`` ramps linearly from 2 to 0.
The best-so-far agent is elitist, so the cost history never increases, and a
single seeded generator drawing in fixed agent order makes whole runs
bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class InvalidBounds(ValueError):
    """Box bounds are malformed (lo >= hi somewhere, or empty)."""


@dataclass
class WoaConfig:
    """Population size, iteration budget, spiral shape, box and seed."""

    bounds: object
    pop_size: int = 30
    max_iters: int = 100
    spiral_b: float = 1.0
    seed: int = 0

    def __post_init__(self):
        b = np.asarray(self.bounds, dtype=float)
        if b.ndim != 2 or b.shape[1] != 2 or b.shape[0] < 1:
            raise InvalidBounds("bounds must be a (dim, 2) array of (lo, hi)")
        if not np.all(np.isfinite(b)):
            raise InvalidBounds("bounds must be finite")
        if np.any(b[:, 0] >= b[:, 1]):
            raise InvalidBounds("each lower bound must be < its upper bound")
        self.bounds = b
        if self.pop_size < 2:
            raise ValueError(f"pop_size must be >= 2, got {self.pop_size}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")

    @property
    def dim(self) -> int:
        return int(self.bounds.shape[0])

    @property
    def lower(self) -> np.ndarray:
        return self.bounds[:, 0]

    @property
    def upper(self) -> np.ndarray:
        return self.bounds[:, 1]


@dataclass
class Agent:
    position: np.ndarray
    cost: float


@dataclass
class WoaResult:
    """Best point found, its cost, and the per-iteration best-cost history."""

    best_position: np.ndarray
    best_cost: float
    history: np.ndarray
    seed: int
    nan_evaluations: int = 0


def a_schedule(iteration: int, max_iters: int) -> float:
    """Linear ramp from 2 (first iteration) to 0 (last)."""
    if not 0 <= iteration < max_iters:
        raise ValueError(f"iteration {iteration} outside [0, {max_iters})")
    return 2.0 * (1.0 - iteration / max(max_iters - 1, 1))


def coefficients(a: float, rng, dim: int):
    """Draw the move coefficients (A, C) for one agent.

    A = 2*a*r - a from a single scalar draw (applied uniformly across
    dimensions, so the |A| >= 1 exploration test is unambiguous); C = 2*r
    with a fresh draw per dimension.
    """
    A = 2.0 * a * float(rng.random()) - a
    C = 2.0 * rng.random(dim)
    return A, C


def _clamp(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return np.minimum(np.maximum(x, lo), hi)


def search_move(x, x_rand, A, C, lo, hi) -> np.ndarray:
    """Exploration step around a random peer: x' = x_rand - A*|C*x_rand - x|."""
    d = np.abs(C * x_rand - x)
    return _clamp(x_rand - A * d, lo, hi)


def encircle_move(x, x_star, A, C, lo, hi) -> np.ndarray:
    """Shrinking encirclement of the best agent."""
    d = np.abs(C * x_star - x)
    return _clamp(x_star - A * d, lo, hi)


def spiral_move(x, x_star, b, l, lo, hi) -> np.ndarray:
    """Logarithmic-spiral step toward the best agent; l in [-1, 1]."""
    d = np.abs(x_star - x)
    return _clamp(d * math.exp(b * l) * math.cos(2.0 * math.pi * l) + x_star,
                  lo, hi)


def optimize(cost_fn, cfg: WoaConfig) -> WoaResult:
    """Minimize cost_fn over the box; deterministic for a fixed seed.

    cost_fn must accept any in-bounds vector; a NaN cost is recorded as +inf
    (counted in the result's diagnostics) and the run continues.  The first
    history entry is the best of the uniformly seeded initial population;
    with max_iters = 1 no agent ever moves.
    """
    rng = np.random.default_rng(cfg.seed)
    lo, hi = cfg.lower, cfg.upper
    dim = cfg.dim
    nan_count = 0

    def evaluate(x):
        nonlocal nan_count
        c = float(cost_fn(x))
        if math.isnan(c):
            nan_count += 1
            return math.inf
        return c

    positions = lo + rng.random((cfg.pop_size, dim)) * (hi - lo)
    costs = np.array([evaluate(p) for p in positions])
    best_idx = int(np.argmin(costs))
    best_pos = positions[best_idx].copy()
    best_cost = float(costs[best_idx])

    history = np.empty(cfg.max_iters)
    history[0] = best_cost

    for it in range(1, cfg.max_iters):
        # The a-ramp endpoints (2 and 0) land on the first and last move.
        a = a_schedule(it - 1, max(cfg.max_iters - 1, 1))
        for i in range(cfg.pop_size):
            A, C = coefficients(a, rng, dim)
            p = float(rng.random())
            if p < 0.5:
                if abs(A) >= 1.0:
                    j = int(rng.integers(cfg.pop_size))
                    positions[i] = search_move(positions[i], positions[j],
                                               A, C, lo, hi)
                else:
                    positions[i] = encircle_move(positions[i], best_pos,
                                                 A, C, lo, hi)
            else:
                l = float(rng.uniform(-1.0, 1.0))
                positions[i] = spiral_move(positions[i], best_pos,
                                           cfg.spiral_b, l, lo, hi)
            # Each agent is scored as soon as it moves, so agents later in
            # the order exploit an elite improved within the iteration.
            costs[i] = evaluate(positions[i])
            if costs[i] < best_cost:
                best_cost = float(costs[i])
                best_pos = positions[i].copy()
        history[it] = best_cost

    return WoaResult(best_position=best_pos, best_cost=best_cost,
                     history=history, seed=cfg.seed,
                     nan_evaluations=nan_count)


# Benchmark surfaces for exercising the optimizer in isolation.

def sphere(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum(x * x))


def rosenbrock(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2
                        + (1.0 - x[:-1]) ** 2))


def rastrigin(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(10.0 * x.size
                 + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


BENCHMARKS = {"sphere": sphere, "rosenbrock": rosenbrock,
              "rastrigin": rastrigin}
