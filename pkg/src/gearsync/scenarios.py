"""Regulation/synchronization experiments and the tuning pipeline.

Four stock experiments are provided: regulation of the gear oscillator to
the origin (1), master-slave synchronization from mismatched initial states
(2 and 4), and tracking of an uncontrolled chaotic trajectory (3).  Each can
be driven by a fixed-gain PID or a fuzzy PID whose whole parameterization
(MF placement, consequent singletons, blend weight, or the three PID gains)
is flattened into a box-bounded vector and tuned by the whale optimizer
against the combined IAE+ITAE cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernels, metrics, woa
from .controllers import (DEFAULT_U_MAX, KIND_FPID_T1, KIND_FPID_T2, KIND_PID,
                          CONTROLLER_KINDS, ControllerSpec, PidGains)
from .dynamics import (DEFAULT_DT, DEFAULT_MAX_STEPS, NonFiniteState,
                       SpurGearParams, StepBudgetExceeded)
from .fuzzy import IT2FisConfig, IT2GaussianMF

DEFAULT_HORIZON = 100.0

MODE_REGULATION = "regulation"
MODE_SYNCHRONIZATION = "synchronization"

# Search-box edges for the flattened controller parameterizations.
CENTER_LO, CENTER_HI = -4.0, 4.0
SIGMA_LO, SIGMA_HI = 0.05, 4.0
WIDEN_LO, WIDEN_HI = 0.0, 2.0
GAIN_LO, GAIN_HI = 0.0, 10.0
M_LO, M_HI = 0.0, 1.0

_N_MF = 3
_N_RULES = 9


class UnknownScenario(ValueError):
    """Scenario id outside 1..4."""


@dataclass(frozen=True)
class Perturbation:
    """Relative perturbation of the damping and force coefficients."""

    mu: float = 0.0
    f_m: float = 0.0
    f_e: float = 0.0

    def __post_init__(self):
        for name in ("mu", "f_m", "f_e"):
            if abs(getattr(self, name)) > 0.5:
                raise ValueError(f"|{name}| perturbation must be <= 0.5")


@dataclass(frozen=True)
class Scenario:
    """One experiment: what the plant starts at and what it must follow."""

    id: int
    mode: str
    reference_init: tuple
    plant_init: tuple
    horizon: float = DEFAULT_HORIZON
    dt: float = DEFAULT_DT
    uncertainty: Perturbation | None = None

    def __post_init__(self):
        if self.id not in (1, 2, 3, 4):
            raise UnknownScenario(f"scenario id must be 1..4, got {self.id}")
        if self.mode not in (MODE_REGULATION, MODE_SYNCHRONIZATION):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.horizon <= 0 or self.dt <= 0:
            raise ValueError("horizon and dt must be > 0")


@dataclass
class ScenarioResult:
    """Closed-loop time series plus the IAE/ITAE summary.

    State columns have one entry per sample; ``control`` (and ``gains``
    for fuzzy runs, columns Kp/Ki/Kd) one per control step.  ``error`` is
    per sample; the report is computed over its first n entries, the errors
    the controller actually acted on.
    """

    tau: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    reference: np.ndarray
    error: np.ndarray
    control: np.ndarray
    gains: np.ndarray | None
    report: metrics.IndexReport


def build_scenario(scenario_id: int) -> Scenario:
    """The four stock experiments, nominal horizon/dt, no uncertainty."""
    if scenario_id == 1:
        return Scenario(1, MODE_REGULATION, (0.0, 0.0), (0.0, 0.0))
    if scenario_id == 2:
        return Scenario(2, MODE_SYNCHRONIZATION, (1.0, -1.0), (0.0, 0.0))
    if scenario_id == 3:
        # Reference is the uncontrolled chaotic trajectory from (-1, 0.5).
        return Scenario(3, MODE_SYNCHRONIZATION, (-1.0, 0.5), (0.0, 0.0))
    if scenario_id == 4:
        return Scenario(4, MODE_SYNCHRONIZATION, (0.0, 0.0), (-1.0, 2.0))
    raise UnknownScenario(f"scenario id must be 1..4, got {scenario_id}")


def apply_uncertainty(params: SpurGearParams,
                      rel: Perturbation) -> SpurGearParams:
    """Scale (mu, f_m, f_e) by (1 + rel); epsilon/omega_e/phi_e untouched."""
    return replace(params,
                   mu=params.mu * (1.0 + rel.mu),
                   f_m=params.f_m * (1.0 + rel.f_m),
                   f_e=params.f_e * (1.0 + rel.f_e))


# --- flattened parameter vectors -------------------------------------------

def search_dim(kind: str) -> int:
    return {KIND_PID: 3, KIND_FPID_T1: 39, KIND_FPID_T2: 46}[kind]


def search_bounds(kind: str) -> np.ndarray:
    """Box bounds matching the encode/decode layout of ``kind``."""
    gain = [(GAIN_LO, GAIN_HI)]
    center = [(CENTER_LO, CENTER_HI)] * _N_MF
    sigma = [(SIGMA_LO, SIGMA_HI)] * _N_MF
    widen = [(WIDEN_LO, WIDEN_HI)] * _N_MF
    if kind == KIND_PID:
        return np.array(gain * 3)
    if kind == KIND_FPID_T1:
        return np.array((center + sigma) * 2 + gain * (3 * _N_RULES))
    if kind == KIND_FPID_T2:
        return np.array((center + sigma + widen) * 2
                        + gain * (3 * _N_RULES) + [(M_LO, M_HI)])
    raise ValueError(f"unknown controller kind {kind!r}")


def decode_params(kind: str, vector) -> ControllerSpec:
    """Rebuild a controller from its flattened parameter vector."""
    v = np.asarray(vector, dtype=float)
    if v.shape != (search_dim(kind),):
        raise ValueError(
            f"{kind} expects {search_dim(kind)} parameters, got {v.shape}")
    if kind == KIND_PID:
        return ControllerSpec.pid(PidGains(v[0], v[1], v[2]))

    def type1_mfs(block):
        return tuple(IT2GaussianMF.type1(block[i], block[_N_MF + i])
                     for i in range(_N_MF))

    def interval_mfs(block):
        return tuple(IT2GaussianMF(block[i], block[_N_MF + i],
                                   block[_N_MF + i] + block[2 * _N_MF + i])
                     for i in range(_N_MF))

    if kind == KIND_FPID_T1:
        fis = IT2FisConfig(e_mfs=type1_mfs(v[0:6]), de_mfs=type1_mfs(v[6:12]),
                           theta_kp=v[12:21], theta_ki=v[21:30],
                           theta_kd=v[30:39], m=0.5)
        return ControllerSpec.fpid_t1(fis)
    if kind == KIND_FPID_T2:
        fis = IT2FisConfig(e_mfs=interval_mfs(v[0:9]),
                           de_mfs=interval_mfs(v[9:18]),
                           theta_kp=v[18:27], theta_ki=v[27:36],
                           theta_kd=v[36:45], m=v[45])
        return ControllerSpec.fpid_t2(fis)
    raise ValueError(f"unknown controller kind {kind!r}")


def encode_params(spec: ControllerSpec) -> np.ndarray:
    """Flatten a controller into its search vector (inverse of decode)."""
    if spec.kind == KIND_PID:
        g = spec.gains
        return np.array([g.kp, g.ki, g.kd])
    fis = spec.fis

    def type1_block(mfs):
        return ([mf.center for mf in mfs] + [mf.sigma_lower for mf in mfs])

    def interval_block(mfs):
        return ([mf.center for mf in mfs] + [mf.sigma_lower for mf in mfs]
                + [mf.sigma_upper - mf.sigma_lower for mf in mfs])

    thetas = np.concatenate([fis.theta_kp, fis.theta_ki, fis.theta_kd])
    if spec.kind == KIND_FPID_T1:
        head = type1_block(fis.e_mfs) + type1_block(fis.de_mfs)
        return np.concatenate([head, thetas])
    head = interval_block(fis.e_mfs) + interval_block(fis.de_mfs)
    return np.concatenate([head, thetas, [fis.m]])


# --- closed-loop execution ---------------------------------------------------

def _mf_arrays(mfs):
    c = np.array([mf.center for mf in mfs])
    sl = np.array([mf.sigma_lower for mf in mfs])
    su = np.array([mf.sigma_upper for mf in mfs])
    return c, sl, su


def _run_kernel(scenario: Scenario, spec: ControllerSpec,
                params: SpurGearParams, n: int, u_max: float):
    """Dispatch the compiled loop; returns (x1, x2, ref, e, u, gains, abort)."""
    plant = params
    if scenario.uncertainty is not None:
        plant = apply_uncertainty(params, scenario.uncertainty)
    sync = scenario.mode == MODE_SYNCHRONIZATION
    px1, px2 = (float(v) for v in scenario.plant_init)
    mx1, mx2 = (float(v) for v in scenario.reference_init)
    common = (px1, px2, sync, mx1, mx2, n, scenario.dt,
              plant.epsilon, plant.mu, plant.f_m, plant.f_e,
              plant.omega_e, plant.phi_e,
              params.epsilon, params.mu, params.f_m, params.f_e,
              params.omega_e, params.phi_e)
    if spec.kind == KIND_PID:
        g = spec.gains
        x1, x2, ref, e, u, abort = kernels.closed_loop_pid(
            *common, g.kp, g.ki, g.kd, u_max)
        return x1, x2, ref, e, u, None, abort
    fis = spec.fis
    e_c, e_sl, e_su = _mf_arrays(fis.e_mfs)
    d_c, d_sl, d_su = _mf_arrays(fis.de_mfs)
    x1, x2, ref, e, u, gains, abort = kernels.closed_loop_fpid(
        *common, e_c, e_sl, e_su, d_c, d_sl, d_su,
        fis.theta_kp, fis.theta_ki, fis.theta_kd, fis.m, u_max)
    return x1, x2, ref, e, u, gains, abort


def _step_count(scenario: Scenario) -> int:
    n = int(round(scenario.horizon / scenario.dt))
    if n < 1:
        raise ValueError("horizon is shorter than one step")
    if n > DEFAULT_MAX_STEPS:
        raise StepBudgetExceeded(
            f"{n} steps exceed the budget of {DEFAULT_MAX_STEPS}")
    return n


def run_closed_loop(scenario: Scenario, spec: ControllerSpec,
                    params: SpurGearParams | None = None,
                    u_max: float = DEFAULT_U_MAX) -> ScenarioResult:
    """Run one controlled experiment and summarize its indices.

    The reference is 0 in regulation mode, otherwise the first state of the
    master system integrated open-loop in lockstep.  Raises NonFiniteState
    (naming the divergence time) if the loop blows up.
    """
    if params is None:
        params = SpurGearParams.nominal()
    n = _step_count(scenario)
    x1, x2, ref, e, u, gains, abort = _run_kernel(scenario, spec, params, n,
                                                  u_max)
    if abort >= 0:
        raise NonFiniteState(
            f"closed loop diverged near tau={abort * scenario.dt:.6g}")
    rep = metrics.report(e, scenario.dt)
    tau = np.arange(n + 1) * scenario.dt
    return ScenarioResult(tau=tau, x1=x1, x2=x2, reference=ref,
                          error=ref - x1, control=u, gains=gains, report=rep)


def optimize_controller(scenario: Scenario, kind: str, woa_cfg: woa.WoaConfig,
                        weights=(1.0, 1.0), params: SpurGearParams | None = None,
                        u_max: float = DEFAULT_U_MAX):
    """Tune one controller kind for one scenario.

    Returns (best ControllerSpec, WoaResult).  Unstable candidates cost
    +inf, so they can never win.  The woa_cfg bounds are replaced by the
    kind's own search box.
    """
    if kind not in CONTROLLER_KINDS:
        raise ValueError(f"unknown controller kind {kind!r}")
    if params is None:
        params = SpurGearParams.nominal()
    w_iae, w_itae = weights
    n = _step_count(scenario)
    cfg = replace(woa_cfg, bounds=search_bounds(kind))

    def cost_fn(vector):
        spec = decode_params(kind, vector)
        out = _run_kernel(scenario, spec, params, n, u_max)
        e, abort = out[3], out[6]
        if abort >= 0:
            return math.inf
        return metrics.cost(metrics.report(e, scenario.dt), w_iae, w_itae)

    result = woa.optimize(cost_fn, cfg)
    return decode_params(kind, result.best_position), result


@dataclass
class ComparisonTable:
    """IAE/ITAE per (controller kind, scenario), like the summary tables."""

    scenario_ids: list
    rows: dict  # kind -> {scenario_id: IndexReport}

    def render(self) -> str:
        header = ["controller"]
        for sid in self.scenario_ids:
            header += [f"IAE-s{sid}", f"ITAE-s{sid}"]
        lines = []
        for kind in CONTROLLER_KINDS:
            cells = [kind]
            for sid in self.scenario_ids:
                rep = self.rows[kind][sid]
                cells += [f"{rep.iae:.4f}", f"{rep.itae:.4f}"]
            lines.append(cells)
        widths = [max(len(row[i]) for row in [header] + lines)
                  for i in range(len(header))]
        fmt = "  ".join(f"{{:>{w}}}" for w in widths)
        return "\n".join(fmt.format(*row) for row in [header] + lines)

    def csv_rows(self):
        for kind in CONTROLLER_KINDS:
            for sid in self.scenario_ids:
                rep = self.rows[kind][sid]
                yield kind, sid, rep.iae, rep.itae


def compare_all(scenarios, woa_cfg: woa.WoaConfig, weights=(1.0, 1.0),
                params: SpurGearParams | None = None,
                u_max: float = DEFAULT_U_MAX) -> ComparisonTable:
    """Tune every controller kind on every scenario and tabulate the indices.

    Each (scenario, kind) cell gets its own deterministic seed derived from
    the base seed, and its table entry comes from re-running the closed loop
    at the stored best parameters (never from optimizer-internal caches).
    """
    scenarios = list(scenarios)
    if not scenarios:
        raise ValueError("scenario list must not be empty")
    rows = {kind: {} for kind in CONTROLLER_KINDS}
    for scenario in scenarios:
        for k_idx, kind in enumerate(CONTROLLER_KINDS):
            cell_cfg = replace(woa_cfg,
                               seed=woa_cfg.seed + 1000 * scenario.id
                               + 100 * k_idx)
            best, _ = optimize_controller(scenario, kind, cell_cfg, weights,
                                          params, u_max)
            rows[kind][scenario.id] = run_closed_loop(
                scenario, best, params, u_max).report
    return ComparisonTable([s.id for s in scenarios], rows)
