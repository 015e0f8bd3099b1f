"""Simulation and controller-tuning workbench for a chaotic spur-gear oscillator."""

from .controllers import (ControllerSpec, ControllerState, PidGains,
                          controller_step, error_derivative, fpid_step,
                          pid_step)
from .dynamics import (GearState, LengthMismatch, NonFiniteState,
                       SpurGearParams, StepBudgetExceeded, Trajectory,
                       divergence_metric, gear_rhs, rk4_step,
                       simulate_open_loop)
from .fuzzy import (FiringVectors, IT2FisConfig, IT2GaussianMF,
                    biglarbegian_output, evaluate_gains, mf_grades, normalize,
                    rule_firings)
from .metrics import EmptySequence, IndexReport, cost, iae, itae
from .scenarios import (ComparisonTable, Perturbation, Scenario,
                        ScenarioResult, UnknownScenario, apply_uncertainty,
                        build_scenario, compare_all, decode_params,
                        encode_params, optimize_controller, run_closed_loop,
                        search_bounds, search_dim)
from .woa import (Agent, InvalidBounds, WoaConfig, WoaResult, a_schedule,
                  coefficients, encircle_move, optimize, search_move,
                  spiral_move)

__version__ = "0.1.0"
