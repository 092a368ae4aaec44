from .kernels import NoiseKernel
from .orbits import RandomOrbitRecord, check_budget, noise_budget, noisy_step, random_orbit
from .rlyap import NearCriticalCheck, RandomLyapunovReport, near_critical_check, near_critical_integral, random_lyapunov
from .shadowing import ShadowingReport, ShadowRow, shadow_steps, shadowing_check, shadowing_witness
from .stability import StabilityCurve, StabilityPoint, reference_on_restricted, stability_curve
from .stationary import (
    UlamReport,
    invariance_residual,
    row_sum_error,
    stationary_mc,
    stationary_ulam,
    stationary_vector,
    transition_matrix,
)

__all__ = [
    "NearCriticalCheck",
    "NoiseKernel",
    "RandomLyapunovReport",
    "RandomOrbitRecord",
    "ShadowRow",
    "ShadowingReport",
    "StabilityCurve",
    "StabilityPoint",
    "UlamReport",
    "check_budget",
    "invariance_residual",
    "near_critical_check",
    "near_critical_integral",
    "noise_budget",
    "noisy_step",
    "random_lyapunov",
    "random_orbit",
    "reference_on_restricted",
    "row_sum_error",
    "shadow_steps",
    "shadowing_check",
    "shadowing_witness",
    "stability_curve",
    "stationary_mc",
    "stationary_ulam",
    "stationary_vector",
    "transition_matrix",
]
