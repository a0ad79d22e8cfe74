"""Burst loss rate of a slotted optical burst switched node with partial
wavelength conversion, single-class and two-class, plus a Monte Carlo check."""

from .analytic import (
    ArrivalDistribution,
    BlockingProfile,
    StateDistribution,
    SwitchParams,
    TimingSpec,
    arrival_distribution,
    arrival_pmf,
    blocking_profile,
    blr_fixed_blocking,
    burst_loss_rate,
    slots_per_burst,
    state_weight,
    stationary_distribution,
)
from .errors import DegenerateInputError, ObsError, ParameterError, PreconditionError, TimingError
from .mathcore import LOG_ZERO, binomial_coeff, ln_factorial, log_sum_exp, multinomial_pmf
from .qos import (
    ClassBlr,
    QosParams,
    Reallocation,
    SlotScenario,
    class_blocking,
    class_blr,
    free_wavelengths,
    lost_bursts,
    reallocate,
)
from .sim import QosSimEstimate, SimConfig, SimEstimate, simulate, simulate_qos

__version__ = "0.1.0"
