"""
Single-class burst loss model for a slotted JIT node with partial
wavelength conversion.

A node has ``w`` output wavelengths, of which a fraction ``rho`` are backed
by converters. Every reservation (offset plus burst) spans ``ell`` slots and
each input wavelength carries a new burst in a slot with probability ``A``.
The stationary occupancy distribution, the per-occupancy blocking
probabilities and the arrival-weighted burst loss rate are all closed forms.
"""

import math
import numbers
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping

from .errors import DegenerateInputError, ParameterError, PreconditionError, TimingError
from .mathcore import (
    LogWeight,
    binomial_coeff,
    exp_of,
    ln_binomial,
    log_mul,
    log_sum_exp,
    round_half_away,
)

_SLOT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class TimingSpec:
    """Durations in seconds of the control burst, offset, data burst and slot."""

    control_burst_time: float
    offset_time: float
    data_burst_time: float
    slot_time: float

    def __post_init__(self):
        for name in ("control_burst_time", "offset_time", "data_burst_time", "slot_time"):
            value = getattr(self, name)
            if not value > 0:
                raise TimingError(f"{name} must be > 0, got {value}")

    @property
    def total_time(self) -> float:
        return self.control_burst_time + self.offset_time + self.data_burst_time


def slots_per_burst(timing: TimingSpec) -> int:
    """Number of slots covering the reservation period (offset + burst)."""
    ratio = (timing.offset_time + timing.data_burst_time) / timing.slot_time
    ell = round(ratio)
    if abs(ratio - ell) > _SLOT_TOLERANCE:
        raise TimingError(
            f"reservation period is {ratio!r} slots; it must be a whole number")
    return int(ell)


@dataclass(frozen=True)
class SwitchParams:
    """Parameters of the single-class model.

    Attributes:
        w: Number of wavelengths on the output fibre.
        ell: Slots per reservation period.
        rho: Wavelength conversion capability, converters per wavelength.
        A: Burst arrival probability per input wavelength per slot.
    """

    w: int
    ell: int
    rho: float
    A: float

    def __post_init__(self):
        if isinstance(self.w, bool) or not isinstance(self.w, numbers.Integral) or self.w < 1:
            raise ParameterError(f"w must be an integer >= 1, got {self.w!r}")
        if isinstance(self.ell, bool) or not isinstance(self.ell, numbers.Integral) or self.ell < 2:
            raise ParameterError(f"ell must be an integer >= 2, got {self.ell!r}")
        if not 0.0 <= self.rho <= 1.0:
            raise ParameterError(f"rho must lie in [0, 1], got {self.rho!r}")
        if not 0.0 <= self.A < 1.0:
            raise ParameterError(f"A must lie in [0, 1), got {self.A!r}")

    @property
    def u(self) -> int:
        """Converter count, rho * w rounded half away from zero."""
        return round_half_away(self.rho * self.w)

    @property
    def max_bursts(self) -> int:
        """Largest number of bursts in service, min(ell, w)."""
        return min(self.ell, self.w)

    @property
    def in_derivation_regime(self) -> bool:
        """The closed forms were derived assuming w < ell."""
        return self.w < self.ell


@dataclass(frozen=True)
class StateDistribution:
    """Stationary probabilities of the empty state and of each k-burst state.

    ``e[k]`` is the probability of one particular state with ``k`` bursts in
    service; there are C(ell, k) such states.
    """

    e0: float
    e: Mapping[int, float]
    log_e: Mapping[int, LogWeight] = field(repr=False)

    def total_mass(self, ell: int) -> float:
        return self.e0 + math.fsum(binomial_coeff(ell, k) * p for k, p in self.e.items())


@dataclass(frozen=True)
class BlockingProfile:
    """Blocking probability P_b(n) for n = 1..min(ell, w)."""

    pb: Mapping[int, float]

    def __getitem__(self, n: int) -> float:
        return self.pb[n]


@dataclass(frozen=True)
class ArrivalDistribution:
    """Binomial(w, A) law of the number of arrivals in one slot."""

    a: Mapping[int, float]


def state_weight(params: SwitchParams, k: int) -> LogWeight:
    """Log of the unnormalised weight of a k-burst state.

    The weight is prod_{i<k} (w - i(1-rho)) / (w(1-A)/A + i(1-rho)).
    """
    if not 1 <= k <= params.max_bursts:
        raise PreconditionError(f"k must lie in [1, {params.max_bursts}], got {k}")
    if params.A <= 0:
        raise DegenerateInputError("state weights are undefined at A = 0")
    return _log_state_weights(params, k)[-1]


def _log_state_weights(params: SwitchParams, upto: int) -> list:
    # running sum so the whole profile is O(min(ell, w))
    w, A = params.w, params.A
    gap = 1.0 - params.rho
    base = w * (1.0 - A) / A
    out = []
    total = 0.0
    for i in range(upto):
        total += math.log(w - i * gap) - math.log(base + i * gap)
        out.append(total)
    return out


@lru_cache(maxsize=4096)
def stationary_distribution(params: SwitchParams) -> StateDistribution:
    """Stationary distribution e_0, e_1..e_min(ell,w) of the node."""
    if params.A <= 0:
        raise DegenerateInputError(
            "the stationary distribution is degenerate at A = 0; use the BLR = 0 convention")
    weights = _log_state_weights(params, params.max_bursts)
    ell = params.ell
    terms = [0.0]  # the empty state contributes 1
    terms += [log_mul(ln_binomial(ell, n), lw) for n, lw in enumerate(weights, start=1)]
    log_norm = log_sum_exp(terms)
    log_e = {k: lw - log_norm for k, lw in enumerate(weights, start=1)}
    return StateDistribution(
        e0=math.exp(-log_norm),
        e=MappingProxyType({k: exp_of(v) for k, v in log_e.items()}),
        log_e=MappingProxyType(log_e),
    )


@lru_cache(maxsize=4096)
def blocking_profile(params: SwitchParams) -> BlockingProfile:
    """Per-occupancy blocking probabilities.

    For n != w: P_b(n) = A(ell-1)/(w ell) (1-rho) n C(ell,n) e_n.
    For n == w an extra A rho C(ell-1,w) e_w term accounts for bursts that
    find the pool exhausted; that branch is only reachable when w <= ell.
    Values are deliberately not clamped to [0, 1].
    """
    dist = stationary_distribution(params)
    w, ell, rho, A = params.w, params.ell, params.rho, params.A
    scale = A * (ell - 1) / (w * ell) * (1.0 - rho)
    pb = {}
    for n, log_en in dist.log_e.items():
        value = scale * n * exp_of(log_mul(ln_binomial(ell, n), log_en))
        if n == w:
            value += A * rho * exp_of(log_mul(ln_binomial(ell - 1, w), log_en))
        pb[n] = value
    return BlockingProfile(pb=MappingProxyType(pb))


def arrival_pmf(w: int, A: float, k: int) -> float:
    """Probability of exactly k arrivals over w input wavelengths in one slot."""
    if not 0.0 <= A <= 1.0:
        raise PreconditionError(f"A must lie in [0, 1], got {A}")
    if k < 0 or k > w:
        return 0.0
    if A == 0.0:
        return 1.0 if k == 0 else 0.0
    if A == 1.0:
        return 1.0 if k == w else 0.0
    log_p = log_mul(ln_binomial(w, k), k * math.log(A), (w - k) * math.log1p(-A))
    return exp_of(log_p)


def arrival_distribution(w: int, A: float) -> ArrivalDistribution:
    return ArrivalDistribution(
        a=MappingProxyType({k: arrival_pmf(w, A, k) for k in range(w + 1)}))


def burst_loss_rate(params: SwitchParams) -> float:
    """Average burst loss rate, sum_k A_k k P_b(k) / (A w).

    Returns 0 at A = 0, the limit of the expression.
    """
    if params.A == 0.0:
        return 0.0
    profile = blocking_profile(params)
    w, A = params.w, params.A
    total = math.fsum(arrival_pmf(w, A, k) * k * profile[k]
                      for k in range(1, params.max_bursts + 1))
    return total / (A * w)


def blr_fixed_blocking(w: int, ell: int, A: float, pb: float) -> float:
    """Burst loss rate when every occupancy blocks with the same probability ``pb``."""
    if not 0.0 < A < 1.0:
        raise PreconditionError(f"A must lie in (0, 1), got {A}")
    if not 0.0 <= pb <= 1.0:
        raise PreconditionError(f"pb must lie in [0, 1], got {pb}")
    if w < 1 or ell < 1:
        raise PreconditionError(f"w and ell must be >= 1, got w={w}, ell={ell}")
    total = math.fsum(arrival_pmf(w, A, k) * k for k in range(1, min(ell, w) + 1))
    return total * pb / (A * w)
