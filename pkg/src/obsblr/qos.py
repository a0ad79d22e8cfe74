"""
Two-class service differentiation on a fibre of N wavelengths.

Class i owns L_i reserved wavelengths. In each slot an underloaded class
lends the wavelengths its own bursts leave unused, an overloaded class
borrows them, and the expected number of lost bursts per class is averaged
over binomial arrivals split multinomially between the classes.
"""

import math
import numbers
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

from .analytic import SwitchParams, arrival_pmf, blocking_profile
from .errors import ParameterError, PreconditionError
from .mathcore import multinomial_pmf, round_half_away

ROUNDING = {
    "half_away": round_half_away,
    "half_even": lambda x: int(round(x)),
}


@dataclass(frozen=True)
class QosParams:
    """Wavelength partition between two service classes.

    Attributes:
        N: Total wavelengths on the fibre.
        L0: Wavelengths reserved for class 0; class 1 gets the rest.
        S0: Share of traffic belonging to class 0.
        S1: Share of class 1; defaults to 1 - S0. A zero share is accepted
            for simulation but rejected by :func:`class_blr`.
    """

    N: int
    L0: int
    S0: float
    S1: Optional[float] = None

    def __post_init__(self):
        if self.S1 is None:
            object.__setattr__(self, "S1", 1.0 - self.S0)
        if isinstance(self.N, bool) or not isinstance(self.N, numbers.Integral) or self.N < 2:
            raise ParameterError(f"N must be an integer >= 2, got {self.N!r}")
        if not isinstance(self.L0, numbers.Integral) or not 1 <= self.L0 <= self.N - 1:
            raise ParameterError(
                f"L0 must be an integer in [1, N-1] = [1, {self.N - 1}], got {self.L0!r}")
        if not 0.0 <= self.S0 <= 1.0 or not 0.0 <= self.S1 <= 1.0:
            raise ParameterError(f"shares must lie in [0, 1], got {(self.S0, self.S1)!r}")
        if abs(self.S0 + self.S1 - 1.0) > 1e-12:
            raise ParameterError(f"shares must sum to 1, got {(self.S0, self.S1)!r}")

    @property
    def L1(self) -> int:
        return self.N - self.L0

    @property
    def reserved(self) -> Tuple[int, int]:
        return (self.L0, self.L1)

    @property
    def shares(self) -> Tuple[float, float]:
        return (self.S0, self.S1)

    def swapped(self) -> "QosParams":
        return QosParams(N=self.N, L0=self.L1, S0=self.S1, S1=self.S0)


@dataclass(frozen=True)
class SlotScenario:
    """Per-class arrival counts (j0, j1) in one slot."""

    j0: int
    j1: int

    def __post_init__(self):
        if self.j0 < 0 or self.j1 < 0:
            raise PreconditionError(f"arrival counts must be >= 0, got {(self.j0, self.j1)}")

    @property
    def k(self) -> int:
        return self.j0 + self.j1


@dataclass(frozen=True)
class Reallocation:
    """Resultant wavelength counts after lending and rounding."""

    L0_new: int
    L1_new: int

    def __iter__(self):
        return iter((self.L0_new, self.L1_new))


@dataclass(frozen=True)
class ScenarioLoss:
    k: int
    j0: int
    weight: float
    reallocation: Reallocation
    lost: Tuple[float, float]


@dataclass(frozen=True)
class ClassBlr:
    """Per-class average burst loss rates and the scenarios behind them."""

    blr: Tuple[float, float]
    scenarios: Tuple[ScenarioLoss, ...] = field(default=(), repr=False)

    @property
    def blr0(self) -> float:
        return self.blr[0]

    @property
    def blr1(self) -> float:
        return self.blr[1]


def class_blocking(n: int, class_w: int, ell: int, rho: float, A: float) -> float:
    """P_b(n) for a class currently holding ``class_w`` wavelengths."""
    if n == 0:
        return 0.0
    if not 0 < n <= min(ell, class_w):
        raise PreconditionError(
            f"n must lie in [0, min(ell, w)] = [0, {min(ell, class_w)}], got {n}")
    return blocking_profile(SwitchParams(class_w, ell, rho, A))[n]


def free_wavelengths(j: int, L: int, ell: int, rho: float, A: float) -> float:
    """Reserved wavelengths of a class left unused by its ``j`` bursts.

    Zero once the class is saturated (j >= L).
    """
    if L < 1:
        raise PreconditionError(f"L must be >= 1, got {L}")
    if j >= L:
        return 0.0
    return L - j * (1.0 - class_blocking(j, L, ell, rho, A))


def reallocate(qos: QosParams, scenario: SlotScenario, ell: int, rho: float, A: float,
               rounding: str = "half_away") -> Reallocation:
    """Lend free wavelengths across classes for one slot.

    Lending is computed from the nominal reservations, since neither
    resultant count exists yet when the other is being formed.
    """
    if ell < qos.N:
        raise PreconditionError(f"ell must be >= N, got ell={ell}, N={qos.N}")
    to_int: Callable[[float], int] = ROUNDING[rounding]
    L0, L1 = qos.reserved
    j0, j1 = scenario.j0, scenario.j1
    if j0 < L0:
        if j1 < L1:
            new0 = L0 + free_wavelengths(j1, L1, ell, rho, A)
            new1 = L1 + free_wavelengths(j0, L0, ell, rho, A)
        else:
            new0 = L0
            new1 = L1 + free_wavelengths(j0, L0, ell, rho, A)
    else:
        new0 = L0 + free_wavelengths(j1, L1, ell, rho, A)
        new1 = L1
    return Reallocation(to_int(new0), to_int(new1))


def lost_bursts(j: int, L_new: int, ell: int, rho: float, A: float) -> float:
    """Expected lost bursts of a class with ``j`` arrivals and ``L_new`` wavelengths."""
    if ell < L_new:
        raise PreconditionError(f"ell must be >= L_new, got ell={ell}, L_new={L_new}")
    if j < L_new:
        return j * class_blocking(j, L_new, ell, rho, A)
    if L_new >= 1:
        return (j - L_new) + L_new * class_blocking(L_new, L_new, ell, rho, A)
    return float(j)


def class_blr(qos: QosParams, ell: int, rho: float, A: float,
              rounding: str = "half_away", keep_scenarios: bool = False) -> ClassBlr:
    """Average burst loss rate of each class.

    Sums expected losses over k = 1..min(ell, N) arrivals, weighted by
    Binomial(N, A), and over every split (j0, k - j0), weighted by the
    multinomial law with the class shares. Each class total is normalised
    by its mean offered load A N S_i.

    Args:
        qos: Partition and traffic shares.
        ell: Slots per reservation period, at least N.
        rho: Conversion capability applied within each class.
        A: Arrival probability per wavelength per slot.
        rounding: ``"half_away"`` or ``"half_even"`` for the resultant counts.
        keep_scenarios: Attach per-scenario losses for diagnostics.
    """
    if ell < qos.N:
        raise PreconditionError(f"ell must be >= N, got ell={ell}, N={qos.N}")
    if not 0.0 <= rho <= 1.0:
        raise ParameterError(f"rho must lie in [0, 1], got {rho!r}")
    if not 0.0 <= A < 1.0:
        raise ParameterError(f"A must lie in [0, 1), got {A!r}")
    if qos.S0 <= 0.0 or qos.S1 <= 0.0:
        raise PreconditionError(
            f"both class shares must be positive, got {qos.shares}; each divides a class BLR")
    if rounding not in ROUNDING:
        raise ParameterError(f"unknown rounding {rounding!r}; choose from {sorted(ROUNDING)}")
    if A == 0.0:
        return ClassBlr(blr=(0.0, 0.0))

    terms0, terms1 = [], []
    scenarios = []
    for k in range(1, min(ell, qos.N) + 1):
        a_k = arrival_pmf(qos.N, A, k)
        for j0 in range(k + 1):
            j1 = k - j0
            weight = a_k * multinomial_pmf(k, (j0, j1), qos.shares)
            new = reallocate(qos, SlotScenario(j0, j1), ell, rho, A, rounding)
            lost = (lost_bursts(j0, new.L0_new, ell, rho, A),
                    lost_bursts(j1, new.L1_new, ell, rho, A))
            terms0.append(weight * lost[0])
            terms1.append(weight * lost[1])
            if keep_scenarios:
                scenarios.append(ScenarioLoss(k, j0, weight, new, lost))

    load = A * qos.N
    blr = (math.fsum(terms0) / (load * qos.S0), math.fsum(terms1) / (load * qos.S1))
    return ClassBlr(blr=blr, scenarios=tuple(scenarios))
