"""
Slotted Monte Carlo simulator of a single OBS output port.

Every input wavelength independently carries a new burst with probability
``A`` per slot. A burst whose own output wavelength is free takes it for
``ell`` slots. Otherwise it needs one of the ``u`` converters plus any free
wavelength, and both are held for the full ``ell`` slots. With neither
available the burst is blocked.

Random draws happen in numpy (one ``Generator`` per replication, seeded from
``(seed, replication)``); the per-arrival state machine runs in a numba
kernel fed with those draws, so results are bit-reproducible.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from numba import njit

from .analytic import SwitchParams
from .errors import ParameterError
from .mathcore import round_half_away
from .qos import QosParams

_Z95 = 1.959963984540054
_CHUNK_SLOTS = 50_000

# single-class counter layout
OFFERED, BLOCKED, SERVED_NATIVE, SERVED_CONVERTED, BLOCKED_WITH_IDLE, MAX_BUSY, MAX_CONV = range(7)
_N_COUNTERS = 7

# QoS counter layout, per class c at offset 4 * c, plus shared maxima
Q_OFFERED, Q_BLOCKED, Q_OWN, Q_OVERFLOW = range(4)
Q_MAX_BUSY, Q_MAX_CONV = 8, 9
_N_QCOUNTERS = 10


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings.

    Attributes:
        params: Node parameters; ``params.w`` is N for the QoS variant.
        horizon: Measured slots per replication.
        warmup: Leading slots excluded from statistics; defaults to 5% of horizon.
        seed: Base seed; replication r uses the stream seeded by (seed, r).
        replications: Independent runs to aggregate.
        qos: Class partition, for :func:`simulate_qos`.
        selection: ``"uniform"`` picks a random free wavelength on conversion,
            ``"lowest"`` the lowest-indexed one.
    """

    params: SwitchParams
    horizon: int = 100_000
    warmup: Optional[int] = None
    seed: int = 0
    replications: int = 10
    qos: Optional[QosParams] = None
    selection: str = "uniform"

    def __post_init__(self):
        if self.horizon < 1:
            raise ParameterError(f"horizon must be >= 1, got {self.horizon}")
        if self.warmup is not None and self.warmup < 0:
            raise ParameterError(f"warmup must be >= 0, got {self.warmup}")
        if self.replications < 1:
            raise ParameterError(f"replications must be >= 1, got {self.replications}")
        if not 0 <= self.seed < 2**64:
            raise ParameterError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.selection not in ("uniform", "lowest"):
            raise ParameterError(f"selection must be 'uniform' or 'lowest', got {self.selection!r}")
        if self.qos is not None and self.qos.N != self.params.w:
            raise ParameterError(
                f"qos.N ({self.qos.N}) must equal the wavelength count w ({self.params.w})")

    @property
    def warmup_slots(self) -> int:
        if self.warmup is None:
            return self.horizon // 20
        return self.warmup

    @property
    def converters(self) -> int:
        return round_half_away(self.params.rho * self.params.w)


@dataclass(frozen=True)
class SimEstimate:
    """Aggregated counts and per-replication loss rates."""

    offered: int
    blocked: int
    per_replication: Tuple[float, ...]
    served_per_replication: Tuple[int, ...] = ()
    blocked_per_replication: Tuple[int, ...] = ()
    offered_per_replication: Tuple[int, ...] = ()
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def blr_hat(self) -> float:
        return self.blocked / self.offered if self.offered > 0 else 0.0

    @property
    def served(self) -> int:
        return sum(self.served_per_replication)

    @property
    def ci95(self) -> float:
        """Normal-approximation half-width over replications; NaN for a single run."""
        r = len(self.per_replication)
        if r < 2:
            return math.nan
        return _Z95 * float(np.std(self.per_replication, ddof=1)) / math.sqrt(r)


@dataclass(frozen=True)
class QosSimEstimate:
    per_class: Tuple[SimEstimate, SimEstimate]
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __getitem__(self, i: int) -> SimEstimate:
        return self.per_class[i]


@njit(cache=True)
def _pick_free(free_at, lo, hi, t, r, lowest):
    nfree = 0
    for i in range(lo, hi):
        if free_at[i] <= t:
            nfree += 1
    if nfree == 0:
        return -1
    target = 0 if lowest else min(int(r * nfree), nfree - 1)
    for i in range(lo, hi):
        if free_at[i] <= t:
            if target == 0:
                return i
            target -= 1
    return -1


@njit(cache=True)
def _any_free(free_at, lo, hi, t):
    for i in range(lo, hi):
        if free_at[i] <= t:
            return True
    return False


@njit(cache=True)
def _free_converter(conv_free_at, t):
    for c in range(conv_free_at.shape[0]):
        if conv_free_at[c] <= t:
            return c
    return -1


@njit(cache=True)
def _busy(arr, t):
    n = 0
    for i in range(arr.shape[0]):
        if arr[i] > t:
            n += 1
    return n


@njit(cache=True)
def _node_kernel(slots, lams, sel, free_at, conv_free_at, ell, warmup, lowest, counters):
    w = free_at.shape[0]
    for idx in range(slots.shape[0]):
        t = slots[idx]
        lam = lams[idx]
        measured = t >= warmup
        if measured:
            counters[OFFERED] += 1
        if free_at[lam] <= t:
            free_at[lam] = t + ell
            if measured:
                counters[SERVED_NATIVE] += 1
        else:
            conv = _free_converter(conv_free_at, t)
            target = -1
            if conv >= 0:
                target = _pick_free(free_at, 0, w, t, sel[idx], lowest)
            if target >= 0:
                free_at[target] = t + ell
                conv_free_at[conv] = t + ell
                if measured:
                    counters[SERVED_CONVERTED] += 1
            elif measured:
                counters[BLOCKED] += 1
                if _any_free(free_at, 0, w, t):
                    counters[BLOCKED_WITH_IDLE] += 1
        busy = _busy(free_at, t)
        if busy > counters[MAX_BUSY]:
            counters[MAX_BUSY] = busy
        used = _busy(conv_free_at, t)
        if used > counters[MAX_CONV]:
            counters[MAX_CONV] = used


@njit(cache=True)
def _qos_kernel(slots, lams, sel, cls, free_at, conv_free_at, L0, ell, warmup, lowest,
                counters):
    n_wl = free_at.shape[0]
    for idx in range(slots.shape[0]):
        t = slots[idx]
        lam = lams[idx]
        c = cls[idx]
        measured = t >= warmup
        if c == 0:
            own_lo, own_hi, oth_lo, oth_hi = 0, L0, L0, n_wl
        else:
            own_lo, own_hi, oth_lo, oth_hi = L0, n_wl, 0, L0
        native_own = own_lo <= lam < own_hi
        if measured:
            counters[4 * c + Q_OFFERED] += 1
        outcome = -1  # 0 own partition, 1 overflow
        if native_own and free_at[lam] <= t:
            free_at[lam] = t + ell
            outcome = 0
        else:
            conv = _free_converter(conv_free_at, t)
            if conv >= 0:
                target = _pick_free(free_at, own_lo, own_hi, t, sel[idx], lowest)
                if target >= 0:
                    free_at[target] = t + ell
                    conv_free_at[conv] = t + ell
                    outcome = 0
            if outcome < 0:
                if (not native_own) and free_at[lam] <= t:
                    free_at[lam] = t + ell
                    outcome = 1
                elif conv >= 0:
                    target = _pick_free(free_at, oth_lo, oth_hi, t, sel[idx], lowest)
                    if target >= 0:
                        free_at[target] = t + ell
                        conv_free_at[conv] = t + ell
                        outcome = 1
        if measured:
            if outcome < 0:
                counters[4 * c + Q_BLOCKED] += 1
            elif outcome == 0:
                counters[4 * c + Q_OWN] += 1
            else:
                counters[4 * c + Q_OVERFLOW] += 1
        busy = _busy(free_at, t)
        if busy > counters[Q_MAX_BUSY]:
            counters[Q_MAX_BUSY] = busy
        used = _busy(conv_free_at, t)
        if used > counters[Q_MAX_CONV]:
            counters[Q_MAX_CONV] = used


def draw_events(rng: np.random.Generator, start: int, n_slots: int, w: int, A: float,
                s0: Optional[float] = None):
    """Arrival events for slots [start, start + n_slots).

    Returns arrays (slot, wavelength, selection uniform[, class]) with
    arrivals inside a slot in random order.
    """
    mask = rng.random((n_slots, w)) < A
    flat = np.flatnonzero(mask)
    n = flat.shape[0]
    keys = rng.random(n)
    sel = rng.random(n)
    slots = flat // w + start
    lams = flat % w
    order = np.lexsort((keys, slots))
    out = [slots[order].astype(np.int64), lams[order].astype(np.int64), sel[order]]
    if s0 is not None:
        cls = (rng.random(n) >= s0).astype(np.int64)
        out.append(cls[order])
    return tuple(out)


def _replication_rng(seed: int, rep: int) -> np.random.Generator:
    return np.random.default_rng([seed, rep])


def _run_node(config: SimConfig, rep: int) -> np.ndarray:
    p = config.params
    rng = _replication_rng(config.seed, rep)
    total = config.warmup_slots + config.horizon
    free_at = np.zeros(p.w, dtype=np.int64)
    conv_free_at = np.zeros(config.converters, dtype=np.int64)
    counters = np.zeros(_N_COUNTERS, dtype=np.int64)
    lowest = config.selection == "lowest"
    for start in range(0, total, _CHUNK_SLOTS):
        n_slots = min(_CHUNK_SLOTS, total - start)
        slots, lams, sel = draw_events(rng, start, n_slots, p.w, p.A)
        _node_kernel(slots, lams, sel, free_at, conv_free_at, p.ell, config.warmup_slots,
                     lowest, counters)
    return counters


def _run_qos(config: SimConfig, rep: int) -> np.ndarray:
    p, q = config.params, config.qos
    rng = _replication_rng(config.seed, rep)
    total = config.warmup_slots + config.horizon
    free_at = np.zeros(p.w, dtype=np.int64)
    conv_free_at = np.zeros(config.converters, dtype=np.int64)
    counters = np.zeros(_N_QCOUNTERS, dtype=np.int64)
    lowest = config.selection == "lowest"
    for start in range(0, total, _CHUNK_SLOTS):
        n_slots = min(_CHUNK_SLOTS, total - start)
        slots, lams, sel, cls = draw_events(rng, start, n_slots, p.w, p.A, q.S0)
        _qos_kernel(slots, lams, sel, cls, free_at, conv_free_at, q.L0, p.ell,
                    config.warmup_slots, lowest, counters)
    return counters


def _estimate(offered, blocked, served, diagnostics) -> SimEstimate:
    offered = [int(x) for x in offered]
    blocked = [int(x) for x in blocked]
    served = [int(x) for x in served]
    rates = tuple(b / o if o > 0 else 0.0 for o, b in zip(offered, blocked))
    return SimEstimate(
        offered=sum(offered),
        blocked=sum(blocked),
        per_replication=rates,
        served_per_replication=tuple(served),
        blocked_per_replication=tuple(blocked),
        offered_per_replication=tuple(offered),
        diagnostics=diagnostics,
    )


def simulate(config: SimConfig) -> SimEstimate:
    """Run ``config.replications`` independent replications of the node."""
    runs = [_run_node(config, rep) for rep in range(config.replications)]
    served = [int(r[SERVED_NATIVE] + r[SERVED_CONVERTED]) for r in runs]
    diagnostics = {
        "converters": config.converters,
        "served_native": sum(int(r[SERVED_NATIVE]) for r in runs),
        "served_converted": sum(int(r[SERVED_CONVERTED]) for r in runs),
        "blocked_with_idle": sum(int(r[BLOCKED_WITH_IDLE]) for r in runs),
        "max_busy": max(int(r[MAX_BUSY]) for r in runs),
        "max_converters_in_use": max(int(r[MAX_CONV]) for r in runs),
    }
    return _estimate([r[OFFERED] for r in runs], [r[BLOCKED] for r in runs], served,
                     diagnostics)


def simulate_qos(config: SimConfig) -> QosSimEstimate:
    """Two-class variant: static partitions with overflow into the other class."""
    if config.qos is None:
        raise ParameterError("simulate_qos needs config.qos")
    runs = [_run_qos(config, rep) for rep in range(config.replications)]
    per_class = []
    for c in (0, 1):
        base = 4 * c
        diagnostics = {
            "served_own": sum(int(r[base + Q_OWN]) for r in runs),
            "served_overflow": sum(int(r[base + Q_OVERFLOW]) for r in runs),
        }
        per_class.append(_estimate([r[base + Q_OFFERED] for r in runs],
                                   [r[base + Q_BLOCKED] for r in runs],
                                   [r[base + Q_OWN] + r[base + Q_OVERFLOW] for r in runs],
                                   diagnostics))
    shared = {
        "converters": config.converters,
        "max_busy": max(int(r[Q_MAX_BUSY]) for r in runs),
        "max_converters_in_use": max(int(r[Q_MAX_CONV]) for r in runs),
    }
    return QosSimEstimate(per_class=tuple(per_class), diagnostics=shared)
