"""
Preset datasets for the burst-loss figures.

Fixed parameters follow the figure captions; the x-grids and curve families
are choices of this registry and are versioned so that a figure file is a
pure function of ``(figure id, REGISTRY_VERSION)``.
"""

from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np

from .analytic import SwitchParams, blr_fixed_blocking, burst_loss_rate
from .qos import QosParams, class_blr

REGISTRY_VERSION = 1

A_AXIS = tuple(float(x) for x in np.logspace(-3, -1, 25))
RHO_AXIS = tuple(float(x) for x in np.linspace(0.0, 1.0, 21))
ELL_AXIS = tuple(range(20, 201, 20))
W_AXIS = tuple(range(1, 31))
L0_AXIS = tuple(range(1, 16))
PB_AXIS = tuple(float(x) for x in np.linspace(0.0, 1.0, 21))

QOS_N = 16
QOS_S0 = 0.5
QOS_ELL = 100


@dataclass(frozen=True)
class Curve:
    label: str
    fn: Callable[[float], float]


@dataclass(frozen=True)
class FigurePreset:
    figure_id: int
    x_name: str
    x: Sequence[float]
    curves: Tuple[Curve, ...]
    fixed: Tuple[Tuple[str, float], ...]

    def rows(self) -> List[List[float]]:
        return [[x] + [c.fn(x) for c in self.curves] for x in self.x]

    def header(self) -> List[str]:
        return ["x"] + [c.label for c in self.curves]


def _fmt_label(name: str, value) -> str:
    return f"{name}={value:g}"


def _blr(**kw) -> float:
    return burst_loss_rate(SwitchParams(**kw))


def _single(fid, x_name, x, family_name, family, fixed, build):
    curves = tuple(Curve(_fmt_label(family_name, v), build(v)) for v in family)
    return FigurePreset(fid, x_name, x, curves, tuple(fixed.items()))


def _qos_curve(cls_index: int, rho: float, A: float) -> Callable[[float], float]:
    def fn(L0):
        res = class_blr(QosParams(N=QOS_N, L0=int(L0), S0=QOS_S0), QOS_ELL, rho, A)
        return res.blr[cls_index]
    return fn


def _build_registry():
    reg = {}
    reg[2] = _single(2, "A", A_AXIS, "w", (5, 10, 15, 20), {"rho": 0.1, "ell": 100},
                     lambda w: lambda A: _blr(w=w, ell=100, rho=0.1, A=A))
    reg[3] = _single(3, "A", A_AXIS, "rho", (0.0, 0.3, 0.6, 1.0), {"w": 20, "ell": 100},
                     lambda r: lambda A: _blr(w=20, ell=100, rho=r, A=A))
    reg[4] = _single(4, "rho", RHO_AXIS, "w", (5, 10, 15, 20), {"ell": 100, "A": 0.01},
                     lambda w: lambda r: _blr(w=w, ell=100, rho=r, A=0.01))
    reg[5] = _single(5, "rho", RHO_AXIS, "A", (0.005, 0.01, 0.02), {"ell": 100, "w": 15},
                     lambda a: lambda r: _blr(w=15, ell=100, rho=r, A=a))
    reg[6] = _single(6, "ell", ELL_AXIS, "rho", (0.0, 0.3, 0.6, 1.0), {"A": 0.01, "w": 20},
                     lambda r: lambda ell: _blr(w=20, ell=int(ell), rho=r, A=0.01))
    reg[7] = _single(7, "ell", ELL_AXIS, "w", (10, 15, 20), {"A": 0.01, "rho": 0.1},
                     lambda w: lambda ell: _blr(w=w, ell=int(ell), rho=0.1, A=0.01))
    reg[8] = _single(8, "w", W_AXIS, "rho", (0.0, 0.3, 0.6, 1.0), {"ell": 100, "A": 0.01},
                     lambda r: lambda w: _blr(w=int(w), ell=100, rho=r, A=0.01))
    reg[9] = _single(9, "w", W_AXIS, "A", (0.005, 0.01, 0.02), {"ell": 100, "rho": 0.3},
                     lambda a: lambda w: _blr(w=int(w), ell=100, rho=0.3, A=a))
    reg[10] = FigurePreset(
        10, "pb", PB_AXIS,
        (Curve("blr", lambda pb: blr_fixed_blocking(10, 100, 0.01, pb)),),
        (("w", 10), ("ell", 100), ("A", 0.01)))

    qos_fixed = {"N": QOS_N, "S0": QOS_S0, "ell": QOS_ELL}
    rho_family = (0.0, 0.5, 1.0)
    a_family = (0.1, 0.3, 0.5)
    for fid, cls_index in ((11, 0), (13, 1)):
        reg[fid] = FigurePreset(
            fid, "L0", L0_AXIS,
            tuple(Curve(_fmt_label("rho", r), _qos_curve(cls_index, r, 0.5)) for r in rho_family),
            tuple({**qos_fixed, "A": 0.5}.items()))
    for fid, cls_index in ((12, 0), (14, 1)):
        reg[fid] = FigurePreset(
            fid, "L0", L0_AXIS,
            tuple(Curve(_fmt_label("A", a), _qos_curve(cls_index, 0.5, a)) for a in a_family),
            tuple({**qos_fixed, "rho": 0.5}.items()))
    reg[15] = FigurePreset(
        15, "L0", L0_AXIS,
        tuple(Curve(f"blr{c}_rho={r:g}", _qos_curve(c, r, 0.5))
              for r in rho_family for c in (0, 1)),
        tuple({**qos_fixed, "A": 0.5}.items()))
    return reg


FIGURES = _build_registry()


def figure(figure_id: int) -> FigurePreset:
    try:
        return FIGURES[figure_id]
    except KeyError:
        raise KeyError(f"unknown figure {figure_id}; choose from {sorted(FIGURES)}") from None
