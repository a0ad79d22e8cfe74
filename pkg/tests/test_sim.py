import numpy as np
import pytest

from obsblr.analytic import SwitchParams
from obsblr.errors import ParameterError
from obsblr.qos import QosParams
from obsblr.sim import SimConfig, draw_events, simulate, simulate_qos


def reference_node(config, rep):
    """Slot-by-slot countdown version of the node, fed the same draws."""
    p = config.params
    rng = np.random.default_rng([config.seed, rep])
    total = config.warmup_slots + config.horizon
    remaining = [0] * p.w
    conv = [0] * config.converters
    offered = blocked = served = 0
    holds = []
    events = []
    for start in range(0, total, 50_000):
        n = min(50_000, total - start)
        events.extend(zip(*draw_events(rng, start, n, p.w, p.A)))
    by_slot = {}
    for t, lam, r in events:
        by_slot.setdefault(int(t), []).append((int(lam), float(r)))
    for t in range(total):
        if t > 0:
            remaining = [max(0, c - 1) for c in remaining]
            conv = [max(0, c - 1) for c in conv]
        for lam, r in by_slot.get(t, ()):
            measured = t >= config.warmup_slots
            offered += measured
            if remaining[lam] == 0:
                remaining[lam] = p.ell
                served += measured
                holds.append(p.ell)
                continue
            free = [i for i, c in enumerate(remaining) if c == 0]
            spare = [i for i, c in enumerate(conv) if c == 0]
            if free and spare:
                pick = free[0] if config.selection == "lowest" else free[min(int(r * len(free)), len(free) - 1)]
                remaining[pick] = p.ell
                conv[spare[0]] = p.ell
                served += measured
            else:
                blocked += measured
            assert sum(c > 0 for c in remaining) <= p.w
            assert sum(c > 0 for c in conv) <= config.converters
    return offered, blocked, served


def _cfg(w=6, ell=8, rho=0.5, A=0.2, **kw):
    kw.setdefault("horizon", 3000)
    kw.setdefault("warmup", 100)
    kw.setdefault("replications", 2)
    return SimConfig(params=SwitchParams(w, ell, rho, A), **kw)


class TestAgainstReference:
    @pytest.mark.parametrize("rho, A, selection", [
        (0.0, 0.2, "uniform"), (0.5, 0.2, "uniform"), (1.0, 0.3, "uniform"), (0.34, 0.1, "lowest"),
    ])
    def test_counts_match(self, rho, A, selection):
        cfg = _cfg(rho=rho, A=A, selection=selection, seed=7)
        est = simulate(cfg)
        for rep in range(cfg.replications):
            offered, blocked, served = reference_node(cfg, rep)
            assert est.offered_per_replication[rep] == offered
            assert est.blocked_per_replication[rep] == blocked
            assert est.served_per_replication[rep] == served


class TestSimulate:
    def test_no_arrivals(self):
        est = simulate(_cfg(A=0.0))
        assert est.offered == 0
        assert est.blr_hat == 0.0

    def test_deterministic(self):
        a = simulate(_cfg(seed=123))
        b = simulate(_cfg(seed=123))
        assert a == b
        assert a.diagnostics == b.diagnostics
        c = simulate(_cfg(seed=124))
        assert c.per_replication != a.per_replication

    def test_conservation(self):
        est = simulate(_cfg(rho=0.3, A=0.3, replications=4))
        for o, b, s in zip(est.offered_per_replication, est.blocked_per_replication,
                           est.served_per_replication):
            assert o == s + b
        assert 0 <= est.blocked <= est.offered

    def test_full_conversion_blocks_only_when_full(self):
        est = simulate(_cfg(w=8, ell=20, rho=1.0, A=0.1, horizon=20_000))
        assert est.blocked > 0
        assert est.diagnostics["blocked_with_idle"] == 0

    def test_partial_conversion_can_block_with_idle(self):
        est = simulate(_cfg(w=8, ell=20, rho=0.0, A=0.05, horizon=20_000))
        assert est.diagnostics["blocked_with_idle"] > 0
        assert est.diagnostics["served_converted"] == 0

    def test_resource_limits(self):
        est = simulate(_cfg(w=10, ell=30, rho=0.3, A=0.2, horizon=10_000))
        assert est.diagnostics["max_busy"] <= 10
        assert est.diagnostics["max_converters_in_use"] <= 3

    def test_default_warmup(self):
        cfg = SimConfig(params=SwitchParams(4, 10, 0.5, 0.1), horizon=2000)
        assert cfg.warmup_slots == 100

    def test_ci_single_replication(self):
        est = simulate(_cfg(replications=1))
        assert np.isnan(est.ci95)

    @pytest.mark.parametrize("kw", [
        dict(horizon=0), dict(warmup=-1), dict(replications=0), dict(seed=-1), dict(selection="best"),
    ])
    def test_invalid_config(self, kw):
        with pytest.raises(ParameterError):
            _cfg(**kw)


@pytest.mark.slow
def test_increasing_in_arrival_probability():
    grid = (0.002, 0.005, 0.01, 0.02, 0.05)
    ests = [simulate(SimConfig(SwitchParams(20, 100, 0.1, A), horizon=200_000, warmup=5_000,
                               seed=11, replications=20)) for A in grid]
    for lo, hi in zip(ests, ests[1:]):
        assert hi.blr_hat > lo.blr_hat
        assert hi.blr_hat - hi.ci95 > lo.blr_hat + lo.ci95


class TestSimulateQos:
    def _qcfg(self, L0=8, S0=0.5, rho=0.5, A=0.5, **kw):
        kw.setdefault("horizon", 20_000)
        kw.setdefault("replications", 10)
        return SimConfig(params=SwitchParams(16, 100, rho, A), qos=QosParams(16, L0, S0), **kw)

    def test_needs_qos(self):
        with pytest.raises(ParameterError):
            simulate_qos(_cfg())

    def test_n_must_match(self):
        with pytest.raises(ParameterError):
            SimConfig(params=SwitchParams(8, 100, 0.5, 0.5), qos=QosParams(16, 8, 0.5))

    def test_single_class_traffic(self):
        est = simulate_qos(self._qcfg(S0=1.0, horizon=2000, replications=2))
        assert est[1].offered == 0

    def test_equal_partition_symmetric(self):
        est = simulate_qos(self._qcfg(seed=0, replications=20))
        assert abs(est[0].blr_hat - est[1].blr_hat) <= est[0].ci95 + est[1].ci95

    def test_conservation_and_limits(self):
        est = simulate_qos(self._qcfg(L0=4, horizon=5000, replications=3))
        for e in est.per_class:
            for o, b, s in zip(e.offered_per_replication, e.blocked_per_replication,
                               e.served_per_replication):
                assert o == s + b
        assert est.diagnostics["max_busy"] <= 16
        assert est.diagnostics["max_converters_in_use"] <= 8

    def test_deterministic(self):
        a = simulate_qos(self._qcfg(horizon=3000, replications=2, seed=5))
        b = simulate_qos(self._qcfg(horizon=3000, replications=2, seed=5))
        assert a == b

    @pytest.mark.slow
    def test_reservation_direction(self):
        ests = [simulate_qos(self._qcfg(L0=L0, seed=9)) for L0 in (2, 8, 14)]
        b0 = [e[0].blr_hat for e in ests]
        b1 = [e[1].blr_hat for e in ests]
        assert b0[0] > b0[1] > b0[2]
        assert b1[0] < b1[1] < b1[2]
