"""Adaptive integration: events, traces, oracles, endpoint measurements."""

import dataclasses
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isosoliton import (
    BLOWUP_MINUS,
    BLOWUP_PLUS,
    BUDGET_EXHAUSTED,
    CROSSING_ETA,
    CROSSING_ZERO,
    REGULAR_ENDPOINT,
    IntegratorConfig,
    PhasePoint,
    endpoint_seed,
    endpoint_vprime_extrapolated,
    endpoint_vprime_limit,
    euler_walk,
    eta,
    integrate_from,
    make_params,
    maximal_trace,
    psi_at,
    psi_rhs,
    rk4_walk,
    self_convergence,
    trace_deviation,
    trace_to_csv,
    trace_to_json,
)

P12 = make_params(1, 2, 1, 1)
P23 = make_params(2, 3, 1, 1)
CFG = IntegratorConfig()


class TestEndpointLaw:
    def test_limit_values(self):
        # 1/(k(k + (n-1)(1+R))) at -1 and the sign-flipped form at +1
        assert endpoint_vprime_limit(P12, -1) == pytest.approx(0.5, abs=1e-15)
        assert endpoint_vprime_limit(P12, +1) == pytest.approx(-0.5, abs=1e-15)
        p = make_params(2, 4, 1, 2)  # R = 1/3
        want = 1.0 / (2.0 * (2.0 + 3.0 * (1.0 + 1.0 / 3.0)))
        assert endpoint_vprime_limit(p, -1) == pytest.approx(want, rel=1e-15)

    def test_seed_placement(self):
        s = endpoint_seed(P12, -1, 1e-5)
        assert s.r == -(1.0 - 1e-5)
        vp = endpoint_vprime_limit(P12, -1)
        assert s.psi == pytest.approx(math.sqrt(1.0 - s.r * s.r) * vp, rel=1e-12)

    def test_seed_offset_validated(self):
        with pytest.raises(ValueError):
            endpoint_seed(P12, -1, 0.0)
        with pytest.raises(ValueError):
            endpoint_seed(P12, -1, 1e-3)

    def test_extrapolated_measurement_converges(self):
        for which in (-1, +1):
            est = endpoint_vprime_extrapolated(P23, which)
            assert est == pytest.approx(endpoint_vprime_limit(P23, which), abs=1e-6)


class TestDirectedRuns:
    def test_rightward_blowup(self):
        half = integrate_from(P12, PhasePoint(0.0, 0.0), +1, CFG)
        assert half.event.kind == BLOWUP_PLUS
        assert 0.0 < half.event.location < 1.0
        assert half.stats.accepted > 0
        # monotone sample locations
        assert np.all(np.diff(half.r) > 0)

    def test_leftward_blowdown_is_mirror(self):
        right = integrate_from(P12, PhasePoint(0.0, 0.0), +1, CFG)
        left = integrate_from(P12, PhasePoint(0.0, 0.0), -1, CFG)
        assert left.event.kind == BLOWUP_MINUS
        # R = 0 flow is odd-symmetric through this seed
        assert left.event.location == pytest.approx(-right.event.location, abs=1e-9)

    def test_regular_endpoint_run(self):
        seed = endpoint_seed(P12, -1, 1e-6)
        half = integrate_from(P12, seed, -1, IntegratorConfig(tol=1e-12))
        assert half.event.kind == REGULAR_ENDPOINT
        assert half.event.location == -1.0
        assert half.event.endpoint_vprime == pytest.approx(0.5, abs=1e-4)

    def test_budget_exhaustion_reported(self):
        tiny = dataclasses.replace(CFG, max_steps=5)
        half = integrate_from(P12, PhasePoint(0.0, 0.0), +1, tiny)
        assert half.event.kind == BUDGET_EXHAUSTED

    def test_blowup_near_focal_level_still_detected(self):
        """Pole jammed against r = -1: the step collapses while psi is
        moderate, and the slope-based exit must still call it a blow-up."""
        half = integrate_from(P12, PhasePoint(-0.63, 0.5), -1, CFG)
        assert half.event.kind == BLOWUP_MINUS
        assert -1.0 < half.event.location < -0.99

    def test_derivative_column_matches_rhs(self):
        half = integrate_from(P12, PhasePoint(0.1, 0.3), +1, CFG)
        for i in range(0, len(half.r), max(1, len(half.r) // 50)):
            want = psi_rhs(P12, float(half.r[i]), float(half.psi[i]))
            assert half.dpsi[i] == pytest.approx(want, rel=1e-12, abs=1e-12)


class TestMaximalTrace:
    def test_events_and_gauge(self):
        tr = maximal_trace(P12, PhasePoint(0.0, 0.0), CFG)
        assert tr.left_event.kind == BLOWUP_MINUS
        assert tr.right_event.kind == BLOWUP_PLUS
        i = int(np.argmin(np.abs(tr.r - 0.0)))
        assert tr.v[i] == pytest.approx(0.0, abs=1e-12)
        assert np.all(np.diff(tr.r) > 0)

    def test_vprime_relation(self):
        tr = maximal_trace(P23, PhasePoint(0.2, 1.0), CFG)
        sq = np.sqrt(1.0 - tr.r**2)
        np.testing.assert_allclose(tr.vprime, tr.psi / (P23.k * sq), rtol=1e-12)

    def test_zero_crossing_found(self):
        tr = maximal_trace(P12, PhasePoint(0.0, 0.0), CFG)
        zeros = [c for c in tr.crossings if c.kind == CROSSING_ZERO]
        assert len(zeros) == 1
        assert zeros[0].r == pytest.approx(0.0, abs=1e-9)

    def test_eta_crossing_found(self):
        # all-positive trace crossing the guide curve once
        tr = maximal_trace(P12, PhasePoint(-0.5, 3.0), CFG)
        etas = [c for c in tr.crossings if c.kind == CROSSING_ETA]
        assert len(etas) >= 1
        for c in etas:
            want = eta(P12, c.r)
            assert psi_at(tr, c.r) == pytest.approx(want, abs=1e-6)

    def test_thinning_cap(self):
        tr = maximal_trace(P12, PhasePoint(0.0, 0.0), CFG)
        assert len(tr.r) <= CFG.max_samples
        full = maximal_trace(
            P12, PhasePoint(0.0, 0.0),
            dataclasses.replace(CFG, keep_full_resolution=True),
        )
        assert len(full.r) >= len(tr.r)

    def test_seed_must_be_interior(self):
        with pytest.raises(ValueError):
            PhasePoint(1.2, 0.0)

    @given(
        st.floats(min_value=-0.85, max_value=0.85),
        st.floats(min_value=-4.0, max_value=4.0),
    )
    @settings(max_examples=25, deadline=None)
    def test_every_interior_seed_terminates(self, r, psi):
        cfg = dataclasses.replace(CFG, tol=1e-8)
        tr = maximal_trace(P12, PhasePoint(r, psi), cfg)
        for ev in (tr.left_event, tr.right_event):
            assert ev.kind in (REGULAR_ENDPOINT, BLOWUP_PLUS, BLOWUP_MINUS)
            assert -1.0 <= ev.location <= 1.0


class TestOracles:
    def test_euler_walk_against_adaptive(self):
        rep = self_convergence(
            P12, PhasePoint(0.0, 0.0), window=(-0.3, 0.3),
            euler_h=1e-5, rk4_h=1e-3,
        )
        assert rep.max_dev_euler < 1e-3
        assert rep.max_dev_rk4 < 1e-6

    def test_rk4_beats_euler(self):
        rep = self_convergence(
            P23, PhasePoint(0.1, 0.5), window=(-0.2, 0.4),
            euler_h=1e-4, rk4_h=1e-4,
        )
        assert rep.max_dev_rk4 < rep.max_dev_euler

    def test_walks_are_pure_functions(self):
        a = euler_walk(P12, PhasePoint(0.0, 0.0), 0.3, 1e-4)
        b = euler_walk(P12, PhasePoint(0.0, 0.0), 0.3, 1e-4)
        np.testing.assert_array_equal(a[1], b[1])
        c = rk4_walk(P12, PhasePoint(0.0, 0.0), 0.3, 1e-3)
        d = rk4_walk(P12, PhasePoint(0.0, 0.0), 0.3, 1e-3)
        np.testing.assert_array_equal(c[1], d[1])

    def test_trace_deviation_self_is_zero(self):
        tr = maximal_trace(P12, PhasePoint(0.0, 0.0), CFG)
        assert trace_deviation(tr, tr, (-0.3, 0.3)) == 0.0

    def test_tolerance_refinement_shrinks_deviation(self):
        # window reaches into the blow-up approach, where steps are
        # error-limited rather than capped, so tol actually bites
        win = (-0.75, 0.75)
        loose = maximal_trace(P12, PhasePoint(0.0, 0.0), dataclasses.replace(CFG, tol=1e-4))
        tight = maximal_trace(P12, PhasePoint(0.0, 0.0), dataclasses.replace(CFG, tol=1e-12))
        mid = maximal_trace(P12, PhasePoint(0.0, 0.0), dataclasses.replace(CFG, tol=1e-8))
        dev_loose = trace_deviation(loose, tight, win)
        dev_mid = trace_deviation(mid, tight, win)
        assert dev_mid < 0.01 * dev_loose


class TestSerialization:
    def test_csv_shape(self):
        tr = maximal_trace(P12, PhasePoint(0.0, 0.0), CFG)
        buf = io.StringIO()
        trace_to_csv(tr, buf)
        lines = buf.getvalue().strip().split("\n")
        assert lines[0] == "r,psi,vprime,v"
        assert len(lines) == len(tr.r) + 1
        first = [float(x) for x in lines[1].split(",")]
        assert first[0] == tr.r[0]

    def test_json_envelope(self):
        tr = maximal_trace(P12, PhasePoint(0.0, 0.0), CFG)
        d = trace_to_json(tr)
        assert d["params"]["k"] == 1
        assert d["seed"] == {"r": 0.0, "psi": 0.0}
        assert d["events"]["left"]["kind"] == BLOWUP_MINUS
        assert d["events"]["right"]["kind"] == BLOWUP_PLUS
        assert d["n_samples"] == len(tr.r)
        kinds = {c["kind"] for c in d["crossings"]}
        assert CROSSING_ZERO in kinds


class TestConfigValidation:
    def test_bad_tolerances_rejected(self):
        with pytest.raises(ValueError):
            IntegratorConfig(tol=0.0)
        with pytest.raises(ValueError):
            IntegratorConfig(blowup_threshold=-1.0)
        with pytest.raises(ValueError):
            IntegratorConfig(max_steps=0)
