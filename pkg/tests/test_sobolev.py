"""H^s norms, the collision profile and the divergence probe.

Independent oracle: every pair integral has the closed form

    int_0^inf (1+xi^2)^{s-2} cos(omega xi) dxi
        = sqrt(pi)/Gamma(2-s) * (omega/2)^{3/2-s} * K_{3/2-s}(omega),

so the whole squared distance can be assembled from Bessel functions
without quadrature.  The quadrature-based implementation is required to
agree with that assembly to 1e-9 across the regimes it splits over.
The physical-space anchor ||c e^{-|x|}||_{H^1}^2 = 2 c^2 comes from the
hand integral of u^2 + u_x^2.
"""

import math
from types import SimpleNamespace

import numpy as np
import pytest
from scipy.special import gamma, kv

from peakonlab import (
    CollisionFunction,
    EventKind,
    PeakonState,
    collision_function,
    divergence_probe,
    hs_distance,
    hs_norm,
    locate_collision,
)
from peakonlab.integrator import EventRecord

RNG = np.random.default_rng(42)


def bessel_distance(state, coll, s):
    """Closed-form H^s distance via modified Bessel functions."""

    def weight_cos(omega):
        p = 2.0 - s
        if omega == 0.0:
            return 0.5 * math.sqrt(math.pi) * gamma(p - 0.5) / gamma(p)
        return math.sqrt(math.pi) / gamma(p) * (omega / 2.0) ** (p - 0.5) * kv(p - 0.5, omega)

    amps = (state.p1, state.p2, -coll.p_star)
    pos = (state.q1, state.q2, coll.q_star)
    total = 0.0
    for j in range(3):
        for k in range(3):
            total += amps[j] * amps[k] * weight_cos(abs(pos[j] - pos[k]))
    return math.sqrt(max(4.0 / math.pi * total, 0.0))


def _fake_traj(kind, state):
    return SimpleNamespace(terminal_event=EventRecord(kind=kind, time=1.0, state=state))


class TestCollisionFunction:
    def test_from_collision_event(self, case_runs):
        params, spec, initial, traj = case_runs["case1"]
        rec = locate_collision(traj)
        coll = collision_function(traj)
        assert coll.p_star == pytest.approx(rec.state.p1 + rec.state.p2)
        assert coll.q_star == pytest.approx(rec.state.q1)

    def test_momentum_vanishing_keeps_survivor(self):
        st = PeakonState(0.0, 2.0, 0.3, 1.0)
        coll = collision_function(_fake_traj(EventKind.MOMENTUM_ZERO_1, st))
        assert (coll.p_star, coll.q_star) == (2.0, 1.0)

    def test_both_momenta_zero_gives_zero_profile(self):
        st = PeakonState(0.0, 0.0, 0.3, 1.0)
        coll = collision_function(_fake_traj(EventKind.MOMENTUM_ZERO_2, st))
        assert coll.p_star == 0.0
        assert coll.evaluate(0.7) == 0.0

    def test_horizon_has_no_profile(self):
        st = PeakonState(1.0, 1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            collision_function(_fake_traj(EventKind.HORIZON, st))

    def test_profile_evaluation(self):
        coll = CollisionFunction(p_star=2.0, q_star=1.0)
        assert coll.evaluate(1.0) == 2.0
        assert coll.evaluate(0.0) == pytest.approx(2.0 * math.exp(-1.0))


ZERO = CollisionFunction(p_star=0.0, q_star=0.0)


class TestNorm:
    def test_h1_anchor(self):
        """||c e^{-|x|}||_{H^1}^2 = 2 c^2 (hand integral of u^2 + u_x^2)."""
        for c in (1.0, -0.7, 2.5):
            state = PeakonState(c, 0.0, 0.0, 9.0)
            np.testing.assert_allclose(hs_norm(state, 1.0) ** 2, 2 * c * c, atol=1e-8)

    def test_zero_state(self):
        assert hs_norm(PeakonState(0.0, 0.0, 0.0, 1.0), 1.0) == 0.0

    def test_far_separated_peaks_decouple(self):
        """Cross terms die off: norm^2 -> 2 p1^2 + 2 p2^2 at separation 40."""
        state = PeakonState(1.0, 0.7, 0.0, 40.0)
        np.testing.assert_allclose(
            hs_norm(state, 1.0) ** 2, 2 * 1.0 + 2 * 0.49, rtol=1e-8
        )

    def test_matches_distance_to_zero_profile(self):
        state = PeakonState(1.2, -0.3, 0.0, 0.7)
        for s in (0.5, 1.0, 1.4):
            assert hs_norm(state, s) == hs_distance(state, ZERO, s)

    def test_homogeneity(self):
        """Scaling both momenta scales the norm linearly."""
        base = PeakonState(0.8, -0.5, 0.0, 0.6)
        scaled = PeakonState(2.4, -1.5, 0.0, 0.6)
        np.testing.assert_allclose(
            hs_norm(scaled, 1.2), 3.0 * hs_norm(base, 1.2), atol=1e-8
        )

    def test_triangle_inequality(self):
        """||u - C|| <= ||u|| + ||C|| on random configurations."""
        for _ in range(20):
            p1, p2, pc = RNG.uniform(-2, 2, 3)
            q1 = RNG.uniform(-1, 1)
            state = PeakonState(p1, p2, q1, q1 + RNG.uniform(0, 2))
            coll = CollisionFunction(pc, RNG.uniform(-1, 1))
            single = PeakonState(coll.p_star, 0.0, coll.q_star, coll.q_star + 50.0)
            for s in (0.5, 1.0, 1.4):
                lhs = hs_distance(state, coll, s)
                assert lhs <= hs_norm(state, s) + hs_norm(single, s) + 1e-8


class TestDistance:
    def test_zero_when_profiles_coincide(self):
        state = PeakonState(0.7, 0.0, -0.3, 5.0)
        coll = CollisionFunction(p_star=0.7, q_star=-0.3)
        for s in (0.5, 1.0, 1.4):
            assert hs_distance(state, coll, s) <= 1e-9

    def test_translation_invariance(self):
        state = PeakonState(1.5, -1.0, 0.0, 0.1)
        coll = CollisionFunction(0.5, -0.05)
        for delta in (-3.7, 0.9, 12.0):
            shifted = PeakonState(1.5, -1.0, delta, 0.1 + delta)
            coll_shift = CollisionFunction(0.5, -0.05 + delta)
            for s in (0.5, 1.0, 1.4):
                np.testing.assert_allclose(
                    hs_distance(shifted, coll_shift, s),
                    hs_distance(state, coll, s),
                    rtol=1e-9,
                    atol=1e-10,
                )

    def test_supercritical_index_rejected(self):
        state = PeakonState(1.0, 0.5, 0.0, 1.0)
        for s in (1.5, 1.6, 2.0):
            with pytest.raises(ValueError, match="divergence_probe"):
                hs_distance(state, ZERO, s)

    def test_against_bessel_closed_form(self):
        """Quadrature path vs the Bessel assembly on random configurations."""
        for _ in range(25):
            p1, p2, pc = RNG.uniform(-2, 2, 3)
            q1 = RNG.uniform(-2, 2)
            q2 = q1 + RNG.uniform(1e-7, 3.0)
            qc = q1 + RNG.uniform(-1.0, 1.0)
            state = PeakonState(p1, p2, q1, q2)
            coll = CollisionFunction(pc, qc)
            for s in (0.5, 1.0, 1.4, 1.45):
                np.testing.assert_allclose(
                    hs_distance(state, coll, s),
                    bessel_distance(state, coll, s),
                    rtol=1e-9,
                    atol=1e-9,
                )

    def test_near_collision_regime_against_bessel(self):
        """Tiny separations exercise the split quadrature path; squared
        values agree to the advertised absolute accuracy."""
        for d in (1e-7, 1e-6, 1e-4, 1e-3):
            state = PeakonState(1.6, -1.1, 0.0, d)
            coll = CollisionFunction(0.52, -d / 3)
            for s in (0.5, 1.0, 1.4):
                np.testing.assert_allclose(
                    hs_distance(state, coll, s) ** 2,
                    bessel_distance(state, coll, s) ** 2,
                    rtol=1e-6,
                    atol=5e-10,
                )


class TestDivergenceProbe:
    STATE = PeakonState(1.5, -1.0, 0.0, 0.1)
    COLL = CollisionFunction(0.5, 0.0)

    def test_growth_rate_s2(self):
        """s = 2: tail exponent 2s-3 = 1, so ~10x per cutoff decade."""
        vals = [divergence_probe(self.STATE, self.COLL, 2.0, c) for c in (1e2, 1e3, 1e4)]
        for lo, hi in zip(vals, vals[1:]):
            assert 8.0 <= hi / lo <= 12.0

    def test_zero_at_coincidence(self):
        state = PeakonState(0.5, 0.0, 0.0, 3.0)
        coll = CollisionFunction(0.5, 0.0)
        for cutoff in (1e2, 1e3):
            assert abs(divergence_probe(state, coll, 2.0, cutoff)) <= 1e-10

    def test_subcritical_index_rejected(self):
        with pytest.raises(ValueError, match="hs_distance"):
            divergence_probe(self.STATE, self.COLL, 1.4, 1e3)

    def test_subcritical_truncations_cauchy(self):
        """Just below critical (s = 1.49) the truncation sequence is Cauchy:
        increments between consecutive cutoffs are positive and shrink,
        approaching the convergent full quadrature from below."""
        from peakonlab.sobolev import _quad_checked

        def truncated(cutoff):
            amps = (self.STATE.p1, self.STATE.p2, -self.COLL.p_star)
            pos = (self.STATE.q1, self.STATE.q2, self.COLL.q_star)
            wt = lambda xi: (1 + xi * xi) ** (1.49 - 2.0)
            i0, _ = _quad_checked(wt, 0, cutoff, epsabs=1e-12, epsrel=1e-12, limit=500)
            total = sum(amps) ** 2 * i0
            for j in range(3):
                for k in range(j + 1, 3):
                    om = abs(pos[j] - pos[k])
                    if om == 0 or amps[j] == 0 or amps[k] == 0:
                        continue
                    ic, _ = _quad_checked(
                        wt, 0, cutoff, weight="cos", wvar=om, epsabs=1e-12, limit=500
                    )
                    total -= amps[j] * amps[k] * 2 * (i0 - ic)
            return 4 / math.pi * total

        vals = [truncated(c) for c in (1e2, 1e3, 1e4, 1e5)]
        increments = [b - a for a, b in zip(vals, vals[1:])]
        assert all(inc > 0 for inc in increments)
        assert increments[0] > increments[1] > increments[2]
        full = hs_distance(self.STATE, self.COLL, 1.49) ** 2
        assert vals[-1] < full
