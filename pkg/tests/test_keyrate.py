"""Tests for the rate formulas, threshold solver, and distance search."""

import math

import numpy as np
import pytest

from qkdrates.entropy import binary_entropy
from qkdrates.keyrate import (
    RateBreakdown,
    max_distance,
    nonuniform_dark_bound,
    rate_alice,
    rate_bob,
    rate_gllp,
    rate_improved,
    rate_shor_preskill,
    single_photon_class_error,
    threshold_bit_error,
)
from qkdrates.protocols import BB84, PBC00, SIX_STATE, protocol_catalog
from qkdrates.scenario import (
    DetectorModel,
    LinkModel,
    Scenario,
    SourceModel,
    breakdown,
    poisson_breakdown,
)

# Root of 1 - H(e) - H_worst(e), solved independently by high-precision
# bisection on the closed forms H(e) (BB84), H4 pattern (six-state),
# H(1.25 e) (PBC00).
ZERO_DARK_THRESHOLDS = {
    "bb84": 0.1100278644,
    "six-state": 0.1261930833,
    "pbc00": 0.0981291597,
}

# First zero of 1 - H((1-f) e + f/2) - (1-f) H_worst(e) along f, same
# independent bisection.
DARK_THRESHOLDS = {
    ("bb84", 0.01): 0.44297982,
    ("six-state", 0.01): 0.46089694,
    ("pbc00", 0.01): 0.43164627,
    ("bb84", 0.1): 0.13569767,
    ("six-state", 0.1): 0.19455603,
}


def pure_single_photon(p_sq=1.0, e=0.0):
    return RateBreakdown(
        p_emp=0.0, p_sq=p_sq, p_mq=0.0, p_dk=0.0,
        omega0=0.0, omega1=1.0, e_x=e, e_x_sq=e,
    )


def single_photon_with_darks(e_x_sq, dark_fraction, p_c=1.0):
    p_dk = dark_fraction * p_c
    p_sq = p_c - p_dk
    e_x = (p_sq * e_x_sq + p_dk * 0.5) / p_c
    return RateBreakdown(
        p_emp=0.0, p_sq=p_sq, p_mq=0.0, p_dk=p_dk,
        omega0=0.0, omega1=1.0, e_x=e_x, e_x_sq=e_x_sq,
    )


def fig1_scenario(spec, e_x_sq=0.01, dark=1e-6, length=0.0):
    return Scenario(
        protocol=spec,
        source=SourceModel.single_photon(),
        link=LinkModel(attenuation_db_per_km=0.2, length_km=length),
        detector=DetectorModel(dark_count_prob=dark, detector_count=spec.detector_count),
        e_x_sq=e_x_sq,
    )


class TestShorPreskillRate:
    def test_error_free(self):
        assert rate_shor_preskill(1.0, 0.0, BB84) == pytest.approx(1.0, abs=1e-12)

    def test_bb84_known_value(self):
        # 1 - 2 H(0.05), worst case H(e_z|e_x) = H(e_x) for BB84
        assert rate_shor_preskill(1.0, 0.05, BB84) == pytest.approx(0.4272, abs=1e-3)

    @pytest.mark.parametrize("name", list(ZERO_DARK_THRESHOLDS))
    def test_zero_dark_threshold_roots(self, name):
        spec = next(s for s in protocol_catalog() if s.name == name)
        lo, hi = 0.01, 0.3
        assert rate_shor_preskill(1.0, lo, spec) > 0
        assert rate_shor_preskill(1.0, hi, spec) < 0
        for _ in range(60):
            mid = (lo + hi) / 2
            if rate_shor_preskill(1.0, mid, spec) > 0:
                lo = mid
            else:
                hi = mid
        assert (lo + hi) / 2 == pytest.approx(ZERO_DARK_THRESHOLDS[name], abs=5e-4)


class TestGllpRate:
    def test_reduces_to_shor_preskill(self):
        b = pure_single_photon(p_sq=0.8, e=0.03)
        want = rate_shor_preskill(0.8, 0.03, BB84)
        assert rate_gllp(b, BB84) == pytest.approx(want, abs=1e-12)

    def test_no_extractable_fraction(self):
        b = RateBreakdown(
            p_emp=0.0, p_sq=0.0, p_mq=0.5, p_dk=0.0,
            omega0=0.0, omega1=0.0, e_x=0.1, e_x_sq=0.1,
        )
        assert rate_gllp(b, BB84) == pytest.approx(-0.5 * binary_entropy(0.1))
        assert rate_gllp(b, BB84) <= 0.0

    def test_single_photon_class_error_mixes_darks(self):
        b = single_photon_with_darks(e_x_sq=0.01, dark_fraction=0.2)
        want = 0.8 * 0.01 + 0.2 * 0.5
        assert single_photon_class_error(b) == pytest.approx(want, abs=1e-12)
        # with a single-photon source the class error equals the mixed rate
        assert single_photon_class_error(b) == pytest.approx(b.e_x, abs=1e-12)


class TestBobAndAliceRates:
    def test_perfect_single_photon(self):
        assert rate_bob(pure_single_photon(), BB84) == pytest.approx(1.0)

    def test_all_dark_counts_vanishes(self):
        b = RateBreakdown(
            p_emp=0.0, p_sq=0.0, p_mq=0.0, p_dk=0.3,
            omega0=0.0, omega1=1.0, e_x=0.5, e_x_sq=0.0,
        )
        assert rate_bob(b, BB84) == pytest.approx(0.0, abs=1e-12)

    def test_table1_point_is_near_zero(self):
        # BB84, e_x_sq = 0.01: the threshold sits at dark fraction ~0.8776
        b = single_photon_with_darks(e_x_sq=0.01, dark_fraction=0.8776)
        assert abs(rate_bob(b, BB84)) <= 1e-3 * b.p_c

    def test_alice_equals_bob_when_omega0_matches_darks(self):
        b = RateBreakdown(
            p_emp=0.0, p_sq=0.6, p_mq=0.0, p_dk=0.1,
            omega0=0.1 / 0.7, omega1=0.6 / 0.7, e_x=0.08, e_x_sq=0.02,
        )
        assert rate_alice(b, BB84) == pytest.approx(rate_bob(b, BB84), abs=1e-12)

    def test_bob_minus_alice_identity(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            p = rng.dirichlet(np.ones(4)) * rng.uniform(0.1, 1.0)
            omega0 = rng.uniform(0.0, 0.3)
            omega1 = rng.uniform(0.0, 1.0 - omega0)
            b = RateBreakdown(
                p_emp=p[0], p_sq=p[1], p_mq=p[2], p_dk=p[3],
                omega0=omega0, omega1=omega1,
                e_x=rng.uniform(0, 0.5), e_x_sq=rng.uniform(0, 0.5),
            )
            diff = rate_bob(b, BB84) - rate_alice(b, BB84)
            assert diff == pytest.approx(b.p_dk - b.p_c * b.omega0, abs=1e-12)

    def test_bob_beats_alice_for_single_photon_source_with_darks(self):
        b = single_photon_with_darks(e_x_sq=0.01, dark_fraction=0.1)
        assert rate_bob(b, BB84) > rate_alice(b, BB84)

    def test_poisson_low_transmittance_ordering(self):
        scn = Scenario(
            protocol=BB84,
            source=SourceModel.poissonian(0.5),
            link=LinkModel(0.2, 500.0),
            detector=DetectorModel(1e-6, 2),
            e_x_sq=0.01,
        )
        b = poisson_breakdown(scn)
        # omega0 p_c -> 2C e^{-mu} while p_dk -> 2C, so Bob's bound wins
        assert b.p_dk > b.omega0 * b.p_c
        assert rate_bob(b, BB84) > rate_alice(b, BB84)


class TestImprovedRate:
    def test_selects_larger_branch(self):
        b = single_photon_with_darks(e_x_sq=0.01, dark_fraction=0.3)
        assert rate_improved(b, BB84) == pytest.approx(rate_bob(b, BB84), abs=1e-15)

    def test_error_free_single_photon(self):
        assert rate_improved(pure_single_photon(p_sq=0.4), BB84) == pytest.approx(0.4)

    def test_reduction_identity_all_rates_agree(self):
        b = pure_single_photon(p_sq=0.9, e=0.04)
        for spec in protocol_catalog():
            want = rate_shor_preskill(0.9, 0.04, spec)
            assert rate_gllp(b, spec) == pytest.approx(want, abs=1e-12)
            assert rate_bob(b, spec) == pytest.approx(want, abs=1e-12)
            assert rate_alice(b, spec) == pytest.approx(want, abs=1e-12)
            assert rate_improved(b, spec) == pytest.approx(want, abs=1e-12)

    def test_dominates_gllp_on_random_scenarios(self):
        rng = np.random.default_rng(17)
        specs = protocol_catalog()
        for _ in range(300):
            spec = specs[rng.integers(len(specs))]
            if rng.random() < 0.5:
                source = SourceModel.single_photon()
            else:
                source = SourceModel.poissonian(float(rng.uniform(0.05, 2.0)))
            scn = Scenario(
                protocol=spec,
                source=source,
                link=LinkModel(float(rng.uniform(0.0, 1.0)), float(rng.uniform(0.0, 300.0))),
                detector=DetectorModel(
                    float(10.0 ** rng.uniform(-8, -3)), spec.detector_count
                ),
                e_x_sq=float(rng.uniform(0.0, 0.5)),
            )
            b = breakdown(scn)
            assert rate_improved(b, spec) >= rate_gllp(b, spec) - 1e-12


class TestNonuniformDarkBound:
    def test_uniform_detectors_leak_nothing(self):
        assert nonuniform_dark_bound(0.5) == pytest.approx(0.0, abs=1e-15)

    def test_deterministic_detector_leaks_everything(self):
        assert nonuniform_dark_bound(1.0) == pytest.approx(1.0)

    def test_known_value(self):
        assert nonuniform_dark_bound(0.25) == pytest.approx(0.1887, abs=1e-4)


class TestThresholdBitError:
    def test_zero_intrinsic_error_reaches_half(self):
        for spec in protocol_catalog():
            assert threshold_bit_error(spec, 0.0) == pytest.approx(0.5, abs=5e-3)

    @pytest.mark.parametrize(("name", "e_sq"), list(DARK_THRESHOLDS))
    def test_against_independent_bisection(self, name, e_sq):
        spec = next(s for s in protocol_catalog() if s.name == name)
        assert threshold_bit_error(spec, e_sq) == pytest.approx(
            DARK_THRESHOLDS[(name, e_sq)], abs=1e-4
        )

    def test_pbc00_no_positive_rate(self):
        assert threshold_bit_error(PBC00, 0.1) is None

    def test_protocol_ordering(self):
        for e in np.linspace(0.0, 0.09, 10):
            t_six = threshold_bit_error(SIX_STATE, float(e))
            t_bb = threshold_bit_error(BB84, float(e))
            t_pbc = threshold_bit_error(PBC00, float(e))
            assert t_six >= t_bb >= t_pbc

    def test_monotone_in_intrinsic_error(self):
        previous = 1.0
        for e in np.linspace(0.0, 0.1, 12):
            t = threshold_bit_error(BB84, float(e))
            assert t is not None
            assert t <= previous + 1e-12
            previous = t

    def test_domain(self):
        with pytest.raises(ValueError):
            threshold_bit_error(BB84, 0.5)


class TestMaxDistance:
    def test_no_error_sources_is_unbounded(self):
        scn = fig1_scenario(BB84, e_x_sq=0.0, dark=0.0)
        assert max_distance(scn, "improved") == math.inf

    def test_improved_extends_distance(self):
        for spec in protocol_catalog():
            scn = fig1_scenario(spec)
            assert max_distance(scn, "improved") > max_distance(scn, "gllp")

    def test_pbc00_shorter_than_bb84(self):
        d_pbc = max_distance(fig1_scenario(PBC00), "improved")
        d_bb84 = max_distance(fig1_scenario(BB84), "improved")
        assert d_pbc <= d_bb84

    def test_zero_rate_at_origin(self):
        scn = fig1_scenario(PBC00, e_x_sq=0.1)
        assert max_distance(scn, "improved") == 0.0

    def test_rejects_unknown_rate_fn(self):
        with pytest.raises(ValueError):
            max_distance(fig1_scenario(BB84), "banana")

    def test_improved_rate_monotone_in_distance(self):
        scn = fig1_scenario(BB84)
        rates = []
        for length in np.linspace(0.0, 300.0, 30):
            b = breakdown(scn.at_length(float(length)))
            rates.append(rate_improved(b, BB84))
        assert all(b <= a + 1e-12 for a, b in zip(rates, rates[1:]))


class TestBreakdownValidation:
    def test_rejects_zero_conclusive_rate(self):
        with pytest.raises(ValueError):
            RateBreakdown(
                p_emp=0.0, p_sq=0.0, p_mq=0.0, p_dk=0.0,
                omega0=0.0, omega1=0.0, e_x=0.0, e_x_sq=0.0,
            )

    def test_rejects_bad_omegas(self):
        with pytest.raises(ValueError):
            RateBreakdown(
                p_emp=0.0, p_sq=1.0, p_mq=0.0, p_dk=0.0,
                omega0=0.7, omega1=0.7, e_x=0.0, e_x_sq=0.0,
            )

    def test_dark_error_rate_default(self):
        assert pure_single_photon().e_x_dk == 0.5
