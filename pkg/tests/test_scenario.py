"""Tests for the physical-model layer: breakdowns, decoy inversion, sweeps."""

import math

import numpy as np
import pytest

from qkdrates.keyrate import rate_gllp, single_photon_class_error
from qkdrates.protocols import BB84, PBC00, SIX_STATE
from qkdrates.scenario import (
    DecoyInversionError,
    DetectorModel,
    LinkModel,
    Scenario,
    SourceKind,
    SourceModel,
    decoy_invert,
    distance_sweep,
    intrinsic_error_from_decoy,
    poisson_breakdown,
    single_photon_breakdown,
    transmittance,
    worst_case_no_decoy,
)


def make_scenario(spec=BB84, source=None, att=0.2, length=50.0, c=1e-6, e_x_sq=0.01):
    return Scenario(
        protocol=spec,
        source=source or SourceModel.single_photon(),
        link=LinkModel(attenuation_db_per_km=att, length_km=length),
        detector=DetectorModel(dark_count_prob=c, detector_count=spec.detector_count),
        e_x_sq=e_x_sq,
    )


class TestTransmittance:
    def test_zero_length(self):
        assert transmittance(LinkModel(0.2, 0.0)) == 1.0

    def test_zero_attenuation(self):
        assert transmittance(LinkModel(0.0, 123.0)) == 1.0

    def test_ten_db_is_factor_ten(self):
        # 0.2 dB/km * 50 km = 10 dB
        assert transmittance(LinkModel(0.2, 50.0)) == pytest.approx(0.1, rel=1e-12)


class TestModelValidation:
    def test_negative_attenuation(self):
        with pytest.raises(ValueError):
            LinkModel(-0.1, 10.0)

    def test_dark_count_range(self):
        with pytest.raises(ValueError):
            DetectorModel(1.0, 2)

    def test_poisson_needs_mu(self):
        with pytest.raises(ValueError):
            SourceModel(kind=SourceKind.POISSONIAN)

    def test_single_photon_rejects_mu(self):
        with pytest.raises(ValueError):
            SourceModel(kind=SourceKind.SINGLE_PHOTON, mean_photon_number=0.5)

    def test_detector_count_must_match_protocol(self):
        with pytest.raises(ValueError, match="detectors"):
            Scenario(
                protocol=PBC00,
                source=SourceModel.single_photon(),
                link=LinkModel(0.2, 10.0),
                detector=DetectorModel(1e-6, 2),
                e_x_sq=0.01,
            )

    def test_e_x_sq_range(self):
        with pytest.raises(ValueError):
            make_scenario(e_x_sq=0.6)


class TestSinglePhotonBreakdown:
    def test_no_loss_means_no_darks(self):
        b = single_photon_breakdown(make_scenario(length=0.0, e_x_sq=0.03))
        assert b.p_dk == 0.0
        assert b.e_x == pytest.approx(0.03)

    def test_known_point(self):
        # eta = 0.01 at 100 km and 0.2 dB/km
        b = single_photon_breakdown(make_scenario(length=100.0, e_x_sq=0.0))
        assert b.p_sq == pytest.approx(0.01, rel=1e-12)
        assert b.p_dk == pytest.approx(1.98e-6, rel=1e-9)
        assert b.e_x == pytest.approx(9.898e-5, rel=1e-3)

    def test_pbc00_has_higher_dark_fraction(self):
        b_bb = single_photon_breakdown(make_scenario(BB84))
        b_pbc = single_photon_breakdown(make_scenario(PBC00))
        assert b_pbc.p_dk / b_pbc.p_c >= b_bb.p_dk / b_bb.p_c

    def test_components_sum(self):
        b = single_photon_breakdown(make_scenario(length=200.0))
        assert b.p_emp + b.p_sq + b.p_mq + b.p_dk == pytest.approx(b.p_c, abs=1e-15)
        assert b.omega0 == 0.0
        assert b.omega1 == 1.0


class TestPoissonBreakdown:
    def test_decoy_relation_exact(self):
        scn = make_scenario(source=SourceModel.poissonian(0.5))
        b = poisson_breakdown(scn)
        eta = transmittance(scn.link)
        p1 = 0.5 * math.exp(-0.5)
        want = b.p_sq + 2.0 * 1e-6 * p1 * (1.0 - eta)
        assert b.omega1 * b.p_c == pytest.approx(want, rel=1e-12)

    def test_closed_form_multi_photon_share(self):
        scn = make_scenario(
            source=SourceModel.poissonian(0.5), att=0.0, length=0.0, c=0.0
        )
        b = poisson_breakdown(scn)
        p0 = math.exp(-0.5)
        p1 = 0.5 * math.exp(-0.5)
        assert b.p_mq / b.p_c == pytest.approx((1 - p0 - p1) / (1 - p0), rel=1e-12)

    def test_small_mu_limit_matches_single_photon(self):
        mu = 1e-6
        poisson_scn = make_scenario(source=SourceModel.poissonian(mu))
        single_scn = make_scenario()
        bp = poisson_breakdown(poisson_scn)
        bs = single_photon_breakdown(single_scn)
        p1 = mu * math.exp(-mu)
        assert bp.p_sq / p1 == pytest.approx(bs.p_sq, rel=1e-3)
        dark_on_single = bp.omega1 * bp.p_c - bp.p_sq
        assert dark_on_single / p1 == pytest.approx(bs.p_dk, rel=1e-3)
        assert single_photon_class_error(bp) == pytest.approx(bs.e_x, rel=1e-3)

    def test_omegas_bounded(self):
        rng = np.random.default_rng(29)
        for _ in range(100):
            scn = make_scenario(
                source=SourceModel.poissonian(float(rng.uniform(0.01, 3.0))),
                length=float(rng.uniform(0.0, 400.0)),
                c=float(10.0 ** rng.uniform(-8, -3)),
                e_x_sq=float(rng.uniform(0.0, 0.5)),
            )
            b = poisson_breakdown(scn)
            assert 0.0 <= b.omega0 and 0.0 <= b.omega1
            assert b.omega0 + b.omega1 <= 1.0 + 1e-12
            assert b.p_emp + b.p_sq + b.p_mq + b.p_dk == pytest.approx(
                b.p_c, abs=1e-15
            )

    def test_source_kind_dispatch(self):
        with pytest.raises(ValueError):
            poisson_breakdown(make_scenario())
        with pytest.raises(ValueError):
            single_photon_breakdown(make_scenario(source=SourceModel.poissonian(0.5)))


class TestDecoyInvert:
    def test_round_trip_from_forward_model(self):
        scn = make_scenario(source=SourceModel.poissonian(0.5), e_x_sq=0.01)
        b = poisson_breakdown(scn)
        eta = transmittance(scn.link)
        p_sq, e_x_sq = decoy_invert(
            b.omega1 * b.p_c, single_photon_class_error(b), 0.5, eta, 1e-6
        )
        assert p_sq == pytest.approx(b.p_sq, abs=1e-9)
        assert e_x_sq == pytest.approx(0.01, abs=1e-9)

    def test_round_trip_random_grid(self):
        # protocols with conclusive factor 1; the trine POVM folds its
        # factor into the recovered error rate, undone separately below
        rng = np.random.default_rng(31)
        for _ in range(100):
            spec = (BB84, SIX_STATE)[rng.integers(2)]
            mu = float(rng.uniform(0.05, 2.0))
            scn = make_scenario(
                spec,
                source=SourceModel.poissonian(mu),
                length=float(rng.uniform(0.0, 300.0)),
                c=float(10.0 ** rng.uniform(-8, -4)),
                e_x_sq=float(rng.uniform(0.0, 0.5)),
            )
            b = poisson_breakdown(scn)
            p_sq, e_x_sq = decoy_invert(
                b.omega1 * b.p_c,
                single_photon_class_error(b),
                mu,
                transmittance(scn.link),
                scn.detector.dark_count_prob,
            )
            assert p_sq == pytest.approx(b.p_sq, abs=1e-9)
            assert e_x_sq == pytest.approx(scn.e_x_sq, abs=1e-9)

    def test_pbc00_needs_factor_correction(self):
        scn = make_scenario(PBC00, source=SourceModel.poissonian(0.5), e_x_sq=0.04)
        b = poisson_breakdown(scn)
        p_sq, e_raw = decoy_invert(
            b.omega1 * b.p_c, single_photon_class_error(b), 0.5,
            transmittance(scn.link), 1e-6,
        )
        assert p_sq == pytest.approx(b.p_sq, abs=1e-9)
        assert e_raw == pytest.approx(0.04 / (2.0 - 0.04), abs=1e-9)
        assert intrinsic_error_from_decoy(PBC00, e_raw) == pytest.approx(
            0.04, abs=1e-9
        )
        assert intrinsic_error_from_decoy(BB84, 0.3) == 0.3

    def test_no_dark_counts(self):
        mu, eta = 0.5, 0.2
        p1 = mu * math.exp(-mu)
        p_sq, e_x_sq = decoy_invert(p1 * eta, 0.02, mu, eta, 0.0)
        assert p_sq == pytest.approx(p1 * eta, abs=1e-15)
        assert e_x_sq == pytest.approx(0.02 * p1 * eta / (p1 * eta), abs=1e-12)

    def test_below_dark_floor(self):
        with pytest.raises(DecoyInversionError):
            decoy_invert(1e-12, 0.5, 0.5, 0.1, 1e-3)

    def test_unphysical_error_rate(self):
        mu, eta = 0.5, 0.01
        p1 = mu * math.exp(-mu)
        with pytest.raises(DecoyInversionError):
            decoy_invert(p1, 0.9, mu, eta, 0.0)


class TestWorstCaseNoDecoy:
    def test_vanishing_mu(self):
        est = worst_case_no_decoy(0.5, 0.03, 1e-9)
        assert est.usable
        assert est.omega1_lower == pytest.approx(1.0, abs=1e-9)
        assert est.e_x_1_upper == pytest.approx(0.03, abs=1e-9)

    def test_boundary(self):
        mu = 0.5
        p_multi = 1.0 - math.exp(-mu) * (1.0 + mu)
        est = worst_case_no_decoy(p_multi, 0.1, mu)
        assert not est.usable
        assert est.omega1_lower == 0.0

    def test_much_worse_than_decoy(self):
        scn = make_scenario(source=SourceModel.poissonian(0.5), e_x_sq=0.01)
        b = poisson_breakdown(scn)
        est = worst_case_no_decoy(b.p_c, b.e_x, 0.5)
        if est.usable:
            from qkdrates.entropy import binary_entropy, worst_case_conditional_phase_entropy

            worst_rate = b.p_c * (
                est.omega1_lower
                - binary_entropy(b.e_x)
                - est.omega1_lower
                * worst_case_conditional_phase_entropy(BB84, est.e_x_1_upper)
            )
        else:
            from qkdrates.entropy import binary_entropy

            worst_rate = -b.p_c * binary_entropy(b.e_x)
        assert worst_rate < rate_gllp(b, BB84)
        # at eta = 0.1 the multi-photon rate swamps p_c entirely
        assert not est.usable


class TestDistanceSweep:
    def test_single_row(self):
        rows = distance_sweep(make_scenario(), 25.0, 25.0, 5.0)
        assert len(rows) == 1
        assert rows[0].length_km == 25.0

    def test_grid_and_clamping(self):
        rows = distance_sweep(make_scenario(e_x_sq=0.05), 0.0, 500.0, 50.0)
        assert len(rows) == 11
        assert [r.length_km for r in rows] == [50.0 * i for i in range(11)]
        assert all(r.rate_old >= 0.0 and r.rate_new >= 0.0 for r in rows)

    def test_improved_survives_longer(self):
        rows = distance_sweep(make_scenario(), 0.0, 400.0, 10.0)
        last_old = max(r.length_km for r in rows if r.rate_old > 0.0)
        last_new = max(r.length_km for r in rows if r.rate_new > 0.0)
        assert last_new > last_old

    def test_poisson_improved_dominates_everywhere(self):
        scn = make_scenario(source=SourceModel.poissonian(0.5))
        rows = distance_sweep(scn, 0.0, 200.0, 20.0)
        assert all(r.rate_new >= r.rate_old for r in rows)

    def test_validation(self):
        with pytest.raises(ValueError):
            distance_sweep(make_scenario(), 10.0, 5.0, 1.0)
        with pytest.raises(ValueError):
            distance_sweep(make_scenario(), 0.0, 5.0, 0.0)

    def test_at_length_preserves_other_fields(self):
        scn = make_scenario()
        moved = scn.at_length(77.0)
        assert moved.link.length_km == 77.0
        assert moved.protocol is scn.protocol
        assert moved.e_x_sq == scn.e_x_sq
