"""
Tests for the cluster-head election rules
"""

import numpy as np
import pytest

from becc_sim.election_protocols import (
    BeccClusterStats,
    BeccProtocol,
    ElectionContext,
    GlobalView,
    LeachEProtocol,
    LeachProtocol,
    NodeView,
    ProtocolName,
    SepMProtocol,
    SepProtocol,
    becc_polarized_factors,
    becc_relative_factor,
    becc_threshold,
    elect,
    epoch_length,
    leach_e_threshold,
    leach_threshold,
    make_protocol,
    rotation_threshold,
    sep_class_probabilities,
    sep_m_base_probability,
    sep_m_threshold,
    sep_thresholds,
)
from becc_sim.network_world import NEVER_ELECTED, MultiLevelSpec, TwoLevelSpec
from becc_sim.rng import SeededRNG


def _ctx(r=0, p_opt=0.05, e_res=1.0, e_init=1.0, since=NEVER_ELECTED, is_advanced=None, gv=None):
    view = NodeView(e_res=e_res, e_init=e_init, rounds_since_ch=since, is_advanced=is_advanced)
    return ElectionContext(round=r, p_opt=p_opt, node_view=view, global_view=gv)


def _reference_polarized(energies):
    """Direct transcription of the relative and polarized factor definitions."""
    n = len(energies)
    total = sum(energies)
    q_rel = [e / total * n for e in energies]
    below_mass = sum(q for q in q_rel if q < 1)
    above_mass = sum(q for q in q_rel if q >= 1)
    return q_rel, [q + q * below_mass / above_mass if q >= 1 else 0.0 for q in q_rel]


class TestRotationThreshold:
    """Test the LEACH rotating threshold and the G set"""

    def test_epoch_length(self):
        assert epoch_length(0.05) == 20
        assert epoch_length(0.03125) == 32
        assert epoch_length(0.3) == 4

    def test_first_round(self):
        assert leach_threshold(_ctx(r=0)) == pytest.approx(0.05)

    def test_mid_epoch(self):
        assert leach_threshold(_ctx(r=10)) == pytest.approx(0.1)

    def test_wraps_with_epoch(self):
        assert leach_threshold(_ctx(r=30)) == pytest.approx(leach_threshold(_ctx(r=10)))

    def test_head_this_epoch_not_eligible(self):
        # headed in round 0 of the current epoch
        assert leach_threshold(_ctx(r=3, since=3)) == 0.0
        # headed in round 19 of the previous epoch
        assert leach_threshold(_ctx(r=3, since=4)) == pytest.approx(0.05 / 0.85)

    def test_eligible_set_refills_at_epoch_boundary(self):
        for since in (1, 5, 20):
            assert leach_threshold(_ctx(r=20, since=since)) == pytest.approx(0.05)
        assert leach_threshold(_ctx(r=21, since=1)) == 0.0

    def test_last_round_of_epoch_is_certain(self):
        assert leach_threshold(_ctx(r=19, since=20)) == pytest.approx(1.0)
        assert leach_threshold(_ctx(r=39, since=19)) == 0.0

    def test_degenerate_probabilities(self):
        assert rotation_threshold(0.0, 0, NEVER_ELECTED) == 0.0
        assert rotation_threshold(1.0, 7, NEVER_ELECTED) == 1.0

    def test_context_validation(self):
        with pytest.raises(ValueError):
            _ctx(p_opt=0.0)
        with pytest.raises(ValueError):
            _ctx(r=-1)


class TestBeccFactors:
    """Test relative and polarized energy factors"""

    def test_relative_factor(self):
        assert becc_relative_factor(BeccClusterStats((3.0, 1.0))).tolist() == pytest.approx([1.5, 0.5])
        assert becc_relative_factor(BeccClusterStats((2.0, 2.0, 2.0))).tolist() == pytest.approx([1, 1, 1])
        assert becc_relative_factor(BeccClusterStats((0.7,))).tolist() == pytest.approx([1.0])

    def test_polarized_two_members(self):
        assert becc_polarized_factors(BeccClusterStats((3.0, 1.0))).tolist() == pytest.approx([2.0, 0.0])

    def test_polarized_three_members(self):
        q = becc_polarized_factors(BeccClusterStats((5.0, 3.0, 1.0)))
        assert q.tolist() == pytest.approx([1.875, 1.125, 0.0])

    def test_polarized_equal_energies(self):
        q = becc_polarized_factors(BeccClusterStats((0.1,) * 7))
        assert q.tolist() == pytest.approx([1.0] * 7)
        assert q.sum() == pytest.approx(7, abs=1e-9)

    def test_rejects_empty_and_dead_clusters(self):
        with pytest.raises(ValueError):
            becc_relative_factor(BeccClusterStats(()))
        with pytest.raises(ValueError):
            becc_relative_factor(BeccClusterStats((0.0, 0.0)))

    def test_matches_reference_on_random_clusters(self):
        gen = np.random.default_rng(20240501)
        for _ in range(10_000):
            n = int(gen.integers(1, 51))
            energies = tuple(float(e) for e in 10.0 - gen.uniform(0.0, 10.0, size=n))
            q_rel, expected = _reference_polarized(energies)
            q_pol = becc_polarized_factors(BeccClusterStats(energies))

            assert q_pol.sum() == pytest.approx(n, abs=1e-9)
            np.testing.assert_allclose(q_pol, expected, rtol=1e-12, atol=1e-12)
            q_rel = np.array(q_rel)
            assert np.all(q_pol[q_rel < 1] == 0.0)
            above = q_rel >= 1
            order = np.argsort(q_rel[above])
            assert np.all(np.diff(q_pol[above][order]) >= 0)

    def test_scale_invariance_on_random_clusters(self):
        gen = np.random.default_rng(77)
        for _ in range(500):
            n = int(gen.integers(1, 51))
            energies = 10.0 - gen.uniform(0.0, 10.0, size=n)
            c = float(10.0 ** gen.uniform(-6, 6))
            base = BeccClusterStats(tuple(float(e) for e in energies))
            scaled = BeccClusterStats(tuple(float(e) * c for e in energies))

            np.testing.assert_allclose(becc_relative_factor(scaled), becc_relative_factor(base), rtol=1e-9)
            np.testing.assert_allclose(becc_polarized_factors(scaled), becc_polarized_factors(base), rtol=1e-9, atol=1e-12)

    def test_threshold(self):
        assert becc_threshold(2.0, 0.05) == pytest.approx(0.1)
        assert becc_threshold(0.0, 0.05) == 0.0
        assert becc_threshold(25.0, 0.05) == 1.0
        with pytest.raises(ValueError):
            becc_threshold(-0.1, 0.05)


class TestEnergyAwareBaselines:
    """Test LEACH-E, SEP and SEP-M thresholds"""

    def test_leach_e(self):
        gv = GlobalView(total_residual=8.0, alive_count=4)
        assert leach_e_threshold(_ctx(e_res=4.0, gv=gv)) == pytest.approx(0.1)
        assert leach_e_threshold(_ctx(e_res=2.0, gv=gv)) == pytest.approx(0.05)
        assert leach_e_threshold(_ctx(e_res=0.0, gv=gv)) == 0.0

    def test_leach_e_needs_global_view(self):
        with pytest.raises(ValueError):
            leach_e_threshold(_ctx())

    def test_sep_class_probabilities(self):
        p_nrm, p_adv = sep_class_probabilities(0.05, 0.2, 3.0)
        assert p_nrm == pytest.approx(0.03125)
        assert p_adv == pytest.approx(0.125)
        assert sep_class_probabilities(0.05, 0.4, 0.0) == pytest.approx((0.05, 0.05))

    def test_sep_weighted_mean_is_p_opt(self):
        p_nrm, p_adv = sep_class_probabilities(0.05, 0.3, 2.5)
        assert 0.7 * p_nrm + 0.3 * p_adv == pytest.approx(0.05)

    def test_sep_per_class_rotation(self):
        assert sep_thresholds(_ctx(r=0, is_advanced=True), 0.2, 3.0) == pytest.approx(0.125)
        assert sep_thresholds(_ctx(r=0, is_advanced=False), 0.2, 3.0) == pytest.approx(0.03125)
        # head in round 6: a new 8-round epoch for advanced nodes, still inside the 32-round one for normal nodes
        assert sep_thresholds(_ctx(r=9, since=3, is_advanced=True), 0.2, 3.0) == pytest.approx(0.125 / 0.875)
        assert sep_thresholds(_ctx(r=9, since=3, is_advanced=False), 0.2, 3.0) == 0.0

    def test_sep_needs_node_class(self):
        with pytest.raises(ValueError):
            sep_thresholds(_ctx(), 0.2, 3.0)

    def test_sep_m_base_probability(self):
        gv = GlobalView(total_residual=0.0, alive_count=2, total_initial=4.0)
        assert sep_m_base_probability(_ctx(e_init=3.0, gv=gv)) == pytest.approx(0.075)
        assert sep_m_base_probability(_ctx(e_init=1.0, gv=gv)) == pytest.approx(0.025)

    def test_sep_m_rotates(self):
        gv = GlobalView(total_residual=0.0, alive_count=2, total_initial=4.0)
        assert sep_m_threshold(_ctx(r=0, e_init=3.0, gv=gv)) == pytest.approx(0.075)
        # base 0.075 rotates every 14 rounds
        assert sep_m_threshold(_ctx(r=2, since=2, e_init=3.0, gv=gv)) == 0.0
        assert sep_m_threshold(_ctx(r=16, since=3, e_init=3.0, gv=gv)) == pytest.approx(0.075 / 0.85)
        with pytest.raises(ValueError):
            sep_m_threshold(_ctx(e_init=3.0))

    def test_sep_m_uniform_energies(self):
        gv = GlobalView(total_residual=0.0, alive_count=5, total_initial=10.0)
        assert sep_m_base_probability(_ctx(e_init=2.0, gv=gv)) == pytest.approx(0.05)


class TestElect:
    """Test the Bernoulli draw"""

    def test_bounds(self):
        rng = SeededRNG(1)
        assert not any(elect(0.0, rng) for _ in range(1000))
        assert all(elect(1.0, rng) for _ in range(1000))

    def test_empirical_rate(self):
        rng = SeededRNG(12345)
        hits = sum(elect(0.05, rng) for _ in range(1_000_000))
        assert hits / 1_000_000 == pytest.approx(0.05, abs=0.001)

    def test_consumes_one_draw(self):
        a, b = SeededRNG(8), SeededRNG(8)
        elect(0.0, a)
        b.random()
        assert a.random() == b.random()

    @pytest.mark.parametrize("threshold", [-0.01, 1.01])
    def test_rejects_out_of_range(self, threshold):
        with pytest.raises(ValueError):
            elect(threshold, SeededRNG(1))


class TestProtocolFactory:
    """Test protocol construction"""

    @pytest.mark.parametrize(
        "name, cls",
        [
            (ProtocolName.LEACH, LeachProtocol),
            (ProtocolName.LEACH_E, LeachEProtocol),
            (ProtocolName.SEP_M, SepMProtocol),
            (ProtocolName.BECC, BeccProtocol),
        ],
    )
    def test_make_protocol(self, name, cls):
        protocol = make_protocol(name, 0.05, MultiLevelSpec())
        assert isinstance(protocol, cls)
        assert protocol.name is name

    def test_make_sep(self):
        protocol = make_protocol("sep", 0.05, TwoLevelSpec(lam=0.3, alpha=2.0))
        assert isinstance(protocol, SepProtocol)
        assert (protocol.lam, protocol.alpha) == (0.3, 2.0)

    def test_sep_rejects_multi_level(self):
        with pytest.raises(ValueError):
            make_protocol(ProtocolName.SEP, 0.05, MultiLevelSpec())

    def test_rejects_unknown_name(self):
        with pytest.raises(ValueError):
            make_protocol("heed", 0.05, MultiLevelSpec())

    def test_becc_starts_at_p_opt(self):
        protocol = BeccProtocol(0.05)
        assert protocol.threshold(_ctx()) == pytest.approx(0.05)
