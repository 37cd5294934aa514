"""Detection-statistics tests for all supported input classes."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nwaybs.quantum import (
    InputState,
    correlation_curve,
    g2_dual_coherent,
    g2_multiphoton,
    g2_photon_pair,
    g2_squeezed_full,
    multiphoton_ratio_model,
    multiphoton_scaling_curve,
    pair_coincidence,
    singles,
)
from nwaybs.transfer import TransferMatrix, ideal_transfer, p_coeff, q_coeff

PHI_GRID = np.linspace(0.0, 2 * math.pi / 3, 97)
TRITTER = 2 * math.pi / 9


class TestInputState:
    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            InputState(kind="laser", modes=(1,))

    def test_mode_count_enforced(self):
        with pytest.raises(ValueError):
            InputState(kind="photon_pair", modes=(1,))
        with pytest.raises(ValueError):
            InputState(kind="single_coherent", modes=(1, 2))

    def test_duplicate_modes(self):
        with pytest.raises(ValueError):
            InputState(kind="photon_pair", modes=(2, 2))

    def test_transmission_range(self):
        with pytest.raises(ValueError):
            InputState(kind="squeezed_vacuum", modes=(1, 3), zeta=0.4,
                       pre_loss=(0.0, 1.0, 1.0))


class TestSingles:
    def test_photon_pair_identity(self):
        s = singles(InputState(kind="photon_pair", modes=(1, 3)), ideal_transfer(3, 0.0))
        assert np.allclose(s, [1, 0, 1], atol=1e-15)

    def test_dual_table_forms(self):
        state = InputState(kind="dual_coherent", modes=(1, 3), amplitude=1.0)
        for phi in PHI_GRID:
            s = singles(state, ideal_transfer(3, phi))
            q2 = abs(q_coeff(3, phi)) ** 2
            assert s[0] == pytest.approx(1 - q2, abs=1e-12)
            assert s[1] == pytest.approx(2 * q2, abs=1e-12)
            assert s[2] == pytest.approx(s[0], abs=1e-12)

    def test_single_coherent_tritter(self):
        state = InputState(kind="single_coherent", modes=(1,), amplitude=2.0)
        s = singles(state, ideal_transfer(3, TRITTER))
        assert np.allclose(s, 4.0 / 3.0, atol=1e-12)

    def test_single_coherent_max_depletion(self):
        state = InputState(kind="single_coherent", modes=(1,))
        s = singles(state, ideal_transfer(3, math.pi / 3))
        assert np.allclose(s, [1 / 9, 4 / 9, 4 / 9], atol=1e-12)

    def test_pair_equals_phase_averaged_dual(self):
        pair = InputState(kind="photon_pair", modes=(1, 3))
        dual = InputState(kind="dual_coherent", modes=(1, 3))
        for phi in PHI_GRID:
            u = ideal_transfer(3, phi)
            assert np.allclose(singles(pair, u), singles(dual, u), atol=1e-12)

    def test_squeezed_loss_dressing(self):
        state = InputState(kind="squeezed_vacuum", modes=(1, 3), zeta=0.4,
                           pre_loss=(0.9, 1.0, 0.6), post_loss=(0.8, 1.0, 0.7))
        u = ideal_transfer(3, 0.5)
        s = singles(state, u)
        s2 = math.sinh(0.4) ** 2
        expect0 = 0.8**2 * s2 * (
            abs(u.entries[0, 0] * 0.9) ** 2 + abs(u.entries[0, 2] * 0.6) ** 2
        )
        assert s[0] == pytest.approx(expect0, rel=1e-12)

    def test_mode_out_of_range(self):
        state = InputState(kind="photon_pair", modes=(1, 5))
        with pytest.raises(ValueError):
            singles(state, ideal_transfer(3, 0.1))


class TestPairStatistics:
    def test_table_one_forms(self):
        g13, g12 = g2_photon_pair(PHI_GRID)
        p = p_coeff(3, PHI_GRID)
        q = q_coeff(3, PHI_GRID)
        assert np.max(np.abs(g13 - np.abs(p**2 + q**2) ** 2)) < 1e-15
        assert np.max(np.abs(g12 - np.abs(p * q + q**2) ** 2)) < 1e-15

    def test_normalized_at_zero(self):
        g13, g12 = g2_photon_pair(0.0)
        assert g13 == pytest.approx(1.0, abs=1e-15)
        assert g12 == pytest.approx(0.0, abs=1e-15)

    def test_tritter_point(self):
        g13, g12 = g2_photon_pair(TRITTER)
        assert g13 == pytest.approx(1 / 9, abs=1e-12)
        assert g12 == pytest.approx(1 / 9, abs=1e-12)

    def test_quartic_in_cosine_form(self):
        # |p^2+q^2|^2 = (40 c^2 + 28 c + 13)/81 with c = cos(3 phi)
        for phi in PHI_GRID:
            c = math.cos(3 * phi)
            g13, _ = g2_photon_pair(phi)
            assert g13 == pytest.approx((40 * c * c + 28 * c + 13) / 81, abs=1e-12)

    def test_minimum_location_and_value(self):
        phis = np.linspace(0, 2 * math.pi / 3, 400001)
        g13, _ = g2_photon_pair(phis)
        k = int(np.argmin(g13))
        assert g13[k] == pytest.approx(0.1, abs=1e-9)
        assert math.cos(3 * phis[k]) == pytest.approx(-0.35, abs=1e-4)

    def test_hom_null_n2(self):
        u = ideal_transfer(2, math.pi / 4)
        assert pair_coincidence(u, in_modes=(1, 2), ports=(1, 2)) < 1e-24

    def test_symmetry_g12_equals_g23(self):
        state = InputState(kind="photon_pair", modes=(1, 3))
        curve = correlation_curve(state, PHI_GRID)
        assert np.allclose(curve.g2[(1, 2)], curve.g2[(2, 3)], atol=1e-12,
                           equal_nan=True)


class TestDualCoherent:
    def test_closed_form(self):
        vals = g2_dual_coherent(PHI_GRID)
        q2 = np.abs(q_coeff(3, PHI_GRID)) ** 2
        assert np.max(np.abs(vals - (1 - q2) ** 2)) < 1e-15

    def test_reference_points(self):
        assert g2_dual_coherent(0.0) == pytest.approx(1.0)
        assert g2_dual_coherent(TRITTER) == pytest.approx(4 / 9, abs=1e-12)
        assert g2_dual_coherent(math.pi / 3) == pytest.approx(25 / 81, abs=1e-12)

    def test_quantum_below_classical(self):
        phis = np.linspace(1e-3, 2 * math.pi / 3 - 1e-3, 2001)
        g13, _ = g2_photon_pair(phis)
        classical = g2_dual_coherent(phis)
        assert np.all(g13 <= classical + 1e-12)


class TestMultiphoton:
    def test_pair_limit(self):
        vals = g2_multiphoton(PHI_GRID, 0.0)
        g13, _ = g2_photon_pair(PHI_GRID)
        assert np.max(np.abs(vals - g13)) < 1e-15

    def test_unity_at_zero_phase(self):
        for zeta in (0.1, 0.4, 1.0):
            assert g2_multiphoton(0.0, zeta, 0.7, 0.9) == pytest.approx(1.0, abs=1e-12)

    def test_symmetric_loss_tritter_value(self):
        s2 = math.sinh(0.4) ** 2
        expected = 1 / 9 + (4 / 9) * s2 / (1 + 2 * s2)
        got = g2_multiphoton(TRITTER, 0.4)
        assert got == pytest.approx(expected, abs=1e-12)
        assert got == pytest.approx(0.167, abs=5e-3)

    def test_transmission_validation(self):
        with pytest.raises(ValueError):
            g2_multiphoton(0.3, 0.4, t1_alpha=0.0)

    def test_asymmetric_loss_raises_coincidences(self):
        phis = np.linspace(0.05, 2 * math.pi / 3 - 0.05, 101)
        sym = g2_multiphoton(phis, 0.4, 1.0, 1.0)
        asym = g2_multiphoton(phis, 0.4, 0.9, 0.6)
        assert np.all(asym > sym)


class TestSqueezedFull:
    def test_reduces_to_multiphoton_without_loss(self):
        state = InputState(kind="squeezed_vacuum", modes=(1, 3), zeta=0.4)
        for phi in PHI_GRID[::8]:
            full = g2_squeezed_full(state, ideal_transfer(3, phi))
            assert full == pytest.approx(float(g2_multiphoton(phi, 0.4)), rel=1e-12)

    def test_post_loss_cancels_in_normalization(self):
        rng = np.random.default_rng(17)
        base = InputState(kind="squeezed_vacuum", modes=(1, 3), zeta=0.4,
                          pre_loss=(0.9, 1.0, 0.6))
        for _ in range(10):
            t_post = tuple(rng.uniform(0.3, 1.0, 3))
            lossy = InputState(kind="squeezed_vacuum", modes=(1, 3), zeta=0.4,
                               pre_loss=(0.9, 1.0, 0.6), post_loss=t_post)
            for phi in (0.2, 0.6, 1.5):
                u = ideal_transfer(3, phi)
                assert g2_squeezed_full(lossy, u) == pytest.approx(
                    g2_squeezed_full(base, u), abs=1e-12
                )

    def test_pre_loss_matches_multiphoton_formula(self):
        state = InputState(kind="squeezed_vacuum", modes=(1, 3), zeta=0.5,
                           pre_loss=(0.85, 1.0, 0.6))
        for phi in PHI_GRID[::8]:
            full = g2_squeezed_full(state, ideal_transfer(3, phi))
            closed = float(g2_multiphoton(phi, 0.5, 0.85, 0.6))
            assert full == pytest.approx(closed, rel=1e-12)


class TestGlobalAndPumpPhaseInvariance:
    @given(st.floats(0, 2 * math.pi, allow_nan=False),
           st.floats(0.01, 2 * math.pi / 3, allow_nan=False))
    @settings(max_examples=40, deadline=None)
    def test_global_phase_invariance(self, chi, phi):
        u = ideal_transfer(3, phi)
        u_rot = TransferMatrix(entries=u.entries * np.exp(1j * chi), phi=phi)
        for state in (
            InputState(kind="photon_pair", modes=(1, 3)),
            InputState(kind="dual_coherent", modes=(1, 3)),
            InputState(kind="squeezed_vacuum", modes=(1, 3), zeta=0.4),
        ):
            assert np.allclose(singles(state, u), singles(state, u_rot), atol=1e-12)
        assert pair_coincidence(u) == pytest.approx(pair_coincidence(u_rot), abs=1e-12)

    def test_pump_phase_invariance(self):
        # pump phases enter U as diagonal conjugation D* U D
        rng = np.random.default_rng(3)
        for _ in range(10):
            thetas = rng.uniform(0, 2 * math.pi, 3)
            d = np.diag(np.exp(1j * thetas))
            u = ideal_transfer(3, 0.7)
            u_ph = TransferMatrix(entries=d.conj() @ u.entries @ d, phi=0.7)
            for state in (
                InputState(kind="photon_pair", modes=(1, 3)),
                InputState(kind="dual_coherent", modes=(1, 3)),
                InputState(kind="squeezed_vacuum", modes=(1, 3), zeta=0.4),
            ):
                assert np.allclose(singles(state, u), singles(state, u_ph), atol=1e-12)
            assert pair_coincidence(u_ph) == pytest.approx(pair_coincidence(u), abs=1e-12)


class TestScalingCurve:
    def test_small_zeta_power_laws(self):
        zg = np.linspace(0.05, 0.2, 40)
        curve = multiphoton_scaling_curve(zg)
        logs = np.log(curve["sinh2"])
        slope_pair = np.polyfit(logs, np.log(curve["pair"]), 1)[0]
        slope_mult = np.polyfit(logs, np.log(curve["mult"]), 1)[0]
        assert slope_pair == pytest.approx(1.0, abs=0.02)
        assert slope_mult == pytest.approx(2.0, abs=0.05)

    def test_ratio_closed_form(self):
        zg = np.array([0.1, 0.4, 0.9])
        curve = multiphoton_scaling_curve(zg)
        s2 = np.sinh(zg) ** 2
        assert np.allclose(curve["ratio"], s2 / (2 * (1 + s2)), atol=1e-15)
        assert np.allclose(curve["ratio"], multiphoton_ratio_model(s2), atol=1e-15)

    def test_positive_grid_required(self):
        with pytest.raises(ValueError):
            multiphoton_scaling_curve([0.0, 0.1])


class TestCorrelationCurve:
    def test_columns_and_normalization(self):
        state = InputState(kind="photon_pair", modes=(1, 3))
        curve = correlation_curve(state, PHI_GRID)
        assert curve.singles.shape == (len(PHI_GRID), 3)
        assert curve.g2[(1, 3)][0] == pytest.approx(1.0, abs=1e-12)
        g13, g12 = g2_photon_pair(PHI_GRID)
        assert np.allclose(curve.g2[(1, 3)], g13, atol=1e-12)
        assert np.allclose(curve.g2[(1, 2)], g12, atol=1e-12)

    def test_single_coherent_has_no_g2(self):
        state = InputState(kind="single_coherent", modes=(1,))
        curve = correlation_curve(state, PHI_GRID)
        for arr in curve.g2.values():
            assert np.isnan(arr).all()

    def test_dual_matches_closed_form(self):
        state = InputState(kind="dual_coherent", modes=(1, 3))
        curve = correlation_curve(state, PHI_GRID)
        assert np.allclose(curve.g2[(1, 3)], g2_dual_coherent(PHI_GRID), atol=1e-12)
