"""Pair rates, side-band suppression, and the hardware calibration."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.constants import epsilon_0, hbar

from ringpair import (
    MissingResonance,
    NonPhysical,
    ProcessConfig,
    PumpDrive,
    Resonance,
    calibrate_kcal,
    finesse,
    noise_budget,
    pair_rate_closed_form,
    pair_rate_integral,
    resonant_config,
    sideband_detuning,
    sigma_from_finesse,
    suppression_factor,
)
from ringpair import kernels

from conftest import process_band

OMEGA_S = 1.2e15
FWHM = OMEGA_S / 5e4


def signal_line(omega0=OMEGA_S, q=5e4):
    return Resonance(owner=2, order=500, omega0=omega0, q_loaded=q, q_coupling=2.0 * q)


def drive(pn=1.0, t=1e-9, sigma=0.97):
    return PumpDrive(photon_number=pn, pulse_duration=t, self_coupling=sigma)


class TestSuppressionFactor:
    def test_anchor_points(self):
        assert suppression_factor(0.0, FWHM) == 1.0
        assert suppression_factor(FWHM, FWHM) == pytest.approx(0.5, rel=1e-15)
        assert suppression_factor(2.0 * FWHM, FWHM) == pytest.approx(0.2, rel=1e-15)

    def test_one_spectral_range_at_high_finesse(self):
        # Finesse 150: a full spectral range of detuning buys 1/(1+150^2).
        delta = 150.0 * FWHM
        got = suppression_factor(delta, FWHM)
        assert got == pytest.approx(1.0 / (1.0 + 150.0**2), rel=1e-12)
        assert got < 1e-4

    def test_even_and_monotone(self):
        xs = np.linspace(0.0, 20.0, 41)
        vals = [suppression_factor(x * FWHM, FWHM) for x in xs]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert suppression_factor(-3.0 * FWHM, FWHM) == suppression_factor(
            3.0 * FWHM, FWHM
        )

    def test_validation(self):
        with pytest.raises(ValueError):
            suppression_factor(1.0, 0.0)


class TestSigma:
    def test_high_finesse_estimate(self):
        assert sigma_from_finesse(100.0) == pytest.approx(1.0 - math.pi / 100.0, rel=1e-15)

    def test_low_finesse_rejected(self):
        with pytest.raises(NonPhysical):
            sigma_from_finesse(3.0)


class TestPumpDrive:
    def test_validation(self):
        with pytest.raises(ValueError):
            PumpDrive(photon_number=-1.0, pulse_duration=1e-9)
        with pytest.raises(ValueError):
            PumpDrive(photon_number=1.0, pulse_duration=0.0)
        with pytest.raises(ValueError):
            PumpDrive(photon_number=1.0, pulse_duration=1e-9, self_coupling=1.0)


def manual_rate(dr, res, delta, kcal, v_g, omega_s2=None, n=1_000_001):
    """Trapezoid reimplementation of the spectral-integral rate."""
    omega_s = res.omega0
    fwhm = res.linewidth
    if omega_s2 is None:
        omega_s2 = omega_s
    omega_p = 2.0 * omega_s - omega_s2 - delta
    lo = min(0.0, -delta) - 50.0 * fwhm
    hi = max(0.0, -delta) + 50.0 * fwhm
    u = np.linspace(lo, hi, n)
    spectral = np.trapezoid(
        kernels.pair_kernel_numpy(u, delta, fwhm, omega_s, omega_s2), u
    ) * omega_s2 * omega_p
    pref = (
        dr.photon_number**2
        * (hbar * omega_s) ** 2
        / dr.pulse_duration
        * 9.0
        * math.pi**3
        / (2.0 * epsilon_0**2)
        * kcal
        / v_g**4
        * (2.0 / (1.0 - dr.self_coupling)) ** 4
    )
    return pref * spectral


class TestPairRateIntegral:
    @pytest.mark.parametrize("delta_scale", [0.0, 0.5, 1.0, 5.0])
    def test_matches_trapezoid_oracle(self, delta_scale):
        res = signal_line()
        dr = drive(pn=3.0)
        v_g = 7.1e7
        delta = delta_scale * FWHM
        got = pair_rate_integral(dr, res, delta, 2.5, v_g)
        assert got == pytest.approx(manual_rate(dr, res, delta, 2.5, v_g), rel=1e-6)

    def test_zero_mismatch_matches_closed_form(self):
        res = signal_line()
        dr = drive()
        got = pair_rate_integral(dr, res, 0.0, 1.0, 7.1e7)
        ref = pair_rate_closed_form(dr, res, 0.0, 1.0, 7.1e7)
        assert got == pytest.approx(ref, rel=5e-3)

    def test_kernel_integral_is_quarter_pi_linewidth(self):
        # At zero mismatch the joint-line-shape integral is pi*fwhm/4.
        u = np.linspace(-50.0 * FWHM, 50.0 * FWHM, 2_000_001)
        got = np.trapezoid(kernels.pair_kernel_numpy(u, 0.0, FWHM, OMEGA_S, OMEGA_S), u)
        assert got == pytest.approx(math.pi * FWHM / 4.0, rel=5e-3)

    def test_detuning_dependence_is_lorentzian(self):
        res = signal_line()
        dr = drive()
        v_g = 7.1e7
        base = pair_rate_integral(dr, res, 0.0, 1.0, v_g)
        for scale in (0.0, 0.5, 1.0, 5.0, 50.0):
            delta = scale * FWHM
            ratio = pair_rate_integral(dr, res, delta, 1.0, v_g) / base
            expected = FWHM**2 / (delta**2 + FWHM**2)
            assert ratio == pytest.approx(expected, rel=0.01)

    def test_closed_form_formula(self):
        res = signal_line()
        dr = drive(pn=2.0, t=2e-9, sigma=0.96)
        delta = 1.7 * FWHM
        v_g = 7.1e7
        got = pair_rate_closed_form(dr, res, delta, 3.0, v_g)
        spectral = (
            (math.pi / 4.0) * FWHM**3 / (delta**2 + FWHM**2) * OMEGA_S * (OMEGA_S - delta)
        )
        pref = (
            4.0
            * (hbar * OMEGA_S) ** 2
            / 2e-9
            * 9.0
            * math.pi**3
            / (2.0 * epsilon_0**2)
            * 3.0
            / v_g**4
            * (2.0 / 0.04) ** 4
        )
        assert got == pytest.approx(pref * spectral, rel=1e-12)

    def test_quadratic_in_photon_number(self):
        res = signal_line()
        v_g = 7.1e7
        r1 = pair_rate_integral(drive(pn=1.5), res, 0.0, 1.0, v_g)
        r2 = pair_rate_integral(drive(pn=3.0), res, 0.0, 1.0, v_g)
        assert r2 == pytest.approx(4.0 * r1, rel=1e-12)
        assert pair_rate_integral(drive(pn=0.0), res, 0.0, 1.0, v_g) == 0.0

    def test_sigma_can_come_from_finesse(self):
        res = signal_line()
        dr = PumpDrive(photon_number=1.0, pulse_duration=1e-9)
        fin = 120.0
        got = pair_rate_integral(dr, res, 0.0, 1.0, 7.1e7, fin=fin)
        pinned = drive(sigma=sigma_from_finesse(fin))
        assert got == pair_rate_integral(pinned, res, 0.0, 1.0, 7.1e7)
        with pytest.raises(ValueError):
            pair_rate_integral(dr, res, 0.0, 1.0, 7.1e7)

    def test_validation(self):
        res = signal_line()
        with pytest.raises(NonPhysical):
            pair_rate_integral(drive(), res, 0.0, 0.0, 7.1e7)
        with pytest.raises(ValueError):
            pair_rate_integral(drive(), res, 0.0, 1.0, -1.0)
        broad = Resonance(owner=2, order=5, omega0=1e12, q_loaded=50.0, q_coupling=100.0)
        with pytest.raises(NonPhysical):
            pair_rate_integral(drive(), broad, 0.0, 1.0, 7.1e7)


def synth_comb(spacing, n=3, center=OMEGA_S, shift=0.0):
    return [
        Resonance(
            owner=2,
            order=500 + i,
            omega0=center + i * spacing + shift,
            q_loaded=5e4,
            q_coupling=1e5,
        )
        for i in range(-n, n + 1)
    ]


def synth_cfg(pump_spacing, center=OMEGA_S):
    res_s = signal_line(center)
    p1 = Resonance(
        owner=1, order=301, omega0=center + pump_spacing, q_loaded=5e4, q_coupling=1e5
    )
    p2 = Resonance(
        owner=1, order=299, omega0=center - pump_spacing, q_loaded=5e4, q_coupling=1e5
    )
    return ProcessConfig(
        omega1=res_s.omega0,
        omega2=res_s.omega0,
        omega3=p1.omega0,
        omega4=p2.omega0,
        res_p1=p1,
        res_p2=p2,
        res_s=res_s,
    )


class TestSidebandDetuning:
    def test_aligned_combs_conserve_energy(self):
        spacing = 2.4e12
        cfg = synth_cfg(pump_spacing=spacing)
        comb = synth_comb(spacing)
        assert sideband_detuning(comb, cfg, pump=1) == pytest.approx(0.0, abs=1.0)
        assert sideband_detuning(comb, cfg, pump=2) == pytest.approx(0.0, abs=1.0)

    def test_partner_displacement_moves_delta_one_to_one(self):
        spacing = 2.4e12
        cfg = synth_cfg(pump_spacing=spacing)
        base = sideband_detuning(synth_comb(spacing), cfg, pump=1)
        for eps in (1e9, -3e9, 2.4e10):
            shifted = sideband_detuning(synth_comb(spacing, shift=eps), cfg, pump=1)
            assert shifted == pytest.approx(base - eps, abs=1.0)

    def test_partners_straddle_the_signal(self):
        # Pump 1 sits above the signal, so its partner is the line
        # above; pump 2 mirrors below.
        spacing = 2.4e12
        cfg = synth_cfg(pump_spacing=1.3 * spacing)
        comb = synth_comb(spacing)
        d1 = 2.0 * cfg.res_p1.omega0 - cfg.res_s.omega0
        d2 = 2.0 * cfg.res_p2.omega0 - cfg.res_s.omega0
        assert sideband_detuning(comb, cfg, pump=1) == pytest.approx(
            d1 - comb[3 + 3].omega0, abs=1.0
        )
        assert sideband_detuning(comb, cfg, pump=2) == pytest.approx(
            d2 - comb[3 - 3].omega0, abs=1.0
        )

    def test_missing_partner(self):
        spacing = 2.4e12
        cfg = synth_cfg(pump_spacing=5.0 * spacing)  # target beyond the comb
        with pytest.raises(MissingResonance):
            sideband_detuning(synth_comb(spacing), cfg, pump=1)

    def test_lone_signal_line(self):
        spacing = 2.4e12
        cfg = synth_cfg(pump_spacing=spacing)
        with pytest.raises(MissingResonance):
            sideband_detuning([cfg.res_s], cfg, pump=1)

    def test_pump_index_validation(self):
        spacing = 2.4e12
        cfg = synth_cfg(pump_spacing=spacing)
        with pytest.raises(ValueError):
            sideband_detuning(synth_comb(spacing), cfg, pump=3)


class TestNoiseBudget:
    def test_report_structure(self, sample_device):
        cfg = resonant_config(sample_device, process_band(sample_device))
        dr = PumpDrive(photon_number=5e4, pulse_duration=1e-9)
        rep = noise_budget(sample_device, dr, cfg)
        assert rep.beta_sq_signal > 0.0
        assert all(b > 0.0 for b in rep.beta_sq_parasitic)
        assert all(0.0 < s <= 1.0 for s in rep.suppression)
        for s, g in zip(rep.suppression, rep.snr_improvement):
            assert g == pytest.approx(1.0 / s, rel=1e-12)
        assert 0.0 < rep.sigma < 1.0
        assert rep.per_second(rep.beta_sq_signal) == pytest.approx(
            rep.beta_sq_signal / 1e-9, rel=1e-15
        )
        assert any("kcal = 1" in n for n in rep.notes)
        assert any("finesse" in n for n in rep.notes)

    def test_suppression_consistent_with_detunings(self, sample_device):
        cfg = resonant_config(sample_device, process_band(sample_device))
        dr = PumpDrive(photon_number=5e4, pulse_duration=1e-9)
        rep = noise_budget(sample_device, dr, cfg)
        lw = cfg.res_s.linewidth
        for delta, sup in zip(rep.detuning_delta, rep.suppression):
            assert sup == pytest.approx(suppression_factor(delta, lw), rel=1e-12)

    def test_explicit_sigma_skips_the_finesse_note(self, sample_device):
        cfg = resonant_config(sample_device, process_band(sample_device))
        dr = PumpDrive(photon_number=5e4, pulse_duration=1e-9, self_coupling=0.95)
        rep = noise_budget(sample_device, dr, cfg)
        assert rep.sigma == 0.95
        assert not any("finesse" in n for n in rep.notes)

    def test_zero_drive_zero_rates(self, sample_device):
        cfg = resonant_config(sample_device, process_band(sample_device))
        dr = PumpDrive(photon_number=0.0, pulse_duration=1e-9)
        rep = noise_budget(sample_device, dr, cfg)
        assert rep.beta_sq_signal == 0.0
        assert rep.beta_sq_parasitic == (0.0, 0.0)


class TestCalibration:
    def test_round_trip(self, sample_device):
        cfg = resonant_config(sample_device, process_band(sample_device))
        wg = sample_device.waveguide
        target, power = 1e6, 5e-4
        kcal = calibrate_kcal(sample_device, target, power, cfg)
        assert kcal > 0.0
        t = 1e-9
        omega_p = 0.5 * (cfg.res_p1.omega0 + cfg.res_p2.omega0)
        dr = PumpDrive(
            photon_number=power * t / (hbar * omega_p),
            pulse_duration=t,
            self_coupling=sigma_from_finesse(
                finesse(sample_device.ring1, wg, cfg.res_p1.omega0)
            ),
        )
        delta = cfg.omega3 + cfg.omega4 - 2.0 * cfg.res_s.omega0
        rate = pair_rate_integral(dr, cfg.res_s, delta, kcal, wg.v_g) / t
        assert rate == pytest.approx(target, rel=1e-9)

    def test_pulse_duration_drops_out(self, sample_device):
        cfg = resonant_config(sample_device, process_band(sample_device))
        a = calibrate_kcal(sample_device, 1e6, 5e-4, cfg, pulse_duration=1e-9)
        b = calibrate_kcal(sample_device, 1e6, 5e-4, cfg, pulse_duration=3e-8)
        assert b == pytest.approx(a, rel=1e-12)

    def test_quartic_power_law(self, sample_device):
        # The rate scales as the fourth power of the pump amplitude, so
        # the calibration constant falls as power squared.
        cfg = resonant_config(sample_device, process_band(sample_device))
        k1 = calibrate_kcal(sample_device, 1e6, 5e-4, cfg)
        k2 = calibrate_kcal(sample_device, 1e6, 1e-3, cfg)
        assert k2 == pytest.approx(k1 / 4.0, rel=1e-9)
        exponent = math.log(k1 / k2) / math.log(2.0)
        assert exponent == pytest.approx(2.0, abs=1e-9)

    def test_validation(self, sample_device):
        cfg = resonant_config(sample_device, process_band(sample_device))
        with pytest.raises(NonPhysical):
            calibrate_kcal(sample_device, 0.0, 5e-4, cfg)
        with pytest.raises(NonPhysical):
            calibrate_kcal(sample_device, 1e6, -1.0, cfg)
