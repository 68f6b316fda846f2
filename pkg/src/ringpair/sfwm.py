"""Photon-pair generation rates and side-band noise suppression.

The dual-pump process puts both generated photons on the ring-2 signal
line. Its parasitic companions are single-pump processes that put one
photon on the signal line and one on a neighboring ring-2 line; they
are only allowed to the extent that the comb provides a partner line at
the energy-conserving frequency. The detuning delta of that partner
line from the energy-conservation point controls the noise:

    rate(delta) / rate(0) = fwhm^2 / (delta^2 + fwhm^2).

Absolute rates follow the spectral-integral form

    |beta|^2 = |alpha|^4 * (hbar * w_s)^2 / T * 9 pi^3 / (2 eps0^2)
               * K / v_g^4 * (2 / (1 - sigma))^4
               * Integral du (2 w_s - w) w * Lor(u) * Lor(u + delta),

with w = w_s2 - u. The line-shape integral has the closed form
(pi/4) * fwhm^3 / (delta^2 + fwhm^2); the numeric route keeps the
slowly varying (2 w_s - w) w factor instead of freezing it at the line
centers. K is a hardware calibration constant: it absorbs the chi3
normalization this model does not carry, and is fixed by anchoring one
measured (or targeted) rate with :func:`calibrate_kcal`. Ratios and
suppressions never depend on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import epsilon_0, hbar

from . import kernels
from .errors import MissingResonance, NonPhysical
from .geometry import DeviceSpec, Resonance, finesse as ring_finesse, resonance_comb
from .nonlinear import ProcessConfig
from .quadrature import integrate_adaptive

INTEGRATION_WINDOW_LINEWIDTHS = 50.0


@dataclass(frozen=True)
class PumpDrive:
    """Pump excitation of ring 1.

    Parameters
    ----------
    photon_number : float
        Mean photon number |alpha|^2 per pump pulse.
    pulse_duration : float
        Pulse (or integration window) duration T [s].
    self_coupling : float or None
        Bus self-coupling coefficient sigma of the pump coupler. When
        None, rate calculations derive it from the ring finesse via
        (1 - sigma) = pi / finesse and flag that choice.
    """

    photon_number: float
    pulse_duration: float
    self_coupling: float | None = None

    def __post_init__(self) -> None:
        if self.photon_number < 0.0:
            raise ValueError(f"photon_number must be non-negative, got {self.photon_number}")
        if self.pulse_duration <= 0.0:
            raise ValueError(f"pulse_duration must be positive, got {self.pulse_duration}")
        if self.self_coupling is not None and not 0.0 < self.self_coupling < 1.0:
            raise ValueError(
                f"self_coupling must lie strictly between 0 and 1, got {self.self_coupling}"
            )


@dataclass(frozen=True)
class PairRateReport:
    """Signal and parasitic pair rates of one configuration.

    Rates are per pulse (dimensionless |beta|^2). ``per_second``
    converts using the drive's pulse duration. Tuple entries are
    ordered (pump-1 process, pump-2 process).
    """

    beta_sq_signal: float
    beta_sq_parasitic: tuple[float, float]
    suppression: tuple[float, float]
    snr_improvement: tuple[float, float]
    detuning_delta: tuple[float, float]
    kcal: float
    sigma: float
    pulse_duration: float
    notes: tuple[str, ...] = ()

    def per_second(self, beta_sq: float) -> float:
        return beta_sq / self.pulse_duration


def suppression_factor(delta: float, linewidth: float) -> float:
    """Parasitic-rate suppression fwhm^2 / (delta^2 + fwhm^2)."""
    if linewidth <= 0.0:
        raise ValueError(f"linewidth must be positive, got {linewidth}")
    return linewidth**2 / (delta**2 + linewidth**2)


def sigma_from_finesse(fin: float) -> float:
    """High-finesse estimate of the bus self-coupling, 1 - pi/finesse."""
    if fin <= math.pi:
        raise NonPhysical(
            f"finesse {fin:.3g} is too low for the high-finesse self-coupling estimate"
        )
    return 1.0 - math.pi / fin


def _partner_line(
    signal_comb: list[Resonance] | tuple[Resonance, ...],
    cfg: ProcessConfig,
    pump: int,
) -> tuple[float, Resonance]:
    """Energy mismatch and partner line of one single-pump process."""
    if pump == 1:
        omega_p = cfg.res_p1.omega0
    elif pump == 2:
        omega_p = cfg.res_p2.omega0
    else:
        raise ValueError(f"pump must be 1 or 2, got {pump}")
    omega_s = cfg.res_s.omega0
    target = 2.0 * omega_p - omega_s

    candidates = [r for r in signal_comb if abs(r.omega0 - omega_s) > 1e-9 * omega_s]
    if not candidates:
        raise MissingResonance("the signal comb holds no line besides the signal itself")
    if len(signal_comb) >= 2:
        freqs = sorted(r.omega0 for r in signal_comb)
        spacing = max(b - a for a, b in zip(freqs, freqs[1:]))
    else:
        spacing = abs(target - omega_s)
    partner = min(candidates, key=lambda r: abs(r.omega0 - target))
    delta = target - partner.omega0
    if abs(delta) > 0.6 * spacing:
        raise MissingResonance(
            f"no comb line brackets the side-band point at {target:.6e} rad/s; "
            "widen the band so the adjacent lines are included"
        )
    return delta, partner


def sideband_detuning(
    signal_comb: list[Resonance] | tuple[Resonance, ...],
    cfg: ProcessConfig,
    pump: int = 1,
) -> float:
    """Energy mismatch of the single-pump side-band process [rad/s].

    delta = 2 * omega_pump - omega_signal - omega_partner, where the
    partner is the signal-comb line closest to the energy-conserving
    point 2 * omega_pump - omega_signal (the signal line itself is
    excluded). For the symmetric arrangement with the pumps straddling
    the signal, the partner of pump 1 is the line directly above the
    signal and the partner of pump 2 the line directly below.

    A rigid displacement of the partner line moves delta one-to-one;
    two aligned combs with matching spacing give delta = 0.

    Raises
    ------
    MissingResonance
        If the comb does not bracket the energy-conserving point.
    """
    delta, _partner = _partner_line(signal_comb, cfg, pump)
    return delta


def pair_rate_integral(
    drive: PumpDrive,
    res_s: Resonance,
    delta: float,
    kcal: float,
    v_g: float,
    omega_s2: float | None = None,
    fin: float | None = None,
) -> float:
    """Pairs per pulse of one process by numeric spectral integration.

    Integrates the two-line-shape kernel over a window extending 50
    linewidths beyond both line centers (u = 0 and u = -delta), keeping
    the slowly varying (2 w_s - w) w factor.

    Parameters
    ----------
    drive : PumpDrive
    res_s : Resonance
        The signal line; sets omega_s and the linewidth.
    delta : float
        Energy mismatch of the process [rad/s].
    kcal : float
        Hardware calibration constant from :func:`calibrate_kcal`.
    v_g : float
        Group velocity [m/s].
    omega_s2 : float, optional
        Center of the partner line [rad/s]; defaults to the signal
        center, which is exact for the degenerate dual-pump process and
        a sub-0.1 percent approximation for its neighbors.
    fin : float, optional
        Ring finesse; only needed when the drive does not carry an
        explicit self-coupling.
    """
    if kcal <= 0.0:
        raise NonPhysical(f"kcal must be positive, got {kcal}")
    if v_g <= 0.0:
        raise ValueError(f"v_g must be positive, got {v_g}")
    sigma = drive.self_coupling
    if sigma is None:
        if fin is None:
            raise ValueError("either drive.self_coupling or a finesse must be provided")
        sigma = sigma_from_finesse(fin)

    omega_s = res_s.omega0
    fwhm = res_s.linewidth
    if fwhm >= 0.01 * omega_s:
        raise NonPhysical(
            f"linewidth {fwhm:.3g} rad/s is not small against the line center; "
            "the narrow-resonance spectral model does not apply"
        )
    if omega_s2 is None:
        omega_s2 = omega_s
    omega_p = 2.0 * omega_s - omega_s2 - delta
    if omega_p <= 0.0 or omega_s2 <= 0.0:
        raise NonPhysical("process frequencies are not positive; check delta and omega_s2")

    lo = min(0.0, -delta) - INTEGRATION_WINDOW_LINEWIDTHS * fwhm
    hi = max(0.0, -delta) + INTEGRATION_WINDOW_LINEWIDTHS * fwhm

    def integrand(u: np.ndarray) -> np.ndarray:
        return kernels.pair_kernel(u, delta, fwhm, omega_s, omega_s2)

    value, _err = integrate_adaptive(integrand, lo, hi, abs_tol=1e-10 * fwhm)
    spectral = float(value.real) * omega_s2 * omega_p

    pref = (
        drive.photon_number**2
        * (hbar * omega_s) ** 2
        / drive.pulse_duration
        * 9.0
        * math.pi**3
        / (2.0 * epsilon_0**2)
        * kcal
        / v_g**4
        * (2.0 / (1.0 - sigma)) ** 4
    )
    return pref * spectral


def pair_rate_closed_form(
    drive: PumpDrive,
    res_s: Resonance,
    delta: float,
    kcal: float,
    v_g: float,
    omega_s2: float | None = None,
    fin: float | None = None,
) -> float:
    """Pairs per pulse with the line-shape integral done analytically.

    Freezes the slowly varying factor at the line centers; the ratio to
    :func:`pair_rate_integral` differs from 1 by the retained-factor
    correction (well under a percent for narrow lines).
    """
    if kcal <= 0.0:
        raise NonPhysical(f"kcal must be positive, got {kcal}")
    sigma = drive.self_coupling
    if sigma is None:
        if fin is None:
            raise ValueError("either drive.self_coupling or a finesse must be provided")
        sigma = sigma_from_finesse(fin)
    omega_s = res_s.omega0
    fwhm = res_s.linewidth
    if omega_s2 is None:
        omega_s2 = omega_s
    omega_p = 2.0 * omega_s - omega_s2 - delta
    spectral = (math.pi / 4.0) * fwhm**3 / (delta**2 + fwhm**2) * omega_s2 * omega_p
    pref = (
        drive.photon_number**2
        * (hbar * omega_s) ** 2
        / drive.pulse_duration
        * 9.0
        * math.pi**3
        / (2.0 * epsilon_0**2)
        * kcal
        / v_g**4
        * (2.0 / (1.0 - sigma)) ** 4
    )
    return pref * spectral


def noise_budget(
    device: DeviceSpec,
    drive: PumpDrive,
    cfg: ProcessConfig,
    kcal: float = 1.0,
    band: tuple[float, float] | None = None,
) -> PairRateReport:
    """Signal rate, both parasitic rates, and their suppressions.

    The signal process runs at the residual mismatch of the tuned
    device (zero when energy conservation holds exactly); each
    parasitic process runs at its comb detuning from
    :func:`sideband_detuning`, using the actual partner line as the
    second center.

    ``band`` widens or narrows the comb search window; the default
    covers the pumps plus two extra lines on each side.
    """
    notes: list[str] = []
    wg = device.waveguide
    omega_s = cfg.res_s.omega0

    sigma = drive.self_coupling
    if sigma is None:
        fin1 = ring_finesse(device.ring1, wg, cfg.res_p1.omega0)
        sigma = sigma_from_finesse(fin1)
        notes.append(
            "self_coupling derived from ring-1 finesse via (1 - sigma) = pi / finesse; "
            "override PumpDrive.self_coupling to pin it"
        )
    drive_resolved = PumpDrive(
        photon_number=drive.photon_number,
        pulse_duration=drive.pulse_duration,
        self_coupling=sigma,
    )

    if band is None:
        span = abs(cfg.res_p1.omega0 - cfg.res_p2.omega0) + 2.5 * ring_finesse(
            device.ring2, wg, omega_s
        ) * cfg.res_s.linewidth
        band = (omega_s - span, omega_s + span)
    comb2 = resonance_comb(device.ring2, wg, band, owner=2)

    delta_signal = cfg.omega3 + cfg.omega4 - 2.0 * omega_s
    beta_signal = pair_rate_integral(
        drive_resolved, cfg.res_s, delta_signal, kcal, wg.v_g, omega_s2=omega_s
    )

    deltas: list[float] = []
    betas: list[float] = []
    sups: list[float] = []
    for pump in (1, 2):
        delta, partner = _partner_line(comb2, cfg, pump)
        beta = pair_rate_integral(
            drive_resolved, cfg.res_s, delta, kcal, wg.v_g, omega_s2=partner.omega0
        )
        deltas.append(delta)
        betas.append(beta)
        sups.append(suppression_factor(delta, cfg.res_s.linewidth))

    if kcal == 1.0:
        notes.append("kcal = 1 (uncalibrated); absolute rates are in model units")

    return PairRateReport(
        beta_sq_signal=beta_signal,
        beta_sq_parasitic=(betas[0], betas[1]),
        suppression=(sups[0], sups[1]),
        snr_improvement=(1.0 / sups[0], 1.0 / sups[1]),
        detuning_delta=(deltas[0], deltas[1]),
        kcal=kcal,
        sigma=sigma,
        pulse_duration=drive.pulse_duration,
        notes=tuple(notes),
    )


def calibrate_kcal(
    device: DeviceSpec,
    target_rate: float,
    pump_power: float,
    cfg: ProcessConfig,
    pulse_duration: float = 1e-9,
) -> float:
    """Calibration constant reproducing a target pair rate.

    Anchors K so that the dual-pump signal process of ``cfg`` produces
    ``target_rate`` pairs per second at the given per-pump power. The
    pulse duration drops out of the per-second rate (the photon number
    scales with T and the per-pulse rate is divided by T), so its value
    is arbitrary.

    Raises
    ------
    NonPhysical
        If the target rate or pump power is not positive.
    """
    if target_rate <= 0.0:
        raise NonPhysical(f"target_rate must be positive, got {target_rate}")
    if pump_power <= 0.0:
        raise NonPhysical(f"pump_power must be positive, got {pump_power}")
    wg = device.waveguide
    omega_p = 0.5 * (cfg.res_p1.omega0 + cfg.res_p2.omega0)
    photon_number = pump_power * pulse_duration / (hbar * omega_p)
    fin1 = ring_finesse(device.ring1, wg, cfg.res_p1.omega0)
    drive = PumpDrive(
        photon_number=photon_number,
        pulse_duration=pulse_duration,
        self_coupling=sigma_from_finesse(fin1),
    )
    delta_signal = cfg.omega3 + cfg.omega4 - 2.0 * cfg.res_s.omega0
    beta_unit = pair_rate_integral(
        drive, cfg.res_s, delta_signal, 1.0, wg.v_g, omega_s2=cfg.res_s.omega0
    )
    rate_unit = beta_unit / pulse_duration
    if rate_unit <= 0.0:
        raise NonPhysical("the device produces no pairs at unit calibration")
    return target_rate / rate_unit
