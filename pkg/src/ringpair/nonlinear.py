"""Nonlinear overlap of four resonant fields in the shared coupler.

The figure of merit J multiplies four field-enhancement factors (two
pump fields of ring 1, two generated fields of ring 2), the material
factor chi3_bar / (n_bar^4 * area_eff), and a spatial factor: the
integral over the coupler length of the product of asymptotic-field
amplitudes, with the phase-mismatch factor exp(i * delta_k * z).

Two independent routes compute J:

* :func:`j_quadrature` evaluates the amplitude products numerically
  with adaptive panel integration;
* :func:`j_closed_form` uses the analytic result that at a linear null
  (L = m*pi/|kappa|) and perfect phase matching the spatial integral
  has magnitude L/4, times a four-Lorentzian detuning factor.

Their magnitudes agree to the quadrature tolerance; the overall phase
of J is convention dependent (only |J| and |J|^2 enter rates), so
comparisons are made on magnitudes.

J is reported in model units of 1/V^2 * m: the chi3 normalization
constants that would convert it to a fully dimensioned interaction
energy are hardware calibration factors, handled by the rate
calibration in :mod:`ringpair.sfwm`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import AssumptionViolated, ApproximationWarning
from .geometry import DeviceSpec, Resonance, device_combs, wavevector
from .enhancement import lorentzian_response, peak_amplitude
from .quadrature import integrate_adaptive

PUMP_Q_MISMATCH_LIMIT = 0.10
PHASE_MISMATCH_LIMIT = np.pi / 10.0
DETUNING_WINDOW_LINEWIDTHS = 20.0


def _assume(condition: bool, message: str, strict: bool, log: list[str]) -> None:
    """Record an assumption check; warn in lenient mode, raise in strict."""
    if condition:
        return
    if strict:
        raise AssumptionViolated(message)
    warnings.warn(message, ApproximationWarning, stacklevel=3)
    log.append(message)


@dataclass(frozen=True)
class ProcessConfig:
    """One four-wave mixing configuration.

    Frequencies 1 and 2 are the generated (output-side) fields, 3 and 4
    the pump (input-side) fields. Energy bookkeeping of specific
    processes is the caller's business; this type only fixes which
    resonance each field rides on.
    """

    omega1: float
    omega2: float
    omega3: float
    omega4: float
    res_p1: Resonance
    res_p2: Resonance
    res_s: Resonance
    delta_k: float = 0.0

    def __post_init__(self) -> None:
        for name, w in (
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("omega3", self.omega3),
            ("omega4", self.omega4),
        ):
            if w <= 0.0:
                raise ValueError(f"{name} must be positive, got {w}")
        if self.res_p1.owner != 1 or self.res_p2.owner != 1:
            raise ValueError("pump resonances must belong to ring 1")
        if self.res_s.owner != 2:
            raise ValueError("signal resonance must belong to ring 2")

    def detuning_in_linewidths(self) -> tuple[float, float, float, float]:
        """(omega_i - center) / linewidth for each of the four fields."""
        pairs = (
            (self.omega1, self.res_s),
            (self.omega2, self.res_s),
            (self.omega3, self.res_p1),
            (self.omega4, self.res_p2),
        )
        return tuple(abs(w - r.omega0) / r.linewidth for w, r in pairs)


@dataclass(frozen=True)
class OverlapResult:
    """Overlap figure J with its factor breakdown."""

    j_value: complex
    z_factor: complex
    enhancement_product: complex
    method: str
    warnings: tuple[str, ...] = ()

    @property
    def j_abs(self) -> float:
        return abs(self.j_value)


def enhancement_factor(cfg: ProcessConfig) -> complex:
    """Four-Lorentzian detuning factor of the process.

    Product of the unit-peak line shapes of the two pump resonances
    (evaluated at omega3, omega4) and the signal resonance (evaluated
    at omega1 and omega2). Magnitude is at most 1, with equality only
    when all four fields sit exactly on their centers; on resonance
    each factor contributes -i, so the product is (-i)^4 = 1.
    """
    return complex(
        lorentzian_response(cfg.res_p1, cfg.omega3)
        * lorentzian_response(cfg.res_p2, cfg.omega4)
        * lorentzian_response(cfg.res_s, cfg.omega1)
        * lorentzian_response(cfg.res_s, cfg.omega2)
    )


def z_overlap_integral(
    kappa: complex,
    length: float,
    delta_k: float = 0.0,
    abs_tol: float | None = None,
) -> complex:
    """Spatial overlap integral over the coupler region.

    Integrates the summed product of squared input-port and squared
    output-port amplitudes (one term per coupler guide) against
    exp(i * delta_k * z) from 0 to ``length``.

    At a linear null (length = m*pi/|kappa|) and delta_k = 0 the result
    has magnitude length/4. The default absolute tolerance is
    1e-12 * length.

    Returns
    -------
    complex
        The integral [m]; magnitude and phase are both meaningful here,
        but note the phase contains twice the coupling phase.
    """
    if length <= 0.0:
        raise ValueError(f"length must be positive, got {length}")
    kappa = complex(kappa)
    if abs_tol is None:
        abs_tol = 1e-12 * length
    mag = abs(kappa)
    phase = float(np.angle(kappa)) if mag > 0.0 else 0.0

    def integrand(z: np.ndarray) -> np.ndarray:
        return kernels.dc_overlap_integrand(z, mag, phase, delta_k)

    value, _err = integrate_adaptive(integrand, 0.0, length, abs_tol=abs_tol)
    return value


def _material_factor(device: DeviceSpec) -> float:
    wg = device.waveguide
    if wg.chi3_bar == 0.0:
        raise ValueError("device waveguide has chi3_bar = 0; the overlap would be zero")
    return wg.chi3_bar / (wg.n_bar**4 * wg.area_eff)


def j_quadrature(device: DeviceSpec, cfg: ProcessConfig, strict: bool = False) -> OverlapResult:
    """Overlap figure J by numeric integration of the coupler fields.

    The four enhancement factors are evaluated at the configured
    frequencies, the spatial integral is done adaptively with the
    device's coupler strength and the configured phase mismatch.

    In strict mode assumption violations raise
    :class:`ringpair.errors.AssumptionViolated`; in lenient mode (the
    default) they warn and are recorded on the result.
    """
    log: list[str] = []
    detunings = cfg.detuning_in_linewidths()
    _assume(
        max(detunings) <= DETUNING_WINDOW_LINEWIDTHS,
        f"a field is {max(detunings):.1f} linewidths from its resonance; the "
        "Lorentzian enhancement model is a near-resonance approximation",
        strict,
        log,
    )

    wg = device.waveguide
    f3 = peak_amplitude(cfg.res_p1, wg, device.ring1) * lorentzian_response(cfg.res_p1, cfg.omega3)
    f4 = peak_amplitude(cfg.res_p2, wg, device.ring1) * lorentzian_response(cfg.res_p2, cfg.omega4)
    f1 = peak_amplitude(cfg.res_s, wg, device.ring2) * lorentzian_response(cfg.res_s, cfg.omega1)
    f2 = peak_amplitude(cfg.res_s, wg, device.ring2) * lorentzian_response(cfg.res_s, cfg.omega2)

    z_factor = z_overlap_integral(device.kappa, device.dc_length, cfg.delta_k)
    j = f3 * f4 * f1 * f2 * _material_factor(device) * z_factor
    return OverlapResult(
        j_value=complex(j),
        z_factor=z_factor,
        enhancement_product=enhancement_factor(cfg),
        method="quadrature",
        warnings=tuple(log),
    )


def _closed_form_parts(
    device: DeviceSpec, cfg: ProcessConfig, strict: bool, log: list[str]
) -> tuple[float, float]:
    """Prefactor of the analytic J and the material factor.

    Uses geometric means of the two pump-resonance quality factors, so
    the expression stays exact when they differ; the stated closed form
    assumes they are equal, hence the 10 percent check.
    """
    q_rel = abs(cfg.res_p1.q_loaded - cfg.res_p2.q_loaded) / max(
        cfg.res_p1.q_loaded, cfg.res_p2.q_loaded
    )
    _assume(
        q_rel <= PUMP_Q_MISMATCH_LIMIT,
        f"pump quality factors differ by {q_rel:.1%}; the closed form assumes "
        "nearly equal pump linewidths",
        strict,
        log,
    )
    wg = device.waveguide
    q_p = float(np.sqrt(cfg.res_p1.q_loaded * cfg.res_p2.q_loaded))
    q_cp = float(np.sqrt(cfg.res_p1.q_coupling * cfg.res_p2.q_coupling))
    q_s = cfg.res_s.q_loaded
    l1 = device.ring1.round_trip_length
    l2 = device.ring2.round_trip_length
    omega_s = cfg.res_s.omega0
    omega_p_geo = float(np.sqrt(cfg.res_p1.omega0 * cfg.res_p2.omega0))
    pref = (
        16.0
        * wg.v_g**2
        * q_p
        * q_s
        / (l1 * l2 * omega_s * omega_p_geo)
        * (q_p * q_s)
        / (q_cp * cfg.res_s.q_coupling)
    )
    return pref, _material_factor(device)


def j_closed_form(device: DeviceSpec, cfg: ProcessConfig, strict: bool = False) -> OverlapResult:
    """Overlap figure J from the analytic null-length result.

    Valid when the coupler sits at a linear null and the phase mismatch
    is small (|delta_k| * L below pi/10); outside that regime the
    function still evaluates but flags the assumption.
    """
    log: list[str] = []
    _assume(
        abs(cfg.delta_k) * device.dc_length <= PHASE_MISMATCH_LIMIT,
        f"|delta_k| * L = {abs(cfg.delta_k) * device.dc_length:.3g} rad exceeds the "
        "small-mismatch regime of the closed form",
        strict,
        log,
    )
    pref, material = _closed_form_parts(device, cfg, strict, log)
    z_factor = complex(device.dc_length / 4.0)
    enh = enhancement_factor(cfg)
    j = pref * material * z_factor * enh
    return OverlapResult(
        j_value=complex(j),
        z_factor=z_factor,
        enhancement_product=enh,
        method="closed_form",
        warnings=tuple(log),
    )


def j_single_ring_baseline(
    device: DeviceSpec, cfg: ProcessConfig, strict: bool = False
) -> OverlapResult:
    """J of the single-ring reference device of equivalent length.

    The reference is one ring whose round trip equals the geometric
    mean of the two racetrack lengths, with the full round trip acting
    as the interaction region (spatial factor L_rt instead of L/4).
    """
    log: list[str] = []
    l1 = device.ring1.round_trip_length
    l2 = device.ring2.round_trip_length
    _assume(
        abs(l1 - l2) <= 0.01 * max(l1, l2),
        f"ring lengths differ by {abs(l1 - l2) / max(l1, l2):.1%}; the single-ring "
        "comparison assumes nearly equal round trips",
        strict,
        log,
    )
    pref, material = _closed_form_parts(device, cfg, strict, log)
    l_mean = float(np.sqrt(l1 * l2))
    enh = enhancement_factor(cfg)
    j = pref * material * l_mean * enh
    return OverlapResult(
        j_value=complex(j),
        z_factor=complex(l_mean),
        enhancement_product=enh,
        method="single_ring_baseline",
        warnings=tuple(log),
    )


def j_single_ring_ratio(device: DeviceSpec, cfg: ProcessConfig, strict: bool = False) -> float:
    """|J| of this device over |J| of the single-ring reference.

    Equals dc_length / (4 * L_rt) for equal ring lengths: the price of
    linear uncoupling is that only the coupler straight contributes to
    the overlap, with an extra 1/4 from the amplitude beat. At the
    bend-limited optimum (coupler length pi*R, round trip 4*pi*R) the
    ratio is 1/16.
    """
    j_dev = j_closed_form(device, cfg, strict=strict)
    j_ref = j_single_ring_baseline(device, cfg, strict=strict)
    return j_dev.j_abs / j_ref.j_abs


def resonant_config(
    device: DeviceSpec,
    band: tuple[float, float],
    pump_separation: int = 2,
) -> ProcessConfig:
    """Build the on-resonance dual-pump configuration over a band.

    Picks the ring-2 line closest to the band center as the signal,
    then the ring-1 line pair ``pump_separation`` orders apart whose
    midpoint lies closest to the signal. All four frequencies are set
    to their resonance centers and the phase mismatch is evaluated from
    the dispersion model.
    """
    if pump_separation < 1:
        raise ValueError(f"pump_separation must be at least 1, got {pump_separation}")
    comb1, comb2 = device_combs(device, band)
    center = 0.5 * (band[0] + band[1])
    res_s = min(comb2, key=lambda r: abs(r.omega0 - center))
    if len(comb1) <= pump_separation:
        raise ValueError(
            f"band holds only {len(comb1)} ring-1 lines; need at least "
            f"{pump_separation + 1} for the requested pump separation"
        )
    best = min(
        range(len(comb1) - pump_separation),
        key=lambda i: abs(
            0.5 * (comb1[i].omega0 + comb1[i + pump_separation].omega0) - res_s.omega0
        ),
    )
    res_p2 = comb1[best]
    res_p1 = comb1[best + pump_separation]
    wg = device.waveguide
    delta_k = float(
        wavevector(wg, res_p1.omega0)
        + wavevector(wg, res_p2.omega0)
        - 2.0 * wavevector(wg, res_s.omega0)
    )
    return ProcessConfig(
        omega1=res_s.omega0,
        omega2=res_s.omega0,
        omega3=res_p1.omega0,
        omega4=res_p2.omega0,
        res_p1=res_p1,
        res_p2=res_p2,
        res_s=res_s,
        delta_k=delta_k,
    )
