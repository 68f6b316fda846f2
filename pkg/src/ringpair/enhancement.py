"""Resonant field enhancement inside the racetracks.

Near any resonance the circulating field exceeds the bus field by a
Lorentzian factor

    f(w) = sqrt(4 Q v_g / (L_rt w0)) * sqrt(Q / Q_c)
           * (dw/2) / ((w - w0) + i dw/2),

with dw = w0 / Q the loaded full width at half maximum. On resonance
the magnitude is the square-root prefactor and the phase is -pi/2 per
factor of the Lorentzian.

A spectrum over a band is the per-ring sum of the squared magnitudes
of all in-band resonances. Summing intensities (not amplitudes) is a
deliberate simplification: distinct longitudinal modes are spaced by
many linewidths, so their interference terms are negligible where
either factor is appreciable. Mid-band values are therefore tail sums
and carry no resonant-phase information.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ApproximationWarning
from .geometry import DeviceSpec, Resonance, WaveguideParams, RacetrackSpec, device_combs

ENHANCEMENT_WINDOW_LINEWIDTHS = 20.0


def peak_amplitude(res: Resonance, wg: WaveguideParams, ring: RacetrackSpec) -> float:
    """On-resonance magnitude of the enhancement factor (dimensionless)."""
    pref = 4.0 * res.q_loaded * wg.v_g / (ring.round_trip_length * res.omega0)
    return float(np.sqrt(pref) * np.sqrt(res.q_loaded / res.q_coupling))


def lorentzian_response(res: Resonance, omega) -> np.ndarray | complex:
    """Unit-peak complex line shape (dw/2) / ((w - w0) + i dw/2)."""
    omega = np.asarray(omega, dtype=float)
    hw = 0.5 * res.linewidth
    out = hw / ((omega - res.omega0) + 1j * hw)
    return complex(out) if out.ndim == 0 else out


def field_enhancement(
    res: Resonance, wg: WaveguideParams, ring: RacetrackSpec, omega
) -> np.ndarray | complex:
    """Complex field-enhancement factor of one resonance.

    Parameters
    ----------
    res : Resonance
        The mode being driven.
    wg, ring
        Waveguide and racetrack the mode lives on.
    omega : float or ndarray
        Evaluation frequency [rad/s].

    Returns
    -------
    complex or ndarray
        f(omega); magnitude peaks at the resonance center.

    Warns
    -----
    ApproximationWarning
        When evaluated more than 20 linewidths from the center. The
        single-Lorentzian law is a near-resonance approximation; the
        value is still returned.
    """
    omega_arr = np.asarray(omega, dtype=float)
    detune = np.abs(omega_arr - res.omega0)
    if np.any(detune > ENHANCEMENT_WINDOW_LINEWIDTHS * res.linewidth):
        warnings.warn(
            f"enhancement evaluated {float(np.max(detune)) / res.linewidth:.1f} linewidths "
            f"from the resonance at {res.omega0:.6e} rad/s; the Lorentzian law is a "
            "near-resonance approximation",
            ApproximationWarning,
            stacklevel=2,
        )
    return peak_amplitude(res, wg, ring) * lorentzian_response(res, omega)


@dataclass(frozen=True)
class EnhancementProfile:
    """One resonance's contribution to the intensity spectrum."""

    resonance: Resonance
    peak_amplitude: float

    @property
    def peak_intensity(self) -> float:
        return self.peak_amplitude**2

    def intensity(self, omega) -> np.ndarray | float:
        """|f(omega)|^2 for this resonance alone."""
        omega = np.asarray(omega, dtype=float)
        hw = 0.5 * self.resonance.linewidth
        out = self.peak_intensity * hw**2 / ((omega - self.resonance.omega0) ** 2 + hw**2)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SpectrumResult:
    """Sampled intensity spectra of both rings over a band."""

    omega: np.ndarray
    f1_sq: np.ndarray
    f2_sq: np.ndarray
    comb1: tuple[Resonance, ...]
    comb2: tuple[Resonance, ...]


def ring_profiles(
    device: DeviceSpec, comb: list[Resonance] | tuple[Resonance, ...]
) -> list[EnhancementProfile]:
    """Enhancement profiles for every resonance of one comb."""
    out = []
    for res in comb:
        ring = device.ring(res.owner)
        out.append(
            EnhancementProfile(
                resonance=res, peak_amplitude=peak_amplitude(res, device.waveguide, ring)
            )
        )
    return out


def intensity_spectrum(
    device: DeviceSpec, band: tuple[float, float], n_points: int
) -> SpectrumResult:
    """Intensity-enhancement spectra of both rings on a uniform grid.

    Each ring's column is the sum of |f|^2 over that ring's in-band
    resonances only. Raises :class:`ringpair.errors.EmptyBand` (from
    the comb solver) if either ring has no resonance in the band.
    """
    if n_points < 2:
        raise ValueError(f"n_points must be at least 2, got {n_points}")
    lo, hi = sorted((float(band[0]), float(band[1])))
    comb1, comb2 = device_combs(device, (lo, hi))
    omega = np.linspace(lo, hi, n_points)

    columns = []
    for comb in (comb1, comb2):
        centers = np.array([r.omega0 for r in comb])
        hw = np.array([0.5 * r.linewidth for r in comb])
        peaks = np.array(
            [peak_amplitude(r, device.waveguide, device.ring(r.owner)) ** 2 for r in comb]
        )
        columns.append(kernels.lorentzian_comb(omega, centers, hw, peaks))

    return SpectrumResult(
        omega=omega,
        f1_sq=columns[0],
        f2_sq=columns[1],
        comb1=tuple(comb1),
        comb2=tuple(comb2),
    )


def spectrum_to_csv(result: SpectrumResult) -> str:
    """Render a spectrum as CSV with full round-trip precision.

    Column names are part of the file contract:
    ``omega_rad_s, f1_sq, f2_sq``. Values are printed with 17
    significant digits so that parsing the file reproduces the binary
    doubles exactly.
    """
    lines = ["omega_rad_s,f1_sq,f2_sq"]
    for w, a, b in zip(result.omega, result.f1_sq, result.f2_sq):
        lines.append(f"{w:.17g},{a:.17g},{b:.17g}")
    return "\n".join(lines) + "\n"
