"""Racetrack geometry, dispersion, and resonance combs.

Everything downstream (linear transfer, field enhancement, overlap
integrals, pair rates) is parameterized by the value types defined
here. All quantities are SI internally: lengths in meters, angular
frequencies in rad/s. File formats use Hz at the boundary; conversion
lives in :mod:`ringpair.deviceio`.

The dispersion model is a first-order Taylor expansion of the effective
index around a reference frequency,

    n_eff(w) = n_eff_ref + (n_g - n_eff_ref) * (w - w_ref) / w_ref,

which guarantees d(w * n_eff)/dw = n_g at w_ref. An optional
second-order coefficient adds a quadratic term to the propagation
constant on top of the curvature already implied by the linear index
law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as C_VACUUM
from scipy.optimize import brentq

from .errors import EmptyBand, NoConvergence

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class WaveguideParams:
    """Modal and material parameters of the ridge waveguide.

    Parameters
    ----------
    n_eff_ref : float
        Effective index at the reference frequency.
    n_g : float
        Group index at the reference frequency.
    omega_ref : float
        Reference angular frequency [rad/s].
    gvd : float
        Optional second-order dispersion added to the propagation
        constant, d2k/dw2 [s^2/m]. Zero disables it.
    gamma_nl : float
        Nonlinear parameter of the waveguide [W^-1 m^-1].
    chi3_bar : float
        Effective third-order susceptibility [m^2/V^2].
    n_bar : float
        Typical refractive index entering the nonlinear scaling.
    area_eff : float
        Effective nonlinear interaction area [m^2].
    """

    n_eff_ref: float
    n_g: float
    omega_ref: float
    gvd: float = 0.0
    gamma_nl: float = 0.0
    chi3_bar: float = 0.0
    n_bar: float = 1.0
    area_eff: float = 1.0

    def __post_init__(self) -> None:
        if self.n_eff_ref <= 0.0:
            raise ValueError(f"n_eff_ref must be positive, got {self.n_eff_ref}")
        if self.n_g <= 0.0:
            raise ValueError(f"n_g must be positive, got {self.n_g}")
        if self.omega_ref <= 0.0:
            raise ValueError(f"omega_ref must be positive, got {self.omega_ref}")
        if self.n_bar <= 0.0:
            raise ValueError(f"n_bar must be positive, got {self.n_bar}")
        if self.area_eff <= 0.0:
            raise ValueError(f"area_eff must be positive, got {self.area_eff}")
        if self.gamma_nl < 0.0:
            raise ValueError(f"gamma_nl must be non-negative, got {self.gamma_nl}")

    @property
    def v_g(self) -> float:
        """Group velocity c/n_g [m/s]."""
        return C_VACUUM / self.n_g


@dataclass(frozen=True)
class RacetrackSpec:
    """One racetrack resonator.

    The racetrack consists of two straight sections joined by two half
    circles. One straight section hosts the shared directional coupler,
    the other hosts the bus coupler that sets the coupling Q; both are
    included in the round trip.

    Parameters
    ----------
    straight_len : float
        Length of each straight section [m].
    bend_radius : float
        Radius of the half-circle bends [m].
    q_intrinsic : float
        Intrinsic quality factor of the resonator.
    q_coupling : float
        Coupling quality factor set by the bus coupler.
    heater_shift : float
        Rigid shift applied to every resonance of this ring [rad/s].
        Models a thermal tuner; positive values move the comb up.
    """

    straight_len: float
    bend_radius: float
    q_intrinsic: float
    q_coupling: float
    heater_shift: float = 0.0

    def __post_init__(self) -> None:
        if self.straight_len <= 0.0:
            raise ValueError(f"straight_len must be positive, got {self.straight_len}")
        if self.bend_radius <= 0.0:
            raise ValueError(f"bend_radius must be positive, got {self.bend_radius}")
        if self.q_intrinsic <= 0.0:
            raise ValueError(f"q_intrinsic must be positive, got {self.q_intrinsic}")
        if self.q_coupling <= 0.0:
            raise ValueError(f"q_coupling must be positive, got {self.q_coupling}")

    @property
    def round_trip_length(self) -> float:
        """Total resonator length 2*(straight_len + pi*bend_radius) [m]."""
        return 2.0 * (self.straight_len + math.pi * self.bend_radius)

    @property
    def q_loaded(self) -> float:
        """Loaded quality factor, parallel combination of the two Qs."""
        return 1.0 / (1.0 / self.q_intrinsic + 1.0 / self.q_coupling)


@dataclass(frozen=True)
class CouplingModel:
    """Exponential gap model for the directional-coupler strength.

    |kappa|(d) = kappa0 * exp(-(d - gap_ref) / decay_len)

    Parameters
    ----------
    kappa0 : float
        Coupling rate at the reference gap [1/m].
    gap_ref : float
        Reference gap [m].
    decay_len : float
        Exponential decay length of the evanescent overlap [m].
    phase : float
        Phase of the complex coupling constant [rad].
    """

    kappa0: float
    gap_ref: float
    decay_len: float
    phase: float = 0.0

    def __post_init__(self) -> None:
        if self.kappa0 < 0.0:
            raise ValueError(f"kappa0 must be non-negative, got {self.kappa0}")
        if self.gap_ref <= 0.0:
            raise ValueError(f"gap_ref must be positive, got {self.gap_ref}")
        if self.decay_len <= 0.0:
            raise ValueError(f"decay_len must be positive, got {self.decay_len}")

    def kappa_abs(self, gap: float) -> float:
        """Coupling magnitude at the given gap [1/m]."""
        if gap <= 0.0:
            raise ValueError(f"gap must be positive, got {gap}")
        return self.kappa0 * math.exp(-(gap - self.gap_ref) / self.decay_len)

    def kappa(self, gap: float) -> complex:
        """Complex coupling constant at the given gap [1/m]."""
        return self.kappa_abs(gap) * complex(math.cos(self.phase), math.sin(self.phase))


@dataclass(frozen=True)
class DeviceSpec:
    """Two racetracks sharing one directional coupler.

    Ring 1 carries the pumps (fed through the IN bus), ring 2 collects
    the generated light (OUT bus). The shared coupler occupies one
    straight section of each ring; its length must therefore fit in the
    shorter of the two.
    """

    waveguide: WaveguideParams
    ring1: RacetrackSpec
    ring2: RacetrackSpec
    dc_length: float
    dc_gap: float
    coupling: CouplingModel

    def __post_init__(self) -> None:
        if self.dc_length <= 0.0:
            raise ValueError(f"dc_length must be positive, got {self.dc_length}")
        if self.dc_gap <= 0.0:
            raise ValueError(f"dc_gap must be positive, got {self.dc_gap}")
        limit = min(self.ring1.straight_len, self.ring2.straight_len)
        if self.dc_length > limit * (1.0 + 1e-12):
            raise ValueError(
                f"dc_length {self.dc_length} exceeds the shorter straight section {limit}"
            )

    def ring(self, owner: int) -> RacetrackSpec:
        """Ring spec by 1-based index."""
        if owner == 1:
            return self.ring1
        if owner == 2:
            return self.ring2
        raise ValueError(f"ring index must be 1 or 2, got {owner}")

    @property
    def kappa_abs(self) -> float:
        """Coupler strength magnitude at the device gap [1/m]."""
        return self.coupling.kappa_abs(self.dc_gap)

    @property
    def kappa(self) -> complex:
        """Complex coupler strength at the device gap [1/m]."""
        return self.coupling.kappa(self.dc_gap)


@dataclass(frozen=True)
class Resonance:
    """One longitudinal mode of one ring.

    Attributes
    ----------
    owner : int
        Which ring the mode belongs to (1 or 2).
    order : int
        Longitudinal mode number m.
    omega0 : float
        Center frequency including any heater shift [rad/s].
    q_loaded : float
        Loaded quality factor.
    q_coupling : float
        Coupling quality factor.
    linewidth : float
        Full width at half maximum, omega0 / q_loaded [rad/s].
    """

    owner: int
    order: int
    omega0: float
    q_loaded: float
    q_coupling: float
    linewidth: float = field(default=0.0)

    def __post_init__(self) -> None:
        if self.owner not in (1, 2):
            raise ValueError(f"owner must be 1 or 2, got {self.owner}")
        if self.omega0 <= 0.0:
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if self.q_loaded <= 0.0 or self.q_coupling <= 0.0:
            raise ValueError("quality factors must be positive")
        if self.linewidth == 0.0:
            object.__setattr__(self, "linewidth", self.omega0 / self.q_loaded)
        if abs(self.linewidth * self.q_loaded - self.omega0) > 1e-12 * self.omega0:
            raise ValueError("linewidth is inconsistent with omega0 / q_loaded")


def effective_index(wg: WaveguideParams, omega) -> np.ndarray | float:
    """Effective index at one or many angular frequencies.

    Evaluates the linear Taylor law around ``wg.omega_ref`` and, when a
    second-order coefficient is present, folds the extra quadratic
    wavevector term back into an equivalent index.

    Parameters
    ----------
    wg : WaveguideParams
    omega : float or ndarray
        Angular frequency [rad/s].

    Returns
    -------
    float or ndarray
        Effective index, same shape as ``omega``.
    """
    omega = np.asarray(omega, dtype=float)
    detune = omega - wg.omega_ref
    n = wg.n_eff_ref + (wg.n_g - wg.n_eff_ref) * detune / wg.omega_ref
    if wg.gvd != 0.0:
        n = n + 0.5 * wg.gvd * detune**2 * C_VACUUM / omega
    return float(n) if n.ndim == 0 else n


def wavevector(wg: WaveguideParams, omega) -> np.ndarray | float:
    """Propagation constant k(w) = n_eff(w) * w / c [1/m]."""
    omega = np.asarray(omega, dtype=float)
    k = effective_index(wg, omega) * omega / C_VACUUM
    return float(k) if np.ndim(k) == 0 else k


def group_index(wg: WaveguideParams, omega) -> np.ndarray | float:
    """Local group index c * dk/dw.

    Reduces to ``wg.n_g`` exactly at the reference frequency and drifts
    linearly away from it as implied by the index law.
    """
    omega = np.asarray(omega, dtype=float)
    detune = omega - wg.omega_ref
    ng = wg.n_eff_ref + (wg.n_g - wg.n_eff_ref) * (2.0 * omega - wg.omega_ref) / wg.omega_ref
    if wg.gvd != 0.0:
        ng = ng + C_VACUUM * wg.gvd * detune
    return float(ng) if ng.ndim == 0 else ng


def q_loaded(q_intrinsic: float, q_coupling: float) -> float:
    """Parallel combination of intrinsic and coupling quality factors."""
    if q_intrinsic <= 0.0 or q_coupling <= 0.0:
        raise ValueError("quality factors must be positive")
    return 1.0 / (1.0 / q_intrinsic + 1.0 / q_coupling)


def round_trip_phase(wg: WaveguideParams, ring: RacetrackSpec, omega) -> np.ndarray | float:
    """Accumulated phase k(w) * round_trip_length [rad]."""
    return wavevector(wg, omega) * ring.round_trip_length


def resonance_comb(
    ring: RacetrackSpec,
    wg: WaveguideParams,
    band: tuple[float, float],
    owner: int = 1,
) -> list[Resonance]:
    """All resonances of one ring inside a frequency band.

    The resonance condition k(w) * L_rt = 2*pi*m is solved for every
    integer m whose root lies in the band, by bracketed 1-D root
    finding driven to machine-level relative tolerance. The heater
    shift is applied after the solve, as a rigid displacement of the
    whole comb.

    Parameters
    ----------
    ring, wg
        Geometry and dispersion inputs.
    band : (float, float)
        Angular frequency interval [rad/s]. Order does not matter.
    owner : int
        Ring label recorded on the returned resonances.

    Returns
    -------
    list[Resonance]
        Sorted by ascending frequency.

    Raises
    ------
    EmptyBand
        If no mode order lands in the band.
    NoConvergence
        If the root finder fails for some order (should not happen for
        monotone dispersion).
    """
    lo, hi = (float(band[0]), float(band[1]))
    if lo > hi:
        lo, hi = hi, lo
    if lo <= 0.0:
        raise ValueError(f"band must be positive, got {band}")

    # The comb is solved on the unshifted dispersion curve; the heater
    # moves the result rigidly. The search band therefore has to be
    # widened by the shift so that modes landing in the requested band
    # after shifting are not missed.
    s = ring.heater_shift
    lo_u, hi_u = lo - s, hi - s
    if hi_u <= 0.0:
        raise EmptyBand(f"band {band} is empty for heater shift {s}")
    lo_u = max(lo_u, 1e-6 * hi_u)

    phase_lo = round_trip_phase(wg, ring, lo_u)
    phase_hi = round_trip_phase(wg, ring, hi_u)
    if phase_hi < phase_lo:
        raise NoConvergence("round-trip phase is not increasing over the band")
    m_lo = int(math.ceil(phase_lo / TWO_PI - 1e-9))
    m_hi = int(math.floor(phase_hi / TWO_PI + 1e-9))
    if m_hi < m_lo:
        raise EmptyBand(f"no resonance of ring with L_rt={ring.round_trip_length} in band {band}")

    out: list[Resonance] = []
    for m in range(m_lo, m_hi + 1):
        target = TWO_PI * m

        def f(w: float, _t: float = target) -> float:
            return round_trip_phase(wg, ring, w) - _t

        a, b = lo_u, hi_u
        fa, fb = phase_lo - target, phase_hi - target
        if fa > 0.0 or fb < 0.0:
            # Root sits within a half period of the band edge; widen.
            span = hi_u - lo_u
            a, b = lo_u - 0.51 * span / max(m_hi - m_lo, 1), hi_u + 0.51 * span / max(m_hi - m_lo, 1)
            if f(a) > 0.0 or f(b) < 0.0:
                continue
        try:
            w_root = brentq(f, a, b, xtol=1e-3, rtol=1e-14, maxiter=200)
        except (RuntimeError, ValueError) as exc:
            raise NoConvergence(f"root finding failed for mode order {m}: {exc}") from exc

        w0 = w_root + s
        if not (lo <= w0 <= hi):
            continue
        ql = ring.q_loaded
        out.append(
            Resonance(
                owner=owner,
                order=m,
                omega0=w0,
                q_loaded=ql,
                q_coupling=ring.q_coupling,
                linewidth=w0 / ql,
            )
        )
    if not out:
        raise EmptyBand(f"no resonance of ring with L_rt={ring.round_trip_length} in band {band}")
    out.sort(key=lambda r: r.omega0)
    return out


def device_combs(
    device: DeviceSpec, band: tuple[float, float]
) -> tuple[list[Resonance], list[Resonance]]:
    """Resonance combs of both rings over a common band."""
    comb1 = resonance_comb(device.ring1, device.waveguide, band, owner=1)
    comb2 = resonance_comb(device.ring2, device.waveguide, band, owner=2)
    return comb1, comb2


def fsr(ring: RacetrackSpec, wg: WaveguideParams, omega: float) -> float:
    """Local free spectral range 2*pi*c / (n_g(w) * L_rt) [rad/s]."""
    ng = group_index(wg, omega)
    if np.any(np.asarray(ng) <= 0.0):
        raise ValueError("group index must be positive for an FSR")
    return TWO_PI * C_VACUUM / (ng * ring.round_trip_length)


def finesse(ring: RacetrackSpec, wg: WaveguideParams, omega: float) -> float:
    """Finesse FSR / linewidth of the ring at the given frequency."""
    return fsr(ring, wg, omega) * ring.q_loaded / omega
