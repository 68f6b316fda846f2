"""Linear two-mode physics of the shared directional coupler.

The coupler supports the usual two-guide beat solution: a field fed
into one guide oscillates between the guides with spatial rate |kappa|.
Choosing the coupler length equal to an integer number of half beats,
L = m * pi / |kappa|, returns all linear power to the guide it started
in, so the two racetracks are linearly uncoupled at every frequency
while still sharing the physical cross section where the third-order
nonlinearity acts.

This module also carries the self- and cross-phase detuning estimates
for that null: a Kerr-induced mismatch delta_beta between the guides
degrades the null, and the closed-form transfer below quantifies by
how much.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCoupling
from .geometry import WaveguideParams

ISOLATION_FLOOR_DB = 200.0


@dataclass(frozen=True)
class CmtField:
    """Asymptotic coupler field of one port, parameterized along z.

    Attributes
    ----------
    port : str
        "IN" for the field fed through ring 1's bus, "OUT" for the
        field fed through ring 2's bus.
    kappa : complex
        Coupling constant [1/m].
    length : float
        Coupler length the field was solved for [m].
    degenerate : bool
        True when |kappa| is exactly zero; the amplitudes are then
        constant along z.
    """

    port: str
    kappa: complex
    length: float
    degenerate: bool = False

    def __post_init__(self) -> None:
        if self.port not in ("IN", "OUT"):
            raise ValueError(f"port must be 'IN' or 'OUT', got {self.port!r}")
        if self.length <= 0.0:
            raise ValueError(f"length must be positive, got {self.length}")

    def _phase_unit(self) -> complex:
        mag = abs(self.kappa)
        return self.kappa.conjugate() / mag if mag > 0.0 else 1.0 + 0.0j

    def a1(self, z) -> np.ndarray | complex:
        """Amplitude in guide 1 at position z [dimensionless]."""
        z = np.asarray(z, dtype=float)
        mag = abs(self.kappa)
        if self.port == "OUT":
            out = np.cos(mag * z) + 0.0j
        else:
            out = -1j * self._phase_unit() * np.sin(mag * z)
        return complex(out) if np.ndim(out) == 0 else out

    def a2(self, z) -> np.ndarray | complex:
        """Amplitude in guide 2 at position z [dimensionless]."""
        z = np.asarray(z, dtype=float)
        mag = abs(self.kappa)
        if self.port == "OUT":
            out = 1j * self._phase_unit() * np.sin(mag * z)
        else:
            out = np.cos(mag * z) + 0.0j
        return complex(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class DcTransfer:
    """End-to-end linear transfer of the coupler.

    ``through`` is the amplitude staying in the fed guide after the
    full length, ``cross`` the amplitude leaking into the other guide.
    ``|through|^2 + |cross|^2 = 1`` (lossless coupler).
    """

    through: complex
    cross: complex
    kappa: complex
    length: float

    @property
    def cross_power(self) -> float:
        return abs(self.cross) ** 2


def solve_dc_fields(kappa: complex, length: float) -> tuple[CmtField, CmtField]:
    """Both asymptotic fields of the coupler.

    Parameters
    ----------
    kappa : complex
        Coupling constant [1/m]. Zero is allowed and returns constant
        (degenerate) fields.
    length : float
        Coupler length [m].

    Returns
    -------
    (CmtField, CmtField)
        The IN-port and OUT-port fields, in that order.
    """
    if length <= 0.0:
        raise ValueError(f"length must be positive, got {length}")
    kappa = complex(kappa)
    degenerate = abs(kappa) == 0.0
    return (
        CmtField(port="IN", kappa=kappa, length=length, degenerate=degenerate),
        CmtField(port="OUT", kappa=kappa, length=length, degenerate=degenerate),
    )


def dc_transfer(kappa: complex, length: float) -> DcTransfer:
    """Linear transfer matrix entries of the coupler at length L."""
    if length <= 0.0:
        raise ValueError(f"length must be positive, got {length}")
    kappa = complex(kappa)
    mag = abs(kappa)
    if mag == 0.0:
        return DcTransfer(through=1.0 + 0.0j, cross=0.0j, kappa=kappa, length=length)
    unit = kappa.conjugate() / mag
    return DcTransfer(
        through=complex(math.cos(mag * length)),
        cross=1j * unit * math.sin(mag * length),
        kappa=kappa,
        length=length,
    )


def uncoupling_lengths(kappa: complex, m_max: int) -> list[float]:
    """Coupler lengths m * pi / |kappa| with vanishing linear transfer.

    Raises
    ------
    DegenerateCoupling
        If |kappa| is zero; there is no finite null length then.
    """
    if m_max < 1:
        raise ValueError(f"m_max must be at least 1, got {m_max}")
    mag = abs(complex(kappa))
    if mag == 0.0:
        raise DegenerateCoupling("null lengths are undefined for |kappa| = 0")
    return [m * math.pi / mag for m in range(1, m_max + 1)]


def isolation_db(kappa: complex, length: float, floor_db: float = ISOLATION_FLOOR_DB) -> float:
    """Linear isolation between the rings, -10*log10 of the cross power.

    The value is capped at ``floor_db`` (default 200 dB): an exact null
    has zero cross power and infinite nominal isolation, and values
    beyond the cap carry no design information.
    """
    if floor_db <= 0.0:
        raise ValueError(f"floor_db must be positive, got {floor_db}")
    cross_power = dc_transfer(kappa, length).cross_power
    if cross_power <= 10.0 ** (-floor_db / 10.0):
        return floor_db
    return min(-10.0 * math.log10(cross_power), floor_db)


def kerr_detuned_efficiency(kappa: complex, length: float, delta_beta: float) -> float:
    """Power-transfer efficiency of the coupler under a Kerr mismatch.

    eta = |kappa|^2 / (|kappa|^2 + delta_beta^2)
          * sin^2(|kappa| * L * sqrt(1 + (delta_beta / (2|kappa|))^2))

    Note the asymmetry: the prefactor carries the full mismatch while
    the beat-rate correction inside the sine uses half of it. The
    expression is implemented exactly as written above.

    Parameters
    ----------
    kappa : complex
        Coupling constant [1/m].
    length : float
        Coupler length [m].
    delta_beta : float
        Propagation-constant mismatch between the guides [1/m].
    """
    if length <= 0.0:
        raise ValueError(f"length must be positive, got {length}")
    mag = abs(complex(kappa))
    if mag == 0.0:
        return 0.0
    ratio = delta_beta / (2.0 * mag)
    pref = mag**2 / (mag**2 + delta_beta**2)
    return pref * math.sin(mag * length * math.sqrt(1.0 + ratio**2)) ** 2


def kerr_delta_beta(wg: WaveguideParams, p_in: float, finesse: float) -> float:
    """Kerr-induced mismatch gamma_nl * P_in * finesse [1/m].

    The finesse converts the injected power to the circulating power
    responsible for the index shift.
    """
    if p_in < 0.0:
        raise ValueError(f"p_in must be non-negative, got {p_in}")
    if finesse <= 0.0:
        raise ValueError(f"finesse must be positive, got {finesse}")
    return wg.gamma_nl * p_in * finesse


def kerr_validity_metric(
    wg: WaveguideParams, p_in: float, q_loaded: float, wavelength: float
) -> float:
    """Dimensionless smallness parameter of the Kerr perturbation.

    metric = gamma_nl * P_in * wavelength * Q / (4 * n_g)

    Derived from delta_beta * L_dc at the optimum coupler length, where
    the finesse equals wavelength * Q / (4 * pi * n_g * R). Values well
    below one mean the linear null survives the pump power; the design
    rules use a configurable ceiling (0.05 by default).
    """
    if p_in < 0.0:
        raise ValueError(f"p_in must be non-negative, got {p_in}")
    if q_loaded <= 0.0:
        raise ValueError(f"q_loaded must be positive, got {q_loaded}")
    if wavelength <= 0.0:
        raise ValueError(f"wavelength must be positive, got {wavelength}")
    return wg.gamma_nl * p_in * wavelength * q_loaded / (4.0 * wg.n_g)


def phase_mismatch_angle(kappa: complex) -> float:
    """Phase of the complex coupling constant [rad]."""
    return cmath.phase(complex(kappa))
