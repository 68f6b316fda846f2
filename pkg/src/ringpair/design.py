"""Design rules and tuning procedures for the racetrack pair.

The design flow, in the order the optimizer runs it:

1. pick the coupler length: the longest straight a bend radius allows
   is L = pi * R, making the round trip 4 * pi * R;
2. solve the coupler gap so that L is a linear null, L = m pi / |kappa|;
3. choose the ring-2 length and heater so the signal line sits exactly
   midway between the two pump lines while both single-pump side-band
   processes land as far from a ring-2 line as the comb allows;
4. check the Kerr budget and compute counteracting heater shifts for
   the pump-induced resonance pulls;
5. evaluate every rule and emit a report.

The feasibility frontier of step 3 is architectural: a partner line
can be pushed at most half a spectral range away from the
energy-conserving point, so a suppression target s is reachable only if
fwhm * sqrt(1/s - 1) <= FSR / 2. The tuner's Infeasible verdict
implements exactly this criterion; geometry limits that keep a
particular instance from reaching the ideal detuning are reported on
the result instead of flipping the verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from scipy.constants import c as C_VACUUM
from scipy.optimize import brentq

from .errors import Infeasible, MissingResonance, NoConvergence, OutOfRange, ValidityExceeded
from .geometry import (
    CouplingModel,
    DeviceSpec,
    Resonance,
    fsr,
    finesse as ring_finesse,
    resonance_comb,
    wavevector,
)
from .linear_cmt import isolation_db, kerr_delta_beta, kerr_validity_metric
from .nonlinear import ProcessConfig, j_closed_form, j_single_ring_ratio
from .sfwm import PumpDrive, sideband_detuning, suppression_factor

TWO_PI = 2.0 * math.pi
ENERGY_RESIDUAL_TOL_LINEWIDTHS = 1e-6
DEFAULT_GAP_BUDGET = (5e-8, 1e-6)


@dataclass(frozen=True)
class DesignGoal:
    """Targets the tuner and the rule checks work against.

    Parameters
    ----------
    signal_wavelength : float
        Vacuum wavelength of the signal line [m].
    pump_separation : int
        Number of ring-1 orders between the two pumps. Must be even
        (and at least 2) so their midpoint falls on the ring-1 grid and
        the signal line can sit on a comb point midway.
    min_parasitic_suppression : float
        Ceiling on the side-band suppression factor (smaller is
        quieter), e.g. 1e-4 for four orders of magnitude.
    max_kerr_metric : float
        Ceiling on the Kerr validity metric.
    min_isolation_db : float
        Floor on the linear isolation between the rings.
    gap_budget : (float, float)
        Allowed coupler-gap interval for the uncoupling solve [m].
    """

    signal_wavelength: float
    pump_separation: int = 2
    min_parasitic_suppression: float = 1e-4
    max_kerr_metric: float = 0.05
    min_isolation_db: float = 30.0
    gap_budget: tuple[float, float] = DEFAULT_GAP_BUDGET

    def __post_init__(self) -> None:
        if self.signal_wavelength <= 0.0:
            raise ValueError(f"signal_wavelength must be positive, got {self.signal_wavelength}")
        if self.pump_separation < 2 or self.pump_separation % 2 != 0:
            raise ValueError(
                f"pump_separation must be an even integer >= 2, got {self.pump_separation}"
            )
        if not 0.0 < self.min_parasitic_suppression < 1.0:
            raise ValueError(
                "min_parasitic_suppression must lie in (0, 1), got "
                f"{self.min_parasitic_suppression}"
            )
        if self.max_kerr_metric <= 0.0:
            raise ValueError(f"max_kerr_metric must be positive, got {self.max_kerr_metric}")
        if self.min_isolation_db <= 0.0:
            raise ValueError(f"min_isolation_db must be positive, got {self.min_isolation_db}")
        lo, hi = self.gap_budget
        if not 0.0 < lo < hi:
            raise ValueError(f"gap_budget must be an increasing positive pair, got {self.gap_budget}")

    @property
    def signal_omega(self) -> float:
        return TWO_PI * C_VACUUM / self.signal_wavelength


@dataclass(frozen=True)
class DcLengthChoice:
    """Bend-limited coupler length and the implied round trip."""

    dc_length: float
    ring_length: float


@dataclass(frozen=True)
class RuleCheck:
    """One design rule evaluation."""

    name: str
    passed: bool
    value: float
    limit: float
    detail: str = ""


@dataclass(frozen=True)
class TuneResult:
    """Outcome of the energy-conservation tuning."""

    device: DeviceSpec
    mode: str
    residual: float
    detuning: tuple[float, float]
    suppression: tuple[float, float]
    heater_delta: float
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class CompensationResult:
    """Pump-induced resonance pulls and the counteracting heater moves."""

    induced_shift: tuple[float, float]
    compensation: tuple[float, float]
    kerr_metric: float
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class DesignReport:
    """Aggregate verdict of all design rules on one device."""

    device: DeviceSpec
    passed: bool
    rules: tuple[RuleCheck, ...]
    j_abs: float
    j_ratio: float
    isolation_db: float
    uncoupling_order: int
    suppression: tuple[float, float]
    detuning: tuple[float, float]
    kerr_metric: float
    notes: tuple[str, ...] = ()


def optimal_dc_length(bend_radius: float) -> DcLengthChoice:
    """Bend-limited optimum: coupler straight pi * R, round trip 4 pi R.

    Longer couplers raise the overlap linearly while the round trip
    grows too; with both straights tied to the coupler length the
    figure of merit saturates at straight = pi * R, where the coupler
    occupies half the round trip's worth of one straight.
    """
    if bend_radius <= 0.0:
        raise ValueError(f"bend_radius must be positive, got {bend_radius}")
    length = math.pi * bend_radius
    return DcLengthChoice(dc_length=length, ring_length=4.0 * math.pi * bend_radius)


def solve_gap_for_uncoupling(
    model: CouplingModel,
    length: float,
    m_order: int,
    gap_budget: tuple[float, float] = DEFAULT_GAP_BUDGET,
) -> float:
    """Coupler gap placing the m-th linear null at the given length.

    Solves |kappa|(gap) = m * pi / length by bracketed bisection over
    the gap budget, then polishes with one exact logarithmic step of
    the exponential gap law, so the returned gap reproduces the null to
    machine precision (far inside the 1e-12 m tolerance).

    Raises
    ------
    OutOfRange
        If the required coupling strength is not reachable inside the
        gap budget.
    """
    if length <= 0.0:
        raise ValueError(f"length must be positive, got {length}")
    if m_order < 1:
        raise ValueError(f"m_order must be at least 1, got {m_order}")
    lo, hi = gap_budget
    if not 0.0 < lo < hi:
        raise ValueError(f"gap_budget must be an increasing positive pair, got {gap_budget}")
    target = m_order * math.pi / length

    def f(gap: float) -> float:
        return model.kappa_abs(gap) - target

    f_lo, f_hi = f(lo), f(hi)
    if f_lo < 0.0 or f_hi > 0.0:
        raise OutOfRange(
            f"required |kappa| = {target:.6g} 1/m is outside "
            f"[{model.kappa_abs(hi):.6g}, {model.kappa_abs(lo):.6g}] reachable "
            f"over the gap budget {gap_budget}"
        )
    if f_lo == 0.0:
        gap = lo
    elif f_hi == 0.0:
        gap = hi
    else:
        gap = brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    # The model is a pure exponential, so one log step lands exactly.
    gap = gap + model.decay_len * math.log(model.kappa_abs(gap) / target)
    return float(gap)


def _pump_pair(
    comb1: list[Resonance], omega_center: float, separation: int
) -> tuple[Resonance, Resonance]:
    """Ring-1 line pair ``separation`` orders apart centered nearest omega_center."""
    if len(comb1) <= separation:
        raise MissingResonance(
            f"only {len(comb1)} ring-1 lines in band; need {separation + 1} for the pump pair"
        )
    best = min(
        range(len(comb1) - separation),
        key=lambda i: abs(0.5 * (comb1[i].omega0 + comb1[i + separation].omega0) - omega_center),
    )
    return comb1[best + separation], comb1[best]


def _process_band(device: DeviceSpec, goal: DesignGoal) -> tuple[float, float]:
    w = goal.signal_omega
    f1 = fsr(device.ring1, device.waveguide, w)
    span = (goal.pump_separation + 2.2) * f1
    return (w - span, w + span)


def _config_on_comb(
    device: DeviceSpec, goal: DesignGoal
) -> tuple[ProcessConfig, list[Resonance]]:
    """Process configuration from the device's actual combs."""
    band = _process_band(device, goal)
    comb1 = resonance_comb(device.ring1, device.waveguide, band, owner=1)
    comb2 = resonance_comb(device.ring2, device.waveguide, band, owner=2)
    res_p1, res_p2 = _pump_pair(comb1, goal.signal_omega, goal.pump_separation)
    omega_mid = 0.5 * (res_p1.omega0 + res_p2.omega0)
    res_s = min(comb2, key=lambda r: abs(r.omega0 - omega_mid))
    wg = device.waveguide
    delta_k = float(
        wavevector(wg, res_p1.omega0)
        + wavevector(wg, res_p2.omega0)
        - 2.0 * wavevector(wg, res_s.omega0)
    )
    cfg = ProcessConfig(
        omega1=res_s.omega0,
        omega2=res_s.omega0,
        omega3=res_p1.omega0,
        omega4=res_p2.omega0,
        res_p1=res_p1,
        res_p2=res_p2,
        res_s=res_s,
        delta_k=delta_k,
    )
    return cfg, comb2


def _solve_heater_shift(omega_line: float, omega_mid: float, linewidth: float) -> float:
    """Additional heater shift placing a comb line at the pump midpoint.

    The residual 2 * (omega_line + ds) - 2 * omega_mid is linear in the
    shift; it is still solved by bracketed bisection (the procedure
    stays valid for mildly nonlinear tuner laws) to a residual below
    1e-6 linewidths.
    """

    def g(ds: float) -> float:
        return 2.0 * (omega_line + ds) - 2.0 * omega_mid

    span = abs(omega_mid - omega_line) + linewidth
    tol = 0.25 * ENERGY_RESIDUAL_TOL_LINEWIDTHS * linewidth
    if g(-span) > 0.0 or g(span) < 0.0:
        raise NoConvergence("heater-shift bracket does not contain the midpoint")
    ds = brentq(g, -span, span, xtol=tol, rtol=8.9e-16, maxiter=200)
    return float(ds)


def _retuned(device: DeviceSpec, goal: DesignGoal, extra_shift: float) -> DeviceSpec:
    ring2 = replace(device.ring2, heater_shift=device.ring2.heater_shift + extra_shift)
    return replace(device, ring2=ring2)


def _tune_diagnostics(
    device: DeviceSpec, goal: DesignGoal
) -> tuple[float, tuple[float, float], tuple[float, float], ProcessConfig]:
    cfg, comb2 = _config_on_comb(device, goal)
    residual = abs(cfg.omega3 + cfg.omega4 - 2.0 * cfg.res_s.omega0)
    d1 = sideband_detuning(comb2, cfg, pump=1)
    d2 = sideband_detuning(comb2, cfg, pump=2)
    lw = cfg.res_s.linewidth
    return residual, (d1, d2), (suppression_factor(d1, lw), suppression_factor(d2, lw)), cfg


def required_detuning(goal: DesignGoal, linewidth: float) -> float:
    """Side-band detuning needed for the suppression target [rad/s]."""
    s = goal.min_parasitic_suppression
    return linewidth * math.sqrt(1.0 / s - 1.0)


def tune_for_energy_conservation(
    device: DeviceSpec, goal: DesignGoal, mode: str = "trim"
) -> TuneResult:
    """Tune ring 2 so the signal line bisects the pump pair exactly.

    In ``trim`` mode only the ring-2 heater moves: the comb shifts
    rigidly until a line sits at the pump midpoint (residual below
    1e-6 linewidths). The side-band detunings are then whatever the
    fixed comb spacings give; if no candidate line within one spectral
    range meets the suppression target, the goal is infeasible for
    this geometry.

    In ``fabrication`` mode the ring-2 round trip is also free. The
    feasibility verdict is the architectural frontier
    fwhm * sqrt(1/s - 1) <= FSR / 2; when feasible, the round trip is
    set so the side-band points land half a ring-2 spacing away from
    the nearest partner lines, preferring the shorter-ring solution
    (detuning above FSR/2) and falling back to the longer-ring one when
    the coupler no longer fits, with the shortfall noted.

    Raises
    ------
    Infeasible
        With context on the required and achievable detunings.
    """
    if mode not in ("trim", "fabrication"):
        raise ValueError(f"mode must be 'trim' or 'fabrication', got {mode!r}")
    wg = device.waveguide
    band = _process_band(device, goal)
    comb1 = resonance_comb(device.ring1, wg, band, owner=1)
    res_p1, res_p2 = _pump_pair(comb1, goal.signal_omega, goal.pump_separation)
    omega_mid = 0.5 * (res_p1.omega0 + res_p2.omega0)
    lw_guess = omega_mid / device.ring2.q_loaded
    delta_req = required_detuning(goal, lw_guess)
    notes: list[str] = []

    if mode == "fabrication":
        fsr2 = fsr(device.ring2, wg, omega_mid)
        if delta_req > 0.5 * fsr2:
            raise Infeasible(
                f"suppression {goal.min_parasitic_suppression:.3g} needs a side-band "
                f"detuning of {delta_req:.6g} rad/s, beyond the reachable maximum "
                f"FSR/2 = {0.5 * fsr2:.6g} rad/s"
            )
        device = _refit_ring2_length(device, goal, omega_mid, notes)

    comb2 = resonance_comb(device.ring2, wg, _process_band(device, goal), owner=2)
    order = sorted(range(len(comb2)), key=lambda i: abs(comb2[i].omega0 - omega_mid))
    best: TuneResult | None = None
    for idx in order[:3]:
        ds = _solve_heater_shift(comb2[idx].omega0, omega_mid, lw_guess)
        candidate = _retuned(device, goal, ds)
        residual, deltas, sups, _cfg = _tune_diagnostics(candidate, goal)
        if residual > ENERGY_RESIDUAL_TOL_LINEWIDTHS * lw_guess:
            raise NoConvergence(
                f"energy-conservation residual {residual:.3g} rad/s exceeds tolerance"
            )
        result = TuneResult(
            device=candidate,
            mode=mode,
            residual=residual,
            detuning=deltas,
            suppression=sups,
            heater_delta=ds,
            notes=tuple(notes),
        )
        if max(sups) <= goal.min_parasitic_suppression:
            return result
        if best is None or max(sups) < max(best.suppression):
            best = result

    if mode == "fabrication" and best is not None:
        # Feasible by the architectural frontier; the geometry kept the
        # instance from reaching the ideal detuning, so report that.
        notes.append(
            f"achieved suppression {max(best.suppression):.3g} trails the goal "
            f"{goal.min_parasitic_suppression:.3g}; the coupler length limits how "
            "short ring 2 may get"
        )
        return replace(best, notes=tuple(notes))
    achieved = max(best.suppression) if best is not None else 1.0
    raise Infeasible(
        f"no heater shift within one spectral range meets suppression "
        f"{goal.min_parasitic_suppression:.3g}; best achievable here is {achieved:.3g} "
        f"(required detuning {delta_req:.6g} rad/s)"
    )


def _refit_ring2_length(
    device: DeviceSpec, goal: DesignGoal, omega_mid: float, notes: list[str]
) -> DeviceSpec:
    """Pick the ring-2 round trip placing the side-band points mid-gap.

    The pump pair spans M ring-1 spacings, so the side-band points sit
    M ring-1 spacings from the midpoint. Choosing the ring-2 spacing
    F2 = M F1 / (M -+ 1/2) puts them exactly between two ring-2 lines.
    The shorter ring (minus sign) reaches |delta| = F2/2 > F1/2 but
    must still fit the coupler in its straight; otherwise the longer
    ring (plus sign, |delta| = M F1 / (2M + 1)) is used.
    """
    wg = device.waveguide
    m_sep = goal.pump_separation
    f1 = fsr(device.ring1, wg, omega_mid)

    chosen: DeviceSpec | None = None
    for denom in (m_sep - 0.5, m_sep + 0.5):
        f2_target = m_sep * f1 / denom
        length_est = TWO_PI * C_VACUUM / (wg.n_g * f2_target)
        # Quantize so a mode lands exactly at the pump midpoint.
        order_s = max(round(wavevector(wg, omega_mid) * length_est / TWO_PI), 1)
        length = TWO_PI * order_s / wavevector(wg, omega_mid)
        straight = 0.5 * length - math.pi * device.ring2.bend_radius
        if straight < device.dc_length:
            continue
        ring2 = replace(device.ring2, straight_len=straight, heater_shift=0.0)
        chosen = replace(device, ring2=ring2)
        if denom < m_sep:
            break
        notes.append(
            "ring 2 lengthened instead of shortened (coupler fit); side-band "
            f"detuning limited to {m_sep * f1 / (2 * m_sep + 1):.6g} rad/s"
        )
    if chosen is None:
        raise Infeasible(
            "no ring-2 round trip fits the coupler while placing the side-band "
            "points mid-gap"
        )
    return chosen


def xpm_spm_compensation(
    device: DeviceSpec, pump_power: float, max_kerr_metric: float = 0.05
) -> CompensationResult:
    """Pump-induced resonance pulls and the heater moves undoing them.

    The circulating pump light drags the ring-1 comb by
    delta_omega = -v_g * gamma_nl * P * finesse (the propagation-phase
    pull converted to a frequency pull at fixed mode order; this
    conversion is a modeling choice, noted on the result). Ring 2
    carries no circulating pump power because the coupler is a linear
    null, so its pull is zero. The compensation is the sign-reversed
    pull, to be added to the heater shifts.

    Raises
    ------
    ValidityExceeded
        If the Kerr validity metric exceeds ``max_kerr_metric``.
    """
    if pump_power < 0.0:
        raise ValueError(f"pump_power must be non-negative, got {pump_power}")
    wg = device.waveguide
    wavelength = TWO_PI * C_VACUUM / wg.omega_ref
    metric = kerr_validity_metric(wg, pump_power, device.ring1.q_loaded, wavelength)
    if metric > max_kerr_metric:
        raise ValidityExceeded(
            f"Kerr validity metric {metric:.3g} exceeds the ceiling {max_kerr_metric:.3g}"
        )
    fin1 = ring_finesse(device.ring1, wg, wg.omega_ref)
    pull1 = -wg.v_g * kerr_delta_beta(wg, pump_power, fin1)
    pull2 = 0.0
    notes = (
        "frequency pull modeled as -v_g * delta_beta at fixed mode order",
        "ring 2 sees no circulating pump power at a linear null; its pull is zero",
    )
    return CompensationResult(
        induced_shift=(pull1, pull2),
        compensation=(-pull1, -pull2),
        kerr_metric=metric,
        notes=notes,
    )


def evaluate_design(
    device: DeviceSpec, goal: DesignGoal, drive: PumpDrive | None = None
) -> DesignReport:
    """Run every design rule against a device.

    Rules: linear isolation at the coupler null, energy conservation of
    the signal line against the pump pair, side-band suppression for
    both single-pump processes, and the Kerr validity budget (evaluated
    at zero power when no drive is given). The report also carries the
    on-resonance overlap figure and its single-ring ratio.
    """
    from scipy.constants import hbar

    wg = device.waveguide
    residual, deltas, sups, cfg = _tune_diagnostics(device, goal)
    lw = cfg.res_s.linewidth

    iso = isolation_db(device.kappa, device.dc_length)
    order = max(int(round(abs(device.kappa) * device.dc_length / math.pi)), 0)

    if drive is not None:
        omega_p = 0.5 * (cfg.res_p1.omega0 + cfg.res_p2.omega0)
        pump_power = drive.photon_number * hbar * omega_p / drive.pulse_duration
    else:
        pump_power = 0.0
    metric = kerr_validity_metric(
        wg, pump_power, device.ring1.q_loaded, goal.signal_wavelength
    )

    rules = (
        RuleCheck(
            name="linear_isolation",
            passed=iso >= goal.min_isolation_db,
            value=iso,
            limit=goal.min_isolation_db,
            detail=f"coupler null order {order}",
        ),
        RuleCheck(
            name="energy_conservation",
            passed=residual <= ENERGY_RESIDUAL_TOL_LINEWIDTHS * lw,
            value=residual,
            limit=ENERGY_RESIDUAL_TOL_LINEWIDTHS * lw,
            detail="|2 w_S - w_P1 - w_P2| on the actual combs",
        ),
        RuleCheck(
            name="sideband_suppression",
            passed=max(sups) <= goal.min_parasitic_suppression,
            value=max(sups),
            limit=goal.min_parasitic_suppression,
            detail=f"detunings {deltas[0]:.4g}, {deltas[1]:.4g} rad/s",
        ),
        RuleCheck(
            name="kerr_budget",
            passed=metric <= goal.max_kerr_metric,
            value=metric,
            limit=goal.max_kerr_metric,
            detail="zero pump power assumed" if drive is None else "",
        ),
    )

    import warnings as _warnings

    with _warnings.catch_warnings(record=True) as caught:
        _warnings.simplefilter("always")
        j = j_closed_form(device, cfg)
        ratio = j_single_ring_ratio(device, cfg)
    seen: list[str] = list(j.warnings)
    for w in caught:
        text = str(w.message)
        if text not in seen:
            seen.append(text)
    return DesignReport(
        device=device,
        passed=all(r.passed for r in rules),
        rules=rules,
        j_abs=j.j_abs,
        j_ratio=ratio,
        isolation_db=iso,
        uncoupling_order=order,
        suppression=sups,
        detuning=deltas,
        kerr_metric=metric,
        notes=tuple(seen),
    )


def optimize_device(
    device: DeviceSpec,
    goal: DesignGoal,
    drive: PumpDrive | None = None,
    mode: str = "fabrication",
) -> tuple[DeviceSpec, DesignReport]:
    """Full design flow: coupler length and gap, ring-2 tuning, rules.

    Starting from a seed device (which fixes the waveguide, the bend
    radii, the quality factors, and the coupling model), sets the
    bend-limited coupler length, solves the gap for the lowest null
    order inside the gap budget, tunes ring 2, applies the Kerr
    compensation when a drive is given, and returns the tuned device
    with its design report.
    """
    choice = optimal_dc_length(device.ring1.bend_radius)
    gap = None
    for m_order in (1, 2, 3, 4, 5):
        try:
            gap = solve_gap_for_uncoupling(
                device.coupling, choice.dc_length, m_order, goal.gap_budget
            )
            break
        except OutOfRange:
            continue
    if gap is None:
        raise OutOfRange(
            "no null order up to 5 is reachable inside the gap budget "
            f"{goal.gap_budget} at coupler length {choice.dc_length:.6g} m"
        )

    ring1 = replace(device.ring1, straight_len=choice.dc_length)
    ring2 = replace(
        device.ring2, straight_len=max(device.ring2.straight_len, choice.dc_length)
    )
    seeded = replace(
        device, ring1=ring1, ring2=ring2, dc_length=choice.dc_length, dc_gap=gap
    )

    tuned = tune_for_energy_conservation(seeded, goal, mode=mode)
    final = tuned.device
    extra_notes: tuple[str, ...] = tuned.notes
    if drive is not None:
        from scipy.constants import hbar

        omega_p = goal.signal_omega
        pump_power = drive.photon_number * hbar * omega_p / drive.pulse_duration
        comp = xpm_spm_compensation(final, pump_power, goal.max_kerr_metric)
        # The comb model is cold; the counteracting shift cancels a pull
        # the model does not carry, so it is reported rather than folded
        # into the modeled heater settings.
        extra_notes = extra_notes + (
            f"heater compensation for pump-induced pulls: ring 1 "
            f"{comp.compensation[0]:+.6g} rad/s, ring 2 {comp.compensation[1]:+.6g} rad/s",
        )

    report = evaluate_design(final, goal, drive)
    return final, replace(report, notes=report.notes + extra_notes)
