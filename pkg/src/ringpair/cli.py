"""Command line front end.

Every operation reads a device description from JSON and writes either
CSV or JSON. Outputs are deterministic: identical inputs produce
byte-identical files, so artifacts can be diffed across runs. Anything
time-dependent (timestamps, the exact command line) goes into a
``<out>.meta.json`` sidecar, never into the artifact itself.

Exit codes: 0 success, 2 input or validation trouble, 3 a stated goal
is unreachable, 4 a numeric procedure failed to converge. On failure a
single JSON object describing the error is written to stderr.
"""

from __future__ import annotations

import argparse
import cmath
import copy
import json
import math
import re
import sys
import time
from pathlib import Path
from typing import Any, Sequence

from scipy.constants import c as C_VACUUM

from . import __version__
from .design import (
    DesignGoal,
    DesignReport,
    optimize_device,
    xpm_spm_compensation,
)
from .deviceio import (
    device_from_dict,
    device_to_dict,
    load_device,
    write_text_atomic,
)
from .enhancement import intensity_spectrum, spectrum_to_csv
from .errors import (
    AssumptionViolated,
    EmptyBand,
    Infeasible,
    MissingResonance,
    NoConvergence,
    NonPhysical,
    OutOfRange,
    QuadratureFailure,
    ValidityExceeded,
)
from .geometry import finesse as ring_finesse, resonance_comb
from .linear_cmt import (
    isolation_db,
    kerr_delta_beta,
    kerr_detuned_efficiency,
    kerr_validity_metric,
)
from .nonlinear import j_closed_form, j_quadrature, resonant_config
from .sfwm import (
    PumpDrive,
    noise_budget,
    pair_rate_closed_form,
    sideband_detuning,
    sigma_from_finesse,
    suppression_factor,
)

TWO_PI = 2.0 * math.pi

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4

_INFEASIBLE_ERRORS = (Infeasible, OutOfRange, ValidityExceeded)
_NUMERICAL_ERRORS = (NoConvergence, QuadratureFailure, NonPhysical)
_VALIDATION_ERRORS = (ValueError, KeyError, OSError, EmptyBand, MissingResonance, AssumptionViolated)

_WAVELENGTH_UNITS = {"m": 1.0, "um": 1e-6, "nm": 1e-9}
_FREQUENCY_UNITS = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9, "thz": 1e12}


def parse_frequency(text: str) -> float:
    """One band edge to angular frequency [rad/s].

    Bare numbers are Hz; suffixes Hz/kHz/MHz/GHz/THz select frequency
    units and m/um/nm wavelength units (converted through c).
    """
    m = re.fullmatch(r"\s*([+-]?[0-9.]+(?:[eE][+-]?[0-9]+)?)\s*([a-zA-Z]*)\s*", text)
    if m is None:
        raise ValueError(f"cannot parse frequency {text!r}")
    value = float(m.group(1))
    unit = m.group(2).lower()
    if unit in ("", "hz") or unit in _FREQUENCY_UNITS:
        scale = _FREQUENCY_UNITS.get(unit, 1.0)
        if value <= 0.0:
            raise ValueError(f"frequency must be positive, got {text!r}")
        return TWO_PI * value * scale
    if unit in _WAVELENGTH_UNITS:
        wavelength = value * _WAVELENGTH_UNITS[unit]
        if wavelength <= 0.0:
            raise ValueError(f"wavelength must be positive, got {text!r}")
        return TWO_PI * C_VACUUM / wavelength
    raise ValueError(f"unknown unit {m.group(2)!r} in {text!r}")


def _band_pair(edges: Sequence[str]) -> tuple[float, float]:
    if len(edges) == 1 and ":" in edges[0]:
        edges = edges[0].split(":")
    if len(edges) != 2:
        raise ValueError("band needs two edges, either 'LO HI' or 'LO:HI'")
    lo, hi = (parse_frequency(edges[0]), parse_frequency(edges[1]))
    if lo > hi:
        lo, hi = hi, lo
    if lo == hi:
        raise ValueError("band edges must differ")
    return (lo, hi)


def _json_text(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def _emit(out: str | None, text: str, argv: Sequence[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    write_text_atomic(out, text)
    meta = {
        "tool": f"ringpair {__version__}",
        "created_unix": time.time(),
        "argv": list(argv),
    }
    write_text_atomic(str(out) + ".meta.json", _json_text(meta))


def _report_payload(report: DesignReport) -> dict[str, Any]:
    return {
        "passed": report.passed,
        "rules": [
            {
                "name": r.name,
                "passed": r.passed,
                "value": r.value,
                "limit": r.limit,
                "detail": r.detail,
            }
            for r in report.rules
        ],
        "j_abs": report.j_abs,
        "j_ratio": report.j_ratio,
        "isolation_db": report.isolation_db,
        "uncoupling_order": report.uncoupling_order,
        "suppression": list(report.suppression),
        "detuning": list(report.detuning),
        "kerr_metric": report.kerr_metric,
        "notes": list(report.notes),
    }


def cmd_spectrum(args: argparse.Namespace, argv: Sequence[str]) -> None:
    device = load_device(args.device, strict=args.strict)
    band = _band_pair(args.band)
    result = intensity_spectrum(device, band, args.points)
    _emit(args.out, spectrum_to_csv(result), argv)


def cmd_overlap(args: argparse.Namespace, argv: Sequence[str]) -> None:
    device = load_device(args.device, strict=args.strict)
    band = _band_pair(args.band)
    cfg = resonant_config(device, band, pump_separation=args.separation)
    solver = j_quadrature if args.method == "quadrature" else j_closed_form
    res = solver(device, cfg, strict=args.strict)
    payload = {
        "j_abs": res.j_abs,
        "j_phase": cmath.phase(res.j_value),
        "z_factor_abs": abs(res.z_factor),
        "enh_abs": abs(res.enhancement_product),
        "method": res.method,
        "warnings": list(res.warnings),
    }
    _emit(args.out, _json_text(payload), argv)


def cmd_rates(args: argparse.Namespace, argv: Sequence[str]) -> None:
    device = load_device(args.device, strict=args.strict)
    band = _band_pair(args.band)
    cfg = resonant_config(device, band, pump_separation=args.separation)
    drive = PumpDrive(
        photon_number=args.photons,
        pulse_duration=args.pulse,
        self_coupling=args.self_coupling,
    )
    report = noise_budget(device, drive, cfg, kcal=args.kcal, band=band)
    payload = {
        "beta_sq_signal": report.beta_sq_signal,
        "beta_sq_parasitic": list(report.beta_sq_parasitic),
        "rate_signal_per_s": report.per_second(report.beta_sq_signal),
        "rate_parasitic_per_s": [report.per_second(b) for b in report.beta_sq_parasitic],
        "suppression": list(report.suppression),
        "snr_improvement": list(report.snr_improvement),
        "detuning_delta": list(report.detuning_delta),
        "kcal": report.kcal,
        "sigma": report.sigma,
        "pulse_duration": report.pulse_duration,
        "notes": list(report.notes),
    }
    _emit(args.out, _json_text(payload), argv)


def cmd_suppression(args: argparse.Namespace, argv: Sequence[str]) -> None:
    device = load_device(args.device, strict=args.strict)
    band = _band_pair(args.band)
    cfg = resonant_config(device, band, pump_separation=args.separation)
    wg = device.waveguide
    lw = cfg.res_s.linewidth
    sigma = args.self_coupling
    if sigma is None:
        sigma = sigma_from_finesse(ring_finesse(device.ring1, wg, cfg.res_p1.omega0))
    drive = PumpDrive(
        photon_number=args.photons, pulse_duration=args.pulse, self_coupling=sigma
    )
    delta_signal = cfg.omega3 + cfg.omega4 - 2.0 * cfg.res_s.omega0
    signal_rate = (
        pair_rate_closed_form(drive, cfg.res_s, delta_signal, args.kcal, wg.v_g)
        / drive.pulse_duration
    )
    if args.points < 2:
        raise ValueError(f"points must be at least 2, got {args.points}")
    rows = []
    for i in range(args.points):
        x = args.max_detuning * i / (args.points - 1)
        delta = x * lw
        rate = (
            pair_rate_closed_form(drive, cfg.res_s, delta, args.kcal, wg.v_g)
            / drive.pulse_duration
        )
        rows.append((x, suppression_factor(delta, lw), signal_rate, rate))
    _emit(
        args.out,
        _csv_text(("delta_over_linewidth", "suppression", "signal_rate", "parasitic_rate"), rows),
        argv,
    )


def cmd_kerr_check(args: argparse.Namespace, argv: Sequence[str]) -> None:
    device = load_device(args.device, strict=args.strict)
    wg = device.waveguide
    comp = xpm_spm_compensation(device, args.power, args.max_metric)
    fin1 = ring_finesse(device.ring1, wg, wg.omega_ref)
    delta_beta = kerr_delta_beta(wg, args.power, fin1)
    payload = {
        "kerr_metric": comp.kerr_metric,
        "metric_limit": args.max_metric,
        "induced_shift": list(comp.induced_shift),
        "compensation": list(comp.compensation),
        "delta_beta": delta_beta,
        "crosstalk_at_null": kerr_detuned_efficiency(
            device.kappa, device.dc_length, delta_beta
        ),
        "isolation_db_cold": isolation_db(device.kappa, device.dc_length),
        "notes": list(comp.notes),
    }
    _emit(args.out, _json_text(payload), argv)


def cmd_optimize(args: argparse.Namespace, argv: Sequence[str]) -> None:
    device = load_device(args.device, strict=args.strict)
    omega_signal = parse_frequency(args.signal)
    goal = DesignGoal(
        signal_wavelength=TWO_PI * C_VACUUM / omega_signal,
        pump_separation=args.separation,
        min_parasitic_suppression=args.suppression,
        max_kerr_metric=args.max_kerr,
        min_isolation_db=args.min_isolation,
        gap_budget=(args.gap_min, args.gap_max),
    )
    drive = None
    if args.photons is not None:
        drive = PumpDrive(photon_number=args.photons, pulse_duration=args.pulse)
    final, report = optimize_device(device, goal, drive=drive, mode=args.mode)
    if args.out is not None:
        # A plain device file, loadable by every other operation.
        _emit(args.out, _json_text(device_to_dict(final)), argv)
    payload = {"device": device_to_dict(final), "report": _report_payload(report)}
    _emit(args.report, _json_text(payload), argv)


# Spellings without the unit suffix are accepted for convenience, so
# both dc.length_m (file key) and dc.dc_length (field name) work.
_LEAF_ALIASES = {
    "dc_length": "length_m",
    "dc_gap": "gap_m",
    "omega_ref": "freq_ref_hz",
}
_LEAF_SUFFIXES = ("_m", "_hz", "_per_m", "_w_m", "_s2_per_m", "_m2_v2", "_m2", "_rad")


def _resolve_leaf(node: dict, leaf: str, dotted: str) -> str:
    if leaf in node:
        return leaf
    if leaf in _LEAF_ALIASES and _LEAF_ALIASES[leaf] in node:
        return _LEAF_ALIASES[leaf]
    hits = [leaf + suffix for suffix in _LEAF_SUFFIXES if leaf + suffix in node]
    if len(hits) == 1:
        return hits[0]
    raise ValueError(
        f"parameter path {dotted!r} not found; available here: {sorted(node)}"
    )


def _set_dotted(data: dict, dotted: str, value: float) -> None:
    parts = dotted.split(".")
    node = data
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise ValueError(
                f"parameter path {dotted!r} not found; available here: "
                f"{sorted(node) if isinstance(node, dict) else 'scalar'}"
            )
        node = node[part]
    if not isinstance(node, dict):
        raise ValueError(f"parameter path {dotted!r} does not address an object")
    node[_resolve_leaf(node, parts[-1], dotted)] = value


def _sweep_values(args: argparse.Namespace) -> list[float]:
    if args.values is not None:
        lo, hi = float(args.values[0]), float(args.values[1])
        n = int(args.values[2])
        if n < 2:
            raise ValueError(f"sweep needs at least 2 points, got {n}")
        return [lo + (hi - lo) * i / (n - 1) for i in range(n)]
    return [float(v) for v in args.list.split(",")]


def cmd_sweep(args: argparse.Namespace, argv: Sequence[str]) -> None:
    raw = json.loads(Path(args.device).read_text(encoding="utf-8"))
    values = _sweep_values(args)
    band = _band_pair(args.band) if args.band is not None else None
    if args.report in ("suppression", "rates") and band is None:
        raise ValueError(f"--band is required for --report {args.report}")

    header: tuple[str, ...]
    rows: list[tuple[float, ...]] = []
    for value in values:
        data = copy.deepcopy(raw)
        _set_dotted(data, args.param, value)
        device = device_from_dict(data, strict=args.strict)
        wg = device.waveguide
        if args.report == "isolation":
            header = ("param_value", "isolation_db")
            rows.append((value, isolation_db(device.kappa, device.dc_length)))
        elif args.report == "kerr":
            header = ("param_value", "kerr_metric")
            wavelength = TWO_PI * C_VACUUM / wg.omega_ref
            rows.append(
                (value, kerr_validity_metric(wg, args.power, device.ring1.q_loaded, wavelength))
            )
        elif args.report == "suppression":
            header = ("param_value", "suppression", "detuning_1", "detuning_2")
            cfg = resonant_config(device, band, pump_separation=args.separation)
            comb2 = resonance_comb(device.ring2, wg, band, owner=2)
            d1 = sideband_detuning(comb2, cfg, pump=1)
            d2 = sideband_detuning(comb2, cfg, pump=2)
            lw = cfg.res_s.linewidth
            worst = max(suppression_factor(d1, lw), suppression_factor(d2, lw))
            rows.append((value, worst, d1, d2))
        else:
            header = ("param_value", "signal_rate", "parasitic_rate")
            cfg = resonant_config(device, band, pump_separation=args.separation)
            drive = PumpDrive(photon_number=args.photons, pulse_duration=args.pulse)
            rep = noise_budget(device, drive, cfg, kcal=args.kcal, band=band)
            rows.append(
                (
                    value,
                    rep.per_second(rep.beta_sq_signal),
                    max(rep.per_second(b) for b in rep.beta_sq_parasitic),
                )
            )
    _emit(args.out, _csv_text(header, rows), argv)


def _add_common(p: argparse.ArgumentParser, band: bool = False) -> None:
    p.add_argument("--device", required=True, help="device JSON path")
    p.add_argument("--out", default=None, help="output path (stdout when omitted)")
    p.add_argument("--strict", action="store_true", help="treat model warnings as errors")
    if band:
        p.add_argument(
            "--band",
            nargs="+",
            required=True,
            metavar="EDGE",
            help="band edges 'LO HI' or 'LO:HI'; bare numbers are Hz, "
            "suffixes nm/um/GHz/THz supported",
        )


def _add_drive(p: argparse.ArgumentParser) -> None:
    p.add_argument("--photons", type=float, default=1.0, help="pump photons per pulse")
    p.add_argument("--pulse", type=float, default=1e-9, help="pulse duration [s]")
    p.add_argument("--kcal", type=float, default=1.0, help="hardware calibration constant")
    p.add_argument(
        "--self-coupling",
        type=float,
        default=None,
        help="bus self-coupling sigma (derived from finesse when omitted)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringpair",
        description="design and simulate a linearly uncoupled racetrack pair",
    )
    sub = parser.add_subparsers(dest="op", required=True)

    p = sub.add_parser("spectrum", help="per-ring intensity enhancement spectrum (CSV)")
    _add_common(p, band=True)
    p.add_argument("--points", type=int, default=2001, help="number of frequency samples")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("overlap", help="nonlinear overlap figure J (JSON)")
    _add_common(p, band=True)
    p.add_argument("--separation", type=int, default=2, help="pump separation in ring-1 orders")
    p.add_argument(
        "--method",
        choices=("quadrature", "closed-form"),
        default="quadrature",
        help="overlap evaluation method",
    )
    p.set_defaults(func=cmd_overlap)

    p = sub.add_parser("rates", help="signal and parasitic pair rates (JSON)")
    _add_common(p, band=True)
    p.add_argument("--separation", type=int, default=2)
    _add_drive(p)
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("suppression", help="suppression versus detuning sweep (CSV)")
    _add_common(p, band=True)
    p.add_argument("--separation", type=int, default=2)
    p.add_argument("--max-detuning", type=float, default=60.0, help="sweep end [linewidths]")
    p.add_argument("--points", type=int, default=121)
    _add_drive(p)
    p.set_defaults(func=cmd_suppression)

    p = sub.add_parser("kerr-check", help="Kerr budget and compensating shifts (JSON)")
    _add_common(p)
    p.add_argument("--power", type=float, required=True, help="per-pump input power [W]")
    p.add_argument("--max-metric", type=float, default=0.05, help="validity metric ceiling")
    p.set_defaults(func=cmd_kerr_check)

    p = sub.add_parser("optimize", help="tune a seed device against a design goal")
    _add_common(p)
    p.add_argument("--signal", required=True, help="signal line position (e.g. 1550nm)")
    p.add_argument("--separation", type=int, default=2)
    p.add_argument("--suppression", type=float, default=1e-4, help="suppression target")
    p.add_argument("--max-kerr", type=float, default=0.05)
    p.add_argument("--min-isolation", type=float, default=30.0, help="isolation floor [dB]")
    p.add_argument("--gap-min", type=float, default=5e-8, help="gap budget lower edge [m]")
    p.add_argument("--gap-max", type=float, default=1e-6, help="gap budget upper edge [m]")
    p.add_argument("--mode", choices=("trim", "fabrication"), default="fabrication")
    p.add_argument("--photons", type=float, default=None, help="enable Kerr rules at this drive")
    p.add_argument("--pulse", type=float, default=1e-9)
    p.add_argument("--report", default=None, help="design report path (stdout when omitted)")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="one-parameter sweep of a summary figure (CSV)")
    _add_common(p)
    p.add_argument(
        "--band", nargs="+", default=None, metavar="EDGE", help="band for comb-based reports"
    )
    p.add_argument(
        "--param",
        required=True,
        help="dotted JSON path of the swept entry, e.g. dc.gap_m or ring2.q_coupling",
    )
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument(
        "--values", nargs=3, metavar=("LO", "HI", "N"), help="linear range with N points"
    )
    group.add_argument("--list", help="comma-separated explicit values")
    p.add_argument(
        "--report",
        choices=("isolation", "kerr", "suppression", "rates"),
        default="isolation",
    )
    p.add_argument("--separation", type=int, default=2)
    p.add_argument("--power", type=float, default=0.0, help="pump power for the kerr report [W]")
    _add_drive(p)
    p.set_defaults(func=cmd_sweep)

    return parser


def _fail(code: int, exc: BaseException) -> int:
    payload = {
        "code": code,
        "message": str(exc),
        "context": {"error": type(exc).__name__},
    }
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    argv = list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args, argv)
    except _INFEASIBLE_ERRORS as exc:
        return _fail(EXIT_INFEASIBLE, exc)
    except _NUMERICAL_ERRORS as exc:
        return _fail(EXIT_NUMERICAL, exc)
    except _VALIDATION_ERRORS as exc:
        return _fail(EXIT_VALIDATION, exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
