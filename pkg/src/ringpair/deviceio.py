"""Device file format: versioned JSON with SI units at the boundary.

Lengths are meters, frequencies are plain Hz in the file; internally
everything is angular (rad/s). The format is versioned through a
mandatory ``"schema": 1`` key so that future revisions can migrate old
files instead of misreading them.

Unknown keys are tolerated by default (and reported back to the
caller) so that annotated device files keep loading; strict mode
rejects them, which is what the CLI ``--strict`` flag uses.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from typing import Any

from .geometry import CouplingModel, DeviceSpec, RacetrackSpec, WaveguideParams

SCHEMA_VERSION = 1

_WG_REQUIRED = ("n_eff_ref", "n_g", "freq_ref_hz")
_WG_OPTIONAL = {
    "gvd_s2_per_m": 0.0,
    "gamma_nl_w_m": 0.0,
    "chi3_m2_v2": 0.0,
    "n_bar": 1.0,
    "area_eff_m2": 1.0,
}
_RING_REQUIRED = ("straight_len_m", "bend_radius_m", "q_intrinsic", "q_coupling")
_RING_OPTIONAL = {"heater_shift_hz": 0.0}
_DC_REQUIRED = ("length_m", "gap_m")
_CM_REQUIRED = ("kappa0_per_m", "gap_ref_m", "decay_len_m")
_CM_OPTIONAL = {"phase_rad": 0.0}


def _require_number(section: str, data: dict, key: str) -> float:
    if key not in data:
        raise ValueError(f"device file: missing key '{section}.{key}'")
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"device file: '{section}.{key}' must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"device file: '{section}.{key}' must be finite, got {value!r}")
    return value


def _read_section(
    data: dict,
    name: str,
    required: tuple[str, ...],
    optional: dict[str, float],
    strict: bool,
    unknown: list[str],
) -> dict[str, float]:
    if name not in data:
        raise ValueError(f"device file: missing section '{name}'")
    section = data[name]
    if not isinstance(section, dict):
        raise ValueError(f"device file: section '{name}' must be an object")
    out = {key: _require_number(name, section, key) for key in required}
    for key, default in optional.items():
        out[key] = _require_number(name, section, key) if key in section else default
    extra = sorted(set(section) - set(required) - set(optional))
    for key in extra:
        unknown.append(f"{name}.{key}")
    if strict and extra:
        raise ValueError(f"device file: unknown keys in '{name}': {', '.join(extra)}")
    return out


def device_from_dict(data: dict[str, Any], strict: bool = False) -> DeviceSpec:
    """Build a :class:`DeviceSpec` from parsed JSON.

    Raises ``ValueError`` on any structural problem: wrong schema
    version, missing or non-numeric fields, and (in strict mode)
    unknown keys. Physical validation is delegated to the value types.
    """
    device, _ = device_from_dict_verbose(data, strict=strict)
    return device


def device_from_dict_verbose(
    data: dict[str, Any], strict: bool = False
) -> tuple[DeviceSpec, list[str]]:
    """Same as :func:`device_from_dict` but also reports unknown keys."""
    if not isinstance(data, dict):
        raise ValueError("device file: top level must be a JSON object")
    if data.get("schema") != SCHEMA_VERSION:
        raise ValueError(
            f"device file: expected \"schema\": {SCHEMA_VERSION}, got {data.get('schema')!r}"
        )
    unknown: list[str] = []
    known_top = {"schema", "waveguide", "ring1", "ring2", "dc", "coupling_model"}
    extra_top = sorted(set(data) - known_top)
    for key in extra_top:
        unknown.append(key)
    if strict and extra_top:
        raise ValueError(f"device file: unknown top-level keys: {', '.join(extra_top)}")

    wg_d = _read_section(data, "waveguide", _WG_REQUIRED, _WG_OPTIONAL, strict, unknown)
    r1_d = _read_section(data, "ring1", _RING_REQUIRED, _RING_OPTIONAL, strict, unknown)
    r2_d = _read_section(data, "ring2", _RING_REQUIRED, _RING_OPTIONAL, strict, unknown)
    dc_d = _read_section(data, "dc", _DC_REQUIRED, {}, strict, unknown)
    cm_d = _read_section(data, "coupling_model", _CM_REQUIRED, _CM_OPTIONAL, strict, unknown)

    two_pi = 2.0 * math.pi
    wg = WaveguideParams(
        n_eff_ref=wg_d["n_eff_ref"],
        n_g=wg_d["n_g"],
        omega_ref=two_pi * wg_d["freq_ref_hz"],
        gvd=wg_d["gvd_s2_per_m"],
        gamma_nl=wg_d["gamma_nl_w_m"],
        chi3_bar=wg_d["chi3_m2_v2"],
        n_bar=wg_d["n_bar"],
        area_eff=wg_d["area_eff_m2"],
    )

    def ring(d: dict[str, float]) -> RacetrackSpec:
        return RacetrackSpec(
            straight_len=d["straight_len_m"],
            bend_radius=d["bend_radius_m"],
            q_intrinsic=d["q_intrinsic"],
            q_coupling=d["q_coupling"],
            heater_shift=two_pi * d["heater_shift_hz"],
        )

    coupling = CouplingModel(
        kappa0=cm_d["kappa0_per_m"],
        gap_ref=cm_d["gap_ref_m"],
        decay_len=cm_d["decay_len_m"],
        phase=cm_d["phase_rad"],
    )
    try:
        device = DeviceSpec(
            waveguide=wg,
            ring1=ring(r1_d),
            ring2=ring(r2_d),
            dc_length=dc_d["length_m"],
            dc_gap=dc_d["gap_m"],
            coupling=coupling,
        )
    except ValueError as exc:
        raise ValueError(f"device file: {exc}") from exc
    return device, unknown


def device_to_dict(device: DeviceSpec) -> dict[str, Any]:
    """Serialize a device back to the file representation (Hz, meters)."""
    two_pi = 2.0 * math.pi
    wg = device.waveguide

    def ring(r: RacetrackSpec) -> dict[str, float]:
        return {
            "straight_len_m": r.straight_len,
            "bend_radius_m": r.bend_radius,
            "q_intrinsic": r.q_intrinsic,
            "q_coupling": r.q_coupling,
            "heater_shift_hz": r.heater_shift / two_pi,
        }

    return {
        "schema": SCHEMA_VERSION,
        "waveguide": {
            "n_eff_ref": wg.n_eff_ref,
            "n_g": wg.n_g,
            "freq_ref_hz": wg.omega_ref / two_pi,
            "gvd_s2_per_m": wg.gvd,
            "gamma_nl_w_m": wg.gamma_nl,
            "chi3_m2_v2": wg.chi3_bar,
            "n_bar": wg.n_bar,
            "area_eff_m2": wg.area_eff,
        },
        "ring1": ring(device.ring1),
        "ring2": ring(device.ring2),
        "dc": {"length_m": device.dc_length, "gap_m": device.dc_gap},
        "coupling_model": {
            "kappa0_per_m": device.coupling.kappa0,
            "gap_ref_m": device.coupling.gap_ref,
            "decay_len_m": device.coupling.decay_len,
            "phase_rad": device.coupling.phase,
        },
    }


def load_device(path: str | os.PathLike, strict: bool = False) -> DeviceSpec:
    """Load a device JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"device file: invalid JSON in {path}: {exc}") from exc
    return device_from_dict(data, strict=strict)


def write_text_atomic(path: str | os.PathLike, text: str) -> None:
    """Write a file atomically: temp file in the target dir, then rename.

    A crashed or interrupted run can never leave a partially written
    output behind; readers see either the old file or the new one.
    """
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def save_device(device: DeviceSpec, path: str | os.PathLike) -> None:
    """Serialize a device to JSON on disk (atomic, trailing newline)."""
    write_text_atomic(path, json.dumps(device_to_dict(device), indent=2) + "\n")
