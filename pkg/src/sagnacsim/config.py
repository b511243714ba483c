"""Strict JSON run configuration.

Unknown keys are rejected by name so a typo cannot silently change the
physics. Angles live in degrees at this boundary and are converted to
radians on load; every physics invariant is checked here, at load time,
by constructing the domain objects.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from .errors import ConfigError
from .ifo import IfoParams, InjectionParams
from .opo import FixedCavity, OpoParams, SqueezingObservation
from .quadrature import EfficiencyChain, FrequencyGrid, LossElement

MODES = ("opo-curve", "opo-fit", "ifo-spectrum", "angle-sweep", "loss-budget")


@dataclass(frozen=True)
class RunConfig:
    mode: str
    output: Optional[str] = None
    grid: Optional[FrequencyGrid] = None
    opo: Optional[OpoParams] = None
    opo_fixed: Optional[FixedCavity] = None
    observations: Optional[tuple[SqueezingObservation, ...]] = None
    ifo: Optional[IfoParams] = None
    injection: Optional[InjectionParams] = None
    losses: Optional[EfficiencyChain] = None
    angles: Optional[tuple[float, ...]] = None


def _check_keys(block: dict, allowed: set[str], required: set[str], where: str) -> None:
    for key in block:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}")
    for key in required:
        if key not in block:
            raise ConfigError(f"missing required key {key!r} in {where}")


def _number(block: dict, key: str, where: str) -> float:
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"key {key!r} in {where} must be a number")
    return float(value)


def _integer(block: dict, key: str, where: str) -> int:
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"key {key!r} in {where} must be an integer")
    return value


def _boolean(block: dict, key: str, where: str) -> bool:
    value = block[key]
    if not isinstance(value, bool):
        raise ConfigError(f"key {key!r} in {where} must be true or false")
    return value


def _string(block: dict, key: str, where: str) -> str:
    value = block[key]
    if not isinstance(value, str):
        raise ConfigError(f"key {key!r} in {where} must be a string")
    return value


def _dict(value: Any, where: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{where} must be an object")
    return value


def _parse_grid(block: dict) -> FrequencyGrid:
    _check_keys(block, {"f_min_hz", "f_max_hz", "points"},
                {"f_min_hz", "f_max_hz", "points"}, "grid block")
    return FrequencyGrid(
        f_min=_number(block, "f_min_hz", "grid block"),
        f_max=_number(block, "f_max_hz", "grid block"),
        points=_integer(block, "points", "grid block"),
    )


_OPO_KEYS = {
    "output_coupler_transmission",
    "intracavity_loss",
    "refractive_index",
    "round_trip_length_m",
    "pump_ratio",
    "eta_total",
}
_OPO_FIXED_KEYS = {"output_coupler_transmission", "refractive_index", "round_trip_length_m"}


def _parse_opo(block: dict) -> OpoParams:
    _check_keys(block, _OPO_KEYS, _OPO_KEYS, "opo block")
    return OpoParams(
        output_coupler_t=_number(block, "output_coupler_transmission", "opo block"),
        intracavity_loss=_number(block, "intracavity_loss", "opo block"),
        refractive_index=_number(block, "refractive_index", "opo block"),
        round_trip_length=_number(block, "round_trip_length_m", "opo block"),
        pump_ratio=_number(block, "pump_ratio", "opo block"),
        eta_total=_number(block, "eta_total", "opo block"),
    )


def _parse_opo_fixed(block: dict) -> FixedCavity:
    for key in block:
        if key in _OPO_KEYS - _OPO_FIXED_KEYS:
            raise ConfigError(
                f"key {key!r} is fitted in opo-fit mode and may not appear in the opo block"
            )
    _check_keys(block, _OPO_FIXED_KEYS, _OPO_FIXED_KEYS, "opo block")
    return FixedCavity(
        output_coupler_t=_number(block, "output_coupler_transmission", "opo block"),
        refractive_index=_number(block, "refractive_index", "opo block"),
        round_trip_length=_number(block, "round_trip_length_m", "opo block"),
    )


def _parse_observations(items: Any) -> tuple[SqueezingObservation, ...]:
    if not isinstance(items, list) or not items:
        raise ConfigError("observations must be a non-empty list")
    out = []
    for i, raw in enumerate(items):
        where = f"observations[{i}]"
        block = _dict(raw, where)
        _check_keys(
            block,
            {"frequency_hz", "squeeze_db", "antisqueeze_db", "eta_label",
             "known_external_eta"},
            {"frequency_hz", "squeeze_db"},
            where,
        )
        out.append(
            SqueezingObservation(
                frequency_hz=_number(block, "frequency_hz", where),
                squeeze_db=_number(block, "squeeze_db", where),
                antisqueeze_db=(
                    _number(block, "antisqueeze_db", where)
                    if "antisqueeze_db" in block else None
                ),
                eta_label=(
                    _string(block, "eta_label", where)
                    if "eta_label" in block else "default"
                ),
                known_external_eta=(
                    _number(block, "known_external_eta", where)
                    if "known_external_eta" in block else None
                ),
            )
        )
    return tuple(out)


def _parse_ifo(block: dict) -> IfoParams:
    allowed = {
        "topology", "mass_kg", "arm_length_m", "circulating_power_w",
        "linewidth_hz", "linewidth_is_half_width", "wavelength_m",
        "kappa_calibration", "kappa_dc_override",
    }
    required = {"topology", "mass_kg", "arm_length_m", "circulating_power_w",
                "linewidth_hz"}
    _check_keys(block, allowed, required, "ifo block")
    topology = _string(block, "topology", "ifo block")
    kwargs: dict[str, Any] = {}
    if "wavelength_m" in block:
        kwargs["wavelength_m"] = _number(block, "wavelength_m", "ifo block")
    if "linewidth_is_half_width" in block:
        kwargs["linewidth_is_half_width"] = _boolean(
            block, "linewidth_is_half_width", "ifo block")
    if "kappa_calibration" in block:
        kwargs["kappa_calibration"] = _number(block, "kappa_calibration", "ifo block")
    if "kappa_dc_override" in block:
        kwargs["kappa_dc_override"] = _number(block, "kappa_dc_override", "ifo block")
    return IfoParams(
        topology=topology,
        mass_kg=_number(block, "mass_kg", "ifo block"),
        arm_length_m=_number(block, "arm_length_m", "ifo block"),
        circulating_power_w=_number(block, "circulating_power_w", "ifo block"),
        linewidth_hz=_number(block, "linewidth_hz", "ifo block"),
        **kwargs,
    )


def _parse_loss_list(items: Any, where: str) -> EfficiencyChain:
    if not isinstance(items, list):
        raise ConfigError(f"{where} must be a list")
    elements = []
    for i, raw in enumerate(items):
        entry = f"{where}[{i}]"
        block = _dict(raw, entry)
        _check_keys(block, {"name", "loss"}, {"name", "loss"}, entry)
        elements.append(LossElement(_string(block, "name", entry),
                                    _number(block, "loss", entry)))
    return EfficiencyChain(tuple(elements))


def _parse_injection(block: dict) -> InjectionParams:
    allowed = {"squeeze_db", "squeeze_angle_deg", "readout_angle_deg",
               "injection_loss", "detection_loss"}
    _check_keys(block, allowed, {"squeeze_db", "readout_angle_deg"}, "injection block")
    eta_pre = 1.0
    if "injection_loss" in block:
        eta_pre = _parse_loss_list(block["injection_loss"], "injection_loss").efficiency()
    eta_post = 1.0
    if "detection_loss" in block:
        eta_post = _parse_loss_list(block["detection_loss"], "detection_loss").efficiency()
    squeeze_angle_deg = 90.0
    if "squeeze_angle_deg" in block:
        squeeze_angle_deg = _number(block, "squeeze_angle_deg", "injection block")
    return InjectionParams(
        squeeze_db=_number(block, "squeeze_db", "injection block"),
        squeeze_angle=math.radians(squeeze_angle_deg),
        eta_pre=eta_pre,
        eta_post=eta_post,
        readout_angle=math.radians(_number(block, "readout_angle_deg", "injection block")),
    )


def _parse_angles(items: Any) -> tuple[float, ...]:
    if not isinstance(items, list):
        raise ConfigError("angles_deg must be a list of numbers")
    out = []
    for i, value in enumerate(items):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"angles_deg[{i}] must be a number")
        out.append(math.radians(float(value)))
    return tuple(out)


# Which top-level blocks each mode requires (beyond "mode") and tolerates.
_MODE_BLOCKS = {
    "opo-curve": ({"opo", "grid"}, {"opo", "grid", "output"}),
    "opo-fit": ({"opo", "observations"}, {"opo", "observations", "output"}),
    "ifo-spectrum": ({"ifo", "injection", "grid"}, {"ifo", "injection", "grid", "output"}),
    "angle-sweep": (
        {"ifo", "injection", "grid", "angles_deg"},
        {"ifo", "injection", "grid", "angles_deg", "output"},
    ),
    "loss-budget": ({"losses"}, {"losses", "output"}),
}


def parse_config(doc: Any) -> RunConfig:
    """Validate a decoded JSON document into a :class:`RunConfig`."""
    block = _dict(doc, "config")
    if "mode" not in block:
        raise ConfigError("missing required key 'mode' in config")
    mode = _string(block, "mode", "config")
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    required, allowed = _MODE_BLOCKS[mode]
    _check_keys(block, allowed | {"mode"}, required | {"mode"}, f"{mode} config")

    output = _string(block, "output", "config") if "output" in block else None
    grid = _parse_grid(_dict(block["grid"], "grid block")) if "grid" in block else None

    kwargs: dict[str, Any] = {}
    if mode == "opo-curve":
        kwargs["opo"] = _parse_opo(_dict(block["opo"], "opo block"))
    elif mode == "opo-fit":
        kwargs["opo_fixed"] = _parse_opo_fixed(_dict(block["opo"], "opo block"))
        kwargs["observations"] = _parse_observations(block["observations"])
    elif mode in ("ifo-spectrum", "angle-sweep"):
        kwargs["ifo"] = _parse_ifo(_dict(block["ifo"], "ifo block"))
        kwargs["injection"] = _parse_injection(_dict(block["injection"], "injection block"))
        if mode == "angle-sweep":
            kwargs["angles"] = _parse_angles(block["angles_deg"])
    elif mode == "loss-budget":
        kwargs["losses"] = _parse_loss_list(block["losses"], "losses")

    return RunConfig(mode=mode, output=output, grid=grid, **kwargs)


def load_config(path: str | Path) -> RunConfig:
    """Load and validate a UTF-8 JSON config file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    return parse_config(doc)
