"""Flat sectioned plain-text experiment configuration.

Keys carry explicit unit suffixes (length_m, f_hz, power_dbm, ...).  Unknown
keys and sections are rejected; optional sections fall back to documented
defaults.  Packaged presets: fig5, fig6-50m, fig6-15m, fig7.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .cable import ATTEN_COEFFS, CableSpec, FrontEndSpec, NoiseModel, preset
from .link import MAX_INPUT_POWER_DBM, LoPlan, SignalSpec
from .mapping import Sf2sfMapping


class ConfigError(Exception):
    """Malformed configuration (schema level); maps to exit code 2."""


_KNOWN_KEYS = {
    "experiment": {"seed", "output_dir", "threads"},
    "cable": {
        "preset",
        "category",
        "length_m",
        "num_pairs",
        "atten_scale",
        "fext_ref_db",
        "fext_ref_hz",
        "noise_floor_dbm_hz",
        "velocity_factor",
        "pair_extra_loss_db",
    },
    "frontend": {
        "passband_min_hz",
        "passband_max_hz",
        "insertion_loss_db",
        "edge_order",
        "equalizer_tilt_db_per_hz",
        "design_length_m",
    },
    "noise": {"cable_noise_dbm_hz", "antenna_noise_dbm_hz"},
    "signal": {"rf_center_hz", "bandwidth_hz", "rat", "tx_power_dbm"},
    "mapping": {"space", "if_slots_hz", "injection", "max_per_pair", "lo_down_hz", "lo_up_hz"},
    "scenario": {
        "n_antennas",
        "element_spacing_wavelengths",
        "desired_theta_deg",
        "interferer_thetas_deg",
        "desired_power_dbm",
        "interferer_powers_dbm",
        "signal_bandwidth_hz",
        "theta_start_deg",
        "theta_stop_deg",
        "theta_step_deg",
        "fext_enabled",
        "n_sample_mappings",
        "scalarization",
    },
    "sweep": {
        "power_start_dbm",
        "power_stop_dbm",
        "power_step_dbm",
        "if_hz",
        "lo_detune_hz",
        "nonlin_clip_dbm",
        "noise_psd_dbm_hz",
        "n_symbols",
        "modulation",
        "rat",
        "tcxo_bound_ppm",
    },
    "calibrate": {"targets"},
    "throughput": {
        "rat",
        "bandwidth_hz",
        "mcs_min",
        "mcs_max",
        "mimo_rank",
        "if_hz",
        "tx_power_dbm",
        "noise_psd_dbm_hz",
        "interferer_rat",
        "interferer_if_hz",
        "interferer_power_dbm",
        "interferer_bandwidth_hz",
    },
}


@dataclass
class ExperimentConfig:
    """Parsed configuration: raw sections plus typed accessors."""

    sections: dict[str, dict[str, str]]
    path: str = ""

    def get(self, section: str, key: str, default=None) -> str | None:
        return self.sections.get(section, {}).get(key, default)

    def getfloat(self, section: str, key: str, default: float | None = None) -> float | None:
        raw = self.get(section, key)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key}: not a number: {raw!r}") from exc

    def getint(self, section: str, key: str, default: int | None = None) -> int | None:
        raw = self.get(section, key)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key}: not an integer: {raw!r}") from exc

    def getlist(self, section: str, key: str, default=None) -> list[float] | None:
        raw = self.get(section, key)
        if raw is None:
            return default
        try:
            return [float(v) for v in raw.replace(",", " ").split()]
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key}: not a number list: {raw!r}") from exc

    @property
    def seed(self) -> int:
        seed = self.getint("experiment", "seed")
        if seed is None:
            raise ConfigError("[experiment] seed is mandatory")
        return seed

    def cable(self) -> CableSpec:
        sec = self.sections.get("cable", {})
        if "preset" in sec:
            cable, _ = preset(sec["preset"])
            extra = self.getlist("cable", "pair_extra_loss_db")
            if extra is not None:
                cable = CableSpec(
                    category=cable.category,
                    length_m=cable.length_m,
                    num_pairs=cable.num_pairs,
                    atten_scale=cable.atten_scale,
                    pair_extra_loss_db=tuple(extra),
                )
            return cable
        kwargs = {}
        if "category" in sec:
            kwargs["category"] = sec["category"]
        for key, attr in [
            ("length_m", "length_m"),
            ("atten_scale", "atten_scale"),
            ("fext_ref_db", "fext_ref_db"),
            ("fext_ref_hz", "fext_ref_hz"),
            ("noise_floor_dbm_hz", "noise_floor_dbm_hz"),
            ("velocity_factor", "velocity_factor"),
        ]:
            v = self.getfloat("cable", key)
            if v is not None:
                kwargs[attr] = v
        n = self.getint("cable", "num_pairs")
        if n is not None:
            kwargs["num_pairs"] = n
        extra = self.getlist("cable", "pair_extra_loss_db")
        if extra is not None:
            kwargs["pair_extra_loss_db"] = tuple(extra)
        try:
            return CableSpec(**kwargs)
        except ValueError as exc:
            raise ConfigError(f"[cable]: {exc}") from exc

    def frontend(self) -> FrontEndSpec:
        sec = self.sections.get("frontend", {})
        if not sec and "preset" in self.sections.get("cable", {}):
            return preset(self.sections["cable"]["preset"])[1]
        kwargs = {}
        lo = self.getfloat("frontend", "passband_min_hz")
        hi = self.getfloat("frontend", "passband_max_hz")
        if lo is not None or hi is not None:
            kwargs["passband_hz"] = (lo if lo is not None else 50e6, hi if hi is not None else 450e6)
        for key in ["insertion_loss_db", "equalizer_tilt_db_per_hz", "design_length_m"]:
            v = self.getfloat("frontend", key)
            if v is not None:
                kwargs[key] = v
        order = self.getint("frontend", "edge_order")
        if order is not None:
            kwargs["edge_order"] = order
        try:
            return FrontEndSpec(**kwargs)
        except ValueError as exc:
            raise ConfigError(f"[frontend]: {exc}") from exc

    def noise(self) -> NoiseModel:
        return NoiseModel(
            cable_noise_dbm_hz=self.getfloat("noise", "cable_noise_dbm_hz", -140.0),
            antenna_noise_dbm_hz=self.getfloat("noise", "antenna_noise_dbm_hz", -174.0),
        )

    def signals(self) -> list[SignalSpec]:
        out = []
        for name in sorted(self.sections):
            if not name.startswith("signal."):
                continue
            sec = self.sections[name]
            try:
                idx = int(name.split(".", 1)[1])
                out.append(
                    SignalSpec(
                        id=idx,
                        rf_center_hz=float(sec["rf_center_hz"]),
                        bandwidth_hz=float(sec["bandwidth_hz"]),
                        rat=sec.get("rat", "Generic"),
                        tx_power_dbm=float(sec.get("tx_power_dbm", "0")),
                    )
                )
            except (KeyError, ValueError) as exc:
                raise ConfigError(f"[{name}]: {exc}") from exc
        return sorted(out, key=lambda s: s.id)

    def mapping(self, signals) -> Sf2sfMapping | None:
        sec = self.sections.get("mapping", {})
        if "space" not in sec:
            return None
        space = np.array([[int(v) for v in row.split()] for row in sec["space"].split(";")])
        max_per_pair = self.getint("mapping", "max_per_pair", 2)
        if "lo_down_hz" in sec:
            lo_down = tuple(self.getlist("mapping", "lo_down_hz"))
            lo_up = tuple(self.getlist("mapping", "lo_up_hz", list(lo_down)))
            return Sf2sfMapping(space, LoPlan(lo_down, lo_up), max_per_pair)
        slots = self.getlist("mapping", "if_slots_hz")
        if slots is None:
            raise ConfigError("[mapping] needs lo_down_hz or if_slots_hz")
        injection = self.get("mapping", "injection", "high")
        lo = []
        per_pair_count: dict[int, int] = {}
        for n, s in enumerate(signals):
            pair = int(np.argmax(space[:, n]))
            slot = slots[per_pair_count.get(pair, 0) % len(slots)]
            per_pair_count[pair] = per_pair_count.get(pair, 0) + 1
            lo.append(s.rf_center_hz + slot if injection == "high" else s.rf_center_hz - slot)
        return Sf2sfMapping(space, LoPlan.matched(lo), max_per_pair)

    def if_slots(self) -> list[float]:
        return self.getlist("mapping", "if_slots_hz", [50e6, 75e6, 175e6, 400e6])


def parse_config_text(text: str, path: str = "") -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"unparsable config: {exc}") from exc
    sections = {name: dict(parser[name]) for name in parser.sections()}
    for name, keys in sections.items():
        base = "signal" if name.startswith("signal.") else name
        if base not in _KNOWN_KEYS:
            raise ConfigError(f"unknown section [{name}]")
        unknown = set(keys) - _KNOWN_KEYS[base]
        if unknown:
            raise ConfigError(f"unknown key(s) in [{name}]: {sorted(unknown)}")
    return ExperimentConfig(sections=sections, path=path)


def load_config(path_or_preset: str) -> ExperimentConfig:
    """Load a config file; bare preset names resolve to packaged presets."""
    p = Path(path_or_preset)
    if p.exists():
        return parse_config_text(p.read_text(), str(p))
    candidate = resources.files("rocsim").joinpath("presets", f"{path_or_preset}.cfg")
    if candidate.is_file():
        return parse_config_text(candidate.read_text(), path_or_preset)
    raise ConfigError(f"config not found: {path_or_preset}")


def apply_overrides(cfg: ExperimentConfig, overrides: list[str]) -> ExperimentConfig:
    """Apply --set section.key=value pairs on top of the parsed config."""
    for item in overrides:
        try:
            dotted, value = item.split("=", 1)
            section, key = dotted.rsplit(".", 1)
        except ValueError as exc:
            raise ConfigError(f"malformed override {item!r}; expected section.key=value") from exc
        base = "signal" if section.startswith("signal.") else section
        if base not in _KNOWN_KEYS or key not in _KNOWN_KEYS[base]:
            raise ConfigError(f"unknown override target {dotted!r}")
        cfg.sections.setdefault(section, {})[key] = value
    return cfg


def validate_config(cfg: ExperimentConfig) -> list[str]:
    """Schema and physics diagnostics without running any experiment."""
    diags: list[str] = []
    try:
        cfg.seed
    except ConfigError as exc:
        diags.append(str(exc))

    cable = fe = None
    try:
        cable = cfg.cable()
    except ConfigError as exc:
        diags.append(str(exc))
    try:
        fe = cfg.frontend()
    except ConfigError as exc:
        diags.append(str(exc))

    for name in sorted(cfg.sections):
        if not name.startswith("signal."):
            continue
        sec = cfg.sections[name]
        power = float(sec.get("tx_power_dbm", "0"))
        if power > MAX_INPUT_POWER_DBM:
            diags.append(
                f"[{name}] tx_power_dbm={power} exceeds the +5 dBm hard input limit"
            )
        bw = float(sec.get("bandwidth_hz", "0"))
        if bw <= 0:
            diags.append(f"[{name}] bandwidth_hz must be > 0")

    if cable is not None and cable.length_m < 0:
        diags.append("[cable] length_m is negative")

    if fe is not None:
        for slot in cfg.getlist("mapping", "if_slots_hz", []) or []:
            if not fe.passband_hz[0] <= slot <= fe.passband_hz[1]:
                diags.append(
                    f"[mapping] if_slots_hz: slot {slot / 1e6:.1f} MHz outside the front-end passband"
                )
    return diags
