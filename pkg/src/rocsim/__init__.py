"""Desk-scale simulator of an analog MIMO radio-over-copper fronthaul.

RF signals are frequency-shifted onto IF slots, multiplexed over the pairs of
a LAN cable through passive converter boxes, and restored at the far end; the
package models the resulting effective MIMO channel, validates and searches
pair/IF mappings, and measures beamforming SINR, waveform quality and
throughput on top of it.
"""

from .cable import (
    ATTEN_COEFFS,
    CableSpec,
    FrontEndSpec,
    NoiseModel,
    calibrate_chain,
    end_to_end_gain_db,
    fext_gain,
    frontend_gain,
    pair_insertion_gain,
    preset,
)
from .link import (
    EffectiveChannel,
    LoPlan,
    SignalSpec,
    build_effective_channel,
    if_of,
    output_noise_psd,
    tone_oracle,
)
from .mapping import (
    MappingViolation,
    Sf2sfMapping,
    ViolationKind,
    enumerate_frequency_plans,
    enumerate_space_mappings,
    exhaustive_search,
    greedy_mapping,
    validate_mapping,
)
from .beam import (
    BeamScenario,
    SinrCurve,
    matched_filter_weights,
    mvdr_weights,
    received_covariance,
    sinr_db,
    sweep_theta,
    ula_steering,
)
from .mcs_tables import McsEntry, mcs_entry, mcs_table
from .waveform import (
    ImpairmentChain,
    LinkMetrics,
    WaveformSpec,
    gen_waveform,
    measure_link,
    throughput_mbps,
)
from .config import ExperimentConfig, ConfigError, load_config, parse_config_text

__all__ = [
    "ATTEN_COEFFS",
    "BeamScenario",
    "CableSpec",
    "ConfigError",
    "EffectiveChannel",
    "ExperimentConfig",
    "FrontEndSpec",
    "ImpairmentChain",
    "LinkMetrics",
    "LoPlan",
    "MappingViolation",
    "McsEntry",
    "NoiseModel",
    "Sf2sfMapping",
    "SignalSpec",
    "SinrCurve",
    "ViolationKind",
    "WaveformSpec",
    "build_effective_channel",
    "calibrate_chain",
    "end_to_end_gain_db",
    "enumerate_frequency_plans",
    "enumerate_space_mappings",
    "exhaustive_search",
    "fext_gain",
    "frontend_gain",
    "gen_waveform",
    "greedy_mapping",
    "if_of",
    "load_config",
    "matched_filter_weights",
    "mcs_entry",
    "mcs_table",
    "measure_link",
    "mvdr_weights",
    "output_noise_psd",
    "pair_insertion_gain",
    "parse_config_text",
    "preset",
    "received_covariance",
    "sinr_db",
    "sweep_theta",
    "throughput_mbps",
    "tone_oracle",
    "ula_steering",
    "validate_mapping",
]

__version__ = "0.1.0"
