"""Link-level lab: simplified OFDM/QAM waveforms, the passive-chain impairment
pipeline (scaling, soft-limiter compression, gain, AWGN, LO detune) and the
measured metrics: EVM, crest factor, burst power, RSSI, CINR, carrier
frequency error and clock error, plus the MCS-to-throughput mapping.

Power convention: instantaneous |x|^2 is in mW, so a unit-average-power frame
sits at 0 dBm.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .mcs_tables import SPECTRAL_UTILIZATION, mcs_entry, mcs_table

EVM_FLOOR_DB = -100.0

# |x|/A at which the tanh soft limiter compresses by exactly 1 dB
_TANH_1DB_RATIO = 0.61253


def _qam_points(modulation: str) -> np.ndarray:
    if modulation == "QPSK":
        m = 2
    elif modulation == "QAM16":
        m = 4
    elif modulation == "QAM64":
        m = 8
    else:
        raise ValueError(f"unknown modulation {modulation!r}")
    axis = np.arange(-(m - 1), m, 2, dtype=float)
    pts = (axis[:, None] + 1j * axis[None, :]).ravel()
    return pts / np.sqrt(np.mean(np.abs(pts) ** 2))


_RAT_DEFAULT_BW = {"WiMAX": 7e6, "LTE": 5e6, "WiFi": 20e6, "Generic": 5e6}


@dataclass(frozen=True)
class WaveformSpec:
    """Simplified standard-like OFDM frame parameters."""

    rat: str = "WiMAX"
    bandwidth_hz: float | None = None
    modulation: str = "QAM16"
    code_rate: float = 0.75
    n_symbols: int = 30
    fft_size: int = 256
    n_occupied: int = 120
    cp_fraction: float = 0.25
    pilot_spacing: int = 8
    all_pilots: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.bandwidth_hz is None:
            object.__setattr__(self, "bandwidth_hz", _RAT_DEFAULT_BW.get(self.rat, 5e6))
        if self.n_occupied >= self.fft_size:
            raise ValueError("occupied carriers must be fewer than the FFT size")
        if not 0 <= self.cp_fraction <= 0.5:
            raise ValueError("cp_fraction must be in [0, 1/2]")

    @property
    def subcarrier_spacing_hz(self) -> float:
        return self.bandwidth_hz / self.n_occupied

    @property
    def sample_rate_hz(self) -> float:
        return self.subcarrier_spacing_hz * self.fft_size

    @property
    def carrier_indices(self) -> np.ndarray:
        """Occupied FFT bins, symmetric around (and excluding) DC."""
        half = self.n_occupied // 2
        neg = np.arange(-half, 0)
        pos = np.arange(1, self.n_occupied - half + 1)
        return np.concatenate([neg, pos])


@dataclass(frozen=True)
class ImpairmentChain:
    """Memoryless impairment pipeline of the analog chain."""

    gain_db: float = 0.0
    noise_psd_dbm_hz: float = -math.inf
    nonlin_clip_dbm: float = math.inf
    lo_detune_hz: float = 0.0
    sample_rate_hz: float = 10e6
    clock_offset_ppm: float = 0.0

    def require_rate_for(self, spec: WaveformSpec) -> None:
        if self.sample_rate_hz < 2 * spec.bandwidth_hz:
            raise ValueError("sample rate must be at least twice the occupied bandwidth")


@dataclass(frozen=True)
class LinkMetrics:
    evm_db: float
    crest_factor_db: float
    burst_power_dbm: float
    rssi_dbm: float
    cinr_db: float
    cfe_hz: float
    clock_error_ppm: float


@dataclass
class Waveform:
    spec: WaveformSpec
    samples: np.ndarray
    ref_symbols: np.ndarray  # (n_symbols, n_occupied)
    pilot_mask: np.ndarray  # (n_occupied,) bool, static comb

    @property
    def sample_rate_hz(self) -> float:
        return self.spec.sample_rate_hz


def gen_waveform(spec: WaveformSpec) -> Waveform:
    """Seeded OFDM frame with QAM payload, known comb pilots and unit average
    power."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=spec.seed, spawn_key=(0x0F,)))
    pts = _qam_points(spec.modulation)
    pilot_mask = np.zeros(spec.n_occupied, dtype=bool)
    pilot_mask[:: spec.pilot_spacing] = True
    if spec.all_pilots:
        pilot_mask[:] = True

    syms = pts[rng.integers(0, len(pts), size=(spec.n_symbols, spec.n_occupied))]
    pilot_vals = np.where(rng.integers(0, 2, size=spec.n_occupied) == 0, -1.0, 1.0) + 0j
    syms[:, pilot_mask] = pilot_vals[pilot_mask]

    cp = int(round(spec.cp_fraction * spec.fft_size))
    carriers = spec.carrier_indices
    frame = np.empty((spec.n_symbols, spec.fft_size + cp), dtype=complex)
    for s in range(spec.n_symbols):
        grid = np.zeros(spec.fft_size, dtype=complex)
        grid[carriers % spec.fft_size] = syms[s]
        x = np.fft.ifft(grid) * spec.fft_size / np.sqrt(spec.n_occupied)
        frame[s, :cp] = x[-cp:] if cp else x[:0]
        frame[s, cp:] = x
    samples = frame.ravel()
    scale = 1.0 / np.sqrt(np.mean(np.abs(samples) ** 2))
    return Waveform(spec=spec, samples=samples * scale, ref_symbols=syms, pilot_mask=pilot_mask)


def apply_chain(
    x: np.ndarray, chain: ImpairmentChain, input_power_dbm: float = 0.0, seed: int = 0
) -> np.ndarray:
    """Run samples through the impairment pipeline.

    Order: scale to the requested input power, tanh soft limiter with 1 dB
    compression at ``nonlin_clip_dbm``, linear gain, AWGN at the configured
    density over the sample rate, LO detune rotation.
    """
    x = np.asarray(x, dtype=complex)
    y = x * np.sqrt(10.0 ** (input_power_dbm / 10.0) / np.mean(np.abs(x) ** 2))
    if np.isfinite(chain.nonlin_clip_dbm):
        a_sat = np.sqrt(10.0 ** (chain.nonlin_clip_dbm / 10.0)) / _TANH_1DB_RATIO
        mag = np.abs(y)
        with np.errstate(invalid="ignore"):
            y = np.where(mag > 0, a_sat * np.tanh(mag / a_sat) * y / np.where(mag > 0, mag, 1.0), y)
    y = y * 10.0 ** (chain.gain_db / 20.0)
    if np.isfinite(chain.noise_psd_dbm_hz):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0xA3,)))
        sigma2 = 10.0 ** (chain.noise_psd_dbm_hz / 10.0) * chain.sample_rate_hz
        y = y + np.sqrt(sigma2 / 2) * (rng.standard_normal(len(y)) + 1j * rng.standard_normal(len(y)))
    if chain.lo_detune_hz:
        t = np.arange(len(y)) / chain.sample_rate_hz
        y = y * np.exp(2j * np.pi * chain.lo_detune_hz * t)
    return y


def measure_cfe(tx_ref: np.ndarray, rx: np.ndarray, sample_rate_hz: float, pad: int = 4) -> float:
    """Carrier frequency error estimate from the cross-spectrum peak.

    Resolution is one padded FFT bin: sample_rate / (pad * len)."""
    if len(tx_ref) != len(rx):
        raise ValueError("reference and received frames must have equal length")
    z = rx * np.conj(tx_ref)
    n_fft = pad * len(z)
    spec = np.fft.fft(z, n_fft)
    freqs = np.fft.fftfreq(n_fft, d=1.0 / sample_rate_hz)
    return float(freqs[int(np.argmax(np.abs(spec)))])


def _demod(wave: Waveform, rx: np.ndarray) -> tuple[np.ndarray, complex, float]:
    """Ideal pilot-based synchronisation: CFO derotation, per-symbol common
    phase from pilots, one-tap complex gain over the whole frame.

    Returns (corrected symbol grid, gain estimate, estimated CFE in Hz)."""
    spec = wave.spec
    cfe = measure_cfe(wave.samples, rx, spec.sample_rate_hz)
    t = np.arange(len(rx)) / spec.sample_rate_hz
    rx = rx * np.exp(-2j * np.pi * cfe * t)

    cp = int(round(spec.cp_fraction * spec.fft_size))
    sym_len = spec.fft_size + cp
    carriers = spec.carrier_indices % spec.fft_size
    y = np.empty_like(wave.ref_symbols)
    for s in range(spec.n_symbols):
        block = rx[s * sym_len + cp : (s + 1) * sym_len]
        y[s] = np.fft.fft(block)[carriers] * np.sqrt(spec.n_occupied) / spec.fft_size

    pm = wave.pilot_mask
    ref = wave.ref_symbols
    # per-symbol common phase from pilots, then a single complex gain
    for s in range(spec.n_symbols):
        rot = np.sum(y[s, pm] * np.conj(ref[s, pm]))
        if abs(rot) > 0:
            y[s] *= np.exp(-1j * np.angle(rot))
    num = np.sum(y[:, pm] * np.conj(ref[:, pm]))
    den = np.sum(np.abs(ref[:, pm]) ** 2)
    gain = num / den if den else 1.0
    # frame normalisation factor lost by gen_waveform's unit-power scaling
    return y, gain, cfe


def measure_evm(wave: Waveform, rx: np.ndarray) -> float:
    """EVM in dB over data carriers after one-tap pilot equalisation.

    A perfect loopback reports the floor value (-100 dB) instead of -inf.
    """
    if not np.any(wave.ref_symbols):
        raise ValueError("all-zero reference frame")
    y, gain, _ = _demod(wave, rx)
    dm = ~wave.pilot_mask if not wave.spec.all_pilots else wave.pilot_mask
    err = y[:, dm] / gain - wave.ref_symbols[:, dm]
    ref_rms = np.sqrt(np.mean(np.abs(wave.ref_symbols[:, dm]) ** 2))
    err_rms = np.sqrt(np.mean(np.abs(err) ** 2))
    if err_rms == 0:
        return EVM_FLOOR_DB
    return float(max(20.0 * np.log10(err_rms / ref_rms), EVM_FLOOR_DB))


def measure_crest_factor(x: np.ndarray) -> float:
    """Peak-to-rms ratio in dB."""
    rms = np.sqrt(np.mean(np.abs(x) ** 2))
    if rms == 0:
        raise ValueError("all-zero waveform")
    return float(20.0 * np.log10(np.max(np.abs(x)) / rms))


def measure_power_metrics(wave: Waveform, rx: np.ndarray) -> tuple[float, float, float]:
    """(rssi_dbm, burst_power_dbm, cinr_db) of a received frame.

    RSSI averages the whole capture; burst power averages the on-portion
    (envelope within 20 dB of its smoothed peak); CINR is the pilot-equalised
    signal-to-residual ratio, floor-limited at 60 dB for noise-free chains.
    """
    p_inst = np.abs(rx) ** 2
    rssi = 10.0 * np.log10(np.mean(p_inst))
    kernel = np.ones(32) / 32
    smooth = np.convolve(p_inst, kernel, mode="same")
    on = smooth > np.max(smooth) / 100.0
    burst = 10.0 * np.log10(np.mean(p_inst[on])) if np.any(on) else rssi

    y, gain, _ = _demod(wave, rx)
    sig = np.mean(np.abs(gain * wave.ref_symbols) ** 2)
    resid = np.mean(np.abs(y - gain * wave.ref_symbols) ** 2)
    cinr = 60.0 if resid == 0 else min(10.0 * np.log10(sig / resid), 60.0)
    return float(rssi), float(burst), float(cinr)


def clock_error_ppm(nominal_hz: float, measured_hz: float) -> float:
    """Fractional frequency error in parts per million."""
    if nominal_hz <= 0:
        raise ValueError("nominal frequency must be > 0")
    return 1e6 * (measured_hz - nominal_hz) / nominal_hz


def measure_link(
    wave: Waveform, chain: ImpairmentChain, input_power_dbm: float, seed: int = 0
) -> LinkMetrics:
    """Full measurement pass: run the chain and collect every link metric."""
    chain.require_rate_for(wave.spec)
    chain = replace(chain, sample_rate_hz=wave.spec.sample_rate_hz)
    rx = apply_chain(wave.samples, chain, input_power_dbm, seed=seed)
    _, _, cfe = _demod(wave, rx)
    rssi, burst, cinr = measure_power_metrics(wave, rx)
    nominal = 10e6
    return LinkMetrics(
        evm_db=measure_evm(wave, rx),
        crest_factor_db=measure_crest_factor(rx),
        burst_power_dbm=burst,
        rssi_dbm=rssi,
        cinr_db=cinr,
        cfe_hz=cfe,
        clock_error_ppm=clock_error_ppm(nominal, nominal * (1 + chain.clock_offset_ppm * 1e-6)),
    )


def throughput_mbps(
    snr_db: float,
    mcs_index: int,
    rat: str = "LTE",
    bandwidth_hz: float = 5e6,
    mimo_rank: int = 1,
    bler_slope_decades_per_db: float = 1.0,
) -> float:
    """Link-abstraction throughput for one MCS at the given post-eq SNR.

    At or above the MCS threshold the full table-derived rate is returned;
    below it the rate rolls off by ``bler_slope_decades_per_db`` decades per
    dB of shortfall (6 dB below threshold is effectively an outage).
    """
    entry = mcs_entry(rat, mcs_index)
    rate = entry.efficiency_bps_hz * bandwidth_hz * mimo_rank * SPECTRAL_UTILIZATION[rat] / 1e6
    short = entry.snr_threshold_db - snr_db
    if short <= 0:
        return rate
    return rate * 10.0 ** (-short * bler_slope_decades_per_db)
