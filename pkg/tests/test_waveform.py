"""Waveform lab: generation, impairments, metrics, throughput abstraction."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rocsim.mcs_tables import SPECTRAL_UTILIZATION, mcs_entry, mcs_table
from rocsim.waveform import (
    EVM_FLOOR_DB,
    ImpairmentChain,
    WaveformSpec,
    apply_chain,
    clock_error_ppm,
    gen_waveform,
    measure_cfe,
    measure_crest_factor,
    measure_evm,
    measure_link,
    measure_power_metrics,
    throughput_mbps,
)


class TestGeneration:
    def test_unit_average_power(self):
        wave = gen_waveform(WaveformSpec(seed=1))
        assert np.mean(np.abs(wave.samples) ** 2) == pytest.approx(1.0, abs=1e-3)

    def test_papr_in_expected_range(self):
        wave = gen_waveform(WaveformSpec(modulation="QAM16", seed=2))
        papr = measure_crest_factor(wave.samples)
        assert 6.0 <= papr <= 13.0

    def test_deterministic_in_seed(self):
        a = gen_waveform(WaveformSpec(seed=3))
        b = gen_waveform(WaveformSpec(seed=3))
        c = gen_waveform(WaveformSpec(seed=4))
        assert np.array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, c.samples)

    def test_rat_default_bandwidths(self):
        assert WaveformSpec(rat="WiMAX").bandwidth_hz == 7e6
        assert WaveformSpec(rat="LTE").bandwidth_hz == 5e6
        assert WaveformSpec(rat="WiFi").bandwidth_hz == 20e6

    def test_invalid_specs_rejected(self):
        with pytest.raises(ValueError):
            WaveformSpec(n_occupied=256, fft_size=256)
        with pytest.raises(ValueError):
            WaveformSpec(cp_fraction=0.75)


class TestChain:
    def test_identity_chain(self):
        wave = gen_waveform(WaveformSpec(seed=5))
        y = apply_chain(wave.samples, ImpairmentChain(), input_power_dbm=0.0)
        assert np.allclose(y, wave.samples)

    def test_gain_and_power_scaling(self):
        wave = gen_waveform(WaveformSpec(seed=5))
        y = apply_chain(wave.samples, ImpairmentChain(gain_db=-50.0), input_power_dbm=0.0)
        assert 10 * np.log10(np.mean(np.abs(y) ** 2)) == pytest.approx(-50.0, abs=0.1)

    def test_limiter_compresses_tone_by_1db_at_clip(self):
        n = 4096
        tone = np.exp(2j * np.pi * 0.01 * np.arange(n))
        chain = ImpairmentChain(nonlin_clip_dbm=0.0)
        y = apply_chain(tone, chain, input_power_dbm=0.0)
        drop = -10 * np.log10(np.mean(np.abs(y) ** 2))
        assert drop == pytest.approx(1.0, abs=0.02)

    def test_strong_overdrive_compresses_more(self):
        n = 4096
        tone = np.exp(2j * np.pi * 0.01 * np.arange(n))
        chain = ImpairmentChain(nonlin_clip_dbm=0.0)
        y = apply_chain(tone, chain, input_power_dbm=10.0)
        gain_compression = 10.0 - 10 * np.log10(np.mean(np.abs(y) ** 2))
        assert gain_compression >= 1.0

    def test_noise_seed_determinism(self):
        wave = gen_waveform(WaveformSpec(seed=6))
        chain = ImpairmentChain(noise_psd_dbm_hz=-140.0, sample_rate_hz=wave.sample_rate_hz)
        y1 = apply_chain(wave.samples, chain, 0.0, seed=11)
        y2 = apply_chain(wave.samples, chain, 0.0, seed=11)
        y3 = apply_chain(wave.samples, chain, 0.0, seed=12)
        assert np.array_equal(y1, y2)
        assert not np.array_equal(y1, y3)

    def test_rate_guard(self):
        spec = WaveformSpec(rat="WiFi")
        with pytest.raises(ValueError):
            ImpairmentChain(sample_rate_hz=10e6).require_rate_for(spec)


class TestMetrics:
    def test_loopback_evm_floor(self):
        wave = gen_waveform(WaveformSpec(seed=7))
        assert measure_evm(wave, wave.samples.copy()) == EVM_FLOOR_DB

    def test_evm_awgn_25db(self):
        wave = gen_waveform(WaveformSpec(seed=8, n_symbols=40))
        snr_db = 25.0
        psd = -10 * np.log10(wave.sample_rate_hz) - snr_db \
            + 10 * np.log10(wave.spec.fft_size / wave.spec.n_occupied)
        chain = ImpairmentChain(noise_psd_dbm_hz=psd, sample_rate_hz=wave.sample_rate_hz)
        rx = apply_chain(wave.samples, chain, 0.0, seed=1)
        assert measure_evm(wave, rx) == pytest.approx(-25.0, abs=0.3)

    @given(snr=st.floats(min_value=5.0, max_value=40.0), seed=st.integers(0, 1000))
    @settings(max_examples=25, deadline=None)
    def test_evm_snr_law(self, snr, seed):
        wave = gen_waveform(WaveformSpec(seed=9))
        psd = -10 * np.log10(wave.sample_rate_hz) - snr \
            + 10 * np.log10(wave.spec.fft_size / wave.spec.n_occupied)
        chain = ImpairmentChain(noise_psd_dbm_hz=psd, sample_rate_hz=wave.sample_rate_hz)
        rx = apply_chain(wave.samples, chain, 0.0, seed=seed)
        assert abs(measure_evm(wave, rx) + snr) <= 0.5

    def test_crest_factor_tone(self):
        tone = np.exp(2j * np.pi * 0.03 * np.arange(1024))
        assert measure_crest_factor(tone) == pytest.approx(0.0, abs=1e-9)

    def test_crest_factor_two_tones(self):
        n = np.arange(16384)
        x = np.exp(2j * np.pi * 0.0625 * n) + np.exp(2j * np.pi * 0.125 * n)
        assert measure_crest_factor(x) == pytest.approx(20 * np.log10(2 / np.sqrt(2)), abs=0.01)

    def test_clipping_reduces_crest_factor(self):
        wave = gen_waveform(WaveformSpec(seed=10))
        clipped = apply_chain(wave.samples, ImpairmentChain(nonlin_clip_dbm=-3.0), 0.0)
        assert measure_crest_factor(clipped) <= measure_crest_factor(wave.samples)

    def test_rssi_through_minus_50(self):
        wave = gen_waveform(WaveformSpec(seed=11))
        rx = apply_chain(wave.samples, ImpairmentChain(gain_db=-50.0), 0.0)
        rssi, bp, cinr = measure_power_metrics(wave, rx)
        assert rssi == pytest.approx(-50.0, abs=0.1)
        assert bp >= rssi - 1e-9
        assert cinr == 60.0  # noise-free: floor-limited

    def test_cinr_tracks_evm(self):
        wave = gen_waveform(WaveformSpec(seed=12))
        psd = -10 * np.log10(wave.sample_rate_hz) - 20.0
        chain = ImpairmentChain(noise_psd_dbm_hz=psd, sample_rate_hz=wave.sample_rate_hz)
        rx = apply_chain(wave.samples, chain, 0.0, seed=2)
        _, _, cinr = measure_power_metrics(wave, rx)
        assert abs(cinr + measure_evm(wave, rx)) <= 1.0


class TestCfe:
    @pytest.mark.parametrize("detune", [-10e3, -4183.0, -500.0, 700.0, 4183.0, 10e3])
    def test_recovery_within_one_bin(self, detune):
        wave = gen_waveform(WaveformSpec(seed=13))
        chain = ImpairmentChain(lo_detune_hz=detune, sample_rate_hz=wave.sample_rate_hz)
        rx = apply_chain(wave.samples, chain, 0.0)
        bin_hz = wave.sample_rate_hz / (4 * len(wave.samples))
        assert abs(measure_cfe(wave.samples, rx, wave.sample_rate_hz) - detune) <= bin_hz

    def test_clock_error_closed_forms(self):
        assert clock_error_ppm(10e6, 10e6) == 0.0
        assert clock_error_ppm(10e6, 10e6 + 0.5) == pytest.approx(0.05)
        with pytest.raises(ValueError):
            clock_error_ppm(0.0, 1.0)

    def test_measure_link_reports_detune(self):
        wave = gen_waveform(WaveformSpec(seed=14))
        chain = ImpairmentChain(lo_detune_hz=-4183.0, noise_psd_dbm_hz=-160.0,
                                sample_rate_hz=wave.sample_rate_hz, clock_offset_ppm=0.03)
        m = measure_link(wave, chain, 0.0, seed=3)
        bin_hz = wave.sample_rate_hz / (4 * len(wave.samples))
        assert abs(m.cfe_hz - (-4183.0)) <= bin_hz
        assert abs(m.clock_error_ppm) <= 0.05


class TestThroughput:
    def test_table_rate_at_high_snr(self):
        e = mcs_entry("LTE", 0)
        got = throughput_mbps(1e9, 0, "LTE", 5e6, 1)
        assert got == pytest.approx(e.efficiency_bps_hz * 5e6 * SPECTRAL_UTILIZATION["LTE"] / 1e6)

    def test_outage_6db_below(self):
        e = mcs_entry("LTE", 10)
        full = throughput_mbps(e.snr_threshold_db, 10)
        low = throughput_mbps(e.snr_threshold_db - 6.0, 10)
        assert low <= 1e-5 * full * 10 + 1e-9  # ~1e-6 of the full rate

    def test_monotone_in_snr(self):
        snrs = np.linspace(-10, 30, 81)
        rates = [throughput_mbps(s, 12) for s in snrs]
        assert all(b >= a for a, b in zip(rates, rates[1:]))

    def test_rank_scales_rate(self):
        assert throughput_mbps(50, 5, mimo_rank=2) == pytest.approx(2 * throughput_mbps(50, 5))

    def test_unknown_mcs(self):
        with pytest.raises(KeyError):
            throughput_mbps(10, 99)
        with pytest.raises(KeyError):
            throughput_mbps(10, 0, rat="LoRa")

    def test_tables_monotone(self):
        for rat in ("LTE", "WiFi", "WiMAX"):
            tab = mcs_table(rat)
            effs = [tab[i].efficiency_bps_hz for i in sorted(tab)]
            thrs = [tab[i].snr_threshold_db for i in sorted(tab)]
            assert all(b >= a for a, b in zip(effs, effs[1:]))
            assert all(b >= a for a, b in zip(thrs, thrs[1:]))
