"""End-to-end link algebra for the analog copper fronthaul.

Builds the frequency-sampled output = A*input + B*cable_noise model: per
signal, down-conversion to IF, routing onto a twisted pair through the passive
front-end, cable transfer (plus far-end crosstalk to other pairs), the mirror
front-end, and up-conversion back to RF.  A brute-force tone-level oracle that
tracks every cosine-mixing line is provided for tests.

Conversion convention: a real cosine mixer contributes amplitude 1/2 per
output line; we normalise each conversion by MIXER_NORM = 2 so the ideal
loss-free chain has unit gain, and all real conversion loss lives in
FrontEndSpec.insertion_loss_db (which calibration fits against measured
end-to-end attenuation).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .cable import CableSpec, FrontEndSpec, NoiseModel, fext_gain, frontend_gain, pair_insertion_gain

MIXER_NORM = 2.0

# Slack applied to band-membership decisions so that assembler and oracle make
# identical calls at band edges despite different arithmetic paths.
BAND_EDGE_SLACK_HZ = 0.5

MAX_INPUT_POWER_DBM = 5.0
RECOMMENDED_INPUT_POWER_DBM = 0.0


@dataclass(frozen=True)
class SignalSpec:
    """One RF signal applied to a converter port."""

    id: int
    rf_center_hz: float
    bandwidth_hz: float
    rat: str = "Generic"
    tx_power_dbm: float = 0.0

    def __post_init__(self):
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz must be > 0")
        if self.rf_center_hz <= self.bandwidth_hz / 2:
            raise ValueError("rf_center_hz must exceed half the bandwidth")
        if self.tx_power_dbm > MAX_INPUT_POWER_DBM:
            raise ValueError(f"tx power {self.tx_power_dbm} dBm exceeds the +5 dBm hard limit")
        if self.tx_power_dbm > RECOMMENDED_INPUT_POWER_DBM:
            warnings.warn(
                f"signal {self.id}: {self.tx_power_dbm} dBm exceeds the recommended 0 dBm input",
                stacklevel=2,
            )


@dataclass(frozen=True)
class LoPlan:
    """Down- and up-conversion LO frequencies, one entry per signal."""

    f_down_hz: tuple[float, ...]
    f_up_hz: tuple[float, ...]

    def __post_init__(self):
        if len(self.f_down_hz) != len(self.f_up_hz):
            raise ValueError("f_down_hz and f_up_hz must have equal length")
        if any(f <= 0 for f in self.f_down_hz + self.f_up_hz):
            raise ValueError("LO frequencies must be > 0")

    @classmethod
    def matched(cls, f_lo_hz) -> "LoPlan":
        f = tuple(float(x) for x in f_lo_hz)
        return cls(f, f)

    def detuned(self, n: int, delta_hz: float) -> "LoPlan":
        """Copy with the n-th up-conversion LO offset by delta_hz."""
        f_up = list(self.f_up_hz)
        f_up[n] += delta_hz
        return LoPlan(self.f_down_hz, tuple(f_up))


def if_of(rf_center_hz: float, f_lo_hz: float) -> tuple[float, bool]:
    """IF centre and band-inversion flag for one mixing stage.

    High-side injection (LO above RF) mirrors the spectrum; zero-IF is
    rejected because the passive design cannot separate it.
    """
    if f_lo_hz == rf_center_hz:
        raise ValueError("zero-IF (LO equal to RF centre) is unsupported")
    return abs(f_lo_hz - rf_center_hz), f_lo_hz > rf_center_hz


@dataclass
class EffectiveChannel:
    """Frequency-sampled matrices of the end-to-end model.

    ``a[g]`` is the N x N signal matrix and ``b[g]`` the N x L cable-noise
    coupling matrix at baseband offset ``freq_grid_hz[g]``.  Immutable after
    construction by convention.
    """

    freq_grid_hz: np.ndarray
    a: np.ndarray  # (G, N, N) complex
    b: np.ndarray  # (G, N, L) complex
    if_centers_hz: np.ndarray  # (N,)
    inverted: np.ndarray  # (N,) bool
    pair_of: np.ndarray  # (N,) int
    n_pairs: int

    @property
    def n_signals(self) -> int:
        return self.a.shape[1]

    def grid_index(self, delta_hz: float) -> int:
        return int(np.argmin(np.abs(self.freq_grid_hz - delta_hz)))

    def at(self, delta_hz: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        g = self.grid_index(delta_hz)
        return self.a[g], self.b[g]

    def to_csv(self, path) -> None:
        """Write the A matrix samples as rows (delta_hz, n, m, re, im)."""
        with open(path, "w", newline="") as fh:
            fh.write("delta_hz,n,m,re,im\n")
            for g, d in enumerate(self.freq_grid_hz):
                for n in range(self.a.shape[1]):
                    for m in range(self.a.shape[2]):
                        v = self.a[g, n, m]
                        fh.write(f"{d:.10g},{n},{m},{v.real:.10g},{v.imag:.10g}\n")


def default_grid(signals, n_points: int = 64) -> np.ndarray:
    """Baseband offset grid spanning the widest signal's bandwidth."""
    bw = max(s.bandwidth_hz for s in signals)
    return np.linspace(-bw / 2, bw / 2, n_points)


def _in_band(freq_hz, center_hz, bandwidth_hz):
    return np.abs(np.asarray(freq_hz) - center_hz) <= bandwidth_hz / 2 + BAND_EDGE_SLACK_HZ


def build_effective_channel(
    signals,
    mapping,
    cable: CableSpec,
    fe: FrontEndSpec,
    grid=None,
    fext_enabled: bool = True,
    fext_seed: int = 0,
    validate: bool = True,
) -> EffectiveChannel:
    """Assemble the A(delta) and B(delta) matrices on a baseband offset grid.

    Diagonal entries compose the two front-end traversals with the routed
    pair's transfer at the signal's IF; off-diagonal entries exist only
    between signals on different pairs with overlapping IF bands and carry
    the FEXT coupling inserted between the front-end traversals.
    """
    if validate:
        from .mapping import validate_mapping

        violations = validate_mapping(signals, mapping, fe)
        if violations:
            lines = "; ".join(str(v) for v in violations)
            raise ValueError(f"invalid mapping: {lines}")

    n_sig = len(signals)
    grid = default_grid(signals) if grid is None else np.asarray(grid, dtype=float)
    n_pairs = mapping.space.shape[0]
    pair_of = np.array([int(np.argmax(mapping.space[:, n])) for n in range(n_sig)])
    if_centers = np.empty(n_sig)
    inverted = np.empty(n_sig, dtype=bool)
    for n, s in enumerate(signals):
        if_centers[n], inverted[n] = if_of(s.rf_center_hz, mapping.lo_plan.f_down_hz[n])
    sigma = np.where(inverted, -1.0, 1.0)

    a = np.zeros((len(grid), n_sig, n_sig), dtype=complex)
    b = np.zeros((len(grid), n_sig, n_pairs), dtype=complex)

    for n in range(n_sig):
        phi = if_centers[n] + sigma[n] * grid
        chain = frontend_gain(phi, fe) ** 2 * pair_insertion_gain(phi, cable, pair_of[n])
        a[:, n, n] = np.conj(chain) if inverted[n] else chain

        # cable-noise coupling: one front-end traversal at the receive side
        phi_b = if_centers[n] + grid
        hb = frontend_gain(phi_b, fe)
        for l in range(n_pairs):
            if l == pair_of[n]:
                w = np.ones(len(grid), dtype=complex)
            elif fext_enabled:
                w = fext_gain(phi_b, l, int(pair_of[n]), cable, seed=fext_seed)
            else:
                continue
            col = hb * w
            b[:, n, l] = np.conj(col) if inverted[n] else col

        if not fext_enabled:
            continue
        for m in range(n_sig):
            if m == n or pair_of[m] == pair_of[n]:
                continue
            phi_m = if_centers[m] + sigma[m] * grid
            gate = _in_band(phi_m, if_centers[n], signals[n].bandwidth_hz)
            if not np.any(gate):
                continue
            x = (
                frontend_gain(phi_m, fe) ** 2
                * fext_gain(phi_m, int(pair_of[m]), int(pair_of[n]), cable, seed=fext_seed)
            )
            x = np.where(gate, x, 0.0)
            a[:, n, m] = np.conj(x) if inverted[n] else x

    return EffectiveChannel(
        freq_grid_hz=grid,
        a=a,
        b=b,
        if_centers_hz=if_centers,
        inverted=inverted,
        pair_of=pair_of,
        n_pairs=n_pairs,
    )


def _mix_lines(lines, f_lo):
    """Real-cosine mixing of positive-frequency lines; negative products fold
    back with conjugation (band inversion)."""
    out = []
    for f, amp in lines:
        half = amp * 0.5 * MIXER_NORM
        out.append((f + f_lo, half))
        fd = f - f_lo
        if fd >= 0:
            out.append((fd, half))
        else:
            out.append((-fd, np.conj(half)))
    merged = {}
    for f, amp in out:
        key = round(f, 3)
        merged[key] = merged.get(key, 0j) + amp
    return [(f, a) for f, a in merged.items()]


def tone_oracle(
    signals,
    mapping,
    cable: CableSpec,
    fe: FrontEndSpec,
    n: int,
    delta_hz: float,
    m: int | None = None,
    fext_enabled: bool = True,
    fext_seed: int = 0,
    return_freq: bool = False,
):
    """Brute-force single-tone propagation through the full chain.

    Injects a unit tone at signal ``m``'s RF centre plus ``delta_hz``, tracks
    every mixing line through down-conversion, front-end filtering, the cable
    pair (or FEXT path when ``m`` and ``n`` sit on different pairs), the
    mirror front-end and up-conversion with ``n``'s LO, then sums the lines
    landing in ``n``'s RF output band.  Test-only reference for the assembled
    A-matrix entries.
    """
    if m is None:
        m = n
    pair_of = [int(np.argmax(mapping.space[:, k])) for k in range(len(signals))]
    l_m, l_n = pair_of[m], pair_of[n]
    if m != n and l_m != l_n and not fext_enabled:
        return (0j, np.nan) if return_freq else 0j

    lines = [(signals[m].rf_center_hz + delta_hz, 1 + 0j)]
    lines = _mix_lines(lines, mapping.lo_plan.f_down_hz[m])
    lines = [(f, a * frontend_gain(f, fe)) for f, a in lines]
    if l_m == l_n:
        lines = [(f, a * pair_insertion_gain(f, cable, l_m)) for f, a in lines]
    else:
        lines = [(f, a * fext_gain(f, l_m, l_n, cable, seed=fext_seed)) if f > 0 else (f, 0j) for f, a in lines]
    lines = [(f, a * frontend_gain(f, fe)) for f, a in lines]
    lines = _mix_lines(lines, mapping.lo_plan.f_up_hz[n])

    if_n, inv_n = if_of(signals[n].rf_center_hz, mapping.lo_plan.f_down_hz[n])
    f_up = mapping.lo_plan.f_up_hz[n]
    out_center = f_up - if_n if inv_n else f_up + if_n
    selected = [(f, a) for f, a in lines if _in_band(f, out_center, signals[n].bandwidth_hz)]
    total = sum((a for _, a in selected), 0j)
    if return_freq:
        freq = max(selected, key=lambda fa: abs(fa[1]))[0] if selected else np.nan
        return total, freq
    return total


def output_noise_psd(
    effch: EffectiveChannel, noise: NoiseModel, n: int, delta_hz: float = 0.0
) -> float:
    """Output noise density at port ``n`` in dBm/Hz.

    Sums the cable ingress noise through the B row and the antenna thermal
    noise through the direct A entry, in linear power.
    """
    g = effch.grid_index(delta_hz)
    cable_lin = 10.0 ** (noise.cable_noise_dbm_hz / 10.0)
    ant_lin = 10.0 ** (noise.antenna_noise_dbm_hz / 10.0)
    total = cable_lin * float(np.sum(np.abs(effch.b[g, n, :]) ** 2))
    total += ant_lin * float(np.abs(effch.a[g, n, n]) ** 2)
    return 10.0 * np.log10(total)
