"""Frequency-domain models of the twisted-pair cable and the passive per-pair
RF/IF front-end chain (mixer + combiner + equalizer + balun), plus calibration
of the lumped chain loss against measured end-to-end attenuations.

All responses are passive (|gain| <= 1), reciprocal (same response in both
directions) and purely frequency-domain; time-domain line simulation is out of
scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

C_LIGHT = 299792458.0

# Insertion-loss polynomial coefficients (k1, k2, k3), dB per 100 m with f in
# MHz: loss = k1*sqrt(f) + k2*f + k3/sqrt(f).  Standard structured-cabling
# values per category; calibration may scale them.
ATTEN_COEFFS = {
    "Cat5": (2.100, 0.026, 0.050),
    "Cat5e": (1.967, 0.023, 0.050),
    "Cat6": (1.808, 0.017, 0.200),
    "Cat7": (1.800, 0.010, 0.200),
}


@dataclass(frozen=True)
class CableSpec:
    """One multi-pair LAN cable segment.

    ``atten_coeffs`` defaults to the category's published coefficients;
    ``atten_scale`` is the calibration knob multiplying the whole dB loss.
    ``pair_extra_loss_db`` optionally adds a flat per-pair loss (dB, one entry
    per pair) to model heterogeneous pairs.
    """

    category: str = "Cat5e"
    length_m: float = 50.0
    num_pairs: int = 4
    atten_coeffs: tuple[float, float, float] | None = None
    atten_scale: float = 1.0
    fext_ref_db: float = -65.0
    fext_ref_hz: float = 1e6
    noise_floor_dbm_hz: float = -140.0
    velocity_factor: float = 0.65
    pair_extra_loss_db: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.category not in ATTEN_COEFFS:
            raise ValueError(f"unknown cable category {self.category!r}")
        if self.length_m < 0:
            raise ValueError("length_m must be >= 0")
        if self.num_pairs < 1:
            raise ValueError("num_pairs must be >= 1")
        if not 0 < self.velocity_factor <= 1:
            raise ValueError("velocity_factor must be in (0, 1]")
        if self.pair_extra_loss_db is not None and len(self.pair_extra_loss_db) != self.num_pairs:
            raise ValueError("pair_extra_loss_db must have one entry per pair")

    @property
    def coeffs(self) -> tuple[float, float, float]:
        return self.atten_coeffs if self.atten_coeffs is not None else ATTEN_COEFFS[self.category]

    def extra_loss_db(self, pair: int) -> float:
        if self.pair_extra_loss_db is None:
            return 0.0
        return self.pair_extra_loss_db[pair]


@dataclass(frozen=True)
class FrontEndSpec:
    """Passive per-pair RF/IF chain of one converter box, one traversal.

    ``insertion_loss_db`` is the lumped loss of the whole box (mixer conversion
    loss, combiner, equalizer, balun); it is the quantity fitted by
    :func:`calibrate_chain`.
    """

    passband_hz: tuple[float, float] = (50e6, 450e6)
    insertion_loss_db: float = 12.0
    edge_order: int = 3
    equalizer_tilt_db_per_hz: float = 0.0
    design_length_m: float = 50.0
    phase_mode: str = "zero"  # "zero" | "minimum"

    def __post_init__(self):
        f_min, f_max = self.passband_hz
        if not 0 < f_min < f_max:
            raise ValueError("passband must satisfy 0 < f_min < f_max")
        if self.insertion_loss_db < 0:
            raise ValueError("insertion_loss_db must be >= 0 (passive chain)")
        if self.edge_order < 1:
            raise ValueError("edge_order must be >= 1")
        if self.equalizer_tilt_db_per_hz < 0:
            raise ValueError("equalizer_tilt_db_per_hz must be >= 0")
        if self.phase_mode not in ("zero", "minimum"):
            raise ValueError("phase_mode must be 'zero' or 'minimum'")


@dataclass(frozen=True)
class NoiseModel:
    """Noise floors: per-pair cable ingress and per-RF-port thermal noise."""

    cable_noise_dbm_hz: float = -140.0
    antenna_noise_dbm_hz: float = -174.0

    def __post_init__(self):
        if not np.isfinite(self.cable_noise_dbm_hz) or not np.isfinite(self.antenna_noise_dbm_hz):
            raise ValueError("noise floors must be finite")


def _insertion_loss_db(f_hz, cable: CableSpec, pair: int | None = None):
    """Positive dB loss of one pair at f_hz (scalar or array)."""
    f_mhz = np.asarray(f_hz, dtype=float) / 1e6
    k1, k2, k3 = cable.coeffs
    with np.errstate(divide="ignore", invalid="ignore"):
        sq = np.sqrt(f_mhz)
        loss100 = k1 * sq + k2 * f_mhz + np.where(f_mhz > 0, k3 / np.where(sq > 0, sq, 1.0), 0.0)
    loss100 = np.where(f_mhz > 0, loss100, 0.0)  # f=0: k2-only limit -> 0 dB
    loss = cable.atten_scale * loss100 * (cable.length_m / 100.0)
    if pair is not None:
        loss = loss + cable.extra_loss_db(pair)
    return np.maximum(loss, 0.0)


def pair_insertion_gain(f_hz, cable: CableSpec, pair: int | None = None):
    """Complex linear gain of one twisted pair at frequency f_hz.

    Magnitude follows the category insertion-loss polynomial scaled by length;
    phase is the linear propagation delay -2*pi*f*length/(vf*c).  f may be a
    scalar or array; negative f raises.
    """
    f = np.asarray(f_hz, dtype=float)
    if np.any(f < 0):
        raise ValueError("frequency must be >= 0")
    mag = 10.0 ** (-_insertion_loss_db(f, cable, pair) / 20.0)
    mag = np.minimum(mag, 1.0)
    tau = cable.length_m / (cable.velocity_factor * C_LIGHT)
    out = mag * np.exp(-2j * np.pi * f * tau)
    return out if out.ndim else complex(out)


def _fext_phase(pair_i: int, pair_j: int, seed: int) -> float:
    """Deterministic coupling phase per unordered pair combination."""
    lo, hi = sorted((pair_i, pair_j))
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0xFE, lo, hi)))
    return float(rng.uniform(0, 2 * np.pi))


def fext_gain(f_hz, pair_i: int, pair_j: int, cable: CableSpec, seed: int = 0):
    """Complex far-end crosstalk gain between two pairs at f_hz.

    Power-sum FEXT law: reference coupling at (fext_ref_hz, 100 m), +20 dB per
    decade in frequency, +10 dB per decade in length, plus the insertion loss
    of the travelled pair (symmetrised as the mean of the two pairs when their
    extra losses differ).  Magnitude is clamped to 1; phase combines a seeded
    per-(i, j) rotation with the cable propagation delay.
    """
    if pair_i == pair_j:
        raise ValueError("FEXT requires two distinct pairs")
    f = np.asarray(f_hz, dtype=float)
    if np.any(f < 0):
        raise ValueError("frequency must be >= 0")
    if cable.length_m == 0:
        z = np.zeros_like(f) * 1j
        return z if z.ndim else 0j
    with np.errstate(divide="ignore"):
        coupling_db = (
            cable.fext_ref_db
            + 20.0 * np.log10(np.where(f > 0, f / cable.fext_ref_hz, np.nan))
            + 10.0 * np.log10(cable.length_m / 100.0)
        )
    il = 0.5 * (_insertion_loss_db(f, cable, pair_i) + _insertion_loss_db(f, cable, pair_j))
    mag = 10.0 ** ((np.where(np.isnan(coupling_db), -np.inf, coupling_db) - il) / 20.0)
    mag = np.minimum(np.where(f > 0, mag, 0.0), 1.0)
    tau = cable.length_m / (cable.velocity_factor * C_LIGHT)
    out = mag * np.exp(1j * (_fext_phase(pair_i, pair_j, seed) - 2 * np.pi * f * tau))
    return out if out.ndim else complex(out)


def frontend_gain(f_hz, fe: FrontEndSpec):
    """Complex linear gain of the passive front-end chain, one traversal.

    Flat passband with power-law skirts of order ``edge_order``, lumped
    insertion loss, and an optional linear-in-dB equalizer up-tilt referenced
    to the lower band edge.  Total gain is clamped to 1 (passive).  Default
    zero phase; ``phase_mode='minimum'`` attaches a minimum-phase response
    derived from the magnitude.
    """
    f = np.asarray(f_hz, dtype=float)
    if np.any(f < 0):
        raise ValueError("frequency must be >= 0")
    mag = _frontend_mag(f, fe)
    if fe.phase_mode == "zero":
        out = mag + 0j
    else:
        out = mag * np.exp(1j * _minimum_phase(f, fe))
    return out if out.ndim else complex(out)


def _frontend_mag(f, fe: FrontEndSpec):
    f_min, f_max = fe.passband_hz
    n = fe.edge_order
    with np.errstate(divide="ignore"):
        skirt = np.where(
            f < f_min,
            np.where(f > 0, (f / f_min) ** n, 0.0),
            np.where(f > f_max, (f_max / np.maximum(f, f_max)) ** n, 1.0),
        )
    tilt = 10.0 ** (fe.equalizer_tilt_db_per_hz * (f - f_min) / 20.0)
    mag = skirt * tilt * 10.0 ** (-fe.insertion_loss_db / 20.0)
    return np.minimum(mag, 1.0)


def _minimum_phase(f, fe: FrontEndSpec, n_fft: int = 1 << 14):
    """Minimum-phase response matching the front-end magnitude (cepstral method)."""
    f_max = fe.passband_hz[1]
    grid = np.linspace(0, 16 * f_max, n_fft // 2 + 1)
    mag = np.maximum(_frontend_mag(grid, fe), 1e-12)
    log_mag = np.concatenate([np.log(mag), np.log(mag[-2:0:-1])])
    cep = np.fft.ifft(log_mag).real
    cep[1 : n_fft // 2] *= 2.0
    cep[n_fft // 2 + 1 :] = 0.0
    phase = np.fft.fft(cep).imag[: n_fft // 2 + 1]
    return np.interp(np.asarray(f, dtype=float), grid, phase)


def fit_equalizer_tilt(cable: CableSpec, band_hz: tuple[float, float], n_points: int = 64) -> float:
    """Tilt (dB/Hz) that best flattens one pair of ``cable`` over ``band_hz``.

    Least-squares slope of the pair loss in dB versus frequency; using it as
    ``equalizer_tilt_db_per_hz`` makes the cascade pair * equalizer flat up to
    the curvature of the loss law.
    """
    f = np.linspace(band_hz[0], band_hz[1], n_points)
    loss_db = _insertion_loss_db(f, cable)
    slope = np.polyfit(f, loss_db, 1)[0]
    return max(float(slope), 0.0)


def calibrate_chain(
    targets: list[tuple[float, float, float]],
    categories: list[str] | None = None,
    base_cable: CableSpec | None = None,
) -> tuple[float, float, list[float]]:
    """Fit the lumped per-box insertion loss and a cable-coefficient scale.

    ``targets`` is a list of (length_m, f_if_hz, end_to_end_db) measurements;
    ``categories`` optionally names the cable category per target (default
    Cat5e).  The model is  end_to_end_db = 2*insertion_loss_db +
    scale*cable_db(f_if, length); the two unknowns are solved by least squares.

    Returns (insertion_loss_db, atten_scale, residuals_db).  Raises if fewer
    than two targets are given or all lengths coincide (singular fit).
    """
    if len(targets) < 2:
        raise ValueError("need at least two calibration targets")
    lengths = [t[0] for t in targets]
    if len(set(lengths)) < 2:
        raise ValueError("calibration targets must cover at least two distinct lengths")
    if categories is None:
        categories = ["Cat5e"] * len(targets)
    rows, rhs = [], []
    for (length_m, f_if, db), cat in zip(targets, categories):
        proto = CableSpec(
            category=cat,
            length_m=length_m,
            velocity_factor=(base_cable.velocity_factor if base_cable else 0.65),
        )
        rows.append([2.0, float(_insertion_loss_db(f_if, proto))])
        rhs.append(db)
    a = np.array(rows)
    b = np.array(rhs)
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    insertion_loss_db, scale = float(sol[0]), float(sol[1])
    residuals = list(b - a @ sol)
    return insertion_loss_db, scale, residuals


def preset(name: str) -> tuple[CableSpec, FrontEndSpec]:
    """Named cable + calibrated front-end presets.

    "cat5e-50m" and "cat5-15m" are calibrated so that the modeled end-to-end
    loss at IF 140 MHz reproduces the measured ~50 dB (50 m) and ~42 dB (15 m)
    attenuations.
    """
    targets = [(50.0, 140e6, 50.0), (15.0, 140e6, 42.0)]
    cats = ["Cat5e", "Cat5"]
    il_db, scale, _ = calibrate_chain(targets, cats)
    if name == "cat5e-50m":
        cable = CableSpec(category="Cat5e", length_m=50.0, atten_scale=scale)
    elif name == "cat5-15m":
        cable = CableSpec(category="Cat5", length_m=15.0, atten_scale=scale)
    else:
        raise KeyError(f"unknown preset {name!r}")
    fe = FrontEndSpec(insertion_loss_db=il_db, design_length_m=cable.length_m)
    return cable, fe


def end_to_end_gain_db(f_hz: float, cable: CableSpec, fe: FrontEndSpec, pair: int | None = None) -> float:
    """Modeled end-to-end gain in dB: two front-end boxes plus the cable pair."""
    g = frontend_gain(f_hz, fe) ** 2 * pair_insertion_gain(f_hz, cable, pair)
    return float(20.0 * np.log10(abs(g)))
