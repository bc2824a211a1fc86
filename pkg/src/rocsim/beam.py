"""System-level beamforming study: a uniform linear array feeds the copper
fronthaul; the baseband unit applies MVDR combining on the far side and the
SINR is swept over the desired user's angle."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .cable import CableSpec, FrontEndSpec, NoiseModel
from .link import EffectiveChannel, build_effective_channel

COND_LOADING_THRESHOLD = 1e12
DISTORTIONLESS_TOL = 1e-10


@dataclass(frozen=True)
class BeamScenario:
    """Array geometry, source placement and powers for one SINR study."""

    n_antennas: int = 8
    element_spacing_wavelengths: float = 0.5
    desired_theta_deg: float = 0.0
    interferer_thetas_deg: tuple[float, ...] = (-40.0, 25.0)
    desired_power_dbm: float = 0.0
    interferer_powers_dbm: tuple[float, ...] = (0.0, 0.0)
    signal_bandwidth_hz: float = 20e6
    theta_grid_deg: tuple[float, float, float] = (-90.0, 90.0, 1.0)  # start, stop, step
    noise: NoiseModel = field(default_factory=NoiseModel)

    def __post_init__(self):
        if self.n_antennas < 1:
            raise ValueError("n_antennas must be >= 1")
        if abs(self.desired_theta_deg) > 90 or any(abs(t) > 90 for t in self.interferer_thetas_deg):
            raise ValueError("angles must satisfy |theta| <= 90 degrees")
        if len(self.interferer_powers_dbm) != len(self.interferer_thetas_deg):
            raise ValueError("one power per interferer required")

    @property
    def theta_deg(self) -> np.ndarray:
        start, stop, step = self.theta_grid_deg
        return np.arange(start, stop + step / 2, step)

    def powers_mw(self) -> tuple[float, np.ndarray]:
        p0 = 10.0 ** (self.desired_power_dbm / 10.0)
        pk = 10.0 ** (np.array(self.interferer_powers_dbm) / 10.0)
        return p0, pk

    def noise_powers_mw(self) -> tuple[float, float]:
        bw = self.signal_bandwidth_hz
        ant = 10.0 ** (self.noise.antenna_noise_dbm_hz / 10.0) * bw
        cab = 10.0 ** (self.noise.cable_noise_dbm_hz / 10.0) * bw
        return ant, cab


@dataclass
class SinrCurve:
    theta_deg: np.ndarray
    sinr_db: np.ndarray
    mapping_id: str = ""

    def __post_init__(self):
        if np.any(np.diff(self.theta_deg) <= 0):
            raise ValueError("theta grid must be strictly increasing")


def ula_steering(theta_deg, n: int, spacing_wavelengths: float = 0.5) -> np.ndarray:
    """Steering vector(s) of an n-element uniform linear array.

    Element k carries phase 2*pi*spacing*k*sin(theta).  ``theta_deg`` may be a
    scalar (returns shape (n,)) or array (returns shape (n, T)).
    """
    theta = np.asarray(theta_deg, dtype=float)
    if np.any(np.abs(theta) > 90):
        raise ValueError("|theta| must be <= 90 degrees")
    k = np.arange(n)
    phase = 2j * np.pi * spacing_wavelengths * np.outer(k, np.sin(np.deg2rad(theta)))
    a = np.exp(phase)
    return a[:, 0] if theta.ndim == 0 else a


def _interference_covariance(scenario: BeamScenario, a_mat: np.ndarray, b_mat: np.ndarray):
    """Fixed part of R: interferers plus both noise terms."""
    _, pk = scenario.powers_mw()
    ant, cab = scenario.noise_powers_mw()
    c = ant * a_mat @ a_mat.conj().T + cab * b_mat @ b_mat.conj().T
    for p, theta in zip(pk, scenario.interferer_thetas_deg):
        v = a_mat @ ula_steering(theta, scenario.n_antennas, scenario.element_spacing_wavelengths)
        c = c + p * np.outer(v, v.conj())
    return c


def received_covariance(
    scenario: BeamScenario,
    effch: EffectiveChannel,
    delta_hz: float = 0.0,
    desired_theta_deg: float | None = None,
) -> np.ndarray:
    """Covariance of the fronthaul output: desired + interferers + noise."""
    a_mat, b_mat = effch.at(delta_hz)
    if a_mat.shape[0] != scenario.n_antennas:
        raise ValueError("effective channel size does not match the antenna count")
    theta0 = scenario.desired_theta_deg if desired_theta_deg is None else desired_theta_deg
    p0, _ = scenario.powers_mw()
    v0 = a_mat @ ula_steering(theta0, scenario.n_antennas, scenario.element_spacing_wavelengths)
    r = _interference_covariance(scenario, a_mat, b_mat) + p0 * np.outer(v0, v0.conj())
    herm_err = np.max(np.abs(r - r.conj().T))
    if herm_err > 1e-12 * max(np.max(np.abs(r)), 1e-300):
        raise ArithmeticError(f"covariance lost Hermitian symmetry ({herm_err:.3e})")
    return 0.5 * (r + r.conj().T)


def mvdr_weights(r: np.ndarray, a_eff: np.ndarray) -> np.ndarray:
    """Minimum-variance distortionless weights w = R^-1 a / (a^H R^-1 a).

    Diagonal loading (1e-6 * trace/N) kicks in when R is ill-conditioned;
    raises if R stays singular.  The unit-gain constraint on ``a_eff`` is
    asserted on every solve.
    """
    a_eff = np.asarray(a_eff)
    if not np.any(a_eff):
        raise ValueError("effective steering vector is zero")
    n = r.shape[0]
    if np.linalg.cond(r) > COND_LOADING_THRESHOLD:
        r = r + (1e-6 * np.trace(r).real / n) * np.eye(n)
    try:
        ra = np.linalg.solve(r, a_eff)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("covariance singular after diagonal loading") from exc
    denom = a_eff.conj() @ ra
    w = ra / denom
    gain_err = abs(w.conj() @ a_eff - 1.0)
    if gain_err > DISTORTIONLESS_TOL:
        raise ArithmeticError(f"distortionless constraint violated by {gain_err:.3e}")
    return w


def sinr_db(
    w: np.ndarray,
    scenario: BeamScenario,
    effch: EffectiveChannel,
    delta_hz: float = 0.0,
    desired_theta_deg: float | None = None,
) -> float:
    """Output SINR of a given combiner in dB."""
    a_mat, b_mat = effch.at(delta_hz)
    n = scenario.n_antennas
    sp = scenario.element_spacing_wavelengths
    theta0 = scenario.desired_theta_deg if desired_theta_deg is None else desired_theta_deg
    p0, pk = scenario.powers_mw()
    ant, cab = scenario.noise_powers_mw()
    wh = w.conj()
    num = p0 * abs(wh @ (a_mat @ ula_steering(theta0, n, sp))) ** 2
    den = ant * np.sum(np.abs(wh @ a_mat) ** 2) + cab * np.sum(np.abs(wh @ b_mat) ** 2)
    for p, theta in zip(pk, scenario.interferer_thetas_deg):
        den += p * abs(wh @ (a_mat @ ula_steering(theta, n, sp))) ** 2
    if den == 0:
        warnings.warn("zero interference-plus-noise power; SINR is unbounded", stacklevel=2)
        return float("inf")
    return float(10.0 * np.log10(num / den))


def sweep_theta(
    scenario: BeamScenario,
    signals,
    cable: CableSpec,
    fe: FrontEndSpec,
    mapping,
    delta_hz: float = 0.0,
    fext_enabled: bool = True,
    fext_seed: int = 0,
    mapping_id: str = "",
    effch: EffectiveChannel | None = None,
) -> SinrCurve:
    """MVDR SINR versus the desired user's angle (interferers fixed).

    The desired source is re-placed at every grid angle; covariance, weights
    and SINR are recomputed per angle with the angle loop fully vectorised.
    """
    if effch is None:
        effch = build_effective_channel(
            signals,
            mapping,
            cable,
            fe,
            grid=np.array([delta_hz]),
            fext_enabled=fext_enabled,
            fext_seed=fext_seed,
        )
    a_mat, b_mat = effch.at(delta_hz)
    n = scenario.n_antennas
    sp = scenario.element_spacing_wavelengths
    theta = scenario.theta_deg
    p0, pk = scenario.powers_mw()
    ant, cab = scenario.noise_powers_mw()

    v_all = a_mat @ ula_steering(theta, n, sp)  # (N, T)
    c_fix = _interference_covariance(scenario, a_mat, b_mat)
    v_int = [
        a_mat @ ula_steering(t, n, sp) for t in scenario.interferer_thetas_deg
    ]

    t_count = len(theta)
    r_stack = np.broadcast_to(c_fix, (t_count, n, n)).copy()
    r_stack += p0 * np.einsum("it,jt->tij", v_all, v_all.conj())
    ra = np.linalg.solve(r_stack, v_all.T[..., None])[..., 0]  # (T, N)
    denom = np.einsum("ti,ti->t", v_all.T.conj(), ra)
    w = ra / denom[:, None]  # (T, N), satisfies w^H v = 1
    wh = w.conj()

    num = p0 * np.abs(np.einsum("ti,it->t", wh, v_all)) ** 2
    den = ant * np.sum(np.abs(wh @ a_mat) ** 2, axis=1)
    den += cab * np.sum(np.abs(wh @ b_mat) ** 2, axis=1)
    for p, v in zip(pk, v_int):
        den += p * np.abs(wh @ v) ** 2
    return SinrCurve(theta_deg=theta, sinr_db=10.0 * np.log10(num / den), mapping_id=mapping_id)


def matched_filter_weights(a_eff: np.ndarray) -> np.ndarray:
    """Matched-filter combiner normalised to unit gain on ``a_eff``."""
    return a_eff / (a_eff.conj() @ a_eff)
