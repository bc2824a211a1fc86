"""Batch experiment front-end.

Each command loads a config (file path or packaged preset name), runs one
named experiment and atomically writes <out>/<command>.csv plus
<command>.summary.json.  Exit codes: 0 success, 1 validation errors (listed on
stderr), 2 config errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .beam import BeamScenario, sweep_theta
from .cable import CableSpec, calibrate_chain, end_to_end_gain_db, frontend_gain, fext_gain
from .config import ConfigError, ExperimentConfig, apply_overrides, load_config, validate_config
from .link import LoPlan
from .mapping import (
    Sf2sfMapping,
    enumerate_frequency_plans,
    enumerate_space_mappings,
    exhaustive_search,
    greedy_mapping,
    validate_mapping,
)
from .waveform import ImpairmentChain, WaveformSpec, gen_waveform, measure_link, throughput_mbps
from .mcs_tables import mcs_entry

COMMANDS = ("calibrate", "plan", "optimize-mapping", "sinr-sweep", "evm-sweep", "throughput", "validate")

CSV_HEADERS = {
    "calibrate": "length_m,f_if_hz,target_db,model_db,residual_db",
    "plan": "plan_id,signal_id,pair,if_hz,f_down_hz,f_up_hz",
    "optimize-mapping": "candidate_id,theta_deg,sinr_db",
    "sinr-sweep": "candidate_id,theta_deg,sinr_db",
    "evm-sweep": "sweep_var,value,evm_db,cf_db,rssi_dbm,bp_dbm,cinr_db,cfe_hz,ce_ppm",
    "throughput": "mcs,if_hz,case,throughput_mbps",
}


class ValidationFailure(Exception):
    """Physics-level violations; maps to exit code 1."""

    def __init__(self, messages):
        super().__init__("; ".join(str(m) for m in messages))
        self.messages = [str(m) for m in messages]


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return f"{float(v):.10g}"


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(out_dir: Path, command: str, rows, summary: dict) -> None:
    csv_text = CSV_HEADERS[command] + "\n" + "".join(
        ",".join(_fmt(v) for v in row) + "\n" for row in rows
    )
    _atomic_write(out_dir / f"{command}.csv", csv_text)
    _atomic_write(
        out_dir / f"{command}.summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n"
    )


def _point_seed(seed: int, *path: int) -> int:
    return int(np.random.SeedSequence(entropy=seed, spawn_key=tuple(path)).generate_state(1)[0])


# ---------------------------------------------------------------- experiments


def _cmd_calibrate(cfg: ExperimentConfig):
    raw = cfg.get("calibrate", "targets", "50:140e6:50:Cat5e; 15:140e6:42:Cat5")
    targets, cats = [], []
    for part in raw.split(";"):
        fields = [f.strip() for f in part.strip().split(":")]
        targets.append((float(fields[0]), float(fields[1]), float(fields[2])))
        cats.append(fields[3] if len(fields) > 3 else "Cat5e")
    il_db, scale, residuals = calibrate_chain(targets, cats)
    rows = [
        (t[0], t[1], t[2], t[2] - r, r) for t, r in zip(targets, residuals)
    ]
    summary = {
        "insertion_loss_db": il_db,
        "atten_scale": scale,
        "max_abs_residual_db": max(abs(r) for r in residuals),
        "n_targets": len(targets),
    }
    return rows, summary


def _cmd_plan(cfg: ExperimentConfig):
    signals = cfg.signals()
    fe = cfg.frontend()
    mapping = cfg.mapping(signals)
    if mapping is None:
        raise ConfigError("plan requires a [mapping] section with a space matrix")
    rows = []
    if cfg.get("mapping", "lo_down_hz") is not None:
        violations = validate_mapping(signals, mapping, fe)
        if violations:
            raise ValidationFailure(violations)
        plans = [mapping.lo_plan]
    else:
        plans = list(
            enumerate_frequency_plans(
                signals,
                cfg.if_slots(),
                fe,
                mapping.space,
                injection=cfg.get("mapping", "injection", "high"),
                max_per_pair=mapping.max_per_pair,
            )
        )
    for pid, plan in enumerate(plans):
        m = Sf2sfMapping(mapping.space, plan, mapping.max_per_pair)
        for n, s in enumerate(signals):
            if_hz = m.if_centers(signals)[n]
            rows.append((pid, s.id, m.pair_of(n), if_hz, plan.f_down_hz[n], plan.f_up_hz[n]))
    summary = {"n_plans": len(plans), "n_signals": len(signals), "violations": []}
    return rows, summary


def _candidates(cfg: ExperimentConfig, signals, fe):
    """All valid candidate mappings: enumerated space matrices with the
    config's IF slots assigned in signal order within each pair."""
    slots = sorted(cfg.if_slots())
    per_pair = cfg.getint("mapping", "max_per_pair", 2)
    n_pairs = cfg.cable().num_pairs
    injection = cfg.get("mapping", "injection", "high")
    out = []
    for space in enumerate_space_mappings(len(signals), n_pairs, per_pair):
        lo = []
        count: dict[int, int] = {}
        for n, s in enumerate(signals):
            pair = int(np.argmax(space[:, n]))
            slot = slots[count.get(pair, 0) % len(slots)]
            count[pair] = count.get(pair, 0) + 1
            lo.append(s.rf_center_hz + slot if injection == "high" else s.rf_center_hz - slot)
        mapping = Sf2sfMapping(space, LoPlan.matched(lo), per_pair)
        if not validate_mapping(signals, mapping, fe):
            out.append(mapping)
    if not out:
        raise ValidationFailure(["no valid candidate mapping for the configured slots"])
    return out


def _scenario(cfg: ExperimentConfig) -> BeamScenario:
    g = cfg.getfloat
    thetas = cfg.getlist("scenario", "interferer_thetas_deg", [-40.0, 25.0])
    powers = cfg.getlist("scenario", "interferer_powers_dbm", [0.0] * len(thetas))
    return BeamScenario(
        n_antennas=cfg.getint("scenario", "n_antennas", 8),
        element_spacing_wavelengths=g("scenario", "element_spacing_wavelengths", 0.5),
        desired_theta_deg=g("scenario", "desired_theta_deg", 0.0),
        interferer_thetas_deg=tuple(thetas),
        desired_power_dbm=g("scenario", "desired_power_dbm", 0.0),
        interferer_powers_dbm=tuple(powers),
        signal_bandwidth_hz=g("scenario", "signal_bandwidth_hz", 20e6),
        theta_grid_deg=(
            g("scenario", "theta_start_deg", -90.0),
            g("scenario", "theta_stop_deg", 90.0),
            g("scenario", "theta_step_deg", 1.0),
        ),
        noise=cfg.noise(),
    )


def _fext_enabled(cfg: ExperimentConfig) -> bool:
    return (cfg.get("scenario", "fext_enabled", "true") or "true").lower() in ("1", "true", "yes")


def _cmd_optimize(cfg: ExperimentConfig, mode: str):
    signals = cfg.signals()
    cable, fe = cfg.cable(), cfg.frontend()
    scenario = _scenario(cfg)
    fext = _fext_enabled(cfg)
    seed = cfg.seed
    scalarization = cfg.get("scenario", "scalarization", "mean")
    rows: list[tuple] = []
    if mode == "greedy":
        mapping = greedy_mapping(
            scenario, signals, cable, fe, cfg.if_slots(),
            per_pair=cfg.getint("mapping", "max_per_pair", 2),
            n_pairs=cable.num_pairs, fext_seed=seed,
        )
        curve = sweep_theta(
            scenario, signals, cable, fe, mapping, fext_enabled=fext, fext_seed=seed
        )
        rows = [("greedy", t, s) for t, s in zip(curve.theta_deg, curve.sinr_db)]
        summary = {
            "mode": "greedy",
            "n_candidates": 1,
            "objective_db": float(np.mean(curve.sinr_db)),
            "best_mapping": mapping.to_text(),
            "dispersion_db": 0.0,
        }
        return rows, summary

    candidates = _candidates(cfg, signals, fe)
    result = exhaustive_search(
        scenario, signals, cable, fe, candidates,
        scalarization=scalarization, fext_enabled=fext, fext_seed=seed,
    )
    for cid, curve in enumerate(result.curves):
        rows.extend((cid, t, s) for t, s in zip(result.theta_deg, curve))
    summary = {
        "mode": "exhaustive",
        "n_candidates": len(candidates),
        "best_candidate_id": result.best_id,
        "objective_db": result.objectives[result.best_id],
        "scalarization": scalarization,
        "dispersion_db": result.dispersion_db,
        "best_mapping": result.best.to_text(),
    }
    return rows, summary


def _cmd_sinr_sweep(cfg: ExperimentConfig):
    signals = cfg.signals()
    cable, fe = cfg.cable(), cfg.frontend()
    scenario = _scenario(cfg)
    fext = _fext_enabled(cfg)
    seed = cfg.seed
    candidates = _candidates(cfg, signals, fe)
    result = exhaustive_search(
        scenario, signals, cable, fe, candidates, fext_enabled=fext, fext_seed=seed
    )
    n_sample = min(cfg.getint("scenario", "n_sample_mappings", 6), len(candidates))
    sample_ids = sorted(set(np.linspace(0, len(candidates) - 1, n_sample).astype(int).tolist()))
    rows: list[tuple] = []
    for cid in sample_ids:
        rows.extend((str(cid), t, s) for t, s in zip(result.theta_deg, result.curves[cid]))
    rows.extend(
        ("envelope", t, s) for t, s in zip(result.theta_deg, result.curve.sinr_db)
    )
    summary = {
        "n_candidates": len(candidates),
        "sampled_candidates": [int(i) for i in sample_ids],
        "best_candidate_id": result.best_id,
        "dispersion_db": result.dispersion_db,
    }
    return rows, summary


def _cmd_evm_sweep(cfg: ExperimentConfig):
    cable, fe = cfg.cable(), cfg.frontend()
    seed = cfg.seed
    g = cfg.getfloat
    if_hz = g("sweep", "if_hz", 140e6)
    spec = WaveformSpec(
        rat=cfg.get("sweep", "rat", "WiMAX"),
        modulation=cfg.get("sweep", "modulation", "QAM16"),
        n_symbols=cfg.getint("sweep", "n_symbols", 30),
        seed=_point_seed(seed, 1),
    )
    wave = gen_waveform(spec)
    tcxo = g("sweep", "tcxo_bound_ppm", 0.05)
    clock_rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(2,)))
    chain = ImpairmentChain(
        gain_db=end_to_end_gain_db(if_hz, cable, fe),
        noise_psd_dbm_hz=g("sweep", "noise_psd_dbm_hz", -150.5),
        nonlin_clip_dbm=g("sweep", "nonlin_clip_dbm", 5.0),
        lo_detune_hz=g("sweep", "lo_detune_hz", 0.0),
        sample_rate_hz=spec.sample_rate_hz,
        clock_offset_ppm=float(clock_rng.uniform(-tcxo, tcxo)),
    )
    start = g("sweep", "power_start_dbm", -30.0)
    stop = g("sweep", "power_stop_dbm", 5.0)
    step = g("sweep", "power_step_dbm", 1.0)
    powers = np.arange(start, stop + step / 2, step)
    rows = []
    for i, p in enumerate(powers):
        m = measure_link(wave, chain, float(p), seed=_point_seed(seed, 3, i))
        rows.append(
            ("input_power_dbm", p, m.evm_db, m.crest_factor_db, m.rssi_dbm,
             m.burst_power_dbm, m.cinr_db, m.cfe_hz, m.clock_error_ppm)
        )
    evms = [r[2] for r in rows]
    best = int(np.argmin(evms))
    summary = {
        "if_hz": if_hz,
        "chain_gain_db": chain.gain_db,
        "min_evm_db": evms[best],
        "min_evm_power_dbm": float(powers[best]),
        "clock_offset_ppm": chain.clock_offset_ppm,
        "lo_detune_hz": chain.lo_detune_hz,
    }
    return rows, summary


def _cmd_throughput(cfg: ExperimentConfig):
    cable, fe = cfg.cable(), cfg.frontend()
    g = cfg.getfloat
    rat = cfg.get("throughput", "rat", "LTE")
    bw = g("throughput", "bandwidth_hz", 5e6)
    rank = cfg.getint("throughput", "mimo_rank", 2)
    mcs_lo = cfg.getint("throughput", "mcs_min", 0)
    mcs_hi = cfg.getint("throughput", "mcs_max", 17)
    tx_dbm = g("throughput", "tx_power_dbm", -20.0)
    noise_psd = g("throughput", "noise_psd_dbm_hz", -145.5)
    if_list = cfg.getlist("throughput", "if_hz", [75e6, 175e6, 400e6])
    int_if = g("throughput", "interferer_if_hz")
    int_dbm = g("throughput", "interferer_power_dbm", 0.0)
    int_bw = g("throughput", "interferer_bandwidth_hz", 20e6)

    def sinr_db_at(if_hz: float, with_interferer: bool) -> float:
        s_dbm = tx_dbm + end_to_end_gain_db(if_hz, cable, fe)
        n_mw = 10.0 ** (noise_psd / 10.0) * bw * 0.8  # occupied fraction
        i_mw = 0.0
        if with_interferer and int_if is not None and abs(int_if - if_hz) < (bw + int_bw) / 2:
            coupling = abs(frontend_gain(if_hz, fe)) ** 2 * abs(
                fext_gain(if_hz, 0, 1, cable, seed=cfg.seed)
            )
            i_dbm = int_dbm + 20.0 * np.log10(max(coupling, 1e-30))
            i_mw = 10.0 ** (i_dbm / 10.0) * min(1.0, bw / int_bw)
        return s_dbm - 10.0 * np.log10(n_mw + i_mw)

    rows = []
    for if_hz in if_list:
        for case, with_int in (("clean", False),) + ((("coex", True),) if int_if is not None else ()):
            snr = sinr_db_at(if_hz, with_int)
            for mcs in range(mcs_lo, mcs_hi + 1):
                rows.append(
                    (mcs, if_hz, case, throughput_mbps(snr, mcs, rat, bw, rank))
                )
    summary = {
        "rat": rat,
        "bandwidth_hz": bw,
        "mimo_rank": rank,
        "sinr_clean_db": {str(f): sinr_db_at(f, False) for f in if_list},
        "sinr_coex_db": {str(f): sinr_db_at(f, True) for f in if_list},
    }
    return rows, summary


# ------------------------------------------------------------------- driver


def run(command: str, config_path: str, out_dir=None, seed=None, overrides=(), mode="exhaustive") -> int:
    """Run one experiment command; returns the process exit code."""
    try:
        cfg = load_config(config_path)
        apply_overrides(cfg, list(overrides))
        if seed is not None:
            cfg.sections.setdefault("experiment", {})["seed"] = str(seed)
        if out_dir is not None:
            cfg.sections.setdefault("experiment", {})["output_dir"] = str(out_dir)

        if command == "validate":
            diags = validate_config(cfg)
            for d in diags:
                print(d, file=sys.stderr)
            return 1 if diags else 0

        diags = validate_config(cfg)
        if diags:
            for d in diags:
                print(d, file=sys.stderr)
            return 1

        out = Path(cfg.get("experiment", "output_dir", "out"))
        if command == "calibrate":
            rows, summary = _cmd_calibrate(cfg)
        elif command == "plan":
            rows, summary = _cmd_plan(cfg)
        elif command == "optimize-mapping":
            rows, summary = _cmd_optimize(cfg, mode)
        elif command == "sinr-sweep":
            rows, summary = _cmd_sinr_sweep(cfg)
        elif command == "evm-sweep":
            rows, summary = _cmd_evm_sweep(cfg)
        elif command == "throughput":
            rows, summary = _cmd_throughput(cfg)
        else:
            raise ConfigError(f"unknown command {command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValidationFailure as exc:
        for msg in exc.messages:
            print(msg, file=sys.stderr)
        return 1

    _emit(out, command, rows, summary)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="rocsim", description=__doc__)
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="config file path or packaged preset name")
    parser.add_argument("--out", default=None, help="output directory (overrides config)")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=1, help="accepted for interface stability; evaluation is vectorised")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--exhaustive", action="store_true")
    group.add_argument("--greedy", action="store_true")
    args = parser.parse_args(argv)
    mode = "greedy" if args.greedy else "exhaustive"
    return run(args.command, args.config, out_dir=args.out, seed=args.seed, overrides=args.overrides, mode=mode)


if __name__ == "__main__":
    sys.exit(main())
