"""Pair/IF mapping of RF signals: representation, validation, enumeration and
search.

A mapping has two parts: a binary space matrix (one column per signal, a 1 in
row l routes the signal onto pair l, at most M signals per pair) and an LO
plan assigning each signal its down/up conversion frequencies, which fixes its
IF slot on the pair.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .cable import CableSpec, FrontEndSpec, fext_gain, pair_insertion_gain
from .link import BAND_EDGE_SLACK_HZ, LoPlan, if_of

LO_MATCH_TOL_HZ = 1.0


class ViolationKind(str, Enum):
    OUT_OF_BAND = "OutOfBand"
    SAME_CHAIN_OVERLAP = "SameChainOverlap"
    IMAGE_COLLISION = "ImageCollision"
    NET_INVERSION = "NetInversion"
    COLUMN_COUNT = "ColumnCount"
    ROW_COUNT = "RowCount"


@dataclass(frozen=True, order=True)
class MappingViolation:
    kind: ViolationKind
    offenders: tuple[int, ...]
    detail: str = field(compare=False)

    def __str__(self):
        return f"{self.kind.value}{list(self.offenders)}: {self.detail}"


@dataclass(frozen=True)
class Sf2sfMapping:
    """Space matrix (n_pairs x n_signals, binary) plus LO plan."""

    space: np.ndarray
    lo_plan: LoPlan
    max_per_pair: int = 2

    def __post_init__(self):
        object.__setattr__(self, "space", np.asarray(self.space, dtype=np.int8))

    @property
    def n_pairs(self) -> int:
        return self.space.shape[0]

    @property
    def n_signals(self) -> int:
        return self.space.shape[1]

    def pair_of(self, n: int) -> int:
        return int(np.argmax(self.space[:, n]))

    def if_centers(self, signals) -> list[float]:
        return [if_of(s.rf_center_hz, self.lo_plan.f_down_hz[n])[0] for n, s in enumerate(signals)]

    def flat_key(self) -> tuple:
        """Stable total order used for deterministic tie-breaking."""
        return tuple(self.space.flatten().tolist()) + tuple(self.lo_plan.f_down_hz)

    def to_text(self) -> str:
        rows = [" ".join(str(int(v)) for v in row) for row in self.space]
        lo = " ".join(f"{f:.10g}" for f in self.lo_plan.f_down_hz)
        lo_up = " ".join(f"{f:.10g}" for f in self.lo_plan.f_up_hz)
        return "\n".join(["space " + "; ".join(rows), "lo_down_hz " + lo, "lo_up_hz " + lo_up])

    @classmethod
    def from_text(cls, text: str, max_per_pair: int = 2) -> "Sf2sfMapping":
        space = lo_down = lo_up = None
        for line in text.strip().splitlines():
            key, _, rest = line.strip().partition(" ")
            if key == "space":
                space = np.array([[int(v) for v in row.split()] for row in rest.split(";")])
            elif key == "lo_down_hz":
                lo_down = tuple(float(v) for v in rest.split())
            elif key == "lo_up_hz":
                lo_up = tuple(float(v) for v in rest.split())
        if space is None or lo_down is None:
            raise ValueError("mapping block needs 'space' and 'lo_down_hz' lines")
        return cls(space, LoPlan(lo_down, lo_up if lo_up is not None else lo_down), max_per_pair)


def _if_band(signal, if_center):
    return if_center - signal.bandwidth_hz / 2, if_center + signal.bandwidth_hz / 2


def _bands_overlap(b1, b2):
    return b1[0] < b2[1] and b2[0] < b1[1]


def validate_mapping(
    signals, mapping: Sf2sfMapping, fe: FrontEndSpec, cfo_study: bool = False
) -> list[MappingViolation]:
    """All constraint violations of a mapping; empty list means valid.

    Checks, in kind order: IF bands inside the front-end passband, no IF band
    overlap among signals sharing a pair, mixing-image separation among RF
    inputs sharing a slice, matched down/up LOs (unless ``cfo_study``), and
    the column/row structure of the space matrix.
    """
    out: list[MappingViolation] = []
    n_sig = len(signals)
    if mapping.space.shape[1] != n_sig:
        raise ValueError("space matrix width must match the number of signals")

    for n in range(n_sig):
        col = int(mapping.space[:, n].sum())
        if col != 1:
            out.append(
                MappingViolation(ViolationKind.COLUMN_COUNT, (n,), f"signal routed to {col} pairs")
            )
    for l in range(mapping.n_pairs):
        row = int(mapping.space[l, :].sum())
        if row > mapping.max_per_pair:
            offenders = tuple(int(i) for i in np.flatnonzero(mapping.space[l, :]))
            out.append(
                MappingViolation(
                    ViolationKind.ROW_COUNT, offenders, f"pair {l} carries {row} > {mapping.max_per_pair} signals"
                )
            )
    if out:
        return sorted(out)

    if_centers, inverted = [], []
    for n, s in enumerate(signals):
        c, inv = if_of(s.rf_center_hz, mapping.lo_plan.f_down_hz[n])
        if_centers.append(c)
        inverted.append(inv)

    f_lo_pass, f_hi_pass = fe.passband_hz
    for n, s in enumerate(signals):
        lo, hi = _if_band(s, if_centers[n])
        if lo < f_lo_pass - BAND_EDGE_SLACK_HZ or hi > f_hi_pass + BAND_EDGE_SLACK_HZ:
            out.append(
                MappingViolation(
                    ViolationKind.OUT_OF_BAND,
                    (n,),
                    f"IF band [{lo / 1e6:.3f}, {hi / 1e6:.3f}] MHz outside passband",
                )
            )

    for l in range(mapping.n_pairs):
        members = [int(i) for i in np.flatnonzero(mapping.space[l, :])]
        for i, j in itertools.combinations(members, 2):
            if _bands_overlap(_if_band(signals[i], if_centers[i]), _if_band(signals[j], if_centers[j])):
                out.append(
                    MappingViolation(
                        ViolationKind.SAME_CHAIN_OVERLAP,
                        (i, j),
                        f"overlapping IF bands on pair {l}",
                    )
                )
        # mixing-image separation: the image of n's conversion, seen against
        # every other RF input m of the same slice, must miss m's IF band
        for n in members:
            for m in members:
                if m == n:
                    continue
                image_center = abs(
                    mapping.lo_plan.f_down_hz[n] + if_centers[n] - signals[m].rf_center_hz
                )
                image_band = (
                    image_center - signals[m].bandwidth_hz / 2,
                    image_center + signals[m].bandwidth_hz / 2,
                )
                if _bands_overlap(image_band, _if_band(signals[m], if_centers[m])):
                    out.append(
                        MappingViolation(
                            ViolationKind.IMAGE_COLLISION,
                            (n, m),
                            f"image of signal {n} at {image_center / 1e6:.3f} MHz hits signal {m}'s IF band",
                        )
                    )

    if not cfo_study:
        for n in range(n_sig):
            if abs(mapping.lo_plan.f_down_hz[n] - mapping.lo_plan.f_up_hz[n]) > LO_MATCH_TOL_HZ:
                out.append(
                    MappingViolation(
                        ViolationKind.NET_INVERSION,
                        (n,),
                        "down/up LOs differ: spectrum not restored end to end",
                    )
                )
    return sorted(out)


def enumerate_space_mappings(n_signals: int, n_pairs: int, per_pair: int):
    """All space matrices routing N distinguishable signals onto L pairs with
    at most ``per_pair`` signals each, in lexicographic order of the
    per-signal pair-assignment tuple."""
    if n_signals > n_pairs * per_pair:
        raise ValueError(f"{n_signals} signals do not fit on {n_pairs} pairs x {per_pair}")

    def rec(assign, load):
        if len(assign) == n_signals:
            m = np.zeros((n_pairs, n_signals), dtype=np.int8)
            for n, l in enumerate(assign):
                m[l, n] = 1
            yield m
            return
        for l in range(n_pairs):
            if load[l] < per_pair:
                load[l] += 1
                yield from rec(assign + [l], load)
                load[l] -= 1

    yield from rec([], [0] * n_pairs)


def lo_for_slot(rf_center_hz: float, if_hz: float, injection: str = "high") -> float:
    """LO frequency placing a signal at the given IF slot."""
    if injection == "high":
        return rf_center_hz + if_hz
    if injection == "low":
        return rf_center_hz - if_hz
    raise ValueError("injection must be 'high' or 'low'")


def enumerate_frequency_plans(
    signals,
    if_slots,
    fe: FrontEndSpec,
    space: np.ndarray,
    injection: str = "high",
    max_per_pair: int = 2,
):
    """All per-pair-injective IF slot assignments that validate.

    For each pair, the signals routed to it take distinct slots from
    ``if_slots``; every candidate LO plan (matched down/up, configured
    injection side) is filtered through the band/overlap/image checks.
    """
    if not if_slots:
        raise ValueError("if_slots must be nonempty")
    space = np.asarray(space)
    n_sig = len(signals)
    per_pair_members = [
        [int(i) for i in np.flatnonzero(space[l, :])] for l in range(space.shape[0])
    ]

    pair_choices = []
    for members in per_pair_members:
        pair_choices.append(list(itertools.permutations(if_slots, len(members))))

    for combo in itertools.product(*pair_choices):
        slots = [0.0] * n_sig
        for members, chosen in zip(per_pair_members, combo):
            for sig, slot in zip(members, chosen):
                slots[sig] = slot
        lo = tuple(
            lo_for_slot(signals[n].rf_center_hz, slots[n], injection) for n in range(n_sig)
        )
        plan = LoPlan.matched(lo)
        mapping = Sf2sfMapping(space, plan, max_per_pair)
        if not validate_mapping(signals, mapping, fe):
            yield plan


@dataclass
class SearchResult:
    best: Sf2sfMapping
    best_id: int
    curve: "object"  # SinrCurve of the exhaustive envelope
    dispersion_db: float
    objectives: list[float]
    curves: list[np.ndarray]
    theta_deg: np.ndarray


def _scalarize(sinr_db: np.ndarray, mode: str, theta_deg: np.ndarray, fixed_theta: float):
    if mode == "mean":
        return float(np.mean(sinr_db))
    if mode == "min":
        return float(np.min(sinr_db))
    if mode == "fixed":
        return float(sinr_db[int(np.argmin(np.abs(theta_deg - fixed_theta)))])
    raise ValueError(f"unknown scalarization {mode!r}")


def exhaustive_search(
    scenario,
    signals,
    cable: CableSpec,
    fe: FrontEndSpec,
    candidates: list[Sf2sfMapping],
    scalarization: str = "mean",
    fixed_theta_deg: float = 0.0,
    fext_enabled: bool = True,
    fext_seed: int = 0,
) -> SearchResult:
    """Evaluate the beamforming SINR sweep for every candidate mapping.

    Returns the scalarized-objective winner (lexicographic-lowest mapping on
    ties), the per-angle upper envelope over candidates, and the dispersion:
    the largest best-minus-worst spread across candidates at any angle.
    """
    from .beam import SinrCurve, sweep_theta

    if not candidates:
        raise ValueError("candidate set is empty")
    theta = None
    curves, objectives = [], []
    for cand in candidates:
        curve = sweep_theta(
            scenario, signals, cable, fe, cand, fext_enabled=fext_enabled, fext_seed=fext_seed
        )
        theta = curve.theta_deg
        curves.append(curve.sinr_db)
        objectives.append(_scalarize(curve.sinr_db, scalarization, theta, fixed_theta_deg))

    stacked = np.vstack(curves)
    envelope = stacked.max(axis=0)
    dispersion = float(np.max(envelope - stacked.min(axis=0)))
    best_obj = max(objectives)
    tied = [i for i, o in enumerate(objectives) if o == best_obj]
    best_id = min(tied, key=lambda i: candidates[i].flat_key())
    env_curve = SinrCurve(theta_deg=theta, sinr_db=envelope, mapping_id="envelope")
    return SearchResult(
        best=candidates[best_id],
        best_id=best_id,
        curve=env_curve,
        dispersion_db=dispersion,
        objectives=objectives,
        curves=curves,
        theta_deg=theta,
    )


def greedy_mapping(
    scenario,
    signals,
    cable: CableSpec,
    fe: FrontEndSpec,
    if_slots,
    per_pair: int = 2,
    n_pairs: int | None = None,
    injection: str = "high",
    fext_seed: int = 0,
) -> Sf2sfMapping:
    """One-pass constructive mapping: place signals in descending bandwidth
    order on the (pair, IF slot) minimising pair loss plus predicted FEXT
    interference from the partial assignment.  Always returns a valid
    mapping; raises if the instance is infeasible."""
    n_pairs = n_pairs if n_pairs is not None else cable.num_pairs
    n_sig = len(signals)
    if n_sig > n_pairs * per_pair:
        raise ValueError("infeasible: more signals than pair/slot capacity")

    order = sorted(range(n_sig), key=lambda n: (-signals[n].bandwidth_hz, n))
    placement: dict[int, tuple[int, float]] = {}  # signal -> (pair, if slot)

    def cost(n, pair, slot):
        sig_gain = abs(pair_insertion_gain(slot, cable, pair)) ** 2
        interf = 1e-30
        for other, (p2, s2) in placement.items():
            if p2 == pair:
                continue
            b1 = (slot - signals[n].bandwidth_hz / 2, slot + signals[n].bandwidth_hz / 2)
            b2 = (s2 - signals[other].bandwidth_hz / 2, s2 + signals[other].bandwidth_hz / 2)
            if _bands_overlap(b1, b2):
                interf += abs(fext_gain(slot, p2, pair, cable, seed=fext_seed)) ** 2
        return -10.0 * np.log10(sig_gain / interf)

    def feasible(n, pair, slot):
        members = [k for k, (p, _) in placement.items() if p == pair]
        if len(members) >= per_pair:
            return False
        band = (slot - signals[n].bandwidth_hz / 2, slot + signals[n].bandwidth_hz / 2)
        if band[0] < fe.passband_hz[0] or band[1] > fe.passband_hz[1]:
            return False
        for k in members:
            kb = (
                placement[k][1] - signals[k].bandwidth_hz / 2,
                placement[k][1] + signals[k].bandwidth_hz / 2,
            )
            if _bands_overlap(band, kb):
                return False
            # image separation against the already-placed slice mates
            lo_n = lo_for_slot(signals[n].rf_center_hz, slot, injection)
            img = abs(lo_n + slot - signals[k].rf_center_hz)
            ib = (img - signals[k].bandwidth_hz / 2, img + signals[k].bandwidth_hz / 2)
            if _bands_overlap(ib, kb):
                return False
            lo_k = lo_for_slot(signals[k].rf_center_hz, placement[k][1], injection)
            img2 = abs(lo_k + placement[k][1] - signals[n].rf_center_hz)
            ib2 = (img2 - signals[n].bandwidth_hz / 2, img2 + signals[n].bandwidth_hz / 2)
            if _bands_overlap(ib2, band):
                return False
        return True

    for n in order:
        options = [
            (cost(n, pair, slot), pair, slot)
            for pair in range(n_pairs)
            for slot in if_slots
            if feasible(n, pair, slot)
        ]
        if not options:
            raise ValueError(f"greedy placement failed for signal {n}")
        _, pair, slot = min(options, key=lambda t: (t[0], t[1], t[2]))
        placement[n] = (pair, slot)

    space = np.zeros((n_pairs, n_sig), dtype=np.int8)
    lo = []
    for n in range(n_sig):
        pair, slot = placement[n]
        space[pair, n] = 1
        lo.append(lo_for_slot(signals[n].rf_center_hz, slot, injection))
    mapping = Sf2sfMapping(space, LoPlan.matched(lo), per_pair)
    violations = validate_mapping(signals, mapping, fe)
    if violations:
        raise ValueError(f"greedy produced invalid mapping: {violations}")
    return mapping
