"""Link-abstraction tables: per-MCS modulation, code rate, spectral efficiency
and SNR threshold, shipped as versioned CSV data.

The rates are standard published MCS efficiencies; the thresholds follow the
usual Shannon-gap abstraction (10*log10(2^eff - 1) plus a fixed implementation
margin).  They are infrastructure constants, not measurement claims.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources


@dataclass(frozen=True)
class McsEntry:
    index: int
    modulation: str
    code_rate: float
    efficiency_bps_hz: float
    snr_threshold_db: float


_CACHE: dict[str, dict[int, McsEntry]] = {}

_TABLE_FILES = {
    "LTE": "lte_mcs.csv",
    "WiFi": "wifi_mcs.csv",
    "WiMAX": "wimax_mcs.csv",
}

# fraction of the nominal bandwidth usable for transport after control/pilot
# and guard overhead
SPECTRAL_UTILIZATION = {
    "LTE": 0.80,
    "WiFi": 0.80,
    "WiMAX": 0.75,
}


def mcs_table(rat: str) -> dict[int, McsEntry]:
    if rat not in _TABLE_FILES:
        raise KeyError(f"no MCS table for RAT {rat!r}")
    if rat not in _CACHE:
        text = resources.files("rocsim").joinpath("data", _TABLE_FILES[rat]).read_text()
        table = {}
        for row in csv.DictReader(text.splitlines()):
            entry = McsEntry(
                index=int(row["mcs"]),
                modulation=row["modulation"],
                code_rate=float(row["code_rate"]),
                efficiency_bps_hz=float(row["efficiency_bps_hz"]),
                snr_threshold_db=float(row["snr_threshold_db"]),
            )
            table[entry.index] = entry
        _CACHE[rat] = table
    return _CACHE[rat]


def mcs_entry(rat: str, index: int) -> McsEntry:
    table = mcs_table(rat)
    if index not in table:
        raise KeyError(f"MCS {index} not in the {rat} table (0..{max(table)})")
    return table[index]
