"""NB-IoT uplink transport model: resource units, transport block sizes, rates.

Times are tracked internally in integer microseconds so that ceiling
boundaries in the transmission-time formula stay exact; public APIs
return seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "RuFormat",
    "TransportConfig",
    "RU_FORMATS",
    "REPETITION_SET",
    "RU_COUNTS",
    "tbs_lookup",
    "transmission_time",
    "data_rate",
    "mean_field_rate",
    "peak_rate_table",
]

# Rel-14 NPUSCH Format 1 transport block sizes in bits, MCS levels 0..13 by
# resource-unit count {1,2,3,4,5,6,8,10}.  The MCS 0 / 3-RU entry is 58 as
# printed in the standard tables we follow, even though neighbouring values
# would suggest 56; see README.
_TBS_TABLE = (
    (16, 32, 58, 88, 120, 152, 208, 256),
    (24, 56, 88, 144, 176, 208, 256, 344),
    (32, 72, 144, 176, 208, 256, 328, 424),
    (40, 104, 176, 208, 256, 328, 440, 568),
    (56, 120, 208, 256, 328, 408, 552, 680),
    (72, 144, 224, 328, 424, 504, 680, 872),
    (88, 176, 256, 392, 504, 600, 808, 1000),
    (104, 224, 328, 472, 584, 712, 1000, 1224),
    (120, 256, 392, 536, 680, 808, 1096, 1384),
    (136, 296, 456, 616, 776, 936, 1256, 1544),
    (144, 328, 504, 680, 872, 1000, 1384, 1736),
    (176, 376, 584, 776, 1000, 1192, 1608, 2024),
    (208, 440, 680, 1000, 1128, 1352, 1800, 2280),
    (224, 488, 744, 1032, 1256, 1544, 2024, 2536),
)

RU_COUNTS = (1, 2, 3, 4, 5, 6, 8, 10)
REPETITION_SET = (1, 2, 4, 8, 16, 32, 64, 128)

# MCS levels usable only with multi-tone resource units.
_MULTI_TONE_ONLY_MCS = frozenset({11, 12, 13})


@dataclass(frozen=True)
class RuFormat:
    """One row of the NPUSCH-F1 resource-unit grid.

    Only the five standardized rows are constructible; anything else
    raises ``ValueError``.
    """

    tone_bandwidth_khz: float
    tones_per_ru: int
    slots_per_ru: int
    slot_duration_ms: float

    def __post_init__(self):
        if (
            self.tone_bandwidth_khz,
            self.tones_per_ru,
            self.slots_per_ru,
            self.slot_duration_ms,
        ) not in _RU_ROWS:
            raise ValueError(
                f"not a standardized resource-unit format: "
                f"{self.tone_bandwidth_khz} kHz x {self.tones_per_ru} tones"
            )

    @property
    def is_single_tone(self) -> bool:
        return self.tones_per_ru == 1

    @property
    def duration_us(self) -> int:
        """RU duration in integer microseconds (exact)."""
        return self.slots_per_ru * int(self.slot_duration_ms * 1000)

    @property
    def duration_s(self) -> float:
        return self.duration_us / 1e6


_RU_ROWS = frozenset(
    {
        (3.75, 1, 16, 2.0),
        (15.0, 1, 16, 0.5),
        (15.0, 3, 8, 0.5),
        (15.0, 6, 4, 0.5),
        (15.0, 12, 2, 0.5),
    }
)

RU_FORMATS = {
    (3.75, 1): RuFormat(3.75, 1, 16, 2.0),
    (15.0, 1): RuFormat(15.0, 1, 16, 0.5),
    (15.0, 3): RuFormat(15.0, 3, 8, 0.5),
    (15.0, 6): RuFormat(15.0, 6, 4, 0.5),
    (15.0, 12): RuFormat(15.0, 12, 2, 0.5),
}


def tbs_lookup(mcs: int, n_ru: int) -> int:
    """Transport block size in bits for an MCS level and RU count."""
    if not isinstance(mcs, int) or not 0 <= mcs <= 13:
        raise ValueError(f"mcs must be an integer in 0..13, got {mcs!r}")
    if n_ru not in RU_COUNTS:
        raise ValueError(f"n_ru must be one of {RU_COUNTS}, got {n_ru!r}")
    return _TBS_TABLE[mcs][RU_COUNTS.index(n_ru)]


@dataclass(frozen=True)
class TransportConfig:
    """Transmission configuration: RU format, MCS level, RU count, repetitions."""

    ru_format: RuFormat
    mcs_level: int
    n_ru: int = 1
    n_rep: int = 1

    def __post_init__(self):
        tbs_lookup(self.mcs_level, self.n_ru)  # validates ranges
        if self.ru_format.is_single_tone and self.mcs_level in _MULTI_TONE_ONLY_MCS:
            raise ValueError(
                f"MCS {self.mcs_level} requires a multi-tone format"
            )
        if self.n_rep not in REPETITION_SET:
            raise ValueError(f"n_rep must be one of {REPETITION_SET}, got {self.n_rep!r}")

    @property
    def tbs(self) -> int:
        return tbs_lookup(self.mcs_level, self.n_ru)

    @property
    def block_time_us(self) -> int:
        """Time to send one transport block (all repetitions), microseconds."""
        return self.n_ru * self.ru_format.duration_us * self.n_rep


def transmission_time(packet_bits: float, cfg: TransportConfig) -> float:
    """Time in seconds to transmit a packet: ceil(bits/TBS) blocks end to end."""
    if packet_bits <= 0:
        raise ValueError(f"packet_bits must be positive, got {packet_bits!r}")
    n_blocks = math.ceil(packet_bits / cfg.tbs)
    return n_blocks * cfg.block_time_us / 1e6


def data_rate(packet_bits: float, cfg: TransportConfig) -> float:
    """Effective rate in bits/s for a specific packet (ceiling included)."""
    return packet_bits / transmission_time(packet_bits, cfg)


def mean_field_rate(cfg: TransportConfig) -> float:
    """Homogeneous rate upper bound TBS / (N_ru * T_ru * N_rep), bits/s.

    Equals ``data_rate`` whenever the packet is an exact multiple of the
    transport block size, and bounds it from above otherwise.
    """
    return cfg.tbs * 1e6 / cfg.block_time_us


def peak_rate_table() -> dict[tuple[float, int], float]:
    """Published uplink peak rates in kbps keyed by (tone bandwidth kHz, tones)."""
    return {
        (3.75, 1): 8.0,
        (15.0, 1): 32.0,
        (15.0, 3): 64.0,
        (15.0, 6): 129.0,
        (15.0, 12): 258.0,
    }
