# optlink/signaling.py
"""SCPPM signaling arithmetic and the required-flux registry."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy import special

from .errors import DomainError, MissingFluxError, ScenarioError

log = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
REGISTRY_PATH = DATA_DIR / "required_flux.txt"

CODEWORD_BITS = 15120
OVERHEAD_BITS = 34  # CRC + termination
PPM_ORDERS = (4, 8, 16, 32, 64, 128, 256)


@dataclass(frozen=True)
class ScppmConfig:
    ppm_order: int
    code_rate: Fraction
    slot_time: float  # s
    guard_fraction: float = 0.25
    codeword_bits: int = CODEWORD_BITS
    overhead_bits: int = OVERHEAD_BITS

    def __post_init__(self):
        rate = self.code_rate
        if isinstance(rate, float):
            rate = Fraction(rate).limit_denominator(self.codeword_bits)
        object.__setattr__(self, "code_rate", Fraction(rate))
        if self.ppm_order not in PPM_ORDERS:
            raise DomainError(f"PPM order must be a power of 2 in 4..256, got {self.ppm_order!r}")
        if not 0 < self.code_rate < 1:
            raise DomainError(f"code rate must be in (0, 1), got {self.code_rate}")
        if (self.code_rate * self.codeword_bits).denominator != 1:
            raise DomainError(
                f"code rate {self.code_rate} does not give a whole number of "
                f"information bits per {self.codeword_bits}-bit codeword"
            )
        if not self.slot_time > 0:
            raise DomainError(f"slot time must be > 0, got {self.slot_time!r}")
        if self.guard_fraction < 0:
            raise DomainError(f"guard fraction must be >= 0, got {self.guard_fraction!r}")
        if not math.isclose(self.ppm_order * self.guard_fraction, round(self.ppm_order * self.guard_fraction)):
            raise DomainError(
                f"guard time of {self.guard_fraction:.0%} is not a whole number of slots at M={self.ppm_order}"
            )

    @property
    def bits_per_symbol(self) -> int:
        return self.ppm_order.bit_length() - 1

    @property
    def guard_slots(self) -> int:
        return round(self.ppm_order * self.guard_fraction)

    @property
    def symbols_per_codeword(self) -> int:
        return self.codeword_bits // self.bits_per_symbol

    @property
    def symbol_time(self) -> float:
        """Duration of one PPM symbol including its guard slots, s."""
        return (self.ppm_order + self.guard_slots) * self.slot_time

    @property
    def information_bits(self) -> int:
        return int(self.code_rate * self.codeword_bits) - self.overhead_bits


@dataclass(frozen=True)
class ChannelFlux:
    n_s: float  # signal photons / slot
    n_b: float  # background photons / slot

    def __post_init__(self):
        if self.n_s < 0 or self.n_b < 0:
            raise DomainError(f"photon counts must be >= 0, got n_s={self.n_s!r}, n_b={self.n_b!r}")


def data_rate(config: ScppmConfig) -> float:
    """Information bit rate in bit/s."""
    return config.information_bits / (config.symbols_per_codeword * config.symbol_time)


def peak_power(p_avg: float, config: ScppmConfig) -> float:
    if not p_avg > 0:
        raise DomainError(f"average power must be > 0, got {p_avg!r}")
    # one pulsed slot per M + guard slots
    return p_avg * (config.ppm_order + config.guard_slots)


def slot_pmf(k, flux: ChannelFlux, pulsed: bool):
    """Poisson probability of ``k`` photons in one slot."""
    ks = np.asarray(k)
    if np.any(ks < 0) or np.any(ks != np.floor(ks)):
        raise DomainError("photon count k must be a non-negative integer")
    mean = flux.n_s + flux.n_b if pulsed else flux.n_b
    ks = ks.astype(float)
    out = np.exp(special.xlogy(ks, mean) - mean - special.gammaln(ks + 1.0))
    return float(out) if out.ndim == 0 else out


def noise_per_slot(n_b_flux: float, slot_time: float) -> float:
    """Background photons per slot from a flux in photons/ns and a slot time in s."""
    if n_b_flux < 0 or slot_time < 0:
        raise DomainError("noise flux and slot time must be >= 0")
    return n_b_flux * slot_time * 1e9


# ------------------ Required flux registry ------------------
def _registry_key(ppm_order, code_rate, slot_time_ns, n_b) -> tuple:
    return (
        int(ppm_order),
        Fraction(str(code_rate)) if not isinstance(code_rate, Fraction) else code_rate,
        round(float(slot_time_ns), 6),
        float(f"{float(n_b):.6g}"),
    )


@dataclass(frozen=True)
class FluxEntry:
    ppm_order: int
    code_rate: Fraction
    slot_time_ns: float
    n_b: float  # photons / ns
    n_s_min_db: float  # dB photons / ns
    source: str = ""

    @property
    def key(self) -> tuple:
        return _registry_key(self.ppm_order, self.code_rate, self.slot_time_ns, self.n_b)


@dataclass
class RequiredFluxRegistry:
    """Minimum signal flux n_s_min keyed by (M, R, T_s, n_b).

    File format: one entry per line, whitespace separated
    ``M  R  T_s[ns]  n_b[phe/ns]  n_s_min[dB phe/ns]  source``;
    ``#`` starts a comment. Values are kept as written.
    """

    path: Path | None = None
    _entries: dict[tuple, FluxEntry] = field(default_factory=dict)

    @classmethod
    def from_entries(cls, entries, path: Path | None = None) -> "RequiredFluxRegistry":
        reg = cls(path)
        for entry in entries:
            if entry.key in reg._entries:
                raise ScenarioError(f"duplicate registry entry for {entry.key}")
            reg._entries[entry.key] = entry
        reg._check_monotone()
        return reg

    @classmethod
    def load(cls, path: Path | str) -> "RequiredFluxRegistry":
        path = Path(path)
        if not path.exists():
            raise ScenarioError(f"registry file not found: {path}")
        entries = []
        with path.open("r", encoding="utf-8") as f:
            for lineno, raw in enumerate(f, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) not in (5, 6):
                    raise ScenarioError(f"{path}:{lineno}: expected 5 or 6 columns, got {len(parts)}")
                try:
                    entries.append(
                        FluxEntry(
                            int(parts[0]),
                            Fraction(parts[1]),
                            float(parts[2]),
                            float(parts[3]),
                            float(parts[4]),
                            parts[5] if len(parts) == 6 else "",
                        )
                    )
                except (ValueError, ZeroDivisionError) as e:
                    raise ScenarioError(f"{path}:{lineno}: {e}") from e
        reg = cls.from_entries(entries, path)
        log.info("📚 Loaded %d required-flux entries from %s", len(reg), path)
        return reg

    def _check_monotone(self) -> None:
        groups: dict[tuple, list[FluxEntry]] = {}
        for entry in self._entries.values():
            groups.setdefault(entry.key[1:], []).append(entry)
        for rows in groups.values():
            rows.sort(key=lambda e: e.ppm_order)
            for small, large in zip(rows, rows[1:]):
                if large.n_s_min_db >= small.n_s_min_db:
                    raise ScenarioError(
                        f"registry not monotone: M={large.ppm_order} needs {large.n_s_min_db} dB, "
                        f"M={small.ppm_order} needs {small.n_s_min_db} dB"
                    )

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key) -> bool:
        return _registry_key(*key) in self._entries

    def entries(self) -> list[FluxEntry]:
        return sorted(self._entries.values(), key=lambda e: (e.code_rate, e.slot_time_ns, e.n_b, -e.ppm_order))

    def entry(self, ppm_order, code_rate, slot_time_ns, n_b) -> FluxEntry:
        key = _registry_key(ppm_order, code_rate, slot_time_ns, n_b)
        try:
            return self._entries[key]
        except KeyError:
            raise MissingFluxError(key) from None

    def source(self, key) -> str:
        return self.entry(*key).source


def required_flux(registry: RequiredFluxRegistry, ppm_order, code_rate, slot_time: float, n_b: float) -> float:
    """n_s_min in dB photons/ns; ``slot_time`` in s, ``n_b`` in photons/ns."""
    return registry.entry(ppm_order, code_rate, slot_time * 1e9, n_b).n_s_min_db


def load_registry(path: Path | str | None = None) -> RequiredFluxRegistry:
    return RequiredFluxRegistry.load(path if path is not None else REGISTRY_PATH)
