"""Hardware parameters of the modeled accelerator and the normalized energy table.

The accelerator is an N x N PE array (each PE: one 16-bit MAC, a small input
register and a G-entry accumulator register file) fed by a preload buffer,
a stream/broadcast buffer and a global on-chip SRAM, with DRAM behind a DMA
engine characterised by a fixed latency and an effective bandwidth.

Energies are normalized so one MAC operation costs 1 unit; the remaining
entries follow the usual on-chip hierarchy ordering (register file ~ MAC,
inter-PE hop 2x, global buffer 6x, DRAM 200x per element) and are fully
configurable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace


class ConfigError(ValueError):
    """Raised for hardware configurations that violate an invariant."""


@dataclass(frozen=True)
class UnitEnergyTable:
    """Per-access energies, normalized to the MAC unit (mac = 1)."""

    mac: float = 1.0
    regfile: float = 1.0
    inter_pe: float = 2.0
    global_buffer: float = 6.0
    dram: float = 200.0

    def scaled(self, factor: float) -> "UnitEnergyTable":
        return UnitEnergyTable(
            mac=self.mac * factor,
            regfile=self.regfile * factor,
            inter_pe=self.inter_pe * factor,
            global_buffer=self.global_buffer * factor,
            dram=self.dram * factor,
        )


@dataclass(frozen=True)
class ClockSpec:
    """Accelerator clock and DRAM link rate; fixes bytes-per-cycle."""

    clock_mhz: float = 1000.0
    dram_gbps: float = 16.0

    @property
    def dram_bytes_per_cycle(self) -> float:
        return self.dram_gbps * 1e9 / (self.clock_mhz * 1e6)


@dataclass(frozen=True)
class HardwareConfig:
    pe_dim: int = 32                      # N: the array is N x N PEs
    regfile_depth: int = 8                # G: accumulator entries per PE
    global_buffer_bytes: int = 131072     # 128 KB on-chip SRAM
    dram_latency_cycles: int = 100
    dram_bytes_per_cycle: float = 16.0    # 16 GB/s at a 1 GHz clock
    bytes_per_element: int = 2
    unit_energy: UnitEnergyTable = field(default_factory=UnitEnergyTable)

    def with_clock(self, clock: ClockSpec) -> "HardwareConfig":
        return replace(self, dram_bytes_per_cycle=clock.dram_bytes_per_cycle)


def default_config() -> HardwareConfig:
    return HardwareConfig()


def validate(cfg: HardwareConfig) -> HardwareConfig:
    """Check all invariants; returns the (already normalized) config.

    Idempotent: validate(validate(c)) == validate(c).
    """
    if cfg.pe_dim < 1:
        raise ConfigError("pe_dim must be positive")
    if not 8 <= cfg.pe_dim <= 256:
        raise ConfigError(f"pe_dim {cfg.pe_dim} outside the accepted range [8, 256]")
    if cfg.regfile_depth < 1:
        raise ConfigError("regfile_depth must be positive")
    if cfg.global_buffer_bytes < 1:
        raise ConfigError("global_buffer_bytes must be positive")
    if cfg.dram_latency_cycles < 0:
        raise ConfigError("dram_latency_cycles must be non-negative")
    if cfg.dram_bytes_per_cycle <= 0:
        raise ConfigError("dram_bytes_per_cycle must be positive")
    if cfg.bytes_per_element < 1:
        raise ConfigError("bytes_per_element must be positive")
    e = cfg.unit_energy
    for name in ("mac", "regfile", "inter_pe", "global_buffer", "dram"):
        if getattr(e, name) <= 0:
            raise ConfigError(f"unit_energy.{name} must be positive")
    return cfg


def fingerprint(cfg: HardwareConfig) -> str:
    """Short deterministic id of a config, embedded in reports."""
    return (
        f"N{cfg.pe_dim}-G{cfg.regfile_depth}-buf{cfg.global_buffer_bytes}"
        f"-L{cfg.dram_latency_cycles}-B{cfg.dram_bytes_per_cycle:g}"
        f"-b{cfg.bytes_per_element}"
    )


def parse_hw_config(text: str) -> HardwareConfig:
    """Build a config from a JSON document; unknown keys are rejected."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"hw config syntax error at line {e.lineno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("hw config must be a JSON object")
    known = {
        "pe_dim",
        "regfile_depth",
        "global_buffer_bytes",
        "dram_latency_cycles",
        "dram_bytes_per_cycle",
        "bytes_per_element",
        "clock_mhz",
        "dram_gbps",
        "unit_energy",
    }
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown hw config keys: {sorted(unknown)}")
    cfg = default_config()
    if "clock_mhz" in doc or "dram_gbps" in doc:
        clock = ClockSpec(
            clock_mhz=float(doc.get("clock_mhz", 1000.0)),
            dram_gbps=float(doc.get("dram_gbps", 16.0)),
        )
        cfg = cfg.with_clock(clock)
    simple = {
        k: doc[k]
        for k in ("pe_dim", "regfile_depth", "global_buffer_bytes",
                  "dram_latency_cycles", "bytes_per_element")
        if k in doc
    }
    if "dram_bytes_per_cycle" in doc:
        simple["dram_bytes_per_cycle"] = float(doc["dram_bytes_per_cycle"])
    if simple:
        cfg = replace(cfg, **simple)
    if "unit_energy" in doc:
        cfg = replace(cfg, unit_energy=UnitEnergyTable(**doc["unit_energy"]))
    return validate(cfg)


def load_hw_config(path: str) -> HardwareConfig:
    with open(path) as f:
        return parse_hw_config(f.read())
