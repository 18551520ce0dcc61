"""Per-layer dataflow selection, whole-network simulation and energy rollup.

The accelerator runs a network layer by layer and can switch between the
weight-stationary and output-stationary modes per layer at no cost, so the
hybrid policy simply takes whichever mode simulates faster for each layer.
Fully-connected layers always run weight-stationary (there is no 2D output
block to hold stationary) and pooling / element-wise layers only move data:
they cost one DRAM pass of their input+output footprint and no MAC energy.

Selection is by cycle count only; energy is reported, never optimized.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache

from .dataflow_os import AccessCounts, os_layer_cost
from .dataflow_ws import ws_layer_cost
from .hwconfig import HardwareConfig, UnitEnergyTable, fingerprint, validate
from .memtile import OS, WS, TileConfig, TilingEval, search_best
from .workload import (
    LayerCategory,
    LayerKind,
    LayerSpec,
    NetworkSpec,
    classify_layer,
    layer_footprint_bytes,
)


class Policy(str, Enum):
    HYBRID = "hybrid"
    OS_ONLY = "os"
    WS_ONLY = "ws"


@dataclass(frozen=True)
class LayerReport:
    name: str
    category: LayerCategory
    dataflow: str | None            # "OS", "WS" or None for transfer-only layers
    cycles_total: int
    cycles_compute: int
    cycles_transfer_exposed: int
    tile: TileConfig | None
    accesses: AccessCounts
    energy: float
    active_macs: int
    utilization: float


@dataclass(frozen=True)
class NetworkReport:
    network: str
    hw: str
    policy: Policy
    layer_reports: tuple[LayerReport, ...]
    total_cycles: int
    total_energy: float
    category_cycles: dict
    category_energy: dict


@dataclass(frozen=True)
class PolicyComparison:
    network: str
    hybrid_cycles: int
    os_cycles: int
    ws_cycles: int
    hybrid_energy: float
    os_energy: float
    ws_energy: float

    @property
    def speedup_vs_os(self) -> float:
        return self.os_cycles / self.hybrid_cycles

    @property
    def speedup_vs_ws(self) -> float:
        return self.ws_cycles / self.hybrid_cycles

    @property
    def energy_reduction_vs_os_pct(self) -> float:
        return 100.0 * (1.0 - self.hybrid_energy / self.os_energy)

    @property
    def energy_reduction_vs_ws_pct(self) -> float:
        return 100.0 * (1.0 - self.hybrid_energy / self.ws_energy)


def energy_of(accesses: AccessCounts, dram_bytes: int, table: UnitEnergyTable,
              bytes_per_element: int) -> float:
    """Dot product of access counts with the normalized unit-energy table."""
    return (
        accesses.mac_ops * table.mac
        + accesses.regfile * table.regfile
        + accesses.inter_pe * table.inter_pe
        + accesses.global_buffer * table.global_buffer
        + (dram_bytes / bytes_per_element) * table.dram
    )


@lru_cache(maxsize=65536)
def _evaluated(layer: LayerSpec, cfg: HardwareConfig, dataflow: str):
    """(TilingEval, AccessCounts) for a compute layer under one dataflow."""
    ev: TilingEval = search_best(layer, cfg, dataflow)
    cost = os_layer_cost(layer, cfg) if dataflow == OS else ws_layer_cost(layer, cfg)
    accesses = replace(cost.accesses, dram_bytes=ev.dram_bytes)
    return ev, accesses, cost.active_macs


def select_dataflow(layer: LayerSpec, cfg: HardwareConfig) -> tuple[str, int]:
    """Faster of the two dataflows by simulated cycles; ties go to OS.

    Fully-connected layers are only evaluated weight-stationary.
    """
    if not layer.is_compute:
        raise ValueError(f"layer {layer.name!r} is not a compute layer")
    if layer.kind == LayerKind.FULLY_CONNECTED:
        ev, _, _ = _evaluated(layer, cfg, WS)
        return WS, ev.total_cycles
    ev_os, _, _ = _evaluated(layer, cfg, OS)
    ev_ws, _, _ = _evaluated(layer, cfg, WS)
    if ev_ws.total_cycles < ev_os.total_cycles:
        return WS, ev_ws.total_cycles
    return OS, ev_os.total_cycles


def _dataflow_for(layer: LayerSpec, cfg: HardwareConfig, policy: Policy) -> str:
    if layer.kind == LayerKind.FULLY_CONNECTED:
        return WS
    if policy == Policy.OS_ONLY:
        return OS
    if policy == Policy.WS_ONLY:
        return WS
    return select_dataflow(layer, cfg)[0]


def _transfer_only_report(layer: LayerSpec, cfg: HardwareConfig) -> LayerReport:
    inp, _, out = layer_footprint_bytes(layer, cfg.bytes_per_element)
    traffic = inp + out
    cycles = cfg.dram_latency_cycles + math.ceil(traffic / cfg.dram_bytes_per_cycle)
    accesses = AccessCounts(
        global_buffer=traffic // cfg.bytes_per_element,
        dram_bytes=traffic,
    )
    energy = energy_of(accesses, traffic, cfg.unit_energy, cfg.bytes_per_element)
    return LayerReport(
        name=layer.name,
        category=classify_layer(layer),
        dataflow=None,
        cycles_total=cycles,
        cycles_compute=0,
        cycles_transfer_exposed=cycles,
        tile=None,
        accesses=accesses,
        energy=energy,
        active_macs=0,
        utilization=0.0,
    )


def _layer_report(layer: LayerSpec, cfg: HardwareConfig, policy: Policy) -> LayerReport:
    if not layer.is_compute:
        return _transfer_only_report(layer, cfg)
    flow = _dataflow_for(layer, cfg, policy)
    ev, accesses, active = _evaluated(layer, cfg, flow)
    energy = energy_of(accesses, ev.dram_bytes, cfg.unit_energy, cfg.bytes_per_element)
    util = active / (ev.total_cycles * cfg.pe_dim ** 2)
    return LayerReport(
        name=layer.name,
        category=classify_layer(layer),
        dataflow=flow,
        cycles_total=ev.total_cycles,
        cycles_compute=ev.compute_cycles,
        cycles_transfer_exposed=ev.exposed_transfer_cycles,
        tile=ev.tile,
        accesses=accesses,
        energy=energy,
        active_macs=active,
        utilization=util,
    )


def simulate_network(net: NetworkSpec, cfg: HardwareConfig,
                     policy: Policy = Policy.HYBRID, workers: int = 1) -> NetworkReport:
    """Layer-by-layer simulation; reports are in network order regardless of workers."""
    validate(cfg)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = tuple(pool.map(lambda l: _layer_report(l, cfg, policy), net.layers))
    else:
        reports = tuple(_layer_report(l, cfg, policy) for l in net.layers)
    cat_cycles = {cat: 0 for cat in LayerCategory}
    cat_energy = {cat: 0.0 for cat in LayerCategory}
    for r in reports:
        cat_cycles[r.category] += r.cycles_total
        cat_energy[r.category] += r.energy
    return NetworkReport(
        network=net.name,
        hw=fingerprint(cfg),
        policy=policy,
        layer_reports=reports,
        total_cycles=sum(r.cycles_total for r in reports),
        total_energy=sum(r.energy for r in reports),
        category_cycles=cat_cycles,
        category_energy=cat_energy,
    )


def compare_policies(net: NetworkSpec, cfg: HardwareConfig, workers: int = 1) -> PolicyComparison:
    """Hybrid vs forced-OS vs forced-WS totals for one network."""
    hybrid = simulate_network(net, cfg, Policy.HYBRID, workers=workers)
    os_only = simulate_network(net, cfg, Policy.OS_ONLY, workers=workers)
    ws_only = simulate_network(net, cfg, Policy.WS_ONLY, workers=workers)
    return PolicyComparison(
        network=net.name,
        hybrid_cycles=hybrid.total_cycles,
        os_cycles=os_only.total_cycles,
        ws_cycles=ws_only.total_cycles,
        hybrid_energy=hybrid.total_energy,
        os_energy=os_only.total_energy,
        ws_energy=ws_only.total_energy,
    )
