"""Analytical cycle/energy model for a dual-dataflow spatial CNN accelerator.

The accelerator is an N x N array of multiply-accumulate PEs that executes a
network layer by layer, choosing per layer between a weight-stationary mode
(weights resident, inputs streamed, adder-chain reduction) and an
output-stationary mode (output pixels resident, non-zero weights broadcast,
inputs shifted over the mesh).  The model reports cycles, memory-access
counts, normalized energy and PE utilization per layer, with DRAM traffic
double-buffered against compute through a six-loop tiling search.
"""

from .dataflow_os import (
    AccessCounts,
    OsLayerCost,
    UnsupportedLayerError,
    os_block_geometry,
    os_layer_cost,
)
from .dataflow_ws import WsLayerCost, ws_layer_cost, ws_psum_traffic
from .engine import (
    LayerReport,
    NetworkReport,
    Policy,
    PolicyComparison,
    compare_policies,
    energy_of,
    select_dataflow,
    simulate_network,
)
from .hwconfig import (
    ClockSpec,
    ConfigError,
    HardwareConfig,
    UnitEnergyTable,
    default_config,
    validate,
)
from .memtile import (
    OS,
    WS,
    InfeasibleTilingError,
    TileConfig,
    TransferPlan,
    dram_bytes,
    evaluate_tiling,
    overlap_layer_time,
    tiling_search,
    working_set_bytes,
)
from .workload import (
    LayerCategory,
    LayerKind,
    LayerSpec,
    NetworkSpec,
    WorkloadError,
    classify_layer,
    layer_footprint_bytes,
    load_workload,
    mac_count,
    mac_proportions,
    parse_network,
    serialize_network,
)

__version__ = "0.1.0"

__all__ = [
    "AccessCounts", "ClockSpec", "ConfigError", "HardwareConfig",
    "InfeasibleTilingError", "LayerCategory", "LayerKind", "LayerReport",
    "LayerSpec", "NetworkReport", "NetworkSpec", "OS", "OsLayerCost",
    "Policy", "PolicyComparison", "TileConfig", "TransferPlan",
    "UnitEnergyTable", "UnsupportedLayerError", "WS", "WorkloadError",
    "WsLayerCost", "classify_layer", "compare_policies", "default_config",
    "dram_bytes", "energy_of", "evaluate_tiling", "layer_footprint_bytes",
    "load_workload", "mac_count", "mac_proportions", "os_block_geometry",
    "os_layer_cost", "overlap_layer_time", "parse_network",
    "select_dataflow", "serialize_network", "simulate_network",
    "tiling_search", "validate", "working_set_bytes", "ws_layer_cost",
    "ws_psum_traffic",
]
