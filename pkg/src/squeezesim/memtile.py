"""DRAM transfer timing, double buffering and the six-loop tiling search.

A layer whose working set exceeds half the global buffer (double buffering
keeps two tiles in flight) is split along the six convolution loops
(out_h, out_w, out_c, in_c, filter_h, filter_w).  Every tile is charged its
full nominal size (edge tiles are not discounted, matching the full
preload/drain cost of edge blocks in the PE-array models), which keeps the
pipeline timing in closed form:

    total = transfer[0] + sum_i max(compute[i-1], transfer[i]) + compute[n-1]

Each tile's transfer pays the DRAM latency once plus its fresh bytes over the
effective bandwidth.  Data reused between consecutive tiles along the
innermost varying loop is not refetched; all other cross-tile reuse is
ignored (conservative).

Candidate tile sizes per loop are the full extent plus a power-of-two ladder
anchored at the PE dimension ({N/8, N/4, N/2, N, 2N, 4N, ...} clipped to the
extent; filter loops tile only to 1 or the full filter).  Loop orders come
from the fixed eight-entry LOOP_ORDERS list.  The search is exhaustive over
this candidate set and deterministic: ties resolve to larger tiles first,
then earlier loop orders.

For depthwise (and pooling) layers the channel loop rides on the out_c slot
and the in_c loop is degenerate (extent 1), since each output channel reads
exactly its own input channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .dataflow_os import UnsupportedLayerError, os_compute_cycles
from .dataflow_ws import ws_compute_cycles
from .hwconfig import HardwareConfig
from .workload import LayerKind, LayerSpec

LOOP_LABELS = ("oh", "ow", "oc", "ic", "fh", "fw")

# Fixed, deterministic loop-order candidates (outermost first).
LOOP_ORDERS = (
    ("oc", "ic", "fh", "fw", "oh", "ow"),
    ("oc", "oh", "ow", "ic", "fh", "fw"),
    ("ic", "oc", "fh", "fw", "oh", "ow"),
    ("ic", "oh", "ow", "oc", "fh", "fw"),
    ("oh", "ow", "oc", "ic", "fh", "fw"),
    ("oh", "ow", "ic", "oc", "fh", "fw"),
    ("oh", "oc", "ic", "fh", "fw", "ow"),
    ("ow", "oh", "oc", "ic", "fh", "fw"),
)

OS = "OS"
WS = "WS"
DATAFLOWS = (OS, WS)


class InfeasibleTilingError(RuntimeError):
    """No candidate tile fits in half the global buffer."""


@dataclass(frozen=True)
class TileConfig:
    """Tile sizes for the six convolution loops plus their nesting order."""

    t_oh: int
    t_ow: int
    t_oc: int
    t_ic: int
    t_fh: int = 1
    t_fw: int = 1
    loop_order: tuple[str, ...] = LOOP_ORDERS[0]

    def __post_init__(self):
        for f in ("t_oh", "t_ow", "t_oc", "t_ic", "t_fh", "t_fw"):
            if getattr(self, f) < 1:
                raise ValueError(f"TileConfig.{f} must be >= 1")
        if sorted(self.loop_order) != sorted(LOOP_LABELS):
            raise ValueError(f"loop_order must permute {LOOP_LABELS}")

    def sizes(self) -> dict[str, int]:
        return {
            "oh": self.t_oh, "ow": self.t_ow, "oc": self.t_oc,
            "ic": self.t_ic, "fh": self.t_fh, "fw": self.t_fw,
        }


@dataclass(frozen=True)
class TransferPlan:
    """Uniform-tile DRAM transfer schedule for one layer."""

    tile_count: int
    bytes_per_tile: int
    dram_latency_cycles: int
    dram_bytes_per_cycle: float

    @property
    def transfer_cycles_per_tile(self) -> int:
        return self.dram_latency_cycles + math.ceil(self.bytes_per_tile / self.dram_bytes_per_cycle)

    def total_layer_cycles(self, compute_cycles_per_tile: int) -> int:
        n = self.tile_count
        return overlap_layer_time(
            [compute_cycles_per_tile] * n,
            [self.transfer_cycles_per_tile] * n,
        )


def overlap_layer_time(compute_cycles, transfer_cycles, latency: int = 0) -> int:
    """Two-stage pipeline: tile i's transfer overlaps tile i-1's compute.

    ``latency`` is added to every transfer entry; pass 0 when entries already
    include the per-tile DRAM latency.
    """
    if len(compute_cycles) != len(transfer_cycles):
        raise ValueError("compute and transfer lists must have the same length")
    if not compute_cycles:
        raise ValueError("at least one tile required")
    total = transfer_cycles[0] + latency
    for i in range(1, len(transfer_cycles)):
        total += max(compute_cycles[i - 1], transfer_cycles[i] + latency)
    return total + compute_cycles[-1]


# ---------------------------------------------------------------------------
# loop extents, operand shapes and dependences


def loop_extents(layer: LayerSpec) -> dict[str, int]:
    if layer.kind in (LayerKind.DEPTHWISE, LayerKind.POOL, LayerKind.ELEMENTWISE):
        ic = 1  # channel loop rides on oc
    else:
        ic = layer.in_c
    return {
        "oh": layer.out_h, "ow": layer.out_w, "oc": layer.out_c,
        "ic": ic, "fh": layer.filter_h, "fw": layer.filter_w,
    }


def _channelwise(layer: LayerSpec) -> bool:
    return layer.kind in (LayerKind.DEPTHWISE, LayerKind.POOL, LayerKind.ELEMENTWISE)


def _operand_deps(layer: LayerSpec) -> dict[str, frozenset]:
    if _channelwise(layer):
        return {
            "in": frozenset({"oh", "ow", "oc", "fh", "fw"}),
            "w": frozenset({"oc", "fh", "fw"}),
            "out": frozenset({"oh", "ow", "oc"}),
        }
    return {
        "in": frozenset({"oh", "ow", "ic", "fh", "fw"}),
        "w": frozenset({"oc", "ic", "fh", "fw"}),
        "out": frozenset({"oh", "ow", "oc"}),
    }


def _tile_operand_bytes(layer: LayerSpec, tile: TileConfig, b: int):
    """(input, weight, output) bytes of one nominal tile."""
    in_rows = min(layer.stride * (tile.t_oh - 1) + tile.t_fh, layer.in_h)
    in_cols = min(layer.stride * (tile.t_ow - 1) + tile.t_fw, layer.in_w)
    in_ch = tile.t_oc if _channelwise(layer) else tile.t_ic
    in_b = in_rows * in_cols * in_ch * b
    if layer.kind in (LayerKind.CONV, LayerKind.FULLY_CONNECTED):
        w_b = tile.t_fh * tile.t_fw * tile.t_ic * tile.t_oc * b
    elif layer.kind == LayerKind.DEPTHWISE:
        w_b = tile.t_fh * tile.t_fw * tile.t_oc * b
    else:
        w_b = 0
    out_b = tile.t_oh * tile.t_ow * tile.t_oc * b
    return in_b, w_b, out_b


def working_set_bytes(layer: LayerSpec, tile: TileConfig, bytes_per_element: int) -> int:
    """On-chip bytes one tile occupies: input (with halo) + weights + output."""
    _validate_tile(layer, tile)
    return sum(_tile_operand_bytes(layer, tile, bytes_per_element))


def _validate_tile(layer: LayerSpec, tile: TileConfig):
    ext = loop_extents(layer)
    for label, size in tile.sizes().items():
        if size > ext[label]:
            raise ValueError(
                f"tile {label}={size} exceeds loop extent {ext[label]} "
                f"for layer {layer.name!r}"
            )


def _tile_compute_cycles(layer: LayerSpec, tile: TileConfig, cfg: HardwareConfig,
                         dataflow: str) -> int:
    n = cfg.pe_dim
    if layer.kind == LayerKind.DEPTHWISE:
        if dataflow == OS:
            return int(os_compute_cycles(tile.t_oh, tile.t_ow, tile.t_oc, tile.t_oc,
                                         tile.t_fh, tile.t_fw, layer.stride,
                                         layer.sparsity, n, depthwise=True))
        return int(ws_compute_cycles(tile.t_oh, tile.t_ow, tile.t_oc, tile.t_oc,
                                     tile.t_fh, tile.t_fw, n, depthwise=True))
    if dataflow == OS:
        if layer.kind != LayerKind.CONV:
            raise UnsupportedLayerError(
                f"layer {layer.name!r} ({layer.kind.value}) cannot run output-stationary"
            )
        return int(os_compute_cycles(tile.t_oh, tile.t_ow, tile.t_oc, tile.t_ic,
                                     tile.t_fh, tile.t_fw, layer.stride,
                                     layer.sparsity, n))
    if layer.kind not in (LayerKind.CONV, LayerKind.FULLY_CONNECTED):
        raise UnsupportedLayerError(
            f"layer {layer.name!r} ({layer.kind.value}) cannot run weight-stationary"
        )
    return int(ws_compute_cycles(tile.t_oh, tile.t_ow, tile.t_oc, tile.t_ic,
                                 tile.t_fh, tile.t_fw, n))


def _inner_varying(tile: TileConfig, counts: dict[str, int]):
    for label in reversed(tile.loop_order):
        if counts[label] > 1:
            return label
    return None


@dataclass(frozen=True)
class TilingEval:
    """Full timing of one (layer, tile, dataflow) choice."""

    tile: TileConfig
    tile_count: int
    compute_cycles_per_tile: int
    total_cycles: int
    compute_cycles: int
    dram_bytes: int

    @property
    def exposed_transfer_cycles(self) -> int:
        return self.total_cycles - self.compute_cycles


def evaluate_tiling(layer: LayerSpec, cfg: HardwareConfig, dataflow: str,
                    tile: TileConfig) -> TilingEval:
    """Exact cost of one candidate; the search optimum equals the min over these."""
    _validate_tile(layer, tile)
    b = cfg.bytes_per_element
    cap = cfg.global_buffer_bytes // 2
    ws = working_set_bytes(layer, tile, b)
    if ws > cap:
        raise InfeasibleTilingError(
            f"layer {layer.name!r}: tile working set {ws} B exceeds "
            f"{cap} B (half of the global buffer)"
        )
    ext = loop_extents(layer)
    sizes = tile.sizes()
    counts = {d: -(-ext[d] // sizes[d]) for d in LOOP_LABELS}
    n = math.prod(counts.values())
    c = _tile_compute_cycles(layer, tile, cfg, dataflow)

    op_bytes = dict(zip(("in", "w", "out"), _tile_operand_bytes(layer, tile, b)))
    deps = _operand_deps(layer)
    inner = _inner_varying(tile, counts)
    base = sum(v for k, v in op_bytes.items() if inner is not None and inner in deps[k])
    cred = sum(op_bytes.values()) - base
    n_inner = counts[inner] if inner is not None else 1
    k = n // n_inner

    latency = cfg.dram_latency_cycles
    bw = cfg.dram_bytes_per_cycle
    t_full = latency + math.ceil((base + cred) / bw)
    t_base = latency + math.ceil(base / bw)
    total = t_full + (k - 1) * max(c, t_full) + (n - k) * max(c, t_base) + c
    return TilingEval(
        tile=tile,
        tile_count=n,
        compute_cycles_per_tile=c,
        total_cycles=total,
        compute_cycles=n * c,
        dram_bytes=n * base + k * cred,
    )


def dram_bytes(layer: LayerSpec, tile: TileConfig, dataflow: str = WS,
               bytes_per_element: int = 2) -> int:
    """Total DRAM traffic of a layer under a tiling (dataflow-independent)."""
    del dataflow  # traffic depends on the tiling only
    _validate_tile(layer, tile)
    ext = loop_extents(layer)
    sizes = tile.sizes()
    counts = {d: -(-ext[d] // sizes[d]) for d in LOOP_LABELS}
    n = math.prod(counts.values())
    op_bytes = dict(zip(("in", "w", "out"),
                        _tile_operand_bytes(layer, tile, bytes_per_element)))
    deps = _operand_deps(layer)
    inner = _inner_varying(tile, counts)
    base = sum(v for k_, v in op_bytes.items() if inner is not None and inner in deps[k_])
    cred = sum(op_bytes.values()) - base
    n_inner = counts[inner] if inner is not None else 1
    k = n // n_inner
    return n * base + k * cred


def identity_tiling(layer: LayerSpec) -> TileConfig:
    ext = loop_extents(layer)
    return TileConfig(t_oh=ext["oh"], t_ow=ext["ow"], t_oc=ext["oc"],
                      t_ic=ext["ic"], t_fh=ext["fh"], t_fw=ext["fw"])


# ---------------------------------------------------------------------------
# candidate enumeration and search


def candidate_tile_sizes(extent: int, pe_dim: int) -> tuple[int, ...]:
    """Full extent plus the power-of-two ladder around N, descending."""
    vals = {extent}
    rung = max(1, pe_dim // 8)
    while rung < extent:
        vals.add(rung)
        rung *= 2
    return tuple(sorted(vals, reverse=True))


def _filter_sizes(extent: int) -> tuple[int, ...]:
    return (extent, 1) if extent > 1 else (1,)


def enumerate_tilings(layer: LayerSpec, cfg: HardwareConfig):
    """All candidate TileConfigs in canonical (tie-break) order.

    Larger tiles come first (descending volume, then descending sizes), each
    followed by the eight loop orders in LOOP_ORDERS order.  Feasibility
    against the buffer is NOT applied here.
    """
    ext = loop_extents(layer)
    n = cfg.pe_dim
    per_dim = [
        candidate_tile_sizes(ext["oh"], n),
        candidate_tile_sizes(ext["ow"], n),
        candidate_tile_sizes(ext["oc"], n),
        candidate_tile_sizes(ext["ic"], n),
        _filter_sizes(ext["fh"]),
        _filter_sizes(ext["fw"]),
    ]
    tuples = sorted(product(*per_dim), key=lambda t: (-math.prod(t),) + tuple(-v for v in t))
    out = []
    for t in tuples:
        for order in LOOP_ORDERS:
            out.append(TileConfig(*t, loop_order=order))
    return out


_DIM_IDX = {d: i for i, d in enumerate(LOOP_LABELS)}


def _search_arrays(layer: LayerSpec, cfg: HardwareConfig, dataflow: str):
    """Vectorized twin of evaluate_tiling over the whole candidate set."""
    ext = loop_extents(layer)
    n_pe = cfg.pe_dim
    b = cfg.bytes_per_element
    per_dim = [
        candidate_tile_sizes(ext["oh"], n_pe),
        candidate_tile_sizes(ext["ow"], n_pe),
        candidate_tile_sizes(ext["oc"], n_pe),
        candidate_tile_sizes(ext["ic"], n_pe),
        _filter_sizes(ext["fh"]),
        _filter_sizes(ext["fw"]),
    ]
    tuples = sorted(product(*per_dim), key=lambda t: (-math.prod(t),) + tuple(-v for v in t))
    S = np.array(tuples, dtype=np.int64)          # [n_cand, 6] in LOOP_LABELS order
    oh, ow, oc, ic, fh, fw = (S[:, i] for i in range(6))

    counts = np.stack(
        [-(-ext[d] // S[:, _DIM_IDX[d]]) for d in LOOP_LABELS], axis=1
    )
    n_tiles = counts.prod(axis=1)

    chan = _channelwise(layer)
    if layer.kind == LayerKind.DEPTHWISE:
        if dataflow == OS:
            c = os_compute_cycles(oh, ow, oc, oc, fh, fw, layer.stride,
                                  layer.sparsity, n_pe, depthwise=True)
        else:
            c = ws_compute_cycles(oh, ow, oc, oc, fh, fw, n_pe, depthwise=True)
    elif dataflow == OS:
        c = os_compute_cycles(oh, ow, oc, ic, fh, fw, layer.stride,
                              layer.sparsity, n_pe)
    else:
        c = ws_compute_cycles(oh, ow, oc, ic, fh, fw, n_pe)
    c = np.asarray(c, dtype=np.float64)

    in_rows = np.minimum(layer.stride * (oh - 1) + fh, layer.in_h)
    in_cols = np.minimum(layer.stride * (ow - 1) + fw, layer.in_w)
    in_b = in_rows * in_cols * (oc if chan else ic) * b
    if layer.kind in (LayerKind.CONV, LayerKind.FULLY_CONNECTED):
        w_b = fh * fw * ic * oc * b
    elif layer.kind == LayerKind.DEPTHWISE:
        w_b = fh * fw * oc * b
    else:
        w_b = np.zeros_like(in_b)
    out_b = oh * ow * oc * b

    feasible = (in_b + w_b + out_b) <= cfg.global_buffer_bytes // 2
    deps = _operand_deps(layer)
    op_bytes = {"in": in_b, "w": w_b, "out": out_b}
    return S, counts, n_tiles, c, op_bytes, deps, feasible


def _search(layer: LayerSpec, cfg: HardwareConfig, dataflow: str) -> TilingEval:
    # raise early for kinds the dataflow cannot run
    _tile_compute_cycles(layer, identity_tiling(layer), cfg, dataflow)

    S, counts, n_tiles, c, op_bytes, deps, feasible = _search_arrays(layer, cfg, dataflow)
    if not feasible.any():
        raise InfeasibleTilingError(
            f"layer {layer.name!r}: no candidate tile fits in half the global "
            f"buffer ({cfg.global_buffer_bytes // 2} B)"
        )
    latency = cfg.dram_latency_cycles
    bw = cfg.dram_bytes_per_cycle
    n_cand = S.shape[0]
    best = None  # (cost, cand_idx, order_idx, ...)

    all_bytes = sum(op_bytes.values())
    totals = np.empty((len(LOOP_ORDERS), n_cand), dtype=np.float64)
    drams = np.empty_like(totals)
    ks = np.empty((len(LOOP_ORDERS), n_cand), dtype=np.int64)
    for oi, order in enumerate(LOOP_ORDERS):
        inner = np.full(n_cand, -1, dtype=np.int64)
        for label in reversed(order):
            di = _DIM_IDX[label]
            inner = np.where((inner < 0) & (counts[:, di] > 1), di, inner)
        base = np.zeros(n_cand, dtype=np.float64)
        for name, bts in op_bytes.items():
            dep_mask = np.isin(inner, [_DIM_IDX[d] for d in deps[name]])
            base += np.where(dep_mask, bts, 0)
        cred = all_bytes - base
        n_inner = np.where(inner >= 0, counts[np.arange(n_cand), np.maximum(inner, 0)], 1)
        k = n_tiles // n_inner
        t_full = latency + np.ceil((base + cred) / bw)
        t_base = latency + np.ceil(base / bw)
        totals[oi] = (t_full + (k - 1) * np.maximum(c, t_full)
                      + (n_tiles - k) * np.maximum(c, t_base) + c)
        drams[oi] = n_tiles * base + k * cred
        ks[oi] = k

    totals[:, ~feasible] = np.inf
    # candidate-major flattening implements the tie-break (sizes, then order)
    flat = totals.T.reshape(-1)
    idx = int(np.argmin(flat))
    ci, oi = divmod(idx, len(LOOP_ORDERS))
    tile = TileConfig(*(int(v) for v in S[ci]), loop_order=LOOP_ORDERS[oi])
    return TilingEval(
        tile=tile,
        tile_count=int(n_tiles[ci]),
        compute_cycles_per_tile=int(c[ci]),
        total_cycles=int(totals[oi, ci]),
        compute_cycles=int(n_tiles[ci]) * int(c[ci]),
        dram_bytes=int(drams[oi, ci]),
    )


@lru_cache(maxsize=65536)
def search_best(layer: LayerSpec, cfg: HardwareConfig, dataflow: str) -> TilingEval:
    """Cached tiling search; layers and configs are immutable/hashable."""
    return _search(layer, cfg, dataflow)


def tiling_search(layer: LayerSpec, cfg: HardwareConfig, dataflow: str) -> tuple[TileConfig, int]:
    """Best tile and its total layer cycles under the given dataflow."""
    ev = search_best(layer, cfg, dataflow)
    return ev.tile, ev.total_cycles
