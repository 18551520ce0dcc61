"""Output-stationary cycle and access model.

Mapping: each PE accumulates one pixel of a 2D output block (N x N output
pixels per block).  The input block is preloaded row by row, weights are
broadcast one per cycle from the stream buffer (zero weights skipped), and
inputs travel between PEs over the mesh for successive filter taps.  Each PE
holds G accumulator entries, so one resident input serves G output channels;
finished blocks drain through the bottom row into the global buffer.

Per output block the cycle model is::

    in_c * phases * N      input preload (one PE row per cycle; strided
                           filters need one preload pass per stride phase)
  + in_c * out_c * nnz     non-zero weight broadcasts (one MAC wave each)
  + out_c * N              result drain, serialized after compute

with nnz = ceil(filter_h*filter_w*(1 - sparsity)).  Re-delivery of resident
inputs to later accumulator groups pipelines under the broadcast stream and
costs no extra cycles, but each group re-reads the input block from the
global buffer, which is what makes the register-file depth G an energy knob.

Edge blocks (output extent not divisible by N) pay full preload/drain while
their idle PEs contribute no MACs, so utilization drops on small feature maps.
Depthwise layers bind each channel to its own block pass (one input channel,
one accumulator).  Fully-connected layers have no 2D output block and are not
supported under this dataflow.
"""

from __future__ import annotations

from dataclasses import dataclass

from .hwconfig import HardwareConfig
from .workload import LayerKind, LayerSpec

_EPS = 1e-9


class UnsupportedLayerError(ValueError):
    """Layer kind not executable under the requested dataflow."""


@dataclass(frozen=True)
class AccessCounts:
    """Operation / memory-touch counts feeding the energy model."""

    mac_ops: int = 0
    regfile: int = 0
    inter_pe: int = 0
    global_buffer: int = 0   # elements
    dram_bytes: int = 0

    def __post_init__(self):
        for f in ("mac_ops", "regfile", "inter_pe", "global_buffer", "dram_bytes"):
            if getattr(self, f) < 0:
                raise ValueError(f"AccessCounts.{f} must be >= 0")


@dataclass(frozen=True)
class OsLayerCost:
    compute_cycles: int
    preload_cycles: int
    drain_cycles: int
    accesses: AccessCounts
    active_macs: int


def _cdiv(a, b):
    return -(-a // b)


def nnz_taps(filter_h, filter_w, sparsity):
    """Non-zero filter taps under a uniform sparsity: ceil(F*F*(1-sparsity)).

    Computed as taps - floor(taps*sparsity + eps) to dodge float noise on
    rationals like 4/9.
    """
    taps = filter_h * filter_w
    return taps - int(taps * sparsity + _EPS)


def preload_phases(stride, filter_h, filter_w):
    """Stride phases per preload: strided filters cover min(s, f) row/col parities."""
    return min(stride, filter_h) * min(stride, filter_w)


def os_block_geometry(layer: LayerSpec, pe_dim: int) -> tuple[int, int, int, int]:
    """Input block feeding one N x N output block: (rows, cols, halo_h, halo_w)."""
    if pe_dim < 1:
        raise ValueError("pe_dim must be >= 1")
    rows = layer.stride * (pe_dim - 1) + layer.filter_h
    cols = layer.stride * (pe_dim - 1) + layer.filter_w
    return rows, cols, rows - pe_dim, cols - pe_dim


def os_compute_cycles(out_h, out_w, out_c, in_c, filter_h, filter_w, stride,
                      sparsity, pe_dim, depthwise=False):
    """Closed-form OS compute cycles; works elementwise on numpy arrays too.

    For depthwise layers pass the channel count as in_c (out_c is ignored).
    """
    import numpy as np

    n = pe_dim
    blocks = _cdiv(out_h, n) * _cdiv(out_w, n)
    taps = filter_h * filter_w
    nnz = taps - (taps * sparsity + _EPS) // 1   # ceil(taps*(1-sparsity))
    phases = np.minimum(stride, filter_h) * np.minimum(stride, filter_w)
    if depthwise:
        per_block = in_c * (phases * n + nnz + n)
    else:
        per_block = in_c * phases * n + in_c * out_c * nnz + out_c * n
    return blocks * per_block


def os_layer_cost(layer: LayerSpec, cfg: HardwareConfig) -> OsLayerCost:
    """Whole-layer OS cost: cycles, sub-phase breakdown and access counts."""
    if layer.kind not in (LayerKind.CONV, LayerKind.DEPTHWISE):
        raise UnsupportedLayerError(
            f"layer {layer.name!r} ({layer.kind.value}) is not supported under "
            "the output-stationary dataflow"
        )
    n = cfg.pe_dim
    g = cfg.regfile_depth
    oh, ow, oc, ic = layer.out_h, layer.out_w, layer.out_c, layer.in_c
    blocks = _cdiv(oh, n) * _cdiv(ow, n)
    nnz = nnz_taps(layer.filter_h, layer.filter_w, layer.sparsity)
    phases = preload_phases(layer.stride, layer.filter_h, layer.filter_w)
    rows, cols, _, _ = os_block_geometry(layer, n)
    block_elems = min(rows, layer.in_h) * min(cols, layer.in_w)

    depthwise = layer.kind == LayerKind.DEPTHWISE
    if depthwise:
        preload = blocks * ic * phases * n
        drain = blocks * ic * n
        compute = int(os_compute_cycles(oh, ow, oc, ic, layer.filter_h,
                                        layer.filter_w, layer.stride,
                                        layer.sparsity, n, depthwise=True))
        active = oh * ow * ic * nnz
        gb_in = blocks * ic * block_elems       # one channel per block pass
        gb_w = blocks * ic * nnz
        inter_pe = oh * ow * ic * max(nnz - 1, 0)
    else:
        preload = blocks * ic * phases * n
        drain = blocks * oc * n
        compute = int(os_compute_cycles(oh, ow, oc, ic, layer.filter_h,
                                        layer.filter_w, layer.stride,
                                        layer.sparsity, n))
        active = oh * ow * oc * ic * nnz
        groups = _cdiv(oc, g)                   # accumulator groups re-read inputs
        gb_in = blocks * groups * ic * block_elems
        gb_w = blocks * ic * oc * nnz
        inter_pe = oh * ow * oc * ic * max(nnz - 1, 0)
    gb_out = oh * ow * oc

    accesses = AccessCounts(
        mac_ops=active,
        regfile=2 * active,                     # accumulator read + write per MAC
        inter_pe=inter_pe,
        global_buffer=gb_in + gb_w + gb_out,
    )
    return OsLayerCost(
        compute_cycles=compute,
        preload_cycles=preload,
        drain_cycles=drain,
        accesses=accesses,
        active_macs=active,
    )
