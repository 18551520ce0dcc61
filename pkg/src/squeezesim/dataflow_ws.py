"""Weight-stationary cycle and access model.

Mapping: an N x N tile of the (input channel x output channel) weight matrix
is preloaded into the array (one row per cycle), input pixels stream from the
broadcast buffer (one output position per cycle, all resident input channels
in parallel), and each PE column reduces partial sums down an adder chain.
F x F convolutions decompose into filter_h*filter_w shifted matrix multiplies
with partial sums accumulated through the global buffer between input-channel
tiles and filter taps.

Per (ic-tile, oc-tile, filter tap)::

    N            weight preload
  + out_h*out_w  streamed positions
  + N            adder-chain fill/drain

No zero-weight skipping: weights sit still, inputs are broadcast, so a zero
weight occupies its PE regardless of sparsity.

Depthwise layers put only a diagonal in the weight matrix; the naive mapping
processes one channel's filter at a time (a 1-in/1-out tile per channel), so
the cycle count scales with the full channel count instead of ceil(c/N) --
this is what makes depthwise layers catastrophically slow here and an easy
win for the output-stationary mode.

Fully-connected layers are the degenerate out_h = out_w = 1 case and are
DRAM-bound in practice: the weight matrix streams from memory once per
inference at batch 1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dataflow_os import AccessCounts, UnsupportedLayerError, _cdiv
from .hwconfig import HardwareConfig
from .workload import LayerKind, LayerSpec


@dataclass(frozen=True)
class WsLayerCost:
    compute_cycles: int
    preload_cycles: int
    pipeline_fill_cycles: int
    accesses: AccessCounts
    active_macs: int


def ws_compute_cycles(out_h, out_w, out_c, in_c, filter_h, filter_w, pe_dim,
                      depthwise=False):
    """Closed-form WS compute cycles; works elementwise on numpy arrays too.

    For depthwise layers pass the channel count as in_c (out_c is ignored).
    """
    n = pe_dim
    taps = filter_h * filter_w
    if depthwise:
        tiles = in_c           # one channel at a time on the diagonal
    else:
        tiles = _cdiv(in_c, n) * _cdiv(out_c, n)
    return tiles * taps * (n + out_h * out_w + n)


def ws_psum_traffic(layer: LayerSpec, pe_dim: int) -> int:
    """Partial-sum element writes to the global buffer (reads are equal).

    One round trip per output element per accumulation boundary: boundaries =
    ceil(in_c/N)*taps - 1 for dense layers.  Depthwise accumulates per channel
    over its own taps only, so boundaries = taps - 1.
    """
    taps = layer.taps
    if layer.kind == LayerKind.DEPTHWISE:
        bounds = taps - 1
    else:
        bounds = _cdiv(layer.in_c, pe_dim) * taps - 1
    return layer.out_h * layer.out_w * layer.out_c * bounds


def ws_layer_cost(layer: LayerSpec, cfg: HardwareConfig) -> WsLayerCost:
    """Whole-layer WS cost: cycles, sub-phase breakdown and access counts."""
    if layer.kind not in (LayerKind.CONV, LayerKind.DEPTHWISE, LayerKind.FULLY_CONNECTED):
        raise UnsupportedLayerError(
            f"layer {layer.name!r} ({layer.kind.value}) is not supported under "
            "the weight-stationary dataflow"
        )
    n = cfg.pe_dim
    oh, ow, oc, ic = layer.out_h, layer.out_w, layer.out_c, layer.in_c
    taps = layer.taps
    depthwise = layer.kind == LayerKind.DEPTHWISE

    if depthwise:
        tiles = ic
        active = oh * ow * ic * taps
        gb_w = ic * taps
        gb_in = oh * ow * ic * taps
    else:
        tiles_ic = _cdiv(ic, n)
        tiles_oc = _cdiv(oc, n)
        tiles = tiles_ic * tiles_oc
        active = oh * ow * oc * ic * taps if layer.kind == LayerKind.CONV else ic * oc
        gb_w = taps * ic * oc
        gb_in = oh * ow * ic * tiles_oc * taps   # each pixel once per oc-tile per tap
    compute = int(ws_compute_cycles(oh, ow, oc, ic, layer.filter_h,
                                    layer.filter_w, n, depthwise=depthwise))
    psum = ws_psum_traffic(layer, n)
    gb_out = oh * ow * oc

    accesses = AccessCounts(
        mac_ops=active,
        regfile=active,                 # one stationary-weight read per MAC
        inter_pe=active,                # one adder-chain hop per MAC
        global_buffer=gb_w + gb_in + 2 * psum + gb_out,
    )
    return WsLayerCost(
        compute_cycles=compute,
        preload_cycles=tiles * taps * n,
        pipeline_fill_cycles=tiles * taps * n,
        accesses=accesses,
        active_macs=active,
    )
