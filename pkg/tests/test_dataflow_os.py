import math
import random

import pytest
from dataclasses import replace

from conftest import random_compute_layer
from squeezesim.dataflow_os import (
    UnsupportedLayerError,
    nnz_taps,
    os_block_geometry,
    os_layer_cost,
)
from squeezesim.dataflow_ws import ws_layer_cost
from squeezesim.hwconfig import default_config
from squeezesim.workload import LayerKind, LayerSpec, load_workload, mac_count


def cfg_n(pe_dim=8, g=1):
    return replace(default_config(), pe_dim=pe_dim, regfile_depth=g)


def conv(in_shape, out_c, f, s=1, p=0, sp=0.0):
    return LayerSpec("t", LayerKind.CONV, *in_shape, out_c,
                     f, f, s, p, p, sp)


def test_single_channel_3x3_block():
    # out 8x8, one input and output channel, dense 3x3: preload 8 + 9 MACs + drain 8
    layer = conv((10, 10, 1), 1, 3)
    assert os_layer_cost(layer, cfg_n()).compute_cycles == 25


def test_zero_weight_skipping():
    layer = conv((10, 10, 1), 1, 3, sp=4 / 9)
    assert os_layer_cost(layer, cfg_n()).compute_cycles == 21


def test_depthwise_per_channel_groups():
    layer = LayerSpec("d", LayerKind.DEPTHWISE, 10, 10, 4, 4, 3, 3, 1, 0, 0, 0.0)
    # reference walk: per (block, channel) preload N + nnz + drain N
    n = 8
    ref = 0
    blocks = math.ceil(layer.out_h / n) * math.ceil(layer.out_w / n)
    for _b in range(blocks):
        for _c in range(layer.in_c):
            ref += n + 9 + n
    cost = os_layer_cost(layer, cfg_n())
    assert cost.compute_cycles == ref == 100


def test_nnz_rounding_robust():
    assert nnz_taps(3, 3, 0.0) == 9
    assert nnz_taps(3, 3, 4 / 9) == 5
    assert nnz_taps(3, 3, 1 / 3) == 6
    assert nnz_taps(7, 7, 0.4) == 30
    assert nnz_taps(3, 3, 1.0) == 0


def test_block_geometry():
    layer = conv((20, 20, 1), 1, 3, p=1)
    assert os_block_geometry(layer, 8) == (10, 10, 2, 2)
    pw = conv((20, 20, 1), 1, 1)
    assert os_block_geometry(pw, 8) == (8, 8, 0, 0)
    strided = conv((40, 40, 1), 1, 5, s=2)
    assert os_block_geometry(strided, 8) == (19, 19, 11, 11)


def test_fully_connected_rejected():
    fc = LayerSpec("f", LayerKind.FULLY_CONNECTED, 1, 1, 16, 8)
    with pytest.raises(UnsupportedLayerError):
        os_layer_cost(fc, cfg_n())


def test_pool_rejected():
    pool = LayerSpec("p", LayerKind.POOL, 8, 8, 4, 4, 2, 2, 2)
    with pytest.raises(UnsupportedLayerError):
        os_layer_cost(pool, cfg_n())


def test_compute_at_least_peak_throughput_bound():
    rng = random.Random(5)
    cfg = default_config()
    for _ in range(200):
        layer = random_compute_layer(rng, kinds=(LayerKind.CONV, LayerKind.DEPTHWISE))
        cost = os_layer_cost(layer, cfg)
        assert cost.compute_cycles >= math.ceil(cost.active_macs / cfg.pe_dim ** 2)


def test_sparsity_never_slower():
    rng = random.Random(6)
    cfg = default_config()
    for _ in range(100):
        layer = random_compute_layer(rng, kinds=(LayerKind.CONV, LayerKind.DEPTHWISE))
        dense = os_layer_cost(replace(layer, sparsity=0.0), cfg).compute_cycles
        sparse = os_layer_cost(replace(layer, sparsity=0.5), cfg).compute_cycles
        assert sparse <= dense


def test_doubling_regfile_never_slower_and_cuts_buffer_reads():
    rng = random.Random(7)
    for _ in range(100):
        layer = random_compute_layer(rng, kinds=(LayerKind.CONV,))
        c8 = os_layer_cost(layer, replace(default_config(), regfile_depth=8))
        c16 = os_layer_cost(layer, replace(default_config(), regfile_depth=16))
        assert c16.compute_cycles <= c8.compute_cycles
        assert c16.accesses.global_buffer <= c8.accesses.global_buffer


def test_active_macs_track_nonzero_fraction():
    rng = random.Random(8)
    cfg = default_config()
    for _ in range(100):
        layer = random_compute_layer(rng, kinds=(LayerKind.CONV, LayerKind.DEPTHWISE))
        nnz = nnz_taps(layer.filter_h, layer.filter_w, layer.sparsity)
        expect = mac_count(layer) // layer.taps * nnz
        assert os_layer_cost(layer, cfg).active_macs == expect


def test_pointwise_slower_than_ws_on_big_maps():
    # preload+drain overheads make 1x1 layers a WS win whenever the feature
    # map covers the array and channels are in a realistic range
    rng = random.Random(9)
    cfg = default_config()
    for _ in range(60):
        m = rng.choice((32, 40, 56, 64, 112))
        ic = rng.choice((32, 64, 128, 256, 512))
        oc = rng.choice((32, 64, 128, 256, 512))
        layer = conv((m, m, ic), oc, 1, sp=0.4)
        assert os_layer_cost(layer, cfg).compute_cycles > \
            ws_layer_cost(layer, cfg).compute_cycles


def test_bundled_first_convs_prefer_os_compute():
    cfg = default_config()
    for name in ("alexnet", "squeezenet_v10", "squeezenet_v11",
                 "mobilenet_224", "tiny_darknet", "squeezenext_23"):
        first = [l for l in load_workload(name).layers if l.is_first][0]
        assert os_layer_cost(first, cfg).compute_cycles < \
            ws_layer_cost(first, cfg).compute_cycles


def test_access_counts_nonnegative_and_regfile_double():
    rng = random.Random(10)
    cfg = default_config()
    for _ in range(50):
        layer = random_compute_layer(rng, kinds=(LayerKind.CONV, LayerKind.DEPTHWISE))
        acc = os_layer_cost(layer, cfg).accesses
        assert acc.regfile == 2 * acc.mac_ops
        assert min(acc.mac_ops, acc.inter_pe, acc.global_buffer) >= 0
