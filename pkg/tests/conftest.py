import random

import pytest

from squeezesim.hwconfig import default_config
from squeezesim.workload import LayerKind, LayerSpec, NetworkSpec


@pytest.fixture
def cfg():
    return default_config()


def brute_force_macs(layer: LayerSpec) -> int:
    """Independent six-nested-loop MAC counter (walks every loop point)."""
    count = 0
    if layer.kind == LayerKind.CONV:
        for _oy in range(layer.out_h):
            for _ox in range(layer.out_w):
                for _oc in range(layer.out_c):
                    for _ic in range(layer.in_c):
                        for _fy in range(layer.filter_h):
                            for _fx in range(layer.filter_w):
                                count += 1
    elif layer.kind == LayerKind.DEPTHWISE:
        for _oy in range(layer.out_h):
            for _ox in range(layer.out_w):
                for _c in range(layer.in_c):
                    for _fy in range(layer.filter_h):
                        for _fx in range(layer.filter_w):
                            count += 1
    elif layer.kind == LayerKind.FULLY_CONNECTED:
        for _ic in range(layer.in_c):
            for _oc in range(layer.out_c):
                count += 1
    return count


def random_compute_layer(rng: random.Random, max_dim=16, max_filter=3,
                         kinds=(LayerKind.CONV, LayerKind.CONV,
                                LayerKind.DEPTHWISE, LayerKind.FULLY_CONNECTED)):
    kind = rng.choice(kinds)
    if kind == LayerKind.FULLY_CONNECTED:
        return LayerSpec("fc", kind, 1, 1, rng.randint(1, max_dim * 16),
                         rng.randint(1, max_dim * 16))
    h = rng.randint(1, max_dim)
    w = rng.randint(1, max_dim)
    c = rng.randint(1, max_dim)
    f = min(rng.randint(1, max_filter), h, w)
    s = rng.choice((1, 1, 2))
    if h < f + s - 1 or w < f + s - 1:
        s = 1
    sp = rng.choice((0.0, 0.2, 0.4, 0.7))
    if kind == LayerKind.DEPTHWISE:
        return LayerSpec("dw", kind, h, w, c, c, f, f, s, f // 2, f // 2, sp)
    oc = rng.randint(1, max_dim)
    return LayerSpec("conv", kind, h, w, c, oc, f, f, s, f // 2, f // 2, sp)


def random_network(rng: random.Random, max_layers=16, max_dim=64) -> NetworkSpec:
    """Random chained network: convs, depthwise, pools, element-wise, FC tail."""
    h = w = rng.choice((8, 16, 28, 32, 56, 64))
    c = rng.randint(1, max_dim)
    layers = []
    n = rng.randint(1, max_layers)
    for i in range(n):
        pick = rng.choices(("conv", "dw", "pool", "ew"), weights=(6, 2, 2, 1))[0]
        if pick == "conv":
            f = min(rng.choice((1, 3, 5)), h, w)
            s = rng.choice((1, 1, 2))
            if h < f + s - 1 or w < f + s - 1:
                s = 1
            layer = LayerSpec(f"L{i}", LayerKind.CONV, h, w, c,
                              rng.randint(1, max_dim), f, f, s, f // 2, f // 2,
                              rng.choice((0.0, 0.2, 0.4, 0.7)))
        elif pick == "dw":
            f = min(3, h, w)
            layer = LayerSpec(f"L{i}", LayerKind.DEPTHWISE, h, w, c, c,
                              f, f, 1, f // 2, f // 2, 0.4)
        elif pick == "pool" and h >= 2 and w >= 2:
            layer = LayerSpec(f"L{i}", LayerKind.POOL, h, w, c, c, 2, 2, 2)
        else:
            layer = LayerSpec(f"L{i}", LayerKind.ELEMENTWISE, h, w, c, c)
        layers.append(layer)
        h, w, c = layer.out_h, layer.out_w, layer.out_c
        if h < 2 or w < 2:
            break
    if rng.random() < 0.3:
        flat = h * w * c
        layers.append(LayerSpec("fc", LayerKind.FULLY_CONNECTED, 1, 1, flat,
                                rng.randint(1, 1000)))
    return NetworkSpec("random", tuple(layers))
