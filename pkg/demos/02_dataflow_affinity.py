"""Which dataflow wins which layer, and by how much?

Runs both cycle models on every compute layer of MobileNet and prints the
OS/WS cycle ratio next to the selector's pick.  Depthwise layers are an
order-of-magnitude OS win (the weight matrix is a diagonal, so a naive
weight-stationary mapping serializes channels); large-map pointwise layers
lean the other way.
"""

from squeezesim.engine import select_dataflow
from squeezesim.hwconfig import default_config
from squeezesim.memtile import OS, WS, tiling_search
from squeezesim.workload import LayerKind, classify_layer, load_workload

cfg = default_config()
net = load_workload("mobilenet_224")

print(f"{net.name} at N={cfg.pe_dim}, G={cfg.regfile_depth}\n")
print(f"{'layer':14s} {'category':10s} {'OS cycles':>10s} {'WS cycles':>10s} "
      f"{'WS/OS':>7s}  pick")
for layer in net.layers:
    if layer.kind == LayerKind.FULLY_CONNECTED:
        cycles = tiling_search(layer, cfg, WS)[1]
        print(f"{layer.name:14s} {'Other':10s} {'-':>10s} {cycles:>10d} "
              f"{'-':>7s}  WS (only option)")
        continue
    if not layer.is_compute:
        continue
    os_c = tiling_search(layer, cfg, OS)[1]
    ws_c = tiling_search(layer, cfg, WS)[1]
    pick = select_dataflow(layer, cfg)[0]
    print(f"{layer.name:14s} {classify_layer(layer).value:10s} "
          f"{os_c:>10d} {ws_c:>10d} {ws_c / os_c:>7.2f}  {pick}")

print("\nRatios > 1 favor the output-stationary mode; the per-layer switch")
print("costs nothing, so the hybrid policy simply takes every row's winner.")
