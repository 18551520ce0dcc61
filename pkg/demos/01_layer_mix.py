"""Where do the MACs live?  Operation mix of the bundled networks.

Classifies every layer of the six bundled CNNs into four categories (stem
conv, 1x1, FxF, depthwise) and prints each network's share of total MACs per
category.  The spread motivates a dual-dataflow accelerator: nets range from
0% to ~95% pointwise work, and each category favors a different dataflow.
"""

from squeezesim.report import emit_proportions_table, render_table
from squeezesim.workload import BUNDLED_WORKLOADS, load_workload, mac_count

nets = [load_workload(name) for name in BUNDLED_WORKLOADS]

print("Total dense MACs per network (batch 1):\n")
for net in nets:
    total = sum(mac_count(l) for l in net.layers)
    print(f"  {net.name:20s} {total / 1e6:8.1f}M MACs in {len(net.layers)} layers")

print()
print(render_table(emit_proportions_table(nets)))
print("A weight-stationary array loves the 1x1 column; an output-stationary")
print("array loves the stem and depthwise columns. No single dataflow wins all.")
