"""How much does per-layer dataflow switching buy over a fixed design?

Simulates every bundled network three times (hybrid, forced-OS, forced-WS)
and prints the hybrid speedups and energy reductions.  MobileNet shows the
largest win over a weight-stationary baseline (its depthwise layers are
poison for WS even though they are ~3% of the MACs), while AlexNet barely
benefits at all: its run time is buried in DRAM-bound fully-connected layers
that no dataflow accelerates.
"""

from squeezesim.engine import compare_policies
from squeezesim.hwconfig import default_config
from squeezesim.report import emit_comparison_table, render_table
from squeezesim.workload import BUNDLED_WORKLOADS, load_workload

cfg = default_config()
records = [compare_policies(load_workload(name), cfg) for name in BUNDLED_WORKLOADS]

print(render_table(emit_comparison_table(records)))

print("Cycle totals behind the ratios:\n")
for rec in records:
    print(f"  {rec.network:20s} hybrid {rec.hybrid_cycles:>9d}   "
          f"os-only {rec.os_cycles:>9d}   ws-only {rec.ws_cycles:>9d}")
