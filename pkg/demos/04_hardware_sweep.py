"""Turning the hardware knobs: array size, register file, DRAM bandwidth.

Sweeps one parameter at a time around the default configuration and reports
the hybrid-policy totals, then dissects one layer's double-buffered timing to
show where cycles go (compute vs exposed transfer).
"""

from dataclasses import replace

from squeezesim.engine import Policy, simulate_network
from squeezesim.hwconfig import ClockSpec, default_config
from squeezesim.workload import load_workload

net = load_workload("squeezenext_23")
base = default_config()

print(f"{net.name}, hybrid policy\n")

print("PE array dimension N (compute capacity grows as N^2):")
for n in (8, 16, 32):
    rep = simulate_network(net, replace(base, pe_dim=n))
    print(f"  N={n:3d}: {rep.total_cycles:>9d} cycles   energy {rep.total_energy:.3e}")

print("\nAccumulator register file depth G (input reuse across filters;")
print("buys global-buffer energy, never cycles, in this model):")
for g in (4, 8, 16):
    rep = simulate_network(net, replace(base, regfile_depth=g))
    print(f"  G={g:3d}: {rep.total_cycles:>9d} cycles   energy {rep.total_energy:.3e}")

print("\nDRAM bandwidth (GB/s at a 1 GHz clock):")
for gbps in (8, 16, 32, 64):
    cfg = base.with_clock(ClockSpec(dram_gbps=float(gbps)))
    rep = simulate_network(net, cfg)
    print(f"  {gbps:3d} GB/s: {rep.total_cycles:>9d} cycles")

print("\nPer-layer anatomy at the default config (first six layers):")
rep = simulate_network(net, base, Policy.HYBRID)
print(f"  {'layer':16s} {'flow':5s} {'total':>8s} {'compute':>8s} "
      f"{'exposed xfer':>12s} {'util':>6s}")
for r in rep.layer_reports[:6]:
    print(f"  {r.name:16s} {str(r.dataflow):5s} {r.cycles_total:>8d} "
          f"{r.cycles_compute:>8d} {r.cycles_transfer_exposed:>12d} "
          f"{r.utilization:>6.3f}")
print("\nExposed transfer is what double buffering could not hide behind compute.")
