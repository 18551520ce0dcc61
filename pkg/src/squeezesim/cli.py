"""Command-line frontend: analyze / simulate / compare / sweep.

    squeezesim analyze <workload>...            MAC-share table per network
    squeezesim simulate <workload> [--policy]   per-layer cycles/energy report
    squeezesim compare <workload>...            hybrid vs OS-only vs WS-only
    squeezesim sweep <workload> --axis ... --values ...

Workloads resolve by file path or bare bundled name (e.g. ``squeezenet_v10``);
set SQUEEZESIM_WORKLOAD_DIR to search another directory first.  Exit codes:
0 success, 2 usage or configuration error, 1 simulation infeasibility.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .engine import Policy, compare_policies, simulate_network
from .hwconfig import ClockSpec, ConfigError, default_config, load_hw_config, validate
from .memtile import InfeasibleTilingError
from .report import (
    emit_comparison_table,
    emit_layer_csv,
    emit_proportions_table,
    emit_simulation_table,
    emit_sweep_csv,
    emit_sweep_table,
    render_table,
)
from .workload import WorkloadError, load_workload

SWEEP_AXES = ("pe_dim", "regfile", "buffer", "dram_gbps")


def _add_hw_flags(p):
    p.add_argument("--hw", metavar="PATH", help="hardware config JSON")
    p.add_argument("--pe-dim", type=int, help="PE array dimension N")
    p.add_argument("--regfile", type=int, help="accumulator register-file depth G")
    p.add_argument("--buffer-bytes", type=int, help="global buffer capacity")
    p.add_argument("--dram-latency", type=int, help="DRAM latency in cycles")
    p.add_argument("--dram-gbps", type=float, help="DRAM bandwidth in GB/s")
    p.add_argument("--clock-mhz", type=float, help="accelerator clock in MHz")


def _add_out_flags(p):
    p.add_argument("--format", choices=("table", "csv"), default="table")
    p.add_argument("--out", metavar="PATH", help="write output to a file instead of stdout")


def _build_config(args):
    cfg = load_hw_config(args.hw) if args.hw else default_config()
    if args.clock_mhz is not None or args.dram_gbps is not None:
        clock = ClockSpec(
            clock_mhz=args.clock_mhz if args.clock_mhz is not None else 1000.0,
            dram_gbps=args.dram_gbps if args.dram_gbps is not None else 16.0,
        )
        cfg = cfg.with_clock(clock)
    overrides = {
        "pe_dim": args.pe_dim,
        "regfile_depth": args.regfile,
        "global_buffer_bytes": args.buffer_bytes,
        "dram_latency_cycles": args.dram_latency,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if overrides:
        cfg = replace(cfg, **overrides)
    return validate(cfg)


def _workers() -> int:
    return int(os.environ.get("SQUEEZESIM_WORKERS", "1"))


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _parser():
    p = argparse.ArgumentParser(
        prog="squeezesim",
        description="Analytical cycle/energy model for a dual-dataflow spatial CNN accelerator",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="MAC share per layer category")
    pa.add_argument("workloads", nargs="+")
    _add_out_flags(pa)

    ps = sub.add_parser("simulate", help="per-layer simulation of one network")
    ps.add_argument("workload")
    ps.add_argument("--policy", choices=[pol.value for pol in Policy], default="hybrid")
    _add_hw_flags(ps)
    _add_out_flags(ps)

    pc = sub.add_parser("compare", help="hybrid vs single-dataflow baselines")
    pc.add_argument("workloads", nargs="+")
    _add_hw_flags(pc)
    _add_out_flags(pc)

    pw = sub.add_parser("sweep", help="sweep one hardware axis under the hybrid policy")
    pw.add_argument("workload")
    pw.add_argument("--axis", choices=SWEEP_AXES, required=True)
    pw.add_argument("--values", required=True, help="comma-separated axis values")
    _add_hw_flags(pw)
    _add_out_flags(pw)
    return p


def _run_analyze(args) -> int:
    nets = [load_workload(w) for w in args.workloads]
    doc = emit_proportions_table(nets)
    if args.format == "csv":
        lines = [",".join(doc.headers)]
        lines += [",".join(r) for r in doc.rows]
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(render_table(doc), args.out)
    return 0


def _run_simulate(args) -> int:
    net = load_workload(args.workload)
    cfg = _build_config(args)
    rep = simulate_network(net, cfg, Policy(args.policy), workers=_workers())
    if args.format == "csv":
        _emit(emit_layer_csv(rep), args.out)
    else:
        _emit(render_table(emit_simulation_table(rep)), args.out)
    return 0


def _run_compare(args) -> int:
    cfg = _build_config(args)
    records = [compare_policies(load_workload(w), cfg, workers=_workers())
               for w in args.workloads]
    doc = emit_comparison_table(records)
    if args.format == "csv":
        lines = [",".join(doc.headers)]
        lines += [",".join(r) for r in doc.rows]
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(render_table(doc), args.out)
    return 0


def _axis_config(cfg, axis: str, value: str):
    if axis == "pe_dim":
        return replace(cfg, pe_dim=int(value))
    if axis == "regfile":
        return replace(cfg, regfile_depth=int(value))
    if axis == "buffer":
        return replace(cfg, global_buffer_bytes=int(value))
    if axis == "dram_gbps":
        return cfg.with_clock(ClockSpec(dram_gbps=float(value)))
    raise ConfigError(f"unknown sweep axis {axis!r}")


def _run_sweep(args) -> int:
    net = load_workload(args.workload)
    base = _build_config(args)
    rows = []
    for raw in args.values.split(","):
        raw = raw.strip()
        if not raw:
            raise ConfigError("empty value in --values")
        cfg = validate(_axis_config(base, args.axis, raw))
        rep = simulate_network(net, cfg, Policy.HYBRID, workers=_workers())
        rows.append((raw, rep.total_cycles, rep.total_energy))
    if args.format == "csv":
        _emit(emit_sweep_csv(args.axis, rows), args.out)
    else:
        _emit(render_table(emit_sweep_table(args.axis, rows)), args.out)
    return 0


_RUNNERS = {
    "analyze": _run_analyze,
    "simulate": _run_simulate,
    "compare": _run_compare,
    "sweep": _run_sweep,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _RUNNERS[args.command](args)
    except (WorkloadError, ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except InfeasibleTilingError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
