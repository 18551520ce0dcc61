"""Deterministic table and CSV emission for analysis and simulation results.

All emitters are pure: the same inputs produce byte-identical text.  Numeric
formatting is fixed (cycles as integers, percentages with one decimal, ratios
with two decimals, utilization with four).  CSV follows RFC 4180 quoting and
ends with a newline; plain-text tables are column-aligned.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import NetworkReport, PolicyComparison
from .workload import LayerCategory, NetworkSpec, mac_proportions


@dataclass(frozen=True)
class TableDoc:
    title: str
    headers: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    footnotes: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.headers):
                raise ValueError("table rows must match header arity")


def render_table(doc: TableDoc) -> str:
    widths = [len(h) for h in doc.headers]
    for row in doc.rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = [doc.title]
    lines.append("  ".join(h.ljust(widths[i]) for i, h in enumerate(doc.headers)).rstrip())
    lines.append("  ".join("-" * w for w in widths))
    for row in doc.rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    lines.extend(doc.footnotes)
    return "\n".join(lines) + "\n"


def emit_proportions_table(nets: list[NetworkSpec]) -> TableDoc:
    """MAC share per layer category, one row per network (Conv1/1x1/FxF/DW)."""
    if not nets:
        raise ValueError("no networks")
    rows = []
    for net in nets:
        props = mac_proportions(net)
        rows.append((
            net.name,
            f"{props[LayerCategory.CONV1]:.1f}",
            f"{props[LayerCategory.POINTWISE]:.1f}",
            f"{props[LayerCategory.FXF]:.1f}",
            f"{props[LayerCategory.DEPTHWISE]:.1f}",
        ))
    return TableDoc(
        title="MAC share per layer category (% of total operations)",
        headers=("network", "Conv1", "1x1", "FxF", "DW"),
        rows=tuple(rows),
    )


def _csv_field(text: str) -> str:
    if any(ch in text for ch in ',"\n\r'):
        return '"' + text.replace('"', '""') + '"'
    return text


CSV_HEADER = "layer,category,dataflow,cycles,compute_cycles,exposed_transfer_cycles,energy,utilization"


def emit_layer_csv(rep: NetworkReport) -> str:
    """Per-layer CSV in network order; trailing newline; RFC 4180 quoting."""
    lines = [CSV_HEADER]
    for r in rep.layer_reports:
        lines.append(",".join((
            _csv_field(r.name),
            r.category.value,
            r.dataflow if r.dataflow is not None else "None",
            str(r.cycles_total),
            str(r.cycles_compute),
            str(r.cycles_transfer_exposed),
            f"{r.energy:.3f}",
            f"{r.utilization:.4f}",
        )))
    return "\n".join(lines) + "\n"


def emit_simulation_table(rep: NetworkReport) -> TableDoc:
    rows = []
    for r in rep.layer_reports:
        rows.append((
            r.name,
            r.category.value,
            r.dataflow if r.dataflow is not None else "None",
            str(r.cycles_total),
            str(r.cycles_compute),
            str(r.cycles_transfer_exposed),
            f"{r.energy:.3f}",
            f"{r.utilization:.4f}",
        ))
    return TableDoc(
        title=f"{rep.network} under policy '{rep.policy.value}' [{rep.hw}]",
        headers=("layer", "category", "dataflow", "cycles", "compute",
                 "exposed_transfer", "energy", "utilization"),
        rows=tuple(rows),
        footnotes=(
            f"total cycles: {rep.total_cycles}",
            f"total energy: {rep.total_energy:.3f}",
        ),
    )


def emit_comparison_table(records: list[PolicyComparison]) -> TableDoc:
    """Hybrid speedup and energy reduction against forced-OS / forced-WS baselines."""
    if not records:
        raise ValueError("no comparison records")
    rows = []
    for rec in records:
        rows.append((
            rec.network,
            f"{rec.speedup_vs_os:.2f}",
            f"{rec.speedup_vs_ws:.2f}",
            f"{rec.energy_reduction_vs_os_pct:.1f}",
            f"{rec.energy_reduction_vs_ws_pct:.1f}",
        ))
    return TableDoc(
        title="Hybrid dataflow vs single-dataflow baselines",
        headers=("network", "speedup_vs_os", "speedup_vs_ws",
                 "energy_red_vs_os_%", "energy_red_vs_ws_%"),
        rows=tuple(rows),
    )


def emit_sweep_table(axis: str, rows: list[tuple]) -> TableDoc:
    return TableDoc(
        title=f"Hybrid totals sweeping {axis}",
        headers=(axis, "total_cycles", "total_energy"),
        rows=tuple((str(v), str(c), f"{e:.3f}") for v, c, e in rows),
    )


def emit_sweep_csv(axis: str, rows: list[tuple]) -> str:
    lines = [f"{axis},total_cycles,total_energy"]
    for v, c, e in rows:
        lines.append(f"{v},{c},{e:.3f}")
    return "\n".join(lines) + "\n"
