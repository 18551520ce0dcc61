"""Network/layer data model, workload file format, layer taxonomy and MAC accounting.

A workload document is a JSON object::

    {"name": "net", "layers": [
        {"name": "conv1", "kind": "Conv", "in": [227, 227, 3], "out_c": 96,
         "filter": [7, 7], "stride": 2, "pad": 0, "is_first": true},
        ...
    ]}

``pad`` may be a single integer or an ``[pad_h, pad_w]`` pair (needed for
asymmetric 3x1 / 1x3 filters).  ``sparsity`` (fraction of zero weights)
defaults to 0.4 for Conv/DepthwiseConv layers when omitted.

Six benchmark network definitions ship in the ``workloads/`` directory and can
be loaded by bare name through :func:`load_workload`.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

DEFAULT_CONV_SPARSITY = 0.4

WORKLOAD_DIR_ENV = "SQUEEZESIM_WORKLOAD_DIR"

BUNDLED_WORKLOADS = (
    "alexnet",
    "squeezenet_v10",
    "squeezenet_v11",
    "mobilenet_224",
    "tiny_darknet",
    "squeezenext_23",
)


class WorkloadError(ValueError):
    """Raised for malformed workload documents or inconsistent layer chains."""


class LayerKind(str, Enum):
    CONV = "Conv"
    DEPTHWISE = "DepthwiseConv"
    FULLY_CONNECTED = "FullyConnected"
    POOL = "Pool"
    ELEMENTWISE = "ElementWise"


class LayerCategory(str, Enum):
    CONV1 = "Conv1"
    POINTWISE = "1x1"
    FXF = "FxF"
    DEPTHWISE = "DW"
    OTHER = "Other"


COMPUTE_KINDS = (LayerKind.CONV, LayerKind.DEPTHWISE, LayerKind.FULLY_CONNECTED)


@dataclass(frozen=True)
class LayerSpec:
    """One network layer: shape, filter geometry and weight sparsity.

    Immutable after construction; safe to share across threads.
    """

    name: str
    kind: LayerKind
    in_h: int
    in_w: int
    in_c: int
    out_c: int
    filter_h: int = 1
    filter_w: int = 1
    stride: int = 1
    pad_h: int = 0
    pad_w: int = 0
    sparsity: float = 0.0
    is_first: bool = False

    def __post_init__(self):
        for f in ("in_h", "in_w", "in_c", "out_c", "filter_h", "filter_w", "stride"):
            if getattr(self, f) < 1:
                raise WorkloadError(f"layer {self.name!r}: {f} must be positive")
        if self.pad_h < 0 or self.pad_w < 0:
            raise WorkloadError(f"layer {self.name!r}: pad must be non-negative")
        if not 0.0 <= self.sparsity <= 1.0:
            raise WorkloadError(f"layer {self.name!r}: sparsity must be in [0,1]")
        if self.kind == LayerKind.DEPTHWISE and self.out_c != self.in_c:
            raise WorkloadError(
                f"layer {self.name!r}: depthwise requires out_c == in_c"
            )
        if self.kind == LayerKind.FULLY_CONNECTED:
            if (self.in_h, self.in_w, self.filter_h, self.filter_w) != (1, 1, 1, 1):
                raise WorkloadError(
                    f"layer {self.name!r}: fully-connected layers use "
                    "in_h = in_w = filter_h = filter_w = 1"
                )
        if self.is_first and self.kind != LayerKind.CONV:
            raise WorkloadError(f"layer {self.name!r}: is_first only applies to Conv")
        if self.out_h < 1 or self.out_w < 1:
            raise WorkloadError(
                f"layer {self.name!r}: filter {self.filter_h}x{self.filter_w} "
                f"stride {self.stride} does not fit input {self.in_h}x{self.in_w}"
            )

    @property
    def out_h(self) -> int:
        return (self.in_h + 2 * self.pad_h - self.filter_h) // self.stride + 1

    @property
    def out_w(self) -> int:
        return (self.in_w + 2 * self.pad_w - self.filter_w) // self.stride + 1

    @property
    def out_shape(self) -> tuple[int, int, int]:
        return (self.out_h, self.out_w, self.out_c)

    @property
    def in_shape(self) -> tuple[int, int, int]:
        return (self.in_h, self.in_w, self.in_c)

    @property
    def is_compute(self) -> bool:
        return self.kind in COMPUTE_KINDS

    @property
    def taps(self) -> int:
        return self.filter_h * self.filter_w


@dataclass(frozen=True)
class NetworkSpec:
    """Ordered list of layers with validated shape chaining."""

    name: str
    layers: tuple[LayerSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.layers:
            raise WorkloadError("empty network")
        _check_chaining(self.layers)
        firsts = [l for l in self.layers if l.is_first]
        if len(firsts) > 1:
            raise WorkloadError("more than one layer marked is_first")
        if firsts:
            convs = [l for l in self.layers if l.kind == LayerKind.CONV]
            if convs[0] is not firsts[0]:
                raise WorkloadError(
                    f"is_first layer {firsts[0].name!r} is not the first Conv layer"
                )

    @property
    def compute_layers(self) -> tuple[LayerSpec, ...]:
        return tuple(l for l in self.layers if l.is_compute)


def _check_chaining(layers):
    """Validate input shapes against earlier outputs.

    Real nets are not strictly sequential (fire modules feed one squeeze into
    two expands; residual blocks read the block input for a shortcut conv;
    concatenated expands feed the next stage), so a layer's input is accepted
    when it matches (a) the output of any earlier layer, or (b) the
    channel-concatenation of a contiguous run of earlier layers ending at the
    immediate predecessor, or (c) for fully-connected layers, the flattened
    element count of the predecessor.
    """
    outs: list[tuple[int, int, int]] = []
    for i, layer in enumerate(layers):
        if i == 0:
            outs.append(layer.out_shape)
            continue
        want = layer.in_shape
        ok = want in outs
        if not ok and layer.kind == LayerKind.FULLY_CONNECTED:
            ph, pw, pc = outs[-1]
            ok = want[2] == ph * pw * pc
        if not ok:
            # contiguous concat ending at the previous layer
            h, w, _ = outs[-1]
            csum = 0
            for oh, ow, oc in reversed(outs):
                if (oh, ow) != (h, w):
                    break
                csum += oc
                if want == (h, w, csum):
                    ok = True
                    break
        if not ok:
            raise WorkloadError(
                f"shape chain mismatch: layer {layer.name!r} declares input "
                f"{want} but layer {layers[i - 1].name!r} produces "
                f"{outs[-1]} (and no earlier output or concat matches)"
            )
        outs.append(layer.out_shape)


def classify_layer(layer: LayerSpec) -> LayerCategory:
    """Four-way convolution taxonomy; Pool/ElementWise/FullyConnected are Other."""
    if layer.kind == LayerKind.DEPTHWISE:
        return LayerCategory.DEPTHWISE
    if layer.kind == LayerKind.CONV:
        if layer.is_first:
            return LayerCategory.CONV1
        if layer.filter_h == 1 and layer.filter_w == 1:
            return LayerCategory.POINTWISE
        return LayerCategory.FXF
    return LayerCategory.OTHER


def mac_count(layer: LayerSpec) -> int:
    """Dense multiply-accumulate count of one layer (zero for Pool/ElementWise)."""
    if layer.kind == LayerKind.CONV:
        return layer.out_h * layer.out_w * layer.out_c * layer.in_c * layer.taps
    if layer.kind == LayerKind.DEPTHWISE:
        return layer.out_h * layer.out_w * layer.in_c * layer.taps
    if layer.kind == LayerKind.FULLY_CONNECTED:
        return layer.in_c * layer.out_c
    return 0


def mac_proportions(net: NetworkSpec) -> dict[LayerCategory, float]:
    """Percentage of total MACs per layer category (all five categories, sums to 100)."""
    totals = {cat: 0 for cat in LayerCategory}
    for layer in net.layers:
        totals[classify_layer(layer)] += mac_count(layer)
    grand = sum(totals.values())
    if grand == 0:
        raise WorkloadError(f"network {net.name!r} has no compute layers")
    return {cat: 100.0 * v / grand for cat, v in totals.items()}


def layer_footprint_bytes(layer: LayerSpec, bytes_per_element: int) -> tuple[int, int, int]:
    """(input_bytes, weight_bytes, output_bytes) for one layer."""
    if bytes_per_element < 1:
        raise WorkloadError("bytes_per_element must be >= 1")
    b = bytes_per_element
    inp = layer.in_h * layer.in_w * layer.in_c * b
    out = layer.out_h * layer.out_w * layer.out_c * b
    if layer.kind == LayerKind.CONV or layer.kind == LayerKind.FULLY_CONNECTED:
        wgt = layer.taps * layer.in_c * layer.out_c * b
    elif layer.kind == LayerKind.DEPTHWISE:
        wgt = layer.taps * layer.in_c * b
    else:
        wgt = 0
    return inp, wgt, out


# ---------------------------------------------------------------------------
# parsing / serialization


def _parse_pad(raw, name):
    if isinstance(raw, int):
        return raw, raw
    if isinstance(raw, (list, tuple)) and len(raw) == 2:
        return int(raw[0]), int(raw[1])
    raise WorkloadError(f"layer {name!r}: pad must be an int or [pad_h, pad_w]")


def _parse_layer(doc, idx) -> LayerSpec:
    if not isinstance(doc, dict):
        raise WorkloadError(f"layer #{idx}: expected an object")
    name = doc.get("name", f"layer{idx}")
    try:
        kind = LayerKind(doc["kind"])
    except KeyError:
        raise WorkloadError(f"layer {name!r}: missing 'kind'") from None
    except ValueError:
        raise WorkloadError(
            f"layer {name!r}: unknown kind {doc['kind']!r} "
            f"(expected one of {[k.value for k in LayerKind]})"
        ) from None
    try:
        in_h, in_w, in_c = (int(v) for v in doc["in"])
    except (KeyError, TypeError, ValueError):
        raise WorkloadError(f"layer {name!r}: 'in' must be [h, w, c]") from None
    filt = doc.get("filter", [1, 1])
    if not (isinstance(filt, (list, tuple)) and len(filt) == 2):
        raise WorkloadError(f"layer {name!r}: 'filter' must be [fh, fw]")
    pad_h, pad_w = _parse_pad(doc.get("pad", 0), name)
    if "sparsity" in doc:
        sparsity = float(doc["sparsity"])
    elif kind in (LayerKind.CONV, LayerKind.DEPTHWISE):
        sparsity = DEFAULT_CONV_SPARSITY
    else:
        sparsity = 0.0
    out_c = doc.get("out_c", in_c if kind in (LayerKind.POOL, LayerKind.ELEMENTWISE) else None)
    if out_c is None:
        raise WorkloadError(f"layer {name!r}: missing 'out_c'")
    return LayerSpec(
        name=str(name),
        kind=kind,
        in_h=in_h,
        in_w=in_w,
        in_c=in_c,
        out_c=int(out_c),
        filter_h=int(filt[0]),
        filter_w=int(filt[1]),
        stride=int(doc.get("stride", 1)),
        pad_h=pad_h,
        pad_w=pad_w,
        sparsity=sparsity,
        is_first=bool(doc.get("is_first", False)),
    )


def parse_network(text: str) -> NetworkSpec:
    """Parse and validate a workload document; raises WorkloadError with position info."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise WorkloadError(f"syntax error at line {e.lineno} column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise WorkloadError("workload document must be a JSON object")
    layers_doc = doc.get("layers")
    if not layers_doc:
        raise WorkloadError("empty network")
    layers = tuple(_parse_layer(d, i) for i, d in enumerate(layers_doc))
    return NetworkSpec(name=str(doc.get("name", "network")), layers=layers)


def to_document(net: NetworkSpec) -> dict:
    """Inverse of parse_network; round-trips structurally."""
    layers = []
    for l in net.layers:
        d = {
            "name": l.name,
            "kind": l.kind.value,
            "in": [l.in_h, l.in_w, l.in_c],
            "out_c": l.out_c,
            "filter": [l.filter_h, l.filter_w],
            "stride": l.stride,
            "pad": l.pad_h if l.pad_h == l.pad_w else [l.pad_h, l.pad_w],
            "sparsity": l.sparsity,
        }
        if l.is_first:
            d["is_first"] = True
        layers.append(d)
    return {"name": net.name, "layers": layers}


def serialize_network(net: NetworkSpec) -> str:
    return json.dumps(to_document(net), indent=1) + "\n"


def _bundled_dir() -> Path:
    return Path(__file__).parent / "workloads"


def workload_search_dirs() -> list[Path]:
    dirs = []
    env = os.environ.get(WORKLOAD_DIR_ENV)
    if env:
        dirs.append(Path(env))
    dirs.append(_bundled_dir())
    return dirs


def resolve_workload_path(name_or_path: str) -> Path:
    """Resolve a bare workload name ('alexnet' or 'alexnet.json') or a file path."""
    p = Path(name_or_path)
    if p.exists() and p.is_file():
        return p
    stem = p.name if p.name.endswith(".json") else p.name + ".json"
    for d in workload_search_dirs():
        cand = d / stem
        if cand.exists():
            return cand
    raise WorkloadError(f"workload {name_or_path!r} not found (searched {workload_search_dirs()})")


def load_workload(name_or_path: str) -> NetworkSpec:
    path = resolve_workload_path(name_or_path)
    return parse_network(path.read_text())


def uniform_sparsity(net: NetworkSpec, sparsity: float) -> NetworkSpec:
    """Copy of the network with every conv/depthwise layer set to one sparsity."""
    layers = tuple(
        replace(l, sparsity=sparsity) if l.kind in (LayerKind.CONV, LayerKind.DEPTHWISE) else l
        for l in net.layers
    )
    return NetworkSpec(name=net.name, layers=layers)
