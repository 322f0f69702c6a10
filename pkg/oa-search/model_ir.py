"""
DNN Workload Representation

This module represents a DNN workload as a linear sequence of layer shapes, the
form consumed by the cost predictor. CONV and FC layers are costed; POOL rows are
carried as inert metadata so that a network file keeps the topology of the
original model ("3C,2P,2F" for LeNet-5) without contributing any cost.

Key Features:
- **Layer Geometry**: output dimensions derived with floor-based convolution geometry
- **FC Normalization**: FC layers are 1x1 convolutions on a 1x1 map
- **MAC Accounting**: per-layer and whole-network multiply-accumulate counts
- **Network Files**: JSON documents with per-layer rows and line/field diagnostics

Network file format:
    {
      "name": "lenet5",
      "layers": [
        {"kind": "conv", "C": 1, "D": 6, "H": 28, "W": 28, "Z": 5, "S": 1, "P": 0},
        {"kind": "pool", "C": 6, "H": 24, "W": 24, "Z": 2, "S": 2},
        {"kind": "fc", "C": 120, "D": 84}
      ]
    }

Usage Example:
    ```python
    from model_ir import load_network, count_macs

    model = load_network(SHIPPED_NETWORKS / "lenet5.json")
    print(model.topology(), count_macs(model))
    ```
"""

import json
import logging
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

logger = logging.getLogger(__name__)

SHIPPED_NETWORKS = Path(__file__).parent / "networks"
BENCHMARKS = ("lenet5", "alexnet", "zfnet", "resnet18", "googlenet", "vgg16")

RESERVED_KEYS = {"_comment", "_units"}
LAYER_FIELDS = ("kind", "name", "C", "D", "H", "W", "Z", "S", "P")


class LayerKind(Enum):
    """Kinds of layer rows a network file may carry"""
    CONV = "conv"
    FC = "fc"
    POOL = "pool"  # metadata only, never costed


class NetworkFormatError(ValueError):
    """Raised when a network file cannot be parsed or violates a layer invariant"""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None,
                 layer_index: Optional[int] = None, field: Optional[str] = None):
        location = []
        if path:
            location.append(str(path))
        if line is not None:
            location.append(f"line {line}")
        if layer_index is not None:
            location.append(f"layer {layer_index}")
        if field:
            location.append(f"field {field}")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")
        self.detail = message
        self.path = path
        self.line = line
        self.layer_index = layer_index
        self.field = field


@dataclass(frozen=True)
class LayerShape:
    """One layer row: channels, input map, square kernel, stride and padding.

    E and F are derived from the geometry when not given.
    """
    kind: LayerKind
    C: int
    D: int
    H: int = 1
    W: int = 1
    Z: int = 1
    S: int = 1
    P: int = 0
    E: int = 0
    F: int = 0
    name: str = ""

    @property
    def is_costed(self) -> bool:
        return self.kind in (LayerKind.CONV, LayerKind.FC)

    @property
    def macs(self) -> int:
        """Multiply-accumulates of this layer; zero for metadata rows"""
        if not self.is_costed:
            return 0
        return self.E * self.F * self.D * self.Z * self.Z * self.C


def derive_output_dims(layer: LayerShape) -> Tuple[int, int]:
    """Return (E, F) = (floor((H + 2P - Z)/S) + 1, floor((W + 2P - Z)/S) + 1)."""
    e = (layer.H + 2 * layer.P - layer.Z) // layer.S + 1
    f = (layer.W + 2 * layer.P - layer.Z) // layer.S + 1
    if e < 1 or f < 1:
        raise NetworkFormatError(
            f"derived output map {e}x{f} is empty (H={layer.H}, W={layer.W}, Z={layer.Z}, "
            f"S={layer.S}, P={layer.P})",
            field="E" if e < 1 else "F",
        )
    return e, f


def make_layer(kind: Union[LayerKind, str], C: int, D: Optional[int] = None, H: int = 1, W: int = 1,
               Z: int = 1, S: int = 1, P: int = 0, name: str = "") -> LayerShape:
    """Build a validated layer with E and F derived.

    FC rows are normalized to Z = H = W = E = F = S = 1, P = 0. POOL rows keep
    their channel count on both sides (D = C).
    """
    kind = LayerKind(kind) if isinstance(kind, str) else kind
    if kind == LayerKind.FC:
        H = W = Z = S = 1
        P = 0
    if kind == LayerKind.POOL:
        D = C if D is None else D
    if D is None:
        raise NetworkFormatError(f"{kind.value} layer requires an output channel count", field="D")

    for field_name, value in (("C", C), ("D", D), ("H", H), ("W", W), ("Z", Z), ("S", S)):
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise NetworkFormatError(f"must be an integer >= 1, got {value!r}", field=field_name)
    if not isinstance(P, int) or isinstance(P, bool) or P < 0:
        raise NetworkFormatError(f"must be an integer >= 0, got {P!r}", field="P")

    layer = LayerShape(kind=kind, C=C, D=D, H=H, W=W, Z=Z, S=S, P=P, name=name)
    e, f = derive_output_dims(layer)
    return replace(layer, E=e, F=f)


@dataclass(frozen=True)
class DnnModel:
    """A named, ordered sequence of layer rows (index i runs 1..J over costed layers)"""
    name: str
    layers: Tuple[LayerShape, ...]

    def __post_init__(self):
        if not any(layer.is_costed for layer in self.layers):
            raise NetworkFormatError(f"network '{self.name}' has no CONV/FC layer")

    @property
    def compute_layers(self) -> List[LayerShape]:
        return [layer for layer in self.layers if layer.is_costed]

    @property
    def num_compute_layers(self) -> int:
        return len(self.compute_layers)

    def topology(self) -> str:
        """Summary such as '3C,2P,2F'"""
        counts = {kind: 0 for kind in (LayerKind.CONV, LayerKind.POOL, LayerKind.FC)}
        for layer in self.layers:
            counts[layer.kind] += 1
        return f"{counts[LayerKind.CONV]}C,{counts[LayerKind.POOL]}P,{counts[LayerKind.FC]}F"

    def concat(self, other: "DnnModel", name: Optional[str] = None) -> "DnnModel":
        return DnnModel(name=name or f"{self.name}+{other.name}", layers=self.layers + other.layers)


def count_macs(model: DnnModel) -> int:
    """Total MACs: sum of E*F*D*Z^2*C over the CONV/FC layers."""
    return sum(layer.macs for layer in model.layers)


def _line_of_layer(text: str, index: int) -> Optional[int]:
    # Best effort: the n-th occurrence of '"kind"' marks the n-th layer row
    position = -1
    for _ in range(index + 1):
        position = text.find('"kind"', position + 1)
        if position < 0:
            return None
    return text.count("\n", 0, position) + 1


def _parse_layer(row: Dict, index: int) -> LayerShape:
    if not isinstance(row, dict):
        raise NetworkFormatError("layer row must be an object", layer_index=index)
    unknown = set(row) - set(LAYER_FIELDS) - RESERVED_KEYS
    if unknown:
        raise NetworkFormatError(f"unknown field(s) {sorted(unknown)}", layer_index=index,
                                 field=sorted(unknown)[0])
    if "kind" not in row:
        raise NetworkFormatError("missing field", layer_index=index, field="kind")
    try:
        kind = LayerKind(str(row["kind"]).lower())
    except ValueError:
        raise NetworkFormatError(f"unknown layer kind {row['kind']!r}", layer_index=index, field="kind")

    required = {
        LayerKind.CONV: ("C", "D", "H", "W", "Z"),
        LayerKind.FC: ("C", "D"),
        LayerKind.POOL: ("C", "H", "W", "Z"),
    }[kind]
    for field_name in required:
        if field_name not in row:
            raise NetworkFormatError("missing field", layer_index=index, field=field_name)

    try:
        return make_layer(
            kind,
            C=row["C"],
            D=row.get("D"),
            H=row.get("H", 1),
            W=row.get("W", 1),
            Z=row.get("Z", 1),
            S=row.get("S", 1),
            P=row.get("P", 0),
            name=row.get("name", f"{kind.value}{index + 1}"),
        )
    except NetworkFormatError as e:
        raise NetworkFormatError(e.detail, layer_index=index, field=e.field) from e


def parse_network(data: Dict, path: Optional[str] = None, text: Optional[str] = None) -> DnnModel:
    """Build a DnnModel from an already-decoded network document"""
    if not isinstance(data, dict):
        raise NetworkFormatError("network document must be an object", path=path)
    unknown = set(data) - {"name", "layers"} - RESERVED_KEYS
    if unknown:
        raise NetworkFormatError(f"unknown field(s) {sorted(unknown)}", path=path, field=sorted(unknown)[0])
    if "name" not in data:
        raise NetworkFormatError("missing field", path=path, field="name")
    rows = data.get("layers")
    if not isinstance(rows, list) or not rows:
        raise NetworkFormatError("'layers' must be a non-empty list", path=path, field="layers")

    layers = []
    for index, row in enumerate(rows):
        try:
            layers.append(_parse_layer(row, index))
        except NetworkFormatError as e:
            line = _line_of_layer(text, index) if text else None
            raise NetworkFormatError(e.detail, path=path, line=line,
                                     layer_index=index, field=e.field) from e
    return DnnModel(name=str(data["name"]), layers=tuple(layers))


def load_network(path: Union[str, Path]) -> DnnModel:
    """Load a network file, deriving E/F and normalizing FC rows."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise NetworkFormatError(f"cannot read network file: {e.strerror}", path=str(path)) from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise NetworkFormatError(f"invalid JSON: {e.msg} (column {e.colno})", path=str(path),
                                 line=e.lineno) from e

    model = parse_network(data, path=str(path), text=text)
    logger.info(f"Loaded network {model.name} ({model.topology()}, {count_macs(model):.3e} MACs) from {path}")
    return model


def load_benchmark(name: str) -> DnnModel:
    """Load one of the shipped benchmark networks by name"""
    return load_network(SHIPPED_NETWORKS / f"{name}.json")


if __name__ == "__main__":
    for benchmark in BENCHMARKS:
        model = load_benchmark(benchmark)
        print(f"{model.name:10s} {model.topology():12s} {count_macs(model):.3e} MACs")
