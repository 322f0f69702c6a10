"""
Accelerator Design Points and Search Spaces

An AcceleratorConfig is one point of the optical accelerator design space: tile
and OCU counts, OCU type and size, buffer sizes, operand precision and the
mapping knobs (memory-level loop order and channel tiling). A SearchSpaceDef
lists the admissible values of every dimension plus an optional chip area cap.

Buffer sizes are counted in operand entries (one B-bit word each).

Usage Example:
    ```python
    from arch_config import load_space, enumerate_configs, validate

    space = load_space(SHIPPED_SPACES / "small.json")
    configs = enumerate_configs(space, limit=10_000)
    print(configs.count)
    for config in configs:
        assert not validate(config, space)
    ```
"""

import itertools
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from device_lib import OcuType, TechParams

logger = logging.getLogger(__name__)

SHIPPED_SPACES = Path(__file__).parent / "spaces"
SHIPPED_CONFIGS = Path(__file__).parent / "configs"
SHIPPED_REFERENCES = SHIPPED_CONFIGS / "reference"
# Published accelerators reproduced as designs; see the _comment of each file for assumed values
REFERENCE_DESIGNS = ("holylight", "pixel", "crosslight", "svd", "fft", "eom")
DEFAULT_ENUMERATION_LIMIT = 1_000_000

# Search dimensions in enumeration (lexicographic) order
DIMENSIONS = ("k_t", "k_ocu", "ocu_type", "n", "q_rf", "q_glb", "b", "loop_order", "tile_d", "tile_c")
MAPPING_DIMENSIONS = ("loop_order", "tile_d", "tile_c")
RESERVED_KEYS = {"_comment", "_units"}

# Smallest admissible value of every integer dimension; b is also capped at MAX_BITS
INTEGER_MINIMUMS = {"k_t": 1, "k_ocu": 1, "n": 2, "q_rf": 1, "q_glb": 1, "b": 1, "tile_d": 1, "tile_c": 1}
MAX_BITS = 16


class LoopOrder(Enum):
    """Canonical memory-level loop orders.

    OUTPUT_STATIONARY keeps partial sums of the output-channel tile resident at
    GLB while input-channel tiles stream; INPUT_STATIONARY keeps the input
    window resident while output-channel tiles stream.
    """
    OUTPUT_STATIONARY = "output_stationary"
    INPUT_STATIONARY = "input_stationary"


class SpaceFormatError(ValueError):
    """Raised for malformed search-space or accelerator-config documents"""

    def __init__(self, message: str, path: Optional[str] = None, field: Optional[str] = None):
        prefix = ", ".join(str(part) for part in (path, field and f"field {field}") if part)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.detail = message
        self.path = path
        self.field = field


class EnumerationLimitError(ValueError):
    """Raised when a space is larger than the caller's enumeration limit"""

    def __init__(self, cardinality: int, limit: int):
        super().__init__(f"search space has {cardinality} configurations, above the limit of {limit}")
        self.cardinality = cardinality
        self.limit = limit


@dataclass(frozen=True)
class MappingChoice:
    loop_order: LoopOrder = LoopOrder.OUTPUT_STATIONARY
    tile_d: int = 1
    tile_c: int = 1

    def __post_init__(self):
        if not isinstance(self.loop_order, LoopOrder):
            raise ValueError(f"loop_order must be a LoopOrder, got {self.loop_order!r}")
        for name in ("tile_d", "tile_c"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {value!r}")


@dataclass(frozen=True)
class AcceleratorConfig:
    k_t: int
    k_ocu: int
    ocu_type: OcuType
    n: int
    q_rf: int
    q_glb: int
    b: int
    mapping: MappingChoice = field(default_factory=MappingChoice)

    def __post_init__(self):
        for name in ("k_t", "k_ocu", "n", "q_rf", "q_glb"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {value!r}")
        if not isinstance(self.b, int) or isinstance(self.b, bool) or not 1 <= self.b <= MAX_BITS:
            raise ValueError(f"b must be an integer in 1..{MAX_BITS}, got {self.b!r}")
        if not isinstance(self.ocu_type, OcuType):
            raise ValueError(f"ocu_type must be an OcuType, got {self.ocu_type!r}")

    @property
    def total_ocus(self) -> int:
        return self.k_t * self.k_ocu

    def value_of(self, dimension: str) -> Any:
        if dimension in MAPPING_DIMENSIONS:
            return getattr(self.mapping, dimension)
        return getattr(self, dimension)

    @classmethod
    def from_values(cls, values: Dict[str, Any]) -> "AcceleratorConfig":
        mapping = MappingChoice(
            loop_order=values.get("loop_order", LoopOrder.OUTPUT_STATIONARY),
            tile_d=values.get("tile_d", 1),
            tile_c=values.get("tile_c", 1),
        )
        return cls(
            k_t=values["k_t"], k_ocu=values["k_ocu"], ocu_type=values["ocu_type"], n=values["n"],
            q_rf=values["q_rf"], q_glb=values["q_glb"], b=values["b"], mapping=mapping,
        )


@dataclass(frozen=True)
class Violation:
    dimension: str
    value: Any
    message: str


def _value_problem(dimension: str, value: Any) -> Optional[str]:
    """Why value cannot appear in a design, or None when it can"""
    if dimension == "ocu_type":
        return None if isinstance(value, OcuType) else f"{value!r} is not an OcuType"
    if dimension == "loop_order":
        return None if isinstance(value, LoopOrder) else f"{value!r} is not a LoopOrder"
    minimum = INTEGER_MINIMUMS[dimension]
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        return f"values must be integers >= {minimum}, got {value!r}"
    if dimension == "b" and value > MAX_BITS:
        return f"values must be integers in 1..{MAX_BITS}, got {value!r}"
    return None


@dataclass(frozen=True)
class SearchSpaceDef:
    """Admissible values per dimension (in DIMENSIONS order) and an optional area cap in mm^2"""
    choices: Tuple[Tuple[Any, ...], ...]
    area_cap: Optional[float] = None
    name: str = "space"

    def __post_init__(self):
        if len(self.choices) != len(DIMENSIONS):
            raise SpaceFormatError(f"expected {len(DIMENSIONS)} dimensions, got {len(self.choices)}")
        for dimension, values in zip(DIMENSIONS, self.choices):
            if not values:
                raise SpaceFormatError("admissible value list is empty", field=dimension)
            if len(set(values)) != len(values):
                raise SpaceFormatError("admissible values contain duplicates", field=dimension)
            for value in values:
                problem = _value_problem(dimension, value)
                if problem:
                    raise SpaceFormatError(problem, field=dimension)
        cap = self.area_cap
        if cap is not None and (isinstance(cap, bool) or not isinstance(cap, (int, float))
                                or not math.isfinite(cap) or cap <= 0):
            raise SpaceFormatError(f"area_cap must be a positive number, got {cap!r}", field="area_cap")

    @classmethod
    def from_lists(cls, lists: Dict[str, Sequence[Any]], area_cap: Optional[float] = None,
                   name: str = "space") -> "SearchSpaceDef":
        defaults = {"loop_order": (LoopOrder.OUTPUT_STATIONARY,), "tile_d": (1,), "tile_c": (1,)}
        choices = []
        for dimension in DIMENSIONS:
            if dimension in lists:
                choices.append(tuple(lists[dimension]))
            elif dimension in defaults:
                choices.append(defaults[dimension])
            else:
                raise SpaceFormatError("missing dimension", field=dimension)
        return cls(choices=tuple(choices), area_cap=area_cap, name=name)

    def values(self, dimension: str) -> Tuple[Any, ...]:
        return self.choices[DIMENSIONS.index(dimension)]

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(values) for values in self.choices)

    @property
    def cardinality(self) -> int:
        count = 1
        for size in self.sizes:
            count *= size
        return count

    def config_from_indices(self, indices: Sequence[int]) -> AcceleratorConfig:
        values = {dimension: self.choices[i][int(index)] for i, (dimension, index) in
                  enumerate(zip(DIMENSIONS, indices))}
        return AcceleratorConfig.from_values(values)

    def indices_of(self, config: AcceleratorConfig) -> Optional[Tuple[int, ...]]:
        """Choice index per dimension, or None when a value is not admissible"""
        indices = []
        for dimension, values in zip(DIMENSIONS, self.choices):
            value = config.value_of(dimension)
            if value not in values:
                return None
            indices.append(values.index(value))
        return tuple(indices)

    def center_indices(self) -> Tuple[int, ...]:
        return tuple((size - 1) // 2 for size in self.sizes)

    def center_config(self) -> AcceleratorConfig:
        """Deterministic reference design: the middle admissible value of every dimension"""
        return self.config_from_indices(self.center_indices())


def validate(config: AcceleratorConfig, space: SearchSpaceDef, tech: Optional[TechParams] = None) -> List[Violation]:
    """Check membership of every field and, when the space has a cap, the predicted area.

    Returns an empty list when the config is admissible.
    """
    violations = []
    for dimension, values in zip(DIMENSIONS, space.choices):
        value = config.value_of(dimension)
        if value not in values:
            violations.append(Violation(dimension, value, f"{value!r} is not an admissible {dimension} value"))

    if space.area_cap is not None and tech is not None:
        from cost_predictor import area
        try:
            chip_area = area(config, tech)
        except ValueError as e:
            violations.append(Violation("area", None, f"area cannot be evaluated: {e}"))
        else:
            if chip_area > space.area_cap:
                violations.append(Violation(
                    "area", chip_area, f"predicted area {chip_area:.4g} mm^2 exceeds the cap of {space.area_cap:g} mm^2"))
    return violations


class ConfigEnumeration:
    """Deterministic lexicographic stream over a space, with its exact count"""

    def __init__(self, space: SearchSpaceDef):
        self.space = space
        self.count = space.cardinality

    def __len__(self) -> int:
        return self.count

    def indices(self) -> Iterator[Tuple[int, ...]]:
        return itertools.product(*(range(size) for size in self.space.sizes))

    def __iter__(self) -> Iterator[AcceleratorConfig]:
        for indices in self.indices():
            yield self.space.config_from_indices(indices)


def enumerate_configs(space: SearchSpaceDef, limit: int = DEFAULT_ENUMERATION_LIMIT) -> ConfigEnumeration:
    """Enumerate every configuration of the space in lexicographic index order.

    Raises EnumerationLimitError (carrying the exact cardinality) above limit.
    """
    if space.cardinality > limit:
        raise EnumerationLimitError(space.cardinality, limit)
    logger.info(f"Enumerating {space.cardinality} configurations of space {space.name}")
    return ConfigEnumeration(space)


def _decode_value(dimension: str, value: Any, path: Optional[str]) -> Any:
    try:
        if dimension == "ocu_type":
            return OcuType(value)
        if dimension == "loop_order":
            return LoopOrder(value)
    except ValueError:
        raise SpaceFormatError(f"unknown {dimension} {value!r}", path=path, field=dimension)
    if not isinstance(value, int) or isinstance(value, bool):
        raise SpaceFormatError(f"must be an integer, got {value!r}", path=path, field=dimension)
    return value


def _encode_value(value: Any) -> Any:
    return value.value if isinstance(value, Enum) else value


def _read_document(path: Path) -> Dict:
    try:
        data = json.loads(path.read_text())
    except OSError as e:
        raise SpaceFormatError(f"cannot read file: {e.strerror}", path=str(path)) from e
    except json.JSONDecodeError as e:
        raise SpaceFormatError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}", path=str(path)) from e
    if not isinstance(data, dict):
        raise SpaceFormatError("document must be an object", path=str(path))
    return data


def space_from_dict(data: Dict, path: Optional[str] = None) -> SearchSpaceDef:
    unknown = set(data) - {"name", "dimensions", "area_cap"} - RESERVED_KEYS
    if unknown:
        raise SpaceFormatError(f"unknown key(s) {sorted(unknown)}", path=path, field=sorted(unknown)[0])
    dimensions = data.get("dimensions")
    if not isinstance(dimensions, dict):
        raise SpaceFormatError("'dimensions' must be an object", path=path, field="dimensions")
    unknown = set(dimensions) - set(DIMENSIONS)
    if unknown:
        raise SpaceFormatError(f"unknown dimension(s) {sorted(unknown)}", path=path, field=sorted(unknown)[0])

    lists = {}
    for dimension, values in dimensions.items():
        if not isinstance(values, list):
            raise SpaceFormatError("admissible values must be a list", path=path, field=dimension)
        lists[dimension] = [_decode_value(dimension, value, path) for value in values]
    try:
        return SearchSpaceDef.from_lists(lists, area_cap=data.get("area_cap"), name=data.get("name", "space"))
    except SpaceFormatError as e:
        raise SpaceFormatError(e.detail, path=path, field=e.field) from e


def space_to_dict(space: SearchSpaceDef) -> Dict:
    return {
        "name": space.name,
        "dimensions": {d: [_encode_value(v) for v in values] for d, values in zip(DIMENSIONS, space.choices)},
        "area_cap": space.area_cap,
    }


def load_space(path: Union[str, Path]) -> SearchSpaceDef:
    path = Path(path)
    space = space_from_dict(_read_document(path), path=str(path))
    logger.info(f"Loaded search space {space.name} ({space.cardinality} configurations) from {path}")
    return space


def config_from_dict(data: Dict, path: Optional[str] = None) -> AcceleratorConfig:
    known = set(DIMENSIONS) - set(MAPPING_DIMENSIONS) | {"mapping"}
    unknown = set(data) - known - RESERVED_KEYS
    if unknown:
        raise SpaceFormatError(f"unknown key(s) {sorted(unknown)}", path=path, field=sorted(unknown)[0])
    mapping = data.get("mapping", {})
    if not isinstance(mapping, dict) or set(mapping) - set(MAPPING_DIMENSIONS):
        raise SpaceFormatError(f"mapping accepts only {list(MAPPING_DIMENSIONS)}", path=path, field="mapping")

    values = {}
    for dimension in DIMENSIONS:
        source = mapping if dimension in MAPPING_DIMENSIONS else data
        if dimension in source:
            values[dimension] = _decode_value(dimension, source[dimension], path)
        elif dimension not in MAPPING_DIMENSIONS:
            raise SpaceFormatError("missing field", path=path, field=dimension)
    try:
        return AcceleratorConfig.from_values(values)
    except ValueError as e:
        raise SpaceFormatError(str(e), path=path) from e


def config_to_dict(config: AcceleratorConfig) -> Dict:
    return {
        "k_t": config.k_t,
        "k_ocu": config.k_ocu,
        "ocu_type": config.ocu_type.value,
        "n": config.n,
        "q_rf": config.q_rf,
        "q_glb": config.q_glb,
        "b": config.b,
        "mapping": {
            "loop_order": config.mapping.loop_order.value,
            "tile_d": config.mapping.tile_d,
            "tile_c": config.mapping.tile_c,
        },
    }


def load_config(path: Union[str, Path]) -> AcceleratorConfig:
    path = Path(path)
    return config_from_dict(_read_document(path), path=str(path))


def save_config(config: AcceleratorConfig, path: Union[str, Path]) -> None:
    with open(path, "w") as f:
        json.dump(config_to_dict(config), f, indent=2)
        f.write("\n")


def load_reference_design(name: str) -> AcceleratorConfig:
    if name not in REFERENCE_DESIGNS:
        raise SpaceFormatError(f"unknown reference design {name!r}; expected one of {list(REFERENCE_DESIGNS)}")
    return load_config(SHIPPED_REFERENCES / f"{name}.json")


def load_reference_designs() -> Dict[str, AcceleratorConfig]:
    """Every shipped reference design, by name, in REFERENCE_DESIGNS order"""
    return {name: load_reference_design(name) for name in REFERENCE_DESIGNS}
