"""
Optical Device and Memory Technology Library

Holds the technology parameters of the cost predictor (unit energies, latencies,
areas and rates of memories and optical devices) and the per-OCU-type
characteristics of a [1, N] x [N, N] matrix-vector product.

OCU types:
- R: micro-resonator array (canonical row: wavelengths B/n_b, area N^2 B/n_b)
- E: electro-optical modulator, wavelength/time interleaved, no stationary weights
- Z_SVD / Z_FFT: Mach-Zehnder meshes, area alpha*N(N-1) and ~(alpha/4)*N(N-1)

Device counts are expressed in MR-equivalents; alpha and beta convert one MZI/EOM
into MRs for area and energy respectively.

Technology files are flat JSON objects. User files overlay the shipped defaults
(`tech/default_tech.json`) unless loaded with strict=True.
"""

import json
import logging
import math
from dataclasses import dataclass, fields, replace
from enum import Enum
from pathlib import Path
from typing import Dict, Optional, Union

logger = logging.getLogger(__name__)

DEFAULT_TECH_FILE = Path(__file__).parent / "tech" / "default_tech.json"
RESERVED_KEYS = {"_comment", "_units"}


class OcuType(Enum):
    """Optical convolution unit families"""
    R = "R"
    E = "E"
    Z_SVD = "Z_SVD"
    Z_FFT = "Z_FFT"


class TechFormatError(ValueError):
    """Raised for unreadable technology files, unknown/missing keys or invalid values"""

    def __init__(self, message: str, path: Optional[str] = None, field: Optional[str] = None):
        prefix = ", ".join(str(part) for part in (path, field and f"field {field}") if part)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.detail = message
        self.path = path
        self.field = field


@dataclass(frozen=True)
class TechParams:
    """Unit costs: energies in pJ, latencies in ns, areas in mm^2 (per byte for memories)"""
    e_rf_read: float
    e_rf_write: float
    e_glb_read: float
    e_glb_write: float
    e_dram_read: float
    e_dram_write: float
    l_rf: float
    l_glb: float
    l_dram: float
    e_tx: float
    e_rx: float
    e_r: float
    e_tune: float
    e_da: float
    e_ad: float
    e_sa: float
    r_r: float  # symbols per ns
    a_r: float
    a_rf: float
    a_glb: float
    alpha: float
    beta: float
    n_b: int

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise TechFormatError(f"must be a finite number, got {value!r}", field=f.name)
            if value <= 0:
                raise TechFormatError(f"must be strictly positive, got {value!r}", field=f.name)
        if not isinstance(self.n_b, int) or self.n_b < 1:
            raise TechFormatError(f"must be an integer >= 1, got {self.n_b!r}", field="n_b")
        for name in ("alpha", "beta"):
            if getattr(self, name) < 1:
                raise TechFormatError(f"must be >= 1, got {getattr(self, name)!r}", field=name)

    def with_overrides(self, **overrides) -> "TechParams":
        return replace(self, **overrides)

    def to_dict(self) -> Dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


TECH_FIELDS = tuple(f.name for f in fields(TechParams))


@dataclass(frozen=True)
class OcuCharacteristics:
    """Characteristics of one OCU processing a [1, N] x [N, N] product.

    power_units and area_mr_equiv are in MR-equivalents; the predictor scales them
    by TechParams at costing time. weights_per_device is the N_b the equations use
    for this type and energy_scale multiplies the per-symbol MAC energy.
    """
    ocu_type: OcuType
    n: int
    b: int
    wavelengths: int
    power_units: float
    matvec_latency_symbols: int
    area_mr_equiv: float
    weights_per_device: int
    energy_scale: float


def mrs_per_weight(b: int, n_b: int) -> int:
    """N_b = ceil(B / n_b)"""
    return -(-b // n_b)


def ocu_characteristics(ocu_type: Union[OcuType, str], n: int, b: int, tech: TechParams) -> OcuCharacteristics:
    """Fill the per-type row for an N x N OCU at B-bit operands.

    Raises ValueError for an unknown type or N < 2 / B < 1.
    """
    try:
        ocu_type = OcuType(ocu_type) if isinstance(ocu_type, str) else OcuType(ocu_type.value)
    except (ValueError, AttributeError):
        raise ValueError(f"unknown OCU type {ocu_type!r}; expected one of {[t.value for t in OcuType]}")
    if n < 2:
        raise ValueError(f"OCU port count N must be >= 2, got {n}")
    if b < 1:
        raise ValueError(f"operand precision B must be >= 1, got {b}")

    if ocu_type == OcuType.R:
        nb = mrs_per_weight(b, tech.n_b)
        return OcuCharacteristics(
            ocu_type=ocu_type, n=n, b=b,
            wavelengths=nb,
            power_units=float(n * n * nb),
            matvec_latency_symbols=1,
            area_mr_equiv=float(n * n * nb),
            weights_per_device=nb,
            energy_scale=1.0,
        )
    if ocu_type == OcuType.E:
        # single modulator, operands streamed over N^2 B wavelength/time slots
        return OcuCharacteristics(
            ocu_type=ocu_type, n=n, b=b,
            wavelengths=n * n * b,
            power_units=tech.beta,
            matvec_latency_symbols=n * b,
            area_mr_equiv=tech.alpha,
            weights_per_device=1,
            energy_scale=tech.beta,
        )

    mesh = n * (n - 1)
    area_coefficient = tech.alpha if ocu_type == OcuType.Z_SVD else tech.alpha / 4
    return OcuCharacteristics(
        ocu_type=ocu_type, n=n, b=b,
        wavelengths=1,
        power_units=tech.beta * mesh,
        matvec_latency_symbols=1,
        area_mr_equiv=area_coefficient * mesh,
        weights_per_device=1,
        energy_scale=tech.beta,
    )


def _read_tech_document(path: Path) -> Dict:
    try:
        text = path.read_text()
    except OSError as e:
        raise TechFormatError(f"cannot read technology file: {e.strerror}", path=str(path)) from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise TechFormatError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}", path=str(path)) from e
    if not isinstance(data, dict):
        raise TechFormatError("technology document must be an object", path=str(path))

    unknown = set(data) - set(TECH_FIELDS) - RESERVED_KEYS
    if unknown:
        raise TechFormatError(f"unknown key(s) {sorted(unknown)}", path=str(path), field=sorted(unknown)[0])
    return {k: v for k, v in data.items() if k not in RESERVED_KEYS}


def tech_from_dict(values: Dict, path: Optional[str] = None) -> TechParams:
    missing = [name for name in TECH_FIELDS if name not in values]
    if missing:
        raise TechFormatError(f"missing field(s) {missing}", path=path, field=missing[0])
    try:
        return TechParams(**{name: values[name] for name in TECH_FIELDS})
    except TechFormatError as e:
        raise TechFormatError(e.detail, path=path, field=e.field) from e


_default_tech: Optional[TechParams] = None


def default_tech() -> TechParams:
    """The shipped default parameters (illustrative values, see the file header)"""
    global _default_tech
    if _default_tech is None:
        _default_tech = tech_from_dict(_read_tech_document(DEFAULT_TECH_FILE), path=str(DEFAULT_TECH_FILE))
    return _default_tech


def load_tech(path: Union[str, Path, None] = None, strict: bool = False) -> TechParams:
    """Load a technology file.

    Without strict, keys absent from the file keep the shipped default values.
    With strict, every field must be present. A missing path returns the defaults.
    """
    if path is None:
        return default_tech()
    path = Path(path)
    values = _read_tech_document(path)
    if not strict:
        values = {**default_tech().to_dict(), **values}
    tech = tech_from_dict(values, path=str(path))
    logger.info(f"Loaded technology parameters from {path} ({len(values)} fields)")
    return tech
