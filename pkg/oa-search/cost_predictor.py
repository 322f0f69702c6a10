"""
Analytical Cost Predictor for Optical DNN Accelerators

Predicts per-layer and whole-network energy, latency, throughput and chip area of
a (DnnModel, AcceleratorConfig, TechParams) triple from closed-form equations.

Key Features:
- **Working Set**: RF/GLB requirements per 3D output pixel and DRAM first-touch traffic
- **Access Energy**: input reads, RF and GLB partial-sum traffic, output writes
- **Compute Energy**: D/A + transmitter, per-MAC device energy, receiver + A/D + shift-add
- **Access Latency**: hit/miss split over RF, GLB and DRAM with deficits clamped at zero
- **Compute Latency**: matrix-vector products per output pixel spread over all OCUs
- **Area**: RF, GLB and OCU device area
- **Network Totals**: layer-wise pipeline; throughput set by the bottleneck layer

Units: energy in pJ, latency in ns, area in mm^2, throughput in MAC/s. Every
integer ceiling is computed with exact integer arithmetic.

Usage Example:
    ```python
    from model_ir import load_benchmark
    from arch_config import load_config, SHIPPED_CONFIGS
    from device_lib import default_tech
    from cost_predictor import network_cost

    report = network_cost(load_benchmark("lenet5"), load_config(SHIPPED_CONFIGS / "demo_config.json"),
                          default_tech())
    print(report.energy_pj, report.throughput_macs, report.area_mm2)
    ```
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

from arch_config import AcceleratorConfig, LoopOrder
from device_lib import OcuCharacteristics, OcuType, TechParams, default_tech, ocu_characteristics
from model_ir import DnnModel, LayerShape, count_macs

logger = logging.getLogger(__name__)

PJ_PER_J = 1e12
NS_PER_S = 1e9
BITS_PER_BYTE = 8


def pj_to_j(energy_pj: float) -> float:
    return energy_pj / PJ_PER_J


def j_to_pj(energy_j: float) -> float:
    return energy_j * PJ_PER_J


def ns_to_s(latency_ns: float) -> float:
    return latency_ns / NS_PER_S


def s_to_ns(latency_s: float) -> float:
    return latency_s * NS_PER_S


def per_ns_to_per_s(rate: float) -> float:
    return rate * NS_PER_S


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class LayerWorkingSet:
    """Entries needed per 3D output pixel at RF and GLB, and entries moved from DRAM for the layer"""
    q_rf_req: int
    q_glb_req: int
    q_dram: int

    @property
    def within_bound(self) -> bool:
        return self.q_rf_req <= self.q_glb_req + self.q_dram


@dataclass(frozen=True)
class LayerCost:
    index: int
    name: str
    kind: str
    costed: bool
    macs: int
    e_mem_pj: float = 0.0
    e_comp_pj: float = 0.0
    l_mem_ns: float = 0.0
    l_comp_ns: float = 0.0
    working_set: Optional[LayerWorkingSet] = None

    @property
    def energy_pj(self) -> float:
        return self.e_mem_pj + self.e_comp_pj

    @property
    def l_layer_ns(self) -> float:
        return max(self.l_mem_ns, self.l_comp_ns)


@dataclass(frozen=True)
class CostReport:
    """Whole-network totals plus one LayerCost per network row (pool rows cost nothing)"""
    network: str
    config: AcceleratorConfig
    layers: Tuple[LayerCost, ...]
    energy_pj: float
    dram_energy_pj: float
    bottleneck_latency_ns: float
    bottleneck_layer: int
    throughput_macs: float
    area_mm2: float
    total_macs: int
    include_dram: bool = False

    @property
    def energy_j(self) -> float:
        return pj_to_j(self.energy_pj)

    @property
    def compute_density(self) -> float:
        """Throughput per chip area, MAC/s per mm^2"""
        return self.throughput_macs / self.area_mm2

    @property
    def throughput_per_energy(self) -> float:
        """Throughput divided by the energy of one inference, MAC/s per J"""
        return self.throughput_macs / self.energy_j

    @property
    def fps(self) -> float:
        return 1.0 / ns_to_s(self.bottleneck_latency_ns)

    @property
    def power_w(self) -> float:
        return self.energy_j * self.fps

    @property
    def fps_per_watt(self) -> float:
        return self.fps / self.power_w

    @property
    def costed_layers(self) -> List[LayerCost]:
        return [layer for layer in self.layers if layer.costed]


def _characteristics(config: AcceleratorConfig, tech: TechParams) -> OcuCharacteristics:
    return ocu_characteristics(config.ocu_type, config.n, config.b, tech)


def working_set(layer: LayerShape, config: AcceleratorConfig, tech: Optional[TechParams] = None) -> LayerWorkingSet:
    """RF/GLB entries per output pixel under the config's mapping, and DRAM first-touch entries.

    q_rf_req holds the Z^2 C input window plus D*N_b partial-sum slots. At GLB,
    output-stationary keeps tile_c input windows and tile_d rows of D partial
    sums resident; input-stationary keeps one input window and streams
    tile_c * tile_d rows of partial sums.
    """
    tech = tech or default_tech()
    nb = _characteristics(config, tech).weights_per_device
    window = layer.Z * layer.Z * layer.C
    mapping = config.mapping

    q_rf_req = window + layer.D * nb
    if mapping.loop_order == LoopOrder.OUTPUT_STATIONARY:
        q_glb_req = mapping.tile_c * window + mapping.tile_d * layer.D
    else:
        q_glb_req = window + mapping.tile_c * mapping.tile_d * layer.D
    q_dram = layer.H * layer.W * layer.C + window * layer.D
    return LayerWorkingSet(q_rf_req=q_rf_req, q_glb_req=q_glb_req, q_dram=q_dram)


def _layer_counts(layer: LayerShape, config: AcceleratorConfig, nb: int) -> Tuple[int, int, int, int]:
    """(E*F, Z^2*C, ceil(Z^2 C / N), ceil(D N_b / N))"""
    pixels = layer.E * layer.F
    window = layer.Z * layer.Z * layer.C
    return pixels, window, _ceil_div(window, config.n), _ceil_div(layer.D * nb, config.n)


def layer_access_energy(layer: LayerShape, config: AcceleratorConfig, tech: TechParams) -> float:
    """Data access energy of one layer in pJ: input, RF psum, GLB psum and output terms.

    E-type OCUs hold no stationary weights: every weight is streamed from GLB per
    output pixel and RF partial sums take the GLB read/write path instead.
    """
    ocu = _characteristics(config, tech)
    nb = ocu.weights_per_device
    pixels, window, window_rows, output_cols = _layer_counts(layer, config, nb)

    e_input = (tech.e_glb_read + tech.e_rf_read) * pixels * window * output_cols
    psum_rf_unit = tech.e_rf_read + tech.e_rf_write
    if config.ocu_type == OcuType.E:
        psum_rf_unit = tech.e_glb_read + tech.e_glb_write
    e_psum_rf = psum_rf_unit * pixels * layer.D * nb * window_rows
    rounds = _ceil_div(window_rows * output_cols, config.total_ocus)
    e_psum_glb = (tech.e_glb_read + tech.e_glb_write) * pixels * layer.D * nb * max(rounds - 1, 0)
    e_output = tech.e_glb_write * pixels * layer.D

    energy = e_input + e_psum_rf + e_psum_glb + e_output
    if config.ocu_type == OcuType.E:
        energy += (tech.e_glb_read + tech.e_rf_read) * pixels * window * layer.D * nb
    return energy


def layer_compute_energy(layer: LayerShape, config: AcceleratorConfig, tech: TechParams) -> float:
    """Conversion and device energy of one layer in pJ"""
    ocu = _characteristics(config, tech)
    nb = ocu.weights_per_device
    pixels, window, window_rows, output_cols = _layer_counts(layer, config, nb)

    e_modulate = (tech.e_da + tech.e_tx) * pixels * window * output_cols
    e_mac = (tech.e_r + tech.e_tune) * ocu.energy_scale * pixels * layer.D * nb * window
    e_detect = (tech.e_rx + tech.e_ad + tech.e_sa) * pixels * layer.D * nb * window_rows
    return e_modulate + e_mac + e_detect


def layer_access_latency(layer: LayerShape, config: AcceleratorConfig, tech: TechParams,
                         ws: Optional[LayerWorkingSet] = None) -> float:
    """Memory access latency of one layer in ns.

    Per output pixel: RF hit fraction, GLB traffic for the RF deficit plus the
    GLB psum hit fraction, DRAM traffic for the remaining RF and GLB deficits.
    Deficits are clamped at zero.
    """
    ws = ws or working_set(layer, config, tech)
    rf_capacity = config.q_rf * config.total_ocus
    glb_capacity = config.q_glb * config.k_t

    rf_term = tech.l_rf * min(rf_capacity / ws.q_rf_req, 1.0)
    glb_miss = max(min(config.q_glb, ws.q_rf_req - rf_capacity), 0) / ws.q_rf_req
    glb_psum = min(glb_capacity / ws.q_glb_req, 1.0)
    dram_rf = max(min(ws.q_dram, ws.q_rf_req - rf_capacity - glb_capacity), 0) / ws.q_rf_req
    dram_glb = max(min(ws.q_dram, ws.q_glb_req - glb_capacity), 0) / ws.q_glb_req

    per_pixel = rf_term + tech.l_glb * (glb_miss + glb_psum) + tech.l_dram * (dram_rf + dram_glb)
    return layer.E * layer.F * per_pixel


def layer_compute_latency(layer: LayerShape, config: AcceleratorConfig, tech: TechParams) -> float:
    """E*F * ceil(matvecs per pixel / total OCUs) / R_r, times the type's symbols per matvec"""
    ocu = _characteristics(config, tech)
    pixels, _, window_rows, output_cols = _layer_counts(layer, config, ocu.weights_per_device)
    cycles = _ceil_div(window_rows * output_cols, config.total_ocus)
    return pixels * cycles * ocu.matvec_latency_symbols / tech.r_r


def area_terms(config: AcceleratorConfig, tech: TechParams) -> Tuple[float, float, float]:
    """(RF, GLB, OCU) area in mm^2; buffer entries are converted to bytes at B bits each"""
    ocu = _characteristics(config, tech)
    bytes_per_entry = config.b / BITS_PER_BYTE
    rf = tech.a_rf * config.q_rf * bytes_per_entry * config.total_ocus
    glb = tech.a_glb * config.q_glb * bytes_per_entry * config.k_t
    ocus = ocu.area_mr_equiv * tech.a_r * config.total_ocus
    return rf, glb, ocus


def area(config: AcceleratorConfig, tech: TechParams) -> float:
    """Chip area in mm^2"""
    return sum(area_terms(config, tech))


def layer_dram_energy(ws: LayerWorkingSet, tech: TechParams, written_back: int = 0) -> float:
    """First-touch DRAM reads of the layer plus written_back output entries stored to DRAM"""
    return tech.e_dram_read * ws.q_dram + tech.e_dram_write * written_back


def network_cost(model: DnnModel, config: AcceleratorConfig, tech: TechParams,
                 include_dram: bool = False) -> CostReport:
    """Cost a whole network as a layer-wise pipeline.

    Energy sums over layers; throughput is total MACs over the slowest layer's
    latency. DRAM transfer energy is added only with include_dram: every
    layer reads its inputs and weights once, and only the last costed layer
    writes its outputs back (intermediate maps stay in the GLBs).
    """
    rows = []
    dram_energy = 0.0
    last_costed = max(index for index, layer in enumerate(model.layers) if layer.is_costed)
    for index, layer in enumerate(model.layers):
        if not layer.is_costed:
            rows.append(LayerCost(index=index, name=layer.name, kind=layer.kind.value, costed=False, macs=0))
            continue
        ws = working_set(layer, config, tech)
        if not ws.within_bound:
            logger.debug(f"{model.name} layer {index}: RF requirement {ws.q_rf_req} exceeds GLB plus DRAM entries")
        if include_dram:
            outputs = layer.E * layer.F * layer.D if index == last_costed else 0
            dram_energy += layer_dram_energy(ws, tech, outputs)
        rows.append(LayerCost(
            index=index,
            name=layer.name,
            kind=layer.kind.value,
            costed=True,
            macs=layer.macs,
            e_mem_pj=layer_access_energy(layer, config, tech),
            e_comp_pj=layer_compute_energy(layer, config, tech),
            l_mem_ns=layer_access_latency(layer, config, tech, ws),
            l_comp_ns=layer_compute_latency(layer, config, tech),
            working_set=ws,
        ))

    bottleneck = max((row for row in rows if row.costed), key=lambda row: row.l_layer_ns)
    total_macs = count_macs(model)
    energy = sum(row.energy_pj for row in rows) + dram_energy
    return CostReport(
        network=model.name,
        config=config,
        layers=tuple(rows),
        energy_pj=energy,
        dram_energy_pj=dram_energy,
        bottleneck_latency_ns=bottleneck.l_layer_ns,
        bottleneck_layer=bottleneck.index,
        throughput_macs=per_ns_to_per_s(total_macs / bottleneck.l_layer_ns),
        area_mm2=area(config, tech),
        total_macs=total_macs,
        include_dram=include_dram,
    )


def peak_throughput(config: AcceleratorConfig, tech: TechParams) -> float:
    """Ideal MAC/s of an R-type accelerator with every OCU busy every symbol"""
    nb = _characteristics(config, tech).weights_per_device
    return per_ns_to_per_s(config.total_ocus * config.n * config.n * tech.r_r / nb)


if __name__ == "__main__":
    from arch_config import SHIPPED_CONFIGS, load_config
    from model_ir import BENCHMARKS, load_benchmark

    demo = load_config(SHIPPED_CONFIGS / "demo_config.json")
    tech = default_tech()
    print(f"Demo design area: {area(demo, tech):.3f} mm^2")
    for benchmark in BENCHMARKS:
        report = network_cost(load_benchmark(benchmark), demo, tech)
        print(f"{report.network:10s} E={report.energy_j:.3e} J  T={report.throughput_macs:.3e} MAC/s  "
              f"CD={report.compute_density:.3e}  FPS/W={report.fps_per_watt:.3e}")
