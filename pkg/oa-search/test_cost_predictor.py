"""
Test Suite for the Analytical Cost Predictor

Includes a deliberately naive second implementation of every predictor equation
(plain arithmetic on primitive values, its own ceilings and device rows) that
the predictor must match on randomly drawn (layer, config, tech) triples.
"""

import time
import unittest
from dataclasses import replace
from types import SimpleNamespace

import numpy as np

from arch_config import SHIPPED_CONFIGS, AcceleratorConfig, LoopOrder, MappingChoice, load_config
from cost_predictor import (
    area,
    j_to_pj,
    layer_access_energy,
    layer_access_latency,
    layer_compute_energy,
    layer_compute_latency,
    network_cost,
    ns_to_s,
    peak_throughput,
    pj_to_j,
    s_to_ns,
    working_set,
)
from device_lib import TECH_FIELDS, OcuType, TechParams, default_tech
from model_ir import DnnModel, load_benchmark, make_layer

RTOL = 1e-12
ENERGY_FIELDS = ("e_rf_read", "e_rf_write", "e_glb_read", "e_glb_write", "e_dram_read", "e_dram_write",
                 "e_tx", "e_rx", "e_r", "e_tune", "e_da", "e_ad", "e_sa")


# ---------------------------------------------------------------------------
# Naive reference implementation
# ---------------------------------------------------------------------------

def up(a, b):
    q, r = divmod(a, b)
    return q + (1 if r else 0)


def naive_nb(ocu_type, b, t):
    if ocu_type == OcuType.R:
        return up(b, t.n_b)
    return 1


def naive_area_mr(ocu_type, n, b, t):
    if ocu_type == OcuType.R:
        return n * n * up(b, t.n_b)
    if ocu_type == OcuType.E:
        return t.alpha
    if ocu_type == OcuType.Z_SVD:
        return t.alpha * n * (n - 1)
    return t.alpha / 4 * n * (n - 1)


def naive_dims(L):
    return (L.H + 2 * L.P - L.Z) // L.S + 1, (L.W + 2 * L.P - L.Z) // L.S + 1


def naive_e_mem(L, c, t):
    E, F = naive_dims(L)
    nb = naive_nb(c.ocu_type, c.b, t)
    zzc = L.Z * L.Z * L.C
    rows = up(zzc, c.n)
    cols = up(L.D * nb, c.n)
    e_input = (t.e_glb_read + t.e_rf_read) * E * F * zzc * cols
    if c.ocu_type == OcuType.E:
        e_psum_rf = (t.e_glb_read + t.e_glb_write) * E * F * L.D * nb * rows
    else:
        e_psum_rf = (t.e_rf_read + t.e_rf_write) * E * F * L.D * nb * rows
    extra_rounds = up(rows * cols, c.k_t * c.k_ocu) - 1
    if extra_rounds < 0:
        extra_rounds = 0
    e_psum_glb = (t.e_glb_read + t.e_glb_write) * E * F * L.D * nb * extra_rounds
    e_output = t.e_glb_write * E * F * L.D
    e_weights = 0.0
    if c.ocu_type == OcuType.E:
        e_weights = (t.e_glb_read + t.e_rf_read) * E * F * zzc * L.D * nb
    return e_input + e_psum_rf + e_psum_glb + e_output + e_weights


def naive_e_comp(L, c, t):
    E, F = naive_dims(L)
    nb = naive_nb(c.ocu_type, c.b, t)
    scale = 1.0 if c.ocu_type == OcuType.R else t.beta
    zzc = L.Z * L.Z * L.C
    return ((t.e_da + t.e_tx) * E * F * zzc * up(L.D * nb, c.n)
            + (t.e_r + t.e_tune) * scale * E * F * L.D * nb * zzc
            + (t.e_rx + t.e_ad + t.e_sa) * E * F * L.D * nb * up(zzc, c.n))


def naive_requirements(L, c, t):
    nb = naive_nb(c.ocu_type, c.b, t)
    zzc = L.Z * L.Z * L.C
    q_rf_req = zzc + L.D * nb
    if c.mapping.loop_order == LoopOrder.OUTPUT_STATIONARY:
        q_glb_req = c.mapping.tile_c * zzc + c.mapping.tile_d * L.D
    else:
        q_glb_req = zzc + c.mapping.tile_c * c.mapping.tile_d * L.D
    q_dram = L.H * L.W * L.C + zzc * L.D
    return q_rf_req, q_glb_req, q_dram


def naive_l_mem(L, c, t):
    E, F = naive_dims(L)
    q_rf_req, q_glb_req, q_dram = naive_requirements(L, c, t)
    rf_cap = c.q_rf * c.k_t * c.k_ocu
    glb_cap = c.q_glb * c.k_t
    t1 = t.l_rf * min(rf_cap / q_rf_req, 1)
    t2 = t.l_glb * (max(0, min(c.q_glb, q_rf_req - rf_cap)) / q_rf_req + min(glb_cap / q_glb_req, 1))
    t3 = t.l_dram * (max(0, min(q_dram, q_rf_req - rf_cap - glb_cap)) / q_rf_req
                     + max(0, min(q_dram, q_glb_req - glb_cap)) / q_glb_req)
    return E * F * (t1 + t2 + t3)


def naive_l_comp(L, c, t):
    E, F = naive_dims(L)
    nb = naive_nb(c.ocu_type, c.b, t)
    zzc = L.Z * L.Z * L.C
    factor = c.n * c.b if c.ocu_type == OcuType.E else 1
    return E * F * up(up(zzc, c.n) * up(L.D * nb, c.n), c.k_t * c.k_ocu) * factor / t.r_r


def naive_area(c, t):
    return (t.a_rf * (c.q_rf * c.b / 8) * c.k_t * c.k_ocu
            + t.a_glb * (c.q_glb * c.b / 8) * c.k_t
            + naive_area_mr(c.ocu_type, c.n, c.b, t) * t.a_r * c.k_t * c.k_ocu)


def naive_network(model, c, t):
    energy = 0.0
    worst = 0.0
    macs = 0
    for L in model.layers:
        if L.kind.value == "pool":
            continue
        E, F = naive_dims(L)
        macs += E * F * L.D * L.Z * L.Z * L.C
        energy += naive_e_mem(L, c, t) + naive_e_comp(L, c, t)
        worst = max(worst, naive_l_mem(L, c, t), naive_l_comp(L, c, t))
    return energy, worst, macs / worst * 1e9, naive_area(c, t)


# ---------------------------------------------------------------------------
# Random triples
# ---------------------------------------------------------------------------

def random_layer(rng):
    if rng.random() < 0.2:
        return make_layer("fc", C=int(rng.integers(1, 4097)), D=int(rng.integers(1, 4097)))
    z = int(rng.choice([1, 3, 5, 7, 11]))
    p = int(rng.integers(0, 4))
    s = int(rng.integers(1, 5))
    h = int(rng.integers(max(z - 2 * p, 1), z + 64))
    w = int(rng.integers(max(z - 2 * p, 1), z + 64))
    return make_layer("conv", C=int(rng.integers(1, 513)), D=int(rng.integers(1, 513)),
                      H=h, W=w, Z=z, S=s, P=p)


def random_config(rng):
    return AcceleratorConfig(
        k_t=int(rng.integers(1, 33)),
        k_ocu=int(rng.integers(1, 17)),
        ocu_type=list(OcuType)[int(rng.integers(0, 4))],
        n=int(rng.integers(2, 65)),
        q_rf=int(rng.integers(1, 1025)),
        q_glb=int(rng.integers(1, 1 << 20)),
        b=int(rng.integers(1, 17)),
        mapping=MappingChoice(
            loop_order=list(LoopOrder)[int(rng.integers(0, 2))],
            tile_d=int(rng.integers(1, 9)),
            tile_c=int(rng.integers(1, 9)),
        ),
    )


def random_tech(rng):
    values = {name: float(10 ** rng.uniform(-3, 2)) for name in TECH_FIELDS}
    values["alpha"] = float(rng.uniform(1, 20))
    values["beta"] = float(rng.uniform(1, 20))
    values["n_b"] = int(rng.integers(1, 9))
    return TechParams(**values)


def unit_tech(**overrides):
    values = {name: 1.0 for name in TECH_FIELDS}
    values["n_b"] = 1
    values.update(overrides)
    return TechParams(**values)


def loose_tech(**overrides):
    """Duck-typed parameters that may hold zeros, which TechParams rejects"""
    values = unit_tech().to_dict()
    values.update(overrides)
    return SimpleNamespace(**values)


def tiny_config(**overrides):
    values = dict(k_t=1, k_ocu=1, ocu_type=OcuType.R, n=8, q_rf=1, q_glb=1, b=8)
    values.update(overrides)
    return AcceleratorConfig(**values)


class TestOracleEquivalence(unittest.TestCase):
    """Every equation against the naive implementation on 1000 seeded triples"""

    def test_random_triples(self):
        """Test all operations on random (layer, config, tech) triples"""
        rng = np.random.default_rng(20240917)
        start = time.perf_counter()
        for _ in range(1000):
            layer, config, tech = random_layer(rng), random_config(rng), random_tech(rng)
            ws = working_set(layer, config, tech)
            self.assertEqual((ws.q_rf_req, ws.q_glb_req, ws.q_dram), naive_requirements(layer, config, tech))
            np.testing.assert_allclose(layer_access_energy(layer, config, tech),
                                       naive_e_mem(layer, config, tech), rtol=RTOL, atol=0)
            np.testing.assert_allclose(layer_compute_energy(layer, config, tech),
                                       naive_e_comp(layer, config, tech), rtol=RTOL, atol=0)
            np.testing.assert_allclose(layer_access_latency(layer, config, tech, ws),
                                       naive_l_mem(layer, config, tech), rtol=RTOL, atol=0)
            np.testing.assert_allclose(layer_compute_latency(layer, config, tech),
                                       naive_l_comp(layer, config, tech), rtol=RTOL, atol=0)
            np.testing.assert_allclose(area(config, tech), naive_area(config, tech), rtol=RTOL, atol=0)
        self.assertLess(time.perf_counter() - start, 10.0)

    def test_lenet5_demo_design(self):
        """Test the whole-network report of LeNet-5 on the demo design"""
        model = load_benchmark("lenet5")
        config = load_config(SHIPPED_CONFIGS / "demo_config.json")
        tech = default_tech()
        report = network_cost(model, config, tech)
        energy, worst, throughput, chip_area = naive_network(model, config, tech)
        np.testing.assert_allclose(report.energy_pj, energy, rtol=RTOL)
        np.testing.assert_allclose(report.bottleneck_latency_ns, worst, rtol=RTOL)
        np.testing.assert_allclose(report.throughput_macs, throughput, rtol=RTOL)
        np.testing.assert_allclose(report.area_mm2, chip_area, rtol=RTOL)

    def test_random_networks(self):
        """Test whole-network totals on random three-layer networks"""
        rng = np.random.default_rng(7)
        for _ in range(100):
            model = DnnModel("random", tuple(random_layer(rng) for _ in range(3)))
            config, tech = random_config(rng), random_tech(rng)
            report = network_cost(model, config, tech)
            energy, worst, throughput, chip_area = naive_network(model, config, tech)
            np.testing.assert_allclose(
                [report.energy_pj, report.bottleneck_latency_ns, report.throughput_macs, report.area_mm2],
                [energy, worst, throughput, chip_area], rtol=RTOL)


class TestHandValues(unittest.TestCase):
    """Tiny-layer values worked out by hand under unit parameters"""

    def setUp(self):
        self.layer = make_layer("conv", C=1, D=1, H=1, W=1, Z=1)
        self.config = tiny_config()
        self.tech = unit_tech(r_r=2.0)

    def test_working_set(self):
        """Test q_rf_req = 1 + 8 and q_dram = 1 + 1"""
        ws = working_set(self.layer, self.config, self.tech)
        self.assertEqual(ws.q_rf_req, 9)
        self.assertEqual(ws.q_dram, 2)
        self.assertEqual(ws.q_glb_req, 2)
        self.assertFalse(ws.within_bound)

    def test_fc_working_set(self):
        """Test q_rf_req = 5 + 7 with one device per weight"""
        layer = make_layer("fc", C=5, D=7)
        ws = working_set(layer, tiny_config(ocu_type=OcuType.Z_SVD), self.tech)
        self.assertEqual(ws.q_rf_req, 12)

    def test_access_energy(self):
        """Test 2 + 16 + 0 + 1 = 19"""
        self.assertEqual(layer_access_energy(self.layer, self.config, self.tech), 19.0)

    def test_compute_energy(self):
        """Test 2 + 16 + 24 = 42"""
        self.assertEqual(layer_compute_energy(self.layer, self.config, self.tech), 42.0)

    def test_compute_latency(self):
        """Test one symbol time: 1 / R_r"""
        self.assertEqual(layer_compute_latency(self.layer, self.config, self.tech), 0.5)

    def test_glb_psum_term_vanishes_for_single_round(self):
        """Test that D*N_b <= N and Z^2 C <= N on one OCU leaves no GLB psum traffic"""
        without_glb = layer_access_energy(self.layer, self.config, unit_tech(e_glb_read=1.0, e_glb_write=1.0))
        self.assertEqual(without_glb, 19.0)
        scaled = layer_access_energy(self.layer, self.config, unit_tech(e_glb_read=3.0, e_glb_write=5.0))
        # only the input (glb read) and output (glb write) terms move
        self.assertEqual(scaled, (3 + 1) * 1 + 2 * 8 + 5)

    def test_energy_linear_in_output_pixels(self):
        """Test that doubling E*F doubles both energies"""
        small = make_layer("conv", C=3, D=4, H=3, W=3, Z=3)
        double = make_layer("conv", C=3, D=4, H=3, W=4, Z=3)
        config = tiny_config(k_t=2, n=4)
        for fn in (layer_access_energy, layer_compute_energy):
            self.assertAlmostEqual(fn(double, config, self.tech), 2 * fn(small, config, self.tech))

    def test_mac_term(self):
        """Test that the device term is 2 * MACs * N_b with unit e_r and e_tune, and vanishes at zero"""
        layer = make_layer("conv", C=4, D=3, H=5, W=5, Z=3)
        only_mac = loose_tech(e_da=0.0, e_tx=0.0, e_rx=0.0, e_ad=0.0, e_sa=0.0)
        self.assertEqual(layer_compute_energy(layer, self.config, only_mac), 2 * layer.macs * 8)
        no_mac = loose_tech(e_r=0.0, e_tune=0.0)
        with_mac = loose_tech()
        self.assertEqual(layer_compute_energy(layer, self.config, with_mac)
                         - layer_compute_energy(layer, self.config, no_mac), 2 * layer.macs * 8)

    def test_compute_latency_two_rounds(self):
        """Test Z^2 C = N and D N_b = 2N on one OCU: E*F*2/R_r"""
        layer = make_layer("fc", C=8, D=8)
        config = tiny_config(n=8, b=8)
        tech = unit_tech(n_b=4, r_r=4.0)
        self.assertEqual(layer_compute_latency(layer, config, tech), 2 / 4.0)

    def test_e_type_latency_factor(self):
        """Test that E-OCUs take N*B symbols per matrix-vector product"""
        config = tiny_config(ocu_type=OcuType.E, n=4, b=8)
        self.assertEqual(layer_compute_latency(self.layer, config, self.tech), 32 / 2.0)

    def test_access_latency_all_hits(self):
        """Test E*F*(l_rf + l_glb) when RF and GLB hold the whole working set"""
        layer = make_layer("conv", C=16, D=32, H=10, W=10, Z=3)
        config = tiny_config(q_rf=1 << 16, q_glb=1 << 20)
        tech = unit_tech(l_rf=0.5, l_glb=2.0, l_dram=50.0)
        self.assertAlmostEqual(layer_access_latency(layer, config, tech), 64 * (0.5 + 2.0))

    def test_access_latency_rf_saturates(self):
        """Test the RF term at exactly Q_rf = q_rf_req on one OCU"""
        ws = working_set(self.layer, self.config, self.tech)
        config = tiny_config(q_rf=ws.q_rf_req, q_glb=1 << 10)
        tech = unit_tech(l_rf=0.25, l_glb=1.0, l_dram=1.0)
        self.assertAlmostEqual(layer_access_latency(self.layer, config, tech), 0.25 + 1.0)

    def test_access_latency_minimal_buffers_finite(self):
        """Test that one-entry buffers give a finite non-negative latency"""
        layer = make_layer("conv", C=64, D=64, H=8, W=8, Z=3)
        latency = layer_access_latency(layer, tiny_config(), unit_tech())
        self.assertTrue(np.isfinite(latency))
        self.assertGreaterEqual(latency, 0.0)

    def test_area(self):
        """Test 2 + 512 * a_r for unit buffer areas and an 8x8 8-bit R-OCU"""
        tech = unit_tech(a_r=0.5)
        self.assertEqual(area(tiny_config(), tech), 2 + 512 * 0.5)

    def test_area_linear_in_tiles(self):
        tech = default_tech()
        config = load_config(SHIPPED_CONFIGS / "demo_config.json")
        self.assertAlmostEqual(area(replace(config, k_t=2 * config.k_t), tech), 2 * area(config, tech))


class TestProperties(unittest.TestCase):

    def test_monotonicity(self):
        """Test compute latency non-increasing in K_t*K_ocu and area strictly increasing"""
        rng = np.random.default_rng(99)
        tech = default_tech()
        for _ in range(10_000):
            layer, config = random_layer(rng), random_config(rng)
            latency = layer_compute_latency(layer, config, tech)
            self.assertLessEqual(layer_compute_latency(layer, replace(config, k_t=2 * config.k_t), tech), latency)
            self.assertLessEqual(layer_compute_latency(layer, replace(config, k_ocu=config.k_ocu + 1), tech),
                                 latency)
            base = area(config, tech)
            for field in ("q_rf", "q_glb", "k_t", "k_ocu"):
                grown = replace(config, **{field: getattr(config, field) + 1})
                self.assertGreater(area(grown, tech), base, field)

    def test_energy_homogeneity(self):
        """Test degree-1 homogeneity in the unit energies and in the unit areas"""
        rng = np.random.default_rng(5)
        for _ in range(200):
            layer, config, tech = random_layer(rng), random_config(rng), random_tech(rng)
            scaled = tech.with_overrides(**{name: 3.0 * getattr(tech, name) for name in ENERGY_FIELDS})
            for fn in (layer_access_energy, layer_compute_energy):
                np.testing.assert_allclose(fn(layer, config, scaled), 3.0 * fn(layer, config, tech), rtol=1e-12)
            bigger = tech.with_overrides(a_r=2 * tech.a_r, a_rf=2 * tech.a_rf, a_glb=2 * tech.a_glb)
            np.testing.assert_allclose(area(config, bigger), 2 * area(config, tech), rtol=1e-12)

    def test_single_layer_throughput_below_peak(self):
        """Test T <= K_t K_ocu N^2 R_r / N_b for single-layer R-type networks"""
        rng = np.random.default_rng(11)
        for _ in range(1000):
            layer, tech = random_layer(rng), random_tech(rng)
            config = replace(random_config(rng), ocu_type=OcuType.R)
            report = network_cost(DnnModel("one", (layer,)), config, tech)
            self.assertLessEqual(report.throughput_macs, peak_throughput(config, tech) * (1 + 1e-12))

    def test_unit_conversions_round_trip(self):
        for value in (0.0, 1.5, 3.2e-7, 8.8e11):
            np.testing.assert_allclose(pj_to_j(j_to_pj(value)), value, rtol=1e-15)
            np.testing.assert_allclose(ns_to_s(s_to_ns(value)), value, rtol=1e-15)
        self.assertEqual(pj_to_j(1e12), 1.0)


class TestNetworkCost(unittest.TestCase):

    def setUp(self):
        self.tech = default_tech()
        self.config = load_config(SHIPPED_CONFIGS / "demo_config.json")
        self.layer = make_layer("conv", C=16, D=32, H=14, W=14, Z=3, P=1)

    def test_single_layer_totals(self):
        """Test that a one-layer network reports its layer values"""
        report = network_cost(DnnModel("one", (self.layer,)), self.config, self.tech)
        row = report.layers[0]
        self.assertEqual(report.energy_pj, row.e_mem_pj + row.e_comp_pj)
        self.assertEqual(report.bottleneck_latency_ns, max(row.l_mem_ns, row.l_comp_ns))
        self.assertEqual(report.total_macs, self.layer.macs)

    def test_two_identical_layers(self):
        """Test that repeating a layer doubles energy and keeps the bottleneck and frame rate"""
        one = network_cost(DnnModel("one", (self.layer,)), self.config, self.tech)
        two = network_cost(DnnModel("two", (self.layer, self.layer)), self.config, self.tech)
        self.assertAlmostEqual(two.energy_pj, 2 * one.energy_pj)
        self.assertEqual(two.bottleneck_latency_ns, one.bottleneck_latency_ns)
        self.assertEqual(two.fps, one.fps)
        self.assertEqual(two.bottleneck_layer, 0)

    def test_pool_rows_in_breakdown(self):
        """Test one breakdown row per network row, pool rows at zero cost"""
        report = network_cost(load_benchmark("lenet5"), self.config, self.tech)
        self.assertEqual(len(report.layers), 7)
        self.assertEqual(len(report.costed_layers), 5)
        pools = [row for row in report.layers if row.kind == "pool"]
        self.assertEqual(len(pools), 2)
        for row in pools:
            self.assertFalse(row.costed)
            self.assertEqual((row.energy_pj, row.l_layer_ns, row.macs), (0.0, 0.0, 0))

    def test_derived_metrics(self):
        report = network_cost(load_benchmark("lenet5"), self.config, self.tech)
        self.assertAlmostEqual(report.compute_density, report.throughput_macs / report.area_mm2)
        self.assertAlmostEqual(report.fps, 1e9 / report.bottleneck_latency_ns)
        self.assertAlmostEqual(report.fps_per_watt * report.energy_j, 1.0)
        self.assertGreater(report.throughput_per_energy, 0)

    def test_dram_energy_optional(self):
        """Test that DRAM energy is off by default and additive when requested"""
        model = load_benchmark("lenet5")
        plain = network_cost(model, self.config, self.tech)
        with_dram = network_cost(model, self.config, self.tech, include_dram=True)
        self.assertEqual(plain.dram_energy_pj, 0.0)
        reads = sum(self.tech.e_dram_read * row.working_set.q_dram for row in with_dram.costed_layers)
        # only the final FC layer (10 outputs) writes back to DRAM
        expected = reads + self.tech.e_dram_write * 10
        self.assertAlmostEqual(with_dram.dram_energy_pj, expected)
        self.assertAlmostEqual(with_dram.energy_pj, plain.energy_pj + expected)

    def test_deterministic(self):
        model = load_benchmark("alexnet")
        self.assertEqual(network_cost(model, self.config, self.tech), network_cost(model, self.config, self.tech))


if __name__ == "__main__":
    unittest.main(verbosity=2)
