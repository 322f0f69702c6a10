#!/usr/bin/env python3
"""
Demonstration of the Optical Accelerator Cost Predictor and Design Search

Costs the shipped demo design on every benchmark, compares OCU types and
the shipped reference designs against a searched design, then searches the
shipped small space for LeNet-5 and checks the result against the exhaustive
optimum.
"""

from dataclasses import replace

from arch_config import SHIPPED_CONFIGS, SHIPPED_SPACES, load_config, load_reference_designs, load_space
from cost_predictor import network_cost
from device_lib import OcuType, default_tech
from model_ir import BENCHMARKS, count_macs, load_benchmark
from report_io import ReportExporter
from search_engine import Objective, ObjectiveMode, SearchBudget, exhaustive_search, random_search, search


def demo_prediction():
    """Cost the demo design on every shipped benchmark"""
    print("=" * 60)
    print("COST PREDICTION")
    print("=" * 60)

    tech = default_tech()
    config = load_config(SHIPPED_CONFIGS / "demo_config.json")
    reports = []
    for name in BENCHMARKS:
        model = load_benchmark(name)
        reports.append(network_cost(model, config, tech))
        print(f"  {name:10s} {model.topology():12s} {model.num_compute_layers:3d} costed layers "
              f"{count_macs(model):.3e} MACs")

    frame = ReportExporter.to_dataframe(reports)
    print(frame[["network", "energy_pj", "throughput_macs", "compute_density", "fps_per_watt"]].to_string(index=False))


def demo_ocu_types():
    """Same tiles and buffers, one row per OCU type"""
    print("\n" + "=" * 60)
    print("OCU TYPE COMPARISON (LeNet-5)")
    print("=" * 60)

    tech = default_tech()
    model = load_benchmark("lenet5")
    base = load_config(SHIPPED_CONFIGS / "demo_config.json")
    reports = [network_cost(model, replace(base, ocu_type=ocu_type), tech) for ocu_type in OcuType]
    frame = ReportExporter.to_dataframe(reports)
    print(frame[["ocu_type", "area_mm2", "energy_pj", "bottleneck_latency_ns", "throughput_per_energy"]]
          .to_string(index=False))


def demo_reference_designs():
    """Shipped published accelerators next to the best design found in the small space"""
    print("\n" + "=" * 60)
    print("REFERENCE DESIGNS VS SEARCH (VGG-16 and LeNet-5)")
    print("=" * 60)

    tech = default_tech()
    space = load_space(SHIPPED_SPACES / "small.json")
    columns = ["name", "ocu_type", "k_t", "k_ocu", "area_mm2", "compute_density", "throughput_per_energy",
               "fps_per_watt"]
    for network in ("vgg16", "lenet5"):
        model = load_benchmark(network)
        designs = load_reference_designs()
        found = search(model, space, tech, Objective(), SearchBudget(steps=100, seed=3))
        designs["searched (TEA)"] = found.best_config
        frame = ReportExporter.to_dataframe([network_cost(model, config, tech) for config in designs.values()])
        frame.insert(0, "name", list(designs))
        print(f"\n  {network}")
        print(frame[columns].to_string(index=False))


def demo_search():
    """Search the small space and compare with both baselines"""
    print("\n" + "=" * 60)
    print("DESIGN SEARCH (LeNet-5, small space)")
    print("=" * 60)

    tech = default_tech()
    model = load_benchmark("lenet5")
    space = load_space(SHIPPED_SPACES / "small.json")
    print(f"  Space size: {space.cardinality} designs")

    for mode in (ObjectiveMode.TEA, ObjectiveMode.EA):
        objective = Objective(mode=mode)
        found = search(model, space, tech, objective, SearchBudget(steps=200, seed=1))
        sampled = random_search(model, space, tech, objective, samples=found.samples, seed=1)
        oracle = exhaustive_search(model, space, tech, objective)
        print(f"\n  {mode.value} objective")
        print(f"    search:     {found.best_objective:.6g} ({found.wall_clock_s:.2f}s, "
              f"{found.evaluations} distinct designs)")
        print(f"    random:     {sampled.best_objective:.6g}")
        print(f"    exhaustive: {oracle.best_objective:.6g} ({oracle.wall_clock_s:.2f}s)")
        best = oracle.best_config
        print(f"    optimum: {best.ocu_type.value}, K_t={best.k_t}, K_ocu={best.k_ocu}, N={best.n}, "
              f"Q_rf={best.q_rf}, Q_glb={best.q_glb}, {best.mapping.loop_order.value}")


def main():
    """Run all demonstrations"""
    print("OPTICAL ACCELERATOR COST PREDICTION AND SEARCH")
    print("=" * 80)

    try:
        demo_prediction()
        demo_ocu_types()
        demo_reference_designs()
        demo_search()
        print("\n" + "=" * 80)
        print("DEMONSTRATION COMPLETED")
    except Exception as e:
        print(f"\nError during demonstration: {e}")


if __name__ == "__main__":
    main()
