#!/usr/bin/env python3
"""
Optical Accelerator Search CLI
Command-line front end for the cost predictor and the design search in oa-search/

Commands:
    predict   cost one design on one network
    search    Gumbel-Softmax search (or --baseline random|exhaustive) over a space
    sweep     cost uniformly sampled designs, report threshold exceedance and Pareto size
    compare   one summary row per design file

Exit codes: 0 ok, 2 input error, 3 search failure (no feasible design).
"""

import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional

# Add the oa-search directory to the path to import the library modules
sys.path.append(str(Path(__file__).parent / "oa-search"))

from arch_config import REFERENCE_DESIGNS, SHIPPED_REFERENCES, SearchSpaceDef, load_config, load_space, validate
from cost_predictor import CostReport, network_cost
from device_lib import TechParams, load_tech
from model_ir import BENCHMARKS, DnnModel, load_benchmark, load_network
from report_io import (
    SCHEMA_VERSION,
    ReportExporter,
    RunManifest,
    SearchResultExporter,
    SweepExporter,
)
from search_engine import (
    MetricScales,
    Objective,
    SearchBudget,
    density_sweep,
    exhaustive_search,
    load_search_config,
    objective_value,
    random_search,
    resolve_seed,
    search,
    summarize_sweep,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_SEARCH_FAILED = 3
EXIT_CODES = {"success": EXIT_OK, "error": EXIT_INPUT_ERROR, "failed": EXIT_SEARCH_FAILED}

DEFAULT_BASELINE_SAMPLES = 1000
DEFAULT_SWEEP_SAMPLES = 10000


def resolve_config(name: str) -> str:
    """A config file path, or the shipped file of a reference design named like holylight"""
    if not Path(name).exists() and name in REFERENCE_DESIGNS:
        return str(SHIPPED_REFERENCES / f"{name}.json")
    return name


class SearchBackend:
    """Loads inputs once and runs the commands; every method returns a status dict"""

    def __init__(self):
        self.model: Optional[DnnModel] = None
        self.tech: Optional[TechParams] = None
        self.space: Optional[SearchSpaceDef] = None
        self.objective: Optional[Objective] = None
        self.budget: Optional[SearchBudget] = None

    def load_inputs(self, network: str, tech: Optional[str] = None, space: Optional[str] = None,
                    search_config: Optional[str] = None) -> Dict[str, Any]:
        """Load the network, technology file and the optional space and search config"""
        try:
            if not Path(network).exists() and network in BENCHMARKS:
                self.model = load_benchmark(network)
            else:
                self.model = load_network(network)
            self.tech = load_tech(tech)
            self.space = load_space(space) if space else None
            if search_config:
                self.objective, self.budget = load_search_config(search_config)
            else:
                self.objective, self.budget = Objective(), SearchBudget()
            logger.info(f"Network {self.model.name}: {self.model.topology()}, "
                        f"{self.model.num_compute_layers} costed layers")
            return {"status": "success", "network": self.model.name, "layers": len(self.model.layers),
                    "compute_layers": self.model.num_compute_layers}
        except (ValueError, OSError) as e:
            return {"status": "error", "message": str(e)}

    def _require_space(self) -> Optional[Dict[str, Any]]:
        if self.space is None:
            return {"status": "error", "message": "this command requires --space"}
        return None

    def objective_of(self, report: CostReport) -> float:
        """Objective of a report exactly as search results record it"""
        scales = MetricScales.reference(self.model, self.space, self.tech)
        return objective_value(report, self.objective, scales, self.space.area_cap)

    def predict(self, config_path: str, per_layer: bool = False, include_dram: bool = False,
                with_objective: bool = False) -> Dict[str, Any]:
        try:
            config = load_config(resolve_config(config_path))
            report = network_cost(self.model, config, self.tech, include_dram=include_dram)
        except (ValueError, OSError) as e:
            return {"status": "error", "message": str(e)}
        result = {"status": "success", "report": report, "per_layer": per_layer}
        if with_objective and self.space is not None:
            try:
                result["objective"] = self.objective_of(report)
                result["violations"] = [v.message for v in validate(config, self.space, self.tech)]
            except ValueError as e:
                return {"status": "error", "message": str(e)}
        return result

    def run_search(self, seed: Optional[int] = None, baseline: Optional[str] = None,
                   samples: Optional[int] = None) -> Dict[str, Any]:
        missing = self._require_space()
        if missing:
            return missing
        seed = resolve_seed(seed if seed is not None else self.budget.seed)
        try:
            if baseline == "exhaustive":
                result = exhaustive_search(self.model, self.space, self.tech, self.objective,
                                           workers=self.budget.workers)
            elif baseline == "random":
                result = random_search(self.model, self.space, self.tech, self.objective,
                                       samples if samples is not None else DEFAULT_BASELINE_SAMPLES,
                                       seed=seed, workers=self.budget.workers)
            else:
                result = search(self.model, self.space, self.tech, self.objective, replace(self.budget, seed=seed))
        except ValueError as e:
            return {"status": "error", "message": str(e)}
        return {"status": result.status, "result": result, "seed": seed, "message": result.diagnostics}

    def sweep(self, samples: int, thresholds: List[float], seed: Optional[int] = None) -> Dict[str, Any]:
        missing = self._require_space()
        if missing:
            return missing
        if samples < 1:
            return {"status": "error", "message": f"--samples must be >= 1, got {samples}"}
        seed = resolve_seed(seed)
        try:
            frame = density_sweep(self.model, self.space, self.tech, samples, seed=seed, workers=self.budget.workers)
            summary = summarize_sweep(frame, thresholds[0], thresholds[1])
        except ValueError as e:
            return {"status": "error", "message": str(e)}
        return {"status": "success", "frame": frame, "summary": summary, "seed": seed}

    def compare(self, config_paths: List[str], include_dram: bool = False) -> Dict[str, Any]:
        reports = []
        for path in config_paths:
            try:
                reports.append(network_cost(self.model, load_config(resolve_config(path)), self.tech,
                                            include_dram=include_dram))
            except (ValueError, OSError) as e:
                return {"status": "error", "message": str(e)}
        return {"status": "success", "reports": reports}


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
        print(f"Wrote {out}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _manifest(args, seed: Optional[int] = None) -> RunManifest:
    inputs = {
        "network": args.network,
        "config": args.config,
        "space": args.space,
        "tech": args.tech,
        "search_config": args.search_config,
    }
    return RunManifest(command=args.command, inputs={k: v for k, v in inputs.items() if v}, seed=seed)


def build_parser():
    import argparse

    parser = argparse.ArgumentParser(description="Optical DNN accelerator cost prediction and design search")
    parser.add_argument("command", choices=["predict", "search", "sweep", "compare"],
                        help="Command to execute")
    parser.add_argument("--network", "-n", required=True,
                        help="Network file, or the name of a shipped benchmark")
    parser.add_argument("--config", "-c", nargs="+",
                        help="Accelerator config file(s) or reference design names; compare accepts several")
    parser.add_argument("--space", "-s", help="Search space file")
    parser.add_argument("--tech", "-t", help="Technology file overlaying the shipped defaults")
    parser.add_argument("--search-config", help="Objective and budget file")
    parser.add_argument("--seed", type=int, help="Seed for every random choice (OS entropy when absent)")
    parser.add_argument("--out", "-o", help="Output file (predict, compare) or directory (search, sweep)")
    parser.add_argument("--format", "-f", choices=["json", "csv"], default="json")
    parser.add_argument("--per-layer", action="store_true", help="Add the per-layer breakdown")
    parser.add_argument("--include-dram", action="store_true", help="Add DRAM transfer energy to the totals")
    parser.add_argument("--baseline", choices=["random", "exhaustive"], help="Run a baseline instead of the search")
    parser.add_argument("--samples", type=int, help="Samples for the random baseline or the sweep")
    parser.add_argument("--thresholds", type=float, nargs=2, default=[0.0, 0.0],
                        metavar=("DENSITY", "TPE"),
                        help="Compute density (MAC/s/mm^2) and throughput-per-energy (MAC/s/J) thresholds")
    parser.add_argument("--verbose", "-v", action="store_true", help="Verbose output")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point"""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    backend = SearchBackend()
    load_result = backend.load_inputs(args.network, args.tech, args.space, args.search_config)
    if load_result["status"] != "success":
        print(f"Error loading inputs: {load_result['message']}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    if args.command == "predict":
        if not args.config or len(args.config) != 1:
            print("Error: predict requires exactly one --config", file=sys.stderr)
            return EXIT_INPUT_ERROR
        result = backend.predict(args.config[0], args.per_layer, args.include_dram,
                                 with_objective=bool(args.space and args.search_config))
        if result["status"] != "success":
            print(f"Error: {result['message']}", file=sys.stderr)
            return EXIT_CODES[result["status"]]
        report = result["report"]
        if args.format == "json":
            document = ReportExporter.to_document(report, _manifest(args), args.per_layer, result.get("objective"))
            if "violations" in result:
                document["violations"] = result["violations"]
            _emit(json.dumps(document, indent=2) + "\n", args.out)
        else:
            text = ReportExporter.to_dataframe([report]).to_csv(index=False)
            if args.per_layer:
                text += "\n" + ReportExporter.layers_to_dataframe(report).to_csv(index=False)
            _emit(text, args.out)

    elif args.command == "search":
        result = backend.run_search(args.seed, args.baseline, args.samples)
        if result["status"] == "error":
            print(f"Error: {result['message']}", file=sys.stderr)
            return EXIT_INPUT_ERROR
        search_result = result["result"]
        paths = SearchResultExporter.write(search_result, args.out or "search_output",
                                           _manifest(args, result["seed"]))
        if result["status"] == "failed":
            print(f"Search failed: {search_result.diagnostics}", file=sys.stderr)
            return EXIT_SEARCH_FAILED
        print(f"Best objective {search_result.best_objective:.6g} after {search_result.samples} samples "
              f"({search_result.evaluations} distinct designs, {search_result.wall_clock_s:.2f}s)")
        for name, path in paths.items():
            print(f"  - {name}: {path}")

    elif args.command == "sweep":
        result = backend.sweep(args.samples if args.samples is not None else DEFAULT_SWEEP_SAMPLES,
                               args.thresholds, args.seed)
        if result["status"] != "success":
            print(f"Error: {result['message']}", file=sys.stderr)
            return EXIT_INPUT_ERROR
        summary = result["summary"]
        SweepExporter.write(result["frame"], summary, args.out or "sweep_output", _manifest(args, result["seed"]))
        print(f"{summary.exceeding}/{summary.feasible} feasible designs exceed both thresholds "
              f"(fraction {summary.fraction:.6g}); Pareto front size {summary.pareto_size}")

    elif args.command == "compare":
        if not args.config:
            print("Error: compare requires at least one --config", file=sys.stderr)
            return EXIT_INPUT_ERROR
        result = backend.compare(args.config, args.include_dram)
        if result["status"] != "success":
            print(f"Error: {result['message']}", file=sys.stderr)
            return EXIT_INPUT_ERROR
        if args.format == "json":
            document = {
                "schema_version": SCHEMA_VERSION,
                "manifest": _manifest(args).to_dict(),
                "designs": [ReportExporter.summary_row(report) for report in result["reports"]],
            }
            _emit(json.dumps(document, indent=2) + "\n", args.out)
        else:
            _emit(ReportExporter.to_dataframe(result["reports"]).to_csv(index=False), args.out)

    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
