"""
Report Serialization

Exports cost reports, search results, trajectories and sweep tables to plain
dicts, JSON files and pandas DataFrames / CSV files. Every JSON document carries
a schema_version and the RunManifest of the run that produced it. CSV column
orders are frozen (see the *_COLUMNS constants).

Non-finite objective values (infeasible designs) are written as null in JSON.
"""

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd

from arch_config import DIMENSIONS, config_to_dict, save_config
from cost_predictor import CostReport
from search_engine import SearchResult, SweepSummary, objective_to_dict

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
TOOL_VERSION = "0.1.0"

SUMMARY_COLUMNS = [
    "network", "ocu_type", "k_t", "k_ocu", "n", "q_rf", "q_glb", "b", "loop_order", "tile_d", "tile_c",
    "energy_pj", "dram_energy_pj", "bottleneck_latency_ns", "throughput_macs", "area_mm2",
    "compute_density", "throughput_per_energy", "fps", "fps_per_watt", "total_macs",
]
LAYER_COLUMNS = [
    "index", "name", "kind", "costed", "macs", "e_mem_pj", "e_comp_pj", "l_mem_ns", "l_comp_ns", "l_layer_ns",
]
TRAJECTORY_COLUMNS = ["step", "tau", "sampled_objective", "best_so_far", "feasible"]

BEST_CONFIG_FILE = "best_config.json"
TRAJECTORY_FILE = "trajectory.csv"
RESULT_FILE = "result.json"


@dataclass
class RunManifest:
    """What produced an output: command, input files, resolved seed and tool version"""
    command: str
    inputs: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    tool_version: str = TOOL_VERSION
    timestamp: str = field(default_factory=lambda: datetime.now().isoformat())

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _finite_or_none(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def _envelope(manifest: Optional[RunManifest]) -> Dict[str, Any]:
    return {"schema_version": SCHEMA_VERSION, "manifest": manifest.to_dict() if manifest else None}


def write_json(data: Dict[str, Any], file_path: Union[str, Path]) -> None:
    with open(file_path, "w") as file:
        json.dump(data, file, indent=2)
        file.write("\n")


class ReportExporter:
    """Export cost reports to dicts, JSON, DataFrames and CSV"""

    @staticmethod
    def summary_row(report: CostReport) -> Dict[str, Any]:
        config = report.config
        return {
            "network": report.network,
            "ocu_type": config.ocu_type.value,
            "k_t": config.k_t,
            "k_ocu": config.k_ocu,
            "n": config.n,
            "q_rf": config.q_rf,
            "q_glb": config.q_glb,
            "b": config.b,
            "loop_order": config.mapping.loop_order.value,
            "tile_d": config.mapping.tile_d,
            "tile_c": config.mapping.tile_c,
            "energy_pj": report.energy_pj,
            "dram_energy_pj": report.dram_energy_pj,
            "bottleneck_latency_ns": report.bottleneck_latency_ns,
            "throughput_macs": report.throughput_macs,
            "area_mm2": report.area_mm2,
            "compute_density": report.compute_density,
            "throughput_per_energy": report.throughput_per_energy,
            "fps": report.fps,
            "fps_per_watt": report.fps_per_watt,
            "total_macs": report.total_macs,
        }

    @staticmethod
    def layer_rows(report: CostReport) -> List[Dict[str, Any]]:
        return [
            {
                "index": layer.index,
                "name": layer.name,
                "kind": layer.kind,
                "costed": layer.costed,
                "macs": layer.macs,
                "e_mem_pj": layer.e_mem_pj,
                "e_comp_pj": layer.e_comp_pj,
                "l_mem_ns": layer.l_mem_ns,
                "l_comp_ns": layer.l_comp_ns,
                "l_layer_ns": layer.l_layer_ns,
                "within_bound": layer.working_set.within_bound if layer.working_set else None,
            }
            for layer in report.layers
        ]

    @staticmethod
    def to_dict(report: CostReport, per_layer: bool = False) -> Dict[str, Any]:
        data = {
            "network": report.network,
            "config": config_to_dict(report.config),
            "totals": {
                "energy_pj": report.energy_pj,
                "dram_energy_pj": report.dram_energy_pj,
                "include_dram": report.include_dram,
                "bottleneck_latency_ns": report.bottleneck_latency_ns,
                "bottleneck_layer": report.bottleneck_layer,
                "throughput_macs": report.throughput_macs,
                "area_mm2": report.area_mm2,
                "total_macs": report.total_macs,
                "costed_layers": len(report.costed_layers),
            },
            "derived": {
                "compute_density": report.compute_density,
                "throughput_per_energy": report.throughput_per_energy,
                "fps": report.fps,
                "power_w": report.power_w,
                "fps_per_watt": report.fps_per_watt,
            },
        }
        if per_layer:
            data["layers"] = ReportExporter.layer_rows(report)
        return data

    @staticmethod
    def to_document(report: CostReport, manifest: Optional[RunManifest] = None, per_layer: bool = False,
                    objective: Optional[float] = None) -> Dict[str, Any]:
        document = {**_envelope(manifest), "report": ReportExporter.to_dict(report, per_layer)}
        if objective is not None:
            document["objective"] = _finite_or_none(objective)
        return document

    @staticmethod
    def to_dataframe(reports: List[CostReport]) -> pd.DataFrame:
        """One summary row per report, SUMMARY_COLUMNS order"""
        return pd.DataFrame([ReportExporter.summary_row(r) for r in reports], columns=SUMMARY_COLUMNS)

    @staticmethod
    def layers_to_dataframe(report: CostReport) -> pd.DataFrame:
        return pd.DataFrame(ReportExporter.layer_rows(report), columns=LAYER_COLUMNS)


class SearchResultExporter:
    """Export search results: result document, trajectory table and best-design config"""

    @staticmethod
    def to_dict(result: SearchResult, manifest: Optional[RunManifest] = None) -> Dict[str, Any]:
        data = {
            **_envelope(manifest),
            "method": result.method,
            "status": result.status,
            "diagnostics": result.diagnostics,
            "network": result.network,
            "space": result.space,
            "seed": result.seed,
            "objective": objective_to_dict(result.objective),
            "scales": asdict(result.scales),
            "best_objective": _finite_or_none(result.best_objective),
            "best_config": config_to_dict(result.best_config) if result.best_config else None,
            "best_report": ReportExporter.summary_row(result.best_report) if result.best_report else None,
            "final_objective": _finite_or_none(result.final_objective),
            "final_config": config_to_dict(result.final_config) if result.final_config else None,
            "samples": result.samples,
            "evaluations": result.evaluations,
            "skipped_steps": result.skipped_steps,
            "wall_clock_s": result.wall_clock_s,
        }
        if result.logits is not None:
            data["logits"] = {d: logits.tolist() for d, logits in zip(DIMENSIONS, result.logits)}
        return data

    @staticmethod
    def trajectory_to_dataframe(result: SearchResult) -> pd.DataFrame:
        entropy_columns = [f"entropy_{d}" for d in DIMENSIONS] if result.method == "gumbel" else []
        rows = []
        for point in result.trajectory:
            row = {
                "step": point.step,
                "tau": point.tau,
                "sampled_objective": point.sampled_objective,
                "best_so_far": point.best_so_far,
                "feasible": point.feasible,
            }
            row.update({f"entropy_{d}": value for d, value in point.entropy.items()})
            rows.append(row)
        return pd.DataFrame(rows, columns=TRAJECTORY_COLUMNS + entropy_columns)

    @staticmethod
    def write(result: SearchResult, out_dir: Union[str, Path], manifest: Optional[RunManifest] = None) -> Dict[str, str]:
        """Write result.json, trajectory.csv and (when found) best_config.json; returns the paths"""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = {"result": str(out_dir / RESULT_FILE), "trajectory": str(out_dir / TRAJECTORY_FILE)}

        write_json(SearchResultExporter.to_dict(result, manifest), paths["result"])
        SearchResultExporter.trajectory_to_dataframe(result).to_csv(paths["trajectory"], index=False)
        if result.best_config is not None:
            paths["best_config"] = str(out_dir / BEST_CONFIG_FILE)
            save_config(result.best_config, paths["best_config"])
        logger.info(f"Wrote search outputs to {out_dir}")
        return paths


class SweepExporter:

    @staticmethod
    def summary_to_dict(summary: SweepSummary, manifest: Optional[RunManifest] = None) -> Dict[str, Any]:
        return {**_envelope(manifest), "summary": asdict(summary)}

    @staticmethod
    def write(frame: pd.DataFrame, summary: SweepSummary, out_dir: Union[str, Path],
              manifest: Optional[RunManifest] = None) -> Dict[str, str]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = {"samples": str(out_dir / "sweep.csv"), "summary": str(out_dir / "sweep_summary.json")}
        frame.to_csv(paths["samples"], index=False)
        write_json(SweepExporter.summary_to_dict(summary, manifest), paths["summary"])
        return paths
