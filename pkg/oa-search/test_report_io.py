"""
Tests for report, search-result and sweep serialization
"""

import json
import os
import tempfile
import unittest

import pandas as pd

from arch_config import DIMENSIONS, SHIPPED_CONFIGS, SHIPPED_SPACES, SearchSpaceDef, load_config, load_space
from cost_predictor import network_cost
from device_lib import OcuType, default_tech
from model_ir import load_benchmark
from report_io import (
    LAYER_COLUMNS,
    SCHEMA_VERSION,
    SUMMARY_COLUMNS,
    TRAJECTORY_COLUMNS,
    ReportExporter,
    RunManifest,
    SearchResultExporter,
    SweepExporter,
    write_json,
)
from search_engine import Objective, SearchBudget, density_sweep, random_search, search, summarize_sweep


class TestReportExporter(unittest.TestCase):

    def setUp(self):
        self.report = network_cost(load_benchmark("lenet5"), load_config(SHIPPED_CONFIGS / "demo_config.json"),
                                   default_tech())
        self.temp_dir = tempfile.mkdtemp()

    def test_document_envelope(self):
        """Test schema_version, manifest and the report block"""
        manifest = RunManifest(command="predict", inputs={"network": "lenet5"}, seed=None)
        document = ReportExporter.to_document(self.report, manifest, per_layer=True)
        self.assertEqual(document["schema_version"], SCHEMA_VERSION)
        self.assertEqual(document["manifest"]["command"], "predict")
        self.assertEqual(document["report"]["totals"]["energy_pj"], self.report.energy_pj)
        self.assertEqual(len(document["report"]["layers"]), 7)
        self.assertNotIn("objective", document)

    def test_layer_rows_report_working_set_bound(self):
        """Test the costed-layer count and the per-row bound flag (None for pool rows)"""
        data = ReportExporter.to_dict(self.report, per_layer=True)
        self.assertEqual(data["totals"]["costed_layers"], 5)
        flags = [row["within_bound"] for row in data["layers"]]
        self.assertEqual(flags.count(None), 2)
        self.assertTrue(all(isinstance(flag, bool) for flag in flags if flag is not None))
        self.assertNotIn("within_bound", ReportExporter.layers_to_dataframe(self.report).columns)

    def test_layers_omitted_by_default(self):
        self.assertNotIn("layers", ReportExporter.to_dict(self.report))

    def test_infeasible_objective_written_as_null(self):
        document = ReportExporter.to_document(self.report, objective=float("inf"))
        self.assertIsNone(document["objective"])
        json.dumps(document, allow_nan=False)

    def test_json_file_round_trip(self):
        path = os.path.join(self.temp_dir, "report.json")
        write_json(ReportExporter.to_document(self.report, RunManifest(command="predict")), path)
        with open(path) as f:
            data = json.load(f)
        self.assertEqual(data["report"]["totals"]["throughput_macs"], self.report.throughput_macs)
        self.assertEqual(data["report"]["config"]["ocu_type"], "R")

    def test_csv_columns(self):
        """Test the frozen column orders of the summary and layer tables"""
        path = os.path.join(self.temp_dir, "reports.csv")
        ReportExporter.to_dataframe([self.report, self.report]).to_csv(path, index=False)
        frame = pd.read_csv(path)
        self.assertEqual(list(frame.columns), SUMMARY_COLUMNS)
        self.assertEqual(len(frame), 2)
        layers = ReportExporter.layers_to_dataframe(self.report)
        self.assertEqual(list(layers.columns), LAYER_COLUMNS)
        self.assertEqual(layers["macs"].sum(), self.report.total_macs)


class TestSearchResultExporter(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.tech = default_tech()
        cls.model = load_benchmark("lenet5")
        cls.space = load_space(SHIPPED_SPACES / "small.json")
        cls.result = search(cls.model, cls.space, cls.tech, Objective(), SearchBudget(steps=5, batch=4, seed=2))

    def test_result_document(self):
        data = SearchResultExporter.to_dict(self.result, RunManifest(command="search", seed=2))
        self.assertEqual(data["method"], "gumbel")
        self.assertEqual(data["seed"], 2)
        self.assertEqual(data["best_objective"], self.result.best_objective)
        self.assertEqual(data["objective"]["mode"], "TEA")
        self.assertEqual(list(data["logits"]), list(DIMENSIONS))
        json.dumps(data, allow_nan=False)

    def test_trajectory_columns(self):
        """Test entropy columns for the gradient search only"""
        frame = SearchResultExporter.trajectory_to_dataframe(self.result)
        self.assertEqual(list(frame.columns[:len(TRAJECTORY_COLUMNS)]), TRAJECTORY_COLUMNS)
        self.assertIn("entropy_k_t", frame.columns)
        self.assertEqual(len(frame), 5)
        sampled = random_search(self.model, self.space, self.tech, Objective(), samples=20, seed=0)
        self.assertEqual(list(SearchResultExporter.trajectory_to_dataframe(sampled).columns), TRAJECTORY_COLUMNS)

    def test_write_outputs(self):
        """Test the three output files and the saved best design"""
        out_dir = tempfile.mkdtemp()
        paths = SearchResultExporter.write(self.result, out_dir, RunManifest(command="search"))
        self.assertEqual(set(paths), {"result", "trajectory", "best_config"})
        self.assertEqual(load_config(paths["best_config"]), self.result.best_config)
        self.assertEqual(len(pd.read_csv(paths["trajectory"])), len(self.result.trajectory))

    def test_failed_result(self):
        """Test nulls and no best_config.json for a search without a feasible design"""
        lists = {"k_t": [1], "k_ocu": [1], "ocu_type": [OcuType.R], "n": [8], "q_rf": [16], "q_glb": [1024],
                 "b": [8]}
        space = SearchSpaceDef.from_lists(lists, area_cap=1e-9)
        failed = search(self.model, space, self.tech, Objective(), SearchBudget(steps=2, seed=0))
        data = SearchResultExporter.to_dict(failed)
        self.assertEqual(data["status"], "failed")
        self.assertIsNone(data["best_objective"])
        self.assertIsNone(data["best_config"])
        json.dumps(data, allow_nan=False)
        paths = SearchResultExporter.write(failed, tempfile.mkdtemp())
        self.assertNotIn("best_config", paths)


class TestSweepExporter(unittest.TestCase):

    def test_write(self):
        space = load_space(SHIPPED_SPACES / "small.json")
        frame = density_sweep(load_benchmark("lenet5"), space, default_tech(), samples=50, seed=0)
        summary = summarize_sweep(frame)
        paths = SweepExporter.write(frame, summary, tempfile.mkdtemp(), RunManifest(command="sweep", seed=0))
        self.assertEqual(len(pd.read_csv(paths["samples"])), 50)
        with open(paths["summary"]) as f:
            data = json.load(f)
        self.assertEqual(data["summary"]["samples"], 50)
        self.assertEqual(data["manifest"]["seed"], 0)


if __name__ == "__main__":
    unittest.main(verbosity=2)
