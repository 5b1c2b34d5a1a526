import hashlib
import json
import os

import pytest

from seriabench.algorithms import ConfigurationError
from seriabench.harness import (BenchmarkConfig, DatasetManifest,
                                EvaluationReport, build_benchmark,
                                evaluate_algorithms, template_from_sidecar)
from seriabench.matrix import load_rbm, read_sidecar, sidecar_path
from seriabench.reports import emit_report, read_csv
from seriabench.scoring import score_matrix
from seriabench.variations import swap_ladder


def tiny_config(out, **kw):
    base = dict(output_dir=str(out), sizes=(30,), ptypes=("block",),
                kinds=("binary",), templates_per_cell=2,
                variations_per_template=2, master_seed=7)
    base.update(kw)
    return BenchmarkConfig(**base)


def tree_digest(root):
    h = hashlib.sha256()
    for dirpath, dirnames, filenames in sorted(os.walk(root)):
        dirnames.sort()
        for name in sorted(filenames):
            path = os.path.join(dirpath, name)
            h.update(os.path.relpath(path, root).encode())
            h.update(open(path, "rb").read())
    return h.hexdigest()


class TestBuildBenchmark:
    def test_counts_follow_schedule(self, tmp_path):
        cfg = tiny_config(tmp_path / "b", sizes=(30, 40), ptypes=("block", "star"),
                          kinds=("binary", "continuous"), templates_per_cell=1,
                          variations_per_template=2)
        manifest = build_benchmark(cfg)
        per_size = {30: 2 * len(swap_ladder(30)), 40: 2 * len(swap_ladder(40))}
        expect = sum(per_size[s] for s in (30, 40)) * 2 * 2
        assert len(manifest.records) == expect

    def test_split_tags_inherit_from_template(self, tmp_path):
        cfg = tiny_config(tmp_path / "b", templates_per_cell=4)
        manifest = build_benchmark(cfg)
        by_template = {}
        for rec in manifest.records:
            by_template.setdefault(rec["template_id"], set()).add(rec["split"])
        assert all(len(v) == 1 for v in by_template.values())
        side_splits = {}
        for rec in manifest.records:
            side = read_sidecar(sidecar_path(manifest.resolve_path(rec["path"])))
            assert side["split"] == rec["split"]

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg1 = tiny_config(tmp_path / "a")
        cfg2 = tiny_config(tmp_path / "b")
        build_benchmark(cfg1)
        build_benchmark(cfg2)
        assert tree_digest(tmp_path / "a") == tree_digest(tmp_path / "b")

    def test_worker_counts_do_not_change_output(self, tmp_path):
        cfg1 = tiny_config(tmp_path / "w1", workers=1, templates_per_cell=3)
        cfg2 = tiny_config(tmp_path / "w2", workers=4, templates_per_cell=3)
        build_benchmark(cfg1)
        build_benchmark(cfg2)
        assert tree_digest(tmp_path / "w1") == tree_digest(tmp_path / "w2")

    def test_manifest_matches_files_on_disk(self, tmp_path):
        cfg = tiny_config(tmp_path / "b")
        manifest = build_benchmark(cfg)
        on_disk = set()
        mat_dir = tmp_path / "b" / "matrices"
        for name in os.listdir(mat_dir):
            if name.endswith(".rbm"):
                on_disk.add(os.path.join("matrices", name))
        assert on_disk == {rec["path"] for rec in manifest.records}

    def test_manifest_round_trip(self, tmp_path):
        cfg = tiny_config(tmp_path / "b")
        manifest = build_benchmark(cfg)
        loaded = DatasetManifest.load(tmp_path / "b" / "manifest.jsonl")
        assert loaded.records == manifest.records

    def test_ground_truth_matches_rescoring(self, tmp_path):
        cfg = tiny_config(tmp_path / "b")
        manifest = build_benchmark(cfg)
        rec = next(r for r in manifest.records if r["swap_count"] == 0)
        m = load_rbm(manifest.resolve_path(rec["path"]))
        side = read_sidecar(sidecar_path(manifest.resolve_path(rec["path"])))
        t = template_from_sidecar(side)
        assert score_matrix(m, t).final == pytest.approx(
            rec["ground_truth_score"], abs=1e-9)

    def test_infeasible_size_rejected(self, tmp_path):
        with pytest.raises(ConfigurationError):
            build_benchmark(tiny_config(tmp_path / "b", sizes=(12,)))

    def test_empty_selection_rejected(self, tmp_path):
        with pytest.raises(ConfigurationError):
            build_benchmark(tiny_config(tmp_path / "b", ptypes=()))


@pytest.fixture(scope="module")
def bench(tmp_path_factory):
    out = tmp_path_factory.mktemp("bench")
    cfg = tiny_config(out, templates_per_cell=2, variations_per_template=2)
    return build_benchmark(cfg)


@pytest.fixture(scope="module")
def report(tmp_path_factory):
    out = tmp_path_factory.mktemp("bench2")
    cfg = tiny_config(out)
    manifest = build_benchmark(cfg)
    return evaluate_algorithms(manifest, ["rcm", "moment"], max_matrices=6)


class TestEvaluate:
    def test_identity_on_unswapped_scores_one(self, bench):
        rec = next(r for r in bench.records if r["swap_count"] == 0)
        m = load_rbm(bench.resolve_path(rec["path"]))
        side = read_sidecar(sidecar_path(bench.resolve_path(rec["path"])))
        t = template_from_sidecar(side)
        perf = score_matrix(m, t).final / rec["ground_truth_score"]
        assert perf == pytest.approx(1.0, abs=1e-9)

    def test_report_shape(self, bench):
        report = evaluate_algorithms(bench, ["rcm", "moment"], max_matrices=10)
        assert {r["algorithm"] for r in report.rows} == {"rcm", "moment"}
        cells = {(r["algorithm"], r["ptype"], r["kind"], r["size"])
                 for r in report.rows}
        assert len(cells) == len(report.rows)
        assert len(report.detail) == 2 * 10

    def test_unknown_algorithm_fails_fast(self, bench):
        with pytest.raises(ConfigurationError):
            evaluate_algorithms(bench, ["definitely_not_real"])

    def test_empty_filter_raises(self, bench):
        with pytest.raises(ConfigurationError, match="no matrices"):
            evaluate_algorithms(bench, ["rcm"],
                                filter_fn=lambda rec: False)

    def test_worker_counts_agree(self, bench):
        a = evaluate_algorithms(bench, ["moment"], max_matrices=8, workers=1)
        b = evaluate_algorithms(bench, ["moment"], max_matrices=8, workers=4)
        assert a.to_json() == b.to_json()

    def test_swap_zero_records_excluded(self, bench):
        report = evaluate_algorithms(bench, ["moment"], max_matrices=50)
        assert all(row["swap_count"] > 0 for row in report.detail)

    def test_zero_ground_truth_counted_as_exclusion(self, bench):
        doctored = DatasetManifest(bench.root,
                                   [dict(r) for r in bench.records])
        victims = 0
        for rec in doctored.records:
            if rec["swap_count"] > 0 and victims < 3:
                rec["ground_truth_score"] = 0.0
                victims += 1
        report = evaluate_algorithms(doctored, ["moment"], max_matrices=10)
        assert report.exclusions == 3
        assert all(row["ground_truth_score"] > 0 for row in report.detail)


class TestReports:
    def test_csv_round_trip(self, report, tmp_path):
        emit_report(report, {"csv"}, str(tmp_path / "rep"))
        rows = read_csv(tmp_path / "rep.csv")
        assert rows == report.rows

    def test_svg_only_when_requested(self, report, tmp_path):
        emit_report(report, {"csv"}, str(tmp_path / "rep"))
        assert not (tmp_path / "rep.svg").exists()
        emit_report(report, {"svg"}, str(tmp_path / "rep"))
        assert (tmp_path / "rep.svg").exists()
        assert (tmp_path / "rep.svg").read_text().startswith("<svg")

    def test_json_round_trip(self, report, tmp_path):
        emit_report(report, {"json"}, str(tmp_path / "rep"))
        loaded = EvaluationReport.from_json(
            json.loads((tmp_path / "rep.json").read_text()))
        assert loaded.rows == report.rows
        assert loaded.detail == report.detail

    def test_empty_report_rejected(self, tmp_path):
        with pytest.raises(ConfigurationError):
            emit_report(EvaluationReport([], []), {"csv"}, str(tmp_path / "r"))

    def test_unknown_format_rejected(self, report, tmp_path):
        with pytest.raises(ConfigurationError):
            emit_report(report, {"pdf"}, str(tmp_path / "r"))
