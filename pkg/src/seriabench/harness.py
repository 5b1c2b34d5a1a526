"""Benchmark construction and algorithm evaluation.

``build_benchmark`` renders every (size, pattern, kind) cell into templates
plus their variation sets, writes .rbm files with JSON sidecars, and emits a
JSON-Lines manifest.  All randomness is derived from the master seed through
a stable hash of each item's key, so the output is byte-identical across
reruns and worker counts.  ``evaluate_algorithms`` replays manifest entries
through reordering algorithms and reports performance ratios against the
unswapped ground truth.
"""

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .algorithms import ConfigurationError, resolve, reorder
from .matrix import (BINARY, CONTINUOUS, Matrix, load_rbm, permute,
                     read_sidecar, save_rbm, sidecar_path, write_sidecar)
from .scoring import score_matrix
from .templates import (PATTERN_TYPES, PatternDescriptor, Template,
                        generate_template, render_binary_template)
from .variations import iter_variations, swap_ladder


def stable_seed(*parts):
    """64-bit seed derived from a stable hash of the parts."""
    blob = "\x1f".join(str(p) for p in parts).encode()
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "little")


def _unit_hash(*parts):
    return stable_seed(*parts) / 2.0 ** 64


@dataclass(frozen=True)
class BenchmarkConfig:
    output_dir: str
    sizes: tuple = (100, 200)
    ptypes: tuple = PATTERN_TYPES
    kinds: tuple = (BINARY, CONTINUOUS)
    templates_per_cell: int = 10
    variations_per_template: int = 70
    master_seed: int = 0
    split_ratio: float = 0.8
    band_min_value: float = 0.0
    workers: int = 1

    def validate(self):
        if not self.sizes or not self.ptypes or not self.kinds:
            raise ConfigurationError("sizes, ptypes, and kinds must be nonempty")
        for s in self.sizes:
            if s < 20:
                raise ConfigurationError(
                    f"size {s} is too small to hold the maximum pattern count")
        for p in self.ptypes:
            if p not in PATTERN_TYPES:
                raise ConfigurationError(f"unknown pattern type {p!r}")
        for k in self.kinds:
            if k not in (BINARY, CONTINUOUS):
                raise ConfigurationError(f"unknown matrix kind {k!r}")
        if not 0.0 < self.split_ratio < 1.0:
            raise ConfigurationError("split ratio must lie in (0, 1)")
        if self.templates_per_cell < 1 or self.variations_per_template < 1:
            raise ConfigurationError("template and variation counts must be positive")


@dataclass
class DatasetManifest:
    root: str
    records: list = field(default_factory=list)

    def save(self, path=None):
        path = path or os.path.join(self.root, "manifest.jsonl")
        with open(path, "w", encoding="utf-8") as fh:
            for rec in self.records:
                fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")))
                fh.write("\n")
        return path

    @classmethod
    def load(cls, path):
        root = os.path.dirname(os.path.abspath(path))
        records = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
        return cls(root, records)

    def resolve_path(self, rel):
        return os.path.join(self.root, rel)


def template_id_for(ptype, kind, size, index):
    return f"{ptype}-{kind}-n{size}-{index:03d}"


def template_from_sidecar(meta):
    """Reference template rebuilt from sidecar metadata (for scoring)."""
    patterns = [PatternDescriptor.from_json(p) for p in meta["patterns"]]
    t = render_binary_template(patterns, meta["n"], meta["template_id"],
                               meta.get("seed", 0))
    if meta["kind"] == CONTINUOUS:
        cont = Matrix(t.matrix.entries, CONTINUOUS, mirror=False)
        t = Template(cont, t.patterns, t.template_id, t.seed)
    return t


def _build_one_template(cfg_tuple):
    (out_dir, master_seed, size, ptype, kind, index, variations,
     split_ratio, band_min_value) = cfg_tuple
    tid = template_id_for(ptype, kind, size, index)
    tseed = stable_seed(master_seed, "template", tid)
    t = generate_template(ptype, kind, size, tseed, template_id=tid,
                          band_min_value=band_min_value)
    split = "train" if _unit_hash(master_seed, "split", tid) < split_ratio else "test"
    tmpl_rel = os.path.join("templates", f"{tid}.rbm")
    tmpl_path = os.path.join(out_dir, tmpl_rel)
    save_rbm(t.matrix, tmpl_path)
    base_meta = {
        "template_id": tid,
        "ptype": ptype,
        "kind": kind,
        "n": size,
        "seed": tseed,
        "split": split,
        "patterns": [p.to_json() for p in t.patterns],
    }
    write_sidecar(sidecar_path(tmpl_path), base_meta)
    vseed = stable_seed(master_seed, "variations", tid)
    rng = np.random.default_rng(vseed)
    ladder = swap_ladder(size)
    records = []
    for seq, rec in enumerate(iter_variations(
            t, rng, variations_per_template=variations, seed=vseed)):
        draw = seq // len(ladder)
        rel = os.path.join("matrices", f"{tid}-d{draw:03d}-s{rec.swap_count:05d}.rbm")
        path = os.path.join(out_dir, rel)
        save_rbm(rec.matrix, path)
        meta = dict(base_meta)
        meta.update(rec.provenance())
        meta["template_path"] = tmpl_rel
        write_sidecar(sidecar_path(path), meta)
        records.append({
            "path": rel,
            "template_path": tmpl_rel,
            "template_id": tid,
            "split": split,
            "ptype": ptype,
            "kind": kind,
            "size": size,
            "noise_level": rec.noise_level,
            "cluster_noise_level": rec.cluster_noise_level,
            "swap_count": rec.swap_count,
            "seed": vseed,
            "ground_truth_score": rec.ground_truth_score,
        })
    return records


def build_benchmark(cfg):
    """Generate the configured benchmark and return its manifest."""
    cfg.validate()
    out = cfg.output_dir
    os.makedirs(os.path.join(out, "templates"), exist_ok=True)
    os.makedirs(os.path.join(out, "matrices"), exist_ok=True)
    jobs = [
        (out, cfg.master_seed, size, ptype, kind, index,
         cfg.variations_per_template, cfg.split_ratio, cfg.band_min_value)
        for size in sorted(cfg.sizes)
        for ptype in sorted(cfg.ptypes)
        for kind in sorted(cfg.kinds)
        for index in range(cfg.templates_per_cell)
    ]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_build_one_template, jobs))
    else:
        chunks = [_build_one_template(job) for job in jobs]
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=lambda r: r["path"])
    manifest = DatasetManifest(out, records)
    manifest.save()
    return manifest


@dataclass
class EvaluationReport:
    rows: list
    detail: list
    exclusions: int = 0

    def to_json(self):
        return {"rows": self.rows, "detail": self.detail,
                "exclusions": self.exclusions}

    @classmethod
    def from_json(cls, d):
        return cls(d["rows"], d["detail"], d.get("exclusions", 0))


def _evaluate_one(args):
    manifest_root, rec, algo_names, eval_seed = args
    m = load_rbm(os.path.join(manifest_root, rec["path"]))
    side = read_sidecar(sidecar_path(os.path.join(manifest_root, rec["path"])))
    template = template_from_sidecar(side)
    out = []
    for name in algo_names:
        seed = stable_seed(eval_seed, name, rec["path"])
        perm = reorder(m, name, seed=seed)
        score = score_matrix(permute(m, perm), template).final
        perf = score / rec["ground_truth_score"]
        out.append({
            "path": rec["path"],
            "algorithm": name if isinstance(name, str) else str(name),
            "ptype": rec["ptype"],
            "kind": rec["kind"],
            "size": rec["size"],
            "swap_count": rec["swap_count"],
            "noise_level": rec["noise_level"],
            "cluster_noise_level": rec["cluster_noise_level"],
            "score": score,
            "ground_truth_score": rec["ground_truth_score"],
            "performance": perf,
        })
    return out


def evaluate_algorithms(manifest, algos, split=None, filter_fn=None,
                        workers=1, eval_seed=0, max_matrices=None):
    """Run algorithms over manifest entries with swaps and report ratios.

    Matrices whose ground-truth score is zero are excluded and tallied.
    ``filter_fn`` receives each manifest record; ``max_matrices`` caps the
    evaluation size after filtering (deterministically, in manifest order).
    """
    for name in algos:
        resolve(name)  # fail fast on unknown algorithms
    selected = []
    exclusions = 0
    for rec in manifest.records:
        if rec["swap_count"] <= 0:
            continue
        if split is not None and rec["split"] != split:
            continue
        if filter_fn is not None and not filter_fn(rec):
            continue
        if rec["ground_truth_score"] <= 0.0:
            exclusions += 1
            continue
        selected.append(rec)
    if not selected:
        raise ConfigurationError(
            "no matrices matched the evaluation filter; relax the split or "
            "filter, or generate a benchmark with swapped variations")
    if max_matrices is not None:
        selected = selected[:max_matrices]
    jobs = [(manifest.root, rec, list(algos), eval_seed) for rec in selected]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_evaluate_one, jobs))
    else:
        chunks = [_evaluate_one(job) for job in jobs]
    detail = [row for chunk in chunks for row in chunk]
    detail.sort(key=lambda r: (r["algorithm"], r["path"]))
    groups = {}
    for row in detail:
        key = (row["algorithm"], row["ptype"], row["kind"], row["size"])
        groups.setdefault(key, []).append(row["performance"])
    rows = [
        {"algorithm": k[0], "ptype": k[1], "kind": k[2], "size": k[3],
         "mean_performance": float(np.mean(v)), "count": len(v)}
        for k, v in sorted(groups.items())
    ]
    return EvaluationReport(rows, detail, exclusions)
