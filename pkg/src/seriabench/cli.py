"""Command-line interface.

Subcommands: generate, score, reorder, evaluate, report.
Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

import argparse
import json
import os
import sys

from . import _kernels
from .algorithms import REGISTRY, ConfigurationError, reorder
from .harness import (BenchmarkConfig, DatasetManifest, EvaluationReport,
                      build_benchmark, evaluate_algorithms,
                      template_from_sidecar)
from .matrix import (SeriaBenchError, dissimilarity, load_rbm, permute,
                     read_sidecar, save_rbm, sidecar_path, write_sidecar)
from .metrics import MetricId, eval_metric
from .reports import emit_report, write_json
from .scoring import score_matrix
from .templates import PATTERN_TYPES

METRIC_ALIASES = {
    "me": (MetricId.ME,),
    "la": (MetricId.LA,),
    "moran": (MetricId.MORAN_I,),
    "ar": (MetricId.AR_EVENTS, MetricId.AR_DEVIATION),
    "ls": (MetricId.LINEAR_SERIATION,),
    "bar": (MetricId.BAR,),
}


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _csv_list(text):
    return [part.strip() for part in text.split(",") if part.strip()]


def _cmd_generate(args):
    cfg = BenchmarkConfig(
        output_dir=args.out,
        sizes=tuple(int(s) for s in _csv_list(args.sizes)),
        ptypes=tuple(_csv_list(args.patterns)),
        kinds=tuple(_csv_list(args.kinds)),
        templates_per_cell=args.templates_per_cell,
        variations_per_template=args.variations,
        master_seed=args.seed,
        split_ratio=args.split_ratio,
        workers=args.workers,
    )
    manifest = build_benchmark(cfg)
    print(f"wrote {len(manifest.records)} matrices under {args.out}")
    return 0


def _load_template_sidecar(args):
    side_path = args.template or sidecar_path(args.matrix)
    if not os.path.exists(side_path):
        return None
    meta = read_sidecar(side_path)
    if "patterns" not in meta:
        return None
    return meta


def _cmd_score(args):
    m = load_rbm(args.matrix)
    wanted = _csv_list(args.metric) if args.metric else ["conv"]
    unknown = [w for w in wanted if w != "conv" and w not in METRIC_ALIASES]
    if unknown:
        raise UsageError(f"unknown metrics: {unknown}")
    out = {"file": args.matrix, "n": m.n, "kind": m.kind}
    if "conv" in wanted:
        meta = _load_template_sidecar(args)
        if meta is None:
            raise ConfigurationError(
                "the pattern quality score needs the template sidecar; pass "
                "--template or keep the .json next to the matrix")
        report = score_matrix(m, template_from_sidecar(meta))
        out.update(report.to_json())
    names = [w for w in wanted if w != "conv"]
    if names:
        d = None
        vals = {}
        for name in names:
            for metric in METRIC_ALIASES[name]:
                if metric in (MetricId.ME, MetricId.LA, MetricId.MORAN_I):
                    vals[metric.value] = eval_metric(metric, m)
                else:
                    if d is None:
                        d = dissimilarity(m)
                    vals[metric.value] = eval_metric(metric, d)
        out["metrics"] = vals
    json.dump(out, sys.stdout, indent=1, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def _cmd_reorder(args):
    m = load_rbm(args.matrix)
    perm = reorder(m, args.algo, seed=args.seed)
    save_rbm(permute(m, perm), args.out)
    meta = {"source": args.matrix, "algo": args.algo, "seed": args.seed,
            "permutation": [int(i) for i in perm]}
    write_sidecar(sidecar_path(args.out), meta)
    print(f"wrote {args.out}")
    return 0


def _cmd_evaluate(args):
    manifest = DatasetManifest.load(args.manifest)
    algos = _csv_list(args.algos)
    report = evaluate_algorithms(
        manifest, algos, split=args.split, workers=args.workers,
        eval_seed=args.seed, max_matrices=args.max_matrices)
    out = args.out if args.out.endswith(".json") else args.out + ".json"
    write_json(report, out)
    print(f"wrote {out} ({len(report.detail)} evaluations, "
          f"{report.exclusions} exclusions)")
    return 0


def _cmd_report(args):
    with open(args.report, encoding="utf-8") as fh:
        report = EvaluationReport.from_json(json.load(fh))
    base = args.out or (args.report[:-5] if args.report.endswith(".json")
                        else args.report)
    written = emit_report(report, set(_csv_list(args.formats)), base)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser():
    parser = Parser(prog="seriabench",
                    description="Matrix-seriation benchmark toolkit "
                                f"(kernel backend: {_kernels.BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="build a benchmark dataset")
    g.add_argument("--sizes", default="100,200")
    g.add_argument("--patterns", default=",".join(PATTERN_TYPES))
    g.add_argument("--kinds", default="binary,continuous")
    g.add_argument("--templates-per-cell", type=int, default=10)
    g.add_argument("--variations", type=int, default=70)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--split-ratio", type=float, default=0.8)
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_generate)

    s = sub.add_parser("score", help="score one matrix file")
    s.add_argument("matrix")
    s.add_argument("--template", help="template sidecar JSON "
                                      "(default: sidecar next to the matrix)")
    s.add_argument("--metric", help="comma list: me,la,moran,ar,bar,ls,conv")
    s.set_defaults(func=_cmd_score)

    r = sub.add_parser("reorder", help="reorder one matrix file")
    r.add_argument("matrix")
    r.add_argument("--algo", required=True, choices=sorted(REGISTRY))
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", required=True)
    r.set_defaults(func=_cmd_reorder)

    e = sub.add_parser("evaluate", help="evaluate algorithms on a benchmark")
    e.add_argument("--manifest", required=True)
    e.add_argument("--algos", required=True)
    e.add_argument("--split", choices=("train", "test"))
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--max-matrices", type=int)
    e.add_argument("--out", required=True)
    e.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("report", help="emit csv/json/svg from a report")
    p.add_argument("report")
    p.add_argument("--formats", default="csv,json")
    p.add_argument("--out", help="output basename (default: report stem)")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args) or 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (SeriaBenchError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
