"""Matrix-seriation benchmark toolkit.

Generates symmetric binary and continuous matrices with canonical visual
patterns (blocks, off-diagonal blocks, stars, bands), degrades them into
scored variations, measures pattern quality with a convolution- and
entropy-based score, and evaluates classical reordering algorithms.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .matrix import (BINARY, CONTINUOUS, DimensionError, FormatError,
                     KindError, Matrix, SeriaBenchError, binarize,
                     dissimilarity, load_rbm, permute, save_rbm, swap_pair)
from .templates import (BAND, BLOCK, OFFDIAG, STAR, PatternDescriptor,
                        Template, continuize_template, generate_template,
                        render_binary_template, robinson_fill, sample_layout)
from .variations import (VariationRecord, apply_noise, default_cluster_set_size,
                         gen_noise_antipattern, gen_noise_cluster_antipattern,
                         gen_variations, iter_variations, noise_levels_schedule,
                         swap_ladder)
from .scoring import (Kernel, MatchedRegion, ScoreReport, derive_kernels,
                      deviation_score, disorder_score, existence_score,
                      match_pattern, region_score, score_matrix)
from .metrics import MetricId, eval_metric
from .algorithms import (REGISTRY, AlgorithmSpec, arsa_order, fiedler_order,
                         heuristic_order, hierarchical_order, projection_order,
                         rcm_order, reorder)
from .harness import (BenchmarkConfig, DatasetManifest, EvaluationReport,
                      build_benchmark, evaluate_algorithms)
from .reports import emit_report

__version__ = "0.1.0"
