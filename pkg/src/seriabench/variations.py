"""Degeneration of templates into scored variations.

Each template spawns a set of variations: two symmetric anti-pattern masks
(uniform noise and noise clusters) are applied at independently chosen
levels, then growing numbers of random row/column swaps scramble the
result.  The unswapped matrix of every noise draw carries the ground-truth
quality score for its swapped siblings.
"""

import math
from dataclasses import dataclass

import numpy as np

from .matrix import BINARY, DimensionError, Matrix, permute
from .templates import GenerationError

MAX_NOISE_LEVEL = 16


@dataclass(frozen=True)
class VariationRecord:
    matrix: Matrix
    template_id: str
    noise_level: int
    cluster_noise_level: int
    swap_count: int
    seed: int
    ground_truth_score: float

    def provenance(self):
        return {
            "template_id": self.template_id,
            "noise_level": self.noise_level,
            "cluster_noise_level": self.cluster_noise_level,
            "swap_count": self.swap_count,
            "seed": self.seed,
            "ground_truth_score": self.ground_truth_score,
        }


def noise_levels_schedule():
    """The admissible noise percentages: 0..16 inclusive."""
    return list(range(MAX_NOISE_LEVEL + 1))


def _balanced_levels(count, rng):
    """``count`` levels covering the schedule as evenly as possible.

    Full passes over the 17 levels are topped up with a without-replacement
    draw, then shuffled.  Marginally each draw is uniform, but a batch stays
    within a fraction of a percent of the uniform share.
    """
    levels = noise_levels_schedule()
    reps, extra = divmod(count, len(levels))
    seq = np.array(levels * reps + list(rng.choice(levels, extra, replace=False)),
                   dtype=np.int64)
    rng.shuffle(seq)
    return seq


def gen_noise_antipattern(n, level, rng):
    """Symmetric 0/1 mask covering about level% of the matrix.

    Upper-triangle cells (diagonal included) are drawn without replacement
    and mirrored until the covered fraction reaches level/100; the final
    count lands within one mirrored pair of the target.
    """
    if not 0 <= level <= MAX_NOISE_LEVEL:
        raise GenerationError(f"noise level {level} outside [0, {MAX_NOISE_LEVEL}]")
    mask = np.zeros((n, n), dtype=np.uint8)
    target = level * n * n / 100.0
    if target <= 0:
        return mask
    iu, ju = np.triu_indices(n)
    order = rng.permutation(iu.shape[0])
    weights = np.where(iu[order] == ju[order], 1, 2)
    covered = np.cumsum(weights)
    take = int(np.searchsorted(covered, target)) + 1  # stop once >= target
    i, j = iu[order[:take]], ju[order[:take]]
    mask[i, j] = 1
    mask[j, i] = 1
    return mask


def gen_noise_cluster_antipattern(n, level, set_size, rng):
    """Symmetric mask of artificial row clusters.

    ``set_size`` noise vectors of dimension n receive floor(level*n/100)
    ones each; every row copies one vector chosen uniformly, and the mask is
    OR-ed with its transpose so rows sharing a vector stay similar but not
    identical.
    """
    if set_size < 1:
        raise GenerationError("set size must be at least 1")
    if not 0 <= level <= MAX_NOISE_LEVEL:
        raise GenerationError(f"noise level {level} outside [0, {MAX_NOISE_LEVEL}]")
    ones_per_vector = int(level * n // 100)
    mask = np.zeros((n, n), dtype=np.uint8)
    if ones_per_vector == 0:
        return mask
    vectors = np.zeros((set_size, n), dtype=np.uint8)
    for v in range(set_size):
        vectors[v, rng.choice(n, ones_per_vector, replace=False)] = 1
    choice = rng.integers(0, set_size, n)
    mask = vectors[choice]
    return mask | mask.T


def default_cluster_set_size(t):
    """Mean of (row extent + column extent)/2 across the template's patterns."""
    if not t.patterns:
        raise GenerationError("template has no patterns")
    mean = sum((d.row_extent + d.col_extent) / 2.0 for d in t.patterns) / len(t.patterns)
    return max(1, int(math.floor(mean + 0.5)))


def apply_noise(m, mask, rng):
    """Apply a symmetric anti-pattern mask to a matrix.

    Binary matrices have masked entries negated; continuous ones have them
    replaced by uniform draws resampled until they differ from the original.
    Mirrored cells receive the same value.
    """
    mask = np.asarray(mask, dtype=np.uint8)
    if mask.shape != (m.n, m.n):
        raise DimensionError(f"mask shape {mask.shape} does not match n={m.n}")
    if not (mask == mask.T).all():
        raise DimensionError("anti-pattern mask must be symmetric")
    if not mask.any():
        return m
    a = m.entries.copy()
    if m.kind == BINARY:
        flip = mask != 0
        a[flip] = 1.0 - a[flip]
        return Matrix(a, BINARY, mirror=False)
    iu, ju = np.where(np.triu(mask) != 0)
    vals = rng.random(iu.shape[0]).astype(np.float32)
    stuck = vals == a[iu, ju]
    while stuck.any():
        vals[stuck] = rng.random(int(stuck.sum())).astype(np.float32)
        stuck = vals == a[iu, ju]
    a[iu, ju] = vals
    a[ju, iu] = vals
    return Matrix(a, m.kind, mirror=False)


def swap_ladder(n, log_base=math.e):
    """Swap counts [0, 1, 2, 4, ...] ending at the power of two nearest
    to n*log(n)/2 (ties to the larger power)."""
    if n < 2:
        raise DimensionError("swap ladder needs n >= 2")
    bound = 0.5 * n * math.log(n, log_base)
    k = 0
    while True:
        here = abs(2 ** k - bound)
        there = abs(2 ** (k + 1) - bound)
        if there <= here:
            k += 1
        else:
            break
    return [0] + [2 ** i for i in range(k + 1)]


def draw_swaps(n, count, rng):
    """Order array after ``count`` random transpositions of the identity."""
    order = np.arange(n)
    for _ in range(count):
        i = int(rng.integers(n))
        j = int(rng.integers(n - 1))
        if j >= i:
            j += 1
        order[i], order[j] = order[j], order[i]
    return order


def make_variation(t, noise_level, cluster_level, rng, set_size=None):
    """One noisy (unswapped) degeneration of a template."""
    if set_size is None:
        set_size = default_cluster_set_size(t)
    n = t.matrix.n
    noisy = apply_noise(t.matrix, gen_noise_antipattern(n, noise_level, rng), rng)
    cluster_mask = gen_noise_cluster_antipattern(n, cluster_level, set_size, rng)
    return apply_noise(noisy, cluster_mask, rng)


def iter_variations(t, rng, variations_per_template=70, score_fn=None, seed=0):
    """Yield VariationRecords for a template.

    Every draw picks one level per anti-pattern type, applies noise then
    cluster noise, scores the result as the ground truth, and emits one
    record per swap-ladder entry.  ``score_fn(matrix, template) -> float``
    defaults to the pattern quality score.
    """
    if score_fn is None:
        from .scoring import score_matrix
        score_fn = lambda m, tpl: score_matrix(m, tpl).final  # noqa: E731
    n = t.matrix.n
    ladder = swap_ladder(n)
    set_size = default_cluster_set_size(t)
    noise_seq = _balanced_levels(variations_per_template, rng)
    cluster_seq = _balanced_levels(variations_per_template, rng)
    for draw in range(variations_per_template):
        level = int(noise_seq[draw])
        cluster_level = int(cluster_seq[draw])
        noisy = make_variation(t, level, cluster_level, rng, set_size=set_size)
        truth = float(score_fn(noisy, t))
        for swaps in ladder:
            mat = noisy if swaps == 0 else permute(noisy, draw_swaps(n, swaps, rng))
            yield VariationRecord(mat, t.template_id, level, cluster_level,
                                  swaps, seed, truth)


def gen_variations(t, rng, variations_per_template=70, score_fn=None, seed=0):
    """All variations of a template as a list; see :func:`iter_variations`."""
    return list(iter_variations(t, rng, variations_per_template, score_fn, seed))
