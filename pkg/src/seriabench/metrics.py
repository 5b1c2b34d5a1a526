"""Baseline seriation quality metrics.

ME, LA, and Moran's I read an ordered matrix directly; the anti-Robinson
metrics, the linear seriation sum, and BAR read an ordered dissimilarity
matrix.  ``eval_metric`` is the registry entry point used by the CLI.
"""

import math
from enum import Enum

import numpy as np

from . import _kernels
from .matrix import Matrix, SeriaBenchError

_impl = _kernels.impl


class MetricId(Enum):
    ME = "me"
    LA = "la"
    MORAN_I = "moran"
    AR_EVENTS = "ar_events"
    AR_DEVIATION = "ar_deviation"
    LINEAR_SERIATION = "ls"
    BAR = "bar"


MATRIX_METRICS = {MetricId.ME, MetricId.LA, MetricId.MORAN_I}
DISSIMILARITY_METRICS = {MetricId.AR_EVENTS, MetricId.AR_DEVIATION,
                         MetricId.LINEAR_SERIATION, MetricId.BAR}

# Direction used when reports normalize everything to higher-is-better.
HIGHER_IS_BETTER = {
    MetricId.ME: True,
    MetricId.MORAN_I: True,
    MetricId.LA: False,
    MetricId.AR_EVENTS: False,
    MetricId.AR_DEVIATION: False,
    MetricId.LINEAR_SERIATION: True,
    MetricId.BAR: False,
}


class MetricContractError(SeriaBenchError):
    pass


def measure_of_effectiveness(m):
    """Half the sum of entry * (4-neighbor sum); out-of-range neighbors are 0."""
    a = m.entries.astype(np.float64)
    acc = np.zeros_like(a)
    acc[:, 1:] += a[:, :-1]
    acc[:, :-1] += a[:, 1:]
    acc[1:, :] += a[:-1, :]
    acc[:-1, :] += a[1:, :]
    return float((a * acc).sum() / 2.0)


def linear_arrangement(m):
    """Sum of |i - j| over the edges (nonzero upper-triangle entries)."""
    i, j = np.nonzero(np.triu(m.entries, k=1))
    return float((j - i).sum())


def morans_i(m):
    """Spatial autocorrelation of the binarized entries on the matrix lattice.

    Rook adjacency; the density of ones sets the weights of the 1-1, 0-0,
    and 0-1 adjacency classes.  Degenerate (constant) matrices score 0.
    """
    x = (m.entries > 0).astype(np.float64)
    n = x.shape[0]
    z = x - x.mean()
    denom = float((z * z).sum())
    if denom == 0.0 or n < 2:
        return 0.0
    cross = float((z[:, :-1] * z[:, 1:]).sum() + (z[:-1, :] * z[1:, :]).sum())
    w_total = 4.0 * n * (n - 1)
    return (x.size / w_total) * (2.0 * cross) / denom


def _as_dissimilarity(d):
    a = np.ascontiguousarray(d, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise MetricContractError(f"expected a square dissimilarity array, got {a.shape}")
    return a


def anti_robinson_events(d):
    """Triples i<k<j where an inner dissimilarity exceeds the outer one."""
    events, _ = _impl.ar_metrics(_as_dissimilarity(d))
    return float(events)


def anti_robinson_deviation(d):
    """Violating comparisons weighted by their absolute differences."""
    _, deviation = _impl.ar_metrics(_as_dissimilarity(d))
    return float(deviation)


def linear_seriation(d):
    """Sum of d[i, j] * |i - j|; larger when big dissimilarities sit far
    from the diagonal, so higher is better."""
    a = _as_dissimilarity(d)
    n = a.shape[0]
    idx = np.arange(n)
    dist = np.abs(idx[:, None] - idx[None, :])
    return float((a * dist).sum() / 2.0)


def banded_anti_robinson(d, band=None):
    """Sum of (b - |i - j|) * d[i, j] over the band |i - j| <= b."""
    a = _as_dissimilarity(d)
    n = a.shape[0]
    if band is None:
        band = max(1, math.ceil(n / 5))
    idx = np.arange(n)
    dist = np.abs(idx[:, None] - idx[None, :])
    w = np.where(dist <= band, band - dist, 0)
    return float((a * w).sum())


def bandwidth(m):
    """Max |i - j| over nonzero off-diagonal entries (0 for empty graphs)."""
    i, j = np.nonzero(np.triu(m.entries, k=1))
    return int((j - i).max()) if i.size else 0


def eval_metric(metric, data, band=None):
    """Evaluate one metric on a Matrix or a dissimilarity array.

    Matrix metrics (ME, LA, Moran's I) require a :class:`Matrix`; the
    dissimilarity metrics require a square float array.
    """
    metric = MetricId(metric)
    if metric in MATRIX_METRICS:
        if not isinstance(data, Matrix):
            raise MetricContractError(f"{metric.value} consumes a Matrix")
        if metric is MetricId.ME:
            return measure_of_effectiveness(data)
        if metric is MetricId.LA:
            return linear_arrangement(data)
        return morans_i(data)
    if isinstance(data, Matrix):
        raise MetricContractError(
            f"{metric.value} consumes a dissimilarity array, not a Matrix")
    if metric is MetricId.AR_EVENTS:
        return anti_robinson_events(data)
    if metric is MetricId.AR_DEVIATION:
        return anti_robinson_deviation(data)
    if metric is MetricId.LINEAR_SERIATION:
        return linear_seriation(data)
    return banded_anti_robinson(data, band=band)


def normalized(metric, value):
    """Flip minimization metrics so every metric reads higher-is-better."""
    return value if HIGHER_IS_BETTER[MetricId(metric)] else -value
