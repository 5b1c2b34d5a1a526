"""Pattern quality scoring: kernel matching plus sub-score aggregation.

A variation is scored against its template in two phases.  Detection
binarizes the matrix and greedily slides one convolution kernel per
template pattern (largest first) over the admissible placements: along the
main diagonal for blocks and stars, over the strict upper triangle for
offdiag rectangles and bands.  The placement with the most nonzero cells
under the footprint that avoids previously matched cells wins, ties going
to the smallest position.

Scoring then grades each matched region with
  existence   fraction of footprint cells that are nonzero,
  disorder    entropy of the 8-connected nonzero component sizes,
              normalized by log(area),
  deviation   Robinson-condition violations of the original values
              (continuous matrices only; bands are exempt),
combines them as existence * (1 - disorder) * (1 - deviation), and averages
the regions weighted by footprint area.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .matrix import BINARY, DimensionError, KindError
from .templates import BAND, BLOCK, STAR, component_cells, footprint_cells

_impl = _kernels.impl


@dataclass(frozen=True)
class Kernel:
    """Matched-filter footprint of one template pattern.

    ``cells`` are (row, col) offsets relative to the footprint bounding box;
    offdiag and band kernels keep only the upper-triangle component.
    """

    ptype: str
    cells: np.ndarray
    height: int
    width: int
    anchor: str  # "diagonal" or "offdiag"

    @property
    def area(self):
        return self.cells.shape[0]


@dataclass
class MatchedRegion:
    ptype: str
    cells: np.ndarray  # absolute (row, col) cells; None when unmatched
    area: int
    bbox: tuple        # (r0, c0, height, width); None when unmatched
    existence: float
    disorder: float
    deviation: float

    @property
    def score(self):
        return self.existence * (1.0 - self.disorder) * (1.0 - self.deviation)

    def to_json(self):
        return {
            "ptype": self.ptype,
            "cells_bbox": list(self.bbox) if self.bbox is not None else None,
            "area": self.area,
            "existence": self.existence,
            "disorder": self.disorder,
            "deviation": self.deviation,
            "score": self.score,
        }


@dataclass(frozen=True)
class ScoreReport:
    final: float
    regions: tuple

    def to_json(self):
        return {"final": self.final,
                "regions": [r.to_json() for r in self.regions]}


def derive_kernels(t):
    """One kernel per template pattern, sorted by footprint area descending."""
    kernels = []
    for desc in t.patterns:
        if desc.ptype in (BLOCK, STAR):
            cells = footprint_cells(desc)
            anchor = "diagonal"
        else:
            cells = component_cells(desc)
            anchor = "offdiag"
        r0, c0 = cells[:, 0].min(), cells[:, 1].min()
        rel = cells - np.array([r0, c0])
        h = int(rel[:, 0].max()) + 1
        w = int(rel[:, 1].max()) + 1
        if anchor == "diagonal" and h != w:
            raise ValueError(f"on-diagonal kernel must be square, got {h}x{w}")
        kernels.append(Kernel(desc.ptype, rel, h, w, anchor))
    kernels.sort(key=lambda k: -k.area)
    return kernels


def _segments(cells):
    """Contiguous per-row runs (row, lo, hi) of a relative footprint."""
    order = np.lexsort((cells[:, 1], cells[:, 0]))
    cs = cells[order]
    rows, los, his = [], [], []
    for r, c in cs:
        if rows and rows[-1] == r and his[-1] == c - 1:
            his[-1] = c
        else:
            rows.append(r)
            los.append(c)
            his.append(c)
    return (np.asarray(rows, dtype=np.int64),
            np.asarray(los, dtype=np.int64),
            np.asarray(his, dtype=np.int64))


def _row_prefix(a):
    """Per-row prefix sums with a leading zero column, int64."""
    n = a.shape[0]
    out = np.zeros((n, n + 1), dtype=np.int64)
    np.cumsum(a, axis=1, dtype=np.int64, out=out[:, 1:])
    return out


class _Matcher:
    """Greedy matcher holding the binarized matrix and occupied cells."""

    def __init__(self, b):
        self.b = b
        self.n = b.shape[0]
        self.prefix_b = _row_prefix(b)
        self.occupied = np.zeros_like(b)

    def match(self, kernel):
        """Best placement of the kernel; (cells, conv) or (None, 0)."""
        rows, los, his = _segments(kernel.cells)
        prefix_occ = _row_prefix(self.occupied)
        if kernel.anchor == "diagonal":
            t, conv = _impl.scan_diagonal(self.prefix_b, prefix_occ,
                                          rows, los, his, kernel.height, self.n)
            if t < 0:
                return None, 0
            offset = np.array([t, t])
        else:
            gap = int((kernel.cells[:, 0] - kernel.cells[:, 1]).max()) + 1
            p, q, conv = _impl.scan_offdiag(self.prefix_b, prefix_occ,
                                            rows, los, his,
                                            kernel.height, kernel.width, gap, self.n)
            if p < 0:
                return None, 0
            offset = np.array([p, q])
        cells = kernel.cells + offset
        self.occupied[cells[:, 0], cells[:, 1]] = 1
        return cells, int(conv)


def match_pattern(b, kernel, occupied=None):
    """Standalone single-kernel match against a binarized array.

    ``occupied`` marks cells unavailable to this match.  Returns the
    matched absolute cells and the convolution value; (None, 0) when no
    feasible placement exists.
    """
    m = _Matcher(np.ascontiguousarray(b, dtype=np.uint8))
    if occupied is not None:
        m.occupied = np.ascontiguousarray(occupied, dtype=np.uint8)
    return m.match(kernel)


def existence_score(b, cells):
    """Fraction of the region's cells that are nonzero."""
    if cells is None or len(cells) == 0:
        raise ValueError("existence score needs a nonempty region")
    hits = int(b[cells[:, 0], cells[:, 1]].astype(bool).sum())
    return hits / cells.shape[0]


def disorder_score(b, cells):
    """Normalized entropy of the 8-connected nonzero components of a region.

    Components are computed among the region's own nonzero cells; adjacency
    counts edges and corners.  Regions with at most one component score 0.
    """
    area = cells.shape[0]
    r0, c0 = cells[:, 0].min(), cells[:, 1].min()
    h = int(cells[:, 0].max()) - int(r0) + 1
    w = int(cells[:, 1].max()) - int(c0) + 1
    grid = np.zeros((h, w), dtype=np.uint8)
    vals = b[cells[:, 0], cells[:, 1]].astype(bool)
    grid[cells[:, 0] - r0, cells[:, 1] - c0] = vals
    sizes = np.sort(np.asarray(_impl.label_sizes(grid), dtype=np.int64))[::-1]
    if sizes.shape[0] <= 1 or area < 2:
        return 0.0
    # sequential sum over descending sizes keeps the value reproducible
    total = int(sizes.sum())
    entropy = -sum((int(s) / total) * math.log(int(s) / total) for s in sizes)
    return entropy / math.log(area)


def deviation_score(values, cells, ptype, kind, bbox=None, band_deviation=False):
    """Robinson-violation score of a matched region's original values.

    Binary matrices score 0.  Blocks and stars use the triple comparison
    around the region's main diagonal; offdiag rectangles take the minimum
    over every anti-diagonal ridge; bands score 0 unless ``band_deviation``
    is enabled, in which case they are treated like offdiag rectangles.
    """
    if kind == BINARY:
        return 0.0
    if ptype == BAND and not band_deviation:
        return 0.0
    if bbox is None:
        r0, c0 = int(cells[:, 0].min()), int(cells[:, 1].min())
        h = int(cells[:, 0].max()) - r0 + 1
        w = int(cells[:, 1].max()) - c0 + 1
        bbox = (r0, c0, h, w)
    r0, c0, h, w = bbox
    local = np.ascontiguousarray(values[r0:r0 + h, c0:c0 + w], dtype=np.float64)
    mask = np.zeros((h, w), dtype=np.uint8)
    mask[cells[:, 0] - r0, cells[:, 1] - c0] = 1
    if ptype in (BLOCK, STAR):
        num, den = _impl.eq1_square(local, mask)
        return num / den if den > 0.0 else 0.0
    return float(_impl.eq1_rect_min(local, mask))


def region_score(region):
    """Existence * (1 - disorder) * (1 - deviation)."""
    return region.score


def score_matrix(v, t, band_deviation=False):
    """Quality score of a matrix against its template.

    Kernels are matched greedily on the binarized matrix, each matched
    region is graded, and the final score is the area-weighted mean.  An
    unmatchable kernel contributes a zero-scored region at its full area.
    """
    if v.n != t.matrix.n:
        raise DimensionError(
            f"matrix size {v.n} does not match template size {t.matrix.n}")
    if v.kind != t.matrix.kind:
        raise KindError(
            f"matrix kind {v.kind!r} does not match template kind {t.matrix.kind!r}")
    b = np.ascontiguousarray(v.entries > 0, dtype=np.uint8)
    vals = v.entries.astype(np.float64)
    matcher = _Matcher(b)
    regions = []
    for kernel in derive_kernels(t):
        cells, _conv = matcher.match(kernel)
        if cells is None:
            regions.append(MatchedRegion(kernel.ptype, None, kernel.area, None,
                                         0.0, 0.0, 0.0))
            continue
        r0, c0 = int(cells[:, 0].min()), int(cells[:, 1].min())
        bbox = (r0, c0, kernel.height, kernel.width)
        se = existence_score(b, cells)
        if se == 0.0:
            regions.append(MatchedRegion(kernel.ptype, cells, kernel.area, bbox,
                                         0.0, 0.0, 0.0))
            continue
        sd = disorder_score(b, cells)
        sv = deviation_score(vals, cells, kernel.ptype, v.kind, bbox=bbox,
                             band_deviation=band_deviation)
        regions.append(MatchedRegion(kernel.ptype, cells, kernel.area, bbox,
                                     se, sd, sv))
    total_area = sum(r.area for r in regions)
    final = sum(r.area * r.score for r in regions) / total_area
    return ScoreReport(final, tuple(regions))
