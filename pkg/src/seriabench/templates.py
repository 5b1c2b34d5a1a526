"""Pristine pattern templates: layout sampling, rendering, Robinson fills.

A template is a symmetric matrix whose nonzero support is exactly the union
of 1..15 non-overlapping instances of one pattern type:

  block    square on the main diagonal
  offdiag  rectangle away from the diagonal, plus its mirror
  star     a horizontal and a vertical line crossing on the diagonal
  band     lines parallel to the diagonal, plus their mirror

Continuous templates replace the ones of block/star/offdiag patterns with a
Robinson structure (entries fall away from the pattern's ridge) and band
entries with uniform draws.
"""

from dataclasses import dataclass

import numpy as np

from .matrix import BINARY, CONTINUOUS, KindError, Matrix, SeriaBenchError

BLOCK = "block"
OFFDIAG = "offdiag"
STAR = "star"
BAND = "band"
PATTERN_TYPES = (BLOCK, OFFDIAG, STAR, BAND)

MAX_PATTERNS = 15
MAX_LINE_WIDTH = 4
MIN_BLOCK_ROWS = 2
MIN_LINE_EXTENT = 5
PLACEMENT_RETRIES = 1000


class GenerationError(SeriaBenchError):
    pass


@dataclass(frozen=True)
class PatternDescriptor:
    """One pattern instance.

    ``row_span``/``col_span`` are half-open index intervals describing the
    canonical (upper-triangle) component:

      block    row_span == col_span, the square's extent
      offdiag  the rectangle's rows and columns (row_span before col_span)
      star     row_span is the horizontal arm's rows (width thick),
               col_span is the arm extent containing it
      band     row_span the line's rows, col_span its column extent; the
               diagonal offset is col_span[0] - row_span[0]
    ``anchors`` holds the ascending Robinson fill values of continuous
    block/star/offdiag patterns.
    """

    ptype: str
    row_span: tuple
    col_span: tuple
    width: int = 0
    anchors: tuple = None

    def __post_init__(self):
        if self.ptype not in PATTERN_TYPES:
            raise GenerationError(f"unknown pattern type {self.ptype!r}")

    @property
    def row_extent(self):
        if self.ptype == STAR:
            return self.col_span[1] - self.col_span[0]
        return self.row_span[1] - self.row_span[0]

    @property
    def col_extent(self):
        return self.col_span[1] - self.col_span[0]

    def to_json(self):
        d = {"ptype": self.ptype, "rows": list(self.row_span),
             "cols": list(self.col_span), "width": self.width,
             "anchors": list(self.anchors) if self.anchors is not None else None}
        return d

    @classmethod
    def from_json(cls, d):
        anchors = d.get("anchors")
        return cls(ptype=d["ptype"], row_span=tuple(d["rows"]),
                   col_span=tuple(d["cols"]), width=d.get("width", 0),
                   anchors=tuple(anchors) if anchors is not None else None)


@dataclass(frozen=True)
class Template:
    matrix: Matrix
    patterns: tuple
    template_id: str
    seed: int = 0

    def __post_init__(self):
        if not 1 <= len(self.patterns) <= MAX_PATTERNS:
            raise GenerationError(
                f"template needs 1..{MAX_PATTERNS} patterns, got {len(self.patterns)}")


def component_cells(desc):
    """Cells of the canonical component, as an (K, 2) int array."""
    r0, r1 = desc.row_span
    c0, c1 = desc.col_span
    if desc.ptype in (BLOCK, OFFDIAG):
        rr, cc = np.meshgrid(np.arange(r0, r1), np.arange(c0, c1), indexing="ij")
        return np.column_stack([rr.ravel(), cc.ravel()])
    if desc.ptype == STAR:
        rr, cc = np.meshgrid(np.arange(r0, r1), np.arange(c0, c1), indexing="ij")
        return np.column_stack([rr.ravel(), cc.ravel()])
    # band: width parallel lines starting at (r0, c0)
    length = r1 - r0
    rows = np.repeat(np.arange(r0, r1), desc.width)
    cols = (np.repeat(np.arange(c0, c0 + length), desc.width)
            + np.tile(np.arange(desc.width), length))
    return np.column_stack([rows, cols])


def footprint_cells(desc):
    """All cells of the pattern including the mirrored component."""
    comp = component_cells(desc)
    if desc.ptype == BLOCK:
        return comp
    mirrored = comp[:, ::-1]
    both = np.unique(np.concatenate([comp, mirrored], axis=0), axis=0)
    return both


def pattern_area(desc):
    return footprint_cells(desc).shape[0]


class _FreeIntervals:
    """Disjoint free intervals of [0, n) used during layout placement."""

    def __init__(self, n):
        self.intervals = [(0, n)]

    def max_len(self):
        return max((b - a for a, b in self.intervals), default=0)

    def place(self, length, rng):
        """Reserve a random interval of the given length; None if impossible."""
        slots = [(a, b) for a, b in self.intervals if b - a >= length]
        total = sum(b - a - length + 1 for a, b in slots)
        if total == 0:
            return None
        pick = int(rng.integers(total))
        for a, b in slots:
            count = b - a - length + 1
            if pick < count:
                start = a + pick
                self.intervals.remove((a, b))
                if start > a:
                    self.intervals.append((a, start))
                if start + length < b:
                    self.intervals.append((start + length, b))
                self.intervals.sort()
                return start
            pick -= count
        return None


def _sample_one(ptype, n, free, rng):
    """Try to place one pattern inside the free intervals; None on failure."""
    if ptype == BLOCK:
        top = free.max_len()
        if top < MIN_BLOCK_ROWS:
            return None
        size = int(rng.integers(MIN_BLOCK_ROWS, top + 1))
        start = free.place(size, rng)
        if start is None:
            return None
        return PatternDescriptor(BLOCK, (start, start + size), (start, start + size))
    if ptype == STAR:
        top = free.max_len()
        if top < MIN_LINE_EXTENT:
            return None
        span = int(rng.integers(MIN_LINE_EXTENT, top + 1))
        width = int(rng.integers(1, MAX_LINE_WIDTH + 1))
        start = free.place(span, rng)
        if start is None:
            return None
        center = int(rng.integers(start, start + span - width + 1))
        return PatternDescriptor(STAR, (center, center + width),
                                 (start, start + span), width=width)
    if ptype == BAND:
        width = int(rng.integers(1, MAX_LINE_WIDTH + 1))
        lo = MIN_LINE_EXTENT + width  # length >= 5 plus offset >= 1 and width
        top = free.max_len()
        if top < lo:
            return None
        extent = int(rng.integers(lo, top + 1))
        start = free.place(extent, rng)
        if start is None:
            return None
        length = int(rng.integers(MIN_LINE_EXTENT, extent - width + 1))
        offset = extent - length - width + 1
        return PatternDescriptor(BAND, (start, start + length),
                                 (start + offset, start + offset + length + width - 1),
                                 width=width)
    if ptype == OFFDIAG:
        if free.max_len() < MIN_BLOCK_ROWS:
            return None
        snapshot = list(free.intervals)
        u = int(rng.integers(MIN_BLOCK_ROWS, free.max_len() + 1))
        a = free.place(u, rng)
        if a is None or free.max_len() < MIN_BLOCK_ROWS:
            free.intervals = snapshot
            return None
        v = int(rng.integers(MIN_BLOCK_ROWS, free.max_len() + 1))
        b = free.place(v, rng)
        if b is None:
            free.intervals = snapshot
            return None
        spans = sorted([(a, a + u), (b, b + v)])
        return PatternDescriptor(OFFDIAG, spans[0], spans[1])
    raise GenerationError(f"unknown pattern type {ptype!r}")


def sample_layout(ptype, n, rng, max_patterns=MAX_PATTERNS,
                  retries=PLACEMENT_RETRIES):
    """Sample a layout of 1..15 non-overlapping patterns of one type.

    The target pattern count is uniform; when placement stalls after the
    retry budget the count is reduced by one and sampling restarts.  Each
    pattern's extent is reserved as a block of indices so footprints (and
    their mirrors) can never collide, which also keeps the shared rows of
    any two offdiag patterns at zero, well under the half-rows bound.
    """
    if n < 20:
        raise GenerationError(f"matrix size {n} is too small (needs >= 20)")
    count = int(rng.integers(1, max_patterns + 1))
    while count >= 1:
        free = _FreeIntervals(n)
        layout = []
        budget = retries
        while len(layout) < count and budget > 0:
            desc = _sample_one(ptype, n, free, rng)
            if desc is None:
                budget -= 1
                continue
            layout.append(desc)
        if len(layout) == count:
            return layout
        if count == 1:
            raise GenerationError(
                f"cannot place a single {ptype} pattern in an {n}x{n} matrix")
        count -= 1
    raise GenerationError("layout sampling failed")


def render_binary_template(layout, n, template_id="", seed=0):
    """Render a layout as a pristine binary template."""
    if not layout:
        raise GenerationError("layout must contain at least one pattern")
    a = np.zeros((n, n), dtype=np.float32)
    claimed = np.zeros((n, n), dtype=bool)
    for desc in layout:
        cells = footprint_cells(desc)
        if cells[:, 0].min() < 0 or cells.max() >= n:
            raise GenerationError(f"pattern {desc} exceeds the matrix bounds")
        if claimed[cells[:, 0], cells[:, 1]].any():
            raise GenerationError("overlapping pattern footprints")
        claimed[cells[:, 0], cells[:, 1]] = True
        a[cells[:, 0], cells[:, 1]] = 1.0
    return Template(Matrix(a, BINARY, mirror=False), tuple(layout),
                    template_id, seed)


def sample_anchors(u, rng):
    """Ascending Robinson anchor values: u sorted uniform draws from [0, 1)."""
    return np.sort(rng.random(u))


def robinson_grid(anchors):
    """Grid g[i, j] = 1 - (x_i - x_j)^2 for ascending anchors x."""
    x = np.asarray(anchors, dtype=np.float64)
    return 1.0 - np.subtract.outer(x, x) ** 2


def robinson_fill(u, rng):
    """Random u x u Robinson grid (symmetric, rows fall away from the diagonal)."""
    if u < 1:
        raise GenerationError("fill size must be positive")
    return robinson_grid(sample_anchors(u, rng))


def _offdiag_fill(u, v, anchors):
    """Crop-and-mirror fill for a u x v rectangle.

    A max(u, v) Robinson grid is cropped to u x v and flipped upside down so
    its ridge runs along the rectangle's anti-diagonal through the corner
    nearest the matrix diagonal.
    """
    grid = robinson_grid(anchors)
    crop = grid[:u, :v]
    return crop[::-1, :]


def continuize_template(t, rng, band_min_value=0.0):
    """Continuous counterpart of a binary template.

    Block and star footprints take a Robinson fill over the pattern's rows;
    offdiag rectangles take a cropped, mirrored Robinson fill; band entries
    are uniform draws from (band_min_value, 1].  The support is unchanged.
    """
    if t.matrix.kind != BINARY:
        raise KindError("continuize_template expects a binary template")
    n = t.matrix.n
    a = np.zeros((n, n), dtype=np.float64)
    descs = []
    for desc in t.patterns:
        if desc.ptype == BAND:
            comp = component_cells(desc)
            draws = 1.0 - rng.random(comp.shape[0])  # in (0, 1]
            vals = band_min_value + (1.0 - band_min_value) * draws
            a[comp[:, 0], comp[:, 1]] = vals
            a[comp[:, 1], comp[:, 0]] = vals
            descs.append(desc)
            continue
        if desc.ptype == OFFDIAG:
            u = desc.row_span[1] - desc.row_span[0]
            v = desc.col_span[1] - desc.col_span[0]
            anchors = sample_anchors(max(u, v), rng)
            fill = _offdiag_fill(u, v, anchors)
            r0, c0 = desc.row_span[0], desc.col_span[0]
            a[r0:r0 + u, c0:c0 + v] = fill
            a[c0:c0 + v, r0:r0 + u] = fill.T
        else:  # block or star: fill over the pattern's local square frame
            lo = desc.row_span[0] if desc.ptype == BLOCK else desc.col_span[0]
            hi = desc.row_span[1] if desc.ptype == BLOCK else desc.col_span[1]
            anchors = sample_anchors(hi - lo, rng)
            grid = robinson_grid(anchors)
            cells = footprint_cells(desc)
            a[cells[:, 0], cells[:, 1]] = grid[cells[:, 0] - lo, cells[:, 1] - lo]
        descs.append(PatternDescriptor(desc.ptype, desc.row_span, desc.col_span,
                                       desc.width, anchors=tuple(anchors)))
    out = Matrix(a.astype(np.float32), CONTINUOUS, mirror=False)
    if not np.array_equal(out.entries > 0, t.matrix.entries > 0):
        raise GenerationError("continuous fill changed the template support")
    return Template(out, tuple(descs), t.template_id, t.seed)


def generate_template(ptype, kind, n, seed, template_id="", band_min_value=0.0):
    """Sample, render, and (for continuous kind) fill one template."""
    rng = np.random.default_rng(seed)
    layout = sample_layout(ptype, n, rng)
    t = render_binary_template(layout, n, template_id, seed)
    if kind == CONTINUOUS:
        t = continuize_template(t, rng, band_min_value=band_min_value)
    return t
