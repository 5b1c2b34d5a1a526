"""Dense symmetric matrices, permutations, and their basic operations.

Matrices hold float32 entries in [0, 1], are symmetric by construction,
and are immutable once built.  Binary matrices restrict entries to {0, 1}.
"""

import json
import struct

import numpy as np

BINARY = "binary"
CONTINUOUS = "continuous"
KINDS = (BINARY, CONTINUOUS)

MAGIC = b"RBM1"
ENC_FLOAT32 = 0
ENC_BITPACKED = 1


class SeriaBenchError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(SeriaBenchError):
    pass


class KindError(SeriaBenchError):
    pass


class FormatError(SeriaBenchError):
    """Malformed .rbm payload; carries the offending byte offset."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class Matrix:
    """Symmetric n x n matrix with entries in [0, 1].

    The upper triangle (including the diagonal) of ``entries`` is mirrored
    onto the lower triangle at construction unless ``mirror=False``, in
    which case exact symmetry is required.
    """

    __slots__ = ("entries", "kind")

    def __init__(self, entries, kind, mirror=True):
        if kind not in KINDS:
            raise KindError(f"unknown matrix kind {kind!r}")
        a = np.asarray(entries, dtype=np.float32)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"expected a square array, got shape {a.shape}")
        if a.shape[0] < 1:
            raise DimensionError("matrix must have at least one row")
        if mirror:
            a = np.triu(a) + np.triu(a, k=1).T
        else:
            validate_symmetry(a)
        if a.size and (a.min() < 0.0 or a.max() > 1.0):
            raise ValueError("entries must lie in [0, 1]")
        if kind == BINARY:
            if not np.isin(a, (0.0, 1.0)).all():
                raise KindError("binary matrices only admit entries in {0, 1}")
        a = np.ascontiguousarray(a)
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "kind", kind)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @property
    def n(self):
        return self.entries.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.kind == other.kind and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.kind, self.entries.tobytes()))

    def __repr__(self):
        return f"Matrix(n={self.n}, kind={self.kind!r})"

    def with_diagonal(self, value):
        """Copy with every diagonal entry forced to 0 or 1."""
        if value not in (0, 1):
            raise ValueError("diagonal value must be 0 or 1")
        a = self.entries.copy()
        np.fill_diagonal(a, float(value))
        return Matrix(a, self.kind, mirror=False)


def validate_symmetry(entries):
    """Raise if the array is not exactly symmetric (tolerance 0)."""
    a = np.asarray(entries)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square array, got shape {a.shape}")
    bad = np.argwhere(a != a.T)
    if bad.size:
        i, j = bad[0]
        raise DimensionError(
            f"asymmetric entries at ({i}, {j}): {a[i, j]!r} != {a[j, i]!r}")


def check_permutation(order, n):
    """Validate a permutation of [0, n) and return it as an int64 array."""
    p = np.asarray(order, dtype=np.int64)
    if p.ndim != 1 or p.shape[0] != n:
        raise DimensionError(f"permutation length {p.shape} does not match n={n}")
    if not np.array_equal(np.sort(p), np.arange(n)):
        raise DimensionError("order is not a bijection on [0, n)")
    return p


def permute(m, order):
    """Apply the same permutation to rows and columns."""
    p = check_permutation(order, m.n)
    return Matrix(m.entries[np.ix_(p, p)], m.kind, mirror=False)


def inverse_permutation(order):
    p = np.asarray(order, dtype=np.int64)
    inv = np.empty_like(p)
    inv[p] = np.arange(p.shape[0])
    return inv


def swap_pair(m, i, j):
    """Swap rows and columns i and j simultaneously."""
    n = m.n
    if not (0 <= i < n and 0 <= j < n):
        raise DimensionError(f"swap indices ({i}, {j}) out of range for n={n}")
    if i == j:
        raise DimensionError("swap indices must differ")
    order = np.arange(n)
    order[i], order[j] = j, i
    return permute(m, order)


def binarize(m):
    """Map every nonzero entry to 1; the result is a binary matrix."""
    return Matrix((m.entries > 0).astype(np.float32), BINARY, mirror=False)


def dissimilarity(m):
    """Pairwise Euclidean distances between rows, as a float64 array."""
    x = m.entries.astype(np.float64)
    sq = np.einsum("ij,ij->i", x, x)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.clip(d2, 0.0, None, out=d2)
    d = np.sqrt(d2)
    np.fill_diagonal(d, 0.0)
    return (d + d.T) / 2.0


def save_rbm(m, path, encoding=None):
    """Write a matrix in the .rbm container.

    Binary matrices default to the bit-packed encoding, continuous ones to
    raw float32.  Bit-packing rows is MSB-first with byte-aligned rows.
    """
    if encoding is None:
        encoding = ENC_BITPACKED if m.kind == BINARY else ENC_FLOAT32
    if encoding == ENC_BITPACKED and m.kind != BINARY:
        raise KindError("bit-packed encoding requires a binary matrix")
    kind_byte = 0 if m.kind == BINARY else 1
    header = MAGIC + struct.pack("<IBB", m.n, kind_byte, encoding)
    if encoding == ENC_FLOAT32:
        payload = m.entries.astype("<f4").tobytes()
    else:
        payload = np.packbits(m.entries > 0, axis=1).tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def load_rbm(path):
    """Read a matrix written by :func:`save_rbm`."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != MAGIC:
        raise FormatError(f"bad magic {blob[:4]!r}, expected {MAGIC!r}", 0)
    if len(blob) < 10:
        raise FormatError("truncated header", len(blob))
    n, kind_byte, encoding = struct.unpack_from("<IBB", blob, 4)
    if kind_byte not in (0, 1):
        raise FormatError(f"unknown kind byte {kind_byte}", 8)
    if encoding not in (ENC_FLOAT32, ENC_BITPACKED):
        raise FormatError(f"unknown encoding byte {encoding}", 9)
    kind = BINARY if kind_byte == 0 else CONTINUOUS
    payload = blob[10:]
    if encoding == ENC_FLOAT32:
        expect = 4 * n * n
        if len(payload) != expect:
            raise FormatError(
                f"float32 payload has {len(payload)} bytes, expected {expect}",
                10 + min(len(payload), expect))
        a = np.frombuffer(payload, dtype="<f4").reshape(n, n)
    else:
        row_bytes = (n + 7) // 8
        expect = row_bytes * n
        if len(payload) != expect:
            raise FormatError(
                f"bit-packed payload has {len(payload)} bytes, expected {expect}",
                10 + min(len(payload), expect))
        bits = np.unpackbits(
            np.frombuffer(payload, dtype=np.uint8).reshape(n, row_bytes), axis=1)
        a = bits[:, :n].astype(np.float32)
    return Matrix(a, kind, mirror=False)


def write_sidecar(path, meta):
    """Write the JSON provenance sidecar next to a .rbm file."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def read_sidecar(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def sidecar_path(rbm_path):
    s = str(rbm_path)
    return s[:-4] + ".json" if s.endswith(".rbm") else s + ".json"
