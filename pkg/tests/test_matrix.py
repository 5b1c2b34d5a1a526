import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seriabench.matrix import (BINARY, CONTINUOUS, DimensionError, FormatError,
                               KindError, Matrix, binarize, dissimilarity,
                               inverse_permutation, load_rbm, permute, save_rbm,
                               swap_pair, validate_symmetry)


def sym(a, kind=CONTINUOUS):
    return Matrix(np.asarray(a, dtype=np.float32), kind, mirror=False)


@st.composite
def matrices(draw, max_n=8):
    n = draw(st.integers(2, max_n))
    kind = draw(st.sampled_from([BINARY, CONTINUOUS]))
    if kind == BINARY:
        upper = draw(st.lists(st.integers(0, 1), min_size=n * n, max_size=n * n))
    else:
        upper = draw(st.lists(
            st.floats(0, 1, allow_nan=False, width=32), min_size=n * n, max_size=n * n))
    a = np.array(upper, dtype=np.float32).reshape(n, n)
    return Matrix(a, kind, mirror=True)


@st.composite
def matrix_and_perm(draw):
    m = draw(matrices())
    perm = draw(st.permutations(range(m.n)))
    return m, np.array(perm)


class TestMatrixConstruction:
    def test_mirrors_upper_triangle(self):
        m = Matrix(np.array([[0.0, 0.5], [0.9, 0.0]]), CONTINUOUS)
        assert m.entries[1, 0] == np.float32(0.5)

    def test_rejects_asymmetric_when_not_mirroring(self):
        with pytest.raises(DimensionError):
            Matrix(np.array([[0.0, 0.5], [0.4, 0.0]]), CONTINUOUS, mirror=False)

    def test_rejects_nonbinary_entries_for_binary_kind(self):
        with pytest.raises(KindError):
            Matrix(np.array([[0.0, 0.5], [0.5, 0.0]]), BINARY, mirror=False)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Matrix(np.array([[0.0, 1.5], [1.5, 0.0]]), CONTINUOUS, mirror=False)

    def test_immutable(self):
        m = sym([[0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(Exception):
            m.entries[0, 0] = 1.0

    def test_with_diagonal(self):
        m = sym([[0.3, 1.0], [1.0, 0.7]])
        assert (m.with_diagonal(0).entries.diagonal() == 0).all()
        assert (m.with_diagonal(1).entries.diagonal() == 1).all()

    def test_validate_symmetry_reports_position(self):
        with pytest.raises(DimensionError, match=r"\(0, 1\)"):
            validate_symmetry(np.array([[0.0, 1.0], [0.5, 0.0]]))


class TestPermute:
    def test_identity_leaves_matrix_unchanged(self):
        m = sym([[0.1, 0.2], [0.2, 0.3]])
        assert permute(m, [0, 1]) == m

    def test_reverse_on_2x2_identity_pattern(self):
        m = sym([[1.0, 0.0], [0.0, 1.0]])
        assert permute(m, [1, 0]) == m

    def test_hand_traced_index_move(self):
        # order (1, 0, 2): result[1][2] must pick up entries[0][2]
        a = np.zeros((3, 3), dtype=np.float32)
        a[0, 2] = a[2, 0] = 0.7
        m = sym(a)
        out = permute(m, [1, 0, 2])
        assert out.entries[1, 2] == np.float32(0.7)

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            permute(sym([[0.0, 1.0], [1.0, 0.0]]), [0, 1, 2])

    def test_non_bijection(self):
        with pytest.raises(DimensionError):
            permute(sym([[0.0, 1.0], [1.0, 0.0]]), [0, 0])

    @settings(max_examples=40)
    @given(matrix_and_perm())
    def test_round_trip_exact(self, mp):
        m, p = mp
        assert permute(permute(m, p), inverse_permutation(p)) == m

    @settings(max_examples=40)
    @given(matrix_and_perm())
    def test_kind_and_symmetry_preserved(self, mp):
        m, p = mp
        out = permute(m, p)
        assert out.kind == m.kind
        assert (out.entries == out.entries.T).all()


class TestSwapPair:
    def test_involution(self):
        m = sym([[0.1, 0.4, 0.0], [0.4, 0.2, 0.9], [0.0, 0.9, 0.3]])
        assert swap_pair(swap_pair(m, 0, 2), 0, 2) == m

    def test_single_one_moves(self):
        a = np.zeros((3, 3), dtype=np.float32)
        a[0, 1] = a[1, 0] = 1.0
        out = swap_pair(Matrix(a, BINARY, mirror=False), 1, 2)
        expect = np.zeros((3, 3))
        expect[0, 2] = expect[2, 0] = 1.0
        assert np.array_equal(out.entries, expect)

    def test_zeros_stay_zero(self):
        m = Matrix(np.zeros((4, 4), dtype=np.float32), BINARY, mirror=False)
        assert swap_pair(m, 1, 3) == m

    def test_equals_transposition_permute(self):
        m = Matrix(np.random.default_rng(0).random((5, 5)).astype(np.float32),
                   CONTINUOUS, mirror=True)
        order = np.array([0, 3, 2, 1, 4])
        assert swap_pair(m, 1, 3) == permute(m, order)

    def test_out_of_range(self):
        with pytest.raises(DimensionError):
            swap_pair(sym([[0.0, 1.0], [1.0, 0.0]]), 0, 2)


class TestBinarize:
    def test_definition_case(self):
        out = binarize(sym([[0.0, 0.3], [0.3, 1.0]]))
        assert out.kind == BINARY
        assert np.array_equal(out.entries, [[0, 1], [1, 1]])

    def test_zero_matrix(self):
        m = sym(np.zeros((3, 3)))
        assert np.array_equal(binarize(m).entries, np.zeros((3, 3)))

    @settings(max_examples=40)
    @given(matrices())
    def test_idempotent(self, m):
        assert binarize(binarize(m)) == binarize(m)

    @settings(max_examples=40)
    @given(matrix_and_perm())
    def test_commutes_with_permute(self, mp):
        m, p = mp
        assert binarize(permute(m, p)) == permute(binarize(m), p)


class TestDissimilarity:
    def test_identical_rows_zero(self):
        m = sym([[0.5, 0.5, 0.1], [0.5, 0.5, 0.1], [0.1, 0.1, 0.9]])
        assert dissimilarity(m)[0, 1] == 0.0

    def test_unit_rows_sqrt_two(self):
        m = Matrix(np.array([[1.0, 0.0], [0.0, 1.0]], dtype=np.float32),
                   BINARY, mirror=False)
        assert dissimilarity(m)[0, 1] == pytest.approx(np.sqrt(2), abs=1e-12)

    def test_zero_diagonal(self):
        m = Matrix(np.random.default_rng(1).random((6, 6)).astype(np.float32),
                   CONTINUOUS, mirror=True)
        assert (dissimilarity(m).diagonal() == 0).all()

    @settings(max_examples=25)
    @given(matrix_and_perm())
    def test_permutation_equivariance(self, mp):
        m, p = mp
        moved = dissimilarity(permute(m, p))
        base = dissimilarity(m)
        assert np.allclose(moved, base[np.ix_(p, p)], atol=1e-9)


class TestSerialization:
    def test_float32_round_trip(self, tmp_path):
        m = Matrix(np.random.default_rng(2).random((9, 9)).astype(np.float32),
                   CONTINUOUS, mirror=True)
        path = tmp_path / "m.rbm"
        save_rbm(m, path)
        assert load_rbm(path) == m

    def test_bitpacked_round_trip(self, tmp_path):
        rng = np.random.default_rng(3)
        a = (rng.random((11, 11)) < 0.4).astype(np.float32)
        m = Matrix(a, BINARY, mirror=True)
        path = tmp_path / "b.rbm"
        save_rbm(m, path)  # binary defaults to bit-packing
        assert path.stat().st_size == 10 + 11 * 2
        assert load_rbm(path) == m

    def test_binary_as_float32_round_trip(self, tmp_path):
        m = Matrix(np.eye(5, dtype=np.float32), BINARY, mirror=False)
        path = tmp_path / "e.rbm"
        save_rbm(m, path, encoding=0)
        assert load_rbm(path) == m

    def test_bitpacking_continuous_rejected(self, tmp_path):
        m = sym([[0.2, 0.5], [0.5, 0.2]])
        with pytest.raises(KindError):
            save_rbm(m, tmp_path / "x.rbm", encoding=1)

    def test_bad_magic_reports_offset(self, tmp_path):
        path = tmp_path / "bad.rbm"
        path.write_bytes(b"NOPE" + bytes(10))
        with pytest.raises(FormatError, match="byte offset 0"):
            load_rbm(path)

    def test_truncated_payload_reports_offset(self, tmp_path):
        m = sym(np.zeros((4, 4)))
        path = tmp_path / "t.rbm"
        save_rbm(m, path)
        blob = path.read_bytes()
        path.write_bytes(blob[:-3])
        with pytest.raises(FormatError, match="byte offset"):
            load_rbm(path)
