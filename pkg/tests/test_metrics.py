import numpy as np
import pytest

from seriabench.matrix import (BINARY, CONTINUOUS, Matrix, dissimilarity,
                               permute)
from seriabench.metrics import (HIGHER_IS_BETTER, MetricContractError, MetricId,
                                anti_robinson_deviation, anti_robinson_events,
                                banded_anti_robinson, bandwidth, eval_metric,
                                linear_arrangement, linear_seriation,
                                measure_of_effectiveness, morans_i, normalized)
from seriabench.templates import BLOCK, PatternDescriptor, \
    continuize_template, render_binary_template

import oracles


def dyadic_matrix(rng, n, kind=CONTINUOUS):
    """Symmetric matrices over k/64 values: sums are exact in float64."""
    a = rng.integers(0, 65, size=(n, n)).astype(np.float64) / 64.0
    a = np.triu(a) + np.triu(a, 1).T
    if kind == BINARY:
        a = (a > 0.5).astype(np.float64)
    return Matrix(a.astype(np.float32), kind, mirror=False)


def dyadic_dissimilarity(rng, n):
    d = rng.integers(0, 65, size=(n, n)).astype(np.float64) / 64.0
    d = np.triu(d, 1)
    d = d + d.T
    return d


class TestHandValues:
    def test_me_of_2x2_ones(self):
        m = Matrix(np.ones((2, 2), dtype=np.float32), BINARY, mirror=False)
        assert measure_of_effectiveness(m) == 4.0

    def test_la_of_path_orders(self):
        # path 0-1-2 in order: edges at distance 1 each
        a = np.zeros((3, 3), dtype=np.float32)
        a[0, 1] = a[1, 0] = a[1, 2] = a[2, 1] = 1.0
        path = Matrix(a, BINARY, mirror=False)
        assert linear_arrangement(path) == 2.0
        swapped = permute(path, [0, 2, 1])
        assert linear_arrangement(swapped) == 3.0

    def test_ar_events_zero_on_anti_robinson(self):
        n = 8
        idx = np.arange(n)
        d = np.abs(idx[:, None] - idx[None, :]).astype(np.float64)
        assert anti_robinson_events(d) == 0.0
        assert anti_robinson_deviation(d) == 0.0

    def test_ar_events_zero_on_robinson_template_rows(self):
        desc = PatternDescriptor(BLOCK, (0, 12), (0, 12))
        t = continuize_template(render_binary_template([desc], 12),
                                np.random.default_rng(5))
        d = dissimilarity(t.matrix)
        assert anti_robinson_events(d) == 0.0

    def test_bar_prefers_banded_order(self):
        idx = np.arange(10)
        d = np.abs(idx[:, None] - idx[None, :]).astype(np.float64)
        shuffled = np.random.default_rng(0).permutation(10)
        assert banded_anti_robinson(d) < banded_anti_robinson(d[np.ix_(shuffled, shuffled)])

    def test_linear_seriation_higher_for_sorted_line(self):
        idx = np.arange(10)
        d = np.abs(idx[:, None] - idx[None, :]).astype(np.float64)
        shuffled = np.random.default_rng(1).permutation(10)
        assert linear_seriation(d) > linear_seriation(d[np.ix_(shuffled, shuffled)])


class TestOracles:
    def test_me_matches_oracle_exactly(self):
        rng = np.random.default_rng(10)
        for _ in range(100):
            m = dyadic_matrix(rng, 6)
            assert measure_of_effectiveness(m) == oracles.measure_of_effectiveness(
                m.entries.astype(np.float64))

    def test_la_matches_oracle_exactly(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            m = dyadic_matrix(rng, 6, kind=BINARY)
            assert linear_arrangement(m) == oracles.linear_arrangement(
                m.entries.astype(np.float64))

    def test_ar_events_matches_oracle_exactly(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            d = dyadic_dissimilarity(rng, 6)
            assert anti_robinson_events(d) == oracles.ar_events(d)

    def test_ar_deviation_matches_oracle(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            d = dyadic_dissimilarity(rng, 6)
            assert anti_robinson_deviation(d) == pytest.approx(
                oracles.ar_deviation(d), abs=1e-12)

    def test_bar_matches_oracle_exactly(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            d = dyadic_dissimilarity(rng, 6)
            assert banded_anti_robinson(d, band=2) == oracles.banded_anti_robinson(d, 2)

    def test_linear_seriation_matches_oracle_exactly(self):
        rng = np.random.default_rng(15)
        for _ in range(100):
            d = dyadic_dissimilarity(rng, 6)
            assert linear_seriation(d) == oracles.linear_seriation(d)


class TestInvariants:
    def test_me_transpose_invariant(self):
        rng = np.random.default_rng(20)
        for _ in range(20):
            m = dyadic_matrix(rng, 7)
            mt = Matrix(np.ascontiguousarray(m.entries.T), m.kind, mirror=False)
            assert measure_of_effectiveness(m) == measure_of_effectiveness(mt)

    def test_la_reversal_invariant(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            m = dyadic_matrix(rng, 7, kind=BINARY)
            rev = permute(m, np.arange(7)[::-1])
            assert linear_arrangement(m) == linear_arrangement(rev)

    def test_morans_i_rewards_clustering(self):
        block = np.zeros((10, 10), dtype=np.float32)
        block[:5, :5] = 1.0
        clustered = Matrix(block, BINARY, mirror=False)
        rng = np.random.default_rng(3)
        scattered_a = (rng.random((10, 10)) < 0.25).astype(np.float32)
        scattered = Matrix(np.triu(scattered_a) + np.triu(scattered_a, 1).T,
                           BINARY, mirror=True)
        assert morans_i(clustered) > morans_i(scattered)

    def test_morans_i_degenerate_zero(self):
        assert morans_i(Matrix(np.zeros((5, 5), dtype=np.float32),
                               BINARY, mirror=False)) == 0.0
        assert morans_i(Matrix(np.ones((5, 5), dtype=np.float32),
                               BINARY, mirror=False)) == 0.0


class TestEvalMetric:
    def test_matrix_metrics_reject_arrays(self):
        with pytest.raises(MetricContractError):
            eval_metric(MetricId.ME, np.zeros((4, 4)))

    def test_dissimilarity_metrics_reject_matrices(self):
        m = Matrix(np.zeros((4, 4), dtype=np.float32), BINARY, mirror=False)
        with pytest.raises(MetricContractError):
            eval_metric(MetricId.BAR, m)

    def test_bar_default_band(self):
        rng = np.random.default_rng(30)
        d = dyadic_dissimilarity(rng, 10)
        assert eval_metric(MetricId.BAR, d) == banded_anti_robinson(d, band=2)

    def test_metric_by_value_string(self):
        rng = np.random.default_rng(31)
        d = dyadic_dissimilarity(rng, 6)
        assert eval_metric("ls", d) == linear_seriation(d)

    def test_normalized_directions(self):
        assert normalized(MetricId.ME, 3.0) == 3.0
        assert normalized(MetricId.LA, 3.0) == -3.0
        assert normalized(MetricId.BAR, 2.0) == -2.0
        assert HIGHER_IS_BETTER[MetricId.LINEAR_SERIATION]


class TestBandwidth:
    def test_matches_oracle(self):
        rng = np.random.default_rng(40)
        for _ in range(20):
            m = dyadic_matrix(rng, 8, kind=BINARY)
            assert bandwidth(m) == oracles.bandwidth(m.entries)

    def test_empty_graph_zero(self):
        assert bandwidth(Matrix(np.zeros((6, 6), dtype=np.float32),
                                BINARY, mirror=False)) == 0
