"""Unit tests for the rank-based performance measures."""

import numpy as np
import pytest

from mlnsim.codes import EXAMPLE1_DELTA, EXAMPLE3_DELTA, DifferenceMatrix
from mlnsim.linalg import make_rng, numeric_rank, sample_cn_matrix
from mlnsim.measure import (
    build_D,
    build_E_t,
    compare_queries,
    empirical_rank_check,
    r_uniform,
    r_unitary,
    report_from_dict,
)


class TestBuildEt:
    def test_zero_column_gives_zero_matrix(self):
        delta = np.array([[1.0, 0.0], [1.0, 0.0]])
        G = sample_cn_matrix(2, 2, make_rng(1))
        e2 = build_E_t(delta, G, 2)
        assert np.all(e2 == 0)

    def test_structure_matches_diag_product(self):
        G = sample_cn_matrix(2, 3, make_rng(2))
        e1 = build_E_t(EXAMPLE1_DELTA, G, 1)
        assert np.allclose(e1, np.diag([1.0, 1.5]) @ G)
        e2 = build_E_t(EXAMPLE1_DELTA, G, 2)
        assert np.allclose(e2, np.diag([-2.0, 2.5]) @ G)

    def test_example1_rank_statistics(self):
        rng = make_rng(3)
        for _ in range(1000):
            G = sample_cn_matrix(2, 2, rng)
            assert numeric_rank(build_E_t(EXAMPLE1_DELTA, G, 1)) == 2

    def test_example3_rank(self):
        rng = make_rng(4)
        for _ in range(1000):
            G = sample_cn_matrix(1, 2, rng)
            e1 = build_E_t(EXAMPLE3_DELTA, G, 1)
            assert e1.shape == (1, 2)
            assert numeric_rank(e1) == 1

    def test_slot_out_of_range(self):
        with pytest.raises(IndexError):
            build_E_t(EXAMPLE1_DELTA, np.ones((2, 2)), 3)


class TestBuildD:
    def test_zero_delta(self):
        G = sample_cn_matrix(2, 2, make_rng(5))
        assert np.all(build_D(np.zeros((2, 2)), G) == 0)

    def test_row_scaling_structure(self):
        G = sample_cn_matrix(2, 2, make_rng(6))
        D = build_D(EXAMPLE1_DELTA, G)
        assert D.shape == (2, 4)
        for n in range(2):
            block = D[:, 2 * n : 2 * n + 2]
            assert np.allclose(block, np.diag(G[:, n]) @ EXAMPLE1_DELTA)

    def test_example1_rank_statistics(self):
        rng = make_rng(7)
        for _ in range(1000):
            G = sample_cn_matrix(2, 2, rng)
            assert numeric_rank(build_D(EXAMPLE1_DELTA, G)) == 2

    def test_example3_shape_and_rank(self):
        rng = make_rng(8)
        G = sample_cn_matrix(1, 2, rng)
        D = build_D(EXAMPLE3_DELTA, G)
        assert D.shape == (1, 4)
        assert numeric_rank(D) == 1

    def test_column_regrouping_of_E_blocks(self):
        # D holds exactly the columns of (E_1 | ... | E_T), regrouped by antenna
        G = sample_cn_matrix(2, 2, make_rng(9))
        D = build_D(EXAMPLE1_DELTA, G)
        cols_d = sorted(map(tuple, np.round(D.T, 12)))
        cols_e = []
        for t in (1, 2):
            cols_e.extend(map(tuple, np.round(build_E_t(EXAMPLE1_DELTA, G, t).T, 12)))
        assert cols_d == sorted(cols_e)


class TestMeasures:
    def test_builtin_setting_values(self):
        assert r_unitary(EXAMPLE1_DELTA, 2) == 4
        assert r_unitary(EXAMPLE1_DELTA, 1) == 2
        assert r_unitary(EXAMPLE3_DELTA, 2) == 2
        assert r_uniform(EXAMPLE1_DELTA, 2) == 2
        assert r_uniform(EXAMPLE1_DELTA, 1) == 2
        assert r_uniform(EXAMPLE3_DELTA, 2) == 1

    def test_verdicts(self):
        assert compare_queries(EXAMPLE1_DELTA, 2).verdict == "unitary-dominates"
        assert compare_queries(EXAMPLE1_DELTA, 1).verdict == "comparable"
        assert compare_queries(EXAMPLE3_DELTA, 2).verdict == "unitary-dominates"

    def test_zero_delta_degenerate(self):
        rep = compare_queries(np.zeros((2, 2)), 2)
        assert rep.r_unitary == 0 and rep.r_uniform == 0
        assert rep.verdict == "comparable"

    def test_report_consistency(self):
        rep = compare_queries(EXAMPLE1_DELTA, 2)
        assert rep.r_unitary == sum(rep.per_slot_ranks)
        assert rep.r_uniform == min(2 * rep.rank_delta, rep.nonzero_rows)

    def test_report_roundtrip(self):
        rep = compare_queries(EXAMPLE3_DELTA, 2)
        assert report_from_dict(rep.to_dict()) == rep

    def test_scaling_invariance(self):
        rng = make_rng(10)
        for _ in range(20):
            delta = sample_cn_matrix(2, 3, rng)
            a = 0.3 + 1.7j
            for n in (1, 2, 3):
                assert r_unitary(delta, n) == r_unitary(a * delta, n)
                assert r_uniform(delta, n) == r_uniform(a * delta, n)

    def test_monotone_in_receive_antennas(self):
        for delta in (EXAMPLE1_DELTA, EXAMPLE3_DELTA, np.array([[1.0, 0.0], [1.0, 0.0]])):
            ru = [r_unitary(delta, n) for n in range(1, 5)]
            rf = [r_uniform(delta, n) for n in range(1, 5)]
            assert all(b >= a for a, b in zip(ru, ru[1:]))
            assert all(b >= a for a, b in zip(rf, rf[1:]))

    def test_bound_chain(self):
        rng = make_rng(11)
        for _ in range(50):
            L, T = int(rng.integers(1, 4)), int(rng.integers(1, 4))
            delta = sample_cn_matrix(L, T, rng)
            mask = rng.random((L, T)) < 0.4
            delta = np.where(mask, 0.0, delta)
            d = DifferenceMatrix(delta)
            for n in (1, 2, 3):
                assert r_uniform(d, n) <= d.nonzero_rows <= L
                assert r_unitary(d, n) <= T * min(n, L)


class TestEmpiricalRankCheck:
    def test_example1_passes(self):
        rep = empirical_rank_check(EXAMPLE1_DELTA, 2, 1000, make_rng(12))
        assert rep.passed
        assert rep.per_slot_fractions == (1.0, 1.0)
        assert rep.d_fraction == 1.0

    def test_zero_column_pattern(self):
        delta = np.array([[1.0, 0.0], [1.0, 0.0]])
        rep = empirical_rank_check(delta, 2, 1000, make_rng(13))
        assert rep.passed
        # slot 1 has full support (rank 2), slot 2 is empty (rank 0)
        assert rep.per_slot_fractions == (1.0, 1.0)

    def test_receive_limited_rank(self):
        delta = 2.0 * np.ones((3, 2))
        rep = empirical_rank_check(delta, 1, 1000, make_rng(14))
        assert rep.passed  # rank(E_t) == min(N=1, 3) == 1 every time

    def test_matches_per_matrix_rank_rule(self):
        # the batched rank rule must agree with numeric_rank draw by draw
        delta = EXAMPLE1_DELTA
        rng = make_rng(15)
        for _ in range(50):
            G = sample_cn_matrix(2, 2, rng)
            assert numeric_rank(build_E_t(delta, G, 1)) == 2
            assert numeric_rank(build_D(delta, G)) == 2
