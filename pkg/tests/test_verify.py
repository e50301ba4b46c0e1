"""Verification engine: the sphere average, residuals, kernels, the gap."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import projcub as pc
from projcub import _kernels, fields as F
from projcub import verify as V


class TestGamma:
    # frozen exact fractions, hand-derivable from the closed form
    EXACT = {
        ("R", 2, 4): Fraction(3, 8),
        ("R", 3, 4): Fraction(1, 5),
        ("C", 2, 4): Fraction(1, 3),
        ("R", 2, 6): Fraction(5, 16),
        ("R", 4, 6): Fraction(5, 64),
    }

    def test_exact_fractions(self):
        for (name, m, p), want in self.EXACT.items():
            assert math.isclose(pc.gamma(name, m, p), float(want), rel_tol=1e-14)

    def test_p2_is_one_over_m(self):
        for name in ("R", "C", "H"):
            for m in range(1, 7):
                assert math.isclose(pc.gamma(name, m, 2), 1.0 / m, rel_tol=1e-14)

    def test_m1_is_one(self):
        for name in ("R", "C", "H"):
            for p in (2, 6, 12):
                assert math.isclose(pc.gamma(name, 1, p), 1.0, rel_tol=1e-15)

    def test_decreasing_in_m_and_p(self):
        for name in ("R", "C", "H"):
            assert pc.gamma(name, 3, 6) < pc.gamma(name, 2, 6)
            assert pc.gamma(name, 3, 8) < pc.gamma(name, 3, 6)

    def test_monte_carlo_agreement_quick(self):
        for name, m, p in [("R", 3, 4), ("C", 2, 6), ("H", 2, 4)]:
            est, se = pc.monte_carlo_gamma(name, m, p, samples=200_000, seed=7)
            assert abs(est - pc.gamma(name, m, p)) <= 4 * se

    def test_rejects_odd_index(self):
        with pytest.raises(ValueError):
            pc.gamma("R", 2, 5)


class TestDirections:
    def test_counts_and_norms(self):
        for name, m in [("R", 4), ("C", 3), ("H", 2)]:
            field = pc.parse_field(name)
            det = V.standard_directions(name, m, n_random=0)
            want = m + 2 * (m * (m - 1) // 2) * field.delta
            assert det.shape == (want, m, field.delta)
            both = V.standard_directions(name, m, n_random=17, seed=3)
            assert both.shape[0] == want + 17
            assert np.allclose(F.norm(both), 1.0, atol=1e-12)

    def test_deterministic_for_seed(self):
        a = V.standard_directions("C", 3, n_random=10, seed=5)
        b = V.standard_directions("C", 3, n_random=10, seed=5)
        c = V.standard_directions("C", 3, n_random=10, seed=6)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_basis_first(self):
        det = V.standard_directions("R", 3, n_random=0)
        assert np.array_equal(det[0][:, 0], [1, 0, 0])
        assert np.array_equal(det[1][:, 0], [0, 1, 0])
        assert np.array_equal(det[2][:, 0], [0, 0, 1])


class TestKernels:
    def test_numba_matches_numpy(self):
        rng = np.random.default_rng(17)
        if not _kernels.HAVE_NUMBA:
            pytest.skip("numba unavailable")
        for name, m, p in [("R", 2, 4), ("R", 5, 16), ("C", 3, 8), ("H", 2, 12)]:
            field = pc.parse_field(name)
            nodes = rng.standard_normal((40, m, field.delta))
            nodes /= F.norm(nodes)[:, None, None]
            w = rng.random(40) + 0.1
            dirs = rng.standard_normal((9, m, field.delta))
            dirs /= F.norm(dirs)[:, None, None]
            a = _kernels.eval_sums(nodes, w, dirs, p, use_numba=True)
            b = _kernels.eval_sums(nodes, w, dirs, p, use_numba=False)
            assert np.allclose(a, b, rtol=1e-13)

    def test_eval_sums_matches_direct(self):
        rng = np.random.default_rng(18)
        field = pc.parse_field("C")
        nodes = rng.standard_normal((30, 3, 2))
        nodes /= F.norm(nodes)[:, None, None]
        w = rng.random(30)
        dirs = rng.standard_normal((5, 3, 2))
        dirs /= F.norm(dirs)[:, None, None]
        got = _kernels.eval_sums(nodes, w, dirs, 6, use_numba=False)
        for t in range(5):
            want = float(
                np.dot(w, F.abs_inner_pow(field, nodes, dirs[t : t + 1], 6))
            )
            assert math.isclose(got[t], want, rel_tol=1e-13)

    def test_chunked_equals_unchunked(self):
        rng = np.random.default_rng(19)
        nodes = rng.standard_normal((500, 2, 1))
        nodes /= F.norm(nodes)[:, None, None]
        w = rng.random(500)
        dirs = rng.standard_normal((4, 2, 1))
        dirs /= F.norm(dirs)[:, None, None]
        a = _kernels.eval_sums(nodes, w, dirs, 8, node_chunk=64, use_numba=False)
        b = _kernels.eval_sums(nodes, w, dirs, 8, node_chunk=10**6, use_numba=False)
        assert np.allclose(a, b, rtol=1e-14)

    def test_max_sq_abs_inner_vs_bruteforce(self):
        rng = np.random.default_rng(20)
        for name in ("R", "C", "H"):
            field = pc.parse_field(name)
            nodes = rng.standard_normal((60, 2, field.delta))
            nodes /= F.norm(nodes)[:, None, None]
            got = _kernels.max_sq_abs_inner(nodes, row_block=16)
            gram = F.abs_inner_matrix(field, nodes, nodes)
            iu = np.triu_indices(60, k=1)
            want = float((gram[iu] ** 2).max())
            assert math.isclose(got, want, rel_tol=1e-12)


class TestGap:
    def test_exact_small(self):
        f = pc.construct("R", 2, 6)
        gap = pc.min_projective_gap("R", f.nodes)
        gram = F.abs_inner_matrix(f.field, f.nodes, f.nodes)
        np.fill_diagonal(gram, 0.0)
        assert math.isclose(gap, 1.0 - gram.max(), rel_tol=1e-12)

    def test_single_node_is_inf(self):
        f = pc.base_singleton("C", 4)
        assert pc.min_projective_gap("C", f.nodes) == math.inf

    def test_detects_planted_duplicate_large(self):
        # above the exact-path limit: plant an exact duplicate (up to a
        # projective phase) and require the scan to find it
        rng = np.random.default_rng(21)
        n = V.EXACT_GAP_LIMIT + 5000
        nodes = rng.standard_normal((n, 2, 2))
        nodes /= F.norm(nodes)[:, None, None]
        phase = np.array([math.cos(0.7), math.sin(0.7)])
        dup = np.stack([F.scalar_mul(pc.FIELD_C, e, phase) for e in nodes[123]])
        nodes[n - 1] = dup
        gap = pc.min_projective_gap("C", nodes)
        assert gap <= 1e-12

    def test_detects_near_duplicate_large(self):
        rng = np.random.default_rng(22)
        n = V.EXACT_GAP_LIMIT + 5000
        nodes = rng.standard_normal((n, 3, 1))
        nodes /= F.norm(nodes)[:, None, None]
        tweak = nodes[77] + 3e-5 * rng.standard_normal((3, 1))
        nodes[n - 1] = tweak / F.norm(tweak[None])[0]
        gap = pc.min_projective_gap("R", nodes)
        brute = F.abs_inner(pc.FIELD_R, nodes[77][None], nodes[n - 1][None])[0]
        assert gap <= max(1.0 - brute, 1e-15) * 1.0000001
        assert gap < 1e-9

    def test_scan_agrees_with_exact_when_below_threshold(self):
        # construct a set whose true minimum gap is below the certification
        # radius, then compare scan and exact paths directly
        rng = np.random.default_rng(23)
        nodes = rng.standard_normal((3000, 2, 1))
        nodes /= F.norm(nodes)[:, None, None]
        tweak = nodes[5] + 1e-5 * rng.standard_normal((2, 1))
        nodes[2999] = tweak / F.norm(tweak[None])[0]
        exact = V._gap_exact(pc.FIELD_R, nodes)
        scanned = V._gap_scan(pc.FIELD_R, nodes)
        assert math.isclose(exact, scanned, rel_tol=1e-9, abs_tol=1e-15)


class TestResidual:
    def test_residual_scale_invariant(self):
        f = pc.construct("C", 2, 6)
        y = V.standard_directions("C", 2, n_random=1, seed=9)[-1]
        r1 = pc.residual(f, y)
        r2 = pc.residual(f, 3.7 * y)
        assert math.isclose(r1, r2, rel_tol=1e-8, abs_tol=1e-12)

    def test_residual_zero_direction_rejected(self):
        f = pc.construct("R", 2, 4)
        with pytest.raises(ValueError):
            pc.residual(f, np.zeros((2, 1)))

    def test_flat_direction_accepted(self):
        f = pc.construct("C", 2, 6)
        y = V.standard_directions("C", 2, n_random=1, seed=4)[-1]
        assert math.isclose(
            pc.residual(f, y), pc.residual(f, F.flatten(y[None])[0]), rel_tol=1e-12
        )


class TestCheck:
    def test_deterministic(self):
        f = pc.construct("C", 3, 6)
        a = pc.check(f, samples=64, seed=11, use_numba=False)
        b = pc.check(f, samples=64, seed=11, use_numba=False)
        assert a == b

    def test_perturbed_weight_fails(self):
        f = pc.construct("R", 3, 6)
        w = f.weights.copy()
        w[0] += 1e-3
        bad = pc.CubatureFormula(f.field, f.m, f.index, f.nodes, w)
        rep = pc.check(bad, samples=64, use_numba=False)
        assert not rep.passed
        assert rep.weight_sum_error > 1e-12
        assert rep.max_rel_residual > 1e-8

    def test_perturbed_node_fails(self):
        f = pc.construct("R", 3, 6)
        nodes = f.nodes.copy()
        nodes[0] *= 1.0 + 1e-6
        bad = pc.CubatureFormula(f.field, f.m, f.index, nodes, f.weights)
        rep = pc.check(bad, samples=64, use_numba=False)
        assert rep.max_norm_error > 1e-12
        assert not rep.passed

    def test_default_tol_scaling(self):
        assert pc.default_tol(100) == 1e-8
        assert pc.default_tol(10_000) == 1e-8
        assert math.isclose(pc.default_tol(40_000), 2e-8, rel_tol=1e-12)

    def test_report_to_dict_json_safe(self):
        import json

        f = pc.base_singleton("R", 4)
        rep = pc.check(f, samples=16, use_numba=False)
        d = rep.to_dict()
        assert d["min_projective_gap"] is None  # inf mapped for JSON
        json.dumps(d)

    def test_failures_empty_on_pass(self):
        f = pc.construct("R", 2, 6)
        rep = pc.check(f, samples=64, use_numba=False)
        assert rep.passed and rep.failures() == []


class TestEmbedding:
    def test_rescaled_vectors_norm_identity(self):
        f = pc.construct("C", 2, 6)
        ys = V.standard_directions("C", 2, n_random=50, seed=2)
        assert pc.embedding_defect(f, ys) <= 1e-12

    def test_nonunit_directions(self):
        f = pc.construct("R", 3, 4)
        rng = np.random.default_rng(24)
        ys = rng.standard_normal((20, 3, 1)) * 2.5
        assert pc.embedding_defect(f, ys) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_residual_invariant_under_unit_scalar_property(seed):
    """residual(y) == residual(y * alpha) for unit scalars alpha."""
    rng = np.random.default_rng(seed)
    f = pc.construct("H", 2, 6)
    y = rng.standard_normal((2, 4))
    y /= F.norm(y[None])[0]
    a = rng.standard_normal(4)
    a /= np.linalg.norm(a)
    ya = np.stack([F.scalar_mul(pc.FIELD_H, e, a) for e in y])
    r1 = pc.residual(f, y)
    r2 = pc.residual(f, ya)
    assert math.isclose(r1, r2, rel_tol=1e-6, abs_tol=1e-13)
