"""Construction: base cases, the dimension lift, descent and regrouping."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import projcub as pc
from projcub import fields as F
from projcub.construct import nu_constructive, unit_sphere_rule

SQ13 = math.sqrt(1.0 / 3.0)
SQ23 = math.sqrt(2.0 / 3.0)


class TestBaseCases:
    def test_singleton(self):
        f = pc.base_singleton("C", 6)
        assert f.n == 1 and f.index == 6
        assert f.nodes[0, 0, 0] == 1.0 and np.all(f.nodes[0, 1:] == 0.0)

    def test_orthonormal(self):
        for name in ("R", "C", "H"):
            f = pc.base_orthonormal(name, 4)
            assert f.n == 4 and f.index == 2
            gram = F.abs_inner_matrix(f.field, f.nodes, f.nodes)
            assert np.allclose(gram, np.eye(4), atol=1e-15)
            assert np.allclose(f.weights, 0.25, atol=1e-16)

    def test_polygon_counts(self):
        for s in range(1, 21):
            f = pc.base_polygon(s)
            assert f.n == s + 1
            assert f.field.delta == 1 and f.m == 2 and f.index == 2 * s

    def test_polygon_is_podal(self):
        # no antipodal/coincident pair: all pairwise |<x,y>| < 1
        f = pc.base_polygon(7)
        gram = F.abs_inner_matrix(f.field, f.nodes, f.nodes)
        np.fill_diagonal(gram, 0.0)
        assert gram.max() < 1.0 - 1e-6


class TestHandFormulas:
    def test_triangle(self):
        f = pc.construct("R", 2, 4)
        assert f.n == 3
        want = np.array([[1.0, 0.0], [0.5, math.sqrt(3) / 2], [0.5, -math.sqrt(3) / 2]])
        assert np.allclose(f.nodes[:, :, 0], want, atol=1e-14)
        assert np.allclose(f.weights, 1.0 / 3.0, atol=1e-15)

    def test_complex_m2_p4(self):
        f = pc.construct("C", 2, 4)
        assert f.n == 6
        e1 = np.zeros((2, 2))
        e1[0, 0] = 1.0
        # apex block first: both collapse to e1 exactly, weight 1/8 each
        assert np.allclose(f.nodes[0], e1, atol=1e-15)
        assert np.allclose(f.nodes[1], e1, atol=1e-15)
        assert np.allclose(f.weights[:2], 0.125, atol=1e-15)
        # then sign families, rotation-major, + before -
        want = np.array(
            [
                [[SQ13, 0.0], [SQ23, 0.0]],
                [[SQ13, 0.0], [-SQ23, 0.0]],
                [[SQ13, 0.0], [0.0, -SQ23]],
                [[SQ13, 0.0], [0.0, SQ23]],
            ]
        )
        assert np.allclose(f.nodes[2:], want, atol=1e-14)
        assert np.allclose(f.weights[2:], 3.0 / 16.0, atol=1e-15)
        # exact identity at y = e1: sum w |x_k[0]|^4 = gamma = 1/3
        lhs = math.fsum(
            (f.weights * F.abs_inner_pow(f.field, f.nodes, e1[None], 4)).tolist()
        )
        assert math.isclose(lhs, 1.0 / 3.0, rel_tol=1e-14)

    def test_r3_p4_seven_nodes(self):
        f = pc.construct("R", 3, 4)
        assert f.n == 7

    def test_trivial_cases(self):
        assert pc.construct("R", 1, 6).n == 1
        assert pc.construct("H", 1, 8).n == 1
        assert pc.construct("C", 4, 2).n == 4  # orthonormal basis at p = 2


class TestSphereRule:
    def test_real_is_point(self):
        for p in (4, 6, 10, 16):
            assert unit_sphere_rule("R", p).n == 1

    def test_complex_is_half_polygon(self):
        for p in (4, 6, 8, 10, 12, 14, 16):
            r = unit_sphere_rule("C", p)
            assert r.n == p // 4 + 1
            assert r.field.delta == 1 and r.m == 2

    def test_quaternion_counts(self):
        want = {4: 4, 6: 4, 8: 15, 10: 15, 12: 32, 14: 32, 16: 75}
        for p, n in want.items():
            r = unit_sphere_rule("H", p)
            assert r.n == n, p
            assert r.field.delta == 1 and r.m == 4
            assert nu_constructive("H", p) == n

    def test_constructive_nu_matches_rule(self):
        for name in ("R", "C", "H"):
            for p in (4, 6, 8, 12, 16):
                assert nu_constructive(name, p) == unit_sphere_rule(name, p).n


class TestCounts:
    # frozen from the closed-form recursion (independent arithmetic)
    GRID = {
        ("R", 3, 6): 16,
        ("R", 5, 6): 256,
        ("R", 4, 12): 259,
        ("C", 3, 8): 183,
        ("C", 4, 10): 5832,
        ("H", 3, 4): 100,
        ("H", 2, 8): 75,
        ("H", 3, 16): 405075,
    }

    def test_spot_counts(self):
        for (name, m, p), n in self.GRID.items():
            assert pc.construct(name, m, p).n == n, (name, m, p)

    def test_matches_iterated_bound(self):
        for name, m, p in self.GRID:
            f = pc.construct(name, m, p)
            want = pc.iterated_bound(
                name, p, 1, m - 1, nu_value=nu_constructive(name, p)
            )
            assert f.n == want


class TestCap:
    def test_budget_error_is_early(self):
        with pytest.raises(pc.NodeBudgetError, match="cap"):
            pc.construct("C", 5, 16, cap=1000)

    def test_env_cap(self, monkeypatch):
        monkeypatch.setenv(pc.NODE_CAP_ENV, "10")
        with pytest.raises(pc.NodeBudgetError):
            pc.construct("R", 5, 6)
        monkeypatch.setenv(pc.NODE_CAP_ENV, "300")
        assert pc.construct("R", 5, 6).n == 256

    def test_bad_env_value(self, monkeypatch):
        monkeypatch.setenv(pc.NODE_CAP_ENV, "many")
        with pytest.raises(ValueError):
            pc.default_node_cap()

    def test_default(self, monkeypatch):
        monkeypatch.delenv(pc.NODE_CAP_ENV, raising=False)
        assert pc.default_node_cap() == pc.DEFAULT_NODE_CAP == 10_000_000


class TestDescent:
    def test_complex_descent_32(self):
        src = pc.construct("C", 2, 6)
        real = pc.field_descent(src)
        assert real.field.delta == 1 and real.m == 4 and real.index == 6
        assert real.n == 32
        rep = pc.check(real, samples=256, use_numba=False)
        assert rep.passed, rep.failures()

    def test_descent_is_podal(self):
        real = pc.field_descent(pc.construct("C", 2, 6))
        gram = F.abs_inner_matrix(real.field, real.nodes, real.nodes)
        np.fill_diagonal(gram, 0.0)
        assert gram.max() < 1.0 - 1e-9

    def test_quaternion_descent(self):
        # p = 2 mod 4: the source has no apex block, so descent stays podal
        src = pc.construct("H", 2, 6)
        real = pc.field_descent(src)
        assert real.field.delta == 1 and real.m == 8 and real.index == 6
        rep = pc.check(real, samples=128, use_numba=False)
        assert rep.passed, rep.failures()

    def test_descent_of_apex_source_inherits_coincidence(self):
        # p = 0 mod 4 over H: the collapsed apex nodes each produce an
        # identical circle orbit, so the real output has coincident nodes;
        # the identity itself still holds exactly.
        real = pc.field_descent(pc.construct("H", 2, 4))
        rep = pc.check(real, samples=128, use_numba=False)
        assert rep.min_projective_gap == 0.0
        assert rep.max_rel_residual <= 1e-10
        assert not rep.passed

    def test_roundtrip_project_back(self):
        src = pc.construct("C", 2, 6)
        real = pc.field_descent(src)
        back = pc.project_to_K(real, "C")
        assert back.m == 2 and back.index == 6
        assert back.n == src.n  # the circle factor collapses projectively
        rep = pc.check(back, samples=128, use_numba=False)
        assert rep.passed, rep.failures()

    def test_project_requires_divisible_dimension(self):
        f = pc.construct("R", 3, 4)
        with pytest.raises(ValueError):
            pc.project_to_K(f, "C")


class TestStructure:
    def test_lift_metadata_trace(self):
        f = pc.construct("C", 3, 6)
        meta = f.metadata
        assert meta["rule"] == "lift"
        assert meta["source_n"] == 8 and meta["nu"] == 2 and meta["radial_K"] == 2
        assert meta["apex"] is False

    def test_weights_sum_to_one(self):
        for name, m, p in [("R", 4, 6), ("C", 2, 10), ("H", 2, 6)]:
            f = pc.construct(name, m, p)
            assert abs(math.fsum(f.weights.tolist()) - 1.0) <= 1e-14

    def test_nodes_unit_and_canonical(self):
        for name, m, p in [("R", 4, 6), ("C", 3, 8), ("H", 2, 8)]:
            f = pc.construct(name, m, p)
            assert np.max(np.abs(F.norm(f.nodes) - 1.0)) <= 1e-12
            c = F.canonicalize_all(f.field, f.nodes)
            assert np.allclose(c, f.nodes, atol=1e-14)

    def test_apex_block_structure(self):
        # p = 0 mod 4 over C: the first nu nodes are the collapsed apex
        f = pc.construct("C", 2, 8)
        nu = 3
        e1 = np.zeros((2, 2))
        e1[0, 0] = 1.0
        for k in range(nu):
            assert np.allclose(f.nodes[k], e1, atol=1e-14)
        gram = F.abs_inner_matrix(f.field, f.nodes[nu:], f.nodes[nu:])
        np.fill_diagonal(gram, 0.0)
        assert gram.max() < 1.0 - 1e-9  # non-apex nodes are all distinct

    def test_p2mod4_has_no_apex(self):
        f = pc.construct("C", 2, 6)
        gram = F.abs_inner_matrix(f.field, f.nodes, f.nodes)
        np.fill_diagonal(gram, 0.0)
        assert gram.max() < 1.0 - 1e-9


@settings(max_examples=25, deadline=None)
@given(
    st.sampled_from(["R", "C", "H"]),
    st.integers(min_value=2, max_value=3),
    st.sampled_from([4, 6, 8, 10]),
)
def test_construct_identity_property(name, m, p):
    """Every constructed formula satisfies the integral identity (the
    in-construction self-test would raise otherwise); re-assert externally."""
    f = pc.construct(name, m, p)
    rep = pc.check(f, samples=64, use_numba=False)
    assert rep.max_rel_residual <= 1e-10
    assert rep.weight_sum_error <= 1e-12
    assert rep.max_norm_error <= 1e-12
