"""Scalar and vector arithmetic over the three coefficient fields."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from projcub import FIELD_C, FIELD_H, FIELD_R, FIELDS, parse_field
from projcub import fields as F

RNG = np.random.default_rng(20260823)


def unit_scalar(field, rng):
    v = rng.standard_normal(field.delta)
    return v / np.linalg.norm(v)


def random_vectors(field, m, n, rng):
    x = rng.standard_normal((n, m, field.delta))
    return x / F.norm(x)[:, None, None]


class TestParse:
    def test_names(self):
        assert parse_field("R") is FIELD_R
        assert parse_field("C") is FIELD_C
        assert parse_field("H") is FIELD_H
        assert parse_field(FIELD_C) is FIELD_C

    def test_deltas(self):
        assert [f.delta for f in FIELDS.values()] == [1, 2, 4]

    def test_unknown(self):
        with pytest.raises(ValueError):
            parse_field("Q")


class TestScalarMul:
    def test_quaternion_units(self):
        one = np.array([1.0, 0, 0, 0])
        i = np.array([0.0, 1, 0, 0])
        j = np.array([0.0, 0, 1, 0])
        k = np.array([0.0, 0, 0, 1])
        mul = lambda a, b: F.scalar_mul(FIELD_H, a, b)
        assert np.array_equal(mul(i, j), k)
        assert np.array_equal(mul(j, k), i)
        assert np.array_equal(mul(k, i), j)
        assert np.array_equal(mul(j, i), -k)
        assert np.array_equal(mul(i, i), -one)
        assert np.array_equal(mul(j, j), -one)
        assert np.array_equal(mul(k, k), -one)

    def test_identity(self):
        rng = np.random.default_rng(1)
        for field in FIELDS.values():
            one = np.zeros(field.delta)
            one[0] = 1.0
            a = rng.standard_normal(field.delta)
            assert np.allclose(F.scalar_mul(field, one, a), a, atol=0)

    def test_complex_matches_python_complex(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            a = rng.standard_normal(2)
            b = rng.standard_normal(2)
            got = F.scalar_mul(FIELD_C, a, b)
            want = complex(*a) * complex(*b)
            assert math.isclose(got[0], want.real, rel_tol=1e-14, abs_tol=1e-14)
            assert math.isclose(got[1], want.imag, rel_tol=1e-14, abs_tol=1e-14)

    def test_modulus_multiplicative(self):
        rng = np.random.default_rng(3)
        for field in FIELDS.values():
            for _ in range(1000 // 3):
                a = rng.standard_normal(field.delta)
                b = rng.standard_normal(field.delta)
                ab = F.scalar_mul(field, a, b)
                lhs = np.linalg.norm(ab)
                rhs = np.linalg.norm(a) * np.linalg.norm(b)
                assert math.isclose(lhs, rhs, rel_tol=1e-14)

    def test_associative(self):
        rng = np.random.default_rng(4)
        for field in FIELDS.values():
            a, b, c = (rng.standard_normal(field.delta) for _ in range(3))
            left = F.scalar_mul(field, F.scalar_mul(field, a, b), c)
            right = F.scalar_mul(field, a, F.scalar_mul(field, b, c))
            assert np.allclose(left, right, rtol=1e-13, atol=1e-13)

    def test_conj_reverses_products(self):
        rng = np.random.default_rng(5)
        a = rng.standard_normal(4)
        b = rng.standard_normal(4)
        lhs = F.scalar_conj(F.scalar_mul(FIELD_H, a, b))
        rhs = F.scalar_mul(FIELD_H, F.scalar_conj(b), F.scalar_conj(a))
        assert np.allclose(lhs, rhs, rtol=1e-13, atol=1e-13)


class TestInner:
    def test_orthonormality(self):
        for field in FIELDS.values():
            e1 = F.basis_vector(field, 3, 0)
            e2 = F.basis_vector(field, 3, 1)
            g11 = F.inner(field, e1, e1)
            g12 = F.inner(field, e1, e2)
            assert g11[0] == 1.0 and np.all(g11[1:] == 0.0)
            assert np.all(g12 == 0.0)

    def test_conjugate_symmetry(self):
        rng = np.random.default_rng(6)
        for field in FIELDS.values():
            x = rng.standard_normal((4, field.delta))
            y = rng.standard_normal((4, field.delta))
            assert np.allclose(
                F.inner(field, y, x),
                F.scalar_conj(F.inner(field, x, y)),
                rtol=1e-13,
                atol=1e-13,
            )

    def test_right_module_rule(self):
        # <x a, y b> = conj(a) <x, y> b
        rng = np.random.default_rng(7)
        for field in FIELDS.values():
            x = rng.standard_normal((3, field.delta))
            y = rng.standard_normal((3, field.delta))
            a = unit_scalar(field, rng)
            b = unit_scalar(field, rng)
            xa = np.stack([F.scalar_mul(field, xi, a) for xi in x])
            yb = np.stack([F.scalar_mul(field, yi, b) for yi in y])
            lhs = F.inner(field, xa, yb)
            rhs = F.scalar_mul(
                field, F.scalar_conj(a), F.scalar_mul(field, F.inner(field, x, y), b)
            )
            assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-13)

    def test_abs_inner_invariant_under_unit_scalars(self):
        rng = np.random.default_rng(8)
        for field in FIELDS.values():
            x = random_vectors(field, 3, 5, rng)
            y = random_vectors(field, 3, 5, rng)
            a = unit_scalar(field, rng)
            ya = np.stack(
                [np.stack([F.scalar_mul(field, e, a) for e in yi]) for yi in y]
            )
            assert np.allclose(
                F.abs_inner(field, x, y), F.abs_inner(field, x, ya), rtol=1e-12
            )

    def test_re_inner_is_euclidean(self):
        rng = np.random.default_rng(9)
        for field in FIELDS.values():
            a = rng.standard_normal(field.delta)
            b = rng.standard_normal(field.delta)
            assert math.isclose(F.re_inner(a, b), float(a @ b), rel_tol=1e-15)

    def test_abs_inner_pow_rejects_odd(self):
        x = np.zeros((1, 2, 1))
        x[0, 0, 0] = 1.0
        with pytest.raises(ValueError):
            F.abs_inner_pow(FIELD_R, x, x, 3)

    def test_abs_inner_matrix(self):
        rng = np.random.default_rng(10)
        for field in FIELDS.values():
            xs = random_vectors(field, 2, 4, rng)
            ys = random_vectors(field, 2, 3, rng)
            mat = F.abs_inner_matrix(field, xs, ys)
            assert mat.shape == (4, 3)
            for i in range(4):
                for j in range(3):
                    want = F.abs_inner(field, xs[i : i + 1], ys[j : j + 1])[0]
                    assert math.isclose(mat[i, j], want, rel_tol=1e-13, abs_tol=1e-15)


class TestShapes:
    def test_flatten_round_trip(self):
        rng = np.random.default_rng(11)
        for field in FIELDS.values():
            x = rng.standard_normal((5, 3, field.delta))
            flat = F.flatten(x)
            assert flat.shape == (5, 3 * field.delta)
            assert np.array_equal(F.unflatten(flat, field), x)

    def test_norm_matches_flat_norm(self):
        rng = np.random.default_rng(12)
        for field in FIELDS.values():
            x = rng.standard_normal((6, 4, field.delta))
            assert np.allclose(
                F.norm(x), np.linalg.norm(F.flatten(x), axis=1), rtol=1e-15
            )


class TestCanonicalize:
    def test_pivot_made_real_positive(self):
        rng = np.random.default_rng(13)
        for field in FIELDS.values():
            x = random_vectors(field, 4, 50, rng)
            c = F.canonicalize_all(field, x)
            mods = F.scalar_abs(c)
            first = np.argmax(mods > 1e-12, axis=1)
            piv = c[np.arange(50), first, :]
            assert np.all(piv[:, 0] > 0)
            assert np.all(np.abs(piv[:, 1:]) < 1e-13)

    def test_projective_class_preserved(self):
        rng = np.random.default_rng(14)
        for field in FIELDS.values():
            x = random_vectors(field, 3, 20, rng)
            c = F.canonicalize_all(field, x)
            # same projective point: |<x_i, c_i>| = 1, and norms unchanged
            diag = np.array(
                [F.abs_inner(field, x[i : i + 1], c[i : i + 1])[0] for i in range(20)]
            )
            assert np.allclose(diag, 1.0, atol=1e-12)
            assert np.allclose(F.norm(c), 1.0, atol=1e-12)

    def test_matches_single_node_canonicalize(self):
        rng = np.random.default_rng(15)
        for field in FIELDS.values():
            x = random_vectors(field, 3, 10, rng)
            c_all = F.canonicalize_all(field, x)
            for i in range(10):
                c_one = F.canonicalize(field, x[i])
                assert np.allclose(c_all[i], c_one, rtol=1e-13, atol=1e-14)

    def test_idempotent(self):
        rng = np.random.default_rng(16)
        for field in FIELDS.values():
            x = random_vectors(field, 3, 10, rng)
            c1 = F.canonicalize_all(field, x)
            c2 = F.canonicalize_all(field, c1)
            assert np.allclose(c1, c2, rtol=0, atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from(["R", "C", "H"]),
    st.integers(min_value=1, max_value=5),
    st.integers(min_value=0, max_value=2**31 - 1),
)
def test_gram_diag_property(name, m, seed):
    """|<x,x>| = ||x||^2 for random vectors, any field and dimension."""
    field = parse_field(name)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((1, m, field.delta))
    g = F.abs_inner(field, x, x)[0]
    assert math.isclose(g, float(F.norm(x)[0] ** 2), rel_tol=1e-12)
