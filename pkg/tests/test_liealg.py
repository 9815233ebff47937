import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biharmonic_lab.liealg import (
    QUAT_I,
    QUAT_J,
    QUAT_K,
    QUAT_ONE,
    GroupElement,
    GroupKind,
    Quaternion,
    as_element,
    bracket,
    constraint_residual,
    expm,
    expm_rank_one,
    infer_kind,
    qconj,
    qmul,
    quat_embed,
)
from biharmonic_lab.spaces import Sphere

finite = st.floats(-10, 10, allow_nan=False)
quats = st.builds(Quaternion, finite, finite, finite, finite)


def _sphere_A(u):
    return Sphere(len(u)).m_from_coords(np.asarray(u, dtype=float))


def test_bracket_self_is_zero(rng):
    X = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert np.all(bracket(X, X) == 0)


def test_bracket_of_sphere_axes():
    e1, e2 = np.eye(3)[0], np.eye(3)[1]
    got = bracket(_sphere_A(e1), _sphere_A(e2))
    # direct product: A(u)A(v) = [[-u.v, 0], [0, -u v^T]] on the blocks
    expected = np.zeros((4, 4))
    expected[1:, 1:] = np.outer(e2, e1) - np.outer(e1, e2)
    np.testing.assert_allclose(got, expected, atol=0)


def test_bracket_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        bracket(np.eye(2), np.eye(3))


def test_as_element_rejects_nonfinite():
    with pytest.raises(ValueError):
        as_element([[np.nan, 0], [0, 1]])
    with pytest.raises(ValueError):
        as_element(np.zeros((2, 3)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_jacobi_bilinear_antisymmetric(seed):
    r = np.random.default_rng(seed)
    X, Y, Z = (r.uniform(-1, 1, (5, 5)) + 1j * r.uniform(-1, 1, (5, 5)) for _ in range(3))
    a, b = r.uniform(-2, 2, 2)
    jac = bracket(X, bracket(Y, Z)) + bracket(Y, bracket(Z, X)) + bracket(Z, bracket(X, Y))
    assert np.abs(jac).max() < 1e-12
    np.testing.assert_allclose(bracket(a * X + b * Y, Z), a * bracket(X, Z) + b * bracket(Y, Z), atol=1e-12)
    np.testing.assert_allclose(bracket(X, Y), -bracket(Y, X), atol=0)


def test_expm_zero_is_identity():
    g = expm(np.zeros((3, 3)))
    np.testing.assert_array_equal(g.matrix, np.eye(3))


def _series_exp(X, terms=60):
    out = np.eye(X.shape[0], dtype=complex)
    term = np.eye(X.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ X / k
        out = out + term
    return out


@pytest.mark.parametrize("t", [0.3, 1.0, 2.5])
def test_expm_sphere_axis_is_plane_rotation(t):
    X = t * _sphere_A([1.0, 0.0, 0.0])
    g = expm(X)
    assert g.kind is GroupKind.ORTHOGONAL
    expected = np.eye(4)
    expected[:2, :2] = [[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]]
    np.testing.assert_allclose(g.matrix, expected, atol=1e-13)
    np.testing.assert_allclose(_series_exp(X), expected, atol=1e-13)


def test_expm_inverse(rng):
    X = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    np.testing.assert_allclose((expm(X) @ expm(-X)).matrix, np.eye(4), atol=1e-12)


def test_expm_preserves_group(model, rng):
    for _ in range(50):
        X = model.random_algebra(rng)
        X *= rng.uniform(0, 5) / np.linalg.norm(X)
        assert expm(X, model.kind).drift() <= 1e-10


def test_infer_kind(model, rng):
    X = model.random_algebra(rng)
    kind = infer_kind(X)
    # real skew matrices are reported as orthogonal; anything else as its own family
    assert algebra_ok(X, kind)


def algebra_ok(X, kind):
    from biharmonic_lab.liealg import algebra_residual

    return algebra_residual(X, kind) < 1e-10


def test_rank_one_fast_path_matches(rank_one, rng):
    for _ in range(100):
        X = rank_one.random_m(rng, scale=rng.uniform(0.1, 3))
        np.testing.assert_allclose(expm_rank_one(X), expm(X).matrix, atol=1e-12)


def test_rank_one_fast_path_refuses_general(rng):
    X = Sphere(3).random_algebra(rng)
    with pytest.raises(ValueError):
        expm_rank_one(X)


def test_group_element_operations(rng):
    g = expm(Sphere(2).random_algebra(rng), GroupKind.ORTHOGONAL)
    np.testing.assert_allclose((g @ g.inv()).matrix, np.eye(3), atol=1e-13)
    assert GroupElement.identity(3).drift() == 0
    assert constraint_residual(2 * np.eye(3), GroupKind.ORTHOGONAL) > 1


def test_quat_embed_examples():
    np.testing.assert_array_equal(quat_embed(QUAT_ONE), np.eye(2))
    I = quat_embed(QUAT_I)
    np.testing.assert_allclose(I @ I, -np.eye(2), atol=0)
    np.testing.assert_allclose(quat_embed(QUAT_I) @ quat_embed(QUAT_J), quat_embed(QUAT_K), atol=0)
    assert QUAT_I * QUAT_J == QUAT_K
    assert QUAT_J * QUAT_I == -QUAT_K


@settings(max_examples=200, deadline=None)
@given(quats, quats)
def test_quat_embed_is_multiplicative(p, q):
    lhs = quat_embed(p * q)
    rhs = quat_embed(p) @ quat_embed(q)
    assert np.abs(lhs - rhs).max() <= 1e-12 * max(1.0, abs(p) * abs(q))


@settings(max_examples=100, deadline=None)
@given(quats)
def test_quat_norm_and_conjugate(q):
    prod = qmul(q.components, qconj(q.components))
    np.testing.assert_allclose(prod, [abs(q) ** 2, 0, 0, 0], atol=1e-9 * max(1, abs(q) ** 2))
    assert Quaternion.from_complex_pair(*q.complex_pair()) == q


def test_quaternion_rejects_nan():
    with pytest.raises(ValueError):
        Quaternion(float("nan"))
