import numpy as np
import pytest

from biharmonic_lab.liealg import GroupKind, bracket, expm, qmul
from biharmonic_lab.spaces import (
    ComplexProjective,
    EuclideanType,
    HomogeneousPoint,
    QuaternionProjective,
    Sphere,
    make_space,
)


def test_projectors_split_algebra(model, rng):
    for _ in range(20):
        X = model.random_algebra(rng)
        K, M = model.project(X)
        np.testing.assert_array_equal(K + M, X)
        np.testing.assert_array_equal(model.proj_m(M), M)
        np.testing.assert_array_equal(model.proj_k(K), K)
        assert np.all(model.proj_k(M) == 0)


def test_cartan_bracket_relations(model, rng):
    for _ in range(100):
        k1, k2 = model.random_k(rng), model.random_k(rng)
        m1, m2 = model.random_m(rng), model.random_m(rng)
        assert np.abs(model.proj_m(bracket(k1, k2))).max() < 1e-12
        assert np.abs(model.proj_k(bracket(k1, m1))).max() < 1e-12
        assert np.abs(model.proj_m(bracket(m1, m2))).max() < 1e-12
    if isinstance(model, EuclideanType):
        assert np.abs(bracket(m1, m2)).max() == 0


def test_chart_round_trip(model, rng):
    c = model.random_m_coords(rng)
    X = model.m_from_coords(c)
    np.testing.assert_array_equal(model.m_coords(X), c)
    model.check_algebra(X)
    assert np.all(model.proj_k(X) == 0)


def test_chart_shape_errors():
    with pytest.raises(ValueError):
        Sphere(3).m_from_coords(np.zeros(2))
    with pytest.raises(ValueError):
        Sphere(2).m_from_coords(np.array([1j, 0]))
    with pytest.raises(ValueError):
        QuaternionProjective(2).m_from_coords(np.zeros(4))


def test_check_algebra_rejects(model):
    with pytest.raises(ValueError):
        model.check_algebra(np.eye(model.N))


def test_dimensions():
    assert [m.N for m in (Sphere(3), ComplexProjective(3), QuaternionProjective(3), EuclideanType(3))] == [4, 4, 8, 4]
    with pytest.raises(ValueError):
        Sphere(0)
    with pytest.raises(KeyError):
        make_space("torus", 2)


def test_base_point(model):
    p = model.base_point()
    if model.name == "euclidean":
        np.testing.assert_array_equal(p.coords, np.zeros(model.n))
    elif model.name == "hpn":
        np.testing.assert_array_equal(p.coords[0], [1, 0, 0, 0])
    else:
        np.testing.assert_array_equal(p.coords, np.eye(model.N)[0])


def test_isotropy_fixes_base_point(model, rng):
    o = model.base_point()
    for _ in range(10):
        k = model.random_isotropy(rng)
        assert model.distance(o, model.project_point(k)) < 1e-12


def test_projection_is_right_invariant(model, rng):
    # psi and psi k project to the same point
    for _ in range(10):
        g = model.random_group(rng)
        k = model.random_isotropy(rng)
        p, q = model.project_point(g), model.project_point(g @ k)
        assert model.distance(p, q) < 1e-12


def test_project_point_checks_constraint(model):
    with pytest.raises(ValueError):
        model.project_point(2 * np.eye(model.N))


def test_points_have_unit_representative(rank_one, rng):
    for _ in range(10):
        p = rank_one.project_point(rank_one.random_group(rng))
        assert abs(np.linalg.norm(p.coords) - 1) < 1e-10


def test_cpn_gauge_alignment(rng):
    M = ComplexProjective(2)
    p = M.project_point(M.random_group(rng))
    q = HomogeneousPoint("cpn", np.exp(0.7j) * p.coords)
    assert M.distance(p, q) < 1e-14
    a = M.align(q)
    assert abs(a.coords[0].imag) < 1e-15 and a.coords[0].real > 0


def test_hpn_gauge_is_left_quaternion(rng):
    M = QuaternionProjective(2)
    p = M.project_point(M.random_group(rng))
    lam = rng.normal(size=4)
    lam /= np.linalg.norm(lam)
    q = HomogeneousPoint("hpn", qmul(lam, p.coords))
    assert M.distance(p, q) < 1e-13
    # right multiplication is not a gauge change
    r = HomogeneousPoint("hpn", qmul(p.coords, lam))
    assert M.distance(p, r) > 1e-3


def test_hpn_model_is_symplectic(rng):
    M = QuaternionProjective(3)
    X = M.m_from_coords(rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3)))
    assert expm(X, GroupKind.SYMPLECTIC).drift() < 1e-12


def test_flat_export():
    p = HomogeneousPoint("cpn", np.array([1 + 2j, 3 - 1j]))
    np.testing.assert_array_equal(p.flat(), [1, 2, 3, -1])
    with pytest.raises(ValueError):
        p.coords[0] = 0
