import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biharmonic_lab.curves import (
    AnalyticCurve,
    FiniteDifferenceCurve,
    PolynomialJet,
    SampledCurve,
    biharmonic_residual,
    cubic_phase_jet,
    harmonic_residual,
    horizontal_biharmonic,
    jet_consistency,
    reduced_residual_cpn,
    reduced_residual_cpn_components,
    reduced_residual_hpn,
    reduced_residual_sphere,
    residual_norms,
)
from biharmonic_lab.liealg import norm
from biharmonic_lab.spaces import ComplexProjective, QuaternionProjective, Sphere


def _random_poly(rng, shape, complex_=False, degree=3):
    c = rng.uniform(-1, 1, (degree + 1, *shape))
    if complex_:
        c = c + 1j * rng.uniform(-1, 1, (degree + 1, *shape))
    return PolynomialJet(c)


def _matrix_residual_coords(model, coords_jet, t):
    fam = AnalyticCurve.from_m_coords(model, coords_jet)
    return model.m_coords(biharmonic_residual(fam, t))


def test_polynomial_jet_derivatives():
    p = PolynomialJet(np.array([1.0, -2.0, 0.5, 3.0]))
    v, d1, d2, d3 = p(2.0)
    assert v == 1 - 4 + 2 + 24
    assert d1 == -2 + 2.0 + 36
    assert d2 == 1.0 + 36
    assert d3 == 18


def test_polynomial_jet_needs_coefficients():
    with pytest.raises(ValueError):
        PolynomialJet(np.array([]))


def test_cubic_phase_harmonic_residual_is_derivative():
    M = Sphere(3)
    a, b, c = 1.0, 0.0, 0.0
    fam = AnalyticCurve.from_m_coords(M, cubic_phase_jet(a, b, c, np.eye(3)[1]))
    for t in np.linspace(-2, 2, 9):
        H = harmonic_residual(fam, t)
        # chart coordinate of H is 2 a t e_i; the Frobenius norm counts both blocks
        np.testing.assert_allclose(M.m_coords(H), 2 * a * t * np.eye(3)[1], atol=1e-15)
        assert abs(norm(H) - np.sqrt(2) * abs(2 * a * t)) < 1e-14
        assert norm(biharmonic_residual(fam, t)) < 1e-14


def test_zero_family_has_zero_residuals(model):
    fam = AnalyticCurve.from_m_coords(model, lambda t: (np.zeros_like(model.random_m_coords(np.random.default_rng(0))),) * 4)
    assert residual_norms(fam, [0.0, 1.0], "harmonic").max() == 0
    assert residual_norms(fam, [0.0, 1.0], "biharmonic").max() == 0


def test_residual_kind_validation():
    fam = AnalyticCurve.from_m_coords(Sphere(2), cubic_phase_jet(0, 0, 1, [1.0, 0.0]))
    with pytest.raises(ValueError):
        residual_norms(fam, [0.0], "triharmonic")


def test_finite_difference_fallback_can_be_disabled():
    M = Sphere(2)
    fam = FiniteDifferenceCurve(M, lambda t: M.m_from_coords(np.array([np.sin(t), t])))
    biharmonic_residual(fam, 0.1)
    with pytest.raises(ValueError, match="fallback"):
        biharmonic_residual(fam, 0.1, allow_fd=False)


def test_finite_difference_jets_match_analytic(model, rng):
    K = model.random_k(rng)
    coords = _random_poly(rng, model.random_m_coords(rng).shape, complex_=model.name in ("cpn", "hpn"))

    def jet(t):
        J = [model.m_from_coords(d) for d in coords(t)]
        # add a k-part so the general residual path is exercised
        s = np.sin(t)
        return (J[0] + s * K, J[1] + np.cos(t) * K, J[2] - s * K, J[3] - np.cos(t) * K)

    ana = AnalyticCurve(model, jet)
    fd = FiniteDifferenceCurve(model, lambda t: jet(t)[0])
    for t in (-1.3, 0.2, 1.7):
        for a, b in zip(ana.jet(t), fd.jet(t)):
            np.testing.assert_allclose(a, b, atol=5e-7)
        assert norm(biharmonic_residual(ana, t) - biharmonic_residual(fd, t)) < 1e-5
        assert jet_consistency(ana, t) < 1e-8


def test_product_and_difference_composites_agree(model, rng):
    K, M1, M2 = model.random_k(rng), model.random_m(rng), model.random_m(rng)

    def jet(t):
        c, s = np.cos(t), np.sin(t)
        F = s * K + c * M1 + t * M2
        return (F, c * K - s * M1 + M2, -s * K - c * M1, -c * K + s * M1)

    fam = AnalyticCurve(model, jet)
    for t in (-0.7, 0.4):
        a = biharmonic_residual(fam, t, composite="product")
        b = biharmonic_residual(fam, t, composite="difference")
        assert norm(a - b) < 1e-6 * max(1, norm(a))
    with pytest.raises(ValueError):
        biharmonic_residual(fam, 0.0, composite="spline")


def test_residual_is_isotropy_equivariant(model, rng):
    # a constant gauge k changes F to k^-1 F k and the residual the same way
    k = model.random_isotropy(rng).matrix
    ki = np.linalg.inv(k)
    coords = _random_poly(rng, model.random_m_coords(rng).shape, complex_=model.name in ("cpn", "hpn"))
    fam = AnalyticCurve.from_m_coords(model, coords)
    conj = AnalyticCurve(model, lambda t: tuple(ki @ d @ k for d in fam.jet(t)))
    for t in (-0.5, 0.9):
        np.testing.assert_allclose(ki @ biharmonic_residual(fam, t) @ k, biharmonic_residual(conj, t), atol=1e-11)


def test_sampled_curve_reproduces_polynomial(rng):
    M = Sphere(3)
    coords = _random_poly(rng, (3,))
    ts = np.linspace(-1, 1, 201)
    vals = np.array([M.m_from_coords(coords(t)[0]) for t in ts])
    fam = SampledCurve(M, ts, vals, stride=5)
    ref = AnalyticCurve.from_m_coords(M, coords)
    for t in (-0.5, 0.0, 0.31):
        for a, b in zip(fam.jet(t), ref.jet(t)):
            np.testing.assert_allclose(a, b, atol=1e-8)
    with pytest.raises(ValueError):
        SampledCurve(M, ts[:5], vals[:5])


# --- reduced forms against the matrix residual -----------------------------


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_sphere_reduced_matches_matrix(seed, n):
    r = np.random.default_rng(seed)
    u = _random_poly(r, (n,))
    t = r.uniform(-2, 2)
    np.testing.assert_allclose(reduced_residual_sphere(u, t), _matrix_residual_coords(Sphere(n), u, t), atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_cpn_reduced_forms_match_matrix(seed, n):
    r = np.random.default_rng(seed)
    z = _random_poly(r, (n,), complex_=True)
    t = r.uniform(-2, 2)
    ref = _matrix_residual_coords(ComplexProjective(n), z, t)
    np.testing.assert_allclose(reduced_residual_cpn(z, t), ref, atol=1e-9)
    np.testing.assert_allclose(reduced_residual_cpn_components(z, t), ref, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_hpn_reduced_matches_matrix(seed, n):
    r = np.random.default_rng(seed)
    zw = _random_poly(r, (2, n), complex_=True)
    t = r.uniform(-2, 2)
    np.testing.assert_allclose(reduced_residual_hpn(zw, t), _matrix_residual_coords(QuaternionProjective(n), zw, t), atol=1e-9)


def _hpn_zero_order_variant(zw, t):
    """Variant with (|Z|^2 + |W|^2) multiplying Z, W instead of Z', W'
    and coefficient 1 on the conj(W) coupling."""
    J = [np.asarray(d, dtype=complex) for d in zw(t)]
    (Z, W), (Z1, W1), (Z3, W3) = J[0], J[1], J[3]
    ip = lambda a, b: np.sum(a * b.conj())
    r2 = ip(Z, Z).real + ip(W, W).real
    s = 2 * ip(Z, Z1) + 2 * ip(W, W1) - ip(Z1, Z) - ip(W1, W)
    e = ip(Z1, W.conj()) - ip(W1, Z.conj())
    return np.array([-Z3 - r2 * Z + s * Z + e * W.conj(), -W3 - r2 * W + s * W + 3 * e * Z.conj()])


def test_hpn_zero_order_variant_is_not_the_residual():
    n = 2
    jet = cubic_phase_jet(0.0, 0.0, 1.0, np.array([np.ones(n), np.zeros(n)], dtype=complex))
    M = QuaternionProjective(n)
    # the straight-line solution solves the matrix equation ...
    assert np.abs(_matrix_residual_coords(M, jet, 0.7)).max() < 1e-14
    assert np.abs(reduced_residual_hpn(jet, 0.7)).max() < 1e-14
    # ... but not the variant with a zero-order |Z|^2 Z term
    assert np.abs(_hpn_zero_order_variant(jet, 0.7)).max() > 1.0


def test_horizontal_biharmonic_closed_form(rng):
    M = Sphere(3)
    F, F1, F3 = (M.random_m(rng) for _ in range(3))
    np.testing.assert_array_equal(horizontal_biharmonic(F, F1, F3), -F3 + (F1 @ F - F @ F1) @ F - F @ (F1 @ F - F @ F1))
