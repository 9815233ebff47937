import math

import numpy as np
import pytest

from biharmonic_lab.frenet import (
    SpeedError,
    Verdict,
    classify_biharmonic_tangent,
    frenet_from_tangent,
    frenet_plane,
    frenet_sampled,
    frenet_space,
)

S = np.linspace(0, 2 * math.pi, 101)


def circle(sign=1.0):
    return lambda s: (
        np.array([math.cos(s), sign * math.sin(s)]),
        np.array([-math.sin(s), sign * math.cos(s)]),
        np.array([-math.cos(s), -sign * math.sin(s)]),
        np.array([math.sin(s), -sign * math.cos(s)]),
    )


def helix(a, b):
    return lambda s: (
        np.array([a * math.cos(s), a * math.sin(s), b * s]),
        np.array([-a * math.sin(s), a * math.cos(s), b]),
        np.array([-a * math.cos(s), -a * math.sin(s), 0.0]),
        np.array([a * math.sin(s), -a * math.cos(s), 0.0]),
    )


def test_circle_curvature():
    d = frenet_plane(circle(), S)
    assert np.abs(d.kappa - 1).max() < 1e-12
    assert d.orthonormality_defect() < 1e-15
    assert classify_biharmonic_tangent(d).verdict is Verdict.BIHARMONIC


def test_clockwise_circle_is_biharmonic():
    d = frenet_plane(circle(-1.0), S)
    assert np.abs(d.kappa + 1).max() < 1e-12
    assert classify_biharmonic_tangent(d).verdict is Verdict.BIHARMONIC


def test_line_is_harmonic():
    v = np.array([0.6, 0.8])
    d = frenet_plane(lambda s: (s * v, v, 0 * v), S)
    assert classify_biharmonic_tangent(d).verdict is Verdict.HARMONIC_LINE


def test_plane_curvature_two_rejected():
    d = frenet_plane(lambda s: (circle()(2 * s)[0] / 2, circle()(2 * s)[1], 2 * circle()(2 * s)[2]), S)
    c = classify_biharmonic_tangent(d)
    assert c.verdict is Verdict.NOT_BIHARMONIC and "curvature" in c.failed


@pytest.mark.parametrize("a,b", [(0.6, 0.8), (1.0, 0.0), (math.sqrt(0.5), -math.sqrt(0.5))])
def test_helix_curvature_torsion(a, b):
    d = frenet_space(helix(a, b), S)
    assert np.abs(d.kappa - abs(a)).max() < 1e-12
    assert np.abs(d.tau - b).max() < 1e-12
    assert d.orthonormality_defect() < 1e-14
    assert classify_biharmonic_tangent(d).verdict is Verdict.BIHARMONIC


def test_helix_off_unit_sphere_rejected():
    # unit speed helix with kappa = tau = 0.5 (radius 1, pitch 1, scaled parameter)
    r, c = 1.0, 1.0
    w = 1 / math.sqrt(r * r + c * c)

    def p(s):
        t = w * s
        return (
            np.array([r * math.cos(t), r * math.sin(t), c * t]),
            w * np.array([-r * math.sin(t), r * math.cos(t), c]),
            w * w * np.array([-r * math.cos(t), -r * math.sin(t), 0.0]),
            w**3 * np.array([r * math.sin(t), -r * math.cos(t), 0.0]),
        )

    d = frenet_space(p, S)
    assert abs(d.kappa.mean() - 0.5) < 1e-12 and abs(d.tau.mean() - 0.5) < 1e-12
    c_ = classify_biharmonic_tangent(d)
    assert c_.verdict is Verdict.NOT_BIHARMONIC and "kappa^2" in c_.failed


def test_from_tangent_matches():
    h = helix(0.6, 0.8)
    d1 = frenet_space(h, S)
    d2 = frenet_from_tangent(lambda s: h(s)[1:], S)
    np.testing.assert_allclose(d1.kappa, d2.kappa, atol=1e-14)
    np.testing.assert_allclose(d1.tau, d2.tau, atol=1e-14)


def test_speed_error_reports_range():
    with pytest.raises(SpeedError) as info:
        frenet_plane(lambda s: (np.array([2 * s, 0.0]), np.array([2.0, 0.0]), np.zeros(2)), S)
    assert info.value.speed_min == pytest.approx(2.0)
    assert "2" in str(info.value)


def test_space_needs_curvature():
    v = np.array([0.0, 0.6, 0.8])
    with pytest.raises(ValueError, match="curvature"):
        frenet_space(lambda s: (s * v, v, 0 * v, 0 * v), S)


def test_sampled_helix():
    s = np.linspace(0, 6, 301)
    P = np.array([helix(0.6, 0.8)(x)[0] for x in s])
    d = frenet_sampled(s, P)
    assert np.abs(d.kappa - 0.6).max() < 1e-4
    assert np.abs(d.tau - 0.8).max() < 1e-4
    assert classify_biharmonic_tangent(d).verdict is Verdict.BIHARMONIC


def test_sampled_input_validation():
    with pytest.raises(ValueError):
        frenet_sampled(np.arange(5.0), np.zeros((5, 2)))
    with pytest.raises(ValueError):
        frenet_sampled(np.zeros(8), np.zeros((8, 2)))


def test_ambient_check():
    d = frenet_plane(circle(), S)
    with pytest.raises(ValueError):
        classify_biharmonic_tangent(d, ambient=4)
