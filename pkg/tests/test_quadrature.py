"""Quadrature rules against closed-form integrals."""

import numpy as np
import pytest

from fcm.geometry import Chain
from fcm.quadrature import (
    boundary_rule,
    gauss_points,
    tensor_rule,
    triangle_rule,
    volume_rule,
)

UNIT_SQUARE = np.array([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
REF_TRIANGLE = np.array([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])


def integrate(rule, fn):
    return float(rule.weights @ fn(rule.points[:, 0], rule.points[:, 1]))


def test_gauss_point_counts():
    assert gauss_points(1) == 1
    assert gauss_points(3) == 2
    assert gauss_points(9) == 5


def test_tensor_rule_polynomial_exactness():
    rule = tensor_rule((0.0, 1.0, 0.0, 1.0), 3)
    assert rule.total_weight == pytest.approx(1.0, rel=1e-14)
    assert integrate(rule, lambda x, y: x**2 * y**2) == pytest.approx(1 / 9, rel=1e-14)
    assert integrate(rule, lambda x, y: x**5) == pytest.approx(1 / 6, rel=1e-14)


def test_rectangle_detected_in_volume_rule():
    # axis-aligned rectangles get the tensor rule, so degree 2p+1 per axis
    rule = volume_rule(UNIT_SQUARE, degree=4)
    assert integrate(rule, lambda x, y: x**5 * y**5) == pytest.approx(1 / 36, rel=1e-12)


@pytest.mark.parametrize("degree,fn,exact", [
    (1, lambda x, y: x, 1 / 6),
    (2, lambda x, y: x * y, 1 / 24),
    (4, lambda x, y: x**2 * y**2, 1 / 180),
    (6, lambda x, y: x**4 * y**2, 1 / 840),
])
def test_triangle_rules_exact(degree, fn, exact):
    bary, weights = triangle_rule(degree)
    pts = bary @ REF_TRIANGLE
    val = 0.5 * float(weights @ fn(pts[:, 0], pts[:, 1]))
    assert val == pytest.approx(exact, rel=1e-13)
    assert (weights > 0).all()
    assert weights.sum() == pytest.approx(1.0, rel=1e-14)


def test_convex_fan_rule():
    rule = volume_rule(REF_TRIANGLE, degree=2)
    assert rule.total_weight == pytest.approx(0.5, rel=1e-13)
    assert integrate(rule, lambda x, y: x) == pytest.approx(1 / 6, rel=1e-13)
    assert (rule.weights > 0).all()


def test_nonconvex_ear_clip_fallback():
    # horseshoe whose centroid sits in the notch, so fanning fails
    poly = np.array([(0, 0), (3, 0), (3, 3), (0, 3),
                     (0, 2), (2, 2), (2, 1), (0, 1)], float)
    rule = volume_rule(poly, degree=2)
    assert rule.total_weight == pytest.approx(7.0, rel=1e-12)
    assert integrate(rule, lambda x, y: x) == pytest.approx(11.5, rel=1e-12)


def test_empty_and_degenerate_regions():
    assert volume_rule(None, degree=2).total_weight == 0.0
    sliver = np.array([(0, 0), (1, 0), (1, 1e-18)])
    assert volume_rule(sliver, degree=2).total_weight == 0.0
    assert volume_rule(UNIT_SQUARE, degree=2, min_area=2.0).total_weight == 0.0


def test_boundary_rule_segment():
    chain = Chain(points=np.array([(0.0, 0.0), (1.0, 0.0)]),
                  normals=np.array([(0.0, -1.0)]), closed=False)
    rule = boundary_rule(chain, degree=9)
    assert rule.total_weight == pytest.approx(1.0, rel=1e-14)
    val = float(rule.weights @ rule.points[:, 0] ** 2)
    assert val == pytest.approx(1 / 3, rel=1e-13)
    assert np.array_equal(rule.normals, np.tile((0.0, -1.0), (rule.weights.size, 1)))


def test_boundary_rule_scales_with_length():
    chain = Chain(points=np.array([(0.0, 0.0), (3.0, 4.0)]),
                  normals=np.array([(0.8, -0.6)]), closed=False)
    rule = boundary_rule(chain, degree=5)
    assert rule.total_weight == pytest.approx(5.0, rel=1e-14)
