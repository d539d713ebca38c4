import math

import numpy as np
import pytest

from divgreen import Box, Disk, Segment, reduced_boundary
from divgreen.fields import fixture
from divgreen.traces import (
    ball_cover,
    lipschitz_bound,
    pure_part_detector,
    shell_gradient_limit,
    silhavy_trace,
    strip_gradient_series,
)

SQUARE = Box((0, 0), (1, 1))
RECT = Box((0, -1), (1, 1))


def one(p):
    return np.ones(len(p))


def zero_grad(p):
    return np.zeros((len(p), 2))


def boundary_zero_pair(scale=16.0):
    def f(p):
        x, y = p[:, 0], p[:, 1]
        return scale * x * (1 - x) * y * (1 - y)

    def grad(p):
        x, y = p[:, 0], p[:, 1]
        return scale * np.stack(
            [(1 - 2 * x) * y * (1 - y), x * (1 - x) * (1 - 2 * y)], axis=-1
        )

    return f, grad


class TestBallCover:
    def test_circle(self):
        m, centers = ball_cover(reduced_boundary(Disk((0, 0), 1.0))[0], math.pi / 4)
        assert m <= 9
        assert len(centers) == m

    def test_segment(self):
        m, _ = ball_cover(Segment((0, 0), (1, 0), (0, -1)), 0.5)
        assert m <= 3

    def test_disconnected_rejected(self):
        two = [
            Segment((-1, -2), (1, -2), (0, -1)),
            Segment((-1, 2), (1, 2), (0, 1)),
        ]
        with pytest.raises(ValueError, match="path-connected"):
            ball_cover(two, 0.5)

    def test_compact_region_cover(self):
        m, _ = ball_cover(Disk((0, 0), 0.5), 0.3)
        assert m >= 1


class TestLipschitzBound:
    def test_linear_quotient_equals_gradient(self):
        a = np.array([0.7, -0.4])
        est = lipschitz_bound(
            lambda p: p @ a,
            reduced_boundary(Disk((0, 0), 1.0))[0],
            0.3,
            grad=lambda p: np.broadcast_to(a, (len(p), 2)).copy(),
        )
        assert est.accepted
        assert est.sampled_quotient == pytest.approx(np.linalg.norm(a), abs=1e-3)
        assert est.constant == 2 * (est.cover_size + 2)

    @pytest.mark.parametrize("coeffs", [(1, 0, 0), (0, 1, 0), (0.5, -1, 2), (2, 1, 1),
                                        (0, 0, 1), (-1, 2, 0.5), (3, 0, -1), (1, -1, 1),
                                        (0.2, 0.3, -0.4), (-2, -2, 2)])
    def test_quadratic_family_sound(self, coeffs):
        a, b, c = coeffs

        def f(p):
            return a * p[:, 0] ** 2 + b * p[:, 0] * p[:, 1] + c * p[:, 1]

        def grad(p):
            return np.stack(
                [2 * a * p[:, 0] + b * p[:, 1], b * p[:, 0] + c * np.ones(len(p))],
                axis=-1,
            )

        hess = 2 * abs(a) + abs(b)
        for K in (
            reduced_boundary(Disk((0, 0), 1.0))[0],
            reduced_boundary(Disk((0.2, 0.1), 0.8))[0],
        ):
            est = lipschitz_bound(f, K, 0.15, grad=grad, hess_bound=hess)
            assert est.accepted, f"{coeffs}: {est.sampled_quotient} > {est.bound}"

    def test_disconnected_counterexample_rejected(self):
        # locally constant on two separated patches: zero gradient but
        # positive quotient; the connectivity check refuses the input
        two = [
            Segment((-1, -2), (1, -2), (0, -1)),
            Segment((-1, 2), (1, 2), (0, 1)),
        ]

        def f(p):
            return (p[:, 1] > 0).astype(float)

        with pytest.raises(ValueError, match="path-connected"):
            lipschitz_bound(f, two, 0.5, grad=zero_grad)


class TestSilhavyTrace:
    def test_constant_scalar_gives_divergence(self):
        tv = silhavy_trace(fixture("linear"), SQUARE, one, zero_grad)
        assert tv.value == pytest.approx(2.0, abs=1e-5)
        assert tv.within_bound

    def test_boundary_zero_data_vanishes(self):
        f, grad = boundary_zero_pair()
        tv = silhavy_trace(fixture("vortex"), SQUARE, f, grad)
        assert abs(tv.value) <= 1e-3
        assert tv.within_bound

    def test_random_boundary_zero_family(self):
        rng = np.random.default_rng(20240817)
        base_f, base_g = boundary_zero_pair(1.0)
        for _ in range(20):
            a, b, c = rng.uniform(-2, 2, size=3)

            def f(p, a=a, b=b, c=c):
                return base_f(p) * (a + b * p[:, 0] + c * p[:, 1])

            def grad(p, a=a, b=b, c=c):
                lin = a + b * p[:, 0] + c * p[:, 1]
                return base_g(p) * lin[:, None] + base_f(p)[:, None] * np.stack(
                    [b * np.ones(len(p)), c * np.ones(len(p))], axis=-1
                )

            tv = silhavy_trace(fixture("polynomial"), SQUARE, f, grad)
            assert abs(tv.value) <= 1e-3

    def test_extension_independence(self):
        # same boundary values, different interiors
        f1 = lambda p: p[:, 0] + 0.5 * p[:, 1]
        g1 = lambda p: np.broadcast_to([1.0, 0.5], (len(p), 2)).copy()
        bz, bzg = boundary_zero_pair(7.0)
        f2 = lambda p: f1(p) + bz(p)
        g2 = lambda p: g1(p) + bzg(p)
        for name in ("vortex", "polynomial"):
            t1 = silhavy_trace(fixture(name), SQUARE, f1, g1)
            t2 = silhavy_trace(fixture(name), SQUARE, f2, g2)
            assert abs(t1.value - t2.value) <= 1e-3

    def test_bound_on_fixtures(self):
        f = lambda p: np.cos(p[:, 0]) + p[:, 1]
        grad = lambda p: np.stack([-np.sin(p[:, 0]), np.ones(len(p))], axis=-1)
        cases = [
            (fixture("constant"), SQUARE),
            (fixture("linear"), SQUARE),
            (fixture("polynomial"), SQUARE),
            (fixture("vortex"), SQUARE),
            (fixture("point-source"), RECT),
        ]
        for field, omega in cases:
            tv = silhavy_trace(field, omega, f, grad)
            assert tv.within_bound, field.name


class TestShellGradientLimits:
    def test_vortex_series_dominates_log(self):
        series = strip_gradient_series(fixture("vortex"), SQUARE, (10, 100, 1000))
        values = [v for _, v, _ in series]
        for (k, v, _e) in series:
            assert v >= 0.5 * math.log(k * k + 1)
        assert values[0] < values[1] < values[2]

    def test_vortex_series_matches_antiderivative(self):
        # closed form: 0.5*ln(k^2+1) + k*atan(1/k)
        for k, v, _ in strip_gradient_series(fixture("vortex"), SQUARE, (10, 100)):
            exact = 0.5 * math.log(k * k + 1) + k * math.atan(1 / k)
            assert abs(v - exact) / exact <= 1e-6

    def test_vortex_diverges(self):
        lim = shell_gradient_limit(fixture("vortex"), SQUARE, ramp_kind="strip")
        assert lim.status == "diverging"

    def test_point_source_converges_to_half(self):
        series = strip_gradient_series(fixture("point-source"), RECT, (10, 100, 1000))
        for k, v, _ in series:
            assert abs(v - 0.5) <= 1 / (2 * math.pi * k) + 1e-4
        lim = shell_gradient_limit(fixture("point-source"), RECT, ramp_kind="strip")
        assert lim.status == "converged"
        assert lim.value == pytest.approx(0.5, abs=1e-4)

    def test_bounded_field_boundary_ramp_gives_flux(self):
        # smooth bounded field: the limit is the boundary flux of f F
        field = fixture("linear")
        f = lambda p: np.ones(len(p))
        lim = shell_gradient_limit(field, SQUARE, f=f, ramp_kind="boundary")
        assert lim.status == "converged"
        # divergence theorem: flux of (x, y) out of the unit square = 2
        assert lim.value == pytest.approx(2.0, abs=5e-3)


class TestPurePartDetector:
    def test_vortex_needs_pure_part(self):
        rep = pure_part_detector(fixture("vortex"), SQUARE)
        assert rep.classification == "pure-gradient-part-required"

    def test_point_source_is_representable(self):
        rep = pure_part_detector(fixture("point-source"), RECT)
        assert rep.classification == "radon-representable"

    def test_bounded_field_is_representable(self):
        rep = pure_part_detector(fixture("constant"), SQUARE)
        assert rep.classification == "radon-representable"
