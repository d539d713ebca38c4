import math

import numpy as np
import pytest

from divgreen import (
    Box,
    Disk,
    HalfPlane,
    Intersection,
    Segment,
    reduced_boundary,
)
from divgreen.quadrature import (
    ScaleSchedule,
    integrate_curve,
    integrate_region,
    limit_extrapolate,
)


def strip_oracle(width):
    """Closed-form value of the integral of y/(x^2+y^2) over (0,w)x(0,1).

    Antiderivative: int 0.5*ln(1+1/x^2) dx = 0.5*(x*ln(1+1/x^2) + 2*atan x).
    """
    return 0.5 * (width * math.log(1 + 1 / width**2) + 2 * math.atan(width))


class TestScaleSchedule:
    def test_defaults(self):
        s = ScaleSchedule()
        assert s.initial == 0.5 and s.ratio == 0.5 and s.steps == 24
        assert s.tolerance == 1e-6 and s.cap == 1e9

    def test_validation(self):
        with pytest.raises(ValueError):
            ScaleSchedule(ratio=1.0)
        with pytest.raises(ValueError):
            ScaleSchedule(steps=2)

    def test_scales_decreasing(self):
        sc = ScaleSchedule(initial=1.0, ratio=0.5, steps=5).scales()
        assert sc == [1.0, 0.5, 0.25, 0.125, 0.0625]


class TestIntegrateRegion:
    def test_box_area(self):
        res = integrate_region(None, Box((0, 0), (1, 1)), tol=1e-9)
        assert res.converged
        assert res.value == pytest.approx(1.0, abs=1e-9)

    def test_disk_area_relative_1e6(self):
        res = integrate_region(None, Disk((0, 0), 1.0), tol=3e-7)
        assert res.converged
        assert abs(res.value - math.pi) / math.pi <= 1e-6

    def test_singular_strip_matches_closed_form(self):
        res = integrate_region(
            lambda p: p[:, 1] / (p[:, 0] ** 2 + p[:, 1] ** 2),
            Box((0, 0), (0.1, 1)),
            tol=1e-7,
            singular_points=[(0.0, 0.0)],
        )
        assert res.converged
        assert res.value == pytest.approx(strip_oracle(0.1), abs=1e-6)

    def test_divergence_detected(self):
        res = integrate_region(
            lambda p: 1.0 / np.maximum((p**2).sum(axis=1), 1e-300),
            Box((0, 0), (1, 1)),
            tol=1e-6,
            singular_points=[(0.0, 0.0)],
        )
        assert res.status == "diverging"

    def test_additive_over_partition(self):
        disk = Disk((0, 0), 1.0)
        left = Intersection(disk, HalfPlane((1, 0), 0.0))
        right = Intersection(disk, HalfPlane((-1, 0), 0.0))
        f = lambda p: (p**2).sum(axis=1)
        tol = 1e-6
        whole = integrate_region(f, disk, tol=tol)
        parts = integrate_region(f, left, tol=tol).value + integrate_region(
            f, right, tol=tol
        ).value
        assert abs(whole.value - parts) <= 2 * tol

    def test_vector_integrand(self):
        res = integrate_region(
            lambda p: np.stack([np.ones(len(p)), p[:, 0]], axis=1),
            Disk((0, 0), 1.0),
            tol=1e-6,
        )
        assert res.converged
        assert res.value[0] == pytest.approx(math.pi, abs=1e-5)
        assert res.value[1] == pytest.approx(0.0, abs=1e-6)

    def test_deterministic(self):
        f = lambda p: np.cos(3 * p[:, 0]) * p[:, 1] ** 2
        a = integrate_region(f, Disk((0.2, -0.1), 0.8), tol=1e-7)
        b = integrate_region(f, Disk((0.2, -0.1), 0.8), tol=1e-7)
        assert a.value == b.value and a.trace == b.trace

    def test_error_bound_covers_next_level(self):
        for region, exact in [
            (Disk((0, 0), 1.0), math.pi),
            (Box((0, 0), (1, 1)), 1.0),
        ]:
            res = integrate_region(None, region, tol=1e-6)
            if len(res.trace) >= 2:
                assert res.error >= abs(res.trace[-1] - res.trace[-2])
            assert abs(res.value - exact) / exact <= 1e-5

    def test_empty_region(self):
        from divgreen import EmptyRegion

        res = integrate_region(None, EmptyRegion(), tol=1e-9)
        assert res.converged and res.value == 0.0


class TestIntegrateCurve:
    def test_circle_length(self):
        circ = reduced_boundary(Disk((0, 0), 1.0))[0]
        res = integrate_curve(lambda p: np.ones(len(p)), circ, tol=1e-10)
        assert res.converged
        assert res.value == pytest.approx(2 * math.pi, abs=1e-9)

    def test_normal_component_cancels(self):
        circ = reduced_boundary(Disk((0, 0), 1.0))[0]
        res = integrate_curve(lambda p, n: n[:, 0], circ, tol=1e-10)
        assert res.value == pytest.approx(0.0, abs=1e-9)

    def test_nonintegrable_endpoint_diverges(self):
        seg = Segment((0, 0), (0.5, 0), (0, -1))
        res = integrate_curve(
            lambda p: 1.0 / np.linalg.norm(p, axis=1),
            seg,
            tol=1e-8,
            singular_points=[(0, 0)],
        )
        assert res.status == "diverging"

    def test_integrable_endpoint_converges(self):
        # 1/sqrt(x) on (0, 1): integral 2
        seg = Segment((0, 0), (1, 0), (0, -1))
        res = integrate_curve(
            lambda p: 1.0 / np.sqrt(np.maximum(p[:, 0], 1e-300)),
            seg,
            tol=1e-8,
            singular_points=[(0, 0)],
        )
        assert res.status == "converged"
        assert res.value == pytest.approx(2.0, abs=1e-5)

    def test_vector_curve_integrand(self):
        circ = reduced_boundary(Disk((0, 0), 1.0))[0]
        res = integrate_curve(lambda p, n: n, circ, tol=1e-10)
        assert np.allclose(res.value, [0.0, 0.0], atol=1e-9)


class TestLimitExtrapolate:
    def test_linear_decay_converges(self):
        res = limit_extrapolate(lambda d: d, ScaleSchedule())
        assert res.status == "converged"
        assert res.value == pytest.approx(0.0, abs=1e-5)

    def test_log_growth_diverges(self):
        res = limit_extrapolate(
            lambda d: 0.5 * math.log(1.0 / d**2 + 1), ScaleSchedule()
        )
        assert res.status == "diverging"

    def test_oscillation_no_limit(self):
        res = limit_extrapolate(lambda d: math.sin(1.0 / d), ScaleSchedule())
        assert res.status == "no-limit"

    def test_budget_exhausted(self):
        # decays too slowly for the tolerance within the step budget
        res = limit_extrapolate(
            lambda d: d**0.05, ScaleSchedule(steps=8, tolerance=1e-9)
        )
        assert res.status == "budget-exhausted"

    def test_converged_error_below_tolerance(self):
        sched = ScaleSchedule()
        res = limit_extrapolate(lambda d: 1.0 + d**2, sched)
        assert res.status == "converged"
        assert res.error_bound <= sched.tolerance
        assert res.value == pytest.approx(1.0, abs=1e-5)

    def test_noisy_evaluator_uses_reported_errors(self):
        # value pairs widen the convergence window by the evaluation error
        def seq(d):
            noise = 3e-6 if int(1 / d) % 2 else -3e-6
            return 2.0 + noise, 5e-6

        res = limit_extrapolate(seq, ScaleSchedule())
        assert res.status == "converged"
        assert res.value == pytest.approx(2.0, abs=1e-5)

    def test_deterministic_traces(self):
        sched = ScaleSchedule(steps=10)
        a = limit_extrapolate(lambda d: math.cos(d), sched)
        b = limit_extrapolate(lambda d: math.cos(d), sched)
        assert a.trace == b.trace
        assert a.value == b.value

    def test_vector_sequence(self):
        res = limit_extrapolate(lambda d: np.array([1.0 + d, 2.0 - d]), ScaleSchedule())
        assert res.status == "converged"
        assert np.allclose(res.value, [1.0, 2.0], atol=1e-5)

    def test_cap_triggers_divergence(self):
        res = limit_extrapolate(lambda d: 1.0 / d**2, ScaleSchedule(cap=1e6))
        assert res.status == "diverging"
