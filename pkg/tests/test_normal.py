import math

import numpy as np
import pytest

from divgreen import (
    Box,
    Disk,
    HalfPlane,
    Intersection,
    shell_area,
)
from divgreen._exact import cut
from divgreen.fields import fixture
from divgreen.measures import SimpleFunction, aura_check
from divgreen.normal import (
    APPROXIMATION_KINDS,
    gauss_bv_scalar,
    gauss_check_bounded,
    make_approximation,
    nonintegrability_witness,
    normal_measure_boundary,
    normal_measure_shell,
    normal_trace_bounded,
    tv_lowerbound_check,
)

BOX = Box((0, 0), (1, 1))
DISK = Disk((0, 0), 1.0)
FRAME = Box((-3, -3), (3, 3))


def quarter_disk():
    return Intersection(
        Intersection(Disk((0, 0), 0.5), HalfPlane((-1, 0), 0)), HalfPlane((0, -1), 0)
    )


@pytest.fixture(scope="module")
def ramp_box():
    return make_approximation(BOX, "distance-ramp", validate=False)


@pytest.fixture(scope="module")
def ramp_disk():
    return make_approximation(DISK, "distance-ramp", validate=False)


class TestMakeApproximation:
    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            make_approximation(BOX, "nope")

    def test_outer_box_gradient_norms_match_coarea_oracle(self):
        na = make_approximation(BOX, "outer-portmanteau", probe_ks=(8, 16, 32, 64))
        for k, norm in na.validity.samples:
            # oracle: mean of offset-boundary lengths over the collar widths
            delta = 1.0 / k
            ts = np.linspace(delta / 200, delta * (1 - 1 / 200), 100)
            oracle = float(np.mean([shell_area(BOX, float(t), "outer") for t in ts]))
            assert norm == pytest.approx(oracle, abs=1e-2)
        assert na.validity.samples[-1][1] == pytest.approx(4.0, abs=1e-1)
        assert na.validity.bounded

    def test_disk_ramp_norms_below_perimeter(self):
        na = make_approximation(DISK, "distance-ramp", probe_ks=(8, 16, 32, 64))
        for _, norm in na.validity.samples:
            assert norm <= 2 * math.pi + 1e-2
        assert na.validity.bounded

    def test_canonical_chi_values(self):
        na = make_approximation(BOX, "canonical-mollified", validate=False)
        assert na.chi((0.5, 0.5)) == 1.0
        assert na.chi((5.0, 5.0)) == 0.0
        assert na.chi((0.5, 0.0)) == 0.5
        assert na.chi((0.0, 0.0)) == pytest.approx(0.25, abs=1e-6)

    def test_indicator_chi_values(self, ramp_box):
        assert ramp_box.chi((0.5, 0.5)) == 1.0
        assert ramp_box.chi((0.5, 0.0)) == 0.0  # open-set indicator

    def test_inner_kind_needs_inner_room(self):
        from divgreen import GeometryError

        with pytest.raises(GeometryError):
            make_approximation(Disk((0, 0), 0.01), "distance-ramp", validate=False)

    def test_all_kinds_constructible(self):
        for kind in APPROXIMATION_KINDS:
            na = make_approximation(BOX, kind, validate=False)
            assert na.kind == kind


class TestRouteAgreement:
    @pytest.mark.parametrize(
        "omega",
        [BOX, DISK, quarter_disk()],
        ids=["box", "disk", "quarter-disk"],
    )
    def test_bands_and_halfplanes(self, omega):
        na = make_approximation(omega, "distance-ramp", validate=False)
        shell = normal_measure_shell(omega, na)
        lo, hi = omega.bounding_box
        w = hi - lo
        probes = [
            Box((hi[0] - 0.2 * w[0], lo[1] - 0.3), (hi[0] + 0.3, hi[1] + 0.3)),
            Box((lo[0] - 0.3, hi[1] - 0.2 * w[1]), (hi[0] + 0.3, hi[1] + 0.3)),
            Intersection(FRAME, HalfPlane((-1, 0), -(lo[0] + 0.3 * w[0]))),
            Intersection(FRAME, HalfPlane((0, -1), -(lo[1] + 0.3 * w[1]))),
        ]
        for B in probes:
            rs = shell.eval(B)
            rb = normal_measure_boundary(omega, na.chi, B)
            assert rs.status == "converged"
            assert np.max(np.abs(np.asarray(rs.value) - rb)) <= 1e-3

    def test_disjoint_set_is_zero(self, ramp_box):
        shell = normal_measure_shell(BOX, ramp_box)
        res = shell.eval(Box((3, 3), (4, 4)))
        assert res.converged and np.allclose(res.value, 0.0)
        assert np.allclose(normal_measure_boundary(BOX, ramp_box.chi, Box((3, 3), (4, 4))), 0.0)

    def test_core_localization(self, ramp_box):
        # any set at positive distance from the boundary carries no mass
        shell = normal_measure_shell(BOX, ramp_box)
        inner = Box((0.3, 0.3), (0.7, 0.7))
        res = shell.eval(inner)
        assert float(np.max(np.abs(res.value))) <= 1e-9

    def test_whole_plane_clip_vanishes(self, ramp_box):
        shell = normal_measure_shell(BOX, ramp_box)
        whole = Box((-2, -2), (3, 3))
        res = shell.eval(whole)
        assert float(np.max(np.abs(res.value))) <= 1e-6
        assert np.allclose(
            normal_measure_boundary(BOX, ramp_box.chi, whole), 0.0, atol=1e-12
        )

    def test_box_self_probe_with_canonical_weight(self):
        na = make_approximation(BOX, "canonical-mollified", validate=False)
        val = normal_measure_boundary(BOX, na.chi, BOX)
        assert np.allclose(val, 0.0, atol=1e-12)


class TestGaussBounded:
    def test_linear_on_disk_ramp(self, ramp_disk):
        rep = gauss_check_bounded(fixture("linear"), DISK, ramp_disk)
        assert rep.passed
        assert rep.lhs == pytest.approx(2 * math.pi, abs=1e-4)
        assert rep.rhs == pytest.approx(2 * math.pi, abs=1e-3)

    def test_constant_vanishes(self, ramp_box):
        rep = gauss_check_bounded(fixture("constant"), BOX, ramp_box)
        assert rep.passed
        assert abs(rep.lhs) <= 1e-12 and abs(rep.rhs) <= 1e-9

    def test_edge_atom_half_weight(self):
        na = make_approximation(BOX, "canonical-mollified", validate=False)
        rep = gauss_check_bounded(fixture("point-source", center=(0.5, 0.0)), BOX, na)
        assert rep.passed
        assert rep.lhs == pytest.approx(0.5, abs=1e-6)
        assert rep.rhs == pytest.approx(0.5, abs=1e-3)

    @pytest.mark.parametrize("kind", APPROXIMATION_KINDS)
    def test_polynomial_box_all_kinds(self, kind):
        na = make_approximation(BOX, kind, validate=False)
        rep = gauss_check_bounded(fixture("polynomial"), BOX, na)
        assert rep.passed, f"{kind}: residual {rep.residual:g}"


class TestNormalTrace:
    def test_edge_fluxes(self, ramp_box):
        tr = normal_trace_bounded(fixture("constant"), BOX, ramp_box)
        right = Box((0.9, -0.1), (1.1, 1.1))
        left = Box((-0.1, -0.1), (0.1, 1.1))
        away = Box((3, 3), (4, 4))
        assert tr.eval(right).value == pytest.approx(1.0, abs=1e-3)
        assert tr.eval(left).value == pytest.approx(-1.0, abs=1e-3)
        assert tr.eval(away).value == 0.0

    def test_shell_aura_certificate(self, ramp_box):
        # outer-minus-inner shells of shrinking width certify pure support
        shell = normal_measure_shell(BOX, ramp_box)
        shells = [
            cut(
                Box((-1.0 / k, -1.0 / k), (1 + 1.0 / k, 1 + 1.0 / k)),
                Box((1.0 / k, 1.0 / k), (1 - 1.0 / k, 1 - 1.0 / k)),
            )
            for k in (4, 8, 16, 32)
        ]
        cert = aura_check(shell, shells)
        assert cert.verdict == "pure-supported"


class TestGaussBvScalar:
    def test_unit_scalar_reduces_to_plain_gauss(self, ramp_box):
        field = fixture("linear")
        g1 = SimpleFunction([(Box((-0.2, -0.2), (1.2, 1.2)), 1.0)])
        rep = gauss_bv_scalar(field, g1, BOX, ramp_box)
        plain = gauss_check_bounded(field, BOX, ramp_box)
        assert rep.passed
        assert rep.lhs == pytest.approx(plain.lhs, abs=1e-3)
        assert rep.rhs == pytest.approx(plain.rhs, abs=1e-3)

    def test_half_indicator_balances(self, ramp_box):
        field = fixture("constant")  # F = (1, 0)
        half = SimpleFunction([(Box((0.5, -0.2), (1.2, 1.2)), 1.0)])
        rep = gauss_bv_scalar(field, half, BOX, ramp_box)
        assert rep.passed, f"residual {rep.residual:g}"

    def test_piece_away_from_boundary_contributes_nothing(self, ramp_box):
        field = fixture("constant")
        inner_piece = SimpleFunction([(Box((0.3, 0.3), (0.7, 0.7)), 5.0)])
        rep = gauss_bv_scalar(field, inner_piece, BOX, ramp_box)
        assert rep.passed
        assert abs(rep.rhs) <= 1e-9

    def test_singular_interface_rejected(self, ramp_box):
        ps = fixture("point-source", center=(0.5, 0.5))
        half = SimpleFunction([(Box((0.5, -0.2), (1.2, 1.2)), 1.0)])
        with pytest.raises(ValueError, match="singular"):
            gauss_bv_scalar(ps, half, BOX, ramp_box)


class TestTvLowerBound:
    def test_box_windows(self, ramp_box):
        for window, perim in [
            (None, 4.0),
            (Disk((0, 0), 0.22), 0.44),
            (Box((-0.1, 0.4), (1.1, 0.6)), 0.4),
        ]:
            rep = tv_lowerbound_check(BOX, ramp_box, window, depth=6)
            assert rep.perimeter_in_window == pytest.approx(perim, abs=1e-9)
            assert rep.passed, f"tv {rep.tv_bound:g} < {perim} - {rep.tol}"

    def test_window_missing_boundary(self, ramp_box):
        rep = tv_lowerbound_check(BOX, ramp_box, Disk((0.5, 0.5), 0.2), depth=5)
        assert rep.tv_bound <= 1e-9 and rep.perimeter_in_window == 0.0
        assert rep.passed

    def test_canonical_kind_rejected(self):
        na = make_approximation(BOX, "canonical-mollified", validate=False)
        with pytest.raises(ValueError):
            tv_lowerbound_check(BOX, na, None)


class TestConvergenceInMeasureAgainstNormalMeasure:
    def test_tangential_field_not_approximable(self):
        # bounded truncations never approach the tangential field in the
        # normal-measure sense: the deviation tube keeps the diagonal's
        # boundary length as certified mass
        from divgreen.measures import converges_in_measure

        omega = Intersection(HalfPlane((1, -1), 0.0), Disk((0.5, 0.5), 0.25))
        field = fixture("diag-tangential")
        na = make_approximation(omega, "distance-ramp", validate=False)
        shell = normal_measure_shell(omega, na)
        f = lambda p: field.magnitude(p)
        f_seq = [
            (lambda p, M=M: np.minimum(field.magnitude(p), M)) for M in (10.0, 40.0)
        ]
        algebra = [Box((0, 0), (1, 1))]
        rep = converges_in_measure(
            f_seq, f, shell, eps=1.0, algebra=algebra, grid_depth=5
        )
        assert rep.verdict == "does-not-converge"
        assert rep.masses[-1] >= 0.5 - 1e-3


class TestWitnesses:
    def test_tangential_mass_bound(self):
        omega = Intersection(HalfPlane((1, -1), 0.0), Disk((0.5, 0.5), 0.25))
        rep = nonintegrability_witness(
            fixture("diag-tangential"), omega, "tangential", {"thresholds": (10.0, 100.0)}
        )
        assert rep.verdict == "witnessed"
        for entry in rep.entries:
            assert entry["mass_bound"] >= 0.5 - 1e-3
            assert entry["field_min_on_tube"] >= entry["threshold"]

    def test_atomic_log_growth(self):
        qd = quarter_disk()
        na = make_approximation(qd, "canonical-mollified", validate=False)
        rep = nonintegrability_witness(
            fixture("point-source"), qd, "atomic", {"clips": (10.0, 100.0, 1000.0)}, na=na
        )
        assert rep.verdict == "witnessed"
        incs = [
            b["pairing"] - a["pairing"] for a, b in zip(rep.entries[:-1], rep.entries[1:])
        ]
        target = math.log(10.0) / (2 * math.pi)
        for inc in incs:
            assert abs(inc - target) <= 0.05 * target

    def test_bounded_field_integrable(self):
        rep = nonintegrability_witness(fixture("constant"), BOX, "tangential")
        assert rep.verdict == "integrable"
