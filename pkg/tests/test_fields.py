import math

import numpy as np
import pytest

from divgreen import Box, Difference, Disk, locate, reduced_boundary
from divgreen.fields import (
    Bump,
    bump_basis,
    divergence_of,
    dm_norm,
    fixture,
    fixture_names,
    verify_weak_divergence,
)
from divgreen.quadrature import integrate_curve, integrate_region

BOX = Box((0, 0), (1, 1))
BIG_DISK = Disk((0, 0), 2.0)


def canonical_chi(region):
    def chi(pt):
        loc = locate(region, pt)
        return {
            "essential-interior": 1.0,
            "essential-exterior": 0.0,
            "reduced-boundary": 0.5,
        }.get(loc.kind, loc.density)

    return chi


class TestFixtures:
    def test_catalog(self):
        names = fixture_names()
        for expected in (
            "vortex",
            "point-source",
            "diag-tangential",
            "constant",
            "linear",
            "polynomial",
        ):
            assert expected in names

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            fixture("nope")

    def test_point_source_atom(self):
        ps = fixture("point-source")
        assert ps.divergence.atoms == [((0.0, 0.0), 1.0)]
        assert ps.divergence.density is None

    def test_point_source_circle_flux(self):
        ps = fixture("point-source")
        circ = reduced_boundary(Disk((0, 0), 0.5))[0]
        res = integrate_curve(lambda p, n: (ps(p) * n).sum(axis=-1), circ, tol=1e-10)
        assert res.value == pytest.approx(1.0, abs=1e-9)

    def test_vortex_divergence_free_declaration(self):
        v = fixture("vortex")
        assert v.divergence.density is None and not v.divergence.atoms

    def test_constant_divergence_zero(self):
        c = fixture("constant", c=(2.0, -1.0))
        assert np.allclose(c(np.array([[0.3, 0.7]])), [[2.0, -1.0]])


class TestWeakDivergence:
    def test_vortex_residual(self):
        rep = verify_weak_divergence(fixture("vortex"), BIG_DISK, tol=1e-4)
        assert rep.passed
        assert rep.max_residual <= 1e-4

    def test_point_source_bump_at_origin(self):
        ps = fixture("point-source")
        bump = Bump((0, 0), 0.5)
        res = integrate_region(
            lambda p: (ps(p) * bump.gradient(p)).sum(axis=-1),
            BIG_DISK,
            tol=1e-6,
            singular_points=[(0, 0)],
        )
        assert res.value == pytest.approx(-1.0, abs=1e-3)

    def test_constant_residual_zero(self):
        rep = verify_weak_divergence(fixture("constant"), BOX, tol=1e-6)
        assert rep.passed

    @pytest.mark.parametrize(
        "name,ambient",
        [
            ("constant", BOX),
            ("linear", BOX),
            ("polynomial", BOX),
            ("vortex", BIG_DISK),
            ("point-source", BIG_DISK),
            ("diag-tangential", BOX),
        ],
    )
    def test_all_fixtures_on_bump_basis(self, name, ambient):
        rep = verify_weak_divergence(fixture(name), ambient, tol=1e-3)
        assert len(rep.residuals) == 9
        assert rep.passed, f"{name}: max residual {rep.max_residual:g}"


class TestDmNorm:
    def test_constant_on_box(self):
        assert dm_norm(fixture("constant"), BOX, p=1) == pytest.approx(1.0, abs=1e-6)

    def test_point_source_on_unit_disk(self):
        # radial closed form: L1 norm 1 plus atom weight 1
        val = dm_norm(fixture("point-source"), Disk((0, 0), 1.0), p=1)
        assert val == pytest.approx(2.0, abs=1e-4)

    def test_vortex_on_annulus_radial_oracle(self):
        annulus = Difference(Disk((0, 0), 1.0), Disk((0, 0), 0.5))
        # |F| = 1/r: integral = 2*pi*(r2 - r1)
        val = dm_norm(fixture("vortex"), annulus, p=1)
        assert val == pytest.approx(math.pi, abs=1e-4)

    def test_monotone_under_inclusion(self):
        small = Box((0.2, 0.2), (0.8, 0.8))
        a = dm_norm(fixture("polynomial"), small, p=1)
        b = dm_norm(fixture("polynomial"), BOX, p=1)
        assert a <= b + 1e-9

    def test_sup_norm_of_bounded_field(self):
        val = dm_norm(fixture("constant", c=(3.0, 4.0)), BOX, p=math.inf)
        assert val == pytest.approx(5.0, abs=1e-6)

    def test_unbounded_sup_rejected(self):
        with pytest.raises(ValueError):
            dm_norm(fixture("vortex"), Disk((0, 0), 1.0), p=math.inf)


class TestDivergenceOf:
    def test_interior_atom(self):
        ps = fixture("point-source", center=(0.5, 0.5))
        dv = divergence_of(ps, BOX, canonical_chi(BOX))
        assert dv.value == pytest.approx(1.0, abs=1e-12)
        assert not dv.corner_atoms

    def test_edge_atom_half_weight(self):
        ps = fixture("point-source", center=(0.5, 0.0))
        dv = divergence_of(ps, BOX, canonical_chi(BOX))
        assert dv.value == pytest.approx(0.5, abs=1e-12)

    def test_outside_atom(self):
        ps = fixture("point-source", center=(5.0, 5.0))
        dv = divergence_of(ps, BOX, canonical_chi(BOX))
        assert dv.value == pytest.approx(0.0, abs=1e-12)

    def test_corner_atom_flagged(self):
        ps = fixture("point-source", center=(0.0, 0.0))
        dv = divergence_of(ps, BOX, canonical_chi(BOX))
        assert dv.corner_atoms == [(0.0, 0.0)]
        assert dv.value == pytest.approx(0.25, abs=1e-6)

    def test_density_part(self):
        lin = fixture("linear")  # div = 2
        dv = divergence_of(lin, Disk((0, 0), 1.0), canonical_chi(Disk((0, 0), 1.0)))
        assert dv.value == pytest.approx(2 * math.pi, abs=1e-5)

    def test_additive_over_disjoint_regions(self):
        poly = fixture("polynomial")
        left = Box((0, 0), (0.5, 1))
        right = Box((0.5, 0), (1, 1))
        whole = divergence_of(poly, BOX).value
        parts = divergence_of(poly, left).value + divergence_of(poly, right).value
        assert whole == pytest.approx(parts, abs=1e-6)
