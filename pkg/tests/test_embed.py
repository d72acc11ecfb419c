"""Coefficient embedding, tile membership, rasters, and boundary counting."""

import itertools
import math

import pytest

from polynum import (
    TileParams,
    apply_power,
    boundary_stats,
    embed_phi,
    expand,
    integer_fractional,
    rasterize_tile,
    tile_membership,
    urysohn_eval,
)
from polynum.embed import border_hit


# ---------------------------------------------------------------- embedding


def test_phi_is_the_coefficient_vector(twin):
    assert embed_phi(twin.ctx.residue(1)) == (1, 0)
    assert embed_phi(twin.ctx.residue([0, 1])) == (0, 1)
    assert embed_phi(twin.ctx.residue([-3, 7])) == (-3, 7)


def test_apply_power_matches_multiplication_by_x(twin):
    # B realizes multiplication by X on coefficient vectors
    assert apply_power((1, 0), 1, twin.ctx) == pytest.approx((0.0, 1.0))
    assert apply_power((1, 0), -1, twin.ctx) == pytest.approx((-1.0, -0.5))


def test_apply_power_inverts(twin):
    x = (0.3, -1.7)
    back = apply_power(apply_power(x, 3, twin.ctx), -3, twin.ctx)
    assert back == pytest.approx(x, abs=1e-9)


def test_apply_power_agrees_with_residue_shift(twin):
    for vec in ((1, 0), (0, 1), (3, -2)):
        shifted = twin.ctx.residue(list(vec)) * twin.ctx.x
        assert apply_power(vec, 1, twin.ctx) == pytest.approx(
            tuple(float(c) for c in shifted.coeff_vector())
        )


# ---------------------------------------------------------------- membership


def test_origin_is_inside_with_zero_digits(twin):
    m = tile_membership((0.0, 0.0), twin)
    assert m.status == "inside"
    assert set(m.digits) == {0}


def test_shifted_unit_is_inside_with_leading_one(twin):
    x = apply_power(embed_phi(twin.ctx.residue(1)), -1, twin.ctx)
    m = tile_membership(x, twin)
    assert m.status == "inside"
    assert m.digits[0] == 1
    assert set(m.digits[1:]) == {0}


def test_far_point_is_outside(twin):
    m = tile_membership((10.0, 10.0), twin)
    assert m.status == "outside"
    assert m.digits == ()


def test_membership_recovers_reversed_expansion_digits(twin):
    # B^-L phi(g) lies in the tile and its digit string is the expansion
    # of g read from the most significant position down
    for a, b in itertools.product(range(-3, 4), repeat=2):
        g = twin.ctx.residue([a, b])
        digits = expand(g, twin).digits
        L = len(digits)
        if L == 0:
            continue
        x = apply_power(embed_phi(g), -L, twin.ctx)
        m = tile_membership(x, twin)
        assert m.status in ("inside", "boundary_band")
        if m.status == "inside":
            want = tuple(reversed(digits))
            assert m.digits[:L] == want
            assert all(d == 0 for d in m.digits[L:])


# ---------------------------------------------------------------- urysohn


def test_urysohn_separates_subtiles(twin):
    x = apply_power(embed_phi(twin.ctx.residue(1)), -1, twin.ctx)
    assert urysohn_eval(x, 1, twin) == pytest.approx(1.0)
    assert urysohn_eval(x, 0, twin) == pytest.approx(0.0)
    assert urysohn_eval((10.0, 10.0), 0, twin) == pytest.approx(0.0)


def test_urysohn_stays_in_unit_interval(twin):
    for a, b in itertools.product((-0.6, -0.2, 0.1, 0.4), repeat=2):
        for d in (0, 1):
            v = urysohn_eval((a, b), d, twin)
            assert 0.0 <= v <= 1.0


# ---------------------------------------------------------------- lattice split


def test_integer_fractional_examples(twin):
    z, frac, status = integer_fractional((3.0, 4.0), twin)
    assert embed_phi(z) == (3, 4)
    assert frac == pytest.approx((0.0, 0.0))
    assert status == "exact"

    z, frac, status = integer_fractional((0.25, 0.25), twin)
    assert embed_phi(z) == (0, 0)
    assert frac == pytest.approx((0.25, 0.25))
    assert status == "exact"


def test_integer_fractional_reassembles(twin):
    for gamma in ((3.0, 4.0), (0.25, 0.25), (-1.0, -0.5), (1.3, -0.8)):
        z, frac, _ = integer_fractional(gamma, twin)
        got = tuple(p + f for p, f in zip(embed_phi(z), frac))
        assert got == pytest.approx(gamma)


# ---------------------------------------------------------------- raster


def test_raster_calibrated_area_is_exact(twin):
    r = rasterize_tile(twin, TileParams(depth=14))
    assert r.depth == 14
    assert len(r.points) == 2**14
    assert r.area_grid == 128  # round(|det|^(depth/n))
    assert r.area_pixel_count == 128**2
    assert r.area_estimate == pytest.approx(1.0)
    assert r.sup_norm == pytest.approx(1.4609375)


def test_raster_smaller_depth_still_covers(twin):
    r = rasterize_tile(twin, TileParams(depth=8))
    assert len(r.points) == 2**8
    assert 0.5 < r.area_estimate < 2.0


# ---------------------------------------------------------------- boundary


def test_boundary_box_counts_frozen(twin):
    rep = boundary_stats(twin)
    assert rep.scales == (2, 3, 4, 5)
    assert rep.counts == {2: 33, 3: 96, 4: 269, 5: 784}
    assert rep.dimension_estimate == pytest.approx(1.51974470361, abs=1e-6)
    assert rep.mu_estimate == pytest.approx(1.69334079302, abs=1e-6)
    assert 1.0 <= rep.mu_estimate < 2.0


# ---------------------------------------------------------------- border


def test_border_hit_zero_depth_is_vacuous(twin, b2):
    # with no refutation budget every translate stays viable
    assert border_hit((0, 0), 1, twin, 0)
    assert border_hit((1,), 1, b2, 0)
