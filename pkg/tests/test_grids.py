import numpy as np
import pytest

from fracheat import grids
from fracheat.errors import ValidationError


def test_interval_geometry():
    dom = grids.Interval(-1.0, 1.0)
    assert dom.n == 1
    assert dom.volume() == pytest.approx(2.0)
    assert dom.diameter() == pytest.approx(2.0)
    assert dom.delta(np.array([[0.25]]))[0] == pytest.approx(0.75)
    assert dom.contains(np.array([[0.99]]))[0]
    assert not dom.contains(np.array([[1.01]]))[0]


def test_interval_boundary_rule_is_counting_measure():
    dom = grids.Interval(-1.0, 1.0)
    pts, wts, normals = dom.boundary_rule(0.1)
    assert pts.shape == (2, 1)
    assert np.allclose(wts, 1.0)
    assert np.allclose(np.sort(normals[:, 0]), [-1.0, 1.0])


def test_disk_geometry():
    dom = grids.Disk((0.5, -0.5), 2.0)
    assert dom.n == 2
    assert dom.volume() == pytest.approx(np.pi * 4.0)
    assert dom.diameter() == pytest.approx(4.0)
    pts, wts, normals = dom.boundary_rule(0.05)
    assert wts.sum() == pytest.approx(2 * np.pi * 2.0, rel=1e-10)
    # normals are unit outward radial vectors
    rad = pts - np.array([0.5, -0.5])
    assert np.allclose(normals, rad / np.linalg.norm(rad, axis=1)[:, None])


def test_rectangle_geometry():
    dom = grids.Rectangle(0.0, 2.0, -1.0, 1.0)
    assert dom.volume() == pytest.approx(4.0)
    pts, wts, normals = dom.boundary_rule(0.1)
    assert wts.sum() == pytest.approx(8.0, rel=1e-12)
    assert np.allclose(np.linalg.norm(normals, axis=1), 1.0)


def test_divergence_identity():
    for dom in (grids.Interval(-1.0, 1.0),
                grids.Disk((0.0, 0.0), 1.0),
                grids.Rectangle(0.0, 1.0, 0.0, 2.0)):
        got, want = grids.divergence_check(dom)
        assert got == pytest.approx(want, rel=1e-9)


def test_build_grid_rejects_coarse_h():
    with pytest.raises(ValidationError):
        grids.build_grid(grids.Interval(-1.0, 1.0), 0.5)


def test_interval_grid_nodes():
    grid = grids.build_grid(grids.Interval(-1.0, 1.0), 0.125)
    assert len(grid) == 15
    assert grid.nodes.shape == (15, 1)
    # all interior, uniformly spaced, delta consistent with the domain
    assert np.allclose(np.diff(grid.nodes[:, 0]), 0.125)
    assert np.allclose(grid.delta,
                       np.ravel(grid.domain.delta(grid.nodes)))
    assert grid.node_weight() == pytest.approx(0.125)


def test_disk_grid_stays_inside():
    grid = grids.build_grid(grids.Disk((0.0, 0.0), 1.0), 0.1)
    assert np.all(np.hypot(grid.nodes[:, 0], grid.nodes[:, 1]) < 1.0)
    assert grid.node_weight() == pytest.approx(0.01)
    assert len(grid) * 0.01 == pytest.approx(np.pi, rel=0.05)


def test_inner_region_masks_by_depth():
    grid = grids.build_grid(grids.Interval(-1.0, 1.0), 0.0625)
    mask = grid.inner_region(0.5)
    assert np.all(grid.delta[mask] >= 0.5)
    assert np.all(grid.delta[~mask] < 0.5)
    assert mask.sum() > 0


def test_domain_json_round_trip():
    for dom in (grids.Interval(-1.0, 1.0),
                grids.Disk((0.25, 0.0), 1.5),
                grids.Rectangle(0.0, 1.0, 0.0, 2.0)):
        back = grids.domain_from_json(dom.to_json())
        assert back.to_json() == dom.to_json()


def test_bounding_boxes():
    lo, hi = grids.Interval(-1.0, 3.0).bounding_box()
    assert np.allclose(lo, [-1.0]) and np.allclose(hi, [3.0])
    lo, hi = grids.Disk((1.0, 2.0), 0.5).bounding_box()
    assert np.allclose(lo, [0.5, 1.5]) and np.allclose(hi, [1.5, 2.5])
    lo, hi = grids.Rectangle(0.0, 1.0, -2.0, 2.0).bounding_box()
    assert np.allclose(lo, [0.0, -2.0]) and np.allclose(hi, [1.0, 2.0])
