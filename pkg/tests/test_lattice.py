import math

import numpy as np
import pytest

from alpha_envelope.geometry import disc, ellipse, parse_datum, superellipse
from alpha_envelope.lattice import build_arms, build_directions, build_grid


def test_grid_nine_nodes(unit_disc):
    g = build_grid(unit_disc, 0.5)
    assert g.n == 9
    pts = {tuple(p) for p in g.points}
    assert pts == {(x, y) for x in (-0.5, 0.0, 0.5) for y in (-0.5, 0.0, 0.5)}


def test_grid_too_coarse(unit_disc):
    with pytest.raises(ValueError):
        build_grid(unit_disc, 1.5)
    with pytest.raises(ValueError):
        build_grid(unit_disc, 0.0)


def test_grid_count_and_order(unit_disc):
    h = 1 / 32
    g = build_grid(unit_disc, h)
    assert math.pi / h**2 - 4 / h <= g.n <= math.pi / h**2 + 4 / h
    assert np.all(unit_disc.gauge(g.points) < 1 - 1e-14)
    # row-major: y index major, then x
    key = g.ij[:, 1] * 10_000 + g.ij[:, 0]
    assert np.all(np.diff(key) > 0)
    for k in (0, 17, g.n - 1):
        i, j = g.ij[k]
        assert g.node_at(i, j) == k
        np.testing.assert_array_equal(g.points[k], (i * h, j * h))
    assert g.node_at(10_000, 0) == -1


def test_directions():
    assert build_directions(1).lines() == {(1, 0), (0, 1), (1, 1), (-1, 1)}
    assert build_directions(2).lines() == build_directions(1).lines() | {(2, 1), (1, 2), (-1, 2), (-2, 1)}
    d3 = build_directions(3)
    assert len(d3) == 16
    for p, q in d3.vectors:
        assert math.gcd(abs(p), abs(q)) == 1 and max(abs(p), abs(q)) <= 3
    ang = [math.atan2(q, p) for p, q in d3.vectors]
    assert ang == sorted(ang) and 0 <= ang[0] and ang[-1] < math.pi
    with pytest.raises(ValueError):
        build_directions(0)


def _arms(domain, h, W, g="x"):
    return build_arms(build_grid(domain, h), domain, parse_datum(g), build_directions(W))


def test_arm_examples(unit_disc):
    arms = _arms(unit_disc, 0.5, 1)
    g = arms.grid
    k = arms.directions.vectors.index((1, 0))
    c = g.node_at(0, 0)
    assert (arms.nbr[c, k] >= 0).all()
    np.testing.assert_allclose(arms.length[c, k], (0.5, 0.5))
    assert arms.t0[c, k] == 0.5
    r = g.node_at(1, 0)
    assert arms.nbr[r, k, 0] == c and arms.nbr[r, k, 1] == -1
    np.testing.assert_allclose(arms.bpoint[r, k, 1], (1, 0), atol=1e-12)
    assert arms.length[r, k, 1] == pytest.approx(0.5, abs=1e-12)
    assert arms.bvalue[r, k, 1] == pytest.approx(1.0, abs=1e-12)
    kd = arms.directions.vectors.index((1, 1))
    q = g.node_at(1, 1)
    s = math.sqrt(2) * (math.sqrt(2) / 2 - 0.5)
    np.testing.assert_allclose(arms.bpoint[q, kd, 1], (math.sqrt(2) / 2,) * 2, atol=1e-12)
    assert arms.length[q, kd, 1] == pytest.approx(s, abs=1e-12)


@pytest.mark.parametrize(
    "domain,h,W",
    [(disc(), 1 / 16, 3), (ellipse(a=2, b=1), 0.1, 2), (superellipse(center=(0.2, 0.1), a=1.2, b=1, p=3), 1 / 12, 3)],
)
def test_arm_invariants(domain, h, W):
    arms = _arms(domain, h, W, "x^3 + y")
    n, L = arms.nbr.shape[:2]
    for k, (p, q) in enumerate(arms.directions.vectors):
        step = h * math.hypot(p, q)
        inner = arms.nbr[:, k, :] >= 0
        assert np.all(arms.length[:, k, :][inner] == step)
        assert np.all(arms.length[:, k, :][~inner] <= step)
        assert np.all(arms.length[:, k, :] > 0)
        # symmetry of interior arms
        src = np.flatnonzero(arms.nbr[:, k, 1] >= 0)
        assert np.array_equal(arms.nbr[arms.nbr[src, k, 1], k, 0], src)
    assert np.all((arms.t0 > 0) & (arms.t0 < 1))
    assert np.array_equal(arms.t0 * (arms.length[..., 0] + arms.length[..., 1]), arms.length[..., 0]) or np.allclose(
        arms.t0 * (arms.length[..., 0] + arms.length[..., 1]), arms.length[..., 0], rtol=0, atol=1e-16
    )
    bnd = arms.nbr < 0
    assert np.all(np.abs(domain.gauge(arms.bpoint[bnd]) - 1) <= 1e-12)
    assert np.all(np.isfinite(arms.bvalue[bnd])) and np.all(np.isnan(arms.bvalue[~bnd]))


def test_lines_cover_every_node(unit_disc):
    arms = _arms(unit_disc, 1 / 16, 2)
    for ptr, nodes, pos in arms.lines:
        assert np.array_equal(np.sort(nodes), np.arange(arms.grid.n))
        for a, b in zip(ptr[:-1], ptr[1:]):
            assert np.all(np.diff(pos[a:b]) > 0)
