"""Brute-force references for the solver.

* ``convex_envelope_oracle``: alpha = 1, from boundary samples by Caratheodory
  (cheapest pair/triple of samples whose hull holds the point).
* ``quasiconvex_envelope_oracle``: alpha = 0, smallest sampled level whose
  sublevel hull holds the point.
* ``fixed_point_oracle``: plain Jacobi iteration of the discrete operator on a
  tiny grid, written with ordinary Python loops.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .geometry import BoundaryDatum, StrictlyConvexDomain, parse_datum
from .lattice import ArmTable, build_arms, build_directions, build_grid
from .scalar import as_alpha, chord_value

__all__ = [
    "BoundarySampling",
    "sample_boundary",
    "orient",
    "convex_hull",
    "in_convex_polygon",
    "convex_envelope_oracle",
    "quasiconvex_envelope_oracle",
    "fixed_point_oracle",
]

COLLINEAR_TOL = 1e-10


@dataclass(frozen=True)
class BoundarySampling:
    points: np.ndarray  # (m, 2)
    values: np.ndarray  # (m,)
    theta: np.ndarray

    @property
    def m(self) -> int:
        return self.values.size


def sample_boundary(domain: StrictlyConvexDomain, g, m: int = 1024, transform=None) -> BoundarySampling:
    """``m`` samples uniform in theta; ``transform`` maps the g-values if given."""
    if m < 16:
        raise ValueError("need at least 16 boundary samples")
    if isinstance(g, str):
        g = parse_datum(g)
    pts, theta = domain.boundary_sample(m)
    vals = g.at(domain, pts)
    if transform is not None:
        vals = np.asarray(transform(vals), dtype=float)
    return BoundarySampling(pts, vals, theta)


# -- planar predicates -------------------------------------------------------


def orient(a, b, c):
    """Twice the signed area of ``(a, b, c)``; positive when counter-clockwise."""
    a, b, c = (np.asarray(p, dtype=float) for p in (a, b, c))
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (
        c[..., 0] - a[..., 0]
    )


def convex_hull(points: np.ndarray) -> np.ndarray:
    """Counter-clockwise hull vertices (monotone chain, collinear points dropped)."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(pts) <= 2:
        return pts

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and orient(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    return np.asarray(lower[:-1] + upper[:-1])


def in_convex_polygon(poly: np.ndarray, z, tol: float = COLLINEAR_TOL) -> np.ndarray:
    """Membership of points ``z`` in the closed hull ``poly`` (CCW vertices)."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    if len(poly) == 0:
        return np.zeros(len(z), bool)
    if len(poly) == 1:
        return np.hypot(*(z - poly[0]).T) <= tol
    if len(poly) == 2:
        a, b = poly
        ab = b - a
        L = np.hypot(*ab)
        if L <= tol:
            return np.hypot(*(z - a).T) <= tol
        off = np.abs(orient(a, b, z)) / L
        t = ((z - a) @ ab) / L / L
        return (off <= tol) & (t >= -tol) & (t <= 1 + tol)
    inside = np.ones(len(z), bool)
    for a, b in zip(poly, np.roll(poly, -1, axis=0)):
        inside &= orient(a, b, z) / np.hypot(*(b - a)) >= -tol
    return inside


# -- alpha = 1 -----------------------------------------------------------------


def _triples_value(samples: BoundarySampling, z: np.ndarray) -> float:
    p = samples.points
    g = samples.values
    idx = np.array(list(itertools.combinations(range(samples.m), 3)))
    a, b, c = p[idx[:, 0]], p[idx[:, 1]], p[idx[:, 2]]
    area = orient(a, b, c)
    best = np.inf
    good = np.abs(area) > COLLINEAR_TOL
    if good.any():
        ar = area[good]
        la = orient(z, b[good], c[good]) / ar
        lb = orient(a[good], z, c[good]) / ar
        lc = 1.0 - la - lb
        ok = (la >= -COLLINEAR_TOL) & (lb >= -COLLINEAR_TOL) & (lc >= -COLLINEAR_TOL)
        if ok.any():
            sel = idx[good][ok]
            vals = la[ok] * g[sel[:, 0]] + lb[ok] * g[sel[:, 1]] + lc[ok] * g[sel[:, 2]]
            best = float(vals.min())
    # pairs: degenerate triples whose segment passes through z
    pi, pj = np.triu_indices(samples.m, 1)
    a, b = p[pi], p[pj]
    ab = b - a
    L2 = np.einsum("ij,ij->i", ab, ab)
    off = np.abs(orient(a, b, z)) / np.sqrt(L2)
    t = ((z - a) * ab).sum(axis=1) / L2
    ok = (off <= COLLINEAR_TOL) & (t >= 0) & (t <= 1)
    if ok.any():
        best = min(best, float(((1 - t[ok]) * g[pi[ok]] + t[ok] * g[pj[ok]]).min()))
    if not np.isfinite(best):
        raise RuntimeError(f"no sample triple covers {tuple(z)}")
    return best


def _lower_hull_planes(samples: BoundarySampling) -> np.ndarray:
    from scipy.spatial import ConvexHull, QhullError

    lifted = np.column_stack([samples.points, samples.values])
    try:
        hull = ConvexHull(lifted)
    except QhullError:
        # coplanar lift (affine data): joggled input, facets still exact to ~1e-11
        hull = ConvexHull(lifted, qhull_options="QJ")
    eq = hull.equations  # n . x + d <= 0 inside, outward normals
    lower = eq[eq[:, 2] < -1e-12]
    # plane: g = -(n0 x + n1 y + d) / n2
    return np.column_stack([-lower[:, 0] / lower[:, 2], -lower[:, 1] / lower[:, 2], -lower[:, 3] / lower[:, 2]])


def convex_envelope_oracle(samples: BoundarySampling, z, method: str = "auto"):
    """Convex envelope of sampled boundary data at interior point(s) ``z``.

    ``method="triples"`` enumerates all pairs and triples (O(m^3), m <= 256);
    ``method="hull"`` takes the max over the lower facets of the lifted 3-D
    hull, which is the same function and vectorizes over many points.
    """
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    zz = np.atleast_2d(z)
    if method == "auto":
        method = "triples" if samples.m <= 64 and len(zz) <= 4 else "hull"
    if method == "triples":
        if samples.m > 256:
            raise ValueError("triple enumeration is limited to m <= 256")
        out = np.array([_triples_value(samples, q) for q in zz])
    elif method == "hull":
        planes = _lower_hull_planes(samples)
        out = np.empty(len(zz))
        for s in range(0, len(zz), 2048):
            q = zz[s : s + 2048]
            out[s : s + 2048] = (q @ planes[:, :2].T + planes[:, 2]).max(axis=1)
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(out[0]) if single else out


# -- alpha = 0 -----------------------------------------------------------------


def quasiconvex_envelope_oracle(samples: BoundarySampling, z):
    """Smallest sampled level ``lam`` with ``z`` in the hull of ``{g <= lam}``."""
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    zz = np.atleast_2d(z)
    order = np.argsort(samples.values, kind="stable")
    levels = samples.values[order]
    pts = samples.points[order]
    m = len(levels)
    hulls: dict[int, np.ndarray] = {}

    def hull_upto(k):
        if k not in hulls:
            hulls[k] = convex_hull(pts[: k + 1])
        return hulls[k]

    # parallel binary search over the level index for all query points
    lo = np.zeros(len(zz), dtype=np.int64)
    hi = np.full(len(zz), m - 1, dtype=np.int64)
    if not in_convex_polygon(hull_upto(m - 1), zz).all():
        raise RuntimeError("query point outside the hull of all samples")
    while np.any(lo < hi):
        mid = (lo + hi) // 2
        active = lo < hi
        for k in np.unique(mid[active]):
            sel = active & (mid == k)
            inside = in_convex_polygon(hull_upto(int(k)), zz[sel])
            idx = np.flatnonzero(sel)
            hi[idx[inside]] = k
            lo[idx[~inside]] = k + 1
    # ties: all samples at the chosen level are already included via the sort
    out = levels[lo]
    return float(out[0]) if single else out


# -- discrete operator -------------------------------------------------------------


def _ray_min(u, arms: ArmTable, i: int, d: int, side: int) -> float:
    best = np.inf
    z = i
    while True:
        j = arms.nbr[z, d, side]
        if j < 0:
            return min(best, arms.bvalue[z, d, side])
        best = min(best, u[j])
        z = j


def fixed_point_oracle(domain: StrictlyConvexDomain, g, alpha, h: float, W: int, max_nodes: int = 200,
                       tol: float = 1e-14, max_iter: int = 1_000_000) -> np.ndarray:
    """Jacobi iteration of the chord-min operator from the constant barrier.

    Returns node values in grid order.  At alpha = 0 the chord ends are ray
    minima, matching the solver's operator.
    """
    if isinstance(g, str):
        g = parse_datum(g)
    al = as_alpha(alpha)
    grid = build_grid(domain, h)
    if grid.n > max_nodes:
        raise ValueError(f"grid has {grid.n} nodes, oracle budget is {max_nodes}")
    arms = build_arms(grid, domain, g, build_directions(W))
    theta = 2 * np.pi * np.arange(4096) / 4096
    top = max(float(g.at_angles(domain, theta).max()), float(arms.boundary_values().max()))
    u = np.full(grid.n, top + 1e-6)
    for _ in range(max_iter):
        new = u.copy()
        for i in range(grid.n):
            for d in range(arms.n_lines):
                if al.is_quasiconvex:
                    a = _ray_min(u, arms, i, d, 0)
                    b = _ray_min(u, arms, i, d, 1)
                    c = max(a, b)
                else:
                    ends = []
                    for side in (0, 1):
                        j = arms.nbr[i, d, side]
                        ends.append(u[j] if j >= 0 else arms.bvalue[i, d, side])
                    c = chord_value(al, ends[0], ends[1], arms.t0[i, d])
                new[i] = min(new[i], c)
        delta = float(np.max(u - new))
        u = new
        if delta <= tol:
            break
    return u
