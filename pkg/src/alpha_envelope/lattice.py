"""Uniform grids, wide-stencil directions and per-node chord arms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .geometry import BoundaryDatum, StrictlyConvexDomain

__all__ = [
    "Grid",
    "DirectionSet",
    "ArmTable",
    "build_grid",
    "build_directions",
    "build_arms",
]


@dataclass(eq=False)
class Grid:
    """Lattice points ``origin + h*(i, j)`` strictly inside the domain.

    Nodes are numbered row-major: by ``j`` (the y index) first, then ``i``.
    ``index`` maps ``(j - j0, i - i0)`` to a node id, ``-1`` outside.
    """

    h: float
    origin: tuple[float, float]
    i_range: tuple[int, int]
    j_range: tuple[int, int]
    ij: np.ndarray  # (n, 2) integer (i, j)
    index: np.ndarray  # (nj, ni) node id or -1

    @property
    def n(self) -> int:
        return self.ij.shape[0]

    @cached_property
    def points(self) -> np.ndarray:
        return np.asarray(self.origin) + self.h * self.ij.astype(float)

    def node_at(self, i: int, j: int) -> int:
        i0, i1 = self.i_range
        j0, j1 = self.j_range
        if i0 <= i <= i1 and j0 <= j <= j1:
            return int(self.index[j - j0, i - i0])
        return -1

    def same_as(self, other: "Grid") -> bool:
        return (
            self.h == other.h
            and self.origin == other.origin
            and self.ij.shape == other.ij.shape
            and bool(np.array_equal(self.ij, other.ij))
        )

    @cached_property
    def column_major(self) -> np.ndarray:
        return np.lexsort((self.ij[:, 1], self.ij[:, 0]))


@dataclass(frozen=True)
class DirectionSet:
    width: int
    vectors: tuple[tuple[int, int], ...]

    def __len__(self):
        return len(self.vectors)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.vectors, dtype=np.int64)

    def lines(self) -> set[tuple[int, int]]:
        """Canonical line representatives (sign chosen so the vector is 'positive')."""
        return {_canonical(p, q) for p, q in self.vectors}


def _canonical(p: int, q: int) -> tuple[int, int]:
    if q < 0 or (q == 0 and p < 0):
        return (-p, -q)
    return (p, q)


def build_directions(width: int) -> DirectionSet:
    """Primitive lattice vectors with max-norm <= width, one per line, by angle in [0, pi)."""
    if width < 1:
        raise ValueError("stencil width must be at least 1")
    vecs = set()
    for p in range(-width, width + 1):
        for q in range(-width, width + 1):
            if (p, q) != (0, 0) and math.gcd(abs(p), abs(q)) == 1:
                vecs.add(_canonical(p, q))
    ordered = sorted(vecs, key=lambda d: math.atan2(d[1], d[0]))
    return DirectionSet(width, tuple(ordered))


def build_grid(domain: StrictlyConvexDomain, h: float) -> Grid:
    if not h > 0:
        raise ValueError("grid spacing must be positive")
    if h > domain.diameter / 4:
        raise ValueError(f"grid spacing {h} exceeds a quarter of the domain diameter")
    ox, oy = domain.center
    x0, x1, y0, y1 = domain.bounding_box
    i0, i1 = math.floor((x0 - ox) / h), math.ceil((x1 - ox) / h)
    j0, j1 = math.floor((y0 - oy) / h), math.ceil((y1 - oy) / h)
    jj, ii = np.meshgrid(np.arange(j0, j1 + 1), np.arange(i0, i1 + 1), indexing="ij")
    pts = np.stack([ox + h * ii, oy + h * jj], axis=-1)
    inside = domain.gauge(pts) < 1.0 - 1e-14
    if not inside.any():
        raise ValueError("grid has no interior nodes")
    index = np.full(inside.shape, -1, dtype=np.int64)
    index[inside] = np.arange(int(inside.sum()))
    ij = np.stack([ii[inside], jj[inside]], axis=-1).astype(np.int64)
    return Grid(float(h), (float(ox), float(oy)), (i0, i1), (j0, j1), ij, index)


@dataclass(eq=False)
class ArmTable:
    """Chord arms for every node and stencil line.

    Arrays have shape ``(n, L, 2)`` with the last axis ``(minus, plus)``:
    ``nbr`` holds an interior node id or ``-1`` for a boundary end,
    ``length`` the Euclidean arm length, ``bpoint``/``bvalue`` the boundary
    exit point and ``g`` there (``nan`` for interior arms).  ``t0`` is
    ``s_minus / (s_minus + s_plus)``, the chord parameter of the node itself.
    """

    grid: Grid
    domain: StrictlyConvexDomain
    datum: BoundaryDatum | None
    directions: DirectionSet
    nbr: np.ndarray
    length: np.ndarray
    bpoint: np.ndarray
    bvalue: np.ndarray
    t0: np.ndarray

    @property
    def n_lines(self) -> int:
        return self.nbr.shape[1]

    def with_boundary_values(self, bvalue: np.ndarray) -> "ArmTable":
        return ArmTable(
            self.grid, self.domain, self.datum, self.directions,
            self.nbr, self.length, self.bpoint, bvalue, self.t0,
        )

    def boundary_values(self) -> np.ndarray:
        """All cached boundary g-values (flattened)."""
        return self.bvalue[self.nbr < 0]

    @cached_property
    def lines(self) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
        """Lattice lines per direction, in CSR form.

        For direction ``k`` returns ``(ptr, nodes, pos)``: line ``l`` visits
        ``nodes[ptr[l]:ptr[l+1]]`` in the plus direction; ``pos`` is the
        arc-length of each node measured from the line's minus boundary end.
        Line ends are read from the first/last node's boundary arms.
        """
        out = []
        for k in range(self.n_lines):
            starts = np.flatnonzero(self.nbr[:, k, 0] < 0)
            ptr = [0]
            nodes = []
            pos = []
            for s in starts:
                z = int(s)
                p = self.length[z, k, 0]
                while True:
                    nodes.append(z)
                    pos.append(p)
                    nxt = int(self.nbr[z, k, 1])
                    if nxt < 0:
                        break
                    p += self.length[z, k, 1]
                    z = nxt
                ptr.append(len(nodes))
            out.append(
                (np.asarray(ptr, np.int64), np.asarray(nodes, np.int64), np.asarray(pos, float))
            )
        return out


def build_arms(
    grid: Grid,
    domain: StrictlyConvexDomain,
    g: BoundaryDatum | None,
    dirs: DirectionSet,
) -> ArmTable:
    n, L = grid.n, len(dirs)
    nbr = np.full((n, L, 2), -1, dtype=np.int64)
    length = np.zeros((n, L, 2))
    bpoint = np.full((n, L, 2, 2), np.nan)
    i0, i1 = grid.i_range
    j0, j1 = grid.j_range
    for k, (p, q) in enumerate(dirs.vectors):
        step = grid.h * math.hypot(p, q)
        unit = np.array([p, q], dtype=float) / math.hypot(p, q)
        for side, sgn in ((0, -1), (1, 1)):
            ti = grid.ij[:, 0] + sgn * p
            tj = grid.ij[:, 1] + sgn * q
            ok = (ti >= i0) & (ti <= i1) & (tj >= j0) & (tj <= j1)
            target = np.full(n, -1, dtype=np.int64)
            target[ok] = grid.index[tj[ok] - j0, ti[ok] - i0]
            nbr[:, k, side] = target
            length[:, k, side] = step
            out = target < 0
            if out.any():
                z = grid.points[out]
                v = np.broadcast_to(sgn * unit, z.shape)
                # a boundary lattice point makes s equal the step up to rounding
                s = np.minimum(domain.ray_exits(z, v), step)
                length[out, k, side] = s
                bpoint[out, k, side] = z + s[:, None] * v
    bvalue = np.full((n, L, 2), np.nan)
    if g is not None:
        mask = nbr < 0
        bvalue[mask] = g.at(domain, bpoint[mask])
    t0 = length[:, :, 0] / (length[:, :, 0] + length[:, :, 1])
    return ArmTable(grid, domain, g, dirs, nbr, length, bpoint, bvalue, t0)
