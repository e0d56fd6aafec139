"""Discrete alpha-convex envelopes by monotone fixed-point iteration.

The discrete envelope is the largest grid field whose value at every node is
at most the chord value along each stencil line, where chord ends are the
neighbouring nodes or, next to the boundary, the boundary exit point carrying
``g``.  Iteration starts from a constant upper barrier and only ever lowers
values, so it converges to that largest fixed point.

Each iteration runs a *line pass* (every lattice line replaced by its own 1-D
envelope, which moves information across the whole line at once) followed by
a local Gauss-Seidel sweep.  For ``alpha > 0`` the line pass does not change
the fixed point: along a lattice line, the local chord inequality and the
all-pairs one define the same set of fields.  For ``alpha = 0`` the local rule
alone admits flat plateaus (every node keeps one neighbour at the plateau
level), so the chord ends are taken as the minima over the two rays instead.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .geometry import BoundaryDatum, StrictlyConvexDomain, parse_datum
from .lattice import ArmTable, Grid, build_arms, build_directions, build_grid
from .scalar import Alpha, as_alpha, chord_value

logger = logging.getLogger(__name__)

__all__ = [
    "Field",
    "EnvelopeResult",
    "init_field",
    "chord_update",
    "sweep",
    "solve_envelope",
    "solve_on_arms",
    "residual",
    "alpha_sweep",
    "setup",
    "SWEEP_ORDERS",
]

SWEEP_ORDERS = ("forward-row", "backward-row", "forward-column", "backward-column")
BARRIER_SAMPLES = 4096
BARRIER_MARGIN = 1e-6


@dataclass(eq=False)
class Field:
    """Values on the interior nodes of ``arms.grid``; boundary values live in ``arms``."""

    arms: ArmTable
    values: np.ndarray

    @property
    def grid(self) -> Grid:
        return self.arms.grid

    @property
    def points(self) -> np.ndarray:
        return self.grid.points

    def copy(self) -> "Field":
        return Field(self.arms, self.values.copy())

    @classmethod
    def sample(cls, arms: ArmTable, fn) -> "Field":
        """Function ``fn(x, y)`` on the nodes and at the boundary arm ends."""
        p = arms.grid.points
        vals = np.broadcast_to(np.asarray(fn(p[:, 0], p[:, 1]), dtype=float), (arms.grid.n,)).copy()
        mask = arms.nbr < 0
        bp = arms.bpoint[mask]
        bvalue = np.full(arms.nbr.shape, np.nan)
        bvalue[mask] = np.broadcast_to(np.asarray(fn(bp[:, 0], bp[:, 1]), dtype=float), (bp.shape[0],))
        return cls(arms.with_boundary_values(bvalue), vals)

    def map(self, f) -> "Field":
        """Pointwise ``f`` applied to node and boundary values alike."""
        arms = self.arms.with_boundary_values(f(self.arms.bvalue))
        return Field(arms, np.asarray(f(self.values), dtype=float))


@dataclass
class EnvelopeResult:
    field: Field
    iterations: int
    last_sweep_delta: float
    residual_max: float
    alpha: Alpha
    h: float
    W: int
    tol: float
    converged: bool
    mode: str = "gauss-seidel"

    @property
    def values(self) -> np.ndarray:
        return self.field.values


def _kind(al: Alpha) -> tuple[int, float]:
    if al.is_quasiconvex:
        return 0, 0.0
    if al.is_convex:
        return 1, 0.0
    return 2, al.k_alpha


def setup(domain, g, h: float, W: int) -> ArmTable:
    """Grid, directions and arms for a problem."""
    if isinstance(g, str):
        g = parse_datum(g)
    grid = build_grid(domain, h)
    return build_arms(grid, domain, g, build_directions(W))


def init_field(grid_or_arms, g: BoundaryDatum | None = None, domain: StrictlyConvexDomain | None = None) -> Field:
    """Constant upper barrier: max of ``g`` over a dense boundary sample plus a margin."""
    arms = grid_or_arms
    if not isinstance(arms, ArmTable):
        raise TypeError("init_field needs the arm table of the grid")
    g = g if g is not None else arms.datum
    domain = domain or arms.domain
    top = float(np.max(g.at_angles(domain, 2 * np.pi * np.arange(BARRIER_SAMPLES) / BARRIER_SAMPLES)))
    bmax = arms.boundary_values()
    if bmax.size:
        top = max(top, float(np.max(bmax)))
    return Field(arms, np.full(arms.grid.n, top + BARRIER_MARGIN))


def chord_update(alpha, u_minus: float, u_plus: float, t0: float) -> float:
    """Value at the node of the 1-D solution through its two arm values."""
    if not 0.0 < t0 < 1.0:
        raise ValueError("t0 must lie in (0, 1)")
    return chord_value(alpha, u_minus, u_plus, t0)


def _order(grid: Grid, name: str) -> np.ndarray:
    if name == "forward-row":
        return np.arange(grid.n, dtype=np.int64)
    if name == "backward-row":
        return np.arange(grid.n - 1, -1, -1, dtype=np.int64)
    if name == "forward-column":
        return grid.column_major.astype(np.int64)
    if name == "backward-column":
        return grid.column_major[::-1].astype(np.int64)
    raise ValueError(f"unknown sweep order {name!r}")


def sweep(field: Field, alpha, arms: ArmTable | None = None, order: str = "forward-row", jacobi: bool = False):
    """One local relaxation pass; returns ``(field, max_delta)``.

    The field is updated in place (and returned).  ``jacobi`` reads all arm
    values from the state before the pass.
    """
    arms = arms or field.arms
    kind, k = _kind(as_alpha(alpha))
    u = field.values
    src = u.copy() if jacobi else u
    delta = _kernels.local_sweep(kind, k, u, src, _order(arms.grid, order), arms.nbr, arms.bvalue, arms.t0)
    return field, float(delta)


class _Lines:
    def __init__(self, arms: ArmTable):
        dirs, ptrs, nodes, pos = [], [np.zeros(1, np.int64)], [], []
        offset = 0
        for d, (ptr, nd, ps) in enumerate(arms.lines):
            dirs.append(np.full(ptr.size - 1, d, dtype=np.int64))
            ptrs.append(ptr[1:] + offset)
            offset += nd.size
            nodes.append(nd)
            pos.append(ps)
        self.dir = np.concatenate(dirs)
        self.ptr = np.concatenate(ptrs).astype(np.int64)
        self.nodes = np.concatenate(nodes)
        self.pos = np.concatenate(pos)


def _lines(arms: ArmTable) -> _Lines:
    cached = getattr(arms, "_flat_lines", None)
    if cached is None:
        cached = _Lines(arms)
        arms._flat_lines = cached
    return cached


def line_pass(field: Field, alpha, arms: ArmTable | None = None, jacobi: bool = False) -> float:
    """Replace the field on every lattice line by its 1-D envelope; returns max change."""
    arms = arms or field.arms
    kind, k = _kind(as_alpha(alpha))
    ln = _lines(arms)
    u = field.values
    src = u.copy() if jacobi else u
    return float(
        _kernels.line_pass(kind, k, u, src, ln.dir, ln.ptr, ln.nodes, ln.pos, arms.length, arms.bvalue)
    )


def residual(field: Field, alpha, arms: ArmTable | None = None):
    """Per-node ``min over lines of (chord - u)`` and its max absolute value.

    At ``alpha = 0`` the chord ends are the ray minima along each line.
    """
    arms = arms or field.arms
    al = as_alpha(alpha)
    if al.is_quasiconvex:
        ln = _lines(arms)
        r, _ = _kernels.ray_minimum_residual(
            field.values, ln.dir, ln.ptr, ln.nodes, arms.bvalue, arms.n_lines
        )
    else:
        kind, k = _kind(al)
        r = _kernels.local_residual(kind, k, field.values, arms.nbr, arms.bvalue, arms.t0)
    return r, float(np.max(np.abs(r))) if r.size else 0.0


def solve_on_arms(
    arms: ArmTable,
    alpha,
    tol: float = 1e-10,
    max_iter: int = 100_000,
    mode: str = "gauss-seidel",
    start: Field | None = None,
    orders: str = "cycle",
    line_passes: bool = True,
) -> EnvelopeResult:
    """Iterate from ``start`` (default: the constant barrier) to the envelope.

    ``start`` must be an upper barrier (any field above the discrete
    envelope, e.g. the envelope for a smaller alpha).
    """
    al = as_alpha(alpha)
    if not tol > 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if mode not in ("gauss-seidel", "jacobi"):
        raise ValueError(f"unknown mode {mode!r}")
    if al.is_quasiconvex:
        warnings.warn(
            "alpha = 0: discrete fixed points are not unique; returning the maximal one",
            stacklevel=2,
        )
    field = start.copy() if start is not None else init_field(arms)
    field = Field(arms, field.values)
    jacobi = mode == "jacobi"
    delta = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        delta = 0.0
        if line_passes:
            delta = line_pass(field, al, arms, jacobi=jacobi)
        order = SWEEP_ORDERS[(it - 1) % 4] if orders == "cycle" else "forward-row"
        _, d = sweep(field, al, arms, order=order, jacobi=jacobi)
        delta = max(delta, d)
        if delta <= tol:
            break
    converged = delta <= tol
    if not converged:
        logger.warning("no convergence after %d iterations (delta %.3g)", it, delta)
    _, rmax = residual(field, al, arms)
    return EnvelopeResult(
        field, it, float(delta), rmax, al, arms.grid.h, arms.directions.width, tol, converged, mode
    )


def solve_envelope(
    domain: StrictlyConvexDomain,
    g,
    alpha,
    h: float,
    W: int = 2,
    tol: float = 1e-10,
    max_iter: int = 100_000,
    mode: str = "gauss-seidel",
    **kwargs,
) -> EnvelopeResult:
    arms = setup(domain, g, h, W)
    return solve_on_arms(arms, alpha, tol=tol, max_iter=max_iter, mode=mode, **kwargs)


def alpha_sweep(
    domain: StrictlyConvexDomain,
    g,
    alphas,
    h: float,
    W: int = 2,
    tol: float = 1e-10,
    max_iter: int = 100_000,
    mode: str = "gauss-seidel",
    arms: ArmTable | None = None,
) -> list[EnvelopeResult]:
    """Envelopes for ascending ``alphas``, each warm-started from the previous one.

    The envelope is non-increasing in alpha, so the previous result is an
    upper barrier for the next.
    """
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ValueError("need at least one alpha")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alphas must be strictly ascending")
    arms = arms or setup(domain, g, h, W)
    results = []
    start = None
    for a in alphas:
        res = solve_on_arms(arms, a, tol=tol, max_iter=max_iter, mode=mode, start=start)
        results.append(res)
        start = res.field
    return results
