"""Verification and diagnostics for grid fields."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .envelope import Field, residual
from .expr import parse_expression
from .lattice import ArmTable
from .scalar import Alpha, as_alpha

__all__ = [
    "Violation",
    "ViolationReport",
    "AlphaHyperplane",
    "check_alpha_convex",
    "gradient",
    "support_hyperplane",
    "lipschitz_estimate",
    "c1_diagnostic",
    "check_composition",
    "compare_fields",
    "interior_mask",
]

ORDER_TOL = 1e-9


@dataclass(frozen=True)
class Violation:
    node: int
    line: tuple[int, int]
    chord_value: float
    field_value: float
    deficit: float


@dataclass
class ViolationReport:
    violations: list[Violation] = dc_field(default_factory=list)
    tol: float = 0.0

    @property
    def worst(self) -> float:
        return max((v.deficit for v in self.violations), default=0.0)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __len__(self):
        return len(self.violations)

    def to_dict(self, limit: int = 50) -> dict:
        return {
            "count": len(self.violations),
            "worst_deficit": self.worst,
            "tol": self.tol,
            "violations": [
                {
                    "node": v.node,
                    "line": list(v.line),
                    "chord_value": v.chord_value,
                    "field_value": v.field_value,
                    "deficit": v.deficit,
                }
                for v in sorted(self.violations, key=lambda v: -v.deficit)[:limit]
            ],
        }


def check_alpha_convex(field: Field, alpha, arms: ArmTable | None = None, tol: float = 1e-9) -> ViolationReport:
    """List nodes where ``u(z) > chord + tol`` on the tightest stencil line."""
    arms = arms or field.arms
    al = as_alpha(alpha)
    r, _ = residual(field, al, arms)
    bad = np.flatnonzero(r < -tol)
    out = []
    if bad.size:
        from . import _kernels
        from .envelope import _kind, _lines

        kind, k = _kind(al)
        dirs = arms.directions.vectors
        u = field.values
        if al.is_quasiconvex:
            ln = _lines(arms)
            _, arg = _kernels.ray_minimum_residual(u, ln.dir, ln.ptr, ln.nodes, arms.bvalue, arms.n_lines)
        for i in bad:
            # identify the line attaining the minimum
            if al.is_quasiconvex:
                d = int(arg[i])
            else:
                vals = []
                for d in range(arms.n_lines):
                    ends = [u[j] if (j := arms.nbr[i, d, s]) >= 0 else arms.bvalue[i, d, s] for s in (0, 1)]
                    vals.append(_kernels.chord(kind, k, ends[0], ends[1], arms.t0[i, d]))
                d = int(np.argmin(vals))
            c = u[i] + r[i]
            out.append(Violation(int(i), dirs[d], float(c), float(u[i]), float(-r[i])))
    return ViolationReport(out, tol)


def _axis_line(arms: ArmTable, vec) -> int:
    for k, d in enumerate(arms.directions.vectors):
        if d == vec:
            return k
    raise ValueError(f"direction {vec} not in the stencil")


def gradient(field: Field) -> np.ndarray:
    """Per-node gradient from the two axis lines.

    Three-point formula on the (possibly unequal) arms; boundary arms use the
    cached boundary values, so it is exact for quadratics everywhere and
    reduces to central differences at nodes with two interior neighbours.
    """
    arms = field.arms
    u = field.values
    out = np.empty((u.size, 2))
    for axis, vec in enumerate(((1, 0), (0, 1))):
        k = _axis_line(arms, vec)
        nb = arms.nbr[:, k, :]
        vals = np.where(nb >= 0, u[np.maximum(nb, 0)], arms.bvalue[:, k, :])
        sm = arms.length[:, k, 0]
        sp = arms.length[:, k, 1]
        um, up = vals[:, 0], vals[:, 1]
        out[:, axis] = (sm * sm * (up - u) + sp * sp * (u - um)) / (sm * sp * (sm + sp))
    return out


def interior_mask(field: Field, margin: float) -> np.ndarray:
    """Nodes farther than ``margin`` from the boundary."""
    d = field.arms.domain.distance_to_boundary(field.points)
    return d > margin


@dataclass(frozen=True)
class AlphaHyperplane:
    """``pi(z) = v(<z - base, nu>)`` with ``v(t) = value0 + log(1 + C t) / K``.

    At alpha = 1 ``v(t) = value0 + slope_c * t``.
    """

    base: tuple[float, float]
    nu: tuple[float, float]
    value0: float
    slope_c: float
    alpha: Alpha

    @property
    def lower_limit(self) -> float:
        """Left end of the admissible ``<z - base, nu>`` range."""
        if self.alpha.is_convex or self.slope_c == 0.0:
            return -math.inf
        return -1.0 / self.slope_c

    def __call__(self, z) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=float))
        t = (z - np.asarray(self.base)) @ np.asarray(self.nu)
        if self.alpha.is_convex:
            return self.value0 + self.slope_c * t
        if self.slope_c == 0.0:
            return np.full(t.shape, self.value0)
        with np.errstate(invalid="ignore", divide="ignore"):
            v = self.value0 + np.log1p(self.slope_c * t) / self.alpha.k_alpha
        return np.where(t > self.lower_limit, v, np.nan)

    @property
    def gradient(self) -> np.ndarray:
        s = self.slope_c if self.alpha.is_convex else self.slope_c / self.alpha.k_alpha
        return s * np.asarray(self.nu)


def support_hyperplane(field: Field, alpha, z0: int, delta_margin: float = 0.0):
    """Alpha-hyperplane through node ``z0`` matching the discrete gradient.

    Returns ``(plane, certificate)`` where the certificate is the largest
    ``pi(z) - u(z)`` over nodes inside the plane's half-space (shrunk by
    ``delta_margin``); it is ``<= 0`` up to discretization when the plane
    touches from below.
    """
    al = as_alpha(alpha)
    if al.is_quasiconvex:
        raise ValueError("alpha-hyperplanes need alpha > 0")
    u = field.values
    grad = gradient(field)[z0]
    norm = float(np.hypot(*grad))
    base = tuple(field.points[z0])
    if norm == 0.0:
        plane = AlphaHyperplane(base, (1.0, 0.0), float(u[z0]), 0.0, al)
    else:
        c = norm if al.is_convex else al.k_alpha * norm
        plane = AlphaHyperplane(base, tuple(grad / norm), float(u[z0]), c, al)
    t = (field.points - np.asarray(base)) @ np.asarray(plane.nu)
    ok = t > plane.lower_limit + delta_margin
    gap = plane(field.points[ok]) - u[ok]
    return plane, float(np.max(gap))


def _pairs_by_offset(field: Field, radius_nodes: float):
    """Yield ``(i, j)`` node-id arrays for lattice offsets within the radius."""
    grid = field.grid
    R = int(math.floor(radius_nodes))
    for di in range(0, R + 1):
        for dj in range(-R, R + 1):
            if di == 0 and dj <= 0:
                continue
            if di * di + dj * dj > radius_nodes * radius_nodes + 1e-9:
                continue
            ti = grid.ij[:, 0] + di
            tj = grid.ij[:, 1] + dj
            i0, i1 = grid.i_range
            j0, j1 = grid.j_range
            ok = (ti >= i0) & (ti <= i1) & (tj >= j0) & (tj <= j1)
            tgt = np.full(grid.n, -1)
            tgt[ok] = grid.index[tj[ok] - j0, ti[ok] - i0]
            src = np.flatnonzero(tgt >= 0)
            yield (di, dj), src, tgt[src]


def lipschitz_estimate(field: Field, margin: float | None = None) -> float:
    """Max ``|u(z) - u(z')| / |z - z'|`` over interior stencil neighbours away from the boundary."""
    arms = field.arms
    h = field.grid.h
    margin = 4 * h if margin is None else margin
    keep = interior_mask(field, margin)
    u = field.values
    best = 0.0
    for k, (p, q) in enumerate(arms.directions.vectors):
        nb = arms.nbr[:, k, 1]
        sel = keep & (nb >= 0)
        sel[sel] &= keep[nb[sel]]
        if sel.any():
            slope = np.abs(u[nb[sel]] - u[sel]) / (h * math.hypot(p, q))
            best = max(best, float(slope.max()))
    return best


def c1_diagnostic(field: Field, multiples=(2, 4, 8), margin: float | None = None) -> list[tuple[float, float]]:
    """Max gradient jump over node pairs within ``r = m h``, for each multiple ``m``.

    Only nodes farther than ``margin`` (default ``4h``) from the boundary count.
    """
    h = field.grid.h
    margin = 4 * h if margin is None else margin
    keep = interior_mask(field, margin)
    g = gradient(field)
    out = []
    for m in multiples:
        worst = 0.0
        for _, i, j in _pairs_by_offset(field, m):
            ok = keep[i] & keep[j]
            if ok.any():
                jump = np.hypot(*(g[i[ok]] - g[j[ok]]).T)
                worst = max(worst, float(jump.max()))
        out.append((m * h, worst))
    return out


def _as_callable(f):
    if callable(f):
        return f
    expr = parse_expression(f, variables=("s",))
    return lambda s: expr(s=s)


def check_composition(alpha, f, f1, f2, s_range, n: int = 10_000) -> bool:
    """Sample ``f' >= 0`` and ``alpha f'' + (1-alpha)(f'^2 - f') >= 0`` on ``s_range``.

    ``f``, ``f1 = f'`` and ``f2 = f''`` are callables or expressions in ``s``.
    When the test passes, ``f(u)`` is alpha-convex whenever ``u`` is.
    """
    al = as_alpha(alpha).alpha
    lo, hi = s_range
    s = np.linspace(lo, hi, n)
    _as_callable(f)(s)  # f must at least evaluate on the range
    d1 = np.broadcast_to(np.asarray(_as_callable(f1)(s), dtype=float), s.shape)
    d2 = np.broadcast_to(np.asarray(_as_callable(f2)(s), dtype=float), s.shape)
    cond = al * d2 + (1 - al) * (d1 * d1 - d1)
    return bool(np.all(d1 >= -1e-12) and np.all(cond >= -1e-12))


def compare_fields(f1: Field, f2: Field, tol: float = ORDER_TOL) -> tuple[float, bool, bool]:
    """``(sup |f1 - f2|, f1 <= f2, f2 <= f1)`` with orderings up to ``tol``."""
    if not f1.grid.same_as(f2.grid):
        raise ValueError("fields live on different grids")
    d = f1.values - f2.values
    return float(np.max(np.abs(d))), bool(np.all(d <= tol)), bool(np.all(-d <= tol))
