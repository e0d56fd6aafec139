"""Strictly convex planar domains and boundary data.

A domain is described by its gauge ``rho`` (the Minkowski functional about
its center); the open domain is ``{rho < 1}``.  Supported shapes are discs,
axis-aligned ellipses and superellipses ``|x/a|^p + |y/b|^p < 1`` with
``p > 1``.  The boundary angle ``theta`` is the ray angle seen from the center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .expr import Expression, parse_expression

__all__ = [
    "StrictlyConvexDomain",
    "disc",
    "ellipse",
    "superellipse",
    "domain_from_spec",
    "BoundaryDatum",
    "parse_datum",
    "BUILTIN_DATA",
]

INSIDE_MARGIN = 1e-14
EXIT_TOL = 1e-12


@dataclass(frozen=True)
class StrictlyConvexDomain:
    kind: str
    center: tuple[float, float]
    semi_axes: tuple[float, float]
    exponent: float = 2.0

    def __post_init__(self):
        if self.kind not in ("disc", "ellipse", "superellipse"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        a, b = self.semi_axes
        if not (a > 0 and b > 0):
            raise ValueError("semi-axes must be positive")
        if not self.exponent > 1.0:
            raise ValueError("superellipse exponent must exceed 1 for strict convexity")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        object.__setattr__(self, "semi_axes", (float(a), float(b)))
        object.__setattr__(self, "exponent", float(self.exponent))

    # -- gauge and membership ---------------------------------------------

    def gauge(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        dx = (z[..., 0] - self.center[0]) / self.semi_axes[0]
        dy = (z[..., 1] - self.center[1]) / self.semi_axes[1]
        p = self.exponent
        if p == 2.0:
            return np.hypot(dx, dy)
        # scale by the larger component to avoid overflow in |.|^p
        m = np.maximum(np.abs(dx), np.abs(dy))
        safe = np.where(m > 0, m, 1.0)
        return np.where(
            m > 0, m * ((np.abs(dx) / safe) ** p + (np.abs(dy) / safe) ** p) ** (1.0 / p), 0.0
        )

    def contains(self, z) -> bool | np.ndarray:
        inside = self.gauge(z) < 1.0 - INSIDE_MARGIN
        return bool(inside) if np.ndim(inside) == 0 else inside

    @property
    def diameter(self) -> float:
        return 2.0 * max(self.semi_axes)

    @property
    def bounding_box(self) -> tuple[float, float, float, float]:
        cx, cy = self.center
        a, b = self.semi_axes
        return (cx - a, cx + a, cy - b, cy + b)

    # -- rays --------------------------------------------------------------

    def ray_exits(self, z, v) -> np.ndarray:
        """Exit distances ``s > 0`` with ``rho(z + s v) = 1`` for arrays of rays."""
        z = np.atleast_2d(np.asarray(z, dtype=float))
        v = np.atleast_2d(np.asarray(v, dtype=float))
        z, v = np.broadcast_arrays(z, v)
        if np.any(self.gauge(z) >= 1.0 - INSIDE_MARGIN):
            raise ValueError("ray_exit needs interior starting points")
        lo = np.zeros(z.shape[0])
        hi = np.full(z.shape[0], max(self.semi_axes) * 1e-3)
        # exponential bracketing
        for _ in range(200):
            out = self.gauge(z + hi[:, None] * v) >= 1.0
            if out.all():
                break
            lo = np.where(out, lo, hi)
            hi = np.where(out, hi, 2.0 * hi)
        # bisection; the gauge is Lipschitz along the ray so width control suffices
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if np.all((mid == lo) | (mid == hi)):
                break
            out = self.gauge(z + mid[:, None] * v) >= 1.0
            hi = np.where(out, mid, hi)
            lo = np.where(out, lo, mid)
        g_lo = self.gauge(z + lo[:, None] * v)
        g_hi = self.gauge(z + hi[:, None] * v)
        s = np.where(np.abs(g_lo - 1.0) <= np.abs(g_hi - 1.0), lo, hi)
        return s

    def ray_exit(self, z, v) -> tuple[np.ndarray, float]:
        """Boundary point hit from interior ``z`` along unit ``v``, and its distance."""
        z = np.asarray(z, dtype=float)
        v = np.asarray(v, dtype=float)
        if not self.contains(z):
            raise ValueError(f"point {tuple(z)} is not interior")
        s = float(self.ray_exits(z, v)[0])
        return z + s * v, s

    def boundary_points(self, theta) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        c = np.broadcast_to(np.asarray(self.center), (theta.size, 2))
        v = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        s = self.ray_exits(c, v)
        return c + s[:, None] * v

    def boundary_point(self, theta: float) -> np.ndarray:
        return self.boundary_points([theta])[0]

    def angle_of(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        ang = np.arctan2(p[..., 1] - self.center[1], p[..., 0] - self.center[0])
        return np.mod(ang, 2 * np.pi)

    def boundary_sample(self, m: int) -> tuple[np.ndarray, np.ndarray]:
        """``m`` boundary points uniform in theta, with their angles."""
        theta = 2 * np.pi * np.arange(m) / m
        return self.boundary_points(theta), theta

    def distance_to_boundary(self, z, m: int = 4096) -> np.ndarray:
        """Distance from interior points to a dense boundary polygon."""
        from scipy.spatial import cKDTree

        pts, _ = self.boundary_sample(m)
        d, _ = cKDTree(pts).query(np.atleast_2d(z))
        return d

    def to_spec(self) -> dict:
        if self.kind == "disc":
            return {"kind": "disc", "center": list(self.center), "radius": self.semi_axes[0]}
        spec = {"kind": self.kind, "center": list(self.center), "semi_axes": list(self.semi_axes)}
        if self.kind == "superellipse":
            spec["exponent"] = self.exponent
        return spec


def disc(center=(0.0, 0.0), radius: float = 1.0) -> StrictlyConvexDomain:
    return StrictlyConvexDomain("disc", tuple(center), (radius, radius))


def ellipse(center=(0.0, 0.0), a: float = 2.0, b: float = 1.0) -> StrictlyConvexDomain:
    if a < b:
        raise ValueError("ellipse expects a >= b")
    return StrictlyConvexDomain("ellipse", tuple(center), (a, b))


def superellipse(center=(0.0, 0.0), a: float = 1.0, b: float = 1.0, p: float = 4.0):
    return StrictlyConvexDomain("superellipse", tuple(center), (a, b), p)


def domain_from_spec(spec: dict) -> StrictlyConvexDomain:
    kind = spec.get("kind")
    center = tuple(spec.get("center", (0.0, 0.0)))
    if kind == "disc":
        return disc(center, float(spec.get("radius", 1.0)))
    if kind == "ellipse":
        a, b = spec["semi_axes"]
        return ellipse(center, float(a), float(b))
    if kind == "superellipse":
        a, b = spec["semi_axes"]
        return superellipse(center, float(a), float(b), float(spec["exponent"]))
    raise ValueError(f"unknown domain kind {kind!r}")


BUILTIN_DATA = {
    "linear": "x",
    "cubic": "x^3",
    "saddle": "cos(2*theta)",
    "quartic": "-x^4",
}


class BoundaryDatum:
    """Boundary data ``g`` as a function of ``(x, y, theta)``.

    Built from an expression string, a builtin name from ``BUILTIN_DATA``, or a
    callable ``f(x, y, theta)`` operating on arrays.
    """

    def __init__(self, source: str | Callable, name: str | None = None):
        if isinstance(source, str):
            text = BUILTIN_DATA.get(source, source)
            self.expression: Expression | None = parse_expression(text)
            self._fn = lambda x, y, theta: self.expression(x=x, y=y, theta=theta)
            self.name = name or text
        else:
            self.expression = None
            self._fn = source
            self.name = name or getattr(source, "__name__", "callable")

    def at(self, domain: StrictlyConvexDomain, points) -> np.ndarray:
        """Evaluate at boundary points of ``domain`` (theta from its center)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        theta = domain.angle_of(pts)
        with np.errstate(all="ignore"):
            out = np.asarray(self._fn(pts[:, 0], pts[:, 1], theta), dtype=float)
        out = np.broadcast_to(out, (pts.shape[0],)).copy()
        if not np.all(np.isfinite(out)):
            raise ValueError(f"boundary datum {self.name!r} is not finite on the boundary")
        return out

    def at_angles(self, domain: StrictlyConvexDomain, theta) -> np.ndarray:
        return self.at(domain, domain.boundary_points(theta))

    def shifted(self, c: float) -> "BoundaryDatum":
        fn = self._fn
        return BoundaryDatum(lambda x, y, t: fn(x, y, t) + c, f"{self.name} + {c}")

    def __repr__(self):
        return f"BoundaryDatum({self.name!r})"


def parse_datum(text: str) -> BoundaryDatum:
    return BoundaryDatum(text)
