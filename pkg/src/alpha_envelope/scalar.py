"""One-dimensional calculus for the operator ``alpha*v'' + (1-alpha)*|v'|^2``.

Everything here is closed form.  For ``alpha in (0, 1)`` the Dirichlet problem
on ``[0, 1]`` with ``v(0) = a`` and ``v(1) = b`` has the solution

    v(t) = a + log(1 + (exp((b - a) K) - 1) t) / K,     K = (1 - alpha) / alpha,

which degenerates to linear interpolation at ``alpha = 1`` and to
``max(a, b)`` at ``alpha = 0``.  Equivalently ``exp(K v)`` is affine in ``t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "Alpha",
    "EtaSolution",
    "make_alpha",
    "as_alpha",
    "chord_value",
    "chord_values",
    "chord_derivative",
    "maximal_interval",
    "chord_consistency",
    "eta_solution",
    "eta_value",
    "ode_residual",
]

# |K (b - a)| below this uses the affine value plus first-order correction
_SMALL_KD = 1e-8


@dataclass(frozen=True)
class Alpha:
    """Interpolation parameter; ``k_alpha`` is ``(1 - alpha) / alpha``.

    ``k_alpha`` is ``nan`` at ``alpha == 0`` (the quasiconvex limit).
    """

    alpha: float
    k_alpha: float = field(init=False)

    def __post_init__(self):
        a = float(self.alpha)
        if not (0.0 <= a <= 1.0) or math.isnan(a):
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)
        k = (1.0 - a) / a if a > 0.0 else math.nan
        object.__setattr__(self, "k_alpha", k)

    @property
    def is_quasiconvex(self) -> bool:
        return self.alpha == 0.0

    @property
    def is_convex(self) -> bool:
        return self.alpha == 1.0

    def __float__(self):
        return self.alpha


def make_alpha(alpha: float) -> Alpha:
    return Alpha(alpha)


def as_alpha(alpha) -> Alpha:
    """Accept an :class:`Alpha` or a bare number."""
    return alpha if isinstance(alpha, Alpha) else Alpha(alpha)


def maximal_interval(alpha, a: float, b: float) -> tuple[float, float]:
    """Largest interval on which the chord solution through ``(0, a), (1, b)`` exists."""
    al = as_alpha(alpha)
    if al.is_quasiconvex:
        raise NotImplementedError("the maximal interval degenerates at alpha = 0")
    if al.is_convex or a == b:
        return (-math.inf, math.inf)
    x = abs(b - a) * al.k_alpha
    # 1 / (e^x - 1) written without overflow; underflows to 0 for huge x
    delta = math.exp(-x) / -math.expm1(-x)
    if b > a:
        return (-delta, math.inf)
    return (-math.inf, 1.0 + delta)


def _check_t(al: Alpha, a: float, b: float, t: float) -> None:
    if al.is_quasiconvex:
        if not 0.0 <= t <= 1.0:
            raise NotImplementedError("alpha = 0 chords are only defined on [0, 1]")
        return
    if 0.0 <= t <= 1.0:
        return
    lo, hi = maximal_interval(al, a, b)
    if not lo < t < hi:
        raise ValueError(f"t = {t} outside the maximal interval ({lo}, {hi})")


def _chord_kernel(k: float, a: float, b: float, t: float) -> float:
    # anchored at the larger endpoint so every exponent is <= 0
    if a == b:
        return a
    if a < b:
        hi, tp = b, t
    else:
        hi, tp = a, 1.0 - t
    gap = abs(b - a)
    s = 1.0 - tp  # parameter distance from the larger endpoint
    x = gap * k
    if x < _SMALL_KD:
        return hi - s * gap + 0.5 * s * (1.0 - s) * gap * x
    em = math.expm1(-x)
    if s * em > -0.5:
        return hi + math.log1p(s * em) / k
    # near the smaller end: both terms positive, no cancellation
    return hi + math.log(tp + s * math.exp(-x)) / k


def chord_value(alpha, a: float, b: float, t: float) -> float:
    """Value at ``t`` of the 1-D solution with ``v(0) = a`` and ``v(1) = b``.

    At ``alpha = 0`` the convention is ``v(0) = a``, ``v(1) = b`` and
    ``max(a, b)`` strictly inside.
    """
    al = as_alpha(alpha)
    a = float(a)
    b = float(b)
    t = float(t)
    _check_t(al, a, b, t)
    if t == 0.0:
        return a
    if t == 1.0:
        return b
    if al.is_quasiconvex:
        return max(a, b)
    if al.is_convex:
        return a + (b - a) * t
    return _chord_kernel(al.k_alpha, a, b, t)


def chord_values(alpha, a, b, t) -> np.ndarray:
    """Vectorized :func:`chord_value` for ``t`` in ``[0, 1]`` (no interval checks)."""
    al = as_alpha(alpha)
    a, b, t = np.broadcast_arrays(
        np.asarray(a, float), np.asarray(b, float), np.asarray(t, float)
    )
    if al.is_quasiconvex:
        out = np.maximum(a, b)
    elif al.is_convex:
        out = a + (b - a) * t
    else:
        k = al.k_alpha
        hi = np.maximum(a, b)
        gap = np.abs(b - a)
        tp = np.where(a < b, t, 1.0 - t)
        s = 1.0 - tp
        x = gap * k
        with np.errstate(divide="ignore", invalid="ignore"):
            em = s * np.expm1(-x)
            far = np.where(
                em > -0.5,
                hi + np.log1p(em) / k,
                hi + np.log(tp + s * np.exp(-x)) / k,
            )
        near = hi - s * gap + 0.5 * s * (1.0 - s) * gap * x
        out = np.where(x < _SMALL_KD, near, far)
    out = np.where(t == 0.0, a, out)
    return np.where(t == 1.0, b, out)


def chord_derivative(alpha, a: float, b: float, t: float) -> float:
    """``v'(t) = C / (K (1 + C t))`` with ``C = exp((b - a) K) - 1``."""
    al = as_alpha(alpha)
    if al.is_quasiconvex:
        raise NotImplementedError("no classical derivative at alpha = 0")
    a = float(a)
    b = float(b)
    t = float(t)
    _check_t(al, a, b, t)
    if al.is_convex or a == b:
        return b - a
    k = al.k_alpha
    x = (b - a) * k
    if abs(x) < _SMALL_KD:
        # expand around K = 0: v' = d - K d^2 (t - 1/2)
        d = b - a
        return d - k * d * d * (t - 0.5)
    # v'(t) = (1/K) * C / (1 + C t); rewritten from the larger endpoint
    if b > a:
        e = math.exp(-x)  # 1/(1+C)
        return (1.0 - e) / (k * (e + (1.0 - e) * t))
    c = math.expm1(x)  # in (-1, 0)
    return c / (k * (1.0 + c * t))


def chord_consistency(alpha, a: float, b: float, s: float, s2: float, t: float) -> float:
    """Chord through the values at ``s`` and ``s2``, evaluated at ``t``.

    Equals ``chord_value(alpha, a, b, s + t*(s2 - s))`` by uniqueness and scaling.
    """
    if not (0.0 <= s < s2 <= 1.0):
        raise ValueError("need 0 <= s < s2 <= 1")
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    va = chord_value(alpha, a, b, s)
    vb = chord_value(alpha, a, b, s2)
    return chord_value(alpha, va, vb, t)


@dataclass(frozen=True)
class EtaSolution:
    """Solution of ``L_alpha w = -eta^2`` on ``[0, 1]`` with ``w(0)=a``, ``w(1)=b``.

    ``w(t) = log(cos(c1 + omega t)) / K + c2`` with ``omega = eta sqrt(1-alpha)/alpha``.
    The cosine is carried as ``sin(phase + omega t)`` with ``phase = c1 + pi/2``
    so that ``c1`` close to ``-pi/2`` keeps full relative precision.  When
    ``a > b`` the problem is solved with swapped data and evaluated at ``1 - t``.
    """

    a: float
    b: float
    alpha: Alpha
    eta: float
    c1: float
    c2: float
    phase: float
    omega: float
    reflected: bool
    iterations: int

    def residual(self) -> float:
        """``|F(c1) - exp(K (hi - lo))|`` for the matching condition."""
        lo, hi = (self.b, self.a) if self.reflected else (self.a, self.b)
        target = math.exp(self.alpha.k_alpha * (hi - lo))
        return abs(_eta_ratio(self.phase, self.omega) - target)


def _eta_ratio(phase: float, omega: float) -> float:
    # cos(c1 + omega) / cos(c1) written with phase = c1 + pi/2
    return math.sin(phase + omega) / math.sin(phase)


def eta_solution(alpha, a: float, b: float, eta: float, max_iter: int = 200) -> EtaSolution:
    al = as_alpha(alpha)
    if not 0.0 < al.alpha < 1.0:
        raise ValueError("eta solutions need alpha strictly inside (0, 1)")
    if not eta > 0.0:
        raise ValueError("eta must be positive")
    omega = eta * math.sqrt(1.0 - al.alpha) / al.alpha
    if not omega < math.pi / 2:
        raise ValueError(f"eta too large: eta*sqrt(1-alpha)/alpha = {omega} >= pi/2")
    reflected = a > b
    lo, hi = (b, a) if reflected else (a, b)
    k = al.k_alpha
    target = math.exp(k * (hi - lo))

    # F is decreasing in the phase on (0, pi/2]; F(pi/2) = cos(omega) < 1 <= target
    left, right = 0.0, math.pi / 2
    # shrink the left end until F exceeds the target (F -> inf as phase -> 0)
    probe = math.pi / 4
    while _eta_ratio(probe, omega) < target:
        right = probe
        probe *= 0.5
        if probe < 1e-300:
            raise RuntimeError("eta bisection failed to bracket the root")
    left = probe
    best, best_err = left, abs(_eta_ratio(left, omega) - target)
    it = 0
    for it in range(1, max_iter + 1):
        phase = 0.5 * (left + right)
        if not left < phase < right:
            break  # bracket collapsed to adjacent floats
        val = _eta_ratio(phase, omega)
        err = abs(val - target)
        if err < best_err:
            best, best_err = phase, err
        if err == 0.0:
            break
        if val > target:
            left = phase
        else:
            right = phase
    phase = best
    c1 = phase - math.pi / 2
    c2 = lo - math.log(math.sin(phase)) / k
    return EtaSolution(float(a), float(b), al, float(eta), c1, c2, phase, omega, reflected, it)


def eta_value(sol: EtaSolution, t: float) -> float:
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    tt = 1.0 - t if sol.reflected else t
    arg = sol.phase + sol.omega * tt
    if not 0.0 < arg < math.pi:
        raise RuntimeError("cosine argument left (-pi/2, pi/2)")
    return math.log(math.sin(arg)) / sol.alpha.k_alpha + sol.c2


def ode_residual(alpha, samples: Sequence[tuple[float, float]], h: float) -> float:
    """Max of ``|alpha D2v + (1-alpha) (Dv)^2|`` over interior samples.

    Uses fourth-order central differences where five points fit (all points
    but the two at each end) and three-point ones for shorter sample lists.
    """
    al = as_alpha(alpha)
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 3:
        raise ValueError("need at least 3 samples")
    v = arr[:, 1]
    if v.size >= 5:
        d1 = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
        d2 = (-v[:-4] + 16 * v[1:-3] - 30 * v[2:-2] + 16 * v[3:-1] - v[4:]) / (12 * h * h)
    else:
        d1 = (v[2:] - v[:-2]) / (2 * h)
        d2 = (v[2:] - 2 * v[1:-1] + v[:-2]) / (h * h)
    res = al.alpha * d2 + (1.0 - al.alpha) * d1 * d1
    return float(np.max(np.abs(res)))
