"""Compiled inner loops of the envelope solver.

``kind`` selects the chord rule: 0 = max (alpha = 0), 1 = linear (alpha = 1),
2 = logarithmic with constant ``k``.
"""

import math

import numpy as np
from numba import njit

SMALL_KD = 1e-8


@njit(cache=True, inline="always")
def chord(kind, k, a, b, t):
    if kind == 0:
        return a if a > b else b
    if kind == 1:
        return a + (b - a) * t
    if a == b:
        return a
    if a < b:
        hi = b
        tp = t
        gap = b - a
    else:
        hi = a
        tp = 1.0 - t
        gap = a - b
    s = 1.0 - tp
    x = gap * k
    if x < SMALL_KD:
        return hi - s * gap + 0.5 * s * (1.0 - s) * gap * x
    em = math.expm1(-x)
    if s * em > -0.5:
        return hi + math.log1p(s * em) / k
    # near the smaller end: both terms positive, no cancellation
    return hi + math.log(tp + s * math.exp(-x)) / k


@njit(cache=True, inline="always")
def _arm(src, nbr, bvalue, i, d, side):
    j = nbr[i, d, side]
    if j >= 0:
        return src[j]
    return bvalue[i, d, side]


@njit(cache=True)
def line_minimum(kind, k, src, nbr, bvalue, t0, i):
    """Smallest chord value at node ``i`` over all stencil lines."""
    best = np.inf
    for d in range(nbr.shape[1]):
        c = chord(kind, k, _arm(src, nbr, bvalue, i, d, 0), _arm(src, nbr, bvalue, i, d, 1), t0[i, d])
        if c < best:
            best = c
    return best


@njit(cache=True)
def local_sweep(kind, k, u, src, order, nbr, bvalue, t0):
    """One relaxation pass ``u[i] = min(u[i], min_d chord)`` in the given order.

    Pass ``src is u`` for Gauss-Seidel and a frozen copy for Jacobi.
    """
    delta = 0.0
    for pos in range(order.shape[0]):
        i = order[pos]
        c = line_minimum(kind, k, src, nbr, bvalue, t0, i)
        if c < u[i]:
            if u[i] - c > delta:
                delta = u[i] - c
            u[i] = c
    return delta


@njit(cache=True)
def local_residual(kind, k, u, nbr, bvalue, t0):
    out = np.empty(u.shape[0])
    for i in range(u.shape[0]):
        out[i] = line_minimum(kind, k, u, nbr, bvalue, t0, i) - u[i]
    return out


@njit(cache=True)
def _line_envelope(kind, k, vals, pos, m, out, stack):
    """Largest alpha-convex sequence below ``vals[0:m]`` with fixed ends.

    Results for the interior entries ``1..m-2`` go to ``out``.
    """
    if kind == 0:
        # unimodal envelope: max of prefix and suffix minima
        run = vals[0]
        for q in range(1, m - 1):
            if vals[q] < run:
                run = vals[q]
            out[q] = run
        run = vals[m - 1]
        for q in range(m - 2, 0, -1):
            if vals[q] < run:
                run = vals[q]
            if run > out[q]:
                out[q] = run
        return
    # lower hull with the chord as orientation test
    top = 0
    for q in range(m):
        while top >= 2:
            i = stack[top - 2]
            j = stack[top - 1]
            t = (pos[j] - pos[i]) / (pos[q] - pos[i])
            if vals[j] < chord(kind, k, vals[i], vals[q], t):
                break
            top -= 1
        stack[top] = q
        top += 1
    for s in range(top - 1):
        i = stack[s]
        j = stack[s + 1]
        out[i] = vals[i]
        for q in range(i + 1, j):
            out[q] = chord(kind, k, vals[i], vals[j], (pos[q] - pos[i]) / (pos[j] - pos[i]))


@njit(cache=True)
def line_pass(kind, k, u, src, line_dir, line_ptr, line_nodes, line_pos, length, bvalue):
    """Replace ``u`` on every lattice line by its line envelope (min with old).

    Lines are visited in storage order (grouped by direction).  With
    ``src is u`` later lines see earlier updates.
    """
    delta = 0.0
    longest = 0
    for l in range(line_ptr.shape[0] - 1):
        if line_ptr[l + 1] - line_ptr[l] > longest:
            longest = line_ptr[l + 1] - line_ptr[l]
    vals = np.empty(longest + 2)
    pos = np.empty(longest + 2)
    out = np.empty(longest + 2)
    stack = np.empty(longest + 2, dtype=np.int64)
    for l in range(line_ptr.shape[0] - 1):
        d = line_dir[l]
        a = line_ptr[l]
        b = line_ptr[l + 1]
        m = b - a + 2
        first = line_nodes[a]
        last = line_nodes[b - 1]
        vals[0] = bvalue[first, d, 0]
        pos[0] = 0.0
        for q in range(b - a):
            vals[q + 1] = src[line_nodes[a + q]]
            pos[q + 1] = line_pos[a + q]
        vals[m - 1] = bvalue[last, d, 1]
        pos[m - 1] = line_pos[b - 1] + length[last, d, 1]
        _line_envelope(kind, k, vals, pos, m, out, stack)
        for q in range(b - a):
            i = line_nodes[a + q]
            c = out[q + 1]
            if c < u[i]:
                if u[i] - c > delta:
                    delta = u[i] - c
                u[i] = c
    return delta


@njit(cache=True)
def ray_minimum_residual(u, line_dir, line_ptr, line_nodes, bvalue, n_lines):
    """For alpha = 0: per node, min over lines of max(ray minima) minus u.

    Ray minima exclude the node itself.  Also returns the minimizing line.
    """
    n = u.shape[0]
    best = np.full(n, np.inf)
    arg = np.zeros(n, dtype=np.int64)
    for l in range(line_ptr.shape[0] - 1):
        d = line_dir[l]
        a = line_ptr[l]
        b = line_ptr[l + 1]
        cnt = b - a
        left = np.empty(cnt)
        run = bvalue[line_nodes[a], d, 0]
        for q in range(cnt):
            left[q] = run
            v = u[line_nodes[a + q]]
            if v < run:
                run = v
        run = bvalue[line_nodes[b - 1], d, 1]
        for q in range(cnt - 1, -1, -1):
            i = line_nodes[a + q]
            c = left[q] if left[q] > run else run
            if c < best[i]:
                best[i] = c
                arg[i] = d
            v = u[i]
            if v < run:
                run = v
    return best - u, arg
