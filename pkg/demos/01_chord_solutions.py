"""
One-dimensional chords
======================

For ``alpha`` in ``(0, 1]`` the chord between the values ``a`` at ``t = 0``
and ``b`` at ``t = 1`` solves ``alpha v'' + (1 - alpha) v'^2 = 0``.  It is
concave, and as ``alpha`` falls it bends up from the straight line towards
``max(a, b)``.
"""

import numpy as np

from alpha_envelope import chord_value, chord_values, eta_solution, eta_value, maximal_interval

t = np.linspace(0, 1, 6)

# the family between the straight line (alpha=1) and the max (alpha=0)
print("t      " + "  ".join(f"{x:6.2f}" for x in t))
for alpha in (1.0, 0.75, 0.5, 0.25, 0.1, 0.0):
    v = chord_values(alpha, 0.0, 1.0, t)
    print(f"a={alpha:4.2f} " + "  ".join(f"{x:6.3f}" for x in v))

# midpoint value against the closed form ln((1+e)/2)
print("\nv(1/2) at alpha=1/2:", chord_value(0.5, 0, 1, 0.5), np.log((1 + np.e) / 2))

# the solution extends past [0, 1] until its log argument hits zero
lo, hi = maximal_interval(0.5, 0, 1)
print("maximal interval at alpha=1/2:", (lo, hi))
print("value just inside the left end:", chord_value(0.5, 0, 1, lo + 1e-9))

# large jumps at small alpha stay finite (every exponent is anchored <= 0)
print("alpha=1e-3, jump 10, midpoint:", chord_value(1e-3, 0.0, 10.0, 0.5))

# strict supersolutions: alpha w'' + (1-alpha) w'^2 = -eta^2 sit above the chord
# and converge to it as eta -> 0
tt = np.linspace(0, 1, 501)
exact = chord_values(0.5, 0, 1, tt)
for eta in (0.1, 0.05, 0.025, 0.0125):
    sol = eta_solution(0.5, 0, 1, eta)
    w = np.array([eta_value(sol, x) for x in tt])
    print(f"eta={eta:<7} sup|w - v| = {np.max(np.abs(w - exact)):.2e}   min(w - v) = {np.min(w - exact):+.1e}")
