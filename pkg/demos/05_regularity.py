"""
Regularity diagnostics
======================

Smooth data give a C^1 envelope: the largest gradient jump between nodes
``2h`` apart shrinks as the grid is refined.  A genuine kink such as ``|x|``
keeps a jump of 2 at every resolution.  At every interior point a
supporting alpha-hyperplane touches the envelope from below.
"""

import numpy as np

from alpha_envelope import Field, c1_diagnostic, disc, lipschitz_estimate, solve_envelope, support_hyperplane
from alpha_envelope.analysis import interior_mask

domain = disc()
for h in (1 / 32, 1 / 64, 1 / 128):
    res = solve_envelope(domain, "cos(2*theta)", 0.5, h, 2)
    jumps = c1_diagnostic(res.field)
    kink = c1_diagnostic(Field.sample(res.field.arms, lambda x, y: np.abs(x)))
    print(
        f"h=1/{round(1 / h):<4d} Lipschitz {lipschitz_estimate(res.field):.3f}  jumps "
        + "  ".join(f"r={r:.4f}: {j:.4f}" for r, j in jumps)
        + f"   |x| kink {kink[0][1]:.2f}"
    )

# supporting hyperplanes for an envelope with curvature in its data
h = 1 / 64
res = solve_envelope(domain, "x^3", 0.5, h, 3)
rng = np.random.default_rng(0)
nodes = rng.choice(np.flatnonzero(interior_mask(res.field, 4 * h)), 8, replace=False)
for z0 in nodes:
    plane, gap = support_hyperplane(res.field, 0.5, int(z0))
    x, y = res.field.points[z0]
    print(f"z0=({x:+.3f},{y:+.3f})  nu=({plane.nu[0]:+.3f},{plane.nu[1]:+.3f})  C={plane.slope_c:.3f}  gap={gap:+.2e}")
