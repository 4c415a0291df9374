"""Profile maps (x, y) -> (f(x), y) into warped surfaces.

For each warp the family solution leaves a residual at rounding level,
while f = x^2 into the sphere chart leaves x^2 + 4.
"""

from __future__ import annotations

import numpy as np

from biharmonic_lab.warped import (ProfileFunction, cone_family, cone_warp, helicoid_family,
                                   helicoid_warp, lemaire_family, lemaire_warp, reduced_map_bitension,
                                   se1_residual)

x = np.linspace(-1.5, 1.5, 101)
cases = [
    ("lemaire a=3", lemaire_family(1.0, 0.0, 0.1, 0.0, 3.0), lemaire_warp(3.0)),
    ("helicoid a=1", helicoid_family(1.0, 1.0, 0.0, 0.0), helicoid_warp(1.0)),
    ("cone", cone_family(1.0, 1.0, 0.0, 0.0), cone_warp(1)),
]
for name, f, w in cases:
    xs = x[(x > f.interval[0] + 0.05) & (x < f.interval[1] - 0.05)]
    res = se1_residual(f, w, xs)
    b = reduced_map_bitension(f, w, (xs, np.zeros_like(xs)))
    print(f"{name:13s} max|ODE residual| = {np.abs(res).max():.2e}"
          f"   max|bitension| = {np.abs(b.as_array()).max():.2e}")

quad = ProfileFunction(lambda t: t * t, name="x^2")
pts = np.array([0.0, 1.0, 2.0])
print("x^2 into the sphere chart:", se1_residual(quad, lemaire_warp(3.0), pts, formal=True), "vs", pts ** 2 + 4)
