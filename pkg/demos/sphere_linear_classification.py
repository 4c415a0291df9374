"""Linear maps between stereographic spheres: closed form vs numerics.

Sweeps a small coefficient lattice and prints the tuples whose bitension
vanishes, which should be exactly the constant map and the conformal ones.
"""

from __future__ import annotations

import numpy as np

from biharmonic_lab.catalog import SphereLinearClass, sphere_linear_is_biharmonic
from biharmonic_lab.harness import parameter_scan

axis = list(np.linspace(-1, 1, 5))
table = parameter_scan("sphere-linear", {k: axis for k in "abcd"})

agree = 0
for row in table.rows:
    c = tuple(row.params[k] for k in "abcd")
    zero = sphere_linear_is_biharmonic(c) is not SphereLinearClass.NOT
    agree += zero == (row.verdict == "Harmonic")
    if row.verdict != "NotBiharmonic":
        print(f"  {c}  {row.verdict}")

print(f"{agree}/{len(table)} rows agree with the closed-form predicate")
