"""
Adapted coframe and torsions of a rigid hypersurface
====================================================

For u = F(z, zb) the contact form is theta = -1/2 [dv + i dF - i dbar F] and
d theta = i sum H_jk dz_j ^ dzb_k with H the complex Hessian of F. The Levi
matrix is factored as H = K E K* (outer-product elimination, pivots in index
order), giving alpha = K^t dz with d theta = i(a1^ab1 + a2^ab2 - a3^ab3 - a4^ab4)
modulo theta. The ten torsions A..J are read off
U* (d a3, d a4)^T - (d a1, d a2)^T modulo the ideal generated by theta,
a3 - P a1 - Q a2, a4 - R a1 - S a2 and conjugates, where U = [[P, Q], [R, S]]
is the unitary fiber coordinate.
"""

import sys
from pathlib import Path

from crbidisk.algebra import VarContext
from crbidisk.parser import parse, to_series
from crbidisk.pipeline import TORSION_NAMES, DefiningFunction, run_pipeline, structure_checks

fixtures = Path(__file__).resolve().parents[1] / "src" / "crbidisk" / "fixtures"
ctx = VarContext(6)

text = (fixtures / "mixed_cubic.txt").read_text().splitlines()[-1]
print("F =", text)
r = run_pipeline(DefiningFunction(to_series(parse(text), ctx)))
print("signature at the origin:", r.signature)

# rows of T, low order only
for k, row in enumerate(r.coframe.T):
    parts = [f"({s.truncate(1).render()})dz{j + 1}" for j, s in enumerate(row) if not s.is_zero()]
    print(f"a{k + 1} = " + " + ".join(parts) + " + O(2)")

# torsions are polynomials in the fiber variables with series coefficients
for n in TORSION_NAMES:
    t = getattr(r.torsions, n)
    print(f"{n}(0) = {t.at_origin().render()}")

# the two obstruction combinations
print("T1 = conj(B) + E - conj(F) is zero:", r.obstructions.T1.is_zero())
print("T2 = conj(D) + J - conj(H) is zero:", r.obstructions.T2.is_zero())

if "--checks" in sys.argv:
    for k, ok in structure_checks(r).items():
        print(f"  {k}: {ok}")
