"""
The cubic block example
=======================

u = |z1|^2 + |z2|^2 - |z3|^2 - |z4|^2 + |z1|^2 (z1 + zb1).

Here alpha1 = P dz1 with P = (1 + 2 z1 + 2 zb1)^(1/2), and alpha2..alpha4 are
the coordinate differentials. The only nonzero torsion is A = P^-3.

The holomorphic torsion E, the coefficient of a1 ^ a2, is
    E = -(1/R) A1(Q) + Q/(PR) A1(P) + (1/P) A2(P).
A variant with the arguments of A1 swapped,
    -(1/R) A1(P) + Q/(PR) A1(R) + (1/P) A2(P),
is sometimes quoted. Here it would give E = -1/(1 + 2 z1 + 2 zb1) and hence a
nonzero T1. d alpha1 = dP ^ dz1 has no dz1 ^ dz2 part, so E = 0 and T1
vanishes identically.
"""

from crbidisk.algebra import Series, VarContext
from crbidisk.forms import collect_coefficient
from crbidisk.parser import parse, to_series
from crbidisk.pipeline import DefiningFunction, dual_frame_apply, run_pipeline

ctx = VarContext(8)
F = to_series(parse("abs2(z1) + abs2(z2) - abs2(z3) - abs2(z4) + abs2(z1)*(z1 + conj(z1))"), ctx)
r = run_pipeline(DefiningFunction(F))
cf, ts = r.coframe, r.torsions

z1, zb1 = Series.variable(ctx, "z1"), Series.variable(ctx, "zb1")
P = (1 + 2 * z1 + 2 * zb1).sqrt()
print("T[0][0] == sqrt(1 + 2 z1 + 2 zb1):", cf.T[0][0] == P)
print("A == P^-3:", ts.A.agrees_with(P.inverse() ** 3))

print("(a1, a2) coefficient of d alpha1:", collect_coefficient(r.dalphas[0], ("a1", "a2")).render())
print("E =", ts.E.render())

A1 = lambda f: dual_frame_apply(cf, f, 1)  # noqa: E731
R = cf.T[1][1]
swapped = -A1(P) / R
print("swapped-argument E * (1 + 2 z1 + 2 zb1) =", (swapped * (1 + 2 * z1 + 2 * zb1)).render())

print("T1 =", r.obstructions.T1.render())
print("T2 =", r.obstructions.T2.render())
