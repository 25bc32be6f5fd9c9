"""
Searching the fiber for a zero of the obstructions
==================================================

T1 and T2 at the origin are polynomials in the entries of U in U(2). The tool
minimizes |T1|^2 + |T2|^2 over

    U = e^{i phi} [[cos t e^{ia}, sin t e^{ib}], [-sin t e^{-ib}, cos t e^{-ia}]]

with a coarse grid followed by Nelder-Mead. A positive minimum means no lift
through the origin satisfies the necessary condition.
"""

from crbidisk.report import analyze
from crbidisk.u2search import ObstructionAtOrigin, minimize_over_u2, verdict_for

ONE = (0,) * 8
P = (1, 0, 0, 0, 0, 0, 0, 0)
Qb = (0, 0, 0, 0, 0, 1, 0, 0)

cases = {
    "constant -2": ObstructionAtOrigin(((ONE, -2 + 0j),), ()),
    "P - 1": ObstructionAtOrigin(((P, 1 + 0j), (ONE, -1 + 0j)), ()),
    "P - 2": ObstructionAtOrigin(((P, 1 + 0j), (ONE, -2 + 0j)), ()),
    "P - 1, conj(Q) + 1/2": ObstructionAtOrigin(((P, 1 + 0j), (ONE, -1 + 0j)), ((Qb, 1 + 0j), (ONE, 0.5 + 0j))),
}
for name, obs in cases.items():
    res = minimize_over_u2(obs)
    angles = ", ".join(f"{a:.4f}" for a in res.argmin.angles)
    print(f"{name:24s} min {res.minimum:.3e} at ({angles})  {verdict_for(res.minimum)}")

# end to end on a defining function
rep = analyze("abs2(z1) + abs2(z2) - abs2(z3) - abs2(z4) + abs2(z1)*abs2(z2)")
print("report verdict:", rep.verdict, " min:", rep.u2_min)
