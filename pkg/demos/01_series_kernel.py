"""
Exact truncated power series
============================

Series in z1..z4, their conjugates and v, with Gaussian-rational coefficients,
truncated at a fixed total degree. Every operation is exact; the only
approximation is the truncation itself, and each series records the degree up
to which it is known.
"""

from crbidisk.algebra import GaussRational, Series, VarContext

ctx = VarContext(order=6)
z1, zb1 = Series.variable(ctx, "z1"), Series.variable(ctx, "zb1")
i = GaussRational(0, 1)

# Products are truncated at the context order
f = 1 + 2 * z1 + 2 * zb1
print("f          =", f.render())
print("f^3        =", (f**3).render())

# Inverse and square root are exact up to the order; sqrt needs a square constant term
g = f.inverse()
print("1/f        =", g.truncate(2).render(), "+ ...")
print("f * (1/f)  =", (f * g).render())
s = f.sqrt()
print("sqrt(f)^2 == f:", s * s == f)

# Differentiation lowers the verified degree by one
print("verified degree of 1/f:", g.verified_degree, " after d/dz1:", g.diff("z1").verified_degree)

# Conjugation swaps z and zb and conjugates coefficients
h = i * z1 * z1 * zb1
print("h          =", h.render())
print("conj(h)    =", h.conj().render())
print("h + conj(h) is real:", (h + h.conj()).conj() == h + h.conj())
