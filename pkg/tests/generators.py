"""Random inputs shared by the test modules."""

import random
from fractions import Fraction

from crbidisk.algebra import BASE_VARS, GaussRational, Series, VarContext
from crbidisk.forms import BASE, FIBER_VARS, KForm, UPoly
from crbidisk.parser import Abs2, Add, Conj, Imag, Mul, Neg, Num, Pow, Sub, Var

QUADRIC_TEXT = "abs2(z1) + abs2(z2) - abs2(z3) - abs2(z4)"
CUBIC_TEXT = QUADRIC_TEXT + " + abs2(z1)*(z1 + conj(z1))"


def variables(ctx):
    return [Series.variable(ctx, n) for n in BASE_VARS]


def quadric(ctx, signs=(1, 1, -1, -1)):
    v = variables(ctx)
    return sum((s * v[k] * v[k + 4] for k, s in enumerate(signs)), Series.zero(ctx))


def rand_gauss(rng, lo=-3, hi=3):
    return GaussRational(rng.randint(lo, hi), rng.randint(lo, hi))


def rand_series(ctx, rng, nterms=5, max_deg=3, slots=tuple(range(8)), const=None):
    """Sparse random polynomial in the given variable slots."""
    d = {}
    for _ in range(nterms):
        e = [0] * 9
        for _ in range(rng.randint(1, max_deg)):
            e[rng.choice(slots)] += 1
        d[tuple(e)] = d.get(tuple(e), 0) + rand_gauss(rng)
    if const is not None:
        d[(0,) * 9] = const
    return Series.from_dict(ctx, d)


def rand_real_poly(ctx, rng, exps_pool, nterms, deg_range):
    """Real polynomial (sum of monomial plus conjugate) with exponents drawn from ``exps_pool`` slots."""
    d = {}
    while len(d) < 2 * nterms:
        e = [0] * 9
        for _ in range(rng.randint(*deg_range)):
            e[rng.choice(exps_pool)] += 1
        ec = [e[4], e[5], e[6], e[7], e[0], e[1], e[2], e[3], 0]
        c = rand_gauss(rng)
        if c.is_zero():
            continue
        key, keyc = tuple(e), tuple(ec)
        d[key] = d.get(key, 0) + c
        d[keyc] = d.get(keyc, 0) + c.conj()
    return Series.from_dict(ctx, d)


def rand_block_G(ctx, rng, nterms=4, max_deg=4):
    """Random real polynomial in z1, z2 and conjugates of degree 3..max_deg."""
    return rand_real_poly(ctx, rng, [0, 1, 4, 5], nterms, (3, max_deg))


def rand_general_F(ctx, rng, nterms=4, deg_range=(3, 4)):
    """Quadric plus a random real polynomial in all eight variables."""
    return quadric(ctx) + rand_real_poly(ctx, rng, list(range(8)), nterms, deg_range)


def rand_upoly(ctx, rng, nterms=3, fiber_deg=2, series_terms=3):
    d = {}
    for _ in range(nterms):
        e = [0] * 8
        for _ in range(rng.randint(0, fiber_deg)):
            e[rng.randrange(8)] += 1
        d[tuple(e)] = rand_series(ctx, rng, series_terms, 3)
    return UPoly(ctx, d)


def rand_base_form(ctx, rng, degree, nterms=3, with_fiber=False):
    slots = list(range(9)) + (list(range(9, 17)) if with_fiber else [])
    coeffs = {}
    for _ in range(nterms):
        key = tuple(rng.sample(slots, degree))
        names = tuple(BASE.symbols[i] for i in key)
        coeffs[names] = rand_upoly(ctx, rng, 2, 1 if with_fiber else 0)
    if not coeffs:
        return KForm.zero(BASE, degree, ctx)
    return KForm.from_dict(BASE, ctx, coeffs)


def random_unit(ctx, rng):
    """Random series with nonzero constant term."""
    c = rand_gauss(rng, 1, 4)
    return rand_series(ctx, rng, 5, 3, const=c)


def random_square_unit(ctx, rng):
    """Random series whose constant term is a positive rational square."""
    q = rng.choice([1, 4, 9, GaussRational(1, 0) / 4, GaussRational(9, 0) / 16])
    return rand_series(ctx, rng, 5, 3, const=q)


def fixture_rng(seed):
    return random.Random(seed)


def fiber(ctx, name):
    assert name in FIBER_VARS
    return UPoly.fiber(ctx, name)


def random_ast(rng, depth=3):
    if depth == 0 or rng.random() < 0.3:
        r = rng.random()
        if r < 0.5:
            return Var(f"z{rng.randint(1, 4)}")
        if r < 0.6:
            return Imag()
        return Num(Fraction(rng.randint(0, 5), rng.randint(1, 3)))
    kind = rng.choice(["add", "sub", "mul", "neg", "pow", "conj", "abs2"])
    if kind in ("add", "sub", "mul"):
        a, b = random_ast(rng, depth - 1), random_ast(rng, depth - 1)
        return {"add": Add, "sub": Sub, "mul": Mul}[kind](a, b)
    if kind == "neg":
        return Neg(random_ast(rng, depth - 1))
    if kind == "pow":
        return Pow(random_ast(rng, depth - 1), rng.randint(0, 2))
    if kind == "conj":
        return Conj(random_ast(rng, depth - 1))
    return Abs2(random_ast(rng, depth - 1))


CTX8 = VarContext(8)
