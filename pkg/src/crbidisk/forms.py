"""Exterior forms of degree 0..3 with coefficients polynomial in the U(2) fiber variables.

Two covector bases are used. ``BASE`` holds ``dz1..dz4, dzb1..dzb4, dv`` and
the fiber differentials; ``FRAME`` holds ``theta, a1..a4, ab1..ab4`` (the
adapted coframe and its conjugates) and the same fiber differentials. A form
is a map from strictly increasing index tuples to :class:`UPoly` coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Rational

from .algebra import INF, GaussRational, Series, VarContext
from .errors import ContextMismatch, DegenerateAtOrigin, FiberDegreeOverflow, FormDegreeError

__all__ = [
    "FIBER_VARS",
    "FIBER_CONJ",
    "UPoly",
    "CovectorBasis",
    "BASE",
    "FRAME",
    "KForm",
    "wedge",
    "ext_d",
    "conj_form",
    "substitute",
    "coframe_change",
    "mod_theta_reduce",
    "collect_coefficient",
    "fiber_d_reduce",
]

FIBER_VARS = ("P", "Q", "R", "S", "Pb", "Qb", "Rb", "Sb")
FIBER_CONJ = (4, 5, 6, 7, 0, 1, 2, 3)
_FIBER_INDEX = {name: i for i, name in enumerate(FIBER_VARS)}
FIBER_CAP = 6

_Scalar = (int, Rational, GaussRational)


def _fiber_exps(name: str) -> tuple:
    e = [0] * 8
    e[_FIBER_INDEX[name]] = 1
    return tuple(e)


class UPoly:
    """Polynomial in ``P, Q, R, S`` and their conjugates with Series coefficients.

    ``prec`` is the minimum verified degree of everything that went into the
    value, so cancellations to zero do not forget how far they were checked.
    """

    __slots__ = ("ctx", "terms", "prec", "cap")

    def __init__(self, ctx: VarContext, terms: dict | None = None, prec=INF, cap: int = FIBER_CAP):
        self.ctx = ctx
        self.cap = cap
        terms = terms or {}
        for s in terms.values():
            prec = min(prec, s.prec)
        clean = {}
        for e, s in terms.items():
            if s.prec > prec:
                s = s.truncate(prec)
            if s.is_zero():
                continue
            if sum(e) > cap:
                raise FiberDegreeOverflow(f"fiber degree {sum(e)} exceeds cap {cap}")
            clean[e] = s
        self.terms = clean
        self.prec = prec

    @classmethod
    def zero(cls, ctx: VarContext) -> "UPoly":
        return cls(ctx)

    @classmethod
    def from_series(cls, s: Series) -> "UPoly":
        return cls(s.ctx, {(0,) * 8: s}, s.prec)

    @classmethod
    def constant(cls, ctx: VarContext, c) -> "UPoly":
        return cls.from_series(Series.constant(ctx, c))

    @classmethod
    def fiber(cls, ctx: VarContext, name: str) -> "UPoly":
        return cls(ctx, {_fiber_exps(name): Series.one(ctx)})

    def coerce(self, other) -> "UPoly | None":
        if isinstance(other, UPoly):
            if other.ctx != self.ctx:
                raise ContextMismatch("fiber polynomials over different contexts")
            return other
        if isinstance(other, Series):
            return UPoly.from_series(other)
        if isinstance(other, _Scalar):
            return UPoly.constant(self.ctx, other)
        return None

    # inspection --------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def verified_degree(self) -> int:
        return self.ctx.order if self.prec == INF else min(int(self.prec), self.ctx.order)

    def fiber_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def coefficient(self, exps) -> Series:
        if isinstance(exps, str):
            exps = _fiber_exps(exps) if exps else (0,) * 8
        return self.terms.get(tuple(exps), Series.zero(self.ctx))

    def is_fiber_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    # arithmetic --------------------------------------------------------------
    def _combine(self, o: "UPoly", sign: int) -> "UPoly":
        out = dict(self.terms)
        for e, s in o.terms.items():
            cur = out.get(e)
            if cur is None:
                out[e] = s if sign == 1 else -s
            else:
                out[e] = cur + s if sign == 1 else cur - s
        return UPoly(self.ctx, out, min(self.prec, o.prec), self.cap)

    def __add__(self, other):
        o = self.coerce(other)
        return NotImplemented if o is None else self._combine(o, 1)

    __radd__ = __add__

    def __sub__(self, other):
        o = self.coerce(other)
        return NotImplemented if o is None else self._combine(o, -1)

    def __rsub__(self, other):
        o = self.coerce(other)
        return NotImplemented if o is None else o._combine(self, -1)

    def __neg__(self):
        return UPoly(self.ctx, {e: -s for e, s in self.terms.items()}, self.prec, self.cap)

    def __mul__(self, other):
        if isinstance(other, _Scalar):
            return UPoly(self.ctx, {e: s.scale(other) for e, s in self.terms.items()}, self.prec, self.cap)
        o = self.coerce(other)
        if o is None:
            return NotImplemented
        out = {}
        for ea, sa in self.terms.items():
            for eb, sb in o.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                p = sa * sb
                cur = out.get(e)
                out[e] = p if cur is None else cur + p
        return UPoly(self.ctx, out, min(self.prec, o.prec), self.cap)

    def __rmul__(self, other):
        return self.__mul__(other)

    def truncate(self, prec) -> "UPoly":
        if prec >= self.prec:
            return self
        return UPoly(self.ctx, self.terms, prec, self.cap)

    def map_series(self, fn) -> "UPoly":
        """Apply ``fn`` to every Series coefficient."""
        out = {e: fn(s) for e, s in self.terms.items()}
        prec = min([self.prec] + [s.prec for s in out.values()])
        return UPoly(self.ctx, out, prec, self.cap)

    def conj(self) -> "UPoly":
        out = {tuple(e[j] for j in FIBER_CONJ): s.conj() for e, s in self.terms.items()}
        return UPoly(self.ctx, out, self.prec, self.cap)

    def diff_base(self, var: str) -> "UPoly":
        out = {e: s.diff(var) for e, s in self.terms.items()}
        prec = self.prec - 1 if not out else min([self.prec - 1] + [s.prec for s in out.values()])
        return UPoly(self.ctx, out, prec, self.cap)

    def diff_fiber(self, name: str) -> "UPoly":
        i = _FIBER_INDEX[name]
        out = {}
        for e, s in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = s.scale(e[i])
        return UPoly(self.ctx, out, self.prec, self.cap)

    def at_origin(self) -> "UPoly":
        """Replace each coefficient by its constant term."""
        return UPoly(self.ctx, {e: Series.constant(self.ctx, s.constant_term()) for e, s in self.terms.items()}, INF, self.cap)

    def numeric_at_origin(self) -> list:
        """``[(exponent 8-tuple, complex)]`` of the coefficients evaluated at the origin."""
        out = []
        for e in sorted(self.terms):
            c = self.terms[e].constant_term()
            if not c.is_zero():
                out.append((e, complex(c)))
        return out

    # comparison and rendering ----------------------------------------------------
    def agrees_with(self, other, degree=None) -> bool:
        o = self.coerce(other)
        if o is None:
            return False
        d = min(self.verified_degree, o.verified_degree)
        if degree is not None:
            d = min(d, degree)
        zero = Series.zero(self.ctx)
        for e in set(self.terms) | set(o.terms):
            if not self.terms.get(e, zero).agrees_with(o.terms.get(e, zero), d):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, (UPoly, Series) + _Scalar):
            return NotImplemented
        return self.agrees_with(other)

    __hash__ = None

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda e: (sum(e), tuple(-x for x in e))):
            mono = "*".join(
                (name if k == 1 else f"{name}^{k}") for name, k in zip(FIBER_VARS, e) if k
            )
            s = self.terms[e].render()
            if not mono:
                parts.append(f"({s})" if len(self.terms) > 1 else s)
            elif s == "1":
                parts.append(mono)
            else:
                parts.append(f"({s})*{mono}")
        return " + ".join(parts)

    __str__ = render

    def __repr__(self):
        return f"UPoly({self.render()})"


# ---------------------------------------------------------------------------
# covector bases


@dataclass(frozen=True)
class CovectorBasis:
    """Ordered covector symbols with their conjugation partners."""

    name: str
    symbols: tuple
    partner: tuple

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise KeyError(f"{symbol!r} is not a covector of basis {self.name}") from None

    def __len__(self):
        return len(self.symbols)


_FIBER_COVECTORS = tuple("d" + v for v in FIBER_VARS)
_FIBER_PARTNERS = tuple(9 + j for j in FIBER_CONJ)

BASE = CovectorBasis(
    "base",
    ("dz1", "dz2", "dz3", "dz4", "dzb1", "dzb2", "dzb3", "dzb4", "dv") + _FIBER_COVECTORS,
    (4, 5, 6, 7, 0, 1, 2, 3, 8) + _FIBER_PARTNERS,
)
FRAME = CovectorBasis(
    "frame",
    ("theta", "a1", "a2", "a3", "a4", "ab1", "ab2", "ab3", "ab4") + _FIBER_COVECTORS,
    (0, 5, 6, 7, 8, 1, 2, 3, 4) + _FIBER_PARTNERS,
)
FIBER_SLOTS = tuple(range(9, 17))


def _sort_sign(idx: tuple):
    """Return (sorted tuple, sign) or (None, 0) if an index repeats."""
    if len(set(idx)) != len(idx):
        return None, 0
    inv = sum(1 for i in range(len(idx)) for j in range(i + 1, len(idx)) if idx[i] > idx[j])
    return tuple(sorted(idx)), (-1 if inv % 2 else 1)


class KForm:
    """Exterior form of degree 0..3 over a :class:`CovectorBasis`."""

    __slots__ = ("basis", "degree", "ctx", "terms", "prec")

    def __init__(self, basis: CovectorBasis, degree: int, ctx: VarContext, terms: dict | None = None, prec=INF):
        if degree > 3:
            raise FormDegreeError(f"forms of degree {degree} are not supported")
        self.basis = basis
        self.degree = degree
        self.ctx = ctx
        self.terms = {}
        terms = terms or {}
        for c in terms.values():
            prec = min(prec, c.prec)
        self.prec = prec
        for k, c in terms.items():
            if len(k) != degree:
                raise FormDegreeError(f"key {k} does not have degree {degree}")
            c = c.truncate(prec)
            if not c.is_zero():
                self.terms[k] = c

    # construction -------------------------------------------------------------
    @classmethod
    def zero(cls, basis, degree, ctx) -> "KForm":
        return cls(basis, degree, ctx)

    @classmethod
    def function(cls, basis, f) -> "KForm":
        u = f if isinstance(f, UPoly) else UPoly.from_series(f)
        return cls(basis, 0, u.ctx, {(): u})

    @classmethod
    def from_dict(cls, basis, ctx, coeffs: dict) -> "KForm":
        """Build from ``{tuple of covector names (or one name): coefficient}``; signs are tracked."""
        out = {}
        degree = None
        for names, c in coeffs.items():
            if isinstance(names, str):
                names = (names,)
            key, sign = _sort_sign(tuple(basis.index(n) for n in names))
            if degree is None:
                degree = len(names)
            elif degree != len(names):
                raise FormDegreeError("mixed degrees in one form")
            if key is None:
                continue
            u = _as_upoly(ctx, c) * sign
            out[key] = out[key] + u if key in out else u
        return cls(basis, degree or 0, ctx, out)

    @classmethod
    def covector(cls, basis, ctx, name: str, coeff=1) -> "KForm":
        return cls.from_dict(basis, ctx, {(name,): coeff})

    def _like(self, degree, terms, prec=None) -> "KForm":
        return KForm(self.basis, degree, self.ctx, terms, self.prec if prec is None else prec)

    # inspection ----------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def covectors_used(self) -> set:
        return {self.basis.symbols[i] for k in self.terms for i in k}

    def has_fiber_covectors(self) -> bool:
        return any(i in FIBER_SLOTS for k in self.terms for i in k)

    def keys_named(self) -> list:
        return [tuple(self.basis.symbols[i] for i in k) for k in sorted(self.terms)]

    # arithmetic -----------------------------------------------------------------
    def _check(self, o: "KForm"):
        if o.basis != self.basis:
            raise ContextMismatch(f"forms over different bases {self.basis.name} / {o.basis.name}")
        if o.degree != self.degree and self.terms and o.terms:
            raise FormDegreeError("adding forms of different degree")

    def __add__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        deg = self.degree if self.terms else other.degree
        return self._like(deg, out, min(self.prec, other.prec))

    def __sub__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return self._like(self.degree, {k: -c for k, c in self.terms.items()})

    def __mul__(self, other):
        """Multiply by a function (UPoly, Series or scalar)."""
        if isinstance(other, KForm):
            return NotImplemented
        prec = min(self.prec, getattr(other, "prec", INF))
        return self._like(self.degree, {k: c * other for k, c in self.terms.items()}, prec)

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def map_coeffs(self, fn) -> "KForm":
        return self._like(self.degree, {k: fn(c) for k, c in self.terms.items()})

    def coefficient(self, names) -> UPoly:
        return collect_coefficient(self, names)

    def agrees_with(self, other: "KForm") -> bool:
        if other.basis != self.basis:
            return False
        zero = UPoly.zero(self.ctx)
        return all(self.terms.get(k, zero).agrees_with(other.terms.get(k, zero)) for k in set(self.terms) | set(other.terms))

    def __eq__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        return self.agrees_with(other)

    __hash__ = None

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms):
            cov = "^".join(self.basis.symbols[i] for i in k)
            c = self.terms[k].render()
            if not cov:
                parts.append(c)
            elif c == "1":
                parts.append(cov)
            else:
                parts.append(f"({c})*{cov}")
        return " + ".join(parts)

    __str__ = render

    def __repr__(self):
        return f"KForm[{self.basis.name}, {self.degree}]({self.render()})"


def _as_upoly(ctx, c) -> UPoly:
    if isinstance(c, UPoly):
        return c
    if isinstance(c, Series):
        return UPoly.from_series(c)
    return UPoly.constant(ctx, c)


def wedge(a: KForm, b: KForm) -> KForm:
    """Graded product with sign bookkeeping."""
    if a.basis != b.basis:
        raise ContextMismatch("wedge of forms over different bases")
    deg = a.degree + b.degree
    if deg > 3:
        raise FormDegreeError(f"wedge would produce a {deg}-form")
    out = {}
    for ka, ca in a.terms.items():
        for kb, cb in b.terms.items():
            key, sign = _sort_sign(ka + kb)
            if key is None:
                continue
            c = ca * cb
            if sign < 0:
                c = -c
            out[key] = out[key] + c if key in out else c
    return KForm(a.basis, deg, a.ctx, out, min(a.prec, b.prec))


def ext_d(w: KForm) -> KForm:
    """Exterior derivative of a form over the base basis.

    Base variables are differentiated as Series, fiber variables as
    polynomial indeterminates; covectors themselves are closed.
    """
    if w.basis != BASE:
        raise ValueError("ext_d acts on forms written in the base basis; change coframe first")
    if w.degree >= 3:
        raise FormDegreeError("d of a 3-form would be a 4-form")
    ctx = w.ctx
    out = {}

    def add(slot, key, c):
        k2, sign = _sort_sign((slot,) + key)
        if k2 is None or c.is_zero():
            return
        if sign < 0:
            c = -c
        out[k2] = out[k2] + c if k2 in out else c

    for key, c in w.terms.items():
        for i, var in enumerate(ctx.base_vars):
            if any(s.depends_on(var) for s in c.terms.values()):
                add(i, key, c.diff_base(var))
        for j, name in enumerate(FIBER_VARS):
            add(9 + j, key, c.diff_fiber(name))
    return KForm(BASE, w.degree + 1, ctx, out, w.prec - 1)


def conj_form(w: KForm) -> KForm:
    out = {}
    for key, c in w.terms.items():
        k2, sign = _sort_sign(tuple(w.basis.partner[i] for i in key))
        cc = c.conj()
        out[k2] = -cc if sign < 0 else cc
    return KForm(w.basis, w.degree, w.ctx, out, w.prec)


def substitute(w: KForm, images: dict, target: CovectorBasis) -> KForm:
    """Replace covectors by 1-forms over ``target`` and re-expand.

    ``images`` maps basis indices of ``w`` to 1-forms; unmapped covectors are
    carried over by name.
    """
    ctx = w.ctx
    cache = {}

    def image(i):
        if i not in cache:
            if i in images:
                cache[i] = images[i]
            else:
                cache[i] = KForm.covector(target, ctx, w.basis.symbols[i])
        return cache[i]

    acc = KForm(target, w.degree, ctx, {}, w.prec)
    for key, c in w.terms.items():
        f = KForm.function(target, c)
        for i in key:
            f = wedge(f, image(i))
        acc = acc + f
    return KForm(target, w.degree, ctx, acc.terms, acc.prec)


def coframe_change(w: KForm, cf, direction: str) -> KForm:
    """Rewrite ``w`` between the dz basis and the adapted coframe.

    ``cf`` is a :class:`~crbidisk.pipeline.CoframeData`. Going to the frame,
    ``dv`` is eliminated through theta; going back, theta is replaced by its
    explicit dz expression.
    """
    if direction == "dz_to_alpha":
        if w.basis != BASE:
            raise ValueError("dz_to_alpha expects a base-basis form")
        return substitute(w, cf.base_images(), FRAME)
    if direction == "alpha_to_dz":
        if w.basis != FRAME:
            raise ValueError("alpha_to_dz expects a frame-basis form")
        return substitute(w, cf.frame_images(), BASE)
    raise ValueError(f"unknown direction {direction!r}")


def mod_theta_reduce(w: KForm, theta: KForm | None = None) -> KForm:
    """Reduce modulo theta.

    Over the frame basis theta is a covector and its terms are dropped. Over
    the base basis ``dv`` is replaced by its solution of ``theta = 0``.
    """
    if w.basis == FRAME:
        return KForm(FRAME, w.degree, w.ctx, {k: c for k, c in w.terms.items() if 0 not in k}, w.prec)
    if theta is None:
        raise ValueError("a base-basis reduction needs the contact form")
    dv = BASE.index("dv")
    a = theta.terms.get((dv,))
    if a is None or not a.is_fiber_constant() or a.coefficient("").constant_term().is_zero():
        raise DegenerateAtOrigin("the dv coefficient of theta vanishes at the origin")
    inv = a.coefficient("").inverse()
    rest = KForm(BASE, 1, w.ctx, {k: c for k, c in theta.terms.items() if k != (dv,)}, theta.prec)
    return substitute(w, {dv: rest * (-inv)}, BASE)


def collect_coefficient(w: KForm, names) -> UPoly:
    """Coefficient of a wedge monomial, with the sign of the requested order."""
    if isinstance(names, str):
        names = (names,)
    if len(names) != w.degree:
        raise FormDegreeError(f"asked for a degree-{len(names)} coefficient of a {w.degree}-form")
    key, sign = _sort_sign(tuple(w.basis.index(n) for n in names))
    if key is None:
        return UPoly.zero(w.ctx)
    c = w.terms.get(key)
    if c is None:
        return UPoly.zero(w.ctx)
    return -c if sign < 0 else c


def fiber_differential_images(sigma, basis: CovectorBasis, ctx) -> dict:
    """Images of dP..dSb under dU = U Sigma and dU* = -Sigma U*."""
    P, Q, R, S, Pb, Qb, Rb, Sb = (UPoly.fiber(ctx, n) for n in FIBER_VARS)
    (s11, s12), (s21, s22) = sigma
    images = {
        "dP": s11 * P + s21 * Q,
        "dQ": s12 * P + s22 * Q,
        "dR": s11 * R + s21 * S,
        "dS": s12 * R + s22 * S,
        "dPb": -(s11 * Pb + s12 * Qb),
        "dRb": -(s11 * Rb + s12 * Sb),
        "dQb": -(s21 * Pb + s22 * Qb),
        "dSb": -(s21 * Rb + s22 * Sb),
    }
    return {basis.index(k): v for k, v in images.items()}


def fiber_d_reduce(w: KForm, sigma) -> KForm:
    """Eliminate fiber differentials using the Maurer-Cartan relation ``U* dU = Sigma``."""
    for row in sigma:
        for s in row:
            if s.basis != w.basis or s.degree != 1:
                raise ValueError("sigma must be a matrix of 1-forms over the same basis as w")
    return substitute(w, fiber_differential_images(sigma, w.basis, w.ctx), w.basis)
