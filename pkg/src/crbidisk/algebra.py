"""Exact Gaussian-rational arithmetic and truncated multivariate power series.

A :class:`Series` lives in a :class:`VarContext` with the nine base symbols
``z1..z4, zb1..zb4, v`` (``zbk`` is the formal conjugate of ``zk``) and a
truncation order ``N``. Conjugate variables are independent indeterminates;
a series is *real* when it is fixed by :meth:`Series.conj`.

Each series carries a verified degree ``prec``: every coefficient of total
degree ``<= prec`` is exact. Polynomials that were never truncated have
``prec = inf``. Differentiation lowers ``prec`` by one, binary operations
take the minimum, and equality is only ever asserted up to the common
verified degree.

Internally an exponent vector is packed into one integer whose top bits hold
the total degree, so adding two keys multiplies the monomials and sorting keys
sorts by (total degree, lexicographic exponent).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

from .errors import BranchError, ContextMismatch, DegenerateAtOrigin, PrecisionExhausted

__all__ = [
    "GaussRational",
    "VarContext",
    "Series",
    "BASE_VARS",
    "series_arith",
    "series_inverse",
    "series_sqrt",
    "series_diff",
    "series_conj",
    "series_eval_origin",
]

BASE_VARS = ("z1", "z2", "z3", "z4", "zb1", "zb2", "zb3", "zb4", "v")
_CONJ_VAR = (4, 5, 6, 7, 0, 1, 2, 3, 8)
INF = math.inf


def _fmt_rational(q: Fraction) -> str:
    return str(q)


class GaussRational:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, x) -> "GaussRational":
        if isinstance(x, GaussRational):
            return x
        if isinstance(x, (int, Rational)):
            return cls(x, 0)
        if isinstance(x, complex):
            raise TypeError("floating-point complex numbers are not exact; use GaussRational")
        raise TypeError(f"cannot convert {type(x).__name__} to GaussRational")

    I = None  # set below

    def conj(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __add__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self) -> "GaussRational":
        n = self.abs2()
        if not n:
            raise ZeroDivisionError("GaussRational division by zero")
        return GaussRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return GaussRational.coerce(other) * self.inverse()

    def __eq__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussRational({self.re!s}, {self.im!s})"

    def __str__(self):
        if not self.im:
            return _fmt_rational(self.re)
        if self.im == 1:
            ipart = "i"
        elif self.im == -1:
            ipart = "-i"
        else:
            ipart = f"{_fmt_rational(self.im)}*i"
        if not self.re:
            return ipart
        if ipart.startswith("-"):
            return f"{_fmt_rational(self.re)}{ipart}"
        return f"{_fmt_rational(self.re)}+{ipart}"


GaussRational.I = GaussRational(0, 1)


@dataclass(frozen=True)
class VarContext:
    """Coordinate conventions shared by every series of one computation.

    ``order`` is the truncation degree N; ``N >= 2`` so that second
    derivatives survive.
    """

    order: int = 8
    base_vars: tuple = field(default=BASE_VARS, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.order, int) or self.order < 2:
            raise ValueError(f"truncation order must be an integer >= 2, got {self.order!r}")
        bits = max(4, (2 * self.order).bit_length())
        object.__setattr__(self, "_bits", bits)
        object.__setattr__(self, "_mask", (1 << bits) - 1)
        object.__setattr__(self, "_deg_shift", 9 * bits)
        object.__setattr__(self, "_shifts", tuple(bits * (8 - i) for i in range(9)))
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(BASE_VARS)})

    def conj_pairing(self, name: str) -> str:
        return BASE_VARS[_CONJ_VAR[self.index(name)]]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown base variable {name!r}") from None

    # key packing -----------------------------------------------------------
    def pack(self, exps) -> int:
        if len(exps) != 9:
            raise ValueError("exponent vectors have 9 entries")
        key = sum(exps) << self._deg_shift
        for e, s in zip(exps, self._shifts):
            if e < 0:
                raise ValueError("negative exponent")
            key |= e << s
        return key

    def unpack(self, key: int) -> tuple:
        m = self._mask
        return tuple((key >> s) & m for s in self._shifts)

    def degree(self, key: int) -> int:
        return key >> self._deg_shift

    def cut(self, degree) -> int:
        """Smallest key whose total degree exceeds ``degree``."""
        return (int(degree) + 1) << self._deg_shift

    def conj_key(self, key: int) -> int:
        b = self._bits
        low = key & ((1 << self._deg_shift) - 1)
        high = key - low
        block = (1 << (4 * b)) - 1
        zpart = (low >> (5 * b)) & block
        zbpart = (low >> b) & block
        vpart = low & self._mask
        return high | (zbpart << (5 * b)) | (zpart << b) | vpart

    def monomial(self, key: int) -> str:
        parts = []
        for name, e in zip(BASE_VARS, self.unpack(key)):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts)


def _conv(x: dict, ys: list, cut: int) -> dict:
    """Truncated product of two integer coefficient maps; ``ys`` is sorted."""
    out = {}
    get = out.get
    for kx, cx in x.items():
        bound = cut - kx
        for ky, cy in ys:
            if ky >= bound:
                break
            k = kx + ky
            out[k] = get(k, 0) + cx * cy
    return out


def _acc(target: dict, src: dict, sign: int = 1) -> None:
    get = target.get
    if sign == 1:
        for k, c in src.items():
            target[k] = get(k, 0) + c
    else:
        for k, c in src.items():
            target[k] = get(k, 0) - c


def _split_gauss(c: GaussRational):
    """Return integers (a, b, d) with c = (a + b i) / d."""
    d = c.re.denominator * c.im.denominator // math.gcd(c.re.denominator, c.im.denominator)
    return c.re.numerator * (d // c.re.denominator), c.im.numerator * (d // c.im.denominator), d


class Series:
    """Truncated power series at the origin with Gaussian-rational coefficients.

    Values are immutable. Use the constructors :meth:`zero`, :meth:`constant`,
    :meth:`variable` and :meth:`from_dict` rather than ``__init__``.
    """

    __slots__ = ("ctx", "re", "im", "den", "prec", "_sre", "_sim")

    def __init__(self, ctx: VarContext, re: dict, im: dict, den: int = 1, prec=INF):
        if prec < 0:
            raise PrecisionExhausted("verified degree would become negative")
        limit = ctx.order if prec == INF else min(int(prec), ctx.order)
        cut = ctx.cut(limit)
        re = {k: c for k, c in re.items() if c and k < cut}
        im = {k: c for k, c in im.items() if c and k < cut}
        if den < 0:
            den = -den
            re = {k: -c for k, c in re.items()}
            im = {k: -c for k, c in im.items()}
        if not re and not im:
            den = 1
        elif den != 1:
            g = math.gcd(den, *re.values(), *im.values())
            if g != 1:
                den //= g
                re = {k: c // g for k, c in re.items()}
                im = {k: c // g for k, c in im.items()}
        self.ctx = ctx
        self.re = re
        self.im = im
        self.den = den
        self.prec = prec
        self._sre = None
        self._sim = None

    # construction ------------------------------------------------------------
    @classmethod
    def zero(cls, ctx: VarContext) -> "Series":
        return cls(ctx, {}, {})

    @classmethod
    def one(cls, ctx: VarContext) -> "Series":
        return cls(ctx, {0: 1}, {})

    @classmethod
    def constant(cls, ctx: VarContext, c) -> "Series":
        a, b, d = _split_gauss(GaussRational.coerce(c))
        return cls(ctx, {0: a}, {0: b}, d)

    @classmethod
    def variable(cls, ctx: VarContext, name: str) -> "Series":
        exps = [0] * 9
        exps[ctx.index(name)] = 1
        return cls(ctx, {ctx.pack(exps): 1}, {})

    @classmethod
    def from_dict(cls, ctx: VarContext, coeffs: dict, prec=INF) -> "Series":
        """Build from ``{exponent 9-tuple or variable-name dict: coefficient}``."""
        items = []
        for exps, c in coeffs.items():
            if isinstance(exps, dict):
                v = [0] * 9
                for name, e in exps.items():
                    v[ctx.index(name)] = e
                exps = v
            items.append((ctx.pack(exps), GaussRational.coerce(c)))
        den = 1
        for _, c in items:
            den = math.lcm(den, c.re.denominator, c.im.denominator)
        re, im = {}, {}
        too_high = False
        for k, c in items:
            if ctx.degree(k) > ctx.order:
                too_high = True
                continue
            re[k] = re.get(k, 0) + c.re.numerator * (den // c.re.denominator)
            im[k] = im.get(k, 0) + c.im.numerator * (den // c.im.denominator)
        if too_high:
            prec = min(prec, ctx.order)
        return cls(ctx, re, im, den, prec)

    def _new(self, re, im, den, prec) -> "Series":
        return Series(self.ctx, re, im, den, prec)

    # inspection ---------------------------------------------------------------
    @property
    def verified_degree(self) -> int:
        return self.ctx.order if self.prec == INF else min(int(self.prec), self.ctx.order)

    @property
    def is_exact(self) -> bool:
        return self.prec == INF

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return self == self.conj()

    def is_constant(self) -> bool:
        return all(k == 0 for k in self.re) and all(k == 0 for k in self.im)

    def max_degree(self) -> int:
        keys = list(self.re) + list(self.im)
        return max((self.ctx.degree(k) for k in keys), default=-1)

    def coefficient(self, exps) -> GaussRational:
        if isinstance(exps, dict):
            v = [0] * 9
            for name, e in exps.items():
                v[self.ctx.index(name)] = e
            exps = v
        return self._coeff_key(self.ctx.pack(exps))

    def _coeff_key(self, key: int) -> GaussRational:
        return GaussRational(Fraction(self.re.get(key, 0), self.den), Fraction(self.im.get(key, 0), self.den))

    def constant_term(self) -> GaussRational:
        return self._coeff_key(0)

    def keys(self) -> list:
        return sorted(set(self.re) | set(self.im))

    def terms(self) -> list:
        """Sorted list of ``(exponent tuple, GaussRational)``."""
        return [(self.ctx.unpack(k), self._coeff_key(k)) for k in self.keys()]

    def depends_on(self, name: str) -> bool:
        i = self.ctx.index(name)
        s, m = self.ctx._shifts[i], self.ctx._mask
        return any((k >> s) & m for k in self.keys())

    def _sorted(self):
        if self._sre is None:
            self._sre = sorted(self.re.items())
            self._sim = sorted(self.im.items())
        return self._sre, self._sim

    def _check(self, other: "Series") -> None:
        if self.ctx != other.ctx:
            raise ContextMismatch(f"series contexts differ: {self.ctx} vs {other.ctx}")

    # ring operations ------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Series):
            self._check(other)
            return other
        if isinstance(other, (int, Rational, GaussRational)):
            return Series.constant(self.ctx, other)
        return None

    def _addsub(self, o: "Series", sign: int) -> "Series":
        if self.den == o.den:
            a, b, den = 1, 1, self.den
        else:
            g = math.gcd(self.den, o.den)
            a, b = o.den // g, self.den // g
            den = self.den * a
        re = {k: c * a for k, c in self.re.items()} if a != 1 else dict(self.re)
        im = {k: c * a for k, c in self.im.items()} if a != 1 else dict(self.im)
        _acc(re, {k: c * b for k, c in o.re.items()} if b != 1 else o.re, sign)
        _acc(im, {k: c * b for k, c in o.im.items()} if b != 1 else o.im, sign)
        return self._new(re, im, den, min(self.prec, o.prec))

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._addsub(o, 1)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._addsub(o, -1)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o._addsub(self, -1)

    def __neg__(self):
        return self._new({k: -c for k, c in self.re.items()}, {k: -c for k, c in self.im.items()}, self.den, self.prec)

    def scale(self, c) -> "Series":
        """Multiply by an exact scalar."""
        c = GaussRational.coerce(c)
        a, b, d = _split_gauss(c)
        re, im = {}, {}
        if a:
            _acc(re, {k: a * v for k, v in self.re.items()})
            _acc(im, {k: a * v for k, v in self.im.items()})
        if b:
            _acc(re, {k: b * v for k, v in self.im.items()}, -1)
            _acc(im, {k: b * v for k, v in self.re.items()})
        return self._new(re, im, self.den * d, self.prec)

    def __mul__(self, other):
        if isinstance(other, (int, Rational, GaussRational)):
            return self.scale(other)
        if not isinstance(other, Series):
            return NotImplemented
        self._check(other)
        prec = min(self.prec, other.prec)
        if self.is_zero() or other.is_zero():
            return self._new({}, {}, 1, prec)
        if other.is_constant():
            return self.scale(other.constant_term())._with_prec(prec)
        if self.is_constant():
            return other.scale(self.constant_term())._with_prec(prec)
        if prec == INF and self.max_degree() + other.max_degree() > self.ctx.order:
            prec = self.ctx.order
        limit = self.ctx.order if prec == INF else min(int(prec), self.ctx.order)
        cut = self.ctx.cut(limit)
        ore, oim = other._sorted()
        re = _conv(self.re, ore, cut) if self.re and ore else {}
        im = _conv(self.re, oim, cut) if self.re and oim else {}
        if self.im:
            if oim:
                _acc(re, _conv(self.im, oim, cut), -1)
            if ore:
                _acc(im, _conv(self.im, ore, cut))
        return self._new(re, im, self.den * other.den, prec)

    def __rmul__(self, other):
        if isinstance(other, (int, Rational, GaussRational)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Series):
            return self * other.inverse()
        if isinstance(other, (int, Rational, GaussRational)):
            return self.scale(GaussRational.coerce(other).inverse())
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = Series.one(self.ctx)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def _with_prec(self, prec) -> "Series":
        if prec == self.prec:
            return self
        return self._new(self.re, self.im, self.den, min(prec, self.prec))

    def truncate(self, degree: int) -> "Series":
        """Drop all terms of degree above ``degree`` (lowers the verified degree)."""
        return self._new(self.re, self.im, self.den, min(self.prec, degree))

    # analytic operations -------------------------------------------------------
    def inverse(self) -> "Series":
        c0 = self.constant_term()
        if c0.is_zero():
            raise DegenerateAtOrigin("cannot invert a series with zero constant term")
        prec = min(self.prec, self.ctx.order) if not self.is_constant() else self.prec
        h = (self - Series.constant(self.ctx, c0)).scale(-c0.inverse())._with_prec(prec)
        s = Series.one(self.ctx)._with_prec(prec)
        for _ in range(self.verified_degree):
            if h.is_zero():
                break
            s = Series.one(self.ctx) + h * s
        return s.scale(c0.inverse())._with_prec(prec)

    def sqrt(self) -> "Series":
        c0 = self.constant_term()
        if c0.im or c0.re <= 0:
            raise BranchError(f"principal square root needs a real positive constant term, got {c0}")
        rn, rd = math.isqrt(c0.re.numerator), math.isqrt(c0.re.denominator)
        if rn * rn != c0.re.numerator or rd * rd != c0.re.denominator:
            raise BranchError(f"constant term {c0} is not the square of a rational")
        root0 = Fraction(rn, rd)
        prec = min(self.prec, self.ctx.order) if not self.is_constant() else self.prec
        h = (self - Series.constant(self.ctx, c0)).scale(1 / c0.re)._with_prec(prec)
        n = self.verified_degree
        # binomial coefficients of (1 + h)^(1/2)
        coeffs = [Fraction(1)]
        for k in range(1, n + 1):
            coeffs.append(coeffs[-1] * (Fraction(1, 2) - (k - 1)) / k)
        s = Series.constant(self.ctx, coeffs[n])._with_prec(prec)
        for k in range(n - 1, -1, -1):
            s = Series.constant(self.ctx, coeffs[k]) + h * s
        return s.scale(root0)._with_prec(prec)

    def diff(self, name: str) -> "Series":
        """Formal partial derivative; the verified degree drops by one."""
        ctx = self.ctx
        i = ctx.index(name)
        if self.prec != INF and self.prec < 1:
            raise PrecisionExhausted(f"cannot differentiate a series verified only to degree {self.prec}")
        s, m = ctx._shifts[i], ctx._mask
        step = (1 << s) + (1 << ctx._deg_shift)

        def d(src):
            out = {}
            for k, c in src.items():
                e = (k >> s) & m
                if e:
                    out[k - step] = c * e
            return out

        return self._new(d(self.re), d(self.im), self.den, self.prec - 1)

    def conj(self) -> "Series":
        ck = self.ctx.conj_key
        return self._new({ck(k): c for k, c in self.re.items()}, {ck(k): -c for k, c in self.im.items()}, self.den, self.prec)

    # comparison and rendering ----------------------------------------------------
    def agrees_with(self, other, degree=None) -> bool:
        """Coefficient-wise equality up to the common verified degree (or ``degree``)."""
        o = self._coerce(other)
        if o is None:
            return False
        d = min(self.verified_degree, o.verified_degree)
        if degree is not None:
            d = min(d, degree)
        cut = self.ctx.cut(d)
        for mine, theirs in ((self.re, o.re), (self.im, o.im)):
            for k in set(mine) | set(theirs):
                if k < cut and mine.get(k, 0) * o.den != theirs.get(k, 0) * self.den:
                    return False
        return True

    def __eq__(self, other):
        if not isinstance(other, (Series, int, Rational, GaussRational)):
            return NotImplemented
        return self.agrees_with(other)

    __hash__ = None

    def render(self) -> str:
        """Canonical text: terms by (total degree, lexicographic exponent)."""
        out = []
        for k in self.keys():
            c = self._coeff_key(k)
            mono = self.ctx.monomial(k)
            if not mono:
                term = str(c)
            elif c == 1:
                term = mono
            elif c == -1:
                term = "-" + mono
            elif c.is_real():
                term = f"{c}*{mono}"
            elif not c.re:
                term = f"{c.im}*i*{mono}" if c.im not in (1, -1) else ("-" if c.im < 0 else "") + f"i*{mono}"
            else:
                term = f"({c})*{mono}"
            if not out:
                out.append(term)
            elif term.startswith("-"):
                out.append(" - " + term[1:])
            else:
                out.append(" + " + term)
        return "".join(out) if out else "0"

    __str__ = render

    def __repr__(self):
        deg = "inf" if self.prec == INF else self.verified_degree
        return f"Series({self.render()}, verified_degree={deg})"


def series_arith(a: Series, b: Series, op: str) -> Series:
    """Dispatch ``add``, ``sub``, ``mul`` or ``scale`` (b a scalar) on two series."""
    if op == "scale":
        return a.scale(b)
    if not isinstance(b, Series):
        raise TypeError("series_arith expects two series except for op='scale'")
    a._check(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def series_inverse(f: Series) -> Series:
    return f.inverse()


def series_sqrt(f: Series) -> Series:
    return f.sqrt()


def series_diff(f: Series, x: str) -> Series:
    return f.diff(x)


def series_conj(f: Series) -> Series:
    return f.conj()


def series_eval_origin(f: Series) -> GaussRational:
    return f.constant_term()
