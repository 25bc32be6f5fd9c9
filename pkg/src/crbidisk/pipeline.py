"""From a rigid defining function to torsions, obstructions and the prolonged structure.

Conventions
-----------
The hypersurface is ``u = F(z, zb)`` with ``z5 = u + i v``. The contact form is

    theta = -1/2 [dv + i sum F_zk dzk - i sum F_zbk dzbk],

normalized so that ``d theta = i sum H_jk dzj ^ dzbk`` with ``H_jk = F_{zj zbk}``.
The adapted coframe ``alpha^i = sum_j T_ij dz_j`` satisfies
``d theta = i(a1^ab1 + a2^ab2 - a3^ab3 - a4^ab4)``.

Torsions are read from ``Omega = U* (d a3, d a4)^T - (d a1, d a2)^T`` after
reduction modulo the ideal ``I`` (``theta = 0``, ``a3 = P a1 + Q a2``,
``a4 = R a1 + S a2`` and conjugates), with the sign that makes
``A = (1/P) Ab_1(P)`` on block inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import GaussRational, Series, VarContext
from .errors import (
    InvalidDefiningFunction,
    LeviDegenerate,
    NotReal,
    PivotDegenerate,
    WrongSignature,
)
from .forms import (
    BASE,
    FIBER_VARS,
    FRAME,
    KForm,
    UPoly,
    coframe_change,
    collect_coefficient,
    conj_form,
    ext_d,
    fiber_d_reduce,
    mod_theta_reduce,
    substitute,
    wedge,
)

__all__ = [
    "DefiningFunction",
    "ContactForm",
    "LeviMatrix",
    "CoframeData",
    "TorsionSet",
    "AbsorptionSolution",
    "ObstructionPair",
    "TauData",
    "FrameCalculus",
    "PipelineResult",
    "build_theta",
    "levi_matrix",
    "signature_at_origin",
    "diagonalize_coframe",
    "dual_frame_apply",
    "dual_frame_apply_bar",
    "structure_two_forms",
    "mod_I",
    "extract_torsions",
    "absorb_torsions",
    "obstruction_functions",
    "build_sigma",
    "build_tau",
    "dtau_structure",
    "fiber_matrix",
    "maurer_cartan",
    "run_pipeline",
    "TORSION_NAMES",
    "dtheta_levi_residual",
    "coframe_residual",
    "duality_residual",
    "torsion_reconstruction_residual",
    "skew_residual",
    "tau_skew_residual",
    "structure_checks",
    "torsion_form",
    "conj_transpose",
    "mat_mul",
    "mat_inverse",
]

I = GaussRational(0, 1)
TORSION_NAMES = tuple("ABCDEFGHIJ")
_Z = ("z1", "z2", "z3", "z4")
_ZB = ("zb1", "zb2", "zb3", "zb4")
_A = ("a1", "a2", "a3", "a4")
_AB = ("ab1", "ab2", "ab3", "ab4")
SIGNS = (1, 1, -1, -1)


# ---------------------------------------------------------------------------
# input and first invariants


@dataclass(frozen=True)
class DefiningFunction:
    """Real series ``F`` with ``F(0) = 0`` and no ``v`` dependence."""

    F: Series

    def __post_init__(self):
        F = self.F
        if F.depends_on("v"):
            raise InvalidDefiningFunction("only rigid defining functions u = F(z, zb) are supported")
        if not F.constant_term().is_zero():
            raise InvalidDefiningFunction(f"F(0) must vanish, got {F.constant_term()}")
        if F.conj() != F:
            raise NotReal("the defining function is not fixed by conjugation")

    @property
    def ctx(self) -> VarContext:
        return self.F.ctx


@dataclass(frozen=True)
class ContactForm:
    theta: KForm
    df: DefiningFunction


def build_theta(df: DefiningFunction) -> ContactForm:
    F = df.F
    coeffs = {("dv",): Series.constant(df.ctx, Fraction(-1, 2))}
    half_i = GaussRational(0, 1) / 2
    for z, zb, dz, dzb in zip(_Z, _ZB, ("dz1", "dz2", "dz3", "dz4"), ("dzb1", "dzb2", "dzb3", "dzb4")):
        coeffs[(dz,)] = F.diff(z).scale(-half_i)
        coeffs[(dzb,)] = F.diff(zb).scale(half_i)
    return ContactForm(KForm.from_dict(BASE, df.ctx, coeffs), df)


@dataclass(frozen=True)
class LeviMatrix:
    entries: tuple
    df: DefiningFunction

    def __getitem__(self, jk):
        j, k = jk
        return self.entries[j][k]

    def at_origin(self) -> list:
        return [[e.constant_term() for e in row] for row in self.entries]


def levi_matrix(df: DefiningFunction) -> LeviMatrix:
    F = df.F
    rows = tuple(tuple(F.diff(z).diff(zb) for zb in _ZB) for z in _Z)
    return LeviMatrix(rows, df)


def _hermitian_signature(M: list) -> tuple:
    """Signature of an exact Hermitian matrix by congruence pivoting."""
    M = [list(row) for row in M]
    pos = neg = 0
    while M:
        n = len(M)
        p = next((i for i in range(n) if not M[i][i].is_zero()), None)
        if p is None:
            pair = next(((i, j) for i in range(n) for j in range(n) if not M[i][j].is_zero()), None)
            if pair is None:
                break
            i, j = pair
            c = M[i][j].conj()
            # basis change e_i -> e_i + c e_j makes the diagonal entry 2|M_ij|^2
            for r in range(n):
                M[r][i] = M[r][i] + M[r][j] * c
            for r in range(n):
                M[i][r] = M[i][r] + M[j][r] * c.conj()
            p = i
        d = M[p][p]
        if d.re > 0:
            pos += 1
        else:
            neg += 1
        inv = d.inverse()
        rest = [r for r in range(n) if r != p]
        M = [[M[r][s] - M[r][p] * inv * M[p][s] for s in rest] for r in rest]
    rank = pos + neg
    return pos, neg, rank


def signature_at_origin(H: LeviMatrix) -> tuple:
    """Return ``(n_plus, n_minus)`` of ``H(0)``; raises LeviDegenerate if singular."""
    pos, neg, rank = _hermitian_signature(H.at_origin())
    if rank < 4:
        raise LeviDegenerate(f"Levi matrix at the origin has rank {rank}")
    return pos, neg


# ---------------------------------------------------------------------------
# coframe


def mat_mul(A, B):
    n, m, k = len(A), len(B), len(B[0])
    return [[sum((A[i][l] * B[l][j] for l in range(m)), Series.zero(A[0][0].ctx)) for j in range(k)] for i in range(n)]


def mat_inverse(M):
    """Gauss-Jordan inverse of a series matrix invertible at the origin."""
    n = len(M)
    ctx = M[0][0].ctx
    A = [list(row) + [Series.one(ctx) if i == j else Series.zero(ctx) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not A[r][col].constant_term().is_zero()), None)
        if piv is None:
            raise PivotDegenerate("matrix is singular at the origin")
        A[col], A[piv] = A[piv], A[col]
        inv = A[col][col].inverse()
        A[col] = [x * inv for x in A[col]]
        for r in range(n):
            if r != col and not A[r][col].is_zero():
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]


@dataclass
class CoframeData:
    """Adapted coframe ``alpha = T dz`` with inverse, signs and dual frame.

    ``dual_frame[i][k]`` is the coefficient of ``d/dz_k`` in ``A_i``.
    """

    T: list
    T_inv: list
    signs: tuple
    dual_frame: list
    perm: tuple
    theta: KForm
    F: Series
    _images: dict = field(default_factory=dict, repr=False)

    @property
    def ctx(self):
        return self.F.ctx

    def base_images(self) -> dict:
        """Images of the base covectors in the frame basis."""
        if "base" not in self._images:
            ctx = self.ctx
            img = {}
            for k in range(4):
                img[k] = KForm.from_dict(FRAME, ctx, {(_A[i],): self.T_inv[k][i] for i in range(4)})
                img[4 + k] = KForm.from_dict(FRAME, ctx, {(_AB[i],): self.T_inv[k][i].conj() for i in range(4)})
            # dv from theta = 0 up to the theta covector itself
            dv = BASE.index("dv")
            a = self.theta.terms[(dv,)].coefficient("")
            inv = a.inverse()
            rest = KForm(BASE, 1, ctx, {key: c for key, c in self.theta.terms.items() if key != (dv,)})
            dv_img = KForm.covector(FRAME, ctx, "theta", inv) - substitute(rest, img, FRAME) * inv
            img[dv] = dv_img
            self._images["base"] = img
        return self._images["base"]

    def frame_images(self) -> dict:
        """Images of the frame covectors in the base basis."""
        if "frame" not in self._images:
            ctx = self.ctx
            img = {0: self.theta}
            for i in range(4):
                img[1 + i] = KForm.from_dict(BASE, ctx, {(f"dz{j + 1}",): self.T[i][j] for j in range(4)})
                img[5 + i] = KForm.from_dict(BASE, ctx, {(f"dzb{j + 1}",): self.T[i][j].conj() for j in range(4)})
            self._images["frame"] = img
        return self._images["frame"]

    def alpha(self, i: int) -> KForm:
        """The coframe form alpha^{i+1} over the base basis."""
        return self.frame_images()[1 + i]


def diagonalize_coframe(H: LeviMatrix) -> CoframeData:
    """Hermitian outer-product elimination ``H = K E K*`` with ``K = T^t``.

    Pivots are taken in index order; the rows of ``T`` are then stably
    reordered so the signs read ``(+, +, -, -)``.
    """
    sig = signature_at_origin(H)
    if sig != (2, 2):
        raise WrongSignature(sig)
    ctx = H.df.ctx
    n = 4
    Hc = [list(row) for row in H.entries]
    K = [[Series.zero(ctx) for _ in range(n)] for _ in range(n)]
    eps = []
    for p in range(n):
        d0 = Hc[p][p].constant_term()
        if d0.is_zero():
            raise PivotDegenerate(f"pivot {p + 1} of the Levi matrix vanishes at the origin")
        e = 1 if d0.re > 0 else -1
        eps.append(e)
        kpp = (Hc[p][p] if e > 0 else -Hc[p][p]).sqrt()
        K[p][p] = kpp
        inv = kpp.inverse()
        for j in range(p + 1, n):
            K[j][p] = Hc[j][p] * inv * e
        for j in range(p + 1, n):
            for l in range(p + 1, n):
                Hc[j][l] = Hc[j][l] - (K[j][p] * K[l][p].conj()) * e
    perm = tuple(sorted(range(n), key=lambda i: (eps[i] < 0, i)))
    T = [[K[j][i] for j in range(n)] for i in perm]
    signs = tuple(eps[i] for i in perm)
    T_inv = mat_inverse(T)
    dual = [[T_inv[k][i] for k in range(n)] for i in range(n)]
    theta = build_theta(H.df).theta
    return CoframeData(T, T_inv, signs, dual, perm, theta, H.df.F)


def dual_frame_apply(cf: CoframeData, f: Series, i: int) -> Series:
    """Apply ``A_i`` (``i`` in 1..4) to a series.

    ``A_i(f) = sum_k Tinv_ki (f_zk - i F_zk f_v)``; the ``v`` part vanishes for
    functions of ``z, zb`` alone.
    """
    row = cf.dual_frame[i - 1]
    fv = f.diff("v") if f.depends_on("v") else None
    out = Series.zero(f.ctx)
    for k in range(4):
        term = f.diff(_Z[k])
        if fv is not None:
            term = term - cf.F.diff(_Z[k]) * fv * I
        out = out + row[k] * term
    return out


def dual_frame_apply_bar(cf: CoframeData, f: Series, i: int) -> Series:
    """Apply the conjugate field ``Ab_i``."""
    return dual_frame_apply(cf, f.conj(), i).conj()


# ---------------------------------------------------------------------------
# structure equations


def structure_two_forms(cf: CoframeData, theta: ContactForm | None = None) -> list:
    """``d alpha^i`` over the frame basis (reduced modulo theta)."""
    th = cf.theta if theta is None else theta.theta
    out = []
    for i in range(4):
        d = ext_d(cf.alpha(i))
        d = mod_theta_reduce(d, th)
        out.append(mod_theta_reduce(coframe_change(d, cf, "dz_to_alpha")))
    return out


def fiber_matrix(ctx) -> tuple:
    """``U = [[P, Q], [R, S]]`` and ``U* = [[Pb, Rb], [Qb, Sb]]`` as UPolys."""
    P, Q, R, S, Pb, Qb, Rb, Sb = (UPoly.fiber(ctx, n) for n in FIBER_VARS)
    return ((P, Q), (R, S)), ((Pb, Rb), (Qb, Sb))


def _ideal_images(ctx) -> dict:
    (P, Q), (R, S) = fiber_matrix(ctx)[0]
    cov = lambda name, c: KForm.covector(FRAME, ctx, name, c)  # noqa: E731
    return {
        0: KForm.zero(FRAME, 1, ctx),
        3: cov("a1", P) + cov("a2", Q),
        4: cov("a1", R) + cov("a2", S),
        7: cov("ab1", P.conj()) + cov("ab2", Q.conj()),
        8: cov("ab1", R.conj()) + cov("ab2", S.conj()),
    }


def mod_I(w: KForm) -> KForm:
    """Reduce a frame-basis form modulo ``theta``, ``omega^3``, ``omega^4`` and conjugates."""
    if w.basis != FRAME:
        raise ValueError("mod_I acts on frame-basis forms")
    return substitute(w, _ideal_images(w.ctx), FRAME)


@dataclass
class TorsionSet:
    A: UPoly
    B: UPoly
    C: UPoly
    D: UPoly
    E: UPoly
    F: UPoly
    G: UPoly
    H: UPoly
    I: UPoly
    J: UPoly

    def as_dict(self) -> dict:
        return {n: getattr(self, n) for n in TORSION_NAMES}

    def at_origin(self) -> dict:
        return {n: getattr(self, n).at_origin() for n in TORSION_NAMES}


_TORSION_KEYS = (("a1", "ab1"), ("a1", "ab2"), ("a2", "ab1"), ("a2", "ab2"), ("a1", "a2"))


def torsion_vector(dalphas: list) -> tuple:
    """``Omega = U*(d a3, d a4)^T - (d a1, d a2)^T`` reduced modulo I."""
    ctx = dalphas[0].ctx
    Ustar = fiber_matrix(ctx)[1]
    omegas = []
    for k in range(2):
        w = dalphas[2] * Ustar[k][0] + dalphas[3] * Ustar[k][1] - dalphas[k]
        omegas.append(mod_I(w))
    return tuple(omegas)


def extract_torsions(dalphas: list, cf: CoframeData | None = None) -> TorsionSet:
    o1, o2 = torsion_vector(dalphas)
    vals = [collect_coefficient(o1, k) for k in _TORSION_KEYS]
    vals += [collect_coefficient(o2, k) for k in _TORSION_KEYS]
    return TorsionSet(*vals)


def torsion_form(ts: TorsionSet, k: int, ctx) -> KForm:
    """The torsion part of component ``k`` (0 or 1) as a frame 2-form."""
    names = TORSION_NAMES[5 * k: 5 * k + 5]
    return KForm.from_dict(FRAME, ctx, {key: getattr(ts, n) for key, n in zip(_TORSION_KEYS, names)})


@dataclass
class AbsorptionSolution:
    W2F: UPoly
    X1F: UPoly
    Y2F: UPoly
    Z1F: UPoly
    L: UPoly
    Qfun: UPoly


def absorb_torsions(ts: TorsionSet) -> AbsorptionSolution:
    zero = UPoly.zero(ts.A.ctx)
    W2F, Y2F = ts.E, ts.J
    return AbsorptionSolution(W2F, zero, Y2F, zero, -(ts.B.conj() + W2F), -(ts.D.conj() + Y2F))


@dataclass
class ObstructionPair:
    T1: UPoly
    T2: UPoly

    def is_zero(self) -> bool:
        return self.T1.is_zero() and self.T2.is_zero()


def obstruction_functions(ts: TorsionSet) -> ObstructionPair:
    return ObstructionPair(ts.B.conj() + ts.E - ts.F.conj(), ts.D.conj() + ts.J - ts.H.conj())


def build_sigma(ts: TorsionSet) -> list:
    ctx = ts.A.ctx

    def entry(x, y, u, v):
        # xb a1 + yb a2 - u ab1 - v ab2
        return KForm.from_dict(FRAME, ctx, {("a1",): x.conj(), ("a2",): y.conj(), ("ab1",): -u, ("ab2",): -v})

    return [
        [entry(ts.A, ts.B, ts.A, ts.B), entry(ts.F, ts.G, ts.C, ts.D)],
        [entry(ts.C, ts.D, ts.F, ts.G), entry(ts.H, ts.I, ts.H, ts.I)],
    ]


def maurer_cartan(ctx) -> list:
    """``U* dU`` as a matrix of fiber 1-forms over the frame basis."""
    U, Ustar = fiber_matrix(ctx)
    dU = [[KForm.covector(FRAME, ctx, "d" + n) for n in row] for row in (("P", "Q"), ("R", "S"))]
    return [[dU[0][j] * Ustar[i][0] + dU[1][j] * Ustar[i][1] for j in range(2)] for i in range(2)]


@dataclass
class TauData:
    tau: list
    params: dict
    formal: bool


def build_tau(ts: TorsionSet, absorbed: AbsorptionSolution) -> TauData:
    """``tau = -U* dU + Sigma`` with the resolved prolongation parameters."""
    ctx = ts.A.ctx
    mc = maurer_cartan(ctx)
    sigma = build_sigma(ts)
    tau = [[sigma[i][j] - mc[i][j] for j in range(2)] for i in range(2)]
    params = {
        "kappa1": -ts.A.conj(),
        "sigma1": -ts.C.conj(),
        "kappa2": absorbed.L,
        "sigma2": absorbed.Qfun,
        "kappa3": -ts.G.conj(),
        "sigma3": -ts.I.conj(),
    }
    formal = not obstruction_functions(ts).is_zero()
    return TauData(tau, params, formal)


def conj_transpose(M: list) -> list:
    return [[conj_form(M[j][i]) for j in range(len(M))] for i in range(len(M[0]))]


# ---------------------------------------------------------------------------
# calculus on the frame


class FrameCalculus:
    """Exterior derivative of frame-basis forms using the dual frame and ``d alpha``."""

    def __init__(self, cf: CoframeData, dalphas: list):
        self.cf = cf
        self.ctx = cf.ctx
        self.dalphas = dalphas
        ctx = self.ctx
        dtheta = KForm.zero(FRAME, 2, ctx)
        for a, ab, s in zip(_A, _AB, cf.signs):
            dtheta = dtheta + KForm.from_dict(FRAME, ctx, {(a, ab): I * s})
        self.dcov = {0: dtheta}
        for i in range(4):
            self.dcov[1 + i] = dalphas[i]
            self.dcov[5 + i] = conj_form(dalphas[i])

    def d_function(self, f: UPoly) -> KForm:
        """``df = sum A_i(f) a_i + sum Ab_i(f) ab_i + sum df/du du``."""
        ctx = self.ctx
        cf = self.cf
        coeffs = {}
        for i in range(4):
            coeffs[(_A[i],)] = f.map_series(lambda s, i=i: dual_frame_apply(cf, s, i + 1))
            coeffs[(_AB[i],)] = f.map_series(lambda s, i=i: dual_frame_apply_bar(cf, s, i + 1))
        for n in FIBER_VARS:
            coeffs[("d" + n,)] = f.diff_fiber(n)
        return KForm.from_dict(FRAME, ctx, coeffs)

    def d(self, w: KForm) -> KForm:
        if w.basis != FRAME:
            raise ValueError("FrameCalculus.d acts on frame-basis forms")
        out = KForm.zero(FRAME, w.degree + 1, self.ctx)
        for key, c in w.terms.items():
            rest = KForm(FRAME, w.degree, self.ctx, {key: UPoly.constant(self.ctx, 1)})
            out = out + wedge(self.d_function(c), rest)
            for pos, i in enumerate(key):
                if i in self.dcov:
                    before = KForm(FRAME, pos, self.ctx, {key[:pos]: c})
                    after = KForm(FRAME, len(key) - pos - 1, self.ctx, {key[pos + 1:]: UPoly.constant(self.ctx, 1)})
                    term = wedge(wedge(before, self.dcov[i]), after)
                    out = out + (term if pos % 2 == 0 else -term)
        return out


def dtau_structure(sigma: list, calc: FrameCalculus) -> list:
    """``K = d Sigma + Sigma ^ Sigma`` with fiber differentials and the ideal eliminated."""
    out = []
    for i in range(2):
        row = []
        for j in range(2):
            k = calc.d(sigma[i][j])
            for m in range(2):
                k = k + wedge(sigma[i][m], sigma[m][j])
            k = fiber_d_reduce(k, sigma)
            row.append(mod_I(k))
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# orchestration


@dataclass
class PipelineResult:
    df: DefiningFunction
    theta: ContactForm
    levi: LeviMatrix
    signature: tuple
    coframe: CoframeData
    dalphas: list
    torsions: TorsionSet
    absorption: AbsorptionSolution
    obstructions: ObstructionPair


def run_pipeline(df: DefiningFunction) -> PipelineResult:
    theta = build_theta(df)
    H = levi_matrix(df)
    sig = signature_at_origin(H)
    if sig != (2, 2):
        raise WrongSignature(sig)
    cf = diagonalize_coframe(H)
    dal = structure_two_forms(cf, theta)
    ts = extract_torsions(dal, cf)
    return PipelineResult(df, theta, H, sig, cf, dal, ts, absorb_torsions(ts), obstruction_functions(ts))


# ---------------------------------------------------------------------------
# structural identities (each returns a residual that must vanish)


def dtheta_levi_residual(theta: ContactForm, H: LeviMatrix) -> KForm:
    """``d theta - i sum H_jk dz_j ^ dzb_k`` over the base basis."""
    ctx = H.df.ctx
    rhs = KForm.from_dict(
        BASE, ctx, {(f"dz{j + 1}", f"dzb{k + 1}"): H[j, k] * I for j in range(4) for k in range(4)}
    )
    return ext_d(theta.theta) - rhs


def coframe_residual(cf: CoframeData) -> KForm:
    """``d theta - i sum eps_i a_i ^ ab_i`` after substituting the coframe."""
    ctx = cf.ctx
    dtheta = coframe_change(ext_d(cf.theta), cf, "dz_to_alpha")
    target = KForm.from_dict(FRAME, ctx, {(a, ab): I * s for a, ab, s in zip(_A, _AB, cf.signs)})
    return dtheta - target


def duality_residual(cf: CoframeData) -> list:
    """``T T_inv - Id`` entrywise (alpha^i(A_j) - delta_ij)."""
    prod = mat_mul(cf.T, cf.T_inv)
    return [[prod[i][j] - (1 if i == j else 0) for j in range(4)] for i in range(4)]


def torsion_reconstruction_residual(cf: CoframeData, dalphas: list, ts: TorsionSet) -> list:
    """Check the torsion block against an independent base-basis computation.

    With ``omega = (a3, a4)^T - U (a1, a2)^T`` one has, modulo I,
    ``Omega = U* d omega + (U* dU) ^ (a1, a2)^T + (U*U - Id)(d a1, d a2)^T``;
    ``Omega`` must equal the five-term torsion forms read off the frame side.
    """
    ctx = cf.ctx
    (P, Q), (R, S) = fiber_matrix(ctx)[0]
    Ustar = fiber_matrix(ctx)[1]
    a = [KForm.covector(FRAME, ctx, n) for n in _A]
    omega = [a[2] - a[0] * P - a[1] * Q, a[3] - a[0] * R - a[1] * S]
    domega = [coframe_change(ext_d(coframe_change(w, cf, "alpha_to_dz")), cf, "dz_to_alpha") for w in omega]
    mc = maurer_cartan(ctx)
    out = []
    for k in range(2):
        lhs = domega[0] * Ustar[k][0] + domega[1] * Ustar[k][1]
        for j in range(2):
            lhs = lhs + wedge(mc[k][j], a[j])
            uu = Ustar[k][0] * fiber_matrix(ctx)[0][0][j] + Ustar[k][1] * fiber_matrix(ctx)[0][1][j]
            if k == j:
                uu = uu - 1
            lhs = lhs + dalphas[j] * uu
        out.append(mod_I(lhs) - torsion_form(ts, k, ctx))
    return out


def skew_residual(M: list) -> list:
    """``M + M*`` entrywise for a 2x2 matrix of forms."""
    Ms = conj_transpose(M)
    return [[M[i][j] + Ms[i][j] for j in range(2)] for i in range(2)]


def tau_skew_residual(tau: list) -> list:
    """``tau + tau* + d(U*U)``; vanishes identically since Sigma is skew."""
    ctx = tau[0][0].ctx
    U, Ustar = fiber_matrix(ctx)
    res = skew_residual(tau)
    out = []
    for i in range(2):
        row = []
        for j in range(2):
            uu = Ustar[i][0] * U[0][j] + Ustar[i][1] * U[1][j]
            d_uu = KForm.from_dict(FRAME, ctx, {("d" + n,): uu.diff_fiber(n) for n in FIBER_VARS})
            row.append(res[i][j] + d_uu)
        out.append(row)
    return out


def _all_zero(x) -> bool:
    if isinstance(x, (list, tuple)):
        return all(_all_zero(y) for y in x)
    return x.is_zero()


def structure_checks(result: PipelineResult) -> dict:
    """Run the heavy identities; every value is True when the identity holds."""
    cf, ts = result.coframe, result.torsions
    sigma = build_sigma(ts)
    tau = build_tau(ts, result.absorption).tau
    K = dtau_structure(sigma, FrameCalculus(cf, result.dalphas))
    return {
        "dtheta_levi": _all_zero(dtheta_levi_residual(result.theta, result.levi)),
        "coframe_residual": _all_zero(coframe_residual(cf)),
        "duality": _all_zero(duality_residual(cf)),
        "torsion_reconstruction": _all_zero(torsion_reconstruction_residual(cf, result.dalphas, ts)),
        "sigma_skew": _all_zero(skew_residual(sigma)),
        "tau_skew": _all_zero(tau_skew_residual(tau)),
        "dtau_skew": _all_zero(skew_residual(K)),
        "dtau_fiber_free": not any(k.has_fiber_covectors() for row in K for k in row),
    }
