"""Minimize |T1(0, U)|^2 + |T2(0, U)|^2 over U in U(2)."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

__all__ = [
    "U2Point",
    "ObstructionAtOrigin",
    "SearchResult",
    "u2_from_angles",
    "eval_obstruction_norm",
    "minimize_over_u2",
    "verdict_for",
    "OBSTRUCTED_ABOVE",
    "CLEAR_BELOW",
]

OBSTRUCTED_ABOVE = 1e-6
CLEAR_BELOW = 1e-9


@dataclass(frozen=True)
class U2Point:
    angles: tuple
    matrix: np.ndarray


def _u2_matrices(phi, t, a, b):
    """Vectorized ``e^{i phi} [[cos t e^{ia}, sin t e^{ib}], [-sin t e^{-ib}, cos t e^{-ia}]]``."""
    g = np.exp(1j * phi)
    c, s = np.cos(t), np.sin(t)
    P = g * c * np.exp(1j * a)
    Q = g * s * np.exp(1j * b)
    R = -g * s * np.exp(-1j * b)
    S = g * c * np.exp(-1j * a)
    return P, Q, R, S


def u2_from_angles(phi: float, t: float, a: float, b: float) -> U2Point:
    P, Q, R, S = _u2_matrices(phi, t, a, b)
    return U2Point((float(phi), float(t), float(a), float(b)), np.array([[P, Q], [R, S]], dtype=complex))


@dataclass(frozen=True)
class ObstructionAtOrigin:
    """T1 and T2 at the origin as lists of ``(fiber exponent 8-tuple, complex coefficient)``."""

    T1: tuple
    T2: tuple

    @classmethod
    def from_upolys(cls, T1, T2) -> "ObstructionAtOrigin":
        return cls(tuple(T1.numeric_at_origin()), tuple(T2.numeric_at_origin()))

    def is_zero(self) -> bool:
        return not self.T1 and not self.T2

    @staticmethod
    def _eval(poly, vals):
        out = 0j
        for exps, c in poly:
            term = c
            for v, e in zip(vals, exps):
                if e:
                    term = term * v**e
            out = out + term
        return out

    def norm_at(self, P, Q, R, S):
        vals = (P, Q, R, S, np.conj(P), np.conj(Q), np.conj(R), np.conj(S))
        t1 = self._eval(self.T1, vals)
        t2 = self._eval(self.T2, vals)
        return np.abs(t1) ** 2 + np.abs(t2) ** 2


def eval_obstruction_norm(obs: ObstructionAtOrigin, U) -> float:
    M = U.matrix if isinstance(U, U2Point) else np.asarray(U, dtype=complex)
    return float(obs.norm_at(M[0, 0], M[0, 1], M[1, 0], M[1, 1]))


@dataclass(frozen=True)
class SearchResult:
    minimum: float
    argmin: U2Point
    grid_minimum: float
    evaluations: int


def _objective(obs):
    def f(x):
        return float(obs.norm_at(*_u2_matrices(*x)))

    return f


def minimize_over_u2(obs: ObstructionAtOrigin, grid: int = 12, iters: int = 200) -> SearchResult:
    """Coarse angle grid followed by Nelder-Mead from the best cell; deterministic."""
    if grid < 4:
        raise ValueError("grid must be at least 4 per axis")
    if obs.is_zero():
        return SearchResult(0.0, u2_from_angles(0.0, 0.0, 0.0, 0.0), 0.0, 0)
    phis = np.arange(grid) * (np.pi / grid)
    ts = np.linspace(0.0, np.pi / 2, grid)
    cyc = np.arange(grid) * (2 * np.pi / grid)
    PH, TT, AA, BB = np.meshgrid(phis, ts, cyc, cyc, indexing="ij")
    vals = obs.norm_at(*_u2_matrices(PH, TT, AA, BB))
    k = int(np.argmin(vals))
    x0 = np.array([PH.flat[k], TT.flat[k], AA.flat[k], BB.flat[k]])
    grid_min = float(vals.flat[k])
    f = _objective(obs)
    res = minimize(f, x0, method="Nelder-Mead", options={"maxiter": iters, "xatol": 1e-12, "fatol": 1e-18})
    if res.fun < grid_min:
        best, x = float(res.fun), res.x
    else:
        best, x = grid_min, x0
    return SearchResult(best, u2_from_angles(*x), grid_min, int(vals.size + res.nfev))


def verdict_for(min_value: float, exact_zero: bool = False) -> str:
    if exact_zero or min_value <= CLEAR_BELOW:
        return "NO_OBSTRUCTION_FOUND"
    if min_value > OBSTRUCTED_ABOVE:
        return "OBSTRUCTED"
    return "INDETERMINATE"
