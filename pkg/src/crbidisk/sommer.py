"""Isotropic planes of an indefinite Hermitian form and their unitary parameterization.

For ``Q(x, y) = |x|^2 - |y|^2`` on ``C^{n+} x C^{n-}`` (``n+ <= n-``), every
``n+``-dimensional Q-isotropic subspace is the graph of an isometry
``A: C^{n+} -> C^{n-}``. Writing a basis as a block matrix ``[B; A']`` the
isometry is ``A' B^{-1}``, independent of the chosen basis.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InconsistentInput

__all__ = [
    "SigForm",
    "gram",
    "is_isotropic",
    "plane_to_unitary",
    "unitary_to_plane",
    "span_distance",
    "random_isometry",
    "random_isotropic_plane",
    "maurer_cartan_fd",
    "skew_defect",
    "ISOTROPY_TOL",
    "UNITARY_TOL",
    "RANK_TOL",
]

ISOTROPY_TOL = 1e-10
UNITARY_TOL = 1e-9
RANK_TOL = 1e-10


@dataclass(frozen=True)
class SigForm:
    n_plus: int
    n_minus: int

    def __post_init__(self):
        if self.n_plus < 1 or self.n_minus < 1 or self.n_plus > self.n_minus:
            raise ValueError(f"need 1 <= n_plus <= n_minus, got ({self.n_plus}, {self.n_minus})")

    @property
    def dim(self) -> int:
        return self.n_plus + self.n_minus

    def matrix(self) -> np.ndarray:
        return np.diag([1.0] * self.n_plus + [-1.0] * self.n_minus).astype(complex)


def _as_basis(basis, form: SigForm, full: bool = True) -> np.ndarray:
    """Validate a column basis; ``full`` demands exactly ``n_plus`` columns, otherwise 1..n_plus."""
    B = np.asarray(basis, dtype=complex)
    k = B.shape[1] if B.ndim == 2 else 0
    ok = B.ndim == 2 and B.shape[0] == form.dim and (k == form.n_plus if full else 1 <= k <= form.n_plus)
    if not ok:
        raise ValueError(f"basis must have shape ({form.dim}, {form.n_plus}), got {B.shape}")
    if np.linalg.matrix_rank(B, tol=RANK_TOL) < k:
        raise ValueError("basis columns are linearly dependent")
    return B


def gram(basis, form: SigForm) -> np.ndarray:
    """Full sesquilinear Gram matrix ``B* J B``."""
    B = _as_basis(basis, form, full=False)
    return B.conj().T @ form.matrix() @ B


def is_isotropic(basis, form: SigForm, tol: float = ISOTROPY_TOL) -> bool:
    return float(np.max(np.abs(gram(basis, form)))) <= tol


def plane_to_unitary(basis, form: SigForm, tol: float = ISOTROPY_TOL) -> np.ndarray:
    """The isometry ``A_H B_H^{-1}`` whose graph is the plane."""
    B = _as_basis(basis, form)
    if not is_isotropic(B, form, tol):
        raise InconsistentInput("plane is not isotropic")
    top, bottom = B[: form.n_plus], B[form.n_plus:]
    s = np.linalg.svd(top, compute_uv=False)
    if s[-1] <= RANK_TOL * max(1.0, s[0]):
        raise InconsistentInput("top block of an isotropic basis is singular")
    return np.linalg.solve(top.T, bottom.T).T


def unitary_to_plane(U) -> np.ndarray:
    """Graph basis ``[Id; U]`` of an isometry ``U`` (shape ``n- x n+``)."""
    U = np.asarray(U, dtype=complex)
    n_minus, n_plus = U.shape
    if np.max(np.abs(U.conj().T @ U - np.eye(n_plus))) > UNITARY_TOL:
        raise InconsistentInput("matrix is not an isometry")
    return np.vstack([np.eye(n_plus, dtype=complex), U])


def _projector(B: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(B)
    return q @ q.conj().T


def span_distance(B1, B2) -> float:
    """Frobenius distance between the orthogonal projectors onto the column spans."""
    return float(np.linalg.norm(_projector(np.asarray(B1, complex)) - _projector(np.asarray(B2, complex))))


def random_isometry(rng: np.random.Generator, n_minus: int, n_plus: int) -> np.ndarray:
    """Haar-distributed isometry via QR of a complex Gaussian matrix."""
    Z = rng.standard_normal((n_minus, n_minus)) + 1j * rng.standard_normal((n_minus, n_minus))
    q, r = np.linalg.qr(Z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return q[:, :n_plus]


def random_isotropic_plane(rng: np.random.Generator, form: SigForm, mix: bool = True):
    """Return ``(basis, U)`` with basis spanning the graph of a random isometry ``U``."""
    U = random_isometry(rng, form.n_minus, form.n_plus)
    B = unitary_to_plane(U)
    if mix:
        G = rng.standard_normal((form.n_plus, form.n_plus)) + 1j * rng.standard_normal((form.n_plus, form.n_plus))
        G += 2 * np.eye(form.n_plus)
        B = B @ G
    return B, U


def maurer_cartan_fd(curve, s: float, h: float) -> np.ndarray:
    """Forward increment ``U(s)* (U(s+h) - U(s))`` for a curve of isometries.

    This approximates ``h U*U'``, which is skew-hermitian; the hermitian part of
    the increment is ``-h^2 U'* U' / 2 + O(h^3)``.
    """
    U = np.asarray(curve(s), complex)
    return U.conj().T @ (np.asarray(curve(s + h), complex) - U)


def skew_defect(M) -> float:
    """``max |M + M*|``, zero exactly for skew-hermitian ``M``."""
    M = np.asarray(M, complex)
    return float(np.max(np.abs(M + M.conj().T)))
