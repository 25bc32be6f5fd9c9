"""
Isotropic planes and isometries
===============================

For Q = |x|^2 - |y|^2 on C^{n+} x C^{n-} with n+ <= n-, every maximal
Q-isotropic subspace is the graph of an isometry C^{n+} -> C^{n-}; the
isometry does not depend on the chosen basis.
"""

import numpy as np
from scipy.linalg import expm

from crbidisk.sommer import (
    SigForm,
    is_isotropic,
    maurer_cartan_fd,
    plane_to_unitary,
    random_isometry,
    random_isotropic_plane,
    skew_defect,
    span_distance,
    unitary_to_plane,
)

rng = np.random.default_rng(0)
form = SigForm(2, 3)

B, U = random_isotropic_plane(rng, form)  # basis already mixed by a random G
print("isotropic:", is_isotropic(B, form))
V = plane_to_unitary(B, form)
print("recovered isometry error:", np.max(np.abs(V - U)))
print("V*V - Id:", np.max(np.abs(V.conj().T @ V - np.eye(2))))
print("span distance after round trip:", span_distance(unitary_to_plane(V), B))

# U* (U(s+h) - U(s)) is skew-hermitian up to O(h^2)
X = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
X = X - X.conj().T
U0 = random_isometry(rng, 3, 2)
curve = lambda s: expm(s * X) @ expm(s * s * X.conj()) @ U0  # noqa: E731
for h in (1e-2, 1e-3, 1e-4):
    print(f"h = {h:.0e}  hermitian part of the increment: {skew_defect(maurer_cartan_fd(curve, 0.3, h)):.3e}")
