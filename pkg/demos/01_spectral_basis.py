"""
Neumann cosine basis on a box
=============================

Build a basis, move a field between node values and coefficients, and use the
diagonal operators that come with it.
"""

# %%
import math

import numpy as np

from caginalp_galerkin import spectral as sp

basis = sp.build_basis(sp.BoxDomain((1.0, 2.0)), n=6)
print("modes:", basis.size, " nodes:", basis.nodes.shape[0])
print("first eigenvalues:", np.round(basis.eigenvalues[:6], 4))
print("first multi-indices:", [tuple(int(i) for i in m) for m in basis.modes[:6]])

# %%
# The quadrature is exact for products of retained modes, so the discrete Gram
# matrix is the identity and the stiffness matrix is diagonal.
print("Gram defect:", np.abs(sp.gram_matrix(basis) - np.eye(basis.size)).max())
print("stiffness defect:", np.abs(sp.stiffness_matrix(basis) - np.diag(basis.eigenvalues)).max())

# %%
# A smooth field, its coefficients and its norms.
x, y = basis.nodes.T
field = np.cos(math.pi * x) * np.cos(math.pi * y) + 0.3
c = sp.analyze(basis, field)
print("mean value:", sp.mean_value(basis, c))
print("H, V, W, V* norms:", [round(v, 6) for v in sp.norms(basis, c)])

# %%
# Inverting the Neumann Laplacian on the zero-mean part.
z = c.copy()
z[0] = 0.0
back = sp.laplacian(basis, sp.inverse_neumann_laplacian(basis, z))
print("round trip through the inverse:", np.abs(back - z).max())
