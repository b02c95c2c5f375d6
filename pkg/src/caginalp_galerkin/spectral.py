"""Neumann-Laplacian eigenbasis on boxes and the spectral operators built on it.

Fields are represented by their coefficient vectors (plain ``numpy`` arrays)
in the orthonormal cosine eigenbasis of ``-Δ`` with homogeneous Neumann
conditions on an axis-aligned box ``(0, L1) [x (0, L2)]``.  Nonlinear maps are
applied pseudo-spectrally: :func:`synthesize` to quadrature nodes, pointwise
evaluation, :func:`analyze` back to coefficients.

Mode ``j`` of the basis is the tensor product ``prod_a c_{i_a}(x_a)`` with
``c_0 = L^{-1/2}`` and ``c_i = (2/L)^{1/2} cos(i π x / L)``; its eigenvalue is
``sum_a (i_a π / L_a)^2``.  Modes are ordered by eigenvalue, ties broken
lexicographically by multi-index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "BoxDomain",
    "Basis",
    "build_basis",
    "analyze",
    "synthesize",
    "project_pn",
    "restrict",
    "mean_value",
    "inverse_neumann_laplacian",
    "laplacian",
    "norms",
    "h_norm",
    "v_norm",
    "w_norm",
    "gram_matrix",
    "stiffness_matrix",
]

QUADRATURE_RULES = ("midpoint", "gauss-legendre")


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned box ``prod_a (0, lengths[a])`` in one or two dimensions."""

    lengths: tuple[float, ...]

    def __post_init__(self):
        lengths = tuple(float(v) for v in np.atleast_1d(self.lengths))
        if len(lengths) not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {len(lengths)}")
        if not all(math.isfinite(v) and v > 0 for v in lengths):
            raise ValueError(f"box lengths must be positive, got {lengths}")
        object.__setattr__(self, "lengths", lengths)

    @property
    def dim(self) -> int:
        return len(self.lengths)

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))


def _axis_rule(length: float, Q: int, rule: str) -> tuple[np.ndarray, np.ndarray]:
    if rule == "midpoint":
        x = (np.arange(Q) + 0.5) * (length / Q)
        w = np.full(Q, length / Q)
    elif rule == "gauss-legendre":
        x, w = np.polynomial.legendre.leggauss(Q)
        x = 0.5 * length * (x + 1.0)
        w = 0.5 * length * w
    else:
        raise ValueError(f"unknown quadrature rule {rule!r}; expected one of {QUADRATURE_RULES}")
    return x, w


def _axis_modes(length: float, n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Values and derivatives of the 1D cosine modes 0..n at ``x``."""
    k = np.arange(n + 1)[:, None] * (np.pi / length)
    scale = np.full((n + 1, 1), math.sqrt(2.0 / length))
    scale[0] = math.sqrt(1.0 / length)
    return scale * np.cos(k * x), -scale * k * np.sin(k * x)


@dataclass(frozen=True, eq=False)
class Basis:
    """Truncated Neumann eigenbasis with its tensor quadrature grid.

    Attributes
    ----------
    domain : BoxDomain
    n : int
        Largest per-axis cosine index; ``(n + 1) ** dim`` modes in total.
    Q : int
        Quadrature points per axis.
    rule : str
        ``"midpoint"`` (default) or ``"gauss-legendre"``.
    modes : ndarray, shape (M, dim)
        Multi-indices in eigenvalue order.
    eigenvalues : ndarray, shape (M,)
    nodes : ndarray, shape (Q**dim, dim)
    weights : ndarray, shape (Q**dim,)
    values : ndarray, shape (M, Q**dim)
        ``values[j, q] = e_j(nodes[q])``.
    """

    domain: BoxDomain
    n: int
    Q: int
    rule: str
    modes: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    _axis_data: tuple = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.eigenvalues)

    @property
    def dim(self) -> int:
        return self.domain.dim

    @cached_property
    def _weighted_values(self) -> np.ndarray:
        return self.values * self.weights

    @cached_property
    def mode_index(self) -> dict[tuple[int, ...], int]:
        return {tuple(int(i) for i in m): j for j, m in enumerate(self.modes)}

    def gradient_values(self) -> np.ndarray:
        """Partial derivatives of every mode at the nodes, shape (dim, M, Q**dim)."""
        vals = [d[0] for d in self._axis_data]
        ders = [d[1] for d in self._axis_data]
        out = np.empty((self.dim, self.size, len(self.weights)))
        for a in range(self.dim):
            factors = [ders[b] if b == a else vals[b] for b in range(self.dim)]
            out[a] = _tensor_rows(factors, self.modes)
        return out

    def unit_mode(self, j: int) -> np.ndarray:
        c = np.zeros(self.size)
        c[j] = 1.0
        return c

    def compatible(self, other: "Basis") -> bool:
        return self.domain == other.domain and self.n == other.n


def _tensor_rows(factors: list[np.ndarray], modes: np.ndarray) -> np.ndarray:
    if len(factors) == 1:
        return factors[0][modes[:, 0]]
    a, b = factors
    rows = a[modes[:, 0]][:, :, None] * b[modes[:, 1]][:, None, :]
    return rows.reshape(len(modes), -1)


def build_basis(domain: BoxDomain, n: int, Q: int | None = None, rule: str = "midpoint") -> Basis:
    """Build the Neumann eigenbasis with per-axis cutoff ``n``.

    ``Q`` defaults to ``4 (n + 1)`` and must be at least ``2 (n + 1)``.
    """
    if n < 0:
        raise ValueError(f"mode cutoff must be nonnegative, got {n}")
    if Q is None:
        Q = 4 * (n + 1)
    if Q < 2 * (n + 1):
        raise ValueError(f"quadrature points per axis Q={Q} below floor 2(n+1)={2 * (n + 1)}")

    axis_data = []
    axis_nodes, axis_weights = [], []
    for length in domain.lengths:
        x, w = _axis_rule(length, Q, rule)
        axis_nodes.append(x)
        axis_weights.append(w)
        axis_data.append(_axis_modes(length, n, x))

    grids = np.meshgrid(*[np.arange(n + 1)] * domain.dim, indexing="ij")
    modes = np.stack([g.ravel() for g in grids], axis=1)
    gam = sum((modes[:, a] * np.pi / L) ** 2 for a, L in enumerate(domain.lengths))
    # lexsort: last key is primary
    order = np.lexsort(tuple(modes[:, a] for a in reversed(range(domain.dim))) + (gam,))
    modes = modes[order]
    gam = np.asarray(gam)[order]

    mesh = np.meshgrid(*axis_nodes, indexing="ij")
    nodes = np.stack([m.ravel() for m in mesh], axis=1)
    wmesh = np.meshgrid(*axis_weights, indexing="ij")
    weights = np.prod(np.stack([w.ravel() for w in wmesh]), axis=0)
    values = _tensor_rows([d[0] for d in axis_data], modes)
    return Basis(domain, int(n), int(Q), rule, modes, gam, nodes, weights, values, tuple(axis_data))


def _check_coeffs(basis: Basis, coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float)
    if c.shape != (basis.size,):
        raise ValueError(f"coefficient vector has shape {c.shape}, basis expects ({basis.size},)")
    return c


def analyze(basis: Basis, values) -> np.ndarray:
    """Coefficients ``c_j = sum_q w_q v(x_q) e_j(x_q)`` of node samples."""
    v = np.asarray(values, dtype=float).reshape(-1)
    if v.shape[0] != len(basis.weights):
        raise ValueError(f"expected {len(basis.weights)} node values, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite sample passed to analyze")
    return basis._weighted_values @ v


def synthesize(basis: Basis, coeffs) -> np.ndarray:
    """Node samples of ``sum_j c_j e_j``."""
    return _check_coeffs(basis, coeffs) @ basis.values


def project_pn(basis: Basis, coeffs, m: int) -> np.ndarray:
    """Zero every mode whose per-axis index exceeds ``m``.

    In 1D this is the prefix truncation to the first ``m + 1`` modes.
    """
    if m < 0:
        raise ValueError(f"projection cutoff must be nonnegative, got {m}")
    c = _check_coeffs(basis, coeffs).copy()
    c[basis.modes.max(axis=1) > m] = 0.0
    return c


def restrict(fine: Basis, coeffs, coarse: Basis) -> np.ndarray:
    """Express ``P^m`` of a fine-basis field in the coefficient layout of ``coarse``."""
    if fine.domain != coarse.domain or coarse.n > fine.n:
        raise ValueError("coarse basis must share the domain and have a cutoff not above the fine one")
    c = _check_coeffs(fine, coeffs)
    idx = np.array([fine.mode_index[tuple(int(i) for i in m)] for m in coarse.modes])
    return c[idx]


def mean_value(basis: Basis, coeffs) -> float:
    return float(_check_coeffs(basis, coeffs)[0] / math.sqrt(basis.domain.volume))


def laplacian(basis: Basis, coeffs) -> np.ndarray:
    """Coefficients of ``-Δ v`` (the operator 𝓡 on the span)."""
    return basis.eigenvalues * _check_coeffs(basis, coeffs)


def inverse_neumann_laplacian(basis: Basis, coeffs, rtol: float = 1e-10) -> np.ndarray:
    """Apply 𝒩, the inverse of the zero-mean Neumann Laplacian.

    Raises
    ------
    ValueError
        If the field's mean exceeds ``rtol * ||v||_H``; 𝒩 is only defined on
        zero-mean data.
    """
    c = _check_coeffs(basis, coeffs)
    scale = float(np.linalg.norm(c))
    if abs(mean_value(basis, c)) > rtol * scale:
        raise ValueError(
            f"inverse Neumann Laplacian needs a zero-mean field; mean is {mean_value(basis, c):.3e}"
        )
    out = np.zeros_like(c)
    out[1:] = c[1:] / basis.eigenvalues[1:]
    return out


def h_norm(coeffs) -> float:
    return float(np.sqrt(np.dot(coeffs, coeffs)))


def v_norm(basis: Basis, coeffs) -> float:
    """Equivalent V-norm ``(||∇v||^2 + mean^2)^{1/2}``."""
    c = np.asarray(coeffs)
    return float(np.sqrt(np.dot(basis.eigenvalues * c, c) + mean_value(basis, c) ** 2))


def w_norm(basis: Basis, coeffs) -> float:
    """Equivalent W-norm ``(||Δv||^2 + mean^2)^{1/2}``."""
    c = np.asarray(coeffs)
    lc = basis.eigenvalues * c
    return float(np.sqrt(np.dot(lc, lc) + mean_value(basis, c) ** 2))


def norms(basis: Basis, coeffs) -> tuple[float, float, float, float]:
    """Return ``(||v||_H, ||∇v||_H, ||Δv||_H, V*-equivalent norm)``.

    The last entry is ``(sum_{j>=1} c_j^2 / γ_j + mean^2)^{1/2}``, i.e.
    ``(||∇𝒩(v - mean)||^2 + mean^2)^{1/2}``.
    """
    c = _check_coeffs(basis, coeffs)
    g = basis.eigenvalues
    h = math.sqrt(float(np.dot(c, c)))
    v = math.sqrt(float(np.dot(g * c, c)))
    w = math.sqrt(float(np.dot(g * g * c, c)))
    dual = math.sqrt(float(np.sum(c[1:] ** 2 / g[1:])) + mean_value(basis, c) ** 2)
    return h, v, w, dual


def gram_matrix(basis: Basis) -> np.ndarray:
    """Quadrature Gram matrix ``sum_q w_q e_i(x_q) e_j(x_q)``."""
    return basis._weighted_values @ basis.values.T


def stiffness_matrix(basis: Basis) -> np.ndarray:
    """Quadrature of ``∇e_i · ∇e_j``."""
    grads = basis.gradient_values()
    return sum((g * basis.weights) @ g.T for g in grads)
