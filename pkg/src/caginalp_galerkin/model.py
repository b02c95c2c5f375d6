"""Galerkin coefficient system of the nonisothermal tumor-growth model.

State variables are the coefficient vectors of temperature θ, phase field φ
and nutrient σ.  The chemical potential μ is eliminated from the rate
equations and recovered on demand.  Per mode ``j`` with eigenvalue ``γ_j``::

    (1 + τ γ_j) φ'_j = S^φ_j - γ_j² φ_j - γ_j w_j + χ γ_j σ_j + Λ γ_j θ_j
    θ'_j = -γ_j θ_j + u_j - ℓ φ'_j
    σ'_j = -(γ_j + λ_B) σ_j + χ γ_j φ_j + S^σ_j
    μ_j  = τ φ'_j + γ_j φ_j + w_j - χ σ_j - Λ θ_j

with ``w = <β_ε(φ) + π(φ), e_j>``, ``S^φ = <(λ_P σ - λ_A - λ_E θ) 𝕙(φ), e_j>``
and ``S^σ = <-λ_C σ 𝕙(φ) + λ_B σ_B - λ_D σ 𝕜(θ), e_j>``, all evaluated
pseudo-spectrally on the basis quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import spectral as sp
from .potential import NonlinearitySpec, PotentialSpec, YosidaConfig, resolvent

__all__ = [
    "HypothesisError",
    "BlowUpError",
    "Source",
    "OffSource",
    "ConstantSource",
    "GaussBumpSource",
    "CosineModeSource",
    "SumSource",
    "make_source",
    "ModelParams",
    "SimState",
    "DerivedFields",
    "NodeFields",
    "eval_sources",
    "node_fields",
    "assemble_rhs",
    "recover_mu",
    "residuals",
]


class HypothesisError(ValueError):
    """A model parameter violates one of the standing hypotheses (H1)-(H4)."""


class BlowUpError(ArithmeticError):
    """Non-finite value produced while evaluating or advancing the system."""

    def __init__(self, message: str, t: float | None = None, mode: int | None = None, field: str | None = None):
        super().__init__(message)
        self.t = t
        self.mode = mode
        self.field = field


# --- space-time sources ----------------------------------------------------


class Source:
    """Space-time datum evaluated at quadrature nodes."""

    def __call__(self, nodes: np.ndarray, t: float, basis: sp.Basis | None = None) -> np.ndarray:
        raise NotImplementedError

    def __add__(self, other: "Source") -> "Source":
        return SumSource((self, other))


@dataclass(frozen=True)
class OffSource(Source):
    def __call__(self, nodes, t, basis=None):
        return np.zeros(len(nodes))


@dataclass(frozen=True)
class ConstantSource(Source):
    value: float

    def __call__(self, nodes, t, basis=None):
        return np.full(len(nodes), float(self.value))


@dataclass(frozen=True)
class GaussBumpSource(Source):
    """``amplitude * exp(-|x - center|² / (2 width²))`` switched on for ``t_on <= t < t_off``.

    ``center`` is a scalar applied on every axis or one coordinate per axis.
    """

    amplitude: float
    center: tuple[float, ...] | float
    width: float
    t_on: float = 0.0
    t_off: float = math.inf

    def __call__(self, nodes, t, basis=None):
        if not (self.t_on <= t < self.t_off):
            return np.zeros(len(nodes))
        c = np.broadcast_to(np.asarray(self.center, dtype=float), (nodes.shape[1],))
        d2 = np.sum((nodes - c) ** 2, axis=1)
        return self.amplitude * np.exp(-d2 / (2.0 * self.width**2))


@dataclass(frozen=True)
class CosineModeSource(Source):
    """``amplitude * e_index`` in the active basis ordering, constant in time."""

    index: int
    amplitude: float

    def __call__(self, nodes, t, basis=None):
        if basis is None:
            raise ValueError("cosine-mode source needs the basis to resolve its mode index")
        return self.amplitude * basis.values[self.index]


@dataclass(frozen=True)
class SumSource(Source):
    parts: tuple[Source, ...]

    def __call__(self, nodes, t, basis=None):
        return sum(p(nodes, t, basis) for p in self.parts)


def make_source(name: str, *args: float) -> Source:
    """Build a source from its preset name and positional parameters.

    ``off``; ``constant: c``; ``gauss-bump: amplitude, center, width[, t_on, t_off]``;
    ``cosine-mode: index, amplitude``.
    """
    try:
        if name == "off":
            if args:
                raise TypeError
            return OffSource()
        if name == "constant":
            return ConstantSource(*args)
        if name == "gauss-bump":
            return GaussBumpSource(*args)
        if name == "cosine-mode":
            index, amplitude = args
            return CosineModeSource(int(index), float(amplitude))
    except TypeError as exc:
        raise ValueError(f"wrong number of parameters for source preset {name!r}: {args}") from exc
    raise ValueError(f"unknown source preset {name!r}")


# --- parameters and state --------------------------------------------------


@dataclass(frozen=True)
class ModelParams:
    """Coefficients, potential, nonlinearities and data of the model.

    ``strict=True`` enforces ``ℓ, Λ, χ > 0``; with ``strict=False`` zero is
    accepted for these three so that decoupled reference configurations can be
    built.  Negative values are always rejected.
    """

    ell: float = 1.0
    Lambda: float = 0.5
    chi: float = 0.5
    tau: float = 0.1
    lambda_P: float = 0.1
    lambda_A: float = 0.05
    lambda_E: float = 0.05
    lambda_C: float = 0.1
    lambda_B: float = 0.1
    lambda_D: float = 0.05
    potential: PotentialSpec = field(default_factory=PotentialSpec.preset)
    nonlin: NonlinearitySpec = field(default_factory=NonlinearitySpec)
    yosida: YosidaConfig = field(default_factory=YosidaConfig)
    u: Source = field(default_factory=OffSource)
    sigma_B: Source = field(default_factory=OffSource)
    M: float | None = None
    strict: bool = True

    def __post_init__(self):
        for name in ("ell", "Lambda", "chi"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0 or (self.strict and v == 0):
                raise HypothesisError(f"(H1) requires {name} to be a positive constant, got {v}")
        for name in ("tau", "lambda_P", "lambda_A", "lambda_E", "lambda_C", "lambda_B", "lambda_D"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise HypothesisError(f"(H1) requires {name} to be a nonnegative constant, got {v}")
        if self.M is not None and self.M < 0:
            raise HypothesisError(f"(H2) requires a nonnegative bound M, got {self.M}")

    def with_changes(self, **kw) -> "ModelParams":
        return replace(self, **kw)

    @property
    def eps(self) -> float:
        return self.yosida.eps


@dataclass(frozen=True, eq=False)
class SimState:
    t: float
    theta: np.ndarray
    phi: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        for name in ("theta", "phi", "sigma"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (self.theta.shape == self.phi.shape == self.sigma.shape) or self.phi.ndim != 1:
            raise ValueError("theta, phi and sigma must be coefficient vectors on one basis")

    def pack(self) -> np.ndarray:
        return np.concatenate([self.theta, self.phi, self.sigma])

    @classmethod
    def unpack(cls, t: float, y: np.ndarray) -> "SimState":
        m = len(y) // 3
        return cls(t, y[:m].copy(), y[m : 2 * m].copy(), y[2 * m :].copy())

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.theta)) and np.all(np.isfinite(self.phi)) and np.all(np.isfinite(self.sigma)))


@dataclass(frozen=True, eq=False)
class NodeFields:
    """Node values and nonlinear projections shared by the rate assembly."""

    u: np.ndarray
    w: np.ndarray  # <β_ε(φ) + π(φ), e_j>
    S_phi: np.ndarray
    S_sigma: np.ndarray  # includes λ_B σ_B
    beta_eps_phi: np.ndarray  # node values of β_ε(φ)
    phi_nodes: np.ndarray
    theta_nodes: np.ndarray


@dataclass(frozen=True, eq=False)
class DerivedFields:
    mu: np.ndarray
    dphi_dt: np.ndarray
    dtheta_dt: np.ndarray
    dsigma_dt: np.ndarray
    nodes: NodeFields


def _finite_or_raise(arr: np.ndarray, what: str, t: float) -> None:
    bad = ~np.isfinite(arr)
    if bad.any():
        j = int(np.flatnonzero(bad)[0])
        raise BlowUpError(f"non-finite {what} at index {j}, t={t!r}", t=t, mode=j, field=what)


def eval_sources(params: ModelParams, basis: sp.Basis, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients of ``u(·, t)`` and ``σ_B(·, t)``.

    Raises :class:`HypothesisError` if the sampled ``|u|`` exceeds ``M``.
    """
    u_nodes = params.u(basis.nodes, t, basis)
    if params.M is not None:
        sup = float(np.max(np.abs(u_nodes))) if len(u_nodes) else 0.0
        if sup > params.M * (1 + 1e-12):
            raise HypothesisError(f"(H2) sup |u| = {sup} exceeds the declared bound M = {params.M}")
    sb_nodes = params.sigma_B(basis.nodes, t, basis)
    return sp.analyze(basis, u_nodes), sp.analyze(basis, sb_nodes)


def node_fields(params: ModelParams, basis: sp.Basis, state: SimState) -> NodeFields:
    t = state.t
    for what in ("theta", "phi", "sigma"):
        _finite_or_raise(getattr(state, what), f"{what} coefficient", t)
    phi_n = sp.synthesize(basis, state.phi)
    theta_n = sp.synthesize(basis, state.theta)
    sigma_n = sp.synthesize(basis, state.sigma)
    for arr, what in ((phi_n, "phi"), (theta_n, "theta"), (sigma_n, "sigma")):
        _finite_or_raise(arr, f"{what} node value", t)

    pot = params.potential
    J = resolvent(pot, params.yosida, phi_n)
    beta_eps = (phi_n - J) / params.yosida.eps
    h = params.nonlin.h(phi_n)
    k = params.nonlin.k(theta_n)
    u_nodes = params.u(basis.nodes, t, basis)
    if params.M is not None and len(u_nodes) and np.max(np.abs(u_nodes)) > params.M * (1 + 1e-12):
        raise HypothesisError(f"(H2) sup |u| exceeds the declared bound M = {params.M} at t={t}")
    sb_nodes = params.sigma_B(basis.nodes, t, basis)

    f_nodes = beta_eps + pot.pi(phi_n)
    sphi_nodes = (params.lambda_P * sigma_n - params.lambda_A - params.lambda_E * theta_n) * h
    ssig_nodes = -params.lambda_C * sigma_n * h + params.lambda_B * sb_nodes - params.lambda_D * sigma_n * k
    for arr, what in ((f_nodes, "potential derivative"), (sphi_nodes, "phase source"), (ssig_nodes, "nutrient source")):
        _finite_or_raise(arr, what, t)
    return NodeFields(
        u=sp.analyze(basis, u_nodes),
        w=sp.analyze(basis, f_nodes),
        S_phi=sp.analyze(basis, sphi_nodes),
        S_sigma=sp.analyze(basis, ssig_nodes),
        beta_eps_phi=beta_eps,
        phi_nodes=phi_n,
        theta_nodes=theta_n,
    )


def recover_mu(params: ModelParams, basis: sp.Basis, state: SimState, dphi_dt, w: np.ndarray | None = None) -> np.ndarray:
    """Chemical potential coefficients from the state and the phase rate."""
    dphi_dt = np.asarray(dphi_dt, dtype=float)
    if dphi_dt.shape != (basis.size,) or state.phi.shape != (basis.size,):
        raise ValueError("state / rate do not match the basis")
    if w is None:
        w = node_fields(params, basis, state).w
    g = basis.eigenvalues
    return params.tau * dphi_dt + g * state.phi + w - params.chi * state.sigma - params.Lambda * state.theta


def assemble_rhs(params: ModelParams, basis: sp.Basis, state: SimState) -> DerivedFields:
    """Rates of (θ, φ, σ) and the recovered μ at ``state``.

    Raises
    ------
    BlowUpError
        On any non-finite intermediate; ``mode`` carries the offending index.
    """
    if state.phi.shape != (basis.size,):
        raise ValueError(f"state has {state.phi.shape[0]} modes, basis has {basis.size}")
    nf = node_fields(params, basis, state)
    g = basis.eigenvalues
    p = params
    dphi = (nf.S_phi - g * g * state.phi - g * nf.w + p.chi * g * state.sigma + p.Lambda * g * state.theta) / (
        1.0 + p.tau * g
    )
    dtheta = -g * state.theta + nf.u - p.ell * dphi
    dsigma = -(g + p.lambda_B) * state.sigma + p.chi * g * state.phi + nf.S_sigma
    mu = recover_mu(params, basis, state, dphi, w=nf.w)
    for arr, what in ((dphi, "dphi_dt"), (dtheta, "dtheta_dt"), (dsigma, "dsigma_dt"), (mu, "mu")):
        _finite_or_raise(arr, what, state.t)
    return DerivedFields(mu=mu, dphi_dt=dphi, dtheta_dt=dtheta, dsigma_dt=dsigma, nodes=nf)


def residuals(params: ModelParams, basis: sp.Basis, state: SimState, derived: DerivedFields) -> dict[str, float]:
    """H-norms of the four discrete equation residuals.

    ``derived`` may come from anywhere (e.g. a reloaded trajectory); the
    nonlinear projections are recomputed from ``state``.
    """
    nf = node_fields(params, basis, state)
    g = basis.eigenvalues
    p = params
    r_temp = derived.dtheta_dt + p.ell * derived.dphi_dt + g * state.theta - nf.u
    r_ch1 = derived.dphi_dt + g * derived.mu - nf.S_phi
    r_ch2 = p.tau * derived.dphi_dt + g * state.phi + nf.w - p.chi * state.sigma - p.Lambda * state.theta - derived.mu
    r_nut = derived.dsigma_dt + (g + p.lambda_B) * state.sigma - p.chi * g * state.phi - nf.S_sigma
    return {
        "temperature": sp.h_norm(r_temp),
        "ch1": sp.h_norm(r_ch1),
        "ch2": sp.h_norm(r_ch2),
        "nutrient": sp.h_norm(r_nut),
    }
