"""Energy, balance laws and a priori quantities evaluated along trajectories."""
from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields

import numpy as np

from . import spectral as sp
from .model import ModelParams, SimState, assemble_rhs, node_fields
from .potential import moreau_envelope
from .stepper import Trajectory

__all__ = [
    "MonitorRecord",
    "RECORD_FIELDS",
    "EstimateMonitor",
    "free_energy",
    "BalanceReport",
    "balance_report",
    "EnergyReport",
    "energy_identity_residual",
    "AprioriReport",
    "apriori_report",
]


@dataclass(frozen=True)
class MonitorRecord:
    """One row of the time-series output; field order is the CSV column order."""

    t: float
    free_energy: float
    mean_theta_plus_ell_phi: float
    mean_phi: float
    mean_sigma: float
    theta_H: float
    phi_V: float
    sigma_V: float
    phi_W: float
    beta_eps_phi_H: float
    grad_mu_H: float
    sup_phi: float
    sup_theta: float
    int_grad_mu_sq: float
    tau_int_dphi_sq: float

    def as_tuple(self) -> tuple[float, ...]:
        return astuple(self)


RECORD_FIELDS = tuple(f.name for f in fields(MonitorRecord))


def free_energy(params: ModelParams, basis: sp.Basis, state: SimState) -> float:
    """Ginzburg-Landau free energy with β̂ replaced by its Moreau envelope.

    Quadratic terms are evaluated exactly from the coefficients; the potential
    term uses the basis quadrature.
    """
    g = basis.eigenvalues
    phi_n = sp.synthesize(basis, state.phi)
    pot = params.potential
    bulk = moreau_envelope(pot, params.yosida, phi_n) + pot.pi_hat(phi_n)
    return float(
        0.5 * np.dot(g * state.phi, state.phi)
        + np.dot(basis.weights, bulk)
        + 0.5 * np.dot(state.sigma, state.sigma)
        - params.chi * np.dot(state.sigma, state.phi)
        - params.Lambda * np.dot(state.theta, state.phi)
    )


class EstimateMonitor:
    """Callable producing a :class:`MonitorRecord` per snapshot.

    Time integrals of ``||∇μ||²`` and ``τ ||∂_t φ||²`` are accumulated with the
    left-endpoint rectangle rule over consecutive calls, so the instance is
    tied to one trajectory.
    """

    def __init__(self, params: ModelParams, basis: sp.Basis):
        self.params = params
        self.basis = basis
        self._prev: tuple[float, float, float] | None = None  # (t, |∇μ|², τ|φ_t|²)
        self._acc = [0.0, 0.0]

    def __call__(self, state: SimState) -> MonitorRecord:
        p, b = self.params, self.basis
        d = assemble_rhs(p, b, state)
        grad_mu_sq = float(np.dot(b.eigenvalues * d.mu, d.mu))
        visc_sq = p.tau * float(np.dot(d.dphi_dt, d.dphi_dt))
        if self._prev is not None:
            t_prev, gm, vs = self._prev
            dt = state.t - t_prev
            self._acc[0] += gm * dt
            self._acc[1] += vs * dt
        self._prev = (state.t, grad_mu_sq, visc_sq)

        theta_n = d.nodes.theta_nodes
        phi_n = d.nodes.phi_nodes
        return MonitorRecord(
            t=float(state.t),
            free_energy=free_energy(p, b, state),
            mean_theta_plus_ell_phi=sp.mean_value(b, state.theta + p.ell * state.phi),
            mean_phi=sp.mean_value(b, state.phi),
            mean_sigma=sp.mean_value(b, state.sigma),
            theta_H=sp.h_norm(state.theta),
            phi_V=sp.v_norm(b, state.phi),
            sigma_V=sp.v_norm(b, state.sigma),
            phi_W=sp.norms(b, state.phi)[2],
            beta_eps_phi_H=float(np.sqrt(np.dot(b.weights, d.nodes.beta_eps_phi**2))),
            grad_mu_H=math.sqrt(grad_mu_sq),
            sup_phi=float(np.max(np.abs(phi_n))),
            sup_theta=float(np.max(np.abs(theta_n))),
            int_grad_mu_sq=self._acc[0],
            tau_int_dphi_sq=self._acc[1],
        )


def _uniform_spacing(times: np.ndarray) -> float:
    if len(times) < 2:
        raise ValueError("need at least two snapshots")
    steps = np.diff(times)
    h = float(steps[0])
    if not np.allclose(steps, h, rtol=1e-9, atol=0.0):
        raise ValueError("snapshot times are not on a uniform grid")
    return h


@dataclass
class BalanceReport:
    """Per-interval residuals ``|Δmean/Δt - source mean at left endpoint|``.

    ``cumulative_theta_ell_phi`` compares ``mean(θ + ℓφ)(t_k)`` against its
    initial value plus the left-endpoint time integral of ``mean(u)``.
    """

    times: np.ndarray
    theta_ell_phi: np.ndarray
    phi: np.ndarray
    sigma: np.ndarray
    cumulative_theta_ell_phi: np.ndarray

    def max(self, law: str) -> float:
        return float(np.max(np.abs(getattr(self, law))))

    def l1(self, law: str) -> float:
        h = self.times[1] - self.times[0]
        return float(np.sum(np.abs(getattr(self, law))) * h)


def balance_report(trajectory: Trajectory) -> BalanceReport:
    p, b = trajectory.params, trajectory.basis
    states = trajectory.states
    h = _uniform_spacing(trajectory.times)
    root = math.sqrt(b.domain.volume)

    m_tl = np.array([(s.theta[0] + p.ell * s.phi[0]) / root for s in states])
    m_phi = np.array([s.phi[0] / root for s in states])
    m_sig = np.array([s.sigma[0] / root for s in states])
    src_u, src_phi, src_sig = [], [], []
    for s in states[:-1]:
        nf = node_fields(p, b, s)
        src_u.append(nf.u[0] / root)
        src_phi.append(nf.S_phi[0] / root)
        src_sig.append((nf.S_sigma[0] - p.lambda_B * s.sigma[0]) / root)
    src_u = np.array(src_u)
    cum = m_tl[1:] - m_tl[0] - np.cumsum(src_u) * h
    return BalanceReport(
        times=trajectory.times[:-1],
        theta_ell_phi=np.diff(m_tl) / h - src_u,
        phi=np.diff(m_phi) / h - np.array(src_phi),
        sigma=np.diff(m_sig) / h - np.array(src_sig),
        cumulative_theta_ell_phi=cum,
    )


@dataclass
class EnergyReport:
    times: np.ndarray
    energy: np.ndarray
    residual: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residual))) if len(self.residual) else 0.0

    @property
    def max_increase(self) -> float:
        """Largest ``F(t_{k+1}) - F(t_k)``; nonpositive when 𝓕 never increases."""
        return float(np.max(np.diff(self.energy))) if len(self.energy) > 1 else 0.0


def _is_decoupled(trajectory: Trajectory) -> bool:
    p, b = trajectory.params, trajectory.basis
    lambdas = (p.lambda_P, p.lambda_A, p.lambda_E, p.lambda_C, p.lambda_B, p.lambda_D)
    if p.chi != 0 or p.Lambda != 0 or any(lam != 0 for lam in lambdas):
        return False
    return all(not np.any(p.u(b.nodes, s.t, b)) for s in trajectory.states)


def energy_identity_residual(params: ModelParams, trajectory: Trajectory) -> EnergyReport:
    """Discrete energy identity in the decoupled, source-free configuration.

    ``r_k = (F_{k+1} - F_k)/Δt + Σ γ_j μ_j² + τ Σ ρ_j² + Σ γ_j σ_j²`` with μ
    and σ at ``t_k`` and ``ρ = (φ_{k+1} - φ_k)/Δt``.  The last sum is the
    nutrient's own diffusive dissipation and vanishes for σ ≡ 0.

    Raises
    ------
    ValueError
        If any coupling, reaction or heat source is active; the identity does
        not hold there.
    """
    if params is not trajectory.params and params != trajectory.params:
        raise ValueError("params do not match the trajectory")
    if not _is_decoupled(trajectory):
        raise ValueError(
            "energy identity only holds with chi = Lambda = 0, all lambda = 0 and u = 0; "
            "use apriori_report for coupled runs"
        )
    b = trajectory.basis
    g = b.eigenvalues
    h = _uniform_spacing(trajectory.times)
    states = trajectory.states
    F = np.array([free_energy(params, b, s) for s in states])
    res = []
    for k in range(len(states) - 1):
        s0, s1 = states[k], states[k + 1]
        mu = assemble_rhs(params, b, s0).mu
        rho = (s1.phi - s0.phi) / h
        diss = np.dot(g * mu, mu) + params.tau * np.dot(rho, rho) + np.dot(g * s0.sigma, s0.sigma)
        res.append((F[k + 1] - F[k]) / h + diss)
    return EnergyReport(trajectory.times, F, np.array(res))


_INTEGRATED = ("int_grad_mu_sq", "tau_int_dphi_sq")
_BALANCE = ("t", "mean_theta_plus_ell_phi", "mean_phi", "mean_sigma")


@dataclass
class AprioriReport:
    """Sup- and L²-in-time summaries of every monitored norm.

    ``flags`` lists the quantities that exceeded ``factor`` times their
    initial-data scale ("unbounded-suspect"), with the first time it happened.
    """

    sup: dict[str, float]
    l2: dict[str, float]
    ceiling: dict[str, float]
    flags: dict[str, float]

    @property
    def flagged(self) -> bool:
        return bool(self.flags)


def apriori_report(trajectory: Trajectory, factor: float = 10.0, floor: float = 1.0) -> AprioriReport:
    """Summarize the monitor records of a trajectory.

    The scale of an instantaneous quantity is ``max(|q(0)|, floor)``.  For the
    accumulated dissipation integrals it is
    ``max(|F(0)|, T * integrand(0), floor)`` with F the free energy.
    """
    recs = trajectory.records
    if not recs:
        raise ValueError("trajectory carries no monitor records")
    table = {name: np.array([getattr(r, name) for r in recs]) for name in RECORD_FIELDS}
    t = table["t"]
    h = float(t[1] - t[0]) if len(t) > 1 else 0.0
    T = float(t[-1] - t[0])
    r0 = recs[0]
    rate0 = {"int_grad_mu_sq": r0.grad_mu_H**2, "tau_int_dphi_sq": 0.0}
    if len(recs) > 1 and h > 0:
        rate0["tau_int_dphi_sq"] = recs[1].tau_int_dphi_sq / h

    sup, l2, ceiling, flags = {}, {}, {}, {}
    for name in RECORD_FIELDS:
        if name in _BALANCE:
            continue
        q = np.abs(table[name])
        sup[name] = float(np.max(q))
        l2[name] = float(np.sqrt(np.sum(q[:-1] ** 2) * h))
        if name in _INTEGRATED:
            scale = max(abs(r0.free_energy), T * rate0[name], floor)
        else:
            scale = max(float(q[0]), floor)
        ceiling[name] = factor * scale
        over = np.flatnonzero(q > ceiling[name])
        if over.size:
            flags[name] = float(t[over[0]])
    return AprioriReport(sup, l2, ceiling, flags)
