"""Fixed-step time integration of the coefficient system.

``imex1`` is first order: the stiff diagonal terms (the bilaplacian in the
phase equation, diffusion and uptake in the temperature and nutrient
equations) are implicit scalar divisions, everything else is explicit at
``t_k``.  Updates run in the order φ → θ → σ, and the nutrient update uses the
new φ in its cross-diffusion term.  ``rk4`` is the classical explicit
four-stage method on :func:`~caginalp_galerkin.model.assemble_rhs` and serves
as the reference integrator.

Explicit treatment of β_ε makes ``imex1`` stable only for roughly
``dt <= ε``; :func:`integrate` warns when that is exceeded.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import spectral as sp
from .model import BlowUpError, ModelParams, SimState, assemble_rhs, node_fields

__all__ = ["StepperConfig", "Trajectory", "step_imex", "step_rk4", "integrate", "SCHEMES"]


@dataclass(frozen=True)
class StepperConfig:
    scheme: str = "imex1"
    dt: float = 1e-3
    t_end: float = 1.0
    monitor_every: int = 1

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {sorted(SCHEMES)}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not (self.t_end >= 0 and math.isfinite(self.t_end)):
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        if int(self.monitor_every) != self.monitor_every or self.monitor_every < 1:
            raise ValueError(f"monitor_every must be a positive integer, got {self.monitor_every}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass
class Trajectory:
    """Snapshots at the monitor cadence plus monitor records.

    ``status`` is ``"ok"`` or ``"blowup"``; on blow-up the snapshots stop at
    the last finite state and ``failure`` carries the diagnostic.  ``final``
    is the last finite state reached, whether or not it fell on the cadence.
    """

    params: ModelParams
    basis: sp.Basis
    config: StepperConfig
    states: list[SimState] = field(default_factory=list)
    records: list = field(default_factory=list)
    status: str = "ok"
    failure: str | None = None
    final: SimState | None = None

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def snapshot_dt(self) -> float:
        return self.config.dt * self.config.monitor_every

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _check_output(state: SimState) -> SimState:
    for name in ("phi", "theta", "sigma"):
        arr = getattr(state, name)
        bad = ~np.isfinite(arr)
        if bad.any():
            j = int(np.flatnonzero(bad)[0])
            raise BlowUpError(f"non-finite {name} coefficient in mode {j} at t={state.t!r}", t=state.t, mode=j, field=name)
    return state


def step_imex(params: ModelParams, basis: sp.Basis, state: SimState, dt: float) -> SimState:
    """One first-order IMEX step with diagonal implicit solves."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    p = params
    g = basis.eigenvalues
    nf = node_fields(params, basis, state)
    visc = 1.0 + p.tau * g

    explicit = (nf.S_phi - g * nf.w + p.chi * g * state.sigma + p.Lambda * g * state.theta) / visc
    phi_new = (state.phi + dt * explicit) / (1.0 + dt * g * g / visc)
    rho = (phi_new - state.phi) / dt
    theta_new = (state.theta + dt * (nf.u - p.ell * rho)) / (1.0 + dt * g)
    sigma_new = (state.sigma + dt * (p.chi * g * phi_new + nf.S_sigma)) / (1.0 + dt * (g + p.lambda_B))
    return _check_output(SimState(state.t + dt, theta_new, phi_new, sigma_new))


def _rates(params, basis, t, y):
    d = assemble_rhs(params, basis, SimState.unpack(t, y))
    return np.concatenate([d.dtheta_dt, d.dphi_dt, d.dsigma_dt])


def step_rk4(params: ModelParams, basis: sp.Basis, state: SimState, dt: float) -> SimState:
    """One classical fourth-order Runge-Kutta step."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    t, y = state.t, state.pack()
    k1 = _rates(params, basis, t, y)
    k2 = _rates(params, basis, t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = _rates(params, basis, t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = _rates(params, basis, t + dt, y + dt * k3)
    y_new = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return _check_output(SimState.unpack(t + dt, y_new))


SCHEMES: dict[str, Callable] = {"imex1": step_imex, "rk4": step_rk4}


def _store(traj: Trajectory, state: SimState, monitor) -> None:
    # the record is computed first so states and records stay the same length
    if monitor is not None:
        rec = monitor(state)
        traj.records.append(rec)
    traj.states.append(state)


def integrate(
    params: ModelParams,
    basis: sp.Basis,
    state0: SimState,
    cfg: StepperConfig,
    monitor: Callable[[SimState], object] | None = None,
) -> Trajectory:
    """Advance ``state0`` to ``t_end`` with a fixed step.

    Step ``k`` lands at ``t0 + k dt`` exactly (no accumulated sums).  The
    monitor, if given, is called on every stored snapshot, including the
    initial one.  Blow-up (any ``ArithmeticError``) does not raise: the partial trajectory is returned
    with ``status == "blowup"``.
    """
    if state0.phi.shape != (basis.size,):
        raise ValueError("initial state does not match the basis")
    if cfg.scheme == "imex1" and cfg.dt > params.yosida.eps:
        warnings.warn(
            f"dt={cfg.dt} exceeds eps={params.yosida.eps}; the explicit Yosida term may be unstable",
            RuntimeWarning,
            stacklevel=2,
        )
    step = SCHEMES[cfg.scheme]
    traj = Trajectory(params, basis, cfg)
    t0 = state0.t
    state = state0
    traj.final = state0
    try:
        _store(traj, state, monitor)
        for k in range(1, cfg.n_steps + 1):
            nxt = step(params, basis, state, cfg.dt)
            state = SimState(t0 + k * cfg.dt, nxt.theta, nxt.phi, nxt.sigma)
            traj.final = state
            if k % cfg.monitor_every == 0:
                _store(traj, state, monitor)
    except ArithmeticError as exc:
        # BlowUpError, a resolvent that cannot converge, or a float overflow
        traj.status = "blowup"
        traj.failure = str(exc)
    return traj
