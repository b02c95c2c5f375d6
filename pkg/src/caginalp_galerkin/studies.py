"""Refinement and stability studies: Galerkin cutoff n, Yosida parameter ε,
and continuous dependence on the data.

Runs inside one study share a single time step so their snapshot grids
coincide; fields from a larger basis are compared after restriction to the
smaller one.
"""
from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields

import numpy as np

from . import spectral as sp
from .config import RunConfig
from .model import CosineModeSource, SimState
from .stepper import Trajectory, integrate

__all__ = [
    "DiffNorms",
    "DIFF_FIELDS",
    "StudyConfig",
    "StudyRow",
    "difference_norms",
    "run_n_study",
    "run_eps_study",
    "run_contdep_study",
]


@dataclass(frozen=True)
class DiffNorms:
    """Discrete norms of a solution difference and of the matching data difference.

    Sup norms are taken over snapshots; ``L2`` norms in time use the
    left-endpoint rectangle rule.  V and W norms are the equivalent norms
    ``(||∇v||² + mean²)^{1/2}`` and ``(||Δv||² + mean²)^{1/2}``.
    """

    theta_sup_H: float
    theta_L2V: float
    phi_sup_H: float
    phi_L2W: float
    phi_sup_V_tau: float
    sigma_sup_H: float
    sigma_L2V: float
    theta0_H: float
    phi0_H: float
    phi0_V_tau: float
    sigma0_H: float
    u_L2H: float

    @property
    def lhs(self) -> float:
        return (
            self.theta_sup_H + self.theta_L2V + self.phi_sup_H + self.phi_L2W
            + self.phi_sup_V_tau + self.sigma_sup_H + self.sigma_L2V
        )

    @property
    def rhs(self) -> float:
        return self.theta0_H + self.phi0_H + self.phi0_V_tau + self.sigma0_H + self.u_L2H


DIFF_FIELDS = tuple(f.name for f in fields(DiffNorms))


def _aligned(traj: Trajectory, basis: sp.Basis) -> list[SimState]:
    if traj.basis is basis or traj.basis.compatible(basis):
        return traj.states
    return [
        SimState(
            s.t,
            sp.restrict(traj.basis, s.theta, basis),
            sp.restrict(traj.basis, s.phi, basis),
            sp.restrict(traj.basis, s.sigma, basis),
        )
        for s in traj.states
    ]


def difference_norms(trajA: Trajectory, trajB: Trajectory) -> DiffNorms:
    """Norms of ``A - B`` on the common snapshot grid, in the smaller basis."""
    basis = trajA.basis if trajA.basis.n <= trajB.basis.n else trajB.basis
    if trajA.basis.domain != trajB.basis.domain:
        raise ValueError("trajectories live on different domains")
    tA, tB = trajA.times, trajB.times
    if len(tA) != len(tB) or not np.allclose(tA, tB, rtol=0, atol=1e-12 * max(1.0, abs(tA[-1]))):
        raise ValueError("trajectories are not on the same snapshot grid")
    A, B = _aligned(trajA, basis), _aligned(trajB, basis)
    h = float(tA[1] - tA[0]) if len(tA) > 1 else 0.0
    tau = trajA.params.tau

    dth = [a.theta - b.theta for a, b in zip(A, B)]
    dph = [a.phi - b.phi for a, b in zip(A, B)]
    dsg = [a.sigma - b.sigma for a, b in zip(A, B)]

    def sup(vals):
        return float(max(vals))

    def l2(vals):
        v = np.asarray(vals[:-1])
        return float(math.sqrt(np.sum(v * v) * h))

    du = []
    for a in A[:-1]:
        ua = sp.analyze(basis, trajA.params.u(basis.nodes, a.t, basis))
        ub = sp.analyze(basis, trajB.params.u(basis.nodes, a.t, basis))
        du.append(sp.h_norm(ua - ub))
    u_l2 = float(math.sqrt(np.sum(np.square(du)) * h)) if du else 0.0

    return DiffNorms(
        theta_sup_H=sup([sp.h_norm(d) for d in dth]),
        theta_L2V=l2([sp.v_norm(basis, d) for d in dth]),
        phi_sup_H=sup([sp.h_norm(d) for d in dph]),
        phi_L2W=l2([sp.w_norm(basis, d) for d in dph]),
        phi_sup_V_tau=math.sqrt(tau) * sup([sp.v_norm(basis, d) for d in dph]),
        sigma_sup_H=sup([sp.h_norm(d) for d in dsg]),
        sigma_L2V=l2([sp.v_norm(basis, d) for d in dsg]),
        theta0_H=sp.h_norm(dth[0]),
        phi0_H=sp.h_norm(dph[0]),
        phi0_V_tau=math.sqrt(tau) * sp.v_norm(basis, dph[0]),
        sigma0_H=sp.h_norm(dsg[0]),
        u_L2H=u_l2,
    )


@dataclass(frozen=True)
class StudyConfig:
    """A base run plus the parameter list that a study sweeps.

    ``perturb_mode`` is the basis position of the perturbation shape used by
    the continuous-dependence study (1 = lowest nonconstant mode).
    """

    base: RunConfig
    n_list: tuple[int, ...] = ()
    eps_list: tuple[float, ...] = ()
    delta_list: tuple[float, ...] = ()
    targets: tuple[str, ...] = ("theta0", "phi0", "sigma0", "u")
    perturb_mode: int = 1

    @classmethod
    def from_run(cls, cfg: RunConfig) -> "StudyConfig":
        return cls(
            base=cfg,
            n_list=tuple(int(v) for v in cfg.n_list),
            eps_list=tuple(cfg.eps_list),
            delta_list=tuple(cfg.delta_list),
            targets=tuple(cfg.contdep_targets),
        )


@dataclass
class StudyRow:
    """One table row; ``values`` are the swept parameter(s)."""

    values: tuple[float, ...]
    diff: DiffNorms | None
    ratio: float | None = None
    status: str = "ok"

    def as_tuple(self) -> tuple:
        d = astuple(self.diff) if self.diff is not None else (math.nan,) * len(DIFF_FIELDS)
        lhs = self.diff.lhs if self.diff is not None else math.nan
        rhs = self.diff.rhs if self.diff is not None else math.nan
        ratio = math.nan if self.ratio is None else self.ratio
        return (*self.values, *d, lhs, rhs, ratio, self.status)


def _run(cfg: RunConfig, n: int | None = None, eps: float | None = None, dt: float | None = None):
    basis = cfg.basis(n)
    params = cfg.params(eps)
    return integrate(params, basis, cfg.initial_state(basis), cfg.stepper(dt))


def _compare(values, ta: Trajectory, tb: Trajectory) -> StudyRow:
    if not (ta.ok and tb.ok):
        why = ta.failure or tb.failure
        return StudyRow(values, None, status=f"failed: {why}")
    return StudyRow(values, difference_norms(ta, tb))


def run_n_study(cfg: StudyConfig) -> list[StudyRow]:
    """Cauchy differences between consecutive cutoffs, compared in the smaller space."""
    ns = list(cfg.n_list)
    if len(ns) < 2:
        raise ValueError("n study needs at least two cutoffs")
    if any(b < a for a, b in zip(ns, ns[1:])):
        raise ValueError(f"n_list must be nondecreasing, got {ns}")
    runs = {n: _run(cfg.base, n=n) for n in dict.fromkeys(ns)}
    return [_compare((a, b), runs[a], runs[b]) for a, b in zip(ns, ns[1:])]


def run_eps_study(cfg: StudyConfig) -> list[StudyRow]:
    """Cauchy differences between consecutive Yosida parameters.

    The step is locked to ``min(base dt, min(eps_list) / 10)`` for every member.
    """
    eps = list(cfg.eps_list)
    if len(eps) < 2:
        raise ValueError("eps study needs at least two values")
    if any(b > a for a, b in zip(eps, eps[1:])):
        raise ValueError(f"eps_list must be nonincreasing, got {eps}")
    dt = min(cfg.base.dt, min(eps) / 10.0)
    runs = {e: _run(cfg.base, eps=e, dt=dt) for e in dict.fromkeys(eps)}
    return [_compare((a, b), runs[a], runs[b]) for a, b in zip(eps, eps[1:])]


def run_contdep_study(cfg: StudyConfig) -> list[StudyRow]:
    """Perturb the selected data by ``δ e_k`` and report ``LHS / RHS_data`` per δ.

    A zero perturbation gives the exact-zero sentinel ``ratio = 0.0`` with
    status ``"zero"``.
    """
    if any(d < 0 for d in cfg.delta_list):
        raise ValueError("delta_list must be nonnegative")
    base = cfg.base
    basis = base.basis()
    params = base.params()
    s0 = base.initial_state(basis)
    step = base.stepper()
    ref = integrate(params, basis, s0, step)
    e = basis.unit_mode(cfg.perturb_mode)
    rows = []
    for delta in cfg.delta_list:
        p2 = params
        if "u" in cfg.targets:
            p2 = params.with_changes(u=params.u + CosineModeSource(cfg.perturb_mode, delta))
        s2 = SimState(
            s0.t,
            s0.theta + delta * e if "theta0" in cfg.targets else s0.theta,
            s0.phi + delta * e if "phi0" in cfg.targets else s0.phi,
            s0.sigma + delta * e if "sigma0" in cfg.targets else s0.sigma,
        )
        other = integrate(p2, basis, s2, step)
        row = _compare((delta,), other, ref)
        if row.diff is not None:
            rhs = row.diff.rhs
            if rhs == 0.0:
                row.ratio = 0.0
                row.status = "zero"
            else:
                row.ratio = row.diff.lhs / rhs
        rows.append(row)
    return rows
