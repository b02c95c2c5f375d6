import math

import numpy as np
import pytest

from caginalp_galerkin import spectral as sp
from caginalp_galerkin.model import ConstantSource, GaussBumpSource, ModelParams, SimState, assemble_rhs
from caginalp_galerkin.monitor import (
    RECORD_FIELDS,
    EstimateMonitor,
    apriori_report,
    balance_report,
    energy_identity_residual,
    free_energy,
)
from caginalp_galerkin.potential import PotentialSpec, YosidaConfig, moreau_envelope
from caginalp_galerkin.stepper import StepperConfig, integrate

NO_REACTIONS = dict(lambda_P=0.0, lambda_A=0.0, lambda_E=0.0, lambda_C=0.0, lambda_B=0.0, lambda_D=0.0)
DECOUPLED = dict(chi=0.0, Lambda=0.0, strict=False, **NO_REACTIONS)


def basis1d(n=8, L=1.0, **kw):
    return sp.build_basis(sp.BoxDomain((L,)), n, **kw)


def smooth_state(b, seed, scale=0.3):
    rng = np.random.default_rng(seed)
    decay = 1.0 / (1.0 + np.arange(b.size)) ** 3
    root = math.sqrt(b.domain.volume)
    theta = scale * decay * rng.uniform(-1, 1, b.size)
    theta[0] += 0.4 * root
    sigma = scale * decay * rng.uniform(-1, 1, b.size)
    sigma[0] += 0.3 * root
    return SimState(0.0, theta, scale * decay * rng.uniform(-1, 1, b.size), sigma)


# --- free energy -----------------------------------------------------------


def test_free_energy_zero_state_quartic():
    for L in (1.0, 2.5):
        b = basis1d(4, L)
        z = np.zeros(b.size)
        assert free_energy(ModelParams(), b, SimState(0.0, z, z, z)) == pytest.approx(L / 4, rel=1e-14)


def test_free_energy_single_mode_without_potential():
    b = basis1d(4)
    p = ModelParams(potential=PotentialSpec.preset("off"))
    z = np.zeros(b.size)
    assert free_energy(p, b, SimState(0.0, z, b.unit_mode(1), z)) == pytest.approx(math.pi**2 / 2, rel=1e-14)


def test_free_energy_pure_phase_sits_in_envelope_gap():
    b = basis1d(4, 2.0)
    p = ModelParams(yosida=YosidaConfig(eps=0.05))
    z = np.zeros(b.size)
    phi = math.sqrt(2.0) * b.unit_mode(0)
    gap = 0.25 - float(moreau_envelope(p.potential, p.yosida, 1.0))
    F = free_energy(p, b, SimState(0.0, z, phi, z))
    assert F == pytest.approx(-2.0 * gap, abs=1e-12)
    assert -2.0 * 0.25 < F <= 0.0


def test_free_energy_coupling_terms():
    b = basis1d(4)
    p = ModelParams(potential=PotentialSpec.preset("off"), chi=2.0, Lambda=3.0)
    e0, e1 = b.unit_mode(0), b.unit_mode(1)
    F = free_energy(p, b, SimState(0.0, e1, e1, e0 + e1))
    # 1/2 γ1 + 1/2 |σ|² - χ (σ, φ) - Λ (θ, φ)
    assert F == pytest.approx(math.pi**2 / 2 + 1.0 - 2.0 - 3.0, rel=1e-13)


def test_free_energy_quadrature_refinement():
    coarse, fine = basis1d(8, 2.0), basis1d(8, 2.0, Q=400)
    s = smooth_state(coarse, 1)
    p = ModelParams()
    assert abs(free_energy(p, coarse, s) - free_energy(p, fine, s)) < 1e-8


# --- monitor records -------------------------------------------------------


def test_record_layout_and_values():
    b = basis1d(6)
    p = ModelParams(potential=PotentialSpec.preset("off"), tau=0.0, **DECOUPLED)
    z = np.zeros(b.size)
    rec = EstimateMonitor(p, b)(SimState(0.0, z, b.unit_mode(1), z))
    assert RECORD_FIELDS[0] == "t" and len(RECORD_FIELDS) == len(rec.as_tuple()) == 15
    assert rec.grad_mu_H == pytest.approx(math.pi**3, rel=1e-12)
    assert rec.phi_W == pytest.approx(math.pi**2, rel=1e-14)
    # sup is taken over the quadrature nodes, the first of which sits at L/(2Q)
    assert rec.sup_phi == pytest.approx(math.sqrt(2.0) * math.cos(math.pi / (2 * 28)), rel=1e-14)
    assert rec.mean_phi == 0.0 and rec.int_grad_mu_sq == 0.0


def test_monitor_accumulates_left_rectangle():
    b = basis1d(8)
    p = ModelParams(u=ConstantSource(0.2), sigma_B=ConstantSource(0.4))
    traj = integrate(p, b, smooth_state(b, 2), StepperConfig(dt=1e-3, t_end=0.02, monitor_every=2), EstimateMonitor(p, b))
    h = traj.snapshot_dt
    g2 = np.array([r.grad_mu_H**2 for r in traj.records])
    acc = np.array([r.int_grad_mu_sq for r in traj.records])
    np.testing.assert_allclose(acc[1:], np.cumsum(g2[:-1]) * h, rtol=1e-12)
    for s, r in zip(traj.states, traj.records):
        assert r.t == s.t
        assert r.mean_sigma == sp.mean_value(b, s.sigma)


# --- balance laws ----------------------------------------------------------


def _coupled_run(dt, t_end=0.1):
    b = basis1d(8, 2.0)
    p = ModelParams(u=GaussBumpSource(0.6, 1.0, 0.2), sigma_B=ConstantSource(0.5))
    return integrate(p, b, smooth_state(b, 3), StepperConfig(dt=dt, t_end=t_end))


def test_imex_preserves_linear_balances_to_rounding():
    rep = balance_report(_coupled_run(1e-3))
    assert rep.max("theta_ell_phi") < 1e-10
    assert rep.max("phi") < 1e-10
    assert np.abs(rep.cumulative_theta_ell_phi).max() < 1e-12


def test_nutrient_balance_is_first_order():
    a = balance_report(_coupled_run(2e-3)).max("sigma")
    c = balance_report(_coupled_run(1e-3)).max("sigma")
    assert 1.7 <= a / c <= 2.3


def test_balance_needs_uniform_grid():
    traj = _coupled_run(1e-2, t_end=0.0)
    with pytest.raises(ValueError):
        balance_report(traj)


# --- energy identity -------------------------------------------------------


def test_energy_identity_refused_on_coupled_run():
    traj = _coupled_run(1e-2, t_end=0.05)
    with pytest.raises(ValueError, match="apriori_report"):
        energy_identity_residual(traj.params, traj)


def test_energy_identity_rejects_foreign_params():
    b = basis1d(4)
    p = ModelParams(**DECOUPLED)
    z = np.zeros(b.size)
    traj = integrate(p, b, SimState(0.0, z, z, z), StepperConfig(dt=1e-2, t_end=0.05))
    with pytest.raises(ValueError):
        energy_identity_residual(ModelParams(**DECOUPLED, tau=0.5), traj)


def test_energy_identity_zero_at_equilibrium():
    b = basis1d(4)
    p = ModelParams(**DECOUPLED)
    z = np.zeros(b.size)
    rep = energy_identity_residual(p, integrate(p, b, SimState(0.0, z, z, z), StepperConfig(dt=1e-2, t_end=0.05)))
    assert rep.max_residual == 0.0 and rep.max_increase == 0.0


def test_energy_identity_matches_hand_computation():
    b = basis1d(6, 2 * math.pi)
    p = ModelParams(**DECOUPLED)
    s = smooth_state(b, 4)
    traj = integrate(p, b, s, StepperConfig(dt=1e-3, t_end=2e-3))
    rep = energy_identity_residual(p, traj)
    s0, s1 = traj.states[:2]
    mu = assemble_rhs(p, b, s0).mu
    g = b.eigenvalues
    rho = (s1.phi - s0.phi) / 1e-3
    expected = (free_energy(p, b, s1) - free_energy(p, b, s0)) / 1e-3 + g @ mu**2 + p.tau * rho @ rho + g @ s0.sigma**2
    assert rep.residual[0] == pytest.approx(expected, rel=1e-12, abs=1e-14)


# --- a priori summaries ----------------------------------------------------


def test_apriori_zero_run_has_no_flags():
    b = basis1d(4)
    p = ModelParams(**NO_REACTIONS)
    z = np.zeros(b.size)
    traj = integrate(p, b, SimState(0.0, z, z, z), StepperConfig(dt=1e-2, t_end=0.1), EstimateMonitor(p, b))
    rep = apriori_report(traj)
    assert not rep.flagged
    assert rep.sup["phi_V"] == 0.0 and rep.l2["theta_H"] == 0.0
    assert rep.sup["free_energy"] == pytest.approx(0.25)
    assert set(rep.sup) == set(RECORD_FIELDS) - {"t", "mean_theta_plus_ell_phi", "mean_phi", "mean_sigma"}


def test_apriori_bounded_run_has_no_flags():
    b = basis1d(8, 2.0)
    p = ModelParams(u=GaussBumpSource(0.6, 1.0, 0.2), sigma_B=ConstantSource(0.5))
    traj = integrate(p, b, smooth_state(b, 3), StepperConfig(dt=1e-3, t_end=0.2, monitor_every=10), EstimateMonitor(p, b))
    assert not apriori_report(traj).flagged


def test_apriori_flags_growth():
    b = basis1d(8)
    p = ModelParams(u=ConstantSource(50.0), M=100.0, **NO_REACTIONS)
    z = np.zeros(b.size)
    traj = integrate(p, b, SimState(0.0, z, z, z), StepperConfig(dt=1e-2, t_end=1.0, monitor_every=5), EstimateMonitor(p, b))
    rep = apriori_report(traj)
    assert "theta_H" in rep.flags
    assert 0.0 < rep.flags["theta_H"] <= 1.0


def test_apriori_needs_records():
    b = basis1d(4)
    z = np.zeros(b.size)
    with pytest.raises(ValueError):
        apriori_report(integrate(ModelParams(), b, SimState(0.0, z, z, z), StepperConfig(dt=1e-2, t_end=0.02)))
