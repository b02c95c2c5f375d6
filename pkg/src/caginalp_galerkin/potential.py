"""Split double-well potential, its Moreau-Yosida regularization, and the
bounded Lipschitz nonlinearities of the proliferation and absorption terms.

All scalar maps accept floats or ``numpy`` arrays and are applied elementwise.
The regularization parameter ``eps`` lives in :class:`YosidaConfig`, never in
the potential, so one potential serves a whole ε-refinement study.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize

__all__ = [
    "PotentialSpec",
    "YosidaConfig",
    "NonlinearitySpec",
    "PropertyViolation",
    "resolvent",
    "yosida",
    "moreau_envelope",
    "eval_nonlinearities",
    "check_potential",
    "envelope_by_minimization",
]

ScalarMap = Callable[[np.ndarray], np.ndarray]


def _growth_constant(beta_hat: ScalarMap, beta: ScalarMap, lo=-10.0, hi=10.0, samples=2001) -> float:
    """Smallest C with |β| <= C (β̂ + 1) on [lo, hi]: coarse scan, then local refinement."""
    r = np.linspace(lo, hi, samples)
    ratio = np.abs(beta(r)) / (beta_hat(r) + 1.0)
    k = int(np.argmax(ratio))
    a, b = r[max(k - 1, 0)], r[min(k + 1, samples - 1)]
    res = optimize.minimize_scalar(
        lambda s: -abs(float(beta(s))) / (float(beta_hat(s)) + 1.0),
        bounds=(a, b),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(max(ratio[k], -res.fun))


@dataclass(frozen=True)
class PotentialSpec:
    """Convex part ``β̂`` plus Lipschitz-derivative perturbation ``π̂``.

    Use :meth:`preset` for the named potentials or construct directly with
    callables.  ``C_beta`` is computed from a scan of ``[-10, 10]`` when not
    given.
    """

    name: str
    beta_hat: ScalarMap
    beta: ScalarMap
    beta_prime: ScalarMap
    pi_hat: ScalarMap
    pi: ScalarMap
    pi_prime: ScalarMap
    C_pi: float
    C_beta: float | None = None

    def __post_init__(self):
        if self.C_beta is None:
            object.__setattr__(self, "C_beta", _growth_constant(self.beta_hat, self.beta))

    @classmethod
    def preset(cls, name: str = "quartic") -> "PotentialSpec":
        """Named potentials.

        ``quartic``: β̂ = r⁴/4, π̂ = 1/4 - r²/2 (the sum is (r² - 1)²/4).
        ``linear``: β̂ = r²/2, π̂ = 0.
        ``off``: both parts zero.
        """
        if name == "quartic":
            return cls(
                "quartic",
                beta_hat=lambda r: 0.25 * np.asarray(r, dtype=float) ** 4,
                beta=lambda r: np.asarray(r, dtype=float) ** 3,
                beta_prime=lambda r: 3.0 * np.asarray(r, dtype=float) ** 2,
                pi_hat=lambda r: 0.25 - 0.5 * np.asarray(r, dtype=float) ** 2,
                pi=lambda r: -np.asarray(r, dtype=float),
                pi_prime=lambda r: np.full_like(np.asarray(r, dtype=float), -1.0),
                C_pi=1.0,
            )
        if name == "linear":
            return cls(
                "linear",
                beta_hat=lambda r: 0.5 * np.asarray(r, dtype=float) ** 2,
                beta=lambda r: np.asarray(r, dtype=float) * 1.0,
                beta_prime=lambda r: np.ones_like(np.asarray(r, dtype=float)),
                pi_hat=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
                pi=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
                pi_prime=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
                C_pi=0.0,
            )
        if name == "off":
            zero = lambda r: np.zeros_like(np.asarray(r, dtype=float))  # noqa: E731
            return cls("off", zero, zero, zero, zero, zero, zero, C_pi=0.0, C_beta=0.0)
        raise ValueError(f"unknown potential preset {name!r}")

    def f(self, r):
        """Full derivative β + π."""
        return self.beta(r) + self.pi(r)


@dataclass(frozen=True)
class YosidaConfig:
    eps: float = 0.05
    newton_tol: float = 1e-12
    newton_max_iter: int = 100

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"Yosida parameter eps must be positive, got {self.eps}")
        if not (self.newton_tol > 0 and self.newton_max_iter > 0):
            raise ValueError("resolvent tolerances must be positive")


_H_PRESETS = {
    # name: (map, bound, lipschitz)
    "ramp": (lambda r: np.clip(0.5 * (1.0 + r), 0.0, 1.0), 1.0, 0.5),
    "ramp-reversed": (lambda r: np.clip(0.5 * (1.0 - r), 0.0, 1.0), 1.0, 0.5),
    "one": (lambda r: np.ones_like(r), 1.0, 0.0),
    "zero": (lambda r: np.zeros_like(r), 0.0, 0.0),
}
_K_PRESETS = {
    "clamp": (lambda r: np.clip(r, 0.0, 1.0), 1.0, 1.0),
    "one": (lambda r: np.ones_like(r), 1.0, 0.0),
    "zero": (lambda r: np.zeros_like(r), 0.0, 0.0),
}


@dataclass(frozen=True)
class NonlinearitySpec:
    """Preset choice for the bounded Lipschitz maps 𝕙 (of φ) and 𝕜 (of θ).

    The default ``ramp`` orientation is 0 at φ = -1 and 1 at φ = 1;
    ``ramp-reversed`` flips it.
    """

    h_preset: str = "ramp"
    k_preset: str = "clamp"

    def __post_init__(self):
        if self.h_preset not in _H_PRESETS:
            raise ValueError(f"unknown h preset {self.h_preset!r}; choose from {sorted(_H_PRESETS)}")
        if self.k_preset not in _K_PRESETS:
            raise ValueError(f"unknown k preset {self.k_preset!r}; choose from {sorted(_K_PRESETS)}")

    def h(self, r):
        return _H_PRESETS[self.h_preset][0](np.asarray(r, dtype=float))

    def k(self, r):
        return _K_PRESETS[self.k_preset][0](np.asarray(r, dtype=float))

    @property
    def h_bound(self) -> float:
        return _H_PRESETS[self.h_preset][1]

    @property
    def k_bound(self) -> float:
        return _K_PRESETS[self.k_preset][1]

    @property
    def h_lipschitz(self) -> float:
        return _H_PRESETS[self.h_preset][2]

    @property
    def k_lipschitz(self) -> float:
        return _K_PRESETS[self.k_preset][2]


def eval_nonlinearities(spec: NonlinearitySpec, r, which: str):
    if which == "h":
        return spec.h(r)
    if which == "k":
        return spec.k(r)
    raise ValueError(f"which must be 'h' or 'k', got {which!r}")


def resolvent(spec: PotentialSpec, cfg: YosidaConfig, r):
    """Solve ``J + eps β(J) = r`` elementwise.

    Safeguarded Newton on the bracket ``[min(0, r), max(0, r)]``, which holds
    the root because β is nondecreasing with β(0) = 0.  A Newton iterate that
    leaves the bracket is replaced by the bisection point.  The residual
    tolerance is ``newton_tol * max(1, |r|)``.  Non-finite inputs pass through
    unchanged so that blow-up is reported by the caller.
    """
    r_arr = np.asarray(r, dtype=float)
    scalar = r_arr.ndim == 0
    r_arr = np.atleast_1d(r_arr)
    eps = cfg.eps
    J = r_arr / (1.0 + eps * np.maximum(spec.beta_prime(np.zeros_like(r_arr)), 0.0))
    lo = np.minimum(0.0, r_arr)
    hi = np.maximum(0.0, r_arr)
    finite = np.isfinite(r_arr)
    tol = cfg.newton_tol * np.maximum(1.0, np.abs(r_arr))
    J = np.where(finite, J, r_arr)
    active = finite.copy()
    for _ in range(cfg.newton_max_iter):
        g = J[active] + eps * spec.beta(J[active]) - r_arr[active]
        done = np.abs(g) <= tol[active]
        idx = np.flatnonzero(active)
        active[idx[done]] = False
        if not active.any():
            break
        idx, g = idx[~done], g[~done]
        Jc = J[idx]
        # tighten the bracket with the sign of the residual
        lo[idx] = np.where(g < 0, Jc, lo[idx])
        hi[idx] = np.where(g > 0, Jc, hi[idx])
        step = Jc - g / (1.0 + eps * spec.beta_prime(Jc))
        bad = ~np.isfinite(step) | (step < lo[idx]) | (step > hi[idx])
        step = np.where(bad, 0.5 * (lo[idx] + hi[idx]), step)
        stalled = (hi[idx] - lo[idx]) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(Jc))
        J[idx] = step
        active[idx[stalled]] = False
    with np.errstate(invalid="ignore"):
        res = np.abs(J + eps * spec.beta(J) - r_arr)
    fail = finite & (res > tol) & ((hi - lo) > 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(J)))
    if fail.any():
        k = int(np.flatnonzero(fail)[0])
        raise ArithmeticError(f"resolvent failed to converge at r={float(r_arr[k])!r} (residual {res[k]:.3e})")
    return float(J[0]) if scalar else J


def yosida(spec: PotentialSpec, cfg: YosidaConfig, r):
    """Yosida approximation ``β_ε(r) = (r - J_ε(r)) / ε``."""
    return (np.asarray(r, dtype=float) - resolvent(spec, cfg, r)) / cfg.eps


def moreau_envelope(spec: PotentialSpec, cfg: YosidaConfig, r):
    """Moreau envelope ``β̂_ε(r) = (ε/2) β_ε(r)^2 + β̂(J_ε(r))``."""
    J = resolvent(spec, cfg, r)
    b = (np.asarray(r, dtype=float) - J) / cfg.eps
    out = 0.5 * cfg.eps * b * b + spec.beta_hat(J)
    return float(out) if np.ndim(out) == 0 else out


def envelope_by_minimization(spec: PotentialSpec, eps: float, r, iters: int = 200):
    """Evaluate ``min_s |s - r|^2 / (2 eps) + β̂(s)`` by golden-section search.

    Works directly from β̂ and the variational definition; the minimizer lies
    between 0 and r since β̂ is convex with its minimum at 0.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    obj = lambda s: (s - r) ** 2 / (2.0 * eps) + spec.beta_hat(s)  # noqa: E731
    a, b = np.minimum(0.0, r), np.maximum(0.0, r)
    g = (np.sqrt(5.0) - 1.0) / 2.0
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = obj(c), obj(d)
    for _ in range(iters):
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_new = np.where(left, b - g * (b - a), d)
        d_new = np.where(left, c, a + g * (b - a))
        c, d = c_new, d_new
        fc, fd = obj(c), obj(d)
        if np.all(b - a <= 1e-15 * np.maximum(1.0, np.abs(r))):
            break
    cand = np.stack([obj(a), obj(b), fc, fd, obj(np.zeros_like(r)), obj(r)])
    return cand.min(axis=0)


@dataclass(frozen=True)
class PropertyViolation:
    property: str
    worst_violation: float
    arg_at_worst: float


def check_potential(
    spec: PotentialSpec,
    cfg: YosidaConfig,
    sample_range: tuple[float, float] = (-5.0, 5.0),
    samples: int = 10_000,
) -> list[PropertyViolation]:
    """Worst-case violations of the Moreau-Yosida properties on a uniform sample.

    For the inequality rows a value ``<= 0`` means the property holds
    everywhere on the sample.  ``envelope_identity`` is an absolute
    discrepancy, so it is small and nonnegative.  The rows are ``envelope_lower`` (0 <= β̂_ε), ``envelope_upper`` (β̂_ε <= β̂),
    ``monotonicity``, ``lipschitz`` (slopes <= 1/ε), ``growth``
    (|β_ε| <= C_β (β̂_ε + 1)), ``envelope_identity`` (closed form versus the
    minimization definition) and ``resolvent_residual``.
    """
    if samples < 2:
        raise ValueError("check_potential needs at least two samples")
    r = np.linspace(sample_range[0], sample_range[1], samples)
    J = resolvent(spec, cfg, r)
    be = (r - J) / cfg.eps
    env = 0.5 * cfg.eps * be * be + spec.beta_hat(J)
    base = spec.beta_hat(r)

    dr = np.diff(r)
    dbe = np.diff(be)
    mid = 0.5 * (r[1:] + r[:-1])
    scale = np.maximum(1.0, np.abs(r))
    rows = [
        ("envelope_lower", -env, r),
        ("envelope_upper", env - base, r),
        ("monotonicity", -dbe, mid),
        ("lipschitz", np.abs(dbe) - dr / cfg.eps, mid),
        ("growth", np.abs(be) - spec.C_beta * (env + 1.0), r),
        ("envelope_identity", np.abs(env - envelope_by_minimization(spec, cfg.eps, r)), r),
        ("resolvent_residual", np.abs(J + cfg.eps * spec.beta(J) - r) - cfg.newton_tol * scale, r),
    ]
    report = []
    for name, viol, where in rows:
        k = int(np.argmax(viol))
        report.append(PropertyViolation(name, float(viol[k]), float(where[k])))
    return report
