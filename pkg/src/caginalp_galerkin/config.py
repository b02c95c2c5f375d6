"""Run configuration: the ``key = value`` grammar, defaults, and the builders
that turn a configuration into a basis, model parameters and initial state.

Grammar
-------
One ``key = value`` per line, UTF-8.  ``#`` starts a comment, blank lines are
ignored, unknown keys and repeated keys are errors.  Values are integers,
decimals, booleans (``true``/``false``), comma-separated lists, or presets
written ``name`` or ``name:{a, b, ...}`` with numeric parameters.

Random initial data use a 64-bit linear congruential generator::

    x_{k+1} = (6364136223846793005 * x_k + 1442695040888963407) mod 2**64
    U_k = 2 * (x_{k+1} >> 11) / 2**53 - 1

seeded with ``x_0 = seed``, so fixtures are reproducible in any language.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields, replace

import numpy as np

from . import spectral as sp
from .model import HypothesisError, ModelParams, SimState, make_source
from .potential import NonlinearitySpec, PotentialSpec, YosidaConfig
from .stepper import SCHEMES, StepperConfig

__all__ = ["ConfigError", "Preset", "RunConfig", "parse_config", "lcg_uniform", "initial_field"]


class ConfigError(ValueError):
    """Malformed or invalid configuration; ``lineno`` is 1-based when known."""

    def __init__(self, message: str, lineno: int | None = None):
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)
        self.lineno = lineno


@dataclass(frozen=True)
class Preset:
    name: str
    args: tuple[float, ...] = ()

    def __str__(self):
        if not self.args:
            return self.name
        return f"{self.name}:{{{', '.join(_fmt(a) for a in self.args)}}}"


def _fmt(v: float) -> str:
    return repr(int(v)) if float(v).is_integer() and abs(v) < 2**53 else repr(float(v))


_MASK = (1 << 64) - 1


def lcg_uniform(seed: int, count: int) -> np.ndarray:
    """``count`` uniforms in ``[-1, 1)`` from the documented 64-bit LCG."""
    x = int(seed) & _MASK
    out = np.empty(count)
    for i in range(count):
        x = (6364136223846793005 * x + 1442695040888963407) & _MASK
        out[i] = 2.0 * (x >> 11) / 2.0**53 - 1.0
    return out


_INIT_PRESETS = {"zero": 0, "mode": 2, "tanh-bump": 3, "random-band": 3}
_SOURCE_ARITY = {"off": (0,), "constant": (1,), "gauss-bump": (3, 5), "cosine-mode": (2,)}


def initial_field(basis: sp.Basis, preset: Preset) -> np.ndarray:
    """Coefficients of an initial-data preset.

    ``zero``; ``mode:{index, amplitude}`` (index in the basis ordering);
    ``tanh-bump:{center, width, amplitude}`` is
    ``amplitude * tanh(2 (|x - c|² - w²) / w²)``, negative inside the bump;
    ``random-band:{max_mode, amplitude, seed}`` is zero-mean with uniform
    coefficients on all modes whose per-axis indices are ``<= max_mode``,
    drawn in lexicographic multi-index order.
    """
    name, args = preset.name, preset.args
    c = np.zeros(basis.size)
    if name == "zero":
        return c
    if name == "mode":
        j = int(args[0])
        if not 0 <= j < basis.size:
            raise ValueError(f"mode index {j} outside basis of size {basis.size}")
        c[j] = args[1]
        return c
    if name == "tanh-bump":
        center, width, amp = args
        d2 = np.sum((basis.nodes - center) ** 2, axis=1)
        return sp.analyze(basis, amp * np.tanh(2.0 * (d2 - width**2) / width**2))
    if name == "random-band":
        band, amp, seed = int(args[0]), args[1], int(args[2])
        grids = np.meshgrid(*[np.arange(band + 1)] * basis.dim, indexing="ij")
        lex = [tuple(int(v) for v in m) for m in np.stack([g.ravel() for g in grids], axis=1)][1:]
        draws = lcg_uniform(seed, len(lex))
        for mode, val in zip(lex, draws):
            j = basis.mode_index.get(mode)
            if j is not None:
                c[j] = amp * val
        return c
    raise ValueError(f"unknown initial-data preset {name!r}")


@dataclass(frozen=True)
class RunConfig:
    """Machine-readable form of one run; field defaults are the documented defaults."""

    dim: int = 1
    lengths: tuple[float, ...] = (1.0,)
    n: int = 16
    quad_points: int = 0
    quadrature: str = "midpoint"

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
    strict_hypotheses: bool = True

    potential: str = "quartic"
    h: str = "ramp"
    k: str = "clamp"
    eps: float = 0.05
    newton_tol: float = 1e-12
    newton_max_iter: int = 100

    u: Preset = Preset("off")
    sigma_B: Preset = Preset("off")
    M: float = -1.0

    init_theta: Preset = Preset("zero")
    init_phi: Preset = Preset("random-band", (4.0, 0.1, 1.0))
    init_sigma: Preset = Preset("zero")

    scheme: str = "imex1"
    dt: float = 1e-3
    t_end: float = 1.0
    monitor_every: int = 1
    output: str = "run"

    n_list: tuple[float, ...] = ()
    eps_list: tuple[float, ...] = ()
    delta_list: tuple[float, ...] = ()
    contdep_targets: tuple[str, ...] = ("theta0", "phi0", "sigma0", "u")

    # --- builders ---------------------------------------------------------

    def domain(self) -> sp.BoxDomain:
        return sp.BoxDomain(self.lengths)

    def basis(self, n: int | None = None) -> sp.Basis:
        n = self.n if n is None else n
        Q = self.quad_points if self.quad_points > 0 and n == self.n else None
        return sp.build_basis(self.domain(), n, Q, self.quadrature)

    def params(self, eps: float | None = None) -> ModelParams:
        return ModelParams(
            ell=self.ell,
            Lambda=self.Lambda,
            chi=self.chi,
            tau=self.tau,
            lambda_P=self.lambda_P,
            lambda_A=self.lambda_A,
            lambda_E=self.lambda_E,
            lambda_C=self.lambda_C,
            lambda_B=self.lambda_B,
            lambda_D=self.lambda_D,
            potential=PotentialSpec.preset(self.potential),
            nonlin=NonlinearitySpec(self.h, self.k),
            yosida=YosidaConfig(self.eps if eps is None else eps, self.newton_tol, self.newton_max_iter),
            u=make_source(self.u.name, *self.u.args),
            sigma_B=make_source(self.sigma_B.name, *self.sigma_B.args),
            M=None if self.M < 0 else self.M,
            strict=self.strict_hypotheses,
        )

    def initial_state(self, basis: sp.Basis) -> SimState:
        return SimState(
            0.0,
            initial_field(basis, self.init_theta),
            initial_field(basis, self.init_phi),
            initial_field(basis, self.init_sigma),
        )

    def stepper(self, dt: float | None = None) -> StepperConfig:
        return StepperConfig(self.scheme, self.dt if dt is None else dt, self.t_end, self.monitor_every)

    def with_changes(self, **kw) -> "RunConfig":
        return replace(self, **kw)

    def to_text(self) -> str:
        """Serialize to the config grammar; ``parse_config(to_text())`` round-trips."""
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "M" and v < 0:
                continue
            if isinstance(v, bool):
                s = "true" if v else "false"
            elif isinstance(v, tuple):
                if not v:
                    continue
                s = ", ".join(_fmt(x) if isinstance(x, (int, float)) else str(x) for x in v)
            elif isinstance(v, float):
                s = repr(v)
            else:
                s = str(v)
            lines.append(f"{f.name} = {s}")
        return "\n".join(lines) + "\n"


_KIND = {f.name: f.type for f in fields(RunConfig)}
_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$")
_PRESET = re.compile(r"^([A-Za-z][A-Za-z0-9_-]*)\s*(?::\s*\{(.*)\})?$")
_H1_KEYS = {"ell", "Lambda", "chi", "tau", "lambda_P", "lambda_A", "lambda_E", "lambda_C", "lambda_B", "lambda_D"}


def _parse_number(text: str, kind: str, key: str, lineno: int):
    try:
        if kind == "int":
            return int(text)
        return float(text)
    except ValueError:
        raise ConfigError(f"{key} expects {kind}, got {text!r}", lineno) from None


def _parse_preset(text: str, key: str, lineno: int) -> Preset:
    m = _PRESET.match(text)
    if not m:
        raise ConfigError(f"{key} expects a preset 'name' or 'name:{{...}}', got {text!r}", lineno)
    name, body = m.group(1), m.group(2)
    args: tuple[float, ...] = ()
    if body is not None and body.strip():
        try:
            args = tuple(float(a) for a in body.split(","))
        except ValueError:
            raise ConfigError(f"{key}: preset parameters must be numbers, got {{{body}}}", lineno) from None
    if key.startswith("init_"):
        if name not in _INIT_PRESETS:
            raise ConfigError(f"{key}: unknown initial-data preset {name!r}", lineno)
        if len(args) != _INIT_PRESETS[name]:
            hint = " (random presets need an explicit seed)" if name == "random-band" else ""
            raise ConfigError(f"{key}: preset {name!r} takes {_INIT_PRESETS[name]} parameters, got {len(args)}{hint}", lineno)
    else:
        if name not in _SOURCE_ARITY:
            raise ConfigError(f"{key}: unknown source preset {name!r}", lineno)
        if len(args) not in _SOURCE_ARITY[name]:
            raise ConfigError(f"{key}: preset {name!r} takes {_SOURCE_ARITY[name]} parameters, got {len(args)}", lineno)
    return Preset(name, args)


def _parse_value(key: str, text: str, lineno: int):
    kind = _KIND[key]
    if kind == "bool":
        if text.lower() in ("true", "yes", "1"):
            return True
        if text.lower() in ("false", "no", "0"):
            return False
        raise ConfigError(f"{key} expects true/false, got {text!r}", lineno)
    if kind in ("int", "float"):
        return _parse_number(text, kind, key, lineno)
    if kind == "str":
        if not text:
            raise ConfigError(f"{key} needs a value", lineno)
        return text
    if kind == "Preset":
        return _parse_preset(text, key, lineno)
    if kind == "tuple[float, ...]":
        return tuple(_parse_number(p.strip(), "float", key, lineno) for p in text.split(",") if p.strip())
    if kind == "tuple[str, ...]":
        return tuple(p.strip() for p in text.split(",") if p.strip())
    raise AssertionError(kind)


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text.

    Raises
    ------
    ConfigError
        With the offending line number.  Violations of the standing
        hypotheses name the hypothesis, e.g. ``(H1)`` for ``chi <= 0``.
    """
    values: dict = {}
    where: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, val = m.group(1), m.group(2)
        if key not in _KIND:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (first set on line {where[key]})", lineno)
        values[key] = _parse_value(key, val, lineno)
        where[key] = lineno

    dim = values.get("dim", 1)
    if dim not in (1, 2):
        raise ConfigError(f"dim must be 1 or 2, got {dim}", where.get("dim"))
    if "lengths" in values:
        if len(values["lengths"]) != dim:
            raise ConfigError(f"lengths has {len(values['lengths'])} entries for dim = {dim}", where["lengths"])
    else:
        values["lengths"] = (1.0,) * dim
    if "M" in values and values["M"] < 0:
        raise ConfigError(f"(H2) requires a nonnegative bound M, got {values['M']}", where["M"])
    for key in ("scheme",):
        if key in values and values[key] not in SCHEMES:
            raise ConfigError(f"unknown scheme {values[key]!r}", where[key])
    unknown = set(values.get("contdep_targets", ())) - {"theta0", "phi0", "sigma0", "u"}
    if unknown:
        raise ConfigError(f"unknown contdep targets {sorted(unknown)}", where["contdep_targets"])

    cfg = RunConfig(**values)
    strict = cfg.strict_hypotheses
    for key in sorted(_H1_KEYS, key=lambda k: where.get(k, 0)):
        v = getattr(cfg, key)
        positive = key in ("ell", "Lambda", "chi")
        if not math.isfinite(v) or v < 0 or (positive and strict and v == 0):
            need = "a positive constant" if positive else "a nonnegative constant"
            raise ConfigError(f"{key} = {v!r} violates (H1): {key} must be {need}", where.get(key))
    try:
        cfg.params()
        cfg.stepper()
        cfg.basis()
    except HypothesisError as exc:
        raise ConfigError(str(exc)) from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg
