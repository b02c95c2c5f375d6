"""CSV emission and the plain-text checkpoint format.

All floats are written with 17 significant digits (``%.17g``), enough to
round-trip an IEEE double exactly.  Line endings are LF.

Checkpoint layout::

    CAGINALP-CHECKPOINT 1
    dim <d>
    lengths <L1> [<L2>]
    n <n>
    t <t>
    eps <eps>
    modes <M>
    <i1> [<i2>] <theta_j> <phi_j> <sigma_j>      # M lines, basis order
"""
from __future__ import annotations

import csv
import io as _io
from typing import Iterable, Sequence

import numpy as np

from . import spectral as sp
from .model import SimState
from .monitor import RECORD_FIELDS, MonitorRecord
from .potential import PropertyViolation
from .studies import DIFF_FIELDS, StudyRow

__all__ = [
    "CheckpointError",
    "fmt",
    "write_timeseries",
    "read_timeseries",
    "save_checkpoint",
    "load_checkpoint",
    "write_study",
    "write_potential_report",
]

MAGIC = "CAGINALP-CHECKPOINT 1"


class CheckpointError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)
        self.lineno = lineno


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    return f"{float(x):.17g}"


def _csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def write_timeseries(records: Sequence[MonitorRecord]) -> str:
    """CSV document with one column per :class:`MonitorRecord` field."""
    if not records:
        raise ValueError("no monitor records to write")
    return _csv(RECORD_FIELDS, (r.as_tuple() for r in records))


def read_timeseries(text: str) -> list[MonitorRecord]:
    reader = csv.reader(_io.StringIO(text))
    header = next(reader)
    if tuple(header) != RECORD_FIELDS:
        raise ValueError(f"unexpected time-series header {header}")
    return [MonitorRecord(*(float(v) for v in row)) for row in reader]


def write_study(kind: str, rows: Sequence[StudyRow]) -> str:
    """Study table: swept parameter(s), every DiffNorms field, lhs, rhs, ratio, status."""
    params = {"n": ("n_a", "n_b"), "eps": ("eps_a", "eps_b"), "contdep": ("delta",)}[kind]
    header = (*params, *DIFF_FIELDS, "lhs", "rhs", "ratio", "status")
    return _csv(header, (r.as_tuple() for r in rows))


def write_potential_report(report: Sequence[PropertyViolation]) -> str:
    return _csv(("property", "worst_violation", "arg_at_worst"), ((r.property, r.worst_violation, r.arg_at_worst) for r in report))


def save_checkpoint(basis: sp.Basis, state: SimState, eps: float) -> str:
    lines = [
        MAGIC,
        f"dim {basis.dim}",
        "lengths " + " ".join(fmt(L) for L in basis.domain.lengths),
        f"n {basis.n}",
        f"t {fmt(state.t)}",
        f"eps {fmt(eps)}",
        f"modes {basis.size}",
    ]
    for j, m in enumerate(basis.modes):
        idx = " ".join(str(int(i)) for i in m)
        lines.append(f"{idx} {fmt(state.theta[j])} {fmt(state.phi[j])} {fmt(state.sigma[j])}")
    return "\n".join(lines) + "\n"


def _header(lines: list[str], lineno: int, key: str) -> list[str]:
    if lineno > len(lines):
        raise CheckpointError(f"truncated checkpoint: missing '{key}' header", lineno)
    parts = lines[lineno - 1].split()
    if not parts or parts[0] != key:
        raise CheckpointError(f"expected '{key}' header, got {lines[lineno - 1]!r}", lineno)
    return parts[1:]


def load_checkpoint(text: str, basis: sp.Basis) -> tuple[SimState, float]:
    """Parse a checkpoint and validate it against ``basis``; returns ``(state, eps)``.

    Raises
    ------
    CheckpointError
        On a malformed or truncated document (with the line number) or when the
        header does not match the active basis.
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != MAGIC:
        raise CheckpointError(f"not a checkpoint (expected {MAGIC!r})", 1)
    try:
        dim = int(_header(lines, 2, "dim")[0])
        lengths = tuple(float(v) for v in _header(lines, 3, "lengths"))
        n = int(_header(lines, 4, "n")[0])
        t = float(_header(lines, 5, "t")[0])
        eps = float(_header(lines, 6, "eps")[0])
        count = int(_header(lines, 7, "modes")[0])
    except (IndexError, ValueError) as exc:
        if isinstance(exc, CheckpointError):
            raise
        raise CheckpointError(f"malformed header: {exc}") from exc
    if dim != basis.dim or lengths != basis.domain.lengths or n != basis.n or count != basis.size:
        raise CheckpointError(
            f"checkpoint header (dim={dim}, lengths={lengths}, n={n}, modes={count}) does not match the active "
            f"basis (dim={basis.dim}, lengths={basis.domain.lengths}, n={basis.n}, modes={basis.size})"
        )
    body = lines[7:]
    if len(body) != count:
        raise CheckpointError(f"truncated checkpoint: expected {count} mode lines, found {len(body)}", 8 + len(body))
    coeffs = np.empty((3, count))
    for j, line in enumerate(body):
        lineno = 8 + j
        parts = line.split()
        if len(parts) != dim + 3:
            raise CheckpointError(f"expected {dim + 3} fields, got {len(parts)}", lineno)
        try:
            idx = tuple(int(v) for v in parts[:dim])
            vals = [float(v) for v in parts[dim:]]
        except ValueError:
            raise CheckpointError(f"malformed mode line {line!r}", lineno) from None
        if idx != tuple(int(i) for i in basis.modes[j]):
            raise CheckpointError(f"mode {idx} out of order; basis expects {tuple(basis.modes[j])}", lineno)
        coeffs[:, j] = vals
    return SimState(t, coeffs[0], coeffs[1], coeffs[2]), eps
