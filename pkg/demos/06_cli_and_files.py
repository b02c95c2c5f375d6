"""
Configuration files, the command line and checkpoints
=====================================================

Write a config, run it through the CLI, then reload the final checkpoint and
the time series.
"""

# %%
import tempfile
from pathlib import Path

from caginalp_galerkin.cli import cli_main
from caginalp_galerkin.config import parse_config
from caginalp_galerkin.io import load_checkpoint, read_timeseries

work = Path(tempfile.mkdtemp())
config = work / "pulse.cfg"
config.write_text(
    "# a short coupled run\n"
    "n = 16\n"
    "t_end = 0.1\n"
    "dt = 1e-3\n"
    "monitor_every = 10\n"
    "init_phi = tanh-bump:{0.5, 0.2, 0.9}\n"
    "u = gauss-bump:{1.0, 0.5, 0.1}\n"
)
code = cli_main(["simulate", "--config", str(config), "--out", str(work / "pulse")])
print("exit code:", code)
print(sorted(p.name for p in work.iterdir()))

# %%
records = read_timeseries((work / "pulse.timeseries.csv").read_text())
print("records:", len(records), " final free energy:", records[-1].free_energy)

cfg = parse_config(config.read_text())
state, eps = load_checkpoint((work / "pulse.final.ckpt").read_text(), cfg.basis())
print("checkpoint time:", state.t, " eps:", eps, " first phi coefficients:", state.phi[:3])

# %%
# A hypothesis violation is a configuration error (exit code 1).
bad = work / "bad.cfg"
bad.write_text("chi = -0.5\n")
print("exit code:", cli_main(["simulate", "--config", str(bad), "--out", str(work / "bad")]))
