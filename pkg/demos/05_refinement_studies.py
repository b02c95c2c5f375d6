"""
Refinement and stability studies
================================

Cauchy differences in the Galerkin cutoff and in the Yosida parameter, and the
perturbation ratio of the continuous-dependence estimate.
"""

# %%
import math

from caginalp_galerkin.config import Preset, RunConfig
from caginalp_galerkin.studies import StudyConfig, run_contdep_study, run_eps_study, run_n_study

base = RunConfig(
    lengths=(2 * math.pi,),
    n=16,
    t_end=0.25,
    init_phi=Preset("random-band", (4.0, 0.5, 3.0)),
    init_theta=Preset("random-band", (4.0, 0.3, 5.0)),
    init_sigma=Preset("random-band", (4.0, 0.3, 9.0)),
    u=Preset("constant", (0.5,)),
    sigma_B=Preset("constant", (1.0,)),
)

for row in run_n_study(StudyConfig(base, n_list=(4, 8, 16, 32))):
    print(f"n {row.values[0]:>2} vs {row.values[1]:>2}: difference {row.diff.lhs:.3e}")

# %%
for row in run_eps_study(StudyConfig(base, eps_list=(0.2, 0.1, 0.05, 0.025))):
    print(f"eps {row.values[0]:<5} vs {row.values[1]:<5}: difference {row.diff.lhs:.3e}")

# %%
# The ratio stays bounded as the perturbation shrinks.
for row in run_contdep_study(StudyConfig(base, delta_list=(0.0, 1e-1, 1e-2, 1e-3))):
    print(f"delta={row.values[0]:<6} ratio={row.ratio:.4f}  ({row.status})")
