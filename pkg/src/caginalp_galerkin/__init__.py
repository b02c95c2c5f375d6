"""Spectral Faedo-Galerkin simulation of a nonisothermal Cahn-Hilliard tumor-growth
model with a Caginalp temperature coupling, plus the verification harness that
checks its energy, balance and stability properties numerically.
"""
from .spectral import *  # noqa: F401,F403
from .potential import *  # noqa: F401,F403
from .model import *  # noqa: F401,F403
from .stepper import *  # noqa: F401,F403
from .monitor import *  # noqa: F401,F403
from .studies import *  # noqa: F401,F403
from .config import *  # noqa: F401,F403
from .io import *  # noqa: F401,F403
from .cli import cli_main  # noqa: F401

__version__ = "0.1.0"
