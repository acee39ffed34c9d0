"""Exact symbolic engine for phase-space star products, transition operators and orderings."""

__version__ = "0.1.0"

from .scalars import HBAR, I, ParamScalar, S
from .phasepoly import P, PhasePoly, Q, poisson_bracket, sho_hamiltonian
from .bidiff import BiDiffOp, damped_star, moyal_bracket_op, moyal_star, poisson_op
from .transition import DiffOpSeries, invert, odot, star_T
from .ordering import NCPoly, normal_order, quantize_poly, weyl_dequantize
from .expsym import PlaneWave, moyal_pw
from .localtrans import LocalDiffOp, augmentation, local_star_apply, midpoint_lift
from .parsefmt import GRAMMAR_VERSION, parse, to_text
from .config import RunConfig

__all__ = [
    "__version__", "HBAR", "I", "ParamScalar", "S", "P", "PhasePoly", "Q", "poisson_bracket",
    "sho_hamiltonian", "BiDiffOp", "damped_star", "moyal_bracket_op", "moyal_star", "poisson_op",
    "DiffOpSeries", "invert", "odot", "star_T", "NCPoly", "normal_order", "quantize_poly",
    "weyl_dequantize", "PlaneWave", "moyal_pw", "LocalDiffOp", "augmentation", "local_star_apply",
    "midpoint_lift", "GRAMMAR_VERSION", "parse", "to_text", "RunConfig",
]
