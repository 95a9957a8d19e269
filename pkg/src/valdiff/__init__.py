"""Fixed-precision algebra for valued difference fields.

Backends are truncated Witt vectors over finite-field towers and Hahn
series with window width N over F_q or Q(s) with the shift. On top of them
sit sigma-polynomials, a Newton-Hensel root finder and pc-sequence
refinement.
"""

from .errors import *  # noqa: F401,F403
from .residue_fields import FiniteFieldTower, FqElement, RationalShiftField, RatShiftElement, fq_generator
from .witt_vectors import WittRing, WittVector, witt_from_integer, teichmuller, del_components, d_transform
from .hahn_series import HahnRing, HahnSeries
from .sigma_polynomials import MultiIndex, SigmaPolynomial, evaluate, taylor_coefficient, complexity
from .sigma_hensel import hensel_configuration, is_sigma_henselian_at, newton_step, rescale, solve
from .pseudo_convergence import (PcSequence, check_pc, equivalent, pseudolimit_check, refine,
                                 refine_and_solve, refine_basic, refine_witt, width_threshold)
from .expressions import parse, parse_element, parse_polynomial, to_text

__version__ = "0.1.0"
