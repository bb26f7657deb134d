"""Model checking, satisfiability search and bisimulation tools for modal
independence logic and modal logics with generalized dependence atoms."""

from .formula import parse, render
from .kripke import KripkeModel
from .checker import CheckConfig, check, check_with_certificate

__all__ = ["parse", "render", "KripkeModel", "CheckConfig", "check", "check_with_certificate"]
__version__ = "0.1.0"
