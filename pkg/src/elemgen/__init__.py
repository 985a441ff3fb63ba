"""Bounded elementary factorisation of SL_n over F_q[X], n >= 3."""

from .gf import GF, FieldElement
from .polyring import Poly

__version__ = "0.1.0"
