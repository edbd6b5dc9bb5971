"""Rasmussen s-invariants and Sq1 refinements via scanning on the Bar-Natan complex."""

__version__ = "0.1.0"

from .coeff import ring_from_name  # noqa: F401
from .complex import scan  # noqa: F401
from .diagram import mirror_pd, orient_and_sign, parse_dt, parse_pd, scan_order  # noqa: F401
from .sinv import khovanov_table, s_invariant  # noqa: F401
from .sq1 import refine  # noqa: F401
