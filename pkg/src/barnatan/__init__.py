"""Bar-Natan homology over F2[h]: h-torsion unknotting bounds and chain maps."""

from . import errors
from .polymat import MonomialMatrix, SnfResult, smith_normal_form

__all__ = [
    "errors",
    "MonomialMatrix",
    "SnfResult",
    "smith_normal_form",
]
