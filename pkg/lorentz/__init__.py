"""
🌌 Lorentz Package for spincyl
=============================

Geodesics in the space of Lorentzian inner products: existence, uniqueness
and construction.
"""

from .lorentz_space import ConnectionVerdict, LorentzProduct, VerdictKind, classify_2d, connecting_geodesic
from .spectral import classify_nd, spectral_split

__all__ = [
    'ConnectionVerdict',
    'LorentzProduct',
    'VerdictKind',
    'classify_2d',
    'connecting_geodesic',
    'classify_nd',
    'spectral_split'
]
