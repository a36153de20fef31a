"""
🌀 Spin Package for spincyl
==========================

Spinor fields, the spin connection and Dirac operator on charts, spinor
transport along generalized cylinders and generalized Killing spinors.
"""

from .spin_field import SpinorField, dirac, spin_covariant_derivatives
from .variation import variation_check, energy_momentum
from .killing import killing_cylinder_check

__all__ = [
    'SpinorField',
    'dirac',
    'spin_covariant_derivatives',
    'variation_check',
    'energy_momentum',
    'killing_cylinder_check'
]
