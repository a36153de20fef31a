"""
🧮 Algebra Package for spincyl
=============================

Clifford algebras of arbitrary signature in exact blade arithmetic and their
complex spinor representations.
"""

from .clifford import (
    CliffordElement,
    Signature,
    adjoint_action,
    geometric_product,
    inner,
    multiplication_table,
    volume_element
)
from .spinor_rep import SpinorRep, build_spinor_rep, hypersurface_restriction, volume_phase

__all__ = [
    'CliffordElement',
    'Signature',
    'adjoint_action',
    'geometric_product',
    'inner',
    'multiplication_table',
    'volume_element',
    'SpinorRep',
    'build_spinor_rep',
    'hypersurface_restriction',
    'volume_phase'
]
