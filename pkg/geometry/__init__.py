"""
📐 Geometry Package for spincyl
==============================

Metrics on coordinate charts, their curvature, one-parameter metric families
and the generalized cylinders built from them.
"""

from .chart_tensor import MetricField, christoffel, riemann, ricci, scalar
from .cylinder import MetricFamily, cylinder_curvature, weingarten
from .embedding import EndoField, constant_curvature_family, killing_family, verify_embedding

__all__ = [
    'MetricField',
    'christoffel',
    'riemann',
    'ricci',
    'scalar',
    'MetricFamily',
    'cylinder_curvature',
    'weingarten',
    'EndoField',
    'constant_curvature_family',
    'killing_family',
    'verify_embedding'
]
