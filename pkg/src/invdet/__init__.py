"""Inverse determinant sums of diagonal number field codes and quaternion order codes."""

from .curves import Sample, SumCurve
from .detsum import inverse_det_sum, normalized_inverse_det_sum, sum_curve, union_bound
from .lattice import MatrixLattice, canonical_embedding_lattice, enumerate_ball, min_determinant_in_ball
from .numberfield import NumberField, catalog_lookup
from .qoalgebra import CyclicAlgebraCode, algebra_lookup, order_lattice

__all__ = [
    "CyclicAlgebraCode",
    "MatrixLattice",
    "NumberField",
    "Sample",
    "SumCurve",
    "algebra_lookup",
    "canonical_embedding_lattice",
    "catalog_lookup",
    "enumerate_ball",
    "inverse_det_sum",
    "min_determinant_in_ball",
    "normalized_inverse_det_sum",
    "order_lattice",
    "sum_curve",
    "union_bound",
]
