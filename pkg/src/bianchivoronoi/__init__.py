"""Voronoi cell complexes and integral homology for GL2/SL2 over imaginary quadratic orders."""

from .qfield import (
    OrderContext,
    InvalidDiscriminantError,
    NonFundamentalDiscriminantError,
    is_fundamental,
)
from .hermitian import HermitianForm, minimal_vectors, rank_one
from .voronoi import enumerate_perfect_forms
from .cellcomplex import build_complex
from .zhomology import SparseIntMatrix, complex_homology, smith_invariants
from .arith import class_group, cusp_dimension, growth_stats, rohlfs_lower_bound
from .pipeline import compute_record
from .tables import reference_row, reference_rows, render_invariants

__version__ = "0.1.0"

__all__ = [
    "OrderContext",
    "InvalidDiscriminantError",
    "NonFundamentalDiscriminantError",
    "is_fundamental",
    "HermitianForm",
    "minimal_vectors",
    "rank_one",
    "enumerate_perfect_forms",
    "build_complex",
    "SparseIntMatrix",
    "complex_homology",
    "smith_invariants",
    "class_group",
    "cusp_dimension",
    "growth_stats",
    "rohlfs_lower_bound",
    "compute_record",
    "reference_row",
    "reference_rows",
    "render_invariants",
    "__version__",
]
