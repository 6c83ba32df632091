"""Exact search for lens spaces that share closed/coclosed p-form spectra."""

__version__ = "0.1.0"

from .numtheory import QShape, UnitSet, classify_shape, cyclotomic, euler_phi, unit_residues
from .polynomial import LaurentPoly
from .chartables import (
    GeneratorChoice,
    InvalidChoiceError,
    PairCountMatrix,
    SubsetSumTable,
    build_subset_sum_table,
    count_matrices_for_shape,
    fold_table,
    pair_count_matrix,
)
from .spectra import MatchReport, SpectralProfile, bracket_poly, build_profile, compare_profiles
from .search import SearchTask, canonicalize, enumerate_choices, run_search

__all__ = [
    "__version__",
    "QShape",
    "UnitSet",
    "classify_shape",
    "cyclotomic",
    "euler_phi",
    "unit_residues",
    "LaurentPoly",
    "GeneratorChoice",
    "InvalidChoiceError",
    "PairCountMatrix",
    "SubsetSumTable",
    "build_subset_sum_table",
    "count_matrices_for_shape",
    "fold_table",
    "pair_count_matrix",
    "MatchReport",
    "SpectralProfile",
    "bracket_poly",
    "build_profile",
    "compare_profiles",
    "SearchTask",
    "canonicalize",
    "enumerate_choices",
    "run_search",
]
