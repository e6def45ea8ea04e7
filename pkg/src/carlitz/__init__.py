"""Exact computer algebra for positive-characteristic function-field analysis.

The package provides the operator calculus of the Carlitz setting over
F_q(x): Frobenius and Carlitz-derivative actions on F_q-linear functions,
the noncommutative operator ring in normal form, the classical special
polynomial families with their exact identities, place-by-place
valuations, and growth (Gelfand-Kirillov) dimension estimation for the
cyclic modules those functions generate.
"""

from .field import FieldConfig, Fq, FqExt
from .gkdim import (
    FiltrationReport,
    MatrixModuleA1,
    NoStabilization,
    SupportProfile,
    VacuumPreconditionError,
    exact_rank,
    filtration_dims,
    gk_dimension,
    hilbert_fit,
    lemma2_rank_check,
    matrix_module_check,
    module_F_dims,
    probabilistic_rank,
    support_profile,
    vacuum_eigencheck,
)
from .linfun import LinFun, MonomialEscape, SeriesComparison, TruncatedSeries
from .perfect import PerfectField, PerfectPoly, PerfectRational, QExp
from .places import Place, irreducibles, is_irreducible, valuation
from .ring import RingElem, dim_gamma, monomials_up_to, probe_independence, ring_apply, ring_mul
from .special import (
    CarlitzCache,
    PlaceIntegralityReport,
    VandermondeTable,
    binomK,
    bracket_split_check,
    carlitz_e,
    carlitz_f,
    carlitz_module_trunc,
    contiguous_check,
    dfac,
    genfun_binom,
    genfun_hyp,
    kbinom_identity_check,
    lfac,
    pascal_check,
    pde_check_binom,
    place_integrality_sweep,
    pochhammer_neg,
    thakur_hyp,
    vandermonde_check,
    vandermonde_table,
)

__version__ = "0.1.0"

__all__ = [
    "FieldConfig",
    "Fq",
    "FqExt",
    "PerfectField",
    "PerfectPoly",
    "PerfectRational",
    "QExp",
    "Place",
    "irreducibles",
    "is_irreducible",
    "valuation",
    "LinFun",
    "TruncatedSeries",
    "SeriesComparison",
    "MonomialEscape",
    "RingElem",
    "ring_mul",
    "ring_apply",
    "dim_gamma",
    "monomials_up_to",
    "probe_independence",
    "CarlitzCache",
    "dfac",
    "lfac",
    "carlitz_e",
    "carlitz_f",
    "binomK",
    "pascal_check",
    "VandermondeTable",
    "vandermonde_table",
    "vandermonde_check",
    "kbinom_identity_check",
    "pochhammer_neg",
    "thakur_hyp",
    "contiguous_check",
    "carlitz_module_trunc",
    "genfun_binom",
    "genfun_hyp",
    "bracket_split_check",
    "pde_check_binom",
    "PlaceIntegralityReport",
    "place_integrality_sweep",
    "FiltrationReport",
    "NoStabilization",
    "VacuumPreconditionError",
    "exact_rank",
    "probabilistic_rank",
    "filtration_dims",
    "hilbert_fit",
    "gk_dimension",
    "module_F_dims",
    "MatrixModuleA1",
    "matrix_module_check",
    "vacuum_eigencheck",
    "SupportProfile",
    "support_profile",
    "lemma2_rank_check",
    "__version__",
]
