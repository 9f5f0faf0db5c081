"""Bakry-Émery curvature toolkit for weighted linear graphs and their relatives."""

__version__ = "0.1.0"

from .errors import CurvelabError, HypothesisFailed, CdHypothesisFailed
from .graph_core import (
    Affine,
    Constant,
    Exponential,
    LinearGraph,
    LocalFunction,
    MeasureKind,
    Power,
    Support,
    Undecidable,
    WeightModel,
    as_dimension,
    degrees,
    gamma,
    gamma2,
    graph_from_dict,
    graph_to_dict,
    laplacian,
    load_graph,
    normalized_graph,
    physical_graph,
    restrict,
)
from .curvature import (
    LocalCDForm,
    cd_holds,
    cd_holds_normalized,
    cd_oracle_psd,
    curvature_profile,
    find_cd_violation,
    max_continuation,
    ollivier,
    optimal_curvature,
    optimal_curvature_normalized,
    optimal_curvature_psd,
)
from .comparison import DimensionFunction, compare, model_space, p_model
from .global_analysis import (
    build_from_concave,
    classify_volume_growth,
    cutoff_functions,
    exp_family,
    positive_certificate,
    series_tests,
)
from .inequalities import (
    cheeger,
    doubling_constants,
    ellipticity,
    poincare_best_constant,
    sd_product_check,
    spectral_gap,
)
from .symmetric import RootedGraph, cartesian_product, check_weak_symmetry, project, symmetric_tree
