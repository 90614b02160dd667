"""GLIDE: causal graph discovery via effect-cause distributional invariance.

The pipeline recovers a DAG from observational categorical data by perturbing
the marginals of a basis of source-like variables through downsampling, then
choosing, for each variable, the candidate parent set whose conditional
distribution stays invariant across the perturbed environments.
"""

__version__ = "0.1.0"

from .augment import (EnvironmentSet, Prior, boundary_priors, downsample_once,
                      gamma_of, make_environments, sample_priors,
                      select_representative)
from .basis import dependence_matrix, find_basis
from .blanket import (BlanketMap, all_markov_blankets, blanket_map,
                      grow_shrink_mb, remove_spouses)
from .data import (CategoricalModel, Cpt, Dataset, discretize,
                   empirical_conditional, empirical_marginal, load_csv,
                   save_csv, simulate_categorical, simulate_linear_gaussian,
                   simulate_nonlinear)
from .errors import GlideError
from .graphs import (BiGraph, Dag, d_separated, degeneracy, gen_random_bigraph,
                     gen_random_dag, sources, true_markov_blanket)
from .indep import DataSource, OracleSource
from .invariance import (GlideConfig, InvarianceScore, glide, invariance_score,
                         oracle_invariance_score, select_parents,
                         theorem_qualifying_nodes)
from .metrics import MetricReport, metric_report, shd, spurious_rate, tpr
from .parents import (bron_kerbosch_reference, build_bigraph, maximal_cliques,
                      plausible_parent_sets)

__all__ = [
    "__version__", "GlideError",
    "Dag", "BiGraph", "d_separated", "sources", "true_markov_blanket",
    "degeneracy", "gen_random_dag", "gen_random_bigraph",
    "Dataset", "Cpt", "CategoricalModel", "discretize",
    "empirical_marginal", "empirical_conditional",
    "simulate_categorical", "simulate_linear_gaussian", "simulate_nonlinear",
    "load_csv", "save_csv",
    "OracleSource", "DataSource",
    "dependence_matrix", "find_basis",
    "Prior", "EnvironmentSet", "gamma_of", "boundary_priors", "sample_priors",
    "select_representative", "downsample_once", "make_environments",
    "BlanketMap", "grow_shrink_mb", "all_markov_blankets", "remove_spouses",
    "blanket_map",
    "build_bigraph", "maximal_cliques", "plausible_parent_sets",
    "bron_kerbosch_reference",
    "GlideConfig", "InvarianceScore", "invariance_score",
    "oracle_invariance_score", "select_parents", "glide",
    "theorem_qualifying_nodes",
    "MetricReport", "shd", "spurious_rate", "tpr", "metric_report",
]
