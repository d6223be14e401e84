"""Bayesian mark interaction modeling for multi-type spatial point patterns.

The model places a Gibbs measure on the marks of a point pattern: each
mark category has a first-order intensity, each unordered category pair a
symmetric second-order intensity, and pair contributions decay
exponentially with distance within a cutoff neighborhood. Inference runs
an auxiliary-variable Metropolis-Hastings sampler so the intractable
normalizing constant cancels, and results are reported through softmax
transforms with direct probability interpretations.
"""

__version__ = "0.1.0"

from .descriptive import McfEstimate, mcf, suggest_c
from .dmh import (
    McmcConfig,
    PosteriorSamples,
    Priors,
    ProposalScales,
    run_chain,
    update_lambda,
    update_omega,
    update_theta,
)
from .energy import (
    ModelParams,
    exact_log_normalizing_constant,
    local_conditional,
    log_unnormalized_likelihood,
    potential_energy,
)
from .graph import InteractionGraph, build_graph
from .pattern import PointPattern, load_pattern, read_points, rescale, save_pattern
from .posterior import (
    TransformedSummary,
    credible_interval,
    gelman_rubin,
    mif_curve,
    posterior_mean,
    summarize,
    transform_phi,
    transform_pi,
)
from .simulate import (
    LgcpConfig,
    SCENARIOS,
    gibbs_sample_marks,
    sample_lgcp,
    sample_poisson,
    scenario_params,
)

__all__ = [
    "__version__",
    "PointPattern", "rescale", "read_points", "load_pattern", "save_pattern",
    "InteractionGraph", "build_graph",
    "ModelParams", "potential_energy", "log_unnormalized_likelihood",
    "local_conditional", "exact_log_normalizing_constant",
    "LgcpConfig", "sample_poisson", "sample_lgcp", "gibbs_sample_marks",
    "scenario_params", "SCENARIOS",
    "Priors", "ProposalScales", "McmcConfig", "PosteriorSamples",
    "update_omega", "update_theta", "update_lambda", "run_chain",
    "TransformedSummary", "posterior_mean", "transform_pi", "transform_phi",
    "mif_curve", "credible_interval", "gelman_rubin", "summarize",
    "McfEstimate", "mcf", "suggest_c",
]
