"""Selectional preference learning over a noun taxonomy with Boolean Bayesian networks."""

from .bbn import CptParams, Network, balance, build_network, or_cascade
from .corpus import ObservationStore, class_distribution, class_frequency, parse_observations
from .inference import (
    posterior_marginals_enum,
    posterior_marginals_exact,
    posterior_marginals_sampled,
)
from .pipeline import RunConfig, learn_preferences
from .taxonomy import Taxonomy, parse_taxonomy

__all__ = [
    "CptParams",
    "Network",
    "ObservationStore",
    "RunConfig",
    "Taxonomy",
    "balance",
    "build_network",
    "class_distribution",
    "class_frequency",
    "learn_preferences",
    "or_cascade",
    "parse_observations",
    "parse_taxonomy",
    "posterior_marginals_enum",
    "posterior_marginals_exact",
    "posterior_marginals_sampled",
]
