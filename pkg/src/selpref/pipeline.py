"""Learn and rank the classes a predicate selects for."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Iterable

from . import bbn, hmm, resnik
from .corpus import EmptyDistributionError, ObservationStore, UnknownNounError
from .inference import (
    WidthLimitExceeded,
    posterior_marginals_exact,
    posterior_marginals_sampled,
)
from .taxonomy import Taxonomy

log = logging.getLogger(__name__)

METHODS = ("bbn", "resnik", "hmm")


class NoObservationsError(EmptyDistributionError):
    pass


@dataclass(frozen=True)
class RunConfig:
    likely: float = 0.9
    unlikely: float = 0.1
    balance: bool = False
    balance_target: float | None = None  # None: use `unlikely`
    balance_tol: float = 1e-3
    balance_sweeps: int = 10
    width_limit: int = 22
    max_fan_in: int | None = None
    samples: int | None = None  # enables sampling when exact inference is too wide
    seed: int = 0
    alpha: float = resnik.DEFAULT_ALPHA
    hmm_iters: int = 500
    skip_unknown_nouns: bool = False

    def __post_init__(self):
        bbn.CptParams(self.likely, self.unlikely)
        if self.samples is not None and self.samples < 1:
            raise ValueError("samples must be at least 1")
        if self.max_fan_in is not None and self.max_fan_in < 2:
            raise ValueError("max_fan_in must be at least 2")

    @property
    def params(self) -> bbn.CptParams:
        return bbn.CptParams(self.likely, self.unlikely)

    @property
    def target(self) -> float:
        return self.unlikely if self.balance_target is None else self.balance_target

    def echo(self) -> str:
        return " ".join(f"{k}={v}" for k, v in asdict(self).items())


@dataclass(frozen=True)
class PreferenceReport:
    method: str
    predicate: str
    relation: str
    ranking: list[tuple[str, float]]
    config: RunConfig
    diagnostics: dict

    @property
    def scores(self) -> dict[str, float]:
        return dict(self.ranking)

    def to_tsv(self) -> str:
        lines = [
            f"# method={self.method} predicate={self.predicate} relation={self.relation}",
            f"# {self.config.echo()}",
            "rank\tsynset\tscore",
        ]
        lines += [f"{i}\t{s}\t{v:.6f}" for i, (s, v) in enumerate(self.ranking, start=1)]
        return "\n".join(lines) + "\n"


def _rank(scores: dict[str, float]) -> list[tuple[str, float]]:
    return sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))


def observed_counts(store, taxonomy, predicate, relation, config) -> dict[str, int]:
    counts = store.nouns(predicate, relation)
    unknown = [w for w in counts if not taxonomy.is_word(w)]
    if unknown:
        if not config.skip_unknown_nouns:
            raise UnknownNounError(unknown)
        for w in sorted(unknown):
            log.warning("skipping noun not in taxonomy: %s", w)
        counts = {w: n for w, n in counts.items() if w not in unknown}
    if not counts:
        raise NoObservationsError(f"no observations for ({predicate}, {relation})")
    return counts


def bbn_synset_marginals(
    taxonomy: Taxonomy,
    positive: Iterable[str],
    config: RunConfig,
    extra_words: Iterable[str] = (),
) -> tuple[dict[str, float], dict]:
    """Posterior of every synset above ``positive`` and ``extra_words``, with ``positive`` observed.

    Extra words are left unobserved; they only widen the set of synsets scored.
    """
    positive = sorted(set(positive))
    sub = taxonomy.ancestral_subgraph(set(positive) | set(extra_words))
    network = bbn.build_network(sub, config.params)
    if config.max_fan_in is not None:
        network = bbn.or_cascade(network, config.max_fan_in)
    diagnostics: dict = {"nodes": len(network)}
    if config.balance:
        network, report = bbn.balance(
            network, config.target, config.balance_tol, config.balance_sweeps, config.width_limit
        )
        diagnostics["clamped"] = list(report.clamped)
        diagnostics["balance_sweeps"] = report.sweeps
    evidence = {w: True for w in positive}
    synsets = sorted(sub.synsets)
    try:
        result = posterior_marginals_exact(network, evidence, config.width_limit, nodes=synsets)
    except WidthLimitExceeded:
        if config.samples is None:
            raise
        log.warning("induced width over %d; falling back to sampling", config.width_limit)
        result = posterior_marginals_sampled(network, evidence, config.samples, config.seed)
    diagnostics.update(result.diagnostics)
    diagnostics["method"] = result.method
    return {s: result.marginals[s] for s in synsets}, diagnostics


def hmm_scores(taxonomy: Taxonomy, counts: dict[str, int], config: RunConfig) -> dict[str, float]:
    sub = taxonomy.ancestral_subgraph(counts)
    model = hmm.build_path_model(sub, counts)
    trace = hmm.em_train(model, counts, iters=config.hmm_iters)
    return hmm.hmm_class_posterior(trace.model, counts)


def learn_preferences(
    taxonomy: Taxonomy,
    store: ObservationStore,
    predicate: str,
    relation: str,
    method: str = "bbn",
    config: RunConfig = RunConfig(),
) -> PreferenceReport:
    counts = observed_counts(store, taxonomy, predicate, relation, config)
    diagnostics: dict = {}
    if method == "bbn":
        scores, diagnostics = bbn_synset_marginals(taxonomy, counts, config)
    elif method == "resnik":
        if config.skip_unknown_nouns:
            store, _ = store.restrict_to(taxonomy)
        report = resnik.rank_classes_resnik(store, taxonomy, predicate, relation, config.alpha)
        diagnostics["strength"] = report.strength
        return PreferenceReport(
            "resnik", predicate, relation, report.ranked(), config, diagnostics
        )
    elif method == "hmm":
        scores = hmm_scores(taxonomy, counts, config)
    else:
        raise ValueError(f"unknown method {method!r}")
    tag = method
    if method == "bbn":
        tag = "bbn-balanced" if config.balance else "bbn-unbalanced"
    return PreferenceReport(tag, predicate, relation, _rank(scores), config, diagnostics)

