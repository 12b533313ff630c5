"""Selectional preference strength and association (relative-entropy baseline)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .corpus import (
    ClassDistribution,
    EmptyDistributionError,
    ObservationStore,
    frequencies_from_counts,
    class_frequency,
)
from .taxonomy import Taxonomy

DEFAULT_ALPHA = 0.01


class NoPreferenceError(ValueError):
    """Strength is zero, so association shares are undefined."""


class SupportError(ValueError):
    pass


def _term(p: float, q: float, c: str) -> float:
    if p == 0.0:
        return 0.0
    if q <= 0.0:
        raise SupportError(f"prior is zero for class {c!r} where the posterior is {p}")
    return p * math.log(p / q)


def _get(dist, c: str) -> float:
    if isinstance(dist, ClassDistribution):
        return dist[c]
    return dist.get(c, 0.0)


def _probs(dist) -> Mapping[str, float]:
    return dist.probs if isinstance(dist, ClassDistribution) else dist


def preference_strength(post, prior) -> float:
    """Relative entropy D(post || prior) in nats."""
    return sum(_term(p, _get(prior, c), c) for c, p in sorted(_probs(post).items()))


def selectional_association(post, prior, synset: str, strength: float) -> float:
    """Share of ``strength`` contributed by ``synset``; negative for dispreferred classes."""
    if strength <= 0.0:
        raise NoPreferenceError("selectional preference strength is zero")
    return _term(_get(post, synset), _get(prior, synset), synset) / strength


def smoothed_distribution(
    freq: Mapping[str, Fraction | float], synsets: Iterable[str], alpha: float
) -> ClassDistribution:
    """Add ``alpha`` to every class frequency before normalizing."""
    synsets = sorted(synsets)
    raw = {c: float(freq.get(c, 0)) + alpha for c in synsets}
    total = sum(raw.values())
    if total <= 0.0:
        raise EmptyDistributionError("zero total frequency")
    return ClassDistribution({c: v / total for c, v in raw.items()}, total)


@dataclass(frozen=True)
class AssociationReport:
    strength: float
    associations: dict[str, float]
    posterior: dict[str, float]

    def ranked(self) -> list[tuple[str, float]]:
        """Descending association; ties (e.g. zero strength) fall back to P(c|p,r), then id."""
        return sorted(
            self.associations.items(), key=lambda kv: (-kv[1], -self.posterior[kv[0]], kv[0])
        )


def rank_classes_resnik(
    store: ObservationStore,
    taxonomy: Taxonomy,
    predicate: str,
    relation: str,
    alpha: float = DEFAULT_ALPHA,
    prior_store: ObservationStore | None = None,
) -> AssociationReport:
    """Association of every synset of ``taxonomy`` with the pair.

    Both the pair's class distribution and the pooled prior are add-alpha
    smoothed over the taxonomy's synsets. ``prior_store`` defaults to ``store``.
    """
    counts = store.nouns(predicate, relation)
    if not counts:
        raise EmptyDistributionError(f"no observations for ({predicate}, {relation})")
    post = smoothed_distribution(
        class_frequency(store, taxonomy, predicate, relation), taxonomy.synsets, alpha
    )
    pooled: dict[str, int] = {}
    for (_, _, w), n in (prior_store or store).records.items():
        pooled[w] = pooled.get(w, 0) + n
    prior_freq = frequencies_from_counts(pooled, taxonomy)
    prior = smoothed_distribution(prior_freq, taxonomy.synsets, alpha)
    strength = preference_strength(post, prior)
    synsets = sorted(taxonomy.synsets)
    if strength <= 0.0:
        return AssociationReport(0.0, dict.fromkeys(synsets, 0.0), post.probs)
    return AssociationReport(
        strength,
        {c: selectional_association(post, prior, c, strength) for c in synsets},
        post.probs,
    )
