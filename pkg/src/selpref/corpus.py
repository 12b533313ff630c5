"""Predicate-argument observation counts and the class frequencies derived from them."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .taxonomy import Taxonomy

log = logging.getLogger(__name__)

Key = tuple[str, str, str]


class ObservationError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class UnknownNounError(ValueError):
    def __init__(self, nouns: Iterable[str]):
        self.nouns = sorted(set(nouns))
        super().__init__("nouns missing from taxonomy: " + ", ".join(self.nouns))


class EmptyDistributionError(ValueError):
    pass


@dataclass(frozen=True)
class ObservationStore:
    """Counts of ``(predicate, relation, noun)`` triples. Stored counts are positive."""

    records: Mapping[Key, int] = field(default_factory=dict)

    def __post_init__(self):
        for key, n in self.records.items():
            if n <= 0:
                raise ObservationError(f"non-positive count {n} for {key}")
        object.__setattr__(self, "records", dict(sorted(self.records.items())))

    def __len__(self):
        return len(self.records)

    def pairs(self) -> list[tuple[str, str]]:
        return sorted({(p, r) for p, r, _ in self.records})

    def nouns(self, predicate: str, relation: str) -> dict[str, int]:
        return {w: n for (p, r, w), n in self.records.items() if p == predicate and r == relation}

    def all_nouns(self) -> set[str]:
        return {w for _, _, w in self.records}

    def total(self, predicate: str, relation: str) -> int:
        return sum(self.nouns(predicate, relation).values())

    def positive_words(self, predicate: str, relation: str) -> frozenset[str]:
        """Nouns seen at least once with the pair; counts are dropped on purpose."""
        return frozenset(self.nouns(predicate, relation))

    def restrict_to(self, taxonomy: Taxonomy) -> tuple[ObservationStore, list[str]]:
        """Drop records whose noun is not a taxonomy word; return the dropped nouns too."""
        known = taxonomy.words
        kept = {k: n for k, n in self.records.items() if k[2] in known}
        dropped = sorted({k[2] for k in self.records if k[2] not in known})
        for noun in dropped:
            log.warning("skipping noun not in taxonomy: %s", noun)
        return ObservationStore(kept), dropped

    def without(self, keys: Iterable[Key]) -> ObservationStore:
        keys = set(keys)
        return ObservationStore({k: n for k, n in self.records.items() if k not in keys})

    def to_text(self) -> str:
        return "".join(f"{p}\t{r}\t{w}\t{n}\n" for (p, r, w), n in self.records.items())


def parse_observations(text: str) -> ObservationStore:
    counts: dict[Key, int] = defaultdict(int)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        parts = raw.rstrip("\r\n").split("\t")
        if len(parts) != 4 or not all(x.strip() for x in parts):
            raise ObservationError("expected predicate, relation, noun, count", lineno)
        try:
            n = int(parts[3])
        except ValueError:
            raise ObservationError(f"bad count {parts[3]!r}", lineno) from None
        if n <= 0:
            raise ObservationError(f"non-positive count {n}", lineno)
        counts[(parts[0].strip(), parts[1].strip(), parts[2].strip())] += n
    return ObservationStore(dict(counts))


@dataclass(frozen=True)
class ClassDistribution:
    probs: dict[str, float]
    total_freq: float

    def __getitem__(self, synset: str) -> float:
        return self.probs.get(synset, 0.0)


def frequencies_from_counts(counts: Mapping[str, int], taxonomy: Taxonomy) -> dict[str, Fraction]:
    missing = [w for w in counts if not taxonomy.is_word(w)]
    if missing:
        raise UnknownNounError(missing)
    freq = {c: Fraction(0) for c in sorted(taxonomy.synsets)}
    for w, n in counts.items():
        share = Fraction(n, taxonomy.classes_count(w))
        for c in taxonomy.ancestors(w):
            freq[c] += share
    return freq


def class_frequency(
    store: ObservationStore, taxonomy: Taxonomy, predicate: str, relation: str
) -> dict[str, Fraction]:
    """Each token splits its unit mass evenly over all of its ancestor classes.

    Values are exact fractions, keyed by every synset of ``taxonomy``.
    """
    return frequencies_from_counts(store.nouns(predicate, relation), taxonomy)


def _normalize(freq: Mapping[str, Fraction]) -> ClassDistribution:
    total = sum(freq.values(), Fraction(0))
    if total == 0:
        raise EmptyDistributionError("zero total frequency")
    return ClassDistribution({c: float(f / total) for c, f in freq.items()}, float(total))


def class_distribution(
    store: ObservationStore, taxonomy: Taxonomy, predicate: str, relation: str
) -> ClassDistribution:
    return _normalize(class_frequency(store, taxonomy, predicate, relation))


def prior_class_distribution(store: ObservationStore, taxonomy: Taxonomy) -> ClassDistribution:
    """Token-weighted class distribution pooled over every pair in the store."""
    pooled: dict[str, int] = defaultdict(int)
    for (_, _, w), n in store.records.items():
        pooled[w] += n
    return _normalize(frequencies_from_counts(pooled, taxonomy))
