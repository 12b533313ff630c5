"""Seeded synthetic taxonomies and WSD benchmarks with known ground truth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import ObservationStore
from .taxonomy import Taxonomy
from .wsd import WsdInstance


def random_taxonomy(
    rng: np.random.Generator,
    levels: int = 4,
    roots: int = 3,
    branching: tuple[int, int] = (2, 3),
    max_synsets: int | None = None,
    extra_parent_prob: float = 0.0,
    words_per_leaf: int = 1,
) -> Taxonomy:
    """Layered hierarchy; synset ``L{level}_{k}`` sits at depth ``level``.

    Each non-root synset may pick a second parent from the level above with
    probability ``extra_parent_prob``. Every leaf gets ``words_per_leaf``
    monosemous words (``w{leaf}_{j}``), so the result is its own ancestral
    subgraph.
    """
    layers = [[f"L0_{k}" for k in range(roots)]]
    arcs = set()
    count = roots
    for level in range(1, levels):
        layer = []
        for parent in layers[-1]:
            for _ in range(int(rng.integers(branching[0], branching[1] + 1))):
                if max_synsets is not None and count >= max_synsets:
                    break
                child = f"L{level}_{len(layer)}"
                layer.append(child)
                arcs.add((child, parent))
                count += 1
                if extra_parent_prob and len(layers[-1]) > 1 and rng.random() < extra_parent_prob:
                    other = layers[-1][int(rng.integers(len(layers[-1])))]
                    arcs.add((child, other))
        if not layer:
            break
        layers.append(layer)
    synsets = {s for layer in layers for s in layer}
    has_child = {p for _, p in arcs}
    members = set()
    for s in sorted(synsets - has_child):
        for j in range(words_per_leaf):
            members.add((f"w{s}_{j}".lower(), s))
    return Taxonomy(frozenset(synsets), frozenset(arcs), frozenset(members))


@dataclass(frozen=True)
class SyntheticBenchmark:
    taxonomy: Taxonomy
    train: ObservationStore
    test: list[WsdInstance]
    sense_freqs: dict[tuple[str, str], int]
    preferred: dict[str, str]
    true_sense: dict[str, str]


def generate_benchmark(
    seed: int,
    n_predicates: int = 30,
    roots: int = 4,
    branching: tuple[int, int] = (2, 3),
    levels: int = 4,
    words_per_leaf: int = 2,
    distractors: tuple[int, int] = (1, 3),
    ambiguous_prob: float = 0.8,
    types_mean: float = 3.3,
    tokens_per_type: float = 1.3,
    test_per_predicate: int = 5,
    relation: str = "object",
) -> SyntheticBenchmark:
    """Predicates that each select one class two levels below a root.

    Every noun has one true sense at the leaf level; with probability
    ``ambiguous_prob`` it also receives distractor senses drawn from synsets
    unrelated to the true one. Training pairs draw about ``types_mean`` noun
    types per predicate from below its class, each seen about
    ``tokens_per_type`` times. Test instances are ambiguous nouns from the
    same class, with the true sense as gold.
    """
    rng = np.random.default_rng(seed)
    base = random_taxonomy(rng, levels, roots, branching, words_per_leaf=0)
    leaves = sorted(s for s in base.synsets if not base.children(s))
    non_roots = sorted(s for s in base.synsets if base.parents(s))

    members: set[tuple[str, str]] = set()
    true_sense: dict[str, str] = {}
    for leaf in leaves:
        for j in range(words_per_leaf):
            word = f"n{leaf.lower()}_{j}"
            true_sense[word] = leaf
            members.add((word, leaf))
            if rng.random() >= ambiguous_prob:
                continue
            related = base.ancestors(leaf)
            candidates = [s for s in non_roots if s not in related]
            k = int(rng.integers(distractors[0], distractors[1] + 1))
            for idx in rng.choice(len(candidates), size=min(k, len(candidates)), replace=False):
                members.add((word, candidates[int(idx)]))
    taxonomy = Taxonomy(base.synsets, base.hyponym_arcs, frozenset(members))

    # Classes two levels up from the leaves, each with a few leaves below.
    level = max(1, levels - 2)
    classes = sorted(s for s in base.synsets if s.startswith(f"L{level}_"))
    below: dict[str, list[str]] = {
        c: sorted(w for w, s in true_sense.items() if c in base.ancestors(s)) for c in classes
    }

    records: dict[tuple[str, str, str], int] = {}
    test: list[WsdInstance] = []
    preferred: dict[str, str] = {}
    for i in range(n_predicates):
        pred = f"verb{i:02d}"
        cls = classes[int(rng.integers(len(classes)))]
        preferred[pred] = cls
        pool = below[cls]
        n_types = min(len(pool), 1 + int(rng.poisson(types_mean - 1)))
        for idx in rng.choice(len(pool), size=n_types, replace=False):
            records[(pred, relation, pool[int(idx)])] = 1 + int(rng.poisson(tokens_per_type - 1))
        ambiguous = [w for w in pool if len(taxonomy.senses(w)) > 1]
        if not ambiguous:
            continue
        for idx in rng.integers(len(ambiguous), size=test_per_predicate):
            noun = ambiguous[int(idx)]
            test.append(WsdInstance(pred, relation, noun, frozenset([true_sense[noun]])))

    # Sense-tagged counts: the true sense usually dominates.
    sense_freqs: dict[tuple[str, str], int] = {}
    for word in sorted(true_sense):
        for s in taxonomy.senses(word):
            sense_freqs[(word, s)] = int(rng.poisson(2.0))
        if rng.random() < 0.85:
            sense_freqs[(word, true_sense[word])] += 10

    return SyntheticBenchmark(
        taxonomy, ObservationStore(records), test, sense_freqs, preferred, true_sense
    )
