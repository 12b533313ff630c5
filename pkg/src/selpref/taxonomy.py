"""Noun hierarchy: synsets, hyponymy arcs and word memberships.

The text format is line oriented::

    # comment
    synset FOOD
    synset FRUIT
    hyponym FRUIT FOOD
    word apple FRUIT

Records may appear in any order.
"""

from __future__ import annotations

import graphlib
import heapq
from dataclasses import dataclass, field
from typing import Iterable


class TaxonomyError(ValueError):
    """Malformed or inconsistent taxonomy data."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class TaxonomyCycleError(TaxonomyError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("hyponymy cycle: " + " -> ".join(cycle))


class UnknownNodeError(KeyError):
    pass


@dataclass(frozen=True)
class Taxonomy:
    """Immutable DAG of synsets plus the words that belong to them.

    ``hyponym_arcs`` holds ``(child, parent)`` pairs, ``memberships`` holds
    ``(word, synset)`` pairs naming the word's direct senses.
    """

    synsets: frozenset[str] = frozenset()
    hyponym_arcs: frozenset[tuple[str, str]] = frozenset()
    memberships: frozenset[tuple[str, str]] = frozenset()

    _parents: dict[str, tuple[str, ...]] = field(init=False, repr=False, compare=False)
    _children: dict[str, tuple[str, ...]] = field(init=False, repr=False, compare=False)
    _senses: dict[str, tuple[str, ...]] = field(init=False, repr=False, compare=False)
    _order: tuple[str, ...] = field(init=False, repr=False, compare=False)
    _closure: dict[str, frozenset[str]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "synsets", frozenset(self.synsets))
        object.__setattr__(self, "hyponym_arcs", frozenset(self.hyponym_arcs))
        object.__setattr__(self, "memberships", frozenset(self.memberships))

        parents: dict[str, list[str]] = {s: [] for s in self.synsets}
        children: dict[str, list[str]] = {s: [] for s in self.synsets}
        for child, parent in self.hyponym_arcs:
            for s in (child, parent):
                if s not in self.synsets:
                    raise TaxonomyError(f"undeclared synset {s!r} in hyponym arc")
            if child == parent:
                raise TaxonomyCycleError([child, child])
            parents[child].append(parent)
            children[parent].append(child)
        senses: dict[str, list[str]] = {}
        for word, synset in self.memberships:
            if synset not in self.synsets:
                raise TaxonomyError(f"undeclared synset {synset!r} for word {word!r}")
            if word in self.synsets:
                raise TaxonomyError(f"word {word!r} collides with a synset id")
            senses.setdefault(word, []).append(synset)

        object.__setattr__(self, "_parents", {s: tuple(sorted(p)) for s, p in parents.items()})
        object.__setattr__(self, "_children", {s: tuple(sorted(c)) for s, c in children.items()})
        object.__setattr__(self, "_senses", {w: tuple(sorted(s)) for w, s in senses.items()})
        object.__setattr__(self, "_order", self._toposort())

        closure: dict[str, frozenset[str]] = {}
        for s in self._order:
            acc = {s}
            for p in self._parents[s]:
                acc |= closure[p]
            closure[s] = frozenset(acc)
        object.__setattr__(self, "_closure", closure)

    def _toposort(self) -> tuple[str, ...]:
        # Kahn with a heap so the order is a pure function of the content.
        indegree = {s: len(self._parents[s]) for s in self.synsets}
        heap = [s for s, d in indegree.items() if d == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            s = heapq.heappop(heap)
            order.append(s)
            for c in self._children[s]:
                indegree[c] -= 1
                if indegree[c] == 0:
                    heapq.heappush(heap, c)
        if len(order) != len(self.synsets):
            remaining = sorted(set(self.synsets) - set(order))
            sorter = graphlib.TopologicalSorter(
                {s: [p for p in self._parents[s] if p in remaining] for s in remaining}
            )
            try:
                sorter.prepare()
            except graphlib.CycleError as exc:
                raise TaxonomyCycleError(list(exc.args[1])) from None
            raise TaxonomyError("hyponymy relation is not acyclic")  # pragma: no cover
        return tuple(order)

    # -- basic queries -------------------------------------------------

    @property
    def words(self) -> frozenset[str]:
        return frozenset(self._senses)

    def topological_order(self) -> tuple[str, ...]:
        """Synsets ordered so every hypernym precedes its hyponyms."""
        return self._order

    def roots(self) -> tuple[str, ...]:
        return tuple(s for s in self._order if not self._parents[s])

    def parents(self, synset: str) -> tuple[str, ...]:
        self._check_synset(synset)
        return self._parents[synset]

    def children(self, synset: str) -> tuple[str, ...]:
        self._check_synset(synset)
        return self._children[synset]

    def senses(self, word: str) -> tuple[str, ...]:
        """Direct senses of ``word``, sorted."""
        try:
            return self._senses[word]
        except KeyError:
            raise UnknownNodeError(f"unknown word {word!r}") from None

    def words_of(self, synset: str) -> tuple[str, ...]:
        self._check_synset(synset)
        return tuple(sorted(w for w, s in self.memberships if s == synset))

    def is_word(self, node: str) -> bool:
        return node in self._senses

    def _check_synset(self, synset: str) -> None:
        if synset not in self.synsets:
            raise UnknownNodeError(f"unknown synset {synset!r}")

    # -- closures ------------------------------------------------------

    def ancestors(self, node: str) -> frozenset[str]:
        """Synsets reachable upward from ``node``.

        A synset counts as its own ancestor; a word's ancestors start at its
        direct senses.
        """
        if node in self._closure:
            return self._closure[node]
        if node in self._senses:
            acc: set[str] = set()
            for s in self._senses[node]:
                acc |= self._closure[s]
            return frozenset(acc)
        raise UnknownNodeError(f"unknown node {node!r}")

    def classes_count(self, word: str) -> int:
        """Number of classes ``word`` belongs to, counting every ancestor synset."""
        if word not in self._senses:
            raise UnknownNodeError(f"unknown word {word!r}")
        return len(self.ancestors(word))

    def ancestral_subgraph(self, words: Iterable[str]) -> Taxonomy:
        """Sub-taxonomy holding ``words`` and every synset above them."""
        words = set(words)
        keep: set[str] = set()
        for w in words:
            if w not in self._senses:
                raise UnknownNodeError(f"unknown word {w!r}")
            keep |= self.ancestors(w)
        return Taxonomy(
            synsets=frozenset(keep),
            hyponym_arcs=frozenset((c, p) for c, p in self.hyponym_arcs if c in keep),
            memberships=frozenset((w, s) for w, s in self.memberships if w in words),
        )

    def to_text(self) -> str:
        lines = [f"synset {s}" for s in self._order]
        lines += [f"hyponym {c} {p}" for c, p in sorted(self.hyponym_arcs)]
        lines += [f"word {w} {s}" for w, s in sorted(self.memberships)]
        return "\n".join(lines) + "\n"


def parse_taxonomy(text: str) -> Taxonomy:
    synsets: set[str] = set()
    arcs: list[tuple[int, str, str]] = []
    members: list[tuple[int, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "synset" and len(parts) == 2:
            if parts[1] in synsets:
                raise TaxonomyError(f"duplicate synset {parts[1]!r}", lineno)
            synsets.add(parts[1])
        elif kind == "hyponym" and len(parts) == 3:
            arcs.append((lineno, parts[1], parts[2]))
        elif kind == "word" and len(parts) == 3:
            members.append((lineno, parts[1], parts[2]))
        else:
            raise TaxonomyError(f"cannot parse record {line!r}", lineno)

    for lineno, child, parent in arcs:
        for s in (child, parent):
            if s not in synsets:
                raise TaxonomyError(f"undeclared synset {s!r}", lineno)
    for lineno, word, synset in members:
        if synset not in synsets:
            raise TaxonomyError(f"undeclared synset {synset!r}", lineno)
        if word in synsets:
            raise TaxonomyError(f"word {word!r} collides with a synset id", lineno)

    return Taxonomy(
        synsets=frozenset(synsets),
        hyponym_arcs=frozenset((c, p) for _, c, p in arcs),
        memberships=frozenset((w, s) for _, w, s in members),
    )
