"""Word sense disambiguation as an indirect test of learned preferences.

Each test instance is a (predicate, relation, noun) triple with gold senses.
A method is fit on the training store for the instance's predicate, and the
noun is resolved to whichever of its direct senses the method scores highest.
"""

from __future__ import annotations

import logging
import math
import zlib
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .corpus import ObservationError, ObservationStore
from .pipeline import RunConfig, bbn_synset_marginals, hmm_scores
from .resnik import rank_classes_resnik
from .taxonomy import Taxonomy, UnknownNodeError

log = logging.getLogger(__name__)

METHODS = ("random", "hmm", "resnik", "bbn-unbalanced", "bbn-balanced", "first-sense")


class WsdError(ValueError):
    pass


@dataclass(frozen=True)
class WsdInstance:
    predicate: str
    relation: str
    noun: str
    gold_senses: frozenset[str]

    def check(self, taxonomy: Taxonomy) -> None:
        senses = set(taxonomy.senses(self.noun))
        if not self.gold_senses or not self.gold_senses <= senses:
            raise WsdError(
                f"gold senses {sorted(self.gold_senses)} of {self.noun!r} are not among {sorted(senses)}"
            )


def parse_test_instances(text: str) -> list[WsdInstance]:
    """Lines of ``predicate<TAB>relation<TAB>noun<TAB>gold[,gold...]``."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        parts = raw.rstrip("\r\n").split("\t")
        if len(parts) != 4:
            raise ObservationError("expected predicate, relation, noun, gold senses", lineno)
        gold = frozenset(g.strip() for g in parts[3].split(",") if g.strip())
        if not gold:
            raise ObservationError("empty gold sense list", lineno)
        out.append(WsdInstance(parts[0].strip(), parts[1].strip(), parts[2].strip(), gold))
    return out


def format_test_instances(instances: Sequence[WsdInstance]) -> str:
    return "".join(
        f"{i.predicate}\t{i.relation}\t{i.noun}\t{','.join(sorted(i.gold_senses))}\n"
        for i in instances
    )


def parse_sense_frequencies(text: str) -> dict[tuple[str, str], int]:
    """Lines of ``noun<TAB>synset<TAB>count`` from sense-tagged data."""
    table: dict[tuple[str, str], int] = defaultdict(int)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        parts = raw.rstrip("\r\n").split("\t")
        if len(parts) != 3:
            raise ObservationError("expected noun, synset, count", lineno)
        try:
            table[(parts[0].strip(), parts[1].strip())] += int(parts[2])
        except ValueError:
            raise ObservationError(f"bad count {parts[2]!r}", lineno) from None
    return dict(table)


def disambiguate(
    scores: Mapping[str, float], taxonomy: Taxonomy, noun: str, floor: float = 0.0
) -> str:
    """Highest scoring direct sense of ``noun``; ties go to the smallest synset id."""
    senses = taxonomy.senses(noun)
    return min(senses, key=lambda s: (-scores.get(s, floor), s))


@dataclass
class WsdReport:
    method: str
    total: int = 0
    attempted: int = 0
    correct: int = 0
    attempted_correct: int = 0
    per_predicate: dict[str, list[int]] = field(default_factory=dict)  # [total, correct]
    unattempted_predicates: list[str] = field(default_factory=list)
    seed: int | None = None
    expected_accuracy: float | None = None

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    @property
    def attempted_accuracy(self) -> float:
        return self.attempted_correct / self.attempted if self.attempted else 0.0

    def record(self, inst: WsdInstance, ok: bool, attempted: bool = True) -> None:
        self.total += 1
        self.correct += ok
        if attempted:
            self.attempted += 1
            self.attempted_correct += ok
        row = self.per_predicate.setdefault(inst.predicate, [0, 0])
        row[0] += 1
        row[1] += ok

    def to_tsv(self) -> str:
        lines = [
            "method\ttotal\tattempted\tcorrect\taccuracy\tattempted_accuracy",
            f"{self.method}\t{self.total}\t{self.attempted}\t{self.correct}\t"
            f"{self.accuracy:.6f}\t{self.attempted_accuracy:.6f}",
            "",
            "predicate\ttotal\tcorrect",
        ]
        lines += [f"{p}\t{t}\t{c}" for p, (t, c) in sorted(self.per_predicate.items())]
        if self.unattempted_predicates:
            lines.append("# unattempted (random fallback): " + ",".join(self.unattempted_predicates))
        return "\n".join(lines) + "\n"


def comparison_table(reports: Sequence[WsdReport]) -> str:
    """Aligned text table with one row per method."""
    width = max([len("Method")] + [len(r.method) for r in reports])
    lines = [f"{'Method':<{width}}  {'Result':>7}  {'Attempted':>9}  {'N':>5}"]
    lines.append("-" * len(lines[0]))
    for r in reports:
        lines.append(
            f"{r.method:<{width}}  {100 * r.accuracy:6.1f}%  "
            f"{100 * r.attempted_accuracy:8.1f}%  {r.total:>5}"
        )
    return "\n".join(lines) + "\n"


def _instance_rng_pick(inst: WsdInstance, senses: Sequence[str], seed: int) -> str:
    # Per-instance stream so the draw does not depend on test order.
    key = f"{seed}\t{inst.predicate}\t{inst.relation}\t{inst.noun}".encode()
    rng = np.random.default_rng([seed & 0xFFFFFFFF, zlib.crc32(key)])
    return senses[int(rng.integers(len(senses)))]


def random_baseline(test: Sequence[WsdInstance], taxonomy: Taxonomy, seed: int) -> WsdReport:
    """Uniform choice among direct senses, plus the analytic expected accuracy."""
    report = WsdReport("random", seed=seed)
    expected = 0.0
    for inst in test:
        senses = taxonomy.senses(inst.noun)
        expected += len(inst.gold_senses & set(senses)) / len(senses)
        report.record(inst, _instance_rng_pick(inst, senses, seed) in inst.gold_senses)
    report.expected_accuracy = expected / len(test) if test else 0.0
    return report


def first_sense_baseline(
    test: Sequence[WsdInstance],
    taxonomy: Taxonomy,
    sense_freqs: Mapping[tuple[str, str], int] | None,
) -> WsdReport:
    if sense_freqs is None:
        raise WsdError("the first-sense baseline needs a sense-tagged frequency table")
    report = WsdReport("first-sense")
    for inst in test:
        senses = taxonomy.senses(inst.noun)
        choice = min(senses, key=lambda s: (-sense_freqs.get((inst.noun, s), 0), s))
        report.record(inst, choice in inst.gold_senses)
    return report


def _fit_scores(method, taxonomy, train, predicate, relation, nouns, config):
    """Scores for the senses of ``nouns`` and the floor for senses left unscored."""
    counts = {w: n for w, n in train.nouns(predicate, relation).items() if taxonomy.is_word(w)}
    if method.startswith("bbn"):
        scores, _ = bbn_synset_marginals(taxonomy, counts, config, extra_words=nouns)
        return scores, 0.0
    if method == "resnik":
        known, _ = train.restrict_to(taxonomy)
        report = rank_classes_resnik(known, taxonomy, predicate, relation, config.alpha)
        if report.strength == 0.0:
            # no preference at all: same fallback as the ranking tie-break
            return report.posterior, -math.inf
        return report.associations, -math.inf
    if method == "hmm":
        return hmm_scores(taxonomy, counts, config), 0.0
    raise WsdError(f"unknown method {method!r}")


def evaluate(
    train: ObservationStore,
    test: Sequence[WsdInstance],
    taxonomy: Taxonomy,
    method: str,
    config: RunConfig = RunConfig(),
    sense_freqs: Mapping[tuple[str, str], int] | None = None,
) -> WsdReport:
    """Fit ``method`` per test predicate on ``train`` only and score the test instances.

    Predicates with no usable training data fall back to the random choice and
    are listed in ``unattempted_predicates``.
    """
    if not test:
        raise WsdError("empty test set")
    for inst in test:
        inst.check(taxonomy)
    if method == "random":
        return random_baseline(test, taxonomy, config.seed)
    if method == "first-sense":
        return first_sense_baseline(test, taxonomy, sense_freqs)
    if method == "bbn":
        method = "bbn-balanced" if config.balance else "bbn-unbalanced"
    if method in ("bbn-balanced", "bbn-unbalanced"):
        config = replace(config, balance=method == "bbn-balanced")
    elif method not in ("resnik", "hmm"):
        raise WsdError(f"unknown method {method!r}")

    groups: dict[tuple[str, str], list[WsdInstance]] = defaultdict(list)
    for inst in test:
        groups[(inst.predicate, inst.relation)].append(inst)

    report = WsdReport(method, seed=config.seed)
    for (p, r), insts in sorted(groups.items()):
        observed = [w for w in train.nouns(p, r) if taxonomy.is_word(w)]
        if not observed:
            report.unattempted_predicates.append(p)
            for inst in insts:
                pick = _instance_rng_pick(inst, taxonomy.senses(inst.noun), config.seed)
                report.record(inst, pick in inst.gold_senses, attempted=False)
            continue
        nouns = sorted({i.noun for i in insts})
        try:
            scores, floor = _fit_scores(method, taxonomy, train, p, r, nouns, config)
        except (ValueError, RuntimeError, UnknownNodeError) as exc:
            log.error("%s failed on (%s, %s): %s", method, p, r, exc)
            for inst in insts:
                report.record(inst, False)
            continue
        for inst in insts:
            choice = disambiguate(scores, taxonomy, inst.noun, floor)
            report.record(inst, choice in inst.gold_senses)
    return report
