"""Path-structured HMM over the hyponymy DAG, trained by EM.

A virtual start state moves to one of the roots, synset states move down
hyponymy arcs, and a transition into the final state emits a word that has
the current synset as a direct sense. The probability of a word is the sum
over every path that ends by emitting it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .taxonomy import Taxonomy

log = logging.getLogger(__name__)

START = "<start>"


class PathModelError(ValueError):
    pass


@dataclass(frozen=True)
class PathModel:
    """``trans[s]`` and ``emit[s]`` together form the outgoing distribution of ``s``.

    ``states`` lists the start state first, then synsets parents-first.
    """

    states: tuple[str, ...]
    trans: dict[str, dict[str, float]]
    emit: dict[str, dict[str, float]]

    @property
    def synsets(self) -> tuple[str, ...]:
        return self.states[1:]

    @property
    def words(self) -> list[str]:
        return sorted({w for e in self.emit.values() for w in e})

    def outgoing_total(self, state: str) -> float:
        return sum(self.trans[state].values()) + sum(self.emit[state].values())

    def parameter_vector(self) -> np.ndarray:
        """All probabilities in a fixed order, for comparing fitted models."""
        vals = []
        for s in self.states:
            vals += [self.trans[s][c] for c in sorted(self.trans[s])]
            vals += [self.emit[s][w] for w in sorted(self.emit[s])]
        return np.array(vals)

    def dump(self) -> str:
        rows = []
        for s in self.states:
            rows += [f"{s}\t{c}\t{p:.6g}\n" for c, p in sorted(self.trans[s].items())]
            rows += [f"{s}\t<emit:{w}>\t{p:.6g}\n" for w, p in sorted(self.emit[s].items())]
        return "".join(rows)


def build_path_model(
    taxonomy: Taxonomy,
    words,
    init: str = "uniform",
    seed: int | None = None,
) -> PathModel:
    """Fix the allowed transitions from ``taxonomy`` and initialize their probabilities.

    ``init`` is ``"uniform"`` or ``"random"`` (Dirichlet(1) rows drawn from ``seed``).
    """
    words = sorted(set(words))
    for w in words:
        if not taxonomy.is_word(w):
            raise PathModelError(f"word {w!r} has no path from any root")
    order = taxonomy.topological_order()
    emits: dict[str, list[str]] = {s: [] for s in order}
    for w in words:
        for s in taxonomy.senses(w):
            emits[s].append(w)
    succ = {START: list(taxonomy.roots())}
    for s in order:
        succ[s] = list(taxonomy.children(s))

    if init == "random":
        rng = np.random.default_rng(seed)
    elif init != "uniform":
        raise ValueError(f"unknown init {init!r}")

    trans: dict[str, dict[str, float]] = {}
    emit: dict[str, dict[str, float]] = {}
    for s in (START, *order):
        k = len(succ[s]) + len(emits.get(s, []))
        if k == 0:
            # Only possible for synsets with no word below them.
            raise PathModelError(f"state {s!r} leads to no observed word")
        probs = rng.dirichlet(np.ones(k)) if init == "random" else np.full(k, 1.0 / k)
        probs = probs.tolist()
        trans[s] = dict(zip(succ[s], probs[: len(succ[s])]))
        emit[s] = dict(zip(emits.get(s, []), probs[len(succ[s]) :]))
    return PathModel((START, *order), trans, emit)


def _forward(model: PathModel) -> dict[str, float]:
    alpha = {s: 0.0 for s in model.states}
    alpha[START] = 1.0
    for s in model.states:
        for c, p in model.trans[s].items():
            alpha[c] += alpha[s] * p
    return alpha


def _backward(model: PathModel, word: str) -> dict[str, float]:
    beta = {}
    for s in reversed(model.states):
        b = model.emit[s].get(word, 0.0)
        for c, p in model.trans[s].items():
            b += p * beta[c]
        beta[s] = b
    return beta


def word_likelihood(model: PathModel, word: str) -> float:
    """Probability that a path from the start state ends by emitting ``word``."""
    alpha = _forward(model)
    p = sum(alpha[s] * e.get(word, 0.0) for s, e in model.emit.items())
    if p == 0.0:
        log.warning("word %r is unreachable in the path model", word)
    return p


@dataclass(frozen=True)
class TrainingTrace:
    loglik_per_iter: list[float]
    model: PathModel
    seed: int | None
    iterations: int
    converged: bool


def _loglik(model: PathModel, obs: Mapping[str, int]) -> float:
    alpha = _forward(model)
    total = 0.0
    for w, n in obs.items():
        p = sum(alpha[s] * e.get(w, 0.0) for s, e in model.emit.items())
        if p <= 0.0:
            raise PathModelError(f"observation {w!r} has zero likelihood")
        total += n * math.log(p)
    return total


def em_train(
    model: PathModel,
    obs: Mapping[str, int],
    iters: int = 500,
    seed: int | None = None,
    tol: float = 1e-10,
) -> TrainingTrace:
    """Expectation maximization over paths.

    The E-step weighs every transition by its expected use across paths that
    emit each observed word; the M-step renormalizes the expected counts per
    state. A state with no expected use keeps its previous row. ``seed`` is
    only recorded in the trace.
    """
    if iters < 1:
        raise ValueError("iters must be at least 1")
    trace: list[float] = []
    converged = False
    for _ in range(iters):
        alpha = _forward(model)
        t_counts = {s: dict.fromkeys(model.trans[s], 0.0) for s in model.states}
        e_counts = {s: dict.fromkeys(model.emit[s], 0.0) for s in model.states}
        ll = 0.0
        for w, n in sorted(obs.items()):
            beta = _backward(model, w)
            p_w = beta[START]
            if p_w <= 0.0:
                raise PathModelError(f"observation {w!r} has zero likelihood")
            ll += n * math.log(p_w)
            scale = n / p_w
            for s in model.states:
                a = alpha[s] * scale
                if a == 0.0:
                    continue
                for c, p in model.trans[s].items():
                    t_counts[s][c] += a * p * beta[c]
                if w in model.emit[s]:
                    e_counts[s][w] += a * model.emit[s][w]
        if trace and ll - trace[-1] < tol:
            trace.append(ll)
            converged = True
            break
        trace.append(ll)
        trans, emit = {}, {}
        for s in model.states:
            z = sum(t_counts[s].values()) + sum(e_counts[s].values())
            if z <= 0.0:
                trans[s], emit[s] = dict(model.trans[s]), dict(model.emit[s])
                continue
            trans[s] = {c: v / z for c, v in t_counts[s].items()}
            emit[s] = {w: v / z for w, v in e_counts[s].items()}
        model = PathModel(model.states, trans, emit)
    else:
        trace.append(_loglik(model, obs))
    return TrainingTrace(trace, model, seed, len(trace) - 1, converged)


def hmm_class_posterior(model: PathModel, obs: Mapping[str, int]) -> dict[str, float]:
    """Expected share of the observed tokens whose path passes through each synset."""
    alpha = _forward(model)
    occ = {s: 0.0 for s in model.synsets}
    total = sum(obs.values())
    if total == 0:
        return occ
    for w, n in obs.items():
        beta = _backward(model, w)
        if beta[START] <= 0.0:
            continue
        for s in model.synsets:
            occ[s] += n * alpha[s] * beta[s] / beta[START]
    return {s: min(1.0, v / total) for s, v in occ.items()}
