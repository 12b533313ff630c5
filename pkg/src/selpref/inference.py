"""Posterior marginals on Boolean networks.

Three routes share one contract (``MarginalReport``):

* :func:`posterior_marginals_enum` sums the joint over every completion of the
  evidence. Exponential, used as the reference oracle.
* :func:`posterior_marginals_exact` runs variable elimination with a min-fill
  ordering after discarding barren nodes.
* :func:`posterior_marginals_sampled` is likelihood weighting, for networks
  whose induced width is out of reach.

State index 0 is ``False`` and 1 is ``True`` in every factor table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

import numpy as np

if TYPE_CHECKING:
    from .bbn import Network

Evidence = Mapping[str, bool]

DEFAULT_WIDTH_LIMIT = 22
DEFAULT_ENUM_LIMIT = 22
_EINSUM_MAX_OPERANDS = 16


class InferenceError(RuntimeError):
    pass


class WidthLimitExceeded(InferenceError):
    def __init__(self, width: int, limit: int):
        self.width = width
        self.limit = limit
        super().__init__(
            f"induced width {width} exceeds limit {limit}; raise the width limit, "
            "apply an OR cascade, or fall back to sampling"
        )


class ZeroEvidenceError(InferenceError):
    pass


class NetworkTooLargeError(InferenceError):
    pass


@dataclass
class MarginalReport:
    marginals: dict[str, float]
    log_evidence: float
    method: str
    diagnostics: dict = field(default_factory=dict)

    def ranked(self, nodes: Iterable[str] | None = None) -> list[tuple[str, float]]:
        keys = self.marginals if nodes is None else nodes
        return sorted(((k, self.marginals[k]) for k in keys), key=lambda kv: (-kv[1], kv[0]))

    def to_tsv(self, nodes: Iterable[str] | None = None) -> str:
        return "".join(f"{k}\t{v:.6f}\n" for k, v in self.ranked(nodes))


# -- factors -----------------------------------------------------------


@dataclass(frozen=True)
class Factor:
    """Nonnegative table over the joint states of Boolean variables."""

    scope: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (2,) * len(self.scope):
            raise ValueError(f"table shape {values.shape} does not match scope {self.scope}")
        if len(set(self.scope)) != len(self.scope):
            raise ValueError(f"repeated variable in scope {self.scope}")
        object.__setattr__(self, "values", values)

    def reduce(self, evidence: Evidence) -> Factor:
        if not any(v in evidence for v in self.scope):
            return self
        index = tuple(int(evidence[v]) if v in evidence else slice(None) for v in self.scope)
        return Factor(tuple(v for v in self.scope if v not in evidence), self.values[index])

    def __mul__(self, other: Factor) -> Factor:
        return product([self, other])

    def sum_out(self, var: str) -> Factor:
        axis = self.scope.index(var)
        return Factor(self.scope[:axis] + self.scope[axis + 1 :], self.values.sum(axis=axis))

    def total(self) -> float:
        return float(self.values.sum())


def _einsum(factors: Sequence[Factor], out: Sequence[str]) -> np.ndarray:
    ids: dict[str, int] = {}
    args: list = []
    for f in factors:
        args.append(f.values)
        args.append([ids.setdefault(v, len(ids)) for v in f.scope])
    for v in out:
        ids.setdefault(v, len(ids))
    args.append([ids[v] for v in out])
    return np.einsum(*args)


def product(factors: Sequence[Factor], sum_over: Iterable[str] = ()) -> Factor:
    """Multiply factors and sum out ``sum_over`` in one pass."""
    factors = list(factors)
    if not factors:
        return Factor((), np.array(1.0))
    drop = set(sum_over)
    while len(factors) > _EINSUM_MAX_OPERANDS:
        head, factors = factors[:_EINSUM_MAX_OPERANDS], factors[_EINSUM_MAX_OPERANDS:]
        scope = tuple(dict.fromkeys(v for f in head for v in f.scope))
        factors.insert(0, Factor(scope, _einsum(head, scope)))
    scope = tuple(v for v in dict.fromkeys(v for f in factors for v in f.scope) if v not in drop)
    return Factor(scope, _einsum(factors, scope))


def node_factor(network: Network, node_id: str) -> Factor:
    """The node's table as a dense factor over ``(node, *parents)``."""
    node = network.node(node_id)
    k = len(node.parents)
    p_true = np.full((2,) * k, network.p_active(node_id))
    p_true[(0,) * k] = network.leak(node_id)
    return Factor((node_id,) + node.parents, np.stack([1.0 - p_true, p_true]))


def _check_evidence(network: Network, evidence: Evidence) -> dict[str, bool]:
    for k in evidence:
        if k not in network:
            raise InferenceError(f"evidence on unknown node {k!r}")
    return {k: bool(v) for k, v in evidence.items()}


def relevant_nodes(network: Network, evidence: Evidence, query: Iterable[str]) -> set[str]:
    """Nodes that are not barren with respect to the query and evidence.

    An unobserved childless node outside the query sums to one and can be
    dropped; repeating that leaves exactly the ancestors of query and evidence.
    """
    return network.ancestral_set(list(query) + list(evidence))


def prune_barren(network: Network, evidence: Evidence, query: Iterable[str]) -> Network:
    return network.subnetwork(relevant_nodes(network, evidence, query))


# -- the joint and the enumeration oracle ------------------------------


def joint_probability(network: Network, assignment: Mapping[str, bool]) -> float:
    """Product of every node's conditional given a full assignment."""
    missing = [n for n in network.ids if n not in assignment]
    if missing:
        raise InferenceError(f"assignment misses nodes {missing}")
    p = 1.0
    for node in network.nodes:
        if any(assignment[q] for q in node.parents):
            t = network.p_active(node.id)
        else:
            t = network.leak(node.id)
        p *= t if assignment[node.id] else 1.0 - t
    return p


def posterior_marginals_enum(
    network: Network, evidence: Evidence, max_nodes: int = DEFAULT_ENUM_LIMIT
) -> MarginalReport:
    evidence = _check_evidence(network, evidence)
    n = len(network)
    if n > max_nodes:
        raise NetworkTooLargeError(f"{n} nodes exceeds the enumeration bound {max_nodes}")
    free = [i for i, node in enumerate(network.nodes) if node.id not in evidence]
    m = len(free)
    parents = [[network.position(p) for p in node.parents] for node in network.nodes]
    active = np.array([network.p_active(x) for x in network.ids])
    leak = np.array([network.leak(x) for x in network.ids])

    total = 0.0
    true_mass = np.zeros(n)
    chunk = 1 << min(m, 16)
    for start in range(0, 1 << m, chunk):
        idx = np.arange(start, start + chunk, dtype=np.int64)
        states = np.zeros((chunk, n), dtype=bool)
        for node_id, value in evidence.items():
            states[:, network.position(node_id)] = value
        for bit, col in enumerate(free):
            states[:, col] = (idx >> bit) & 1
        weight = np.ones(chunk)
        for j in range(n):
            if parents[j]:
                p = np.where(states[:, parents[j]].any(axis=1), active[j], leak[j])
            else:
                p = leak[j]
            weight *= np.where(states[:, j], p, 1.0 - p)
        total += weight.sum()
        true_mass += weight @ states
    if total <= 0.0:
        raise ZeroEvidenceError("evidence has probability zero")
    marginals = dict(zip(network.ids, (true_mass / total).tolist()))
    for k, v in evidence.items():
        marginals[k] = 1.0 if v else 0.0
    return MarginalReport(marginals, math.log(total), "enumeration", {"completions": 1 << m})


# -- elimination planning ----------------------------------------------


def _min_fill(scopes: Iterable[Iterable[str]], hidden: Iterable[str]) -> tuple[list[str], int]:
    """Greedy min-fill over the interaction graph; returns the order and induced width."""
    adj: dict[str, set[str]] = {}
    width = 0
    for scope in scopes:
        scope = list(scope)
        width = max(width, len(scope))
        for v in scope:
            adj.setdefault(v, set()).update(u for u in scope if u != v)
    todo = set(hidden) & set(adj)

    def fill(v: str) -> int:
        nb = list(adj[v])
        return sum(1 for i, a in enumerate(nb) for b in nb[i + 1 :] if b not in adj[a])

    order = []
    while todo:
        v = min(todo, key=lambda x: (fill(x), x))
        nb = adj.pop(v)
        width = max(width, len(nb) + 1)
        for a in nb:
            adj[a].discard(v)
            adj[a] |= nb - {a}
        todo.discard(v)
        order.append(v)
    return order, width


def elimination_order(
    network: Network, evidence: Evidence, query: Iterable[str]
) -> tuple[list[str], int]:
    """Min-fill ordering of every non-query, non-evidence node.

    Ties go to the smallest id. The width is the largest factor scope met
    while simulating elimination, initial (evidence-reduced) tables included.
    """
    evidence = _check_evidence(network, evidence)
    query = set(query)
    scopes = [[v for v in (n.id,) + n.parents if v not in evidence] for n in network.nodes]
    hidden = [n for n in network.ids if n not in query and n not in evidence]
    return _min_fill(scopes, hidden)


# -- variable elimination ----------------------------------------------


def _variable_elimination(
    network: Network,
    evidence: dict[str, bool],
    query: Sequence[str],
    order: Sequence[str],
) -> tuple[Factor, float]:
    """Eliminate ``order``; return the unnormalized query factor and its log scale."""
    buckets = [node_factor(network, n).reduce(evidence) for n in network.ids]
    log_scale = 0.0
    for var in order:
        touching = [f for f in buckets if var in f.scope]
        if not touching:
            continue
        buckets = [f for f in buckets if var not in f.scope]
        new = product(touching, sum_over=[var])
        top = new.values.max() if new.values.size else 0.0
        if top <= 0.0:
            raise ZeroEvidenceError("evidence has probability zero")
        # Keep tables near 1 and carry the magnitude in log space.
        new = Factor(new.scope, new.values / top)
        log_scale += math.log(top)
        buckets.append(new)
    final = product(buckets, sum_over=[v for f in buckets for v in f.scope if v not in query])
    if final.scope != tuple(query):
        final = Factor(tuple(query), _einsum([final], query))
    return final, log_scale


def evidence_probability(
    network: Network, evidence: Evidence, width_limit: int = DEFAULT_WIDTH_LIMIT
) -> float:
    """P(evidence) by variable elimination."""
    return math.exp(log_evidence(network, evidence, width_limit))


def log_evidence(
    network: Network, evidence: Evidence, width_limit: int = DEFAULT_WIDTH_LIMIT
) -> float:
    evidence = _check_evidence(network, evidence)
    if not evidence:
        return 0.0
    sub = prune_barren(network, evidence, ())
    order, width = elimination_order(sub, evidence, ())
    if width > width_limit:
        raise WidthLimitExceeded(width, width_limit)
    final, log_scale = _variable_elimination(sub, evidence, (), order)
    z = final.total()
    if z <= 0.0:
        raise ZeroEvidenceError("evidence has probability zero")
    return log_scale + math.log(z)


def query_factor(
    network: Network,
    evidence: Evidence,
    query: Sequence[str],
    width_limit: int = DEFAULT_WIDTH_LIMIT,
) -> Factor:
    """Normalized joint posterior over ``query`` given ``evidence``."""
    evidence = _check_evidence(network, evidence)
    query = tuple(query)
    sub = prune_barren(network, evidence, query)
    order, width = elimination_order(sub, evidence, query)
    if width > width_limit:
        raise WidthLimitExceeded(width, width_limit)
    final, _ = _variable_elimination(sub, evidence, query, order)
    z = final.total()
    if z <= 0.0:
        raise ZeroEvidenceError("evidence has probability zero")
    return Factor(final.scope, final.values / z)


def posterior_marginals_exact(
    network: Network,
    evidence: Evidence,
    width_limit: int = DEFAULT_WIDTH_LIMIT,
    nodes: Iterable[str] | None = None,
) -> MarginalReport:
    """P(node = true | evidence) for every node (or for ``nodes``), by variable elimination.

    One elimination pass runs per unobserved node, each on the network pruned
    to the ancestors of that node and the evidence. The shared min-fill order
    of the pruned network is reused with the query node moved to the end.
    """
    evidence = _check_evidence(network, evidence)
    targets = network.ids if nodes is None else list(nodes)
    marginals: dict[str, float] = {}
    max_width = 0
    plans: dict[frozenset, tuple[Network, list[str]]] = {}
    log_z = None
    for target in targets:
        if target in evidence:
            marginals[target] = 1.0 if evidence[target] else 0.0
            continue
        keep = frozenset(relevant_nodes(network, evidence, [target]))
        if keep not in plans:
            sub = network.subnetwork(keep)
            order, _ = elimination_order(sub, evidence, ())
            plans[keep] = (sub, order)
        sub, base = plans[keep]
        order = [v for v in base if v != target]
        scopes = [[v for v in (n.id,) + n.parents if v not in evidence] for n in sub.nodes]
        _, width = _simulate(scopes, order)
        max_width = max(max_width, width)
        if width > width_limit:
            raise WidthLimitExceeded(width, width_limit)
        final, log_scale = _variable_elimination(sub, evidence, (target,), order)
        z = final.total()
        if z <= 0.0:
            raise ZeroEvidenceError("evidence has probability zero")
        marginals[target] = float(final.values[1] / z)
        if log_z is None and set(evidence) <= keep:
            log_z = log_scale + math.log(z)
    if log_z is None:
        log_z = log_evidence(network, evidence, width_limit)
    return MarginalReport(
        marginals, log_z, "exact-VE", {"induced_width": max_width, "width_limit": width_limit}
    )


def _simulate(scopes: Iterable[Iterable[str]], order: Sequence[str]) -> tuple[list[str], int]:
    """Induced width of eliminating ``order`` (in that exact sequence)."""
    adj: dict[str, set[str]] = {}
    width = 0
    for scope in scopes:
        scope = list(scope)
        width = max(width, len(scope))
        for v in scope:
            adj.setdefault(v, set()).update(u for u in scope if u != v)
    for v in order:
        nb = adj.pop(v, set())
        width = max(width, len(nb) + 1)
        for a in nb:
            adj[a].discard(v)
            adj[a] |= nb - {a}
    return list(order), width


# -- likelihood weighting ----------------------------------------------


def posterior_marginals_sampled(
    network: Network, evidence: Evidence, samples: int, seed: int
) -> MarginalReport:
    """Likelihood weighting: sample unobserved nodes forward, weight by the evidence likelihood."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    evidence = _check_evidence(network, evidence)
    rng = np.random.default_rng(seed)
    n = len(network)
    states = np.zeros((samples, n), dtype=bool)
    log_w = np.zeros(samples)
    for j, node in enumerate(network.nodes):
        cols = [network.position(p) for p in node.parents]
        if cols:
            p = np.where(
                states[:, cols].any(axis=1), network.p_active(node.id), network.leak(node.id)
            )
        else:
            p = np.full(samples, network.leak(node.id))
        if node.id in evidence:
            value = evidence[node.id]
            states[:, j] = value
            with np.errstate(divide="ignore"):
                log_w += np.log(p if value else 1.0 - p)
        else:
            states[:, j] = rng.random(samples) < p
    top = log_w.max()
    if not np.isfinite(top):
        raise ZeroEvidenceError(f"all {samples} samples have zero weight (seed {seed})")
    w = np.exp(log_w - top)
    total = w.sum()
    marginals = dict(zip(network.ids, ((w @ states) / total).tolist()))
    for k, v in evidence.items():
        marginals[k] = 1.0 if v else 0.0
    ess = float(total**2 / (w**2).sum())
    log_z = float(top + math.log(total / samples))
    return MarginalReport(
        marginals, log_z, "sampled", {"samples": samples, "seed": seed, "effective_sample_size": ess}
    )
