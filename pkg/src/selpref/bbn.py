"""Boolean Bayesian network built from a noun taxonomy.

Every node uses the same two-valued OR-shaped table: the node is true with
probability ``likely`` when at least one parent is true and with its leak
(``unlikely`` unless overridden) when all parents are false. Roots are true
with their leak. Only the leak is stored per node, so storage does not depend
on fan-in.

Auxiliary ``aux-or`` nodes are deterministic ORs introduced by
:func:`or_cascade`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .taxonomy import Taxonomy

SYNSET = "synset"
WORD = "word"
AUX_OR = "aux-or"

LEAK_MIN = 1e-6
LEAK_MAX = 1 - 1e-6


class NetworkError(ValueError):
    pass


@dataclass(frozen=True)
class CptParams:
    likely: float = 0.9
    unlikely: float = 0.1

    def __post_init__(self):
        if not 0 < self.unlikely < self.likely < 1:
            raise NetworkError(
                f"need 0 < unlikely < likely < 1, got likely={self.likely}, unlikely={self.unlikely}"
            )


# The worked examples in the literature use a sharper setting than the
# experiments do.
EXAMPLE_PARAMS = CptParams(0.99, 0.01)
DEFAULT_PARAMS = CptParams(0.9, 0.1)


@dataclass(frozen=True)
class Node:
    id: str
    kind: str
    parents: tuple[str, ...] = ()


@dataclass(frozen=True)
class Network:
    """Nodes are kept in topological order (parents before children)."""

    nodes: tuple[Node, ...]
    params: CptParams = DEFAULT_PARAMS
    leak_override: Mapping[str, float] = field(default_factory=dict)

    _index: dict[str, int] = field(init=False, repr=False, compare=False)
    _children: dict[str, tuple[str, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        children: dict[str, list[str]] = {}
        for i, node in enumerate(self.nodes):
            if node.id in index:
                raise NetworkError(f"duplicate node {node.id!r}")
            for p in node.parents:
                if p not in index:
                    raise NetworkError(f"parent {p!r} of {node.id!r} missing or out of order")
                children[p].append(node.id)
            index[node.id] = i
            children[node.id] = []
        for n, leak in self.leak_override.items():
            if n not in index:
                raise NetworkError(f"leak override for unknown node {n!r}")
            if not 0 <= leak <= 1:
                raise NetworkError(f"leak {leak} for {n!r} outside [0, 1]")
        object.__setattr__(self, "leak_override", dict(sorted(self.leak_override.items())))
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_children", {k: tuple(v) for k, v in children.items()})

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, node_id):
        return node_id in self._index

    @property
    def ids(self) -> list[str]:
        return [n.id for n in self.nodes]

    def node(self, node_id: str) -> Node:
        try:
            return self.nodes[self._index[node_id]]
        except KeyError:
            raise NetworkError(f"unknown node {node_id!r}") from None

    def position(self, node_id: str) -> int:
        return self._index[node_id]

    def children(self, node_id: str) -> tuple[str, ...]:
        return self._children[node_id]

    def ids_of_kind(self, kind: str) -> list[str]:
        return [n.id for n in self.nodes if n.kind == kind]

    def leak(self, node_id: str) -> float:
        if self.node(node_id).kind == AUX_OR:
            return 0.0
        return self.leak_override.get(node_id, self.params.unlikely)

    def p_active(self, node_id: str) -> float:
        """P(node true | some parent true)."""
        if self.node(node_id).kind == AUX_OR:
            return 1.0
        return self.params.likely

    def cpt_entry(self, node_id: str, parent_assignment: Mapping[str, bool]) -> float:
        """P(node = true | parents), with the parent values given by name."""
        parents = self.node(node_id).parents
        if set(parent_assignment) != set(parents) or len(parent_assignment) != len(parents):
            raise NetworkError(
                f"assignment for {node_id!r} must cover exactly its parents {list(parents)}"
            )
        if any(parent_assignment.values()):
            return self.p_active(node_id)
        return self.leak(node_id)

    def with_leaks(self, leaks: Mapping[str, float]) -> Network:
        merged = dict(self.leak_override)
        merged.update(leaks)
        return Network(self.nodes, self.params, merged)

    def subnetwork(self, keep: Iterable[str]) -> Network:
        """Induced network on ``keep``, which must be closed under parents."""
        keep = set(keep)
        nodes = []
        for n in self.nodes:
            if n.id in keep:
                if not set(n.parents) <= keep:
                    raise NetworkError(f"{n.id!r} kept without all of its parents")
                nodes.append(n)
        return Network(
            tuple(nodes), self.params, {k: v for k, v in self.leak_override.items() if k in keep}
        )

    def ancestral_set(self, node_ids: Iterable[str]) -> set[str]:
        stack = list(node_ids)
        seen: set[str] = set()
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(self.node(n).parents)
        return seen

    def dump(self) -> str:
        lines = []
        for n in self.nodes:
            leak = "-" if n.kind == AUX_OR else f"{self.leak(n.id):.6g}"
            lines.append(f"node {n.id} {n.kind} leak={leak} parents={','.join(n.parents)}")
        return "\n".join(lines) + "\n"


def build_network(
    taxonomy: Taxonomy, params: CptParams = DEFAULT_PARAMS, require_ancestral: bool = True
) -> Network:
    """One node per synset and word; arcs run from hypernym to hyponym and from sense to word."""
    if not taxonomy.synsets:
        raise NetworkError("empty taxonomy")
    if require_ancestral:
        covered: set[str] = set()
        for w in taxonomy.words:
            covered |= taxonomy.ancestors(w)
        stray = sorted(taxonomy.synsets - covered)
        if stray:
            raise NetworkError(
                "taxonomy is not an ancestral subgraph; synsets with no word below: "
                + ", ".join(stray[:10])
            )
    nodes = [Node(s, SYNSET, taxonomy.parents(s)) for s in taxonomy.topological_order()]
    nodes += [Node(w, WORD, taxonomy.senses(w)) for w in sorted(taxonomy.words)]
    return Network(tuple(nodes), params)


def or_cascade(network: Network, max_fan_in: int = 2) -> Network:
    """Route every parent set larger than ``max_fan_in`` through a tree of deterministic ORs.

    The rewired node keeps a single parent, the root of the tree, whose value is
    the OR of the original parents; since the node's table only depends on that
    OR, the distribution over the original nodes is unchanged.
    """
    if max_fan_in < 2:
        raise ValueError("max_fan_in must be at least 2")
    nodes: list[Node] = []
    for node in network.nodes:
        if len(node.parents) <= max_fan_in:
            nodes.append(node)
            continue
        layer = list(node.parents)
        counter = 0
        while len(layer) > 1:
            nxt = []
            for i in range(0, len(layer), max_fan_in):
                group = layer[i : i + max_fan_in]
                if len(group) == 1:
                    nxt.append(group[0])
                    continue
                aux_id = f"{node.id}#or{counter}"
                while aux_id in network:
                    aux_id += "_"
                counter += 1
                nodes.append(Node(aux_id, AUX_OR, tuple(group)))
                nxt.append(aux_id)
            layer = nxt
        nodes.append(Node(node.id, node.kind, (layer[0],)))
    return Network(tuple(nodes), network.params, network.leak_override)


@dataclass(frozen=True)
class BalanceReport:
    target: float
    sweeps: int
    clamped: tuple[str, ...]
    max_deviation: float


def balance(
    network: Network,
    target: float,
    tol: float = 1e-3,
    max_sweeps: int = 10,
    width_limit: int = 22,
) -> tuple[Network, BalanceReport]:
    """Recalibrate synset leaks so evidence-free synset marginals sit at ``target``.

    Synsets are visited parents-first. For a node whose parents are jointly
    active with probability ``q`` the leak ``u`` solves
    ``likely * q + u * (1 - q) = target``, clamped to [1e-6, 1 - 1e-6]. Word
    and auxiliary nodes keep their tables.
    """
    from .inference import evidence_probability, posterior_marginals_exact

    if not 0 < target < 1:
        raise ValueError("balance target must lie strictly between 0 and 1")
    synsets = network.ids_of_kind(SYNSET)
    clamped: set[str] = set()
    deviation = float("inf")
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        clamped = set()
        for s in synsets:
            parents = network.node(s).parents
            if parents:
                sub = network.subnetwork(network.ancestral_set(parents))
                q = 1.0 - evidence_probability(
                    sub, {p: False for p in parents}, width_limit=width_limit
                )
            else:
                q = 0.0
            a = network.p_active(s)
            if q >= 1.0:
                u = LEAK_MIN
                clamped.add(s)
            else:
                u = (target - a * q) / (1.0 - q)
            if u < LEAK_MIN or u > LEAK_MAX:
                u = min(max(u, LEAK_MIN), LEAK_MAX)
                clamped.add(s)
            network = network.with_leaks({s: u})
        marginals = posterior_marginals_exact(network, {}, width_limit=width_limit).marginals
        free = [abs(marginals[s] - target) for s in synsets if s not in clamped]
        deviation = max(free, default=0.0)
        if deviation <= tol:
            break
    report = BalanceReport(target, sweeps, tuple(sorted(clamped)), deviation)
    return network, report
