"""Random networks and independent oracles shared by the test modules.

Nothing here calls into ``selpref.inference``; the oracles only read CPT
values through the ``Network`` API.
"""

from __future__ import annotations

import itertools
from typing import Mapping

import numpy as np

from selpref.bbn import SYNSET, WORD, CptParams, Network, Node


def random_network(
    rng: np.random.Generator,
    n_nodes: int,
    max_fan_in: int = 4,
    leaf_fraction: float = 0.3,
    override_prob: float = 0.3,
) -> Network:
    """Random DAG whose last nodes are childless 'word' leaves."""
    n_leaves = max(1, int(round(n_nodes * leaf_fraction)))
    n_inner = max(1, n_nodes - n_leaves)
    nodes = []
    for i in range(n_inner):
        k = int(rng.integers(0, min(i, max_fan_in) + 1))
        parents = sorted(rng.choice(i, size=k, replace=False).tolist()) if k else []
        nodes.append(Node(f"s{i:02d}", SYNSET, tuple(f"s{p:02d}" for p in parents)))
    for j in range(n_nodes - n_inner):
        k = int(rng.integers(1, min(n_inner, max_fan_in) + 1))
        parents = sorted(rng.choice(n_inner, size=k, replace=False).tolist())
        nodes.append(Node(f"w{j:02d}", WORD, tuple(f"s{p:02d}" for p in parents)))
    likely = float(rng.uniform(0.6, 0.99))
    unlikely = float(rng.uniform(0.01, 0.4))
    leaks = {
        n.id: float(rng.uniform(0.01, 0.5)) for n in nodes if rng.random() < override_prob
    }
    return Network(tuple(nodes), CptParams(likely, unlikely), leaks)


def leaf_evidence(rng: np.random.Generator, network: Network) -> dict[str, bool]:
    leaves = [n for n in network.ids if not network.children(n)]
    k = int(rng.integers(0, len(leaves) + 1))
    chosen = rng.choice(len(leaves), size=k, replace=False) if k else []
    return {leaves[int(i)]: bool(rng.random() < 0.7) for i in chosen}


def high_fan_in_network(rng: np.random.Generator, fan_in: int, extra: int = 4) -> Network:
    """A sparse random DAG of ``fan_in + extra`` nodes feeding one wide node ``X``.

    ``X`` has two word children so evidence below it is possible.
    """
    m = fan_in + extra
    nodes = []
    for i in range(m):
        k = int(rng.integers(0, min(i, 2) + 1))
        parents = sorted(rng.choice(i, size=k, replace=False).tolist()) if k else []
        nodes.append(Node(f"s{i:02d}", SYNSET, tuple(f"s{p:02d}" for p in parents)))
    chosen = sorted(rng.choice(m, size=fan_in, replace=False).tolist())
    nodes.append(Node("X", SYNSET, tuple(f"s{p:02d}" for p in chosen)))
    nodes.append(Node("wx0", WORD, ("X",)))
    other = f"s{int(rng.integers(m)):02d}"
    nodes.append(Node("wx1", WORD, ("X", other)))
    nodes.append(Node("wy", WORD, (f"s{int(rng.integers(m)):02d}",)))
    likely = float(rng.uniform(0.7, 0.95))
    unlikely = float(rng.uniform(0.02, 0.3))
    return Network(tuple(nodes), CptParams(likely, unlikely), {"X": float(rng.uniform(0.01, 0.2))})


def brute_force_marginals(network: Network, evidence: Mapping[str, bool]) -> dict[str, float]:
    """Pure-Python sum over all completions; the slowest, simplest reference."""
    ids = network.ids
    free = [n for n in ids if n not in evidence]
    total = 0.0
    mass = dict.fromkeys(ids, 0.0)
    for values in itertools.product([False, True], repeat=len(free)):
        state = dict(evidence)
        state.update(zip(free, values))
        p = 1.0
        for node in network.nodes:
            on = any(state[q] for q in node.parents)
            t = network.p_active(node.id) if on else network.leak(node.id)
            p *= t if state[node.id] else 1.0 - t
        total += p
        for n in ids:
            if state[n]:
                mass[n] += p
    return {n: mass[n] / total for n in ids}


def _eliminate_all(factors, keep):
    """Sum out every variable except ``keep`` using greedy min-degree, on raw arrays."""
    factors = list(factors)
    while True:
        variables = {v for scope, _ in factors for v in scope} - {keep}
        if not variables:
            break

        def degree(v):
            return len({u for scope, _ in factors if v in scope for u in scope})

        var = min(variables, key=lambda v: (degree(v), v))
        touching = [f for f in factors if var in f[0]]
        factors = [f for f in factors if var not in f[0]]
        letters = {}
        args = []
        for scope, table in touching:
            args += [table, [letters.setdefault(v, len(letters)) for v in scope]]
        out = [v for v in letters if v != var]
        args.append([letters[v] for v in out])
        factors.append((tuple(out), np.einsum(*args)))
    letters = {}
    args = []
    for scope, table in factors:
        args += [table, [letters.setdefault(v, len(letters)) for v in scope]]
    letters.setdefault(keep, len(letters))
    args.append([letters[keep]])
    return np.einsum(*args)


def or_decomposed_marginals(
    network: Network, evidence: Mapping[str, bool], wide: set[str]
) -> dict[str, float]:
    """Exact marginals that never build a dense table for the ``wide`` nodes.

    For an OR-shaped node with activation ``a`` and leak ``u``::

        P(X=1 | pa) = a - (a - u) * prod_i [pa_i = 0]
        P(X=0 | pa) = (1 - a) + (a - u) * prod_i [pa_i = 0]

    i.e. a sum over a hidden two-valued index ``z`` of factors that are each
    pairwise in the parents. The resulting tables have signed entries, which
    is fine for elimination arithmetic.
    """
    factors = []
    for node in network.nodes:
        a, u = network.p_active(node.id), network.leak(node.id)
        if node.id in wide:
            z = node.id + "@z"
            factors.append(((node.id, z), np.array([[1 - a, a - u], [a, -(a - u)]])))
            for p in node.parents:
                factors.append(((p, z), np.array([[1.0, 1.0], [1.0, 0.0]])))
        else:
            k = len(node.parents)
            p_true = np.full((2,) * k, a)
            p_true[(0,) * k] = u
            factors.append(((node.id,) + node.parents, np.stack([1 - p_true, p_true])))
    reduced = []
    for scope, table in factors:
        idx = tuple(int(evidence[v]) if v in evidence else slice(None) for v in scope)
        reduced.append((tuple(v for v in scope if v not in evidence), table[idx]))
    out = {}
    for node in network.ids:
        if node in evidence:
            out[node] = float(evidence[node])
            continue
        joint = _eliminate_all(reduced, node)
        out[node] = float(joint[1] / joint.sum())
    return out


# -- path enumeration for the path HMM -------------------------------------


def enumerate_paths(model):
    """Every (transition list, emitted word) path of a PathModel, by depth-first search."""
    from selpref.hmm import START

    paths = []

    def walk(state, edges):
        for w, p in model.emit[state].items():
            paths.append((edges + [(state, "emit:" + w)], w))
        for c in model.trans[state]:
            walk(c, edges + [(state, c)])

    walk(START, [])
    return paths


def path_probability(model, edges) -> float:
    p = 1.0
    for s, t in edges:
        p *= model.emit[s][t[5:]] if t.startswith("emit:") else model.trans[s][t]
    return p


def em_by_enumeration(model, obs, iters: int):
    """EM where the E-step lists every path explicitly; returns the final model."""
    from selpref.hmm import PathModel

    paths = enumerate_paths(model)
    for _ in range(iters):
        counts: dict = {}
        for w, n in obs.items():
            mine = [(edges, path_probability(model, edges)) for edges, ww in paths if ww == w]
            z = sum(p for _, p in mine)
            for edges, p in mine:
                for e in edges:
                    counts[e] = counts.get(e, 0.0) + n * p / z
        trans, emit = {}, {}
        for s in model.states:
            keys = [(s, c) for c in model.trans[s]] + [(s, "emit:" + w) for w in model.emit[s]]
            z = sum(counts.get(k, 0.0) for k in keys)
            if z == 0:
                trans[s], emit[s] = dict(model.trans[s]), dict(model.emit[s])
                continue
            trans[s] = {c: counts.get((s, c), 0.0) / z for c in model.trans[s]}
            emit[s] = {w: counts.get((s, "emit:" + w), 0.0) / z for w in model.emit[s]}
        model = PathModel(model.states, trans, emit)
    return model
