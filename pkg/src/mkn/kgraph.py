"""Knowledge graph of symptom/disease entities linked by indication rules.

Rule files are tab-separated text::

    # comment
    indication<TAB>cough<TAB>pneumonia<TAB>0.5
    indication<TAB>fever<TAB>flu

The weight column is optional; rules without one take ``init_weight`` at
build time.
"""

import enum
import functools
import json
import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DuplicateRule, EmptyRuleSet, InputError, MalformedLine, MissingWeight

RULE_KEYWORD = "indication"


class NodeKind(enum.Enum):
    SYMPTOM = "symptom"
    DISEASE = "disease"


@functools.total_ordering
@dataclass(frozen=True)
class NodeId:
    kind: NodeKind
    name: str

    def __post_init__(self):
        if not self.name or any(c in self.name for c in "\t\n\r"):
            raise InputError(f"invalid node name {self.name!r}")

    # enum members do not order; sort on the kind's value instead
    def __lt__(self, other):
        return (self.kind.value, self.name) < (other.kind.value, other.name)


def symptom(name: str) -> NodeId:
    return NodeId(NodeKind.SYMPTOM, name)


def disease(name: str) -> NodeId:
    return NodeId(NodeKind.DISEASE, name)


@dataclass(frozen=True)
class KnowledgeRule:
    symptom: str
    disease: str
    weight: Optional[float] = None


class QualityMeasure(enum.Enum):
    PAGERANK = "pagerank"
    DEGREE = "degree"
    BETWEENNESS = "betweenness"


@dataclass(frozen=True)
class NodeQuality:
    measure: QualityMeasure
    values: dict  # NodeId -> float

    def disease_vector(self, graph: "KnowledgeGraph") -> np.ndarray:
        return np.array([self.values[disease(n)] for n in graph.diseases], dtype=float)


class KnowledgeGraph:
    """Bipartite undirected graph; edge ``i`` is rule ``i`` of the source file.

    Symptom and disease names are kept sorted so that array layouts (and
    hence every serialised output) depend only on the rule set.
    """

    def __init__(self, symptoms, diseases, edges):
        self.symptoms = tuple(sorted(set(symptoms)))
        self.diseases = tuple(sorted(set(diseases)))
        self.symptom_index = {n: i for i, n in enumerate(self.symptoms)}
        self.disease_index = {n: i for i, n in enumerate(self.diseases)}
        seen = set()
        sym, dis = [], []
        for s, d in edges:
            if s not in self.symptom_index or d not in self.disease_index:
                raise InputError(f"edge ({s}, {d}) references an unknown node")
            if (s, d) in seen:
                raise DuplicateRule(s, d)
            seen.add((s, d))
            sym.append(self.symptom_index[s])
            dis.append(self.disease_index[d])
        self.edge_symptom = np.array(sym, dtype=np.intp)
        self.edge_disease = np.array(dis, dtype=np.intp)
        self.edge_symptom.setflags(write=False)
        self.edge_disease.setflags(write=False)

        self._symptom_edges = [[] for _ in self.symptoms]
        self._disease_edges = [[] for _ in self.diseases]
        for e, (s, d) in enumerate(zip(sym, dis)):
            self._symptom_edges[s].append(e)
            self._disease_edges[d].append(e)

        inc = np.zeros((len(sym), len(self.symptoms)))
        inc[np.arange(len(sym)), sym] = 1.0
        inc.setflags(write=False)
        self.symptom_incidence = inc  # edges x symptoms
        inc = np.zeros((len(dis), len(self.diseases)))
        inc[np.arange(len(dis)), dis] = 1.0
        inc.setflags(write=False)
        self.disease_incidence = inc  # edges x diseases

    @property
    def n_edges(self) -> int:
        return len(self.edge_symptom)

    @property
    def nodes(self) -> list:
        """All nodes, symptoms first, each kind sorted by name."""
        return [symptom(n) for n in self.symptoms] + [disease(n) for n in self.diseases]

    @property
    def edges(self) -> list:
        return [
            (symptom(self.symptoms[s]), disease(self.diseases[d]), e)
            for e, (s, d) in enumerate(zip(self.edge_symptom, self.edge_disease))
        ]

    def edges_of_disease(self, name: str) -> list:
        return list(self._disease_edges[self.disease_index[name]])

    def edges_of_symptom(self, name: str) -> list:
        return list(self._symptom_edges[self.symptom_index[name]])

    def symptom_degrees(self) -> np.ndarray:
        return np.array([len(e) for e in self._symptom_edges], dtype=float)

    @property
    def adjacency(self) -> dict:
        adj = {}
        for i, name in enumerate(self.symptoms):
            adj[symptom(name)] = [disease(self.diseases[self.edge_disease[e]]) for e in self._symptom_edges[i]]
        for j, name in enumerate(self.diseases):
            adj[disease(name)] = [symptom(self.symptoms[self.edge_symptom[e]]) for e in self._disease_edges[j]]
        return adj

    def _neighbor_lists(self) -> list:
        """Neighbours as integer positions in :attr:`nodes`."""
        ns = len(self.symptoms)
        out = []
        for edges in self._symptom_edges:
            out.append([ns + int(self.edge_disease[e]) for e in edges])
        for edges in self._disease_edges:
            out.append([int(self.edge_symptom[e]) for e in edges])
        return out

    def __len__(self):
        return len(self.symptoms) + len(self.diseases)

    def __repr__(self):
        return f"KnowledgeGraph({len(self.symptoms)} symptoms, {len(self.diseases)} diseases, {self.n_edges} edges)"


def parse_rules(path) -> list:
    """Read a rule file into a list of :class:`KnowledgeRule` in file order."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        return parse_rule_lines(fh)


def parse_rule_lines(lines) -> list:
    rules = []
    seen = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) not in (3, 4) or fields[0] != RULE_KEYWORD:
            raise MalformedLine(lineno, line)
        s, d = fields[1], fields[2]
        if not s or not d:
            raise MalformedLine(lineno, line)
        weight = None
        if len(fields) == 4 and fields[3].strip():
            try:
                weight = float(fields[3])
            except ValueError:
                raise MalformedLine(lineno, line) from None
            if not math.isfinite(weight):
                raise MalformedLine(lineno, line)
        if (s, d) in seen:
            raise DuplicateRule(s, d)
        seen.add((s, d))
        rules.append(KnowledgeRule(s, d, weight))
    if not rules:
        raise EmptyRuleSet()
    return rules


def format_rules(graph: KnowledgeGraph, weights) -> str:
    lines = []
    for e in range(graph.n_edges):
        s = graph.symptoms[graph.edge_symptom[e]]
        d = graph.diseases[graph.edge_disease[e]]
        lines.append(f"{RULE_KEYWORD}\t{s}\t{d}\t{float(weights[e])!r}")
    return "\n".join(lines) + "\n"


def build_graph(rules: Sequence[KnowledgeRule], init_weight: Optional[float] = None):
    """Construct the graph and its weight vector from an ordered rule set.

    If ``init_weight`` is given every rule weight is replaced by it;
    otherwise each rule must carry its own weight.

    Returns
    -------
    (KnowledgeGraph, np.ndarray)
    """
    if not rules:
        raise EmptyRuleSet()
    graph = KnowledgeGraph(
        [r.symptom for r in rules],
        [r.disease for r in rules],
        [(r.symptom, r.disease) for r in rules],
    )
    if init_weight is not None:
        weights = np.full(len(rules), float(init_weight))
    else:
        missing = [r for r in rules if r.weight is None]
        if missing:
            r = missing[0]
            raise MissingWeight(f"rule ({r.symptom}, {r.disease}) has no weight and no init_weight given")
        weights = np.array([r.weight for r in rules], dtype=float)
    return graph, weights


def pagerank(graph: KnowledgeGraph, damping=0.85, tol=1e-9, max_iter=100) -> NodeQuality:
    """PageRank by power iteration, each undirected edge a link both ways.

    Mass on nodes without neighbours is spread uniformly, so the result
    always sums to one.
    """
    n = len(graph)
    if n == 0:
        raise InputError("pagerank of an empty graph")
    if not 0 < damping < 1:
        raise InputError("damping must lie in (0, 1)")
    if tol <= 0:
        raise InputError("tol must be positive")
    nbrs = graph._neighbor_lists()
    deg = np.array([len(a) for a in nbrs], dtype=float)
    src = np.concatenate([np.full(len(a), i, dtype=np.intp) for i, a in enumerate(nbrs)] + [np.zeros(0, np.intp)])
    dst = np.concatenate([np.asarray(a, dtype=np.intp) for a in nbrs] + [np.zeros(0, np.intp)])
    dangling = deg == 0

    rank = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        share = np.divide(rank, deg, out=np.zeros(n), where=~dangling)
        new = np.zeros(n)
        np.add.at(new, dst, share[src])
        new = (1.0 - damping) / n + damping * (new + rank[dangling].sum() / n)
        delta = np.abs(new - rank).sum()
        rank = new
        if delta < tol:
            break
    rank /= rank.sum()
    return NodeQuality(QualityMeasure.PAGERANK, dict(zip(graph.nodes, rank.tolist())))


def degree_quality(graph: KnowledgeGraph) -> NodeQuality:
    nbrs = graph._neighbor_lists()
    deg = np.array([len(a) for a in nbrs], dtype=float)
    top = deg.max() if len(deg) else 0.0
    vals = deg / top if top > 0 else np.zeros_like(deg)
    return NodeQuality(QualityMeasure.DEGREE, dict(zip(graph.nodes, vals.tolist())))


def betweenness_quality(graph: KnowledgeGraph) -> NodeQuality:
    """Brandes betweenness, normalised by the number of node pairs not
    containing the node, ``(n-1)(n-2)/2``."""
    nbrs = graph._neighbor_lists()
    n = len(nbrs)
    cb = np.zeros(n)
    for s in range(n):
        stack = []
        preds = [[] for _ in range(n)]
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1, dtype=int)
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in nbrs[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = np.zeros(n)
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                cb[w] += delta[w]
    # every unordered pair was visited from both ends
    cb /= 2.0
    if n >= 3:
        cb /= (n - 1) * (n - 2) / 2.0
    else:
        cb[:] = 0.0
    return NodeQuality(QualityMeasure.BETWEENNESS, dict(zip(graph.nodes, cb.tolist())))


QUALITY_FUNCTIONS = {
    QualityMeasure.PAGERANK: pagerank,
    QualityMeasure.DEGREE: degree_quality,
    QualityMeasure.BETWEENNESS: betweenness_quality,
}


def node_quality(graph: KnowledgeGraph, measure: QualityMeasure) -> NodeQuality:
    return QUALITY_FUNCTIONS[QualityMeasure(measure)](graph)


def graph_to_dict(graph: KnowledgeGraph, weights, qualities=()) -> dict:
    """Canonical, JSON-ready description of a weighted graph."""
    out = {
        "nodes": [{"name": n.name, "kind": n.kind.value} for n in sorted(graph.nodes)],
        "edges": [
            [graph.symptoms[s], graph.diseases[d], float(weights[e])]
            for e, (s, d) in enumerate(zip(graph.edge_symptom, graph.edge_disease))
        ],
        "quality": {},
    }
    for q in qualities:
        out["quality"][q.measure.value] = {
            f"{node.kind.value}:{node.name}": q.values[node] for node in sorted(q.values)
        }
    return out


def graph_to_json(graph: KnowledgeGraph, weights, qualities=()) -> str:
    return json.dumps(graph_to_dict(graph, weights, qualities), sort_keys=True, indent=2) + "\n"
