"""Disease risk, ranked diagnosis and rule-conditional queries."""

import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import expit, logsumexp

from .core import (ENUMERATION_LIMIT, GpfMode, GroundNetwork, WorldState, _world_table,
                   enumerate_assignments, log_score_batch)
from .encode import Modifier, SymptomObservation, encode
from .errors import EnumerationTooLarge, GivenHasZeroMass, InputError, UnknownDisease
from .kgraph import NodeId, NodeKind, disease as disease_node, symptom as symptom_node
from .records import EvidenceRecord


@dataclass(frozen=True)
class MarkovBlanket:
    disease: NodeId
    rules: tuple
    symptoms: tuple


@dataclass
class DiagnosisResult:
    ranked: list  # (disease name, probability), best first
    record_id: Optional[str] = None
    skipped_symptoms: int = 0
    metadata: dict = field(default_factory=dict)

    @property
    def diseases(self) -> list:
        return [d for d, _ in self.ranked]

    def to_dict(self) -> dict:
        return {
            "record_id": self.record_id,
            "ranked": [{"disease": d, "probability": p} for d, p in self.ranked],
            "skipped_symptoms": self.skipped_symptoms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def rank(names: Sequence[str], probs) -> list:
    """Sort by probability descending, then name ascending."""
    pairs = [(n, float(p)) for n, p in zip(names, probs)]
    return sorted(pairs, key=lambda t: (-t[1], t[0]))


def markov_blanket(network: GroundNetwork, disease: str) -> MarkovBlanket:
    g = network.graph
    if disease not in g.disease_index:
        raise UnknownDisease(disease)
    rules = tuple(g.edges_of_disease(disease))
    seen = []
    for e in rules:
        s = g.symptoms[g.edge_symptom[e]]
        if s not in seen:
            seen.append(s)
    return MarkovBlanket(disease_node(disease), rules, tuple(symptom_node(s) for s in seen))


def _activation_terms(network: GroundNetwork, x: np.ndarray, d: int):
    """Log-score parts that move with disease ``d``: ``(A0, A1)``.

    Pairwise terms come from the disease's own rules. With a gated
    potential, ``d`` also enters the Gaussian term of every rule whose
    symptom neighbours ``d``; the other diseases' share of those terms is
    identical in both cases and is left out.
    """
    g = network.graph
    rules = network.graph._disease_edges[d]
    a1 = 0.0
    for e in rules:
        a1 += network.weights[e] * x[g.edge_symptom[e]]
    if network.config.gpf_mode is GpfMode.GATED:
        c = network.config.gpf_factor * network.disease_quality[d]
        for e in rules:
            s = g.edge_symptom[e]
            # the symptom's potential is counted once per rule it appears in
            a1 += c * len(g._symptom_edges[s]) * x[s]
    return 0.0, float(a1)


def disease_risk(network: GroundNetwork, evidence: dict, disease: str, active: bool = True) -> float:
    """P(disease active | evidence), evidence being encoded symptom values.

    Symptoms missing from ``evidence`` are 0. With ``active=False`` the
    complementary probability is returned, computed from the same terms.
    """
    d = network.disease_position(disease)
    x = network.symptom_vector(evidence)
    a0, a1 = _activation_terms(network, x, d)
    top = max(a0, a1)
    e0, e1 = np.exp(a0 - top), np.exp(a1 - top)
    return float((e1 if active else e0) / (e0 + e1))


def risk_logits(network: GroundNetwork, X: np.ndarray) -> np.ndarray:
    """Activation log-odds for every (record, disease); ``X`` is records x symptoms."""
    g = network.graph
    X = np.atleast_2d(X)
    xe = X[:, g.edge_symptom]
    theta = (xe * network.weights) @ g.disease_incidence
    if network.config.gpf_mode is GpfMode.GATED:
        deg = g.symptom_degrees()
        adj = g.symptom_incidence.T @ g.disease_incidence
        theta = theta + network.config.gpf_factor * network.disease_quality * ((X * deg) @ adj)
    return theta


def risk_matrix(network: GroundNetwork, X: np.ndarray) -> np.ndarray:
    return expit(risk_logits(network, X))


def evidence_of(network: GroundNetwork, record: EvidenceRecord):
    """Encode a record under the network's encoding; returns (evidence, skipped)."""
    enc = record.encoded(network.config.encoding)
    known = {k: v for k, v in enc.items() if k in network.graph.symptom_index}
    return known, len(enc) - len(known)


def evidence_matrix(network: GroundNetwork, records) -> np.ndarray:
    return np.array([network.symptom_vector(evidence_of(network, r)[0]) for r in records]).reshape(
        len(records), len(network.graph.symptoms))


def diagnose(network: GroundNetwork, record, query: Optional[Sequence[str]] = None) -> DiagnosisResult:
    """Risk of every query disease (all diseases by default), ranked."""
    if isinstance(record, EvidenceRecord):
        evidence, skipped = evidence_of(network, record)
        rid = record.id
    else:
        evidence = {k: v for k, v in record.items() if k in network.graph.symptom_index}
        skipped, rid = len(record) - len(evidence), None
    names = list(network.graph.diseases if query is None else query)
    probs = [disease_risk(network, evidence, d) for d in names]
    return DiagnosisResult(rank(names, probs), rid, skipped)


def diagnose_many(network: GroundNetwork, records) -> list:
    """Vectorised :func:`diagnose` over all diseases for many records."""
    P = risk_matrix(network, evidence_matrix(network, records))
    out = []
    for rec, row in zip(records, P):
        _, skipped = evidence_of(network, rec)
        out.append(DiagnosisResult(rank(network.graph.diseases, row), rec.id, skipped))
    return out


def brute_force_disease_risk(network: GroundNetwork, evidence: dict, disease: str,
                             limit=ENUMERATION_LIMIT) -> float:
    """Marginal P(disease active | evidence) by summing the joint over every
    disease assignment. Exponential; meant as a test oracle."""
    g = network.graph
    if len(g.diseases) > limit:
        raise EnumerationTooLarge(len(g.diseases), limit)
    d = network.disease_position(disease)
    world = WorldState({k: v for k, v in evidence.items() if k in g.symptom_index}, {})
    _, y, scores = _world_table(network, world, list(g.diseases), limit)
    active = y[:, d] == 1
    return float(np.exp(logsumexp(scores[active]) - logsumexp(scores)))


# --- rule queries ------------------------------------------------------


@dataclass(frozen=True)
class Formula:
    """A boolean statement over ground atoms; an atom is true when its value is non-zero."""

    atoms: tuple
    test: Callable
    label: str = ""

    def holds(self, truth: dict) -> bool:
        return bool(self.test(truth))

    def __and__(self, other):
        return Formula(_merge(self.atoms, other.atoms), lambda t: self.holds(t) and other.holds(t),
                       f"({self.label} & {other.label})")

    def __or__(self, other):
        return Formula(_merge(self.atoms, other.atoms), lambda t: self.holds(t) or other.holds(t),
                       f"({self.label} | {other.label})")

    def __invert__(self):
        return Formula(self.atoms, lambda t: not self.holds(t), f"~{self.label}")


def _merge(a, b):
    return tuple(dict.fromkeys(a + b))


TAUTOLOGY = Formula((), lambda t: True, "true")


def atom(node: NodeId) -> Formula:
    return Formula((node,), lambda t: t[node], f"{node.kind.value}:{node.name}")


def indication(symptom: str, disease: str) -> Formula:
    """The rule "symptom indicates disease" as material implication."""
    return ~atom(symptom_node(symptom)) | atom(disease_node(disease))


def parse_formula(text: str) -> Formula:
    """Parse ``symptom:cough & disease:flu`` / ``cough -> flu`` / ``true``.

    Conjunction (``&``) of literals, each ``kind:name`` optionally prefixed
    by ``~``; a single ``symptom -> disease`` is an indication rule.
    """
    text = text.strip()
    if text in ("", "true"):
        return TAUTOLOGY
    if "->" in text:
        s, d = (p.strip() for p in text.split("->", 1))
        return indication(s, d)
    out = None
    for part in text.split("&"):
        part = part.strip()
        neg = part.startswith("~")
        part = part.lstrip("~").strip()
        kind, _, name = part.partition(":")
        if kind not in ("symptom", "disease") or not name:
            raise InputError(f"cannot parse literal {part!r}")
        lit = atom(NodeId(NodeKind(kind), name))
        lit = ~lit if neg else lit
        out = lit if out is None else out & lit
    return out


def rule_probability(network: GroundNetwork, target: Formula, given: Formula = TAUTOLOGY,
                     evidence: Optional[dict] = None, limit=ENUMERATION_LIMIT) -> float:
    """P(target | given) by enumerating the atoms of both formulas and
    their Markov blankets.

    Diseases take {0, 1}; unobserved symptoms take {0, encoded Present};
    observed symptoms stay at their evidence value and every atom outside
    the enumerated set keeps its evidence value (diseases: 0).
    """
    g = network.graph
    evidence = {k: v for k, v in (evidence or {}).items() if k in g.symptom_index}
    involved = list(_merge(target.atoms, given.atoms))
    for node in list(involved):
        if node.kind is NodeKind.DISEASE:
            if node.name not in g.disease_index:
                raise UnknownDisease(node.name)
            involved += list(markov_blanket(network, node.name).symptoms)
        else:
            if node.name not in g.symptom_index:
                raise InputError(f"unknown symptom {node.name!r}")
            involved += [disease_node(g.diseases[g.edge_disease[e]]) for e in g.edges_of_symptom(node.name)]
    involved = list(dict.fromkeys(involved))
    free = [n for n in involved if not (n.kind is NodeKind.SYMPTOM and n.name in evidence)]
    if len(free) > limit:
        raise EnumerationTooLarge(len(free), limit)

    present = encode(SymptomObservation("_", modifier=Modifier.PRESENT), network.config.encoding)
    x0 = network.symptom_vector(evidence)
    table = enumerate_assignments(len(free))
    scores = np.empty(len(table))
    in_target = np.zeros(len(table), dtype=bool)
    in_given = np.zeros(len(table), dtype=bool)
    for w, bits in enumerate(table):
        x = x0.copy()
        y = np.zeros(len(g.diseases))
        for node, b in zip(free, bits):
            if node.kind is NodeKind.SYMPTOM:
                x[g.symptom_index[node.name]] = present * b
            else:
                y[g.disease_index[node.name]] = b
        truth = {}
        for node in involved:
            if node.kind is NodeKind.SYMPTOM:
                truth[node] = x[g.symptom_index[node.name]] > 0
            else:
                truth[node] = y[g.disease_index[node.name]] > 0
        scores[w] = log_score_batch(network, x, y)[0]
        in_given[w] = given.holds(truth)
        in_target[w] = in_given[w] and target.holds(truth)
    if not in_given.any():
        raise GivenHasZeroMass(f"no world satisfies {given.label}")
    if not in_target.any():
        return 0.0
    return float(np.exp(logsumexp(scores[in_target]) - logsumexp(scores[in_given])))
