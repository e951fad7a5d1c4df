import numpy as np
import pytest

from mkn.core import GroundNetwork, ModelConfig
from mkn.kgraph import KnowledgeGraph, KnowledgeRule, build_graph


def make_network(edges, weights=None, config=None, quality=None, extra_diseases=(), extra_symptoms=()):
    """Network from (symptom, disease) pairs; weights default to 1."""
    graph = KnowledgeGraph([s for s, _ in edges] + list(extra_symptoms),
                           [d for _, d in edges] + list(extra_diseases), edges)
    w = np.ones(len(edges)) if weights is None else np.asarray(weights, dtype=float)
    return GroundNetwork(graph, w, quality=quality, config=config or ModelConfig())


def random_network(rng, max_diseases=5, max_symptoms=8, config=None, weight_scale=1.5):
    nd = int(rng.integers(1, max_diseases + 1))
    ns = int(rng.integers(1, max_symptoms + 1))
    edges = []
    for d in range(nd):
        picks = np.flatnonzero(rng.random(ns) < 0.4)
        if len(picks) == 0:
            picks = [int(rng.integers(ns))]
        edges += [(f"s{s}", f"d{d}") for s in picks]
    rules = [KnowledgeRule(s, d, float(rng.normal(0, weight_scale))) for s, d in edges]
    graph, w = build_graph(rules)
    return GroundNetwork(graph, w, config=config or ModelConfig())


def random_evidence(rng, network, levels=(0.0, 0.462117157, 0.964027580, 1.0, 2.0)):
    return {s: float(rng.choice(levels)) for s in network.graph.symptoms if rng.random() < 0.7}


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
