import numpy as np
import pytest
from scipy.special import expit

from mkn.core import GroundNetwork
from mkn.errors import InvalidSpec
from mkn.kgraph import build_graph, format_rules
from mkn.records import format_records
from mkn.synth import SynthSpec, generate_knowledge, sample_records, split_records


def network(spec):
    graph, w = build_graph(generate_knowledge(spec))
    return GroundNetwork(graph, w)


def test_knowledge_deterministic():
    spec = SynthSpec(5, 8, 0.3, seed=7)
    a, b = generate_knowledge(spec), generate_knowledge(spec)
    assert a == b
    g, w = build_graph(a)
    assert format_rules(g, w) == format_rules(*build_graph(b))
    assert generate_knowledge(SynthSpec(5, 8, 0.3, seed=8)) != a


def test_every_disease_has_a_rule():
    spec = SynthSpec(30, 5, 0.01, seed=3)
    assert {r.disease for r in generate_knowledge(spec)} == {f"d{i:02d}" for i in range(30)}


def test_full_density():
    rules = generate_knowledge(SynthSpec(4, 6, 1.0))
    assert len({(r.symptom, r.disease) for r in rules}) == 24


def test_constant_weight_range():
    assert {r.weight for r in generate_knowledge(SynthSpec(weight_range=(0.5, 0.5)))} == {0.5}


@pytest.mark.parametrize("bad", [
    dict(n_diseases=0), dict(edge_density=0.0), dict(edge_density=1.5), dict(weight_range=(2, 1)),
    dict(diseases_per_record=(0, 1)), dict(diseases_per_record=(3, 2)), dict(noise_rate=2.0)])
def test_invalid(bad):
    with pytest.raises(InvalidSpec):
        generate_knowledge(SynthSpec(**bad))


def test_records_deterministic():
    spec = SynthSpec(n_records=50, seed=4)
    net = network(spec)
    a = format_records(sample_records(net, spec))
    assert a == format_records(sample_records(net, spec))
    other = SynthSpec(n_records=50, seed=5)
    assert format_records(sample_records(net, other)) != a


def present_rates(weight, n):
    spec = SynthSpec(3, 6, 0.5, (weight, weight), n, (1, 1), seed=11)
    net = network(spec)
    recs = sample_records(net, spec)
    g = net.graph
    hits = np.zeros(g.n_edges)
    trials = np.zeros(g.n_edges)
    for rec in recs:
        mods = {o.symptom: o.modifier.value for o in rec.observations}
        d = g.disease_index[rec.diseases[0]]
        for e in g._disease_edges[d]:
            trials[e] += 1
            hits[e] += mods.get(g.symptoms[g.edge_symptom[e]]) == "present"
    return net, hits, trials


def test_saturated_weight():
    _, hits, trials = present_rates(10.0, 300)
    assert hits.sum() / trials.sum() > 0.99


@pytest.mark.parametrize("weight", [0.0, -1.0, 1.7])
def test_present_rate_binomial(weight):
    # one gold disease per record, and noise never touches a blanket symptom
    net, hits, trials = present_rates(weight, 3000)
    p = float(expit(weight))
    for h, t in zip(hits, trials):
        se = np.sqrt(p * (1 - p) / t)
        assert abs(h / t - p) < 3 * se
    assert weight != 0.0 or abs(hits.sum() / trials.sum() - 0.5) < 0.02


def test_gold_count_range():
    spec = SynthSpec(n_records=100, diseases_per_record=(2, 4))
    recs = sample_records(network(spec), spec)
    assert all(2 <= len(r.diseases) <= 4 for r in recs)
    assert all(list(r.diseases) == sorted(r.diseases) for r in recs)


def test_split():
    recs = list(range(10))
    train, test = split_records(recs, 0.3)
    assert train == list(range(7)) and test == [7, 8, 9]
