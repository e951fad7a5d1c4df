"""Build the bundled respiratory toy network and rank diseases for a few patients."""

# %% Load the rules and inspect the graph
from importlib import resources

from mkn import GroundNetwork, ModelConfig
from mkn.inference import diagnose, markov_blanket
from mkn.kgraph import build_graph, pagerank, parse_rules
from mkn.records import load_records

data = resources.files("mkn").joinpath("data")
graph, weights = build_graph(parse_rules(data / "toy_rules.tsv"))
print(graph)

# %% Node quality: PageRank over the undirected graph
pr = pagerank(graph)
for node, value in sorted(pr.values.items(), key=lambda t: -t[1])[:5]:
    print(f"{node.kind.value:8s} {node.name:12s} {value:.4f}")

# %% Each disease only looks at its own rules
net = GroundNetwork(graph, weights, config=ModelConfig())
mb = markov_blanket(net, "pneumonia")
print("pneumonia blanket:", [s.name for s in mb.symptoms])

# %% Rank diseases for every bundled record
for rec in load_records(data / "toy_records.jsonl"):
    res = diagnose(net, rec)
    top = ", ".join(f"{d} {p:.3f}" for d, p in res.ranked[:3])
    print(f"{rec.id}: gold={list(rec.diseases)} top3=[{top}]")
