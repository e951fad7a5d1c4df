"""Network with graded evidence vs. the binary-atom proxy vs. logistic regression."""

# %% Shared corpus
import numpy as np

from mkn import GroundNetwork, ModelConfig
from mkn.baselines import binary_proxy_config, lr_diagnose, lr_train
from mkn.inference import diagnose_many
from mkn.kgraph import build_graph
from mkn.learning import LearningConfig, TrainingSet, learn_weights
from mkn.metrics import build_report
from mkn.synth import SynthSpec, generate_knowledge, sample_records, split_records

rows = []
for seed in range(5):
    spec = SynthSpec(n_records=500, seed=seed)
    graph, w = build_graph(generate_knowledge(spec))
    train, test = split_records(sample_records(GroundNetwork(graph, w), spec))

    # both network variants learn their own weights
    scores = {}
    for label, config in (("mkn", ModelConfig()), ("binary-proxy", binary_proxy_config())):
        base = GroundNetwork(graph, np.full(graph.n_edges, 0.5), config=config)
        net = learn_weights(base, TrainingSet(base, train), LearningConfig()).network
        scores[label] = build_report(diagnose_many(net, test), test, label).dcg_avg

    # logistic regression on the same features
    model = lr_train(train, graph.symptoms, graph.diseases)
    scores["lr"] = build_report([lr_diagnose(model, r) for r in test], test, "lr").dcg_avg
    rows.append(scores)
    print(f"seed {seed}: " + "  ".join(f"{k} {v:.3f}" for k, v in scores.items()))

# %% Averages over seeds
for k in rows[0]:
    print(f"{k:13s} mean DCG-AVG {np.mean([r[k] for r in rows]):.3f}")
