"""How node quality, the node potential and the symptom encoding change one diagnosis."""

# %% Setup
from importlib import resources

from mkn import GroundNetwork, ModelConfig
from mkn.core import GpfMode
from mkn.encode import EncodingKind, improved_sigmoid, logistic
from mkn.inference import diagnose
from mkn.kgraph import QualityMeasure, build_graph, parse_rules
from mkn.records import load_records

data = resources.files("mkn").joinpath("data")
graph, weights = build_graph(parse_rules(data / "toy_rules.tsv"))
rec = load_records(data / "toy_records.jsonl")[0]

# %% The encodings side by side
for x in (0.0, 0.5, 1.0, 2.0, 3.0):
    print(f"x={x:3.1f}  improved={float(improved_sigmoid(x)):.4f}  logistic={float(logistic(x)):.4f}")

# %% Sweep the configuration space for one record
for mode in GpfMode:
    for measure in QualityMeasure:
        for enc in (EncodingKind.IMPROVED_SIGMOID, EncodingKind.MODIFIER):
            net = GroundNetwork(graph, weights, config=ModelConfig(gpf_mode=mode, quality_measure=measure,
                                                                   encoding=enc))
            d, p = diagnose(net, rec).ranked[0]
            print(f"{mode.value:8s} {measure.value:12s} {enc.value:17s} -> {d} ({p:.3f})")
