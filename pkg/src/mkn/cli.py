"""Command line: ``mkn {build,learn,diagnose,infer-rule,eval,synth}``.

Exit codes: 0 success, 2 input error, 3 numeric divergence.
"""

import argparse
import json
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .baselines import binary_proxy_config, lr_diagnose, lr_train
from .core import GpfMode, GroundNetwork, ModelConfig
from .encode import EncodingKind
from .errors import DivergenceDetected, InputError, MKNError
from .inference import (TAUTOLOGY, diagnose, diagnose_many, evidence_of, parse_formula,
                        rule_probability)
from .kgraph import (QualityMeasure, betweenness_quality, build_graph, degree_quality,
                     format_rules, graph_to_dict, pagerank, parse_rules)
from .learning import LearningConfig, TrainingSet, WeightMode, format_loss_trace, learn_weights
from .metrics import atomic_write, build_report, emit_report
from .records import format_records, load_records
from .synth import SynthSpec, generate_knowledge, sample_records, split_records

log = logging.getLogger("mkn")

EXIT_INPUT = 2
EXIT_DIVERGENCE = 3


def bundled(name):
    return resources.files("mkn").joinpath("data", name)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _shared_parser():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("model")
    g.add_argument("--sigma", type=float, default=1.0, help="GPF influence factor (default 1)")
    g.add_argument("--distance", type=float, default=1.0, help="distance between adjacent nodes (default 1)")
    g.add_argument("--gpf-mode", choices=[m.value for m in GpfMode], default="gated")
    g.add_argument("--quality", choices=[m.value for m in QualityMeasure], default="pagerank")
    g.add_argument("--encoding", choices=["modifier", "sigmoid", "improved-sigmoid"], default="improved-sigmoid")
    g = p.add_argument_group("learning")
    g.add_argument("--weight-mode", choices=[m.value for m in WeightMode], default="learned")
    g.add_argument("--rate", type=float, default=0.01, help="learning rate (default 0.01)")
    g.add_argument("--iters", type=int, default=100, help="gradient sweeps (default 100)")
    g.add_argument("--init", type=float, default=0.5, help="initial / constant weight (default 0.5)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--out", default="mkn_out", help="output directory (default ./mkn_out)")
    return p


def model_config(args) -> ModelConfig:
    return ModelConfig(args.sigma, args.distance, GpfMode(args.gpf_mode),
                       QualityMeasure(args.quality), EncodingKind(args.encoding))


def learning_config(args) -> LearningConfig:
    return LearningConfig(args.rate, args.iters, args.init, WeightMode(args.weight_mode))


def _echo(args, **extra) -> dict:
    cfg = {"command": args.command, "seed": args.seed}
    cfg.update(model_config(args).to_dict())
    cfg.update(learning_config(args).to_dict())
    cfg.update(extra)
    return cfg


def _existing(path) -> Path:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"no such file: {path}")
    return p


def _load_network(rules_path, config, init=None) -> GroundNetwork:
    graph, weights = build_graph(parse_rules(_existing(rules_path)), init)
    return GroundNetwork(graph, weights, config=config)


def _rules_arg(args):
    return args.rules if args.rules is not None else str(bundled("toy_rules.tsv"))


# --- commands -------------------------------------------------------------


def cmd_build(args):
    rules_path = _rules_arg(args)
    init = args.init if args.weight_mode == "constant" else None
    graph, weights = build_graph(parse_rules(_existing(rules_path)), init)
    qualities = [pagerank(graph), degree_quality(graph), betweenness_quality(graph)]
    out = Path(args.out)
    doc = graph_to_dict(graph, weights, qualities)
    config = _echo(args, rules=str(rules_path))
    atomic_write(out / "graph.json", _dump({"graph": {k: doc[k] for k in ("nodes", "edges")}, "config": config}))
    atomic_write(out / "quality.json", _dump({"quality": doc["quality"], "config": config}))
    print(f"built {graph!r} -> {out / 'graph.json'}")
    return 0


def cmd_learn(args):
    config = model_config(args)
    lconf = learning_config(args)
    network = _load_network(_rules_arg(args), config, init=lconf.init_weight)
    records = load_records(_existing(args.records))
    data = TrainingSet(network, records)
    result = learn_weights(network, data, lconf)
    out = Path(args.out)
    atomic_write(out / "learned_rules.tsv", format_rules(network.graph, result.weights))
    atomic_write(out / "loss_trace.csv", format_loss_trace(result.loss_trace))
    summary = {
        "config": _echo(args, rules=str(_rules_arg(args)), records=args.records),
        "final_negative_pll": result.loss_trace[-1],
        "initial_negative_pll": result.loss_trace[0],
        "n_records": len(data),
        "unmatched_gold": data.unmatched,
    }
    atomic_write(out / "learn.json", _dump(summary))
    print(f"negative PLL {result.loss_trace[0]:.4f} -> {result.loss_trace[-1]:.4f}; wrote {out / 'learned_rules.tsv'}")
    return 0


def cmd_diagnose(args):
    network = _load_network(_rules_arg(args), model_config(args),
                            init=args.init if args.weight_mode == "constant" else None)
    records = load_records(_existing(args.records))
    lines = [diagnose(network, rec).to_json() + "\n" for rec in records]
    out = Path(args.out)
    atomic_write(out / "diagnoses.jsonl", "".join(lines))
    atomic_write(out / "diagnose.json", _dump({"config": _echo(args, rules=str(_rules_arg(args)),
                                                                records=args.records)}))
    sys.stdout.write("".join(lines))
    return 0


def cmd_infer_rule(args):
    network = _load_network(_rules_arg(args), model_config(args),
                            init=args.init if args.weight_mode == "constant" else None)
    evidence = {}
    if args.records:
        records = load_records(_existing(args.records))
        match = [r for r in records if args.record_id is None or r.id == args.record_id]
        if not match:
            raise InputError(f"record {args.record_id!r} not found")
        evidence, _ = evidence_of(network, match[0])
    target = parse_formula(args.target)
    given = parse_formula(args.given) if args.given else TAUTOLOGY
    p = rule_probability(network, target, given, evidence)
    doc = {"target": target.label, "given": given.label, "probability": p,
           "config": _echo(args, rules=str(_rules_arg(args)))}
    atomic_write(Path(args.out) / "infer_rule.json", _dump(doc))
    print(_dump(doc), end="")
    return 0


def _system_network(args, config):
    rules_path = _rules_arg(args)
    constant = args.weight_mode == "constant"
    network = _load_network(rules_path, config, init=args.init if constant else None)
    if args.train and not constant:
        base = network.with_weights(np.full(network.graph.n_edges, args.init))
        network = learn_weights(base, TrainingSet(base, load_records(_existing(args.train))),
                                learning_config(args)).network
    return network


def cmd_eval(args):
    records = load_records(_existing(args.records))
    config = model_config(args)
    if args.system == "lr":
        if not args.train:
            raise InputError("--system lr needs --train records")
        train = load_records(_existing(args.train))
        graph, _ = build_graph(parse_rules(_existing(_rules_arg(args))), init_weight=0.0)
        model = lr_train(train, graph.symptoms, graph.diseases, args.rate, args.iters, config.encoding)
        results = [lr_diagnose(model, r) for r in records]
    else:
        if args.system == "binary-proxy":
            config = binary_proxy_config(config)
        network = _system_network(args, config)
        results = diagnose_many(network, records)
    echo = _echo(args, system=args.system, rules=str(_rules_arg(args)), records=args.records,
                 train=args.train)
    if args.system == "binary-proxy":
        echo.update(encoding=config.encoding.value, gpf_mode=config.gpf_mode.value)
    report = build_report(results, records, args.system, echo)
    paths = emit_report(report, args.out)
    agg = report.aggregates()
    print(f"{args.system}: P@10 {agg['p_at_10']:.4f} P@20 {agg['p_at_20']:.4f} "
          f"R@10 {agg['r_at_10_avg']:.4f} DCG-AVG {agg['dcg_avg']:.4f} -> {paths['json']}")
    return 0


def cmd_synth(args):
    spec = SynthSpec(args.diseases, args.symptoms, args.density, (args.weight_low, args.weight_high),
                     args.records, (args.min_diseases, args.max_diseases), args.seed)
    rules = generate_knowledge(spec)
    graph, weights = build_graph(rules)
    network = GroundNetwork(graph, weights, config=model_config(args))
    records = sample_records(network, spec)
    train, test = split_records(records, args.test_fraction)
    out = Path(args.out)
    atomic_write(out / "rules.tsv", format_rules(graph, weights))
    atomic_write(out / "train.jsonl", format_records(train))
    atomic_write(out / "test.jsonl", format_records(test))
    atomic_write(out / "synth.json", _dump({"spec": spec.to_dict(), "config": _echo(args),
                                            "n_train": len(train), "n_test": len(test)}))
    print(f"{len(rules)} rules, {len(train)} train / {len(test)} test records -> {out}")
    return 0


def build_parser():
    shared = _shared_parser()
    parser = argparse.ArgumentParser(prog="mkn", description="Medical knowledge network toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[shared], help="build the graph and node qualities")
    p.add_argument("rules", nargs="?", default=None, help="rule file (default: bundled toy rules)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("learn", parents=[shared], help="learn rule weights from records")
    p.add_argument("--rules", default=None)
    p.add_argument("--records", required=True)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("diagnose", parents=[shared], help="rank diseases for each record")
    p.add_argument("--rules", default=None)
    p.add_argument("--records", required=True)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("infer-rule", parents=[shared], help="P(target | given) over rule formulas")
    p.add_argument("--rules", default=None)
    p.add_argument("--target", required=True, help="e.g. 'cough -> flu' or 'disease:flu & symptom:cough'")
    p.add_argument("--given", default=None)
    p.add_argument("--records", default=None, help="record file supplying evidence")
    p.add_argument("--record-id", default=None)
    p.set_defaults(func=cmd_infer_rule)

    p = sub.add_parser("eval", parents=[shared], help="score a diagnostic system on records")
    p.add_argument("--rules", default=None)
    p.add_argument("--records", required=True, help="records to evaluate")
    p.add_argument("--train", default=None, help="training records (learns weights / fits LR)")
    p.add_argument("--system", choices=["mkn", "binary-proxy", "lr"], default="mkn")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", parents=[shared], help="generate a synthetic knowledge base and corpus")
    d = SynthSpec()
    p.add_argument("--diseases", type=int, default=d.n_diseases)
    p.add_argument("--symptoms", type=int, default=d.n_symptoms)
    p.add_argument("--density", type=float, default=d.edge_density)
    p.add_argument("--weight-low", type=float, default=d.weight_range[0])
    p.add_argument("--weight-high", type=float, default=d.weight_range[1])
    p.add_argument("--records", type=int, default=d.n_records)
    p.add_argument("--min-diseases", type=int, default=d.diseases_per_record[0])
    p.add_argument("--max-diseases", type=int, default=d.diseases_per_record[1])
    p.add_argument("--test-fraction", type=float, default=0.3)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DivergenceDetected as exc:
        log.error("%s", exc)
        return EXIT_DIVERGENCE
    except (MKNError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
