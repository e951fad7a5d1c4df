"""Rule-weight learning by batch gradient ascent on the pseudo-log-likelihood.

Diseases are treated as independent given their Markov blankets, so the
objective is the sum over records and diseases of
``log P(y_d = gold | blanket)``. Its derivative for rule ``i`` joining
symptom ``s`` to disease ``d`` is ``sum_j x_js * (y_jd - P(y_jd = 1))``.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .core import GroundNetwork
from .errors import DivergenceDetected, EmptyCorpus, InputError
from .inference import evidence_matrix, risk_logits


class WeightMode(enum.Enum):
    LEARNED = "learned"
    CONSTANT = "constant"
    LEARNED_NONNEGATIVE = "nonneg"


@dataclass(frozen=True)
class LearningConfig:
    learning_rate: float = 0.01
    iterations: int = 100
    init_weight: float = 0.5
    weight_mode: WeightMode = WeightMode.LEARNED

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise InputError("learning rate must be positive")
        if self.iterations < 1:
            raise InputError("iterations must be at least 1")
        if not math.isfinite(self.init_weight):
            raise InputError("init weight must be finite")
        object.__setattr__(self, "weight_mode", WeightMode(self.weight_mode))

    def to_dict(self) -> dict:
        return {
            "rate": self.learning_rate,
            "iters": self.iterations,
            "init": self.init_weight,
            "weight_mode": self.weight_mode.value,
        }


class TrainingSet:
    """Records encoded against one network.

    ``X`` holds encoded symptom values (records x symptoms) and ``Y`` the
    gold labels (records x diseases); a disease missing from a record is 0.
    Gold names the graph does not know are counted in ``unmatched``.
    """

    def __init__(self, network: GroundNetwork, records):
        records = list(records)
        if not records:
            raise EmptyCorpus("training set is empty")
        self.records = records
        self.X = evidence_matrix(network, records)
        idx = network.graph.disease_index
        self.Y = np.zeros((len(records), len(idx)))
        self.unmatched = 0
        for r, rec in enumerate(records):
            for name in rec.diseases:
                if name in idx:
                    self.Y[r, idx[name]] = 1.0
                else:
                    self.unmatched += 1

    def __len__(self):
        return len(self.records)


def _log_terms(network, data):
    theta = risk_logits(network, data.X)
    # log P(y = gold) for a two-state softmax with log-odds theta
    return data.Y * theta - np.logaddexp(0.0, theta)


def pseudo_log_likelihood(network: GroundNetwork, data: TrainingSet) -> float:
    return math.fsum(_log_terms(network, data).ravel())


def _gradient_terms(network, data):
    g = network.graph
    resid = data.Y - expit(risk_logits(network, data.X))
    return data.X[:, g.edge_symptom] * resid[:, g.edge_disease]


def pll_gradient(network: GroundNetwork, data: TrainingSet, edge: int) -> float:
    if not 0 <= edge < network.graph.n_edges:
        raise InputError(f"edge index {edge} out of range")
    return math.fsum(_gradient_terms(network, data)[:, edge])


def pll_gradient_vector(network: GroundNetwork, data: TrainingSet) -> np.ndarray:
    terms = _gradient_terms(network, data)
    return np.array([math.fsum(col) for col in terms.T])


@dataclass
class LearningResult:
    weights: np.ndarray
    loss_trace: list  # negative PLL; entry 0 at the initial weights
    network: GroundNetwork
    config: LearningConfig


def _project_nonnegative(w):
    neg = w < 0
    if neg.any():
        pos = w[w > 0]
        w = w.copy()
        w[neg] = pos.min() if len(pos) else 0.0
    return w


def learn_weights(network: GroundNetwork, data: TrainingSet, config: LearningConfig = LearningConfig()):
    """Run ``config.iterations`` synchronous sweeps of
    ``w <- w + rate * gradient`` starting from ``config.init_weight``."""
    w = np.full(network.graph.n_edges, float(config.init_weight))
    net = network.with_weights(w)
    loss = -pseudo_log_likelihood(net, data)
    trace = [loss]
    if config.weight_mode is WeightMode.CONSTANT:
        return LearningResult(w, trace, net, config)

    for t in range(1, config.iterations + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            w = w + config.learning_rate * pll_gradient_vector(net, data)
        if config.weight_mode is WeightMode.LEARNED_NONNEGATIVE:
            w = _project_nonnegative(w)
        if not np.all(np.isfinite(w)):
            raise DivergenceDetected(f"weights became non-finite at iteration {t}")
        net = network.with_weights(w)
        loss = -pseudo_log_likelihood(net, data)
        if not math.isfinite(loss):
            raise DivergenceDetected(f"loss became non-finite at iteration {t}")
        trace.append(loss)
    return LearningResult(w, trace, net, config)


def format_loss_trace(trace) -> str:
    lines = ["iteration,negative_pll"]
    lines += [f"{i},{v!r}" for i, v in enumerate(trace)]
    return "\n".join(lines) + "\n"
