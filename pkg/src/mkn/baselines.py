"""Comparison systems: per-disease logistic regression and a binary-atom
variant of the network (all symptoms thresholded to {0, 1}, no node
potential) standing in for a Markov logic network."""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import expit

from .core import GpfMode, ModelConfig
from .encode import EncodingKind
from .errors import DivergenceDetected, EmptyCorpus
from .inference import DiagnosisResult, rank


@dataclass
class LogisticModel:
    """One logistic regression per disease over a shared symptom vocabulary."""

    vocabulary: tuple  # symptom names, feature order
    diseases: tuple
    coef: np.ndarray  # diseases x features
    bias: np.ndarray  # diseases
    encoding: EncodingKind = EncodingKind.IMPROVED_SIGMOID
    loss_trace: list = None

    def features(self, records) -> np.ndarray:
        return _design_matrix(records, self.vocabulary, self.encoding)

    def predict_proba(self, X) -> np.ndarray:
        return expit(np.atleast_2d(X) @ self.coef.T + self.bias)


def _design_matrix(records, vocabulary, encoding):
    col = {n: i for i, n in enumerate(vocabulary)}
    X = np.zeros((len(records), len(vocabulary)))
    for r, rec in enumerate(records):
        for name, v in rec.encoded(encoding).items():
            if name in col:
                X[r, col[name]] = v
    return X


def log_loss(X, Y, coef, bias) -> float:
    """Summed binary cross-entropy over records and diseases."""
    z = X @ coef.T + bias
    return math.fsum((np.logaddexp(0.0, z) - Y * z).ravel())


def log_loss_gradient(X, Y, coef, bias):
    resid = expit(X @ coef.T + bias) - Y  # records x diseases
    return resid.T @ X, resid.sum(axis=0)


def lr_train(records, vocabulary, diseases, rate=0.01, iters=100,
             encoding=EncodingKind.IMPROVED_SIGMOID) -> LogisticModel:
    """Batch gradient descent on summed log-loss from all-zero parameters."""
    records = list(records)
    if not records:
        raise EmptyCorpus("no training records")
    vocabulary, diseases = tuple(vocabulary), tuple(diseases)
    X = _design_matrix(records, vocabulary, encoding)
    didx = {d: i for i, d in enumerate(diseases)}
    Y = np.zeros((len(records), len(diseases)))
    for r, rec in enumerate(records):
        for d in rec.diseases:
            if d in didx:
                Y[r, didx[d]] = 1.0
    coef = np.zeros((len(diseases), len(vocabulary)))
    bias = np.zeros(len(diseases))
    trace = [log_loss(X, Y, coef, bias)]
    for t in range(iters):
        gc, gb = log_loss_gradient(X, Y, coef, bias)
        coef = coef - rate * gc
        bias = bias - rate * gb
        loss = log_loss(X, Y, coef, bias)
        if not (math.isfinite(loss) and np.all(np.isfinite(coef)) and np.all(np.isfinite(bias))):
            raise DivergenceDetected(f"logistic regression diverged at iteration {t + 1}")
        trace.append(loss)
    return LogisticModel(vocabulary, diseases, coef, bias, encoding, trace)


def lr_diagnose(model: LogisticModel, record) -> DiagnosisResult:
    p = model.predict_proba(model.features([record]))[0]
    known = set(model.vocabulary)
    skipped = sum(1 for o in {o.symptom for o in record.observations} if o not in known)
    return DiagnosisResult(rank(model.diseases, p), record.id, skipped)


def binary_proxy_config(base: ModelConfig = None) -> ModelConfig:
    """Config of the binary-atom comparator; sigma/distance/quality kept from ``base``."""
    base = base or ModelConfig()
    return replace(base, encoding=EncodingKind.BINARY, gpf_mode=GpfMode.OFF)
