"""Ground network: energy, Gaussian node potential, joint distribution.

The unnormalised log-score of a world is

    sum over rules i of  w_i * x_i * y_i + u(x_i) * x_i

where ``x_i``/``y_i`` are the symptom/disease values on rule ``i`` and
``u`` is the Gaussian potential of the rule's symptom, a sum over its
neighbouring diseases of ``m_j * g_j * exp(-(d / sigma)**2)``.
"""

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .encode import EncodingKind
from .errors import EnumerationTooLarge, InputError, UnknownDisease, UnknownSymptom
from .kgraph import KnowledgeGraph, NodeQuality, QualityMeasure, node_quality

ENUMERATION_LIMIT = 20
_CHUNK = 1 << 14


class GpfMode(enum.Enum):
    GATED = "gated"  # neighbour term multiplied by the disease's activation
    UNGATED = "ungated"
    OFF = "off"


@dataclass(frozen=True)
class ModelConfig:
    sigma: float = 1.0
    distance: float = 1.0
    gpf_mode: GpfMode = GpfMode.GATED
    quality_measure: QualityMeasure = QualityMeasure.PAGERANK
    encoding: EncodingKind = EncodingKind.IMPROVED_SIGMOID

    def __post_init__(self):
        if not self.sigma > 0:
            raise InputError("sigma must be positive")
        if not self.distance >= 0:
            raise InputError("distance must be non-negative")
        object.__setattr__(self, "gpf_mode", GpfMode(self.gpf_mode))
        object.__setattr__(self, "quality_measure", QualityMeasure(self.quality_measure))
        object.__setattr__(self, "encoding", EncodingKind(self.encoding))

    @property
    def gpf_factor(self) -> float:
        return float(np.exp(-((self.distance / self.sigma) ** 2)))

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "distance": self.distance,
            "gpf_mode": self.gpf_mode.value,
            "quality": self.quality_measure.value,
            "encoding": self.encoding.value,
        }


class GroundNetwork:
    """Graph, rule weights, node qualities and config, frozen together."""

    def __init__(self, graph: KnowledgeGraph, weights, quality: Optional[NodeQuality] = None,
                 config: Optional[ModelConfig] = None):
        self.graph = graph
        self.config = config or ModelConfig()
        w = np.array(weights, dtype=float)
        if w.shape != (graph.n_edges,):
            raise InputError(f"expected {graph.n_edges} weights, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise InputError("weights must be finite")
        w.setflags(write=False)
        self.weights = w
        if quality is None:
            quality = node_quality(graph, self.config.quality_measure)
        self.quality = quality
        m = quality.disease_vector(graph)
        m.setflags(write=False)
        self.disease_quality = m

    def with_weights(self, weights) -> "GroundNetwork":
        return GroundNetwork(self.graph, weights, self.quality, self.config)

    def with_config(self, config: ModelConfig) -> "GroundNetwork":
        quality = self.quality
        if config.quality_measure is not quality.measure:
            quality = None
        return GroundNetwork(self.graph, self.weights, quality, config)

    # --- value vectors -------------------------------------------------

    def symptom_vector(self, values: dict, strict=False) -> np.ndarray:
        x = np.zeros(len(self.graph.symptoms))
        for name, v in values.items():
            i = self.graph.symptom_index.get(name)
            if i is None:
                if strict:
                    raise UnknownSymptom(name)
                continue
            x[i] = v
        return x

    def disease_vector(self, values: dict) -> np.ndarray:
        y = np.zeros(len(self.graph.diseases))
        for name, v in values.items():
            if name not in self.graph.disease_index:
                raise UnknownDisease(name)
            if v not in (0, 1):
                raise InputError(f"disease value for {name!r} must be 0 or 1")
            y[self.graph.disease_index[name]] = v
        return y

    def disease_position(self, name: str) -> int:
        try:
            return self.graph.disease_index[name]
        except KeyError:
            raise UnknownDisease(name) from None


@dataclass
class WorldState:
    symptom_values: dict = field(default_factory=dict)
    disease_values: dict = field(default_factory=dict)


def _symptom_potentials(network: GroundNetwork, y: np.ndarray) -> np.ndarray:
    """Gaussian potential of every symptom; ``y`` has shape (..., n_diseases)."""
    g = network.graph
    mode = network.config.gpf_mode
    out_shape = y.shape[:-1] + (len(g.symptoms),)
    if mode is GpfMode.OFF:
        return np.zeros(out_shape)
    m = network.disease_quality[g.edge_disease]
    if mode is GpfMode.GATED:
        contrib = m * y[..., g.edge_disease]
    else:
        contrib = np.broadcast_to(m, y.shape[:-1] + m.shape)
    # sum neighbour terms into their symptom slot
    return network.config.gpf_factor * (contrib @ g.symptom_incidence)


def edge_energy(network: GroundNetwork, edge: int, world: WorldState) -> float:
    g = network.graph
    if not 0 <= edge < g.n_edges:
        raise InputError(f"edge index {edge} out of range")
    x = world.symptom_values.get(g.symptoms[g.edge_symptom[edge]], 0.0)
    y = world.disease_values.get(g.diseases[g.edge_disease[edge]], 0)
    return -network.weights[edge] * x * y


def gpf(network: GroundNetwork, symptom: str, world: WorldState) -> float:
    g = network.graph
    if symptom not in g.symptom_index:
        raise UnknownSymptom(symptom)
    y = network.disease_vector(world.disease_values)
    return float(_symptom_potentials(network, y)[g.symptom_index[symptom]])


def log_score_batch(network: GroundNetwork, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Log-score for one symptom vector ``x`` and many disease rows ``y``."""
    g = network.graph
    y = np.atleast_2d(y)
    xe = x[g.edge_symptom]
    pair = (y[:, g.edge_disease] * (network.weights * xe)).sum(axis=1)
    u = _symptom_potentials(network, y)
    node = (u[:, g.edge_symptom] * xe).sum(axis=1)
    return pair + node


def log_score(network: GroundNetwork, world: WorldState) -> float:
    x = network.symptom_vector(world.symptom_values, strict=True)
    y = network.disease_vector(world.disease_values)
    return float(log_score_batch(network, x, y)[0])


def enumerate_assignments(k: int) -> np.ndarray:
    """All 2**k binary rows, in lexicographic order."""
    codes = np.arange(2**k)[:, None]
    return ((codes >> np.arange(k - 1, -1, -1)) & 1).astype(float)


def _world_table(network, world, disease_set, limit):
    if len(disease_set) > limit:
        raise EnumerationTooLarge(len(disease_set), limit)
    x = network.symptom_vector(world.symptom_values, strict=True)
    base = network.disease_vector(world.disease_values)
    cols = [network.disease_position(d) for d in disease_set]
    table = enumerate_assignments(len(cols))
    y = np.tile(base, (len(table), 1))
    y[:, cols] = table
    scores = np.concatenate([
        log_score_batch(network, x, y[i:i + _CHUNK]) for i in range(0, len(y), _CHUNK)
    ])
    return x, y, scores


def log_partition(network: GroundNetwork, world: WorldState, disease_set, limit=ENUMERATION_LIMIT) -> float:
    _, _, scores = _world_table(network, world, list(disease_set), limit)
    return float(logsumexp(scores))


def partition(network: GroundNetwork, world: WorldState, disease_set, limit=ENUMERATION_LIMIT) -> float:
    """Sum of ``exp(log_score)`` over every binary assignment of
    ``disease_set``; the remaining diseases keep their value in ``world``."""
    return float(np.exp(log_partition(network, world, disease_set, limit)))


def joint_probability(network: GroundNetwork, world: WorldState, disease_set, limit=ENUMERATION_LIMIT) -> float:
    lz = log_partition(network, world, disease_set, limit)
    return float(np.exp(log_score(network, world) - lz))
