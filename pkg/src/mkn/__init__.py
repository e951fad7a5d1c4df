"""Medical knowledge network: a Markov network over a symptom/disease
knowledge graph, with risk inference and pseudo-likelihood weight learning."""

from .core import GpfMode, GroundNetwork, ModelConfig, WorldState
from .encode import EncodingKind, Modifier, SymptomObservation, encode
from .kgraph import KnowledgeGraph, KnowledgeRule, NodeId, QualityMeasure, build_graph, parse_rules
from .learning import LearningConfig, TrainingSet, WeightMode, learn_weights
from .records import EvidenceRecord, load_records

__version__ = "0.1.0"

__all__ = [
    "EncodingKind", "EvidenceRecord", "GpfMode", "GroundNetwork", "KnowledgeGraph", "KnowledgeRule",
    "LearningConfig", "Modifier", "ModelConfig", "NodeId", "QualityMeasure", "SymptomObservation",
    "TrainingSet", "WeightMode", "WorldState", "build_graph", "encode", "learn_weights", "load_records",
    "parse_rules",
]
