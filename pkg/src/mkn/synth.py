"""Synthetic knowledge bases and patient records drawn from them.

Each record picks its gold diseases uniformly. A symptom in the blanket of
a gold disease reads ``present`` with probability ``sigmoid(w)`` for the
linking rule weight ``w``, ``possible`` with half of the remainder, and is
otherwise absent. Every other symptom is absent with probability
``1 - noise_rate``; when it is not, it reads ``possible`` or ``present``
with equal odds. Only non-absent readings are written to the record.
"""

from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import expit

from .core import GroundNetwork
from .encode import Modifier, SymptomObservation
from .errors import InvalidSpec
from .kgraph import KnowledgeRule
from .records import EvidenceRecord

_SEVERITY = {Modifier.ABSENT: 0, Modifier.POSSIBLE: 1, Modifier.PRESENT: 2}


@dataclass(frozen=True)
class SynthSpec:
    n_diseases: int = 10
    n_symptoms: int = 20
    edge_density: float = 0.1
    weight_range: tuple = (0.0, 3.0)
    n_records: int = 200
    diseases_per_record: tuple = (2, 4)
    seed: int = 0
    noise_rate: float = 0.05

    def validate(self):
        if self.n_diseases < 1 or self.n_symptoms < 1 or self.n_records < 1:
            raise InvalidSpec("counts must be >= 1")
        if not 0 < self.edge_density <= 1:
            raise InvalidSpec("edge_density must lie in (0, 1]")
        lo, hi = self.weight_range
        if not lo <= hi:
            raise InvalidSpec("weight_range low must not exceed high")
        kmin, kmax = self.diseases_per_record
        if not 1 <= kmin <= kmax:
            raise InvalidSpec("diseases_per_record must satisfy 1 <= low <= high")
        if not 0 <= self.noise_rate <= 1:
            raise InvalidSpec("noise_rate must lie in [0, 1]")
        return self

    def to_dict(self):
        return asdict(self)


def disease_names(n):
    width = len(str(n - 1))
    return [f"d{i:0{width}d}" for i in range(n)]


def symptom_names(n):
    width = len(str(n - 1))
    return [f"s{i:0{width}d}" for i in range(n)]


def generate_knowledge(spec: SynthSpec) -> list:
    """Random bipartite rule set; every disease gets at least one rule."""
    spec.validate()
    rng = np.random.default_rng([spec.seed, 0])
    diseases = disease_names(spec.n_diseases)
    symptoms = symptom_names(spec.n_symptoms)
    lo, hi = spec.weight_range
    rules = []
    for d in diseases:
        mask = rng.random(spec.n_symptoms) < spec.edge_density
        if not mask.any():
            mask[rng.integers(spec.n_symptoms)] = True
        for j in np.flatnonzero(mask):
            w = float(rng.uniform(lo, hi)) if hi > lo else float(lo)
            rules.append(KnowledgeRule(symptoms[j], d, w))
    return rules


def sample_records(network: GroundNetwork, spec: SynthSpec, prefix="r") -> list:
    """Forward-sample ``spec.n_records`` records using the network's weights.

    The per-record disease count is clipped to the number of diseases.
    """
    spec.validate()
    g = network.graph
    rng = np.random.default_rng([spec.seed, 1])
    kmin, kmax = spec.diseases_per_record
    kmax = min(kmax, len(g.diseases))
    kmin = min(kmin, kmax)
    p_present = expit(network.weights)
    width = len(str(spec.n_records - 1))
    records = []
    for r in range(spec.n_records):
        k = int(rng.integers(kmin, kmax + 1))
        gold = sorted(rng.choice(len(g.diseases), size=k, replace=False).tolist())
        reading = {}
        for d in gold:
            for e in g._disease_edges[d]:
                u = rng.random()
                p = p_present[e]
                if u < p:
                    m = Modifier.PRESENT
                elif u < p + (1 - p) / 2:
                    m = Modifier.POSSIBLE
                else:
                    m = Modifier.ABSENT
                s = int(g.edge_symptom[e])
                if s not in reading or _SEVERITY[m] > _SEVERITY[reading[s]]:
                    reading[s] = m
        for s in range(len(g.symptoms)):
            if s in reading:
                continue
            if rng.random() < spec.noise_rate:
                reading[s] = Modifier.PRESENT if rng.random() < 0.5 else Modifier.POSSIBLE
        obs = tuple(
            SymptomObservation(g.symptoms[s], modifier=m)
            for s, m in sorted(reading.items())
            if m is not Modifier.ABSENT
        )
        records.append(EvidenceRecord(f"{prefix}{r:0{width}d}", obs, tuple(g.diseases[d] for d in gold)))
    return records


def split_records(records, test_fraction=0.3):
    """Deterministic split: the trailing ``test_fraction`` of records is held out."""
    n_test = int(round(len(records) * test_fraction))
    n_test = min(max(n_test, 1), len(records) - 1) if len(records) > 1 else 0
    cut = len(records) - n_test
    return records[:cut], records[cut:]
