"""Record builders shared by the test modules."""

from mkn.encode import Modifier, SymptomObservation
from mkn.records import EvidenceRecord

LEVELS = ("absent", "possible", "present")


def record(rid, diseases=(), **mods):
    obs = tuple(SymptomObservation(k, modifier=Modifier(v)) for k, v in mods.items())
    return EvidenceRecord(rid, obs, tuple(diseases))


def random_records(rng, network, n):
    g = network.graph
    out = []
    for i in range(n):
        mods = {s: str(rng.choice(LEVELS)) for s in g.symptoms if rng.random() < 0.7}
        gold = [d for d in g.diseases if rng.random() < 0.4]
        out.append(record(f"r{i}", gold, **mods))
    return out
