"""Patient records and the JSON-lines record file format.

One record per line::

    {"id": "r1",
     "symptoms": [{"name": "cough", "modifier": "present"},
                  {"name": "temperature", "value": 39.1, "normal": 37.0}],
     "diseases": ["pneumonia"]}
"""

import json
from dataclasses import dataclass
from pathlib import Path

from .encode import EncodingKind, Modifier, SymptomObservation, encode
from .errors import InputError


@dataclass(frozen=True)
class EvidenceRecord:
    id: str
    observations: tuple = ()
    diseases: tuple = ()

    def encoded(self, kind: EncodingKind) -> dict:
        """Symptom name -> encoded value. A repeated symptom keeps its largest value."""
        out = {}
        for obs in self.observations:
            x = encode(obs, kind)
            out[obs.symptom] = max(x, out.get(obs.symptom, x))
        return out


def record_from_dict(obj: dict) -> EvidenceRecord:
    try:
        obs = []
        for item in obj.get("symptoms", []):
            if "modifier" in item:
                obs.append(SymptomObservation(item["name"], modifier=Modifier(item["modifier"])))
            else:
                obs.append(SymptomObservation(item["name"], value=float(item["value"]),
                                              normal=item.get("normal")))
        return EvidenceRecord(str(obj["id"]), tuple(obs), tuple(obj.get("diseases", [])))
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"bad record {obj!r}: {exc}") from None


def record_to_dict(rec: EvidenceRecord) -> dict:
    symptoms = []
    for o in rec.observations:
        if o.modifier is not None:
            symptoms.append({"name": o.symptom, "modifier": o.modifier.value})
        else:
            item = {"name": o.symptom, "value": o.value}
            if o.normal is not None:
                item["normal"] = o.normal
            symptoms.append(item)
    return {"id": rec.id, "symptoms": symptoms, "diseases": list(rec.diseases)}


def load_records(path) -> list:
    path = Path(path)
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from None
            out.append(record_from_dict(obj))
    return out


def format_records(records) -> str:
    return "".join(json.dumps(record_to_dict(r), sort_keys=True) + "\n" for r in records)
