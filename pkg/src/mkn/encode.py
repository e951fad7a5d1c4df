"""Map raw symptom observations onto the numeric symptom variable."""

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit

from .errors import InputError, MissingNormalValue, ModifierRequired


class Modifier(enum.Enum):
    ABSENT = "absent"
    POSSIBLE = "possible"
    PRESENT = "present"


MODIFIER_VALUE = {Modifier.ABSENT: 0.0, Modifier.POSSIBLE: 1.0, Modifier.PRESENT: 2.0}


class EncodingKind(enum.Enum):
    MODIFIER = "modifier"
    SIGMOID = "sigmoid"
    IMPROVED_SIGMOID = "improved-sigmoid"
    # thresholded {0, 1} atoms, used only by the binary baseline
    BINARY = "binary"


# largest double strictly below one; S(x) saturates here instead of at 1.0
_BELOW_ONE = float(np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class SymptomObservation:
    """One symptom reading: either a modifier or a number with its normal value."""

    symptom: str
    modifier: Optional[Modifier] = None
    value: Optional[float] = None
    normal: Optional[float] = None

    def __post_init__(self):
        if (self.modifier is None) == (self.value is None):
            raise InputError(f"observation of {self.symptom!r} needs exactly one of modifier/value")
        if self.value is not None and not math.isfinite(self.value):
            raise InputError(f"non-finite value for {self.symptom!r}")
        if self.normal is not None and not math.isfinite(self.normal):
            raise InputError(f"non-finite normal value for {self.symptom!r}")


def improved_sigmoid(x, normal=0.0):
    """``2 / (1 + exp(-(x - normal)**2)) - 1``, clipped into ``[0, 1)``.

    Written as ``-expm1(-t) / (1 + exp(-t))``, which is the same
    expression without the cancellation near ``x == normal``.
    """
    with np.errstate(over="ignore"):
        t = np.square(np.asarray(x, dtype=float) - normal)
    s = -np.expm1(-t) / (1.0 + np.exp(-t))
    s = np.minimum(s, _BELOW_ONE)
    return s if s.ndim else float(s)


def logistic(x, normal=0.0):
    s = expit(np.asarray(x, dtype=float) - normal)
    return s if s.ndim else float(s)


def encode(obs: SymptomObservation, kind: EncodingKind) -> float:
    kind = EncodingKind(kind)
    if obs.modifier is not None:
        x, normal = MODIFIER_VALUE[obs.modifier], 0.0
    else:
        if kind is EncodingKind.MODIFIER:
            raise ModifierRequired(f"modifier encoding cannot take numeric value for {obs.symptom!r}")
        if obs.normal is None:
            raise MissingNormalValue(f"numeric observation of {obs.symptom!r} has no normal value")
        x, normal = float(obs.value), float(obs.normal)

    if kind is EncodingKind.MODIFIER:
        return x
    if kind is EncodingKind.SIGMOID:
        return logistic(x, normal)
    if kind is EncodingKind.IMPROVED_SIGMOID:
        return improved_sigmoid(x, normal)
    # BINARY: any deviation from normal is an active atom
    return 1.0 if improved_sigmoid(x, normal) > 0.0 else 0.0


def binarize(x: float) -> float:
    return 1.0 if x > 0 else 0.0
