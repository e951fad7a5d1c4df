"""Exception hierarchy shared by every module in the package."""


class MKNError(Exception):
    """Base class for all package errors."""


class InputError(MKNError):
    """Bad user input: malformed files, unknown names, invalid settings."""


class MalformedLine(InputError):
    def __init__(self, line_number, text=""):
        self.line_number = line_number
        super().__init__(f"malformed rule line {line_number}: {text!r}")


class DuplicateRule(InputError):
    def __init__(self, symptom, disease):
        self.symptom = symptom
        self.disease = disease
        super().__init__(f"duplicate rule for ({symptom}, {disease})")


class EmptyRuleSet(InputError):
    def __init__(self, message="rule set is empty"):
        super().__init__(message)


class MissingWeight(InputError):
    """A rule line carries no weight and no init_weight was supplied."""


class MissingNormalValue(InputError):
    pass


class ModifierRequired(InputError):
    pass


class UnknownDisease(InputError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown disease {name!r}")


class UnknownSymptom(InputError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown symptom {name!r}")


class EnumerationTooLarge(InputError):
    def __init__(self, size, limit):
        self.size = size
        self.limit = limit
        super().__init__(f"cannot enumerate {size} binary atoms (limit {limit})")


class GivenHasZeroMass(MKNError):
    """The conditioning event of a rule query has probability zero."""


class EmptyGoldSet(InputError):
    pass


class EmptyCorpus(InputError):
    pass


class InvalidSpec(InputError):
    pass


class DivergenceDetected(MKNError):
    """Optimisation produced a non-finite loss or parameter."""
