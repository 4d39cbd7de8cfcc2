"""Exception types raised by the engine."""


class SupersiteError(Exception):
    """Base class; ``code`` is the name used in reports."""

    code = "Error"

    def __init__(self, message="", **witness):
        super().__init__(message)
        self.witness = witness


class DegreeCapExceeded(SupersiteError):
    code = "DegreeCapExceeded"

    def __init__(self, message="", partial=None, **witness):
        super().__init__(message, **witness)
        self.partial = partial


class ZeroDenominator(SupersiteError):
    code = "ZeroDenominator"


class MixedFields(SupersiteError):
    code = "MixedFields"


class UnknownPoint(SupersiteError):
    code = "UnknownPoint"


class NotOpen(SupersiteError):
    code = "NotOpen"


class NotOpenEmbedding(SupersiteError):
    code = "NotOpenEmbedding"


class IncompatibleOnOverlap(SupersiteError):
    code = "IncompatibleOnOverlap"


class UnknownObject(SupersiteError):
    code = "UnknownObject"


class TargetMismatch(SupersiteError):
    code = "TargetMismatch"


class MissingPullbackData(SupersiteError):
    code = "MissingPullbackData"


class SizeBoundExceeded(SupersiteError):
    code = "SizeBoundExceeded"


class CocycleViolation(SupersiteError):
    code = "CocycleViolation"


class RoundTripFailure(SupersiteError):
    code = "RoundTripFailure"


class InvalidGluingDatum(SupersiteError):
    code = "InvalidGluingDatum"
