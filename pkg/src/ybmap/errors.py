"""Exception hierarchy shared by every module."""


class YBMapError(Exception):
    """Base class for all library errors."""


class DegeneratePairing(YBMapError):
    pass


class NotComplementary(YBMapError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ParameterCollision(YBMapError):
    pass


class PoleEvaluation(YBMapError):
    pass


class RankMismatch(YBMapError):
    pass


class NotAProjector(YBMapError):
    pass
