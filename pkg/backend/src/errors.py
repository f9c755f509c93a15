from typing import Optional


class RooftopError(Exception):
    """Base class; `reason` is a stable slug used in reports and exit paths."""

    reason = "error"

    def __init__(self, message: str, *, reason: Optional[str] = None):
        super().__init__(message)
        if reason is not None:
            self.reason = reason

    def to_dict(self) -> dict:
        return {"reason": self.reason, "detail": str(self)}


class DimensionMismatch(RooftopError, ValueError):
    reason = "dimension_mismatch"


class InvalidInput(RooftopError, ValueError):
    reason = "invalid_input"


class NotPointedError(RooftopError, ValueError):
    reason = "not_pointed"


class OutsideSupportError(RooftopError, ValueError):
    reason = "outside_support"


class DegenerateConeError(RooftopError, ValueError):
    reason = "degenerate_cone"


class UnsupportedActionError(RooftopError, ValueError):
    reason = "unsupported_action"


class UnsupportedDrumError(RooftopError, ValueError):
    reason = "unsupported_drum"


class CapExceededError(RooftopError, ValueError):
    reason = "cap_exceeded"


class AssignmentError(RooftopError):
    """A source cone whose image lies in no cone of the target fan."""

    reason = "assignment_failed"

    def __init__(self, message: str, cone=None):
        super().__init__(message)
        self.cone = cone

    def to_dict(self) -> dict:
        data = super().to_dict()
        if self.cone is not None:
            data["cone"] = sorted(self.cone)
        return data


class FanFormatError(RooftopError, ValueError):
    reason = "malformed_fan"

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location

    def to_dict(self) -> dict:
        data = super().to_dict()
        data["location"] = self.location
        return data
