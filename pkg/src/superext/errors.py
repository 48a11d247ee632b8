"""Exception types shared across the package.

The CLI maps these onto exit codes: `SpecError` -> 2, `CapacityError` -> 3.
"""


class SpecError(ValueError):
    """Invalid input data (group table, family, config).

    ``axiom`` names the property that failed, when there is one.
    """

    def __init__(self, message, axiom=None):
        super().__init__(message)
        self.axiom = axiom

    def to_json(self):
        return {"error": type(self).__name__, "message": str(self), "axiom": self.axiom}


class CapacityError(ValueError):
    """A request exceeds a documented size limit."""

    def __init__(self, message, limit=None, requested=None):
        super().__init__(message)
        self.limit = limit
        self.requested = requested

    def to_json(self):
        return {
            "error": type(self).__name__,
            "message": str(self),
            "limit": self.limit,
            "requested": self.requested,
        }


class BudgetExceeded(CapacityError):
    """Raised mid-computation; ``partial`` holds what was produced so far."""

    def __init__(self, message, count, partial=None):
        super().__init__(message, limit=count)
        self.count = count
        self.partial = partial if partial is not None else []

    def to_json(self):
        d = super().to_json()
        d["count"] = self.count
        return d
