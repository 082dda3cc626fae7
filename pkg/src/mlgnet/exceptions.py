"""Exception hierarchy shared by all mlgnet modules."""


class MLGError(Exception):
    """Base class for every error raised by mlgnet."""


class StructuralError(MLGError):
    """The multilayer graph violates a structural precondition."""


class UnknownLayerError(MLGError, KeyError):
    def __init__(self, layer):
        super().__init__(f"no such layer: {layer}")
        self.layer = layer

    def __str__(self):
        return self.args[0]


class InstanceError(MLGError, ValueError):
    """Instance data is malformed or violates an instance invariant.

    ``location`` names the offending field (``demands[1].sinks``) and
    ``line`` is set for syntax errors when the source text is known.
    """

    def __init__(self, message, location=None, line=None):
        self.message = message
        self.location = location
        self.line = line
        super().__init__(self.diagnostic())

    def diagnostic(self):
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.location:
            where.append(self.location)
        prefix = f"{', '.join(where)}: " if where else ""
        return prefix + self.message


class LimitsExceededError(MLGError):
    """The exact solver refused an instance that is larger than its limits."""

    def __init__(self, sizes, limits):
        self.sizes = dict(sizes)
        self.limits = dict(limits)
        over = ", ".join(
            f"{k}={self.sizes[k]} > {self.limits[k]}"
            for k in sorted(self.limits)
            if self.sizes[k] > self.limits[k]
        )
        super().__init__(f"instance exceeds exact-solver limits ({over})")


class InfeasibleError(MLGError):
    """No feasible design was found.

    ``certificate`` is an :class:`~mlgnet.optimizer.design.Infeasible`
    record naming the demand or link that blocks routing.
    """

    def __init__(self, certificate):
        self.certificate = certificate
        super().__init__(certificate.message)
