"""Exception hierarchy shared by every module."""


class HorolmmpError(Exception):
    """Base class for domain errors (CLI exit code 1)."""

    kind = "domain"


class DimensionError(HorolmmpError, ValueError):
    kind = "dimension"


class LatticeError(HorolmmpError, ValueError):
    kind = "lattice"


class UnboundedError(HorolmmpError):
    kind = "unbounded"


class ValidationError(HorolmmpError, ValueError):
    kind = "validation"


class NotQCartierError(HorolmmpError):
    kind = "not_q_cartier"


class PairNotCertifiedError(HorolmmpError):
    kind = "pair_not_certified"


class ZeroPerturbationError(HorolmmpError):
    kind = "zero_perturbation"


class AnomalyError(HorolmmpError):
    """A breakpoint configuration the classification does not cover."""

    kind = "anomaly"


class InvariantError(HorolmmpError, AssertionError):
    """An internal consistency check failed; indicates a bug or bad input."""

    kind = "invariant"


class ParseError(HorolmmpError, ValueError):
    kind = "parse"

    def __init__(self, message, path=None, offset=None):
        self.path = path
        self.offset = offset
        where = []
        if path:
            where.append(f"at {path}")
        if offset is not None:
            where.append(f"byte offset {offset}")
        super().__init__(message + (f" ({', '.join(where)})" if where else ""))
