"""Exception hierarchy shared by every layer of the simulator."""


class RSPError(Exception):
    """Base class for all simulator errors."""


class ShapeError(RSPError, ValueError):
    """Operand dimensions do not line up."""


class CapacityError(RSPError):
    """A dense object would exceed the configured entry cap."""


class RegisterError(RSPError, ValueError):
    """Duplicate or unknown qubit label."""


class ValidationError(RSPError, ValueError):
    """An input violates a documented invariant (normalization, unitarity, ranges)."""


class ConstructionError(RSPError):
    """A builder produced an object that failed its own post-check."""


class UnsupportedOrderError(RSPError):
    """No valid sign pattern could be produced for the requested number of qubits.

    ``witness`` is the first violated ``(r, r_prime, c)`` triple, or ``None``.
    """

    def __init__(self, m, witness=None):
        self.m = m
        self.witness = witness
        msg = f"no valid sign pattern for m={m}"
        if witness is not None:
            msg += f"; orthogonality fails at (r, r', c) = {witness}"
        super().__init__(msg)


class DegenerateBranchError(RSPError):
    """A forced branch has zero probability, so there is no state to report."""
