"""State-vector engine over labelled qubit registers.

Qubits are labelled with positive integers, plus the auxiliary label ``"A"``.
The first qubit of a register is the most significant bit of the amplitude
index, so ``|001>`` on register ``(1, 2, 3)`` means qubit 3 is set.

All values are immutable; every operation returns a new :class:`StateVector`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import linalg
from .errors import RegisterError, ShapeError, ValidationError

QubitId = Union[int, str]
AUX = "A"

NORM_TOL = 1e-10
ZERO_PROBABILITY = 1e-15


def _check_label(q) -> None:
    if isinstance(q, bool) or not (
        (isinstance(q, (int, np.integer)) and q > 0) or q == AUX
    ):
        raise RegisterError(f"invalid qubit label {q!r}")


@dataclass(frozen=True)
class StateVector:
    register: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        register = tuple(self.register)
        for q in register:
            _check_label(q)
        if len(set(register)) != len(register):
            raise RegisterError(f"duplicate qubit labels in {register}")
        amps = linalg.as_vector(self.amplitudes)
        if amps.size != 1 << len(register):
            raise ShapeError(
                f"{amps.size} amplitudes for a {len(register)}-qubit register"
            )
        n = linalg.norm(amps)
        if abs(n - 1.0) > NORM_TOL:
            raise ValidationError(f"state norm is {n!r}, expected 1")
        object.__setattr__(self, "register", register)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, register, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex)
        n = np.linalg.norm(amps)
        if n == 0:
            raise ValidationError("cannot normalize the zero vector")
        return cls(tuple(register), amps / n)

    @property
    def num_qubits(self) -> int:
        return len(self.register)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def index_of(self, q) -> int:
        try:
            return self.register.index(q)
        except ValueError:
            raise RegisterError(f"qubit {q!r} not in register {self.register}") from None

    def tensor(self, other: "StateVector") -> "StateVector":
        """Append ``other``'s qubits after this register's qubits."""
        return StateVector(
            self.register + other.register,
            linalg.kron(self.amplitudes, other.amplitudes),
        )


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome of a forced projective measurement.

    ``post_state`` is ``None`` when the outcome has (numerically) zero
    probability; such branches are reported, not raised.
    """
    measured_qubits: tuple
    outcome_index: int
    probability: float
    post_state: Optional[StateVector]

    @property
    def is_null(self) -> bool:
        return self.post_state is None


def product_state(factors: Sequence[tuple]) -> StateVector:
    """Tensor together ``(qubits, vector)`` factors in the order given."""
    register: list = []
    amps = np.ones(1, dtype=complex)
    for qubits, vec in factors:
        qubits = tuple(qubits)
        vec = linalg.as_vector(vec)
        if vec.size != 1 << len(qubits):
            raise ShapeError(f"factor on {qubits} has {vec.size} amplitudes")
        if abs(linalg.norm(vec) - 1.0) > NORM_TOL:
            raise ValidationError(f"factor on {qubits} is not normalized")
        for q in qubits:
            _check_label(q)
            if q in register:
                raise RegisterError(f"qubit {q!r} appears in more than one factor")
            register.append(q)
        amps = linalg.kron(amps, vec)
    return StateVector(tuple(register), amps)


def _target_axes(state: StateVector, targets) -> list[int]:
    targets = list(targets)
    if len(set(targets)) != len(targets):
        raise RegisterError(f"duplicate targets {targets}")
    return [state.index_of(q) for q in targets]


def _targets_first(state: StateVector, axes: list[int]) -> np.ndarray:
    """Reshape amplitudes into (2**k, rest) with target axes leading."""
    n = state.num_qubits
    psi = state.amplitudes.reshape((2,) * n) if n else state.amplitudes
    psi = np.moveaxis(psi, axes, list(range(len(axes))))
    return psi.reshape(1 << len(axes), -1)


def apply_unitary(state: StateVector, targets, U, check: bool = True) -> StateVector:
    """Apply ``U`` to ``targets``; the first target is U's most significant bit.

    ``check=False`` skips the unitarity test for operators already validated
    by their builder.
    """
    axes = _target_axes(state, targets)
    U = linalg.as_matrix(U)
    if U.shape != (1 << len(axes),) * 2:
        raise ShapeError(f"{U.shape} operator on {len(axes)} qubits")
    if check and not linalg.is_unitary(U, linalg.PHYSICAL_TOL):
        raise ValidationError("operator is not unitary")
    n = state.num_qubits
    block = U @ _targets_first(state, axes)
    psi = block.reshape((2,) * n)
    psi = np.moveaxis(psi, list(range(len(axes))), axes)
    return StateVector(state.register, psi.reshape(-1))


def _check_basis(basis, k: int, check: bool = True) -> np.ndarray:
    basis = linalg.as_matrix(basis)
    if basis.shape != (1 << k,) * 2:
        raise ShapeError(f"{basis.shape} basis for {k} qubits")
    if check and not linalg.is_unitary(basis, linalg.PHYSICAL_TOL):
        raise ValidationError("measurement basis is not orthonormal")
    return basis


def _project(state: StateVector, targets, basis, check: bool = True):
    axes = _target_axes(state, targets)
    basis = _check_basis(basis, len(axes), check)
    # rows of ``projected`` are <row_k| state>, one per outcome
    projected = basis.conj() @ _targets_first(state, axes)
    rest = tuple(q for q in state.register if q not in set(targets))
    return projected, rest


def outcome_probabilities(state: StateVector, targets, basis) -> np.ndarray:
    """Born probabilities of every outcome of measuring ``targets`` in ``basis``."""
    projected, _ = _project(state, targets, basis)
    return np.sum(np.abs(projected) ** 2, axis=1)


def measure_in_basis(state: StateVector, targets, basis, outcome: int) -> MeasurementRecord:
    """Force outcome ``outcome`` of a projective measurement on ``targets``.

    Row ``outcome`` of ``basis`` is the measurement vector written in the
    computational basis of ``targets``; it is conjugated when projecting.
    """
    targets = tuple(targets)
    if not 0 <= outcome < 1 << len(targets):
        raise ValidationError(f"outcome {outcome} out of range for {len(targets)} qubits")
    projected, rest = _project(state, targets, basis)
    branch = projected[outcome]
    p = float(np.vdot(branch, branch).real)
    if p < ZERO_PROBABILITY:
        return MeasurementRecord(targets, outcome, 0.0, None)
    post = StateVector(rest, branch / np.sqrt(p))
    return MeasurementRecord(targets, outcome, p, post)


def measure_all(state: StateVector, targets, basis, check: bool = True) -> list[MeasurementRecord]:
    """Records for every outcome of one measurement, sharing a single projection."""
    targets = tuple(targets)
    projected, rest = _project(state, targets, basis, check)
    probs = np.sum(np.abs(projected) ** 2, axis=1)
    out = []
    for k, (branch, p) in enumerate(zip(projected, probs)):
        if p < ZERO_PROBABILITY:
            out.append(MeasurementRecord(targets, k, 0.0, None))
        else:
            out.append(MeasurementRecord(targets, k, float(p), StateVector(rest, branch / np.sqrt(p))))
    return out


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, insensitive to global phase."""
    if a.dim != b.dim:
        raise ShapeError(f"fidelity between dims {a.dim} and {b.dim}")
    f = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    return float(min(f, 1.0))


def computational_basis(k: int) -> np.ndarray:
    return linalg.identity(1 << k)
