"""Remote preparation of an m-qubit state over m GHZ-type channels.

Qubit roles for channel ``k = 1..m`` (triple ``3k-2, 3k-1, 3k``):

* ``3k-2`` is measured by the sender in the Step-1 basis (bit ``i_k``),
* ``3k-1`` is phase-corrected and then measured in the ``|+>/|->`` basis (bit ``j_k``),
* ``3k`` belongs to the receiver and ends up holding the target state.

``k = 1`` is always the most significant bit, both in outcome integers and in
operator indices.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .engine import (
    AUX,
    StateVector,
    apply_unitary,
    computational_basis,
    fidelity,
    measure_in_basis,
    measure_all,
    product_state,
)
from .errors import ConstructionError, DegenerateBranchError, ValidationError
from .signs import SignPattern, sign_pattern

SPEC_TOL = 1e-10

_AUX_BASIS = computational_basis(1)
TWO_PI = 2 * math.pi
MAX_X = math.sqrt(0.5)


def sender_measured_qubits(m: int) -> tuple:
    return tuple(3 * k - 2 for k in range(1, m + 1))


def sender_phase_qubits(m: int) -> tuple:
    return tuple(3 * k - 1 for k in range(1, m + 1))


def receiver_qubits(m: int) -> tuple:
    return tuple(3 * k for k in range(1, m + 1))


def bits_to_int(bits, m: int) -> int:
    """Accept ``"011"``, ``(0, 1, 1)`` or an int; first bit is most significant."""
    if isinstance(bits, (int, np.integer)) and not isinstance(bits, bool):
        value = int(bits)
    else:
        seq = [int(b) for b in bits]
        if len(seq) != m or any(b not in (0, 1) for b in seq):
            raise ValidationError(f"expected {m} bits, got {bits!r}")
        value = 0
        for b in seq:
            value = (value << 1) | b
    if not 0 <= value < 1 << m:
        raise ValidationError(f"outcome {value} out of range for m={m}")
    return value


def int_to_bits(value: int, m: int) -> tuple:
    return tuple((value >> (m - 1 - k)) & 1 for k in range(m))


def bit_string(value: int, m: int) -> str:
    return "".join(str(b) for b in int_to_bits(value, m))


@dataclass(frozen=True)
class DesiredStateSpec:
    """Target state sum_i alphas[i] * exp(1j * etas[i]) |i> on m qubits.

    Magnitudes are non-negative and ``etas[0]`` is 0, which makes the
    parameterization unique up to the phases of zero-magnitude terms.
    """
    m: int
    alphas: tuple
    etas: tuple

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise ValidationError(f"m must be a positive integer, got {self.m!r}")
        alphas = tuple(float(a) for a in self.alphas)
        etas = tuple(float(e) for e in self.etas)
        n = 1 << self.m
        if len(alphas) != n:
            raise ValidationError(f"alphas: expected {n} values for m={self.m}, got {len(alphas)}")
        if len(etas) != n:
            raise ValidationError(f"etas: expected {n} values for m={self.m}, got {len(etas)}")
        if not all(math.isfinite(a) and a >= 0 for a in alphas):
            raise ValidationError("alphas must be finite and non-negative")
        if not all(math.isfinite(e) and 0 <= e < TWO_PI for e in etas):
            raise ValidationError("etas must lie in [0, 2*pi)")
        if etas[0] != 0:
            raise ValidationError("etas[0] must be 0")
        total = math.fsum(a * a for a in alphas)
        if abs(total - 1) > SPEC_TOL:
            raise ValidationError(f"sum of alphas squared is {total!r}, expected 1")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "etas", etas)

    @classmethod
    def normalized(cls, m: int, alphas, etas) -> "DesiredStateSpec":
        """Rescale ``alphas`` to unit norm, shift etas so etas[0] is 0, wrap into [0, 2*pi)."""
        a = np.asarray(alphas, dtype=float)
        if np.any(a < 0):
            raise ValidationError("alphas must be non-negative")
        s = np.sqrt(np.sum(a * a))
        if s == 0:
            raise ValidationError("alphas are all zero")
        etas = list(etas)
        if not etas:
            raise ValidationError("etas are empty")
        return cls(m, tuple(a / s), tuple(_wrap(e - etas[0]) for e in etas))

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "DesiredStateSpec":
        """Spec for a normalized complex vector, dropping its global phase."""
        amps = np.asarray(amplitudes, dtype=complex)
        m = int(round(math.log2(amps.size)))
        if 1 << m != amps.size or m < 1:
            raise ValidationError(f"{amps.size} amplitudes is not a power of two >= 2")
        nz = np.flatnonzero(np.abs(amps) > 0)
        if nz.size == 0:
            raise ValidationError("zero vector")
        ref = amps[0] if abs(amps[0]) > 0 else amps[nz[0]]
        amps = amps * (abs(ref) / ref)
        alphas = np.abs(amps)
        etas = [0.0] + [_wrap(math.atan2(z.imag, z.real)) if abs(z) > 0 else 0.0 for z in amps[1:]]
        return cls(m, tuple(alphas / np.linalg.norm(alphas)), tuple(etas))

    @classmethod
    def random(cls, m: int, rng: np.random.Generator) -> "DesiredStateSpec":
        z = rng.normal(size=1 << m) + 1j * rng.normal(size=1 << m)
        return cls.from_amplitudes(z / np.linalg.norm(z))

    def amplitudes(self) -> np.ndarray:
        return np.asarray(self.alphas) * np.exp(1j * np.asarray(self.etas))


def _wrap(eta: float) -> float:
    e = math.fmod(float(eta), TWO_PI)
    if e < 0:
        e += TWO_PI
    return 0.0 if e >= TWO_PI else e


@dataclass(frozen=True)
class ChannelSpec:
    """Channels x_k|000> + y_k|111>, given by the smaller coefficients x_k.

    ``y_k = sqrt(1 - x_k**2)`` is derived. ``0 <= x_k <= 1/sqrt(2)`` keeps
    ``x_k <= y_k``; rounding just above the maximal point is clamped onto it.
    """
    xs: tuple

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        if not xs:
            raise ValidationError("at least one channel is required")
        for k, x in enumerate(xs):
            if not math.isfinite(x) or x < 0 or x > MAX_X + 1e-12:
                raise ValidationError(
                    f"channel_x[{k}] = {x!r} must lie in [0, 1/sqrt(2)] so that x <= y"
                )
        object.__setattr__(self, "xs", xs)

    @classmethod
    def maximal(cls, m: int) -> "ChannelSpec":
        return cls((MAX_X,) * m)

    @classmethod
    def random(cls, m: int, rng: np.random.Generator) -> "ChannelSpec":
        return cls(tuple(rng.uniform(0, MAX_X, size=m)))

    @property
    def m(self) -> int:
        return len(self.xs)

    @property
    def x_squared(self) -> tuple:
        # both float neighbours of 1/sqrt(2) square to within an ulp of 1/2
        return tuple(0.5 if abs(x * x - 0.5) <= 2.5e-16 else min(x * x, 0.5) for x in self.xs)

    @property
    def ys(self) -> tuple:
        return tuple(math.sqrt(1 - x2) for x2 in self.x_squared)

    @property
    def pairs(self) -> tuple:
        return tuple(zip(self.xs, self.ys))

    @property
    def is_maximal(self) -> bool:
        return all(abs(x - y) <= 1e-12 for x, y in self.pairs)

    def weight(self, c: int) -> float:
        """Amplitude of the channel product on pattern ``c`` (x_k for bit 0, y_k for 1)."""
        w = 1.0
        for bit, (x, y) in zip(int_to_bits(c, self.m), self.pairs):
            w *= y if bit else x
        return w


@dataclass(frozen=True)
class MeasurementBasis:
    omega: np.ndarray


@dataclass(frozen=True)
class BranchRecord:
    i_bits: tuple
    j_bits: tuple
    aux_bit: int
    probability: float
    final_state: Optional[StateVector] = None
    fidelity_to_target: Optional[float] = None


def build_desired_state(spec: DesiredStateSpec) -> StateVector:
    return StateVector(receiver_qubits(spec.m), spec.amplitudes())


def build_channel_state(spec: ChannelSpec) -> StateVector:
    factors = []
    for k, (x, y) in enumerate(spec.pairs, start=1):
        ghz = np.zeros(8, dtype=complex)
        ghz[0], ghz[7] = x, y
        factors.append(((3 * k - 2, 3 * k - 1, 3 * k), ghz))
    return product_state(factors)


def build_omega(desired: DesiredStateSpec, signs: SignPattern) -> MeasurementBasis:
    if signs.m != desired.m:
        raise ValidationError(f"sign pattern is for m={signs.m}, state for m={desired.m}")
    n = 1 << desired.m
    r, c = np.indices((n, n))
    alphas = np.asarray(desired.alphas)
    phases = np.exp(-1j * np.asarray(desired.etas))
    omega = signs.table * alphas[r ^ c] * phases[c]
    if not linalg.is_unitary(omega, linalg.ALGEBRAIC_TOL):
        raise ConstructionError("measurement basis is not unitary")
    return MeasurementBasis(linalg.as_matrix(omega))


def phase_correction_unitary(i_bits, desired: DesiredStateSpec, signs: SignPattern) -> np.ndarray:
    """Diagonal correction for Step-1 outcome ``i``: entry c is s(i,c) e^{i(eta[i^c] - eta[c])}."""
    i = bits_to_int(i_bits, desired.m)
    c = np.arange(1 << desired.m)
    etas = np.asarray(desired.etas)
    diag = signs.table[i] * np.exp(1j * (etas[i ^ c] - etas))
    return linalg.as_matrix(np.diag(diag))


def amplitude_equalizer(channels: ChannelSpec) -> np.ndarray:
    """Block unitary [[D, F], [F, -D]] acting on (aux, receiver qubits...).

    The auxiliary qubit is the most significant bit of the matrix index, so
    the upper-left block acts on the aux-|0> subspace. ``D[b]`` is the product
    of ``x_k / y_k`` over the set bits of ``b``.
    """
    m = channels.m
    ratios = [min(x / y, 1.0) for x, y in channels.pairs]
    d = np.ones(1 << m)
    for b in range(1 << m):
        for k, bit in enumerate(int_to_bits(b, m)):
            if bit:
                d[b] *= ratios[k]
    f = np.sqrt(np.clip(1 - d * d, 0.0, None))
    D, F = np.diag(d), np.diag(f)
    U = np.block([[D, F], [F, -D]])
    if not linalg.is_unitary(U, linalg.ALGEBRAIC_TOL):
        raise ConstructionError("equalizer is not unitary")
    return linalg.as_matrix(U)


def pauli_recovery(i_bits, j_bits) -> np.ndarray:
    """Tensor product over receiver qubits of sigma_x^{i_k} sigma_z^{j_k}."""
    i_seq, j_seq = _bit_seq(i_bits), _bit_seq(j_bits)
    if len(i_seq) != len(j_seq):
        raise ValidationError("i and j must have the same length")
    return _pauli_recovery(i_seq, j_seq)


@functools.lru_cache(maxsize=4096)
def _pauli_recovery(i_seq: tuple, j_seq: tuple) -> np.ndarray:
    factors = []
    for ib, jb in zip(i_seq, j_seq):
        op = linalg.SIGMA_I
        if ib:
            op = linalg.SIGMA_X
        if jb:
            op = op @ linalg.SIGMA_Z
        factors.append(op)
    return linalg.kron_all(factors)


def recovery_label(i_bits, j_bits) -> str:
    names = {(0, 0): "I", (1, 0): "σx", (0, 1): "σz", (1, 1): "σxσz"}
    return "⊗".join(names[p] for p in zip(_bit_seq(i_bits), _bit_seq(j_bits)))


def _bit_seq(bits) -> tuple:
    seq = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in seq):
        raise ValidationError(f"not a bit sequence: {bits!r}")
    return seq


class Protocol:
    """One configured protocol instance; branches are forced, never sampled.

    Step-1 and Step-2 results are cached per outcome ``i`` so that walking all
    ``j`` for a fixed ``i`` does the expensive 3m-qubit work once.
    """

    def __init__(self, desired: DesiredStateSpec, channels: ChannelSpec,
                 signs: Optional[SignPattern] = None, skip_equalizer: bool = False):
        if desired.m != channels.m:
            raise ValidationError(f"desired state has m={desired.m}, channels m={channels.m}")
        if skip_equalizer and not channels.is_maximal:
            raise ValidationError("Step 4 may only be skipped for maximally entangled channels")
        self.m = desired.m
        self.desired = desired
        self.channels = channels
        self.signs = signs if signs is not None else sign_pattern(self.m)
        self.skip_equalizer = skip_equalizer
        self.omega = build_omega(desired, self.signs).omega
        self.channel_state = build_channel_state(channels)
        self.target = build_desired_state(desired)
        self.equalizer = None if skip_equalizer else amplitude_equalizer(channels)
        self.pm_basis = linalg.kron_all([linalg.HADAMARD] * self.m)
        self._prefix: dict[int, tuple] = {}
        self._step3: dict[int, list] = {}

    def prefix(self, i: int):
        """(Step-1 record, post-Step-2 state or None) for outcome ``i``."""
        if i not in self._prefix:
            rec = measure_in_basis(self.channel_state, sender_measured_qubits(self.m), self.omega, i)
            corrected = None
            if not rec.is_null:
                U = phase_correction_unitary(i, self.desired, self.signs)
                corrected = apply_unitary(rec.post_state, sender_phase_qubits(self.m), U)
            self._prefix[i] = (rec, corrected)
        return self._prefix[i]

    def step1_probabilities(self) -> np.ndarray:
        return np.array([self.prefix(i)[0].probability for i in range(1 << self.m)])

    def suffix(self, corrected: StateVector, i: int, j: int):
        """Run Steps 3-5 from the post-Step-2 state.

        Returns ``(p3, bob_state, [(p4, pre_recovery, final) for aux in 0, 1])``;
        any state may be ``None`` for a zero-probability branch.
        """
        m = self.m
        if corrected is self._prefix.get(i, (None, None))[1]:
            if i not in self._step3:
                self._step3[i] = measure_all(corrected, sender_phase_qubits(m), self.pm_basis, check=False)
            rec3 = self._step3[i][j]
        else:
            rec3 = measure_in_basis(corrected, sender_phase_qubits(m), self.pm_basis, j)
        if rec3.is_null:
            return rec3.probability, None, [(0.0, None, None), (0.0, None, None)]
        bob = rec3.post_state
        if self.skip_equalizer:
            aux_branches = [(1.0, bob), (0.0, None)]
        else:
            with_aux = bob.tensor(StateVector((AUX,), [1, 0]))
            lifted = apply_unitary(with_aux, (AUX,) + receiver_qubits(m), self.equalizer, check=False)
            aux_branches = [(r.probability, r.post_state)
                            for r in measure_all(lifted, (AUX,), _AUX_BASIS, check=False)]
        out = []
        p0, pre = aux_branches[0]
        final = None
        if pre is not None:
            final = apply_unitary(pre, receiver_qubits(m),
                                  pauli_recovery(int_to_bits(i, m), int_to_bits(j, m)), check=False)
        out.append((p0, pre, final))
        p1, failed = aux_branches[1]
        out.append((p1, failed, None))
        return rec3.probability, bob, out

    def branch(self, i_bits, j_bits) -> tuple:
        """(success record, failure record) for the forced outcomes ``i``, ``j``."""
        m = self.m
        i, j = bits_to_int(i_bits, m), bits_to_int(j_bits, m)
        ib, jb = int_to_bits(i, m), int_to_bits(j, m)
        rec1, corrected = self.prefix(i)
        if corrected is None:
            return (BranchRecord(ib, jb, 0, 0.0), BranchRecord(ib, jb, 1, 0.0))
        p3, _, aux = self.suffix(corrected, i, j)
        (p_ok, _, final), (p_fail, _, _) = aux
        base = rec1.probability * p3
        fid = fidelity(final, self.target) if final is not None else None
        return (
            BranchRecord(ib, jb, 0, base * p_ok, final, fid),
            BranchRecord(ib, jb, 1, base * p_fail),
        )

    def trace(self, i_bits, j_bits) -> list:
        """Normalized states after Steps 1, 2, 3, 4 (aux = 0) and 5."""
        m = self.m
        i, j = bits_to_int(i_bits, m), bits_to_int(j_bits, m)
        rec1, corrected = self.prefix(i)
        if corrected is None:
            raise DegenerateBranchError(f"Step-1 outcome {bit_string(i, m)} has zero probability")
        _, bob, aux = self.suffix(corrected, i, j)
        if bob is None:
            raise DegenerateBranchError(f"Step-3 outcome {bit_string(j, m)} has zero probability")
        _, pre, final = aux[0]
        if pre is None:
            raise DegenerateBranchError("auxiliary outcome 0 has zero probability")
        return [rec1.post_state, corrected, bob, pre, final]


def run_branch(desired: DesiredStateSpec, channels: ChannelSpec, i_bits, j_bits,
               skip_equalizer: bool = False, signs: Optional[SignPattern] = None) -> tuple:
    """Execute all five steps for forced outcomes; returns (aux=0, aux=1) records.

    With ``skip_equalizer`` no auxiliary qubit is introduced and the failure
    record always has probability 0.
    """
    return Protocol(desired, channels, signs, skip_equalizer).branch(i_bits, j_bits)


def verify_intermediate_trace(desired: DesiredStateSpec, channels: ChannelSpec, i_bits, j_bits,
                              skip_equalizer: bool = False,
                              signs: Optional[SignPattern] = None) -> list:
    return Protocol(desired, channels, signs, skip_equalizer).trace(i_bits, j_bits)
