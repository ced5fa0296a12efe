"""Exhaustive enumeration, Monte Carlo sampling and TSP sweeps."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import CapacityError, ValidationError
from .metrics import tsp_formula
from .protocol import (
    MAX_X,
    BranchRecord,
    ChannelSpec,
    DesiredStateSpec,
    Protocol,
)
from .signs import SignPattern

# 3m+1 qubits at m=8 is 2**25 amplitudes, inside the dense-storage cap.
MAX_M = 8

DEFAULT_RESOLUTION = {2: 50, 3: 20}


@dataclass(frozen=True)
class EnumerationResult:
    m: int
    branches: tuple
    total_probability: float
    total_success_probability: float
    min_success_fidelity: Optional[float]
    step1_probabilities: tuple

    def success_by_outcome(self) -> dict:
        """Summed aux=0 probability over j, keyed by the Step-1 bits."""
        out: dict = {}
        for b in self.branches:
            if b.aux_bit == 0:
                out[b.i_bits] = out.get(b.i_bits, 0.0) + b.probability
        return out


def _check_m(m: int, max_m: int) -> None:
    if m > max_m:
        raise CapacityError(f"m={m} exceeds the enumeration cap of {max_m}")


def enumerate_all(desired: DesiredStateSpec, channels: ChannelSpec,
                  signs: Optional[SignPattern] = None, skip_equalizer: bool = False,
                  max_m: int = MAX_M) -> EnumerationResult:
    """Run every (i, j) branch and record both auxiliary outcomes."""
    _check_m(desired.m, max_m)
    proto = Protocol(desired, channels, signs, skip_equalizer)
    n = 1 << proto.m
    branches: list[BranchRecord] = []
    for i in range(n):
        for j in range(n):
            branches.extend(proto.branch(i, j))
    total = float(np.sum([b.probability for b in branches]))
    success = float(np.sum([b.probability for b in branches if b.aux_bit == 0]))
    fids = [b.fidelity_to_target for b in branches if b.aux_bit == 0 and b.fidelity_to_target is not None]
    return EnumerationResult(
        m=proto.m,
        branches=tuple(branches),
        total_probability=total,
        total_success_probability=success,
        min_success_fidelity=min(fids) if fids else None,
        step1_probabilities=tuple(proto.step1_probabilities()),
    )


@dataclass(frozen=True)
class SampleStats:
    trials: int
    success_count: int
    empirical_tsp: float
    rng_seed: int
    # (trials, 3) array of sampled (i, j, aux) outcomes
    outcomes: Optional[np.ndarray] = field(default=None, repr=False, compare=False)


def branch_tables(proto: Protocol):
    """Conditional Born tables P(i), P(j | i), P(aux = 0 | i, j) from the engine."""
    n = 1 << proto.m
    p_i = proto.step1_probabilities()
    p_j = np.zeros((n, n))
    p_ok = np.zeros((n, n))
    for i in range(n):
        rec1, corrected = proto.prefix(i)
        if corrected is None:
            p_j[i] = 1.0 / n
            continue
        for j in range(n):
            p3, _, aux = proto.suffix(corrected, i, j)
            p_j[i, j] = p3
            p_ok[i, j] = aux[0][0]
    return p_i, p_j, p_ok


def _draw(cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = cdf / cdf[..., -1:]
    return np.minimum((u[:, None] >= cdf).sum(axis=1), cdf.shape[-1] - 1)


def sample(desired: DesiredStateSpec, channels: ChannelSpec, trials: int, seed: int,
           keep_outcomes: bool = False) -> SampleStats:
    """Monte Carlo run of the protocol with a seeded PCG64 generator.

    Each trial draws the Step-1, Step-3 and auxiliary outcomes in order from
    their Born distributions conditioned on the earlier outcomes.
    """
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    proto = Protocol(desired, channels)
    p_i, p_j, p_ok = branch_tables(proto)
    rng = np.random.default_rng(seed)
    u = rng.random((trials, 3))
    i = _draw(np.cumsum(p_i)[None, :].repeat(trials, axis=0), u[:, 0])
    j = _draw(np.cumsum(p_j, axis=1)[i], u[:, 1])
    aux = (u[:, 2] >= p_ok[i, j]).astype(int)
    success = int(np.sum(aux == 0))
    return SampleStats(
        trials=trials,
        success_count=success,
        empirical_tsp=success / trials,
        rng_seed=seed,
        outcomes=np.stack([i, j, aux], axis=1) if keep_outcomes else None,
    )


@dataclass(frozen=True)
class SweepResult:
    m: int
    axes: tuple
    tsp: np.ndarray
    resolution: tuple
    cross_check_max_error: Optional[float] = None

    def rows(self):
        """Yield (x_0, ..., x_{m-1}, tsp) for every grid point, last axis fastest."""
        for idx in itertools.product(*(range(len(a)) for a in self.axes)):
            yield tuple(float(a[k]) for a, k in zip(self.axes, idx)) + (float(self.tsp[idx]),)


def default_grid(m: int, resolution: Optional[int] = None) -> tuple:
    n = resolution or DEFAULT_RESOLUTION.get(m, 10)
    return tuple(np.linspace(0.0, MAX_X, n) for _ in range(m))


def sweep_tsp(m: int, grid: Optional[Sequence[Sequence[float]]] = None,
              cross_check: int = 0, seed: int = 0) -> SweepResult:
    """TSP surface over a grid of smaller channel coefficients.

    ``cross_check`` grid points (chosen with ``seed``) are re-evaluated by
    exhaustive enumeration with a random target state.
    """
    axes = default_grid(m) if grid is None else tuple(np.asarray(a, dtype=float) for a in grid)
    if len(axes) != m:
        raise ValidationError(f"grid has {len(axes)} axes for m={m}")
    for k, a in enumerate(axes):
        if a.ndim != 1 or a.size == 0:
            raise ValidationError(f"grid axis {k} must be a non-empty list")
        if np.any(a < 0) or np.any(a > MAX_X + 1e-12):
            raise ValidationError(f"grid axis {k} has values outside [0, 1/sqrt(2)]")
    shape = tuple(a.size for a in axes)
    tsp = np.empty(shape)
    for idx in itertools.product(*(range(s) for s in shape)):
        tsp[idx] = tsp_formula(ChannelSpec(tuple(a[k] for a, k in zip(axes, idx))))

    max_err = None
    if cross_check:
        rng = np.random.default_rng(seed)
        max_err = 0.0
        for _ in range(cross_check):
            idx = tuple(int(rng.integers(s)) for s in shape)
            ch = ChannelSpec(tuple(a[k] for a, k in zip(axes, idx)))
            res = enumerate_all(DesiredStateSpec.random(m, rng), ch)
            max_err = max(max_err, abs(res.total_success_probability - tsp[idx]))
    return SweepResult(m=m, axes=axes, tsp=tsp, resolution=shape, cross_check_max_error=max_err)
