"""Sign tables s(r, c) for the Step-1 measurement basis.

Row ``r`` of the basis has entry ``s(r, c) * alpha[r ^ c] * exp(-1j * eta[c])``.
Those rows are orthonormal for *every* choice of alphas and etas exactly when
row 0 is all ``+1`` and, for each pair of rows ``r != r'`` with ``d = r ^ r'``,

    s(r, c) s(r', c) == -s(r, c ^ d) s(r', c ^ d)   for all c.

Tables for one, two and three qubits are fixed. Larger orders go through a
pluggable strategy whose output is always validated before use.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .errors import UnsupportedOrderError, ValidationError


def _parse(rows: list[str]) -> np.ndarray:
    return np.array([[1 if ch == "+" else -1 for ch in row] for row in rows], dtype=np.int8)


_FIXED_TABLES = {
    1: _parse(["++", "+-"]),
    2: _parse(["++++", "+-+-", "+--+", "++--"]),
    3: _parse([
        "++++++++",
        "+-+-+-+-",
        "+--+-++-",
        "++--++--",
        "+-+--+-+",
        "++----++",
        "+--++--+",
        "++++----",
    ]),
}


def find_violation(table) -> Optional[tuple[int, int, int]]:
    """Return the first ``(r, r', c)`` breaking row orthogonality, else ``None``.

    A non-positive row 0 is reported as ``(0, 0, c)``.
    """
    s = np.asarray(table, dtype=np.int64)
    n = s.shape[0]
    bad0 = np.flatnonzero(s[0] != 1)
    if bad0.size:
        return (0, 0, int(bad0[0]))
    idx = np.arange(n)
    best = None
    for d in range(1, n):
        pair = s * s[idx ^ d, :]
        rows, cols = np.nonzero(pair != -pair[:, idx ^ d])
        if rows.size:
            k = np.lexsort((cols, rows ^ d, rows))[0]
            cand = (int(rows[k]), int(rows[k] ^ d), int(cols[k]))
            if best is None or cand < best:
                best = cand
    return best


@dataclass(frozen=True)
class SignPattern:
    m: int
    table: np.ndarray

    def __post_init__(self):
        t = np.array(self.table, dtype=np.int8)
        n = 1 << self.m
        if t.shape != (n, n):
            raise ValidationError(f"sign table for m={self.m} must be {n}x{n}, got {t.shape}")
        if not np.all(np.abs(t) == 1):
            raise ValidationError("sign table entries must be +1 or -1")
        witness = find_violation(t)
        if witness is not None:
            raise ValidationError(f"sign table breaks row orthogonality at (r, r', c) = {witness}")
        t.flags.writeable = False
        object.__setattr__(self, "table", t)

    def __call__(self, r: int, c: int) -> int:
        return int(self.table[r, c])


def _cd_product_sign(p: int, q: int, m: int) -> int:
    # e_p e_q = sign * e_{p^q} in the 2**m-dimensional Cayley-Dickson algebra,
    # doubling rule (a, b)(c, d) = (ac - d*b, da + bc*)
    if m == 0:
        return 1
    h = 1 << (m - 1)
    pl, ql = p & (h - 1), q & (h - 1)
    conj = 1 if ql == 0 else -1
    if not p & h:
        return _cd_product_sign(pl, ql, m - 1) if not q & h else _cd_product_sign(ql, pl, m - 1)
    if not q & h:
        return _cd_product_sign(pl, ql, m - 1) * conj
    return -conj * _cd_product_sign(ql, pl, m - 1)


def cayley_dickson_signs(m: int) -> np.ndarray:
    """Sign table of left multiplication in the Cayley-Dickson algebra of size 2**m.

    Columns are flipped so row 0 is all ``+1``. Valid for m <= 3 only; the
    caller is expected to validate the output.
    """
    n = 1 << m
    return np.array(
        [[_cd_product_sign(r ^ c, c, m) * _cd_product_sign(c, c, m) for c in range(n)] for r in range(n)],
        dtype=np.int8,
    )


Strategy = Callable[[int], np.ndarray]


@lru_cache(maxsize=None)
def _cached(m: int, strategy: Strategy) -> SignPattern:
    if m in _FIXED_TABLES:
        return SignPattern(m, _FIXED_TABLES[m])
    table = strategy(m)
    witness = find_violation(table)
    if witness is not None:
        raise UnsupportedOrderError(m, witness)
    return SignPattern(m, table)


def sign_pattern(m: int, strategy: Strategy = cayley_dickson_signs) -> SignPattern:
    """Sign table for ``m`` qubits.

    Raises :class:`UnsupportedOrderError` when ``strategy`` cannot produce a
    valid table; for m >= 4 the default strategy always does, since real
    orthogonal designs of this shape only exist in sizes 1, 2, 4 and 8.
    """
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ValidationError(f"m must be a positive integer, got {m!r}")
    return _cached(int(m), strategy)
