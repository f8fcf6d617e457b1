"""Exact Gram and Weingarten matrices, and Haar integrals over S_N and S_N^+.

The Gram matrix over a family of partitions of {1..k} has entries
``n ** |p v q|``; its exact inverse is the Weingarten matrix.  An integral of a
coordinate word ``u[i1,j1] ... u[ik,jk]`` is then

    sum over p, q of delta_p(i) delta_q(j) W(p, q)

All arithmetic is exact (Python integers and ``fractions.Fraction``).
"""
from __future__ import annotations

import enum
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, lcm
from typing import Sequence

import numpy as np

from . import partitions as P
from .errors import BoundsError, SingularGramError

from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

__all__ = [
    "Family",
    "GramMatrix",
    "WeingartenMatrix",
    "gram",
    "weingarten",
    "exact_inverse",
    "integrate_sn_closed",
    "integrate_sn_weingarten",
    "integrate_snplus",
    "snplus_3transitive_value",
    "kernel_integral_table",
]


class Family(str, enum.Enum):
    ALL = "all"
    NONCROSSING = "nc"

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, cls):
            return value
        v = str(value).lower()
        if v in ("all", "all_partitions", "p"):
            return cls.ALL
        if v in ("nc", "noncrossing"):
            return cls.NONCROSSING
        raise ValueError(f"unknown partition family {value!r}")

    def __str__(self):
        return self.value


def _family_partitions(k, family):
    if family is Family.ALL:
        return P.enumerate_partitions(k)
    return P.enumerate_noncrossing(k)


@dataclass(frozen=True)
class GramMatrix:
    k: int
    n: int
    family: Family
    partitions: tuple[P.SetPartition, ...]
    entries: np.ndarray  # object array of Python ints

    @property
    def size(self):
        return len(self.partitions)


@dataclass(frozen=True)
class WeingartenMatrix:
    """Exact inverse of a Gram matrix, stored as ``numerators / denominator``."""

    k: int
    n: int
    family: Family
    partitions: tuple[P.SetPartition, ...]
    numerators: np.ndarray  # object array of Python ints
    denominator: int

    @property
    def size(self):
        return len(self.partitions)

    @property
    def entries(self) -> np.ndarray:
        d = self.denominator
        out = np.empty(self.numerators.shape, dtype=object)
        for idx, v in np.ndenumerate(self.numerators):
            out[idx] = Fraction(int(v), d)
        return out

    def entry(self, p: P.SetPartition, q: P.SetPartition) -> Fraction:
        a = self.partitions.index(p)
        b = self.partitions.index(q)
        return Fraction(int(self.numerators[a, b]), self.denominator)


_JOIN_CACHE: dict[tuple[int, Family], np.ndarray] = {}
_W_CACHE: dict[tuple[int, int, Family], WeingartenMatrix] = {}
_TABLE_CACHE: dict[tuple[int, int, Family], tuple[dict, np.ndarray, int]] = {}
_LOCK = threading.Lock()


def _join_sizes(k, family):
    key = (k, family)
    J = _JOIN_CACHE.get(key)
    if J is None:
        parts = _family_partitions(k, family)
        m = len(parts)
        J = np.zeros((m, m), dtype=np.int64)
        for a in range(m):
            for b in range(a, m):
                J[a, b] = J[b, a] = P.num_blocks(P.join(parts[a], parts[b]))
        _JOIN_CACHE[key] = J
    return J


def _check_kn(k, n):
    if not isinstance(n, int) or n < 1:
        raise BoundsError(f"n must be a positive integer, got {n}")
    if not isinstance(k, int) or k < 1 or k > P.MAX_K:
        raise BoundsError(f"k must be in 1..{P.MAX_K}, got {k}")


def gram(k: int, n: int, family=Family.NONCROSSING) -> GramMatrix:
    """Gram matrix ``n ** |p v q|`` indexed by the canonical partition list."""
    family = Family.parse(family)
    _check_kn(k, n)
    J = _join_sizes(k, family)
    n = int(n)
    powers = [n**e for e in range(k + 1)]
    entries = np.empty(J.shape, dtype=object)
    for idx, e in np.ndenumerate(J):
        entries[idx] = powers[e]
    return GramMatrix(k, n, family, _family_partitions(k, family), entries)


def exact_inverse(M) -> tuple[np.ndarray, int]:
    """Invert an integer matrix exactly over the rationals.

    Returns ``(X, d)`` with ``M @ X == d * I``, where ``d > 0`` is the least
    common denominator.  Raises ``ZeroDivisionError`` when ``M`` is singular.
    """
    M = np.asarray(M, dtype=object)
    m = M.shape[0]
    if M.ndim != 2 or M.shape != (m, m):
        raise ValueError("square matrix required")
    D = DomainMatrix([[QQ(int(v)) for v in row] for row in M], (m, m), QQ)
    try:
        rows = D.inv().to_list()
    except DMNonInvertibleMatrixError:
        raise ZeroDivisionError("singular matrix") from None
    d = lcm(*(int(x.denominator) for row in rows for x in row)) if m else 1
    X = np.empty((m, m), dtype=object)
    for a, row in enumerate(rows):
        for b, x in enumerate(row):
            X[a, b] = int(x.numerator) * (d // int(x.denominator))
    return X, d


def weingarten(k: int, n: int, family=Family.NONCROSSING) -> WeingartenMatrix:
    """Exact inverse of :func:`gram`; cached per ``(k, n, family)``."""
    family = Family.parse(family)
    _check_kn(k, n)
    key = (k, int(n), family)
    W = _W_CACHE.get(key)
    if W is not None:
        return W
    with _LOCK:
        W = _W_CACHE.get(key)
        if W is None:
            G = gram(k, n, family)
            try:
                X, d = exact_inverse(G.entries)
            except ZeroDivisionError:
                raise SingularGramError(k, n, family) from None
            W = WeingartenMatrix(k, int(n), family, G.partitions, X, d)
            _W_CACHE[key] = W
    return W


def kernel_integral_table(k: int, n: int, family=Family.NONCROSSING):
    """Integrals indexed by kernel pairs.

    Returns ``(index, Z, d)`` where ``index`` maps each partition of {1..k}
    to a row, and the integral of a word with kernels ``(ker i, ker j)`` is
    ``Z[index[ker i], index[ker j]] / d``.  The value only depends on the
    kernels, because ``delta_p(i) = 1`` exactly when ``p`` refines ``ker i``.
    """
    family = Family.parse(family)
    key = (k, int(n), family)
    hit = _TABLE_CACHE.get(key)
    if hit is not None:
        return hit
    W = weingarten(k, n, family)
    allp = P.enumerate_partitions(k)
    L = np.zeros((len(allp), W.size), dtype=object)
    for a, kap in enumerate(allp):
        for b, pi in enumerate(W.partitions):
            L[a, b] = int(pi.refines(kap))
    Z = L.dot(W.numerators).dot(L.T)
    out = ({p: a for a, p in enumerate(allp)}, Z, W.denominator)
    with _LOCK:
        _TABLE_CACHE[key] = out
    return out


def _check_tuples(i, j, n):
    if len(i) != len(j):
        raise ValueError(f"index tuples have lengths {len(i)} and {len(j)}")
    if len(i) == 0:
        raise ValueError("empty index tuples")
    if not isinstance(n, int) or n < 1:
        raise BoundsError(f"n must be a positive integer, got {n}")
    for v in (*i, *j):
        if not 1 <= v <= n:
            raise ValueError(f"index {v} outside 1..{n}")


def integrate_sn_closed(i: Sequence[int], j: Sequence[int], n: int) -> Fraction:
    """Haar integral over S_n from the factorial formula."""
    _check_tuples(i, j, n)
    ki, kj = P.kernel(i), P.kernel(j)
    if ki != kj:
        return Fraction(0)
    return Fraction(factorial(n - len(ki)), factorial(n))


def _table_integral(i, j, n, family):
    _check_tuples(i, j, n)
    index, Z, d = kernel_integral_table(len(i), n, family)
    return Fraction(int(Z[index[P.kernel(i)], index[P.kernel(j)]]), d)


def integrate_sn_weingarten(i: Sequence[int], j: Sequence[int], n: int) -> Fraction:
    """Haar integral over S_n through the Weingarten matrix of all partitions."""
    return _table_integral(i, j, n, Family.ALL)


def integrate_snplus(i: Sequence[int], j: Sequence[int], n: int) -> Fraction:
    """Haar integral over S_n^+ through the noncrossing Weingarten matrix."""
    return _table_integral(i, j, n, Family.NONCROSSING)


def snplus_3transitive_value(n: int) -> Fraction:
    """``1 / (n (n-1) (n-2))``: the integral of ``u_ij u_kl u_pq`` over distinct triples."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    return Fraction(1, n * (n - 1) * (n - 2))
