"""Finite permutation groups as an exact classical oracle.

Elements are stored as 0-based image tuples internally; everything that
crosses the module boundary (generators, index tuples, reports) is 1-based.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from math import factorial
from typing import Iterable, Sequence

import numpy as np

from .errors import BoundsError, ResourceError

__all__ = [
    "MAX_ORDER",
    "PermutationGroup",
    "generate_group",
    "parse_cycles",
    "parse_permutation",
    "symmetric_group",
    "alternating_group",
    "cyclic_group",
    "dihedral_group",
    "trivial_group",
    "named_group",
    "integrate_group",
    "haar_table",
    "is_k_transitive",
    "dim_fix",
    "group_model",
]

MAX_ORDER = 10_000


@dataclass(frozen=True)
class PermutationGroup:
    n: int
    elements: tuple[tuple[int, ...], ...]  # 0-based images, identity first
    _index: dict = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {e: a for a, e in enumerate(self.elements)})

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, perm):
        return tuple(x - 1 for x in perm) in self._index

    def images(self) -> list[tuple[int, ...]]:
        """Elements as 1-based one-line images."""
        return [tuple(x + 1 for x in e) for e in self.elements]


def _compose(a, b):
    """(a o b)(x) = a(b(x))."""
    return tuple(a[x] for x in b)


def _to_internal(n, perm):
    perm = tuple(int(x) for x in perm)
    if len(perm) != n or sorted(perm) != list(range(1, n + 1)):
        raise ValueError(f"{perm} is not a permutation of 1..{n}")
    return tuple(x - 1 for x in perm)


def generate_group(n: int, generators: Iterable, max_order: int = MAX_ORDER) -> PermutationGroup:
    """Closure of ``generators`` (1-based images or cycle strings) under composition."""
    if n < 1:
        raise BoundsError(f"degree must be positive, got {n}")
    gens = []
    for g in generators:
        if isinstance(g, str):
            g = parse_permutation(g, n)
        gens.append(_to_internal(n, g))
    ident = tuple(range(n))
    seen = {ident}
    order = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = _compose(g, x)
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    nxt.append(y)
                    if len(order) > max_order:
                        raise ResourceError(f"group order exceeds cap {max_order}")
        frontier = nxt
    return PermutationGroup(n, tuple(order))


def parse_cycles(text: str, n: int) -> tuple[int, ...]:
    """Parse cycle notation such as ``"(1 2 3)(4 5)"`` into 1-based images."""
    text = text.strip()
    img = list(range(1, n + 1))
    if text in ("", "()", "e", "id"):
        return tuple(img)
    if not re.fullmatch(r"(\(\s*[\d\s,]*\)\s*)+", text):
        raise ValueError(f"cannot parse cycle notation {text!r}")
    # cycles are composed right to left
    cycles = [[int(x) for x in re.split(r"[\s,]+", c.strip()) if x] for c in re.findall(r"\(([^)]*)\)", text)]
    perm = list(range(1, n + 1))
    for cyc in reversed(cycles):
        if len(set(cyc)) != len(cyc) or any(not 1 <= x <= n for x in cyc):
            raise ValueError(f"bad cycle {cyc} for degree {n}")
        step = {cyc[t]: cyc[(t + 1) % len(cyc)] for t in range(len(cyc))}
        perm = [step.get(x, x) for x in perm]
    return tuple(perm)


def parse_permutation(text: str, n: int) -> tuple[int, ...]:
    """Accept cycle notation or a one-line image list like ``"2 3 1"`` / ``"[2,3,1]"``."""
    s = text.strip()
    if s.startswith("(") or s in ("", "e", "id"):
        return parse_cycles(s, n)
    vals = tuple(int(x) for x in re.split(r"[\s,\[\]]+", s) if x)
    _to_internal(n, vals)
    return vals


def symmetric_group(n: int) -> PermutationGroup:
    if factorial(n) > MAX_ORDER:
        raise ResourceError(f"S_{n} exceeds the order cap {MAX_ORDER}")
    ident = tuple(range(n))
    rest = [p for p in permutations(range(n)) if p != ident]
    return PermutationGroup(n, (ident, *rest))


def alternating_group(n: int) -> PermutationGroup:
    def even(p):
        inv = sum(1 for a in range(n) for b in range(a + 1, n) if p[a] > p[b])
        return inv % 2 == 0

    S = symmetric_group(n)
    return PermutationGroup(n, tuple(p for p in S.elements if even(p)))


def cyclic_group(n: int) -> PermutationGroup:
    return generate_group(n, [tuple(range(2, n + 1)) + (1,)] if n > 1 else [])


def dihedral_group(n: int) -> PermutationGroup:
    """Symmetries of the n-gon acting on its vertices (order 2n for n >= 3)."""
    if n < 3:
        return symmetric_group(n)
    rot = tuple(range(2, n + 1)) + (1,)
    refl = (1,) + tuple(range(n, 1, -1))
    return generate_group(n, [rot, refl])


def trivial_group(n: int) -> PermutationGroup:
    return PermutationGroup(n, (tuple(range(n)),))


def named_group(name: str, degree: int | None = None) -> PermutationGroup:
    """Shortcuts ``S4``, ``A5``, ``Z(4)``, ``D(4)``, ``1(3)`` (trivial on 3 points)."""
    m = re.fullmatch(r"\s*([SAZDC1])\s*\(?\s*(\d+)\s*\)?\s*", name, re.IGNORECASE)
    if not m:
        raise ValueError(f"unknown group name {name!r}")
    kind, n = m.group(1).upper(), int(m.group(2))
    if degree is not None and degree != n:
        raise ValueError(f"group {name} acts on {n} points, expected {degree}")
    return {
        "S": symmetric_group,
        "A": alternating_group,
        "Z": cyclic_group,
        "C": cyclic_group,
        "D": dihedral_group,
        "1": trivial_group,
    }[kind](n)


def _check_tuples(G, i, j):
    if len(i) != len(j):
        raise ValueError(f"index tuples have lengths {len(i)} and {len(j)}")
    for v in (*i, *j):
        if not 1 <= v <= G.n:
            raise ValueError(f"index {v} outside 1..{G.n}")


def integrate_group(G: PermutationGroup, i: Sequence[int], j: Sequence[int]) -> Fraction:
    """``#{s in G : s(j_t) = i_t for all t} / |G|``."""
    _check_tuples(G, i, j)
    i0 = [x - 1 for x in i]
    j0 = [x - 1 for x in j]
    hits = sum(1 for s in G.elements if all(s[b] == a for a, b in zip(i0, j0)))
    return Fraction(hits, G.order)


def haar_table(G: PermutationGroup, k: int) -> tuple[np.ndarray, int]:
    """Counts ``C[i, j] = #{s : s(j) = i}`` over all k-tuples, plus ``|G|``.

    Tuples are flattened in row-major order (first index most significant).
    Dividing by ``|G|`` gives :func:`integrate_group` for every pair at once.
    """
    n = G.n
    dim = n**k
    if dim * dim > 50_000_000:
        raise ResourceError(f"{dim}x{dim} table too large")
    C = np.zeros((dim, dim), dtype=np.int64)
    tuples = np.array(list(product(range(n), repeat=k)), dtype=np.int64).reshape(dim, k)
    weights = n ** np.arange(k - 1, -1, -1)
    cols = tuples @ weights
    for s in G.elements:
        s = np.asarray(s)
        rows = s[tuples] @ weights
        C[rows, cols] += 1
    return C, G.order


def is_k_transitive(G: PermutationGroup, k: int) -> bool:
    """Single orbit on k-tuples of distinct points."""
    if not 1 <= k <= G.n:
        raise BoundsError(f"k must be in 1..{G.n}, got {k}")
    base = tuple(range(k))
    orbit = {tuple(s[x] for x in base) for s in G.elements}
    return len(orbit) == factorial(G.n) // factorial(G.n - k)


def dim_fix(G: PermutationGroup, k: int) -> int:
    """Number of orbits on ``{1..n}^k`` by Burnside counting."""
    if k < 1 or k > 64:
        raise BoundsError(f"k must be in 1..64, got {k}")
    fixed = Counter(sum(1 for x, y in enumerate(s) if x == y) for s in G.elements)
    total = sum(cnt * f**k for f, cnt in fixed.items())
    q, r = divmod(total, G.order)
    assert r == 0, "Burnside count is not an integer"
    return q


def group_model(G: PermutationGroup):
    """Fiber-per-element 0/1 model with ``P_ij = 1`` iff ``s(j) = i``."""
    from .models import MagicModel

    n = G.n
    grids = np.zeros((G.order, n, n, 1, 1), dtype=complex)
    for f, s in enumerate(G.elements):
        for j in range(n):
            grids[f, s[j], j, 0, 0] = 1.0
    weights = [Fraction(1, G.order)] * G.order
    return MagicModel(n=n, kdim=1, weights=weights, grids=grids)
