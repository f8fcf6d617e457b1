"""Set partitions of {1, ..., k}: enumeration, the join operation and kernels.

Partitions are stored canonically (blocks sorted by their minimum, elements
ascending) so that two equal partitions compare and hash identically and can
be used directly as matrix indices.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BoundsError

__all__ = [
    "MAX_K",
    "SetPartition",
    "enumerate_partitions",
    "enumerate_noncrossing",
    "is_noncrossing",
    "join",
    "num_blocks",
    "kernel",
    "delta",
    "discrete",
    "one_block",
    "bell_number",
    "catalan_number",
]

# B_11 = 678570 partitions is the largest list we are willing to materialise.
MAX_K = 11


@dataclass(frozen=True, order=True)
class SetPartition:
    """A partition of ``{1, ..., k}`` into nonempty blocks.

    Use :meth:`from_blocks` or :func:`kernel` rather than the raw constructor;
    they put the blocks in canonical order.
    """

    k: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.k < 1:
            raise BoundsError(f"k must be positive, got {self.k}")
        seen = [x for b in self.blocks for x in b]
        if any(len(b) == 0 for b in self.blocks):
            raise ValueError("empty block")
        if sorted(seen) != list(range(1, self.k + 1)):
            raise ValueError(f"blocks {self.blocks} do not partition 1..{self.k}")
        canon = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        if canon != self.blocks:
            object.__setattr__(self, "blocks", canon)

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], k: int | None = None) -> "SetPartition":
        blocks = [tuple(b) for b in blocks]
        if k is None:
            k = sum(len(b) for b in blocks)
        return cls(k, tuple(blocks))

    @classmethod
    def from_rgs(cls, rgs: Sequence[int]) -> "SetPartition":
        """Build from a restricted growth string (0-based block labels)."""
        groups: dict[int, list[int]] = {}
        for pos, label in enumerate(rgs, start=1):
            groups.setdefault(label, []).append(pos)
        return cls(len(rgs), tuple(tuple(g) for g in groups.values()))

    @property
    def labels(self) -> tuple[int, ...]:
        """Block index of each point 1..k (its restricted growth string)."""
        out = [0] * self.k
        for b, block in enumerate(self.blocks):
            for x in block:
                out[x - 1] = b
        return tuple(out)

    def __len__(self):
        return len(self.blocks)

    def __str__(self):
        return "".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)

    def refines(self, other: "SetPartition") -> bool:
        """True when every block of self lies inside a block of ``other``."""
        lab = other.labels
        return all(len({lab[x - 1] for x in b}) == 1 for b in self.blocks)


def _check_k(k):
    if not isinstance(k, int) or k < 1 or k > MAX_K:
        raise BoundsError(f"k must be in 1..{MAX_K}, got {k}")


def _rgs_lex(k):
    """Restricted growth strings of length k in lexicographic order."""
    a = [0] * k
    m = [0] * k  # m[i] = max(a[:i+1])
    while True:
        yield tuple(a)
        i = k - 1
        while i > 0 and a[i] == m[i - 1] + 1:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        m[i] = max(m[i - 1], a[i])
        for j in range(i + 1, k):
            a[j] = 0
            m[j] = m[i]


@functools.lru_cache(maxsize=None)
def enumerate_partitions(k: int) -> tuple[SetPartition, ...]:
    """All partitions of {1..k}, ordered by reverse-lexicographic restricted
    growth string: the discrete partition comes first, one block last."""
    _check_k(k)
    return tuple(SetPartition.from_rgs(r) for r in reversed(list(_rgs_lex(k))))


@functools.lru_cache(maxsize=None)
def enumerate_noncrossing(k: int) -> tuple[SetPartition, ...]:
    """Noncrossing partitions of {1..k}, as a sub-list of
    :func:`enumerate_partitions`."""
    _check_k(k)
    return tuple(p for p in enumerate_partitions(k) if is_noncrossing(p))


def is_noncrossing(p: SetPartition) -> bool:
    lab = p.labels
    k = p.k
    # a < b < c < d with a~c, b~d in different blocks
    for a in range(k):
        for c in range(a + 2, k):
            if lab[a] != lab[c]:
                continue
            for b in range(a + 1, c):
                if lab[b] == lab[a]:
                    continue
                for d in range(c + 1, k):
                    if lab[d] == lab[b]:
                        return False
    return True


def join(p: SetPartition, q: SetPartition) -> SetPartition:
    """Least upper bound in the partition lattice."""
    if p.k != q.k:
        raise ValueError(f"cannot join partitions of {p.k} and {q.k} points")
    parent = list(range(p.k + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for part in (p, q):
        for b in part.blocks:
            r = find(b[0])
            for x in b[1:]:
                parent[find(x)] = r
    groups: dict[int, list[int]] = {}
    for x in range(1, p.k + 1):
        groups.setdefault(find(x), []).append(x)
    return SetPartition(p.k, tuple(tuple(g) for g in groups.values()))


def num_blocks(p: SetPartition) -> int:
    return len(p.blocks)


def kernel(t: Sequence[int]) -> SetPartition:
    """Partition of positions whose blocks collect equal entries of ``t``."""
    if len(t) == 0:
        raise ValueError("kernel of an empty tuple")
    groups: dict[int, list[int]] = {}
    for pos, v in enumerate(t, start=1):
        groups.setdefault(v, []).append(pos)
    return SetPartition(len(t), tuple(tuple(g) for g in groups.values()))


def delta(p: SetPartition, t: Sequence[int]) -> int:
    """1 if ``t`` is constant on every block of ``p``, else 0."""
    if len(t) != p.k:
        raise ValueError(f"tuple of length {len(t)} against partition of {p.k} points")
    return int(all(len({t[x - 1] for x in b}) == 1 for b in p.blocks))


def discrete(k: int) -> SetPartition:
    return SetPartition(k, tuple((x,) for x in range(1, k + 1)))


def one_block(k: int) -> SetPartition:
    return SetPartition(k, (tuple(range(1, k + 1)),))


def bell_number(k: int) -> int:
    """B_k from the Bell triangle."""
    row = [1]
    for _ in range(k - 1):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[-1]


def catalan_number(k: int) -> int:
    c = [1]
    for m in range(k):
        c.append(sum(c[i] * c[m - i] for i in range(m + 1)))
    return c[k]
