"""
Sparsity patterns: partitions of the antenna indices into ns disjoint,
nonempty support sets, one per precoder column.

Indices are 0-based in code. ``str(pattern)`` and the CLI print 1-based
indices, e.g. ``{1,2}|{3,4}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial

import numpy as np

MAX_NT = 16


@dataclass(frozen=True)
class SparsityPattern:
    """Ordered support sets; block j is the support of precoder column j.

    Blocks are kept in canonical order (sorted by smallest element), so the
    block containing antenna 0 always feeds column 0.
    """

    blocks: tuple[tuple[int, ...], ...]
    nt: int

    def __post_init__(self):
        seen = [i for b in self.blocks for i in b]
        if any(len(b) == 0 for b in self.blocks):
            raise ValueError("support sets must be nonempty")
        if sorted(seen) != list(range(self.nt)):
            raise ValueError(f"blocks {self.blocks} do not partition range({self.nt})")
        if any(list(b) != sorted(b) for b in self.blocks):
            raise ValueError("support sets must be sorted")
        if [b[0] for b in self.blocks] != sorted(b[0] for b in self.blocks):
            raise ValueError("blocks must be ordered by smallest element")

    @classmethod
    def from_blocks(cls, blocks, nt: int | None = None) -> "SparsityPattern":
        """Build a canonical pattern from any iterable of index collections."""
        bl = sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0] if b else -1)
        if nt is None:
            nt = sum(len(b) for b in bl)
        return cls(tuple(bl), nt)

    @property
    def ns(self) -> int:
        return len(self.blocks)

    def complement(self, j: int) -> tuple[int, ...]:
        """Indices outside block `j`: the rows of column j that must be zero."""
        if not 0 <= j < self.ns:
            raise IndexError(f"block index {j} out of range for {self.ns} blocks")
        inside = set(self.blocks[j])
        return tuple(i for i in range(self.nt) if i not in inside)

    def mask(self):
        """Boolean nt x ns array, True where the precoder may be nonzero."""
        m = np.zeros((self.nt, self.ns), dtype=bool)
        for j, b in enumerate(self.blocks):
            m[list(b), j] = True
        return m

    def __str__(self):
        return "|".join("{" + ",".join(str(i + 1) for i in b) + "}" for b in self.blocks)


def _check_dims(nt: int, ns: int):
    if not (1 <= ns <= nt <= MAX_NT):
        raise ValueError(f"need 1 <= ns <= nt <= {MAX_NT}, got nt={nt}, ns={ns}")


def count_patterns(nt: int, ns: int) -> int:
    """Number of partitions of nt antennas into ns nonempty blocks.

    Evaluated from the inclusion-exclusion closed form in exact integers.
    """
    _check_dims(nt, ns)
    total = sum((-1) ** m * comb(ns, m) * (ns - m) ** nt for m in range(ns + 1))
    q, r = divmod(total, factorial(ns))
    assert r == 0
    return q


def _restricted_growth_strings(nt: int, ns: int):
    """Label strings a with a[0] = 0 and a[i] <= 1 + max(a[:i]), using
    exactly ns labels, in lexicographic order."""
    a = [0] * nt

    def rec(i, top):
        if i == nt:
            if top == ns - 1:
                yield tuple(a)
            return
        if (ns - 1 - top) > (nt - i):
            return
        for v in range(min(top + 1, ns - 1) + 1):
            a[i] = v
            yield from rec(i + 1, max(top, v))

    yield from rec(1, 0)


def _partitions(nt: int, ns: int) -> list:
    # Same order as _restricted_growth_strings, built level by level: each
    # partial partition of range(i) spawns its children in label order, so
    # every level stays lexicographically sorted.
    level = [((0,),)]
    for i in range(1, nt):
        rem = nt - i - 1
        nxt = []
        for bl in level:
            u = len(bl)
            if ns - u <= rem:
                for k in range(u):
                    nxt.append(bl[:k] + (bl[k] + (i,),) + bl[k + 1:])
            if u < ns and ns - u - 1 <= rem:
                nxt.append(bl + ((i,),))
        level = nxt
    return [bl for bl in level if len(bl) == ns]


@lru_cache(maxsize=64)
def enumerate_patterns(nt: int, ns: int) -> tuple[SparsityPattern, ...]:
    """All sparsity patterns for an nt x ns precoder, in canonical order.

    Canonical order is lexicographic on the restricted-growth encoding, where
    entry i is the block label of antenna i.
    """
    _check_dims(nt, ns)
    # Generated partitions are valid by construction; skip re-validation.
    new, setattr_ = object.__new__, object.__setattr__
    out = []
    for blocks in _partitions(nt, ns):
        pat = new(SparsityPattern)
        setattr_(pat, "blocks", blocks)
        setattr_(pat, "nt", nt)
        out.append(pat)
    return tuple(out)
