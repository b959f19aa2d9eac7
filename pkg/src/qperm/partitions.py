"""Set partitions of [k] = {1, ..., k}, non-crossing partitions and Z_s colorings.

Partitions are stored canonically: every block sorted ascending, blocks sorted
by their minimum.  The restricted-growth string (RGS) is the serialized form,
e.g. ``"0011"`` for {{1,2},{3,4}}.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import DomainError

__all__ = [
    "Partition",
    "ColoredWord",
    "enumerate_partitions",
    "is_noncrossing",
    "join",
    "kernel_of_index",
    "delta",
    "enumerate_colored_nc",
    "catalan",
    "bell",
]


@dataclass(frozen=True)
class Partition:
    k: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.k < 0:
            raise DomainError(f"ground set size must be nonnegative, got {self.k}")
        seen: list[int] = []
        for b in self.blocks:
            if not b:
                raise DomainError("partition blocks must be non-empty")
            seen.extend(b)
        if sorted(seen) != list(range(1, self.k + 1)):
            raise DomainError(f"blocks {self.blocks} do not partition [1..{self.k}]")
        canon = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        if canon != self.blocks:
            object.__setattr__(self, "blocks", canon)

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], k: int | None = None) -> "Partition":
        blocks = [tuple(b) for b in blocks]
        if k is None:
            k = sum(len(b) for b in blocks)
        return cls(k, tuple(blocks))

    @classmethod
    def from_rgs(cls, rgs: str | Sequence[int]) -> "Partition":
        labels = [int(c) for c in rgs] if isinstance(rgs, str) else list(rgs)
        groups: dict[int, list[int]] = {}
        for pos, lab in enumerate(labels, start=1):
            groups.setdefault(lab, []).append(pos)
        return cls(len(labels), tuple(tuple(g) for g in groups.values()))

    @classmethod
    def singletons(cls, k: int) -> "Partition":
        return cls(k, tuple((i,) for i in range(1, k + 1)))

    @classmethod
    def one_block(cls, k: int) -> "Partition":
        return cls(k, (tuple(range(1, k + 1)),) if k else ())

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def labels(self) -> tuple[int, ...]:
        """Block label of each point, blocks numbered by first appearance."""
        lab = [0] * self.k
        for n, b in enumerate(self.blocks):
            for x in b:
                lab[x - 1] = n
        return tuple(lab)

    def rgs(self) -> str:
        # blocks beyond 9 would need a separator; k stays far below that here
        lab = self.labels()
        if lab and max(lab) > 9:
            return ",".join(map(str, lab))
        return "".join(map(str, lab))

    def refines(self, other: "Partition") -> bool:
        """True iff self <= other, i.e. every block of self lies inside a block of other."""
        if self.k != other.k:
            raise DomainError("partitions of different ground sets are incomparable")
        lab = other.labels()
        return all(len({lab[x - 1] for x in b}) == 1 for b in self.blocks)

    def __str__(self) -> str:
        return "{" + ",".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + "}"


@dataclass(frozen=True)
class ColoredWord:
    s: int
    letters: tuple[int, ...]

    def __post_init__(self):
        if self.s < 1:
            raise DomainError(f"modulus must be positive, got {self.s}")
        letters = tuple(int(a) for a in self.letters)
        for a in letters:
            if not 0 <= a < self.s:
                raise DomainError(f"letter {a} is not in Z_{self.s}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, s: int, text: str) -> "ColoredWord":
        text = text.strip()
        if not text:
            return cls(s, ())
        return cls(s, tuple(int(a) % s for a in text.split(",")))

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return ",".join(map(str, self.letters))


def _rgs_sequences(k: int) -> Iterator[tuple[int, ...]]:
    # lexicographic order on restricted-growth strings
    if k == 0:
        yield ()
        return

    def rec(prefix: list[int], top: int):
        if len(prefix) == k:
            yield tuple(prefix)
            return
        for a in range(top + 2):
            prefix.append(a)
            yield from rec(prefix, max(top, a))
            prefix.pop()

    yield from rec([0], 0)


def _crossing_free(labels: Sequence[int]) -> bool:
    # stack of open blocks; a repeated label must be the innermost open block
    first: dict[int, int] = {}
    last: dict[int, int] = {}
    for pos, lab in enumerate(labels):
        first.setdefault(lab, pos)
        last[lab] = pos
    stack: list[int] = []
    for pos, lab in enumerate(labels):
        if pos == first[lab]:
            stack.append(lab)
        elif stack[-1] != lab:
            return False
        if pos == last[lab]:
            stack.pop()
    return True


def is_noncrossing(p: Partition) -> bool:
    return _crossing_free(p.labels())


@lru_cache(maxsize=None)
def _enumerate(k: int, noncrossing_only: bool) -> tuple[Partition, ...]:
    out = []
    for seq in _rgs_sequences(k):
        if noncrossing_only and not _crossing_free(seq):
            continue
        out.append(Partition.from_rgs(seq))
    return tuple(out)


def enumerate_partitions(k: int, noncrossing_only: bool = True) -> list[Partition]:
    """All partitions of [k] (or only NC(k)) in lexicographic RGS order."""
    if k < 0:
        raise DomainError(f"k must be nonnegative, got {k}")
    return list(_enumerate(k, bool(noncrossing_only)))


def join(p: Partition, q: Partition) -> Partition:
    """Finest partition coarser than both p and q."""
    if p.k != q.k:
        raise DomainError(f"cannot join partitions of [{p.k}] and [{q.k}]")
    parent = list(range(p.k + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for b in p.blocks + q.blocks:
        root = find(b[0])
        for x in b[1:]:
            rx = find(x)
            if rx != root:
                parent[rx] = root
    groups: dict[int, list[int]] = {}
    for x in range(1, p.k + 1):
        groups.setdefault(find(x), []).append(x)
    return Partition(p.k, tuple(tuple(g) for g in groups.values()))


def kernel_of_index(i: Sequence[int]) -> Partition:
    """Partition of the slots of ``i`` by equality of their values."""
    groups: dict[int, list[int]] = {}
    for pos, v in enumerate(i, start=1):
        groups.setdefault(v, []).append(pos)
    return Partition(len(i), tuple(tuple(g) for g in groups.values()))


def delta(p: Partition, i: Sequence[int]) -> int:
    """1 if ``i`` is constant on every block of ``p``, else 0."""
    if len(i) != p.k:
        raise DomainError(f"index of length {len(i)} against partition of [{p.k}]")
    for b in p.blocks:
        v = i[b[0] - 1]
        if any(i[x - 1] != v for x in b[1:]):
            return 0
    return 1


def block_sums_vanish(p: Partition, w: ColoredWord) -> bool:
    return all(sum(w.letters[x - 1] for x in b) % w.s == 0 for b in p.blocks)


def enumerate_colored_nc(w: ColoredWord) -> list[Partition]:
    """NC partitions of [len(w)] whose blocks have letter sum 0 mod s."""
    return [p for p in enumerate_partitions(len(w), True) if block_sums_vanish(p, w)]


@lru_cache(maxsize=None)
def catalan(n: int) -> int:
    from math import comb

    return comb(2 * n, n) // (n + 1)


@lru_cache(maxsize=None)
def bell(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]
