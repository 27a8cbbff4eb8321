from __future__ import annotations

from typing import Iterable, Sequence


class Partition:
    """Equivalence relation on ``range(n)`` in canonical block form.

    Blocks are sorted, and ordered by least element, so equality is
    structural.
    """

    __slots__ = ("n", "blocks", "_labels")

    def __init__(self, n: int, blocks: Iterable[Iterable[int]]):
        bl = sorted(tuple(sorted(set(b))) for b in blocks if b)
        labels = [-1] * n
        for i, b in enumerate(bl):
            for x in b:
                if not 0 <= x < n:
                    raise ValueError(f"element {x} outside 0..{n - 1}")
                if labels[x] != -1:
                    raise ValueError(f"element {x} appears in two blocks")
                labels[x] = i
        if -1 in labels:
            raise ValueError(f"element {labels.index(-1)} is in no block")
        self.n = n
        self.blocks = tuple(bl)
        self._labels = tuple(labels)

    @classmethod
    def identity(cls, n: int) -> "Partition":
        return cls(n, [[i] for i in range(n)])

    @classmethod
    def full(cls, n: int) -> "Partition":
        return cls(n, [range(n)])

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        groups: dict[int, list[int]] = {}
        for x, lab in enumerate(labels):
            groups.setdefault(lab, []).append(x)
        return cls(len(labels), groups.values())

    @classmethod
    def generated_by(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Partition":
        """Least equivalence relation containing `pairs`."""
        uf = UnionFind(n)
        for a, b in pairs:
            uf.union(a, b)
        return cls.from_labels([uf.find(x) for x in range(n)])

    @property
    def labels(self) -> tuple[int, ...]:
        """Block index of every element."""
        return self._labels

    def block_of(self, x: int) -> tuple[int, ...]:
        return self.blocks[self._labels[x]]

    def related(self, a: int, b: int) -> bool:
        return self._labels[a] == self._labels[b]

    def pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset((a, b) for blk in self.blocks for a in blk for b in blk)

    def is_identity(self) -> bool:
        return len(self.blocks) == self.n

    def is_full(self) -> bool:
        return len(self.blocks) <= 1

    def meet(self, other: "Partition") -> "Partition":
        return Partition.from_labels(list(zip(self._labels, other._labels)))

    def join(self, other: "Partition") -> "Partition":
        uf = UnionFind(self.n)
        for p in (self, other):
            for blk in p.blocks:
                for x in blk[1:]:
                    uf.union(blk[0], x)
        return Partition.from_labels([uf.find(x) for x in range(self.n)])

    def __le__(self, other: "Partition") -> bool:
        return all(other.related(b[0], x) for b in self.blocks for x in b[1:])

    def __eq__(self, other):
        return isinstance(other, Partition) and self.n == other.n and self.blocks == other.blocks

    def __hash__(self):
        return hash((self.n, self.blocks))

    def __lt__(self, other: "Partition") -> bool:
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        # finest first, so the identity relation sorts first and the full one last
        return (-len(self.blocks), self.blocks)

    def to_json(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]

    def __repr__(self):
        return f"Partition({self.to_json()})"


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra < rb:
            self.parent[rb] = ra
        else:
            self.parent[ra] = rb
        return True
