"""
Array-backed union-find with path compression and canonical (minimum-index) roots.
"""

import numpy as np


class UnionFind:
    """Disjoint sets over the integers ``0..n-1``.

    The root of every set is its smallest member, so ``find`` doubles as a canonical label.
    """

    def __init__(self, n: int):
        self.parent = np.arange(n, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.parent)

    def find(self, idx: int) -> int:
        parent = self.parent
        root = idx
        while parent[root] != root:
            root = parent[root]
        # Path compression
        while parent[idx] != root:
            parent[idx], idx = root, parent[idx]
        return int(root)

    def union(self, x: int, y: int) -> bool:
        """Merge the sets of ``x`` and ``y``; returns False when they were already joined."""
        x_root = self.find(x)
        y_root = self.find(y)
        if x_root == y_root:
            return False
        if x_root < y_root:
            self.parent[y_root] = x_root
        else:
            self.parent[x_root] = y_root
        return True

    def union_pairs(self, left: np.ndarray, right: np.ndarray) -> None:
        for x, y in zip(left.tolist(), right.tolist()):
            self.union(x, y)

    def labels(self) -> tuple[int, ...]:
        """Canonical label (smallest member of its set) for every element."""
        return tuple(self.find(i) for i in range(len(self.parent)))

    def count(self) -> int:
        return len(set(self.labels()))

    def components(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for i, root in enumerate(self.labels()):
            groups.setdefault(root, []).append(i)
        return [groups[root] for root in sorted(groups)]
