"""K-ary hierarchical partitioning of a box-shaped decision space.

A :class:`Tree` owns the nodes; each node is a cell of the partition with a
representative point (the cell center) and the objective vector evaluated
there. Expanding a node splits its cell into ``K`` equal-width slices along
one coordinate.

Cell bounds are exact rationals, so slices stay exactly equal-width at any
depth and the representative point is the correctly rounded float of the
exact center. Float bounds would drift by an ulp per split and, deep in the
tree, misplace centers by more than the cell width.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

SEQUENTIAL = "sequential"
RANDOM = "random"
SPLIT_POLICIES = (SEQUENTIAL, RANDOM)


class BudgetExhausted(Exception):
    """The evaluation budget cannot fund the requested work."""


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box; bounds are converted to exact fractions."""

    lower: tuple[Fraction, ...]
    upper: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "lower", tuple(map(_exact, self.lower)))
        object.__setattr__(self, "upper", tuple(map(_exact, self.upper)))
        if len(self.lower) != len(self.upper) or not self.lower:
            raise ValueError("box bounds must be non-empty and of equal length")
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError(f"invalid box: lower {self.lower} exceeds upper {self.upper}")

    @classmethod
    def from_bounds(cls, lower: Sequence[float], upper: Sequence[float]) -> "Box":
        return cls(tuple(lower), tuple(upper))

    @property
    def n(self) -> int:
        return len(self.lower)

    @property
    def widths(self) -> np.ndarray:
        return np.array([float(hi - lo) for lo, hi in zip(self.lower, self.upper)])

    @property
    def center(self) -> np.ndarray:
        """Correctly rounded float center."""
        return np.array([float((lo + hi) / 2) for lo, hi in zip(self.lower, self.upper)])

    def contains(self, x: Sequence[float]) -> bool:
        """Closed-box membership, compared exactly."""
        return all(lo <= float(v) <= hi for lo, v, hi in zip(self.lower, x, self.upper))


def _exact(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    v = float(value)
    if not np.isfinite(v):
        raise ValueError(f"box bound {value!r} is not finite")
    return Fraction(v)


def split_dimension(depth: int, n: int, policy: str = SEQUENTIAL,
                    rng: Optional[np.random.Generator] = None) -> int:
    """Coordinate along which a node at ``depth`` is split."""
    if n < 1:
        raise ValueError("decision dimension must be >= 1")
    if policy == SEQUENTIAL:
        return depth % n
    if policy == RANDOM:
        if rng is None:
            raise ValueError("random split policy needs a generator")
        return int(rng.integers(n))
    raise ValueError(f"unknown split policy {policy!r}")


def split_cell(cell: Box, dim: int, K: int) -> list[Box]:
    """Slice ``cell`` into ``K`` equal-width boxes along ``dim``, low to high."""
    if K < 2:
        raise ValueError("partition factor K must be >= 2")
    lo, hi = cell.lower[dim], cell.upper[dim]
    if not hi > lo:
        raise ValueError(f"cannot split zero-width dimension {dim}")
    edges = [lo + (hi - lo) * k / K for k in range(K + 1)]
    out = []
    for k in range(K):
        lower = list(cell.lower)
        upper = list(cell.upper)
        lower[dim], upper[dim] = edges[k], edges[k + 1]
        out.append(Box(tuple(lower), tuple(upper)))
    return out


@dataclass(eq=False)
class Node:
    depth: int
    index: int
    cell: Box
    rep: np.ndarray
    value: tuple[float, ...]
    parent: Optional["Node"] = field(default=None, repr=False)
    children: list["Node"] = field(default_factory=list, repr=False)
    split_dim: Optional[int] = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def key(self) -> tuple[int, int]:
        return (self.depth, self.index)


Evaluator = Callable[[np.ndarray], tuple[float, ...]]


class Tree:
    """Hierarchical partition tree with a per-depth leaf registry.

    Parameters
    ----------
    box : Box
        Root cell; must have positive width in every coordinate.
    K : int
        Partition factor (>= 2).
    policy : str
        ``"sequential"`` or ``"random"`` choice of split coordinate.
    seed : int, optional
        Seed of the generator used by the random policy.
    """

    def __init__(self, box: Box, K: int = 3, policy: str = SEQUENTIAL,
                 seed: Optional[int] = None) -> None:
        if K < 2:
            raise ValueError("partition factor K must be >= 2")
        if policy not in SPLIT_POLICIES:
            raise ValueError(f"unknown split policy {policy!r}")
        if np.any(box.widths <= 0):
            raise ValueError("root box must have positive width in every coordinate")
        self.box = box
        self.K = K
        self.policy = policy
        self.rng = np.random.default_rng(seed)
        self.root: Optional[Node] = None
        self.expanded: list[Node] = []
        self._leaves: dict[int, dict[int, Node]] = {}
        self.depth = 0

    @property
    def n(self) -> int:
        return self.box.n

    def fresh_evaluations_per_expansion(self) -> int:
        return self.K - 1 if self.K % 2 else self.K

    def init_root(self, evaluate: Evaluator) -> Node:
        if self.root is not None:
            raise ValueError("tree already has a root")
        rep = self.box.center
        self.root = Node(0, 0, self.box, rep, tuple(evaluate(rep)))
        self._leaves[0] = {0: self.root}
        return self.root

    def leaves_at(self, depth: int) -> list[Node]:
        """Leaves at ``depth`` in ascending index order."""
        reg = self._leaves.get(depth)
        if not reg:
            return []
        return [reg[i] for i in sorted(reg)]

    def leaves(self) -> list[Node]:
        return [node for h in sorted(self._leaves) for node in self.leaves_at(h)]

    def expand(self, node: Node, evaluate: Evaluator, remaining: Optional[int] = None) -> list[Node]:
        """Split ``node`` into ``K`` evaluated children.

        The middle child of an odd ``K`` shares the parent's center and reuses
        its objective vector. ``remaining`` is the number of evaluations still
        affordable; when it cannot cover the expansion, :class:`BudgetExhausted`
        is raised before anything changes.
        """
        if not node.is_leaf:
            raise ValueError(f"node {node.key} is already expanded")
        need = self.fresh_evaluations_per_expansion()
        if remaining is not None and remaining < need:
            raise BudgetExhausted(f"expansion needs {need} evaluations, {remaining} left")
        dim = split_dimension(node.depth, self.n, self.policy, self.rng)
        cells = split_cell(node.cell, dim, self.K)
        mid = self.K // 2 if self.K % 2 else None
        children = []
        for k, cell in enumerate(cells):
            if k == mid:
                rep, value = node.rep, node.value
            else:
                rep = cell.center
                value = tuple(evaluate(rep))
            children.append(Node(node.depth + 1, node.index * self.K + k, cell, rep, value,
                                 parent=node))
        node.children = children
        node.split_dim = dim
        del self._leaves[node.depth][node.index]
        reg = self._leaves.setdefault(node.depth + 1, {})
        for child in children:
            reg[child.index] = child
        self.depth = max(self.depth, node.depth + 1)
        self.expanded.append(node)
        return children

    def locate(self, x: Sequence[float]) -> list[Node]:
        """All leaves whose closed cell contains ``x``."""
        return [leaf for leaf in self.leaves() if leaf.cell.contains(x)]


def expand_node(tree: Tree, node: Node, evaluator: Evaluator,
                budget: Optional[int] = None) -> list[Node]:
    """Functional alias of :meth:`Tree.expand`."""
    return tree.expand(node, evaluator, budget)
