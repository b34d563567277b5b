"""Item taxonomy (is-a tree) with level-wise generalization queries.

Nodes get dense integer ids so they can index numpy arrays.  The root is
not a node: it sits at level 0 and is never returned as a generalization.
Level 1 holds the top categories and level ``H`` the most specific items.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .exceptions import (
    CycleDetected,
    DisconnectedNode,
    EmptyInput,
    LevelOutOfRange,
    MultipleParents,
    TaxonomyError,
)

ROOT = "ROOT"
NO_PARENT = -1


@dataclass(frozen=True, eq=False)
class TaxonomyTree:
    """Immutable taxonomy.

    Attributes
    ----------
    labels : tuple of str
        Label of every node, indexed by node id.  Copy nodes created by
        :func:`rebalance` repeat the label of the leaf they stand in for.
    parents : numpy.ndarray
        Parent id of every node, ``-1`` for level-1 nodes (children of the root).
    levels : numpy.ndarray
        Depth of every node, 1 for the top categories.
    is_copy : numpy.ndarray
        True for nodes added by :func:`rebalance`.
    """

    labels: tuple
    parents: np.ndarray
    levels: np.ndarray
    is_copy: np.ndarray
    _anc: np.ndarray = field(repr=False)
    _by_level: tuple = field(repr=False)
    _label_index: dict = field(repr=False)
    _terminal: np.ndarray = field(repr=False)
    _is_leaf: np.ndarray = field(repr=False)

    @property
    def height(self) -> int:
        return len(self._by_level) - 1

    @property
    def node_count(self) -> int:
        return len(self.labels)

    @property
    def is_balanced(self) -> bool:
        return all(self.levels[v] == self.height for v in self.leaves())

    def label(self, v: int) -> str:
        return self.labels[v]

    def level(self, v: int) -> int:
        return int(self.levels[v])

    def parent(self, v: int) -> int:
        return int(self.parents[v])

    def node(self, label: str) -> int:
        """Id of the original (non-copy) node carrying ``label``."""
        return self._label_index[label]

    def terminal(self, v: int) -> int:
        """Deepest node of the copy chain hanging below ``v`` (``v`` itself if none)."""
        return int(self._terminal[v])

    def is_leaf(self, v: int) -> bool:
        return bool(self._is_leaf[v])

    def leaves(self) -> list[int]:
        return [int(v) for v in np.flatnonzero(self._is_leaf)]

    def children(self, v: int) -> list[int]:
        return [int(c) for c in np.flatnonzero(self.parents == v)]

    def ancestor_at_level(self, v: int, h: int) -> int:
        return ancestor_at_level(self, v, h)

    def level_nodes(self, h: int) -> list[int]:
        return level_nodes(self, h)

    def ancestor_array(self, h: int) -> np.ndarray:
        """Vector mapping every node id to its level-``h`` ancestor (-1 if shallower)."""
        return self._anc[h]

    def edges(self) -> list[tuple[str, str]]:
        """``(child, parent)`` label pairs of the original (non-copy) nodes, in id order."""
        out = []
        for v in range(self.node_count):
            if self.is_copy[v]:
                continue
            p = self.parent(v)
            out.append((self.labels[v], ROOT if p == NO_PARENT else self.labels[p]))
        return out


def _assemble(labels, parents, is_copy) -> TaxonomyTree:
    n = len(labels)
    parents = np.asarray(parents, dtype=np.int64)
    levels = np.zeros(n, dtype=np.int64)
    # ids are assigned so that a parent always precedes its children
    for v in range(n):
        p = parents[v]
        levels[v] = 1 if p == NO_PARENT else levels[p] + 1
    height = int(levels.max()) if n else 0

    anc = np.full((height + 1, n), -1, dtype=np.int64)
    for v in range(n):
        u = v
        while u != NO_PARENT:
            anc[levels[u], v] = u
            u = parents[u]

    by_level = [[] for _ in range(height + 1)]
    for v in range(n):
        by_level[levels[v]].append(v)

    index = {}
    for v, lab in enumerate(labels):
        if not is_copy[v]:
            index[lab] = v
    terminal = np.arange(n, dtype=np.int64)
    for v in range(n - 1, -1, -1):
        if is_copy[v]:
            # copies are appended after their original in chain order
            terminal[parents[v]] = terminal[v]

    is_leaf = np.ones(n, dtype=bool)
    is_leaf[parents[parents >= 0]] = False

    return TaxonomyTree(
        labels=tuple(labels),
        parents=parents,
        levels=levels,
        is_copy=np.asarray(is_copy, dtype=bool),
        _anc=anc,
        _by_level=tuple(tuple(x) for x in by_level),
        _label_index=index,
        _terminal=terminal,
        _is_leaf=is_leaf,
    )


def build_taxonomy(edges: Iterable[tuple[str, str]]) -> TaxonomyTree:
    """Build and validate a taxonomy from ``(child, parent)`` label pairs.

    The root is either the reserved label ``"ROOT"`` used as a parent, or
    the single label that never occurs as a child.  Node ids are assigned
    breadth-first, siblings in order of first appearance.

    Raises
    ------
    EmptyInput, CycleDetected, MultipleParents, DisconnectedNode
    """
    edges = [(str(c), str(p)) for c, p in edges]
    if not edges:
        raise EmptyInput("taxonomy has no edges")

    parents_of = defaultdict(list)
    order = {}
    for child, parent in edges:
        if not child or not parent:
            raise TaxonomyError("empty label in taxonomy edge")
        if child == ROOT:
            raise TaxonomyError(f"reserved label {ROOT!r} used as a child")
        if parent not in parents_of[child]:
            parents_of[child].append(parent)
        order.setdefault(parent, len(order))
        order.setdefault(child, len(order))

    _check_cycles(parents_of)
    for child, ps in parents_of.items():
        if len(ps) > 1:
            raise MultipleParents(f"{child!r} has parents {ps}")

    if ROOT in order:
        root = ROOT
    else:
        tops = [lab for lab in order if lab not in parents_of]
        if len(tops) != 1:
            raise DisconnectedNode(f"expected exactly one root, found {sorted(tops)}")
        root = tops[0]

    kids = defaultdict(list)
    for child, (parent,) in parents_of.items():
        kids[parent].append(child)
    for lst in kids.values():
        lst.sort(key=order.__getitem__)

    labels, parents = [], []
    ids = {}
    frontier = [(c, NO_PARENT) for c in kids[root]]
    while frontier:
        nxt = []
        for lab, p in frontier:
            ids[lab] = len(labels)
            labels.append(lab)
            parents.append(p)
            nxt.extend((c, ids[lab]) for c in kids[lab])
        frontier = nxt

    missing = [lab for lab in order if lab != root and lab not in ids]
    if missing:
        raise DisconnectedNode(f"nodes unreachable from root: {sorted(missing)}")
    if not labels:
        raise EmptyInput("taxonomy has no nodes below the root")
    return _assemble(labels, parents, [False] * len(labels))


def _check_cycles(parents_of):
    state = {}  # 1 = on stack, 2 = done
    for start in list(parents_of):
        if state.get(start):
            continue
        stack = [(start, iter(parents_of.get(start, ())))]
        state[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[node] = 2
                stack.pop()
                continue
            s = state.get(nxt)
            if s == 1:
                raise CycleDetected(f"cycle through {nxt!r}")
            if s is None:
                state[nxt] = 1
                stack.append((nxt, iter(parents_of.get(nxt, ()))))


def rebalance(tree: TaxonomyTree) -> TaxonomyTree:
    """Extend every shallow leaf with a chain of copies down to depth ``H``.

    Each copy keeps the label of the leaf, gets a fresh id and is flagged
    in ``is_copy``.  A balanced tree is returned unchanged.
    """
    H = tree.height
    shallow = [v for v in tree.leaves() if tree.levels[v] < H]
    if not shallow:
        return tree
    labels = list(tree.labels)
    parents = list(tree.parents)
    is_copy = list(tree.is_copy)
    for v in shallow:
        p = v
        for _ in range(H - int(tree.levels[v])):
            labels.append(tree.labels[v])
            parents.append(p)
            is_copy.append(True)
            p = len(labels) - 1
    return _assemble(labels, parents, is_copy)


def ancestor_at_level(tree: TaxonomyTree, v: int, h: int) -> int:
    lv = tree.level(v)
    if h < 1 or h > lv:
        raise LevelOutOfRange(h, 1, lv)
    return int(tree._anc[h, v])


def level_nodes(tree: TaxonomyTree, h: int) -> list[int]:
    if h < 1 or h > tree.height:
        raise LevelOutOfRange(h, 1, tree.height)
    return list(tree._by_level[h])


def parse_taxonomy(source: TextIO | Iterable[str]) -> list[tuple[str, str]]:
    """Read ``child<TAB>parent`` lines; blank and ``#`` lines are skipped."""
    edges = []
    for lineno, raw in enumerate(source, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise TaxonomyError(f"line {lineno}: expected 'child<TAB>parent', got {line!r}")
        edges.append((parts[0].strip(), parts[1].strip()))
    return edges


def read_taxonomy(path, balance: bool = True) -> TaxonomyTree:
    with open(path, encoding="utf-8") as fh:
        tree = build_taxonomy(parse_taxonomy(fh))
    return rebalance(tree) if balance else tree


def format_taxonomy(edges: Iterable[tuple[str, str]]) -> str:
    return "".join(f"{c}\t{p}\n" for c, p in edges)
