"""Transaction store, level-generalized views and support counting.

Counting goes through a per-level vertical bitmap: one packed bit row per
taxonomy node, one bit per transaction.  The support of an itemset is the
popcount of the AND of its rows, which gives exactly the number of
transactions a sequential containment scan would find.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, NamedTuple, Sequence, TextIO

import numpy as np

from .exceptions import DataError, ItemLevelMismatch, LevelOutOfRange, NotALeaf, UnknownItem
from .taxonomy import TaxonomyTree

# upper bound on the uint64 words materialised per counting batch
_BATCH_WORDS = 1 << 22


class Itemset(NamedTuple):
    """``k`` node ids (ascending) that all live at taxonomy level ``h``."""

    h: int
    items: tuple

    @property
    def k(self) -> int:
        return len(self.items)


class Dataset:
    """Immutable list of transactions over the leaves of a balanced taxonomy.

    Each transaction is stored as an ascending tuple of distinct leaf ids.
    Empty transactions are dropped, so ``n_transactions`` counts only
    non-empty ones.
    """

    def __init__(self, tree: TaxonomyTree, transactions: Iterable[Iterable[int]]):
        if not tree.is_balanced:
            raise DataError("taxonomy must be rebalanced before loading transactions")
        H = tree.height
        txs = []
        for t in transactions:
            items = tuple(sorted({int(v) for v in t}))
            if not items:
                continue
            for v in items:
                if not (0 <= v < tree.node_count) or tree.level(v) != H or not tree.is_leaf(v):
                    raise NotALeaf(tree.labels[v] if 0 <= v < tree.node_count else v, len(txs) + 1)
            txs.append(items)
        self._tree = tree
        self._transactions = tuple(txs)
        self._views = {}

    @classmethod
    def from_labels(cls, tree: TaxonomyTree, transactions: Iterable[Iterable[str]]) -> "Dataset":
        """Build from label lists; the line number in errors is the 1-based list position."""
        resolved = []
        for lineno, labels in enumerate(transactions, 1):
            resolved.append([resolve_leaf(tree, lab, lineno) for lab in labels])
        return cls(tree, resolved)

    @property
    def tree(self) -> TaxonomyTree:
        return self._tree

    @property
    def transactions(self) -> tuple:
        return self._transactions

    @property
    def n_transactions(self) -> int:
        return len(self._transactions)

    def __len__(self):
        return len(self._transactions)

    def leaf_supports(self) -> np.ndarray:
        return self.view(self._tree.height).supports

    def view(self, h: int) -> "LevelView":
        v = self._views.get(h)
        if v is None:
            v = self._views[h] = level_view(self, self._tree, h)
        return v

    def __add__(self, other: "Dataset") -> "Dataset":
        if other.tree is not self._tree:
            raise DataError("cannot concatenate datasets bound to different taxonomies")
        return Dataset(self._tree, self._transactions + other.transactions)


def resolve_leaf(tree: TaxonomyTree, label: str, lineno: int) -> int:
    try:
        v = tree.node(label)
    except KeyError:
        raise UnknownItem(label, lineno) from None
    t = tree.terminal(v)
    if not tree.is_leaf(t) or tree.level(t) != tree.height:
        raise NotALeaf(label, lineno)
    return t


def load_transactions(stream: TextIO | Iterable[str], tree: TaxonomyTree) -> Dataset:
    """Parse one transaction per line of whitespace-separated leaf labels.

    Blank lines and lines starting with ``#`` are skipped; repeated labels
    within a line count once.
    """
    resolved = []
    for lineno, line in enumerate(stream, 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        resolved.append([resolve_leaf(tree, tok, lineno) for tok in stripped.split()])
    return Dataset(tree, resolved)


def read_transactions(path, tree: TaxonomyTree) -> Dataset:
    with open(path, encoding="utf-8") as fh:
        return load_transactions(fh, tree)


class LevelView:
    """Transactions with every item replaced by its level-``h`` ancestor.

    Attributes
    ----------
    h : int
    transactions : tuple of tuple
        Generalized transactions, ascending and deduplicated.
    supports : numpy.ndarray
        ``supports[v]`` is the number of transactions containing node ``v``
        (zero for nodes on other levels).
    """

    def __init__(self, tree: TaxonomyTree, h: int, transactions, supports):
        self.tree = tree
        self.h = h
        self.transactions = transactions
        self.supports = supports
        self.nodes = np.asarray(tree.level_nodes(h), dtype=np.int64)
        self._row = np.full(tree.node_count, -1, dtype=np.int64)
        self._row[self.nodes] = np.arange(len(self.nodes))
        self._bits = None

    @property
    def n_transactions(self) -> int:
        return len(self.transactions)

    def support(self, v: int) -> int:
        return int(self.supports[v])

    @property
    def bits(self) -> np.ndarray:
        """Packed bitmap, shape ``(len(nodes), ceil(N / 64))``, dtype uint64."""
        if self._bits is None:
            n = self.n_transactions
            n_words = (n + 63) // 64
            dense = np.zeros((len(self.nodes), n_words * 64), dtype=bool)
            lengths = [len(t) for t in self.transactions]
            flat = np.fromiter((v for t in self.transactions for v in t), dtype=np.int64, count=sum(lengths))
            tids = np.repeat(np.arange(n, dtype=np.int64), lengths)
            dense[self._row[flat], tids] = True
            packed = np.packbits(dense, axis=1, bitorder="little")
            self._bits = np.ascontiguousarray(packed).view(np.uint64).reshape(len(self.nodes), n_words)
        return self._bits

    def rows(self, item_tuples: Sequence[tuple]) -> np.ndarray:
        """Translate node-id tuples into bitmap row indices, shape ``(n, k)``."""
        idx = self._row[np.asarray(item_tuples, dtype=np.int64)]
        if (idx < 0).any():
            raise ItemLevelMismatch(f"itemset contains nodes outside level {self.h}")
        return idx


def level_view(ds: Dataset, tree: TaxonomyTree, h: int) -> LevelView:
    H = tree.height
    if h < 1 or h > H:
        raise LevelOutOfRange(h, 1, H)
    anc = tree.ancestor_array(h)
    supports = np.zeros(tree.node_count, dtype=np.int64)
    if h == H:
        txs = ds.transactions
    else:
        txs = tuple(tuple(sorted({int(anc[v]) for v in t})) for t in ds.transactions)
    for t in txs:
        supports[list(t)] += 1
    return LevelView(tree, h, txs, supports)


def support_counts(view: LevelView, item_tuples: Sequence[tuple], n_threads: int = 1) -> np.ndarray:
    """Support of each itemset (same length ``k`` for all) as an int64 vector."""
    if len(item_tuples) == 0:
        return np.zeros(0, dtype=np.int64)
    rows = view.rows(item_tuples)
    bits = view.bits
    n_words = bits.shape[1]
    if n_words == 0:
        return np.zeros(len(rows), dtype=np.int64)
    n_threads = max(1, min(int(n_threads), n_words))
    bounds = np.linspace(0, n_words, n_threads + 1).astype(int)
    spans = list(zip(bounds[:-1], bounds[1:]))
    if n_threads == 1:
        return _count_span(bits, rows, *spans[0])
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        parts = list(pool.map(lambda s: _count_span(bits, rows, *s), spans))
    return np.sum(parts, axis=0, dtype=np.int64)


def _count_span(bits, rows, lo, hi):
    width = hi - lo
    out = np.empty(len(rows), dtype=np.int64)
    step = max(1, _BATCH_WORDS // max(width, 1))
    block = bits[:, lo:hi]
    for start in range(0, len(rows), step):
        r = rows[start:start + step]
        acc = block[r[:, 0]]
        for j in range(1, r.shape[1]):
            acc &= block[r[:, j]]
        out[start:start + step] = np.bitwise_count(acc).sum(axis=1, dtype=np.int64)
    return out


def count_supports(view: LevelView, candidates: Sequence[Itemset], n_threads: int = 1) -> dict:
    """Map each candidate itemset to its support in ``view``.

    Raises
    ------
    ItemLevelMismatch
        If a candidate is declared at, or contains nodes from, another level.
    """
    table = {}
    by_k = {}
    for c in candidates:
        if c.h != view.h:
            raise ItemLevelMismatch(f"candidate at level {c.h} counted against level {view.h}")
        by_k.setdefault(len(c.items), []).append(c)
    for group in by_k.values():
        counts = support_counts(view, [c.items for c in group], n_threads)
        table.update(zip(group, counts.tolist()))
    return table
