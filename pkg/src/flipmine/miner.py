"""Flipping-pattern miner over the (level, size) search grid.

The search space is a table of cells ``Q[h, k]``: all ``k``-itemsets whose
items are level-``h`` taxonomy nodes with pairwise distinct top-level
ancestors.  Rows 1 and 2 are filled column by column in zigzag order, the
remaining rows one at a time, and four prunings keep the table small:

support
    Apriori growth from frequent ``(k-1)``-itemsets only.
flipping
    A level-``h`` itemset is extended only if its generalization to level
    ``h-1`` is itself extensible, since every link of a pattern chain must
    be frequent.  Correlation labels are applied when assembling chains.
TPG
    Once two vertically adjacent cells hold no positive itemset, no larger
    itemset can start or continue a flip, so the column limit drops.
SIBP
    Low-support items whose current itemsets are all non-positive on two
    consecutive levels are excluded from larger itemsets on the lower level.
"""
from __future__ import annotations

import resource
import time
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .dataset import Dataset, Itemset, LevelView, support_counts
from .exceptions import (
    CandidateBudgetExceeded,
    ColumnMismatch,
    DataError,
    LevelMismatch,
    UsageError,
)
from .measures import CorrLabel, MeasureKind, Thresholds, classify_batch, corr_batch
from .taxonomy import TaxonomyTree

DEFAULT_CANDIDATE_BUDGET = 10**8


@dataclass(frozen=True)
class PruneConfig:
    enable_flipping: bool = True
    enable_tpg: bool = True
    enable_sibp: bool = True
    # extend only flip survivors; faster but may miss patterns
    unsafe_flipping_extension: bool = False


class ChainLink(NamedTuple):
    itemset: Itemset
    value: float
    label: CorrLabel


@dataclass(frozen=True)
class FlippingPattern:
    """A leaf-level itemset with its correlation at every level, top level first."""

    chain: tuple

    @property
    def k(self) -> int:
        return len(self.chain[0].itemset.items)

    @property
    def leaf_itemset(self) -> Itemset:
        return self.chain[-1].itemset

    def leaf_labels(self, tree: TaxonomyTree) -> tuple:
        return tuple(tree.labels[v] for v in self.leaf_itemset.items)

    def sort_key(self, tree: TaxonomyTree) -> tuple:
        return tuple(sorted(self.leaf_labels(tree)))


@dataclass
class CellResult:
    """Evaluated contents of cell ``(h, k)``.

    ``itemsets[i]`` has support ``supports[i]``, correlation ``values[i]``
    and label ``labels[i]``.  ``frequent`` marks the survivors used for
    extension, ``flip`` the entries whose label alternates with their
    generalization one level up.
    """

    h: int
    k: int
    itemsets: list
    supports: np.ndarray
    values: np.ndarray
    labels: np.ndarray
    frequent: np.ndarray
    flip: np.ndarray

    @classmethod
    def empty(cls, h, k):
        z = np.zeros(0)
        return cls(h, k, [], z.astype(np.int64), z, z.astype(np.int8), z.astype(bool), z.astype(bool))

    def __len__(self):
        return len(self.itemsets)

    def entries(self) -> list:
        return [
            (Itemset(self.h, t), int(s), float(v), CorrLabel(int(lab)))
            for t, s, v, lab in zip(self.itemsets, self.supports, self.values, self.labels)
        ]

    def extension_base(self) -> list:
        return [t for t, f in zip(self.itemsets, self.frequent) if f]

    def flip_survivors(self) -> dict:
        """Map item tuple -> ``(value, label)`` for entries that survive flip filtering."""
        return {
            t: (float(v), CorrLabel(int(lab)))
            for t, v, lab, f in zip(self.itemsets, self.values, self.labels, self.flip)
            if f
        }

    def has_positive(self) -> bool:
        return bool((self.labels == CorrLabel.POSITIVE).any())


@dataclass
class CellStats:
    generated: int = 0
    pruned_sibp: int = 0
    pruned_flipping: int = 0
    evaluated: int = 0
    pruned_support: int = 0
    survivors: int = 0
    flip_survivors: int = 0


@dataclass
class MineStats:
    engine: str = "flipper"
    cells: dict = field(default_factory=dict)
    scans: int = 0
    tpg_cutoffs: list = field(default_factory=list)
    k_limit: int = 0
    n_patterns: int = 0
    wall_time: float = 0.0
    peak_rss_kb: int = 0

    def cell(self, h, k) -> CellStats:
        return self.cells.setdefault((h, k), CellStats())

    def total(self, name: str) -> int:
        return sum(getattr(c, name) for c in self.cells.values())

    @property
    def generated(self) -> int:
        return self.total("generated")

    @property
    def evaluated(self) -> int:
        return self.total("evaluated")

    def totals(self) -> dict:
        return {
            "generated": self.generated,
            "evaluated": self.evaluated,
            "pruned_support": self.total("pruned_support"),
            "pruned_flipping": self.total("pruned_flipping"),
            "pruned_sibp": self.total("pruned_sibp"),
            "pruned_tpg": len(self.tpg_cutoffs),
            "survivors": self.total("survivors"),
            "flip_survivors": self.total("flip_survivors"),
        }


# candidate generation

def _join(prev: Iterable[tuple], top: np.ndarray) -> list:
    """Apriori join of sorted ``(k-1)``-tuples plus subset and distinct-top checks."""
    prev = sorted(prev)
    if not prev:
        return []
    prev_set = set(prev)
    out = []
    km1 = len(prev[0])
    start = 0
    while start < len(prev):
        prefix = prev[start][:-1]
        end = start
        while end < len(prev) and prev[end][:-1] == prefix:
            end += 1
        tails = [t[-1] for t in prev[start:end]]
        tops = [top[x] for x in tails]
        for i in range(len(tails)):
            x, tx = tails[i], tops[i]
            for j in range(i + 1, len(tails)):
                if tops[j] == tx:
                    continue
                cand = prefix + (x, tails[j])
                # the two subsets dropping x or y are prev[i], prev[j]
                if all(cand[:m] + cand[m + 1:] in prev_set for m in range(km1 - 1)):
                    out.append(cand)
        start = end
    return out


def _generalize(tuples: Sequence[tuple], anc: np.ndarray) -> list:
    if not tuples:
        return []
    g = np.sort(anc[np.asarray(tuples, dtype=np.int64)], axis=1)
    return [tuple(r) for r in g.tolist()]


def _generate(tree, h, k, ext_base_prev, banned, parent_base):
    """Candidates for cell ``(h, k)`` plus the counts each filter removed."""
    top = tree.ancestor_array(1)
    joined = _join(ext_base_prev, top)
    n_generated = len(joined)
    if banned:
        kept = [c for c in joined if banned.isdisjoint(c)]
    else:
        kept = joined
    n_banned = n_generated - len(kept)
    n_chain = 0
    if parent_base is not None and kept:
        gen = _generalize(kept, tree.ancestor_array(h - 1))
        chained = [c for c, g in zip(kept, gen) if g in parent_base]
        n_chain = len(kept) - len(chained)
        kept = chained
    return kept, n_generated, n_banned, n_chain


def generate_candidates(
    h: int,
    k: int,
    ext_base_prev: Sequence,
    sibp_banned: Iterable[int],
    tree: TaxonomyTree,
    parent_base: Iterable | None = None,
) -> list:
    """Level-``h`` ``k``-itemset candidates grown from ``ext_base_prev``.

    Parameters
    ----------
    ext_base_prev : sequence of Itemset or tuple
        Extensible ``(k-1)``-itemsets at level ``h``.
    sibp_banned : iterable of int
        Node ids that may not appear in any candidate.
    tree : TaxonomyTree
    parent_base : iterable, optional
        Extensible ``k``-itemsets one level up.  When given, a candidate is
        kept only if its generalization is among them.
    """
    prev = sorted({tuple(x.items) if isinstance(x, Itemset) else tuple(x) for x in ext_base_prev})
    if any(len(t) != k - 1 for t in prev):
        raise DataError(f"extension base must hold {k - 1}-itemsets")
    if parent_base is not None:
        parent_base = {tuple(x.items) if isinstance(x, Itemset) else tuple(x) for x in parent_base}
    top = tree.ancestor_array(1)
    prev = [t for t in prev if len({int(top[v]) for v in t}) == len(t)]
    kept, *_ = _generate(tree, h, k, prev, frozenset(sibp_banned), parent_base)
    return [Itemset(h, c) for c in kept]


# evaluation

def evaluate_cell(
    view: LevelView,
    candidates: Sequence,
    th: Thresholds,
    kind: MeasureKind,
    parent_cell: CellResult | None = None,
    n_threads: int = 1,
) -> CellResult:
    """Count, correlate and label every candidate in one pass over ``view``."""
    tuples = [tuple(c.items) if isinstance(c, Itemset) else tuple(c) for c in candidates]
    if not tuples:
        return CellResult.empty(view.h, parent_cell.k if parent_cell is not None else 0)
    cell = _evaluate(view, tuples, th, kind, n_threads)
    return flip_filter(cell, parent_cell, view.tree)


def _evaluate(view, tuples, th, kind, n_threads=1):
    h = view.h
    k = len(tuples[0])
    sups = support_counts(view, tuples, n_threads)
    item_sups = view.supports[np.asarray(tuples, dtype=np.int64)]
    values = corr_batch(kind, sups, item_sups)
    min_sup = th.min_count(h, view.n_transactions)
    labels = classify_batch(values, sups, min_sup, th)
    return CellResult(h, k, tuples, sups, values, labels, sups >= min_sup, np.zeros(len(tuples), dtype=bool))


def flip_filter(cell: CellResult, parent_cell: CellResult | None, tree: TaxonomyTree) -> CellResult:
    """Mark entries that are labelled and flip relative to their generalization."""
    if cell.h == 1 or parent_cell is None:
        if cell.h != 1 and len(cell):
            raise LevelMismatch(f"cell at level {cell.h} needs the level-{cell.h - 1} cell")
        cell.flip = cell.labels != CorrLabel.NEITHER
        return cell
    if parent_cell.h != cell.h - 1 or (len(parent_cell) and len(cell) and parent_cell.k != cell.k):
        raise LevelMismatch(
            f"parent cell ({parent_cell.h}, {parent_cell.k}) does not sit above ({cell.h}, {cell.k})"
        )
    cell.flip = _flip_mask(cell, parent_cell.flip_survivors(), tree)
    return cell


def _flip_mask(cell, parent_survivors, tree):
    mask = np.zeros(len(cell), dtype=bool)
    if not len(cell) or not parent_survivors:
        return mask
    gen = _generalize(cell.itemsets, tree.ancestor_array(cell.h - 1))
    for i, (g, lab) in enumerate(zip(gen, cell.labels.tolist())):
        if lab == 0:
            continue
        hit = parent_survivors.get(g)
        mask[i] = hit is not None and int(hit[1]) == -lab
    return mask


def tpg_check(cell_upper: CellResult, cell_lower: CellResult) -> bool:
    """True when neither cell holds a positive itemset (empty cells qualify)."""
    if len(cell_upper) and len(cell_lower):
        if cell_upper.k != cell_lower.k:
            raise ColumnMismatch(f"cells in columns {cell_upper.k} and {cell_lower.k}")
        if cell_lower.h != cell_upper.h + 1:
            raise LevelMismatch(f"cells at levels {cell_upper.h} and {cell_lower.h} are not adjacent")
    return not (cell_upper.has_positive() or cell_lower.has_positive())


def sibp_update(view: LevelView, cell: CellResult, gamma: float) -> frozenset:
    """Longest run of lowest-support items whose itemsets in ``cell`` all stay below ``gamma``.

    Items are ordered by ascending support, ties by node id.  An item that
    occurs in no evaluated itemset counts as having maximum correlation 0.
    """
    nodes = view.nodes
    order = np.lexsort((nodes, view.supports[nodes]))
    best = np.zeros(view.tree.node_count)
    if len(cell):
        items = np.asarray(cell.itemsets, dtype=np.int64)
        np.maximum.at(best, items.ravel(), np.repeat(cell.values, items.shape[1]))
    out = []
    for v in nodes[order].tolist():
        if best[v] >= gamma:
            break
        out.append(v)
    return frozenset(out)


def sibp_ban(r_upper: Iterable[int], r_lower: Iterable[int], tree: TaxonomyTree) -> frozenset:
    """Items of ``r_lower`` whose parent belongs to ``r_upper``."""
    r_upper = frozenset(r_upper)
    r_lower = frozenset(r_lower)
    lower_levels = {tree.level(v) for v in r_lower}
    upper_levels = {tree.level(v) for v in r_upper}
    if len(lower_levels) > 1 or len(upper_levels) > 1 or (
        lower_levels and upper_levels and lower_levels.pop() != upper_levels.pop() + 1
    ):
        raise LevelMismatch("sets must hold nodes of two consecutive levels")
    if not r_upper:
        return frozenset()
    return frozenset(v for v in r_lower if tree.level(v) > 1 and tree.parent(v) in r_upper)


def assemble_patterns(rows, tree: TaxonomyTree, k_limit: int | None = None) -> list:
    """Rebuild full chains for the bottom-level flip survivors.

    ``rows[h]`` maps ``k`` to either a :class:`CellResult` or a
    flip-survivor dict as returned by :meth:`CellResult.flip_survivors`;
    ``rows`` is indexed from 1 (``rows[0]`` is ignored).
    """
    H = tree.height
    surv = [None] + [
        {k: (c.flip_survivors() if isinstance(c, CellResult) else c) for k, c in rows[h].items()}
        for h in range(1, H + 1)
    ]
    anc = [None] + [tree.ancestor_array(h) for h in range(1, H + 1)]
    patterns = []
    for k, bottom in sorted(surv[H].items()):
        if k_limit is not None and k > k_limit:
            continue
        for items in bottom:
            chain = []
            for h in range(1, H + 1):
                g = items if h == H else tuple(sorted(int(anc[h][v]) for v in items))
                hit = surv[h].get(k, {}).get(g)
                if hit is None:
                    break
                chain.append(ChainLink(Itemset(h, g), hit[0], hit[1]))
            else:
                patterns.append(FlippingPattern(tuple(chain)))
    patterns.sort(key=lambda p: p.sort_key(tree))
    return patterns


# orchestration

def check_inputs(ds: Dataset, tree: TaxonomyTree, th: Thresholds, kind) -> MeasureKind:
    kind = MeasureKind.parse(kind)
    if not kind.null_invariant:
        raise UsageError(f"{kind.value} is not null-invariant and cannot be mined")
    if ds.tree is not tree:
        raise DataError("dataset is bound to a different taxonomy")
    if not tree.is_balanced:
        raise DataError("taxonomy must be rebalanced")
    if len(th.minsup) != tree.height:
        raise UsageError(f"{len(th.minsup)} minimum supports given for a taxonomy of height {tree.height}")
    return kind


def _peak_rss_kb() -> int:
    return int(resource.getrusage(resource.RUSAGE_SELF).ru_maxrss)


class _Flipper:
    """State of one mining run; cells of at most two rows are kept in full."""

    def __init__(self, ds, tree, th, kind, cfg, n_threads, budget):
        self.ds, self.tree, self.th, self.kind, self.cfg = ds, tree, th, kind, cfg
        self.n_threads = n_threads
        self.budget = budget
        self.H = tree.height
        self.stats = MineStats(engine="flipper")
        self.views = {}
        self.base = {}  # h -> k -> list of extensible tuples
        self.cells = {}  # h -> k -> CellResult (two rows)
        self.surv = {h: {} for h in range(1, self.H + 1)}
        self.r_sets = {}  # h -> k -> R_h
        self.banned = {h: set() for h in range(1, self.H + 1)}
        self.k_limit = len(tree.level_nodes(1))

    def view(self, h):
        if h not in self.views:
            self.views[h] = self.ds.view(h)
        return self.views[h]

    def singles(self, h):
        view = self.view(h)
        min_sup = self.th.min_count(h, view.n_transactions)
        items = [int(v) for v in view.nodes if view.supports[v] >= min_sup]
        if self.cfg.enable_flipping and h > 1:
            up = {t[0] for t in self.base[h - 1][1]}
            items = [v for v in items if self.tree.parent(v) in up]
        self.base[h] = {1: [(v,) for v in items]}
        self.cells[h] = {}
        self.r_sets[h] = {}

    def cell(self, h, k):
        prev = self.base[h].get(k - 1) or []
        parent_base = None
        if self.cfg.enable_flipping and h > 1:
            parent_base = set(self.base[h - 1].get(k) or ())
        cands, n_gen, n_ban, n_chain = _generate(self.tree, h, k, prev, self.banned[h], parent_base)
        st = self.stats.cell(h, k)
        st.generated, st.pruned_sibp, st.pruned_flipping = n_gen, n_ban, n_chain
        st.evaluated = len(cands)
        if self.budget is not None and self.stats.generated > self.budget:
            raise CandidateBudgetExceeded(self.budget)

        parent = self.cells.get(h - 1, {}).get(k) if h > 1 else None
        if h > 1 and parent is None:
            parent = CellResult.empty(h - 1, k)
        if cands:
            self.stats.scans += 1
            cell = evaluate_cell(self.view(h), cands, self.th, self.kind, parent, self.n_threads)
        else:
            cell = CellResult.empty(h, k)
        cell.k = k
        st.survivors = int(cell.frequent.sum())
        st.pruned_support = st.evaluated - st.survivors
        st.flip_survivors = int(cell.flip.sum())

        self.cells[h][k] = cell
        self.surv[h][k] = cell.flip_survivors()
        if self.cfg.unsafe_flipping_extension:
            self.base[h][k] = list(self.surv[h][k])
        else:
            self.base[h][k] = cell.extension_base()

        if self.cfg.enable_sibp:
            r = self.r_sets[h][k] = sibp_update(self.view(h), cell, self.th.gamma)
            if h > 1 and k in self.r_sets[h - 1]:
                self.banned[h] |= sibp_ban(self.r_sets[h - 1][k], r, self.tree)
        return cell

    def stop_at(self, k, h=None):
        self.k_limit = min(self.k_limit, k - 1)
        if h is not None:
            self.stats.tpg_cutoffs.append((h, k))

    def run(self):
        H = self.H
        if self.ds.n_transactions == 0 or self.k_limit < 2:
            return []
        self.stats.scans = 1
        self.singles(1)
        if H >= 2:
            self.singles(2)

        k = 2
        while k <= self.k_limit:
            upper = self.cell(1, k)
            lower = self.cell(2, k) if H >= 2 else None
            if not self.base[1][k] or (lower is not None and not self.base[2][k]):
                self.stop_at(k)
                break
            if self.cfg.enable_tpg and lower is not None and tpg_check(upper, lower):
                self.stop_at(k, 2)
                break
            k += 1

        for h in range(3, H + 1):
            self.singles(h)
            self.cells.pop(h - 2, None)
            self.base.pop(h - 2, None)
            self.r_sets.pop(h - 2, None)
            k = 2
            while k <= self.k_limit:
                lower = self.cell(h, k)
                if not self.base[h][k]:
                    self.stop_at(k)
                    break
                upper = self.cells[h - 1].get(k) or CellResult.empty(h - 1, k)
                if self.cfg.enable_tpg and tpg_check(upper, lower):
                    self.stop_at(k, h)
                    break
                k += 1

        rows = [None] + [self.surv[h] for h in range(1, H + 1)]
        return assemble_patterns(rows, self.tree, self.k_limit)


def mine_flipping(
    ds: Dataset,
    tree: TaxonomyTree,
    th: Thresholds,
    kind: MeasureKind | str = MeasureKind.KULC,
    cfg: PruneConfig | None = None,
    n_threads: int = 1,
    candidate_budget: int | None = DEFAULT_CANDIDATE_BUDGET,
):
    """Mine all flipping patterns.

    Returns
    -------
    patterns : list of FlippingPattern
        Sorted by the labels of the leaf itemset.
    stats : MineStats
    """
    kind = check_inputs(ds, tree, th, kind)
    cfg = cfg or PruneConfig()
    t0 = time.perf_counter()
    run = _Flipper(ds, tree, th, kind, cfg, n_threads, candidate_budget)
    patterns = run.run()
    stats = run.stats
    stats.k_limit = run.k_limit
    stats.n_patterns = len(patterns)
    stats.wall_time = time.perf_counter() - t0
    stats.peak_rss_kb = _peak_rss_kb()
    return patterns, stats
