"""Reference miners.

``mine_basic`` is the support-only, level-wise Apriori baseline: it finds
every frequent itemset at every level and filters flipping chains
afterwards.  ``oracle_enumerate`` does no candidate generation at all and
evaluates every admissible itemset directly, for verification on small
inputs.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import combinations

from .dataset import Dataset, Itemset
from .exceptions import BudgetExceeded, CandidateBudgetExceeded
from .measures import CorrLabel, MeasureKind, Thresholds, classify, corr
from .miner import (
    DEFAULT_CANDIDATE_BUDGET,
    ChainLink,
    FlippingPattern,
    MineStats,
    _evaluate,
    _join,
    _peak_rss_kb,
    check_inputs,
)
from .taxonomy import TaxonomyTree

DEFAULT_ORACLE_BUDGET = 2_000_000


def mine_basic(
    ds: Dataset,
    tree: TaxonomyTree,
    th: Thresholds,
    kind: MeasureKind | str = MeasureKind.KULC,
    candidate_budget: int | None = DEFAULT_CANDIDATE_BUDGET,
    n_threads: int = 1,
):
    """All frequent itemsets per level, then a post-filter for flipping chains.

    Raises
    ------
    CandidateBudgetExceeded
        When more than ``candidate_budget`` candidates have been generated.
    """
    kind = check_inputs(ds, tree, th, kind)
    t0 = time.perf_counter()
    stats = MineStats(engine="basic")
    H = tree.height
    K = len(tree.level_nodes(1))
    top = tree.ancestor_array(1)
    labelled = {}  # (h, items) -> (value, label)
    if ds.n_transactions:
        stats.scans = 1
        for h in range(1, H + 1):
            view = ds.view(h)
            min_sup = th.min_count(h, ds.n_transactions)
            base = [(int(v),) for v in view.nodes if view.supports[v] >= min_sup]
            for k in range(2, K + 1):
                cands = _join(base, top)
                st = stats.cell(h, k)
                st.generated = st.evaluated = len(cands)
                if candidate_budget is not None and stats.generated > candidate_budget:
                    raise CandidateBudgetExceeded(candidate_budget)
                if not cands:
                    break
                stats.scans += 1
                cell = _evaluate(view, cands, th, kind, n_threads)
                base = cell.extension_base()
                st.survivors = len(base)
                st.pruned_support = st.evaluated - st.survivors
                for t, v, lab, f in zip(cell.itemsets, cell.values.tolist(), cell.labels.tolist(), cell.frequent):
                    if f and lab:
                        labelled[(h, t)] = (v, CorrLabel(lab))
                if not base:
                    break
    patterns = chains_from_labels(labelled, tree)
    stats.n_patterns = len(patterns)
    stats.k_limit = K
    stats.wall_time = time.perf_counter() - t0
    stats.peak_rss_kb = _peak_rss_kb()
    return patterns, stats


def chains_from_labels(labelled: dict, tree: TaxonomyTree) -> list:
    """Flipping patterns from a map ``(h, items) -> (value, label)`` of labelled itemsets."""
    H = tree.height
    anc = [None] + [tree.ancestor_array(h) for h in range(1, H + 1)]
    patterns = []
    for h, items in labelled:
        if h != H:
            continue
        chain = []
        prev = None
        for g in range(1, H + 1):
            gi = items if g == H else tuple(sorted(int(anc[g][v]) for v in items))
            hit = labelled.get((g, gi))
            if hit is None or hit[1] == prev:
                break
            chain.append(ChainLink(Itemset(g, gi), hit[0], hit[1]))
            prev = hit[1]
        else:
            patterns.append(FlippingPattern(tuple(chain)))
    patterns.sort(key=lambda p: p.sort_key(tree))
    return patterns


@dataclass
class OracleResult:
    """Every admissible itemset with its support, correlation and label."""

    evaluations: dict = field(default_factory=dict)  # Itemset -> (support, value, label)
    patterns: list = field(default_factory=list)


def oracle_enumerate(
    ds: Dataset,
    tree: TaxonomyTree,
    th: Thresholds,
    kind: MeasureKind | str = MeasureKind.KULC,
    k_max: int | None = None,
    budget: int = DEFAULT_ORACLE_BUDGET,
) -> OracleResult:
    """Evaluate every ``(h, k)``-itemset by brute force and read off the flipping chains.

    Raises
    ------
    BudgetExceeded
        If the number of itemsets to enumerate exceeds ``budget``.
    """
    kind = check_inputs(ds, tree, th, kind)
    H = tree.height
    K = len(tree.level_nodes(1))
    k_max = K if k_max is None else min(k_max, K)
    result = OracleResult()
    N = ds.n_transactions
    if N == 0:
        return result

    total = sum(math.comb(len(tree.level_nodes(h)), k) for h in range(1, H + 1) for k in range(2, k_max + 1))
    if total > budget:
        raise BudgetExceeded(budget, "oracle itemset")

    top = tree.ancestor_array(1)
    for h in range(1, H + 1):
        anc = tree.ancestor_array(h)
        tids = {}
        for tid, t in enumerate(ds.transactions):
            for v in {int(anc[x]) for x in t}:
                tids.setdefault(v, set()).add(tid)
        theta = th.theta(h)
        for k in range(2, k_max + 1):
            for items in combinations(tree.level_nodes(h), k):
                if len({int(top[v]) for v in items}) < k:
                    continue
                sets = [tids.get(v, set()) for v in items]
                sups = [len(s) for s in sets]
                if min(sups) == 0:
                    sup, value = 0, 0.0
                else:
                    sup = len(set.intersection(*sets))
                    value = corr(kind, sup, sups)
                result.evaluations[Itemset(h, items)] = (sup, value, classify(value, sup, N, theta, th))

    # a bottom-level itemset is a pattern iff its generalizations at every
    # level carry non-neutral labels that alternate
    for key, (_, _, label) in result.evaluations.items():
        if key.h != H or label == CorrLabel.NEITHER:
            continue
        links = []
        for g in range(1, H + 1):
            gkey = Itemset(g, tuple(sorted(tree.ancestor_at_level(v, g) for v in key.items)))
            _, value, lab = result.evaluations[gkey]
            links.append(ChainLink(gkey, value, lab))
        labels = [link.label for link in links]
        if CorrLabel.NEITHER in labels:
            continue
        if all(a != b for a, b in zip(labels, labels[1:])):
            result.patterns.append(FlippingPattern(tuple(links)))
    result.patterns.sort(key=lambda p: p.sort_key(tree))
    return result
