"""scikit-learn style façade over the miners.

Mining has no predict step, so only ``fit`` is provided; the learned
attributes carry the usual trailing underscore.
"""
from __future__ import annotations

from sklearn.base import BaseEstimator

from .baseline import mine_basic, oracle_enumerate
from .dataset import Dataset, load_transactions
from .exceptions import UsageError
from .measures import Thresholds
from .miner import DEFAULT_CANDIDATE_BUDGET, MineStats, PruneConfig, mine_flipping
from .taxonomy import TaxonomyTree, build_taxonomy, rebalance


class FlippingCorrelationMiner(BaseEstimator):
    """Find itemsets whose correlation sign alternates down a taxonomy.

    Parameters
    ----------
    minsup : sequence of float
        Minimum support per taxonomy level, top level first.
    gamma, epsilon : float
        Correlation at or above ``gamma`` is positive, at or below ``epsilon`` negative.
    measure : str
        One of ``allconf``, ``coherence``, ``cosine``, ``kulc``, ``maxconf``.
    engine : str
        ``flipper`` (pruned search), ``basic`` or ``oracle``.
    tpg, sibp, flipping : bool
        Toggle the individual prunings of the ``flipper`` engine.
    n_threads : int
    candidate_budget : int or None

    Attributes
    ----------
    tree_ : TaxonomyTree
    dataset_ : Dataset
    patterns_ : list of FlippingPattern
    stats_ : MineStats

    Examples
    --------
    >>> edges = [("a", "ROOT"), ("b", "ROOT"), ("a1", "a"), ("b1", "b")]
    >>> m = FlippingCorrelationMiner(minsup=(0.5, 0.5)).fit([["a1", "b1"]], taxonomy=edges)
    >>> m.patterns_
    []
    """

    def __init__(
        self,
        minsup=(0.01, 0.001, 0.0005, 0.0001),
        gamma=0.3,
        epsilon=0.1,
        measure="kulc",
        engine="flipper",
        tpg=True,
        sibp=True,
        flipping=True,
        n_threads=1,
        candidate_budget=DEFAULT_CANDIDATE_BUDGET,
    ):
        self.minsup = minsup
        self.gamma = gamma
        self.epsilon = epsilon
        self.measure = measure
        self.engine = engine
        self.tpg = tpg
        self.sibp = sibp
        self.flipping = flipping
        self.n_threads = n_threads
        self.candidate_budget = candidate_budget

    def fit(self, X, y=None, taxonomy=None):
        """Mine ``X``.

        ``X`` is a :class:`Dataset`, or an iterable of transactions given
        as label lists or whitespace-separated strings.  In the latter case
        ``taxonomy`` (a tree or ``(child, parent)`` edges) is required.
        """
        if isinstance(X, Dataset):
            ds = X
            tree = X.tree
        else:
            if taxonomy is None:
                raise UsageError("a taxonomy is required unless X is a Dataset")
            tree = taxonomy if isinstance(taxonomy, TaxonomyTree) else build_taxonomy(taxonomy)
            tree = rebalance(tree)
            ds = load_transactions((t if isinstance(t, str) else " ".join(t) for t in X), tree)
        th = Thresholds(self.gamma, self.epsilon, tuple(self.minsup))
        if self.engine == "flipper":
            cfg = PruneConfig(enable_flipping=self.flipping, enable_tpg=self.tpg, enable_sibp=self.sibp)
            patterns, stats = mine_flipping(ds, tree, th, self.measure, cfg, self.n_threads, self.candidate_budget)
        elif self.engine == "basic":
            patterns, stats = mine_basic(ds, tree, th, self.measure, self.candidate_budget, self.n_threads)
        elif self.engine == "oracle":
            patterns = oracle_enumerate(ds, tree, th, self.measure).patterns
            stats = MineStats(engine="oracle", n_patterns=len(patterns))
        else:
            raise UsageError(f"unknown engine {self.engine!r}")
        self.tree_ = tree
        self.dataset_ = ds
        self.patterns_ = patterns
        self.stats_ = stats
        return self
