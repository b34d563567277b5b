import pytest

from flipmine import MeasureKind, Thresholds, load_transactions, mine_basic, mine_flipping, oracle_enumerate
from flipmine.baseline import chains_from_labels
from flipmine.datagen import GenParams, generate, threshold_profile
from flipmine.exceptions import BudgetExceeded, CandidateBudgetExceeded
from flipmine.measures import CorrLabel
from flipmine.taxonomy import build_taxonomy, rebalance
from randdata import random_case


def _leaf_sets(tree, patterns):
    return [sorted(tree.labels[v] for v in p.leaf_itemset.items) for p in patterns]


def test_toy_single_pattern(toy):
    tree, ds, th = toy
    patterns, stats = mine_basic(ds, tree, th)
    assert _leaf_sets(tree, patterns) == [["a11", "b11"]]
    assert stats.engine == "basic"
    assert _leaf_sets(tree, oracle_enumerate(ds, tree, th).patterns) == [["a11", "b11"]]


def test_high_support_prunes_everything():
    tree, ds, _ = random_case(3)
    patterns, stats = mine_basic(ds, tree, Thresholds(0.5, 0.1, (0.5, 0.5, 0.5)))
    assert patterns == []
    assert stats.generated < 200


def test_empty_dataset_oracle(toy):
    tree, _, th = toy
    result = oracle_enumerate(load_transactions([], tree), tree, th)
    assert result.evaluations == {} and result.patterns == []


def test_oracle_covers_every_admissible_itemset(toy):
    tree, ds, th = toy
    result = oracle_enumerate(ds, tree, th)
    # two categories: every cross pair at every level, nothing larger
    assert len(result.evaluations) == 1 + 4 + 16
    assert all(len({tree.ancestor_at_level(v, 1) for v in key.items}) == key.k for key in result.evaluations)


def test_oracle_order_independent(toy):
    tree, ds, th = toy
    lines = [" ".join(tree.labels[v] for v in t) for t in ds.transactions]
    flipped = load_transactions(lines[::-1], tree)
    assert oracle_enumerate(ds, tree, th).evaluations == oracle_enumerate(flipped, tree, th).evaluations


def test_budgets():
    tree, ds, th = random_case(5)
    with pytest.raises(BudgetExceeded):
        oracle_enumerate(ds, tree, th, budget=10)
    with pytest.raises(CandidateBudgetExceeded):
        mine_basic(ds, tree, Thresholds(0.5, 0.1, (0.01, 0.01, 0.01)), candidate_budget=1)


def test_chain_reader_requires_alternation(toy):
    tree, _, _ = toy
    a, b = tree.node("a"), tree.node("b")
    a1, b1 = tree.node("a1"), tree.node("b1")
    a11, b11 = tree.node("a11"), tree.node("b11")
    labelled = {(1, (a, b)): (0.9, CorrLabel.POSITIVE), (2, (a1, b1)): (0.1, CorrLabel.NEGATIVE),
                (3, (a11, b11)): (0.8, CorrLabel.POSITIVE)}
    assert len(chains_from_labels(labelled, tree)) == 1
    labelled[(2, (a1, b1))] = (0.9, CorrLabel.POSITIVE)
    assert chains_from_labels(labelled, tree) == []
    del labelled[(2, (a1, b1))]
    assert chains_from_labels(labelled, tree) == []


@pytest.mark.parametrize("kind", list(MeasureKind)[:5])
def test_basic_equals_oracle(kind):
    for seed in range(15):
        tree, ds, th = random_case(seed)
        basic, _ = mine_basic(ds, tree, th, kind)
        assert basic == oracle_enumerate(ds, tree, th, kind).patterns


def test_basic_does_at_least_as_much_work_on_generated_data():
    edges, lines = generate(GenParams(n_transactions=3000, n_items=200, n_roots=5, fanout=4, seed=1))
    tree = rebalance(build_taxonomy(edges))
    ds = load_transactions(lines, tree)
    th = Thresholds(0.3, 0.1, threshold_profile("thr1"))
    basic, bstats = mine_basic(ds, tree, th)
    full, fstats = mine_flipping(ds, tree, th)
    assert basic == full
    assert bstats.evaluated >= fstats.evaluated
