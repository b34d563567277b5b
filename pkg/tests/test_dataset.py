import io
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ids
from flipmine import Dataset, Itemset, build_taxonomy, count_supports, level_view, load_transactions, rebalance
from flipmine.dataset import support_counts
from flipmine.exceptions import DataError, ItemLevelMismatch, LevelOutOfRange, NotALeaf, UnknownItem


def test_load_dedups(two_level):
    ds = load_transactions(io.StringIO("a1 b1\na1 a1 a2\n"), two_level)
    assert ds.n_transactions == 2
    assert ds.transactions == (ids(two_level, "a1", "b1"), ids(two_level, "a1", "a2"))


def test_unknown_item(two_level):
    with pytest.raises(UnknownItem) as err:
        load_transactions(["a1 zzz"], two_level)
    assert err.value.label == "zzz" and err.value.line == 1


def test_internal_node_rejected(two_level):
    with pytest.raises(NotALeaf) as err:
        load_transactions(["a1", "", "b"], two_level)
    assert err.value.label == "b" and err.value.line == 3


def test_empty_stream_and_comments(two_level):
    assert load_transactions([], two_level).n_transactions == 0
    assert load_transactions(["# header", "   ", "a1"], two_level).n_transactions == 1


def test_shallow_leaf_resolves_to_copy():
    tree = rebalance(build_taxonomy([("x", "ROOT"), ("a", "ROOT"), ("a1", "a")]))
    ds = load_transactions(["x a1"], tree)
    (t,) = ds.transactions
    assert all(tree.level(v) == 2 for v in t)
    assert {tree.labels[v] for v in t} == {"x", "a1"}


def test_unbalanced_tree_rejected():
    tree = build_taxonomy([("x", "ROOT"), ("a", "ROOT"), ("a1", "a")])
    with pytest.raises(DataError):
        Dataset(tree, [])


def test_level_view(two_level):
    ds = load_transactions(["a1 b1", "a1 a2"], two_level)
    v1 = level_view(ds, two_level, 1)
    a, b = two_level.node("a"), two_level.node("b")
    assert v1.transactions == ((a, b), (a,))
    assert v1.support(a) == 2 and v1.support(b) == 1
    v2 = level_view(ds, two_level, 2)
    assert v2.transactions == ds.transactions
    with pytest.raises(LevelOutOfRange):
        level_view(ds, two_level, 3)


def test_toy_level_one_supports(toy):
    tree, ds, _ = toy
    view = ds.view(1)
    for v in tree.level_nodes(1):
        scan = sum(any(tree.ancestor_at_level(x, 1) == v for x in t) for t in ds.transactions)
        assert view.support(v) == scan


def test_count_supports_basic(two_level):
    ds = load_transactions(["a1 b1", "a1 a2"], two_level)
    view = ds.view(1)
    assert count_supports(view, []) == {}
    c = Itemset(1, ids(two_level, "a", "b"))
    assert count_supports(view, [c]) == {c: 1}


def test_count_supports_level_checks(two_level):
    ds = load_transactions(["a1 b1"], two_level)
    with pytest.raises(ItemLevelMismatch):
        count_supports(ds.view(1), [Itemset(2, ids(two_level, "a1", "b1"))])
    with pytest.raises(ItemLevelMismatch):
        count_supports(ds.view(1), [Itemset(1, ids(two_level, "a1", "b1"))])


def _flat_tree(n):
    return build_taxonomy([(f"i{j}", "ROOT") for j in range(n)])


def test_counts_match_exhaustive_scan():
    rng = random.Random(7)
    tree = _flat_tree(8)
    txs = [rng.sample(range(8), rng.randint(1, 5)) for _ in range(100)]
    ds = Dataset(tree, txs)
    cands = {Itemset(1, tuple(sorted(rng.sample(range(8), rng.randint(2, 3))))) for _ in range(20)}
    table = count_supports(ds.view(1), list(cands))
    for c, sup in table.items():
        assert sup == sum(set(c.items) <= set(t) for t in ds.transactions)


@pytest.mark.parametrize("n_tx", [0, 1, 63, 64, 65, 1000])
def test_threaded_counts_equal_sequential(n_tx):
    rng = np.random.default_rng(n_tx)
    tree = _flat_tree(12)
    ds = Dataset(tree, [rng.choice(12, size=int(rng.integers(1, 6)), replace=False) for _ in range(n_tx)])
    tuples = [tuple(sorted(rng.choice(12, size=3, replace=False).tolist())) for _ in range(50)]
    one = support_counts(ds.view(1), tuples, 1)
    for n in (2, 4, 7):
        assert np.array_equal(one, support_counts(ds.view(1), tuples, n))


def test_concatenation(two_level):
    a = load_transactions(["a1 b1"], two_level)
    b = load_transactions(["a2"], two_level)
    assert (a + b).n_transactions == 2
    with pytest.raises(DataError):
        a + load_transactions(["a1"], build_taxonomy([("a", "ROOT"), ("a1", "a")]))


def _three_level():
    edges = [("a", "ROOT"), ("b", "ROOT"), ("c", "ROOT")]
    for r in "abc":
        for i in range(2):
            edges.append((f"{r}{i}", r))
            for j in range(2):
                edges.append((f"{r}{i}{j}", f"{r}{i}"))
    return build_taxonomy(edges)


TREE3 = _three_level()
LEAVES3 = TREE3.leaves()


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.sampled_from(LEAVES3), min_size=1, max_size=5), max_size=40),
       st.lists(st.sampled_from(LEAVES3), min_size=2, max_size=3, unique=True))
def test_support_monotone_under_generalization(txs, items):
    ds = Dataset(TREE3, txs)
    sups = []
    for h in (3, 2, 1):
        g = tuple(sorted({TREE3.ancestor_at_level(v, h) for v in items}))
        sups.append(int(support_counts(ds.view(h), [g])[0]))
        view = ds.view(h)
        for t, orig in zip(view.transactions, ds.transactions):
            assert len(t) <= len(orig)
        for v in g:
            assert sups[-1] <= view.support(v)
    assert sups[0] <= sups[1] <= sups[2]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.sampled_from(LEAVES3), min_size=1, max_size=4), min_size=1, max_size=30),
       st.integers(1, 50))
def test_null_transactions_leave_supports_alone(txs, n_null):
    ds = Dataset(TREE3, txs)
    a_leaves = [v for v in LEAVES3 if TREE3.ancestor_at_level(v, 1) == TREE3.node("a")]
    b_leaves = [v for v in LEAVES3 if TREE3.ancestor_at_level(v, 1) == TREE3.node("b")]
    c_leaves = [v for v in LEAVES3 if TREE3.ancestor_at_level(v, 1) == TREE3.node("c")]
    grown = ds + Dataset(TREE3, [[c_leaves[i % len(c_leaves)]] for i in range(n_null)])
    pair = [(a, b) for a in a_leaves for b in b_leaves]
    before = support_counts(ds.view(3), pair)
    after = support_counts(grown.view(3), pair)
    assert np.array_equal(before, after)
    for v in a_leaves + b_leaves:
        assert ds.view(3).support(v) == grown.view(3).support(v)
