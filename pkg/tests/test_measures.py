import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flipmine import CorrLabel, MeasureKind, Thresholds, classify, corr, lift_demo
from flipmine.exceptions import SupExceedsItemSup, UsageError, ZeroItemSupport, ZeroN
from flipmine.measures import NULL_INVARIANT, classify_batch, corr_batch, min_count

ORDER = [MeasureKind.ALL_CONFIDENCE, MeasureKind.COHERENCE, MeasureKind.COSINE, MeasureKind.KULC,
         MeasureKind.MAX_CONFIDENCE]


def test_kulc_table_values():
    assert corr("kulc", 400, [1000, 1000]) == pytest.approx(0.40, abs=1e-12)
    assert corr("kulc", 4, [200, 200]) == pytest.approx(0.02, abs=1e-12)


@pytest.mark.parametrize("kind, expected", [
    ("allconf", 0.2), ("coherence", 0.32), ("cosine", 0.4), ("kulc", 0.5), ("maxconf", 0.8),
])
def test_mixed_supports(kind, expected):
    assert corr(kind, 80, [100, 400]) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("kind", NULL_INVARIANT)
def test_extremes(kind):
    assert corr(kind, 7, [7, 7, 7]) == 1.0
    assert corr(kind, 0, [5, 9]) == 0.0


def test_input_errors():
    with pytest.raises(ZeroItemSupport):
        corr("kulc", 0, [0, 4])
    with pytest.raises(SupExceedsItemSup):
        corr("kulc", 5, [4, 9])
    with pytest.raises(UsageError):
        corr("kulc", 1, [4])
    with pytest.raises(UsageError):
        corr("lift", 1, [4, 4])
    with pytest.raises(UsageError):
        MeasureKind.parse("jaccard")


def test_lift_is_flagged():
    assert not MeasureKind.LIFT.null_invariant
    assert MeasureKind.LIFT not in NULL_INVARIANT
    assert len(NULL_INVARIANT) == 5


def test_classify_examples():
    th = Thresholds(0.6, 0.35, (0.1,))
    assert classify(1.0, 5, 10, 0.1, th) is CorrLabel.POSITIVE
    assert classify(0.0, 5, 10, 0.1, Thresholds(0.6, 0.1, (0.1,))) is CorrLabel.NEGATIVE
    assert classify(0.5, 5, 10, 0.1, th) is CorrLabel.NEITHER
    assert classify(1.0, 0, 10, 0.1, th) is CorrLabel.NEITHER


def test_frequency_boundary():
    th = Thresholds(0.6, 0.35, (0.1,))
    # 0.1 * 30 is 3.0000000000000004 in floating point
    assert min_count(0.1, 30) == 3
    assert classify(0.9, 3, 30, 0.1, th) is CorrLabel.POSITIVE
    assert classify(0.9, 2, 30, 0.1, th) is CorrLabel.NEITHER
    assert classify(0.6, 3, 30, 0.1, th) is CorrLabel.POSITIVE
    assert classify(0.35, 3, 30, 0.1, th) is CorrLabel.NEGATIVE


@pytest.mark.parametrize("args", [
    (0.0, 0.0, (0.1,)), (1.1, 0.0, (0.1,)), (0.5, 0.5, (0.1,)), (0.5, -0.1, (0.1,)),
    (0.5, 0.1, ()), (0.5, 0.1, (0.0,)), (0.5, 0.1, (0.1, 0.2)),
])
def test_threshold_validation(args):
    with pytest.raises(UsageError):
        Thresholds(*args)


def test_lift_demo_rows():
    assert lift_demo(1000, 1000, 400, 20000) == (50.0, "positive")
    assert lift_demo(1000, 1000, 400, 2000) == (500.0, "negative")
    assert lift_demo(200, 200, 4, 20000) == (2.0, "positive")
    assert lift_demo(200, 200, 4, 2000) == (20.0, "negative")
    assert lift_demo(10, 10, 1, 100) == (1.0, "independent")
    with pytest.raises(ZeroN):
        lift_demo(1, 1, 1, 0)


@st.composite
def support_vectors(draw, max_k=6):
    k = draw(st.integers(2, max_k))
    sups = draw(st.lists(st.integers(1, 10_000), min_size=k, max_size=k))
    sup_a = draw(st.integers(0, min(sups)))
    return sup_a, sups


@settings(max_examples=300, deadline=None)
@given(support_vectors())
def test_measure_ordering(vec):
    sup_a, sups = vec
    values = [corr(m, sup_a, sups) for m in ORDER]
    for lo, hi in zip(values, values[1:]):
        assert lo <= hi + 1e-12
    assert all(0.0 <= v <= 1.0 + 1e-12 for v in values)


@settings(max_examples=200, deadline=None)
@given(support_vectors(), st.randoms())
def test_symmetry(vec, rnd):
    sup_a, sups = vec
    shuffled = list(sups)
    rnd.shuffle(shuffled)
    for m in NULL_INVARIANT:
        assert corr(m, sup_a, sups) == pytest.approx(corr(m, sup_a, shuffled), abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.lists(support_vectors(max_k=3), min_size=1, max_size=20).filter(
    lambda vs: len({len(s) for _, s in vs}) == 1))
def test_batch_bit_identical(vectors):
    sup_a = np.array([a for a, _ in vectors])
    sups = np.array([s for _, s in vectors])
    for m in NULL_INVARIANT:
        batch = corr_batch(m, sup_a, sups)
        assert batch.tolist() == [corr(m, a, s) for a, s in vectors]


def test_classify_batch_matches_scalar():
    th = Thresholds(0.5, 0.2, (0.1,))
    values = np.array([0.0, 0.2, 0.3, 0.5, 0.9, 0.9])
    sups = np.array([5, 5, 5, 5, 5, 1])
    got = classify_batch(values, sups, min_count(0.1, 20), th)
    want = [classify(v, s, 20, 0.1, th) for v, s in zip(values, sups)]
    assert got.tolist() == [int(x) for x in want]


def _db(rng, n_items, n_tx):
    return [set(np.flatnonzero(rng.random(n_items) < rng.uniform(0.1, 0.6)).tolist()) for _ in range(n_tx)]


def _sup(db, items):
    return sum(set(items) <= t for t in db)


@pytest.mark.parametrize("seed", range(20))
def test_least_supported_item_bound(seed):
    # a k-itemset cannot beat the best (k-1)-subset that keeps its least supported item
    rng = np.random.default_rng(seed)
    db = _db(rng, 7, int(rng.integers(5, 60)))
    singles = [_sup(db, [i]) for i in range(7)]
    for k in (3, 4):
        for items in itertools.combinations(range(7), k):
            if min(singles[i] for i in items) == 0:
                continue
            a = min(items, key=lambda i: (singles[i], i))
            for m in NULL_INVARIANT:
                value = corr(m, _sup(db, items), [singles[i] for i in items])
                best = max(corr(m, _sup(db, b), [singles[i] for i in b])
                           for b in itertools.combinations(items, k - 1) if a in b)
                assert value <= best + 1e-12
