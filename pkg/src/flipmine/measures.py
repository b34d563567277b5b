"""Null-invariant correlation measures and correlation labels.

Every measure is a mean of the conditional probabilities
``P(A | a_i) = sup(A) / sup(a_i)``: minimum (all-confidence), harmonic
mean (coherence), geometric mean (cosine), arithmetic mean (Kulczynski)
and maximum (max-confidence).  None of them depends on the total number
of transactions.  Lift is kept only to illustrate why measures that do
depend on it are unreliable.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import SupExceedsItemSup, UsageError, ZeroItemSupport, ZeroN


class MeasureKind(enum.Enum):
    ALL_CONFIDENCE = "allconf"
    COHERENCE = "coherence"
    COSINE = "cosine"
    KULC = "kulc"
    MAX_CONFIDENCE = "maxconf"
    LIFT = "lift"

    @property
    def null_invariant(self) -> bool:
        return self is not MeasureKind.LIFT

    @classmethod
    def parse(cls, name) -> "MeasureKind":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            choices = "|".join(m.value for m in NULL_INVARIANT)
            raise UsageError(f"unknown measure {name!r}; expected one of {choices}") from None


NULL_INVARIANT = tuple(m for m in MeasureKind if m.null_invariant)


class CorrLabel(enum.IntEnum):
    NEITHER = 0
    POSITIVE = 1
    NEGATIVE = -1

    @property
    def code(self) -> str:
        return {1: "P", -1: "N", 0: "-"}[int(self)]


@dataclass(frozen=True)
class Thresholds:
    """Correlation thresholds and per-level minimum supports.

    ``minsup[h - 1]`` is the fractional support threshold at level ``h``;
    the list must be non-increasing from the top level downwards.
    """

    gamma: float
    epsilon: float
    minsup: tuple

    def __post_init__(self):
        object.__setattr__(self, "minsup", tuple(float(x) for x in self.minsup))
        if not 0.0 < self.gamma <= 1.0:
            raise UsageError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not 0.0 <= self.epsilon < 1.0:
            raise UsageError(f"epsilon must lie in [0, 1), got {self.epsilon}")
        if not self.epsilon < self.gamma:
            raise UsageError("epsilon must be smaller than gamma")
        if not self.minsup:
            raise UsageError("at least one minimum support is required")
        for theta in self.minsup:
            if not 0.0 < theta <= 1.0:
                raise UsageError(f"minimum supports must lie in (0, 1], got {theta}")
        if any(a < b for a, b in zip(self.minsup, self.minsup[1:])):
            raise UsageError(f"minimum supports must be non-increasing by level, got {self.minsup}")

    def theta(self, h: int) -> float:
        return self.minsup[h - 1]

    def min_count(self, h: int, n_transactions: int) -> int:
        return min_count(self.minsup[h - 1], n_transactions)


def min_count(theta: float, n_transactions: int) -> int:
    """Absolute support threshold ``ceil(theta * N)``."""
    # round first so that e.g. 0.1 * 30 is not ceiled up to 4
    return math.ceil(round(theta * n_transactions, 9))


def corr(kind: MeasureKind, sup_a: int, item_sups: Sequence[int]) -> float:
    """Correlation of an itemset with support ``sup_a`` whose items have ``item_sups``."""
    kind = MeasureKind.parse(kind)
    if not kind.null_invariant:
        raise UsageError("corr() only evaluates null-invariant measures")
    if len(item_sups) < 2:
        raise UsageError("correlation needs at least two items")
    if any(s <= 0 for s in item_sups):
        raise ZeroItemSupport(f"item supports must be positive, got {list(item_sups)}")
    if sup_a < 0 or any(s < sup_a for s in item_sups):
        raise SupExceedsItemSup(f"itemset support {sup_a} exceeds an item support {list(item_sups)}")
    if sup_a == 0:
        return 0.0
    k = len(item_sups)
    ratios = [sup_a / s for s in item_sups]
    if kind is MeasureKind.ALL_CONFIDENCE:
        return min(ratios)
    if kind is MeasureKind.MAX_CONFIDENCE:
        return max(ratios)
    if kind is MeasureKind.KULC:
        return math.fsum(ratios) / k
    if kind is MeasureKind.COHERENCE:
        return k * sup_a / math.fsum(item_sups)
    return math.prod(ratios) ** (1.0 / k)


def corr_batch(kind: MeasureKind, sup_a: np.ndarray, item_sups: np.ndarray) -> np.ndarray:
    """Vectorised :func:`corr` over rows of ``item_sups`` (shape ``(n, k)``).

    Uses the same formulas and operation order as :func:`corr`; inputs are
    assumed valid.
    """
    sup_a = np.asarray(sup_a, dtype=np.float64)
    item_sups = np.asarray(item_sups, dtype=np.float64)
    if len(sup_a) == 0:
        return np.zeros(0)
    k = item_sups.shape[1]
    with np.errstate(invalid="ignore", divide="ignore"):
        ratios = sup_a[:, None] / item_sups
        if kind is MeasureKind.ALL_CONFIDENCE:
            out = ratios.min(axis=1)
        elif kind is MeasureKind.MAX_CONFIDENCE:
            out = ratios.max(axis=1)
        elif kind is MeasureKind.KULC:
            out = np.array([math.fsum(r) for r in ratios.tolist()]) / k
        elif kind is MeasureKind.COHERENCE:
            out = k * sup_a / np.array([math.fsum(r) for r in item_sups.tolist()])
        elif kind is MeasureKind.COSINE:
            out = np.array([math.prod(r) ** (1.0 / k) for r in ratios.tolist()])
        else:
            raise UsageError("corr_batch() only evaluates null-invariant measures")
    out[sup_a == 0] = 0.0
    return out


def classify(value: float, sup_a: int, n_transactions: int, theta_h: float, th: Thresholds) -> CorrLabel:
    """Label a correlation value; infrequent itemsets are never labelled."""
    if sup_a < min_count(theta_h, n_transactions):
        return CorrLabel.NEITHER
    if value >= th.gamma:
        return CorrLabel.POSITIVE
    if value <= th.epsilon:
        return CorrLabel.NEGATIVE
    return CorrLabel.NEITHER


def classify_batch(values: np.ndarray, sups: np.ndarray, min_sup: int, th: Thresholds) -> np.ndarray:
    labels = np.zeros(len(values), dtype=np.int8)
    frequent = np.asarray(sups) >= min_sup
    labels[frequent & (values >= th.gamma)] = CorrLabel.POSITIVE
    labels[frequent & (values < th.gamma) & (values <= th.epsilon)] = CorrLabel.NEGATIVE
    return labels


def lift_demo(sup_a: int, sup_b: int, sup_ab: int, n_transactions: int) -> tuple[float, str]:
    """Expected co-occurrence under independence and the verdict it implies.

    The verdict flips with ``n_transactions`` alone, which is exactly why
    lift-style measures are not used for mining.
    """
    if n_transactions <= 0:
        raise ZeroN("the number of transactions must be positive")
    if min(sup_a, sup_b, sup_ab) < 0:
        raise UsageError("supports must be non-negative")
    expected = sup_a * sup_b / n_transactions
    if sup_ab > expected:
        verdict = "positive"
    elif sup_ab < expected:
        verdict = "negative"
    else:
        verdict = "independent"
    return expected, verdict
