"""Seeded synthetic taxonomy and transaction generator.

A simplified take on the classic Quest basket generator.  Leaves hang
below a balanced tree of ``n_roots`` top categories with a fixed fanout.
A pool of weighted "potential patterns" is drawn once, and every
transaction takes one of them, drops some of its items and is then
padded or trimmed to a Poisson-distributed width with uniform noise.

Leaf ``i`` lives under root ``i mod n_roots``; the remaining path digits
come from ``i // n_roots`` written in base ``fanout``, so consecutive
leaves spread across categories and the tree is balanced by construction.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .exceptions import InvalidParams, UnknownProfile
from .taxonomy import ROOT

# minimum support per level, top level first
PROFILES = {
    "thr1": (0.05, 0.05, 0.05, 0.05),
    "thr2": (0.05, 0.001, 0.0005, 0.0001),
    "thr3": (0.01, 0.001, 0.0005, 0.0001),
    "thr4": (0.01, 0.0005, 0.0005, 0.0001),
    "thr5": (0.01, 0.0005, 0.0001, 0.0001),
    "thr6": (0.01, 0.0005, 0.0001, 0.00005),
    "thr7": (0.001, 0.0005, 0.0001, 0.00005),
    "thr8": (0.001, 0.0001, 0.0001, 0.00005),
    "thr9": (0.001, 0.0001, 0.00006, 0.00005),
    "thr10": (0.001, 0.0001, 0.00006, 0.00003),
}

DEFAULT_MINSUP = (0.01, 0.001, 0.0005, 0.0001)
DEFAULT_GAMMA = 0.3
DEFAULT_EPSILON = 0.1


def threshold_profile(name: str) -> tuple:
    """The four per-level minimum supports of a named profile (``thr1`` .. ``thr10``)."""
    try:
        return PROFILES[name]
    except KeyError:
        raise UnknownProfile(f"unknown threshold profile {name!r}; expected thr1..thr10") from None


@dataclass(frozen=True)
class GenParams:
    n_transactions: int = 100_000
    avg_width: float = 5.0
    n_items: int = 1000
    n_levels: int = 4
    n_roots: int = 10
    fanout: int = 5
    n_patterns: int = 200
    avg_pattern_len: float = 3.0
    corruption_prob: float = 0.25
    # chance that a further pattern item stays in the first item's category
    share_bias: float = 0.5
    seed: int = 0

    def __post_init__(self):
        for f in ("n_transactions", "n_items", "n_levels", "n_roots", "fanout", "n_patterns"):
            v = getattr(self, f)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise InvalidParams(f"{f} must be a positive integer, got {v!r}")
        if not self.avg_width >= 1:
            raise InvalidParams(f"avg_width must be at least 1, got {self.avg_width}")
        if not self.avg_pattern_len >= 1:
            raise InvalidParams(f"avg_pattern_len must be at least 1, got {self.avg_pattern_len}")
        for f in ("corruption_prob", "share_bias"):
            v = getattr(self, f)
            if not 0.0 <= v <= 1.0:
                raise InvalidParams(f"{f} must lie in [0, 1], got {v}")
        if not 0 <= self.seed < 2**64:
            raise InvalidParams(f"seed must fit in 64 bits, got {self.seed}")
        if self.n_roots * self.fanout ** (self.n_levels - 1) < self.n_items:
            raise InvalidParams(
                f"{self.n_roots} roots with fanout {self.fanout} over {self.n_levels} levels "
                f"cannot hold {self.n_items} leaves"
            )

    @classmethod
    def field_names(cls) -> tuple:
        return tuple(f.name for f in fields(cls))


def leaf_paths(p: GenParams) -> list:
    """Label path (top level first) of every leaf, indexed by leaf number."""
    paths = []
    for i in range(p.n_items):
        root, rest = divmod(i, p.n_roots)[::-1]
        digits = []
        for _ in range(p.n_levels - 1):
            rest, d = divmod(rest, p.fanout)
            digits.append(d)
        path = [f"c{root}"]
        for d in reversed(digits):
            path.append(f"{path[-1]}.{d}")
        paths.append(tuple(path))
    return paths


def taxonomy_edges(paths: list) -> list:
    """``(child, parent)`` pairs, top level first, each node once."""
    seen = set()
    by_level = [[] for _ in range(max(len(x) for x in paths))]
    for path in paths:
        for h, lab in enumerate(path):
            if lab not in seen:
                seen.add(lab)
                by_level[h].append((lab, path[h - 1] if h else ROOT))
    return [e for level in by_level for e in sorted(level, key=_label_key)]


def _label_key(edge):
    lab = edge[0]
    return tuple(int(x) for x in lab[1:].split("."))


def _draw_patterns(p: GenParams, rng: np.random.Generator, roots: np.ndarray):
    members = [np.flatnonzero(roots == r) for r in range(p.n_roots)]
    patterns = []
    for _ in range(p.n_patterns):
        size = min(int(rng.geometric(1.0 / p.avg_pattern_len)), p.n_items)
        first = int(rng.integers(p.n_items))
        items = {first}
        pool = members[roots[first]]
        while len(items) < size:
            if rng.random() < p.share_bias and len(items) < len(pool):
                items.add(int(pool[rng.integers(len(pool))]))
            else:
                items.add(int(rng.integers(p.n_items)))
        patterns.append(np.array(sorted(items), dtype=np.int64))
    weights = rng.exponential(1.0, size=p.n_patterns)
    return patterns, weights / weights.sum()


def generate(p: GenParams):
    """Build the taxonomy edges and the transaction lines for ``p``.

    Returns
    -------
    edges : list of (child, parent)
    lines : list of str
        One transaction per entry, space-separated leaf labels in leaf order.
    """
    rng = np.random.default_rng(p.seed)
    paths = leaf_paths(p)
    labels = [x[-1] for x in paths]
    roots = np.arange(p.n_items) % p.n_roots
    patterns, weights = _draw_patterns(p, rng, roots)

    picks = rng.choice(p.n_patterns, size=p.n_transactions, p=weights)
    widths = np.clip(rng.poisson(p.avg_width, size=p.n_transactions), 1, p.n_items)
    lines = []
    for pick, width in zip(picks.tolist(), widths.tolist()):
        base = patterns[pick]
        kept = base[rng.random(len(base)) >= p.corruption_prob]
        if len(kept) > width:
            kept = rng.choice(kept, size=width, replace=False)
        items = set(kept.tolist())
        while len(items) < width:
            items.add(int(rng.integers(p.n_items)))
        lines.append(" ".join(labels[i] for i in sorted(items)))
    return taxonomy_edges(paths), lines


def write(p: GenParams, taxonomy_path, transactions_path) -> None:
    edges, lines = generate(p)
    with open(taxonomy_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(f"{c}\t{par}\n" for c, par in edges)
    with open(transactions_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(line + "\n" for line in lines)
