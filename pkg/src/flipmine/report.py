"""Text formats for mined patterns and run statistics.

Both formats are plain tab-separated lines so that outputs can be diffed
and grepped.  Nothing time- or machine-dependent is written, which keeps
repeated runs byte-identical.
"""
from __future__ import annotations

from .miner import FlippingPattern, MineStats
from .taxonomy import TaxonomyTree

STAT_KEYS = (
    "generated",
    "evaluated",
    "pruned_support",
    "pruned_flipping",
    "pruned_tpg",
    "pruned_sibp",
    "survivors",
    "flip_survivors",
)


def format_pattern(p: FlippingPattern, tree: TaxonomyTree) -> str:
    fields = [str(p.k), ",".join(p.sort_key(tree))]
    for link in p.chain:
        items = ",".join(tree.labels[v] for v in link.itemset.items)
        fields.append(f"{link.itemset.h}:{items}|{link.value:.6f}|{link.label.code}")
    return "\t".join(fields)


def format_patterns(patterns, tree: TaxonomyTree) -> str:
    lines = sorted((format_pattern(p, tree) for p in patterns), key=lambda s: s.split("\t")[1])
    return "".join(line + "\n" for line in lines)


def format_stats(stats: MineStats) -> str:
    totals = stats.totals()
    rows = [("engine", stats.engine), ("scans", stats.scans), ("k_limit", stats.k_limit)]
    rows += [(key, totals[key]) for key in STAT_KEYS]
    rows.append(("tpg_cutoffs", ";".join(f"{h},{k}" for h, k in stats.tpg_cutoffs) or "-"))
    rows.append(("patterns", stats.n_patterns))
    out = [f"{key}\t{value}\n" for key, value in rows]
    for (h, k), c in sorted(stats.cells.items()):
        out.append(f"cell\t{h}\t{k}\t{c.generated}\t{c.evaluated}\t{c.survivors}\n")
    return "".join(out)


def parse_stats(text: str) -> dict:
    """Read a stats file back into ``{key: value}`` plus a ``cells`` list."""
    out = {"cells": []}
    for line in text.splitlines():
        parts = line.split("\t")
        if parts[0] == "cell":
            out["cells"].append(tuple(int(x) for x in parts[1:]))
        elif len(parts) == 2:
            key, value = parts
            out[key] = int(value) if value.lstrip("-").isdigit() else value
    return out
