"""Brute-force lower bounds for sigma_d: enumerate small graphs and take ratios."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterator

from .agraph import AGraph, canonical_form, is_connected, is_irreducible, reduced_rank
from .fiber import NoPositiveRankComponent, brr_generalized_intersection, trim_to_surjective
from .groups import FreeProductSpec


def _type_sequences(m: int, k: int) -> Iterator[tuple]:
    return itertools.combinations_with_replacement(range(1, m + 1), k)


def _label_sets(order: int, r: int) -> list[tuple]:
    # right translation at a secondary does not change the subgroup, so the
    # identity can always be taken as one of the labels
    return [(0,) + rest for rest in itertools.combinations(range(1, order), r - 1)]


def _partitions(slots: list, d: int) -> Iterator[list]:
    """Groupings of slots into primaries: distinct types, size 2..d."""
    n = len(slots)
    used = [False] * n

    def rec(acc):
        try:
            i = used.index(False)
        except ValueError:
            yield list(acc)
            return
        used[i] = True
        rest = [j for j in range(i + 1, n) if not used[j] and slots[j][1] != slots[i][1]]

        def grow(group, types, start):
            if len(group) >= 2:
                acc.append(tuple(group))
                yield from rec(acc)
                acc.pop()
            if len(group) == d:
                return
            for jj in range(start, len(rest)):
                j = rest[jj]
                if used[j] or slots[j][1] in types:
                    continue
                used[j] = True
                group.append(j)
                yield from grow(group, types | {slots[j][1]}, jj + 1)
                group.pop()
                used[j] = False

        yield from grow([i], {slots[i][1]}, 0)
        used[i] = False

    yield from rec([])


def enumerate_bd_graphs(spec: FreeProductSpec, d: int, max_secondary: int) -> Iterator[AGraph]:
    """Connected irreducible core graphs with deg <= d and brr > 0, one per
    isomorphism class, with at most ``max_secondary`` secondaries.

    Secondaries are chosen by type and label set, then their edge slots are
    grouped into primaries.  Output order is deterministic.
    """
    if not spec.all_finite():
        raise ValueError("enumeration needs finite factors")
    seen = set()
    for k in range(1, max_secondary + 1):
        for types in _type_sequences(spec.m, k):
            per_sec = []
            for t in types:
                top = min(d, spec.factor(t).order)
                per_sec.append([ls for r in range(2, top + 1)
                                for ls in _label_sets(spec.factor(t).order, r)])
            for labels in itertools.product(*per_sec):
                n_slots = sum(len(ls) for ls in labels)
                # brr = slots - primaries - k, and a primary holds at most
                # min(d, m) slots
                if n_slots - -(-n_slots // min(d, spec.m)) - k <= 0:
                    continue
                slots = [(s, t, x) for s, (t, ls) in enumerate(zip(types, labels)) for x in ls]
                for part in _partitions([(s, t) for s, t, _ in slots], d):
                    edges = [(p, slots[j][0], slots[j][2]) for p, grp in enumerate(part) for j in grp]
                    g = AGraph.build(range(len(part)), list(enumerate(types)), edges, None)
                    if reduced_rank(g) <= 0 or not is_connected(g):
                        continue
                    key = canonical_form(g, spec)
                    if key in seen:
                        continue
                    seen.add(key)
                    if is_irreducible(g):
                        yield g


def _least(a: AGraph, b: AGraph, spec: FreeProductSpec) -> AGraph:
    ka, kb = canonical_form(a, spec), canonical_form(b, spec)
    try:
        return a if ka <= kb else b
    except TypeError:
        return a if repr(ka) <= repr(kb) else b


def best_ratio(y1: AGraph, spec: FreeProductSpec, d: int, max_secondary: int):
    """Largest brr(core(Y1 x Y2)) / (brr(Y1) brr(Y2)) over the enumerated Y2.

    Each candidate is first cut down to the best surjective component.
    Returns ``(Fraction(0), None)`` when no candidate meets Y1.
    """
    b1 = reduced_rank(y1)
    best, arg = Fraction(0), None
    for y2 in enumerate_bd_graphs(spec, d, max_secondary):
        if brr_generalized_intersection(y1, y2, spec) <= 0:
            continue
        try:
            y2 = trim_to_surjective(y1, y2, spec)
        except NoPositiveRankComponent:
            continue
        val = Fraction(brr_generalized_intersection(y1, y2, spec), b1 * reduced_rank(y2))
        if val > best:
            best, arg = val, y2
        elif val == best and arg is not None:
            arg = _least(arg, y2, spec)
    return best, arg


def ratio_table(y1: AGraph, spec: FreeProductSpec, d: int, max_secondary: int) -> list[dict]:
    """best_ratio for every cap from 1 up to ``max_secondary``."""
    rows = []
    for cap in range(1, max_secondary + 1):
        val, g = best_ratio(y1, spec, d, cap)
        rows.append({"max_secondary": cap, "ratio": str(val),
                     "primary": len(g.primary) if g is not None else 0,
                     "secondary": len(g.secondary) if g is not None else 0})
    return rows
