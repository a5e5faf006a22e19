"""The inequality system attached to a core graph ``Y1`` over ``G1 * G2``.

Subsets of primary vertices of ``Y1`` are bitsets: bit ``i`` stands for
``y1.primary[i]``.

A pair ``(a, u)`` with ``a`` in ``T`` and ``u`` in the image of ``a`` sits
in the class keyed by ``(w, a^-1 l)``, where ``w`` is the type-alpha
secondary next to ``u`` and ``l`` the label of that edge.  Two pairs are
related exactly when the keys agree, so classes come out of a dict rather
than a closure computation.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, Sequence

from .agraph import AGraph, reduced_rank
from .fiber import FiberCore, fiber_core, has_property_B
from .groups import FreeProductSpec, GroupTable


class NotAdmissible(ValueError):
    pass


class NotPropertyB(ValueError):
    pass


class OracleFailure(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# data

@dataclass(frozen=True)
class AdmissibleFunction:
    """``images[i]`` is the bitset assigned to ``T[i]``."""

    alpha: int
    T: tuple
    images: tuple

    def __post_init__(self):
        if len(self.T) != len(self.images):
            raise ValueError("T and images differ in length")
        if len(set(self.T)) != len(self.T):
            raise ValueError("T has repeated elements")


@dataclass(frozen=True)
class Inequality:
    """``sign * (x_A1 + ... + x_Ak) - (k-2) x_s <= rhs``, sign -1 for alpha 1."""

    alpha: int
    subsets: tuple
    rhs: int
    defining_fn: AdmissibleFunction | None = field(default=None, compare=False)

    @property
    def k(self) -> int:
        return len(self.subsets)

    @property
    def xs_coeff(self) -> int:
        return -(self.k - 2)

    @property
    def n(self) -> int:
        return -self.rhs

    @property
    def sign(self) -> int:
        return -1 if self.alpha == 1 else 1

    @property
    def key(self) -> tuple:
        return (self.alpha, self.subsets, self.rhs)

    def lhs(self) -> dict:
        """Coefficients keyed by bitset, plus ``"xs"``."""
        out: dict = defaultdict(int)
        for a in self.subsets:
            out[a] += self.sign
        out["xs"] = self.xs_coeff
        return dict(out)

    def evaluate(self, x: dict, xs) -> object:
        """Left side at a point given as {bitset: value} and x_s."""
        return sum(self.sign * x.get(a, 0) for a in self.subsets) + self.xs_coeff * xs

    def text(self) -> str:
        terms = [f"{'-' if self.sign < 0 else '+'} xA_{a:x}" for a in self.subsets]
        return " ".join(terms) + f" {self.xs_coeff:+d} xs <= {self.rhs}"


@dataclass(frozen=True)
class SliSystem:
    y1: AGraph
    d: int
    inequalities: tuple

    @property
    def primaries(self) -> tuple:
        return self.y1.primary

    def variables(self) -> list:
        """Appearing subsets in increasing bitset order, then ``"xs"``."""
        subs = sorted({a for q in self.inequalities for a in q.subsets})
        return subs + ["xs"]

    def keys(self) -> set:
        return {q.key for q in self.inequalities}

    def index(self) -> dict:
        return {q.key: i for i, q in enumerate(self.inequalities)}

    def __len__(self) -> int:
        return len(self.inequalities)


def bitset(vertices: Iterable, y1: AGraph) -> int:
    pos = {p: i for i, p in enumerate(y1.primary)}
    out = 0
    for v in vertices:
        out |= 1 << pos[v]
    return out


def bits(x: int) -> list[int]:
    return [i for i in range(x.bit_length()) if x >> i & 1]


# ---------------------------------------------------------------------------
# classes and N

class _Ctx:
    """Per-type view of Y1: neighbours of each type-alpha secondary."""

    def __init__(self, y1: AGraph, alpha: int, grp):
        self.alpha = alpha
        self.grp = grp
        self.n = len(y1.primary)
        pos = {p: i for i, p in enumerate(y1.primary)}
        self.at = {}          # primary index -> (secondary, label)
        self.nbrs = {}        # secondary -> list of (primary index, label)
        for s, t in y1.secondary:
            if t == alpha:
                self.nbrs[s] = sorted(((pos[p], l) for p, l in y1.s_adj[s]),
                                      key=lambda il: il[0])
        for s, lst in self.nbrs.items():
            for i, l in lst:
                self.at[i] = (s, l)
        self.sec_order = sorted(self.nbrs, key=lambda s: repr(s))

    def class_key(self, a, i):
        hit = self.at.get(i)
        if hit is None:
            return ("alone", a, i)
        w, l = hit
        return (w, self.grp.mul(self.grp.inv(a), l))

    def quotients(self) -> list:
        """All l(v) l(u)^-1 over distinct u, v at one secondary."""
        out = []
        seen = set()
        for s in self.sec_order:
            for (i, lu), (j, lv) in itertools.permutations(self.nbrs[s], 2):
                q = self.grp.mul(lv, self.grp.inv(lu))
                if q not in seen:
                    seen.add(q)
                    out.append(q)
        return out


def _ctx(y1: AGraph, alpha: int, spec: FreeProductSpec, grp=None) -> _Ctx:
    return _Ctx(y1, alpha, grp if grp is not None else spec.factor(alpha))


def equivalence_classes(fn: AdmissibleFunction, y1: AGraph, spec: FreeProductSpec,
                        grp=None) -> list[tuple]:
    """Classes of pairs ``(a, u)``; each is ``(secondary or None, members)``.

    Members are ``(a, u)`` with ``u`` a primary id of ``y1``.
    """
    ctx = _ctx(y1, fn.alpha, spec, grp)
    return _classes(ctx, fn, y1)


def _classes(ctx: _Ctx, fn: AdmissibleFunction, y1: AGraph) -> list[tuple]:
    groups: dict = {}
    for a, img in zip(fn.T, fn.images):
        if img == 0:
            raise NotAdmissible(f"empty image at {a!r}")
        for i in bits(img):
            key = ctx.class_key(a, i)
            groups.setdefault(key, []).append((a, y1.primary[i]))
    out = []
    for key, members in groups.items():
        w = None if key[0] == "alone" else key[0]
        out.append((w, tuple(members)))
    return out


def is_admissible(fn: AdmissibleFunction, y1: AGraph, spec: FreeProductSpec, grp=None) -> bool:
    try:
        return all(len(m) >= 2 for _, m in equivalence_classes(fn, y1, spec, grp))
    except NotAdmissible:
        return False


def n_alpha(fn: AdmissibleFunction, y1: AGraph, spec: FreeProductSpec, grp=None) -> int:
    """Sum over classes of (size - 2); raises NotAdmissible on a singleton."""
    total = 0
    for w, members in equivalence_classes(fn, y1, spec, grp):
        if len(members) < 2:
            raise NotAdmissible(f"singleton class {members!r}")
        total += len(members) - 2
    return total


def inequality_of(fn: AdmissibleFunction, y1: AGraph, spec: FreeProductSpec, grp=None) -> Inequality:
    n = n_alpha(fn, y1, spec, grp)
    return Inequality(fn.alpha, tuple(sorted(fn.images)), -n, fn)


# ---------------------------------------------------------------------------
# admissible functions on a fixed T

def _keys_for_T(ctx: _Ctx, T: Sequence) -> list[list[tuple[int, int]]]:
    """Potential class member lists ``[(index in T, primary index), ...]``.

    Only keys with at least two potential members can host a class.
    """
    tpos = {a: i for i, a in enumerate(T)}
    grp = ctx.grp
    out = []
    for w in ctx.sec_order:
        nb = ctx.nbrs[w]
        gs = []
        seen = set()
        for a in T:
            for _, l in nb:
                g = grp.mul(grp.inv(a), l)
                if g not in seen:
                    seen.add(g)
                    gs.append(g)
        for g in gs:
            ginv = grp.inv(g)
            mem = []
            for i, l in nb:
                a = grp.mul(l, ginv)
                if a in tpos:
                    mem.append((tpos[a], i))
            if len(mem) >= 2:
                out.append(mem)
    return out


def _subset_options(mem: list) -> list[tuple]:
    opts = [()]
    for r in range(2, len(mem) + 1):
        opts.extend(itertools.combinations(mem, r))
    return opts


def functions_on(ctx: _Ctx, T: Sequence) -> Iterator[tuple[tuple, int, list]]:
    """Every admissible function on ``T`` as ``(images, N, chosen classes)``.

    Choosing, for every key, a subset of its potential members of size 0 or
    at least 2 gives each admissible function exactly once.
    """
    k = len(T)
    keys = _keys_for_T(ctx, T)
    options = [_subset_options(m) for m in keys]
    # reach[j] = T indices coverable using keys j..end
    reach = [0] * (len(keys) + 1)
    for j in range(len(keys) - 1, -1, -1):
        m = 0
        for t, _ in keys[j]:
            m |= 1 << t
        reach[j] = reach[j + 1] | m
    full = (1 << k) - 1
    images = [0] * k
    chosen: list = []

    def rec(j: int, covered: int, n: int):
        if covered | reach[j] != full:
            return
        if j == len(keys):
            yield tuple(images), n, list(chosen)
            return
        for opt in options[j]:
            cov = covered
            for t, i in opt:
                images[t] |= 1 << i
                cov |= 1 << t
            if opt:
                chosen.append(opt)
            yield from rec(j + 1, cov, n + (len(opt) - 2 if opt else 0))
            if opt:
                chosen.pop()
            for t, i in opt:
                images[t] &= ~(1 << i)

    yield from rec(0, 0, 0)


# ---------------------------------------------------------------------------
# finite enumeration

def _sorted_elements(grp) -> list:
    return sorted(grp.elements(), key=grp.element_key)


def enumerate_alpha_finite(y1: AGraph, d: int, alpha: int, grp,
                           translation_pruning: bool = True) -> list[Inequality]:
    """Inequalities of type ``alpha`` from every ``T`` with 2 <= |T| <= d.

    With ``translation_pruning`` only sets containing the identity are
    visited; right translation of ``T`` leaves each inequality unchanged.
    """
    ctx = _Ctx(y1, alpha, grp)
    elems = _sorted_elements(grp)
    found: dict = {}
    for k in range(2, min(d, len(elems)) + 1):
        for T in itertools.combinations(elems, k):
            if translation_pruning and grp.identity not in T:
                continue
            for images, n, _ in functions_on(ctx, T):
                key = (alpha, tuple(sorted(images)), -n)
                if key not in found:
                    found[key] = Inequality(alpha, key[1], key[2], AdmissibleFunction(alpha, T, images))
    return list(found.values())


def _order(qs: Iterable[Inequality]) -> tuple:
    return tuple(sorted(qs, key=lambda q: (q.alpha, q.k, q.subsets, q.rhs)))


def enumerate_sli_finite(y1: AGraph, d: int, spec: FreeProductSpec,
                         translation_pruning: bool = True) -> SliSystem:
    """The system SLI_d[Y1] when both factors are finite tables."""
    _check_two_factor(y1, spec)
    if d < 3:
        raise ValueError("d must be at least 3")
    qs = []
    for alpha in (1, 2):
        grp = spec.factor(alpha)
        if not isinstance(grp, GroupTable):
            raise ValueError(f"factor {alpha} is not a finite table")
        qs += enumerate_alpha_finite(y1, d, alpha, grp, translation_pruning)
    return SliSystem(y1, d, _order(qs))


def _check_two_factor(y1: AGraph, spec: FreeProductSpec):
    if not y1.types() <= {1, 2}:
        raise ValueError("Y1 must live over the first two factors")
    if reduced_rank(y1) <= 0:
        raise ValueError("Y1 must have positive reduced rank")


# ---------------------------------------------------------------------------
# generic enumeration for word-oracle factors

def first_elements(grp, count: int) -> list:
    """The first ``count`` distinct elements in the group's enumeration order."""
    out = list(itertools.islice(grp.elements(), count))
    if len(out) < count:
        raise OracleFailure(f"group has fewer than {count} elements")
    return out


@dataclass(frozen=True)
class Component:
    """A function whose pairs link all of ``T`` together, with ``T`` holding 1."""

    T: tuple
    images: tuple
    n: int
    classes: tuple   # tuples of (index in T, primary index)

    @property
    def signature(self) -> tuple:
        return (len(self.T), tuple(sorted(self.images)), self.n)


def _connected_sets(grp, quotients: list, d: int) -> list[tuple]:
    """Sets of size 2..d holding the identity, connected under x -> q x."""
    start = frozenset([grp.identity])
    level = {start}
    out = []
    for _ in range(d - 1):
        nxt = set()
        for S in level:
            for x in S:
                for q in quotients:
                    y = grp.mul(q, x)
                    if y not in S:
                        nxt.add(S | {y})
        level = nxt
        out.extend(level)
    return [tuple(sorted(S, key=grp.element_key)) for S in out]


def _linked(k: int, classes: list) -> bool:
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in classes:
        r = find(c[0][0])
        for t, _ in c[1:]:
            parent[find(t)] = r
    return len({find(t) for t in range(k)}) == 1


def enumerate_components(y1: AGraph, alpha: int, grp, d: int) -> list[Component]:
    """One representative per signature of linked admissible functions.

    Every admissible function splits along the linkage of ``T`` into such
    pieces; right translation moves any piece onto one containing 1.
    """
    ctx = _Ctx(y1, alpha, grp)
    reps: dict = {}
    sets = _connected_sets(grp, ctx.quotients(), d)
    sets.sort(key=lambda T: (len(T), [grp.element_key(a) for a in T]))
    for T in sets:
        for images, n, chosen in functions_on(ctx, T):
            if not _linked(len(T), chosen):
                continue
            comp = Component(T, images, n, tuple(tuple(c) for c in chosen))
            reps.setdefault(comp.signature, comp)
    return list(reps.values())


def solve_zeta(y1: AGraph, alpha: int, grp, symbols: Sequence[Hashable], images: Sequence[int],
               classes: Sequence[Sequence[tuple[int, int]]], known: dict) -> dict | None:
    """Solve for group values of ``symbols`` from declared classes.

    ``classes`` lists the intended classes as ``(symbol index, primary index)``
    pairs; ``known`` fixes some symbols (the anchors taken from C).  Inside a
    declared class, pairs ``(a, u)`` and ``(b, v)`` force
    ``z(a) z(b)^-1 = l(u) l(v)^-1``.  Returns ``{symbol index: element}``, or
    None when an equation fails, a symbol stays undetermined, two symbols
    collide, or the solved function has classes other than the declared ones.
    """
    ctx = _Ctx(y1, alpha, grp)
    val = dict(known)
    eqs = defaultdict(list)
    for c in classes:
        for (a, u), (b, v) in itertools.combinations(c, 2):
            lu, lv = ctx.at[u][1], ctx.at[v][1]
            if ctx.at[u][0] != ctx.at[v][0]:
                return None
            # z(a) = l(u) l(v)^-1 z(b)
            eqs[b].append((a, grp.mul(lu, grp.inv(lv))))
            eqs[a].append((b, grp.mul(lv, grp.inv(lu))))
    stack = list(val)
    while stack:
        b = stack.pop()
        for a, q in eqs[b]:
            x = grp.mul(q, val[b])
            if a in val:
                if val[a] != x:
                    return None
            else:
                val[a] = x
                stack.append(a)
    if len(val) != len(symbols):
        return None
    if len(set(val.values())) != len(val):
        return None
    T = tuple(val[i] for i in range(len(symbols)))
    fn = AdmissibleFunction(alpha, T, tuple(images))
    got = sorted(sorted((T.index(a), _pos(y1, u)) for a, u in m) for _, m in _classes(ctx, fn, y1))
    want = sorted(sorted(c) for c in classes)
    if got != want:
        return None
    return val


def _pos(y1: AGraph, u) -> int:
    return y1.primary.index(u)


def _place(y1, alpha, grp, comps: list[Component], candidates: list) -> AdmissibleFunction | None:
    """Realize a multiset of components disjointly, anchoring each at a candidate.

    Backtracking over (candidate, anchor element) per component; each trial is
    checked by :func:`solve_zeta` on the union of declared classes so far.
    """
    symbols: list = []
    images: list = []
    classes: list = []
    known: dict = {}

    def rec(ci: int):
        if ci == len(comps):
            return True
        comp = comps[ci]
        off = len(symbols)
        symbols.extend((ci, t) for t in range(len(comp.T)))
        images.extend(comp.images)
        classes.extend([[(off + t, i) for t, i in c] for c in comp.classes])
        for c in candidates:
            for t in range(len(comp.T)):
                known[off + t] = c
                sol = solve_zeta(y1, alpha, grp, symbols, images, classes, known)
                if sol is not None:
                    if rec(ci + 1):
                        return True
                del known[off + t]
        del symbols[off:]
        del images[off:]
        del classes[len(classes) - len(comp.classes):]
        return False

    if not rec(0):
        return None
    sol = solve_zeta(y1, alpha, grp, symbols, images, classes, known)
    T = tuple(sol[i] for i in range(len(symbols)))
    return AdmissibleFunction(alpha, T, tuple(images))


def enumerate_sli_generic(y1: AGraph, d: int, alpha: int, grp, C: Sequence | None = None,
                          search_limit: int | None = None) -> list[Inequality]:
    """Inequalities of type ``alpha`` using only products, inverses and equality.

    Linked pieces are enumerated up to translation, combined into multisets of
    total size at most ``d``, and each combination is realized inside the group
    starting from anchors in ``C`` (default: the first d^2+d elements), then
    from later elements if needed.  Every emitted inequality carries a concrete
    defining function which reproduces it.
    """
    if C is None:
        C = first_elements(grp, d * d + d)
    if len(C) != d * d + d or len(set(C)) != len(C):
        raise OracleFailure("C must hold d^2+d distinct elements")
    comps = enumerate_components(y1, alpha, grp, d)
    comps.sort(key=lambda c: c.signature)
    limit = search_limit if search_limit is not None else 20 * (d * d + d)
    extra = [x for x in itertools.islice(grp.elements(), limit) if x not in set(C)]
    candidates = list(C) + extra
    found: dict = {}

    def combos(start: int, size: int, acc: list):
        if size >= 2 and acc:
            yield list(acc)
        for j in range(start, len(comps)):
            kk = len(comps[j].T)
            if size + kk <= d:
                acc.append(comps[j])
                yield from combos(j, size + kk, acc)
                acc.pop()

    for combo in combos(0, 0, []):
        subsets = tuple(sorted(itertools.chain.from_iterable(c.images for c in combo)))
        rhs = -sum(c.n for c in combo)
        key = (alpha, subsets, rhs)
        if key in found:
            continue
        fn = _place(y1, alpha, grp, combo, candidates)
        if fn is None:
            if _finite_hint(grp, limit):
                continue    # not realizable inside a small finite group
            raise OracleFailure(f"could not realize combination {key}")
        found[key] = Inequality(alpha, subsets, rhs, fn)
    return list(found.values())


def _finite_hint(grp, limit: int) -> bool:
    """True when the group enumeration ended before ``limit`` elements."""
    return sum(1 for _ in itertools.islice(grp.elements(), limit + 1)) <= limit


def enumerate_sli(y1: AGraph, d: int, spec: FreeProductSpec) -> SliSystem:
    """Finite enumeration for table factors, the generic path otherwise."""
    _check_two_factor(y1, spec)
    qs = []
    for alpha in (1, 2):
        grp = spec.factor(alpha)
        if isinstance(grp, GroupTable):
            qs += enumerate_alpha_finite(y1, d, alpha, grp)
        else:
            qs += enumerate_sli_generic(y1, d, alpha, grp)
    return SliSystem(y1, d, _order(qs))


# ---------------------------------------------------------------------------
# inequalities read off a graph with property (B)

def vertex_to_inequality(y1: AGraph, y2: AGraph, u, spec: FreeProductSpec,
                         fc: FiberCore | None = None, check: bool = True) -> Inequality:
    """Inequality of the function on the labels at ``u``.

    The label of an edge ``u - v`` goes to the set of primaries of ``y1``
    lying under ``v`` in the fiber core.
    """
    if check and not has_property_B(y1, y2, spec):
        raise NotPropertyB("y2 lacks property (B) relative to y1")
    if fc is None:
        fc = fiber_core(y1, y2, spec)
    alpha = y2.sec_type[u]
    over = defaultdict(set)
    for p, (v1, v2) in fc.pairs.items():
        over[v2].add(v1)
    adj = sorted(y2.s_adj[u], key=lambda pl: spec.factor(alpha).element_key(pl[1]))
    T = tuple(l for _, l in adj)
    images = tuple(bitset(over[v], y1) for v, _ in adj)
    fn = AdmissibleFunction(alpha, T, images)
    return inequality_of(fn, y1, spec)


def graph_inequalities(y1: AGraph, y2: AGraph, spec: FreeProductSpec) -> list[Inequality]:
    """``vertex_to_inequality`` for every secondary of ``y2``, in id order."""
    if not has_property_B(y1, y2, spec):
        raise NotPropertyB("y2 lacks property (B) relative to y1")
    fc = fiber_core(y1, y2, spec)
    return [vertex_to_inequality(y1, y2, s, spec, fc, check=False) for s, _ in y2.secondary]


# ---------------------------------------------------------------------------
# points

def feasibility_point(y1: AGraph, q) -> tuple[dict, object]:
    """x_A = 0 and x_s = 2 q/(q-2) brr(Y1); q is the exact ratio q*/(q*-2)."""
    return {}, 2 * q * reduced_rank(y1)


def satisfies(sys: SliSystem, x: dict, xs) -> list[Inequality]:
    """Inequalities violated by the point (empty when feasible)."""
    return [q for q in sys.inequalities if q.evaluate(x, xs) > q.rhs]
