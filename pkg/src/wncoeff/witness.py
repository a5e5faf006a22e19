"""Extremal witness graphs built from optimal dual vertices."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

from .agraph import AGraph, components, graph_to_json, is_irreducible, reduced_rank
from .fiber import brr_generalized_intersection, has_property_Bd
from .groups import FreeProductSpec


class ZeroVector(ValueError):
    pass


class UnbalancedCombination(ValueError):
    pass


class WitnessContradiction(RuntimeError):
    """A vertex combination gave a disconnected graph; this should not happen."""


@dataclass(frozen=True)
class Combination:
    """Multiset of inequalities: ``eta[j]`` copies of inequality ``j``."""

    eta: dict
    C: int

    def y(self, n: int) -> tuple:
        """The dual vector eta_j / C of length ``n``."""
        return tuple(Fraction(self.eta.get(j, 0), self.C) for j in range(n))

    def size(self) -> int:
        return sum(self.eta.values())


def combination_from_vertex(y: Sequence[Fraction], sys=None) -> Combination:
    """Scale ``y`` to coprime integers; ``C`` is the common scale.

    When ``sys`` is given, ``C`` is checked against sum (k_j - 2) eta_j.
    """
    y = [Fraction(v) for v in y]
    if any(v < 0 for v in y):
        raise ValueError("negative entry")
    nz = [v for v in y if v]
    if not nz:
        raise ZeroVector("all entries are zero")
    lcm = 1
    for v in nz:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = {j: int(v * lcm) for j, v in enumerate(y) if v}
    g = 0
    for v in ints.values():
        g = math.gcd(g, v)
    eta = {j: v // g for j, v in ints.items()}
    C = Fraction(lcm, g)
    C = int(C) if C.denominator == 1 else C
    if sys is not None:
        c2 = sum(eta[j] * (sys.inequalities[j].k - 2) for j in eta)
        if c2 != C:
            raise UnbalancedCombination(f"C = {C} but sum (k-2) eta = {c2}")
    return Combination(eta, C)


def balance(q: Combination, sys) -> dict:
    """Net coefficient of each x_A in the summed left sides (all zero when balanced)."""
    net = defaultdict(int)
    for j, m in q.eta.items():
        ineq = sys.inequalities[j]
        for a in ineq.subsets:
            net[a] += m * ineq.sign
    return {a: v for a, v in net.items() if v}


def build_witness(q: Combination, sys) -> AGraph:
    """One secondary per inequality occurrence, primaries by positional matching.

    Occurrences are taken in increasing inequality index; within an
    occurrence the edges follow the order of ``T`` in the defining function.
    Each type-1 slot of subset ``A`` is paired with the next type-2 slot of
    the same subset.
    """
    if q.C <= 0:
        raise UnbalancedCombination("C must be positive")
    minus = defaultdict(list)
    plus = defaultdict(list)
    sec = []
    sid = 0
    for j in sorted(q.eta):
        ineq = sys.inequalities[j]
        fn = ineq.defining_fn
        if fn is None:
            raise ValueError(f"inequality {j} has no defining function")
        for _ in range(q.eta[j]):
            sec.append((sid, ineq.alpha))
            for b, A in zip(fn.T, fn.images):
                (minus if ineq.alpha == 1 else plus)[A].append((sid, b))
            sid += 1
    edges = []
    pid = 0
    for A in sorted(set(minus) | set(plus)):
        if len(minus[A]) != len(plus[A]):
            raise UnbalancedCombination(f"subset {A:x}: {len(minus[A])} vs {len(plus[A])}")
        for (s1, b1), (s2, b2) in zip(minus[A], plus[A]):
            edges.append((pid, s1, b1))
            edges.append((pid, s2, b2))
            pid += 1
    return AGraph.build(range(pid), sec, edges, None)


@dataclass(frozen=True)
class WitnessReport:
    sigma: Fraction
    brr_y1: int
    brr_y2: int
    brr_fiber: int
    connected: bool
    size_bound_ok: bool
    equality_ok: bool
    property_bd: bool
    irreducible: bool
    oriented_edges: int
    bound_exponent: str

    @property
    def ok(self) -> bool:
        return (self.equality_ok and self.connected and self.size_bound_ok
                and self.property_bd and self.irreducible)

    def to_json(self) -> dict:
        out = asdict(self)
        out["sigma"] = str(self.sigma)
        out["ok"] = self.ok
        return out


def size_bound_holds(y1: AGraph, y2: AGraph, d: int) -> tuple[bool, str]:
    """|E y2| < 2^(2^(|E y1|/4 + log2 log2 4d)) with oriented edge counts.

    The right side equals (4d)^(2^(|E y1|/4)); with |E y1|/4 an integer the
    comparison is exact.
    """
    e1 = 2 * y1.n_edges
    e2 = 2 * y2.n_edges
    if e1 % 4 == 0:
        expo = 2 ** (e1 // 4)
        return e2 < (4 * d) ** expo, f"(4d)^(2^{e1 // 4})"
    # fall back to logarithms for odd shapes
    lhs = math.log2(e2) if e2 > 0 else -math.inf
    rhs = math.log2(4 * d) * 2 ** (e1 / 4)
    return lhs < rhs, f"(4d)^(2^{e1 / 4})"


def verify_witness(y1: AGraph, y2: AGraph, sigma: Fraction, d: int,
                   spec: FreeProductSpec) -> WitnessReport:
    """Recompute the fiber core from scratch and compare with sigma."""
    b1 = reduced_rank(y1)
    b2 = reduced_rank(y2)
    bf = brr_generalized_intersection(y1, y2, spec)
    ok_size, expo = size_bound_holds(y1, y2, d)
    return WitnessReport(
        sigma=Fraction(sigma),
        brr_y1=b1,
        brr_y2=b2,
        brr_fiber=bf,
        connected=len(components(y2)) == 1,
        size_bound_ok=ok_size,
        equality_ok=Fraction(bf) == Fraction(sigma) * b1 * b2,
        property_bd=has_property_Bd(y1, y2, d, spec),
        irreducible=is_irreducible(y2),
        oriented_edges=2 * y2.n_edges,
        bound_exponent=expo,
    )


def witness_from_system(sys, spec: FreeProductSpec, res=None):
    """Solve, scale the dual vertex, build and verify; returns (graph, report, combination)."""
    from .lp import solve_sli

    if res is None:
        res = solve_sli(sys)
    q = combination_from_vertex(res.dual_y, sys)
    g = build_witness(q, sys)
    if len(components(g)) != 1:
        raise WitnessContradiction("vertex combination produced a disconnected graph")
    rep = verify_witness(sys.y1, g, res.sigma, sys.d, spec)
    return g, rep, q


def witness_json(g: AGraph, rep: WitnessReport, q: Combination, res, sys) -> dict:
    return {
        "graph": graph_to_json(g),
        "report": rep.to_json(),
        "provenance": {
            "d": sys.d,
            "dual_objective": str(res.dual_value),
            "basis": list(res.primal.basis),
            "eta": {str(j): v for j, v in sorted(q.eta.items())},
            "C": q.C,
            "inequalities": {str(j): sys.inequalities[j].text() for j in sorted(q.eta)},
        },
    }
