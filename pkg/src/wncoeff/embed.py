"""Reduction of free products with three or more factors to two factors.

Each letter ``a`` of factor ``alpha`` is sent to ``P^-1 a P`` where ``P`` is
the cyclic shift ``g_{alpha+1} ... g_m g_1 ... g_alpha`` of the fixed word
``g_1 ... g_m``.  The image is read in ``G_1 * G(2, m)`` where the second
factor is the free product of the remaining factors, kept as a word oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .agraph import AGraph, NotFactorFree, core, reduced_rank, spanning_generators, subgroup_graph
from .fiber import nontrivial_element
from .groups import FreeProductGroup, FreeProductSpec, Word, normalize_word, q_ratio, q_star


@dataclass(frozen=True)
class EmbeddingSpec:
    source: FreeProductSpec
    g: tuple = field(default=())
    target: FreeProductSpec = field(init=False, compare=False)

    def __post_init__(self):
        if self.source.m < 3:
            raise ValueError("the embedding needs at least three factors")
        g = self.g or tuple(nontrivial_element(f) for f in self.source.factors)
        if len(g) != self.source.m:
            raise ValueError("one chosen element per factor")
        for alpha, x in enumerate(g, start=1):
            if x == self.source.factor(alpha).identity:
                raise ValueError(f"g_{alpha} must be nontrivial")
        object.__setattr__(self, "g", tuple(g))
        rest = FreeProductGroup(self.source.factors[1:])
        object.__setattr__(self, "target", FreeProductSpec((self.source.factors[0], rest)))

    @property
    def m(self) -> int:
        return self.source.m

    def conjugator(self, alpha: int) -> Word:
        """g_{alpha+1} ... g_m g_1 ... g_alpha as a source word."""
        order = list(range(alpha + 1, self.m + 1)) + list(range(1, alpha + 1))
        return tuple((b, self.g[b - 1]) for b in order)

    def to_json(self) -> dict:
        return {"source": self.source.to_json(), "g": list(self.g)}


def compute_I(g: AGraph) -> set:
    """Factor indices that occur as secondary types."""
    return set(g.types())


def regroup(w: Word, m: int) -> Word:
    """Read a source word in G_1 * G(2,m): runs of factors >= 2 become one letter."""
    out = []
    run: list = []
    for f, x in w:
        if f == 1:
            if run:
                out.append((2, tuple(run)))
                run = []
            out.append((1, x))
        else:
            run.append((f - 1, x))
    if run:
        out.append((2, tuple(run)))
    return tuple(out)


def ungroup(w: Word) -> Word:
    """Inverse of :func:`regroup`."""
    out = []
    for f, x in w:
        if f == 1:
            out.append((1, x))
        else:
            out.extend((b + 1, y) for b, y in x)
    return tuple(out)


def mu_word(w: Sequence, e: EmbeddingSpec) -> Word:
    """Image under the letterwise conjugation, as a reduced source word."""
    src = e.source
    letters = []
    for alpha, a in normalize_word(w, src):
        p = e.conjugator(alpha)
        pinv = tuple((b, src.factor(b).inv(x)) for b, x in reversed(p))
        letters.extend(pinv + ((alpha, a),) + p)
    return normalize_word(letters, src)


def mu2_word(w: Sequence, e: EmbeddingSpec) -> Word:
    return regroup(mu_word(w, e), e.m)


def mu2_graph(g: AGraph, e: EmbeddingSpec) -> AGraph:
    """Irreducible core graph of the image subgroup over the two-factor target.

    The subgroup is read off a spanning tree at the least primary, the free
    generators are mapped and the result is folded again.
    """
    gens = spanning_generators(g, e.source, base=g.primary[0])
    if not gens:
        raise ValueError("graph carries the trivial subgroup")
    res = subgroup_graph([mu2_word(w, e) for w in gens], e.target)
    if isinstance(res, NotFactorFree):
        # the image of a factor-free subgroup is factor-free
        raise RuntimeError(f"image is not factor-free: {res}")
    return core(res.graph)


def restrict_to_I(g: AGraph, spec: FreeProductSpec) -> tuple[AGraph, FreeProductSpec, tuple]:
    """Keep only the factors in I(g), renumbered 1..|I| in increasing order."""
    idx = tuple(sorted(compute_I(g)))
    if idx == tuple(range(1, spec.m + 1)):
        return g, spec, idx
    if len(idx) < 2:
        raise ValueError("graph uses fewer than two factors")
    new = {a: i for i, a in enumerate(idx, start=1)}
    sub = FreeProductSpec(tuple(spec.factor(a) for a in idx))
    h = AGraph.build(g.primary, [(s, new[t]) for s, t in g.secondary], g.edges, g.base)
    return h, sub, idx


def d_M(g: AGraph, spec: FreeProductSpec) -> int:
    """max(|I|, max |G_alpha| over alpha in I)."""
    idx = compute_I(g)
    return max(len(idx), max(spec.factor(a).order for a in idx))


@dataclass(frozen=True)
class EmbedReport:
    sigma: Fraction
    d: int
    I: tuple
    g: tuple
    q_star: float
    bound: Fraction
    brr: int
    brr_hat: int
    deg: int
    deg_hat: int
    graph_hat: AGraph | None = None

    @property
    def conjecture_holds(self) -> bool | None:
        """True when the upper bound already meets q*/(q*-2); None otherwise."""
        return True if self.sigma <= self.bound else None

    def to_json(self) -> dict:
        return {
            "sigma_d_hat": str(self.sigma),
            "d": self.d,
            "I": list(self.I),
            "g": list(self.g),
            "q_star": None if self.q_star == float("inf") else int(self.q_star),
            "conjecture_bound": str(self.bound),
            "conjecture_holds": self.conjecture_holds,
            "brr": self.brr,
            "brr_hat": self.brr_hat,
            "deg": self.deg,
            "deg_hat": self.deg_hat,
        }


def two_factor_pipeline(g: AGraph, e: EmbeddingSpec | FreeProductSpec, d: int | None = None) -> EmbedReport:
    """sigma_d of the image subgroup; an upper bound for sigma(H1).

    ``e`` may be a plain spec: with two factors in I(g) nothing is embedded.
    """
    from .lp import solve_sli
    from .sli import enumerate_sli

    spec = e.source if isinstance(e, EmbeddingSpec) else e
    if not spec.all_finite():
        raise ValueError("the pipeline needs finite factors")
    h, sub, idx = restrict_to_I(g, spec)
    if d is None:
        d = d_M(g, spec)
    q = q_star(sub)
    if sub.m == 2:
        hat, target, chosen = h, sub, ()
    else:
        chosen_g = None
        if isinstance(e, EmbeddingSpec) and sub is spec:
            chosen_g = e.g
        emb = EmbeddingSpec(sub, chosen_g or ())
        hat, target, chosen = mu2_graph(h, emb), emb.target, emb.g
    res = solve_sli(enumerate_sli(hat, d, target))
    return EmbedReport(
        sigma=res.sigma, d=d, I=idx, g=chosen, q_star=q, bound=q_ratio(q),
        brr=reduced_rank(h), brr_hat=reduced_rank(hat),
        deg=h.max_degree(), deg_hat=hat.max_degree(), graph_hat=hat,
    )
