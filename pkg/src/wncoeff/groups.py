"""Finite group tables, free products over them, and reduced words.

Elements of a finite factor are integer indices with the identity at 0.
A word is a tuple of ``(factor, element)`` letters, factors numbered from 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Hashable, Iterator, Sequence

Letter = tuple[int, Hashable]
Word = tuple[Letter, ...]


class NotAGroup(ValueError):
    """Raised when a multiplication table fails a group axiom.

    ``axiom`` names the failed axiom and ``witness`` is the offending tuple.
    """

    def __init__(self, axiom: str, witness: tuple):
        super().__init__(f"not a group: {axiom} fails at {witness}")
        self.axiom = axiom
        self.witness = witness


@dataclass(frozen=True)
class GroupTable:
    """A finite group given by its Cayley table, identity at index 0."""

    order: int
    mul_table: tuple[tuple[int, ...], ...]
    inv_table: tuple[int, ...]
    name: str = ""

    identity = 0

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def inv(self, a: int) -> int:
        return self.inv_table[a]

    def elements(self) -> Iterator[int]:
        return iter(range(self.order))

    def is_finite(self) -> bool:
        return True

    def q_star(self) -> float:
        return _q_star_of_order(self.order)

    def element_key(self, a: int):
        return a

    def to_json(self) -> dict:
        return {"order": self.order, "mul": [list(r) for r in self.mul_table]}

    def __repr__(self) -> str:
        return self.name or f"GroupTable(order={self.order})"


def validate_group(table: Sequence[Sequence[int]], name: str = "") -> GroupTable:
    """Check the group axioms on a raw table and build a :class:`GroupTable`.

    The identity must sit at index 0.  Associativity is checked by
    exhaustion, so this is cubic in the order.

    >>> validate_group([[0, 1, 2], [1, 2, 0], [2, 0, 1]]).inv(1)
    2
    """
    n = len(table)
    if n == 0:
        raise NotAGroup("nonempty", ())
    rows = []
    for i, row in enumerate(table):
        if len(row) != n:
            raise NotAGroup("square", (i,))
        for j, x in enumerate(row):
            if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < n:
                raise NotAGroup("closure", (i, j, x))
        rows.append(tuple(row))
    for a in range(n):
        if rows[0][a] != a or rows[a][0] != a:
            raise NotAGroup("identity", (0, a))
    inv = []
    for a in range(n):
        right = [b for b in range(n) if rows[a][b] == 0]
        if not right or rows[right[0]][a] != 0:
            raise NotAGroup("inverses", (a,))
        inv.append(right[0])
    for a, b, c in itertools.product(range(n), repeat=3):
        if rows[rows[a][b]][c] != rows[a][rows[b][c]]:
            raise NotAGroup("associativity", (a, b, c))
    return GroupTable(n, tuple(rows), tuple(inv), name)


def cyclic_group(n: int) -> GroupTable:
    """Z/n with element ``i`` standing for the generator to the power ``i``."""
    return validate_group([[(i + j) % n for j in range(n)] for i in range(n)], f"C{n}")


def klein_group() -> GroupTable:
    return validate_group([[i ^ j for j in range(4)] for i in range(4)], "V4")


def _smallest_odd_prime_factor(n: int) -> int | None:
    while n % 2 == 0:
        n //= 2
    p = 3
    while p * p <= n:
        if n % p == 0:
            return p
        p += 2
    return n if n > 1 else None


def _q_star_of_order(n: int) -> float:
    # Cauchy gives a subgroup of order p for each odd prime p | n, Sylow
    # gives one of order 4 when 4 | n; any subgroup of order > 2 has order
    # divisible by an odd prime or by 4.
    cands = []
    p = _smallest_odd_prime_factor(n)
    if p is not None:
        cands.append(p)
    if n % 4 == 0:
        cands.append(4)
    return min(cands) if cands else math.inf


class FreeProductGroup:
    """Free product of finite groups used as a word-oracle group.

    Elements are reduced words (tuples of letters); multiplication is
    concatenation followed by normalization.  This is how the second
    factor of the two-factor target of the embedding is represented.
    """

    def __init__(self, factors: Sequence[GroupTable], name: str = ""):
        if not factors:
            raise ValueError("free product needs at least one factor")
        self.factors = tuple(factors)
        self.name = name or "*".join(repr(f) for f in self.factors)
        self.identity: Word = ()

    def mul(self, a: Word, b: Word) -> Word:
        return _normalize(a + b, self.factors)

    def inv(self, a: Word) -> Word:
        return tuple((f, self.factors[f - 1].inv(x)) for f, x in reversed(a))

    def is_finite(self) -> bool:
        return len(self.factors) == 1

    def q_star(self) -> float:
        # finite subgroups of a free product are conjugate into a factor
        return min(f.q_star() for f in self.factors)

    def element_key(self, a: Word):
        return (len(a), a)

    def elements(self) -> Iterator[Word]:
        """All elements in word-length-then-lexicographic order (infinite)."""
        yield ()
        level: list[Word] = [()]
        while level:
            nxt = []
            for w in level:
                last = w[-1][0] if w else None
                for f, g in enumerate(self.factors, start=1):
                    if f == last:
                        continue
                    for x in range(1, g.order):
                        nxt.append(w + ((f, x),))
            nxt.sort()
            yield from nxt
            level = nxt

    def __repr__(self) -> str:
        return f"FreeProductGroup({self.name})"


class OracleGroup:
    """Wraps a finite table behind the word-oracle interface.

    The order is hidden: :meth:`is_finite` answers False so callers take
    the generic enumeration path.  Used to cross-check that path.
    """

    def __init__(self, table: GroupTable):
        self.table = table
        self.identity = 0

    def mul(self, a: int, b: int) -> int:
        return self.table.mul(a, b)

    def inv(self, a: int) -> int:
        return self.table.inv(a)

    def is_finite(self) -> bool:
        return False

    def q_star(self) -> float:
        return self.table.q_star()

    def element_key(self, a: int):
        return a

    def elements(self) -> Iterator[int]:
        return iter(range(self.table.order))

    def __repr__(self) -> str:
        return f"OracleGroup({self.table!r})"


def _normalize(letters: Sequence[Letter], factors: Sequence) -> Word:
    out: list[Letter] = []
    for f, x in letters:
        if not 1 <= f <= len(factors):
            raise ValueError(f"factor index {f} out of range")
        g = factors[f - 1]
        if x == g.identity:
            continue
        if out and out[-1][0] == f:
            y = g.mul(out[-1][1], x)
            out.pop()
            if y != g.identity:
                out.append((f, y))
        else:
            out.append((f, x))
    return tuple(out)


@dataclass(frozen=True)
class FreeProductSpec:
    """The ambient free product: an ordered tuple of factor groups.

    Factors are usually :class:`GroupTable`; any object with ``identity``,
    ``mul``, ``inv`` and ``elements`` works (word-oracle factors).
    """

    factors: tuple = field()

    def __post_init__(self):
        if len(self.factors) < 2:
            raise ValueError("a free product needs at least two factors")
        for g in self.factors:
            if isinstance(g, GroupTable) and g.order < 2:
                raise ValueError("factors must be nontrivial")

    @property
    def m(self) -> int:
        return len(self.factors)

    def factor(self, alpha: int):
        return self.factors[alpha - 1]

    def all_finite(self) -> bool:
        return all(isinstance(g, GroupTable) for g in self.factors)

    def d_m(self) -> int:
        """Largest factor order; only meaningful when every factor is finite."""
        return max(g.order for g in self.factors)

    def to_json(self) -> dict:
        return {"factors": [g.to_json() for g in self.factors]}

    @classmethod
    def from_json(cls, data: dict) -> "FreeProductSpec":
        facs = []
        for f in data["factors"]:
            if "cyclic" in f:
                facs.append(cyclic_group(int(f["cyclic"])))
            else:
                facs.append(validate_group(f["mul"]))
                if "order" in f and f["order"] != facs[-1].order:
                    raise NotAGroup("order", (f["order"],))
        return cls(tuple(facs))


def free_product(*orders: int) -> FreeProductSpec:
    """Shorthand: ``free_product(3, 3)`` is C3 * C3."""
    return FreeProductSpec(tuple(cyclic_group(n) for n in orders))


def normalize_word(w: Sequence[Letter], spec: FreeProductSpec) -> Word:
    """Reduced normal form; the empty tuple is the identity.

    >>> normalize_word([(1, 1), (1, 1)], free_product(3, 3))
    ((1, 2),)
    """
    return _normalize([(int(f), x) for f, x in w], spec.factors)


def word_inverse(w: Word, spec: FreeProductSpec) -> Word:
    return tuple((f, spec.factor(f).inv(x)) for f, x in reversed(w))


def word_mul(u: Word, v: Word, spec: FreeProductSpec) -> Word:
    return normalize_word(tuple(u) + tuple(v), spec)


def is_reduced(w: Sequence[Letter], spec: FreeProductSpec) -> bool:
    return tuple(w) == normalize_word(w, spec)


def is_cyclically_reduced(w: Word) -> bool:
    return len(w) <= 1 or w[0][0] != w[-1][0]


def q_star(spec: FreeProductSpec) -> float:
    """Least order > 2 of a finite subgroup of a factor, ``math.inf`` if none.

    >>> q_star(free_product(2, 4))
    4
    """
    return min(g.q_star() for g in spec.factors)


def q_ratio(q: float):
    """q*/(q*-2) as an exact Fraction, with the value 1 when q* is infinite."""
    from fractions import Fraction

    if q == math.inf:
        return Fraction(1)
    return Fraction(int(q), int(q) - 2)
