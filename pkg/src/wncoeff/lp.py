"""Exact rational linear programming.

Two problem shapes are supported:

* ``max_leq``: maximize ``c x`` subject to ``A x <= b`` with ``x`` free;
* ``min_eq``: minimize ``c y`` subject to ``A y = b``, ``y >= 0``.

``max_leq`` problems are solved through their dual, which is a ``min_eq``
problem; the primal point is read off the simplex multipliers.  All
arithmetic is in :class:`fractions.Fraction`; the pricing step scales the
multipliers to integers so that scanning many integer columns stays cheap.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import sparse

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"


class SolverError(RuntimeError):
    """A returned point failed its own exact re-check (always a bug)."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class LpProblem:
    """Sparse LP; ``rows[i]`` maps column index to coefficient."""

    sense: str
    c: tuple
    rows: tuple
    b: tuple
    var_names: tuple = ()
    row_names: tuple = ()

    def __post_init__(self):
        if self.sense not in ("max_leq", "min_eq"):
            raise ValueError(f"unknown sense {self.sense!r}")
        if len(self.rows) != len(self.b):
            raise ValueError("rows and rhs differ in length")
        n = len(self.c)
        for r in self.rows:
            for j in r:
                if not 0 <= j < n:
                    raise ValueError(f"column {j} out of range")

    @property
    def n_vars(self) -> int:
        return len(self.c)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def names(self) -> list[str]:
        return list(self.var_names) or [f"v{j}" for j in range(self.n_vars)]

    def rnames(self) -> list[str]:
        return list(self.row_names) or [f"r{i}" for i in range(self.n_rows)]


@dataclass(frozen=True)
class BasicSolution:
    """Result of :func:`simplex_solve`.

    For ``max_leq`` the point is ``x``, ``dual`` is the optimal ``y`` and
    ``basis`` lists the constraint rows in the dual basis.  For ``min_eq``
    the point is ``y``, ``basis`` its basic columns and ``dual`` the
    multipliers.  ``certificate`` is a Farkas vector or an improving ray.
    """

    status: str
    value: Fraction | None = None
    point: tuple = ()
    basis: tuple = ()
    dual: tuple = ()
    certificate: tuple = ()
    pivots: int = 0

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "value": None if self.value is None else str(self.value),
            "point": [str(v) for v in self.point],
            "basis": list(self.basis),
            "dual": [str(v) for v in self.dual],
            "certificate": [str(v) for v in self.certificate],
        }


# ---------------------------------------------------------------------------
# the standard-form engine

class _Tableau:
    """Revised simplex state for min c y, A y = b, y >= 0 (rows flipped so b >= 0)."""

    STALL = 25
    FLOAT_PRICING_MIN = 2000

    def __init__(self, cols: list[dict], b: Sequence, m: int, rule: str = "dantzig"):
        self.rule = rule
        self.m = m
        self.n = len(cols)
        self.flip = [1 if _frac(v) >= 0 else -1 for v in b]
        self.cols = [{i: self.flip[i] * _frac(a) for i, a in col.items() if a != 0} for col in cols]
        self.int_cols = all(a.denominator == 1 for col in self.cols for a in col.values())
        if self.int_cols:
            self.cols = [{i: int(a) for i, a in col.items()} for col in self.cols]
        # artificials are columns n .. n+m-1
        self.basis = [self.n + r for r in range(m)]
        self.binv = [[Fraction(int(r == i)) for i in range(m)] for r in range(m)]
        self.xb = [abs(_frac(v)) for v in b]
        self.pivots = 0
        self.fmat = None
        if self.n >= self.FLOAT_PRICING_MIN:
            r, c, v = [], [], []
            for j, col in enumerate(self.cols):
                for i, a in col.items():
                    r.append(i)
                    c.append(j)
                    v.append(float(a))
            self.fmat = sparse.csc_matrix((v, (r, c)), shape=(m, self.n))

    def column(self, j: int) -> dict:
        if j >= self.n:
            return {j - self.n: 1}
        return self.cols[j]

    def multipliers(self, cost) -> list[Fraction]:
        cb = [cost(j) for j in self.basis]
        m = self.m
        pi = [Fraction(0)] * m
        for r in range(m):
            c = cb[r]
            if c:
                row = self.binv[r]
                for i in range(m):
                    if row[i]:
                        pi[i] += c * row[i]
        return pi

    def entering(self, cost, pi, allowed, bland: bool = True) -> int | None:
        """Column with negative reduced cost: least index (Bland) or most
        negative after scaling the multipliers to integers (Dantzig).

        Large problems first screen candidates in floating point; a pick is
        kept only if its exact reduced cost is negative, and an empty screen
        is confirmed by the exact scan, so the answer never depends on
        rounding.
        """
        lcm = 1
        for v in pi:
            lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
        P = [int(v * lcm) for v in pi]
        basic = set(self.basis)

        def exact_rc(j):
            dot = 0
            for i, a in self.column(j).items():
                dot += P[i] * a
            return cost(j) * lcm - dot

        if self.fmat is not None and isinstance(allowed, range):
            hit = self._float_pick(cost, pi, allowed, basic, bland, exact_rc)
            if hit is not None:
                return hit
        best, best_j = 0, None
        for j in allowed:
            if j in basic:
                continue
            rc = exact_rc(j)
            if rc < 0:
                if bland:
                    return j
                if rc < best:
                    best, best_j = rc, j
        return best_j

    def _float_pick(self, cost, pi, allowed, basic, bland, exact_rc):
        n = self.n
        cvec = getattr(self, "_cvec", None)
        if cvec is None or self._cost_id is not cost:
            self._cvec = cvec = np.array([float(cost(j)) for j in range(n)])
            self._cost_id = cost
        rc = cvec - self.fmat.T @ np.array([float(v) for v in pi])
        if allowed.stop > n:
            # artificial columns are unit vectors
            extra = np.array([float(cost(n + i)) - float(pi[i]) for i in range(self.m)])
            rc = np.concatenate([rc, extra])[: allowed.stop]
        else:
            rc = rc[: allowed.stop]
        for j in basic:
            if j < len(rc):
                rc[j] = np.inf
        cand = np.nonzero(rc < -1e-9)[0]
        if bland:
            order = cand
        else:
            order = cand[np.argsort(rc[cand], kind="stable")]
        for j in order[:50]:
            if exact_rc(int(j)) < 0:
                return int(j)
        return None

    def direction(self, j: int) -> list[Fraction]:
        col = self.column(j)
        u = []
        for r in range(self.m):
            row = self.binv[r]
            s = Fraction(0)
            for i, a in col.items():
                if row[i]:
                    s += row[i] * a
            u.append(s)
        return u

    def leaving(self, u) -> int | None:
        best = None
        for r in range(self.m):
            if u[r] > 0:
                ratio = self.xb[r] / u[r]
                key = (ratio, self.basis[r])
                if best is None or key < best[0]:
                    best = (key, r)
        return None if best is None else best[1]

    def pivot(self, r: int, j: int, u):
        m = self.m
        ur = u[r]
        prow = [v / ur for v in self.binv[r]]
        xr = self.xb[r] / ur
        for i in range(m):
            if i == r or not u[i]:
                continue
            f = u[i]
            row = self.binv[i]
            for k in range(m):
                if prow[k]:
                    row[k] -= f * prow[k]
            self.xb[i] -= f * xr
        self.binv[r] = prow
        self.xb[r] = xr
        self.basis[r] = j
        self.pivots += 1

    def run(self, cost, allowed):
        """Iterate to optimality; returns None, or ('unbounded', j, u).

        Dantzig pricing while the objective moves; after ``STALL`` degenerate
        pivots in a row, Bland's rule until the next strict improvement.
        Bland cannot cycle inside a degenerate stretch and every Dantzig
        step outside one strictly improves, so the loop terminates.
        """
        stall = 0
        while True:
            pi = self.multipliers(cost)
            bland = self.rule == "bland" or stall >= self.STALL
            j = self.entering(cost, pi, allowed, bland)
            if j is None:
                return None
            u = self.direction(j)
            r = self.leaving(u)
            if r is None:
                return ("unbounded", j, u)
            stall = stall + 1 if self.xb[r] == 0 else 0
            self.pivot(r, j, u)

    def values(self) -> list[Fraction]:
        y = [Fraction(0)] * (self.n + self.m)
        for r, j in enumerate(self.basis):
            y[j] = self.xb[r]
        return y


def _solve_min_eq(cols: list[dict], b: Sequence, c: Sequence, rule: str = "dantzig") -> dict:
    """Two-phase simplex; returns a dict with status and raw data."""
    m = len(b)
    n = len(cols)
    tab = _Tableau(cols, b, m, rule)
    allowed1 = range(n + m)
    phase1 = lambda j: 1 if j >= n else 0  # noqa: E731
    tab.run(phase1, allowed1)
    y = tab.values()
    infeas = sum(y[n:], Fraction(0))
    if infeas > 0:
        pi = tab.multipliers(phase1)
        # pi A_j <= 0 and pi b > 0 for the flipped system; unflip
        far = [tab.flip[i] * pi[i] for i in range(m)]
        return {"status": INFEASIBLE, "certificate": far, "pivots": tab.pivots}
    # drive zero-level artificials out of the basis where possible
    for r in range(m):
        if tab.basis[r] >= n:
            row = tab.binv[r]
            for j in range(n):
                if j in tab.basis:
                    continue
                val = sum((row[i] * a for i, a in tab.column(j).items()), Fraction(0))
                if val:
                    tab.pivot(r, j, tab.direction(j))
                    break
    cost = lambda j: _frac(c[j]) if j < n else Fraction(0)  # noqa: E731
    res = tab.run(cost, range(n))
    if res is not None:
        _, j, u = res
        ray = [Fraction(0)] * n
        ray[j] = Fraction(1)
        for r, bj in enumerate(tab.basis):
            if bj < n:
                ray[bj] = -u[r]
        return {"status": UNBOUNDED, "certificate": ray, "pivots": tab.pivots}
    y = tab.values()[:n]
    pi = tab.multipliers(cost)
    mult = [tab.flip[i] * pi[i] for i in range(m)]
    basis = sorted(j for j in tab.basis if j < n)
    value = sum((_frac(c[j]) * y[j] for j in range(n) if y[j]), Fraction(0))
    return {"status": OPTIMAL, "y": y, "pi": mult, "basis": basis, "value": value,
            "pivots": tab.pivots}


def _columns_of(rows: Sequence[dict], n: int) -> list[dict]:
    cols = [dict() for _ in range(n)]
    for i, r in enumerate(rows):
        for j, a in r.items():
            if a != 0:
                cols[j][i] = a
    return cols


# ---------------------------------------------------------------------------
# public solver

def simplex_solve(p: LpProblem, check: bool = True, rule: str = "dantzig") -> BasicSolution:
    """Exact optimum with a vertex certificate, or an infeasibility/unboundedness proof.

    ``rule`` is ``"dantzig"`` (with the Bland fallback on stalls) or ``"bland"``.
    """
    if rule not in ("dantzig", "bland"):
        raise ValueError(f"unknown pivot rule {rule!r}")
    if p.sense == "min_eq":
        out = _solve_min_eq(_columns_of(p.rows, p.n_vars), p.b, p.c, rule)
        sol = _wrap_min(out)
    else:
        sol = _solve_max_leq(p, rule)
    if check:
        verify_solution(p, sol)
    return sol


def _wrap_min(out: dict) -> BasicSolution:
    if out["status"] != OPTIMAL:
        return BasicSolution(out["status"], certificate=tuple(out["certificate"]), pivots=out["pivots"])
    return BasicSolution(OPTIMAL, out["value"], tuple(out["y"]), tuple(out["basis"]),
                         tuple(out["pi"]), pivots=out["pivots"])


def _solve_max_leq(p: LpProblem, rule: str) -> BasicSolution:
    # dual: min b y s.t. A^T y = c, y >= 0; its columns are the rows of A
    cols = [dict(r) for r in p.rows]
    out = _solve_min_eq(cols, p.c, p.b, rule)
    if out["status"] == OPTIMAL:
        x = tuple(out["pi"])
        value = sum((_frac(ci) * xi for ci, xi in zip(p.c, x)), Fraction(0))
        return BasicSolution(OPTIMAL, value, x, tuple(out["basis"]), tuple(out["y"]),
                             pivots=out["pivots"])
    if out["status"] == UNBOUNDED:
        # a dual ray y >= 0 with A^T y = 0, b y < 0 proves the primal empty
        return BasicSolution(INFEASIBLE, certificate=tuple(out["certificate"]), pivots=out["pivots"])
    # the dual is empty: the primal is unbounded unless it is empty too
    ray = tuple(out["certificate"])
    feas = _primal_feasible_point(p)
    if feas is None:
        return BasicSolution(INFEASIBLE, certificate=(), pivots=out["pivots"])
    return BasicSolution(UNBOUNDED, None, feas, (), (), ray, out["pivots"])


def _primal_feasible_point(p: LpProblem):
    """Some x with A x <= b via phase one on x = x+ - x-, slack s."""
    n, m = p.n_vars, p.n_rows
    cols = []
    for j in range(n):
        cols.append({i: r[j] for i, r in enumerate(p.rows) if r.get(j)})
    for j in range(n):
        cols.append({i: -r[j] for i, r in enumerate(p.rows) if r.get(j)})
    for i in range(m):
        cols.append({i: 1})
    out = _solve_min_eq(cols, p.b, [0] * len(cols))
    if out["status"] != OPTIMAL:
        return None
    z = out["y"]
    return tuple(z[j] - z[n + j] for j in range(n))


def _check_certificate(p: LpProblem, sol: BasicSolution) -> None:
    cert = sol.certificate
    if not cert:
        return
    cols = _columns_of(p.rows, p.n_vars)
    if p.sense == "min_eq" and sol.status == INFEASIBLE:
        # pi A <= 0, pi b > 0
        ok = all(sum((cert[i] * a for i, a in col.items()), Fraction(0)) <= 0 for col in cols)
        ok = ok and sum((cert[i] * _frac(b) for i, b in enumerate(p.b)), Fraction(0)) > 0
    elif p.sense == "min_eq" and sol.status == UNBOUNDED:
        # r >= 0, A r = 0, c r < 0
        ok = all(v >= 0 for v in cert)
        ok = ok and all(sum((_frac(a) * cert[j] for j, a in r.items()), Fraction(0)) == 0 for r in p.rows)
        ok = ok and sum((_frac(c) * v for c, v in zip(p.c, cert)), Fraction(0)) < 0
    elif p.sense == "max_leq" and sol.status == INFEASIBLE:
        # y >= 0, A^T y = 0, b y < 0
        ok = all(v >= 0 for v in cert)
        ok = ok and all(sum((cert[i] * _frac(a) for i, a in col.items()), Fraction(0)) == 0 for col in cols)
        ok = ok and sum((_frac(b) * v for b, v in zip(p.b, cert)), Fraction(0)) < 0
    else:
        # improving ray: A r <= 0, c r > 0
        ok = all(sum((_frac(a) * cert[j] for j, a in r.items()), Fraction(0)) <= 0 for r in p.rows)
        ok = ok and sum((_frac(c) * v for c, v in zip(p.c, cert)), Fraction(0)) > 0
    if not ok:
        raise SolverError(f"{sol.status} certificate fails its check")


def verify_solution(p: LpProblem, sol: BasicSolution) -> None:
    """Exact re-check of an optimal point and its dual, or of a certificate."""
    if sol.status != OPTIMAL:
        _check_certificate(p, sol)
        return
    if p.sense == "max_leq":
        x, y = sol.point, sol.dual
    else:
        y, x = sol.point, sol.dual
    rows = p.rows
    if p.sense == "max_leq":
        for i, r in enumerate(rows):
            lhs = sum((_frac(a) * x[j] for j, a in r.items()), Fraction(0))
            if lhs > _frac(p.b[i]):
                raise SolverError(f"row {i} violated by the primal point")
        if any(v < 0 for v in y):
            raise SolverError("negative dual entry")
        aty = [Fraction(0)] * p.n_vars
        for i, r in enumerate(rows):
            if y[i]:
                for j, a in r.items():
                    aty[j] += y[i] * a
        if aty != [_frac(v) for v in p.c]:
            raise SolverError("dual equality constraints fail")
        dual_val = sum((_frac(p.b[i]) * y[i] for i in range(len(rows))), Fraction(0))
        if dual_val != sol.value:
            raise SolverError("primal and dual values differ")
    else:
        if any(v < 0 for v in y):
            raise SolverError("negative entry in y")
        for i, r in enumerate(rows):
            if sum((_frac(a) * y[j] for j, a in r.items()), Fraction(0)) != _frac(p.b[i]):
                raise SolverError(f"row {i} equality fails")
        cols = _columns_of(rows, p.n_vars)
        for j, col in enumerate(cols):
            if sum((x[i] * a for i, a in col.items()), Fraction(0)) > _frac(p.c[j]):
                raise SolverError(f"reduced cost of column {j} negative")
        if sum((_frac(b) * v for b, v in zip(p.b, x)), Fraction(0)) != sol.value:
            raise SolverError("primal and dual values differ")


# ---------------------------------------------------------------------------
# the WN-coefficient problems

def sli_problem(sys) -> LpProblem:
    """max -x_s subject to the system; variables are the appearing subsets then x_s."""
    names = sys.variables()
    idx = {v: j for j, v in enumerate(names)}
    rows, b, rnames = [], [], []
    for k, q in enumerate(sys.inequalities):
        rows.append({idx[v]: Fraction(a) for v, a in q.lhs().items() if a})
        b.append(Fraction(q.rhs))
        rnames.append(f"q{k}")
    c = [Fraction(0)] * len(names)
    c[idx["xs"]] = Fraction(-1)
    vnames = tuple("xs" if v == "xs" else f"xA_{v:x}" for v in names)
    return LpProblem("max_leq", tuple(c), tuple(rows), tuple(b), vnames, tuple(rnames))


def _pruned(sys):
    """Indices kept after dropping inequalities with a weaker twin.

    Two inequalities with the same type and subsets have equal left sides;
    only the larger N (smaller right side) can bind.
    """
    best = {}
    for k, q in enumerate(sys.inequalities):
        key = (q.alpha, q.subsets)
        if key not in best or q.rhs < sys.inequalities[best[key]].rhs:
            best[key] = k
    return sorted(best.values())


@dataclass(frozen=True)
class SigmaResult:
    sigma: Fraction
    primal: BasicSolution
    dual_y: tuple                 # over all inequalities of the system
    dual_value: Fraction
    primal_value: Fraction
    brr: int
    kept: tuple = field(default=())


def solve_sli(sys, prune: bool = True, rule: str = "dantzig") -> SigmaResult:
    """Solve max -x_s over the system and return both certificates."""
    from .agraph import reduced_rank

    keep = _pruned(sys) if prune else list(range(len(sys.inequalities)))
    sub = type(sys)(sys.y1, sys.d, tuple(sys.inequalities[k] for k in keep))
    p = sli_problem(sub)
    sol = simplex_solve(p, rule=rule)
    if sol.status != OPTIMAL:
        raise SolverError(f"LP status {sol.status}; the optimum must be finite")
    y = [Fraction(0)] * len(sys.inequalities)
    for pos, k in enumerate(keep):
        y[k] = sol.dual[pos]
    dual_value = sum((Fraction(q.rhs) * y[k] for k, q in enumerate(sys.inequalities)), Fraction(0))
    brr = reduced_rank(sys.y1)
    basis = tuple(keep[i] for i in sol.basis)
    sol = BasicSolution(sol.status, sol.value, sol.point, basis, tuple(y), pivots=sol.pivots)
    return SigmaResult(-sol.value / brr, sol, tuple(y), dual_value, sol.value, brr, tuple(keep))


def primal_sigma(sys) -> Fraction:
    """sigma_d(Y1) = -max{-x_s} / brr(Y1)."""
    return solve_sli(sys).sigma


def dual_vertex_solution(sys) -> BasicSolution:
    """Vertex-optimal y over the inequalities, objective sum y_j rhs_j."""
    res = solve_sli(sys)
    y = res.dual_y
    r = len(sys.variables())
    bound = (2 * sys.d) ** r
    for v in y:
        if v.denominator >= bound:
            raise SolverError("vertex denominator exceeds the subdeterminant bound")
    return BasicSolution(OPTIMAL, res.dual_value, y, res.primal.basis, res.primal.point,
                         pivots=res.primal.pivots)


def primal_point(res: SigmaResult, sys) -> tuple[dict, Fraction]:
    """The primal optimum as ({bitset: value}, x_s)."""
    names = sys.variables() if not res.kept else type(sys)(
        sys.y1, sys.d, tuple(sys.inequalities[k] for k in res.kept)).variables()
    x = dict(zip(names, res.primal.point))
    xs = x.pop("xs")
    return x, xs


# ---------------------------------------------------------------------------
# text format

def _fmt(v) -> str:
    v = _frac(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _terms(coefs: dict, names: list[str]) -> str:
    parts = []
    for j in sorted(coefs):
        a = _frac(coefs[j])
        if a == 0:
            continue
        sign = "-" if a < 0 else "+"
        parts.append(f"{sign} {_fmt(abs(a))} {names[j]}")
    return " ".join(parts) if parts else "0"


def to_lp_text(p: LpProblem, comment: str = "") -> str:
    """Human-readable dump, one constraint per line; parsed by :func:`from_lp_text`."""
    names = p.names()
    out = []
    for line in comment.splitlines():
        out.append(f"\\ {line}")
    out.append("maximize" if p.sense == "max_leq" else "minimize")
    out.append(" obj: " + _terms({j: v for j, v in enumerate(p.c)}, names))
    out.append("subject to")
    op = "<=" if p.sense == "max_leq" else "="
    for name, r, b in zip(p.rnames(), p.rows, p.b):
        out.append(f" {name}: {_terms(r, names)} {op} {_fmt(b)}")
    if p.sense == "min_eq":
        out.append("bounds")
        out.append(" all >= 0")
    else:
        out.append("bounds")
        out.append(" all free")
    out.append("variables")
    out.append(" " + " ".join(names))
    out.append("end")
    return "\n".join(out) + "\n"


_TERM = re.compile(r"([+-])\s*(\d+(?:/\d+)?)\s+(\S+)")


def from_lp_text(text: str) -> LpProblem:
    lines = [l.strip() for l in text.splitlines()]
    lines = [l for l in lines if l and not l.startswith("\\")]
    sense = {"maximize": "max_leq", "minimize": "min_eq"}[lines[0]]
    names = None
    i = lines.index("variables")
    names = lines[i + 1].split()
    idx = {n: j for j, n in enumerate(names)}

    def parse(expr: str) -> dict:
        out = {}
        if expr.strip() == "0":
            return out
        pos = 0
        for m in _TERM.finditer(expr):
            if expr[pos:m.start()].strip():
                raise ValueError(f"cannot parse {expr!r}")
            pos = m.end()
            v = Fraction(m.group(2)) * (-1 if m.group(1) == "-" else 1)
            out[idx[m.group(3)]] = out.get(idx[m.group(3)], 0) + v
        if expr[pos:].strip():
            raise ValueError(f"cannot parse {expr!r}")
        return out

    obj = lines[1].split(":", 1)[1]
    cd = parse(obj)
    c = tuple(cd.get(j, Fraction(0)) for j in range(len(names)))
    rows, b, rnames = [], [], []
    k = lines.index("subject to") + 1
    op = "<=" if sense == "max_leq" else "="
    while lines[k] != "bounds":
        name, rest = lines[k].split(":", 1)
        lhs, rhs = rest.rsplit(f" {op} ", 1)
        rows.append(parse(lhs))
        b.append(Fraction(rhs.strip()))
        rnames.append(name.strip())
        k += 1
    return LpProblem(sense, c, tuple(rows), tuple(b), tuple(names), tuple(rnames))


def solution_to_json(sol: BasicSolution) -> str:
    return json.dumps(sol.to_json(), indent=2, sort_keys=True)
