"""Exact linear algebra over Q, Q(sqrt(d)), GF(p) and Z[t].

Rows are sparse ``dict[int, scalar]`` maps from column index to a nonzero
entry.  Constant systems are reduced with plain Gauss-Jordan elimination;
matrices whose entries are polynomials in one parameter go through
fraction-free (Bareiss) elimination so that pivot determinants expose the
parameter values where the rank drops.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .field import QuadraticNumber
from .poly import MultiPoly, from_univariate, univariate_coeffs

Row = dict


# -- field elimination ------------------------------------------------------

def echelon(rows: Iterable[Row]) -> dict[int, Row]:
    """Row-echelon basis keyed by leading column; each leading entry is 1."""
    pivots: dict[int, Row] = {}
    for r in rows:
        row = {k: v for k, v in r.items() if v != 0}
        while row:
            c = min(row)
            prow = pivots.get(c)
            if prow is None:
                inv = 1 / row[c]
                pivots[c] = {k: v * inv for k, v in row.items()}
                break
            f = row[c]
            for k, v in prow.items():
                nv = row.get(k, 0) - f * v
                if nv == 0:
                    row.pop(k, None)
                else:
                    row[k] = nv
    return pivots


def rref(rows: Iterable[Row]) -> dict[int, Row]:
    """Reduced row-echelon form keyed by pivot column."""
    piv = echelon(rows)
    cols = sorted(piv)
    for c in reversed(cols):
        prow = piv[c]
        for c2 in cols:
            if c2 >= c:
                break
            row = piv[c2]
            f = row.get(c)
            if f is None:
                continue
            for k, v in prow.items():
                nv = row.get(k, 0) - f * v
                if nv == 0:
                    row.pop(k, None)
                else:
                    row[k] = nv
    return piv


def rank(rows: Iterable[Row]) -> int:
    return len(echelon(rows))


def nullspace(rows: Iterable[Row], ncols: int) -> list[Row]:
    """Basis of ``{x : A x = 0}``, one vector per free column (that entry is 1)."""
    piv = rref(rows)
    basis = []
    for j in range(ncols):
        if j in piv:
            continue
        vec = {j: Fraction(1)}
        for c, row in piv.items():
            v = row.get(j)
            if v is not None:
                vec[c] = -v
        basis.append(vec)
    return basis


def in_span(vec: Row, basis_rref: dict[int, Row]) -> bool:
    """Whether ``vec`` reduces to zero against a reduced echelon basis."""
    return not reduce_vector(vec, basis_rref)


def reduce_vector(vec: Row, basis_rref: dict[int, Row]) -> Row:
    row = {k: v for k, v in vec.items() if v != 0}
    for c in sorted(basis_rref):
        f = row.get(c)
        if f is None:
            continue
        for k, v in basis_rref[c].items():
            nv = row.get(k, 0) - f * v
            if nv == 0:
                row.pop(k, None)
            else:
                row[k] = nv
    return row


# -- modular elimination ----------------------------------------------------

def to_mod_p(x, p: int) -> int:
    if isinstance(x, QuadraticNumber):
        raise TypeError("quadratic irrationals have no fixed image mod p")
    x = Fraction(x)
    den = x.denominator % p
    if den == 0:
        raise ZeroDivisionError(f"denominator divisible by {p}")
    return x.numerator * pow(den, -1, p) % p


def echelon_mod_p(rows: Iterable[dict[int, int]], p: int, track: bool = False):
    pivots: dict[int, dict[int, int]] = {}
    chosen: list[int] = []
    for idx, r in enumerate(rows):
        row = {k: v % p for k, v in r.items() if v % p}
        while row:
            c = min(row)
            prow = pivots.get(c)
            if prow is None:
                inv = pow(row[c], -1, p)
                pivots[c] = {k: v * inv % p for k, v in row.items()}
                chosen.append(idx)
                break
            f = row[c]
            for k, v in prow.items():
                nv = (row.get(k, 0) - f * v) % p
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return (pivots, chosen) if track else pivots


def rank_mod_p(rows: Iterable[Row], p: int) -> int:
    """Rank of a rational matrix reduced modulo the prime ``p``."""
    return len(echelon_mod_p(({k: to_mod_p(v, p) for k, v in r.items()} for r in rows), p))


def random_primes(count: int, lower: int = 10**6, seed: int = 0) -> list[int]:
    rng = random.Random(seed)
    out: list[int] = []
    while len(out) < count:
        n = rng.randrange(lower, 4 * lower) | 1
        if _is_prime(n) and n not in out:
            out.append(n)
    return out


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# -- integer polynomial helpers (dense, index = power) ------------------------

def _pmul(a: list[int], b: list[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _psub(a: list[int], b: list[int]) -> list[int]:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    while out and out[-1] == 0:
        out.pop()
    return out


def _pexact_div(a: list[int], b: list[int]) -> list[int]:
    """Exact division in Z[t]; raises if the remainder is nonzero."""
    if not a:
        return []
    a = list(a)
    db = len(b) - 1
    lead = b[-1]
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1 - db, -1, -1):
        c, r = divmod(a[k + db], lead)
        if r:
            raise ArithmeticError("inexact polynomial division in fraction-free step")
        q[k] = c
        if c:
            for i, bc in enumerate(b):
                a[k + i] -= c * bc
    if any(a):
        raise ArithmeticError("inexact polynomial division in fraction-free step")
    while q and q[-1] == 0:
        q.pop()
    return q


def _peval_mod(a: list[int], t: int, p: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = (acc * t + c) % p
    return acc


# -- parametric matrices ------------------------------------------------------

@dataclass(frozen=True)
class PolyMatrix:
    """Dense grid of polynomial entries sharing one variable list."""

    entries: tuple[tuple[MultiPoly, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> PolyMatrix:
        grid = []
        for r in rows:
            grid.append(tuple(e if isinstance(e, MultiPoly) else MultiPoly.const(e) for e in r))
        widths = {len(r) for r in grid}
        if len(widths) > 1:
            raise ValueError("ragged matrix")
        return cls(tuple(grid))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), (len(self.entries[0]) if self.entries else 0)

    def variables(self) -> set[str]:
        out: set[str] = set()
        for r in self.entries:
            for e in r:
                out.update(e.used_vars())
        return out

    def specialize(self, var: str, value) -> list[Row]:
        rows = []
        for r in self.entries:
            row = {}
            for j, e in enumerate(r):
                v = e.subs(var, value).constant_term() if var in e.vars else e.constant_term()
                if v != 0:
                    row[j] = v
            rows.append(row)
        return rows

    def constant_rows(self) -> list[Row]:
        rows = []
        for r in self.entries:
            row = {}
            for j, e in enumerate(r):
                if not e.is_constant():
                    raise ValueError("matrix has non-constant entries")
                v = e.constant_term()
                if v != 0:
                    row[j] = v
            rows.append(row)
        return rows


@dataclass(frozen=True)
class FFRankResult:
    rank: int
    pivot_polys: tuple[MultiPoly, ...]
    pivot_columns: tuple[int, ...]
    kernel: tuple[tuple[MultiPoly, ...], ...]
    param: str | None

    @property
    def drop_poly(self) -> MultiPoly:
        """Last pivot: its roots contain every parameter value where the rank drops."""
        if not self.pivot_polys:
            return MultiPoly.const(1, (self.param,) if self.param else ())
        return self.pivot_polys[-1]


def _int_rows(rows: Sequence[Sequence[MultiPoly]], param: str | None) -> list[list[list[int]]]:
    out = []
    for r in rows:
        coeffs = [univariate_coeffs(e, param) if param else ([e.constant_term()] if e else []) for e in r]
        dens = [Fraction(c).denominator for cl in coeffs for c in cl]
        scale = lcm(*dens) if dens else 1
        out.append([[int(Fraction(c) * scale) for c in cl] for cl in coeffs])
    for r in out:
        for cl in r:
            while cl and cl[-1] == 0:
                cl.pop()
    return out


def _ff_gauss_jordan(M: list[list[list[int]]]):
    """Fraction-free Gauss-Jordan over Z[t] (in place).

    Pivot rows end with the current determinant on the diagonal and zeros in
    the other pivot columns; all divisions are exact.
    """
    nrows = len(M)
    ncols = len(M[0]) if M else 0
    prev = [1]
    pivots: list[list[int]] = []
    pcols: list[int] = []
    r = 0
    for col in range(ncols):
        if r == nrows:
            break
        best = None
        for i in range(r, nrows):
            e = M[i][col]
            if e and (best is None or len(e) < len(M[best][col])):
                best = i
                if len(e) == 1:
                    break
        if best is None:
            continue
        M[r], M[best] = M[best], M[r]
        piv = M[r][col]
        prow = M[r]
        for i in range(nrows):
            if i == r:
                continue
            row = M[i]
            f = row[col]
            for j in range(ncols):
                if j == col:
                    continue
                a = _pmul(piv, row[j]) if row[j] else []
                if f and prow[j]:
                    a = _psub(a, _pmul(f, prow[j]))
                row[j] = _pexact_div(a, prev) if a else []
            row[col] = []
        pivots.append(piv)
        pcols.append(col)
        prev = piv
        r += 1
    # rows before r that were pivots keep det_k on earlier diagonals; rescale them
    det = prev
    for k in range(r):
        c = pcols[k]
        if M[k][c] != det:
            f = M[k][c]
            # multiply row by det / f (exact): earlier pivots divide later ones here
            for j in range(ncols):
                if M[k][j]:
                    M[k][j] = _pexact_div(_pmul(M[k][j], det), f)
    return r, pivots, pcols


def ff_rank(M: PolyMatrix, param: str | None = None, seed: int = 0) -> FFRankResult:
    """Generic rank over Q(param) by fraction-free elimination.

    The rows are first thinned to a subset independent at a random point
    modulo a large prime; the fraction-free kernel of that subset is then
    checked against every original row, which certifies the generic rank.
    The returned pivot polynomials are the successive leading minors of the
    chosen pivot block; the last one vanishes wherever the rank drops.
    """
    vars_used = M.variables()
    if param is None:
        if len(vars_used) > 1:
            raise ValueError(f"more than one parameter variable: {sorted(vars_used)}")
        param = next(iter(vars_used)) if vars_used else None
    elif vars_used - {param}:
        raise ValueError(f"more than one parameter variable: {sorted(vars_used)}")
    nrows, ncols = M.shape
    if nrows == 0 or ncols == 0:
        return FFRankResult(0, (), (), (), param)
    full = _int_rows(M.entries, param)
    rng = random.Random(seed)
    for attempt in range(3):
        p = random_primes(1, lower=2**40, seed=rng.randrange(1 << 30))[0]
        t0 = rng.randrange(1, p)
        modrows = [{j: _peval_mod(e, t0, p) for j, e in enumerate(r) if e} for r in full]
        _, chosen = echelon_mod_p(modrows, p, track=True)
        sub = [[list(e) for e in full[i]] for i in chosen]
        if not sub:
            return FFRankResult(0, (), (), (), param)
        r, pivots, pcols = _ff_gauss_jordan(sub)
        kernel = _ff_kernel(sub, r, pcols, ncols)
        if _annihilates(full, kernel):
            break
    else:
        sub = [[list(e) for e in row] for row in full]
        r, pivots, pcols = _ff_gauss_jordan(sub)
        kernel = _ff_kernel(sub, r, pcols, ncols)
    to_poly = (lambda c: from_univariate(c, param)) if param else (lambda c: MultiPoly.const(c[0] if c else 0))
    return FFRankResult(
        rank=r,
        pivot_polys=tuple(to_poly(pv) for pv in pivots),
        pivot_columns=tuple(pcols),
        kernel=tuple(tuple(to_poly(c) for c in vec) for vec in kernel),
        param=param,
    )


def _ff_kernel(R, r, pcols, ncols):
    det = R[r - 1][pcols[r - 1]] if r else [1]
    out = []
    pset = set(pcols)
    for j in range(ncols):
        if j in pset:
            continue
        vec = [[] for _ in range(ncols)]
        vec[j] = list(det)
        for k, c in enumerate(pcols):
            e = R[k][j]
            if e:
                vec[c] = [-x for x in e]
        out.append(vec)
    return out


def _annihilates(rows, kernel) -> bool:
    for vec in kernel:
        for row in rows:
            acc: list[int] = []
            for e, x in zip(row, vec):
                if e and x:
                    prod = _pmul(e, x)
                    acc = _psub(acc, [-c for c in prod]) if acc else prod
            while acc and acc[-1] == 0:
                acc.pop()
            if acc:
                return False
    return True
