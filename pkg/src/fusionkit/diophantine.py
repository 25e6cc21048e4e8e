"""Homogeneous linear Diophantine systems.

An :class:`InequalitySystem` is a list of integer rows ``c`` read as
``c . x >= 0`` over named variables.  Hilbert bases come from a row-by-row
completion (default) or the Contejean-Devie procedure; :func:`farkas_dual` goes the other way,
from a generator matrix to the inequalities cutting out its monoid.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

import numpy as np

DEFAULT_NODE_CAP = 1_000_000
DEFAULT_BASIS_CAP = 100_000

Vector = tuple[int, ...]


class BasisCapExceeded(RuntimeError):
    pass


def canonical_row(row: Sequence[int]) -> Vector:
    g = 0
    for c in row:
        g = gcd(g, int(c))
    if g == 0:
        return tuple(int(c) for c in row)
    return tuple(int(c) // g for c in row)


# ---------------------------------------------------------------------------
# text format

_TERM = re.compile(r"\s*([+-])?\s*(\d+)?\s*\*?\s*([A-Za-z_][A-Za-z0-9_']*)?\s*")


def _parse_side(text: str, index: dict[str, int], out: list[int], sign: int) -> None:
    text = text.strip()
    if not text:
        raise ValueError("empty side in inequality")
    pos = 0
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"cannot parse {text[pos:]!r}")
        op, num, var = m.groups()
        if op is None and not first:
            raise ValueError(f"missing operator before {text[pos:]!r}")
        if num is None and var is None:
            raise ValueError(f"dangling operator in {text!r}")
        coeff = int(num) if num is not None else 1
        if op == "-":
            coeff = -coeff
        if var is None:
            if coeff != 0:
                raise ValueError("inhomogeneous term in inequality")
        else:
            if var not in index:
                raise KeyError(f"unknown variable {var!r}")
            out[index[var]] += sign * coeff
        pos = m.end()
        first = False


def parse_row(line: str, names: Sequence[str]) -> Vector:
    """Parse ``lhs >= rhs`` (or ``lhs <= rhs``) into the row ``lhs - rhs``."""
    index = {n: i for i, n in enumerate(names)}
    if ">=" in line:
        lhs, rhs = line.split(">=")
        flip = 1
    elif "<=" in line:
        lhs, rhs = line.split("<=")
        flip = -1
    else:
        raise ValueError(f"no comparison in {line!r}")
    row = [0] * len(names)
    _parse_side(lhs, index, row, flip)
    _parse_side(rhs, index, row, -flip)
    return tuple(row)


def format_row(row: Sequence[int], names: Sequence[str]) -> str:
    pos, neg = [], []
    for c, n in zip(row, names):
        if c > 0:
            pos.append(n if c == 1 else f"{c}*{n}")
        elif c < 0:
            neg.append(n if c == -1 else f"{-c}*{n}")
    lhs = " + ".join(pos) if pos else "0"
    rhs = " + ".join(neg) if neg else "0"
    return f"{lhs} >= {rhs}"


# ---------------------------------------------------------------------------
# systems


@dataclass(frozen=True)
class InequalitySystem:
    names: tuple[str, ...]
    rows: tuple[Vector, ...]
    free: frozenset[str] = field(default_factory=frozenset)

    @classmethod
    def from_rows(cls, names: Iterable[str], rows: Iterable[Sequence[int]], free=()) -> "InequalitySystem":
        names = tuple(names)
        out = []
        for r in rows:
            r = tuple(int(c) for c in r)
            if len(r) != len(names):
                raise ValueError("row length does not match variable count")
            out.append(r)
        return cls(names, tuple(out), frozenset(free))

    @classmethod
    def parse(cls, names: Iterable[str], lines: Iterable[str], free=()) -> "InequalitySystem":
        names = tuple(names)
        rows = [parse_row(line, names) for line in lines if line.strip() and not line.lstrip().startswith("#")]
        return cls(names, tuple(rows), frozenset(free))

    def format(self) -> list[str]:
        return [format_row(r, self.names) for r in self.rows]

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64).reshape(len(self.rows), len(self.names))

    def canonical(self) -> "InequalitySystem":
        """Content-reduced, deduplicated rows in sorted order, zero rows dropped."""
        rows = sorted({canonical_row(r) for r in self.rows if any(r)})
        return InequalitySystem(self.names, tuple(rows), self.free)

    def row_set(self) -> frozenset[Vector]:
        return frozenset(self.canonical().rows)

    def with_rows(self, rows: Iterable[Sequence[int]]) -> "InequalitySystem":
        return InequalitySystem.from_rows(self.names, list(self.rows) + [tuple(r) for r in rows], self.free)

    def nonnegativity_rows(self) -> list[Vector]:
        n = len(self.names)
        return [tuple(int(i == j) for j in range(n)) for i, v in enumerate(self.names) if v not in self.free]

    def with_sign_rows(self) -> "InequalitySystem":
        """The system with the variable sign constraints written as explicit rows."""
        return InequalitySystem(self.names, tuple(self.rows) + tuple(self.nonnegativity_rows()), frozenset())

    def satisfied(self, x: Sequence[int]) -> bool:
        if any(x[i] < 0 for i, v in enumerate(self.names) if v not in self.free):
            return False
        return all(sum(c * xi for c, xi in zip(r, x)) >= 0 for r in self.rows)

    def reorder(self, names: Sequence[str]) -> "InequalitySystem":
        perm = [self.names.index(n) for n in names]
        return InequalitySystem(tuple(names), tuple(tuple(r[p] for p in perm) for r in self.rows), self.free)

    def implies_row(self, row: Sequence[int], tol: float = 1e-9) -> bool:
        """Whether every real solution of the system satisfies ``row . x >= 0``."""
        from scipy.optimize import linprog

        full = self.with_sign_rows()
        n = len(self.names)
        a_ub = -np.array(full.rows, dtype=float).reshape(len(full.rows), n) if full.rows else None
        b_ub = np.zeros(len(full.rows)) if full.rows else None
        res = linprog(
            np.array(row, dtype=float),
            A_ub=a_ub,
            b_ub=b_ub,
            bounds=[(-1.0, 1.0)] * n,
            method="highs",
        )
        if res.status != 0:
            raise RuntimeError(f"implication LP failed: {res.message}")
        return res.fun >= -tol

    def equivalent(self, other: "InequalitySystem") -> bool:
        """Mutual implication of the two real cones (same variable order required)."""
        if tuple(other.names) != tuple(self.names):
            other = other.reorder(self.names)
        a = self.with_sign_rows()
        b = other.with_sign_rows()
        return all(a.implies_row(r) for r in b.rows) and all(b.implies_row(r) for r in a.rows)

    def essential(self) -> "InequalitySystem":
        """Drop rows implied by the remaining rows and the sign constraints."""
        rows = list(self.canonical().rows)
        kept = list(rows)
        for r in rows:
            rest = [q for q in kept if q != r]
            if InequalitySystem(self.names, tuple(rest), self.free).implies_row(r):
                kept = rest
        return InequalitySystem(self.names, tuple(kept), self.free)


# ---------------------------------------------------------------------------
# Contejean-Devie


def _sort_key(v: Vector):
    return (sum(v), tuple(-c for c in v))


def contejean_devie(matrix: np.ndarray, node_cap: int = DEFAULT_NODE_CAP, basis_cap: int = DEFAULT_BASIS_CAP) -> list[Vector]:
    """Minimal nonzero nonnegative integer solutions of ``matrix @ x = 0``."""
    a = np.asarray(matrix, dtype=np.int64)
    m, n = a.shape
    cols = [a[:, j] for j in range(n)]
    solutions: list[np.ndarray] = []
    found: list[Vector] = []
    frontier: dict[Vector, np.ndarray] = {}
    for j in range(n):
        e = tuple(int(i == j) for i in range(n))
        frontier[e] = cols[j].copy()
    visited = 0
    while frontier:
        next_frontier: dict[Vector, np.ndarray] = {}
        level_solutions = []
        for x, d in frontier.items():
            if not d.any():
                level_solutions.append(x)
        for x in level_solutions:
            found.append(x)
            solutions.append(np.array(x, dtype=np.int64))
            del frontier[x]
        if len(found) > basis_cap:
            raise BasisCapExceeded(f"more than {basis_cap} basis elements")
        sol_arr = np.array(solutions, dtype=np.int64).reshape(len(solutions), n)
        for x, d in frontier.items():
            visited += 1
            if visited > node_cap:
                raise BasisCapExceeded(f"completion exceeded {node_cap} nodes")
            # d . a_j = (A^T d)_j
            scores = a.T @ d
            xv = np.array(x, dtype=np.int64)
            for j in np.nonzero(scores < 0)[0]:
                y = xv.copy()
                y[j] += 1
                key = tuple(int(c) for c in y)
                if key in next_frontier:
                    continue
                if len(sol_arr) and np.any(np.all(sol_arr <= y, axis=1)):
                    continue
                next_frontier[key] = d + cols[j]
        frontier = next_frontier
    return sorted(found, key=_sort_key)


def pottier_completion(rows: np.ndarray, n: int, basis_cap: int = DEFAULT_BASIS_CAP) -> list[Vector]:
    """Hilbert basis of ``{x >= 0 : rows @ x >= 0}`` by cutting one row at a time.

    Starting from the unit vectors of the orthant, each new form ``f`` splits
    the current basis by the sign of ``f``; sums of a positive and a negative
    element are generated by increasing total degree and kept when they are
    irreducible in the half-cone of their sign.  Reduction of ``s`` by ``y``
    is the componentwise test ``ext(s) >= ext(y)`` on the vectors extended by
    the values of all rows processed so far (plus the sign-correct ``f``).
    """
    rows = [np.asarray(r, dtype=np.int64) for r in rows]
    elems = np.eye(n, dtype=np.int64)
    done: list[np.ndarray] = []
    pending = list(rows)
    while pending:
        # next cut: the row with the fewest positive/negative pairs
        vals = [elems @ r for r in pending]
        pick = min(range(len(pending)), key=lambda i: int(np.sum(vals[i] > 0)) * int(np.sum(vals[i] < 0)))
        f = pending.pop(pick)
        fv = vals[pick]
        if not np.any(fv < 0):
            done.append(f)
            continue
        R = np.array(done, dtype=np.int64).reshape(len(done), n)

        def ext(x: np.ndarray) -> np.ndarray:
            return np.concatenate([x, x @ R.T]) if len(done) else x

        pos = [(e, fv[i]) for i, e in enumerate(elems) if fv[i] > 0]
        neg = [(e, fv[i]) for i, e in enumerate(elems) if fv[i] < 0]
        zero = [e for i, e in enumerate(elems) if fv[i] == 0]
        by_sign = {1: pos, -1: neg}
        # reducers per sign:  rows of (ext, |f|)
        red = {
            1: [(ext(e), int(v)) for e, v in pos] + [(ext(e), 0) for e in zero],
            -1: [(ext(e), int(-v)) for e, v in neg] + [(ext(e), 0) for e in zero],
        }
        red_arr = {s: (np.array([r[0] for r in red[s]]), np.array([r[1] for r in red[s]])) for s in (1, -1)}

        def reducible(x_ext: np.ndarray, fx: int, sign: int) -> bool:
            E, F = red_arr[sign]
            if not len(E):
                return False
            ok = np.all(E <= x_ext, axis=1) & (F <= abs(fx))
            return bool(ok.any())

        def reducible_zero(x_ext: np.ndarray) -> bool:
            if not zero:
                return False
            Z = np.array([ext(e) for e in zero])
            return bool(np.all(Z <= x_ext, axis=1).any())

        deg = lambda e: int(e.sum())
        seen = {tuple(int(c) for c in e) for e in elems}
        D = 2
        while True:
            max_p = max((deg(e) for e, _ in pos), default=0)
            max_n = max((deg(e) for e, _ in neg), default=0)
            if D > max_p + max_n:
                break
            new = {1: [], -1: [], 0: []}
            for p, fp in pos:
                dp = deg(p)
                if dp >= D:
                    continue
                for q, fq in neg:
                    if dp + deg(q) != D:
                        continue
                    s = p + q
                    key = tuple(int(c) for c in s)
                    if key in seen:
                        continue
                    seen.add(key)
                    fs = int(fp + fq)
                    xs = ext(s)
                    if fs > 0:
                        if not reducible(xs, fs, 1):
                            new[1].append((s, fs))
                    elif fs < 0:
                        if not reducible(xs, fs, -1):
                            new[-1].append((s, fs))
                    else:
                        if not reducible_zero(xs):
                            new[0].append(s)
            for sign in (1, -1):
                by_sign[sign].extend(new[sign])
            zero.extend(new[0])
            for sign in (1, -1):
                extra = [(ext(e), abs(int(v))) for e, v in new[sign]] + [(ext(e), 0) for e in new[0]]
                if extra:
                    E, F = red_arr[sign]
                    E2 = np.array([r[0] for r in extra])
                    F2 = np.array([r[1] for r in extra])
                    red_arr[sign] = (np.vstack([E, E2]) if len(E) else E2, np.concatenate([F, F2]) if len(F) else F2)
            if len(pos) + len(neg) + len(zero) > basis_cap:
                raise BasisCapExceeded(f"more than {basis_cap} intermediate elements")
            D += 1
        kept = [e for e, _ in pos] + zero
        elems = np.array(kept, dtype=np.int64).reshape(len(kept), n)
        done.append(f)
    return sorted({tuple(int(c) for c in e) for e in elems}, key=_sort_key)


def _reduced_rows(sys: InequalitySystem) -> list[Vector]:
    rows = []
    for r in sys.canonical().rows:
        nz = [i for i, c in enumerate(r) if c]
        # a row x_j >= 0 is already a sign constraint
        if len(nz) == 1 and r[nz[0]] > 0:
            continue
        rows.append(r)
    return rows


def hilbert_basis(sys: InequalitySystem, method: str = "pottier", node_cap: int = DEFAULT_NODE_CAP) -> list[Vector]:
    """Hilbert basis of the monoid of nonnegative integer solutions of ``sys``.

    ``method`` selects the completion: ``"pottier"`` (row-by-row cuts, the
    default) or ``"cd"`` (Contejean-Devie on the system with slack columns).
    """
    if sys.free:
        raise ValueError("free variables must be split before computing a Hilbert basis")
    n = len(sys.names)
    rows = _reduced_rows(sys)
    if not rows:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    if method == "pottier":
        return pottier_completion(np.array(rows, dtype=np.int64), n)
    if method != "cd":
        raise ValueError(f"unknown method {method!r}")
    c = np.array(rows, dtype=np.int64)
    aug = np.hstack([c, -np.eye(len(rows), dtype=np.int64)])
    basis = contejean_devie(aug, node_cap=node_cap)
    return sorted({v[:n] for v in basis}, key=_sort_key)


# ---------------------------------------------------------------------------
# decomposition over generators


def decompose(x: Sequence[int], V: np.ndarray, limit: int | None = None) -> list[Vector]:
    """All nonnegative integer ``a`` with ``V @ a = x``, in lexicographic order."""
    V = np.asarray(V, dtype=np.int64)
    rows, m = V.shape
    x = np.asarray(x, dtype=np.int64)
    if x.shape != (rows,):
        raise ValueError("vector length does not match matrix rows")
    if np.any(x < 0):
        return []
    # support of each row among columns j.. (for infeasibility pruning)
    tail_support = np.zeros((m + 1, rows), dtype=bool)
    for j in range(m - 1, -1, -1):
        tail_support[j] = tail_support[j + 1] | (V[:, j] > 0)
    out: list[Vector] = []
    a = [0] * m

    def rec(j: int, rem: np.ndarray) -> bool:
        if not rem.any():
            out.append(tuple(a[:j]) + (0,) * (m - j))
            return limit is not None and len(out) >= limit
        if j == m or np.any((rem > 0) & ~tail_support[j]):
            return False
        col = V[:, j]
        pos = col > 0
        top = int(np.min(rem[pos] // col[pos])) if pos.any() else 0
        for t in range(top, -1, -1):
            a[j] = t
            if rec(j + 1, rem - t * col):
                return True
        a[j] = 0
        return False

    rec(0, x)
    return sorted(out)


def in_monoid(x: Sequence[int], V: np.ndarray) -> bool:
    return bool(decompose(x, V, limit=1))


# ---------------------------------------------------------------------------
# Farkas dualization


@dataclass(frozen=True)
class DualSolution:
    u: Vector
    alpha: Vector

    def holds(self, V: np.ndarray) -> bool:
        return tuple(int(c) for c in np.asarray(self.u) @ np.asarray(V)) == tuple(self.alpha)


def _exact_inverse(B: np.ndarray) -> np.ndarray | None:
    """Integer inverse of a unimodular matrix by fraction-free elimination."""
    from fractions import Fraction

    n = B.shape[0]
    M = [[Fraction(int(B[i, j])) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return None
        M[c], M[piv] = M[piv], M[c]
        p = M[c][c]
        M[c] = [v / p for v in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [v - f * w for v, w in zip(M[r], M[c])]
    inv = [[M[i][n + j] for j in range(n)] for i in range(n)]
    if any(v.denominator != 1 for row in inv for v in row):
        return None
    return np.array([[int(v) for v in row] for row in inv], dtype=np.int64)


def unimodular_columns(V: np.ndarray) -> tuple[int, ...]:
    """Lexicographically first set of columns of V forming a unimodular square matrix."""
    V = np.asarray(V, dtype=np.int64)
    n, m = V.shape
    if np.linalg.matrix_rank(V) < n:
        raise ValueError("generator matrix does not have full row rank")
    for cols in combinations(range(m), n):
        B = V[:, cols]
        if abs(round(np.linalg.det(B))) == 1 and _exact_inverse(B) is not None:
            return cols
    raise ValueError("no unimodular column subset found")


def dual_solutions(V: np.ndarray, node_cap: int = DEFAULT_NODE_CAP) -> list[DualSolution]:
    """Fundamental solutions of ``u^T V = alpha^T`` with ``alpha >= 0`` and free ``u``.

    The secondary system fixes a unimodular column set I of V, takes
    ``eps = alpha_I`` as coordinates (so ``u = B^{-T} eps`` is integral) and
    imposes ``alpha_J >= 0`` on the remaining columns.
    """
    V = np.asarray(V, dtype=np.int64)
    n, m = V.shape
    I = unimodular_columns(V)
    J = [j for j in range(m) if j not in I]
    B_inv_T = _exact_inverse(V[:, I].T)
    # alpha_J = V_J^T u = V_J^T B^{-T} eps
    rows = V[:, J].T @ B_inv_T
    names = tuple(f"e{i}" for i in range(n))
    secondary = InequalitySystem.from_rows(names, rows.tolist())
    out = []
    for eps in hilbert_basis(secondary, node_cap=node_cap):
        u = B_inv_T @ np.array(eps, dtype=np.int64)
        alpha = u @ V
        out.append(DualSolution(tuple(int(c) for c in u), tuple(int(c) for c in alpha)))
    return out


def dual_solutions_split(V: np.ndarray, node_cap: int = DEFAULT_NODE_CAP) -> list[DualSolution]:
    """Cross-check route: write ``u = w - v`` with ``w, v >= 0`` and reduce.

    The Hilbert basis of ``(w - v)^T V >= 0`` projects onto a generating set
    of the dual cone; elements that are sums of two other nonzero dual
    vectors are filtered out.
    """
    V = np.asarray(V, dtype=np.int64)
    n, m = V.shape
    names = tuple(f"w{i}" for i in range(n)) + tuple(f"v{i}" for i in range(n))
    rows = np.hstack([V.T, -V.T])
    split = InequalitySystem.from_rows(names, rows.tolist())
    us = set()
    for wv in hilbert_basis(split, node_cap=node_cap):
        u = tuple(wv[i] - wv[n + i] for i in range(n))
        if any(u):
            us.add(u)
    us = sorted(us, key=_sort_key)
    alph = {u: tuple(int(c) for c in np.array(u) @ V) for u in us}
    irreducible = []
    for u in us:
        reducible = False
        for w in us:
            if w == u:
                continue
            rest = tuple(a - b for a, b in zip(u, w))
            ar = tuple(a - b for a, b in zip(alph[u], alph[w]))
            if any(rest) and min(ar) >= 0:
                reducible = True
                break
        if not reducible:
            irreducible.append(DualSolution(u, alph[u]))
    return irreducible


def _exact_rank(M: np.ndarray) -> int:
    from fractions import Fraction

    rows = [[Fraction(int(v)) for v in r] for r in np.asarray(M)]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = rows[r][c] / rows[rank][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def is_facet(u: Sequence[int], V: np.ndarray) -> bool:
    """Whether ``u . x >= 0`` cuts a facet of the cone spanned by the columns of V."""
    V = np.asarray(V, dtype=np.int64)
    tight = V[:, np.asarray(u, dtype=np.int64) @ V == 0]
    return tight.shape[1] > 0 and _exact_rank(tight.T) == V.shape[0] - 1


def farkas_dual(
    V: np.ndarray,
    names: Sequence[str] | None = None,
    node_cap: int = DEFAULT_NODE_CAP,
    facets_only: bool = True,
) -> InequalitySystem:
    """Inequalities ``u . x >= 0`` cutting out the cone of V from its dual fundamental solutions.

    With ``facets_only`` (the default) dual solutions that are not facet
    normals, which are implied by the others, are dropped.
    """
    V = np.asarray(V, dtype=np.int64)
    n = V.shape[0]
    names = tuple(names) if names is not None else tuple(f"x{i}" for i in range(n))
    rows = [s.u for s in dual_solutions(V, node_cap=node_cap)]
    if facets_only:
        rows = [u for u in rows if is_facet(u, V)]
    return InequalitySystem.from_rows(names, rows).canonical()


def columns(V: np.ndarray) -> set[Vector]:
    V = np.asarray(V, dtype=np.int64)
    return {tuple(int(c) for c in V[:, j]) for j in range(V.shape[1])}


def roundtrip_check(V: np.ndarray, node_cap: int = DEFAULT_NODE_CAP) -> bool:
    dual = farkas_dual(V, node_cap=node_cap)
    return set(hilbert_basis(dual, node_cap=node_cap)) == columns(V)
