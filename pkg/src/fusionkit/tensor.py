"""Finite tensor-product multiplicities.

Three routes are provided: Littlewood-Richardson tableau enumeration for
su(N), Berenstein-Zelevinsky inequalities for sp(4), and a Racah-Speiser
fold of a Freudenthal weight system that works for any supported algebra.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .algebra import AlgebraData, Weight, get_algebra, reflect_to_dominant
from .diophantine import InequalitySystem

MAX_WEIGHT_SYSTEM = 2_000_000


# ---------------------------------------------------------------------------
# weight systems and the Racah-Speiser oracle


def _dominant_weights_below(top: Weight, alg: AlgebraData) -> dict[Weight, int]:
    """Dominant weights of the irreducible module ``top`` mapped to their depth."""
    root_labels = [(alg.root_labels(a), sum(a)) for a in alg.positive_roots]
    depth = {tuple(top): 0}
    stack = [tuple(top)]
    while stack:
        w = stack.pop()
        for labels, height in root_labels:
            v = tuple(x - y for x, y in zip(w, labels))
            if min(v) < 0:
                continue
            d = depth[w] + height
            if v not in depth:
                depth[v] = d
                stack.append(v)
    return depth


@lru_cache(maxsize=4096)
def dominant_multiplicities(top: Weight, tag: str) -> dict[Weight, int]:
    """Freudenthal multiplicities of the dominant weights of the module ``top``."""
    alg = get_algebra(tag)
    top = tuple(top)
    depth = _dominant_weights_below(top, alg)
    if len(depth) > MAX_WEIGHT_SYSTEM:
        raise MemoryError("weight system larger than the configured bound")
    rho = alg.rho
    roots = [alg.root_labels(a) for a in alg.positive_roots]
    top_rho = tuple(x + 1 for x in top)
    norm_top = alg.inner(top_rho, top_rho)
    mult: dict[Weight, int] = {top: 1}

    def lookup(w: Weight) -> int:
        folded = reflect_to_dominant(w, alg, strict=False)[0]
        return mult.get(folded, 0)

    for w in sorted(depth, key=depth.get):
        if w == top:
            continue
        wr = tuple(x + r for x, r in zip(w, rho))
        denom = norm_top - alg.inner(wr, wr)
        total = Fraction(0)
        for alpha in roots:
            j = 1
            while True:
                v = tuple(x + j * a for x, a in zip(w, alpha))
                m = lookup(v)
                if m == 0:
                    break
                total += m * alg.inner(v, alpha)
                j += 1
        value = 2 * total / denom
        if value.denominator != 1 or value < 0:
            raise ArithmeticError(f"non-integral multiplicity at {w}")
        if value:
            mult[w] = int(value)
    return mult


def weight_system(top: Weight, alg: AlgebraData) -> dict[Weight, int]:
    """All weights of the irreducible module ``top`` with multiplicities."""
    dom = dominant_multiplicities(tuple(top), alg.tag)
    cartan = alg.cartan_matrix
    out: dict[Weight, int] = {}
    for w, m in dom.items():
        orbit = {w}
        stack = [w]
        while stack:
            v = stack.pop()
            for i in range(alg.rank):
                if v[i] == 0:
                    continue
                u = tuple(v[j] - v[i] * cartan[i][j] for j in range(alg.rank))
                if u not in orbit:
                    orbit.add(u)
                    stack.append(u)
        for v in orbit:
            out[v] = m
        if len(out) > MAX_WEIGHT_SYSTEM:
            raise MemoryError("weight system larger than the configured bound")
    return out


@lru_cache(maxsize=65536)
def _racah_speiser(lam: Weight, mu: Weight, tag: str) -> tuple[tuple[Weight, int], ...]:
    alg = get_algebra(tag)
    if sum(mu) > sum(lam):
        lam, mu = mu, lam
    acc: dict[Weight, int] = defaultdict(int)
    for w, m in weight_system(mu, alg).items():
        shifted = tuple(a + b + 1 for a, b in zip(lam, w))
        folded = reflect_to_dominant(shifted, alg, strict=True)
        if folded is None:
            continue
        v, sign = folded
        acc[tuple(x - 1 for x in v)] += sign * m
    out = []
    for v in sorted(acc):
        if acc[v] < 0:
            raise ArithmeticError(f"negative tensor multiplicity at {v}")
        if acc[v]:
            out.append((v, acc[v]))
    return tuple(out)


def racah_speiser_tensor(lam: Weight, mu: Weight, alg: AlgebraData) -> dict[Weight, int]:
    """Decompose ``lam (x) mu`` by folding the weights of ``mu`` shifted by ``lam + rho``."""
    if min(lam) < 0 or min(mu) < 0:
        raise ValueError("weights must be dominant")
    return dict(_racah_speiser(tuple(lam), tuple(mu), alg.tag))


# ---------------------------------------------------------------------------
# Littlewood-Richardson tableaux for su(N)


def lr_pairs(N: int) -> list[tuple[int, int]]:
    """Index pairs (i, j) of the LR variables: entry i (1..N-1) in row j (i..N)."""
    return [(i, j) for i in range(1, N) for j in range(i, N + 1)]


def lr_variable_names(N: int) -> list[str]:
    return [f"l{i}" for i in range(1, N)] + [f"n{i}{j}" for i, j in lr_pairs(N)]


@dataclass(frozen=True)
class LRVariables:
    """An LR skew tableau recorded by the counts ``n[(i, j)]`` of entry i in row j."""

    N: int
    lam: Weight
    n: tuple[tuple[tuple[int, int], int], ...]

    @classmethod
    def build(cls, N: int, lam, n: dict | None = None) -> "LRVariables":
        n = n or {}
        for key in n:
            if key not in lr_pairs(N):
                raise KeyError(f"no LR variable n{key[0]}{key[1]} for su({N})")
        full = tuple((p, int(n.get(p, 0))) for p in lr_pairs(N))
        return cls(N, tuple(lam), full)

    @classmethod
    def from_vector(cls, N: int, vec) -> "LRVariables":
        r = N - 1
        pairs = lr_pairs(N)
        return cls(N, tuple(vec[:r]), tuple(zip(pairs, (int(x) for x in vec[r:]))))

    def counts(self) -> dict[tuple[int, int], int]:
        return dict(self.n)

    def vector(self) -> tuple[int, ...]:
        return tuple(self.lam) + tuple(v for _, v in self.n)


def dynkin_to_partition(w: Weight, N: int) -> list[int]:
    """Row lengths (N of them, the last zero) of the Young diagram of ``w``."""
    rows = [0] * N
    for j in range(N - 2, -1, -1):
        rows[j] = rows[j + 1] + w[j]
    return rows


def partition_to_dynkin(rows, N: int) -> Weight:
    rows = list(rows) + [0] * (N - len(rows))
    return tuple(rows[j] - rows[j + 1] for j in range(N - 1))


def lr_to_triple(v: LRVariables) -> tuple[Weight, Weight, Weight]:
    N = v.N
    n = v.counts()
    ell = dynkin_to_partition(v.lam, N)
    mu_rows = [sum(n.get((i, j), 0) for j in range(1, N + 1)) for i in range(1, N)]
    nu_rows = [ell[j - 1] + sum(n.get((i, j), 0) for i in range(1, N)) for j in range(1, N + 1)]
    if any(a < b for a, b in zip(mu_rows, mu_rows[1:])) or any(a < b for a, b in zip(nu_rows, nu_rows[1:])):
        raise ValueError("LR variables induce a non-dominant weight")
    return tuple(v.lam), partition_to_dynkin(mu_rows, N), partition_to_dynkin(nu_rows, N)


def lr_system(N: int) -> InequalitySystem:
    """Column-strictness and lattice-word conditions over (lambda, n)."""
    names = lr_variable_names(N)
    index = {name: c for c, name in enumerate(names)}
    rows = []

    def ell(j: int, vec: list[int], coeff: int) -> None:
        # row j of the lambda diagram is lambda_j + ... + lambda_{N-1}
        for m in range(j, N):
            vec[index[f"l{m}"]] += coeff

    for j in range(2, N + 1):
        for i in range(1, min(j, N - 1) + 1):
            vec = [0] * len(names)
            ell(j - 1, vec, 1)
            ell(j, vec, -1)
            for a in range(1, i):
                if a <= j - 1:
                    vec[index[f"n{a}{j - 1}"]] += 1
            for a in range(1, i + 1):
                vec[index[f"n{a}{j}"]] -= 1
            rows.append(vec)
    for i in range(2, N):
        for j in range(i, N + 1):
            vec = [0] * len(names)
            for b in range(i - 1, j):
                vec[index[f"n{i - 1}{b}"]] += 1
            for b in range(i, j + 1):
                vec[index[f"n{i}{b}"]] -= 1
            rows.append(vec)
    return InequalitySystem.from_rows(names, rows)


def lr_tableaux(lam: Weight, mu: Weight, N: int):
    """Yield every LR tableau of shape ``nu / lam`` with content ``mu`` as LRVariables."""
    ell = dynkin_to_partition(lam, N)
    m = dynkin_to_partition(mu, N)[: N - 1]
    n: dict[tuple[int, int], int] = {}
    order = lr_pairs(N)

    def bound(i: int, j: int) -> int:
        b = m[i - 1] - sum(n[(i, jj)] for jj in range(i, j))
        if j >= 2:
            # boxes of row j holding entries <= i sit under entries < i of row j-1
            above = ell[j - 2] + sum(n.get((a, j - 1), 0) for a in range(1, i))
            here = ell[j - 1] + sum(n.get((a, j), 0) for a in range(1, i))
            b = min(b, above - here)
        if i >= 2:
            prev = sum(n[(i - 1, jj)] for jj in range(i - 1, j))
            done = sum(n[(i, jj)] for jj in range(i, j))
            b = min(b, prev - done)
        return b

    def rec(pos: int):
        if pos == len(order):
            yield LRVariables(N, tuple(lam), tuple((p, n[p]) for p in order))
            return
        i, j = order[pos]
        b = bound(i, j)
        if b < 0:
            return
        if j == N:
            need = m[i - 1] - sum(n[(i, jj)] for jj in range(i, N))
            if need > b or need < 0:
                return
            choices = (need,)
        else:
            choices = range(b + 1)
        for x in choices:
            n[(i, j)] = x
            yield from rec(pos + 1)
        n.pop((i, j), None)

    yield from rec(0)


def lr_multiplicity(lam: Weight, mu: Weight, nu: Weight, N: int) -> int:
    nu = tuple(nu)
    return sum(1 for v in lr_tableaux(lam, mu, N) if lr_to_triple(v)[2] == nu)


def lr_tensor(lam: Weight, mu: Weight, N: int) -> dict[Weight, int]:
    out: dict[Weight, int] = defaultdict(int)
    for v in lr_tableaux(lam, mu, N):
        out[lr_to_triple(v)[2]] += 1
    return dict(sorted(out.items()))


# ---------------------------------------------------------------------------
# Berenstein-Zelevinsky description of sp(4)

SP4_NAMES = ["l1", "l2", "m1", "m2", "s1", "s2", "p", "q"]


@dataclass(frozen=True)
class SpCouplingVector:
    """An sp(4) coupling; ``s1``, ``s2`` are the halved BZ parameters r1/2, r2/2."""

    lam: Weight
    mu: Weight
    p: int
    q: int
    s1: int
    s2: int

    @property
    def nu(self) -> Weight:
        l1, l2 = self.lam
        m1, m2 = self.mu
        return (2 * self.s2 - 2 * self.s1 - 2 * self.p + l1 + m1, self.p - self.q - 2 * self.s2 + l2 + m2)

    def vector(self) -> tuple[int, ...]:
        return tuple(self.lam) + tuple(self.mu) + (self.s1, self.s2, self.p, self.q)

    @classmethod
    def from_vector(cls, vec) -> "SpCouplingVector":
        l1, l2, m1, m2, s1, s2, p, q = (int(x) for x in vec)
        return cls((l1, l2), (m1, m2), p, q, s1, s2)

    def satisfies(self) -> bool:
        l1, l2 = self.lam
        m1, m2 = self.mu
        p, q, s1, s2 = self.p, self.q, self.s1, self.s2
        return (
            min(p, q, s1, s2) >= 0
            and l1 >= p
            and m1 >= q
            and l2 >= s1
            and m1 >= q + 2 * s1 - 2 * s2
            and l2 >= s1 + q - p
            and m1 >= p + 2 * s1 - 2 * s2
            and l2 >= s2 + q - p
            and m2 >= s2
            and min(self.nu) >= 0
        )


def bz_system() -> InequalitySystem:
    rows_text = [
        "l1 - p >= 0",
        "m1 - q >= 0",
        "l2 - s1 >= 0",
        "m1 - q - 2*s1 + 2*s2 >= 0",
        "l2 - s1 - q + p >= 0",
        "m1 - p - 2*s1 + 2*s2 >= 0",
        "l2 - s2 - q + p >= 0",
        "m2 - s2 >= 0",
    ]
    return InequalitySystem.parse(SP4_NAMES, rows_text)


def sp4_solutions(lam: Weight, mu: Weight) -> list[SpCouplingVector]:
    l1, l2 = lam
    m1, m2 = mu
    out = []
    for p, q, s1, s2 in product(range(l1 + 1), range(m1 + 1), range(l2 + 1), range(m2 + 1)):
        v = SpCouplingVector(tuple(lam), tuple(mu), p, q, s1, s2)
        if v.satisfies():
            out.append(v)
    return out


def sp4_tensor(lam: Weight, mu: Weight) -> dict[Weight, int]:
    out: dict[Weight, int] = defaultdict(int)
    for v in sp4_solutions(lam, mu):
        out[v.nu] += 1
    return dict(sorted(out.items()))


@dataclass(frozen=True)
class SpDiamond:
    a: tuple[int, ...]
    s1: int
    s2: int
    lam: Weight
    mu: Weight
    nu: Weight

    def equalities_hold(self) -> bool:
        a1, a2, a3, a4, a5, a6, a7, a8 = self.a
        (l1, l2), (m1, m2), (n1, n2) = self.lam, self.mu, self.nu
        p, q = l1 - a1, m1 - a5
        return (
            l2 == self.s1 + a2
            and m2 == self.s2 + a8
            and n1 == a1 + a7
            and n2 == a4 + a8
            and a2 + p == a3 + q
            and a3 + self.s1 == a4 + self.s2
            and a5 + 2 * self.s2 == a6 + 2 * self.s1
            and a6 + q == a7 + p
        )


def sp_diamond_from_vector(v: SpCouplingVector) -> SpDiamond:
    """Solve the diamond equalities for a1..a8."""
    l1, l2 = v.lam
    m1, m2 = v.mu
    nu = v.nu
    a1 = l1 - v.p
    a2 = l2 - v.s1
    a5 = m1 - v.q
    a8 = m2 - v.s2
    a7 = nu[0] - a1
    a4 = nu[1] - a8
    a3 = a2 + v.p - v.q
    a6 = a5 + 2 * v.s2 - 2 * v.s1
    d = SpDiamond((a1, a2, a3, a4, a5, a6, a7, a8), v.s1, v.s2, tuple(v.lam), tuple(v.mu), nu)
    if min(d.a) < 0 or not d.equalities_hold():
        raise ArithmeticError(f"diamond equalities fail for {v}")
    return d


# ---------------------------------------------------------------------------
# dispatch


def tensor_product(lam: Weight, mu: Weight, alg: AlgebraData) -> dict[Weight, int]:
    """Tensor decomposition by the combinatorial rule of the algebra."""
    if alg.family == "A":
        return lr_tensor(tuple(lam), tuple(mu), alg.rank + 1)
    if alg.family == "C":
        return sp4_tensor(tuple(lam), tuple(mu))
    return racah_speiser_tensor(lam, mu, alg)


def conjugate(w: Weight) -> Weight:
    return tuple(reversed(w))
