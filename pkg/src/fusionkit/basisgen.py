"""Elementary couplings, fusion bases and basis-driven counting.

The reference tables (inequality lists, coupling triples, V matrices and
relations) live in ``data/<tag>.txt``; every public function derives its
result independently and cross-checks it against those tables.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from itertools import combinations, product
from math import ceil

import numpy as np

from .algebra import AffineWeight, AlgebraData, Weight, affine_extend, finite_part, get_algebra, outer_apply
from .diophantine import InequalitySystem, Vector, decompose, farkas_dual, hilbert_basis, parse_row
from .fusion import fusion_coefficient, stabilization_level
from .tensor import (
    SP4_NAMES,
    LRVariables,
    SpCouplingVector,
    bz_system,
    lr_system,
    lr_tableaux,
    lr_to_triple,
    lr_variable_names,
    sp4_solutions,
)

SUPPORTED = ("su2", "su3", "su4", "sp4")


class CatalogMismatch(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# fixtures


@dataclass(frozen=True)
class FixtureCoupling:
    name: str
    k0: int
    triple: tuple[AffineWeight, AffineWeight, AffineWeight]
    tensor_name: str | None
    vector: Vector


@dataclass(frozen=True)
class Fixture:
    tag: str
    names: tuple[str, ...]
    tensor_rows: tuple[Vector, ...]
    k_rows: tuple[Vector, ...]
    couplings: tuple[FixtureCoupling, ...]
    relations: tuple[str, ...]
    tensor_relations: tuple[str, ...]
    matrix: np.ndarray

    def coupling(self, name: str) -> FixtureCoupling:
        for c in self.couplings:
            if c.name == name:
                return c
        raise KeyError(name)


_TRIPLE = re.compile(r"\[([\d,\s]*)\]\s*x\s*\[([\d,\s]*)\]\s*>\s*\[([\d,\s]*)\]")


def _weight(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def parse_fixture(text: str, tag: str = "") -> Fixture:
    sections: dict[str, list[str]] = {}
    current = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]") and " x " not in line:
            current = line[1:-1].strip()
            sections.setdefault(current, [])
            continue
        if current is None:
            raise ValueError(f"content outside a section: {raw!r}")
        sections[current].append(line)
    names = tuple(sections["variables"][0].split())
    tensor_names = names[1:]
    tensor_rows = tuple(parse_row(l, tensor_names) for l in sections.get("tensor", []))
    k_rows = tuple(parse_row(l, names) for l in sections.get("k-rows", []))
    couplings = []
    for line in sections.get("couplings", []):
        name, k0, triple, rel, vec = (p.strip() for p in line.split("|"))
        m = _TRIPLE.fullmatch(triple)
        if m is None:
            raise ValueError(f"bad triple {triple!r}")
        vector = tuple(int(v) for v in vec.split())
        if len(vector) != len(names):
            raise ValueError(f"vector of {name} has the wrong length")
        couplings.append(
            FixtureCoupling(name, int(k0), tuple(_weight(g) for g in m.groups()), None if rel == "-" else rel, vector)
        )
    matrix = np.array([[int(v) for v in l.split()] for l in sections.get("matrix", [])], dtype=np.int64)
    return Fixture(
        tag,
        names,
        tensor_rows,
        k_rows,
        tuple(couplings),
        tuple(sections.get("relations", [])),
        tuple(sections.get("tensor-relations", [])),
        matrix,
    )


@lru_cache(maxsize=None)
def load_fixture(tag: str) -> Fixture:
    if tag not in SUPPORTED:
        raise KeyError(f"no fixture for {tag!r}")
    text = resources.files("fusionkit").joinpath("data", f"{tag}.txt").read_text()
    return parse_fixture(text, tag)


def _alg(alg) -> AlgebraData:
    return get_algebra(alg) if isinstance(alg, str) else alg


# ---------------------------------------------------------------------------
# variables, lattice points


def tensor_variable_names(alg) -> tuple[str, ...]:
    alg = _alg(alg)
    if alg.family == "A":
        return tuple(lr_variable_names(alg.rank + 1))
    if alg.tag == "sp4":
        return tuple(SP4_NAMES)
    raise KeyError(f"no tensor basis for {alg.tag}")


def variable_names(alg) -> tuple[str, ...]:
    return ("k",) + tensor_variable_names(alg)


def tensor_system(alg) -> InequalitySystem:
    alg = _alg(alg)
    if alg.family == "A":
        return lr_system(alg.rank + 1)
    if alg.tag == "sp4":
        return bz_system()
    raise KeyError(f"no tensor basis for {alg.tag}")


def triple_of(vector: Vector, alg) -> tuple[Weight, Weight, Weight]:
    """Finite (lambda, mu, nu) of a tensor lattice point."""
    alg = _alg(alg)
    if alg.family == "A":
        return lr_to_triple(LRVariables.from_vector(alg.rank + 1, vector))
    v = SpCouplingVector.from_vector(vector)
    return v.lam, v.mu, v.nu


@lru_cache(maxsize=200_000)
def _lattice_points(lam: Weight, mu: Weight, nu: Weight, tag: str) -> tuple[Vector, ...]:
    alg = get_algebra(tag)
    if alg.family == "A":
        N = alg.rank + 1
        pts = [v.vector() for v in lr_tableaux(lam, mu, N) if lr_to_triple(v)[2] == nu]
    else:
        pts = [v.vector() for v in sp4_solutions(lam, mu) if v.nu == nu]
    return tuple(sorted(pts))


def lattice_points(lam: Weight, mu: Weight, nu: Weight, alg) -> list[Vector]:
    """Tensor lattice points (LR or BZ vectors) of the coupling ``lam x mu > nu``."""
    alg = _alg(alg)
    return list(_lattice_points(tuple(lam), tuple(mu), tuple(nu), alg.tag))


# ---------------------------------------------------------------------------
# catalogs


@dataclass(frozen=True)
class TensorCoupling:
    name: str
    triple: tuple[Weight, Weight, Weight]
    vector: Vector


@dataclass(frozen=True)
class ElementaryCoupling:
    name: str
    triple: tuple[AffineWeight, AffineWeight, AffineWeight]
    k0: int
    vector: Vector

    @property
    def finite_triple(self) -> tuple[Weight, Weight, Weight]:
        return tuple(finite_part(w) for w in self.triple)


@lru_cache(maxsize=None)
def _tensor_elementaries(tag: str) -> tuple[TensorCoupling, ...]:
    alg = get_algebra(tag)
    fx = load_fixture(tag)
    derived = set(hilbert_basis(tensor_system(alg)))
    listed = {}
    for c in fx.couplings:
        if c.tensor_name is None:
            continue
        listed[c.vector[1:]] = c.tensor_name
    if set(listed) != derived:
        raise CatalogMismatch(f"{tag}: tensor Hilbert basis differs from the catalog")
    out = []
    for vec in sorted(derived, key=lambda v: list(listed.values()).index(listed[v])):
        out.append(TensorCoupling(listed[vec], triple_of(vec, alg), vec))
    return tuple(out)


def tensor_elementaries(alg) -> list[TensorCoupling]:
    return list(_tensor_elementaries(_alg(alg).tag))


def _affine_triple(triple, k: int, alg: AlgebraData):
    return tuple(affine_extend(w, k, alg) for w in triple)


def _images(triple, k: int, alg: AlgebraData):
    """Finite triples of all outer-automorphism images (A, A') with AA' on nu."""
    lam, mu, nu = _affine_triple(triple, k, alg)
    order = alg.outer_order
    out = set()
    for a, b in product(range(order), repeat=2):
        img = (outer_apply(a, lam, alg), outer_apply(b, mu, alg), outer_apply(a + b, nu, alg))
        out.add(tuple(finite_part(w) for w in img))
    return sorted(out)


def _decomposable(x: Vector, known: list[Vector]) -> bool:
    if not known:
        return False
    V = np.array(known, dtype=np.int64).T
    return bool(decompose(x, V, limit=1))


def _deficit(triple, k: int, alg: AlgebraData, known: list[Vector]):
    lam, mu, nu = triple
    coeff = fusion_coefficient(lam, mu, nu, k, alg)
    points = [(k,) + p for p in lattice_points(lam, mu, nu, alg)]
    cands = [p for p in points if not _decomposable(p, known)]
    deficit = coeff - (len(points) - len(cands))
    if deficit < 0:
        raise CatalogMismatch(f"{alg.tag}: more decomposable points than fusion couplings for {triple} at level {k}")
    return deficit, cands


def _count_with_rows(rows: list[Vector], lam, mu, nu, k: int, alg: AlgebraData) -> int:
    R = np.array(rows, dtype=np.int64)
    n = 0
    for p in lattice_points(lam, mu, nu, alg):
        x = np.array((k,) + p, dtype=np.int64)
        if np.all(R @ x >= 0):
            n += 1
    return n


def _accepts(vectors: list[Vector], alg: AlgebraData, box: int = 1, kmax: int = 3) -> bool:
    """Round-trip and small-box counting check for a candidate generator set."""
    V = np.array(vectors, dtype=np.int64).T
    dual = farkas_dual(V)
    if set(hilbert_basis(dual)) != {tuple(v) for v in vectors}:
        return False
    rows = list(dual.rows)
    r = alg.rank
    weights = list(product(range(box + 1), repeat=r))
    for k in range(kmax + 1):
        ws = [w for w in weights if alg.level(w) <= k]
        for lam, mu, nu in product(ws, repeat=3):
            if _count_with_rows(rows, lam, mu, nu, k, alg) != fusion_coefficient(lam, mu, nu, k, alg):
                return False
    return True


@lru_cache(maxsize=None)
def _fusion_elementaries(tag: str) -> tuple[ElementaryCoupling, ...]:
    alg = get_algebra(tag)
    fx = load_fixture(tag)
    n = len(variable_names(alg))
    e0 = (1,) + (0,) * (n - 1)
    known: list[Vector] = [e0]
    origin: dict[Vector, tuple] = {e0: ((0,) * alg.rank,) * 3}
    events: set[tuple] = set()
    for t in tensor_elementaries(alg):
        lam, mu, nu = t.triple
        start = max(alg.level(lam), alg.level(mu), alg.level(nu))
        for k in range(start, max(start, stabilization_level(lam, mu, alg)) + 1):
            events.add((k, t.triple))
    done: set[tuple] = set()
    ambiguous: list[tuple] = []
    while events:
        k, triple = min(events)
        events.discard((k, triple))
        if (k, triple) in done:
            continue
        done.add((k, triple))
        deficit, cands = _deficit(triple, k, alg, known)
        if deficit == 0:
            continue
        if deficit == len(cands):
            for c in cands:
                known.append(c)
                origin[c] = triple
        else:
            ambiguous.append((k, triple, tuple(cands), deficit))
        for img in _images(triple, k, alg):
            if (k, img) not in done:
                events.add((k, img))
    if ambiguous:
        options = [list(combinations(c, d)) for _, _, c, d in ambiguous]
        passing = []
        for choice in product(*options):
            extra = [v for group in choice for v in group]
            if _accepts(known + extra, alg):
                passing.append(choice)
        if len(passing) != 1:
            raise CatalogMismatch(f"{tag}: {len(passing)} resolutions of ambiguous couplings pass the checks")
        for (k, triple, _, _), group in zip(ambiguous, passing[0]):
            for v in group:
                known.append(v)
                origin[v] = triple
    for k, triple in sorted(done):
        if _deficit(triple, k, alg, known)[0] != 0:
            raise CatalogMismatch(f"{tag}: closure did not stabilize at {triple}, level {k}")
    names = {c.vector: c.name for c in fx.couplings}
    out = []
    for i, v in enumerate(known):
        k0 = v[0]
        triple = _affine_triple(triple_of(v[1:], alg), k0, alg)
        out.append(ElementaryCoupling(names.get(v, f"X{i}"), triple, k0, v))
    order = [c.name for c in fx.couplings]
    out.sort(key=lambda c: (order.index(c.name) if c.name in order else len(order), c.vector))
    return tuple(out)


def fusion_elementaries(alg) -> list[ElementaryCoupling]:
    """Fusion elementary couplings generated by outer-automorphism closure."""
    return list(_fusion_elementaries(_alg(alg).tag))


# ---------------------------------------------------------------------------
# fusion bases


@dataclass(frozen=True)
class FusionBasis:
    tag: str
    system: InequalitySystem
    tensor_rows: tuple[Vector, ...]
    k_rows: tuple[Vector, ...]

    def satisfied(self, x) -> bool:
        return self.system.satisfied(x)


def fixture_matrix(alg) -> np.ndarray:
    return load_fixture(_alg(alg).tag).matrix


@lru_cache(maxsize=None)
def _fusion_basis(tag: str) -> FusionBasis:
    fx = load_fixture(tag)
    tensor_rows = tuple((0,) + r for r in fx.tensor_rows)
    system = InequalitySystem.from_rows(fx.names, tensor_rows + fx.k_rows)
    derived = farkas_dual(fx.matrix, fx.names)
    if derived.row_set() != system.row_set():
        raise CatalogMismatch(f"{tag}: listed fusion basis differs from the dual of V")
    return FusionBasis(tag, system, tensor_rows, fx.k_rows)


def fusion_basis(alg) -> FusionBasis:
    return _fusion_basis(_alg(alg).tag)


def count_by_basis(lam: Weight, mu: Weight, nu: Weight, k: int, alg) -> int:
    """Lattice points of the coupling satisfying the fusion basis at level ``k``."""
    alg = _alg(alg)
    basis = fusion_basis(alg)
    return sum(1 for p in lattice_points(lam, mu, nu, alg) if basis.satisfied((k,) + p))


# ---------------------------------------------------------------------------
# threshold levels


def threshold_closed_form(alg, vars: Vector) -> int:
    """Smallest k allowed by the k-rows for the tensor lattice point ``vars``."""
    basis = fusion_basis(alg)
    k0 = 0
    for row in basis.k_rows:
        ck, rest = row[0], row[1:]
        if ck <= 0:
            raise ValueError("k-row without a positive k coefficient")
        need = -sum(c * x for c, x in zip(rest, vars))
        k0 = max(k0, ceil(need / ck))
    return k0


def threshold_multiset(lam: Weight, mu: Weight, nu: Weight, alg) -> tuple[int, ...]:
    return tuple(sorted(threshold_closed_form(alg, p) for p in lattice_points(lam, mu, nu, alg)))


def su2_threshold(lam: int, mu: int, nu: int) -> int:
    total = lam + mu + nu
    if total % 2:
        raise ValueError("odd label sum has no su(2) coupling")
    return total // 2


def sp4_threshold_min_form(v: SpCouplingVector) -> int:
    l1, l2 = v.lam
    m1, m2 = v.mu
    return l1 + l2 + m1 + m2 - min(v.p + v.q + v.s1, l2 + v.p, m1 - v.s1 + 2 * v.s2, m1 + v.s2)


def column_count(v: LRVariables) -> int:
    return sum(v.lam) + v.counts()[(1, 1)]


def _removable_vectors(N: int) -> list[Vector]:
    names = {c.name: c.vector[1:] for c in load_fixture(f"su{N}").couplings if c.tensor_name}
    if N == 2:
        return []
    if N == 3:
        return [names["E8"]]
    if N == 4:
        ccc = tuple(a + b + c for a, b, c in zip(names["C1"], names["C2"], names["C3"]))
        return [names["D1"], names["D2"], names["D3"], ccc]
    raise ValueError("tableau rule implemented for su(2), su(3), su(4)")


def threshold_tableau_rule(tableau: LRVariables) -> int:
    """Column count minus the largest number of removable composites."""
    N = tableau.N
    system = lr_system(N)
    pieces = _removable_vectors(N)
    x = np.array(tableau.vector(), dtype=np.int64)
    best = 0

    def rec(i: int, rem: np.ndarray, taken: int) -> None:
        nonlocal best
        if i == len(pieces):
            if system.satisfied(tuple(int(c) for c in rem)):
                best = max(best, taken)
            return
        p = np.array(pieces[i], dtype=np.int64)
        t = 0
        cur = rem
        while np.all(cur >= 0):
            rec(i + 1, cur, taken + t)
            cur = cur - p
            t += 1

    rec(0, x, 0)
    return column_count(tableau) - best


# ---------------------------------------------------------------------------
# relations


_TERM = re.compile(r"([A-Za-z]+'?\d*)(?:\^(\d+))?")


@dataclass(frozen=True)
class Syzygy:
    left: tuple[tuple[str, int], ...]
    right: tuple[tuple[str, int], ...]
    text: str = ""

    @classmethod
    def parse(cls, text: str) -> "Syzygy":
        lhs, rhs = text.split("=")

        def side(s: str):
            out = Counter()
            for tok in s.split():
                m = _TERM.fullmatch(tok)
                if m is None:
                    raise ValueError(f"bad relation token {tok!r}")
                out[m.group(1)] += int(m.group(2) or 1)
            return tuple(sorted(out.items()))

        return cls(side(lhs), side(rhs), text.strip())

    def sums(self, vectors: dict[str, Vector]) -> tuple[Vector, Vector]:
        def total(side):
            n = len(next(iter(vectors.values())))
            acc = [0] * n
            for name, power in side:
                for i, c in enumerate(vectors[name]):
                    acc[i] += power * c
            return tuple(acc)

        return total(self.left), total(self.right)

    def holds(self, vectors: dict[str, Vector]) -> bool:
        a, b = self.sums(vectors)
        return a == b


def syzygies(alg, tensor: bool = False) -> list[Syzygy]:
    """The listed relations, each verified as an exact vector identity."""
    alg = _alg(alg)
    fx = load_fixture(alg.tag)
    if tensor:
        vectors = {t.name: t.vector for t in tensor_elementaries(alg)}
        texts = fx.tensor_relations
    else:
        vectors = {c.name: c.vector for c in fusion_elementaries(alg)}
        texts = fx.relations
    out = []
    for text in texts:
        s = Syzygy.parse(text)
        if not s.holds(vectors):
            raise CatalogMismatch(f"{alg.tag}: relation {text!r} fails")
        out.append(s)
    return out


# ---------------------------------------------------------------------------
# r-variable rendering for sp(4)


def sp4_rows_in_r(rows, names=("k",) + tuple(SP4_NAMES)) -> list[str]:
    """Render rows over s1, s2 in the original r1 = 2 s1, r2 = 2 s2 form."""
    from .diophantine import format_row

    out = []
    for row in rows:
        row = list(row)
        idx = [names.index("s1"), names.index("s2")]
        if any(row[i] % 2 for i in idx):
            row = [2 * c for c in row]
        for i in idx:
            row[i] //= 2
        rnames = [("r" + n[1:]) if n in ("s1", "s2") else n for n in names]
        out.append(format_row(row, rnames))
    return out
