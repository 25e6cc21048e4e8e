"""Root data, Weyl groups and outer automorphisms for A_r, C_2 and G_2.

Weights are plain integer tuples in Dynkin-label coordinates.  A finite
weight has ``r`` labels, an affine weight has ``r + 1`` labels with the
zeroth label first.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

Weight = tuple[int, ...]
AffineWeight = tuple[int, ...]

# squared lengths of the simple roots, long roots normalised to 2
_ROOT_LENGTHS = {
    "C": (Fraction(1), Fraction(2)),
    "G": (Fraction(2, 3), Fraction(2)),
}


def _cartan(family: str, rank: int) -> tuple[tuple[int, ...], ...]:
    if family == "A":
        rows = []
        for i in range(rank):
            rows.append(tuple(2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(rank)))
        return tuple(rows)
    if family == "C" and rank == 2:
        return ((2, -1), (-2, 2))
    if family == "G" and rank == 2:
        return ((2, -1), (-3, 2))
    raise ValueError(f"unsupported algebra {family}{rank}")


def _positive_roots(cartan) -> list[tuple[int, ...]]:
    """Positive roots in simple-root coordinates, by height, via root strings."""
    r = len(cartan)
    simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    roots = list(simple)
    known = set(roots)
    layer = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            for i in range(r):
                pairing = sum(beta[j] * cartan[j][i] for j in range(r))
                q = 0
                probe = list(beta)
                while True:
                    probe[i] -= 1
                    if tuple(probe) in known:
                        q += 1
                    else:
                        break
                if q - pairing > 0:
                    up = tuple(beta[j] + (j == i) for j in range(r))
                    if up not in known:
                        known.add(up)
                        nxt.append(up)
        roots.extend(nxt)
        layer = nxt
    return roots


@dataclass(frozen=True)
class AlgebraData:
    """Finite and affine data of a simple Lie algebra.

    ``cartan_matrix[i][j]`` is the pairing of the simple root ``i`` with the
    simple coroot ``j``, so row ``i`` holds the Dynkin labels of root ``i``.
    """

    family: str
    rank: int
    cartan_matrix: tuple[tuple[int, ...], ...]
    comarks: tuple[int, ...]
    dual_coxeter: int
    quadratic_form: tuple[tuple[Fraction, ...], ...]
    affine_cartan: tuple[tuple[int, ...], ...]
    positive_roots: tuple[tuple[int, ...], ...]
    root_lengths: tuple[Fraction, ...]
    fundamental_weights: tuple[Weight, ...] = field(repr=False)
    rho: Weight = field(repr=False)

    @property
    def tag(self) -> str:
        if self.family == "A":
            return f"su{self.rank + 1}"
        if self.family == "C":
            return "sp4"
        return "g2"

    @property
    def outer_order(self) -> int:
        if self.family == "A":
            return self.rank + 1
        if self.family == "C":
            return 2
        return 1

    def root_labels(self, root: tuple[int, ...]) -> Weight:
        """Dynkin labels of a root given in simple-root coordinates."""
        r = self.rank
        return tuple(sum(root[i] * self.cartan_matrix[i][j] for i in range(r)) for j in range(r))

    def inner(self, a: Weight, b: Weight) -> Fraction:
        q = self.quadratic_form
        return sum((a[i] * q[i][j] * b[j] for i in range(self.rank) for j in range(self.rank)), Fraction(0))

    def level(self, weight: Weight) -> int:
        """Level of a finite weight, i.e. the sum of labels weighted by comarks."""
        return sum(a * l for a, l in zip(self.comarks[1:], weight))


@lru_cache(maxsize=None)
def build_algebra(family: str, rank: int) -> AlgebraData:
    """Tabulate Cartan data, comarks, dual Coxeter number and affine Cartan matrix."""
    family = family.upper()
    if family not in ("A", "C", "G") or rank < 1:
        raise ValueError(f"unsupported algebra {family}{rank}")
    if family in ("C", "G") and rank != 2:
        raise ValueError(f"unsupported algebra {family}{rank}")
    cartan = _cartan(family, rank)
    lengths = _ROOT_LENGTHS.get(family, tuple(Fraction(2) for _ in range(rank)))
    roots = _positive_roots(cartan)
    theta = max(roots, key=sum)
    theta_len = sum(
        (theta[i] * theta[j] * lengths[j] * cartan[i][j] / 2 for i in range(rank) for j in range(rank)),
        Fraction(0),
    )
    comarks_f = [theta[i] * lengths[i] / theta_len for i in range(rank)]
    if any(c.denominator != 1 for c in comarks_f):
        raise ArithmeticError("non-integral comarks")
    comarks = (1,) + tuple(int(c) for c in comarks_f)

    inv = np.linalg.inv(np.array(cartan, dtype=float))
    det = round(np.linalg.det(np.array(cartan, dtype=float)))
    quad = tuple(
        tuple(Fraction(round(inv[i][j] * det), det) * lengths[j] / 2 for j in range(rank)) for i in range(rank)
    )

    theta_labels = tuple(sum(theta[i] * cartan[i][j] for i in range(rank)) for j in range(rank))
    aff = [[0] * (rank + 1) for _ in range(rank + 1)]
    aff[0][0] = 2
    for j in range(rank):
        aff[0][j + 1] = -theta_labels[j]
    for i in range(rank):
        aff[i + 1][0] = -sum(comarks[m + 1] * cartan[i][m] for m in range(rank))
        for j in range(rank):
            aff[i + 1][j + 1] = cartan[i][j]

    fund = tuple(tuple(int(i == j) for j in range(rank)) for i in range(rank))
    return AlgebraData(
        family=family,
        rank=rank,
        cartan_matrix=cartan,
        comarks=comarks,
        dual_coxeter=sum(comarks),
        quadratic_form=quad,
        affine_cartan=tuple(tuple(row) for row in aff),
        positive_roots=tuple(roots),
        root_lengths=tuple(lengths),
        fundamental_weights=fund,
        rho=(1,) * rank,
    )


def get_algebra(tag: str) -> AlgebraData:
    """Look up an algebra by tag: ``su2`` ... ``su9``, ``sp4`` or ``g2``."""
    tag = tag.lower()
    if tag.startswith("su") and tag[2:].isdigit() and int(tag[2:]) >= 2:
        return build_algebra("A", int(tag[2:]) - 1)
    if tag == "sp4":
        return build_algebra("C", 2)
    if tag == "g2":
        return build_algebra("G", 2)
    raise ValueError(f"unknown algebra tag {tag!r}")


def affine_extend(weight: Weight, k: int, alg: AlgebraData) -> AffineWeight:
    return (k - alg.level(weight),) + tuple(weight)


def affine_level(hat: AffineWeight, alg: AlgebraData) -> int:
    return sum(a * l for a, l in zip(alg.comarks, hat))


def finite_part(hat: AffineWeight) -> Weight:
    return tuple(hat[1:])


def is_dominant(weight) -> bool:
    return all(x >= 0 for x in weight)


def integrable_weights(alg: AlgebraData, k: int) -> list[AffineWeight]:
    """All level-``k`` integrable weights, lexicographic in the finite labels."""
    out: list[AffineWeight] = []
    r = alg.rank
    marks = alg.comarks[1:]

    def rec(prefix: list[int], budget: int) -> None:
        if len(prefix) == r:
            out.append((budget,) + tuple(prefix))
            return
        a = marks[len(prefix)]
        for x in range(budget // a + 1):
            prefix.append(x)
            rec(prefix, budget - a * x)
            prefix.pop()

    if k >= 0:
        rec([], k)
    return out


def _safety_cap(k: int, alg: AlgebraData) -> int:
    return 10 * (max(k, 0) + alg.dual_coxeter) * (alg.rank + 1)


def shifted_make_dominant(hat: AffineWeight, alg: AlgebraData, cap: int | None = None):
    """Fold ``hat`` into the fundamental alcove with the shifted affine action.

    Returns ``(weight, sign)`` or ``None`` when ``hat + rho`` lies on a wall.
    """
    k = affine_level(hat, alg)
    if cap is None:
        cap = _safety_cap(k, alg)
    shifted = [x + 1 for x in hat]
    sign = 1
    aff = alg.affine_cartan
    for _ in range(cap):
        if 0 in shifted:
            return None
        low = min(shifted)
        if low > 0:
            return tuple(x - 1 for x in shifted), sign
        i = shifted.index(low)
        c = shifted[i]
        row = aff[i]
        for j in range(len(shifted)):
            shifted[j] -= c * row[j]
        sign = -sign
    raise RuntimeError(f"reflection loop exceeded {cap} steps for {hat}")


def reflect_to_dominant(weight: Weight, alg: AlgebraData, strict: bool = True):
    """Finite Weyl group folding of ``weight``.

    With ``strict`` the result must be regular dominant and ``None`` is
    returned for weights on a wall; otherwise folding stops at dominant.
    Returns ``(weight, sign)``.
    """
    w = list(weight)
    sign = 1
    cartan = alg.cartan_matrix
    cap = 10_000
    for _ in range(cap):
        if strict and 0 in w:
            return None
        low = min(w)
        if low >= 0:
            return tuple(w), sign
        i = w.index(low)
        c = w[i]
        row = cartan[i]
        for j in range(len(w)):
            w[j] -= c * row[j]
        sign = -sign
    raise RuntimeError("finite reflection loop did not terminate")


@dataclass(frozen=True)
class WeylElement:
    """Affine Weyl group element.

    ``word`` is written left to right as in ``s_1 s_0`` (``s_0`` acts
    first).  ``action`` is the integer matrix acting on affine Dynkin labels.
    """

    word: tuple[int, ...]
    action: tuple[tuple[int, ...], ...]

    @property
    def sign(self) -> int:
        return -1 if len(self.word) % 2 else 1

    def apply(self, hat: AffineWeight) -> AffineWeight:
        return tuple(sum(m * x for m, x in zip(row, hat)) for row in self.action)

    def shifted_apply(self, hat: AffineWeight) -> AffineWeight:
        moved = self.apply(tuple(x + 1 for x in hat))
        return tuple(x - 1 for x in moved)

    def label(self) -> str:
        return "id" if not self.word else "".join(f"s{i}" for i in self.word)


def _weight_reflection(alg: AlgebraData, i: int) -> np.ndarray:
    n = alg.rank + 1
    m = np.eye(n, dtype=np.int64)
    for j in range(n):
        m[j, i] -= alg.affine_cartan[i][j]
    return m


def _coroot_reflection(alg: AlgebraData, j: int) -> np.ndarray:
    n = alg.rank + 1
    m = np.eye(n, dtype=np.int64)
    for i in range(n):
        m[j, i] -= alg.affine_cartan[j][i]
    return m


def word_element(word, alg: AlgebraData) -> WeylElement:
    mat = np.eye(alg.rank + 1, dtype=np.int64)
    for i in word:
        mat = mat @ _weight_reflection(alg, i)
    return WeylElement(tuple(word), tuple(tuple(int(x) for x in row) for row in mat))


def _cache_path(tag: str) -> str | None:
    root = os.environ.get("FUSIONKIT_CACHE_DIR")
    if not root:
        return None
    return os.path.join(root, f"wf_{tag}.json")


def compute_Wf(alg: AlgebraData, max_length: int = 64) -> list[WeylElement]:
    """Affine Weyl elements sending ``alpha_0^v + K`` and ``alpha_i^v`` (i >= 1) to positive coroots.

    Found by breadth-first search on reduced words extended on the left; the
    admissible set is closed under removing left letters, so pruning is safe.
    """
    path = _cache_path(alg.tag)
    if path and os.path.exists(path):
        with open(path) as fh:
            words = json.load(fh)
        return [word_element(w, alg) for w in words]

    n = alg.rank + 1
    gens = [_coroot_reflection(alg, j) for j in range(n)]
    wgens = [_weight_reflection(alg, j) for j in range(n)]
    probes = np.zeros((n, n), dtype=np.int64)
    probes[:, 0] = alg.comarks
    probes[0, 0] += 1
    for i in range(1, n):
        probes[i, i] = 1
    # column 0 is alpha_0^v + K, column i is alpha_i^v

    def admissible(mat: np.ndarray) -> bool:
        images = mat @ probes
        return bool((images >= 0).all())

    ident = np.eye(n, dtype=np.int64)
    found = {ident.tobytes(): ((), ident, ident)}
    layer = [((), ident, ident)]
    for _ in range(max_length):
        nxt = []
        for word, cmat, wmat in layer:
            for j in range(n):
                c2 = gens[j] @ cmat
                key = c2.tobytes()
                if key in found or not admissible(c2):
                    continue
                entry = ((j,) + word, c2, wgens[j] @ wmat)
                found[key] = entry
                nxt.append(entry)
        if not nxt:
            break
        layer = nxt
    else:
        raise RuntimeError("coroot-criterion search exceeded the length bound")
    out = [
        WeylElement(word, tuple(tuple(int(x) for x in row) for row in wmat))
        for word, _, wmat in sorted(found.values(), key=lambda e: (len(e[0]), e[0]))
    ]
    if path:
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w") as fh:
            json.dump([list(e.word) for e in out], fh)
    return out


def outer_apply(power: int, hat: AffineWeight, alg: AlgebraData) -> AffineWeight:
    """Apply the generator of the outer automorphism group ``power`` times."""
    order = alg.outer_order
    power %= order
    labels = tuple(hat)
    for _ in range(power):
        if alg.family == "A":
            labels = (labels[-1],) + labels[:-1]
        elif alg.family == "C":
            labels = labels[::-1]
    return labels


def finite_weyl_group(alg: AlgebraData) -> list[tuple[np.ndarray, int]]:
    """All finite Weyl group elements as (matrix on Dynkin labels, sign)."""
    r = alg.rank
    gens = []
    for i in range(r):
        m = np.eye(r, dtype=np.int64)
        for j in range(r):
            m[j, i] -= alg.cartan_matrix[i][j]
        gens.append(m)
    ident = np.eye(r, dtype=np.int64)
    seen = {ident.tobytes(): (ident, 1)}
    layer = [(ident, 1)]
    while layer:
        nxt = []
        for mat, sgn in layer:
            for g in gens:
                m2 = g @ mat
                key = m2.tobytes()
                if key not in seen:
                    seen[key] = (m2, -sgn)
                    nxt.append((m2, -sgn))
        layer = nxt
    return list(seen.values())
