"""Fusion coefficients: Kac-Walton folding, the Verlinde sum, threshold levels."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .algebra import (
    AlgebraData,
    Weight,
    affine_extend,
    finite_part,
    finite_weyl_group,
    get_algebra,
    integrable_weights,
    outer_apply,
    shifted_make_dominant,
)
from .tensor import racah_speiser_tensor

VERLINDE_TOL = 1e-6


class NotIntegrable(ValueError):
    pass


@dataclass
class FusionResult:
    level: int
    multiplicities: dict[Weight, int]
    thresholds: dict[Weight, list[int]] | None = None

    def coefficient(self, nu: Weight) -> int:
        return self.multiplicities.get(tuple(nu), 0)


@dataclass(frozen=True)
class ThresholdRecord:
    triple: tuple[Weight, Weight, Weight]
    levels: tuple[int, ...] = field(default=())

    def coefficient(self, k: int) -> int:
        return sum(1 for k0 in self.levels if k0 <= k)


def _check_integrable(weight: Weight, k: int, alg: AlgebraData) -> None:
    if min(weight, default=0) < 0 or alg.level(weight) > k:
        raise NotIntegrable(f"{list(weight)} is not integrable at level {k} for {alg.tag}")


@lru_cache(maxsize=65536)
def _kac_walton(lam: Weight, mu: Weight, k: int, tag: str) -> tuple[tuple[Weight, int], ...]:
    alg = get_algebra(tag)
    acc: dict[Weight, int] = defaultdict(int)
    for xi, mult in racah_speiser_tensor(lam, mu, alg).items():
        folded = shifted_make_dominant(affine_extend(xi, k, alg), alg)
        if folded is None:
            continue
        hat, sign = folded
        acc[finite_part(hat)] += sign * mult
    out = []
    for nu in sorted(acc):
        if acc[nu] < 0:
            raise ArithmeticError(f"negative fusion coefficient at {nu}")
        if acc[nu]:
            out.append((nu, acc[nu]))
    return tuple(out)


def kac_walton_fusion(lam: Weight, mu: Weight, k: int, alg: AlgebraData) -> FusionResult:
    """Level-``k`` fusion of two integrable weights (finite labels)."""
    lam, mu = tuple(lam), tuple(mu)
    _check_integrable(lam, k, alg)
    _check_integrable(mu, k, alg)
    return FusionResult(k, dict(_kac_walton(lam, mu, k, alg.tag)))


def fusion_coefficient(lam: Weight, mu: Weight, nu: Weight, k: int, alg: AlgebraData) -> int:
    if alg.level(tuple(nu)) > k or min(nu) < 0:
        return 0
    return kac_walton_fusion(lam, mu, k, alg).coefficient(nu)


def stabilization_level(lam: Weight, mu: Weight, alg: AlgebraData) -> int:
    return alg.level(tuple(lam)) + alg.level(tuple(mu))


def threshold_bruteforce(lam: Weight, mu: Weight, nu: Weight, alg: AlgebraData) -> ThresholdRecord:
    """Threshold multiset from the increments of the fusion coefficient in k."""
    lam, mu, nu = tuple(lam), tuple(mu), tuple(nu)
    tensor = racah_speiser_tensor(lam, mu, alg).get(nu, 0)
    start = max(alg.level(lam), alg.level(mu), alg.level(nu))
    stop = stabilization_level(lam, mu, alg)
    levels: list[int] = []
    prev = 0
    for k in range(start, max(start, stop) + 1):
        c = kac_walton_fusion(lam, mu, k, alg).coefficient(nu)
        if c < prev:
            raise ArithmeticError(f"fusion coefficient decreased at level {k}")
        levels.extend([k] * (c - prev))
        prev = c
    if prev != tensor:
        raise ArithmeticError(f"fusion coefficient {prev} did not stabilize at tensor multiplicity {tensor}")
    return ThresholdRecord((lam, mu, nu), tuple(levels))


def fusion_with_thresholds(lam: Weight, mu: Weight, k: int, alg: AlgebraData) -> FusionResult:
    res = kac_walton_fusion(lam, mu, k, alg)
    res.thresholds = {nu: list(threshold_bruteforce(lam, mu, nu, alg).levels) for nu in res.multiplicities}
    return res


# ---------------------------------------------------------------------------
# Verlinde formula


@lru_cache(maxsize=64)
def _s_tilde(tag: str, k: int) -> tuple[tuple[Weight, ...], np.ndarray]:
    """Unnormalized Weyl-sum S-matrix over the level-``k`` integrable weights."""
    alg = get_algebra(tag)
    weights = tuple(finite_part(h) for h in integrable_weights(alg, k))
    r = alg.rank
    q = np.array([[float(alg.quadratic_form[i][j]) for j in range(r)] for i in range(r)])
    shifted = np.array([[x + 1 for x in w] for w in weights], dtype=float).reshape(len(weights), r)
    group = finite_weyl_group(alg)
    height = k + alg.dual_coxeter
    S = np.zeros((len(weights), len(weights)), dtype=complex)
    for mat, sign in group:
        images = shifted @ mat.T.astype(float)
        phase = images @ q @ shifted.T
        S += sign * np.exp(-2j * np.pi * phase / height)
    return weights, S


def verlinde_table(alg: AlgebraData, k: int) -> tuple[tuple[Weight, ...], np.ndarray]:
    """All fusion coefficients at level ``k`` as a float array N[a, b, c]."""
    weights, S = _s_tilde(alg.tag, k)
    s0 = S[0]
    norm = np.sum(np.abs(s0) ** 2)
    N = np.einsum("as,bs,cs->abc", S, S, np.conj(S) / s0[None, :]) / norm
    return weights, N


@lru_cache(maxsize=64)
def _verlinde_cached(tag: str, k: int):
    return verlinde_table(get_algebra(tag), k)


def verlinde_fusion(lam: Weight, mu: Weight, nu: Weight, k: int, alg: AlgebraData) -> int:
    for w in (lam, mu, nu):
        _check_integrable(tuple(w), k, alg)
    weights, N = _verlinde_cached(alg.tag, k)
    idx = {w: i for i, w in enumerate(weights)}
    value = N[idx[tuple(lam)], idx[tuple(mu)], idx[tuple(nu)]]
    rounded = round(value.real)
    if abs(value - rounded) >= VERLINDE_TOL:
        raise ArithmeticError(f"Verlinde sum {value} is not within {VERLINDE_TOL} of an integer")
    return int(rounded)


# ---------------------------------------------------------------------------
# outer automorphisms


def outer_image(power: int, weight: Weight, k: int, alg: AlgebraData) -> Weight:
    return finite_part(outer_apply(power, affine_extend(tuple(weight), k, alg), alg))


def outer_invariance_check(lam: Weight, mu: Weight, nu: Weight, k: int, a_power: int, b_power: int, alg: AlgebraData) -> bool:
    base = fusion_coefficient(lam, mu, nu, k, alg)
    la = outer_image(a_power, lam, k, alg)
    mb = outer_image(b_power, mu, k, alg)
    nab = outer_image(a_power + b_power, nu, k, alg)
    return fusion_coefficient(la, mb, nab, k, alg) == base
