"""Truncated multivariate power series, MacMahon projections and generating functions.

A :class:`TruncatedSeries` stores exact integer coefficients inside a window
``floor[v] <= exponent[v] <= order[v]`` per variable.  Terms that fall outside
the window are dropped and the drop is recorded, so that a later product which
could bring a dropped term back into range raises :class:`TruncationError`
instead of returning a wrong coefficient.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping, Sequence

from .algebra import finite_part, get_algebra, integrable_weights
from .fusion import kac_walton_fusion

Monomial = Mapping[str, int]
Exponent = tuple[int, ...]


class TruncationError(ValueError):
    pass


@dataclass(frozen=True)
class TruncatedSeries:
    names: tuple[str, ...]
    orders: tuple[int, ...]
    floors: tuple[int, ...]
    terms: Mapping[Exponent, int]
    clipped_hi: frozenset[str] = field(default_factory=frozenset)
    clipped_lo: frozenset[str] = field(default_factory=frozenset)

    @classmethod
    def build(
        cls,
        names: Sequence[str],
        orders: Mapping[str, int],
        terms: Mapping[Exponent, int] | Iterable[tuple[Exponent, int]],
        floors: Mapping[str, int] | None = None,
        clipped_hi=(),
        clipped_lo=(),
    ) -> "TruncatedSeries":
        names = tuple(names)
        floors = floors or {}
        hi = tuple(orders[v] for v in names)
        lo = tuple(floors.get(v, 0) for v in names)
        acc: dict[Exponent, int] = defaultdict(int)
        chi, clo = set(clipped_hi), set(clipped_lo)
        items = terms.items() if isinstance(terms, Mapping) else terms
        for e, c in items:
            if not c:
                continue
            # a dropped term is recorded against its first out-of-window variable
            for v, x, a, b in zip(names, e, lo, hi):
                if x > b:
                    chi.add(v)
                    break
                if x < a:
                    clo.add(v)
                    break
            else:
                acc[tuple(e)] += c
        clean = {e: c for e, c in acc.items() if c}
        return cls(names, hi, lo, clean, frozenset(chi), frozenset(clo))

    @classmethod
    def constant(cls, names: Sequence[str], orders: Mapping[str, int], value: int = 1) -> "TruncatedSeries":
        return cls.build(names, orders, {(0,) * len(names): value})

    @classmethod
    def monomial(cls, names: Sequence[str], orders: Mapping[str, int], mono: Monomial, coeff: int = 1, floors=None):
        return cls.build(names, orders, {_exponent(mono, names): coeff}, floors)

    # --- views

    @property
    def order_map(self) -> dict[str, int]:
        return dict(zip(self.names, self.orders))

    @property
    def floor_map(self) -> dict[str, int]:
        return dict(zip(self.names, self.floors))

    def coefficient(self, mono: Monomial | Sequence[int]) -> int:
        e = _exponent(mono, self.names) if isinstance(mono, Mapping) else tuple(mono)
        return self.terms.get(e, 0)

    def is_nonnegative(self) -> bool:
        return all(c > 0 for c in self.terms.values())

    def exponent_range(self, var: str) -> tuple[int, int]:
        i = self.names.index(var)
        xs = [e[i] for e in self.terms] or [0]
        return min(xs), max(xs)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.names == other.names and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash((self.names, frozenset(self.terms.items())))

    # --- structure

    def _replace(self, **kw) -> "TruncatedSeries":
        base = dict(
            names=self.names,
            orders=self.order_map,
            terms=self.terms,
            floors=self.floor_map,
            clipped_hi=self.clipped_hi,
            clipped_lo=self.clipped_lo,
        )
        base.update(kw)
        return TruncatedSeries.build(**base)

    def truncate(self, orders: Mapping[str, int]) -> "TruncatedSeries":
        new = self.order_map
        for v, o in orders.items():
            new[v] = min(new[v], o)
        return self._replace(orders=new)

    def extend(self, names: Sequence[str], orders: Mapping[str, int] | None = None, floors=None) -> "TruncatedSeries":
        """Same series over a larger (reordered) variable list."""
        names = tuple(names)
        missing = set(self.names) - set(names)
        if missing:
            raise ValueError(f"extend would drop variables {sorted(missing)}")
        orders = {**{v: 0 for v in names}, **self.order_map, **(orders or {})}
        floors = {**self.floor_map, **(floors or {})}
        idx = [self.names.index(v) if v in self.names else None for v in names]
        terms = {tuple(e[i] if i is not None else 0 for i in idx): c for e, c in self.terms.items()}
        return TruncatedSeries.build(names, orders, terms, floors, self.clipped_hi, self.clipped_lo)

    def _aligned(self, other: "TruncatedSeries"):
        if self.names == other.names:
            return self, other
        names = self.names + tuple(v for v in other.names if v not in self.names)
        return self.extend(names), other.extend(names)

    # --- arithmetic

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        a, b = self._aligned(other)
        acc = defaultdict(int, a.terms)
        for e, c in b.terms.items():
            acc[e] += c
        orders = {v: min(x, y) for v, x, y in zip(a.names, a.orders, b.orders)}
        floors = {v: max(x, y) for v, x, y in zip(a.names, a.floors, b.floors)}
        return TruncatedSeries.build(a.names, orders, acc, floors, a.clipped_hi | b.clipped_hi, a.clipped_lo | b.clipped_lo)

    def __neg__(self) -> "TruncatedSeries":
        return self._replace(terms={e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def scale(self, c: int) -> "TruncatedSeries":
        return self._replace(terms={e: c * x for e, x in self.terms.items()})

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        a, b = self._aligned(other)
        orders, floors = _product_window(a, b)
        acc: dict[Exponent, int] = defaultdict(int)
        hi = tuple(orders[v] for v in a.names)
        lo = tuple(floors[v] for v in a.names)
        for ea, ca in a.terms.items():
            for eb, cb in b.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                if all(l <= x <= h for x, l, h in zip(e, lo, hi)):
                    acc[e] += ca * cb
        chi = a.clipped_hi | b.clipped_hi | _overflow(a, b, hi, lo, True)
        clo = a.clipped_lo | b.clipped_lo | _overflow(a, b, hi, lo, False)
        return TruncatedSeries.build(a.names, orders, acc, floors, chi, clo)

    def shift(self, mono: Monomial) -> "TruncatedSeries":
        """Multiply by a monomial, keeping the window fixed."""
        s = self.extend(self.names + tuple(v for v in mono if v not in self.names))
        d = _exponent(mono, s.names)
        return s._replace(terms={tuple(x + y for x, y in zip(e, d)): c for e, c in s.terms.items()})

    def substitute(
        self,
        mapping: Mapping[str, Monomial],
        orders: Mapping[str, int] | None = None,
        floors: Mapping[str, int] | None = None,
    ) -> "TruncatedSeries":
        """Replace each variable by a monomial (``{}`` sets it to 1).

        Variables absent from ``mapping`` are kept.  New window bounds default
        to the old ones for surviving variables and to ``[-m, m]`` for new
        ones, with ``m`` the largest old order.
        """
        images = {v: dict(mapping.get(v, {v: 1})) for v in self.names}
        names: list[str] = []
        for v in self.names:
            for w in images[v]:
                if w not in names:
                    names.append(w)
        m = max(self.orders, default=0)
        new_orders = {w: self.order_map.get(w, m) for w in names}
        new_floors = {w: self.floor_map.get(w, -m) for w in names}
        new_orders.update(orders or {})
        new_floors.update(floors or {})
        cols = [[images[v].get(w, 0) for v in self.names] for w in names]
        acc: dict[Exponent, int] = defaultdict(int)
        for e, c in self.terms.items():
            acc[tuple(sum(a * x for a, x in zip(col, e)) for col in cols)] += c
        chi, clo = set(), set()
        for v in self.clipped_hi | self.clipped_lo:
            sources = {w: [u for u in self.names if w in images[u]] for w in images[v]}
            img = images[v]
            if len(img) == 1 and sources[next(iter(img))] == [v]:
                # exponent of the image is a fixed multiple of the old one
                (w, a), = img.items()
                if v in self.clipped_hi:
                    (chi if a > 0 else clo).add(w)
                if v in self.clipped_lo:
                    (clo if a > 0 else chi).add(w)
            elif img.get(v) == 1 and sources[v] == [v]:
                if v in self.clipped_hi:
                    chi.add(v)
                if v in self.clipped_lo:
                    clo.add(v)
            else:
                chi.update(img)
                clo.update(img)
        return TruncatedSeries.build(names, new_orders, acc, new_floors, chi, clo)

    def to_dict(self) -> dict:
        return {
            "variables": list(self.names),
            "orders": list(self.orders),
            "terms": [[list(e), c] for e, c in sorted(self.terms.items())],
        }


def _exponent(mono: Monomial, names: Sequence[str]) -> Exponent:
    extra = set(mono) - set(names)
    if extra:
        raise ValueError(f"monomial uses unknown variables {sorted(extra)}")
    return tuple(mono.get(v, 0) for v in names)


def _product_window(a: TruncatedSeries, b: TruncatedSeries, skip=()):
    """Window on which the product is exact, given what each factor dropped."""
    orders, floors = {}, {}
    for i, v in enumerate(a.names):
        if v in skip:
            orders[v], floors[v] = 0, 0
            continue
        (amin, amax), (bmin, bmax) = a.exponent_range(v), b.exponent_range(v)
        hi = max(a.orders[i], b.orders[i], amax + bmax)
        lo = min(a.floors[i], b.floors[i], amin + bmin)
        for x, y in ((a, b), (b, a)):
            ymin, ymax = y.exponent_range(v)
            if v in x.clipped_hi:
                if v in y.clipped_lo or ymin < 0:
                    raise TruncationError(f"product cannot be exact in {v!r}: a dropped high term may return")
                hi = min(hi, x.orders[i] + ymin)
            if v in x.clipped_lo:
                if v in y.clipped_hi or ymax > 0:
                    raise TruncationError(
                        f"product cannot be exact in {v!r}: floor {x.floors[i]} too shallow (need below {x.floors[i] - ymax})"
                    )
                lo = max(lo, x.floors[i] + ymax)
        orders[v], floors[v] = hi, lo
    return orders, floors


def _overflow(a, b, hi, lo, upper: bool) -> frozenset[str]:
    out = set()
    for i, v in enumerate(a.names):
        (amin, amax), (bmin, bmax) = a.exponent_range(v), b.exponent_range(v)
        if upper and amax + bmax > hi[i]:
            out.add(v)
        if not upper and amin + bmin < lo[i]:
            out.add(v)
    return frozenset(out)


# ---------------------------------------------------------------------------
# MacMahon projections


def omega_geq(s: TruncatedSeries, var: str) -> TruncatedSeries:
    """Drop every term with a negative exponent of ``var``."""
    i = s.names.index(var)
    floors = s.floor_map
    floors[var] = max(0, floors[var])
    kept = {e: c for e, c in s.terms.items() if e[i] >= 0}
    return TruncatedSeries.build(s.names, s.order_map, kept, floors, s.clipped_hi, s.clipped_lo - {var})


def omega_eq(s: TruncatedSeries, var: str) -> TruncatedSeries:
    """Keep the exponent-zero slice in ``var`` and remove the variable."""
    i = s.names.index(var)
    if s.orders[i] < 0 or s.floors[i] > 0:
        raise TruncationError(f"window of {var!r} excludes exponent 0")
    names = s.names[:i] + s.names[i + 1 :]
    kept = {e[:i] + e[i + 1 :]: c for e, c in s.terms.items() if e[i] == 0}
    orders = {v: o for v, o in s.order_map.items() if v != var}
    floors = {v: f for v, f in s.floor_map.items() if v != var}
    return TruncatedSeries.build(names, orders, kept, floors, s.clipped_hi - {var}, s.clipped_lo - {var})


def omega_eq_product(a: TruncatedSeries, b: TruncatedSeries, vars: Sequence[str]) -> TruncatedSeries:
    """``omega_eq`` over ``vars`` of ``a * b`` without forming the full product."""
    a, b = a._aligned(b)
    for v in vars:
        i = a.names.index(v)
        for x, y in ((a, b), (b, a)):
            lo, hi = y.exponent_range(v)
            if v in x.clipped_hi and (v in y.clipped_lo or lo < -x.orders[i]):
                raise TruncationError(f"degree-zero slice in {v!r} is not determined: order {x.orders[i]} too low")
            if v in x.clipped_lo and (v in y.clipped_hi or hi > -x.floors[i]):
                raise TruncationError(f"degree-zero slice in {v!r} is not determined: floor {x.floors[i]} too shallow")
    idx = [a.names.index(v) for v in vars]
    rest = [i for i in range(len(a.names)) if i not in idx]
    names = tuple(a.names[i] for i in rest)
    groups: dict[Exponent, list] = defaultdict(list)
    for eb, cb in b.terms.items():
        groups[tuple(eb[i] for i in idx)].append((eb, cb))
    orders, floors = _product_window(a, b, skip=vars)
    acc: dict[Exponent, int] = defaultdict(int)
    for ea, ca in a.terms.items():
        key = tuple(-ea[i] for i in idx)
        for eb, cb in groups.get(key, ()):
            acc[tuple(ea[i] + eb[i] for i in rest)] += ca * cb
    keep = {v: orders[v] for v in names}
    keepf = {v: floors[v] for v in names}
    chi = (a.clipped_hi | b.clipped_hi) - set(vars)
    clo = (a.clipped_lo | b.clipped_lo) - set(vars)
    return TruncatedSeries.build(names, keep, acc, keepf, chi, clo)


# ---------------------------------------------------------------------------
# rational generating functions


@dataclass(frozen=True)
class RationalGF:
    """``sum(c * m for c, m in numerator) / prod(1 - m for m in denominator)``."""

    numerator: tuple[tuple[int, tuple[tuple[str, int], ...]], ...]
    denominator: tuple[tuple[tuple[str, int], ...], ...]

    @classmethod
    def make(cls, numerator: Iterable[tuple[int, Monomial]], denominator: Iterable[Monomial]) -> "RationalGF":
        num = tuple((int(c), _freeze(m)) for c, m in numerator)
        den = tuple(_freeze(m) for m in denominator)
        for m in den:
            if not any(x > 0 for _, x in m):
                raise ValueError(f"denominator factor 1 - {dict(m)} has no positive exponent")
        return cls(num, den)

    @property
    def variables(self) -> tuple[str, ...]:
        seen: list[str] = []
        for m in [m for _, m in self.numerator] + list(self.denominator):
            for v, _ in m:
                if v not in seen:
                    seen.append(v)
        return tuple(seen)


def _freeze(m: Monomial) -> tuple[tuple[str, int], ...]:
    return tuple(sorted((v, int(x)) for v, x in m.items() if x))


def univariate(numerator: Sequence[int], denominator: Iterable[int], var: str = "d") -> RationalGF:
    """``sum numerator[i] var^i / prod (1 - var^j)`` for ``j`` in ``denominator``."""
    return RationalGF.make([(c, {var: i}) for i, c in enumerate(numerator) if c], [{var: j} for j in denominator])


def _geometric(mono: Exponent, names, orders, floors) -> TruncatedSeries:
    """``1/(1 - x^mono)`` up to the first power leaving the window."""
    if not any(x > 0 and orders[v] < 10**9 for v, x in zip(names, mono)):
        raise ValueError("geometric factor without a bounded positive exponent")
    lo = [floors.get(v, 0) for v in names]
    hi = [orders[v] for v in names]
    terms = {}
    j = 0
    while True:
        e = tuple(j * x for x in mono)
        if not all(a <= x <= b for x, a, b in zip(e, lo, hi)):
            break
        terms[e] = 1
        j += 1
    # the first out-of-window power, and every later one, is recorded
    return TruncatedSeries.build(names, orders, list(terms.items()) + [(e, 1)], floors)


def expand(gf: RationalGF, orders: Mapping[str, int], floors: Mapping[str, int] | None = None, names=None) -> TruncatedSeries:
    """Power-series expansion of ``gf`` truncated to ``orders``."""
    names = tuple(names or gf.variables)
    for v in names:
        if v not in orders:
            raise ValueError(f"no truncation order for {v!r}")
    floors = dict(floors or {})
    series = TruncatedSeries.build(names, orders, [(_exponent(dict(m), names), c) for c, m in gf.numerator], floors)
    for m in gf.denominator:
        mono = _exponent(dict(m), names)
        if any(x < 0 for x in mono) and not floors:
            raise ValueError(f"factor 1 - {dict(m)} has negative exponents; pass floors")
        series = series * _geometric(mono, names, orders, floors)
    return series


def expand_univariate(gf: RationalGF, order: int, var: str = "d") -> list[int]:
    s = expand(gf, {var: order})
    return [s.coefficient({var: i}) for i in range(order + 1)]


def long_division(numerator: Sequence[int], denominator: Sequence[int], order: int) -> list[int]:
    """Power-series quotient of two integer polynomials with ``denominator[0] == 1``."""
    if denominator[0] != 1:
        raise ValueError("constant term of the denominator must be 1")
    out: list[int] = []
    for i in range(order + 1):
        c = numerator[i] if i < len(numerator) else 0
        c -= sum(denominator[j] * out[i - j] for j in range(1, min(i, len(denominator) - 1) + 1))
        out.append(c)
    return out


def poly_power(base: Sequence[int], n: int) -> list[int]:
    out = [1]
    for _ in range(n):
        nxt = [0] * (len(out) + len(base) - 1)
        for i, a in enumerate(out):
            for j, b in enumerate(base):
                nxt[i + j] += a * b
        out = nxt
    return out


# ---------------------------------------------------------------------------
# named generating functions


SU2_VARS = ("d", "L", "M", "N")


def su2_fusion_gf() -> RationalGF:
    return RationalGF.make([(1, {})], [{"d": 1}, {"d": 1, "L": 1, "M": 1}, {"d": 1, "L": 1, "N": 1}, {"d": 1, "M": 1, "N": 1}])


def _integrability_projection(s: TruncatedSeries, label: str, level: str = "d", dummy: str = "x") -> TruncatedSeries:
    """Keep terms whose ``label`` exponent does not exceed the ``level`` exponent."""
    K = s.order_map[level]
    sub = s.substitute({level: {level: 1, dummy: 1}, label: {label: 1, dummy: -1}}, orders={dummy: K}, floors={dummy: -s.order_map[label]})
    # 1/(1 - x^-1) through x^-K: deeper powers cannot meet an exponent <= K
    tail = TruncatedSeries.build((dummy,), {dummy: 0}, {(-m,): 1 for m in range(K + 1)}, {dummy: -K}, clipped_lo={dummy})
    return omega_eq_product(sub, tail, (dummy,))


def su2_fusion_pipeline(orders: Mapping[str, int]) -> TruncatedSeries:
    """Level-graded su(2) fusion series built from the tensor-product series.

    Two integrability projections, one affine reflection step and a final
    projection; the result is truncated to ``orders`` (keys d, L, M, N).
    """
    K = max(orders.values())
    big = {"d": K, "L": K, "M": K, "N": 2 * K + 2}
    F = expand(RationalGF.make([(1, {})], [{"d": 1}, {"L": 1, "M": 1}, {"L": 1, "N": 1}, {"M": 1, "N": 1}]), big, names=SU2_VARS)
    G = _integrability_projection(F, "L")
    G = _integrability_projection(G, "M")
    # N^c d^k -> -N^(2k-c+2) d^k
    reflected = G.substitute({"d": {"d": 1, "N": 2}, "N": {"N": -1}}, orders=big, floors={"N": -(2 * K + 2)})
    G = G - reflected.shift({"N": 2})
    G = omega_geq(G, "N")
    G = _integrability_projection(G, "N")
    if not G.is_nonnegative():
        raise ArithmeticError("negative coefficient survived the su(2) pipeline")
    return G.truncate(dict(orders))


SU3_VARS = ("d", "L1", "L2", "M1", "M2", "N1", "N2")


def _monomial_of(triple, k0: int, labels=("L", "M", "N")) -> dict[str, int]:
    m = {"d": k0}
    for name, w in zip(labels, triple):
        for i, x in enumerate(w):
            if x:
                m[f"{name}{i + 1}"] = x
    return m


def su3_elementary_monomials() -> dict[str, dict[str, int]]:
    from .basisgen import fusion_elementaries

    return {c.name: _monomial_of(c.finite_triple, c.k0) for c in fusion_elementaries("su3")}


def _forbidden_product_gf(forbidden: Sequence[str], mons: dict[str, dict[str, int]]) -> RationalGF:
    """Generating function with the cyclic-cover decomposition avoiding one product."""
    a, b, c = forbidden
    rest = [mons[n] for n in mons if n not in forbidden]
    E = {n: mons[n] for n in forbidden}

    def times(*ms):
        out: dict[str, int] = defaultdict(int)
        for m in ms:
            for v, x in m.items():
                out[v] += x
        return dict(out)

    # 1/((1-a)(1-c)) + b/((1-b)(1-a)) + b c/((1-c)(1-b)) over a common denominator
    # (1-a)(1-b)(1-c): (1-b) + b(1-c) + b c (1-a) = 1 - a b c
    return RationalGF.make([(1, {}), (-1, times(E[a], E[b], E[c]))], rest + [E[a], E[b], E[c]])


def fussa_gf() -> RationalGF:
    return _forbidden_product_gf(("E1", "E3", "E5"), su3_elementary_monomials())


def fussb_gf() -> RationalGF:
    return _forbidden_product_gf(("E0", "E7", "E8"), su3_elementary_monomials())


def _fussa_terms(mons, forbidden) -> list[tuple[RationalGF, int]]:
    a, b, c = forbidden
    rest = [mons[n] for n in mons if n not in forbidden]

    def gf(num: dict, den: list):
        return RationalGF.make([(1, num)], rest + den)

    def times(x, y):
        out = defaultdict(int)
        for m in (x, y):
            for v, e in m.items():
                out[v] += e
        return dict(out)

    E = mons
    return [
        gf({}, [E[a], E[c]]),
        gf(E[b], [E[b], E[a]]),
        gf(times(E[b], E[c]), [E[c], E[b]]),
    ]


def sum_expansions(parts: Sequence[RationalGF], orders: Mapping[str, int], names=SU3_VARS) -> TruncatedSeries:
    total = None
    for gf in parts:
        s = expand(gf, orders, names=names)
        total = s if total is None else total + s
    return total


def fussa_series(order: int) -> TruncatedSeries:
    """Term-by-term expansion of the three-term form avoiding E1 E3 E5."""
    return sum_expansions(_fussa_terms(su3_elementary_monomials(), ("E1", "E3", "E5")), {v: order for v in SU3_VARS})


def fussb_series(order: int) -> TruncatedSeries:
    """Term-by-term expansion of the three-term form avoiding E0 E7 E8."""
    return sum_expansions(_fussa_terms(su3_elementary_monomials(), ("E0", "E7", "E8")), {v: order for v in SU3_VARS})


def goodman_wenzl_gf(d="d", L=("L1", "L2"), M="M1", N=("N1", "N2")) -> RationalGF:
    """Fusions of an arbitrary su(3) weight with a symmetric one, (mu1, 0)."""
    L1, L2 = L
    N1, N2 = N
    return RationalGF.make(
        [(1, {})],
        [{d: 1}, {d: 1, L1: 1, N1: 1}, {d: 1, L2: 1, N2: 1}, {d: 1, L2: 1, M: 1}, {d: 1, M: 1, N1: 1}, {d: 1, L1: 1, M: 1, N2: 1}],
    )


def su3_fusion_composition(orders: Mapping[str, int] | int) -> TruncatedSeries:
    """su(3) fusion series composed from the symmetric-weight series.

    Two copies are glued along an intermediate weight at equal level, the
    Giambelli determinant is applied, and the second weight is converted to
    Dynkin labels.  Truncation is by level; all labels are bounded by it.
    """
    if isinstance(orders, int):
        orders = {v: orders for v in SU3_VARS}
    K = orders["d"]
    f1 = expand(goodman_wenzl_gf(), {v: K for v in ("d", "L1", "L2", "M1", "N1", "N2")}, names=("d", "L1", "L2", "M1", "N1", "N2"))
    A = f1.substitute(
        {"d": {"d": 1, "z": -1}, "N1": {"R1": -1}, "N2": {"R2": -1}},
        orders={"z": 0, "R1": 0, "R2": 0},
        floors={"z": -K, "R1": -K, "R2": -K},
    )
    B = f1.substitute(
        {"d": {"z": 1}, "L1": {"R1": 1}, "L2": {"R2": 1}, "M1": {"M2": 1}},
        orders={"z": K, "R1": K, "R2": K, "M2": K},
    )
    F2 = omega_eq_product(A, B, ("z", "R1", "R2"))
    F2 = F2.extend(SU3_VARS, orders={v: K + 1 for v in SU3_VARS if v != "d"}, floors={"M1": -1})
    F3 = omega_geq(F2 - F2.shift({"M2": 1, "M1": -1}), "M1")
    F4 = omega_geq(F3.substitute({"M2": {"M2": 1, "M1": -1}}, floors={"M1": -(K + 1)}), "M1")
    if not F4.is_nonnegative():
        raise ArithmeticError("negative coefficient survived the su(3) composition")
    return F4.truncate(dict(orders))


def fusion_series_from_oracle(tag: str, K: int, labels=("L", "M", "N")) -> TruncatedSeries:
    """Series of Kac-Walton coefficients at levels 0..K (reference data)."""
    alg = get_algebra(tag)
    r = alg.rank
    names = ("d",) + tuple(f"{x}{i + 1}" for x in labels for i in range(r))
    if r == 1:
        names = ("d",) + labels
    terms: dict[Exponent, int] = {}
    for k in range(K + 1):
        ws = [finite_part(h) for h in integrable_weights(alg, k)]
        for lam, mu in product(ws, repeat=2):
            for nu, c in kac_walton_fusion(lam, mu, k, alg).multiplicities.items():
                terms[(k,) + tuple(lam) + tuple(mu) + tuple(nu)] = c
    return TruncatedSeries.build(names, {v: K for v in names}, terms)


# ---------------------------------------------------------------------------
# specialised series


SU4_G = ([1, 4, 13, 16, 13, 4, 1], [1] * 12 + [2])
SP4_G_NUM = [1, 2, 5, 2, 1]


def g_su4(order: int) -> list[int]:
    num, den = SU4_G
    return expand_univariate(univariate(num, den), order)


def g_sp4(order: int) -> list[int]:
    # 1/((1-d)^9 (1+d)) = (1-d)/((1-d)^9 (1-d^2))
    num = poly_power([1, -1], 1)
    numerator = [0] * (len(SP4_G_NUM) + 1)
    for i, a in enumerate(SP4_G_NUM):
        for j, b in enumerate(num):
            numerator[i + j] += a * b
    return expand_univariate(univariate(numerator, [1] * 9 + [2]), order)


def g_sp4_division(order: int) -> list[int]:
    """Same series by long division against (1-d)^9 (1+d)."""
    den = poly_power([1, -1], 9)
    den = [a + b for a, b in zip(den + [0], [0] + den)]
    return long_division(SP4_G_NUM, den, order)


@lru_cache(maxsize=None)
def total_coupling_count(tag: str, k: int) -> int:
    """Sum of all level-``k`` fusion coefficients over ordered pairs."""
    alg = get_algebra(tag)
    ws = [finite_part(h) for h in integrable_weights(alg, k)]
    return sum(sum(kac_walton_fusion(l, m, k, alg).multiplicities.values()) for l in ws for m in ws)


# ---------------------------------------------------------------------------
# level-rank duality


G_PUBLISHED = {
    0: ([1], [1]),
    1: ([1, 1], [1, 1, 1]),
    2: ([1, 3, 1], [1] * 6),
    3: ([1, 6, 10, 6, 1], [1] * 10),
    4: ([1, 13, 78, 257, 513, 642, 513, 257, 78, 13, 1], [1] * 12 + [2, 2, 2]),
}


def g_closed_form(n: int, order: int) -> list[int]:
    num, den = G_PUBLISHED[n]
    return expand_univariate(univariate(num, den), order)


@lru_cache(maxsize=None)
def augmented_count(n: int, k: int) -> int:
    """Level-``k`` su(n) couplings, each weighted by the number of ways to add full columns."""
    if n == 0:
        return 1
    if n == 1:
        return (k + 1) ** 2
    alg = get_algebra(f"su{n}")
    ws = [finite_part(h) for h in integrable_weights(alg, k)]
    total = 0
    for lam, mu in product(ws, repeat=2):
        c = sum(kac_walton_fusion(lam, mu, k, alg).multiplicities.values())
        total += c * (k - sum(lam) + 1) * (k - sum(mu) + 1)
    return total


def g_table(n_max: int, k_max: int) -> list[list[int]]:
    if n_max > 4:
        raise ValueError("enumeration is limited to n <= 4")
    return [[augmented_count(n, k) for k in range(k_max + 1)] for n in range(n_max + 1)]


def g_tilde(n: int, k_max: int) -> list[int]:
    """Closed form ((n+1)d - d^2)/(1-d)^(n+1)."""
    if n < 1:
        raise ValueError("n >= 1")
    return expand_univariate(univariate([0, n + 1, -1], [1] * (n + 1)), k_max)


@lru_cache(maxsize=None)
def g_tilde_count(n: int, k: int) -> int:
    """Couplings of the first fundamental weight with every level-``k`` weight, lambda side augmented."""
    if n < 2:
        raise ValueError("enumeration needs su(n) with n >= 2")
    alg = get_algebra(f"su{n}")
    omega1 = (1,) + (0,) * (n - 2)
    if k < 1:
        return 0
    total = 0
    for h in integrable_weights(alg, k):
        lam = finite_part(h)
        c = sum(kac_walton_fusion(lam, omega1, k, alg).multiplicities.values())
        total += c * (k - sum(lam) + 1)
    return total


def f_tilde_array(n_max: int, k_max: int) -> list[list[int]]:
    """Coefficient of r^n d^k in the sum of g_tilde(n) r^n; row n = 0 is zero."""
    rows = [[0] * (k_max + 1)]
    for n in range(1, n_max + 1):
        rows.append(g_tilde(n, k_max))
    return rows


def f_tilde_closed(n_max: int, k_max: int) -> list[list[int]]:
    """Expansion of d r (2 - d - r)/(1 - d - r)^2 by exact recurrence."""
    # 1/(1-u)^2 = sum (j+1) u^j with u = d + r
    from math import comb

    def c(n, k):
        if n < 0 or k < 0:
            return 0
        j = n + k
        return (j + 1) * comb(j, n)

    out = []
    for n in range(n_max + 1):
        row = []
        for k in range(k_max + 1):
            # d r (2 - d - r) = 2 d r - d^2 r - d r^2
            row.append(2 * c(n - 1, k - 1) - c(n - 1, k - 2) - c(n - 2, k - 1))
        out.append(row)
    return out
