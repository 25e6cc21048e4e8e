"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 internal
invariant breach.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from dataclasses import dataclass, field
from itertools import product
from typing import Callable

from . import basisgen, series
from .algebra import AlgebraData, finite_part, get_algebra, integrable_weights
from .diophantine import columns, format_row, hilbert_basis, roundtrip_check
from .fusion import (
    NotIntegrable,
    fusion_coefficient,
    fusion_with_thresholds,
    threshold_bruteforce,
    verlinde_table,
)
from .tensor import racah_speiser_tensor, tensor_product

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BREACH = 0, 1, 2, 3
SUITES = ("oracles", "thresholds", "bases", "series", "duality", "all")


class UsageError(ValueError):
    pass


class InvariantBreach(RuntimeError):
    pass


@dataclass
class JobConfig:
    algebra: str
    level: int | None = None
    weights: list[tuple[int, ...]] = field(default_factory=list)
    box: int | None = None
    level_cap: int | None = None
    order: int | None = None
    fmt: str = "table"

    def __post_init__(self) -> None:
        for name in ("box", "level_cap", "order"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise UsageError(f"{name} must be positive")
        if self.level is not None and self.level < 0:
            raise UsageError("level must be nonnegative")
        try:
            alg = get_algebra(self.algebra)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        for w in self.weights:
            if len(w) != alg.rank or min(w) < 0:
                raise UsageError(f"{list(w)} is not a dominant weight of {alg.tag}")

    @property
    def alg(self) -> AlgebraData:
        return get_algebra(self.algebra)


def parse_weight(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"cannot read weight {text!r}; use comma-separated Dynkin labels") from None


# ---------------------------------------------------------------------------
# rendering


def render_weight(w) -> str:
    return "(" + ",".join(str(x) for x in w) + ")"


def render_term(weight, levels) -> str:
    """``(2,1)_{3,3}`` style: one threshold per copy of the weight."""
    if not levels:
        return render_weight(weight)
    sub = str(levels[0]) if len(levels) == 1 else "{" + ",".join(str(k) for k in levels) + "}"
    return f"{render_weight(weight)}_{sub}"


_TERM_RE = re.compile(r"\(([\d,]*)\)(?:_(\d+|\{[\d,]+\}))?")


def parse_decomposition(text: str) -> dict[tuple[int, ...], list[int]]:
    """Inverse of the table rendering of a decomposition (right-hand side)."""
    out: dict[tuple[int, ...], list[int]] = {}
    for m in _TERM_RE.finditer(text):
        w = tuple(int(x) for x in m.group(1).split(",") if x)
        sub = m.group(2)
        levels = [] if sub is None else [int(x) for x in sub.strip("{}").split(",")]
        out[w] = levels
    return out


def fusion_payload(alg: AlgebraData, k: int, lam, mu) -> dict:
    res = fusion_with_thresholds(lam, mu, k, alg)
    terms = []
    for nu in sorted(res.multiplicities):
        levels = [k0 for k0 in res.thresholds[nu] if k0 <= k]
        if len(levels) != res.multiplicities[nu]:
            raise InvariantBreach(f"thresholds of {nu} disagree with the multiplicity")
        terms.append({"weight": list(nu), "multiplicity": res.multiplicities[nu], "thresholds": levels})
    weights, N = verlinde_table(alg, k)
    idx = {w: i for i, w in enumerate(weights)}
    for nu in weights:
        v = N[idx[tuple(lam)], idx[tuple(mu)], idx[nu]]
        if abs(v - round(v.real)) >= 1e-6 or round(v.real) != res.coefficient(nu):
            raise InvariantBreach(f"Verlinde sum disagrees with Kac-Walton at {nu}")
    return {"command": "fuse", "algebra": alg.tag, "level": k, "lhs": list(lam), "rhs": list(mu), "terms": terms}


def tensor_payload(alg: AlgebraData, lam, mu) -> dict:
    rs = racah_speiser_tensor(lam, mu, alg)
    comb = tensor_product(lam, mu, alg)
    if rs != comb:
        raise InvariantBreach("Racah-Speiser and the combinatorial rule disagree")
    terms = []
    for nu in sorted(rs):
        rec = threshold_bruteforce(lam, mu, nu, alg)
        terms.append({"weight": list(nu), "multiplicity": rs[nu], "thresholds": list(rec.levels)})
    return {"command": "tensor", "algebra": alg.tag, "lhs": list(lam), "rhs": list(mu), "terms": terms}


def threshold_payload(alg: AlgebraData, lam, mu, nu) -> dict:
    rec = threshold_bruteforce(lam, mu, nu, alg)
    out = {
        "command": "threshold",
        "algebra": alg.tag,
        "lhs": list(lam),
        "rhs": list(mu),
        "target": list(nu),
        "thresholds": list(rec.levels),
    }
    if alg.tag in basisgen.SUPPORTED:
        closed = list(basisgen.threshold_multiset(lam, mu, nu, alg))
        if closed != list(rec.levels):
            raise InvariantBreach("closed-form thresholds disagree with the level sweep")
        out["closed_form"] = closed
    return out


def basis_payload(alg: AlgebraData) -> dict:
    if alg.tag not in basisgen.SUPPORTED:
        raise UsageError(f"no fusion basis for {alg.tag}; choose one of {', '.join(basisgen.SUPPORTED)}")
    fx = basisgen.load_fixture(alg.tag)
    fb = basisgen.fusion_basis(alg)
    names = fx.names
    elems = basisgen.fusion_elementaries(alg)
    for c in elems:
        listed = fx.coupling(c.name)
        if listed.triple != c.triple or listed.k0 != c.k0:
            raise InvariantBreach(f"coupling {c.name} does not match its listed triple or threshold")
    V = fx.matrix
    ok = roundtrip_check(V) and set(hilbert_basis(fb.system)) == columns(V)
    return {
        "command": "basis",
        "algebra": alg.tag,
        "variables": list(names),
        "tensor_rows": [format_row(r, names) for r in fb.tensor_rows],
        "k_rows": [format_row(r, names) for r in fb.k_rows],
        "couplings": [
            {"name": c.name, "threshold": c.k0, "triple": [list(w) for w in c.triple], "vector": list(c.vector)}
            for c in elems
        ],
        "relations": [s.text for s in basisgen.syzygies(alg)],
        "roundtrip": ok,
    }


def render_table(payload: dict) -> str:
    cmd = payload["command"]
    if cmd in ("fuse", "tensor"):
        lhs = f"{render_weight(payload['lhs'])} x {render_weight(payload['rhs'])}"
        head = f"{payload['algebra']} level {payload['level']}: " if cmd == "fuse" else f"{payload['algebra']}: "
        rhs = " + ".join(render_term(t["weight"], t["thresholds"]) for t in payload["terms"]) or "0"
        rows = [f"{head}{lhs} = {rhs}", ""]
        width = max([len(render_weight(t["weight"])) for t in payload["terms"]] + [6])
        rows.append(f"{'weight':<{width}}  mult  thresholds")
        for t in payload["terms"]:
            rows.append(f"{render_weight(t['weight']):<{width}}  {t['multiplicity']:>4}  {','.join(map(str, t['thresholds']))}")
        return "\n".join(rows)
    if cmd == "threshold":
        line = (
            f"{payload['algebra']}: {render_weight(payload['lhs'])} x {render_weight(payload['rhs'])}"
            f" > {render_weight(payload['target'])}  thresholds {payload['thresholds']}"
        )
        if "closed_form" in payload:
            line += f"  closed form {payload['closed_form']}"
        return line
    if cmd == "basis":
        out = [f"fusion basis of {payload['algebra']} over {' '.join(payload['variables'])}", "", "tensor rows:"]
        out += [f"  {r}" for r in payload["tensor_rows"]]
        out += ["", f"k-rows ({len(payload['k_rows'])}):"] + [f"  {r}" for r in payload["k_rows"]]
        out += ["", f"elementary couplings ({len(payload['couplings'])}):"]
        for c in payload["couplings"]:
            a, b, n = (render_weight(w) for w in c["triple"])
            out.append(f"  {c['name']:<4} {a} x {b} > {n}  threshold {c['threshold']}")
        out += ["", "relations:"] + [f"  {r}" for r in payload["relations"] or ["(none)"]]
        out += ["", f"round trip: {'pass' if payload['roundtrip'] else 'FAIL'}"]
        return "\n".join(out)
    if cmd == "verify":
        out = []
        for c in payload["checks"]:
            out.append(f"{'PASS' if c['passed'] else 'FAIL'}  {c['suite']:<10} {c['name']}  {c['detail']}")
        out.append(f"{payload['passed']}/{payload['total']} checks passed in {payload['seconds']:.1f}s")
        return "\n".join(out)
    raise ValueError(f"no table rendering for {cmd!r}")


# ---------------------------------------------------------------------------
# verification suites


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""


def _all_triples(alg: AlgebraData, k: int):
    ws = [finite_part(h) for h in integrable_weights(alg, k)]
    return ws, list(product(ws, repeat=3))


def suite_oracles(quick: bool) -> list[Check]:
    caps = {"su2": 8, "su3": 5, "sp4": 4, "su4": 3}
    if quick:
        caps = {"su2": 6, "su3": 3, "sp4": 3, "su4": 2}
    out = []
    for tag, K in caps.items():
        alg = get_algebra(tag)
        bad = n = 0
        for k in range(K + 1):
            ws, _ = _all_triples(alg, k)
            weights, N = verlinde_table(alg, k)
            idx = {w: i for i, w in enumerate(weights)}
            for lam, mu, nu in product(ws, repeat=3):
                kw = fusion_coefficient(lam, mu, nu, k, alg)
                v = N[idx[lam], idx[mu], idx[nu]]
                cb = basisgen.count_by_basis(lam, mu, nu, k, alg)
                n += 1
                if abs(v - kw) >= 1e-6 or cb != kw:
                    bad += 1
        out.append(Check("oracles", f"{tag} k<={K}", bad == 0, f"{n} triples, {bad} disagreements"))
    return out


def suite_thresholds(quick: bool) -> list[Check]:
    boxes = {"su2": 3, "su3": 3, "sp4": 3, "su4": 2}
    if quick:
        boxes = {"su2": 3, "su3": 2, "sp4": 2, "su4": 1}
    out = []
    for tag, B in boxes.items():
        alg = get_algebra(tag)
        bad = n = 0
        for lam, mu in product(product(range(B + 1), repeat=alg.rank), repeat=2):
            for nu in racah_speiser_tensor(lam, mu, alg):
                if max(nu) > B:
                    continue
                n += 1
                if basisgen.threshold_multiset(lam, mu, nu, alg) != threshold_bruteforce(lam, mu, nu, alg).levels:
                    bad += 1
        out.append(Check("thresholds", f"{tag} labels<={B}", bad == 0, f"{n} triples, {bad} disagreements"))
    bad = 0
    for a, b, c in product(range(9), repeat=3):
        if (a + b + c) % 2 or c > a + b or a > b + c or b > a + c:
            continue
        if threshold_bruteforce((a,), (b,), (c,), get_algebra("su2")).levels != (basisgen.su2_threshold(a, b, c),):
            bad += 1
    out.append(Check("thresholds", "su2 half label sum", bad == 0, f"{bad} disagreements"))
    return out


def suite_bases(quick: bool) -> list[Check]:
    out = []
    for tag in ("su2", "su3", "sp4", "su4"):
        fx = basisgen.load_fixture(tag)
        try:
            basisgen.fusion_basis(tag)
            listed = True
        except basisgen.CatalogMismatch:
            listed = False
        rt = roundtrip_check(fx.matrix)
        out.append(Check("bases", f"{tag} round trip", listed and rt, f"dual matches list: {listed}, Hilbert basis = V: {rt}"))
    return out


def suite_series(quick: bool, order: int | None = None) -> list[Check]:
    out = []
    K = order or (3 if quick else 4)
    big = {v: K for v in series.SU2_VARS}
    pipe = series.su2_fusion_pipeline(big)
    closed = series.expand(series.su2_fusion_gf(), big, names=series.SU2_VARS)
    oracle = series.fusion_series_from_oracle("su2", K)
    out.append(Check("series", f"su2 pipeline order {K}", pipe == closed == oracle, f"{len(oracle)} terms"))
    K3 = min(K, 4)
    comp = series.su3_fusion_composition(K3)
    out.append(Check("series", f"su3 composition k<={K3}", comp == series.fusion_series_from_oracle("su3", K3), f"{len(comp)} terms"))
    K5 = 3 if quick else 5
    a, b = series.fussa_series(K5), series.fussb_series(K5)
    out.append(Check("series", f"su3 two forms order {K5}", a == b, f"{len(a)} terms"))
    n4 = order or 3
    g4 = series.g_su4(n4)
    counts = [series.total_coupling_count("su4", k) for k in range(n4 + 1)]
    out.append(Check("series", f"su4 G(d) through d^{n4}", g4 == counts, f"{g4} vs {counts}"))
    n6 = 4 if quick else 6
    gs = series.g_sp4(n6)
    cs = [series.total_coupling_count("sp4", k) for k in range(n6 + 1)]
    out.append(Check("series", f"sp4 G(d) through d^{n6}", gs == cs, f"{gs} vs {cs}"))
    return out


def suite_duality(quick: bool) -> list[Check]:
    out = []
    kmax = 5
    table = series.g_table(3, kmax)
    for n in (1, 2, 3):
        pub = series.g_closed_form(n, kmax)
        out.append(Check("duality", f"g_{n} row", table[n] == pub, f"{table[n]}"))
    m = 3 if quick else 4
    t = series.g_table(m, m)
    sym = all(t[i][j] == t[j][i] for i in range(m + 1) for j in range(m + 1))
    out.append(Check("duality", f"g_table({m},{m}) symmetric", sym, ""))
    bad = 0
    for n in range(2, 5):
        cf = series.g_tilde(n, 6 if not quick else 4)
        bad += sum(cf[k] != series.g_tilde_count(n, k) for k in range(len(cf)))
    out.append(Check("duality", "g_tilde closed form vs enumeration", bad == 0, f"{bad} disagreements"))
    arr = series.f_tilde_array(5, 5)
    ok = all(arr[i][j] == arr[j][i] for i in range(6) for j in range(6)) and arr == series.f_tilde_closed(5, 5)
    out.append(Check("duality", "f_tilde symmetric", ok, ""))
    return out


def run_suite(name: str, quick: bool, order: int | None = None) -> list[Check]:
    table: dict[str, Callable[[], list[Check]]] = {
        "oracles": lambda: suite_oracles(quick),
        "thresholds": lambda: suite_thresholds(quick),
        "bases": lambda: suite_bases(quick),
        "series": lambda: suite_series(quick, order),
        "duality": lambda: suite_duality(quick),
    }
    names = [s for s in SUITES if s != "all"] if name == "all" else [name]
    out: list[Check] = []
    for s in names:
        out.extend(table[s]())
    return out


def verify_payload(name: str, quick: bool, order: int | None) -> dict:
    start = time.perf_counter()
    checks = run_suite(name, quick, order)
    return {
        "command": "verify",
        "suite": name,
        "quick": quick,
        "checks": [c.__dict__ for c in checks],
        "passed": sum(c.passed for c in checks),
        "total": len(checks),
        "seconds": time.perf_counter() - start,
    }


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fusionkit", description="Affine Lie algebra fusion rules and fusion bases.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, alg=True):
        if alg:
            sp.add_argument("--alg", required=True, help="su2, su3, su4, ..., sp4 or g2")
        sp.add_argument("--format", choices=("table", "json"), default="table")

    f = sub.add_parser("fuse", help="level-k fusion with threshold levels")
    common(f)
    f.add_argument("-k", "--level", type=int, required=True)
    f.add_argument("--lhs", required=True)
    f.add_argument("--rhs", required=True)

    t = sub.add_parser("tensor", help="tensor product with threshold levels")
    common(t)
    t.add_argument("--lhs", required=True)
    t.add_argument("--rhs", required=True)

    th = sub.add_parser("threshold", help="threshold levels of one coupling")
    common(th)
    th.add_argument("--lhs", required=True)
    th.add_argument("--rhs", required=True)
    th.add_argument("--target", required=True)

    b = sub.add_parser("basis", help="fusion basis, elementary couplings and relations")
    common(b)

    v = sub.add_parser("verify", help="run a verification suite")
    common(v, alg=False)
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--quick", action="store_true")
    v.add_argument("--order", type=int, default=None, help="series truncation order")
    return p


def execute(args) -> dict:
    if args.command == "verify":
        if args.order is not None and args.order <= 0:
            raise UsageError("order must be positive")
        return verify_payload(args.suite, args.quick, args.order)
    weights = [parse_weight(getattr(args, n)) for n in ("lhs", "rhs", "target") if getattr(args, n, None) is not None]
    cfg = JobConfig(args.alg, getattr(args, "level", None), weights, fmt=args.format)
    alg = cfg.alg
    if args.command == "fuse":
        return fusion_payload(alg, cfg.level, *cfg.weights)
    if args.command == "tensor":
        return tensor_payload(alg, *cfg.weights)
    if args.command == "threshold":
        return threshold_payload(alg, *cfg.weights)
    return basis_payload(alg)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload = execute(args)
    except (UsageError, NotIntegrable) as exc:
        print(f"fusionkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvariantBreach, basisgen.CatalogMismatch, ArithmeticError) as exc:
        print(f"fusionkit: internal check failed: {exc}", file=sys.stderr)
        return EXIT_BREACH
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(render_table(payload))
    if payload["command"] == "verify":
        return EXIT_OK if payload["passed"] == payload["total"] else EXIT_FAIL
    if payload["command"] == "basis" and not payload["roundtrip"]:
        return EXIT_BREACH
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
