import pytest

from fusionkit.algebra import get_algebra
from fusionkit.basisgen import (
    CatalogMismatch,
    Syzygy,
    column_count,
    count_by_basis,
    fusion_basis,
    fusion_elementaries,
    lattice_points,
    load_fixture,
    parse_fixture,
    sp4_rows_in_r,
    sp4_threshold_min_form,
    su2_threshold,
    syzygies,
    tensor_elementaries,
    threshold_closed_form,
    threshold_multiset,
    threshold_tableau_rule,
)
from fusionkit.fusion import fusion_coefficient, threshold_bruteforce
from fusionkit.tensor import LRVariables, SpCouplingVector, sp4_solutions

TENSOR_COUNTS = {"su2": 3, "su3": 8, "su4": 18, "sp4": 12}
FUSION_COUNTS = {"su2": 4, "su3": 9, "su4": 20, "sp4": 13}


@pytest.mark.parametrize("tag", sorted(TENSOR_COUNTS))
def test_tensor_catalog_size(tag):
    assert len(tensor_elementaries(tag)) == TENSOR_COUNTS[tag]


@pytest.mark.parametrize("tag", sorted(FUSION_COUNTS))
def test_fusion_catalog_matches_fixture(tag):
    derived = {c.name: c for c in fusion_elementaries(tag)}
    fx = load_fixture(tag)
    assert len(derived) == FUSION_COUNTS[tag] == len(fx.couplings)
    for c in fx.couplings:
        d = derived[c.name]
        assert d.k0 == c.k0
        assert d.triple == c.triple
        assert d.vector == c.vector


def test_sp4_level_two_elementaries():
    k0 = {c.name: c.k0 for c in fusion_elementaries("sp4")}
    assert [n for n, k in k0.items() if k == 2] == ["D1", "D2", "D3"]


def test_su4_level_two_elementaries():
    k0 = {c.name: c.k0 for c in fusion_elementaries("su4")}
    assert sorted(n for n, k in k0.items() if k == 2) == ["E1", "E2", "E3", "F"]


@pytest.mark.parametrize("tag", ["su2", "su3", "sp4", "su4"])
def test_fusion_basis_builds(tag):
    basis = fusion_basis(tag)
    assert all(row[0] == 0 for row in basis.tensor_rows)
    assert all(row[0] > 0 for row in basis.k_rows)


def test_k_row_counts():
    assert {t: len(fusion_basis(t).k_rows) for t in ("su2", "su3", "su4")} == {"su2": 1, "su3": 3, "su4": 10}
    assert len(fusion_basis("sp4").k_rows) == 4


def test_parse_fixture_errors():
    with pytest.raises(ValueError):
        parse_fixture("k a\n")
    with pytest.raises(ValueError):
        parse_fixture("[variables]\nk a\n[couplings]\nE | 1 | [1] x [1] > [1] | - | 1\n")
    with pytest.raises(ValueError):
        parse_fixture("[variables]\nk a\n[couplings]\nE | 1 | [1] by [1] | - | 1 0\n")


def test_tampered_basis_is_rejected(monkeypatch):
    import fusionkit.basisgen as bg

    from importlib import resources

    text = resources.files("fusionkit").joinpath("data", "su3.txt").read_text()
    tampered = parse_fixture(text.replace("k - l1 >= n13 + n11", "k - l1 >= n13"), "su3")
    monkeypatch.setattr(bg, "load_fixture", lambda tag: tampered)
    bg._fusion_basis.cache_clear()
    try:
        with pytest.raises(CatalogMismatch):
            bg.fusion_basis("su3")
    finally:
        bg._fusion_basis.cache_clear()


@pytest.mark.parametrize("tag", ["su2", "su3", "sp4", "su4"])
def test_syzygies_hold(tag):
    rels = syzygies(tag)
    assert rels or tag == "su2"
    for r in rels:
        assert r.left != r.right


def test_syzygy_levels_balance():
    # both sides of a relation carry the same total level
    for tag in ("su3", "sp4", "su4"):
        k0 = {c.name: c.k0 for c in fusion_elementaries(tag)}
        for r in syzygies(tag):
            assert sum(k0[n] * p for n, p in r.left) == sum(k0[n] * p for n, p in r.right)


def test_syzygy_failure_detected():
    s = Syzygy.parse("A B = C")
    assert not s.holds({"A": (1, 0), "B": (0, 1), "C": (1, 0)})
    assert s.holds({"A": (1, 0), "B": (0, 1), "C": (1, 1)})


def test_sp4_tensor_syzygies():
    assert len(syzygies("sp4", tensor=True)) == 9


@pytest.mark.parametrize(
    "tag,k,bound",
    [("su2", 4, 3), ("su3", 3, 2), ("sp4", 3, 2)],
)
def test_count_by_basis_matches_fusion(tag, k, bound):
    alg = get_algebra(tag)
    from itertools import product

    weights = [w for w in product(range(bound + 1), repeat=alg.rank) if alg.level(w) <= k]
    for lam, mu, nu in product(weights, repeat=3):
        assert count_by_basis(lam, mu, nu, k, alg) == fusion_coefficient(lam, mu, nu, k, alg)


def test_tableau_worked_example():
    t = LRVariables.build(3, (1, 2), {(1, 1): 1, (1, 2): 1, (2, 2): 1, (2, 3): 1, (1, 3): 0})
    assert column_count(t) == 4
    assert threshold_tableau_rule(t) == 4
    assert threshold_closed_form("su3", t.vector()) == 4


def test_tableau_rule_matches_closed_form_su3():
    from fusionkit.tensor import lr_tableaux
    from itertools import product

    for lam, mu in product(product(range(3), repeat=2), repeat=2):
        for t in lr_tableaux(lam, mu, 3):
            assert threshold_tableau_rule(t) == threshold_closed_form("su3", t.vector())


def test_sp4_min_form_matches_closed_form():
    from itertools import product

    for lam, mu in product(product(range(3), repeat=2), repeat=2):
        for v in sp4_solutions(lam, mu):
            assert sp4_threshold_min_form(v) == threshold_closed_form("sp4", v.vector())


def test_su2_half_sum():
    assert su2_threshold(1, 1, 2) == 2
    assert threshold_multiset((3,), (2,), (1,), "su2") == (su2_threshold(3, 2, 1),)
    with pytest.raises(ValueError):
        su2_threshold(1, 1, 1)


def test_threshold_multiset_vs_bruteforce():
    alg = get_algebra("su3")
    for lam, mu, nu in [((1, 1), (1, 1), (1, 1)), ((2, 1), (1, 2), (1, 1)), ((2, 0), (0, 2), (1, 1))]:
        assert threshold_multiset(lam, mu, nu, alg) == threshold_bruteforce(lam, mu, nu, alg).levels


def test_adjoint_thresholds():
    assert threshold_multiset((1, 1), (1, 1), (1, 1), "su3") == (2, 3)


def test_sp4_rows_in_r():
    rows = sp4_rows_in_r([(0, 0, 0, 1, 0, -2, 2, 0, -1)])
    assert rows == ["m1 + r2 >= r1 + q"]


def test_lattice_points_size():
    assert len(lattice_points((1, 1), (1, 1), (1, 1), "su3")) == 2
