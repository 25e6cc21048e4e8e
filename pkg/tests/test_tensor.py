from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fusionkit.algebra import get_algebra
from fusionkit.tensor import (
    LRVariables,
    SpCouplingVector,
    bz_system,
    dominant_multiplicities,
    dynkin_to_partition,
    lr_system,
    lr_tableaux,
    lr_tensor,
    lr_to_triple,
    partition_to_dynkin,
    racah_speiser_tensor,
    sp4_solutions,
    sp4_tensor,
    tensor_product,
    weight_system,
)


def dim(w, alg):
    return sum(weight_system(w, alg).values())


def test_weyl_dimensions_via_freudenthal():
    assert dim((1, 1), get_algebra("su3")) == 8
    assert dim((1, 0, 1), get_algebra("su4")) == 15
    assert dim((1, 0), get_algebra("sp4")) == 4
    assert dim((0, 1), get_algebra("sp4")) == 5
    assert dim((1, 0), get_algebra("g2")) == 7


def test_dominant_multiplicity_adjoint_zero_weight():
    assert dominant_multiplicities((1, 1), "su3")[(0, 0)] == 2


def test_su3_octet_square():
    alg = get_algebra("su3")
    got = racah_speiser_tensor((1, 1), (1, 1), alg)
    assert got == {(0, 0): 1, (1, 1): 2, (3, 0): 1, (0, 3): 1, (2, 2): 1}


@pytest.mark.parametrize("tag,box", [("su2", 5), ("su3", 2), ("su4", 1)])
def test_lr_equals_racah_speiser(tag, box):
    alg = get_algebra(tag)
    N = alg.rank + 1
    for lam, mu in product(product(range(box + 1), repeat=alg.rank), repeat=2):
        assert lr_tensor(lam, mu, N) == racah_speiser_tensor(lam, mu, alg)


def test_bz_equals_racah_speiser():
    alg = get_algebra("sp4")
    for lam, mu in product(product(range(3), repeat=2), repeat=2):
        assert sp4_tensor(lam, mu) == racah_speiser_tensor(lam, mu, alg)


def test_dimension_is_multiplicative():
    alg = get_algebra("sp4")
    for lam, mu in product(product(range(2), repeat=2), repeat=2):
        prod = sum(m * dim(nu, alg) for nu, m in tensor_product(lam, mu, alg).items())
        assert prod == dim(lam, alg) * dim(mu, alg)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_tableaux_satisfy_lr_system(N):
    sys = lr_system(N)
    r = N - 1
    for lam, mu in product(product(range(2), repeat=r), repeat=2):
        for t in lr_tableaux(lam, mu, N):
            assert sys.satisfied(t.vector())
            a, b, _ = lr_to_triple(t)
            assert (a, b) == (lam, mu)


def test_partition_roundtrip():
    for w in product(range(3), repeat=3):
        assert partition_to_dynkin(dynkin_to_partition(w, 4), 4) == w


def test_lr_variables_vector_roundtrip():
    t = LRVariables.build(3, (1, 2), {(1, 1): 1, (1, 2): 1, (2, 2): 1, (2, 3): 1})
    assert LRVariables.from_vector(3, t.vector()) == t
    with pytest.raises(KeyError):
        LRVariables.build(3, (0, 0), {(3, 3): 1})


def test_sp4_solutions_satisfy_bz():
    sys = bz_system()
    for lam, mu in product(product(range(3), repeat=2), repeat=2):
        for v in sp4_solutions(lam, mu):
            assert v.satisfies() and sys.satisfied(v.vector())
            assert SpCouplingVector.from_vector(v.vector()) == v


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["su3", "sp4", "g2"]), st.data())
def test_tensor_commutes(tag, data):
    alg = get_algebra(tag)
    lab = st.tuples(*[st.integers(0, 2)] * alg.rank)
    lam, mu = data.draw(lab), data.draw(lab)
    assert racah_speiser_tensor(lam, mu, alg) == racah_speiser_tensor(mu, lam, alg)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_su3_conjugation_symmetry(data):
    alg = get_algebra("su3")
    lab = st.tuples(st.integers(0, 2), st.integers(0, 2))
    lam, mu = data.draw(lab), data.draw(lab)
    a = racah_speiser_tensor(lam, mu, alg)
    b = racah_speiser_tensor(lam[::-1], mu[::-1], alg)
    assert {nu[::-1]: m for nu, m in a.items()} == b
