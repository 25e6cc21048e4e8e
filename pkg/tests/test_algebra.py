from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fusionkit.algebra import (
    affine_extend,
    affine_level,
    compute_Wf,
    finite_part,
    finite_weyl_group,
    get_algebra,
    integrable_weights,
    outer_apply,
    reflect_to_dominant,
    shifted_make_dominant,
    word_element,
)

TAGS = ["su2", "su3", "su4", "sp4", "g2"]


@pytest.mark.parametrize(
    "tag,h,order,weyl",
    [("su2", 2, 2, 2), ("su3", 3, 3, 6), ("su4", 4, 4, 24), ("sp4", 3, 2, 8), ("g2", 4, 1, 12)],
)
def test_basic_data(tag, h, order, weyl):
    alg = get_algebra(tag)
    assert alg.dual_coxeter == h
    assert alg.outer_order == order
    assert len(finite_weyl_group(alg)) == weyl
    assert alg.comarks[0] == 1


@pytest.mark.parametrize("n,k", [(2, 5), (3, 4), (4, 3), (5, 2)])
def test_integrable_weight_count_su(n, k):
    alg = get_algebra(f"su{n}")
    assert len(integrable_weights(alg, k)) == comb(k + n - 1, n - 1)


def test_integrable_weights_g2_level_two():
    # comarks (1, 1, 2) in this labelling
    alg = get_algebra("g2")
    assert alg.comarks == (1, 1, 2)
    assert sorted(finite_part(h) for h in integrable_weights(alg, 2)) == [(0, 0), (0, 1), (1, 0), (2, 0)]


@pytest.mark.parametrize("tag", TAGS)
def test_affine_extension_has_level(tag):
    alg = get_algebra(tag)
    for h in integrable_weights(alg, 3):
        assert affine_level(h, alg) == 3
        assert affine_extend(finite_part(h), 3, alg) == h


def test_su2_shifted_reflection():
    alg = get_algebra("su2")
    # level 2, finite label 3: lambda0 = -1 lies on the shifted wall
    assert shifted_make_dominant((-1, 3), alg) is None
    # level 2, finite label 4: reflected to label 2 with a sign flip
    assert shifted_make_dominant((-2, 4), alg) == ((0, 2), -1)


@pytest.mark.parametrize("tag", TAGS)
def test_outer_automorphism_preserves_level(tag):
    alg = get_algebra(tag)
    for h in integrable_weights(alg, 3):
        for a in range(alg.outer_order + 1):
            img = outer_apply(a, h, alg)
            assert affine_level(img, alg) == 3
        assert outer_apply(alg.outer_order, h, alg) == h


@pytest.mark.parametrize("tag", ["su2", "su3", "su4", "sp4"])
def test_wf_elements_map_doubled_alcove(tag):
    alg = get_algebra(tag)
    for w in compute_Wf(alg):
        again = word_element(w.word, alg)
        assert again.action == w.action


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(TAGS), st.lists(st.integers(-6, 6), min_size=2, max_size=3))
def test_reflect_to_dominant_lands_dominant(tag, labels):
    alg = get_algebra(tag)
    w = tuple(labels[: alg.rank])
    if len(w) < alg.rank:
        return
    res = reflect_to_dominant(w, alg, strict=False)
    assert res is not None
    dom, sign = res
    assert min(dom) >= 0 and sign in (1, -1)
    # norm is Weyl invariant
    assert alg.inner(dom, dom) == alg.inner(w, w)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["su2", "su3", "sp4", "g2"]), st.integers(0, 4), st.data())
def test_shifted_fold_is_integrable(tag, k, data):
    alg = get_algebra(tag)
    fin = tuple(data.draw(st.integers(0, 2 * k + 2)) for _ in range(alg.rank))
    res = shifted_make_dominant(affine_extend(fin, k, alg), alg)
    if res is not None:
        hat, sign = res
        assert min(hat) >= 0 and affine_level(hat, alg) == k
