import pytest
from hypothesis import given, strategies as st

from groupoidal.site_core import (BoundaryMismatch, Mor, Obj, all_maps,
                                  axiom_harness, coequalizer, compose,
                                  copair, disjoint_union, fibre_product,
                                  identity, inverse, is_cover, is_iso,
                                  is_open_map, is_surjective, kernel_pair,
                                  mor_product, obj_product, pair_id,
                                  passed, terminal, to_terminal)
from groupoidal.backends import (all_finsets, all_finspaces, discrete,
                                 indiscrete, make_finset, make_finspace,
                                 sierpinski)


def test_mor_basics(S2, PT, p2):
    assert p2("a") == "*"
    assert p2.image(S2.elements) == {"*"}
    assert set(p2.fibre("*")) == {"a", "b"}
    with pytest.raises(AssertionError):
        Mor(S2, PT, {"a": "*"})          # partial table
    with pytest.raises(AssertionError):
        Mor(S2, PT, {"a": "*", "b": "?"})  # value outside codomain


def test_compose_unit_laws(S2, PT, p2):
    assert compose(p2, identity(S2)) == p2
    assert compose(identity(PT), p2) == p2
    swap = Mor(S2, S2, {"a": "b", "b": "a"})
    assert compose(swap, swap) == identity(S2)


def test_compose_boundary_mismatch(S2, PT, p2):
    with pytest.raises(BoundaryMismatch):
        compose(p2, p2)


def test_constant_forced_by_totality(S3, PT):
    one = make_finset(["c"])
    incl = Mor(one, S3, {"c": "c"})
    p3 = Mor(S3, PT, {x: "*" for x in "cde"})
    assert compose(p3, incl) == Mor(one, PT, {"c": "*"})


def test_finset_covers_are_surjections(S2, PT, p2):
    assert is_cover(p2)
    notonto = Mor(S2, S2, {"a": "a", "b": "a"})
    assert not is_cover(notonto)
    assert is_surjective(notonto) is False


def test_fintop_cover_is_open_surjection():
    sier = sierpinski()
    d2 = discrete(["0", "1"])
    f = Mor(d2, sier, {"0": "0", "1": "1"})
    # continuous bijection from the discrete space, but not open
    assert is_surjective(f) and not is_open_map(f)
    assert not is_cover(f)
    g = Mor(sier, sier, {"0": "0", "1": "1"})
    assert is_cover(g)


def test_iso_and_inverse(S2):
    swap = Mor(S2, S2, {"a": "b", "b": "a"})
    assert is_iso(swap)
    assert inverse(swap) == swap
    assert not is_iso(Mor(S2, S2, {"a": "a", "b": "a"}))


def test_fibre_product_universal(S2, S3, PT, p2, p3):
    fp = fibre_product(p2, p3)
    assert len(fp.apex) == 6
    for e, (x, y) in fp.pairing.items():
        assert p2(x) == p3(y)
        assert fp.pr1(e) == x and fp.pr2(e) == y
        assert fp.index[(x, y)] == e
    # pullback of a cover along anything is a cover
    assert is_cover(fp.pr1)


def test_fibre_product_fintop_neighbourhoods():
    sier = sierpinski()
    f = Mor(sier, sier, {"0": "0", "1": "1"})
    fp = fibre_product(f, f)
    # the diagonal-ish square: minimal opens intersect the apex
    for e, (x, y) in fp.pairing.items():
        n = fp.apex.nbhd[e]
        for e2 in n:
            x2, y2 = fp.pairing[e2]
            assert x2 in sier.nbhd[x] and y2 in sier.nbhd[y]


def test_kernel_pair_is_cech_square(p2):
    k = kernel_pair(p2)
    assert len(k.apex) == 4


def test_coequalizer_collapses(S2, PT, p2):
    k = kernel_pair(p2)
    c = coequalizer(k.pr1, k.pr2)
    assert len(c.quotient) == 1
    assert is_cover(c.proj)
    # least-id representative naming
    assert set(c.quotient.elements) == {"a"}


def test_coequalizer_of_identity(S2):
    c = coequalizer(identity(S2), identity(S2))
    assert len(c.quotient) == 2


def test_fintop_quotient_topology():
    # collapse the two closed points of a 3-point fan; quotient is Sierpinski
    X = make_finspace(["o", "p", "q"],
                      [[], ["o"], ["o", "p"], ["o", "q"], ["o", "p", "q"]])
    two = Obj("fintop", ["w", "v"], {"w": frozenset(["w", "v"]),
                                     "v": frozenset(["v"])})
    f = Mor(two, X, {"w": "p", "v": "o"})
    g = Mor(two, X, {"w": "q", "v": "o"})
    c = coequalizer(f, g)
    assert len(c.quotient) == 2
    assert is_open_map(c.proj) and is_cover(c.proj)


def test_all_maps_count(S2, S3):
    assert len(list(all_maps(S2, S3))) == 9
    assert len(list(all_maps(S3, S2))) == 8
    empty = make_finset([])
    assert len(list(all_maps(empty, S2))) == 1
    assert len(list(all_maps(S2, empty))) == 0


def test_products_and_coproducts(S2, S3):
    prod = obj_product(S2, S3)
    assert len(prod.apex if hasattr(prod, "apex") else prod) == 6
    total, inl, inr = disjoint_union(S2, S3)
    assert len(total) == 5
    f = Mor(S2, S2, {"a": "b", "b": "a"})
    g = Mor(S3, S2, {x: "a" for x in "cde"})
    h = copair(f, g, total, inl, inr)
    assert h(inl("a")) == "b" and h(inr("d")) == "a"


def test_pair_id_round_trip():
    assert pair_id("x", "y") == "x|y"


def test_terminal_and_to_terminal(S2):
    t = terminal("finset")
    assert len(t) == 1
    assert is_cover(to_terminal(S2))


def test_axiom_harness_finset_small():
    objs = all_finsets(2)
    mors = [f for a in objs for b in objs for f in all_maps(a, b)]
    rep = axiom_harness(objs, mors)
    assert passed(rep), [f for f in rep if not f.ok]
    sat = next(f for f in rep if f.check == "saturation-witness")
    assert "saturated" in str(sat.witness)


def test_axiom_harness_fintop_saturation_witness():
    objs = all_finspaces(2)
    mors = [f for a in objs for b in objs for f in all_maps(a, b)]
    rep = axiom_harness(objs, mors)
    assert passed(rep), [f for f in rep if not f.ok]
    sat = next(f for f in rep if f.check == "saturation-witness")
    assert "saturated" not in str(sat.witness)


def test_final_axiom_empty_exception():
    objs = all_finsets(2)
    mors = [f for a in objs for b in objs for f in all_maps(a, b)]
    rep = axiom_harness(objs, mors, include_empty_in_28=True)
    bad = [f for f in rep if not f.ok]
    assert [f.check for f in bad] == ["covers-to-final"]


@given(st.integers(1, 4), st.data())
def test_coequalizer_is_universal(n, data):
    """proj coequalizes, and any map equalizing the pair factors."""
    X = make_finset(["x%d" % i for i in range(n)])
    W = make_finset(["w0", "w1"])
    f_tab = data.draw(st.lists(st.sampled_from(X.elements_list
                                               if hasattr(X, "elements_list")
                                               else sorted(X.elements)),
                               min_size=n, max_size=n))
    g_tab = data.draw(st.lists(st.sampled_from(sorted(X.elements)),
                               min_size=n, max_size=n))
    dom = make_finset(["d%d" % i for i in range(n)])
    f = Mor(dom, X, dict(zip(sorted(dom.elements), f_tab)))
    g = Mor(dom, X, dict(zip(sorted(dom.elements), g_tab)))
    c = coequalizer(f, g)
    assert compose(c.proj, f) == compose(c.proj, g)
    for h in all_maps(X, W):
        if compose(h, f) == compose(h, g):
            # h factors uniquely through the quotient
            tbl = {}
            for x in X.elements:
                q = c.proj(x)
                assert tbl.setdefault(q, h(x)) == h(x)
