import pytest

from groupoidal.site_core import (Mor, compose, fibre_product, identity,
                                  is_cover, is_iso, passed, terminal,
                                  to_terminal)
from groupoidal.backends import make_finset, sierpinski
from groupoidal.groupoid import cech_groupoid, cyclic_groupoid, pair_groupoid
from groupoidal.action import (Action, GMap, canonical_action,
                               enumerate_actions, validate_action)
from groupoidal.bundle import (NotPrincipal, PrincipalBundle,
                               basic_witness_functor, bundle_shear,
                               cech_action_reconstruction, check_principal,
                               induced_base_map, is_basic, orbit_space,
                               pullback_bundle)


def trivial_action(g, X):
    anchor = Mor(X, g.G0, {x: "*" for x in X.elements})
    pairs = fibre_product(anchor, g.r)
    tbl = {e: x for e, (x, gel) in pairs.pairing.items()}
    return Action(g, X, anchor, Mor(pairs.apex, X, tbl), "right", pairs)


def test_orbit_space_of_swap(SWAP):
    c = orbit_space(SWAP)
    assert len(c.quotient) == 1
    assert is_cover(c.proj)


def test_swap_is_principal_over_point(SWAP, p2):
    rep = check_principal(SWAP, p2)
    assert passed(rep)
    b = PrincipalBundle(SWAP, p2)
    assert b.solve("a", "b") == "1"
    assert b.solve("a", "a") == "0"


def test_trivial_action_not_principal(Z2, S2):
    a = trivial_action(Z2, S2)
    rep = check_principal(a, identity(S2))
    # projection is fine but the shear is 2:1
    names = {f.check for f in rep if not f.ok}
    assert names == {"shear-iso"}
    with pytest.raises(NotPrincipal):
        PrincipalBundle(a, identity(S2))


def test_is_basic_cross_checks(SWAP, Z2, S2):
    res = is_basic(SWAP)
    assert res["flag"] and passed(res["cross"])
    assert res["bundle"] is not None
    res2 = is_basic(trivial_action(Z2, S2))
    assert not res2["flag"]
    assert passed(res2["cross"])


def test_is_basic_fintop():
    """Free Z/2-action on the doubled Sierpinski space, exchanging sheets."""
    Z2 = cyclic_groupoid(2, backend="fintop")
    from groupoidal.site_core import Obj
    names = ["0a", "1a", "0b", "1b"]
    nbhd = {"1a": frozenset(["1a"]), "0a": frozenset(["0a", "1a"]),
            "1b": frozenset(["1b"]), "0b": frozenset(["0b", "1b"])}
    X = Obj("fintop", names, nbhd)
    anchor = Mor(X, Z2.G0, {x: "*" for x in names})
    pairs = fibre_product(anchor, Z2.r)
    flip = {"0a": "0b", "0b": "0a", "1a": "1b", "1b": "1a"}
    tbl = {e: (x if gel == "0" else flip[x])
           for e, (x, gel) in pairs.pairing.items()}
    a = Action(Z2, X, anchor, Mor(pairs.apex, X, tbl), "right", pairs)
    assert passed(validate_action(a))
    res = is_basic(a)
    assert res["flag"] and passed(res["cross"])
    assert len(res["orbits"].quotient) == 2


def test_canonical_cech_action_is_basic(CECH3):
    a = canonical_action(CECH3)
    res = is_basic(a)
    assert res["flag"]
    assert len(res["orbits"].quotient) == 1


def test_pullback_bundle(SWAP, p2, S3):
    b = PrincipalBundle(SWAP, p2)
    f = Mor(S3, p2.cod, {x: "*" for x in "cde"})
    pb = pullback_bundle(b, f)
    assert len(pb.X) == 6
    assert pb.Z == S3
    # to_total covers the original total space and is equivariant
    assert is_cover(pb.to_total)
    for e, (w, gel) in pb.action.pairs.pairing.items():
        assert pb.to_total(pb.action.mult(e)) == \
            b.action.act(pb.to_total(w), gel)


def test_induced_base_map(SWAP, S2, p2):
    b = PrincipalBundle(SWAP, p2)
    f = GMap(SWAP, SWAP, Mor(S2, S2, {"a": "b", "b": "a"}))
    q = induced_base_map(f, b, b)
    assert is_iso(q)


def test_basic_witness_functor(SWAP):
    F = basic_witness_functor(SWAP)
    # identity on objects, iso on arrows
    assert F.F0 == identity(SWAP.X)
    assert is_iso(F.F1)


def test_cech_action_reconstruction(p2, CECH2):
    # Čech groupoid of p2 acting canonically on its own objects
    a = canonical_action(CECH2)
    out = cech_action_reconstruction(a, p2)
    assert is_iso(out["iso"])
    assert len(out["fp"].apex) == len(a.X)


def test_all_cech_actions_are_basic(CECH2):
    """Every action of a kernel-pair groupoid is basic.  The groupoid is
    transitive, so actions need equal-size anchor fibres: use 4 points."""
    from groupoidal.site_core import all_maps
    X = make_finset(["p", "q", "r", "s"])
    count = 0
    for anchor in all_maps(X, CECH2.G0):
        for a in enumerate_actions(CECH2, X, anchor):
            count += 1
            assert is_basic(a)["flag"]
    assert count > 0
