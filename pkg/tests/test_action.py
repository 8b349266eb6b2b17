import pytest

from groupoidal.site_core import (Mor, compose, fibre_product, identity,
                                  pair_id, passed, terminal, to_terminal)
from groupoidal.backends import make_finset
from groupoidal.groupoid import (cyclic_groupoid, pair_groupoid,
                                 unit_groupoid, validate_groupoid)
from groupoidal.action import (Action, Actor, Bibundle, GMap, NotAnActor,
                               action_fibre_product, actor_apply,
                               actor_horizontal, actor_to_pair,
                               actor_two_arrow, canonical_action,
                               compose_actors, enumerate_actions,
                               hmap_from_section, identity_actor,
                               is_invariant, is_sheaf,
                               left_mult_actor, left_transformation_groupoid,
                               section_from_hmap, to_left, to_right,
                               transformation_groupoid, two_sided_transformation_groupoid,
                               unit_bibundle, validate_action, validate_actor,
                               validate_bibundle, validate_gmap)


def test_swap_is_an_action(SWAP):
    assert passed(validate_action(SWAP))
    assert is_sheaf(SWAP)
    assert SWAP.act("a", "1") == "b"
    assert SWAP.act("a", "0") == "a"


def test_broken_unit_caught(Z2, S2):
    anchor = Mor(S2, Z2.G0, {"a": "*", "b": "*"})
    pairs = fibre_product(anchor, Z2.r)
    tbl = {e: "a" for e in pairs.apex.elements}
    bad = Action(Z2, S2, anchor, Mor(pairs.apex, S2, tbl), "right", pairs)
    rep = validate_action(bad)
    assert not passed(rep)
    names = {f.check for f in rep if not f.ok}
    assert "unit" in names


def test_canonical_action(CECH2):
    a = canonical_action(CECH2)
    assert passed(validate_action(a))
    # acting by the arrow (a, b) moves a to b
    e = CECH2.kernel.index[("a", "b")]
    assert a.act("a", e) == "b"


def test_left_right_conversion_roundtrip(SWAP):
    l = to_left(SWAP)
    assert passed(validate_action(l))
    back = to_right(l)
    assert back.mult == SWAP.mult
    assert l.act("1", "a") == "b"


def test_transformation_groupoid_of_swap(SWAP):
    t = transformation_groupoid(SWAP)
    assert len(t.G0) == 2 and len(t.G1) == 4
    assert passed(validate_groupoid(t))
    # free and transitive: it is the pair groupoid on {a, b}
    arrows = {(t.r(e), t.s(e)) for e in t.arrows()}
    assert arrows == {("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")}


def test_left_transformation_groupoid(SWAP):
    l = to_left(SWAP)
    t = left_transformation_groupoid(l)
    assert passed(validate_groupoid(t))
    assert len(t.G1) == 4
    # range is the multiplication, source the carrier coordinate
    for e, (gel, x) in t.parts.items():
        assert t.s(e) == x
        assert t.r(e) == l.act(gel, x)


def test_gmap_and_invariance(SWAP, Z2, S2, PT, p2):
    f = GMap(SWAP, SWAP, Mor(S2, S2, {"a": "b", "b": "a"}))
    assert passed(validate_gmap(f))
    bad = GMap(SWAP, SWAP, Mor(S2, S2, {"a": "a", "b": "a"}))
    assert not passed(validate_gmap(bad))
    assert is_invariant(SWAP, p2)
    assert not is_invariant(SWAP, identity(S2))


def test_action_fibre_product_diagonal(SWAP, S2):
    f = GMap(SWAP, SWAP, identity(S2))
    diag, pr1, pr2 = action_fibre_product(f, f)
    # only matching pairs survive: the diagonal of S2 x S2
    assert len(diag.X) == 2
    assert passed(validate_action(diag))


def test_unit_bibundle(Z2, CECH2):
    for g in (Z2, CECH2):
        b = unit_bibundle(g)
        assert passed(validate_bibundle(b))
        assert b.X == g.G1


def test_bibundle_validation_catches_noncommuting(Z4):
    g = Z4
    left = Action(g, g.G1, g.r, g.m, "left", g.pairs)
    # right action twisted by inversion does not commute with left mult
    rpairs = fibre_product(g.s, g.r)
    # use the proper right action but corrupt one value
    right = Action(g, g.G1, g.s, g.m, "right", g.pairs)
    b = Bibundle(g, g, left, right)
    assert passed(validate_bibundle(b))


def test_two_sided_transformation_groupoid(Z2):
    b = unit_bibundle(Z2)
    t = two_sided_transformation_groupoid(b)
    assert passed(validate_groupoid(t))
    assert len(t.G1) == 2 * 2 * 2
    for e, (gel, x, hel) in t.triples.items():
        assert t.r(e) == b.lact(gel, x)
        assert t.s(e) == b.ract(x, hel)


def test_left_mult_actor_and_pair(Z4):
    a = left_mult_actor(Z4)
    assert passed(validate_actor(a))
    pair = actor_to_pair(a)
    assert passed(validate_action(pair["base"]))
    # reconstruction g·h = F(g, r(h))·h is asserted inside actor_to_pair
    t = pair["transformation"]
    assert len(t.G1) == 4


def test_actor_apply_and_compose(Z2, Z4):
    a = left_mult_actor(Z2)
    pushed = actor_apply(a, a.action)
    assert passed(validate_action(pushed))
    c = compose_actors(identity_actor(Z2), a)
    assert passed(validate_actor(c))
    assert c.action.mult == a.action.mult
    with pytest.raises(NotAnActor):
        compose_actors(left_mult_actor(Z4), a)


def test_section_hmap_round_trip(Z4):
    phi = Mor(Z4.G0, Z4.G1, {"*": "3"})
    f = hmap_from_section(Z4, phi)
    assert section_from_hmap(Z4, f) == phi
    notrans = Mor(Z4.G1, Z4.G1, {"0": "0", "1": "0", "2": "0", "3": "0"})
    with pytest.raises(AssertionError):
        section_from_hmap(Z4, notrans)


def test_actor_two_arrow(Z4):
    a = left_mult_actor(Z4)
    # in an abelian group every translation intertwines left mult with itself
    for k in "0123":
        phi = Mor(Z4.G0, Z4.G1, {"*": k})
        assert actor_two_arrow(phi, a, a)


def test_actor_horizontal_is_section(Z4):
    a = left_mult_actor(Z4)
    phi = Mor(Z4.G0, Z4.G1, {"*": "1"})
    psi = Mor(Z4.G0, Z4.G1, {"*": "2"})
    out = actor_horizontal(psi, phi, a)
    assert out.table == {"*": "3"}
    assert actor_two_arrow(out, a, a)


def test_actor_horizontal_interchange(Z4):
    """Horizontal product of two 2-arrows agrees with the vertical product
    of its whiskerings."""
    a = left_mult_actor(Z4)
    phi = Mor(Z4.G0, Z4.G1, {"*": "1"})
    psi = Mor(Z4.G0, Z4.G1, {"*": "3"})
    horiz = actor_horizontal(psi, phi, a)
    left_whisker = actor_horizontal(psi, Mor(Z4.G0, Z4.G1, {"*": "0"}), a)
    right_whisker = actor_horizontal(Mor(Z4.G0, Z4.G1, {"*": "0"}), phi, a)
    vert = {x: Z4.mul(left_whisker(x), right_whisker(x))
            for x in Z4.objects()}
    assert horiz.table == vert


def test_enumerate_actions_counts(Z2, S2):
    anchor = Mor(S2, Z2.G0, {"a": "*", "b": "*"})
    acts = list(enumerate_actions(Z2, S2, anchor))
    # trivial and the exchange action
    assert len(acts) == 2
    tables = {frozenset(a.mult.table.items()) for a in acts}
    assert len(tables) == 2
    lacts = list(enumerate_actions(Z2, S2, anchor, side="left"))
    assert len(lacts) == 2


def test_enumerate_actions_z3_on_three():
    Z3 = cyclic_groupoid(3)
    X = make_finset(["p", "q", "r"])
    anchor = to_terminal(X)
    anchor = Mor(X, Z3.G0, {x: "*" for x in X.elements})
    acts = list(enumerate_actions(Z3, X, anchor))
    # Z/3-actions on a 3-element set: trivial plus the two free 3-cycles
    assert len(acts) == 3
