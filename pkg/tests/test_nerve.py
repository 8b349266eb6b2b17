import pytest

from groupoidal.site_core import (Mor, compose, fibre_product, is_iso,
                                  passed, terminal)
from groupoidal.backends import make_finset
from groupoidal.groupoid import (cyclic_groupoid, pair_groupoid,
                                 unit_groupoid)
from groupoidal.action import unit_bibundle
from groupoidal.bibundle import dual
from groupoidal.nerve import (NSimplex, NotMonotone, build_simplex,
                              diagonal_groupoid, edge_bibundle,
                              horn_fill_inner2, restrict_simplex,
                              simplex_from_bibundle, simplex_from_groupoid,
                              unique_inner3_check, validate_simplex)


def test_zero_simplex(Z2):
    sx = simplex_from_groupoid(Z2)
    assert passed(validate_simplex(sx))
    g = diagonal_groupoid(sx, 0)
    assert g.u == Z2.u and g.i == Z2.i


def test_one_simplex_from_bibundle(Z2, EQ23):
    for b in (unit_bibundle(Z2), EQ23):
        sx = simplex_from_bibundle(b)
        assert passed(validate_simplex(sx))
        back = edge_bibundle(sx, 0, 1)
        assert back.left.mult == b.left.mult
        assert back.right.mult == b.right.mult


def test_horn_fill_unit_chain(Z2):
    sx = horn_fill_inner2(unit_bibundle(Z2), unit_bibundle(Z2))
    assert sx.n == 2
    assert passed(validate_simplex(sx))
    assert len(sx.composite.X) == 2


def test_horn_fill_equivalence_chain(EQ23):
    sx = horn_fill_inner2(EQ23, dual(EQ23))
    assert passed(validate_simplex(sx))
    assert len(sx.XX[(0, 2)]) == 4


def test_faces_and_degeneracies(Z2):
    sx = horn_fill_inner2(unit_bibundle(Z2), unit_bibundle(Z2))
    for phi in ([0, 1], [1, 2], [0, 2]):
        face = restrict_simplex(phi, sx)
        assert passed(validate_simplex(face))
    # the (0, 2)-face carries the composite edge
    face02 = restrict_simplex([0, 2], sx)
    assert face02.XX[(0, 1)] == sx.XX[(0, 2)]
    # degeneracy of an edge
    edge = restrict_simplex([0, 1], sx)
    deg = restrict_simplex([0, 0, 1], edge)
    assert passed(validate_simplex(deg))


def test_simplicial_identity(Z2):
    """Restricting twice equals restricting along the composite
    reindexing."""
    sx = horn_fill_inner2(unit_bibundle(Z2), unit_bibundle(Z2))
    a = restrict_simplex([0, 1], restrict_simplex([0, 2], sx))
    b = restrict_simplex([0, 2], sx)
    assert a.XX == b.XX and a.r == b.r and a.s == b.s and a.m == b.m


def test_restrict_rejects_non_monotone(Z2):
    sx = horn_fill_inner2(unit_bibundle(Z2), unit_bibundle(Z2))
    with pytest.raises(NotMonotone):
        restrict_simplex([2, 0], sx)


def degenerate_3_simplex(g):
    """All edges the unit bibundle of g, all multiplications g.m."""
    u = unit_bibundle(g)
    edges = {(i, j): u for i in range(3) for j in range(i + 1, 4)}
    inner = {(i, j, k): g.m
             for i in range(4) for j in range(i + 1, 4)
             for k in range(j + 1, 4)}
    return build_simplex([g, g, g, g], edges, inner)


def test_two_fillers_at_dimension_two(Z2):
    """Inner 2-horns over a one-object group need not fill uniquely: the
    shift by the nontrivial loop is a second coherent filler.  Uniqueness
    only starts at dimension three."""
    full = horn_fill_inner2(unit_bibundle(Z2), unit_bibundle(Z2))
    m = dict(full.m)
    wanted = m.pop((0, 1, 2))
    horn = NSimplex(2, full.X, full.XX, full.r, full.s, m)
    out = unique_inner3_check(horn, (0, 1, 2))
    assert len(out["fillers"]) == 2
    assert wanted in out["fillers"]


def test_unique_inner3_filler(Z2):
    full = degenerate_3_simplex(Z2)
    assert passed(validate_simplex(full))
    m = dict(full.m)
    wanted = m.pop((0, 1, 3))
    horn = NSimplex(3, full.X, full.XX, full.r, full.s, m)
    out = unique_inner3_check(horn, (0, 1, 3))
    assert out["fillers"] == [wanted]


def test_unique_inner3_filler_pair_groupoid(S2):
    g = pair_groupoid(S2)
    full = degenerate_3_simplex(g)
    assert passed(validate_simplex(full))
    m = dict(full.m)
    wanted = m.pop((0, 2, 3))
    horn = NSimplex(3, full.X, full.XX, full.r, full.s, m)
    out = unique_inner3_check(horn, (0, 2, 3))
    assert out["fillers"] == [wanted]


def test_corrupted_horn_has_no_filler(S2):
    """Twisting s_03 breaks the boundary equations for every candidate
    filler of the missing inner multiplication."""
    g = pair_groupoid(S2)
    full = degenerate_3_simplex(g)
    swap = Mor(S2, S2, {"a": "b", "b": "a"})
    s = dict(full.s)
    s[(0, 3)] = compose(swap, s[(0, 3)])
    # m_033 must be rebuilt on the fibre product of the twisted source
    fp = fibre_product(s[(0, 3)], full.r[(3, 3)])
    m = dict(full.m)
    m[(0, 3, 3)] = Mor(fp.apex, full.XX[(0, 3)],
                       {e: g.kernel.index[(g.r(v), g.s(w))]
                        for e, (v, w) in fp.pairing.items()})
    m.pop((0, 1, 3))
    horn = NSimplex(3, full.X, full.XX, full.r, s, m)
    out = unique_inner3_check(horn, (0, 1, 3))
    assert out["fillers"] == []


def test_degenerate_from_zero_simplex_fills_uniquely(Z2):
    sx = restrict_simplex([0, 0, 0, 0], simplex_from_groupoid(Z2))
    assert passed(validate_simplex(sx))
    m = dict(sx.m)
    wanted = m.pop((0, 1, 2))
    horn = NSimplex(3, sx.X, sx.XX, sx.r, sx.s, m)
    out = unique_inner3_check(horn, (0, 1, 2))
    assert out["fillers"] == [wanted]


def test_validate_flags_broken_associativity(Z2):
    full = horn_fill_inner2(unit_bibundle(Z2), unit_bibundle(Z2))
    m = dict(full.m)
    old = m[(0, 1, 2)]
    # a constant inner multiplication satisfies the boundary equations
    # over one object but fails associativity
    const = sorted(old.cod.elements)[0]
    m[(0, 1, 2)] = Mor(old.dom, old.cod,
                       {e: const for e in old.dom.elements})
    bad = NSimplex(2, full.X, full.XX, full.r, full.s, m)
    rep = validate_simplex(bad)
    assert not passed(rep)


def test_build_simplex_matches_horn_fill(Z2):
    u = unit_bibundle(Z2)
    c = horn_fill_inner2(u, u)
    built = build_simplex([Z2, Z2, Z2],
                          {(0, 1): u, (1, 2): u, (0, 2): c.composite},
                          {(0, 1, 2): c.m[(0, 1, 2)]})
    assert passed(validate_simplex(built))
