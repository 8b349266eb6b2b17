"""Simplices of groupoids and bibundles.

An n-simplex is a family of carriers X_i, edge spaces X_ij (i <= j) with
range/source maps and partial multiplications m_ijk; the diagonal data
are groupoids, the edges are bibundle functors between them, and the
inner multiplications descend to isomorphisms from composites.
"""

from itertools import combinations_with_replacement, product

from .site_core import (BoundaryMismatch, Finding, Mor, SiteError,
                        fibre_product, is_cover, is_iso, pair_id, passed)
from .action import Action, Bibundle, validate_bibundle
from .bibundle import classify, compose_bibundles, validate_bibundle_map


class NotMonotone(SiteError):
    pass


class NSimplex:
    """X: dict i -> Obj; XX: dict (i,j) -> Obj; r, s: dicts (i,j) -> Mor;
    m: dict (i,j,k) -> Mor on the fibre product of s_ij with r_jk."""

    def __init__(self, n, X, XX, r, s, m):
        self.n = n
        self.X, self.XX, self.r, self.s, self.m = X, XX, r, s, m
        self._fp = {}
        for (i, j) in XX:
            assert 0 <= i <= j <= n
            assert r[(i, j)].dom == XX[(i, j)] and r[(i, j)].cod == X[i]
            assert s[(i, j)].dom == XX[(i, j)] and s[(i, j)].cod == X[j]
        for (i, j, k), mm in m.items():
            assert 0 <= i <= j <= k <= n
            assert mm.dom == self.fp(i, j, k).apex
            assert mm.cod == XX[(i, k)]

    def fp(self, i, j, k):
        if (i, j, k) not in self._fp:
            self._fp[(i, j, k)] = fibre_product(self.s[(i, j)],
                                                self.r[(j, k)])
        return self._fp[(i, j, k)]

    def mul(self, i, j, k, x, y):
        return self.m[(i, j, k)](pair_id(x, y))

    def triples(self):
        return list(combinations_with_replacement(range(self.n + 1), 3))

    def __repr__(self):
        return "NSimplex(n=%d)" % self.n


def diagonal_groupoid(sx, i):
    """The groupoid on X_i carried by the diagonal edge, with unit and
    inversion recovered from the multiplication."""
    from .groupoid import from_multiplication
    return from_multiplication(sx.X[i], sx.XX[(i, i)], sx.r[(i, i)],
                               sx.s[(i, i)], sx.m[(i, i, i)])


def edge_bibundle(sx, i, j, gi=None, gj=None):
    """X_ij as a bibundle between the diagonal groupoids."""
    gi = gi or diagonal_groupoid(sx, i)
    gj = gj or diagonal_groupoid(sx, j)
    left = Action(gi, sx.XX[(i, j)], sx.r[(i, j)], sx.m[(i, i, j)],
                  "left", sx.fp(i, i, j))
    right = Action(gj, sx.XX[(i, j)], sx.s[(i, j)], sx.m[(i, j, j)],
                   "right", sx.fp(i, j, j))
    return Bibundle(gi, gj, left, right)


def validate_simplex(sx):
    """All six structural conditions, then the derived facts: diagonals
    are groupoids, edges are bibundle functors, and the inner
    multiplications descend to isomorphisms from the composites."""
    out = []
    n = sx.n

    def check(name, witness):
        out.append(Finding(name, witness is None, witness))

    w = None
    for (i, j) in sx.XX:
        if not is_cover(sx.r[(i, j)]):
            w = (i, j)
            break
    check("range-covers", w)
    w = None
    for i in range(n + 1):
        if not is_cover(sx.s[(i, i)]):
            w = i
            break
    check("diagonal-source-covers", w)
    w = None
    for (i, j, k) in sx.triples():
        fp = sx.fp(i, j, k)
        for e, (x, y) in fp.pairing.items():
            v = sx.m[(i, j, k)](e)
            if sx.r[(i, k)](v) != sx.r[(i, j)](x) or \
                    sx.s[(i, k)](v) != sx.s[(j, k)](y):
                w = (i, j, k, e)
                break
        if w:
            break
    check("boundary-equations", w)
    w = None
    for quad in combinations_with_replacement(range(n + 1), 4):
        i, j, k, l = quad
        for x in sx.XX[(i, j)].elements:
            for y in sx.XX[(j, k)].elements:
                if sx.s[(i, j)](x) != sx.r[(j, k)](y):
                    continue
                xy = sx.mul(i, j, k, x, y)
                for z in sx.XX[(k, l)].elements:
                    if sx.s[(j, k)](y) != sx.r[(k, l)](z):
                        continue
                    if sx.mul(i, k, l, xy, z) != \
                            sx.mul(i, j, l, x, sx.mul(j, k, l, y, z)):
                        w = (quad, x, y, z)
                        break
                if w:
                    break
            if w:
                break
        if w:
            break
    check("associativity", w)
    w = None
    for (i, j, k) in sx.triples():
        if i != j and j != k:
            continue
        fp = sx.fp(i, j, k)
        cod = fibre_product(sx.r[(i, j)], sx.r[(i, k)])
        try:
            sh = Mor(fp.apex, cod.apex,
                     {e: cod.index[(x, sx.m[(i, j, k)](e))]
                      for e, (x, y) in fp.pairing.items()})
        except KeyError:
            w = (i, j, k)
            break
        if not is_iso(sh):
            w = (i, j, k)
            break
    check("left-shear-iso", w)
    w = None
    for (i, j, k) in sx.triples():
        if j != k:
            continue
        fp = sx.fp(i, j, k)
        cod = fibre_product(sx.s[(i, k)], sx.s[(j, k)])
        try:
            sh = Mor(fp.apex, cod.apex,
                     {e: cod.index[(sx.m[(i, j, k)](e), y)]
                      for e, (x, y) in fp.pairing.items()})
        except KeyError:
            w = (i, j, k)
            break
        if not is_iso(sh):
            w = (i, j, k)
            break
    check("right-shear-iso", w)
    if not passed(out):
        return out

    groupoids = {}
    w = None
    for i in range(n + 1):
        try:
            groupoids[i] = diagonal_groupoid(sx, i)
        except (SiteError, AssertionError) as exc:
            w = (i, str(exc))
            break
    check("diagonals-are-groupoids", w)
    if w:
        return out
    edges = {}
    w = None
    for (i, j) in sx.XX:
        try:
            b = edge_bibundle(sx, i, j, groupoids[i], groupoids[j])
            assert passed(validate_bibundle(b))
            assert classify(b)["is_functor"]
            edges[(i, j)] = b
        except (SiteError, AssertionError) as exc:
            w = (i, j, str(exc))
            break
    check("edges-are-bibundle-functors", w)
    if w:
        return out
    w = None
    for (i, j, k) in sx.triples():
        if not (i < j < k):
            continue
        c = compose_bibundles(edges[(i, j)], edges[(j, k)])
        tbl = {}
        for e in c.middle.apex.elements:
            cl = c.middle_proj(e)
            v = sx.m[(i, j, k)](e)
            if cl in tbl and tbl[cl] != v:
                w = (i, j, k, "not invariant")
                break
            tbl[cl] = v
        if w:
            break
        descended = Mor(c.X, sx.XX[(i, k)], tbl)
        if not is_iso(descended) or \
                not passed(validate_bibundle_map(c, edges[(i, k)],
                                                 descended)):
            w = (i, j, k)
            break
    check("inner-multiplications-descend-to-isos", w)
    return out


def restrict_simplex(phi, sx):
    """Reindex along an order-preserving map {0..n} -> {0..m} given as a
    list of values."""
    phi = list(phi)
    if any(a > b for a, b in zip(phi, phi[1:])):
        raise NotMonotone(phi)
    n = len(phi) - 1
    assert all(0 <= v <= sx.n for v in phi)
    X = {i: sx.X[phi[i]] for i in range(n + 1)}
    XX, r, s, m = {}, {}, {}, {}
    for i in range(n + 1):
        for j in range(i, n + 1):
            XX[(i, j)] = sx.XX[(phi[i], phi[j])]
            r[(i, j)] = sx.r[(phi[i], phi[j])]
            s[(i, j)] = sx.s[(phi[i], phi[j])]
            for k in range(j, n + 1):
                m[(i, j, k)] = sx.m[(phi[i], phi[j], phi[k])]
    return NSimplex(n, X, XX, r, s, m)


def simplex_from_groupoid(g):
    return NSimplex(0, {0: g.G0}, {(0, 0): g.G1}, {(0, 0): g.r},
                    {(0, 0): g.s}, {(0, 0, 0): g.m})


def simplex_from_bibundle(b):
    """A 1-simplex from a bibundle functor."""
    g, h = b.g, b.h
    X = {0: g.G0, 1: h.G0}
    XX = {(0, 0): g.G1, (0, 1): b.X, (1, 1): h.G1}
    r = {(0, 0): g.r, (0, 1): b.r_anchor, (1, 1): h.r}
    s = {(0, 0): g.s, (0, 1): b.s_anchor, (1, 1): h.s}
    m = {(0, 0, 0): g.m, (0, 0, 1): b.left.mult,
         (0, 1, 1): b.right.mult, (1, 1, 1): h.m}
    return NSimplex(1, X, XX, r, s, m)


def build_simplex(groupoids, edges, inner):
    """Assemble a fully expanded simplex from groupoids 0..n, bibundle
    functors for i < j, and inner multiplications for i < j < k."""
    n = len(groupoids) - 1
    X = {i: groupoids[i].G0 for i in range(n + 1)}
    XX, r, s, m = {}, {}, {}, {}
    for i in range(n + 1):
        XX[(i, i)] = groupoids[i].G1
        r[(i, i)] = groupoids[i].r
        s[(i, i)] = groupoids[i].s
        m[(i, i, i)] = groupoids[i].m
    for (i, j), b in edges.items():
        XX[(i, j)] = b.X
        r[(i, j)] = b.r_anchor
        s[(i, j)] = b.s_anchor
        m[(i, i, j)] = b.left.mult
        m[(i, j, j)] = b.right.mult
    for key, mm in inner.items():
        m[key] = mm
    return NSimplex(n, X, XX, r, s, m)


def horn_fill_inner2(x01, x12):
    """Fill the inner horn of two composable bibundle functors with their
    composite and the quotient map."""
    c = compose_bibundles(x01, x12)
    sx = build_simplex([x01.g, x01.h, x12.h],
                       {(0, 1): x01, (1, 2): x12, (0, 2): c},
                       {(0, 1, 2): c.middle_proj})
    report = validate_simplex(sx)
    assert passed(report), [f for f in report if not f.ok]
    sx.composite = c
    return sx


def unique_inner3_check(sx, missing):
    """Search every map that could replace the missing inner
    multiplication; returns all completions that validate.

    Candidate values are constrained by the boundary equations before
    whole-simplex validation.
    """
    i, j, k = missing
    assert i < j < k and missing not in sx.m
    fp = sx.fp(i, j, k)
    cands = {}
    for e, (x, y) in fp.pairing.items():
        cands[e] = [v for v in sx.XX[(i, k)].elements
                    if sx.r[(i, k)](v) == sx.r[(i, j)](x)
                    and sx.s[(i, k)](v) == sx.s[(j, k)](y)]
        if not cands[e]:
            return {"fillers": []}
    keys = list(fp.apex.elements)
    fillers = []
    for choice in product(*(cands[e] for e in keys)):
        tbl = dict(zip(keys, choice))
        try:
            mm = Mor(fp.apex, sx.XX[(i, k)], tbl)
        except AssertionError:
            continue
        completed = dict(sx.m)
        completed[missing] = mm
        full = NSimplex(sx.n, sx.X, sx.XX, sx.r, sx.s, completed)
        if passed(validate_simplex(full)):
            fillers.append(mm)
    return {"fillers": fillers}
