"""Internal groupoids over a finite site.

A groupoid is the tuple (G0, G1, r, s, m, u, i) with r, s covers and the
usual equations; multiplication lives on the canonical fibre product of
(s, r), so composability of a pair is exactly membership of its pair id
in the domain of m.
"""

from .site_core import (Finding, Mor, NotACover, SiteError, compose,
                        fibre_product, identity, is_cover, is_iso,
                        kernel_pair, pair_id, passed, terminal, to_terminal)


class NotAssociative(SiteError):
    pass


class ShearNotIso(SiteError):
    pass


class Groupoid:
    def __init__(self, G0, G1, r, s, m, u, i, pairs=None):
        assert r.dom == G1 and r.cod == G0
        assert s.dom == G1 and s.cod == G0
        assert u.dom == G0 and u.cod == G1
        assert i.dom == G1 and i.cod == G1
        if pairs is None:
            pairs = fibre_product(s, r)
        self.G0, self.G1 = G0, G1
        self.r, self.s, self.m, self.u, self.i = r, s, m, u, i
        self.pairs = pairs
        assert m.dom == pairs.apex and m.cod == G1
        self.backend = G0.backend

    def composable(self, a, b):
        return self.s(a) == self.r(b)

    def mul(self, a, b):
        return self.m(pair_id(a, b))

    def unit(self, x):
        return self.u(x)

    def inv(self, a):
        return self.i(a)

    def arrows(self):
        return self.G1.elements

    def objects(self):
        return self.G0.elements

    def __eq__(self, other):
        if not isinstance(other, Groupoid):
            return NotImplemented
        return (self.G0 == other.G0 and self.G1 == other.G1
                and self.r == other.r and self.s == other.s
                and self.m == other.m and self.u == other.u
                and self.i == other.i)

    def __hash__(self):
        return hash((self.G0, self.G1, self.r, self.s, self.m))

    def __repr__(self):
        return "Groupoid(|G0|=%d, |G1|=%d)" % (len(self.G0), len(self.G1))


def shear_maps(G0, G1, r, s, m, pairs):
    """The two maps built from multiplication whose invertibility makes a
    multiplication-only structure a groupoid: (x, g) -> (g, x·g) into the
    fibre product over s, s, and (g, x) -> (g, g·x) into the one over r, r."""
    ss = fibre_product(s, s)
    rr = fibre_product(r, r)
    t1 = {e: ss.index[(b, m(e))] for e, (a, b) in pairs.pairing.items()}
    t2 = {e: rr.index[(a, m(e))] for e, (a, b) in pairs.pairing.items()}
    return Mor(pairs.apex, ss.apex, t1), Mor(pairs.apex, rr.apex, t2)


def validate_groupoid(g):
    """Check every axiom; returns all failures, not just the first."""
    out = []
    arrows = g.arrows()

    def check(name, witness):
        out.append(Finding(name, witness is None, witness))

    def first(pred_pairs):
        try:
            for w, ok in pred_pairs:
                if not ok:
                    return w
        except KeyError as exc:
            # a product fell outside the composable pairs: boundary broken
            return "undefined composite at %s" % exc
        return None

    check("range-cover", None if is_cover(g.r) else "r is not a cover")
    check("source-cover", None if is_cover(g.s) else "s is not a cover")
    check("mult-range", first(
        (e, g.r(g.m(e)) == g.r(a))
        for e, (a, b) in g.pairs.pairing.items()))
    check("mult-source", first(
        (e, g.s(g.m(e)) == g.s(b))
        for e, (a, b) in g.pairs.pairing.items()))
    by_range = {}
    for b in arrows:
        by_range.setdefault(g.r(b), []).append(b)
    check("associativity", first(
        ((a, b, c), g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c)))
        for a in arrows for b in by_range.get(g.s(a), ())
        for c in by_range.get(g.s(b), ())))
    check("unit-section", first(
        (x, g.r(g.u(x)) == x and g.s(g.u(x)) == x) for x in g.objects()))
    check("left-unit", first(
        (a, g.mul(g.u(g.r(a)), a) == a) for a in arrows))
    check("right-unit", first(
        (a, g.mul(a, g.u(g.s(a))) == a) for a in arrows))
    check("inverse-boundaries", first(
        (a, g.s(g.i(a)) == g.r(a) and g.r(g.i(a)) == g.s(a))
        for a in arrows))
    check("left-inverse", first(
        (a, g.mul(g.i(a), a) == g.u(g.s(a))) for a in arrows))
    check("right-inverse", first(
        (a, g.mul(a, g.i(a)) == g.u(g.r(a))) for a in arrows))
    # derived identities
    check("unit-idempotent", first(
        (x, g.mul(g.u(x), g.u(x)) == g.u(x)) for x in g.objects()))
    check("inversion-involutive", first(
        (a, g.i(g.i(a)) == a) for a in arrows))
    check("inversion-antihom", first(
        ((a, b), g.i(g.mul(a, b)) == g.mul(g.i(b), g.i(a)))
        for a in arrows for b in arrows if g.composable(a, b)))
    try:
        sh1, sh2 = shear_maps(g.G0, g.G1, g.r, g.s, g.m, g.pairs)
        check("shear-right-iso", None if is_iso(sh1) else "not invertible")
        check("shear-left-iso", None if is_iso(sh2) else "not invertible")
    except (KeyError, AssertionError) as exc:
        check("shear-right-iso", "shear map undefined: %s" % exc)
    check("mult-cover", None if is_cover(g.m) else "m is not a cover")
    return out


def from_multiplication(G0, G1, r, s, m):
    """Recover unit and inversion from multiplication alone.

    The input must satisfy the multiplication-only groupoid description:
    r, s covers, boundary equations, associativity, and both shear maps
    invertible.  Unit and inversion are then forced: the left unit at
    r(g) is the only e with s(e) = r(g) and e·g = g, and it depends only
    on r(g); the inverse of g is the only h with h·g a unit.
    """
    if not is_cover(r):
        raise NotACover("r")
    if not is_cover(s):
        raise NotACover("s")
    pairs = fibre_product(s, r)
    assert m.dom == pairs.apex and m.cod == G1

    def mul(a, b):
        return m(pair_id(a, b))

    for e, (a, b) in pairs.pairing.items():
        assert r(m(e)) == r(a) and s(m(e)) == s(b), "boundary equations fail"
    by_range = {}
    for b in G1.elements:
        by_range.setdefault(r(b), []).append(b)
    for a in G1.elements:
        for b in by_range.get(s(a), ()):
            for c in by_range.get(s(b), ()):
                if mul(mul(a, b), c) != mul(a, mul(b, c)):
                    raise NotAssociative("(%s, %s, %s)" % (a, b, c))
    sh1, sh2 = shear_maps(G0, G1, r, s, m, pairs)
    if not is_iso(sh1):
        raise ShearNotIso("(x, g) -> (g, x·g)")
    if not is_iso(sh2):
        raise ShearNotIso("(g, x) -> (g, g·x)")

    left_unit = {}
    for gel in G1.elements:
        cands = [e for e in G1.elements
                 if s(e) == r(gel) and mul(e, gel) == gel]
        assert len(cands) == 1, "left unit at %s not unique" % gel
        left_unit[gel] = cands[0]
    utab = {}
    for gel in G1.elements:
        x = r(gel)
        if x in utab:
            assert utab[x] == left_unit[gel], \
                "unit candidate does not descend along r"
        else:
            utab[x] = left_unit[gel]
    assert set(utab) == set(G0.elements)
    u = Mor(G0, G1, utab)

    itab = {}
    for gel in G1.elements:
        cands = [h for h in G1.elements
                 if s(h) == r(gel) and mul(h, gel) == utab[s(gel)]]
        assert len(cands) == 1, "inverse of %s not unique" % gel
        itab[gel] = cands[0]
    i = Mor(G1, G1, itab)

    g = Groupoid(G0, G1, r, s, m, u, i, pairs=pairs)
    report = validate_groupoid(g)
    assert passed(report), [f for f in report if not f.ok]
    assert is_cover(m)
    return g


def unit_groupoid(X):
    """All arrows are units: G1 = G0 = X."""
    idx = identity(X)
    pairs = fibre_product(idx, idx)
    m = Mor(pairs.apex, X, {e: lr[0] for e, lr in pairs.pairing.items()})
    return Groupoid(X, X, idx, idx, m, idx, idx, pairs=pairs)


def cech_groupoid(p):
    """The kernel-pair groupoid of a cover p: X -> Y."""
    if not is_cover(p):
        raise NotACover("p")
    K = kernel_pair(p)
    r, s = K.pr1, K.pr2
    pairs = fibre_product(s, r)
    mtab = {}
    for e, (a, b) in pairs.pairing.items():
        x1, _ = K.pairing[a]
        _, x3 = K.pairing[b]
        mtab[e] = K.index[(x1, x3)]
    m = Mor(pairs.apex, K.apex, mtab)
    u = Mor(p.dom, K.apex, {x: K.index[(x, x)] for x in p.dom.elements})
    i = Mor(K.apex, K.apex,
            {e: K.index[(x2, x1)] for e, (x1, x2) in K.pairing.items()})
    g = Groupoid(p.dom, K.apex, r, s, m, u, i, pairs=pairs)
    g.kernel = K
    report = validate_groupoid(g)
    assert passed(report), [f for f in report if not f.ok]
    return g


def pair_groupoid(X):
    """Čech groupoid of the map to the point: all ordered pairs."""
    return cech_groupoid(to_terminal(X))


def pullback_groupoid(g, p):
    """Arrows are triples (x, h, y) with p(x) = r(h), s(h) = p(y).

    Returns the pulled-back groupoid together with the functor down to g
    (objects p, arrows the middle projection).  The triple decodings are
    attached as ``triples`` / ``triple_index``.
    """
    if not is_cover(p):
        raise NotACover("p")
    A = fibre_product(p, g.r)
    sA = compose(g.s, A.pr2)
    B = fibre_product(sA, p)
    triples = {}
    for e, (a, y) in B.pairing.items():
        x, h = A.pairing[a]
        triples[e] = (x, h, y)
    index = {t: e for e, t in triples.items()}
    G1x = B.apex
    rx = compose(A.pr1, B.pr1)
    sx = B.pr2
    pairsx = fibre_product(sx, rx)
    mtab = {}
    for e, (t1, t2) in pairsx.pairing.items():
        x1, h1, _ = triples[t1]
        _, h2, y2 = triples[t2]
        mtab[e] = index[(x1, g.mul(h1, h2), y2)]
    m = Mor(pairsx.apex, G1x, mtab)
    u = Mor(p.dom, G1x,
            {x: index[(x, g.unit(p(x)), x)] for x in p.dom.elements})
    i = Mor(G1x, G1x,
            {e: index[(y, g.inv(h), x)] for e, (x, h, y) in triples.items()})
    gx = Groupoid(p.dom, G1x, rx, sx, m, u, i, pairs=pairsx)
    gx.triples = triples
    gx.triple_index = index
    report = validate_groupoid(gx)
    assert passed(report), [f for f in report if not f.ok]
    from .morphism import Functor
    hyper = Functor(gx, g, p, Mor(G1x, g.G1,
                                  {e: t[1] for e, t in triples.items()}))
    return gx, hyper


def cyclic_groupoid(n, backend="finset"):
    """Z/n as a one-object groupoid with arrows 0..n-1."""
    assert n >= 1
    G0 = terminal(backend)
    names = [str(k) for k in range(n)]
    if backend == "finset":
        from .site_core import Obj
        G1 = Obj("finset", names)
    else:
        from .site_core import Obj
        G1 = Obj("fintop", names, {x: frozenset([x]) for x in names})
    const = Mor(G1, G0, {x: "*" for x in names})
    pairs = fibre_product(const, const)
    mtab = {e: str((int(a) + int(b)) % n)
            for e, (a, b) in pairs.pairing.items()}
    m = Mor(pairs.apex, G1, mtab)
    u = Mor(G0, G1, {"*": "0"})
    i = Mor(G1, G1, {x: str((-int(x)) % n) for x in names})
    g = Groupoid(G0, G1, const, const, m, u, i, pairs=pairs)
    report = validate_groupoid(g)
    assert passed(report), [f for f in report if not f.ok]
    return g
