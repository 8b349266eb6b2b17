"""Classification and calculus of bibundles.

Flags, conversions to and from functors and anafunctors, composition with
associators and unitors, duals, inverses, actor decomposition and
imprimitivity.  Quotient carriers are named by least-id representatives,
so a class id is always an element of the space being quotiented.
"""

from .site_core import (BoundaryMismatch, Finding, Mor, SiteError,
                        compose, fibre_product, is_cover, is_iso, pair_id,
                        passed)
from .action import (Action, Bibundle, GMap, to_left, to_right,
                     left_transformation_groupoid, transformation_groupoid,
                     two_sided_transformation_groupoid, unit_bibundle,
                     validate_action, validate_bibundle)
from .bundle import PrincipalBundle, check_principal, is_basic, orbit_space


class MiddleMismatch(SiteError):
    pass


class NotComposable(SiteError):
    pass


class NotABibundleFunctor(SiteError):
    pass


class NotAnEquivalence(SiteError):
    pass


class NotAnActor(SiteError):
    pass


class NotBasic(SiteError):
    pass


def classify(x):
    """The four flags of a bibundle: functor, covering, actor,
    equivalence."""
    right_principal_over_r = passed(check_principal(x.right, x.r_anchor))
    s_cover = is_cover(x.s_anchor)
    is_functor = right_principal_over_r
    is_covering = is_functor and s_cover
    is_actor = is_basic(x.right)["flag"] and s_cover
    is_equivalence = is_covering and passed(
        check_principal(to_right(x.left), x.s_anchor))
    flags = {"is_functor": is_functor, "is_covering": is_covering,
             "is_actor": is_actor, "is_equivalence": is_equivalence}
    assert not flags["is_equivalence"] or (is_functor and is_covering)
    return flags


def validate_bibundle_map(x, y, f):
    """An equivariant map of bibundles over both anchors."""
    out = []
    w = None
    for e in x.X.elements:
        if y.r_anchor(f(e)) != x.r_anchor(e) or \
                y.s_anchor(f(e)) != x.s_anchor(e):
            w = e
            break
    out.append(Finding("anchors-over", w is None, w))
    w = None
    for e, (gel, xe) in x.left.pairs.pairing.items():
        if f(x.lact(gel, xe)) != y.lact(gel, f(xe)):
            w = e
            break
    out.append(Finding("left-equivariance", w is None, w))
    w = None
    for e, (xe, hel) in x.right.pairs.pairing.items():
        if f(x.ract(xe, hel)) != y.ract(f(xe), hel):
            w = e
            break
    out.append(Finding("right-equivariance", w is None, w))
    return out


def dual(x):
    """Exchange the anchors; h·x·g becomes g⁻¹·x·h⁻¹."""
    g, h = x.g, x.h
    lpairs = fibre_product(h.s, x.s_anchor)
    ltab = {e: x.ract(xe, h.i(hel))
            for e, (hel, xe) in lpairs.pairing.items()}
    left = Action(h, x.X, x.s_anchor, Mor(lpairs.apex, x.X, ltab),
                  "left", lpairs)
    rpairs = fibre_product(x.r_anchor, g.r)
    rtab = {e: x.lact(g.i(gel), xe)
            for e, (xe, gel) in rpairs.pairing.items()}
    right = Action(g, x.X, x.r_anchor, Mor(rpairs.apex, x.X, rtab),
                   "right", rpairs)
    out = Bibundle(h, g, left, right)
    assert passed(validate_bibundle(out))
    return out


def functor_to_bibundle(F, Y=None):
    """The bibundle G0 x_{F0, H0, r} H1 of a functor, with the optional
    generalization that replaces the arrows of H by a left H-carrier."""
    from .morphism import functor_surjectivity_tests, validate_functor
    assert passed(validate_functor(F))
    g, h = F.src, F.dst
    if Y is None:
        y_anchor, y_lact = h.r, lambda hel, k: h.mul(hel, k)
    else:
        assert Y.side == "left" and Y.g == h
        y_anchor, y_lact = Y.anchor, Y.act
    carrier_of = h.G1 if Y is None else Y.X
    FP = fibre_product(F.F0, y_anchor)
    lpairs = fibre_product(g.s, FP.pr1)
    ltab = {e: FP.index[(g.r(gel), y_lact(F.F1(gel), FP.pairing[w][1]))]
            for e, (gel, w) in lpairs.pairing.items()}
    left = Action(g, FP.apex, FP.pr1, Mor(lpairs.apex, FP.apex, ltab),
                  "left", lpairs)
    if Y is None:
        s_anchor = compose(h.s, FP.pr2)
        rpairs = fibre_product(s_anchor, h.r)
        rtab = {e: FP.index[(FP.pairing[w][0],
                             h.mul(FP.pairing[w][1], hel))]
                for e, (w, hel) in rpairs.pairing.items()}
        right = Action(h, FP.apex, s_anchor,
                       Mor(rpairs.apex, FP.apex, rtab), "right", rpairs)
        out = Bibundle(g, h, left, right)
        assert passed(validate_bibundle(out))
        out.F = F
        out.fp = FP
        flags = classify(out)
        assert flags["is_functor"]
        tests = functor_surjectivity_tests(F)
        assert flags["is_covering"] == tests["essentially_surjective"]
        assert flags["is_equivalence"] == (
            tests["essentially_surjective"] and tests["fully_faithful"])
        return out
    # generalized pullback of a left H-carrier: just the induced G-action
    assert passed(validate_action(left))
    left.fp = FP
    return left


def actor_to_bibundle(a):
    """An actor as a bibundle on the arrows of its target."""
    h = a.h
    right = Action(h, h.G1, h.s, h.m, "right", h.pairs)
    out = Bibundle(a.g, h, a.action, right)
    assert passed(validate_bibundle(out))
    return out


def bibundle_to_anafunctor(x):
    """The anafunctor (X, r, F_X) of a bibundle functor; the arrow part
    solves g·x1 · F_X = x2 in the principal right action.

    The isomorphism between the pullback groupoid over r and the
    two-sided transformation groupoid is built and attached as
    ``two_sided_iso``.
    """
    flags = classify(x)
    if not flags["is_functor"]:
        raise NotABibundleFunctor("right action not principal over r")
    from .groupoid import pullback_groupoid
    from .morphism import Anafunctor, Functor, validate_functor
    g, h = x.g, x.h
    bundle = PrincipalBundle(x.right, x.r_anchor)
    gx, hyper = pullback_groupoid(g, x.r_anchor)
    f1tab = {}
    for e, (x1, gel, x2) in gx.triples.items():
        xm = x.lact(g.i(gel), x1)
        f1tab[e] = bundle.solve(xm, x2)
    F = Functor(gx, h, x.s_anchor, Mor(gx.G1, h.G1, f1tab))
    assert passed(validate_functor(F))
    ana = Anafunctor(g, h, x.r_anchor, F, gx, hyper)
    # two-sided transformation groupoid matches the pullback groupoid
    t = two_sided_transformation_groupoid(x)
    itab = {e: gx.triple_index[(x.lact(gel, xe), gel, x.ract(xe, hel))]
            for e, (gel, xe, hel) in t.triples.items()}
    iso = Functor(t, gx, Mor.identity(x.X), Mor(t.G1, gx.G1, itab))
    assert passed(validate_functor(iso)) and is_iso(iso.F1)
    ana.two_sided_iso = iso
    ana.bundle = bundle
    return ana


def beta_ana_to_bibundle(a):
    """The bibundle of an anafunctor: the orbit space of the canonical
    right action of the pullback groupoid on G1 x X x H1 triples, with
    the surviving outer G- and H-actions."""
    g, h = a.src, a.dst
    gx = a.gx
    T1 = fibre_product(g.s, a.p)
    T2 = fibre_product(compose(a.F.F0, T1.pr2), h.r)
    triples, index = {}, {}
    for e, (w, hel) in T2.pairing.items():
        gel, xe = T1.pairing[w]
        triples[e] = (gel, xe, hel)
        index[(gel, xe, hel)] = e
    anchor = Mor(T2.apex, gx.G0,
                 {e: xe for e, (gel, xe, hel) in triples.items()})
    pairs = fibre_product(anchor, gx.r)
    mtab = {}
    for e, (te, ae) in pairs.pairing.items():
        g1, x1, hel = triples[te]
        x1b, g2, x2 = gx.triples[ae]
        assert x1b == x1
        mtab[e] = index[(g.mul(g1, g2), x2,
                         h.mul(h.i(a.F.F1(ae)), hel))]
    act = Action(gx, T2.apex, anchor, Mor(pairs.apex, T2.apex, mtab),
                 "right", pairs)
    assert passed(validate_action(act))
    coeq = orbit_space(act)
    Z = coeq.quotient

    def cls(gel, xe, hel):
        return coeq.proj(index[(gel, xe, hel)])

    l_anchor = Mor(Z, g.G0, {c: g.r(triples[c][0]) for c in Z.elements})
    for c in Z.elements:           # anchor well defined on classes
        for m in next(k for k in coeq.classes if c in k):
            assert g.r(triples[m][0]) == l_anchor(c)
    lpairs = fibre_product(g.s, l_anchor)
    ltab = {}
    for e, (gel, c) in lpairs.pairing.items():
        g1, xe, hel = triples[c]
        ltab[e] = cls(g.mul(gel, g1), xe, hel)
    left = Action(g, Z, l_anchor, Mor(lpairs.apex, Z, ltab), "left",
                  lpairs)
    r_anchor = Mor(Z, h.G0, {c: h.s(triples[c][2]) for c in Z.elements})
    rpairs = fibre_product(r_anchor, h.r)
    rtab = {}
    for e, (c, hel) in rpairs.pairing.items():
        g1, xe, h1 = triples[c]
        rtab[e] = cls(g1, xe, h.mul(h1, hel))
    right = Action(h, Z, r_anchor, Mor(rpairs.apex, Z, rtab), "right",
                   rpairs)
    out = Bibundle(g, h, left, right)
    assert passed(validate_bibundle(out))
    out.triples = triples
    out.triple_index = index
    out.triple_proj = coeq.proj
    out.triple_classes = coeq.classes
    return out


def cech_equivalence(p, q=None):
    """The canonical equivalence bibundle between the kernel-pair
    groupoids of two covers with the same codomain, carried by the fibre
    product of the covers.  With one argument the second groupoid is the
    trivial groupoid on the codomain."""
    from .groupoid import cech_groupoid, unit_groupoid
    from .site_core import identity
    if q is None:
        q = identity(p.cod)
    assert p.cod == q.cod
    g = cech_groupoid(p)
    h = unit_groupoid(q.dom) if is_iso(q) else cech_groupoid(q)
    FP = fibre_product(p, q)
    lpairs = fibre_product(g.s, FP.pr1)
    ltab = {}
    for e, (ar, w) in lpairs.pairing.items():
        x1, _ = g.kernel.pairing[ar]
        _, y = FP.pairing[w]
        ltab[e] = FP.index[(x1, y)]
    left = Action(g, FP.apex, FP.pr1, Mor(lpairs.apex, FP.apex, ltab),
                  "left", lpairs)
    rpairs = fibre_product(FP.pr2, h.r)
    rtab = {}
    for e, (w, ar) in rpairs.pairing.items():
        x, _ = FP.pairing[w]
        y2 = h.s(ar) if h.G1 == h.G0 else h.kernel.pairing[ar][1]
        rtab[e] = FP.index[(x, y2)]
    right = Action(h, FP.apex, FP.pr2, Mor(rpairs.apex, FP.apex, rtab),
                   "right", rpairs)
    out = Bibundle(g, h, left, right)
    assert passed(validate_bibundle(out))
    assert classify(out)["is_equivalence"]
    return out


def roundtrip_beta(x):
    """For a bibundle functor, the isomorphism from the bibundle of its
    anafunctor back to the bibundle itself: a class of (g, x, h) maps to
    g·x·h."""
    ana = bibundle_to_anafunctor(x)
    b = beta_ana_to_bibundle(ana)
    g = x.g
    tbl = {}
    for c in b.X.elements:
        vals = set()
        for m in next(k for k in b.triple_classes if c in k):
            gel, xe, hel = b.triples[m]
            vals.add(x.ract(x.lact(gel, xe), hel))
        assert len(vals) == 1, "round trip map not constant on classes"
        tbl[c] = vals.pop()
    iso = Mor(b.X, x.X, tbl)
    assert is_iso(iso)
    assert passed(validate_bibundle_map(b, x, iso))
    return {"beta": b, "iso": iso, "ana": ana}


def roundtrip_ananat(a):
    """The canonical invertible 2-arrow from the anafunctor of the
    bibundle of `a` back to `a`."""
    from .morphism import AnaNat, ananat_inverse, validate_ananat
    b = beta_ana_to_bibundle(a)
    a2 = bibundle_to_anafunctor(b)
    h = a.dst
    fp = fibre_product(a2.p, a.p)
    tbl = {}
    for e, (c, xt) in fp.pairing.items():
        gel, xe, hel = b.triples[c]
        arrow = a.gx.triple_index[(xt, gel, xe)]
        tbl[e] = h.mul(a.F.F1(arrow), hel)
    psi = AnaNat(a2, a, Mor(fp.apex, h.G1, tbl), fp)
    rep = validate_ananat(psi)
    assert passed(rep), [f for f in rep if not f.ok]
    inv = ananat_inverse(psi)
    assert passed(validate_ananat(inv))
    return psi


def compose_bibundles(x, y):
    """The orbit space of the diagonal middle action on the fibre product
    of carriers, with the surviving outer actions.

    The middle action is always checked to be basic directly.
    """
    if x.h != y.g:
        raise MiddleMismatch("middle groupoids differ")
    g, h, k = x.g, x.h, y.h
    FP = fibre_product(x.s_anchor, y.r_anchor)
    anchor = compose(x.s_anchor, FP.pr1)
    dpairs = fibre_product(anchor, h.r)
    dtab = {e: FP.index[(x.ract(FP.pairing[w][0], hel),
                         y.lact(h.i(hel), FP.pairing[w][1]))]
            for e, (w, hel) in dpairs.pairing.items()}
    diag = Action(h, FP.apex, anchor, Mor(dpairs.apex, FP.apex, dtab),
                  "right", dpairs)
    assert passed(validate_action(diag))
    res = is_basic(diag)
    if not res["flag"]:
        raise NotComposable("middle action is not basic")
    coeq = res["orbits"]
    Z = coeq.quotient

    def cls(xe, ye):
        return coeq.proj(FP.index[(xe, ye)])

    l_anchor = Mor(Z, g.G0,
                   {c: x.r_anchor(FP.pairing[c][0]) for c in Z.elements})
    lpairs = fibre_product(g.s, l_anchor)
    ltab = {}
    for e, (gel, c) in lpairs.pairing.items():
        xe, ye = FP.pairing[c]
        ltab[e] = cls(x.lact(gel, xe), ye)
    left = Action(g, Z, l_anchor, Mor(lpairs.apex, Z, ltab), "left",
                  lpairs)
    r_anchor = Mor(Z, k.G0,
                   {c: y.s_anchor(FP.pairing[c][1]) for c in Z.elements})
    rpairs = fibre_product(r_anchor, k.r)
    rtab = {}
    for e, (c, kel) in rpairs.pairing.items():
        xe, ye = FP.pairing[c]
        rtab[e] = cls(xe, y.ract(ye, kel))
    right = Action(k, Z, r_anchor, Mor(rpairs.apex, Z, rtab), "right",
                   rpairs)
    out = Bibundle(g, k, left, right)
    assert passed(validate_bibundle(out))
    out.middle = FP
    out.middle_proj = coeq.proj
    out.middle_coeq = coeq
    out.middle_bundle = res["bundle"]
    out.factors = (x, y)
    return out


def composite_class(c, xe, ye):
    """Class id of a factor pair in a composite bibundle."""
    return c.middle_proj(c.middle.index[(xe, ye)])


def induced_composite_map(c1, c2, f, g):
    """f x g on composites, descending [x, y] to [f x, g y]."""
    tbl = {}
    for e, (xe, ye) in c1.middle.pairing.items():
        cl = c1.middle_proj(e)
        val = composite_class(c2, f(xe), g(ye))
        if cl in tbl:
            assert tbl[cl] == val, "induced map not well defined"
        else:
            tbl[cl] = val
    assert set(tbl) == set(c1.X.elements)
    return Mor(c1.X, c2.X, tbl)


def associator(x, y, z):
    """The canonical isomorphism (x∘y)∘z ≅ x∘(y∘z)."""
    c1 = compose_bibundles(x, y)
    c12 = compose_bibundles(c1, z)
    c2 = compose_bibundles(y, z)
    c21 = compose_bibundles(x, c2)
    tbl = {}
    for e, (xe, ye) in c1.middle.pairing.items():
        w = c1.middle_proj(e)
        for ze in z.X.elements:
            if y.s_anchor(ye) != z.r_anchor(ze):
                continue
            lhs = composite_class(c12, w, ze)
            rhs = composite_class(c21, xe, composite_class(c2, ye, ze))
            if lhs in tbl:
                assert tbl[lhs] == rhs, "associator not well defined"
            else:
                tbl[lhs] = rhs
    assert set(tbl) == set(c12.X.elements)
    iso = Mor(c12.X, c21.X, tbl)
    assert is_iso(iso)
    assert passed(validate_bibundle_map(c12, c21, iso))
    return {"iso": iso, "left": c12, "right": c21}


def left_unitor(x):
    """G1 ∘ x ≅ x by acting."""
    u = unit_bibundle(x.g)
    c = compose_bibundles(u, x)
    tbl = {}
    for e, (gel, xe) in c.middle.pairing.items():
        cl = c.middle_proj(e)
        val = x.lact(gel, xe)
        if cl in tbl:
            assert tbl[cl] == val
        else:
            tbl[cl] = val
    iso = Mor(c.X, x.X, tbl)
    assert is_iso(iso)
    assert passed(validate_bibundle_map(c, x, iso))
    return {"iso": iso, "composite": c, "unit": u}


def right_unitor(x):
    """x ∘ H1 ≅ x by acting."""
    u = unit_bibundle(x.h)
    c = compose_bibundles(x, u)
    tbl = {}
    for e, (xe, hel) in c.middle.pairing.items():
        cl = c.middle_proj(e)
        val = x.ract(xe, hel)
        if cl in tbl:
            assert tbl[cl] == val
        else:
            tbl[cl] = val
    iso = Mor(c.X, x.X, tbl)
    assert is_iso(iso)
    assert passed(validate_bibundle_map(c, x, iso))
    return {"iso": iso, "composite": c, "unit": u}


def check_inverse(x):
    """For an equivalence, the canonical isomorphisms x∘x* ≅ G1 and
    x*∘x ≅ H1 by solving the principal-bundle equations."""
    flags = classify(x)
    if not flags["is_equivalence"]:
        raise NotAnEquivalence("bibundle is not an equivalence")
    g, h = x.g, x.h
    xd = dual(x)
    lb = PrincipalBundle(to_right(x.left), x.s_anchor)
    rb = PrincipalBundle(x.right, x.r_anchor)
    c1 = compose_bibundles(x, xd)
    tbl = {}
    for e, (x1, x2) in c1.middle.pairing.items():
        cl = c1.middle_proj(e)
        gel = g.i(lb.solve(x2, x1))     # the unique g with g·x2 = x1
        if cl in tbl:
            assert tbl[cl] == gel
        else:
            tbl[cl] = gel
    iso1 = Mor(c1.X, g.G1, tbl)
    ug = unit_bibundle(g)
    assert is_iso(iso1)
    assert passed(validate_bibundle_map(c1, ug, iso1))
    c2 = compose_bibundles(xd, x)
    tbl = {}
    for e, (x1, x2) in c2.middle.pairing.items():
        cl = c2.middle_proj(e)
        hel = rb.solve(x1, x2)          # the unique h with x1·h = x2
        if cl in tbl:
            assert tbl[cl] == hel
        else:
            tbl[cl] = hel
    iso2 = Mor(c2.X, h.G1, tbl)
    uh = unit_bibundle(h)
    assert is_iso(iso2)
    assert passed(validate_bibundle_map(c2, uh, iso2))
    return {"iso1": iso1, "iso2": iso2, "c1": c1, "c2": c2}


def decompose_actor(x):
    """Split a bibundle actor G–H into an actor onto an intermediate
    groupoid K built from H-orbits of carrier pairs, followed by a K–H
    bibundle equivalence carried by the original carrier."""
    from .action import Actor, validate_actor
    from .groupoid import Groupoid, validate_groupoid
    flags = classify(x)
    if not flags["is_actor"]:
        raise NotAnActor("bibundle is not an actor")
    g, h = x.g, x.h
    res = is_basic(x.right)
    bundle = res["bundle"]
    p = bundle.proj
    K0 = bundle.Z
    XX = fibre_product(x.s_anchor, x.s_anchor)
    anchor = compose(x.s_anchor, XX.pr1)
    dpairs = fibre_product(anchor, h.r)
    dtab = {e: XX.index[(x.ract(XX.pairing[w][0], hel),
                         x.ract(XX.pairing[w][1], hel))]
            for e, (w, hel) in dpairs.pairing.items()}
    diag = Action(h, XX.apex, anchor, Mor(dpairs.apex, XX.apex, dtab),
                  "right", dpairs)
    assert passed(validate_action(diag))
    coeq = orbit_space(diag)
    K1 = coeq.quotient

    def cls(x1, x2):
        return coeq.proj(XX.index[(x1, x2)])

    def decode(c):
        return XX.pairing[c]

    rK = Mor(K1, K0, {c: p(decode(c)[0]) for c in K1.elements})
    sK = Mor(K1, K0, {c: p(decode(c)[1]) for c in K1.elements})
    kpairs = fibre_product(sK, rK)
    mtab = {}
    for e, (a, b) in kpairs.pairing.items():
        x1, x2 = decode(a)
        y1, y2 = decode(b)
        hel = bundle.solve(y1, x2)
        mtab[e] = cls(x1, x.ract(y2, hel))
    m = Mor(kpairs.apex, K1, mtab)
    rep_of_obj = {p(xe): xe for xe in x.X.elements}
    u = Mor(K0, K1, {c: cls(rep_of_obj[c], rep_of_obj[c])
                     for c in K0.elements})
    i = Mor(K1, K1, {c: cls(decode(c)[1], decode(c)[0])
                     for c in K1.elements})
    K = Groupoid(K0, K1, rK, sK, m, u, i, pairs=kpairs)
    report = validate_groupoid(K)
    assert passed(report), [f for f in report if not f.ok]

    a_anchor = Mor(K1, g.G0, {c: x.r_anchor(decode(c)[0])
                              for c in K1.elements})
    apairs = fibre_product(g.s, a_anchor)
    atab = {}
    for e, (gel, c) in apairs.pairing.items():
        x1, x2 = decode(c)
        atab[e] = cls(x.lact(gel, x1), x2)
    act = Action(g, K1, a_anchor, Mor(apairs.apex, K1, atab), "left",
                 apairs)
    actor = Actor(g, K, act)
    assert passed(validate_actor(actor))

    lpairs = fibre_product(K.s, p)
    ltab = {}
    for e, (c, xe) in lpairs.pairing.items():
        x1, x2 = decode(c)
        hel = bundle.solve(x2, xe)
        ltab[e] = x.ract(x1, hel)
    leftK = Action(K, x.X, p, Mor(lpairs.apex, x.X, ltab), "left", lpairs)
    equiv = Bibundle(K, h, leftK, x.right)
    assert passed(validate_bibundle(equiv))
    assert classify(equiv)["is_equivalence"]

    actor_bib = actor_to_bibundle(actor)
    c = compose_bibundles(actor_bib, equiv)
    tbl = {}
    for e, (ke, xe) in c.middle.pairing.items():
        cl = c.middle_proj(e)
        val = equiv.lact(ke, xe)
        if cl in tbl:
            assert tbl[cl] == val
        else:
            tbl[cl] = val
    iso = Mor(c.X, x.X, tbl)
    assert is_iso(iso)
    assert passed(validate_bibundle_map(c, x, iso))
    return {"k": K, "actor": actor, "equiv": equiv,
            "actor_bibundle": actor_bib, "iso": iso, "composite": c}


def imprimitivity(x):
    """A bibundle with both actions basic carries an equivalence between
    the transformation groupoids of the descended actions on the two
    orbit spaces."""
    g, h = x.g, x.h
    res_r = is_basic(x.right)
    if not res_r["flag"]:
        raise NotBasic("right")
    right_left = to_right(x.left)
    res_l = is_basic(right_left)
    if not res_l["flag"]:
        raise NotBasic("left")
    ql = res_r["orbits"].proj          # X -> X/H
    qr = res_l["orbits"].proj          # X -> G\X
    XH, GX = ql.cod, qr.cod

    l_anchor = Mor(XH, g.G0, {c: x.r_anchor(c) for c in XH.elements})
    for xe in x.X.elements:
        assert l_anchor(ql(xe)) == x.r_anchor(xe)
    lpairs = fibre_product(g.s, l_anchor)
    ltab = {e: ql(x.lact(gel, c)) for e, (gel, c) in lpairs.pairing.items()}
    act_l = Action(g, XH, l_anchor, Mor(lpairs.apex, XH, ltab), "left",
                   lpairs)
    A = left_transformation_groupoid(act_l)

    r_anchor = Mor(GX, h.G0, {c: x.s_anchor(c) for c in GX.elements})
    for xe in x.X.elements:
        assert r_anchor(qr(xe)) == x.s_anchor(xe)
    rpairs = fibre_product(r_anchor, h.r)
    rtab = {e: qr(x.ract(c, hel)) for e, (c, hel) in rpairs.pairing.items()}
    act_r = Action(h, GX, r_anchor, Mor(rpairs.apex, GX, rtab), "right",
                   rpairs)
    B = transformation_groupoid(act_r)

    alpairs = fibre_product(A.s, ql)
    altab = {}
    for e, (ae, xe) in alpairs.pairing.items():
        gel, _ = A.parts[ae]
        altab[e] = x.lact(gel, xe)
    leftA = Action(A, x.X, ql, Mor(alpairs.apex, x.X, altab), "left",
                   alpairs)
    brpairs = fibre_product(qr, B.r)
    brtab = {}
    for e, (xe, be) in brpairs.pairing.items():
        _, hel = B.parts[be]
        brtab[e] = x.ract(xe, hel)
    rightB = Action(B, x.X, qr, Mor(brpairs.apex, x.X, brtab), "right",
                    brpairs)
    out = Bibundle(A, B, leftA, rightB)
    assert passed(validate_bibundle(out))
    assert classify(out)["is_equivalence"]
    out.A, out.B = A, B
    out.left_quotient, out.right_quotient = ql, qr
    return out


def composite_witness(x, y, w, m):
    """True iff the invariant equivariant map m on the middle fibre
    product presents w as the composite of x and y."""
    if x.h != y.g or x.g != w.g or y.h != w.h:
        raise BoundaryMismatch("bibundle chain does not match w")
    FP = fibre_product(x.s_anchor, y.r_anchor)
    if m.dom != FP.apex or m.cod != w.X:
        raise BoundaryMismatch("m must go from the middle fibre product to w")
    h = x.h
    # invariance under the diagonal middle action
    for e, (xe, ye) in FP.pairing.items():
        for hel in h.arrows():
            if x.s_anchor(xe) != h.r(hel):
                continue
            e2 = FP.index[(x.ract(xe, hel), y.lact(h.i(hel), ye))]
            if m(e2) != m(e):
                return False
    # equivariance on the two outer sides
    for e, (xe, ye) in FP.pairing.items():
        for gel in x.g.arrows():
            if x.g.s(gel) == x.r_anchor(xe):
                e2 = FP.index[(x.lact(gel, xe), ye)]
                if m(e2) != w.lact(gel, m(e)):
                    return False
        for kel in y.h.arrows():
            if y.h.r(kel) == y.s_anchor(ye):
                e2 = FP.index[(xe, y.ract(ye, kel))]
                if m(e2) != w.ract(m(e), kel):
                    return False
        if w.r_anchor(m(e)) != x.r_anchor(xe) or \
                w.s_anchor(m(e)) != y.s_anchor(ye):
            return False
    c = compose_bibundles(x, y)
    tbl = {}
    for e in FP.apex.elements:
        cl = c.middle_proj(e)
        if cl in tbl and tbl[cl] != m(e):
            return False
        tbl[cl] = m(e)
    induced = Mor(c.X, w.X, tbl)
    if not is_iso(induced):
        return False
    assert is_cover(m)
    WFP = fibre_product(x.r_anchor, w.r_anchor)
    pairing_map = Mor(FP.apex, WFP.apex,
                      {e: WFP.index[(FP.pairing[e][0], m(e))]
                       for e in FP.apex.elements})
    assert is_iso(pairing_map)
    return True


def act_on(x, y):
    """Push a left H-action through a bibundle actor to a left G-action
    on the orbit carrier X x_H Y."""
    flags = classify(x)
    if not flags["is_actor"]:
        raise NotAnActor("bibundle is not an actor")
    g, h = x.g, x.h
    if y.side == "right":
        y = to_left(y)
    assert y.g == h
    FP = fibre_product(x.s_anchor, y.anchor)
    anchor = compose(x.s_anchor, FP.pr1)
    dpairs = fibre_product(anchor, h.r)
    dtab = {e: FP.index[(x.ract(FP.pairing[w][0], hel),
                         y.act(h.i(hel), FP.pairing[w][1]))]
            for e, (w, hel) in dpairs.pairing.items()}
    diag = Action(h, FP.apex, anchor, Mor(dpairs.apex, FP.apex, dtab),
                  "right", dpairs)
    res = is_basic(diag)
    assert res["flag"], "middle action is not basic"
    coeq = res["orbits"]
    Z = coeq.quotient
    l_anchor = Mor(Z, g.G0, {c: x.r_anchor(FP.pairing[c][0])
                             for c in Z.elements})
    lpairs = fibre_product(g.s, l_anchor)
    ltab = {}
    for e, (gel, c) in lpairs.pairing.items():
        xe, ye = FP.pairing[c]
        ltab[e] = coeq.proj(FP.index[(x.lact(gel, xe), ye)])
    out = Action(g, Z, l_anchor, Mor(lpairs.apex, Z, ltab), "left",
                 lpairs)
    assert passed(validate_action(out))
    out.middle = FP
    out.middle_proj = coeq.proj
    return out


def bibundle_isomorphic(b1, b2):
    """An isomorphism of bibundles between the same pair of groupoids,
    or None."""
    if b1.g != b2.g or b1.h != b2.h or len(b1.X) != len(b2.X):
        return None
    xs = list(b1.X.elements)
    cand = {}
    for xe in xs:
        cand[xe] = [ye for ye in b2.X.elements
                    if b1.r_anchor(xe) == b2.r_anchor(ye)
                    and b1.s_anchor(xe) == b2.s_anchor(ye)]
        if not cand[xe]:
            return None
    assign = {}

    def ok_so_far():
        for e, (gel, xe) in b1.left.pairs.pairing.items():
            tgt = b1.lact(gel, xe)
            if xe in assign and tgt in assign:
                if b2.lact(gel, assign[xe]) != assign[tgt]:
                    return False
        for e, (xe, hel) in b1.right.pairs.pairing.items():
            tgt = b1.ract(xe, hel)
            if xe in assign and tgt in assign:
                if b2.ract(assign[xe], hel) != assign[tgt]:
                    return False
        return True

    def dfs(i, used):
        if i == len(xs):
            f = Mor(b1.X, b2.X, dict(assign))
            if is_iso(f) and passed(validate_bibundle_map(b1, b2, f)):
                yield f
            return
        xe = xs[i]
        for ye in cand[xe]:
            if ye in used:
                continue
            assign[xe] = ye
            if ok_so_far():
                yield from dfs(i + 1, used | {ye})
            del assign[xe]

    for f in dfs(0, frozenset()):
        return f
    return None


def enumerate_bibundles(g, h, max_size=4):
    """All G–H bibundles with a canonically named carrier of at most the
    given size.  Finite-set backend only."""
    from .backends import make_finset
    from .site_core import all_maps
    from .action import enumerate_actions
    assert g.backend == "finset" and h.backend == "finset"
    for n in range(max_size + 1):
        X = make_finset(["y%d" % i for i in range(n)])
        for r_anchor in all_maps(X, g.G0):
            for s_anchor in all_maps(X, h.G0):
                for left in enumerate_actions(g, X, r_anchor, "left"):
                    for right in enumerate_actions(h, X, s_anchor,
                                                   "right"):
                        b = Bibundle(g, h, left, right)
                        if passed(validate_bibundle(b)):
                            yield b


def brute_force_quasi_inverse(x, cap=4):
    """Search every H–G bibundle with carrier at most cap for a
    two-sided inverse up to bibundle isomorphism."""
    g, h = x.g, x.h
    ug, uh = unit_bibundle(g), unit_bibundle(h)
    for q in enumerate_bibundles(h, g, cap):
        try:
            c1 = compose_bibundles(x, q)
        except (NotComposable, AssertionError):
            continue
        if bibundle_isomorphic(c1, ug) is None:
            continue
        try:
            c2 = compose_bibundles(q, x)
        except (NotComposable, AssertionError):
            continue
        if bibundle_isomorphic(c2, uh) is None:
            continue
        return q
    return None
