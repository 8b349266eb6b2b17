"""Finite sites: objects, morphisms, fibre products, coequalizers, covers.

Two backends share one object/morphism representation.  A "finset" object
is a bare finite carrier and the covers are the surjections.  A "fintop"
object is a finite topological space and the covers are the open
surjections.  Every finite space is determined by its minimal open
neighbourhoods (the open sets are exactly the up-sets of the
specialization preorder), so the topology is carried as the table
``nbhd: element -> minimal open set containing it`` and the full open-set
family is recovered on demand.  Everything is exact: no floats, no
randomness, carriers are tuples of string ids.
"""

from collections import namedtuple
from itertools import combinations, product


class SiteError(Exception):
    pass


class BackendMismatch(SiteError):
    pass


class BoundaryMismatch(SiteError):
    pass


class NotACover(SiteError):
    pass


class BudgetExceeded(SiteError):
    pass


PAIR_SEP = "|"


def pair_id(left, right):
    """Canonical id of a fibre-product element (left, right)."""
    return left + PAIR_SEP + right


class Obj:
    """A finite carrier, optionally with a topology.

    ``nbhd`` maps each element to its minimal open neighbourhood
    (a frozenset).  ``nbhd is None`` means the finset backend.
    """

    def __init__(self, backend, elements, nbhd=None):
        assert backend in ("finset", "fintop")
        elements = tuple(str(e) for e in elements)
        assert len(set(elements)) == len(elements), "duplicate element ids"
        eset = frozenset(elements)
        if backend == "finset":
            assert nbhd is None
        else:
            assert nbhd is not None, "fintop objects need a topology"
            nbhd = {x: frozenset(n) for x, n in nbhd.items()}
            assert set(nbhd) == set(elements)
            for x in elements:
                assert x in nbhd[x]
                assert nbhd[x] <= eset
            for x in elements:
                for y in nbhd[x]:
                    assert nbhd[y] <= nbhd[x], "minimal opens must nest"
        self.backend = backend
        self.elements = elements
        self.eset = eset
        self.nbhd = nbhd

    def is_open(self, s):
        assert self.backend == "fintop"
        s = frozenset(s)
        assert s <= self.eset
        return all(self.nbhd[x] <= s for x in s)

    def opens(self):
        """All open subsets, by increasing size.  Exponential; small spaces only."""
        assert self.backend == "fintop"
        out = []
        for k in range(len(self.elements) + 1):
            for c in combinations(self.elements, k):
                s = frozenset(c)
                if self.is_open(s):
                    out.append(s)
        return out

    def specialization(self):
        """The pairs (x, y) with y in every open set containing x."""
        assert self.backend == "fintop"
        return {(x, y) for x in self.elements for y in self.nbhd[x]}

    def __eq__(self, other):
        if not isinstance(other, Obj):
            return NotImplemented
        return (self.backend == other.backend and self.eset == other.eset
                and self.nbhd == other.nbhd)

    def __hash__(self):
        if self.nbhd is None:
            return hash((self.backend, self.eset))
        return hash((self.backend, self.eset,
                     frozenset(self.nbhd.items())))

    def __repr__(self):
        return "Obj(%r, %r)" % (self.backend, list(self.elements))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, e):
        return e in self.eset


def valid_mor_table(dom, cod, table):
    """Would ``table`` define a morphism dom -> cod?  (No exceptions.)"""
    if set(table) != set(dom.elements):
        return False
    if not set(table.values()) <= cod.eset:
        return False
    if dom.backend == "fintop":
        # continuity = monotonicity for the specialization preorder
        for x in dom.elements:
            nx = cod.nbhd[table[x]]
            for y in dom.nbhd[x]:
                if table[y] not in nx:
                    return False
    return True


class Mor:
    def __init__(self, dom, cod, table):
        if dom.backend != cod.backend:
            raise BackendMismatch("%s vs %s" % (dom.backend, cod.backend))
        table = {str(k): str(v) for k, v in table.items()}
        assert set(table) == set(dom.elements), "map must be total on the domain"
        assert set(table.values()) <= cod.eset, "images must land in the codomain"
        if dom.backend == "fintop":
            for x in dom.elements:
                for y in dom.nbhd[x]:
                    assert table[y] in cod.nbhd[table[x]], \
                        "map must be continuous"
        self.dom = dom
        self.cod = cod
        self.table = table

    def __call__(self, x):
        return self.table[x]

    def image(self, s):
        return frozenset(self.table[x] for x in s)

    def fibre(self, z):
        return tuple(x for x in self.dom.elements if self.table[x] == z)

    def __eq__(self, other):
        if not isinstance(other, Mor):
            return NotImplemented
        return (self.dom == other.dom and self.cod == other.cod
                and self.table == other.table)

    def __hash__(self):
        return hash((self.dom, self.cod, frozenset(self.table.items())))

    def __repr__(self):
        return "Mor(%r -> %r, %r)" % (list(self.dom.elements),
                                      list(self.cod.elements), self.table)

    @staticmethod
    def identity(x):
        return Mor(x, x, {e: e for e in x.elements})


def identity(x):
    return Mor.identity(x)


def compose(f, g):
    """f after g."""
    if f.dom.backend != g.dom.backend:
        raise BackendMismatch("cannot compose across backends")
    if g.cod != f.dom:
        raise BoundaryMismatch("cod of inner map differs from dom of outer map")
    return Mor(g.dom, f.cod, {x: f(g(x)) for x in g.dom.elements})


def is_surjective(f):
    return set(f.table.values()) == set(f.cod.eset)


def is_open_map(f):
    """Image of every dom-open is a cod-open.  It suffices to check the
    minimal opens, since any open is a union of them."""
    assert f.dom.backend == "fintop"
    return all(f.cod.is_open(f.image(f.dom.nbhd[x])) for x in f.dom.elements)


def is_cover(f):
    if f.dom.backend == "finset":
        return is_surjective(f)
    return is_surjective(f) and is_open_map(f)


def is_iso(f):
    if len(set(f.table.values())) != len(f.dom.elements):
        return False
    if not is_surjective(f):
        return False
    inv = {v: k for k, v in f.table.items()}
    return valid_mor_table(f.cod, f.dom, inv)


def inverse(f):
    assert is_iso(f)
    return Mor(f.cod, f.dom, {v: k for k, v in f.table.items()})


class FibreProduct:
    """Apex of f: Y -> Z, g: U -> Z with coordinate projections.

    ``pairing`` maps each apex id to its (left, right) pair and ``index``
    is the reverse lookup.
    """

    def __init__(self, apex, pr1, pr2, pairing):
        self.apex = apex
        self.pr1 = pr1
        self.pr2 = pr2
        self.pairing = pairing
        self.index = {lr: e for e, lr in pairing.items()}


def fibre_product(f, g):
    if f.dom.backend != g.dom.backend:
        raise BackendMismatch("fibre product needs one backend")
    if f.cod != g.cod:
        raise BoundaryMismatch("fibre product legs must share a codomain")
    pairs = [(y, u) for y in f.dom.elements for u in g.dom.elements
             if f(y) == g(u)]
    ids = [pair_id(y, u) for y, u in pairs]
    assert len(set(ids)) == len(ids), "pair ids collide"
    pairing = dict(zip(ids, pairs))
    if f.dom.backend == "finset":
        apex = Obj("finset", ids)
    else:
        nb = {}
        for e, (y, u) in pairing.items():
            nb[e] = frozenset(
                pair_id(y2, u2) for (y2, u2) in pairs
                if y2 in f.dom.nbhd[y] and u2 in g.dom.nbhd[u])
        apex = Obj("fintop", ids, nb)
    pr1 = Mor(apex, f.dom, {e: lr[0] for e, lr in pairing.items()})
    pr2 = Mor(apex, g.dom, {e: lr[1] for e, lr in pairing.items()})
    fp = FibreProduct(apex, pr1, pr2, pairing)
    if is_cover(g):
        assert is_cover(pr1), "pullback of a cover must be a cover"
    return fp


def kernel_pair(f):
    return fibre_product(f, f)


class UnionFind:
    def __init__(self, xs):
        self.parent = {x: x for x in xs}

    def find(self, x):
        y = self.parent[x]
        if self.parent[y] != y:
            y = self.parent[x] = self.find(y)
        return y

    def union(self, x, y):
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        # smaller id wins so class names are reproducible
        if y < x:
            x, y = y, x
        self.parent[y] = x


class Coequalizer:
    def __init__(self, quotient, proj, classes):
        self.quotient = quotient
        self.proj = proj
        self.classes = classes


def coequalizer(f, g):
    """Quotient of cod(f) by the equivalence generated by f(w) ~ g(w).

    Class representatives are the least ids; the fintop quotient carries
    the finest topology making proj continuous.
    """
    if f.dom != g.dom or f.cod != g.cod:
        raise BoundaryMismatch("coequalizer needs a parallel pair")
    cod = f.cod
    uf = UnionFind(cod.elements)
    for w in f.dom.elements:
        uf.union(f(w), g(w))
    members = {}
    for x in cod.elements:
        members.setdefault(uf.find(x), []).append(x)
    classes = [frozenset(v) for v in members.values()]
    rep_of = {x: uf.find(x) for x in cod.elements}
    seen = set()
    reps = []
    for x in cod.elements:
        r = rep_of[x]
        if r not in seen:
            seen.add(r)
            reps.append(r)
    if cod.backend == "finset":
        quot = Obj("finset", reps)
    else:
        # minimal open of a class: saturate under "if the class of x is
        # inside, so is the projection of the minimal open of x"
        nb = {}
        for q in reps:
            cur = {q}
            changed = True
            while changed:
                changed = False
                for x in cod.elements:
                    if rep_of[x] in cur:
                        for y in cod.nbhd[x]:
                            if rep_of[y] not in cur:
                                cur.add(rep_of[y])
                                changed = True
            nb[q] = frozenset(cur)
        quot = Obj("fintop", reps, nb)
    proj = Mor(cod, quot, rep_of)
    return Coequalizer(quot, proj, classes)


def all_maps(dom, cod):
    """All morphisms dom -> cod (fintop: the continuous ones)."""
    elems = dom.elements
    if not elems:
        yield Mor(dom, cod, {})
        return
    if not cod.elements:
        return
    for images in product(cod.elements, repeat=len(elems)):
        table = dict(zip(elems, images))
        if valid_mor_table(dom, cod, table):
            yield Mor(dom, cod, table)


def terminal(backend):
    if backend == "finset":
        return Obj("finset", ["*"])
    return Obj("fintop", ["*"], {"*": {"*"}})


def to_terminal(x):
    t = terminal(x.backend)
    return Mor(x, t, {e: "*" for e in x.elements})


def obj_product(a, b):
    """Binary product, as the fibre product over the terminal object."""
    return fibre_product(to_terminal(a), to_terminal(b))


def mor_product(f1, f2):
    """f1 x f2 between the binary products of domains and codomains."""
    dom = obj_product(f1.dom, f2.dom)
    cod = obj_product(f1.cod, f2.cod)
    table = {e: cod.index[(f1(l), f2(r))]
             for e, (l, r) in dom.pairing.items()}
    return Mor(dom.apex, cod.apex, table)


def disjoint_union(a, b):
    """Coproduct with tagged elements; returns (Obj, inl, inr)."""
    if a.backend != b.backend:
        raise BackendMismatch("coproduct needs one backend")
    lid = {x: "l:" + x for x in a.elements}
    rid = {x: "r:" + x for x in b.elements}
    elems = [lid[x] for x in a.elements] + [rid[x] for x in b.elements]
    if a.backend == "finset":
        total = Obj("finset", elems)
    else:
        nb = {lid[x]: frozenset(lid[y] for y in a.nbhd[x]) for x in a.elements}
        nb.update({rid[x]: frozenset(rid[y] for y in b.nbhd[x])
                   for x in b.elements})
        total = Obj("fintop", elems, nb)
    inl = Mor(a, total, lid)
    inr = Mor(b, total, rid)
    return total, inl, inr


def copair(f, g, total, inl, inr):
    """The map out of a coproduct determined by f on the left and g on
    the right summand."""
    assert f.cod == g.cod
    table = {}
    for x in f.dom.elements:
        table[inl(x)] = f(x)
    for x in g.dom.elements:
        table[inr(x)] = g(x)
    return Mor(total, f.cod, table)


Finding = namedtuple("Finding", "check ok witness")


def passed(findings):
    return all(f.ok for f in findings)


class _Budget:
    def __init__(self, n):
        self.left = n

    def tick(self, k=1):
        self.left -= k
        if self.left < 0:
            raise BudgetExceeded("axiom harness budget exhausted")


def axiom_harness(objs, mors, budget=2_000_000, include_empty_in_28=False):
    """Check the cover axioms on a sample of objects and morphisms.

    Returns a list of Finding records, one per axiom, with a concrete
    witness on failure.  ``budget`` bounds the number of instances
    examined.  The final-object axiom is checked on nonempty objects
    only unless ``include_empty_in_28`` is set.
    """
    objs = list(objs)
    mors = list(mors)
    bud = _Budget(budget)
    findings = []

    def done(check, witness=None):
        findings.append(Finding(check, witness is None, witness))

    covers = [f for f in mors if is_cover(f)]

    # isomorphisms are covers
    w = None
    for f in mors:
        bud.tick()
        if is_iso(f) and not is_cover(f):
            w = "iso %r is not a cover" % (f.table,)
            break
    done("iso-covers", w)

    # composites of covers are covers
    w = None
    for f in covers:
        for g in covers:
            if g.cod != f.dom:
                continue
            bud.tick()
            if not is_cover(compose(f, g)):
                w = "composite of %r and %r" % (f.table, g.table)
                break
        if w:
            break
    done("compose-covers", w)

    by_cod = {}
    for f in mors:
        by_cod.setdefault(f.cod, []).append(f)

    # pullbacks of covers exist and project to covers
    w = None
    for g in covers:
        for f in by_cod.get(g.cod, ()):
            bud.tick()
            fp = fibre_product(f, g)
            if not is_cover(fp.pr1):
                w = "pr1 of %r along cover %r" % (f.table, g.table)
                break
        if w:
            break
    done("pullback-covers", w)

    # subcanonicity: a cover is the coequalizer of its kernel pair
    w = None
    small = [x for x in objs if len(x) <= 3]
    for f in covers:
        bud.tick()
        kp = kernel_pair(f)
        co = coequalizer(kp.pr1, kp.pr2)
        induced = {}
        for x in f.dom.elements:
            induced[co.proj(x)] = f(x)
        q = Mor(co.quotient, f.cod, induced)
        if not is_iso(q):
            w = "kernel-pair quotient of %r not iso to the base" % (f.table,)
            break
        # factorization bijection against small test objects
        for wobj in small:
            bud.tick()
            equalized = [h for h in all_maps(f.dom, wobj)
                         if all(h(kp.pr1(e)) == h(kp.pr2(e))
                                for e in kp.apex.elements)]
            through = {frozenset(compose(h, f).table.items())
                       for h in all_maps(f.cod, wobj)}
            if len(through) != len(equalized):
                w = "factorization count mismatch for %r into %r" % (
                    f.table, list(wobj.elements))
                break
            for h in equalized:
                if frozenset(h.table.items()) not in through:
                    w = "equalized map %r does not factor" % (h.table,)
                    break
            if w:
                break
        if w:
            break
    done("subcanonical", w)

    # cover property is local: pr2 cover and g cover imply f cover
    w = None
    for g in covers:
        for f in by_cod.get(g.cod, ()):
            bud.tick()
            fp = fibre_product(f, g)
            if is_cover(fp.pr2) and not is_cover(f):
                w = "locality fails for %r along %r" % (f.table, g.table)
                break
        if w:
            break
    done("cover-local", w)

    # two-out-of-three: f∘p and p covers imply f cover
    w = None
    for p in covers:
        for f in mors:
            if f.dom != p.cod:
                continue
            bud.tick()
            if is_cover(compose(f, p)) and not is_cover(f):
                w = "f=%r, p=%r" % (f.table, p.table)
                break
        if w:
            break
    done("two-out-of-three", w)

    # every map to the final object is a cover (nonempty carriers)
    w = None
    for x in objs:
        if not x.elements and not include_empty_in_28:
            continue
        bud.tick()
        if not is_cover(to_terminal(x)):
            w = "map %r -> {*} is not a cover" % (list(x.elements),)
            break
    done("covers-to-final", w)

    # being an isomorphism is local along covers
    w = None
    for g in covers:
        for f in by_cod.get(g.cod, ()):
            bud.tick()
            fp = fibre_product(g, f)
            if is_cover(fp.pr2) and is_iso(fp.pr1) and not is_iso(f):
                w = "iso-locality fails for %r along %r" % (f.table, g.table)
                break
        if w:
            break
    done("iso-local", w)

    # binary products of covers are covers
    w = None
    for f1 in covers:
        for f2 in covers:
            if not f1.dom.elements or not f2.dom.elements:
                continue
            bud.tick()
            if not is_cover(mor_product(f1, f2)):
                w = "product of %r and %r" % (f1.table, f2.table)
                break
        if w:
            break
    done("product-covers", w)

    # saturation report: look for f with a section-like p making f∘p a
    # cover while f itself is not.  Constructed from fold maps out of
    # coproducts; a witness is expected for fintop, none for finset.
    witness = None
    for a in objs:
        if witness:
            break
        for b in objs:
            if witness:
                break
            if not b.elements:
                continue
            for f0 in mors:
                if f0.dom != a or f0.cod != b:
                    continue
                bud.tick()
                total, inl, inr = disjoint_union(a, b)
                f = copair(f0, identity(b), total, inl, inr)
                if is_cover(compose(f, inr)) and not is_cover(f):
                    witness = "fold of %r with the identity on %r" % (
                        f0.table, list(b.elements))
                    break
    findings.append(Finding("saturation-witness", True,
                            witness or "no witness: class is saturated"))
    return findings
