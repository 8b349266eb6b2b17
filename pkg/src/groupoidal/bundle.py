"""Principal bundles and orbit spaces.

A right action is principal over a projection p when p is an invariant
cover and the shear map (pr1, mult) onto the fibre product of p with
itself is invertible; "basic" means principal over the quotient by the
action.
"""

from .site_core import (Finding, Mor, SiteError, coequalizer, compose,
                        fibre_product, inverse, is_cover, is_iso, pair_id,
                        passed, valid_mor_table)
from .action import Action, GMap, is_invariant, transformation_groupoid


class NotPrincipal(SiteError):
    pass


def orbit_space(a):
    """Coequalizer of the two maps out of the action fibre product."""
    if a.side == "right":
        return coequalizer(a.pairs.pr1, a.mult)
    return coequalizer(a.pairs.pr2, a.mult)


def bundle_shear(a, proj):
    """(x, g) -> (x, x·g) into the fibre product of proj with itself."""
    assert a.side == "right"
    PP = fibre_product(proj, proj)
    tbl = {e: PP.index[(x, a.mult(e))]
           for e, (x, gel) in a.pairs.pairing.items()}
    return Mor(a.pairs.apex, PP.apex, tbl), PP


def check_principal(a, proj):
    """Findings for principality of a right action over proj."""
    out = []
    assert proj.dom == a.X
    out.append(Finding("projection-cover", is_cover(proj), None))
    out.append(Finding("projection-invariant", is_invariant(a, proj), None))
    try:
        sh, PP = bundle_shear(a, proj)
        out.append(Finding("shear-iso", is_iso(sh), None))
    except (KeyError, AssertionError) as exc:
        out.append(Finding("shear-iso", False, str(exc)))
    return out


class PrincipalBundle:
    def __init__(self, action, proj):
        assert action.side == "right"
        report = check_principal(action, proj)
        if not passed(report):
            raise NotPrincipal([f.check for f in report if not f.ok])
        self.action, self.proj = action, proj
        self.g = action.g
        self.X, self.Z = action.X, proj.cod
        self.shear, self.PP = bundle_shear(action, proj)
        self.shear_inverse = inverse(self.shear)

    def solve(self, x1, x2):
        """The unique arrow g with x1·g = x2 (requires equal fibres)."""
        e = self.shear_inverse(self.PP.index[(x1, x2)])
        return self.action.pairs.pairing[e][1]

    def __repr__(self):
        return "PrincipalBundle(|X|=%d, |Z|=%d)" % (len(self.X), len(self.Z))


def is_basic(a):
    """Principal over the orbit space, with backend cross-checks."""
    assert a.side == "right"
    coeq = orbit_space(a)
    report = check_principal(a, coeq.proj)
    flag = passed(report)
    bundle = PrincipalBundle(a, coeq.proj) if flag else None
    g = a.g
    free = all(gel == g.u(g.r(gel))
               for e, (x, gel) in a.pairs.pairing.items()
               if a.mult(e) == x)
    cross = []
    if a.X.backend == "finset":
        cross.append(Finding("basic-iff-free", flag == free, None))
    else:
        # freeness plus continuity of the shear inverse plus the quotient
        # map being a cover
        alt = free
        if alt:
            sh, PP = bundle_shear(a, coeq.proj)
            alt = is_iso(sh) and is_cover(coeq.proj)
        cross.append(Finding("basic-iff-free-and-continuous",
                             flag == alt, None))
    return {"flag": flag, "bundle": bundle, "orbits": coeq,
            "report": report, "cross": cross}


def pullback_bundle(b, f):
    """Pull a principal bundle back along f: Z' -> Z."""
    assert f.cod == b.Z
    g = b.g
    FP = fibre_product(f, b.proj)
    anchor = compose(b.action.anchor, FP.pr2)
    pairs = fibre_product(anchor, g.r)
    tbl = {e: FP.index[(FP.pairing[w][0],
                        b.action.act(FP.pairing[w][1], gel))]
           for e, (w, gel) in pairs.pairing.items()}
    act = Action(g, FP.apex, anchor, Mor(pairs.apex, FP.apex, tbl),
                 "right", pairs)
    out = PrincipalBundle(act, FP.pr1)
    out.to_total = FP.pr2
    return out


def induced_base_map(f, b1, b2):
    """The map on bases induced by an equivariant map of total spaces."""
    assert f.f.dom == b1.X and f.f.cod == b2.X
    tbl = {}
    for x in b1.X.elements:
        z = b1.proj(x)
        w = b2.proj(f.f(x))
        if z in tbl:
            assert tbl[z] == w, "induced map is not well defined"
        else:
            tbl[z] = w
    assert set(tbl) == set(b1.Z.elements)
    return Mor(b1.Z, b2.Z, tbl)


def basic_witness_functor(a):
    """For a basic action, the identity-on-objects isomorphism from the
    transformation groupoid to the kernel-pair groupoid of the quotient
    map, sending (x, g) to (x, x·g)."""
    from .groupoid import cech_groupoid
    from .morphism import Functor, validate_functor
    res = is_basic(a)
    assert res["flag"], "action is not basic"
    b = res["bundle"]
    t = transformation_groupoid(a)
    c = cech_groupoid(b.proj)
    F1 = Mor(t.G1, c.G1,
             {e: c.kernel.index[(x, a.mult(e))]
              for e, (x, gel) in t.parts.items()})
    F = Functor(t, c, Mor.identity(a.X), F1)
    assert passed(validate_functor(F))
    assert is_iso(F1)
    return F


def cech_action_reconstruction(a, p):
    """For an action of the kernel-pair groupoid of p: X -> Z on Y, the
    isomorphism from Y to (orbit space) x_Z X given by y -> ([y], anchor y)."""
    coeq = orbit_space(a)
    pz = Mor(coeq.quotient, p.cod,
             {c: p(a.anchor(next(y for y in a.X.elements
                                 if coeq.proj(y) == c)))
              for c in coeq.quotient.elements})
    # well-definedness of the descended map to Z
    for y in a.X.elements:
        assert pz(coeq.proj(y)) == p(a.anchor(y))
    FP = fibre_product(pz, p)
    tbl = {y: FP.index[(coeq.proj(y), a.anchor(y))] for y in a.X.elements}
    iso = Mor(a.X, FP.apex, tbl)
    assert is_iso(iso)
    return {"iso": iso, "base": coeq, "fp": FP, "base_to_z": pz}
