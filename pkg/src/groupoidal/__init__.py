"""Exact verification toolkit for finite internal groupoids, actions,
principal bundles, anafunctors and bibundles."""

from .site_core import (Obj, Mor, Finding, SiteError, BackendMismatch,
                        BoundaryMismatch, NotACover, BudgetExceeded,
                        compose, identity, fibre_product, kernel_pair,
                        coequalizer, is_cover, is_iso, inverse, passed,
                        axiom_harness)
from .backends import (make_finset, make_finspace, sierpinski, discrete,
                       indiscrete)
from .groupoid import (Groupoid, validate_groupoid, from_multiplication,
                       unit_groupoid, cech_groupoid, pair_groupoid,
                       pullback_groupoid, cyclic_groupoid)

__all__ = [n for n in dir() if not n.startswith("_")]
