"""End-to-end computation of the projective isomorphisms between two
parametrized surfaces: reduction, super-set construction, index-set solving,
matrix extraction and verification."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .adjunction import (ClassifiedMap, PipelineResult, classify_map,
                         reduce_pipeline)
from .errors import BaseCaseUnsupportedError
from .forms import Parametrization
from .recovery import (IsoFamily, choose_verification_degree,
                       extract_isomorphisms, index_set_J,
                       verify_isomorphism, verify_matrix_identity)
from .reparam import superset_B1, superset_B2


@dataclass
class IsomsReport:
    empty: bool
    reason: str = None
    pipeline: PipelineResult = None
    families: list = dc_field(default_factory=list)  # IsoFamily
    verification: list = dc_field(default_factory=list)

    def solutions(self):
        return self.families


def compute_isomorphisms(f, g, *, enum_bound=None, degree_budget=4000,
                         verify=True) -> IsomsReport:
    """All projective isomorphisms between img f and img g.  ``f`` and ``g``
    may be Parametrization or ClassifiedMap.  Raises
    BaseCaseUnsupportedError for base cases B3/B4/B5 (classified, but their
    reparametrization super-sets are out of scope)."""
    f_cm = f if isinstance(f, ClassifiedMap) else classify_map(f)
    g_cm = g if isinstance(g, ClassifiedMap) else classify_map(g)
    pipe = reduce_pipeline(f_cm, g_cm)
    if pipe.empty:
        return IsomsReport(True, pipe.reason, pipe)
    if pipe.tag_f != pipe.tag_g:
        # can only happen among B3/B4/B5 (p pins B1/B2 numerically)
        return IsomsReport(True, 'base cases differ: %s vs %s'
                           % (pipe.tag_f, pipe.tag_g), pipe)
    if pipe.tag_f == 'B1':
        fams = superset_B1(pipe.fhat, pipe.ghat)
    elif pipe.tag_f == 'B2':
        fams = superset_B2(pipe.fhat, pipe.ghat, enum_bound)
        if not fams:
            return IsomsReport(True, 'mixed quadric types (cone versus '
                               'doubly ruled): no isomorphism exists', pipe)
    else:
        raise BaseCaseUnsupportedError(
            'classified %s; reparametrization super-set not implemented'
            % pipe.tag_f, tag=pipe.tag_f)
    report = IsomsReport(False, None, pipe)
    # the supersets are built from the reduced maps, whose field may have
    # been extended (cone case); lift the original maps if needed
    fam_field = fams[0].field if fams else f_cm.field
    if fam_field != f_cm.field:
        f_cm = classify_map(Parametrization.from_exprs(
            f_cm.tag, f_cm.param.as_exprs(), fam_field))
        g_cm = classify_map(Parametrization.from_exprs(
            g_cm.tag, g_cm.param.as_exprs(), fam_field))
    for fam in fams:
        sols = index_set_J(f_cm, g_cm, fam)
        report.families += extract_isomorphisms(f_cm, g_cm, fam, sols)
    report.families = _dedupe_families(report.families)
    if report.empty is False and not report.families:
        report.empty = True
        report.reason = 'every candidate family solved to the empty set'
    if verify and report.families:
        d = choose_verification_degree(g_cm.param, degree_budget)
        for iso in report.families:
            if d is not None:
                ok = verify_isomorphism(f_cm.param, g_cm.param, iso, d)
                method = 'implicit-degree-%d' % d
            else:
                ok = verify_matrix_identity(iso)
                method = 'matrix-identity'
            report.verification.append((method, ok))
        if not all(ok for _m, ok in report.verification):
            raise AssertionError('a recovered isomorphism failed '
                                 'verification; this is a bug')
    return report


def _dedupe_families(families):
    import sympy as sp
    from .fields import alg_expand
    seen = set()
    out = []
    for fam in families:
        if not fam.is_numeric():
            out.append(fam)
            continue
        key = tuple(tuple(sp.srepr(alg_expand(e, fam.field)) for e in row)
                    for row in fam.canonical_matrix())
        if key in seen:
            continue
        seen.add(key)
        out.append(fam)
    return out
