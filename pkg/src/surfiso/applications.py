"""Affine, Euclidean and Moebius isomorphisms derived from the projective
ones.

The ambient structure in P^n is fixed: the hyperplane at infinity z0 = 0,
the absolute quadric z0 = 0, z1^2 + ... + zn^2 = 0, and the Moebius quadric
-x0^2 + x1^2 + ... + x_{n+1}^2 = 0 in P^{n+1} with its stereographic
projection (x0 - x_{n+1} : x1 : ... : xn)."""

from __future__ import annotations

from dataclasses import dataclass

import sympy as sp

from .driver import compute_isomorphisms
from .errors import InternalConsistencyError
from .fields import alg_expand
from .forms import Parametrization, ambient_vars, target_vars
from .recovery import IsoFamily
from .solve import SolutionBranch, refine_branch


@dataclass(frozen=True)
class AmbientStructure:
    n: int

    @property
    def hyperplane_at_infinity(self):
        return target_vars(self.n)[0]

    @property
    def absolute_quadric(self):
        zv = target_vars(self.n)
        return sum(z ** 2 for z in zv[1:])

    @property
    def moebius_matrix(self):
        return sp.diag(*([-1] + [1] * (self.n + 1)))


def stereographic_projection_exprs(n):
    """pi: S^n -> P^n and its inverse pi^-1: P^n -> S^n."""
    xv = target_vars(n + 1)
    zv = target_vars(n)
    pi = (xv[0] - xv[n + 1],) + tuple(xv[1:n + 1])
    sq = sum(z ** 2 for z in zv)
    inv = (sp.expand(sq),) + tuple(2 * zv[0] * z for z in zv[1:]) \
        + (sp.expand(sq - 2 * zv[0] ** 2),)
    return pi, inv


def stereographic_lift(f: Parametrization) -> Parametrization:
    """pi^-1 o f with the gcd stripped; the image lies on the Moebius
    quadric (asserted by exact expansion)."""
    n = f.dim
    zv = target_vars(n)
    _pi, inv = stereographic_projection_exprs(n)
    subs = dict(zip(zv, f.as_exprs()))
    comps = [sp.expand(c.xreplace(subs)) for c in inv]
    lifted = Parametrization.from_exprs(f.tag, comps, f.field, strip=True)
    w = lifted.as_exprs()
    check = sp.expand(-w[0] ** 2 + sum(c ** 2 for c in w[1:]))
    if check != 0:
        gens = ambient_vars(f.tag)
        if not sp.Poly(check, *gens, domain=f.field.domain).is_zero:
            raise InternalConsistencyError(
                'the stereographic lift left the Moebius quadric')
    return lifted


def _proportionality_equations(m: sp.Matrix, s: sp.Matrix):
    """m = lambda * s for some lambda != 0, written without lambda: cross
    products against a reference nonzero entry of s, plus the nonvanishing
    of the matching entry of m."""
    ref = None
    rows, cols = s.shape
    for i in range(rows):
        for j in range(cols):
            if s[i, j] != 0:
                ref = (i, j)
                break
        if ref:
            break
    eqs = []
    for i in range(rows):
        for j in range(cols):
            e = sp.expand(m[i, j] * s[ref] - s[i, j] * m[ref])
            if e != 0:
                eqs.append(e)
    return eqs, sp.expand(m[ref])


def _refit(iso: IsoFamily, extra_eqs, extra_ineqs=()):
    """Impose additional constraints on an isomorphism family; returns the
    refined family, or None when the constraints are inconsistent.  If the
    refinement splits, the constraints are kept un-decomposed."""
    fld = iso.field
    if iso.is_numeric():
        if all(alg_expand(e, fld) == 0 for e in extra_eqs) and \
                all(alg_expand(iq, fld) != 0 for iq in extra_ineqs):
            return iso
        return None
    branch = iso.branch or SolutionBranch({}, iso.params, iso.equations,
                                          iso.inequations)
    refined = refine_branch(branch, list(extra_eqs), fld)
    refined = [br for br in refined
               if not any(br.substitute(iq, fld) == 0
                          for iq in extra_ineqs)]
    if not refined:
        return None
    if len(refined) > 1:
        return IsoFamily(iso.matrix, iso.params,
                         tuple(iso.equations) + tuple(extra_eqs),
                         tuple(iso.inequations) + tuple(extra_ineqs),
                         iso.provenance + ' (constrained)', fld, iso.branch,
                         iso._mf, iso._mgrc_rows)
    br = refined[0]
    matrix = [[br.substitute(e, fld) for e in row] for row in iso.matrix]
    mgrc = None
    if iso._mgrc_rows is not None:
        mgrc = [[br.substitute(e, fld) for e in row]
                for row in iso._mgrc_rows]
    ineqs = tuple(br.inequations) + tuple(
        br.substitute(iq, fld) for iq in extra_ineqs
        if br.substitute(iq, fld).free_symbols & set(br.free))
    return IsoFamily(matrix, br.free, br.equations, ineqs,
                     iso.provenance, fld, br, iso._mf, mgrc)


def filter_affine(iso: IsoFamily):
    """Keep the specializations fixing the hyperplane at infinity: the first
    row of U vanishes off the diagonal."""
    eqs = [alg_expand(e, iso.field) for e in iso.matrix[0][1:]]
    eqs = [e for e in eqs if e != 0]
    return _refit(iso, eqs) if eqs else iso


def filter_euclidean(iso: IsoFamily):
    """Affine constraints plus B^T B = lambda * 1 on the lower-right block
    (the similarity characterization of fixing the absolute quadric)."""
    out = filter_affine(iso)
    if out is None:
        return None
    n = out.n
    b = sp.Matrix([[out.matrix[i][j] for j in range(1, n + 1)]
                   for i in range(1, n + 1)])
    eqs, lam = _proportionality_equations(b.T * b, sp.eye(n))
    return _refit(out, eqs, (lam,))


def moebius_isomorphisms(f: Parametrization, g: Parametrization,
                         **opts):
    """Projective isomorphisms of the stereographic lifts that fix the
    Moebius quadric, conjugated back through the projection: birational
    quadratic maps fixing the absolute quadric."""
    lf = stereographic_lift(f)
    lg = stereographic_lift(g)
    report = compute_isomorphisms(lf, lg, **opts)
    if report.empty:
        return report, []
    n = f.dim
    smat = AmbientStructure(n).moebius_matrix
    out = []
    for iso in report.families:
        u = sp.Matrix(iso.matrix)
        eqs, lam = _proportionality_equations(u.T * smat * u, smat)
        kept = _refit(iso, eqs, (lam,))
        if kept is None:
            continue
        out.append((kept, _conjugate_through_projection(kept, f)))
    return report, out


def _conjugate_through_projection(iso: IsoFamily, f: Parametrization):
    """pi o chi_U o pi^-1 as component expressions; asserts that the result
    fixes the absolute quadric."""
    n = f.dim
    zv = target_vars(n)
    pi, inv = stereographic_projection_exprs(n)
    uw = []
    for row in iso.matrix:
        uw.append(sp.expand(sum(e * c for e, c in zip(row, inv))))
    xv = target_vars(n + 1)
    comps = [sp.expand(p.xreplace(dict(zip(xv, uw)))) for p in pi]
    if iso.is_numeric():
        comps = _strip_gcd_exprs(comps, zv, iso.field)
        _assert_fixes_absolute_quadric(comps, n, iso)
    return tuple(comps)


def _strip_gcd_exprs(comps, zv, fld):
    polys = [sp.Poly(c, *zv, domain=fld.domain) for c in comps]
    from functools import reduce
    nz = [p for p in polys if not p.is_zero]
    g = reduce(lambda a, b: a.gcd(b), nz)
    if sum(g.degree_list()) > 0:
        polys = [p.exquo(g) for p in polys]
    return [p.as_expr() for p in polys]


def _assert_fixes_absolute_quadric(comps, n, iso):
    """alpha(E_n) = E_n: z0 o alpha and (z1^2+...+zn^2) o alpha lie in the
    ideal (z0, z1^2+...+zn^2)."""
    zv = target_vars(n)
    q = sum(z ** 2 for z in zv[1:])
    for pulled in (comps[0],
                   sp.expand(sum(c ** 2 for c in comps[1:]))):
        at_infinity = sp.expand(pulled.xreplace({zv[0]: sp.Integer(0)}))
        if at_infinity == 0:
            continue
        _qt, r = sp.reduced(at_infinity, [q], *zv[1:],
                            domain=iso.field.domain)
        if sp.expand(r) != 0:
            raise InternalConsistencyError(
                'a Moebius isomorphism moved the absolute quadric')
