"""Exact solving of the parameter systems produced by the recovery stages.

All systems live in a handful of family parameters over QQ or QQ(gen).  The
pipeline is: saturate the ideal by the nonvanishing constraints (Rabinowitsch
trick), take a lex Groebner basis, peel off solved parameters (linear
generators and pure powers), enumerate the remaining zero-dimensional part by
back-substitution, and keep anything that resists decomposition as an honest
residual ideal.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import reduce

import sympy as sp

from .errors import InternalConsistencyError
from .fields import GroundField, alg_expand


@dataclass
class SolutionBranch:
    subs: dict                      # solved parameters -> sympy exprs
    free: tuple                     # residual free parameters
    equations: tuple = ()           # residual ideal generators (in free)
    inequations: tuple = ()         # nonvanishing constraints (in free)
    label: str = ''

    def is_explicit(self) -> bool:
        return not self.equations

    def substitute(self, expr, fld=None):
        out = sp.expand(sp.sympify(expr).xreplace(self.subs))
        return alg_expand(out, fld) if fld is not None else out

    def __repr__(self):
        inner = ', '.join('%s=%s' % (k, v) for k, v in
                          sorted(self.subs.items(), key=lambda kv: str(kv[0])))
        if self.equations:
            inner += ' | residual: %s' % (list(self.equations),)
        return 'SolutionBranch(%s; free %s)' % (inner, list(self.free))


@dataclass
class SolutionSet:
    branches: list = dc_field(default_factory=list)
    provenance: str = ''

    def is_empty(self) -> bool:
        return not self.branches

    def __repr__(self):
        return 'SolutionSet(%d branches from %s)' % (len(self.branches),
                                                     self.provenance)


def _normalize_equations(eqs, fld, gens):
    out = []
    for e in eqs:
        e = alg_expand(e, fld)
        if e == 0:
            continue
        if not (e.free_symbols & set(gens)):
            return None  # a nonzero constant: inconsistent
        out.append(e)
    return out


def _poly_factors(expr, gens, fld):
    """Non-constant irreducible factors (as Polys over the field)."""
    p = sp.Poly(sp.expand(expr), *gens, domain=fld.domain)
    _c, facs = p.factor_list()
    return [f for f, _m in facs if sum(f.degree_list()) > 0]


def _is_constant_multiple(pa, pb, fld):
    if pa.monoms() != pb.monoms():
        return False
    da, db = pa.as_dict(native=True), pb.as_dict(native=True)
    key = pa.monoms()[0]
    ratio = fld.div(da[key], db[key])
    return all(da[k] == db[k] * ratio for k in da)


def _unit_factors(ineqs, gens, fld):
    """Irreducible factors of the nonvanishing constraints; these behave as
    units during saturation."""
    units = []
    for iq in ineqs:
        iq = sp.expand(iq)
        if not (iq.free_symbols & set(gens)):
            continue
        for f in _poly_factors(iq, gens, fld):
            if not any(_is_constant_multiple(f, u, fld) for u in units):
                units.append(f)
    return units


def _strip_unit_factors(eqs, units, gens, fld):
    out = []
    for e in eqs:
        kept = None
        for f in _poly_factors(e, gens, fld):
            if any(_is_constant_multiple(f, u, fld) for u in units):
                continue
            kept = f if kept is None else kept * f  # multiplicity collapsed
        if kept is None:
            # the equation is a unit: inconsistent with the constraints
            return None
        out.append(kept.as_expr())
    return out


def saturated_lex_basis(eqs, gens, ineqs, fld: GroundField):
    """Lex Groebner basis of (eqs) saturated by the product of the
    inequations; [] for the zero ideal, [1] for the empty solution set."""
    gens = tuple(gens)
    eqs = _normalize_equations(eqs, fld, gens)
    if eqs is None:
        return [sp.Integer(1)]
    units = _unit_factors(ineqs, gens, fld)
    if eqs:
        stripped = _strip_unit_factors(eqs, units, gens, fld)
        if stripped is None:
            return [sp.Integer(1)]
        eqs = stripped
    if not eqs:
        return []
    if units:
        w = sp.Dummy('w')
        sat = sp.Integer(1)
        for u in units:
            sat *= u.as_expr()
        gb = sp.groebner(list(eqs) + [sp.expand(w * sat) - 1], w, *gens,
                         order='lex', domain=fld.domain)
        eqs = [g for g in gb.exprs if w not in g.free_symbols]
        if not eqs:
            return []
    gb = sp.groebner(eqs, *gens, order='lex', domain=fld.domain)
    basis = list(gb.exprs)
    return [sp.Integer(1)] if basis == [sp.Integer(1)] else basis


def _extract_substitutions(basis, gens, fld):
    """Peel generators of the shapes a*v + rest(other vars) with constant a,
    and c*v^k, into substitutions.  Returns (subs, residual basis)."""
    basis = [sp.expand(b) for b in basis if sp.expand(b) != 0]
    subs = {}
    changed = True
    while changed:
        changed = False
        for b in list(basis):
            for v in reversed(gens):
                if v in subs or v not in b.free_symbols:
                    continue
                p = sp.Poly(b, v)
                if p.degree() == 1:
                    a = p.nth(1)
                    rest = p.nth(0)
                    if a.free_symbols & set(gens):
                        continue
                    ainv = fld.div(fld.one, fld.convert(a))
                    subs[v] = alg_expand(-rest * fld.to_sympy(ainv), fld)
                    changed = True
                    break
                mono = p.as_dict()
                if len(mono) == 1:
                    (k,), c = next(iter(mono.items()))
                    if k >= 1 and not (c.free_symbols & set(gens)):
                        subs[v] = sp.Integer(0)
                        changed = True
                        break
            if changed:
                break
        if changed:
            # close the substitutions and re-reduce the basis
            for k in list(subs):
                subs[k] = alg_expand(subs[k].xreplace(subs), fld)
            basis = [alg_expand(b.xreplace(subs), fld) for b in basis]
            basis = [b for b in basis if b != 0]
    return subs, basis


def _back_substitution_points(basis, gens, fld):
    """Enumerate the points of a zero-dimensional lex basis over the field.
    Returns (points, splits_fully); points are {gen: element-expr} dicts."""
    points = []
    fully = True

    def go(polys, rem_gens, acc):
        nonlocal fully
        if not rem_gens:
            points.append(dict(acc))
            return
        v = rem_gens[-1]
        unis = []
        for p in polys:
            pe = sp.expand(p)
            if pe == 0:
                continue
            if pe.free_symbols & set(rem_gens[:-1]):
                continue
            q = sp.Poly(pe, v, domain=fld.domain)
            if not q.is_zero:
                unis.append(q)
        if not unis:
            fully = False
            return
        g = reduce(lambda a, b: a.gcd(b), unis)
        if g.degree() == 0:
            return
        _c, facs = g.factor_list()
        for fac, _m in facs:
            if fac.degree() == 0:
                continue
            if fac.degree() > 1:
                fully = False
                continue
            d = fac.as_dict(native=True)
            root = fld.div(-d.get((0,), fld.zero), d.get((1,), fld.one))
            root_expr = fld.to_sympy(root)
            nxt = [sp.expand(p.xreplace({v: root_expr})) for p in polys]
            nxt = [_renorm(p, rem_gens[:-1], fld) for p in nxt]
            nxt = [p for p in nxt if p != 0]
            go(nxt, rem_gens[:-1], acc + [(v, root_expr)])

    go(list(basis), list(gens), [])
    return points, fully


def _renorm(expr, gens, fld):
    """Re-normalize algebraic-number coefficients after a substitution so
    zero tests are reliable."""
    if not gens:
        try:
            return sp.Integer(0) if fld.convert(expr) == fld.zero else expr
        except Exception:
            return sp.expand(expr)
    p = sp.Poly(expr, *gens, domain=fld.domain)
    return p.as_expr() if not p.is_zero else sp.Integer(0)


def solve_system(eqs, gens, ineqs, fld: GroundField, label=''):
    """Solve {eqs = 0, ineqs != 0}: returns a list of SolutionBranch, where
    non-splitting or positive-dimensional parts are returned un-decomposed
    with their residual ideal."""
    gens = tuple(gens)
    basis = saturated_lex_basis(eqs, gens, ineqs, fld)
    if basis == [sp.Integer(1)]:
        return []
    subs, residual = _extract_substitutions(basis, gens, fld)
    solved = set(subs)
    rem = tuple(g for g in gens if g not in solved)
    sub_ineqs = []
    for iq in ineqs:
        val = sp.expand(sp.sympify(iq).xreplace(subs))
        if val == 0:
            return []
        if val.free_symbols & set(rem):
            sub_ineqs.append(val)
    if not residual:
        return [SolutionBranch(subs, rem, (), tuple(sub_ineqs), label)]
    res_gens = tuple(g for g in rem if any(g in r.free_symbols
                                           for r in residual))
    free_rest = tuple(g for g in rem if g not in res_gens)
    gb = sp.groebner(residual, *res_gens, order='lex', domain=fld.domain)
    if gb.exprs == [sp.Integer(1)]:
        return []
    if gb.is_zero_dimensional:
        pts, fully = _back_substitution_points(gb.exprs, res_gens, fld)
        branches = []
        for pt in pts:
            full = dict(subs)
            full.update(pt)
            for k in list(full):
                full[k] = sp.expand(full[k].xreplace(pt))
            iqs = []
            dead = False
            for iq in ineqs:
                val = sp.expand(sp.sympify(iq).xreplace(full))
                val = _renorm(val, free_rest, fld)
                if val == 0:
                    dead = True
                    break
                if val.free_symbols & set(free_rest):
                    iqs.append(val)
            if not dead:
                branches.append(SolutionBranch(full, free_rest, (),
                                               tuple(iqs), label))
        if not fully:
            branches.append(SolutionBranch(
                dict(subs), rem, tuple(gb.exprs), tuple(sub_ineqs),
                label + ' (non-split residual)'))
        return branches
    # positive-dimensional residual: keep the ideal, but drop the branch if
    # some inequation vanishes identically on it
    for iq in sub_ineqs:
        if sp.reduced(iq, gb.exprs, *res_gens, order='lex',
                      domain=fld.domain)[1] == 0:
            return []
    return [SolutionBranch(subs, rem, tuple(gb.exprs), tuple(sub_ineqs),
                           label + ' (positive-dimensional)')]


def refine_branch(branch: SolutionBranch, extra_eqs, fld: GroundField):
    """Impose further equations on a branch; returns refined branches with
    composed substitutions."""
    eqs = [branch.substitute(e) for e in extra_eqs]
    eqs += [sp.expand(e) for e in branch.equations]
    out = []
    for sub in solve_system(eqs, branch.free, branch.inequations, fld,
                            branch.label):
        full = dict(branch.subs)
        full.update(sub.subs)
        for k in list(full):
            full[k] = sp.expand(sp.sympify(full[k]).xreplace(sub.subs))
        out.append(SolutionBranch(full, sub.free, sub.equations,
                                  sub.inequations, branch.label))
    return out
