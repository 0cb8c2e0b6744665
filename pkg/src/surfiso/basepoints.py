"""Base points of linear series ("get") and linear series from imposed base
points ("set").

A base-point tree stores simple points as normalized projective coordinates
and infinitely near points by the blowup chart they live in, so every
computation can replay the substitution chain:

  chart A:  (u, v) -> (u, u*(v + t0)),  divide by u^m, child at the origin
  chart B:  (u, v) -> (u*v, v),         divide by v^m, child at the origin

where (u, v) are local coordinates centered at the parent and m is the
multiplicity used for the virtual transform.  Chart A covers every point of
the exceptional line except the one direction picked up by chart B.

Polynomials in the walks are represented as {(i, j): coefficient} dicts; the
coefficients are ground-field elements for concrete forms and {basis-index:
field element} linear combinations when deriving the condition functionals of
a generic form.  All transforms are linear in the coefficients, so the
condition functionals assemble into an exact matrix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import reduce

import sympy as sp

from .errors import (ExtensionRequiredError, InputError,
                     InternalConsistencyError)
from .fields import GroundField
from .forms import (P2, Form, Parametrization, ambient_vars, form_gcd,
                    monomial_exponents, normalize_point, point_text)
from .linalg import ExactMatrix

_UV = sp.symbols('_u _v')
_token_counter = itertools.count(1)


class _NeedExtension(Exception):
    """Internal: a univariate factor did not split over the current field."""

    def __init__(self, factor_poly, field):
        super().__init__(str(factor_poly))
        self.factor = factor_poly  # sympy Poly in one symbol over field
        self.field = field


@dataclass
class BasePoint:
    mult: int
    children: list = dc_field(default_factory=list)
    # simple roots:
    proj: tuple = None     # normalized projective coordinates
    dehom: tuple = None    # indices of coordinates set to one
    local: tuple = None    # affine coordinates in that chart
    # infinitely near points:
    chart: str = ''        # 'A' or 'B' ('' for roots)
    t0: object = None      # chart-A coordinate on the exceptional line

    def is_root(self) -> bool:
        return self.chart == ''

    def location_key(self, fld: GroundField):
        if self.is_root():
            return (-self.mult, self.dehom,
                    tuple(fld.element_text(c) for c in self.proj))
        return (-self.mult, self.chart,
                '' if self.t0 is None else fld.element_text(self.t0))


@dataclass
class BasePointTree:
    tag: str
    field: GroundField
    roots: list
    token: int = dc_field(default_factory=lambda: next(_token_counter))

    def points(self):
        """Depth-first list of all points in the canonical order."""
        out = []

        def walk(p):
            out.append(p)
            for c in p.children:
                walk(c)
        for r in self.roots:
            walk(r)
        return out

    @property
    def r(self) -> int:
        return len(self.points())

    def mults(self) -> tuple:
        return tuple(p.mult for p in self.points())

    def to_dict(self):
        fld = self.field

        def node(p):
            d = {'multiplicity': p.mult}
            if p.is_root():
                d['point'] = point_text(self.tag, p.proj, fld)
            else:
                d['chart'] = p.chart
                if p.chart == 'A':
                    d['exceptional-coordinate'] = fld.element_text(p.t0)
            if p.children:
                d['children'] = [node(c) for c in p.children]
            return d
        return {'domain': self.tag, 'count': self.r,
                'points': [node(r) for r in self.roots]}

    def __repr__(self):
        return 'BasePointTree(%s, %d points, mults %s)' % (
            self.tag, self.r, list(self.mults()))


# ---------------------------------------------------------------------------
# coefficient adapters: plain field elements vs linear combinations

def _scalar_ops(fld):
    zero = fld.zero

    def cadd(a, b):
        return b if a is None else a + b

    def cmul(c, k):
        return c * k

    def is_zero(c):
        return c == zero
    return cadd, cmul, is_zero


def _linear_ops(fld):
    zero = fld.zero

    def cadd(a, b):
        if a is None:
            return b
        out = dict(a)
        for k, v in b.items():
            s = out.get(k)
            s = v if s is None else s + v
            if s == zero:
                out.pop(k, None)
            else:
                out[k] = s
        return out

    def cmul(c, k):
        if k == zero:
            return {}
        return {i: v * k for i, v in c.items()}

    def is_zero(c):
        return not c
    return cadd, cmul, is_zero


def _clean(pdict, is_zero):
    return {e: c for e, c in pdict.items() if not is_zero(c)}


def _shift(pdict, du, dv, fld, ops):
    """Substitute u -> u + du, v -> v + dv exactly."""
    cadd, cmul, is_zero = ops
    zero = fld.zero
    if (du is None or du == zero) and (dv is None or dv == zero):
        return pdict
    du = zero if du is None else du
    dv = zero if dv is None else dv
    maxi = max((e[0] for e in pdict), default=0)
    maxj = max((e[1] for e in pdict), default=0)
    pu = _powers(du, maxi, fld)
    pv = _powers(dv, maxj, fld)
    out = {}
    for (i, j), c in pdict.items():
        for ii in range(i + 1):
            bu = _binom(i, ii, fld) * pu[i - ii]
            if bu == zero:
                continue
            for jj in range(j + 1):
                bv = _binom(j, jj, fld) * pv[j - jj]
                if bv == zero:
                    continue
                out[(ii, jj)] = cadd(out.get((ii, jj)), cmul(c, bu * bv))
    return _clean(out, ops[2])


def _powers(x, n, fld):
    out = [fld.one]
    for _ in range(n):
        out.append(out[-1] * x)
    return out


def _binom(n, k, fld):
    return fld.convert(sp.binomial(n, k))


def _transform(pdict, m, chart, ops):
    """Virtual transform through one blowup chart, dividing by the
    exceptional coordinate to the power m.  Requires every monomial to have
    total degree >= m (guaranteed after the order-m coefficients are imposed
    or removed)."""
    out = {}
    cadd = ops[0]
    for (i, j), c in pdict.items():
        if i + j < m:
            raise InternalConsistencyError(
                'virtual transform below the vanishing order')
        key = (i + j - m, j) if chart == 'A' else (i, i + j - m)
        out[key] = cadd(out.get(key), c)
    return _clean(out, ops[2])


def _drop_low(pdict, m):
    return {e: c for e, c in pdict.items() if e[0] + e[1] >= m}


def _order(pdict):
    """Total vanishing order at the origin; None for the zero polynomial."""
    if not pdict:
        return None
    return min(i + j for i, j in pdict)


# ---------------------------------------------------------------------------
# localization

def _root_chart(tag, coords, fld):
    """Dehomogenization data for a normalized point: indices fixed to one and
    the local affine coordinates of the point."""
    if tag == P2:
        k = next(i for i, c in enumerate(coords) if c != fld.zero)
        rest = [i for i in range(3) if i != k]
        return (k,), tuple(rest), tuple(coords[i] for i in rest)
    i0 = 0 if coords[0] != fld.zero else 1
    j0 = 2 if coords[2] != fld.zero else 3
    rest = [1 - i0, 5 - j0]
    return (i0, j0), tuple(rest), tuple(coords[i] for i in rest)


def _localize_exps(exps, dehom, rest):
    return tuple(exps[i] for i in rest)


def _localize_form(form, root, fld, ops):
    """Concrete form -> centered local {(i,j): coeff} dict at a root."""
    pdict = {}
    cadd = ops[0]
    for exps, c in form.coeffs_dict().items():
        e = _localize_exps(exps, root.dehom, root._rest)
        pdict[e] = cadd(pdict.get(e), c)
    pdict = _clean(pdict, ops[2])
    return _shift(pdict, root.local[0], root.local[1], fld, ops)


# ---------------------------------------------------------------------------
# univariate and bivariate solving over the ground field

def _factor_roots(poly, fld):
    """Roots in the field of a univariate sympy Poly over fld.domain; raises
    _NeedExtension on a nonlinear irreducible factor."""
    roots = []
    _, factors = poly.factor_list()
    for fac, _mult in factors:
        if fac.degree() == 0:
            continue
        if fac.degree() > 1:
            raise _NeedExtension(fac, fld)
        d = fac.as_dict(native=True)
        c1 = d.get((1,), fld.zero)
        c0 = d.get((0,), fld.zero)
        roots.append(fld.div(-c0, c1))
    return roots


def _roots_of_system(exprs, var, fld):
    """Common roots in the field of univariate expressions (not all zero).
    Zero tests happen after conversion into the field domain, so unreduced
    algebraic-number powers are handled correctly."""
    polys = [sp.Poly(e, var, domain=fld.domain) for e in exprs]
    polys = [p for p in polys if not p.is_zero]
    if not polys:
        raise InternalConsistencyError('univariate system vanished entirely')
    g = reduce(lambda a, b: a.gcd(b), polys)
    if g.degree() == 0:
        return []
    return _factor_roots(g, fld)


def _solve_bivariate(exprs, uvar, vvar, fld):
    """Finite common zero set of bivariate polynomials over the field."""
    exprs = [e for e in exprs if e != 0]
    if not exprs:
        raise InternalConsistencyError('empty bivariate system')
    gb = sp.groebner(exprs, uvar, vvar, order='lex', domain=fld.domain)
    basis = list(gb.exprs)
    if basis == [sp.Integer(1)]:
        return []
    elim = [b for b in basis if uvar not in b.free_symbols]
    if not elim:
        raise InternalConsistencyError(
            'positive-dimensional common zero set; the input forms have a '
            'common factor')
    points = []
    for v0 in _roots_of_system(elim, vvar, fld):
        v0e = fld.to_sympy(v0)
        rem = []
        for b in basis:
            p = sp.Poly(sp.expand(b.subs(vvar, v0e)), uvar, domain=fld.domain)
            if not p.is_zero:
                rem.append(p.as_expr())
        if not rem:
            raise InternalConsistencyError(
                'positive-dimensional common zero set over a root')
        for u0 in _roots_of_system(rem, uvar, fld):
            points.append((u0, v0))
    return points


# ---------------------------------------------------------------------------
# get: base points of a vector space of forms

def get_base_points(forms_or_param) -> BasePointTree:
    """Base-point forest of a vector space of forms with multiplicities,
    including infinitely near points.  If a common zero does not split over
    QQ the field is extended once by the discovered generator; a second
    independent extension raises ExtensionRequiredError."""
    if isinstance(forms_or_param, Parametrization):
        forms = list(forms_or_param.components)
    else:
        forms = list(forms_or_param)
    if not forms:
        raise InputError('get_base_points of an empty list')
    tag, fld = forms[0].tag, forms[0].field
    for f in forms[1:]:
        if f.tag != tag or f.field != fld or f.degree != forms[0].degree:
            raise InputError('forms must share domain, field and degree')
    if not form_gcd(forms).is_constant():
        raise InputError('forms have a non-constant common factor; strip the '
                         'fixed part first')
    while True:
        try:
            return _get_over_field(forms, tag, fld)
        except _NeedExtension as ne:
            if not fld.is_rationals:
                raise ExtensionRequiredError(
                    'base points require a second field extension; the '
                    'factor %s does not split over QQ(%s)'
                    % (sp.sstr(ne.factor.as_expr()), fld.gen_name),
                    factor=ne.factor) from None
            minpoly = ne.factor.as_expr()
            fld = fld.extend(minpoly)
            forms = [Form.from_expr(tag, f.as_expr(), fld) for f in forms]


def _budget(tag, degree):
    if tag == P2:
        return degree * degree
    return 2 * degree[0] * degree[1]


def _get_over_field(forms, tag, fld) -> BasePointTree:
    ops = _scalar_ops(fld)
    roots = []
    state = {'sq': 0, 'budget': _budget(tag, forms[0].degree)}
    for coords in _simple_points(forms, tag, fld):
        root = BasePoint(mult=0, proj=coords)
        root.dehom, root._rest, root.local = _root_chart(tag, coords, fld)
        dicts = [_localize_form(f, root, fld, ops) for f in forms]
        _fill_node(root, dicts, fld, ops, state)
        roots.append(root)
    roots.sort(key=lambda p: p.location_key(fld))
    return BasePointTree(tag, fld, roots)


def _fill_node(node, dicts, fld, ops, state):
    orders = [_order(d) for d in dicts if _order(d) is not None]
    m = min(orders)
    if m == 0:
        raise InternalConsistencyError('base point has multiplicity zero')
    node.mult = m
    state['sq'] += m * m
    if state['sq'] > state['budget']:
        raise InternalConsistencyError(
            'blowup does not terminate; is the common gcd constant?')
    # chart A: points on the exceptional line with finite direction
    qa = [_transform(_drop_low(d, m), m, 'A', ops) for d in dicts]
    restrictions = []
    for q in qa:
        rest = {(j,): c for (i, j), c in q.items() if i == 0}
        if rest:
            restrictions.append(rest)
    if not restrictions:
        raise InternalConsistencyError('exceptional line in the base locus')
    exprs = [_dict_to_expr(r, (_UV[1],), fld) for r in restrictions]
    for t0 in _roots_of_system(exprs, _UV[1], fld):
        child = BasePoint(mult=0, chart='A', t0=t0)
        child_dicts = [_shift(q, fld.zero, t0, fld, ops) for q in qa]
        _fill_node(child, child_dicts, fld, ops, state)
        node.children.append(child)
    # chart B: only the direction missed by chart A
    qb = [_transform(_drop_low(d, m), m, 'B', ops) for d in dicts]
    if all(q.get((0, 0)) is None for q in qb):
        child = BasePoint(mult=0, chart='B')
        _fill_node(child, qb, fld, ops, state)
        node.children.append(child)
    node.children.sort(key=lambda p: p.location_key(fld))


def _dict_to_expr(pdict, vars_, fld):
    total = sp.Integer(0)
    for exps, c in pdict.items():
        term = fld.to_sympy(c)
        for x, e in zip(vars_, exps):
            term *= x ** e
        total += term
    return sp.expand(total)


def _simple_points(forms, tag, fld):
    """Common projective zeros, found chart by chart; chart k assumes the
    earlier coordinates vanish, so every point is found exactly once."""
    points = []
    gens = ambient_vars(tag)
    exprs = [f.as_expr() for f in forms]
    if tag == P2:
        charts = [((0,), (1, 2)), ((1,), (2,)), ((2,), ())]
        nvars = 3
    else:
        charts = [((0, 2), (1, 3)), ((0, 3), (1,)), ((1, 2), (3,)),
                  ((1, 3), ())]
        nvars = 4
    for ones, free in charts:
        subs = {}
        for i in range(nvars):
            if i in ones:
                subs[gens[i]] = sp.Integer(1)
            elif i not in free:
                subs[gens[i]] = sp.Integer(0)
        sub_exprs = [sp.expand(e.xreplace(subs)) for e in exprs]
        if not free:
            ok = all(_eval_zero(e, {}, fld) for e in sub_exprs)
            sols = [{}] if ok else []
        elif len(free) == 1:
            var = gens[free[0]]
            nz = [e for e in sub_exprs if e != 0]
            sols = ([] if not nz else
                    [{var: r} for r in _roots_of_system(nz, var, fld)])
        else:
            uvar, vvar = gens[free[0]], gens[free[1]]
            sols = [{uvar: u0, vvar: v0}
                    for u0, v0 in _solve_bivariate(sub_exprs, uvar, vvar,
                                                   fld)]
        for sol in sols:
            coords = []
            for i in range(nvars):
                if i in ones:
                    coords.append(fld.one)
                elif i in free:
                    coords.append(sol[gens[i]])
                else:
                    coords.append(fld.zero)
            points.append(normalize_point(tag, coords, fld))
    return points


def _eval_zero(expr, sol, fld):
    return sp.expand(expr) == 0


# ---------------------------------------------------------------------------
# set: linear series with imposed base points

def series_conditions(tree: BasePointTree, degree, mults=None):
    """Exact matrix of linear functionals on the coefficient vector of a
    degree-``degree`` form that express vanishing to order >= mults[i] at the
    tree's points.  Returns (matrix, exponent basis)."""
    fld = tree.field
    exps = monomial_exponents(tree.tag, degree)
    pts = tree.points()
    if mults is None:
        mults = tree.mults()
    if len(mults) != len(pts):
        raise InputError('multiplicity vector does not match the tree')
    want = dict(zip((id(p) for p in pts), mults))
    ops = _linear_ops(fld)
    rows = []

    def conditions_at(pdict, m):
        for (i, j), c in pdict.items():
            if i + j < m:
                rows.append(c)

    def descend(node, pdict):
        m = max(want[id(node)], 0)
        conditions_at(pdict, m)
        if not node.children:
            return
        rest = _drop_low(pdict, m)
        for child in node.children:
            if not _subtree_active(child):
                continue
            q = _transform(rest, m, child.chart, ops)
            if child.chart == 'A' and child.t0 is not None \
                    and child.t0 != fld.zero:
                q = _shift(q, fld.zero, child.t0, fld, ops)
            descend(child, q)

    def _subtree_active(node):
        if want[id(node)] > 0:
            return True
        return any(_subtree_active(c) for c in node.children)

    for root in tree.roots:
        if not _subtree_active(root):
            continue
        pdict = {}
        for k, e in enumerate(exps):
            le = _localize_exps(e, root.dehom, root._rest)
            cur = pdict.get(le)
            add = {k: fld.one}
            pdict[le] = add if cur is None else ops[0](cur, add)
        pdict = _shift(pdict, root.local[0], root.local[1], fld, ops)
        descend(root, pdict)

    dense = []
    zero = fld.zero
    for r in rows:
        dense.append([r.get(k, zero) for k in range(len(exps))])
    if not dense:
        mat = ExactMatrix.zeros(fld, 0, len(exps))
    else:
        mat = ExactMatrix.from_rows(fld, dense)
    return mat, exps


def set_linear_series(tree: BasePointTree, degree, mults=None):
    """Echelonized basis (fixed monomial order) of the forms of the given
    degree whose multiplicity at tree point i is >= mults[i].  The empty list
    is a valid answer (h0 = 0)."""
    cond, exps = series_conditions(tree, degree, mults)
    fld = tree.field
    if cond.rows == 0:
        vecs = ExactMatrix.identity(fld, len(exps))
    else:
        vecs = cond.kernel_basis()
    if vecs.cols == 0:
        return []
    echelon, pivots = vecs.transpose().rref()
    forms = []
    for i in range(len(pivots)):
        row = echelon.row(i)
        forms.append(Form.from_dict(tree.tag,
                                    dict(zip(exps, row)), degree, fld))
    return forms


def measure_multiplicities(tree: BasePointTree, forms) -> tuple:
    """Multiplicity of the linear system spanned by ``forms`` at each point
    of an existing tree (the system's own blowup may differ; points outside
    the tree are not reported)."""
    fld = tree.field
    ops = _scalar_ops(fld)
    out = {}

    def descend(node, dicts):
        orders = [_order(d) for d in dicts if _order(d) is not None]
        m = min(orders) if orders else 0
        out[id(node)] = m
        for child in node.children:
            qs = [_transform(_drop_low(d, m), m, child.chart, ops)
                  for d in dicts]
            if child.chart == 'A' and child.t0 is not None \
                    and child.t0 != fld.zero:
                qs = [_shift(q, fld.zero, child.t0, fld, ops) for q in qs]
            descend(child, qs)

    for root in tree.roots:
        dicts = [_localize_form(f, root, fld, ops) for f in forms]
        descend(root, dicts)
    return tuple(out[id(p)] for p in tree.points())
