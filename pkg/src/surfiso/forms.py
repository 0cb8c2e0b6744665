"""Homogeneous and bihomogeneous forms on P2 / P1xP1, and parametrizations.

A form is a sympy Poly over the ground field in the fixed ambient variables
(x0,x1,x2) or (y0,y1,y2,y3).  The monomial order used everywhere is graded
lexicographic with x0 > x1 > x2 (resp. y0 > y1 > y2 > y3); it fixes gcd
normalization, matrix column order and basis echelonization bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce

import sympy as sp

from .errors import InputError
from .fields import GroundField

P2 = 'P2'
P1XP1 = 'P1xP1'

P2_VARS = sp.symbols('x0 x1 x2')
P1XP1_VARS = sp.symbols('y0 y1 y2 y3')


def ambient_vars(tag):
    if tag == P2:
        return P2_VARS
    if tag == P1XP1:
        return P1XP1_VARS
    raise InputError('unknown domain tag %r' % (tag,))


@lru_cache(maxsize=None)
def target_vars(n: int):
    """Coordinates z0..zn of the target projective space P^n."""
    return sp.symbols('z0:%d' % (n + 1))


def _check_degree(tag, degree):
    if tag == P2:
        if not isinstance(degree, int) or degree < 0:
            raise InputError('P2 degree must be a nonnegative integer')
    else:
        if (not isinstance(degree, tuple) or len(degree) != 2
                or any(not isinstance(d, int) or d < 0 for d in degree)):
            raise InputError('P1xP1 bidegree must be a pair of nonnegative '
                             'integers')


@lru_cache(maxsize=None)
def monomial_exponents(tag, degree):
    """Exponent vectors of the full monomial basis in the fixed order."""
    _check_degree(tag, degree)
    out = []
    if tag == P2:
        d = degree
        for i in range(d, -1, -1):
            for j in range(d - i, -1, -1):
                out.append((i, j, d - i - j))
    else:
        d1, d2 = degree
        for a in range(d1, -1, -1):
            for b in range(d2, -1, -1):
                out.append((a, d1 - a, b, d2 - b))
    return tuple(out)


def _degree_of_exps(tag, exps):
    if tag == P2:
        return sum(exps)
    return (exps[0] + exps[1], exps[2] + exps[3])


class Form:
    """A nonzero (bi)homogeneous form with exact coefficients."""

    __slots__ = ('tag', 'degree', 'field', 'poly')

    def __init__(self, tag, degree, field, poly):
        self.tag = tag
        self.degree = degree
        self.field = field
        self.poly = poly  # sympy Poly over field.domain in ambient_vars(tag)

    @classmethod
    def from_expr(cls, tag, expr, field: GroundField) -> 'Form':
        gens = ambient_vars(tag)
        poly = sp.Poly(sp.expand(sp.sympify(expr)), *gens, domain=field.domain)
        if poly.is_zero:
            raise InputError('the zero polynomial is not a form')
        monoms = poly.monoms()
        degree = _degree_of_exps(tag, monoms[0])
        for e in monoms[1:]:
            if _degree_of_exps(tag, e) != degree:
                raise InputError('polynomial %s is not (bi)homogeneous'
                                 % sp.sstr(expr))
        return cls(tag, degree, field, poly)

    @classmethod
    def from_dict(cls, tag, coeffs, degree, field: GroundField) -> 'Form':
        """Build from {exponent tuple: field element}; zero entries dropped."""
        gens = ambient_vars(tag)
        clean = {e: c for e, c in coeffs.items() if c != field.zero}
        if not clean:
            raise InputError('the zero polynomial is not a form')
        for e in clean:
            if _degree_of_exps(tag, e) != degree:
                raise InputError('exponent %r does not match degree %r'
                                 % (e, degree))
        poly = sp.Poly.from_dict(clean, *gens, domain=field.domain)
        return cls(tag, degree, field, poly)

    # -- accessors ---------------------------------------------------------

    def as_expr(self) -> sp.Expr:
        return self.poly.as_expr()

    def coeffs_dict(self):
        """Map from exponent tuples to ground-field domain elements."""
        return self.poly.as_dict(native=True)

    def coefficient_vector(self, exps=None):
        """Coefficients against the full monomial basis of this degree."""
        if exps is None:
            exps = monomial_exponents(self.tag, self.degree)
        d = self.coeffs_dict()
        z = self.field.zero
        return [d.get(e, z) for e in exps]

    def leading_monomial(self):
        """First monomial present, in the fixed order."""
        d = self.coeffs_dict()
        for e in monomial_exponents(self.tag, self.degree):
            if e in d:
                return e
        raise InputError('zero form')

    def evaluate(self, point):
        """Exact evaluation at a tuple of field elements."""
        dom = self.field.domain
        total = dom.zero
        for exps, c in self.coeffs_dict().items():
            term = c
            for p, e in zip(point, exps):
                for _ in range(e):
                    term = term * p
            total = total + term
        return total

    # -- arithmetic ---------------------------------------------------------

    def _like(self, poly):
        return Form(self.tag, None, self.field, poly)

    def __mul__(self, other):
        if isinstance(other, Form):
            poly = self.poly * other.poly
            if self.tag == P2:
                deg = self.degree + other.degree
            else:
                deg = (self.degree[0] + other.degree[0],
                       self.degree[1] + other.degree[1])
            return Form(self.tag, deg, self.field, poly)
        return Form(self.tag, self.degree, self.field,
                    self.poly * self.field.convert(other))

    def scale(self, element):
        return Form(self.tag, self.degree, self.field,
                    self.poly.mul_ground(element))

    def exquo(self, other: 'Form') -> 'Form':
        """Exact division; raises if the division is not exact."""
        q, r = sp.div(self.poly, other.poly)
        if not r.is_zero:
            raise InputError('inexact form division')
        if self.tag == P2:
            deg = self.degree - other.degree
        else:
            deg = (self.degree[0] - other.degree[0],
                   self.degree[1] - other.degree[1])
        return Form(self.tag, deg, self.field, q)

    def monic(self) -> 'Form':
        """Scale so the leading coefficient (fixed order) is one."""
        lead = self.coeffs_dict()[self.leading_monomial()]
        inv = self.field.div(self.field.one, lead)
        return self.scale(inv)

    def is_constant(self) -> bool:
        deg = self.degree
        return deg == 0 or deg == (0, 0)

    def __eq__(self, other):
        return (isinstance(other, Form) and self.tag == other.tag
                and self.field == other.field and self.poly == other.poly)

    def __hash__(self):
        return hash((self.tag, tuple(sorted(self.coeffs_dict().keys()))))

    def text(self) -> str:
        """Canonical string: terms in the fixed monomial order."""
        gens = ambient_vars(self.tag)
        d = self.coeffs_dict()
        parts = []
        for exps in monomial_exponents(self.tag, self.degree):
            if exps not in d:
                continue
            c = d[exps]
            mono = '*'.join(
                '%s^%d' % (g, e) if e > 1 else str(g)
                for g, e in zip(gens, exps) if e > 0)
            ctext = self.field.element_text(c)
            neg = ctext.startswith('-')
            if neg:
                ctext = ctext[1:]
            if '+' in ctext or ('-' in ctext[1:]):
                ctext = '(%s)' % ctext
            if not mono:
                body = ctext
            elif ctext == '1':
                body = mono
            else:
                body = '%s*%s' % (ctext, mono)
            parts.append(('-' if neg else '+') + body)
        out = ''.join(parts)
        return out[1:] if out.startswith('+') else out

    def __repr__(self):
        return 'Form(%s, %s)' % (self.tag, self.text())


def form_gcd(forms) -> Form:
    """Monic gcd of a nonempty list of forms (leading coefficient one under
    the fixed order).  Dividing each input by it leaves forms whose gcd is
    constant."""
    forms = list(forms)
    if not forms:
        raise InputError('form_gcd of an empty list')
    tag, field = forms[0].tag, forms[0].field
    for f in forms[1:]:
        if f.tag != tag or f.field != field:
            raise InputError('form_gcd inputs must share domain and field')
    g = reduce(lambda a, b: a.gcd(b), (f.poly for f in forms))
    gf = Form.from_expr(tag, g.as_expr(), field)
    return gf.monic()


def normalize_point(tag, coords, field: GroundField):
    """Scale projective coordinates so the first nonzero entry of each factor
    is one.  P2 points are 3-tuples; P1xP1 points are 4-tuples scaled per
    factor."""
    conv = []
    for c in coords:
        try:
            conv.append(field.domain.convert(c))
        except Exception:
            conv.append(field.convert(c))
    groups = [(0, len(conv))] if tag == P2 else [(0, 2), (2, 4)]
    out = list(conv)
    for lo, hi in groups:
        seg = out[lo:hi]
        lead = next((c for c in seg if c != field.zero), None)
        if lead is None:
            raise InputError('projective coordinates of a factor are all zero')
        inv = field.div(field.one, lead)
        out[lo:hi] = [c * inv for c in seg]
    return tuple(out)


def point_text(tag, coords, field: GroundField) -> str:
    txts = [field.element_text(c) for c in coords]
    if tag == P2:
        return '(' + ':'.join(txts) + ')'
    return '(%s:%s; %s:%s)' % tuple(txts)


@dataclass(frozen=True)
class Parametrization:
    """A rational map from P2 or P1xP1 given by same-degree forms with
    constant gcd.  ``target`` is 'proj' for P^n (n+1 components) or 'biproj'
    for P1xP1 (4 components grouped (0,1) and (2,3), pairwise same degree)."""

    tag: str
    components: tuple
    field: GroundField
    target: str = 'proj'

    def __post_init__(self):
        comps = self.components
        if self.target == 'proj':
            if len(comps) < 2:
                raise InputError('a parametrization needs >= 2 components')
            deg = comps[0].degree
            if any(c.degree != deg for c in comps):
                raise InputError('components must share their degree')
            if not form_gcd(comps).is_constant():
                raise InputError('components must have constant gcd '
                                 '(strip the fixed part first)')
        elif self.target == 'biproj':
            if len(comps) != 4:
                raise InputError('a map to P1xP1 needs exactly 4 components')
            for pair in (comps[0:2], comps[2:4]):
                if pair[0].degree != pair[1].degree:
                    raise InputError('pencil pair components must share '
                                     'their degree')
                if not form_gcd(pair).is_constant():
                    raise InputError('pencil pair must have constant gcd')
        else:
            raise InputError('unknown target %r' % (self.target,))
        for c in comps:
            if c.tag != self.tag or c.field != self.field:
                raise InputError('component domain/field mismatch')

    @classmethod
    def from_exprs(cls, tag, exprs, field, target='proj', strip=False):
        forms = [Form.from_expr(tag, e, field) for e in exprs]
        if strip:
            if target == 'biproj':
                # each factor of the target scales independently
                out = []
                for pair in (forms[0:2], forms[2:4]):
                    g = form_gcd(pair)
                    if not g.is_constant():
                        pair = [f.exquo(g) for f in pair]
                    out.extend(pair)
                forms = out
            else:
                g = form_gcd(forms)
                if not g.is_constant():
                    forms = [f.exquo(g) for f in forms]
        return cls(tag, tuple(forms), field, target)

    @property
    def cdeg(self):
        if self.target == 'biproj':
            return (self.components[0].degree, self.components[2].degree)
        return self.components[0].degree

    @property
    def dim(self) -> int:
        """Embedding dimension of the target."""
        if self.target == 'biproj':
            raise InputError('biproj target has no single embedding dimension')
        return len(self.components) - 1

    def as_exprs(self):
        return tuple(c.as_expr() for c in self.components)

    def coefficient_rows(self, exps=None):
        return [c.coefficient_vector(exps) for c in self.components]

    def __repr__(self):
        return 'Parametrization(%s -> %s, %s)' % (
            self.tag,
            'P1xP1' if self.target == 'biproj' else 'P%d' % self.dim,
            ', '.join(c.text() for c in self.components))


def compose(outer: Parametrization, inner: Parametrization,
            strip: bool = True):
    """Substitute ``inner`` into ``outer`` (inner's target must match outer's
    domain).  Returns the list of composed Forms, gcd-stripped if requested."""
    if inner.target == 'biproj':
        need = P1XP1
    elif inner.dim == 2:
        need = P2
    else:
        need = None
    if outer.tag != need:
        raise InputError('composition mismatch: inner target does not equal '
                         'outer domain')
    subs = dict(zip(ambient_vars(outer.tag), inner.as_exprs()))
    comps = [sp.expand(e.xreplace(subs)) for e in outer.as_exprs()]
    forms = [Form.from_expr(inner.tag, e, inner.field) for e in comps]
    if strip:
        g = form_gcd(forms)
        if not g.is_constant():
            forms = [f.exquo(g) for f in forms]
    return forms
