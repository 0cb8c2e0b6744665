"""Ground fields for exact arithmetic: QQ and simple extensions QQ(gen).

Field elements are raw sympy domain elements (MPQ for the rationals, ANP for
an extension).  They support +, -, * directly; use :meth:`GroundField.div`
for safe division.  A field is immutable and hashable, so values carrying a
field reference can be compared cheaply.
"""

from __future__ import annotations

from fractions import Fraction

import sympy as sp
from sympy import QQ

from .errors import ExtensionRequiredError, InputError

_T = sp.Symbol('_t')


class GroundField:
    """QQ or a simple extension QQ(gen) with a monic irreducible minimal
    polynomial.  ``domain`` is the underlying sympy domain."""

    __slots__ = ('domain', 'gen_name', 'minpoly', '_gen_root')

    def __init__(self, domain, gen_name=None, minpoly=None, gen_root=None):
        self.domain = domain
        self.gen_name = gen_name
        self.minpoly = minpoly  # monic Poly in _T over QQ, or None
        self._gen_root = gen_root  # sympy CRootOf / AlgebraicNumber expr

    @classmethod
    def rationals(cls) -> 'GroundField':
        return cls(QQ)

    @classmethod
    def extension(cls, gen_name: str, minpoly) -> 'GroundField':
        """Build QQ(gen) where gen is a root of ``minpoly`` (an Expr or Poly
        in one variable over QQ).  The polynomial is normalized to be monic;
        irreducibility over QQ is checked."""
        if isinstance(minpoly, sp.Poly):
            if len(minpoly.gens) != 1:
                raise InputError('minimal polynomial must be univariate')
            p = minpoly.as_expr().subs(minpoly.gens[0], _T)
        else:
            syms = sorted(sp.sympify(minpoly).free_symbols, key=str)
            if len(syms) != 1:
                raise InputError('minimal polynomial must be univariate')
            p = sp.sympify(minpoly).subs(syms[0], _T)
        poly = sp.Poly(p, _T, domain=QQ)
        if poly.degree() < 2:
            raise InputError('minimal polynomial must have degree >= 2')
        poly = poly.monic()
        _, factors = poly.factor_list()
        if len(factors) != 1 or factors[0][1] != 1:
            raise InputError(
                'minimal polynomial %s is not irreducible over QQ'
                % sp.sstr(poly.as_expr()))
        root = sp.CRootOf(poly.as_expr(), _T, 0)
        domain = QQ.algebraic_field(root)
        return cls(domain, gen_name, poly, root)

    # -- basic structure -------------------------------------------------

    @property
    def is_rationals(self) -> bool:
        return self.minpoly is None

    @property
    def kind(self) -> str:
        return 'rationals' if self.is_rationals else 'simple-extension'

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    @property
    def gen(self):
        if self.is_rationals:
            raise InputError('QQ has no extension generator')
        return self.domain.convert(self._gen_root)

    def __eq__(self, other):
        return (isinstance(other, GroundField)
                and self.gen_name == other.gen_name
                and ((self.minpoly is None and other.minpoly is None)
                     or (self.minpoly is not None and other.minpoly is not None
                         and self.minpoly == other.minpoly)))

    def __hash__(self):
        return hash((self.gen_name,
                     None if self.minpoly is None
                     else tuple(self.minpoly.all_coeffs())))

    def __repr__(self):
        if self.is_rationals:
            return 'GroundField(QQ)'
        return 'GroundField(QQ(%s), %s^%d + ...)' % (
            self.gen_name, self.gen_name, self.minpoly.degree())

    def extend(self, minpoly, gen_name: str = 'a') -> 'GroundField':
        """One-step extension of QQ.  Extending an extension is rejected:
        only a single generator is supported."""
        if not self.is_rationals:
            raise ExtensionRequiredError(
                'already working over QQ(%s); a second independent extension '
                'by %s is not supported' % (self.gen_name, sp.sstr(minpoly)),
                factor=minpoly)
        return GroundField.extension(gen_name, minpoly)

    # -- element handling -------------------------------------------------

    def convert(self, value):
        """Coerce an int, Fraction, sympy number/expression, or an element of
        a compatible field into this field."""
        if isinstance(value, Fraction):
            value = sp.Rational(value.numerator, value.denominator)
        try:
            return self.domain.convert(value)
        except Exception as exc:
            raise InputError('cannot convert %r into %r: %s'
                             % (value, self, exc)) from None

    def convert_from(self, element, other: 'GroundField'):
        """Map an element of ``other`` into this field.  Only QQ -> QQ(gen)
        and identical fields are supported."""
        if other == self:
            return element
        if other.is_rationals:
            return self.domain.convert_from(element, other.domain)
        raise InputError('cannot convert between unrelated fields %r and %r'
                         % (other, self))

    def div(self, a, b):
        if b == self.zero:
            raise ZeroDivisionError('division by zero field element')
        return self.domain.exquo(a, b)

    def to_sympy(self, element) -> sp.Expr:
        """Sympy expression of an element (in CRootOf form for extensions)."""
        return self.domain.to_sympy(element)

    def element_text(self, element) -> str:
        """Canonical rendering: rationals as "p/q", extension elements as
        polynomials in the generator name, highest power first."""
        if self.is_rationals:
            return str(sp.Rational(str(element)))
        coeffs = element.to_list()  # highest degree first
        deg = len(coeffs) - 1
        terms = []
        for k, c in enumerate(coeffs):
            e = deg - k
            c = sp.Rational(str(c))
            if c == 0:
                continue
            if e == 0:
                body = str(c)
            else:
                mono = self.gen_name if e == 1 else '%s^%d' % (self.gen_name, e)
                if c == 1:
                    body = mono
                elif c == -1:
                    body = '-' + mono
                else:
                    body = '%s*%s' % (c, mono)
            terms.append(body)
        if not terms:
            return '0'
        out = terms[0]
        for t in terms[1:]:
            out += t if t.startswith('-') else '+' + t
        return out

    def parse_element(self, text: str):
        """Inverse of :meth:`element_text` (accepts ^ for powers)."""
        expr = sp.sympify(text.replace('^', '**'),
                          locals={self.gen_name: sp.Symbol(self.gen_name)}
                          if self.gen_name else None)
        if not self.is_rationals:
            expr = expr.subs(sp.Symbol(self.gen_name), self._gen_root)
        return self.convert(expr)

    def random_element(self, rng, bound: int = 5):
        """Random element with small numerators/denominators; exercises the
        generator for extensions."""
        num = rng.randint(-bound, bound)
        den = rng.randint(1, bound)
        val = self.convert(sp.Rational(num, den))
        if not self.is_rationals:
            val = val + self.convert(rng.randint(-bound, bound)) * self.gen
        return val


def alg_expand(expr, fld: 'GroundField'):
    """Expand and reduce algebraic-number coefficients to their canonical
    representation (powers of the generator rewritten below the degree of
    the minimal polynomial), making zero tests reliable.  Works over QQ with
    a placeholder symbol, which is much faster than converting through the
    algebraic domain."""
    expr = sp.sympify(expr)
    if fld.is_rationals or expr.is_Rational:
        return sp.expand(expr)
    if not expr.has(fld._gen_root):
        return sp.expand(expr)
    g = sp.Dummy('gen')
    e2 = sp.expand(expr.xreplace({fld._gen_root: g}))
    deg = fld.minpoly.degree()
    if e2.has(g):
        p = sp.Poly(e2, g)
        if p.degree() >= deg:
            q = sp.Poly(fld.minpoly.as_expr().subs(_T, g), g)
            p = p.rem(q)
        e2 = p.as_expr()
    return sp.expand(e2.xreplace({g: fld._gen_root}))
