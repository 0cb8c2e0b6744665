"""Integer divisor-class arithmetic on the two rational-surface lattices.

A class on P2 blown up in r points is stored as (d, m1, ..., mr) against the
basis (e0, e1, ..., er) with e0^2 = 1, ei^2 = -1; on P1xP1 it is
(d1, d2, m1, ..., mr) against (l0, l1, eps1, ..., epsr) with l0.l1 = 1,
epsi^2 = -1.  Classes carry the token of the base-point tree they are indexed
against; mixing lattices is a type error, not a silent coercion.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd as int_gcd

from .errors import InputError
from .forms import P2


@dataclass(frozen=True)
class DivisorClass:
    tag: str
    coords: tuple
    tree_token: object = None

    def __post_init__(self):
        if any(not isinstance(c, int) for c in self.coords):
            raise InputError('divisor class coordinates must be integers')
        if len(self.coords) < self._free_rank():
            raise InputError('missing degree part')

    def _free_rank(self) -> int:
        return 1 if self.tag == P2 else 2

    @property
    def degree_part(self):
        if self.tag == P2:
            return self.coords[0]
        return self.coords[:2]

    @property
    def exc_coeffs(self) -> tuple:
        """Signed coefficients against the exceptional generators."""
        return self.coords[self._free_rank():]

    @property
    def mults(self) -> tuple:
        """Multiplicities encoded by the class: minus the exceptional
        coefficients (a class d*e0 - m1*e1 - ... stores (d, -m1, ...))."""
        return tuple(-a for a in self.coords[self._free_rank():])

    @property
    def npoints(self) -> int:
        return len(self.coords) - self._free_rank()

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    # -- arithmetic ----------------------------------------------------------

    def _unify(self, other: 'DivisorClass'):
        if self.tag != other.tag or len(self.coords) != len(other.coords):
            raise InputError('divisor classes live on different lattices')
        if (self.tree_token is not None and other.tree_token is not None
                and self.tree_token != other.tree_token):
            raise InputError('divisor classes are indexed against different '
                             'base-point trees')
        return self.tree_token if self.tree_token is not None \
            else other.tree_token

    def __add__(self, other: 'DivisorClass') -> 'DivisorClass':
        token = self._unify(other)
        return DivisorClass(self.tag,
                            tuple(a + b for a, b in
                                  zip(self.coords, other.coords)), token)

    def __sub__(self, other: 'DivisorClass') -> 'DivisorClass':
        token = self._unify(other)
        return DivisorClass(self.tag,
                            tuple(a - b for a, b in
                                  zip(self.coords, other.coords)), token)

    def __neg__(self) -> 'DivisorClass':
        return DivisorClass(self.tag, tuple(-a for a in self.coords),
                            self.tree_token)

    def __mul__(self, k: int) -> 'DivisorClass':
        if not isinstance(k, int):
            raise InputError('divisor classes scale by integers only')
        return DivisorClass(self.tag, tuple(k * a for a in self.coords),
                            self.tree_token)

    __rmul__ = __mul__

    def divide(self, k: int) -> 'DivisorClass':
        if k == 0 or any(c % k for c in self.coords):
            raise InputError('class is not divisible by %d' % k)
        return DivisorClass(self.tag, tuple(c // k for c in self.coords),
                            self.tree_token)

    def text(self) -> str:
        if self.tag == P2:
            names = ['e0'] + ['e%d' % (i + 1) for i in range(self.npoints)]
        else:
            names = ['l0', 'l1'] + ['eps%d' % (i + 1)
                                    for i in range(self.npoints)]
        parts = []
        for c, n in zip(self.coords, names):
            if c == 0:
                continue
            if c == 1:
                body = n
            elif c == -1:
                body = '-' + n
            else:
                body = '%d*%s' % (c, n)
            parts.append(('+' if c > 0 else '') + body)
        if not parts:
            return '0'
        out = ''.join(parts)
        return out[1:] if out.startswith('+') else out

    def __repr__(self):
        return 'DivisorClass(%s)' % self.text()


def intersect(c1: DivisorClass, c2: DivisorClass) -> int:
    """Intersection product; e0^2 = 1 and ei^2 = -1 on P2, l0.l1 = 1 and
    epsi^2 = -1 on P1xP1, all other pairings of distinct generators zero."""
    c1._unify(c2)
    if c1.tag == P2:
        free = c1.coords[0] * c2.coords[0]
    else:
        free = c1.coords[0] * c2.coords[1] + c1.coords[1] * c2.coords[0]
    return free - sum(a * b for a, b in zip(c1.exc_coeffs, c2.exc_coeffs))


def self_intersection(c: DivisorClass) -> int:
    return intersect(c, c)


def canonical_class(tag, r: int, tree_token=None) -> DivisorClass:
    """-3 e0 + e1 + ... + er on P2; -2 l0 - 2 l1 + eps1 + ... + epsr on
    P1xP1."""
    if r < 0:
        raise InputError('number of base points must be nonnegative')
    if tag == P2:
        coords = (-3,) + (1,) * r
    else:
        coords = (-2, -2) + (1,) * r
    return DivisorClass(tag, coords, tree_token)


def class_gcd(c: DivisorClass) -> int:
    """gcd of all coordinates (degree part and multiplicities)."""
    if c.is_zero():
        raise InputError('class gcd of the zero class')
    g = 0
    for a in c.coords:
        g = int_gcd(g, abs(a))
    return g
