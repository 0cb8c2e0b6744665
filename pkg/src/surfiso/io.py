"""Parametrization files and machine-readable reports.

Input format (one parametrization per file; # starts a comment):

    domain: P2                 # or P1xP1
    field: i t^2+1             # optional: generator name, minimal polynomial
    components:
      x0^2+x1^2+x2^2
      x0*x1
      x0*x2
      x1*x2

Polynomials use ^ for powers; * may be omitted.  Reports are JSON documents
with exact entry text; identical inputs produce byte-identical reports.
"""

from __future__ import annotations

import json

import sympy as sp
from sympy.parsing.sympy_parser import (convert_xor,
                                        implicit_multiplication_application,
                                        parse_expr,
                                        standard_transformations)

from .errors import ParseError
from .fields import GroundField
from .forms import P1XP1, P2, Parametrization, ambient_vars

_TRANSFORMS = standard_transformations + (convert_xor,
                                          implicit_multiplication_application)


def parse_polynomial(text: str, tag: str, field: GroundField):
    """One polynomial in the ambient variables (and the field generator)."""
    gens = ambient_vars(tag)
    local = {str(v): v for v in gens}
    if field.gen_name:
        local[field.gen_name] = sp.Symbol(field.gen_name)
    try:
        expr = parse_expr(text, local_dict=local,
                          transformations=_TRANSFORMS, evaluate=True)
    except Exception as exc:
        raise ParseError('cannot parse polynomial %r: %s' % (text, exc)) \
            from None
    bad = expr.free_symbols - set(gens) - {sp.Symbol(field.gen_name or '')}
    if bad:
        raise ParseError('unknown symbols %s in %r'
                         % (sorted(map(str, bad)), text))
    if field.gen_name:
        expr = expr.xreplace({sp.Symbol(field.gen_name): field._gen_root})
    return sp.expand(expr)


def parse_parametrization_text(text: str) -> Parametrization:
    domain = None
    field = GroundField.rationals()
    comp_lines = []
    in_components = False
    for raw in text.splitlines():
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        low = line.lower()
        if low.startswith('domain:'):
            value = line.split(':', 1)[1].strip()
            if value not in (P2, P1XP1):
                raise ParseError('domain must be P2 or P1xP1, got %r'
                                 % value)
            domain = value
            in_components = False
        elif low.startswith('field:'):
            value = line.split(':', 1)[1].strip()
            parts = value.split(None, 1)
            if len(parts) != 2:
                raise ParseError('field line must read "field: <generator> '
                                 '<minimal polynomial>"')
            name, minpoly_text = parts
            try:
                minpoly = parse_expr(minpoly_text,
                                     transformations=_TRANSFORMS)
            except Exception as exc:
                raise ParseError('cannot parse minimal polynomial %r: %s'
                                 % (minpoly_text, exc)) from None
            field = GroundField.extension(name, minpoly)
            in_components = False
        elif low.startswith('components:'):
            in_components = True
            rest = line.split(':', 1)[1].strip()
            if rest:
                comp_lines += [p for p in rest.split(',') if p.strip()]
        elif in_components:
            comp_lines.append(line)
        else:
            raise ParseError('unexpected line %r' % line)
    if domain is None:
        raise ParseError('missing "domain:" line')
    if len(comp_lines) < 2:
        raise ParseError('need at least two components')
    exprs = [parse_polynomial(t, domain, field) for t in comp_lines]
    try:
        return Parametrization.from_exprs(domain, exprs, field)
    except Exception as exc:
        raise ParseError('invalid parametrization: %s' % exc) from None


def parse_parametrization_file(path: str) -> Parametrization:
    with open(path, 'r', encoding='utf-8') as fh:
        return parse_parametrization_text(fh.read())


# ---------------------------------------------------------------------------
# rendering

def expr_text(expr, field: GroundField) -> str:
    """Exact polynomial text; extension generators printed by name."""
    expr = sp.sympify(expr)
    if field.gen_name and field._gen_root is not None:
        expr = expr.xreplace({field._gen_root: sp.Symbol(field.gen_name)})
    return sp.sstr(sp.expand(expr), order='grlex')


def matrix_rows_text(rows, field: GroundField):
    return [[expr_text(e, field) for e in row] for row in rows]


def field_dict(field: GroundField):
    if field.is_rationals:
        return {'kind': 'rationals'}
    return {'kind': 'simple-extension', 'generator': field.gen_name,
            'minimal-polynomial': sp.sstr(
                field.minpoly.as_expr().subs(sp.Symbol('_t'),
                                             sp.Symbol('t')))}


def iso_family_dict(iso, field: GroundField):
    return {
        'provenance': iso.provenance,
        'parameters': [str(p) for p in iso.params],
        'matrix': matrix_rows_text(iso.matrix, field),
        'equations': [expr_text(e, field) for e in iso.equations],
        'inequations': [expr_text(e, field) for e in iso.inequations],
    }


def render_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False)
