"""Batch command-line interface.

    surfiso basepoints F          base-point tree of one parametrization
    surfiso classify F            class, canonical class, p-invariant
    surfiso reduce F              full reduction chain and base-case tag
    surfiso isoms F G             projective isomorphisms between images
    surfiso symmetries F          isoms of a surface with itself
    surfiso verify F G            isoms plus an explicit verification report

Exit codes: 0 ok, 2 parse/input error, 3 extension required, 4 base case
without an implemented super-set (B3/B4/B5), 5 internal consistency error.
"""

from __future__ import annotations

import argparse
import sys

from . import io as sio
from .adjunction import (classify_map, classify_base_case, condition_c0,
                         condition_c1, condition_c2, p_invariant, reduce_r0,
                         reduce_r1, reduce_r2)
from .applications import filter_affine, filter_euclidean, \
    moebius_isomorphisms
from .basepoints import get_base_points
from .errors import (BaseCaseUnsupportedError, ExtensionRequiredError,
                     InputError, InternalConsistencyError, SurfisoError)
from .driver import compute_isomorphisms

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_EXTENSION = 3
EXIT_BASE_CASE = 4
EXIT_INTERNAL = 5


def _reduce_single(cm):
    """One-sided reduction chain: r0 once, r1 while possible, r2 once."""
    log = [{'step': 'input', 'class': cm.cls.text(),
            'p': list(p_invariant(cm))}]
    if condition_c0(cm):
        cm = reduce_r0(cm)
        log.append({'step': 'r0', 'class': cm.cls.text(),
                    'p': list(p_invariant(cm))})
    while condition_c1(cm):
        cm = reduce_r1(cm)
        log.append({'step': 'r1', 'class': cm.cls.text(),
                    'p': list(p_invariant(cm))})
    if condition_c2(cm):
        cm = reduce_r2(cm)
        log.append({'step': 'r2', 'class': cm.cls.text(),
                    'p': list(p_invariant(cm))})
    return cm, log


def _cmd_basepoints(args):
    f = sio.parse_parametrization_file(args.inputs[0])
    tree = get_base_points(f.components)
    return {'command': 'basepoints',
            'field': sio.field_dict(tree.field),
            'tree': tree.to_dict()}


def _cmd_classify(args):
    f = sio.parse_parametrization_file(args.inputs[0])
    cm = classify_map(f)
    reduced, log = _reduce_single(cm)
    tag = classify_base_case(reduced)
    return {'command': 'classify',
            'field': sio.field_dict(cm.field),
            'class': cm.cls.text(),
            'canonical-class': cm.kappa.text(),
            'p-invariant': list(p_invariant(cm)),
            'embedding-dimension': cm.dim,
            'component-degree': cm.cdeg if cm.tag == 'P2' else list(cm.cdeg),
            'tree': cm.tree.to_dict(),
            'base-case': tag if tag else 'none',
            'reduction-log': log}


def _cmd_reduce(args):
    f = sio.parse_parametrization_file(args.inputs[0])
    cm = classify_map(f)
    reduced, log = _reduce_single(cm)
    tag = classify_base_case(reduced)
    return {'command': 'reduce',
            'field': sio.field_dict(reduced.field),
            'reduction-log': log,
            'base-case': tag if tag else 'none',
            'reduced-components': [c.text()
                                   for c in reduced.param.components]}


def _isoms_report(f, g, args, command):
    report = compute_isomorphisms(f, g, enum_bound=args.enum_bound,
                                  degree_budget=args.degree_budget)
    pipe = report.pipeline
    out = {'command': command,
           'kind': args.kind,
           'reduction-log': [
               {'step': e['step'], 'side': e['side'], 'class': e['class'],
                'p': list(e['p']), 'flags': list(e['flags'])}
               for e in pipe.log],
           'base-case': pipe.tag_f if pipe.tag_f else 'none'}
    if report.empty:
        out['result'] = 'empty'
        out['reason'] = report.reason
        return out
    families = report.families
    field = families[0].field if families else f.field
    if args.kind == 'affine':
        families = [x for x in (filter_affine(i) for i in families) if x]
    elif args.kind == 'euclidean':
        families = [x for x in (filter_euclidean(i) for i in families) if x]
    elif args.kind == 'moebius':
        _rep, pairs = moebius_isomorphisms(f, g,
                                           enum_bound=args.enum_bound,
                                           degree_budget=args.degree_budget)
        out['result'] = 'ok'
        out['families'] = [dict(sio.iso_family_dict(i, i.field),
                                **{'map': [sio.expr_text(c, i.field)
                                           for c in comps]})
                           for i, comps in pairs]
        out['count'] = len(pairs)
        return out
    out['result'] = 'ok'
    out['families'] = [sio.iso_family_dict(i, field) for i in families]
    out['count'] = len(families)
    out['verification'] = [{'method': m, 'ok': bool(okv)}
                           for m, okv in report.verification]
    return out


def _cmd_isoms(args):
    f = sio.parse_parametrization_file(args.inputs[0])
    g = sio.parse_parametrization_file(args.inputs[1])
    return _isoms_report(f, g, args, 'isoms')


def _cmd_symmetries(args):
    f = sio.parse_parametrization_file(args.inputs[0])
    g = sio.parse_parametrization_file(args.inputs[0])
    return _isoms_report(f, g, args, 'symmetries')


def _cmd_verify(args):
    f = sio.parse_parametrization_file(args.inputs[0])
    g = sio.parse_parametrization_file(args.inputs[1])
    out = _isoms_report(f, g, args, 'verify')
    return out


_COMMANDS = {
    'basepoints': (_cmd_basepoints, 1),
    'classify': (_cmd_classify, 1),
    'reduce': (_cmd_reduce, 1),
    'isoms': (_cmd_isoms, 2),
    'symmetries': (_cmd_symmetries, 1),
    'verify': (_cmd_verify, 2),
}


def build_parser():
    ap = argparse.ArgumentParser(
        prog='surfiso',
        description='projective isomorphisms between rational parametrized '
                    'surfaces, with exact arithmetic')
    ap.add_argument('command', choices=sorted(_COMMANDS))
    ap.add_argument('inputs', nargs='+', help='parametrization file(s)')
    ap.add_argument('--kind', choices=['projective', 'affine', 'euclidean',
                                       'moebius'], default='projective')
    ap.add_argument('--degree-budget', type=int, default=4000,
                    help='size cap for implicit-form interpolation')
    ap.add_argument('--enum-bound', type=int, default=None,
                    help='coordinate bound for the line-class search')
    ap.add_argument('--log', default=None,
                    help='also write the reduction log to this path')
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fn, nin = _COMMANDS[args.command]
    if len(args.inputs) != nin:
        print('error: %s takes %d input file(s)' % (args.command, nin),
              file=sys.stderr)
        return EXIT_PARSE
    try:
        report = fn(args)
    except BaseCaseUnsupportedError as exc:
        print(sio.render_report({
            'command': args.command, 'result': 'unimplemented-base-case',
            'base-case': exc.tag,
            'message': 'classified %s; reparametrization super-set not '
                       'implemented' % exc.tag}))
        return EXIT_BASE_CASE
    except ExtensionRequiredError as exc:
        print(sio.render_report({'command': args.command,
                                 'result': 'extension-required',
                                 'message': str(exc)}))
        return EXIT_EXTENSION
    except (InternalConsistencyError, AssertionError) as exc:
        print('internal consistency error: %s' % exc, file=sys.stderr)
        return EXIT_INTERNAL
    except (InputError, SurfisoError, OSError) as exc:
        print('error: %s' % exc, file=sys.stderr)
        return EXIT_PARSE
    text = sio.render_report(report)
    print(text)
    if args.log and 'reduction-log' in report:
        with open(args.log, 'w', encoding='utf-8') as fh:
            fh.write(sio.render_report(report['reduction-log']))
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
