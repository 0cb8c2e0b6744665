"""Classes of maps, adjunction reducers, base-case classification and the
reduction loop.

The three reducers and their conditions:

  r0: re-embed by the full linear series of [f];   c0: dim f < h0([f]) - 1
  r1: parametric map of [f] + kappa (adjunction);  c1: h0 > 1 and not the
      fibration shape ([f]^2 > <c>^2 = c.<c> = 0)
  r2: parametric map of [f] / gcd[f];              c2: gcd [f] > 1

Every reduction strictly drops the component degree (r1 by exactly three on
P2 and by (2,2) on P1xP1), which is asserted on every run.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .basepoints import (BasePointTree, get_base_points,
                         measure_multiplicities, set_linear_series)
from .errors import (ContractError, EmptySeriesError, InputError,
                     InternalConsistencyError)
from .forms import P2, Parametrization, form_gcd
from .lattice import (DivisorClass, canonical_class, class_gcd, intersect,
                      self_intersection)
from .linalg import ExactMatrix


@dataclass
class ClassifiedMap:
    param: Parametrization
    tree: BasePointTree
    cls: DivisorClass
    kappa: DivisorClass

    @property
    def dim(self) -> int:
        return self.param.dim

    @property
    def cdeg(self):
        return self.param.cdeg

    @property
    def field(self):
        return self.param.field

    @property
    def tag(self):
        return self.param.tag

    def __repr__(self):
        return 'ClassifiedMap([f]=%s, dim=%d)' % (self.cls.text(), self.dim)


def classify_map(f: Parametrization) -> ClassifiedMap:
    """Compute the base-point tree, the class [f] and the canonical class."""
    if f.target != 'proj':
        raise InputError('classify_map expects a map to projective space')
    rows = f.coefficient_rows()
    if ExactMatrix.from_rows(f.field, rows).rank() != len(f.components):
        raise InputError('image is contained in a hyperplane; components '
                         'are linearly dependent')
    tree = get_base_points(f.components)
    if tree.field != f.field:
        # base points forced a field extension; lift the map
        f = Parametrization.from_exprs(
            f.tag, [c.as_expr() for c in f.components], tree.field,
            target=f.target)
    if f.tag == P2:
        coords = (f.cdeg,) + tuple(-m for m in tree.mults())
    else:
        coords = f.cdeg + tuple(-m for m in tree.mults())
    cls = DivisorClass(f.tag, coords, tree.token)
    kappa = canonical_class(f.tag, tree.r, tree.token)
    return ClassifiedMap(f, tree, cls, kappa)


def h0(cm: ClassifiedMap, c: DivisorClass) -> int:
    """Dimension of the vector space of forms cut out by the class ``c`` on
    cm's base-point tree.  Classes with non-positive degree part give 0;
    negative multiplicities impose no condition."""
    if c.tree_token is not None and c.tree_token != cm.tree.token:
        raise InputError('class is indexed against a different tree')
    if cm.tag == P2:
        if c.degree_part <= 0:
            return 0
        degree = c.degree_part
    else:
        d1, d2 = c.degree_part
        if d1 < 0 or d2 < 0 or (d1 == 0 and d2 == 0):
            return 0
        degree = (d1, d2)
    return len(set_linear_series(cm.tree, degree, c.mults))


def moving_part(cm: ClassifiedMap, c: DivisorClass):
    """Strip the fixed part of the linear series of ``c``: returns the class
    of the moving part measured on cm's tree, and the parametric map (None
    when the moving series is a single form, i.e. <c> = 0)."""
    if c.tree_token is not None and c.tree_token != cm.tree.token:
        raise InputError('class is indexed against a different tree')
    basis = set_linear_series(cm.tree, c.degree_part, c.mults)
    if not basis:
        raise EmptySeriesError('the linear series of %s is empty' % c.text())
    q = form_gcd(basis)
    if not q.is_constant():
        basis = [b.exquo(q) for b in basis]
    if len(basis) == 1:
        zero = DivisorClass(cm.tag, (0,) * len(cm.cls.coords),
                            cm.tree.token)
        return zero, None
    psi = Parametrization(cm.tag, tuple(basis), cm.field)
    mults = measure_multiplicities(cm.tree, basis)
    if cm.tag == P2:
        coords = (basis[0].degree,) + tuple(-m for m in mults)
    else:
        coords = basis[0].degree + tuple(-m for m in mults)
    return DivisorClass(cm.tag, coords, cm.tree.token), psi


def p_invariant(cm: ClassifiedMap):
    """(h0([f]), [f]^2, gcd [f]) -- equal for projectively isomorphic
    images."""
    return (h0(cm, cm.cls), self_intersection(cm.cls), class_gcd(cm.cls))


# -- reducers ----------------------------------------------------------------

def condition_c0(cm: ClassifiedMap) -> int:
    return 1 if cm.dim < h0(cm, cm.cls) - 1 else 0


def reduce_r0(cm: ClassifiedMap) -> ClassifiedMap:
    if not condition_c0(cm):
        raise ContractError('r0 applied but the map already spans')
    basis = set_linear_series(cm.tree, cm.cls.degree_part, cm.cls.mults)
    q = form_gcd(basis)
    if not q.is_constant():
        basis = [b.exquo(q) for b in basis]
    out = classify_map(Parametrization(cm.tag, tuple(basis), cm.field))
    if (out.cls.degree_part != cm.cls.degree_part
            or sorted(out.cls.mults) != sorted(cm.cls.mults)):
        raise InternalConsistencyError('r0 changed the class')
    return out


def condition_c1(cm: ClassifiedMap) -> int:
    c = cm.cls + cm.kappa
    if h0(cm, c) <= 1:
        return 0
    mc, _psi = moving_part(cm, c)
    fibration = (self_intersection(cm.cls) > 0
                 and self_intersection(mc) == 0
                 and intersect(c, mc) == 0)
    return 0 if fibration else 1


def reduce_r1(cm: ClassifiedMap) -> ClassifiedMap:
    if not condition_c1(cm):
        raise ContractError('r1 applied but c1 = 0')
    _mc, psi = moving_part(cm, cm.cls + cm.kappa)
    out = classify_map(psi)
    _assert_degree_drop(cm, out, exact_three=True)
    return out


def condition_c2(cm: ClassifiedMap) -> int:
    return 1 if class_gcd(cm.cls) > 1 else 0


def reduce_r2(cm: ClassifiedMap) -> ClassifiedMap:
    if not condition_c2(cm):
        raise ContractError('r2 applied but gcd [f] = 1')
    b = cm.cls.divide(class_gcd(cm.cls))
    _mc, psi = moving_part(cm, b)
    if psi is None:
        raise InternalConsistencyError('r2 series collapsed to a point')
    out = classify_map(psi)
    _assert_degree_drop(cm, out, exact_three=False)
    return out


def _assert_degree_drop(before: ClassifiedMap, after: ClassifiedMap,
                        exact_three: bool):
    if before.tag == P2:
        drop_ok = (after.cdeg == before.cdeg - 3 if exact_three
                   else after.cdeg < before.cdeg)
    else:
        if exact_three:
            drop_ok = (after.cdeg[0] == before.cdeg[0] - 2
                       and after.cdeg[1] == before.cdeg[1] - 2)
        else:
            drop_ok = (after.cdeg[0] <= before.cdeg[0]
                       and after.cdeg[1] <= before.cdeg[1]
                       and after.cdeg != before.cdeg)
    if not drop_ok:
        raise InternalConsistencyError(
            'reduction failed to drop the component degree: %s -> %s'
            % (before.cdeg, after.cdeg))


# -- base cases ---------------------------------------------------------------

B1, B2, B3, B4, B5 = 'B1', 'B2', 'B3', 'B4', 'B5'


def classify_base_case(cm: ClassifiedMap):
    """Terminal classification once c0 = c1 = c2 = 0; returns 'B1'..'B5' or
    None (the latter only on the [f]^2 = 0 path)."""
    if condition_c0(cm) or condition_c1(cm) or condition_c2(cm):
        raise ContractError('base-case classification before full reduction')
    h0f = h0(cm, cm.cls)
    sq = self_intersection(cm.cls)
    if h0f == 3 and sq == 1:
        return B1
    if h0f == 4 and sq == 2:
        return B2
    if h0f == sq + 1 and 1 <= sq <= 8:
        return B3
    c = 2 * cm.cls + cm.kappa
    if h0(cm, c) >= 2:
        mc, _ = moving_part(cm, c)
        if self_intersection(mc) == 0:
            return B4
    c = cm.cls + cm.kappa
    if h0(cm, c) >= 2:
        mc, _ = moving_part(cm, c)
        if self_intersection(mc) == 0:
            return B5
    if sq > 0:
        raise InternalConsistencyError(
            'a fully reduced map with [f]^2 > 0 matched no base case')
    return None


# -- the reduction loop -------------------------------------------------------

@dataclass
class PipelineResult:
    empty: bool
    reason: str = None
    fhat: ClassifiedMap = None
    ghat: ClassifiedMap = None
    tag_f: str = None
    tag_g: str = None
    log: list = dc_field(default_factory=list)

    @property
    def tag(self):
        return self.tag_f


def _log_state(log, step, side, cm):
    log.append({'step': step, 'side': side,
                'class': cm.cls.text(),
                'p': p_invariant(cm),
                'flags': (condition_c0(cm), condition_c1(cm),
                          condition_c2(cm))})


def reduce_pipeline(f: ClassifiedMap, g: ClassifiedMap) -> PipelineResult:
    """The reduction loop: p-invariant gate, one r0 step, the r1 loop, one r2
    step, the second gate, then base-case classification.  An empty result is
    an answer (no isomorphisms), not an error."""
    log = []
    _log_state(log, 'input', 'f', f)
    _log_state(log, 'input', 'g', g)
    if p_invariant(f) != p_invariant(g):
        return PipelineResult(True, 'p-invariant mismatch on the input maps',
                              f, g, log=log)
    fh, gh = f, g
    flags = (condition_c0(fh), condition_c0(gh))
    if flags == (1, 1):
        fh, gh = reduce_r0(fh), reduce_r0(gh)
        _log_state(log, 'r0', 'f', fh)
        _log_state(log, 'r0', 'g', gh)
    elif flags != (0, 0):
        return PipelineResult(True, 'condition c0 differs between the maps',
                              fh, gh, log=log)
    while True:
        flags = (condition_c1(fh), condition_c1(gh))
        if flags == (0, 0):
            break
        if flags != (1, 1):
            return PipelineResult(True,
                                  'condition c1 differs between the maps',
                                  fh, gh, log=log)
        fh, gh = reduce_r1(fh), reduce_r1(gh)
        _log_state(log, 'r1', 'f', fh)
        _log_state(log, 'r1', 'g', gh)
    flags = (condition_c2(fh), condition_c2(gh))
    if flags == (1, 1):
        fh, gh = reduce_r2(fh), reduce_r2(gh)
        _log_state(log, 'r2', 'f', fh)
        _log_state(log, 'r2', 'g', gh)
    elif flags != (0, 0):
        return PipelineResult(True, 'condition c2 differs between the maps',
                              fh, gh, log=log)
    if p_invariant(fh) != p_invariant(gh):
        return PipelineResult(True,
                              'p-invariant mismatch after reduction',
                              fh, gh, log=log)
    tag_f = classify_base_case(fh)
    tag_g = classify_base_case(gh)
    if tag_f is None or tag_g is None:
        return PipelineResult(True, 'reduced class has square zero '
                              '(no base case)', fh, gh, tag_f, tag_g, log)
    return PipelineResult(False, None, fh, gh, tag_f, tag_g, log)
