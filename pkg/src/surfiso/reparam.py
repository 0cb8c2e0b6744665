"""Candidate-reparametrization super-sets for the two supported base cases.

For B1 the super-set is g^-1 o r_c o f over the 9-parameter linear family on
P2.  For B2 with two line classes it is the pair of pencil-map conjugates
over the 8-parameter family on P1xP1 (both orderings of the pencil pair);
with at most one line class the images are quadric cones and the family is
conjugation into the stabilizer of a fixed diagonal cone.

A family member is stored symbolically: component expressions in the source
domain variables and the family parameters, plus the nonvanishing and
stabilizer constraints.  The normalization case-split ("first nonzero entry
has value one") is expanded downstream, branch by branch.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

import sympy as sp

from .adjunction import ClassifiedMap, h0, moving_part, p_invariant
from .errors import (ContractError, ExtensionRequiredError, InputError,
                     InversionError)
from .fields import GroundField
from .forms import (P1XP1, P2, Form, Parametrization, ambient_vars,
                    form_gcd, monomial_exponents, target_vars)
from .lattice import DivisorClass, intersect, self_intersection
from .linalg import ExactMatrix, congruent_diagonalize

CONE_QUADRIC_DIAG = (1, 1, -1, 0)  # fixed cone Q: z0^2 + z1^2 - z2^2 = 0


@dataclass
class ReparamFamily:
    source_tag: str
    target_tag: str
    field: GroundField
    params: tuple
    components: tuple          # sympy exprs in source vars and params
    inequations: tuple = ()    # param polynomials required nonzero
    equations: tuple = ()      # stabilizer constraints (cone case)
    normalization_groups: tuple = ()
    extra_params: tuple = ()   # parameters outside the normalization
    branch_label: str = ''

    def normalization_branches(self):
        """Substitution dicts for the case split "the first nonzero entry of
        each parameter block is one"; prefixes that force an inequation to
        vanish identically are dropped."""
        per_group = []
        for group in self.normalization_groups:
            opts = []
            for k in range(len(group)):
                sub = {g: sp.Integer(0) for g in group[:k]}
                sub[group[k]] = sp.Integer(1)
                opts.append(sub)
            per_group.append(opts)
        for combo in itertools.product(*per_group):
            subs = {}
            for d in combo:
                subs.update(d)
            if any(sp.expand(iq.xreplace(subs)) == 0
                   for iq in self.inequations):
                continue
            yield subs

    def residual_params(self, subs):
        return tuple(p for p in self.params if p not in subs) \
            + self.extra_params

    def __repr__(self):
        return 'ReparamFamily(%s: %s -> %s, %d params)' % (
            self.branch_label, self.source_tag, self.target_tag,
            len(self.params) + len(self.extra_params))


def _det2(a, b, c, d):
    return sp.expand(a * d - b * c)


def identity_families(tag, field: GroundField = None) -> ReparamFamily:
    """The 9-parameter linear family on P2, or the 8-parameter family on
    P1xP1 (identity component: the rulings are not flipped)."""
    field = field or GroundField.rationals()
    if tag == P2:
        cs = sp.symbols('c0:9')
        x0, x1, x2 = ambient_vars(P2)
        comps = (cs[0] * x0 + cs[1] * x1 + cs[2] * x2,
                 cs[3] * x0 + cs[4] * x1 + cs[5] * x2,
                 cs[6] * x0 + cs[7] * x1 + cs[8] * x2)
        det = sp.expand(sp.Matrix(3, 3, list(cs)).det())
        return ReparamFamily(P2, P2, field, cs, comps, (det,), (),
                             (cs,), (), 'identity-P2')
    if tag == P1XP1:
        cs = sp.symbols('c0:8')
        y0, y1, y2, y3 = ambient_vars(P1XP1)
        comps = (cs[0] * y0 + cs[1] * y1, cs[2] * y0 + cs[3] * y1,
                 cs[4] * y2 + cs[5] * y3, cs[6] * y2 + cs[7] * y3)
        dets = (_det2(cs[0], cs[1], cs[2], cs[3]),
                _det2(cs[4], cs[5], cs[6], cs[7]))
        return ReparamFamily(P1XP1, P1XP1, field, cs, comps, dets, (),
                             (cs[0:4], cs[4:8]), (), 'identity-P1xP1')
    raise InputError('unknown domain tag %r' % (tag,))


# ---------------------------------------------------------------------------
# line classes on a reduced quadric (base case B2)

def line_classes(cm: ClassifiedMap, bound: int = None):
    """Classes c with c^2 = 0, [f].c = 1 and c = <c>: the classes of lines on
    the quadric image.  Enumerates class vectors with entries bounded by the
    degree part of [f] (override with ``bound``)."""
    p = p_invariant(cm)
    if (p[0], p[1]) != (4, 2):
        raise ContractError('line classes are defined for base case B2 only')
    if bound is None:
        bound = (cm.cls.degree_part if cm.tag == P2
                 else max(cm.cls.degree_part))
    bound = max(bound, 1)
    found = []
    for c in _bounded_classes(cm, bound):
        if intersect(cm.cls, c) != 1 or self_intersection(c) != 0:
            continue
        if h0(cm, c) < 1:
            continue
        mc, _psi = moving_part(cm, c)
        if mc == c:
            found.append(c)
    # degree part descending, exceptional part ascending: for a ruled
    # quadric this orders {l0, l1} and {e0-e1, e0-e2} naturally
    nfree = 1 if cm.tag == P2 else 2
    found.sort(key=lambda c: (tuple(-x for x in c.coords[:nfree]),
                              c.coords[nfree:]))
    return found


def _bounded_classes(cm, bound):
    r = cm.tree.r
    token = cm.tree.token
    if cm.tag == P2:
        frees = [(a,) for a in range(1, bound + 1)]
    else:
        frees = [(a0, a1) for a0 in range(0, bound + 1)
                 for a1 in range(0, bound + 1) if (a0, a1) != (0, 0)]
    for free in frees:
        budget = (free[0] ** 2 if cm.tag == P2 else 2 * free[0] * free[1])
        for tail in _square_bounded(r, budget, bound):
            yield DivisorClass(cm.tag, free + tail, token)


def _square_bounded(length, budget, bound):
    """All integer vectors of the given length with sum of squares equal to
    ``budget`` and entries in [-bound, bound] (classes with c^2 = 0)."""
    if length == 0:
        if budget == 0:
            yield ()
        return
    for head in range(-bound, bound + 1):
        rest = budget - head * head
        if rest < 0:
            continue
        for tail in _square_bounded(length - 1, rest, bound):
            yield (head,) + tail


def pencil_pair_map(cm: ClassifiedMap, a: DivisorClass,
                    b: DivisorClass) -> Parametrization:
    """The 4-component map (Psi_a ; Psi_b) to P1xP1 defined by two pencils
    with a.b = 1."""
    if h0(cm, a) != 2 or h0(cm, b) != 2:
        raise InputError('pencil classes must have h0 = 2')
    if intersect(a, b) != 1:
        raise InputError('pencil classes must meet once')
    _ma, psi_a = moving_part(cm, a)
    _mb, psi_b = moving_part(cm, b)
    comps = psi_a.components + psi_b.components
    return Parametrization(cm.tag, comps, cm.field, target='biproj')


# ---------------------------------------------------------------------------
# birational inversion by interpolating the graph relations

def _identity_conditions(hcomps, imgs, dom_tag, dom_vars):
    """Cross products expressing h o m ~ identity, as polynomials in the
    domain variables (linear in the h coefficients)."""
    conds = []
    if dom_tag == P2:
        pairs = [(i, j) for i in range(3) for j in range(i + 1, 3)]
        for i, j in pairs:
            conds.append(sp.expand(imgs[i] * dom_vars[j]
                                   - imgs[j] * dom_vars[i]))
    else:
        conds.append(sp.expand(imgs[0] * dom_vars[1]
                               - imgs[1] * dom_vars[0]))
        conds.append(sp.expand(imgs[2] * dom_vars[3]
                               - imgs[3] * dom_vars[2]))
    return conds


def _candidate_degrees(tgt_tag, max_total):
    if tgt_tag == 'proj':
        for d in range(1, max_total + 1):
            yield d
    else:
        for total in range(1, 2 * max_total + 1):
            for d1 in range(total + 1):
                yield (d1, total - d1)


def _target_monomials(m: Parametrization, degree):
    """Monomial exprs of the given degree on the target of m, paired with
    the matching products of m's components."""
    if m.target == 'biproj':
        exps_list = monomial_exponents(P1XP1, degree)
        tvars = ambient_vars(P1XP1)
    else:
        n = m.dim
        zv = target_vars(n)
        tvars = zv
        exps_list = _proj_exponents(n, degree)
    comps = m.as_exprs()
    monos, pulls = [], []
    for exps in exps_list:
        mono = sp.Integer(1)
        pull = sp.Integer(1)
        for v, c, e in zip(tvars, comps, exps):
            mono *= v ** e
            pull *= c ** e
        monos.append(mono)
        pulls.append(sp.expand(pull))
    return tvars, monos, pulls


def _proj_exponents(n, degree):
    """Exponent vectors of degree ``degree`` monomials in n+1 variables,
    lexicographic descending."""
    if n == 2:
        return monomial_exponents(P2, degree)

    def gen(rem_vars, rem_deg):
        if rem_vars == 1:
            yield (rem_deg,)
            return
        for e in range(rem_deg, -1, -1):
            for tail in gen(rem_vars - 1, rem_deg - e):
                yield (e,) + tail
    return tuple(gen(n + 1, degree))


def inverse_components(m: Parametrization, max_degree: int = 8):
    """Components (sympy exprs in the target coordinates) of a rational
    inverse of m, found by solving the linear graph relations degree by
    degree; raises InversionError when the search budget is exhausted."""
    fld = m.field
    dom_vars = ambient_vars(m.tag)
    dom_gens = list(dom_vars)
    ncomp = 3 if m.tag == P2 else 4
    for degree in _candidate_degrees(m.target, max_degree):
        tvars, monos, pulls = _target_monomials(m, degree)
        nm = len(monos)
        # unknown coefficient vector: ncomp blocks of nm entries
        conds = []
        if m.tag == P2:
            pairs = [(0, 1), (0, 2), (1, 2)]
        else:
            pairs = [(0, 1), (2, 3)]
        for i, j in pairs:
            # h_i(m) * x_j - h_j(m) * x_i = 0: coefficients per x-monomial
            lhs = {}
            for t, pull in enumerate(pulls):
                _acc(lhs, sp.expand(pull * dom_vars[j]), (i, t), fld,
                     dom_gens)
                _acc(lhs, sp.expand(-pull * dom_vars[i]), (j, t), fld,
                     dom_gens)
            conds.append(lhs)
        ncols = ncomp * nm
        dense = []
        for lhs in conds:
            for _mono, lin in lhs.items():
                row = [fld.zero] * ncols
                for (k, t), coef in lin.items():
                    row[k * nm + t] = row[k * nm + t] + coef
                dense.append(row)
        mat = ExactMatrix.from_rows(fld, dense) if dense else \
            ExactMatrix.zeros(fld, 0, ncols)
        kern = mat.kernel_basis()
        candidates = [kern.column(col) for col in range(kern.cols)]
        if kern.cols > 1:
            total = [sum(col[i] for col in candidates)
                     for i in range(len(candidates[0]))]
            candidates.append(total)
        for vec in candidates:
            comps = []
            for k in range(ncomp):
                expr = sp.Integer(0)
                for t in range(nm):
                    coef = vec[k * nm + t]
                    if coef != fld.zero:
                        expr += fld.to_sympy(coef) * monos[t]
                comps.append(sp.expand(expr))
            if any(c == 0 for c in comps):
                continue
            if _verify_inverse(m, comps, tvars, fld):
                return tuple(comps), tvars
    raise InversionError('no rational inverse found up to the degree budget; '
                         'the map may not be birational')


def _acc(store, expr, key, fld, gens):
    poly = sp.Poly(expr, *gens, domain=fld.domain)
    for mono, coef in poly.as_dict(native=True).items():
        lin = store.setdefault(mono, {})
        lin[key] = lin.get(key, fld.zero) + coef


def _verify_inverse(m, comps, tvars, fld):
    """Check h o m = identity after stripping the gcd (per target factor on
    P1xP1, where each factor scales independently)."""
    subs = dict(zip(tvars, m.as_exprs()))
    try:
        forms = [Form.from_expr(m.tag, sp.expand(c.xreplace(subs)), fld)
                 for c in comps]
    except InputError:
        return False
    dom_vars = ambient_vars(m.tag)
    groups = [range(3)] if m.tag == P2 else [(0, 1), (2, 3)]
    for grp in groups:
        sel = [forms[i] for i in grp]
        g = form_gcd(sel)
        try:
            reduced = [f.exquo(g) for f in sel]
        except InputError:
            return False
        idf = [Form.from_expr(m.tag, dom_vars[i], fld) for i in grp]
        lead = reduced[0].coeffs_dict().get(idf[0].leading_monomial())
        if lead is None:
            return False
        if not all(r == i.scale(lead) for r, i in zip(reduced, idf)):
            return False
    return True


def birational_inverse(m: Parametrization, max_degree: int = 8):
    """Rational inverse of a birational map onto its image, as a
    Parametrization from m's target back to m's domain.  Only maps whose
    target is P2 (three components) or P1xP1 are supported here; the quadric
    inverses of the cone case use :func:`inverse_components` directly."""
    comps, _tvars = inverse_components(m, max_degree)
    if m.target == 'biproj':
        src = P1XP1
    elif m.dim == 2:
        src = P2
    else:
        raise InputError('the inverse domain P%d is not a supported surface '
                         'domain' % m.dim)
    target = 'proj' if m.tag == P2 else 'biproj'
    # the inverse components live in target coordinates; rename them into the
    # ambient variables of the new source
    old = _tvars if m.target != 'biproj' else ambient_vars(P1XP1)
    new = ambient_vars(src)
    ren = dict(zip(old, new))
    exprs = [sp.expand(c.xreplace(ren)) for c in comps]
    return Parametrization.from_exprs(src, exprs, m.field, target=target,
                                      strip=True)


# ---------------------------------------------------------------------------
# super-sets for B1 and B2

def _compose_family(outer_comps, outer_vars, inner_exprs):
    subs = dict(zip(outer_vars, inner_exprs))
    return tuple(sp.expand(c.xreplace(subs)) for c in outer_comps)


def _symbolic_linear(cs, exprs, tag):
    if tag == P2:
        return (cs[0] * exprs[0] + cs[1] * exprs[1] + cs[2] * exprs[2],
                cs[3] * exprs[0] + cs[4] * exprs[1] + cs[5] * exprs[2],
                cs[6] * exprs[0] + cs[7] * exprs[1] + cs[8] * exprs[2])
    return (cs[0] * exprs[0] + cs[1] * exprs[1],
            cs[2] * exprs[0] + cs[3] * exprs[1],
            cs[4] * exprs[2] + cs[5] * exprs[3],
            cs[6] * exprs[2] + cs[7] * exprs[3])


def superset_B1(fh: ClassifiedMap, gh: ClassifiedMap):
    """One family: g^-1 o r_c o f over the 9-parameter linear family."""
    for cm, name in ((fh, 'f'), (gh, 'g')):
        if (p_invariant(cm)[0], p_invariant(cm)[1]) != (3, 1):
            raise ContractError('superset_B1 needs both maps in base case '
                                'B1 (%s is not)' % name)
    ginv = birational_inverse(gh.param)
    base = identity_families(P2, fh.field)
    rc_f = _symbolic_linear(base.params, fh.param.as_exprs(), P2)
    comps = _compose_family([c.as_expr() for c in ginv.components],
                            ambient_vars(P2), rc_f)
    return [ReparamFamily(fh.tag, gh.tag, fh.field, base.params, comps,
                          base.inequations, (), base.normalization_groups,
                          (), 'B1')]


def superset_B2(fh: ClassifiedMap, gh: ClassifiedMap, enum_bound: int = None):
    """Families for base case B2.  Two branches over the 8-parameter family
    when both quadrics are doubly ruled; the 16-parameter cone-stabilizer
    family when both are cones; no families when the cases are mixed."""
    ff = line_classes(fh, enum_bound)
    fg = line_classes(gh, enum_bound)
    if len(ff) >= 2 and len(fg) >= 2:
        if len(ff) != 2 or len(fg) != 2:
            raise ContractError('a doubly ruled quadric carries exactly two '
                                'line classes')
        return _superset_b2_ruled(fh, gh, ff, fg)
    if len(ff) <= 1 and len(fg) <= 1:
        return _superset_b2_cone(fh, gh)
    return []


def _superset_b2_ruled(fh, gh, ff, fg):
    u, v = fg
    nu = pencil_pair_map(gh, u, v)
    nuinv = birational_inverse(nu)
    a, b = ff
    families = []
    for first, second, label in ((a, b, 'B2-ab'), (b, a, 'B2-ba')):
        phi = pencil_pair_map(fh, first, second)
        base = identity_families(P1XP1, fh.field)
        rc_phi = _symbolic_linear(base.params, phi.as_exprs(), P1XP1)
        comps = _compose_family([c.as_expr() for c in nuinv.components],
                                ambient_vars(P1XP1), rc_phi)
        families.append(ReparamFamily(
            fh.tag, gh.tag, fh.field, base.params, comps, base.inequations,
            (), base.normalization_groups, (), label))
    return families


def _superset_b2_cone(fh, gh):
    s_mat, fld = cone_transform(fh)
    t_mat, fld2 = cone_transform(gh, fld)
    if fld2 != fld:
        s_mat, fld = cone_transform(fh, fld2)
    if fld != fh.field:
        fh = _lift_classified(fh, fld)
        gh = _lift_classified(gh, fld)
    ms = sp.symbols('c0:16')
    lam = sp.Symbol('lam')
    msym = sp.Matrix(4, 4, list(ms))
    aq = sp.diag(*CONE_QUADRIC_DIAG)
    stab = msym.T * aq * msym - lam * aq
    equations = tuple(sp.expand(stab[i, j])
                      for i in range(4) for j in range(i, 4)
                      if sp.expand(stab[i, j]) != 0)
    ghinv_comps, ghinv_vars = inverse_components(gh.param)
    # member = ghinv o t^-1 o M o s o fh
    f_comps = sp.Matrix([c.as_expr() for c in fh.param.components])
    s_sym = _matrix_to_sym(s_mat, fld)
    t_inv = _matrix_to_sym(t_mat.inv(), fld)
    chain = t_inv * msym * s_sym * f_comps
    comps = _compose_family(ghinv_comps, ghinv_vars,
                            [sp.expand(e) for e in chain])
    det = sp.expand(msym.det())
    return [ReparamFamily(fh.tag, gh.tag, fld, ms, comps, (det, lam),
                          equations, (ms,), (lam,), 'B2-cone')]


def _lift_classified(cm, fld):
    from .adjunction import classify_map
    return classify_map(Parametrization.from_exprs(
        cm.tag, [c.as_expr() for c in cm.param.components], fld,
        target=cm.param.target))


def _matrix_to_sym(mat: ExactMatrix, fld) -> sp.Matrix:
    return sp.Matrix([[fld.to_sympy(mat.entry(i, j))
                       for j in range(mat.cols)] for i in range(mat.rows)])


def cone_transform(cm: ClassifiedMap, fld: GroundField = None):
    """A projective transformation s with s(img f) = Q for the fixed diagonal
    cone Q (z0^2 + z1^2 - z2^2 = 0): returns (s, field), extending QQ by a
    single square root when necessary."""
    from .recovery import implicit_forms
    fld = fld or cm.field
    if fld != cm.field:
        cm = _lift_classified(cm, fld)
    quads = implicit_forms(cm.param, 2)
    if len(quads) != 1:
        raise ContractError('the image is not a quadric surface')
    amat = _quadric_matrix(quads[0], cm.field)
    smat, dmat = congruent_diagonalize(amat)
    diag = [dmat.entry(i, i) for i in range(4)]
    nz = [i for i in range(4) if diag[i] != cm.field.zero]
    if len(nz) != 3:
        raise ContractError('the quadric is not a cone of rank 3')
    best = None
    for perm in itertools.permutations(nz):
        for neg_pos in range(3):
            targets = [1, 1, 1]
            targets[neg_pos] = -1
            need = _scaling_for(diag, perm, targets, cm.field)
            if need is None:
                continue
            ext_class, scalings = need
            if ext_class is None:
                best = (perm, targets, scalings, None)
                break
            if best is None or best[3] is None:
                if best is None:
                    best = (perm, targets, scalings, ext_class)
        if best and best[3] is None:
            break
    if best is None:
        raise ExtensionRequiredError(
            'mapping the cone onto the fixed diagonal cone needs two '
            'independent square roots')
    perm, targets, scalings, ext_class = best
    field = cm.field
    if ext_class is not None:
        t = sp.Symbol('_t')
        field = field.extend(t ** 2 - ext_class, gen_name='a')
        cm2 = _lift_classified(cm, field)
        return cone_transform(cm2, field)
    # B = S P C with B^T A B = diag(targets)/nu; s = B^-1
    n = 4
    pcols = list(perm) + [i for i in range(4) if i not in nz]
    pm = [[field.one if pcols[j] == i else field.zero for j in range(n)]
          for i in range(n)]
    cmat = [[scalings[j] if i == j else field.zero
             for j in range(n)] for i in range(n)]
    b = (ExactMatrix.from_rows(field, [[smat.entry(i, j) for j in range(4)]
                                       for i in range(4)])
         @ ExactMatrix.from_rows(field, pm)
         @ ExactMatrix.from_rows(field, cmat))
    return b.inv(), field


def _scaling_for(diag, perm, targets, fld):
    """Column scalings c with c_i^2 * d_perm[i] = nu * t_i (nu fixed by the
    first position).  Returns (needed square class or None, scalings) or
    None when the rationals of a square root cannot line up."""
    nu = diag[perm[0]] * fld.convert(targets[0])
    scalings = [fld.one, None, None, fld.one]
    ext_class = None
    for k in (1, 2):
        q = fld.div(nu * fld.convert(targets[k]), diag[perm[k]])
        root = _field_sqrt(q, fld)
        if root is not None:
            scalings[k] = root
            continue
        if not fld.is_rationals:
            return None
        ratio = sp.Rational(str(q))
        cls = _squarefree_class(ratio)
        if ext_class is None or ext_class == cls:
            ext_class = cls
            scalings[k] = None
        else:
            return None
    return ext_class, scalings


def _field_sqrt(q, fld):
    t = sp.Symbol('_t')
    poly = sp.Poly(t ** 2 - fld.to_sympy(q), t, domain=fld.domain)
    _c, factors = poly.factor_list()
    for fac, _mult in factors:
        if fac.degree() == 1:
            d = fac.as_dict(native=True)
            return fld.div(-d.get((0,), fld.zero), d.get((1,), fld.one))
    return None


def _squarefree_class(q: sp.Rational) -> int:
    n = int(q.p * q.q)
    sign = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    d = 2
    while d * d <= n:
        cnt = 0
        while n % d == 0:
            n //= d
            cnt += 1
        if cnt % 2:
            out *= d
        d += 1
    return sign * out * n


def _quadric_matrix(quad, fld) -> ExactMatrix:
    zv = target_vars(3)
    poly = sp.Poly(quad, *zv, domain=fld.domain)
    rows = [[fld.zero] * 4 for _ in range(4)]
    half = fld.convert(sp.Rational(1, 2))
    for mono, coef in poly.as_dict(native=True).items():
        idx = [i for i, e in enumerate(mono) for _ in range(e)]
        i, j = idx[0], idx[1]
        if i == j:
            rows[i][i] = coef
        else:
            rows[i][j] = rows[i][j] + coef * half
            rows[j][i] = rows[j][i] + coef * half
    return ExactMatrix.from_rows(fld, rows)
