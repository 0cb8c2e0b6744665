"""Recovery of the projective isomorphisms from a reparametrization family.

For each normalization branch of the family the index set J is cut out in
stages, mirroring the staged workflow on the worked quadric example:

  (i)    the composition g o r_c must vanish at f's base points with f's
         multiplicities (conditions through the blowup charts);
  (i-b)  each component must lie in the multiplication space
         (excess-degree monomials) * span(f), the degree-aware form of the
         kernel condition -- this is what forces the gcd to drop correctly;
  (ii)   the stripped composition must have cdeg equal to cdeg(f);
  (iii)  M_{g o r_c} . ker M_f = 0 on the stripped composition.

All conditions are necessary; soundness is restored by the final matrix
identity U . M_f = M_{g o r_c}, which is asserted during extraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import reduce

import sympy as sp

from .adjunction import ClassifiedMap
from .basepoints import series_conditions
from .errors import InputError, InternalConsistencyError
from .fields import GroundField, alg_expand
from .forms import (P2, Form, Parametrization, ambient_vars,
                    monomial_exponents, target_vars)
from .linalg import ExactMatrix
from .reparam import ReparamFamily
from .solve import (SolutionBranch, SolutionSet, refine_branch, solve_system)


@dataclass
class CoefficientMatrix:
    entries: list                  # rows of sympy exprs (may hold parameters)
    monomials: tuple               # exponent vectors indexing the columns
    exact: ExactMatrix = None      # set when the entries are parameter-free

    @property
    def shape(self):
        return (len(self.entries),
                len(self.entries[0]) if self.entries else 0)


def coefficient_matrix(f: Parametrization) -> CoefficientMatrix:
    """The (n+1) x m matrix M_f with M_f . v = components of f, v the full
    monomial basis of the component degree in the fixed order."""
    exps = monomial_exponents(f.tag, f.cdeg if f.target == 'proj'
                              else f.components[0].degree)
    rows = f.coefficient_rows(exps)
    exact = ExactMatrix.from_rows(f.field, rows)
    entries = [[f.field.to_sympy(e) for e in row] for row in rows]
    return CoefficientMatrix(entries, exps, exact)


def _symbolic_rows(comp_exprs, tag, degree, fld, params):
    """Coefficient rows of parameter-carrying forms over the full monomial
    basis of the given degree."""
    exps = monomial_exponents(tag, degree)
    gens = ambient_vars(tag)
    allowed = set(exps)
    rows = []
    for c in comp_exprs:
        if c == 0:
            rows.append([sp.Integer(0)] * len(exps))
            continue
        poly = sp.Poly(c, *gens)
        d = poly.as_dict()
        if any(m not in allowed for m in d):
            raise InternalConsistencyError(
                'composition is not homogeneous of the expected degree')
        rows.append([sp.expand(d.get(e, sp.Integer(0))) for e in exps])
    return rows, exps


def _composition_degree(comp_exprs, tag, fld):
    gens = ambient_vars(tag)
    for c in comp_exprs:
        if c == 0:
            continue
        poly = sp.Poly(c, *gens)
        mono = poly.monoms()[0]
        if tag == P2:
            return sum(mono)
        return (mono[0] + mono[1], mono[2] + mono[3])
    return None


# ---------------------------------------------------------------------------
# index set J

def _compose_family_with(g_cm: ClassifiedMap, fam: ReparamFamily, subs):
    member = [sp.expand(c.xreplace(subs)) for c in fam.components]
    gvars = ambient_vars(g_cm.tag)
    gsubs = dict(zip(gvars, member))
    return [alg_expand(gc.xreplace(gsubs), g_cm.field)
            for gc in g_cm.param.as_exprs()]


def _excess(tag, big, small):
    if tag == P2:
        d = big - small
        return d if d >= 0 else None
    d = (big[0] - small[0], big[1] - small[1])
    return d if d[0] >= 0 and d[1] >= 0 else None


def _multiplication_space_annihilator(f_cm: ClassifiedMap, excess, degree):
    """Kernel of the span of {(excess-degree monomial) * f_k} inside the
    degree-``degree`` forms; a composition compatible with f must be
    orthogonal to it (columns of the returned matrix)."""
    fld = f_cm.field
    tag = f_cm.tag
    exps = monomial_exponents(tag, degree)
    rows = []
    for alpha in monomial_exponents(tag, excess):
        mono = Form.from_dict(tag, {alpha: fld.one}, excess, fld)
        for comp in f_cm.param.components:
            rows.append((mono * comp).coefficient_vector(exps))
    w = ExactMatrix.from_rows(fld, rows)
    return w.kernel_basis(), exps


def _apply_conditions_matrix(cond: ExactMatrix, row_exprs, fld):
    """cond . coeffvec for a symbolic coefficient row: polynomials in the
    parameters."""
    out = []
    lists = cond.to_lists()
    for crow in lists:
        total = sp.Integer(0)
        for ce, entry in zip(crow, row_exprs):
            if ce == fld.zero or entry == 0:
                continue
            total += fld.to_sympy(ce) * entry
        out.append(sp.expand(total))
    return [e for e in out if e != 0]


def _dot_columns(row_exprs, columns: ExactMatrix, fld):
    out = []
    for j in range(columns.cols):
        total = sp.Integer(0)
        for k in range(columns.rows):
            ce = columns.entry(k, j)
            if ce == fld.zero or row_exprs[k] == 0:
                continue
            total += fld.to_sympy(ce) * row_exprs[k]
        out.append(sp.expand(total))
    return [e for e in out if e != 0]


def _strip_parametric_gcd(comp_exprs, tag, fld, free):
    """Divide the components by their common factor over the
    rational-function field of the residual parameters, clearing parameter
    denominators afterwards.  sympy's gcd handles few parameters well; with
    three or more the common factor is found by pair syzygies instead."""
    free = tuple(free)
    nz = [c for c in comp_exprs if c != 0]
    if not nz:
        return None
    if len(free) >= 3:
        out = _strip_by_syzygy(comp_exprs, tag, fld, free)
        if out is not None:
            return out
    gens = ambient_vars(tag)
    dom = fld.domain if not free else fld.domain.frac_field(*free)
    polys = [sp.Poly(c, *gens, domain=dom) for c in comp_exprs]
    nzp = [p for p in polys if not p.is_zero]
    g = reduce(lambda a, b: a.gcd(b), nzp)
    if sum(g.degree_list()) > 0:
        polys = [p.exquo(g) if not p.is_zero else p for p in polys]
    exprs = [sp.cancel(p.as_expr()) for p in polys]
    dens = [sp.denom(sp.together(e)) for e in exprs if e != 0]
    den = sp.Integer(1)
    for d in dens:
        den = sp.lcm(den, d)
    return [sp.expand(sp.cancel(e * den)) for e in exprs]


# -- parametric gcd via pair syzygies ----------------------------------------
#
# For components with many free parameters the common factor q is recovered
# as follows: a random specialization of the parameters reveals deg q; the
# kernel of the linear syzygy A*hB - B*hA = 0 at the matching cofactor
# degree is generically one-dimensional and spanned by (A, B)/gcd(A, B);
# exact parametric long division then both extracts q and certifies it.
# All coefficient arithmetic runs in the rational-function domain, where
# normalization is canonical and zero tests are cheap.

def _mono_key(e):
    return (sum(e), e)


def _pdict_dom(expr, gens, dom):
    """{monomial: domain element} for a parametric form."""
    if expr == 0:
        return {}
    out = {}
    for m, c in sp.Poly(expr, *gens).as_dict().items():
        ce = dom.from_sympy(c)
        if ce != dom.zero:
            out[m] = ce
    return out


def _pdict_expr_dom(d, gens, dom):
    total = sp.Integer(0)
    for m, c in d.items():
        term = dom.to_sympy(c)
        for g, e in zip(gens, m):
            term *= g ** e
        total += term
    return sp.expand(total)


def _exact_div_param(numd, dend, dom):
    """Exact long division of homogeneous parametric polynomials given as
    {monomial: domain element} dicts; None when not divisible."""
    if not dend:
        raise InternalConsistencyError('division by zero polynomial')
    lead_d = max(dend, key=_mono_key)
    quot = {}
    work = dict(numd)
    while work:
        lead_n = max(work, key=_mono_key)
        diff = tuple(a - b for a, b in zip(lead_n, lead_d))
        if any(e < 0 for e in diff):
            return None
        c = work[lead_n] / dend[lead_d]
        quot[diff] = c
        for m, dc in dend.items():
            tgt = tuple(a + b for a, b in zip(diff, m))
            val = work.get(tgt, dom.zero) - c * dc
            if val == dom.zero:
                work.pop(tgt, None)
            else:
                work[tgt] = val
    return quot


def _domain_kernel(rows, ncols, dom):
    """Kernel basis of a matrix over a field domain."""
    from sympy.polys.matrices import DomainMatrix
    if not rows:
        rows = [[dom.zero] * ncols]
    dm = DomainMatrix([list(r) for r in rows], (len(rows), ncols), dom)
    red, pivots = dm.rref()
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        v = [dom.zero] * ncols
        v[f] = dom.one
        for i, p in enumerate(pivots):
            v[p] = -red[i, f].element
        basis.append(v)
    return basis


def _numeric_gcd(spec_exprs, gens, fld):
    polys = [sp.Poly(e, *gens, domain=fld.domain) for e in spec_exprs]
    polys = [p for p in polys if not p.is_zero]
    if not polys:
        return None
    return reduce(lambda a, b: a.gcd(b), polys)


def _degree_tuple(mono, tag):
    if tag == P2:
        return sum(mono)
    return (mono[0] + mono[1], mono[2] + mono[3])


def _sub_degree(big, small, tag):
    if tag == P2:
        d = big - small
        return d if d >= 0 else None
    d = (big[0] - small[0], big[1] - small[1])
    return d if d[0] >= 0 and d[1] >= 0 else None


def _pair_gcd_param(a_d, b_d, tag, fld, free, dom, rng):
    """Common factor of two homogeneous parametric polynomials (as domain
    dicts), generically correct and certified by exact division."""
    gens = ambient_vars(tag)
    one = {(0,) * len(gens): dom.one}
    for _attempt in range(4):
        spec = {p: sp.Rational(rng.randint(1, 40), rng.randint(1, 7))
                for p in free}
        sa = alg_expand(_pdict_expr_dom(a_d, gens, dom).xreplace(spec), fld)
        sb = alg_expand(_pdict_expr_dom(b_d, gens, dom).xreplace(spec), fld)
        if sa == 0 or sb == 0:
            continue
        g = _numeric_gcd([sa, sb], gens, fld)
        if g is None:
            continue
        gdeg = _degree_tuple(g.monoms()[0], tag)
        if gdeg == 0 or gdeg == (0, 0):
            return one
        adeg = _degree_tuple(max(a_d, key=_mono_key), tag)
        bdeg = _degree_tuple(max(b_d, key=_mono_key), tag)
        cof_a = _sub_degree(adeg, gdeg, tag)
        cof_b = _sub_degree(bdeg, gdeg, tag)
        if cof_a is None or cof_b is None:
            continue
        amon = monomial_exponents(tag, cof_a)
        bmon = monomial_exponents(tag, cof_b)
        # syzygy a*hb - b*ha = 0, unknowns (ha | hb)
        cols = len(amon) + len(bmon)
        eqrows = {}
        for j, m in enumerate(bmon):          # a * hb
            for am, ac in a_d.items():
                tgt = tuple(x + y for x, y in zip(am, m))
                row = eqrows.setdefault(tgt, [dom.zero] * cols)
                row[len(amon) + j] = row[len(amon) + j] + ac
        for j, m in enumerate(amon):          # -b * ha
            for bm, bc in b_d.items():
                tgt = tuple(x + y for x, y in zip(bm, m))
                row = eqrows.setdefault(tgt, [dom.zero] * cols)
                row[j] = row[j] - bc
        kern = _domain_kernel(list(eqrows.values()), cols, dom)
        if len(kern) != 1:
            continue
        vec = kern[0]
        ha = {m: vec[j] for j, m in enumerate(amon) if vec[j] != dom.zero}
        if not ha:
            continue
        q = _exact_div_param(a_d, ha, dom)
        if q is not None:
            return q
    return None


def _strip_by_syzygy(comp_exprs, tag, fld, free):
    import random
    rng = random.Random(20210 + len(free))
    gens = ambient_vars(tag)
    dom = fld.domain.frac_field(*free)
    dicts = [_pdict_dom(c, gens, dom) for c in comp_exprs]
    nz = [d for d in dicts if d]
    if not nz:
        return None
    q = dict(nz[0])
    for d in nz[1:]:
        deg_q = _degree_tuple(max(q, key=_mono_key), tag)
        if deg_q == 0 or deg_q == (0, 0):
            break
        q = _pair_gcd_param(q, d, tag, fld, free, dom, rng)
        if q is None:
            return None
    # certify: divide every component exactly
    qdeg = _degree_tuple(max(q, key=_mono_key), tag)
    trivial = qdeg == 0 or qdeg == (0, 0)
    outd = []
    for d in dicts:
        if not d:
            outd.append({})
            continue
        h = d if trivial else _exact_div_param(d, q, dom)
        if h is None:
            return None
        outd.append(h)
    # clear parameter denominators and express over the field again
    ring = dom.field.ring
    den = ring.one
    for h in outd:
        for c in h.values():
            den = ring.from_dense(
                sp.Poly(sp.lcm(dom.to_sympy(den),
                               sp.denom(sp.together(dom.to_sympy(c)))),
                        *free, domain=fld.domain).rep.to_list()) \
                if free else den
    out = []
    den_e = dom.to_sympy(den) if free else sp.Integer(1)
    for h in outd:
        expr = sp.Integer(0)
        for m, c in h.items():
            term = sp.cancel(dom.to_sympy(c) * den_e)
            for g, e in zip(gens, m):
                term *= g ** e
            expr += term
        out.append(alg_expand(expr, fld))
    return out


def index_set_J(f_cm: ClassifiedMap, g_cm: ClassifiedMap,
                fam: ReparamFamily) -> SolutionSet:
    """Parameters c for which g o r_c can equal a projective image of f:
    base-point conditions, degree bookkeeping and the kernel condition, over
    every normalization branch of the family."""
    fld = fam.field
    if fld != f_cm.field:
        raise InputError('family and map field mismatch')
    mf = coefficient_matrix(f_cm.param)
    ker_f = mf.exact.kernel_basis()
    out = SolutionSet([], fam.branch_label)
    for subs0 in fam.normalization_branches():
        params = fam.residual_params(subs0)
        comp = _compose_family_with(g_cm, fam, subs0)
        deg = _composition_degree(comp, f_cm.tag, fld)
        if deg is None:
            continue
        excess = _excess(f_cm.tag, deg, f_cm.cdeg)
        if excess is None:
            continue
        eqs = [sp.expand(e.xreplace(subs0)) for e in fam.equations]
        ineqs = []
        for iq in fam.inequations:
            v = sp.expand(iq.xreplace(subs0))
            if v == 0:
                eqs.append(sp.Integer(1))  # infeasible; kept for clarity
            elif v.free_symbols & set(params):
                ineqs.append(v)
        # stage (i): base-point conditions through f's tree
        cond, _ = series_conditions(f_cm.tree, deg, f_cm.tree.mults())
        rows, _ = _symbolic_rows(comp, f_cm.tag, deg, fld, params)
        stage1 = list(eqs)
        for row in rows:
            stage1 += _apply_conditions_matrix(cond, row, fld)
        branches = solve_system(stage1, params, ineqs, fld,
                                fam.branch_label)
        # stage (i-b): multiplication-space membership
        ann, _ = _multiplication_space_annihilator(f_cm, excess, deg)
        refined = []
        for br in branches:
            extra = []
            for row in rows:
                sub_row = [br.substitute(e) for e in row]
                extra += _dot_columns(sub_row, ann, fld)
            refined += refine_branch(br, extra, fld) if extra else [br]
        # stages (ii) and (iii): strip the common factor, check the degree,
        # impose the kernel condition on the stripped composition
        final = []
        for br in refined:
            comp_b = [br.substitute(c, fld) for c in comp]
            stripped = _strip_parametric_gcd(comp_b, f_cm.tag, fld, br.free)
            if stripped is None:
                continue
            sdeg = _composition_degree(stripped, f_cm.tag, fld)
            if sdeg != f_cm.cdeg:
                continue
            srows, _ = _symbolic_rows(stripped, f_cm.tag, sdeg, fld,
                                      br.free)
            extra = []
            for row in srows:
                extra += _dot_columns(row, ker_f, fld)
            if extra:
                subbrs = refine_branch(br, extra, fld)
            else:
                subbrs = [br]
            final += subbrs
        for br in final:
            merged = dict(subs0)
            merged.update(br.subs)
            out.branches.append(SolutionBranch(merged, br.free,
                                               br.equations, br.inequations,
                                               br.label))
    out.branches = _dedupe_branches(out.branches, fam)
    return out


def _dedupe_branches(branches, fam):
    """Drop duplicate explicit solutions (identical after scaling each
    normalization block so its first nonzero entry is one)."""
    seen = set()
    out = []
    for br in branches:
        if not br.is_explicit() or br.free:
            out.append(br)
            continue
        key = []
        for group in fam.normalization_groups:
            vals = [sp.nsimplify(br.subs.get(g, g)) for g in group]
            lead = next((v for v in vals if v != 0), None)
            if lead is None:
                key.append(('zero',))
                continue
            key.append(tuple(sp.srepr(sp.cancel(v / lead)) for v in vals))
        for p in fam.extra_params:
            key.append((sp.srepr(br.subs.get(p, p)),))
        key = tuple(key)
        if key in seen:
            continue
        seen.add(key)
        out.append(br)
    return out


# ---------------------------------------------------------------------------
# extraction of the isomorphism family

@dataclass
class IsoFamily:
    matrix: list                    # (n+1) x (n+1) sympy exprs
    params: tuple
    equations: tuple
    inequations: tuple
    provenance: str
    field: GroundField
    branch: SolutionBranch = None
    _mf: CoefficientMatrix = None
    _mgrc_rows: list = None

    @property
    def n(self) -> int:
        return len(self.matrix) - 1

    def is_numeric(self) -> bool:
        return not self.params and not self.equations

    def canonical_matrix(self):
        """Scale so the first nonzero entry (row-major) is one."""
        lead = None
        for row in self.matrix:
            for e in row:
                if sp.expand(e) != 0:
                    lead = e
                    break
            if lead is not None:
                break
        if lead is None:
            raise InternalConsistencyError('zero isomorphism matrix')
        return [[sp.cancel(sp.expand(e) / lead) for e in row]
                for row in self.matrix]

    def __repr__(self):
        return 'IsoFamily(%s, params=%s)' % (self.provenance,
                                             [str(p) for p in self.params])


def _reduce_mod(expr, equations, gens, fld):
    expr = alg_expand(expr, fld)
    if expr == 0:
        return sp.Integer(0)
    if not equations or not gens:
        return expr
    _q, r = sp.reduced(expr, list(equations), *gens, order='lex',
                       domain=fld.domain)
    return sp.expand(r)


def extract_isomorphisms(f_cm: ClassifiedMap, g_cm: ClassifiedMap,
                         fam: ReparamFamily, sols: SolutionSet):
    """Build E_f and E_{g o r_c}, form E_{g o r_c} . E_f^-1, assert the
    block shape U (+) 1, and return one IsoFamily per solution branch."""
    fld = f_cm.field
    mf = coefficient_matrix(f_cm.param)
    ker_f = mf.exact.kernel_basis()
    ef = mf.exact.vstack(ker_f.transpose())
    if ef.rank() != ef.rows:
        raise InternalConsistencyError('E_f is singular')
    ef_inv = ef.inv()
    n1 = len(f_cm.param.components)
    m = ef.rows
    # the bottom block (ker M_f)^T . E_f^-1 equals (0 | 1) by construction
    bottom = ker_f.transpose() @ ef_inv
    for i in range(bottom.rows):
        for j in range(m):
            want = fld.one if j == n1 + i else fld.zero
            if bottom.entry(i, j) != want:
                raise InternalConsistencyError('E_f block structure broken')
    families = []
    for br in sols.branches:
        comp_b = [br.substitute(c, fld) for c in
                  _compose_family_with(g_cm, fam, br.subs)]
        stripped = _strip_parametric_gcd(comp_b, f_cm.tag, fld, br.free)
        if stripped is None:
            continue
        srows, _ = _symbolic_rows(stripped, f_cm.tag, f_cm.cdeg, fld,
                                  br.free)
        einv = ef_inv.to_lists()
        tmat = []
        for row in srows:
            trow = []
            for j in range(m):
                total = sp.Integer(0)
                for k in range(m):
                    if row[k] == 0 or einv[k][j] == fld.zero:
                        continue
                    total += row[k] * fld.to_sympy(einv[k][j])
                trow.append(sp.expand(total))
            tmat.append(trow)
        # block shape: the top-right block must vanish modulo the branch
        for i in range(n1):
            for j in range(n1, m):
                r = _reduce_mod(tmat[i][j], br.equations, br.free, fld)
                if r != 0:
                    raise InternalConsistencyError(
                        'U (+) 1 block shape violated at a claimed solution; '
                        'the index-set computation is inconsistent')
        umat = [[tmat[i][j] for j in range(n1)] for i in range(n1)]
        label = br.label if br.label else fam.branch_label
        families.append(IsoFamily(umat, br.free, br.equations,
                                  br.inequations, label, fld, br, mf, srows))
    return families


def contains_specialization(iso: IsoFamily, target_rows) -> bool:
    """True when some valid specialization of the family's parameters makes
    U proportional to the given numeric matrix."""
    fld = iso.field
    t = [[sp.nsimplify(e) for e in row] for row in target_rows]
    ref = None
    for i, row in enumerate(t):
        for j, e in enumerate(row):
            if e != 0:
                ref = (i, j)
                break
        if ref:
            break
    if ref is None:
        raise InputError('zero target matrix')
    n1 = len(iso.matrix)
    eqs = []
    for i in range(n1):
        for j in range(n1):
            e = iso.matrix[i][j] * t[ref[0]][ref[1]] \
                - t[i][j] * iso.matrix[ref[0]][ref[1]]
            e = sp.numer(sp.together(sp.expand(e)))
            e = sp.expand(e)
            if e != 0:
                eqs.append(e)
    lam = sp.numer(sp.together(iso.matrix[ref[0]][ref[1]]))
    eqs += [sp.expand(x) for x in iso.equations]
    if not iso.params:
        return not eqs
    ineqs = tuple(iso.inequations) + (sp.expand(lam),)
    return bool(solve_system(eqs, iso.params, ineqs, fld))


def verify_matrix_identity(iso: IsoFamily) -> bool:
    """U . M_f = M_{g o r_c} modulo the constraint ideal."""
    if iso._mf is None or iso._mgrc_rows is None:
        raise InputError('matrix identity data missing from this family')
    fld = iso.field
    mf_rows = iso._mf.entries
    m = len(mf_rows[0])
    n1 = len(iso.matrix)
    for i in range(n1):
        for j in range(m):
            total = sp.Integer(0)
            for k in range(n1):
                total += iso.matrix[i][k] * mf_rows[k][j]
            total = sp.expand(total - iso._mgrc_rows[i][j])
            if _reduce_mod(total, iso.equations, iso.params, fld) != 0:
                return False
    return True


# ---------------------------------------------------------------------------
# implicit forms and verification

def implicit_forms(f: Parametrization, d: int):
    """Basis (echelonized, denominators cleared) of degree-d forms in the
    ambient coordinates vanishing on img f, by kernel interpolation of the
    pullbacks."""
    if d < 1:
        raise InputError('implicit form degree must be positive')
    fld = f.field
    n = f.dim
    zv = target_vars(n)
    from .reparam import _proj_exponents
    zexps = _proj_exponents(n, d)
    if f.tag == P2:
        big = d * f.cdeg
    else:
        big = (d * f.cdeg[0], d * f.cdeg[1])
    exps = monomial_exponents(f.tag, big)
    comps = f.components
    rows = []
    for ze in zexps:
        prod = None
        for comp, e in zip(comps, ze):
            for _ in range(e):
                prod = comp if prod is None else prod * comp
        if prod is None:
            raise InternalConsistencyError('empty monomial')
        rows.append(prod.coefficient_vector(exps))
    # implicit forms are the left kernel of the pullback rows
    mat = ExactMatrix.from_rows(fld, rows)
    kern = mat.transpose().kernel_basis()
    if kern.cols == 0:
        return []
    echelon, pivots = kern.transpose().rref()
    out = []
    for i in range(len(pivots)):
        row = echelon.row(i)
        expr = sp.Integer(0)
        for ze, c in zip(zexps, row):
            if c == fld.zero:
                continue
            mono = sp.Integer(1)
            for v, e in zip(zv, ze):
                mono *= v ** e
            expr += fld.to_sympy(c) * mono
        den = sp.Integer(1)
        for c in row:
            ce = fld.to_sympy(c)
            if ce.is_Rational and ce != 0:
                den = sp.lcm(den, sp.denom(ce))
        out.append(sp.expand(expr * den))
    return out


def verify_isomorphism(f: Parametrization, g: Parametrization,
                       iso: IsoFamily, d: int) -> bool:
    """Substitute chi_U o f into each degree-d implicit form of img g and
    reduce modulo the constraint ideal; True iff every residue vanishes."""
    forms_g = implicit_forms(g, d)
    if not forms_g:
        raise InputError('img g has no implicit forms of degree %d' % d)
    fld = iso.field
    fcomps = [c.as_expr() for c in f.components]
    comps = []
    for row in iso.matrix:
        total = sp.Integer(0)
        for u, fc in zip(row, fcomps):
            total += u * fc
        comps.append(sp.together(total))
    den = sp.Integer(1)
    for c in comps:
        den = sp.lcm(den, sp.denom(c))
    comps = [sp.expand(sp.cancel(c * den)) for c in comps]
    zv = target_vars(f.dim)
    gens = ambient_vars(f.tag)
    for gform in forms_g:
        residue = sp.expand(gform.xreplace(dict(zip(zv, comps))))
        if residue == 0:
            continue
        poly = sp.Poly(residue, *gens)
        for coeff in poly.as_dict().values():
            if _reduce_mod(sp.expand(coeff), iso.equations, iso.params,
                           fld) != 0:
                return False
    return True


def choose_verification_degree(g: Parametrization, budget: int = 4000):
    """Smallest degree whose implicit interpolation fits the budget and is
    nonempty; None when interpolation is out of budget (fall back to the
    matrix identity)."""
    n = g.dim
    from .reparam import _proj_exponents
    d = 1
    while True:
        zexps = _proj_exponents(n, d)
        if g.tag == P2:
            big = d * g.cdeg
        else:
            big = (d * g.cdeg[0], d * g.cdeg[1])
        cols = len(monomial_exponents(g.tag, big))
        if len(zexps) * cols > budget:
            return None
        if len(zexps) > cols:
            return d  # kernel guaranteed nonempty
        if implicit_forms(g, d):
            return d
        d += 1
