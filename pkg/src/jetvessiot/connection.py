"""Step-by-step construction of integral distributions U_i = Xbar_i + zeta_i^k Ybar_k.

Unknowns.  zeta_i^(beta,rho) for i = 1..n and each parametric order-q jet
(beta, rho).  Its contraction label is the jet (beta, rho + 1_i): two unknowns
with the same label must coincide for U to be integral, so with contraction
on, every unknown is represented by the one with the smallest subscript i.

Algebraic conditions (extended form), one per pair i < j and row (alpha, nu):

    G_ij = Theta_ij + Xi_i zeta_j - Xi_j zeta_i = 0.

Step j treats the unknowns whose representative has subscript j as unknowns
and every other unknown as a given parameter.  Writing the rows i < j as
A z + P p + c = 0 (A: unknowns, P: parameters, c = Theta), the rank condition
is rank A = rank [A | P] and the augmented one rank A = rank [A | P | c].
"""

from .expr import Expr, Var, ZERO, ONE, partial_var
from .jet import VectorField, lie_bracket, add_unit, unit, mi_class
from .linalg import SymMatrix, rank_generic, solve_affine, nullspace, rank_rational
from .vessiot import reference_complement, symbol_fields, structure_coefficients, structure_rows


# --------------------------------------------------------------------------
# layout

class ZetaLayout:
    def __init__(self, sys, contract=True):
        self.sys = sys
        self.contract = contract
        self.cols = sys.parametric_pairs()
        ch = sys.chart
        self.raw = {}
        for i in range(1, sys.n + 1):
            for b, rho in self.cols:
                name = "zeta%d[%s]" % (i, ch.jet_name(b, rho))
                self.raw[(i, (b, rho))] = Var("z", (i, (b, rho)), name)
        self.canon = {}
        first = {}
        for i in range(1, sys.n + 1):
            for col in self.cols:
                key = (i, col)
                lab = self.label(key)
                if contract and lab in first:
                    self.canon[key] = first[lab]
                else:
                    first.setdefault(lab, key)
                    self.canon[key] = key

    def label(self, key):
        """Contraction label (beta, rho + 1_i) of zeta_i^(beta, rho)."""
        i, (b, rho) = key
        return (b, add_unit(rho, i))

    def label_name(self, lab):
        b, mu = lab
        ch = self.sys.chart
        names = [ch.indep[k] for k, c in enumerate(mu) for _ in range(c)]
        return "(%s, {%s})" % (ch.dep[b - 1], ",".join(names))

    def var(self, i, col):
        """The representative Var of zeta_i^col."""
        return self.raw[self.canon[(i, col)]]

    def raw_var(self, i, col):
        return self.raw[(i, col)]

    def index(self, v):
        return v.key[0]

    def variables(self, i=None):
        """Representative Vars, optionally only those with subscript i."""
        out = [self.raw[k] for k in sorted(self.raw, key=self._order) if self.canon[k] == k]
        if i is not None:
            out = [v for v in out if v.key[0] == i]
        return out

    def _order(self, key):
        i, col = key
        return (i, self.cols.index(col))

    def aliases(self):
        return [(self.raw[k], self.raw[c]) for k, c in sorted(self.canon.items(), key=lambda t: self._order(t[0]))
                if k != c]

    def to_canonical(self):
        """Substitution raw Var -> representative Var."""
        return {self.raw[k]: Expr.var(self.raw[c]) for k, c in self.canon.items() if k != c}

    def zeta_vector(self, i):
        """[representative of zeta_i^col for col in cols] as Exprs."""
        return [Expr.var(self.var(i, col)) for col in self.cols]


# --------------------------------------------------------------------------
# algebraic conditions

def algebraic_conditions(sys, layout, sc=None, homogeneous=False):
    """{(i, j): [G_ij rows]} with representatives substituted; without
    Theta when homogeneous."""
    sc = sc or structure_coefficients(sys)
    out = {}
    for i in range(1, sys.n + 1):
        zi = layout.zeta_vector(i)
        for j in range(i + 1, sys.n + 1):
            zj = layout.zeta_vector(j)
            rows = []
            for r in range(len(sc.rows)):
                g = ZERO if homogeneous else sc.theta[(i, j)][r]
                for k in range(len(layout.cols)):
                    g = g + sc.xi[i][r, k] * zj[k] - sc.xi[j][r, k] * zi[k]
                rows.append(g)
            out[(i, j)] = rows
    return out


def contract(M, layout):
    """Sum the columns of M (labelled by raw zeta keys) that share a
    representative into the leftmost of them and drop the rest."""
    order = []
    groups = {}
    for c, key in enumerate(M.col_labels):
        rep = layout.canon.get(key, key)
        if rep not in groups:
            groups[rep] = []
            order.append(rep)
        groups[rep].append(c)
    rows = []
    for r in range(M.nrows):
        row = []
        for rep in order:
            acc = ZERO
            for c in groups[rep]:
                acc = acc + M[r, c]
            row.append(acc)
        rows.append(row)
    return SymMatrix(rows, M.row_labels, order, len(order))


def complete_matrix(sys, j, sc=None, contracted=True, augmented=False):
    """Coefficient matrix of the rows (i, (alpha, nu)), i < j, of G in the
    columns zeta_j, zeta_1, ..., zeta_{j-1} (raw layout), optionally followed
    by Theta; contracted by representatives when asked."""
    sc = sc or structure_coefficients(sys)
    lay = ZetaLayout(sys, contract=True)
    cols = sc.cols
    r = len(cols)
    col_labels = [(j, c) for c in cols]
    for i in range(1, j):
        col_labels += [(i, c) for c in cols]
    rows, rlabels = [], []
    for i in range(1, j):
        for rr, rl in enumerate(sc.rows):
            row = [sc.xi[i][rr, k] for k in range(r)]
            for h in range(1, j):
                if h == i:
                    row += [-sc.xi[j][rr, k] for k in range(r)]
                else:
                    row += [ZERO] * r
            if augmented:
                row.append(sc.theta[(i, j)][rr])
            rows.append(row)
            rlabels.append((i, rl))
    if augmented:
        col_labels.append("Theta")
    M = SymMatrix(rows, rlabels, col_labels, len(col_labels))
    return contract(M, lay) if contracted else M


# --------------------------------------------------------------------------
# steps

class RankCheck:
    def __init__(self, lhs_rank, rhs_rank, caveats):
        self.lhs_rank = lhs_rank
        self.rhs_rank = rhs_rank
        self.passes = lhs_rank == rhs_rank
        self.caveats = caveats

    def __bool__(self):
        return self.passes

    def to_dict(self):
        return {"lhs_rank": self.lhs_rank, "rhs_rank": self.rhs_rank, "passes": self.passes,
                "caveats": [str(c) for c in self.caveats]}


def _rank(M, seed):
    if M.nrows == 0 or M.ncols == 0:
        return 0, []
    rr = rank_generic(M, seed=seed)
    return rr.rank, rr.caveats


class StepResult:
    def __init__(self, j, layout, unknowns, params, A, P, c, rank_condition, augmented_condition,
                 relations, residuals, solution=None):
        self.j = j
        self.layout = layout
        self.unknowns = unknowns
        self.params = params
        self.A = A
        self.P = P
        self.c = c
        self.rank_condition = rank_condition
        self.augmented_condition = augmented_condition
        self.relations = relations      # restrictions on parameters (zeta-bearing Exprs)
        self.residuals = residuals      # zeta-free obstructions
        self.solution = solution

    @property
    def ok(self):
        return self.rank_condition.passes and self.augmented_condition.passes

    def offending_labels(self):
        """For each parameter relation: the contraction labels of its unknowns."""
        out = []
        for rel in self.relations:
            labs = sorted({self.layout.label(v.key) for v in rel.free_vars() if v.kind == "z"})
            out.append(labs)
        return out

    def to_dict(self):
        d = {
            "j": self.j,
            "unknowns": [v.name for v in self.unknowns],
            "parameters": [v.name for v in self.params],
            "rank_condition": self.rank_condition.to_dict(),
            "augmented_condition": self.augmented_condition.to_dict(),
            "passes": self.ok,
        }
        if self.relations:
            d["parameter_relations"] = [
                {"relation": str(rel), "labels": [self.layout.label_name(l) for l in labs],
                 "vanishes_under_contraction": rel.subs(self.layout_contracted_map()).is_zero()}
                for rel, labs in zip(self.relations, self.offending_labels())]
        if self.residuals:
            d["residuals"] = [str(e) for e in self.residuals]
        if self.solution is not None:
            d["free"] = [v.name for v in self.solution.free]
        return d

    def layout_contracted_map(self):
        full = ZetaLayout(self.layout.sys, contract=True)
        return full.to_canonical()


def step_system(sys, j, layout, sc=None, seed=0, values=None, homogeneous=False):
    """Rank conditions and offending relations for step j (no solving).

    `values` maps the representatives of subscript < j to their values from
    the earlier steps (affine in the still free unknowns).  Without it every
    earlier unknown counts as a free parameter.
    """
    sc = sc or structure_coefficients(sys)
    G = algebraic_conditions(sys, layout, sc, homogeneous)
    unknowns = layout.variables(j)
    earlier = [v for v in layout.variables() if v.key[0] < j]
    values = {v: values.get(v, Expr.var(v)) for v in earlier} if values else {v: Expr.var(v) for v in earlier}
    params = [v for v in earlier if values[v] == Expr.var(v)]
    at_zero = {v: ZERO for v in params}
    rows_A, rows_P, rows_c, labels = [], [], [], []
    for i in range(1, j):
        for r, g in enumerate(G[(i, j)]):
            zero = {v: ZERO for v in unknowns}
            rows_A.append([g.diff(v) for v in unknowns])
            rest = g.subs(zero).subs(_bindings(values))
            rows_P.append([rest.diff(v) for v in params])
            rows_c.append(rest.subs(at_zero))
            labels.append((i, sc.rows[r]))
    nr = len(labels)
    A = SymMatrix(rows_A, labels, unknowns, len(unknowns))
    P = SymMatrix(rows_P, labels, params, len(params))
    C = SymMatrix([[c] for c in rows_c], labels, ["Theta"], 1)
    ra, cav_a = _rank(A, seed)
    rap, cav_ap = _rank(A.hstack(P), seed)
    rapc, cav_apc = _rank(A.hstack(P, C), seed)
    rank_cond = RankCheck(ra, rap, _merge(cav_a, cav_ap))
    aug_cond = RankCheck(ra, rapc, _merge(cav_a, cav_apc))
    relations, residuals = [], []
    if not (rank_cond.passes and aug_cond.passes) and nr:
        if A.ncols:
            basis, _ = nullspace(A.T())
        else:
            basis = [{labels[k]: (ONE if k == r else ZERO) for k in range(nr)} for r in range(nr)]
        for y in basis:
            rel = ZERO
            for r in range(nr):
                yr = y[labels[r]]
                if yr.is_zero():
                    continue
                row = rows_c[r]
                for k, v in enumerate(params):
                    row = row + rows_P[r][k] * Expr.var(v)
                rel = rel + yr * row
            if rel.is_zero():
                continue
            if rel.has_formal():
                relations.append(_primitive(rel))
            else:
                residuals.append(rel)
    return StepResult(j, layout, unknowns, params, A, P, list(rows_c), rank_cond, aug_cond,
                      relations, residuals)


def _merge(a, b):
    out = list(a)
    for x in b:
        if x not in out:
            out.append(x)
    return out


def _primitive(e):
    """Scale a relation so that its lowest zeta has coefficient 1."""
    vs = sorted((v for v in e.free_vars() if v.kind == "z"), key=lambda v: v.sk)
    a = e.diff(vs[0])
    if a.has_formal() or a.is_zero():
        return e
    return e / a


def step_at(sys, j, contract_=True, seed=0):
    """The StepResult of step j as the construction produces it: with
    contraction the earlier unknowns carry their values from steps < j,
    without it they are independent parameters (the complete matrix)."""
    if j < 2 or j > sys.n:
        raise ValueError("steps run over 2 <= j <= n")
    if not contract_:
        return step_system(sys, j, ZetaLayout(sys, False), seed=seed)
    fam = build_family(sys, True, stop=j - 1, seed=seed)
    if not fam.success:
        raise ValueError("step %d fails already; step %d is not reached" % (fam.failed_step.j, j))
    return step_system(sys, j, fam.layout, seed=seed, values=fam.values)


def rank_condition(sys, j, contract_=True, seed=0):
    return step_at(sys, j, contract_, seed).rank_condition


def augmented_rank_condition(sys, j, contract_=True, seed=0):
    return step_at(sys, j, contract_, seed).augmented_condition


def step_solve(sys, j, layout=None, values=None, sc=None, seed=0, homogeneous=False):
    """Step j: conditions, and when they hold the affine solution for the
    unknowns in terms of the free parameters."""
    layout = layout or ZetaLayout(sys)
    st = step_system(sys, j, layout, sc, seed, values, homogeneous)
    if not st.ok:
        return st
    b = []
    for r in range(st.A.nrows):
        rhs = st.c[r]
        for k, v in enumerate(st.params):
            rhs = rhs + st.P[r, k] * Expr.var(v)
        b.append(-rhs)
    if st.A.ncols == 0:
        st.solution = _EmptySolution()
        return st
    sol = solve_affine(st.A, b, st.unknowns)
    if not sol:
        raise ArithmeticError("step %d inconsistent although the rank conditions hold: %r" % (j, sol))
    st.solution = sol
    return st


class _EmptySolution:
    labels = []
    free = []
    pivots = []

    def general(self, free_values):
        return {}


# --------------------------------------------------------------------------
# family

class Relation:
    """How the raw unknown zeta_i^col is determined in the family."""

    def __init__(self, raw, kind, value, target=None, closed_form=None):
        self.raw = raw
        self.kind = kind           # "free", "alias", "closed_form", "solved"
        self.value = value         # Expr in the free unknowns
        self.target = target       # representative Var for aliases
        self.closed_form = closed_form

    def to_dict(self):
        d = {"zeta": self.raw.name, "kind": self.kind, "value": str(self.value)}
        if self.target is not None:
            d["alias_of"] = self.target.name
        if self.closed_form is not None:
            d["closed_form"] = str(self.closed_form)
        return d


class ConnectionFamily:
    def __init__(self, sys, layout, steps, values, relations, G_check):
        self.sys = sys
        self.layout = layout
        self.steps = steps
        self.values = values           # representative Var -> Expr in free Vars
        self.relations = relations
        self.G_check = G_check         # list of nonvanishing G rows (empty on success)
        self.success = True

    @property
    def free(self):
        return [v for v in self.layout.variables() if self.values[v] == Expr.var(v)]

    def value_of(self, i, col):
        return self.values[self.layout.var(i, col)]

    def fields(self):
        X = reference_complement(self.sys)
        _, Y = symbol_fields(self.sys)
        out = []
        for i in range(1, self.sys.n + 1):
            U = X[i - 1]
            for k, col in enumerate(self.layout.cols):
                U = U + Y[k].scale(self.value_of(i, col))
            out.append(U)
        return out

    def to_dict(self):
        return {
            "success": True,
            "contract": self.layout.contract,
            "steps": [s.to_dict() for s in self.steps],
            "free_parameters": [v.name for v in self.free],
            "relations": [r.to_dict() for r in self.relations],
            "fields": [U.to_dict() for U in self.fields()],
            "algebraic_conditions_vanish": not self.G_check,
        }


class FamilyFailure:
    def __init__(self, sys, layout, steps):
        self.sys = sys
        self.layout = layout
        self.steps = steps
        self.success = False

    @property
    def failed_step(self):
        return self.steps[-1]

    def __bool__(self):
        return False

    def to_dict(self):
        return {"success": False, "contract": self.layout.contract,
                "failed_step": self.failed_step.j,
                "steps": [s.to_dict() for s in self.steps]}


def closed_form_relation(sys, layout, alpha, i, j, homogeneous=False):
    """zeta_j^(alpha,i) = C_i(phi^alpha_j) + sum_{k<=j} sum_{gamma in P(k)}
    C^k_gamma(phi^alpha_j) zeta_i^(gamma,k), first order, i < j,
    (alpha, i) parametric and (alpha, j) principal."""
    from .involution import C1, Cv
    phi = sys.phi(alpha, j)
    acc = ZERO if homogeneous else sys.restrict(C1(sys, i, phi))
    n = sys.n
    for k in range(1, j + 1):
        for g in sys.P(k):
            c = Cv(sys, k, g, phi)
            if not c.is_zero():
                acc = acc + sys.restrict(c) * Expr.var(layout.var(i, (g, unit(n, k))))
    return acc


def _bindings(values):
    """The non-identity part of a value map, usable with Expr.subs."""
    return {v: e for v, e in values.items() if e != Expr.var(v)}


def build_family(sys, contract_=True, stop=None, seed=0, homogeneous=False):
    """Run the steps j = 2..n (or ..stop); homogeneous drops Theta, which
    gives the construction for the symbol alone."""
    layout = ZetaLayout(sys, contract_)
    sc = structure_coefficients(sys)
    values = {v: Expr.var(v) for v in layout.variables(1)}
    steps = []
    last = sys.n if stop is None else min(stop, sys.n)
    for j in range(2, last + 1):
        if contract_:
            st = step_solve(sys, j, layout, values, sc, seed, homogeneous)
        else:
            # complete-matrix form: earlier unknowns count as independent
            # parameters; when it passes, the solve below composes values
            st = step_system(sys, j, layout, sc, seed, None, homogeneous)
            if st.ok:
                st.solution = step_solve(sys, j, layout, values, sc, seed, homogeneous).solution
        steps.append(st)
        if not st.ok:
            return FamilyFailure(sys, layout, steps)
        sol = st.solution
        gen = sol.general({f: Expr.var(f) for f in sol.free})
        for v in st.unknowns:
            values[v] = gen[v] if v in gen else Expr.var(v)
    for j in range(last + 1, sys.n + 1):
        for v in layout.variables(j):
            values.setdefault(v, Expr.var(v))
    # verify G == 0 on the family
    G = algebraic_conditions(sys, layout, sc, homogeneous)
    bad = []
    for (i, j), rows in G.items():
        if j > last:
            continue
        for r, g in enumerate(rows):
            val = g.subs(_bindings(values))
            if not val.is_zero():
                bad.append(((i, j), sc.rows[r], val))
    if bad:
        raise ArithmeticError("family does not satisfy the algebraic conditions: %s" % bad[:3])
    relations = _relations(sys, layout, values, homogeneous)
    return ConnectionFamily(sys, layout, steps, values, relations, bad)


def _relations(sys, layout, values, homogeneous=False):
    out = []
    n = sys.n
    for i in range(1, n + 1):
        for col in layout.cols:
            raw = layout.raw_var(i, col)
            rep = layout.var(i, col)
            val = values[rep]
            if rep != raw:
                out.append(Relation(raw, "alias", val, target=rep))
                continue
            if val == Expr.var(rep):
                out.append(Relation(raw, "free", val))
                continue
            b, rho = col
            cf = None
            kind = "solved"
            if sys.q == 1:
                h = mi_class(rho)
                if h < i and sys.in_B(b, i):
                    cf = closed_form_relation(sys, layout, b, h, i, homogeneous)
                    if cf.subs(_bindings(values)) != val:
                        raise ArithmeticError("closed-form relation disagrees for %s" % raw.name)
                    kind = "closed_form"
            out.append(Relation(raw, kind, val, closed_form=cf))
    return out


# --------------------------------------------------------------------------
# differential conditions

class DiffEquation:
    def __init__(self, i, j, col, leader, rhs, zeta):
        self.i = i
        self.j = j
        self.col = col
        self.leader = leader        # partial Var D[x_j](zeta_i^col)
        self.rhs = rhs
        self.zeta = zeta
        self.cls = j

    def to_dict(self):
        return {"pair": [self.i, self.j], "class": self.cls, "leader": self.leader.name,
                "rhs": str(self.rhs)}

    def __repr__(self):
        return "%s = %s" % (self.leader.name, self.rhs)


def _apply(U, e):
    return U(e)


def differential_conditions(family):
    """H^p_ij = U_i(zeta_j^p) - U_j(zeta_i^p) in solved form for the leader
    D[x_j](zeta_i^p), in the raw unknowns and raw fields."""
    sys = family.sys
    lay = family.layout
    X = reference_complement(sys)
    _, Y = symbol_fields(sys)
    n = sys.n
    U = []
    for i in range(1, n + 1):
        F = X[i - 1]
        for k, col in enumerate(lay.cols):
            F = F + Y[k].scale(Expr.var(lay.raw_var(i, col)))
        U.append(F)
    out = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for col in lay.cols:
                zi = lay.raw_var(i, col)
                zj = lay.raw_var(j, col)
                H = U[i - 1](Expr.var(zj)) - U[j - 1](Expr.var(zi))
                L = partial_var(zi, sys.chart.x(j))
                rhs = H + Expr.var(L)
                if L in rhs.free_vars():
                    raise ArithmeticError("leader not isolated")
                out.append(DiffEquation(i, j, col, L, rhs, zi))
    return out


class ReducedSystem:
    def __init__(self, kept, dropped, renumbering, structure_ok, structure_issues):
        self.kept = kept                  # list of DiffEquation in free unknowns
        self.dropped = dropped            # list of (DiffEquation, status, residual)
        self.renumbering = renumbering    # {Var: new name}
        self.structure_ok = structure_ok
        self.structure_issues = structure_issues

    def to_dict(self):
        return {
            "equations": [e.to_dict() for e in self.kept],
            "dropped": [{"pair": [e.i, e.j], "leader": e.leader.name, "status": st,
                         "residual": str(res)} for e, st, res in self.dropped],
            "unknowns": {v.name: name for v, name in self.renumbering.items()},
            "structure_ok": self.structure_ok,
            "structure_issues": self.structure_issues,
                    }


def _substitute_family(family, e):
    """Replace raw unknowns and their formal partials by the family values."""
    lay = family.layout
    sysch = family.sys.chart
    rawvals = {}
    for (i, col), raw in lay.raw.items():
        rawvals[raw] = family.values[lay.var(i, col)]
    out = e
    # partials first: D[c](zeta) -> d/dc of the value
    subs = {}
    for v in e.free_vars():
        if v.kind == "dz":
            val = rawvals[v.base]
            for c in v.wrt:
                val = val.diff(c)
            if val != Expr.var(v):
                subs[v] = val
    if subs:
        out = out.subs(subs)
    return out.subs(_bindings(rawvals))


def _reduce_by_leaders(H, leaders):
    """Replace leaders by their right sides until none is left; each right
    side only holds x-partials of lower class, so this terminates."""
    while True:
        hit = {L: r for L, r in leaders.items() if L in H.free_vars()}
        if not hit:
            return H
        H = H.subs(hit)


def reduce_differential_conditions(family, eqs=None):
    eqs = eqs if eqs is not None else differential_conditions(family)
    lay = family.layout
    free = set(family.free)
    kept, dropped_raw = [], []
    for e in eqs:
        rep = lay.var(e.i, e.col)
        own = rep == e.zeta and rep in free
        # the full equation H = rhs - leader, with the family substituted
        H = _substitute_family(family, e.rhs - Expr.var(e.leader))
        if own:
            rhs = H + Expr.var(e.leader)
            kept.append(DiffEquation(e.i, e.j, e.col, e.leader, rhs, e.zeta))
        else:
            dropped_raw.append((e, H))
    leaders = {e.leader: e.rhs for e in kept}
    if len(leaders) != len(kept):
        raise ArithmeticError("two kept equations share a leader")
    dropped = []
    for e, H in dropped_raw:
        res = _reduce_by_leaders(H, leaders)
        if res.is_zero():
            status = "vanished"
        elif not any(v.kind == "dz" for v in res.free_vars()):
            status = "new algebraic condition"
        else:
            status = "non-vanishing"
        dropped.append((e, status, res))
    issues = []
    for e in kept:
        if e.leader in e.rhs.free_vars():
            issues.append("%s: leader on the right side" % e.leader.name)
        for v in e.rhs.free_vars():
            if v.kind == "dz":
                xs = [c for c in v.wrt if c.kind == "x"]
                if len(v.wrt) > 1:
                    issues.append("%s: second-order term %s" % (e.leader.name, v.name))
                for c in xs:
                    if c.key[0] >= e.j:
                        issues.append("%s: x-partial %s of class >= %d" % (e.leader.name, v.name, e.j))
            elif v.kind == "z" and v not in free:
                issues.append("%s: eliminated unknown %s" % (e.leader.name, v.name))
    ren = {}
    for i in range(1, family.sys.n + 1):
        p = 0
        for v in lay.variables(i):
            if v in free:
                p += 1
                ren[v] = "zeta%d^%d" % (i, p)
    return ReducedSystem(kept, dropped, ren, not issues, issues)


# --------------------------------------------------------------------------
# pointwise check of a specialised family

class PointwiseResult:
    def __init__(self, integral, flat, brackets):
        self.integral = integral
        self.flat = flat
        self.brackets = brackets

    def to_dict(self):
        return {"integral": self.integral, "flat": self.flat}


def specialise_fields(family, choice):
    """U_i with the free unknowns replaced by explicit expressions."""
    sub = {v: Expr.lift(choice[v]) for v in family.free}
    out = []
    for U in family.fields():
        out.append(VectorField({c: e.subs(sub) for c, e in U.comps.items()}))
    return out


def pointwise_check(family, choice, point):
    """Evaluate [U_i, U_j] at a point of the equation and decide whether it
    lies in span{Xbar, Ybar} (integral) and in span{U} (flat)."""
    sys = family.sys
    U = specialise_fields(family, choice)
    X = reference_complement(sys)
    _, Y = symbol_fields(sys)
    coords = sys.barred_chart().coords
    vec = lambda V: [V[c].eval_at(point) for c in coords]
    base_V = [vec(F) for F in X + Y]
    base_U = [vec(F) for F in U]
    rV, rU = rank_rational(base_V) if base_V else 0, rank_rational(base_U) if base_U else 0
    integral = flat = True
    brs = []
    for i in range(len(U)):
        for j in range(i + 1, len(U)):
            B = vec(lie_bracket(U[i], U[j]))
            brs.append(B)
            if rank_rational(base_V + [B]) != rV:
                integral = False
            if rank_rational(base_U + [B]) != rU:
                flat = False
    return PointwiseResult(integral, flat, brs)


def step_verdicts(sys, seed=0):
    """(rank conditions hold at every step of the construction for the
    symbol, augmented conditions hold at every step of the full one)."""
    sym = build_family(sys, True, seed=seed, homogeneous=True)
    full = build_family(sys, True, seed=seed)
    return bool(sym.success), bool(full.success)
