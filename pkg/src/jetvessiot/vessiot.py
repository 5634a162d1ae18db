"""Vessiot distributions: generators, reference complement, symbol fields and
the extended structure coefficients Theta and Xi.

For a solved system of order q we work in the barred chart of the equation
(x, jets of order < q, parametric jets of order q).  There

    Xbar_i = d_{x^i} + sum_{|mu| < q} bar(u^alpha_{mu+1_i}) d_{u^alpha_mu}
    Ybar_(beta,rho) = d_{u^beta_rho}          (beta, rho) parametric, |rho| = q

and the brackets only have components along d_{u^alpha_nu}, |nu| = q-1:

    [Xbar_i, Xbar_j] = Theta^(alpha,nu)_ij d_{u^alpha_nu}
    [Xbar_i, Ybar_k] = Xi^(alpha,nu)_ik d_{u^alpha_nu}

For q = 1 the rows are just alpha = 1..m.
"""

from .expr import Expr, ZERO, ONE
from .jet import VectorField, lie_bracket, add_unit, unit, mi_class, rank_key, contact_field
from .linalg import SymMatrix, rank_generic, solve_affine
from .system import ReducedCNF, ImplicitSystem


# --------------------------------------------------------------------------
# fields

def reference_complement(sys):
    """Xbar_1..Xbar_n as vector fields in the barred chart."""
    ch = sys.chart
    out = []
    for i in range(1, sys.n + 1):
        comps = {ch.x(i): ONE}
        for k in range(sys.q):
            for alpha, mu in ch.jets_of_order(k):
                comps[ch.jet(alpha, mu)] = sys.bar(alpha, add_unit(mu, i))
        out.append(VectorField(comps))
    return out


def symbol_fields(sys):
    """(labels, fields): Ybar for each parametric order-q jet, ascending ranking."""
    labels = sys.parametric_pairs()
    return labels, [VectorField.coordinate(sys.chart.jet(b, rho)) for b, rho in labels]


def pushforward(sys, V):
    """iota_* V: add the components V(phi) along the principal coordinates."""
    comps = dict(V.comps)
    for (alpha, mu), phi in sys.eqs.items():
        val = V(phi)
        if not val.is_zero():
            comps[sys.chart.jet(alpha, mu)] = val
    return VectorField(comps)


def ambient_reference_field(sys, i):
    """C_i^(q) + sum_B C_i^(q)(phi) C^mu_alpha, restricted to the equation."""
    ch = sys.chart
    C = contact_field(ch, i, sys.q)
    comps = {v: sys.restrict(c) for v, c in C.comps.items()}
    for (alpha, mu), phi in sys.eqs.items():
        comps[ch.jet(alpha, mu)] = sys.restrict(C(phi))
    return VectorField(comps)


class VessiotBasis:
    def __init__(self, sys):
        self.sys = sys
        self.X = reference_complement(sys)
        self.Y_labels, self.Y = symbol_fields(sys)
        self.W_labels = sys.principal_pairs()

    @property
    def r(self):
        return len(self.Y)

    def ambient_X(self):
        return [pushforward(self.sys, X) for X in self.X]

    def ambient_Y(self):
        return [pushforward(self.sys, Y) for Y in self.Y]

    def y_name(self, k):
        b, rho = self.Y_labels[k]
        return self.sys.chart.jet_name(b, rho)

    def to_dict(self):
        return {
            "X": [X.to_dict() for X in self.X],
            "Y": [self.y_name(k) for k in range(self.r)],
            "principal": [self.sys.chart.jet_name(a, mu) for a, mu in self.W_labels],
        }


def vessiot_basis(sys):
    return VessiotBasis(sys)


def check_tangency(sys, fields):
    """Residues iota_*V(Phi) for every equation Phi = u - phi; all must be zero."""
    bad = []
    for V in fields:
        P = pushforward(sys, V)
        for (alpha, mu), phi in sys.eqs.items():
            res = sys.restrict(P(Expr.var(sys.chart.jet(alpha, mu)) - phi))
            if not res.is_zero():
                bad.append((V, sys.chart.jet_name(alpha, mu), res))
    return bad


# --------------------------------------------------------------------------
# structure coefficients

def structure_rows(sys):
    """Row labels (alpha, nu), |nu| = q - 1, ascending ranking."""
    return sys.chart.jets_of_order(sys.q - 1)


def theta(sys, i, j):
    """Theta_ij as a list over structure_rows, restricted to the equation."""
    if i == j:
        raise ValueError("Theta_ij needs i != j")
    X = reference_complement(sys)
    out = []
    for alpha, nu in structure_rows(sys):
        a = X[i - 1](sys.bar(alpha, add_unit(nu, j)))
        b = X[j - 1](sys.bar(alpha, add_unit(nu, i)))
        out.append(sys.restrict(a - b))
    return out


def _C1_restricted(sys, i, f):
    """C^(1)_i(f) pulled back to the equation."""
    from .involution import C1
    return sys.restrict(C1(sys, i, f))


def theta_cases(sys, i, j):
    """First-order closed form of Theta^alpha_ij by membership of (alpha, i)
    and (alpha, j) in B.  The case (alpha, i) in B, (alpha, j) not in B is
    not among the printed cases; the bracket gives -C_j(phi^alpha_i)."""
    if sys.q != 1:
        raise ValueError("closed forms are first order")
    if not i < j:
        raise ValueError("need i < j")
    out = []
    for alpha in range(1, sys.m + 1):
        bi, bj = sys.in_B(alpha, i), sys.in_B(alpha, j)
        if bi and bj:
            v = _C1_restricted(sys, i, sys.phi(alpha, j)) - _C1_restricted(sys, j, sys.phi(alpha, i))
        elif bj:
            v = _C1_restricted(sys, i, sys.phi(alpha, j))
        elif bi:
            v = -_C1_restricted(sys, j, sys.phi(alpha, i))
        else:
            v = ZERO
        out.append(v)
    return out


def xi(sys, i):
    """Xi_i with rows structure_rows(sys) and columns the parametric pairs."""
    rows = structure_rows(sys)
    cols = sys.parametric_pairs()
    colvars = [sys.chart.jet(b, rho) for b, rho in cols]
    M = []
    for alpha, nu in rows:
        top = sys.bar(alpha, add_unit(nu, i))
        M.append([sys.restrict(-top.diff(v)) for v in colvars])
    return SymMatrix(M, rows, cols, len(cols))


def xi_cases(sys, i):
    """First-order closed form of Xi_i from the three-case table."""
    if sys.q != 1:
        raise ValueError("closed forms are first order")
    cols = sys.parametric_pairs()
    M = []
    for alpha in range(1, sys.m + 1):
        row = []
        for beta, rho in cols:
            h = mi_class(rho)
            if sys.in_B(alpha, i):
                row.append(-sys.phi(alpha, i).diff(sys.chart.jet(beta, rho)))
            elif (alpha, i) == (beta, h):
                row.append(Expr.const(-1))
            else:
                row.append(ZERO)
        M.append(row)
    return SymMatrix(M, structure_rows(sys), cols, len(cols))


def xi_block(sys, X, h, upper):
    """Columns of class h of Xi; rows (alpha, nu) with (alpha, nu + 1_i)
    principal (upper=True) or parametric (upper=False).  X is a pair (i, Xi_i)."""
    i, M = X
    cidx = [c for c, (b, rho) in enumerate(M.col_labels) if mi_class(rho) == h]
    ridx = [r for r, (a, nu) in enumerate(M.row_labels)
            if ((a, add_unit(nu, i)) in sys.B) == upper]
    return SymMatrix([[M[r, c] for c in cidx] for r in ridx],
                     [M.row_labels[r] for r in ridx], [M.col_labels[c] for c in cidx], len(cidx))


def rank_bounds(sys, i, seed=0):
    """(lower, rank Xi_i, upper) with lower = alpha_q^(i) and upper =
    min(#rows, sum_{h<=i} alpha_q^(h))."""
    al = sys.alphas()
    M = xi(sys, i)
    rk = rank_generic(M, seed=seed).rank if M.ncols and M.nrows else 0
    return al[i - 1], rk, min(M.nrows, sum(al[:i]))


class StructureCoefficients:
    def __init__(self, sys):
        self.sys = sys
        self.rows = structure_rows(sys)
        self.cols = sys.parametric_pairs()
        self.theta = {(i, j): theta(sys, i, j) for i in range(1, sys.n + 1) for j in range(i + 1, sys.n + 1)}
        self.xi = {i: xi(sys, i) for i in range(1, sys.n + 1)}

    @property
    def r(self):
        return len(self.cols)

    def to_dict(self):
        ch = self.sys.chart
        return {
            "rows": [ch.jet_name(a, nu) for a, nu in self.rows],
            "columns": [ch.jet_name(b, rho) for b, rho in self.cols],
            "theta": {"%d,%d" % k: [str(e) for e in v] for k, v in sorted(self.theta.items())},
            "xi": {str(i): M.to_strings() for i, M in sorted(self.xi.items())},
        }


def structure_coefficients(sys):
    return StructureCoefficients(sys)


# --------------------------------------------------------------------------
# bracket oracle

def _coefficients_mod_span(sys, Z, X, Y):
    """Write the vector field Z as sum a_i X_i + sum b_k Y_k + rest with rest
    along d_{u^alpha_nu}, |nu| = q - 1; return (rest components, leftover)
    where leftover is what cannot be so written (must be empty)."""
    ch = sys.chart
    rest = Z
    for i in range(1, sys.n + 1):
        a = rest[ch.x(i)]
        if not a.is_zero():
            rest = rest - X[i - 1].scale(a)
    labels, _ = symbol_fields(sys)
    for k, (b, rho) in enumerate(labels):
        c = rest[ch.jet(b, rho)]
        if not c.is_zero():
            rest = rest - Y[k].scale(c)
    rows = structure_rows(sys)
    vals = [sys.restrict(rest[ch.jet(a, nu)]) for a, nu in rows]
    leftover = rest.drop({ch.jet(a, nu) for a, nu in rows})
    leftover = VectorField({v: sys.restrict(c) for v, c in leftover.comps.items()})
    return vals, leftover


class StructureCheck:
    def __init__(self, discrepancies):
        self.discrepancies = discrepancies

    def __bool__(self):
        return not self.discrepancies

    @property
    def ok(self):
        return not self.discrepancies


def verify_structure_equations(sys, closed_form=True):
    """Compare Lie brackets of the barred fields with Theta and Xi.  With
    closed_form and q = 1 the case tables are used as the reference,
    otherwise the general formulas."""
    ch = sys.chart
    X = reference_complement(sys)
    labels, Y = symbol_fields(sys)
    use_cases = closed_form and sys.q == 1
    bad = []
    for i in range(1, sys.n + 1):
        for j in range(i + 1, sys.n + 1):
            vals, left = _coefficients_mod_span(sys, lie_bracket(X[i - 1], X[j - 1]), X, Y)
            ref = theta_cases(sys, i, j) if use_cases else theta(sys, i, j)
            if not left.is_zero():
                bad.append(("[X%d,X%d]" % (i, j), "outside the span", str(left)))
            for r, (a, b) in enumerate(zip(vals, ref)):
                if a != b:
                    bad.append(("Theta_%d%d" % (i, j), structure_rows(sys)[r], "%s != %s" % (a, b)))
    for i in range(1, sys.n + 1):
        ref = xi_cases(sys, i) if use_cases else xi(sys, i)
        for k, Yk in enumerate(Y):
            vals, left = _coefficients_mod_span(sys, lie_bracket(X[i - 1], Yk), X, Y)
            if not left.is_zero():
                bad.append(("[X%d,Y%d]" % (i, k + 1), "outside the span", str(left)))
            for r, a in enumerate(vals):
                if a != ref[r, k]:
                    bad.append(("Xi_%d" % i, (structure_rows(sys)[r], labels[k]),
                                "%s != %s" % (a, ref[r, k])))
    for k in range(len(Y)):
        for l in range(k + 1, len(Y)):
            if not lie_bracket(Y[k], Y[l]).is_zero():
                bad.append(("[Y%d,Y%d]" % (k + 1, l + 1), "nonzero", ""))
    return StructureCheck(bad)


# --------------------------------------------------------------------------
# implicit systems

class ImplicitGenerators:
    def __init__(self, system, unknowns, matrix, fields, coefficients, rank, caveats):
        self.system = system
        self.unknowns = unknowns          # ("b", alpha, mu) or ("a", i)
        self.matrix = matrix
        self.fields = fields
        self.coefficients = coefficients  # one {unknown: Expr} per field
        self.rank = rank
        self.caveats = caveats

    def transversal(self):
        return [V for V, c in zip(self.fields, self.coefficients)
                if any(not c[u].is_zero() for u in self.unknowns if u[0] == "a")]

    def vertical(self):
        return [V for V, c in zip(self.fields, self.coefficients)
                if all(c[u].is_zero() for u in self.unknowns if u[0] == "a")]

    def to_dict(self):
        return {
            "generators": [V.to_dict() for V in self.fields],
            "rank": self.rank,
            "caveats": [str(c) for c in self.caveats],
        }


def implicit_vessiot_generators(sys, seed=0):
    """Basis of the solutions (a, b) of
    C_i^(q)(Phi) a^i + C^mu_alpha(Phi) b^alpha_mu = 0, returned as fields
    a^i C_i^(q) + b^alpha_mu d_{u^alpha_mu} on the jet bundle.

    Unknowns are ordered top-order b's first (descending ranking) and the a's
    last, so that the a's are free whenever possible and every transversal
    generator is normalised by one a^i = 1."""
    if isinstance(sys, ReducedCNF):
        sys = sys.to_implicit()
    ch = sys.chart
    q = sys.q
    tops = sorted(ch.jets_of_order(q), key=lambda p: rank_key(*p), reverse=True)
    unknowns = [("b", a, mu) for a, mu in tops] + [("a", i) for i in range(1, ch.n + 1)]
    Cs = [contact_field(ch, i, q) for i in range(1, ch.n + 1)]
    rows = []
    for e in sys.equations:
        row = [e.diff(ch.jet(a, mu)) for a, mu in tops]
        row += [C(e) for C in Cs]
        rows.append(row)
    A = SymMatrix(rows, list(range(len(rows))), unknowns, len(unknowns))
    rr = rank_generic(A, seed=seed) if rows else None
    rank = rr.rank if rr else 0
    caveats = rr.caveats if rr else []
    sol = solve_affine(A, [ZERO] * A.nrows, unknowns) if rows else None
    basis = sol.basis if sol else [{u: (ONE if u == f else ZERO) for u in unknowns} for f in unknowns]
    if len(basis) != len(unknowns) - rank:
        raise ArithmeticError("nullspace dimension disagrees with the generic rank")
    fields = []
    for vec in basis:
        V = VectorField({})
        for u in unknowns:
            c = vec[u]
            if c.is_zero():
                continue
            if u[0] == "a":
                V = V + Cs[u[1] - 1].scale(c)
            else:
                V = V + VectorField({ch.jet(u[1], u[2]): c})
        fields.append(V)
    return ImplicitGenerators(sys, unknowns, A, fields, basis, rank, caveats)


def fields_proportional(V, W):
    """True iff V = f W for a nonzero rational function f."""
    if V.is_zero() or W.is_zero():
        return V.is_zero() and W.is_zero()
    coords = set(V.comps) | set(W.comps)
    ref = next(iter(sorted(W.comps, key=lambda v: v.sk)))
    if V[ref].is_zero():
        return False
    f = V[ref] / W[ref]
    return all((V[c] - f * W[c]).is_zero() for c in coords)
