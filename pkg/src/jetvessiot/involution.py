"""Closed-form obstructions to involution for first-order solved systems.

For each triple (alpha, i, j) with i < j and both (alpha, i), (alpha, j)
principal, the combination

    D_j Phi^alpha_i - D_i Phi^alpha_j + sum_{h<=i} sum_gamma C^h_gamma(phi^alpha_i) D_h Phi^gamma_j

splits into an integrability part (no second-order jets) and one bracketed
coefficient per second-order jet u^delta_{hk}.  The index ranges printed as
"gamma from beta^(h)+1 to beta^(j)" are read as sets,
gamma with (gamma, h) not principal and (gamma, j) principal; this is exact
when the principal set is nested by class (see ReducedCNF.is_nested).

The bracketed coefficients are reported as the closed forms give them.  Two of
the families (hk-a, hi-a) multiply jets u^delta_{hk} with (delta, k) principal
and h < k, which are leaders of multiplicative prolongations.  The verdicts
are therefore taken after those jets are eliminated (Obstruction.reduce): the
symbol is involutive iff no parametric second-order jet survives.
"""

from .expr import Expr, ZERO
from .jet import Chart, add_unit, unit, formal_derivative


class NotApplicable(Exception):
    pass


def Cv(sys, h, gamma, f):
    """C^h_gamma(f) = d f / d u^gamma_h."""
    return f.diff(sys.chart.jet(gamma, unit(sys.n, h)))


def C1(sys, i, f):
    """C^(1)_i(f) = d_i f + sum_beta u^beta_i d f / d u^beta (unrestricted)."""
    ch = sys.chart
    acc = f.diff(ch.x(i))
    for beta in range(1, sys.m + 1):
        d = f.diff(ch.u(beta))
        if not d.is_zero():
            acc = acc + d * Expr.var(ch.jet(beta, unit(sys.n, i)))
    return acc


def u2(sys, delta, h, k):
    """The second-order jet u^delta_{hk} as an expression."""
    n = sys.n
    return Expr.var(sys.chart.jet(delta, add_unit(unit(n, h), k)))


def Gamma(sys, h, j):
    """{gamma : (gamma, h) not in B, (gamma, j) in B}."""
    return [g for g in range(1, sys.m + 1) if not sys.in_B(g, h) and sys.in_B(g, j)]


def prolongation_residue(sys, alpha, i, j):
    """Right side of D_j Phi^alpha_i =
    u^alpha_{ij} - C_j(phi^alpha_i) - sum_{h<=i} sum_{gamma in P(h)} u^gamma_{hj} C^h_gamma(phi^alpha_i),
    restricted to the equation in the first-order variables."""
    if sys.q != 1:
        raise NotApplicable("prolongation residues are implemented for first order")
    if not sys.in_B(alpha, i):
        raise ValueError("(%d,%d) is not a principal pair" % (alpha, i))
    phi = sys.phi(alpha, i)
    acc = u2(sys, alpha, i, j) - C1(sys, j, phi)
    for h in range(1, i + 1):
        for gamma in sys.P(h):
            c = Cv(sys, h, gamma, phi)
            if not c.is_zero():
                acc = acc - u2(sys, gamma, h, j) * c
    return sys.restrict(acc)


def principal_second_order(sys, delta, h, k):
    """For nested B, u^delta_{hk} (h <= k) is the leader of a multiplicative
    prolongation iff (delta, k) is principal."""
    return sys.in_B(delta, max(h, k))


def multiplicative_value(sys, delta, h, k):
    """u^delta_{hk} solved from D_h Phi^delta_k = 0, h <= k, (delta, k) in B."""
    h, k = min(h, k), max(h, k)
    return u2(sys, delta, h, k) - prolongation_residue(sys, delta, k, h)


def eliminate_multiplicative(sys, e):
    """Substitute principal second-order jets until none is left.  Each pass
    replaces a jet by jets lower in the ranking, so this terminates."""
    n = sys.n
    for _ in range(4 * n * sys.m + 4):
        subs = {}
        for v in e.free_vars():
            if v.kind == "u" and sum(v.key[1]) == 2:
                delta, mu = v.key
                idx = [k + 1 for k, c in enumerate(mu) for _ in range(c)]
                h, k = idx[0], idx[-1]
                if principal_second_order(sys, delta, h, k):
                    subs[v] = multiplicative_value(sys, delta, h, k)
        if not subs:
            return e
        e = e.subs(subs)
    raise RuntimeError("elimination of multiplicative prolongations did not terminate")


def split_second_order(sys, e):
    """(part free of second-order jets, {(delta, (h, k)): coefficient})."""
    out = {}
    rest = e
    for v in sorted(e.free_vars(), key=lambda w: w.sk):
        if v.kind == "u" and sum(v.key[1]) == 2:
            delta, mu = v.key
            idx = [k + 1 for k, c in enumerate(mu) for _ in range(c)]
            a, rest = rest.coeff_linear(v)
            out[(delta, (idx[0], idx[-1]))] = a
    return rest, out


class Obstruction:
    def __init__(self, alpha, i, j, integrability, brackets, lines):
        self.alpha = alpha
        self.i = i
        self.j = j
        self.integrability = integrability   # Expr on the equation
        self.brackets = brackets             # {(delta, (h, k)): Expr}, h <= k
        self.lines = lines                   # {(delta, (h, k)): [line names]}
        self.reduced_integrability = None
        self.reduced_brackets = None

    def nonzero_brackets(self):
        return {k: v for k, v in self.brackets.items() if not v.is_zero()}

    def assembled(self, sys):
        """Integrability part plus sum of coefficient * u^delta_{hk}."""
        acc = self.integrability
        for (delta, (h, k)), c in self.brackets.items():
            acc = acc + c * u2(sys, delta, h, k)
        return acc

    def reduce(self, sys):
        """Eliminate principal second-order jets (leaders of multiplicative
        prolongations) from the assembled combination; sets
        reduced_integrability and reduced_brackets (parametric jets only)."""
        e = eliminate_multiplicative(sys, self.assembled(sys))
        self.reduced_integrability, self.reduced_brackets = split_second_order(sys, e)
        return self


class ObstructionReport:
    def __init__(self, sys, triples, applicable=True, reason=""):
        self.sys = sys
        self.triples = triples
        self.applicable = applicable
        self.reason = reason

    @property
    def symbol_involutive(self):
        if not self.applicable:
            return None
        return all(all(c.is_zero() for c in o.reduced_brackets.values()) for o in self.triples)

    @property
    def equation_involutive(self):
        if not self.applicable:
            return None
        return self.symbol_involutive and all(o.reduced_integrability.is_zero() for o in self.triples)

    def to_dict(self):
        ch = self.sys.chart
        d = {
            "applicable": self.applicable,
            "assumption": "delta-regular coordinates",
            "symbol_involutive": self.symbol_involutive,
            "equation_involutive": self.equation_involutive,
        }
        if not self.applicable:
            d["reason"] = self.reason
            return d
        items = []
        for o in self.triples:
            br = []
            for (delta, (h, k)), c in sorted(o.brackets.items()):
                br.append({
                    "jet": ch.jet_name(delta, add_unit(unit(ch.n, h), k)),
                    "lines": o.lines[(delta, (h, k))],
                    "coefficient": str(c),
                    "vanishes": c.is_zero(),
                })
            items.append({
                "equation": ch.jet_name(o.alpha, unit(ch.n, o.i)),
                "alpha": ch.dep[o.alpha - 1],
                "i": o.i,
                "j": o.j,
                "integrability": str(o.integrability),
                "integrability_vanishes": o.integrability.is_zero(),
                "brackets": br,
                "reduced_integrability": str(o.reduced_integrability),
                "reduced_obstructions": [
                    {"jet": ch.jet_name(delta, add_unit(unit(ch.n, h), k)), "coefficient": str(c)}
                    for (delta, (h, k)), c in sorted(o.reduced_brackets.items()) if not c.is_zero()],
            })
        d["triples"] = items
        return d


def _triple(sys, alpha, i, j):
    phi_i = sys.phi(alpha, i)
    phi_j = sys.phi(alpha, j)
    R = sys.restrict
    phis = {}

    def ph(gamma):
        if gamma not in phis:
            phis[gamma] = sys.phi(gamma, j)
        return phis[gamma]

    P = sys.P
    G = lambda h: Gamma(sys, h, j)
    coef = {}
    lines = {}

    def add(delta, h, k, val, line):
        key = (delta, (min(h, k), max(h, k)))
        coef[key] = coef.get(key, ZERO) + val
        lines.setdefault(key, []).append(line)

    # integrability condition
    integ = C1(sys, i, phi_j) - C1(sys, j, phi_i)
    for h in range(1, i + 1):
        for g in G(h):
            integ = integ - Cv(sys, h, g, phi_i) * C1(sys, h, ph(g))
    # hh: h = 1..i-1, delta in P(h)
    for h in range(1, i):
        for d in P(h):
            s = ZERO
            for g in G(h):
                s = s + Cv(sys, h, g, phi_i) * Cv(sys, h, d, ph(g))
            add(d, h, h, -s, "hh")
    # hk-a / hk-b: 1 <= h < k < i
    for h in range(1, i):
        for k in range(h + 1, i):
            for d in P(h):
                if sys.in_B(d, k):
                    s = ZERO
                    for g in G(k):
                        s = s + Cv(sys, k, g, phi_i) * Cv(sys, h, d, ph(g))
                    add(d, h, k, -s, "hk-a")
            for d in P(k):
                s = ZERO
                for g in G(h):
                    s = s + Cv(sys, h, g, phi_i) * Cv(sys, k, d, ph(g))
                for g in G(k):
                    s = s + Cv(sys, k, g, phi_i) * Cv(sys, h, d, ph(g))
                add(d, h, k, -s, "hk-b")
    # hi-a / hi-b: h < i
    for h in range(1, i):
        for d in P(h):
            if sys.in_B(d, i):
                s = -Cv(sys, h, d, phi_j)
                for g in G(i):
                    s = s + Cv(sys, i, g, phi_i) * Cv(sys, h, d, ph(g))
                add(d, h, i, -s, "hi-a")
        for d in P(i):
            s = -Cv(sys, h, d, phi_j)
            for g in G(i):
                s = s + Cv(sys, i, g, phi_i) * Cv(sys, h, d, ph(g))
            for g in G(h):
                s = s + Cv(sys, h, g, phi_i) * Cv(sys, i, d, ph(g))
            add(d, h, i, -s, "hi-b")
    # hk2: h <= i-1, i+1 <= k < j
    for h in range(1, i):
        for k in range(i + 1, j):
            for d in P(k):
                s = ZERO
                for g in G(h):
                    s = s + Cv(sys, h, g, phi_i) * Cv(sys, k, d, ph(g))
                add(d, h, k, -s, "hk2")
    # ik: k = i..j-1
    for k in range(i, j):
        for d in P(k):
            s = -Cv(sys, k, d, phi_j)
            for g in G(i):
                s = s + Cv(sys, i, g, phi_i) * Cv(sys, k, d, ph(g))
            add(d, i, k, -s, "ik")
    # hj: h < i
    for h in range(1, i):
        for d in P(j):
            s = Cv(sys, h, d, phi_i)
            for g in G(h):
                s = s + Cv(sys, h, g, phi_i) * Cv(sys, j, d, ph(g))
            add(d, h, j, -s, "hj")
    # ij
    for d in P(j):
        s = Cv(sys, i, d, phi_i) - Cv(sys, j, d, phi_j)
        for g in G(i):
            s = s + Cv(sys, i, g, phi_i) * Cv(sys, j, d, ph(g))
        add(d, i, j, -s, "ij")
    coef = {k: R(v) for k, v in coef.items()}
    return Obstruction(alpha, i, j, R(integ), coef, lines)


def monster(sys):
    """All closed-form obstructions of a first-order solved system."""
    if sys.q != 1:
        return ObstructionReport(sys, [], False, "the closed-form obstructions cover first-order systems only")
    if not sys.is_nested():
        return ObstructionReport(sys, [], False,
                                 "principal set not nested by class: some (alpha,i) is principal while "
                                 "(alpha,j), j>i, is parametric; the closed forms presuppose nesting")
    triples = []
    for alpha in range(1, sys.m + 1):
        for i in range(1, sys.n + 1):
            for j in range(i + 1, sys.n + 1):
                if sys.in_B(alpha, i) and sys.in_B(alpha, j):
                    triples.append(_triple(sys, alpha, i, j).reduce(sys))
    return ObstructionReport(sys, triples)


def brute_force_combination(sys, alpha, i, j):
    """D_j Phi^alpha_i - D_i Phi^alpha_j + sum C^h_gamma(phi^alpha_i) D_h Phi^gamma_j
    computed with formal derivatives on J_2 and restricted in first order."""
    ch2 = Chart(sys.chart.indep, sys.chart.dep, 2, sys.chart.params)
    ch2._cache = sys.chart._cache

    def Phi(a, k):
        return Expr.var(sys.chart.jet(a, unit(sys.n, k))) - sys.phi(a, k)

    phi_i = sys.phi(alpha, i)
    acc = formal_derivative(ch2, Phi(alpha, i), j) - formal_derivative(ch2, Phi(alpha, j), i)
    for h in range(1, i + 1):
        for g in Gamma(sys, h, j):
            c = Cv(sys, h, g, phi_i)
            if not c.is_zero():
                acc = acc + c * formal_derivative(ch2, Phi(g, j), h)
    return sys.restrict(acc)
