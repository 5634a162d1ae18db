"""PDE systems: solved (reduced Cartan normal form) and implicit.

A solved system of order q maps each principal pair (alpha, mu), |mu| = q, to
its right side phi^alpha_mu.  For first order the pair (alpha, mu) with
mu = 1_k is the first-order pair (alpha, k); helpers accept either.
"""

from .expr import Expr, ONE, ZERO
from .jet import (Chart, mi_class, order, unit, add_unit, rank_key, formal_derivative,
                  multi_indices)


class Violation:
    def __init__(self, equation, coordinate, message):
        self.equation = equation
        self.coordinate = coordinate
        self.message = message

    def __repr__(self):
        return "Violation(%s: %s)" % (self.equation, self.message)

    def to_dict(self):
        return {"equation": self.equation, "coordinate": self.coordinate, "message": self.message}


class ImplicitSystem:
    def __init__(self, chart, equations, name=""):
        self.chart = chart
        self.equations = [Expr.lift(e) for e in equations]
        self.name = name

    @property
    def q(self):
        return self.chart.q

    def prolong(self):
        ch = self.chart.with_order(self.chart.q + 1)
        ch._cache = self.chart._cache
        eqs = list(self.equations)
        for e in self.equations:
            for i in range(1, ch.n + 1):
                eqs.append(formal_derivative(ch, e, i))
        return ImplicitSystem(ch, eqs, self.name)

    def __repr__(self):
        return "ImplicitSystem(%s)" % [str(e) for e in self.equations]


def prolong(sys):
    if isinstance(sys, ReducedCNF):
        sys = sys.to_implicit()
    return sys.prolong()


class ReducedCNF:
    """Solved system u^alpha_mu = phi^alpha_mu, |mu| = q, with principal set B."""

    def __init__(self, chart, equations, name=""):
        self.chart = chart
        self.name = name
        eqs = {}
        for key, rhs in equations.items():
            alpha, mu = key
            if isinstance(mu, int):
                mu = unit(chart.n, mu)
            eqs[(alpha, tuple(mu))] = Expr.lift(rhs)
        self.eqs = eqs
        self.B = set(eqs)
        self._subs = None

    # basic data ----------------------------------------------------------
    @property
    def q(self):
        return self.chart.q

    @property
    def n(self):
        return self.chart.n

    @property
    def m(self):
        return self.chart.m

    def principal_pairs(self):
        """Principal (alpha, mu), ascending in the ranking."""
        return sorted(self.B, key=lambda p: rank_key(*p))

    def parametric_pairs(self):
        """Parametric (alpha, mu) of order q, ascending in the ranking."""
        return [p for p in self.chart.jets_of_order(self.q) if p not in self.B]

    def in_B(self, alpha, k):
        """First-order membership test for the pair (alpha, k)."""
        return (alpha, unit(self.n, k)) in self.B

    def phi(self, alpha, mu):
        if isinstance(mu, int):
            mu = unit(self.n, mu)
        return self.eqs[(alpha, tuple(mu))]

    def substitution(self):
        if self._subs is None:
            self._subs = {self.chart.jet(a, mu): phi for (a, mu), phi in self.eqs.items()}
        return self._subs

    def restrict(self, e):
        return Expr.lift(e).subs(self.substitution())

    def bar(self, alpha, mu):
        """The barred value of u^alpha_mu: phi if principal, else the coordinate."""
        mu = tuple(mu)
        if (alpha, mu) in self.B:
            return self.eqs[(alpha, mu)]
        return Expr.var(self.chart.jet(alpha, mu))

    def barred_chart(self):
        return BarredChart(self)

    def betas(self):
        """beta_q^(k): number of principal pairs of class k, k = 1..n."""
        out = [0] * self.n
        for _, mu in self.B:
            out[mi_class(mu) - 1] += 1
        return tuple(out)

    def alphas(self):
        """Cartan characters alpha_q^(k): parametric order-q jets of class k."""
        out = [0] * self.n
        for _, mu in self.parametric_pairs():
            out[mi_class(mu) - 1] += 1
        return tuple(out)

    def P(self, h):
        """First order: {gamma : (gamma, h) not in B}."""
        return [g for g in range(1, self.m + 1) if not self.in_B(g, h)]

    def Bset(self, h):
        return [g for g in range(1, self.m + 1) if self.in_B(g, h)]

    def is_nested(self):
        """First order: (alpha, i) in B and i < j imply (alpha, j) in B."""
        for alpha in range(1, self.m + 1):
            seen = False
            for k in range(1, self.n + 1):
                if self.in_B(alpha, k):
                    seen = True
                elif seen:
                    return False
        return True

    def to_implicit(self):
        eqs = [Expr.var(self.chart.jet(a, mu)) - self.eqs[(a, mu)] for a, mu in self.principal_pairs()]
        return ImplicitSystem(self.chart, eqs, self.name)

    def equation_label(self, alpha, mu):
        return self.chart.jet_name(alpha, mu)

    def __repr__(self):
        parts = ["%s = %s" % (self.chart.jet_name(a, mu), self.eqs[(a, mu)])
                 for a, mu in self.principal_pairs()]
        return "ReducedCNF(%s)" % ", ".join(parts)


class BarredChart:
    """Surviving coordinates of the solved equation: x, jets of order < q and
    parametric jets of order q, with the substitution principal -> phi."""

    def __init__(self, sys):
        ch = sys.chart
        self.sys = sys
        self.coords = [ch.x(i) for i in range(1, ch.n + 1)]
        for k in range(sys.q):
            self.coords += [ch.jet(a, mu) for a, mu in ch.jets_of_order(k)]
        self.coords += [ch.jet(a, mu) for a, mu in sys.parametric_pairs()]
        self.substitution = sys.substitution()

    def restrict(self, e):
        return Expr.lift(e).subs(self.substitution)


def restrict(e, sys):
    return sys.restrict(e)


def betas(sys):
    return sys.betas()


def alphas(sys):
    return sys.alphas()


def validate(sys):
    """List of violations of the reduced Cartan normal form constraints;
    an empty list means the system is valid."""
    out = []
    q = sys.q
    for (alpha, mu), rhs in sorted(sys.eqs.items(), key=lambda t: rank_key(*t[0])):
        label = sys.chart.jet_name(alpha, mu)
        if order(mu) == 0:
            out.append(Violation(label, label, "zeroth-order (algebraic) equation; "
                                 "solve it explicitly and eliminate the variable first"))
            continue
        if order(mu) != q:
            out.append(Violation(label, label, "equation order %d differs from system order %d"
                                 % (order(mu), q)))
            continue
        k = mi_class(mu)
        for v in sorted(rhs.free_vars(), key=lambda w: w.sk):
            if v.kind == "u":
                beta, nu = v.key
                if order(nu) > q:
                    out.append(Violation(label, v.name, "right side has order %d > %d" % (order(nu), q)))
                elif order(nu) == q:
                    if (beta, nu) in sys.B:
                        out.append(Violation(label, v.name, "principal derivative %s on a right side" % v.name))
                    elif mi_class(nu) > k:
                        out.append(Violation(label, v.name,
                                             "right side of class-%d equation depends on class-%d derivative %s"
                                             % (k, mi_class(nu), v.name)))
            elif v.is_formal:
                out.append(Violation(label, v.name, "formal unknown in a right side"))
    return out


def make_solved(indep, dep, equations, order=1, params=(), name=""):
    """Convenience constructor: equations maps 'u_xx'-style names of
    order-`order` jets to Exprs, strings, or callables chart -> Expr."""
    from .exprparse import parse_expr, parse_jet_name
    chart = Chart(indep, dep, order, params)
    eqs = {}
    for lhs, rhs in equations.items():
        alpha, mu = parse_jet_name(chart, lhs)
        if isinstance(rhs, str):
            rhs = parse_expr(rhs, chart)
        elif callable(rhs):
            rhs = rhs(chart)
        eqs[(alpha, mu)] = rhs
    return ReducedCNF(chart, eqs, name)


def make_first_order(indep, dep, equations, params=(), name=""):
    return make_solved(indep, dep, equations, 1, params, name)
