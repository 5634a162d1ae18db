"""Jet coordinates, the ranking, contact fields, formal derivatives and
vector fields.

Indices follow the usual conventions: dependent variables alpha = 1..m and
independent variables i = 1..n are 1-based; a multi-index mu is a plain tuple
of n nonnegative counts.
"""

from fractions import Fraction
from itertools import combinations_with_replacement

from .expr import Expr, Var, ZERO, ONE, ExprError


# --------------------------------------------------------------------------
# multi-indices

def order(mu):
    return sum(mu)


def mi_class(mu):
    """Smallest k (1-based) with mu_k != 0."""
    for k, c in enumerate(mu):
        if c:
            return k + 1
    raise ValueError("the zero multi-index has no class")


def unit(n, i):
    mu = [0] * n
    mu[i - 1] = 1
    return tuple(mu)


def add_unit(mu, i):
    mu = list(mu)
    mu[i - 1] += 1
    return tuple(mu)


def sub_unit(mu, i):
    if mu[i - 1] == 0:
        return None
    mu = list(mu)
    mu[i - 1] -= 1
    return tuple(mu)


def multi_indices(n, q):
    """All multi-indices of order exactly q, in no particular order."""
    out = []
    for combo in combinations_with_replacement(range(n), q):
        mu = [0] * n
        for k in combo:
            mu[k] += 1
        out.append(tuple(mu))
    return out


def rank_key(alpha, mu):
    """Sort key realising the ranking: a smaller key means a smaller jet.

    Lower order is smaller; at equal order u_mu < u_nu when the leftmost
    nonzero entry of mu - nu is positive; equal mu compares alpha.
    """
    return (sum(mu), tuple(-c for c in mu), alpha)


def rank_compare(a, b):
    """-1, 0, 1 for JetVar-like pairs (alpha, mu)."""
    ka, kb = rank_key(*a), rank_key(*b)
    return (ka > kb) - (ka < kb)


# --------------------------------------------------------------------------
# chart

class Chart:
    """Coordinate names and dimensions of a jet bundle chart.

    Only the names matter for printing; all identification goes through the
    integer keys of the Vars it creates.
    """

    def __init__(self, indep, dep, q=1, params=()):
        self.indep = list(indep)
        self.dep = list(dep)
        self.q = q
        self.params = list(params)
        self.n = len(self.indep)
        self.m = len(self.dep)
        self._cache = {}

    def with_order(self, q):
        return Chart(self.indep, self.dep, q, self.params)

    def x(self, i):
        key = ("x", i)
        v = self._cache.get(key)
        if v is None:
            v = Var("x", (i,), self.indep[i - 1])
            self._cache[key] = v
        return v

    def jet(self, alpha, mu):
        mu = tuple(mu)
        key = ("u", alpha, mu)
        v = self._cache.get(key)
        if v is None:
            v = Var("u", (alpha, mu), self.jet_name(alpha, mu))
            self._cache[key] = v
        return v

    def u(self, alpha):
        return self.jet(alpha, (0,) * self.n)

    def param(self, name):
        key = ("p", name)
        v = self._cache.get(key)
        if v is None:
            v = Var("p", (), name)
            self._cache[key] = v
        return v

    def jet_name(self, alpha, mu):
        base = self.dep[alpha - 1]
        if not any(mu):
            return base
        suffix = "".join(self.indep[k] * c for k, c in enumerate(mu))
        return base + "_" + suffix

    def coords(self, q=None):
        """x's then all jets of order <= q (default: chart order)."""
        q = self.q if q is None else q
        out = [self.x(i) for i in range(1, self.n + 1)]
        for k in range(q + 1):
            for alpha, mu in self.jets_of_order(k):
                out.append(self.jet(alpha, mu))
        return out

    def jets_of_order(self, k):
        """Pairs (alpha, mu) with |mu| = k, ascending in the ranking."""
        pairs = [(a, mu) for mu in multi_indices(self.n, k) for a in range(1, self.m + 1)]
        pairs.sort(key=lambda p: rank_key(*p))
        return pairs

    def label(self, alpha, mu):
        return self.jet_name(alpha, mu)

    def __repr__(self):
        return "Chart(indep=%s, dep=%s, q=%d)" % (self.indep, self.dep, self.q)


def jet_parts(v):
    """(alpha, mu) of a jet Var."""
    if v.kind != "u":
        raise ExprError("%s is not a jet coordinate" % v)
    return v.key


# --------------------------------------------------------------------------
# vector fields

class VectorField:
    """Finite sum  sum_c coeff_c * d/dc  over coordinate Vars."""

    __slots__ = ("comps",)

    def __init__(self, comps=None):
        clean = {}
        for v, c in (comps or {}).items():
            c = Expr.lift(c)
            if not c.is_zero():
                clean[v] = c
        self.comps = clean

    @staticmethod
    def coordinate(v):
        return VectorField({v: ONE})

    def __call__(self, f):
        f = Expr.lift(f)
        acc = ZERO
        fv = f.free_vars()
        formal = any(w.is_formal for w in fv)
        for v, c in self.comps.items():
            if v in fv or formal:
                acc = acc + c * f.diff(v)
        return acc

    apply = __call__

    def __add__(self, other):
        d = dict(self.comps)
        for v, c in other.comps.items():
            d[v] = d.get(v, ZERO) + c
        return VectorField(d)

    def __sub__(self, other):
        return self + other.scale(Expr.const(-1))

    def __neg__(self):
        return self.scale(Expr.const(-1))

    def scale(self, e):
        e = Expr.lift(e)
        return VectorField({v: e * c for v, c in self.comps.items()})

    def __getitem__(self, v):
        return self.comps.get(v, ZERO)

    def is_zero(self):
        return not self.comps

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.comps == other.comps

    def __hash__(self):
        return hash(frozenset(self.comps.items()))

    def subs(self, bindings):
        return VectorField({v: c.subs(bindings) for v, c in self.comps.items()})

    def drop(self, coords):
        return VectorField({v: c for v, c in self.comps.items() if v not in coords})

    def support(self):
        return sorted(self.comps, key=lambda v: v.sk)

    def __str__(self):
        if not self.comps:
            return "0"
        parts = []
        for v in self.support():
            c = self.comps[v]
            s = str(c)
            if c == ONE:
                parts.append("d_%s" % v.name)
            elif c == Expr.const(-1):
                parts.append("-d_%s" % v.name)
            else:
                if len(c.num) > 1 or not c.is_polynomial():
                    s = "(" + s + ")"
                parts.append("%s*d_%s" % (s, v.name))
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__

    def to_dict(self):
        return {v.name: str(c) for v, c in sorted(self.comps.items(), key=lambda t: t[0].sk)}


def lie_bracket(V, W):
    """[V, W]^c = V(W^c) - W(V^c)."""
    coords = set(V.comps) | set(W.comps)
    out = {}
    for c in coords:
        val = V(W[c]) - W(V[c])
        if not val.is_zero():
            out[c] = val
    return VectorField(out)


# --------------------------------------------------------------------------
# contact structure

def contact_field(chart, i, q=None):
    """C_i^(q) = d_{x^i} + sum_{|mu| < q} u^alpha_{mu+1_i} d_{u^alpha_mu}."""
    q = chart.q if q is None else q
    comps = {chart.x(i): ONE}
    for k in range(q):
        for alpha, mu in chart.jets_of_order(k):
            comps[chart.jet(alpha, mu)] = Expr.var(chart.jet(alpha, add_unit(mu, i)))
    return VectorField(comps)


def vertical_field(chart, alpha, mu):
    return VectorField.coordinate(chart.jet(alpha, mu))


def formal_derivative(chart, phi, i):
    """D_i phi = d phi/d x^i + sum (d phi / d u^alpha_mu) u^alpha_{mu+1_i}."""
    phi = Expr.lift(phi)
    acc = phi.diff(chart.x(i))
    for v in sorted(phi.free_vars(), key=lambda w: w.sk):
        if v.kind != "u":
            continue
        alpha, mu = v.key
        acc = acc + phi.diff(v) * Expr.var(chart.jet(alpha, add_unit(mu, i)))
    return acc


def contact_map_at(chart, point, i, q=None):
    """Gamma_q(rho, d_{x^i}) at a point of J_q, as {Var: Fraction}.

    The vector lives on J_{q-1}: components along x and along u^alpha_mu with
    |mu| < q.
    """
    q = chart.q if q is None else q
    vec = {chart.x(i): Fraction(1)}
    for k in range(q):
        for alpha, mu in chart.jets_of_order(k):
            v = chart.jet(alpha, add_unit(mu, i))
            if v not in point:
                raise ExprError("point lacks a value for %s" % v)
            vec[chart.jet(alpha, mu)] = Fraction(point[v])
    return vec


# --------------------------------------------------------------------------
# integral elements

class PointFrame:
    """A base point of J_q and tangent vectors there (dicts Var -> rational)."""

    def __init__(self, point, vectors):
        self.point = {v: Fraction(c) for v, c in point.items()}
        self.vectors = [{v: Fraction(c) for v, c in vec.items() if c} for vec in vectors]


class IntegralElementResult:
    def __init__(self, value, reasons, witness=None, cross_check=None):
        self.value = value
        self.reasons = reasons
        self.witness = witness
        self.cross_check = cross_check

    def __bool__(self):
        return self.value

    def __repr__(self):
        return "IntegralElementResult(%s, %s)" % (self.value, self.reasons)


def _rank_q(rows):
    from .linalg import rank_rational
    return rank_rational(rows)


def is_integral_element(frame, chart, equations, q=None):
    """Decide whether span(frame.vectors) is an integral element of the
    equation {Phi = 0} at frame.point.

    The contact forms omega^alpha_mu = du^alpha_mu - u^alpha_{mu+1_i} dx^i
    (|mu| < q) and their exterior derivatives dx^i ^ du^alpha_{mu+1_i} are
    evaluated on the vectors directly.  For transversal frames of dimension n
    the contact-map criterion is checked too, through a witness point of the
    prolonged equation read off the frame.
    """
    q = chart.q if q is None else q
    p = frame.point
    vecs = frame.vectors
    equations = [Expr.lift(e) for e in equations]
    reasons = []
    for e in equations:
        if e.eval_at(p) != 0:
            raise ExprError("base point is not on the equation: %s = %s" % (e, e.eval_at(p)))
    coords = chart.coords(q)
    if vecs and _rank_q([[v.get(c, 0) for c in coords] for v in vecs]) < len(vecs):
        raise ExprError("frame vectors are linearly dependent")
    # tangency
    for k, v in enumerate(vecs):
        for e in equations:
            val = sum((e.diff(c).eval_at(p) * a for c, a in v.items()), Fraction(0))
            if val != 0:
                reasons.append("vector %d not tangent: d(%s) = %s" % (k, e, val))
    # contact forms
    lower = [(a, mu) for kk in range(q) for a, mu in chart.jets_of_order(kk)]
    for k, v in enumerate(vecs):
        for alpha, mu in lower:
            val = v.get(chart.jet(alpha, mu), Fraction(0))
            for i in range(1, chart.n + 1):
                val -= p[chart.jet(alpha, add_unit(mu, i))] * v.get(chart.x(i), Fraction(0))
            if val != 0:
                reasons.append("omega[%s] does not vanish on vector %d" % (chart.jet_name(alpha, mu), k))
    # exterior derivatives
    for k in range(len(vecs)):
        for l in range(k + 1, len(vecs)):
            v, w = vecs[k], vecs[l]
            for alpha, mu in lower:
                val = Fraction(0)
                for i in range(1, chart.n + 1):
                    top = chart.jet(alpha, add_unit(mu, i))
                    xi = chart.x(i)
                    val += v.get(xi, 0) * w.get(top, 0) - w.get(xi, 0) * v.get(top, 0)
                if val != 0:
                    reasons.append("d omega[%s] does not vanish on vectors %d,%d"
                                   % (chart.jet_name(alpha, mu), k, l))
    value = not reasons
    witness, cross = None, None
    if len(vecs) == chart.n and _transversal_rank(chart, vecs) == chart.n:
        witness, cross = _contact_map_cross_check(chart, frame, equations, q)
        if cross is not None and cross != value:
            raise ExprError("integral element criteria disagree (internal error)")
    return IntegralElementResult(value, reasons, witness, cross)


def _transversal_rank(chart, vecs):
    return _rank_q([[v.get(chart.x(i), 0) for i in range(1, chart.n + 1)] for v in vecs])


def _contact_map_cross_check(chart, frame, equations, q):
    """Normalise the frame to x-components e_i, read off u^alpha_{mu+1_i} from
    the order-q components, and test the witness against the prolonged
    equations and against Gamma_{q+1}."""
    from .linalg import solve_rational
    n = chart.n
    vecs = frame.vectors
    # find combinations c with sum_k c_k x-part(v_k) = e_i
    X = [[vecs[k].get(chart.x(i), Fraction(0)) for k in range(n)] for i in range(1, n + 1)]
    basis = []
    for i in range(1, n + 1):
        rhs = [Fraction(1 if r == i else 0) for r in range(1, n + 1)]
        c = solve_rational(X, rhs)
        vec = {}
        for k in range(n):
            for v, a in vecs[k].items():
                vec[v] = vec.get(v, Fraction(0)) + c[k] * a
        basis.append(vec)
    witness = dict(frame.point)
    for i in range(1, n + 1):
        for alpha, mu in chart.jets_of_order(q):
            top = chart.jet(alpha, add_unit(mu, i))
            val = basis[i - 1].get(chart.jet(alpha, mu), Fraction(0))
            if top in witness and witness[top] != val:
                return witness, False  # not symmetric: no point of J_{q+1}
            witness[top] = val
    ch = chart.with_order(q + 1)
    for e in equations:
        for i in range(1, n + 1):
            if formal_derivative(ch, e, i).eval_at(witness) != 0:
                return witness, False
    # Gamma_{q+1}(witness, d_i) must reproduce the normalised vectors
    for i in range(1, n + 1):
        g = contact_map_at(ch, witness, i, q + 1)
        for v in set(g) | set(basis[i - 1]):
            if g.get(v, Fraction(0)) != basis[i - 1].get(v, Fraction(0)):
                return witness, False
    return witness, True
