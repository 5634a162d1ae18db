"""Exact rational-function expressions over a jet chart.

An expression is stored as a pair of sparse polynomials (numerator,
denominator) with rational coefficients.  Every constructor returns the
canonical form, so two expressions that agree as rational functions are
structurally identical and ``normalize`` is the identity.

Polynomials are plain dicts mapping a monomial to a ``Fraction``.  A monomial
is a tuple of ``(Var, exponent)`` pairs sorted by variable.
"""

from fractions import Fraction
from sympy.polys.domains import QQ
from sympy.polys.rings import ring


class ExprError(Exception):
    pass


class UnboundCoordinate(ExprError):
    pass


class CyclicSubstitution(ExprError):
    pass


# --------------------------------------------------------------------------
# variables

_KIND_RANK = {"x": 0, "u": 1, "p": 2, "z": 3, "dz": 4}
COORDINATE_KINDS = ("x", "u")


class Var:
    """A symbol.

    kind is one of
      "x"  independent variable, key (i,)
      "u"  jet coordinate u^alpha_mu, key (alpha, mu); |mu| = 0 is u^alpha
      "p"  symbolic constant (parameter of the equation), key ()
      "z"  formal unknown zeta_i^label, key (i, label)
      "dz" formal partial of a zeta, key (zeta sort key, coordinate sort keys)
    """

    __slots__ = ("kind", "key", "name", "sk", "_h", "base", "wrt")

    def __init__(self, kind, key, name, base=None, wrt=()):
        self.kind = kind
        self.key = key
        self.name = name
        self.sk = (_KIND_RANK[kind], key, name)
        self._h = hash(self.sk)
        # only for kind "dz": the underlying zeta Var and the coordinates
        self.base = base
        self.wrt = wrt

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        return isinstance(other, Var) and self.sk == other.sk

    def __lt__(self, other):
        return self.sk < other.sk

    def __repr__(self):
        return "Var(%s)" % self.name

    def __str__(self):
        return self.name

    @property
    def is_coordinate(self):
        return self.kind in COORDINATE_KINDS

    @property
    def is_formal(self):
        return self.kind in ("z", "dz")


def partial_var(w, c):
    """The formal partial of zeta-like Var w with respect to coordinate c."""
    if w.kind == "z":
        base, wrt = w, (c,)
    else:
        base, wrt = w.base, tuple(sorted(w.wrt + (c,)))
    name = "D[%s](%s)" % (",".join(v.name for v in wrt), base.name)
    key = (base.sk, tuple(v.sk for v in wrt))
    return Var("dz", key, name, base=base, wrt=wrt)


# --------------------------------------------------------------------------
# sparse polynomial helpers (dict monomial -> Fraction)

ONE_MONO = ()
_ZERO = Fraction(0)
_ONE = Fraction(1)


def _mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items(), key=lambda t: t[0].sk))


def _mono_key(m):
    # graded order, ties by the variables involved
    return (sum(e for _, e in m), tuple((v.sk, e) for v, e in m))


def poly_add(p, q, scale=_ONE):
    r = dict(p)
    for m, c in q.items():
        s = r.get(m, _ZERO) + scale * c
        if s:
            r[m] = s
        else:
            r.pop(m, None)
    return r


def poly_mul(p, q):
    if len(p) == 1 and ONE_MONO in p:
        c = p[ONE_MONO]
        return {m: c * d for m, d in q.items()}
    if len(q) == 1 and ONE_MONO in q:
        c = q[ONE_MONO]
        return {m: c * d for m, d in p.items()}
    r = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = _mono_mul(m1, m2)
            s = r.get(m, _ZERO) + c1 * c2
            if s:
                r[m] = s
            else:
                del r[m]
    return r


def poly_scale(p, c):
    if not c:
        return {}
    return {m: c * d for m, d in p.items()}


def poly_vars(p):
    out = set()
    for m in p:
        for v, _ in m:
            out.add(v)
    return out


def poly_is_const(p):
    return not p or (len(p) == 1 and ONE_MONO in p)


def poly_lead(p):
    return max(p, key=_mono_key)


def _dvar(w, v):
    """d w / d v for Vars, as a polynomial."""
    if w == v:
        return {ONE_MONO: _ONE}
    if w.is_formal and v.is_coordinate:
        return {((partial_var(w, v), 1),): _ONE}
    return {}


def poly_diff(p, v):
    r = {}
    for m, c in p.items():
        for idx, (w, e) in enumerate(m):
            dw = _dvar(w, v)
            if not dw:
                continue
            rest = list(m)
            if e == 1:
                del rest[idx]
            else:
                rest[idx] = (w, e - 1)
            term = {tuple(rest): c * e}
            r = poly_add(r, poly_mul(term, dw))
    return r


def _mono_gcd(monos):
    monos = list(monos)
    common = dict(monos[0])
    for m in monos[1:]:
        md = dict(m)
        for v in list(common):
            if v in md:
                common[v] = min(common[v], md[v])
            else:
                del common[v]
        if not common:
            break
    return common


def _mono_div(m, d):
    if not d:
        return m
    out = []
    for v, e in m:
        e2 = e - d.get(v, 0)
        if e2:
            out.append((v, e2))
    return tuple(out)


def _cofactors(p, q):
    """Cancel gcd(p, q) using sympy's multivariate gcd (over QQ)."""
    vs = sorted(poly_vars(p) | poly_vars(q), key=lambda v: v.sk)
    pos = {v: k for k, v in enumerate(vs)}
    R, *_ = ring(["g%d" % k for k in range(len(vs))], QQ)

    def to_ring(a):
        d = {}
        for m, c in a.items():
            exps = [0] * len(vs)
            for v, e in m:
                exps[pos[v]] = e
            d[tuple(exps)] = QQ(c.numerator, c.denominator)
        return R.from_dict(d)

    def from_ring(a):
        out = {}
        for exps, c in a.items():
            m = tuple((vs[k], e) for k, e in enumerate(exps) if e)
            out[m] = Fraction(int(c.numerator), int(c.denominator))
        return out

    _, cp, cq = to_ring(p).cofactors(to_ring(q))
    return from_ring(cp), from_ring(cq)


# --------------------------------------------------------------------------
# expressions

class Expr:
    __slots__ = ("num", "den", "_h")

    def __init__(self, num, den=None, _canonical=False):
        if den is None:
            den = {ONE_MONO: _ONE}
        if not _canonical:
            num, den = _canonicalize(num, den)
        self.num = num
        self.den = den
        self._h = None

    # construction --------------------------------------------------------
    @staticmethod
    def const(c):
        c = Fraction(c)
        return Expr({ONE_MONO: c} if c else {}, None, True)

    @staticmethod
    def var(v):
        return Expr({((v, 1),): _ONE}, None, True)

    @staticmethod
    def lift(a):
        if isinstance(a, Expr):
            return a
        if isinstance(a, Var):
            return Expr.var(a)
        if isinstance(a, (int, Fraction)):
            return Expr.const(a)
        raise TypeError("cannot lift %r to Expr" % (a,))

    # predicates ------------------------------------------------------------
    def is_zero(self):
        return not self.num

    def is_const(self):
        return poly_is_const(self.num) and poly_is_const(self.den)

    def const_value(self):
        if not self.is_const():
            raise ExprError("expression is not constant: %s" % self)
        return self.num.get(ONE_MONO, _ZERO)

    def is_polynomial(self):
        return poly_is_const(self.den)

    def nterms(self):
        return len(self.num) + len(self.den) - 1

    def free_vars(self):
        return poly_vars(self.num) | poly_vars(self.den)

    def has_formal(self):
        return any(v.is_formal for v in self.free_vars())

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = Expr.lift(other)
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            if poly_is_const(self.den):
                return Expr(poly_add(self.num, other.num), None, True)
            return Expr(poly_add(self.num, other.num), self.den)
        num = poly_add(poly_mul(self.num, other.den), poly_mul(other.num, self.den))
        return Expr(num, poly_mul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return Expr(poly_scale(self.num, Fraction(-1)), self.den, True)

    def __sub__(self, other):
        return self + (-Expr.lift(other))

    def __rsub__(self, other):
        return Expr.lift(other) + (-self)

    def __mul__(self, other):
        other = Expr.lift(other)
        if not self.num or not other.num:
            return ZERO
        if poly_is_const(self.den) and poly_is_const(other.den):
            return Expr(poly_mul(self.num, other.num), None, True)
        return Expr(poly_mul(self.num, other.num), poly_mul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Expr.lift(other)
        if not other.num:
            raise ZeroDivisionError("division by the zero expression")
        if other.is_const():
            c = other.num[ONE_MONO]
            return Expr(poly_scale(self.num, 1 / c), self.den, True)
        return Expr(poly_mul(self.num, other.den), poly_mul(self.den, other.num))

    def __rtruediv__(self, other):
        return Expr.lift(other) / self

    def __pow__(self, k):
        if not isinstance(k, int):
            raise ExprError("only integer powers are supported")
        if k < 0:
            return Expr.const(1) / (self ** (-k))
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # comparison ----------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Expr):
            try:
                other = Expr.lift(other)
            except TypeError:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._h is None:
            self._h = hash((frozenset(self.num.items()), frozenset(self.den.items())))
        return self._h

    # calculus --------------------------------------------------------------
    def diff(self, v):
        dn = poly_diff(self.num, v)
        if poly_is_const(self.den):
            return Expr(dn, self.den, True) if dn else ZERO
        dd = poly_diff(self.den, v)
        if not dd:
            return Expr(dn, self.den)
        num = poly_add(poly_mul(dn, self.den), poly_mul(self.num, dd), Fraction(-1))
        return Expr(num, poly_mul(self.den, self.den))

    def subs(self, bindings):
        """Simultaneous substitution of Vars by expressions."""
        if not bindings:
            return self
        fv = self.free_vars()
        if not any(v in bindings for v in fv):
            return self
        for v, rep in bindings.items():
            if v in Expr.lift(rep).free_vars():
                raise CyclicSubstitution("%s occurs in its own replacement" % v)
        cache = {}

        def ev(p):
            acc = ZERO
            for m, c in p.items():
                t = Expr.const(c)
                rest = []
                for v, e in m:
                    if v in bindings:
                        key = (v, e)
                        if key not in cache:
                            cache[key] = Expr.lift(bindings[v]) ** e
                        t = t * cache[key]
                    else:
                        rest.append((v, e))
                if rest:
                    t = t * Expr({tuple(rest): _ONE}, None, True)
                acc = acc + t
            return acc

        n = ev(self.num)
        if poly_is_const(self.den):
            return n / self.den[ONE_MONO]
        return n / ev(self.den)

    def eval_at(self, point):
        """Exact value at a point given as {Var: rational}."""
        def ev(p):
            acc = _ZERO
            for m, c in p.items():
                t = c
                for v, e in m:
                    if v not in point:
                        raise UnboundCoordinate("no value for %s" % v)
                    t *= Fraction(point[v]) ** e
                acc += t
            return acc
        d = ev(self.den)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the point")
        return ev(self.num) / d

    def eval_float(self, point):
        def ev(p):
            acc = 0.0
            for m, c in p.items():
                t = float(c)
                for v, e in m:
                    t *= float(point[v]) ** e
                acc += t
            return acc
        return ev(self.num) / ev(self.den)

    def coeff_linear(self, v):
        """Split a polynomial-in-v expression of degree <= 1 as (a, b) with e = a*v + b."""
        a = self.diff(v)
        if v in a.free_vars():
            raise ExprError("%s is not linear in %s" % (self, v))
        b = self.subs({v: ZERO})
        return a, b

    # printing ----------------------------------------------------------------
    def __str__(self):
        n = poly_str(self.num)
        if poly_is_const(self.den):
            return n
        d = poly_str(self.den)
        if len(self.num) > 1:
            n = "(" + n + ")"
        if len(self.den) > 1 or _needs_paren(self.den):
            d = "(" + d + ")"
        return n + "/" + d

    def __repr__(self):
        return "Expr(%s)" % self


def _needs_paren(p):
    m, c = next(iter(p.items()))
    return c != 1 or len(m) > 1


def _mono_str(m):
    parts = []
    for v, e in m:
        parts.append(v.name if e == 1 else "%s^%d" % (v.name, e))
    return "*".join(parts)


def _frac_str(c):
    return str(c.numerator) if c.denominator == 1 else "%d/%d" % (c.numerator, c.denominator)


def poly_str(p):
    if not p:
        return "0"
    out = []
    for m in sorted(p, key=_mono_key, reverse=True):
        c = p[m]
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not m:
            body = _frac_str(a)
        elif a == 1:
            body = _mono_str(m)
        else:
            body = _frac_str(a) + "*" + _mono_str(m)
        out.append((sign, body))
    s = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        s += " %s %s" % (sign, body)
    return s


def _canonicalize(num, den):
    if not den:
        raise ZeroDivisionError("denominator is the zero polynomial")
    if not num:
        return {}, {ONE_MONO: _ONE}
    if poly_is_const(den):
        c = den[ONE_MONO]
        if c != 1:
            num = poly_scale(num, 1 / c)
        return num, {ONE_MONO: _ONE}
    if len(den) == 1:
        (dm, dc), = den.items()
        g = _mono_gcd(list(num) + [dm])
        if g:
            num = {_mono_div(m, g): c for m, c in num.items()}
            dm = _mono_div(dm, g)
        num = poly_scale(num, 1 / dc)
        return num, {dm: _ONE}
    # cheap content check: a common monomial factor first
    g = _mono_gcd(list(num) + list(den))
    if g:
        num = {_mono_div(m, g): c for m, c in num.items()}
        den = {_mono_div(m, g): c for m, c in den.items()}
    if not poly_is_const(num):
        num, den = _cofactors(num, den)
    lc = den[poly_lead(den)]
    if lc != 1:
        num = poly_scale(num, 1 / lc)
        den = poly_scale(den, 1 / lc)
    if poly_is_const(den):
        c = den[ONE_MONO]
        num = poly_scale(num, 1 / c)
        den = {ONE_MONO: _ONE}
    return num, den


ZERO = Expr({}, None, True)
ONE = Expr({ONE_MONO: _ONE}, None, True)


def normalize(e):
    """Canonical form.  Expressions are canonical on construction, so this is
    the identity on Expr values; it also accepts ints, Fractions and Vars."""
    return Expr.lift(e)


def diff(e, v):
    return Expr.lift(e).diff(v)


def substitute(e, bindings):
    return Expr.lift(e).subs(bindings)


def eval_at(e, point):
    return Expr.lift(e).eval_at(point)


def expr_sum(items):
    acc = ZERO
    for t in items:
        acc = acc + t
    return acc

