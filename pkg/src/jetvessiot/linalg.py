"""Exact matrices over the rational-function field of a chart.

Elimination is fraction-free (Bareiss style) with pivots chosen as the
nonzero entry with the fewest monomials in the current column.  Ranks are
generic ranks, i.e. ranks over the function field; every non-constant pivot is
reported as a caveat because the rank may drop where it vanishes.  Each symbolic
rank is cross-checked against exact rational ranks at random points.
"""

import random
from fractions import Fraction

from .expr import Expr, ZERO, ONE, ExprError


class InternalError(Exception):
    pass


class SymMatrix:
    def __init__(self, rows, row_labels=None, col_labels=None, ncols=None):
        self.rows = [[Expr.lift(e) for e in r] for r in rows]
        self.nrows = len(self.rows)
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        self.ncols = ncols
        for r in self.rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix")
        self.row_labels = list(row_labels) if row_labels is not None else list(range(self.nrows))
        self.col_labels = list(col_labels) if col_labels is not None else list(range(ncols))

    @staticmethod
    def zeros(nr, nc, row_labels=None, col_labels=None):
        return SymMatrix([[ZERO] * nc for _ in range(nr)], row_labels, col_labels, nc)

    @staticmethod
    def identity(k):
        return SymMatrix([[ONE if a == b else ZERO for b in range(k)] for a in range(k)])

    def __getitem__(self, rc):
        r, c = rc
        return self.rows[r][c]

    def copy(self):
        return SymMatrix([list(r) for r in self.rows], self.row_labels, self.col_labels, self.ncols)

    def T(self):
        return SymMatrix([[self.rows[r][c] for r in range(self.nrows)] for c in range(self.ncols)],
                         self.col_labels, self.row_labels, self.nrows)

    def hstack(self, *others):
        rows = [list(r) for r in self.rows]
        labels = list(self.col_labels)
        for o in others:
            if o.nrows != self.nrows:
                raise ValueError("row count mismatch")
            for k in range(self.nrows):
                rows[k].extend(o.rows[k])
            labels.extend(o.col_labels)
        return SymMatrix(rows, self.row_labels, labels, len(labels))

    def vstack(self, *others):
        rows = [list(r) for r in self.rows]
        labels = list(self.row_labels)
        for o in others:
            if o.ncols != self.ncols:
                raise ValueError("column count mismatch")
            rows.extend([list(r) for r in o.rows])
            labels.extend(o.row_labels)
        return SymMatrix(rows, labels, self.col_labels, self.ncols)

    def column(self, c):
        return [r[c] for r in self.rows]

    def select_columns(self, idx):
        return SymMatrix([[r[c] for c in idx] for r in self.rows], self.row_labels,
                         [self.col_labels[c] for c in idx], len(idx))

    def subs(self, bindings):
        return SymMatrix([[e.subs(bindings) for e in r] for r in self.rows],
                         self.row_labels, self.col_labels, self.ncols)

    def free_vars(self):
        out = set()
        for r in self.rows:
            for e in r:
                out |= e.free_vars()
        return out

    def is_zero(self):
        return all(e.is_zero() for r in self.rows for e in r)

    def eval_at(self, point):
        return [[e.eval_at(point) for e in r] for r in self.rows]

    def to_strings(self):
        return [[str(e) for e in r] for r in self.rows]

    def __eq__(self, other):
        return isinstance(other, SymMatrix) and self.rows == other.rows

    def __str__(self):
        s = self.to_strings()
        if not s:
            return "[]"
        w = max((len(x) for r in s for x in r), default=1)
        return "\n".join("[" + "  ".join(x.rjust(w) for x in r) + "]" for r in s)

    __repr__ = __str__


# --------------------------------------------------------------------------
# elimination

class Echelon:
    def __init__(self, matrix, pivots, trace, row_order):
        self.matrix = matrix          # echelon form (SymMatrix)
        self.pivots = pivots          # list of (row, col) in the echelon form
        self.trace = trace            # list of pivot expressions, in order
        self.row_order = row_order    # original row index of each echelon row

    @property
    def rank(self):
        return len(self.pivots)

    def pivot_columns(self):
        return [c for _, c in self.pivots]


def row_echelon(M, col_order=None):
    """Fraction-free elimination.  Columns are scanned in col_order (default:
    left to right); in each column the pivot is the nonzero entry with the
    fewest monomials among the rows not yet used."""
    A = [list(r) for r in M.rows]
    order = list(range(M.nrows))
    cols = list(range(M.ncols)) if col_order is None else list(col_order)
    pivots, trace = [], []
    prev = ONE
    r = 0
    for c in cols:
        if r >= M.nrows:
            break
        best = None
        for k in range(r, M.nrows):
            e = A[k][c]
            if not e.is_zero():
                if best is None or e.nterms() < A[best][c].nterms():
                    best = k
        if best is None:
            continue
        if best != r:
            A[r], A[best] = A[best], A[r]
            order[r], order[best] = order[best], order[r]
        piv = A[r][c]
        trace.append(piv)
        pivots.append((r, c))
        for k in range(r + 1, M.nrows):
            a = A[k][c]
            if a.is_zero():
                if prev != ONE:
                    A[k] = [piv * e / prev for e in A[k]]
                else:
                    A[k] = [piv * e for e in A[k]]
                continue
            row = A[r]
            new = []
            for cc in range(M.ncols):
                val = piv * A[k][cc] - a * row[cc]
                if prev != ONE and not val.is_zero():
                    val = val / prev
                new.append(val)
            A[k] = new
        prev = piv
        r += 1
    E = SymMatrix(A, [M.row_labels[i] for i in order], M.col_labels, M.ncols)
    return Echelon(E, pivots, trace, order)


def rank_rational(rows):
    """Rank of a matrix of Fractions by plain Gaussian elimination."""
    A = [[Fraction(x) for x in r] for r in rows]
    if not A:
        return 0
    nr, nc = len(A), len(A[0])
    r = 0
    for c in range(nc):
        p = None
        for k in range(r, nr):
            if A[k][c] != 0:
                p = k
                break
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        for k in range(r + 1, nr):
            if A[k][c] != 0:
                f = A[k][c] / A[r][c]
                A[k] = [a - f * b for a, b in zip(A[k], A[r])]
        r += 1
        if r == nr:
            break
    return r


def solve_rational(A, b):
    """Unique solution of a square nonsingular rational system."""
    n = len(A)
    M = [[Fraction(x) for x in A[k]] + [Fraction(b[k])] for k in range(n)]
    for c in range(n):
        p = next(k for k in range(c, n) if M[k][c] != 0)
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [x / piv for x in M[c]]
        for k in range(n):
            if k != c and M[k][c] != 0:
                f = M[k][c]
                M[k] = [x - f * y for x, y in zip(M[k], M[c])]
    return [M[k][n] for k in range(n)]


class RankResult:
    def __init__(self, rank, caveats, echelon, checked_points):
        self.rank = rank
        self.caveats = caveats
        self.echelon = echelon
        self.checked_points = checked_points

    def __int__(self):
        return self.rank

    def __eq__(self, other):
        if isinstance(other, int):
            return self.rank == other
        return NotImplemented

    def __repr__(self):
        return "RankResult(rank=%d, caveats=%s)" % (self.rank, [str(c) for c in self.caveats])


def _random_point(vs, rng):
    return {v: Fraction(rng.randint(-40, 40), rng.randint(1, 9)) for v in vs}


def rank_generic(M, seed=0, checks=3):
    """Rank over the rational-function field with caveat pivots, verified at
    `checks` random rational points where no pivot vanishes."""
    if any(e.has_formal() for r in M.rows for e in r):
        raise ExprError("rank_generic needs zeta-free entries")
    ech = row_echelon(M)
    caveats = []
    for p in ech.trace:
        if not p.is_const() and p not in caveats:
            caveats.append(p)
    vs = sorted(M.free_vars(), key=lambda v: v.sk)
    rng = random.Random(seed)
    done = 0
    tries = 0
    while done < checks and tries < 200:
        tries += 1
        pt = _random_point(vs, rng)
        try:
            if any(p.eval_at(pt) == 0 for p in ech.trace):
                continue
            vals = M.eval_at(pt)
        except ZeroDivisionError:
            continue
        rr = rank_rational(vals) if vals else 0
        if rr != ech.rank:
            raise InternalError("generic rank %d but rank %d at %s" % (ech.rank, rr, pt))
        done += 1
    return RankResult(ech.rank, caveats, ech, done)


# --------------------------------------------------------------------------
# affine systems

class Inconsistent:
    def __init__(self, row_label, residual, combination=None):
        self.row_label = row_label
        self.residual = residual
        self.combination = combination

    def __bool__(self):
        return False

    def __repr__(self):
        return "Inconsistent(row=%r, residual=%s)" % (self.row_label, self.residual)


class AffineSolution:
    """x = particular + sum_f t_f * basis_f, one basis vector per free unknown."""

    def __init__(self, labels, particular, free, basis, pivots):
        self.labels = labels
        self.particular = particular
        self.free = free
        self.basis = basis
        self.pivots = pivots

    def __bool__(self):
        return True

    def general(self, free_values):
        """Substitute expressions for the free unknowns; returns {label: Expr}."""
        out = {}
        for lab in self.labels:
            v = self.particular[lab]
            for f, vec in zip(self.free, self.basis):
                v = v + Expr.lift(free_values[f]) * vec[lab]
            out[lab] = v
        return out

    def __repr__(self):
        return "AffineSolution(free=%s, particular=%s)" % (
            self.free, {k: str(v) for k, v in self.particular.items()})


def solve_affine(A, b, labels=None):
    """General solution of A x = b.  Entries of A must be zeta-free; b may
    contain zeta symbols, which are treated as transcendentals."""
    labels = list(labels) if labels is not None else list(A.col_labels)
    nr, nc = A.nrows, A.ncols
    M = [list(A.rows[k]) + [Expr.lift(b[k])] for k in range(nr)]
    rlabels = list(A.row_labels)
    pivots = []
    r = 0
    for c in range(nc):
        best = None
        for k in range(r, nr):
            e = M[k][c]
            if not e.is_zero() and (best is None or e.nterms() < M[best][c].nterms()):
                best = k
        if best is None:
            continue
        M[r], M[best] = M[best], M[r]
        rlabels[r], rlabels[best] = rlabels[best], rlabels[r]
        piv = M[r][c]
        if piv != ONE:
            M[r] = [e / piv for e in M[r]]
        for k in range(nr):
            if k != r and not M[k][c].is_zero():
                f = M[k][c]
                M[k] = [x - f * y for x, y in zip(M[k], M[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    for k in range(r, nr):
        if not M[k][nc].is_zero():
            return Inconsistent(rlabels[k], M[k][nc])
    free = [c for c in range(nc) if c not in pivots]
    particular = {lab: ZERO for lab in labels}
    for k, c in enumerate(pivots):
        particular[labels[c]] = M[k][nc]
    basis = []
    for f in free:
        vec = {lab: ZERO for lab in labels}
        vec[labels[f]] = ONE
        for k, c in enumerate(pivots):
            vec[labels[c]] = -M[k][f]
        basis.append(vec)
    return AffineSolution(labels, particular, [labels[f] for f in free], basis,
                          [labels[c] for c in pivots])


def nullspace(A):
    sol = solve_affine(A, [ZERO] * A.nrows)
    return sol.basis, sol.free
