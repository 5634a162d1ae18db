"""Symbol matrices, their echelon indices and Cartan's test."""

from .expr import Expr
from .jet import mi_class, rank_key
from .linalg import SymMatrix, rank_generic
from .system import ReducedCNF, ImplicitSystem


class SymbolData:
    def __init__(self, q, matrix, betas, rank, caveats, pivot_rows, chart):
        self.q = q
        self.matrix = matrix
        self.betas = betas
        self.rank = rank
        self.caveats = caveats
        self.pivot_rows = pivot_rows    # (row label, pivot column label, class)
        self.chart = chart

    @property
    def dim_N(self):
        return self.matrix.ncols - self.rank

    def multiplicative_variables(self):
        """For each pivot row: the independent variables x^1..x^k where k is
        the class of its pivot."""
        return [(lab, [self.chart.indep[i] for i in range(cls)]) for lab, _, cls in self.pivot_rows]

    def weighted_sum(self):
        return sum((k + 1) * b for k, b in enumerate(self.betas))

    def to_dict(self):
        return {
            "order": self.q,
            "columns": [self.chart.jet_name(*c) for c in self.matrix.col_labels],
            "matrix": self.matrix.to_strings(),
            "rank": self.rank,
            "betas": list(self.betas),
            "dim_N": self.dim_N,
            "caveats": [str(c) for c in self.caveats],
        }


def _equations(sys):
    if isinstance(sys, ReducedCNF):
        return sys.to_implicit(), sys
    return sys, None


def _columns(chart, q):
    """Jets of order q in descending ranking."""
    return sorted(chart.jets_of_order(q), key=lambda p: rank_key(*p), reverse=True)


def symbol_matrix(sys, q=None, seed=0):
    imp, solved = _equations(sys)
    chart = imp.chart
    q = imp.q if q is None else q
    cols = _columns(chart, q)
    colvars = [chart.jet(a, mu) for a, mu in cols]
    rows, labels = [], []
    for k, e in enumerate(imp.equations):
        row = [e.diff(v) for v in colvars]
        if solved is not None:
            row = [solved.restrict(x) for x in row]
        rows.append(row)
        labels.append(k)

    def lead(row):
        for c, x in enumerate(row):
            if not x.is_zero():
                return c
        return len(row)

    # rows ordered by their leading column (highest class first); ties keep input order
    order = sorted(range(len(rows)), key=lambda k: lead(rows[k]))
    M = SymMatrix([rows[k] for k in order], [labels[k] for k in order], cols, len(cols))
    rr = rank_generic(M, seed=seed)
    betas = [0] * chart.n
    pivot_rows = []
    for r, c in rr.echelon.pivots:
        cls = mi_class(cols[c][1])
        betas[cls - 1] += 1
        pivot_rows.append((rr.echelon.matrix.row_labels[r], cols[c], cls))
    return SymbolData(q, M, tuple(betas), rr.rank, rr.caveats, pivot_rows, chart)


class CartanTestResult:
    def __init__(self, passes, rank_Mq1, weighted_sum, symbol, prolonged_caveats):
        self.passes = passes
        self.rank_Mq1 = rank_Mq1
        self.weighted_sum = weighted_sum
        self.symbol = symbol
        self.caveats = prolonged_caveats

    def __bool__(self):
        return self.passes

    def to_dict(self):
        d = {
            "passes": self.passes,
            "rank_Mq1": self.rank_Mq1,
            "weighted_sum": self.weighted_sum,
            "caveats": [str(c) for c in self.caveats],
        }
        if not self.passes:
            d["note"] = ("Cartan's test failed: either the symbol is not involutive or the "
                         "coordinates are not delta-regular (in such coordinates the test always fails)")
        return d


def cartan_test(sys, seed=0):
    sd = symbol_matrix(sys, seed=seed)
    imp, solved = _equations(sys)
    pro = imp.prolong()
    q1 = imp.q + 1
    cols = _columns(pro.chart, q1)
    colvars = [pro.chart.jet(a, mu) for a, mu in cols]
    rows = []
    for e in pro.equations:
        row = [e.diff(v) for v in colvars]
        if solved is not None:
            row = [solved.restrict(x) for x in row]
        if any(not x.is_zero() for x in row):
            rows.append(row)
    M = SymMatrix(rows, None, cols, len(cols))
    rr = rank_generic(M, seed=seed)
    ws = sd.weighted_sum()
    return CartanTestResult(rr.rank == ws, rr.rank, ws, sd, rr.caveats)
