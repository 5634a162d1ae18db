"""Print the echelon form of the uncontracted complete matrix for the
five-variable example at j = 4 and the relation it forces."""

from jetvessiot.corpus import five_var
from jetvessiot.connection import complete_matrix, step_at
from jetvessiot.linalg import row_echelon

s = five_var()
M = complete_matrix(s, 4, contracted=False)
names = ["zeta%d[%s]" % (i, s.chart.jet_name(*c)) for i, c in M.col_labels]
print("%d x %d" % (M.nrows, M.ncols))
for r, row in enumerate(row_echelon(M).matrix.rows, 1):
    print(r, "  ".join("%s*%s" % (e, names[k]) for k, e in enumerate(row) if not e.is_zero()))
for j in (3, 4):
    d = step_at(s, j, contract_=False).to_dict()
    print("j=%d passes=%s" % (j, d["passes"]), d.get("parameter_relations", ""))
print("with contraction:", [step_at(s, j).ok for j in range(2, 6)])
