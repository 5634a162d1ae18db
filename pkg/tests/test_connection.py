import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from jetvessiot import corpus
from jetvessiot.connection import (
    ZetaLayout, complete_matrix, step_at, step_system, build_family, differential_conditions,
    reduce_differential_conditions, pointwise_check, step_verdicts, closed_form_relation,
)
from jetvessiot.expr import Expr
from jetvessiot.involution import monster
from jetvessiot.linalg import row_echelon, rank_generic


def col(sys, name):
    for c in sys.parametric_pairs():
        if sys.chart.jet_name(*c) == name:
            return c
    raise KeyError(name)


# ---------------------------------------------------------------- layout

def test_wave_layout_has_no_aliases(wave):
    lay = ZetaLayout(wave)
    assert lay.aliases() == []
    assert [v.name for v in lay.variables()] == [
        "zeta1[v_x]", "zeta1[w_x]", "zeta2[v_x]", "zeta2[w_x]"]


def test_five_var_alias_keeps_smallest_subscript(five_var):
    lay = ZetaLayout(five_var)
    pairs = {a.name: b.name for a, b in lay.aliases()}
    assert pairs["zeta2[u_x]"] == "zeta1[u_y]"
    for a, b in lay.aliases():
        assert b.key[0] < a.key[0]
        assert lay.label(a.key) == lay.label(b.key)


def test_label_name(five_var):
    lay = ZetaLayout(five_var)
    key = (2, col(five_var, "u_x"))
    assert lay.label_name(lay.label(key)) == "(u, {x,y})"


def test_representatives_have_distinct_labels(random_systems):
    for s in random_systems:
        lay = ZetaLayout(s)
        labels = [lay.label(v.key) for v in lay.variables()]
        assert len(labels) == len(set(labels))
        assert len(ZetaLayout(s, contract=False).variables()) == s.n * len(s.parametric_pairs())


# ---------------------------------------------------------------- complete matrix

def test_five_var_third_matrix_shape_and_last_row(five_var):
    M = complete_matrix(five_var, 4, contracted=False)
    assert (M.nrows, M.ncols) == (9, 32)
    E = row_echelon(M).matrix
    last = [(c + 1, e) for c, e in enumerate(E.rows[-1]) if not e.is_zero()]
    assert [c for c, _ in last] == [12, 17]
    assert last[0][1] == -last[1][1]
    # columns 12 and 17 are zeta_1^{u_y} and zeta_2^{u_x}
    lay = ZetaLayout(five_var, contract=False)
    names = ["zeta%d[%s]" % (i, five_var.chart.jet_name(*c)) for i, c in M.col_labels]
    assert names[11] == "zeta1[u_y]" and names[16] == "zeta2[u_x]"
    assert lay.label((1, col(five_var, "u_y"))) == lay.label((2, col(five_var, "u_x")))


def test_contraction_merges_columns(five_var):
    M = complete_matrix(five_var, 4, contracted=False)
    Mc = complete_matrix(five_var, 4, contracted=True)
    assert Mc.nrows == 9 and Mc.ncols < M.ncols
    assert rank_generic(Mc).rank == 8


# ---------------------------------------------------------------- steps

def test_wave_steps_pass(wave):
    r = step_at(wave, 2)
    assert r.ok and r.rank_condition.lhs_rank == r.rank_condition.rhs_rank


def test_wave_r1_residual(wave_r1):
    r = step_at(wave_r1, 2)
    assert r.rank_condition.passes
    assert not r.augmented_condition.passes
    assert [str(e) for e in r.residuals] == ["-w_t + v_x"]


def test_five_var_uncontracted(five_var):
    assert step_at(five_var, 3, contract_=False).ok
    r = step_at(five_var, 4, contract_=False)
    assert (r.rank_condition.lhs_rank, r.rank_condition.rhs_rank) == (8, 9)
    d = r.to_dict()
    rel = d["parameter_relations"]
    assert [x["relation"] for x in rel] == ["-zeta2[u_x] + zeta1[u_y]"]
    assert rel[0]["labels"] == ["(u, {x,y})"]
    assert rel[0]["vanishes_under_contraction"]


def test_five_var_contracted_all_steps_pass(five_var):
    fam = build_family(five_var)
    assert fam.success
    assert all(s.ok for s in fam.steps)
    assert len(fam.free) == 15
    assert fam.G_check == []


def test_uxx_uyy_step_two(uxx_uyy):
    r = step_at(uxx_uyy, 2)
    assert not r.ok
    rel = r.to_dict()["parameter_relations"]
    assert [x["relation"] for x in rel] == ["-u_y*a + zeta1[u_xy]"]


def test_uxy_step_two(uxy):
    r = step_at(uxy, 2)
    assert not r.ok
    assert [str(e) for e in r.relations] == ["zeta1[u_yy]"]


def test_step_range_checked(wave):
    with pytest.raises(ValueError):
        step_at(wave, 1)
    with pytest.raises(ValueError):
        step_at(wave, 3)


def test_augmented_implies_rank(random_systems):
    for s in random_systems:
        for j in range(2, s.n + 1):
            r = step_system(s, j, ZetaLayout(s, contract=False))
            if r.augmented_condition.passes:
                assert r.rank_condition.passes


# ---------------------------------------------------------------- family

def test_wave_family(wave):
    fam = build_family(wave)
    assert [v.name for v in fam.free] == ["zeta1[v_x]", "zeta1[w_x]"]
    rel = {r.raw.name: r for r in fam.relations}
    assert str(rel["zeta2[v_x]"].value) == "zeta1[w_x]"
    assert str(rel["zeta2[w_x]"].value) == "zeta1[v_x]"
    assert rel["zeta2[v_x]"].kind == "closed_form"


def test_wave_closed_form_relation(wave):
    lay = ZetaLayout(wave)
    e = closed_form_relation(wave, lay, 2, 1, 2)
    assert str(e) == "zeta1[w_x]"


@pytest.mark.parametrize("seed", range(5))
def test_wave_family_matches_solutions(wave, seed):
    """Along u = f(x+t) + g(x-t) the derivatives zeta_i^(b,rho) = d_i u^b_rho
    must agree with the family once zeta_1 takes its true values."""
    x, t = sympy.symbols("x t")
    rng = random.Random(seed)
    f = sum(rng.randint(-3, 3) * (x + t) ** k for k in range(5))
    g = sum(rng.randint(-3, 3) * (x - t) ** k for k in range(5))
    u = f + g
    comps = {"u": u, "v": sympy.diff(u, t), "w": sympy.diff(u, x)}
    pt = {x: Fraction(rng.randint(-4, 4)), t: Fraction(rng.randint(-4, 4))}
    var = {"x": x, "t": t}

    def true(i, c):
        b, rho = c
        name = wave.chart.jet_name(b, rho)
        dep, wrt = name.split("_")
        e = comps[dep]
        for ch in wrt:
            e = sympy.diff(e, var[ch])
        return sympy.diff(e, [x, t][i - 1]).subs(pt)

    fam = build_family(wave)
    choice = {v: Expr.const(Fraction(int(true(1, v.key[1])))) for v in fam.free}
    for c in wave.parametric_pairs():
        val = fam.value_of(2, c).subs({v: e for v, e in choice.items()})
        assert val.eval_at({}) == true(2, c)


def test_family_failure_reports_step(wave_r1, uxy):
    fam = build_family(wave_r1)
    assert not fam.success and fam.failed_step.j == 2
    assert build_family(uxy).to_dict()["failed_step"] == 2


# ---------------------------------------------------------------- differential conditions

def test_wave_differential_conditions(wave):
    eqs = differential_conditions(build_family(wave))
    assert sorted(e.leader.name for e in eqs) == ["D[t](zeta1[v_x])", "D[t](zeta1[w_x])"]


def test_five_var_reduction(five_var):
    fam = build_family(five_var)
    red = reduce_differential_conditions(fam)
    assert red.structure_ok, red.structure_issues
    assert len(red.kept) == 51
    assert len(red.dropped) == 29
    assert all(st == "vanished" for _, st, _ in red.dropped)
    assert sorted(set(red.renumbering.values()))[0] == "zeta1^1"


def test_wave_reduction_renumbering(wave):
    red = reduce_differential_conditions(build_family(wave))
    assert red.renumbering and set(red.renumbering.values()) == {"zeta1^1", "zeta1^2"}
    assert red.structure_ok


# ---------------------------------------------------------------- pointwise

def _point(sys, rng):
    return {c: Fraction(rng.randint(-3, 3)) for c in sys.barred_chart().coords}


def test_wave_constant_choice_is_flat(wave):
    fam = build_family(wave)
    pt = _point(wave, random.Random(1))
    res = pointwise_check(fam, {v: 1 for v in fam.free}, pt)
    assert res.integral and res.flat


def test_wave_nonconstant_choice_integral_not_flat(wave):
    fam = build_family(wave)
    x = Expr.var(wave.chart.coords()[0])
    choice = {fam.free[0]: x, fam.free[1]: 0}
    pt = _point(wave, random.Random(2))
    res = pointwise_check(fam, choice, pt)
    assert res.integral and not res.flat


def test_families_are_integral(random_systems):
    """Any member of a successful family lies in the Vessiot distribution's
    integral elements: brackets stay in span{Xbar, Ybar}."""
    rng = random.Random(7)
    seen = 0
    for s in random_systems:
        fam = build_family(s)
        if not fam.success or s.n < 2:
            continue
        seen += 1
        choice = {v: rng.randint(-2, 2) for v in fam.free}
        assert pointwise_check(fam, choice, _point(s, rng)).integral, s
    assert seen >= 10


# ---------------------------------------------------------------- the equivalence with the monster

def test_step_verdicts_on_corpus(random_systems):
    bad = []
    for s in random_systems:
        rep = monster(s)
        if not rep.applicable:
            continue
        if step_verdicts(s) != (rep.symbol_involutive, rep.equation_involutive):
            bad.append(s)
    assert bad == []


@given(st.integers(min_value=0, max_value=10**6))
def test_step_verdicts_property(seed):
    s = corpus.random_system(random.Random(seed))
    rep = monster(s)
    if rep.applicable:
        assert step_verdicts(s) == (rep.symbol_involutive, rep.equation_involutive)


@pytest.mark.parametrize("name,expected", [
    ("wave_r1_1", (True, True)), ("wave_r1", (True, False)), ("five_var", (True, True)),
])
def test_step_verdicts_named(name, expected):
    assert step_verdicts(corpus.named_systems()[name]) == expected
