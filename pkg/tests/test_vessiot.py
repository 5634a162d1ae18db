import pytest

from jetvessiot.expr import Expr
from jetvessiot.exprparse import parse_expr
from jetvessiot.jet import VectorField, lie_bracket
from jetvessiot.vessiot import (vessiot_basis, structure_coefficients, theta, theta_cases, xi, xi_cases,
                                rank_bounds, verify_structure_equations, check_tangency,
                                implicit_vessiot_generators, fields_proportional, reference_complement,
                                symbol_fields)

# the five Xi matrices of the five-variable example, rows (u, v, w),
# columns u_x v_x w_x u_y v_y w_y v_z w_z
FIVE_VAR_XI = {
    1: [[-1, 0, 0, 0, 0, 0, 0, 0], [0, -1, 0, 0, 0, 0, 0, 0], [0, 0, -1, 0, 0, 0, 0, 0]],
    2: [[0, 0, 0, -1, 0, 0, 0, 0], [0, 0, 0, 0, -1, 0, 0, 0], [0, 0, 0, 0, 0, -1, 0, 0]],
    3: [[0, -1, -2, 0, -3, -4, 0, 0], [0, 0, 0, 0, 0, 0, -1, 0], [0, 0, 0, 0, 0, 0, 0, -1]],
    4: [[0, 0, 0, 0, 0, 0, 0, 0], [-2, 0, 0, -4, 0, 0, 0, 0], [1, 0, 0, 3, 0, 0, 0, 0]],
    5: [[0] * 8] * 3,
}


def as_strings(rows):
    return [[str(Expr.const(c)) for c in r] for r in rows]


def test_wave_reference_complement(wave):
    b = vessiot_basis(wave)
    assert str(b.X[0]) == "d_x + w*d_u + v_x*d_v + w_x*d_w"
    assert str(b.X[1]) == "d_t + v*d_u + w_x*d_v + v_x*d_w"
    assert [b.y_name(k) for k in range(b.r)] == ["v_x", "w_x"]


def test_wave_structure_coefficients(wave):
    sc = structure_coefficients(wave)
    assert all(e.is_zero() for e in sc.theta[(1, 2)])
    assert sc.xi[1].to_strings() == as_strings([[0, 0], [-1, 0], [0, -1]])
    # the bracket [X_2, Y_1] = -d_w and [X_2, Y_2] = -d_v give the swapped unit block
    assert sc.xi[2].to_strings() == as_strings([[0, 0], [0, -1], [-1, 0]])


def test_wave_brackets_behind_xi2(wave):
    X = reference_complement(wave)
    _, Y = symbol_fields(wave)
    ch = wave.chart
    assert lie_bracket(X[1], Y[0]) == VectorField({ch.u(3): -1})
    assert lie_bracket(X[1], Y[1]) == VectorField({ch.u(2): -1})


def test_wave_r1_theta(wave_r1):
    th = theta(wave_r1, 1, 2)
    assert [str(e) for e in th] == ["-w_t + v_x", "0", "0"]


def test_five_var_xi_matrices(five_var):
    sc = structure_coefficients(five_var)
    assert [five_var.chart.jet_name(*c) for c in sc.cols] == ["u_x", "v_x", "w_x", "u_y", "v_y", "w_y", "v_z", "w_z"]
    for i, rows in FIVE_VAR_XI.items():
        assert sc.xi[i].to_strings() == as_strings(rows), i


def test_uxx_uyy_fields_and_brackets(uxx_uyy):
    ch = uxx_uyy.chart
    b = vessiot_basis(uxx_uyy)
    e = lambda t: parse_expr(t, ch)
    assert b.X[0] == VectorField({ch.x(1): 1, ch.u(1): e("u_x"), ch.jet(1, (1, 0)): e("a*u"), ch.jet(1, (0, 1)): e("u_xy")})
    assert b.X[1] == VectorField({ch.x(2): 1, ch.u(1): e("u_y"), ch.jet(1, (1, 0)): e("u_xy"), ch.jet(1, (0, 1)): e("b*u")})
    (Y,) = b.Y
    assert Y == VectorField.coordinate(ch.jet(1, (1, 1)))
    assert lie_bracket(b.X[0], b.X[1]) == VectorField({ch.jet(1, (0, 1)): e("b*u_x"), ch.jet(1, (1, 0)): e("-a*u_y")})
    assert lie_bracket(b.X[0], Y) == VectorField({ch.jet(1, (0, 1)): -1})
    assert lie_bracket(b.X[1], Y) == VectorField({ch.jet(1, (1, 0)): -1})


def test_fields_are_tangent(wave, five_var, uxx_uyy):
    for s in (wave, five_var, uxx_uyy):
        b = vessiot_basis(s)
        assert not check_tangency(s, b.X + b.Y)


@pytest.mark.parametrize("name", ["wave", "wave_r1"])
def test_closed_forms_agree_with_brackets(request, name):
    s = request.getfixturevalue(name)
    for i in range(1, s.n + 1):
        assert xi(s, i) == xi_cases(s, i)
        for j in range(i + 1, s.n + 1):
            assert theta(s, i, j) == theta_cases(s, i, j)


def test_structure_oracle_on_corpus(random_systems):
    """Lie brackets modulo span{X, Y} equal the closed forms: zero discrepancies."""
    for s in random_systems:
        assert verify_structure_equations(s).ok, s
        for i in range(1, s.n + 1):
            assert xi(s, i) == xi_cases(s, i)
            for j in range(i + 1, s.n + 1):
                assert theta(s, i, j) == theta_cases(s, i, j)


def test_xi_rank_bounds(random_systems, five_var):
    for s in random_systems[:50] + [five_var]:
        for i in range(1, s.n + 1):
            lo, rk, hi = rank_bounds(s, i)
            assert lo <= rk <= hi


def test_ode_generator(ode_circle):
    ch = ode_circle.chart
    g = implicit_vessiot_generators(ode_circle)
    (V,) = g.fields
    e = lambda t: parse_expr(t, ch)
    expected = VectorField({ch.x(1): e("u_x"), ch.u(1): e("u_x^2"), ch.jet(1, (1,)): e("-(x + u_x*u)")})
    assert fields_proportional(V, expected)
    assert [str(c) for c in g.caveats] == ["2*u_x"]


def test_implicit_generators_of_a_solved_system(uxx_uyy):
    """Generators of the linear system span the same space as X_1, X_2, Y pushed forward."""
    g = implicit_vessiot_generators(uxx_uyy)
    assert len(g.fields) == 3
    assert len(g.transversal()) == 2 and len(g.vertical()) == 1
