import random

import pytest
from hypothesis import given, strategies as st

from jetvessiot.corpus import random_system, RandomSystemConfig
from jetvessiot.involution import monster, brute_force_combination, prolongation_residue, NotApplicable
from jetvessiot.symbol import cartan_test
from jetvessiot.system import make_first_order


def test_wave_is_involutive(wave):
    rep = monster(wave)
    assert rep.applicable
    assert rep.symbol_involutive and rep.equation_involutive
    assert all(o.integrability.is_zero() for o in rep.triples)


def test_wave_r1_integrability_condition(wave_r1):
    rep = monster(wave_r1)
    assert rep.symbol_involutive is True
    assert rep.equation_involutive is False
    (ob,) = rep.triples
    assert (ob.alpha, ob.i, ob.j) == (1, 1, 2)
    assert str(ob.reduced_integrability) == "-w_t + v_x"


def test_five_var_is_involutive(five_var):
    rep = monster(five_var)
    assert rep.symbol_involutive and rep.equation_involutive


def test_not_applicable_cases(uxy):
    assert not monster(uxy).applicable
    non_nested = make_first_order(["x", "y", "z"], ["u"], {"u_y": "u_x"})
    rep = monster(non_nested)
    assert not rep.applicable and rep.symbol_involutive is None


def test_prolongation_residue_requires_principal_pair(wave, uxy):
    with pytest.raises(ValueError):
        prolongation_residue(wave, 2, 1, 2)    # (v, x) is parametric
    with pytest.raises(NotApplicable):
        prolongation_residue(uxy, 1, 1, 2)


def test_closed_form_matches_brute_force_on_corpus(random_systems):
    """Every assembled obstruction equals the brute-force combination
    D_j(u_i - phi_i) - D_i(u_j - phi_j) reduced modulo the prolonged equation."""
    for s in random_systems:
        rep = monster(s)
        for ob in rep.triples:
            assert ob.assembled(s) == brute_force_combination(s, ob.alpha, ob.i, ob.j), (s, ob.alpha, ob.i, ob.j)


def test_symbol_verdict_matches_cartan_on_corpus(random_systems, wave, wave_r1, five_var):
    for s in random_systems + [wave, wave_r1, five_var]:
        assert monster(s).symbol_involutive == cartan_test(s).passes, s


@given(st.integers(0, 10 ** 6))
def test_symbol_verdict_matches_cartan_property(seed):
    s = random_system(random.Random(seed), RandomSystemConfig())
    assert monster(s).symbol_involutive == cartan_test(s).passes


def test_obstruction_report_serialises(wave_r1):
    d = monster(wave_r1).to_dict()
    assert d["equation_involutive"] is False
    assert d["triples"][0]["reduced_integrability"] == "-w_t + v_x"
