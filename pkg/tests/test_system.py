import pytest

from jetvessiot.corpus import random_corpus, RandomSystemConfig
from jetvessiot.system import make_first_order, make_solved, validate


def test_wave_principal_structure(wave):
    assert wave.betas() == (1, 3)
    assert wave.alphas() == (2, 0)
    assert wave.is_nested()
    assert not validate(wave)


@pytest.mark.parametrize("eqs,fragment", [
    ({"u_x": "u_t"}, "class-2 derivative"),
    ({"u_t": "u_x", "u_x": "1"}, "principal derivative"),
    ({"u_t": "u_xx"}, "order 2 > 1"),
])
def test_validate_reports(eqs, fragment):
    sys = make_first_order(["x", "t"], ["u"], eqs)
    msgs = [v.message for v in validate(sys)]
    assert any(fragment in m for m in msgs), msgs


def test_restrict_replaces_principal_jets(wave):
    e = wave.restrict(wave.chart.jet(3, (0, 1)))
    assert str(e) == "v_x"


def test_second_order_solved_system(uxx_uyy):
    assert uxx_uyy.q == 2
    assert [uxx_uyy.chart.jet_name(*p) for p in uxx_uyy.parametric_pairs()] == ["u_xy"]
    assert not validate(uxx_uyy)


def test_random_corpus_is_valid_and_nested():
    cfg = RandomSystemConfig(max_n=3, max_m=3)
    for s in random_corpus(200, seed=5, cfg=cfg):
        assert not validate(s), s
        assert s.is_nested()
        assert s.n <= 3 and s.m <= 3


def test_prolongation_has_all_formal_derivatives(wave):
    imp = wave.to_implicit()
    pro = imp.prolong()
    assert len(pro.equations) == len(imp.equations) * (1 + wave.n)
