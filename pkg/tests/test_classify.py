import json

import pytest

from girth8.classify import (
    InvalidInstance,
    ProblemInstance,
    SizeConditionError,
    all_witnesses,
    build_qM_instance,
    check_size_condition,
    classify,
    difference_slices_injective,
    fibers_at_most_two,
    parse_instance,
    theorem1_equivalence,
    validate_instance,
)
from girth8.field import make_field
from girth8.graph import girth_leq


def test_size_condition_examples():
    rep = check_size_condition(9, 2, 1)
    assert rep.size_ok and rep.bounds == (7, 6, 4)
    assert not check_size_condition(7, 2, 1).size_ok
    assert check_size_condition(7, 1, 1).size_ok
    assert check_size_condition(7, 1, 1).bounds == (5, 5, 4)
    with pytest.raises(ValueError):
        check_size_condition(7, 0, 1)


def test_validate_reports_violations():
    assert "f(0) != 0" in validate_instance(parse_instance("q=11 m=2 n=1 f=x^2+1 g=y h=x*y")).violations
    assert "h has a non-mixed term" in validate_instance(parse_instance("q=11 m=2 n=1 f=x g=y h=x")).violations
    bad = validate_instance(parse_instance("q=11 m=1 n=1 f=x g=y h=x^2*y"))
    assert any("exceeding n" in v for v in bad.violations)
    assert validate_instance(parse_instance("q=11 m=1 n=2 f=x g=y h=x^2*y")).ok
    assert any("monic" in v for v in validate_instance(parse_instance("q=11 m=1 n=1 f=2*x g=y h=x*y")).violations)
    assert any("zero" in v for v in validate_instance(parse_instance("q=11 m=1 n=1 f=x g=y h=0")).violations)


def test_parse_instance_errors():
    with pytest.raises(ValueError):
        parse_instance("q=9 m=2 n=1 f=x g=y h=x*y")
    with pytest.raises(ValueError):
        parse_instance("q=3^2 m=2 f=x g=y h=x*y")


def test_instance_text_round_trip():
    text = "q=3^2 m=2 n=1 f=x^2 + 2*x g=y h=5*x*y"
    assert parse_instance(text).text() == text


def test_case_I_rho_zero():
    w = classify(parse_instance("q=3^2 m=2 n=1 f=x^2 g=y h=x*y"))
    assert w.to_dict() == {"case": "I", "a": 0, "zeta": 1, "u": 1, "v": 1, "s": 1}


def test_no_case_for_xy():
    inst = parse_instance("q=3^2 m=1 n=1 f=x g=y h=5*x*y")
    assert classify(inst) is None
    G = build_qM_instance(inst)
    # the graph over F_9 has a 6-cycle (and no 4-cycle)
    assert girth_leq(G, 6) == 6


def test_case_IVa_char2():
    for a in range(1, 8):
        w = classify(parse_instance(f"q=2^3 m=2 n=1 f=x^2+{a}*x g=y^2 h=x*y"))
        assert w.case == "IVa" and (w.a.value, w.u, w.s, w.v) == (a, 1, 1, 2)


def test_case_IVb_mirror():
    w = classify(parse_instance("q=2^3 m=2 n=1 f=x^2 g=y^2+3*y h=5*x*y"))
    assert w.case == "IVb" and w.a.value == 3 and w.zeta.value == 5


def test_case_II():
    w = classify(parse_instance("q=3^2 m=2 n=1 f=x g=y^2+y h=x*y"))
    assert w.case == "II"


def test_case_III_both_orientations():
    w = classify(parse_instance("q=11 m=1 n=2 f=x g=y h=x^2*y+x*y"))
    assert (w.case, w.zeta.value) == ("III", 1)
    w = classify(parse_instance("q=11 m=1 n=2 f=x g=y h=7*x*y^2+2*x*y"))
    assert (w.case, w.zeta.value) == ("III", 7)
    assert classify(parse_instance("q=11 m=1 n=2 f=x g=y h=x^2*y^2+x*y")) is None


def test_char2_double_reading_of_x_squared():
    # x^2 over F_8 is both rho_0 and the Frobenius power x^2
    inst = parse_instance("q=2^3 m=2 n=1 f=x^2 g=y h=x*y")
    cases = [w.case for w in all_witnesses(inst)]
    assert "I" in cases


def test_canonical_instance_accepted_for_valid_sizes():
    for q, m in [("11", 1), ("13", 1), ("13", 2), ("2^4", 1), ("17", 2)]:
        inst = parse_instance(f"q={q} m={m} n=2 f=x g=y h=x^2*y")
        if check_size_condition(inst.q, m, 2).size_ok:
            w = classify(inst)
            assert w.case == "III" and (w.u, w.v, w.s) == (1, 1, 1)


def test_zeta_scaling_only_changes_zeta():
    base = parse_instance("q=3^2 m=2 n=1 f=x^2+x g=y h=x*y")
    w0 = classify(base)
    F = base.base_field
    for z in range(1, 9):
        inst = ProblemInstance(F, 2, 1, base.f, base.g, base.h.scale(z))
        w = classify(inst)
        assert (w.case, w.a, w.u, w.v, w.s) == (w0.case, w0.a, w0.u, w0.v, w0.s)
        assert w.zeta.value == z


def test_size_condition_enforced_unless_warn_only():
    inst = parse_instance("q=7 m=2 n=1 f=x^2 g=y h=x*y")
    with pytest.raises(SizeConditionError):
        classify(inst)
    assert classify(inst, warn_only=True).case == "I"


def test_invalid_instance_raises():
    with pytest.raises(InvalidInstance) as ei:
        classify(parse_instance("q=11 m=2 n=1 f=x^2+1 g=y h=x*y"))
    assert "f(0) != 0" in ei.value.violations


def test_build_qM_instance():
    G = build_qM_instance(parse_instance("q=3^2 m=2 n=1 f=x^2 g=y h=x*y"))
    assert G.field == make_field(3, 4)
    G = build_qM_instance(parse_instance("q=11 m=1 n=2 f=x g=y h=x^2*y"))
    assert G.field == make_field(11, 2)
    assert G.f2.terms == {(1, 1): 1}


def test_coefficients_are_embedded():
    inst = parse_instance("q=2^2 m=1 n=3 f=x g=y h=2*x*y")
    G = build_qM_instance(inst)
    from girth8.field import embedding_table

    assert G.f3.terms == {(1, 1): int(embedding_table(inst.base_field, G.field)[2])}


def test_equivalence_examples():
    v = theorem1_equivalence(parse_instance("q=3^2 m=2 n=1 f=x^2 g=y h=x*y"))
    assert v.classified and v.girth8 and v.agree
    v = theorem1_equivalence(parse_instance("q=3^2 m=2 n=1 f=x g=y h=x*y"))
    assert not v.classified and not v.girth8 and v.agree
    assert v.seed.k == 3
    v = theorem1_equivalence(parse_instance("q=2^3 m=2 n=1 f=x^2+x g=y^2 h=x*y"))
    assert v.classified and v.girth8 and v.agree
    d = v.to_dict()
    assert set(d) == {"case", "a", "zeta", "u", "v", "s", "girth8", "agree"}
    json.dumps(d)


def test_determinism():
    inst = parse_instance("q=2^3 m=2 n=1 f=x^2+3*x g=y^2 h=6*x*y")
    assert all(classify(inst) == classify(inst) for _ in range(5))


def test_necessary_conditions_on_accepted_instance():
    inst = parse_instance("q=3^2 m=2 n=1 f=x^2+x g=y h=x*y")
    assert difference_slices_injective(inst) and fibers_at_most_two(inst)


def test_fiber_condition_can_fail():
    # y^3 - y is F_3-linear with kernel F_3, so g takes every value three times
    inst = parse_instance("q=3 m=3 n=1 f=x g=y^3+2*y h=x*y")
    assert not fibers_at_most_two(inst)
    assert classify(inst, warn_only=True) is None
