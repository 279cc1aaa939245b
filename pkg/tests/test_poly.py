import pytest

from girth8.field import make_field
from girth8.poly import (
    BiPoly,
    PolyParseError,
    UniPoly,
    delta_k,
    format_poly,
    h_slice,
    is_injective_over,
    k_p_set,
    max_fiber_size,
    mu_transform,
    nu_transform,
    parse_poly,
    parse_uni,
    phi_p,
    pi_transform,
    poly_arith,
    recognize_char_power,
    recognize_rho_power,
    rho,
)
from oracles import RefField, ref_eval

F3, F5, F7 = make_field(3), make_field(5), make_field(7)


def P(text, F):
    return parse_poly(text, F)


def test_difference_of_squares():
    x1 = UniPoly(F7, [1, 1])
    xm1 = UniPoly(F7, [6, 1])
    assert poly_arith("mul", x1, xm1) == UniPoly(F7, [6, 0, 1])


def test_scale_by_zero():
    h = P("x*y + 3*x^2*y", F7)
    assert poly_arith("scale", h, 0).terms == {}


def test_compose_uni():
    assert poly_arith("compose_uni", UniPoly(F3, [0, 0, 1]), UniPoly(F3, [1, 1])) == UniPoly(F3, [1, 2, 1])


def test_mixed_field_arith_rejected():
    with pytest.raises(ValueError):
        UniPoly(F3, [1]) + UniPoly(F5, [1])


def test_eval_examples():
    assert P("x*y", F7)(2, 3).value == 6
    assert BiPoly(F7)(4, 5).value == 0
    assert P("x^2*y", F7)(2, 3).value == 5


@pytest.mark.parametrize("p,k", [(3, 1), (2, 2), (3, 2), (5, 1)])
def test_eval_matches_oracle(p, k):
    F, R = make_field(p, k), RefField(p, k)
    h = BiPoly(F, {(2, 1): 1, (1, 3): F.q - 1, (3, 2): 2 % F.q})
    for x in range(F.q):
        for y in range(F.q):
            assert h(x, y).value == ref_eval(R, h.terms, x, y)
    assert (h.table() == [[ref_eval(R, h.terms, x, y) for y in range(F.q)] for x in range(F.q)]).all()


def test_rho():
    assert rho(F7.element(0)) == UniPoly(F7, [0, 0, 1])
    assert rho(F7.element(2)) == UniPoly(F7, [0, 5, 1])
    for a in F7.elements():
        r = rho(a)
        assert r(a).value == 0 and r(0).value == 0


def test_delta2_xy_example():
    f = P("x*y", F7)
    assert delta_k(f, [1, 2], [3, 5]).value == 2


def test_delta_k_rejects_short_input():
    with pytest.raises(ValueError):
        delta_k(P("x*y", F7), [1], [2])


def test_delta_y_only_vanishes():
    f = P("y^3 + 2*y", F7)
    assert delta_k(f, [1, 2, 3], [4, 5, 6]).value == 0


def test_delta3_gamma3_identity():
    # with Delta_3(xy)(S) = 0, Delta_3(x^2 y)(S) = (a - b)(c - d)(b - e), nonzero on seeds
    F = F7
    xy, x2y = P("x*y", F), P("x^2*y", F)
    seen = 0
    for a in range(7):
        for b in range(7):
            for e in range(7):
                for c in range(7):
                    for d in range(7):
                        for f in range(7):
                            if len({a, b, e}) < 2:
                                continue
                            S = ([a, b, e], [c, d, f])
                            if delta_k(xy, *S).value:
                                continue
                            lhs = delta_k(x2y, *S).value
                            rhs = F.mul(F.mul(F.sub(a, b), F.sub(c, d)), F.sub(b, e))
                            assert lhs == rhs
                            seen += 1
    assert seen > 1000


def test_injectivity():
    assert max_fiber_size(UniPoly.monomial(F7, 2)) == 2
    assert not is_injective_over(UniPoly.monomial(F7, 2))
    assert is_injective_over(UniPoly.monomial(F5, 3))
    F9 = make_field(3, 2)
    assert is_injective_over(UniPoly.monomial(F9, 3))


def test_k_p_set():
    assert k_p_set(2, 8) == [1, 2, 4, 8]
    assert k_p_set(3, 2) == [1]
    assert k_p_set(5, 1) == [1]


def test_phi_p():
    assert phi_p(1, 2, 2, 8, 8) == {(1, 2), (2, 4), (4, 8)}
    assert phi_p(3, 3, 3, 9, 3) == {(1, 1), (3, 3)}
    assert phi_p(1, 3, 3, 9, 9) == {(1, 3), (3, 9)}
    with pytest.raises(ValueError):
        phi_p(3, 1, 2, 4, 4)


def test_mu_unchanged_without_removable_terms():
    F9 = make_field(3, 2)
    h = P("x*y^2 + x^3*y", F9)
    assert mu_transform(h, 4, 1, 1, 3) == h


def test_mu_removes_rho_term():
    for a in range(3):
        # h = x y + rho_a(x) y, i.e. h_{2,1} = 1 and h_{1,1} = 1 - a
        h = BiPoly(F3, {(2, 1): 1, (1, 1): F3.sub(1, a)})
        assert mu_transform(h, a, 1, 1, 3) == P("x*y", F3)


def test_pi_diagonal():
    F = make_field(5)
    h = P("3*x^2*y + 2*x*y", F)
    assert pi_transform(h, 1, 1, 5) == P("3*x^2*y", F)


def test_transforms_check_characteristic():
    with pytest.raises(ValueError):
        mu_transform(P("x*y", F5), 0, 1, 1, 3)
    with pytest.raises(ValueError):
        pi_transform(P("x*y", F5), 2, 1, 5)


def test_nu_is_mirror_of_mu():
    F = make_field(2, 3)
    h = P("x*y^2 + 3*x*y + x^2*y", F)
    assert nu_transform(h, 5, 1, 1, 2) == mu_transform(h.swap(), 5, 1, 1, 2).swap()


def test_recognize_char_power():
    F2 = make_field(2)
    assert recognize_char_power(UniPoly.monomial(F2, 4), 2) == 4
    assert recognize_char_power(UniPoly.monomial(F5, 3), 5) is None
    assert recognize_char_power(UniPoly(F3, [0, 1, 1]), 3) is None


def test_recognize_rho_power():
    assert recognize_rho_power(UniPoly.monomial(F7, 2), 7) == (F7.zero, 1)
    # (x^2 - x)^3 = x^6 - x^3 in characteristic 3
    T = UniPoly(F3, [0, 0, 0, 2, 0, 0, 1])
    assert T == rho(F3.one) ** 3
    assert recognize_rho_power(T, 3) == (F3.one, 3)
    assert recognize_rho_power(UniPoly.monomial(F5, 3), 5) is None


def test_h_slice():
    h = P("x*y + x^2*y^2", F7)
    assert h_slice(h, 1) == UniPoly(F7, [0, 1])
    assert h_slice(h, 5).is_zero()
    h = P("3*x^2*y + x*y^2 + 5*x*y + 6*x^2*y^2", F7)
    rebuilt = BiPoly(F7)
    for j in range(1, h.degy + 1):
        rebuilt = rebuilt + h_slice(h, j).to_bipoly() * BiPoly.monomial(F7, 0, j)
    assert rebuilt == h


# --- text format ---------------------------------------------------------------------

@pytest.mark.parametrize("text", ["x^2*y + 5*x*y", "x*y", "0", "3", "2*x^3 + y^4", "x^2*y^3 + x*y^2 + 6*y + 1"])
def test_format_parse_round_trip(text):
    h = P(text, F7)
    assert format_poly(h) == text
    assert P(format_poly(h), F7) == h


def test_parser_whitespace_and_order():
    assert P(" 5 * x * y+x ^ 2*y ", F7) == P("x^2*y + 5*x*y", F7)
    assert P("x*y + x*y", F7) == P("2*x*y", F7)


@pytest.mark.parametrize("bad,pos", [("x**y", 2), ("x*y +", 5), ("x^*y", 2), ("7*x", 0), ("z", 0)])
def test_parser_errors_name_position(bad, pos):
    with pytest.raises(PolyParseError) as ei:
        P(bad, F7)
    assert ei.value.pos == pos


def test_parse_uni_accepts_either_variable():
    assert parse_uni("y^2 + 3*y", F7) == parse_uni("x^2 + 3*x", F7)
    with pytest.raises(ValueError):
        parse_uni("x*y", F7)


def test_reduce_as_functions():
    # x^3 and x agree as functions on F_3
    assert P("x^3*y", F3).reduce() == P("x*y", F3)
    assert P("x^5*y^9", F5).reduce() == P("x*y", F5)
