"""Group models: finite closure, symbolic templates, characters, actions."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from covar.action import (
    ActionError,
    Character,
    ClosureCapError,
    TemplateSpec,
    det_w_inverse_character,
    extend_finite_action,
    generic_matrix,
    make_finite_group,
    symbolic_general_linear,
)
from covar.exactalg import Matrix, Poly, RatFn, qmat

from conftest import CYCLE3, SWAP, SWAP3


def test_swap_closure_order_two():
    G = make_finite_group([(SWAP, SWAP)])
    assert G.order == 2
    assert G.identity == 0
    assert G.inv == [0, 1]


def test_s3_closure_order_six():
    G = make_finite_group([(CYCLE3, CYCLE3), (SWAP3, SWAP3)])
    assert G.order == 6
    for i in G.elements():
        assert G.mul(i, G.inv[i]) == G.identity


def test_unipotent_hits_closure_cap():
    with pytest.raises(ClosureCapError):
        make_finite_group([([["1", "1"], ["0", "1"]],
                           [["1", "0"], ["0", "1"]])], max_order=64)


def test_non_invertible_generator_rejected():
    with pytest.raises(ActionError):
        make_finite_group([([["1", "1"], ["1", "1"]], SWAP)])


def test_w_images_must_be_homomorphic():
    order4 = [["0", "-1"], ["1", "0"]]
    with pytest.raises(ActionError, match="homomorphism"):
        make_finite_group([(SWAP, order4)])


def test_x_w_name_collision_rejected():
    with pytest.raises(ActionError):
        make_finite_group([(SWAP, SWAP)], x_vars=("x1", "x2"), w_vars=("x1", "w2"))


def test_act_on_poly_examples():
    G = make_finite_group([(SWAP, SWAP)])
    x1, x2 = Poly.gens(G.x_vars)
    assert G.act_on_poly(1, x1 * x2**2) == x2 * x1**2
    p = x1**3 - 2 * x2
    assert G.act_on_poly(0, p) == p


def test_act_preserves_degree_for_linear_actions():
    G = make_finite_group([(CYCLE3, CYCLE3), (SWAP3, SWAP3)])
    p = Poly.parse("x1^2*x2 - x3^3", G.x_vars)
    for g in G.elements():
        assert G.act_on_poly(g, p).total_degree() == p.total_degree()


@settings(max_examples=20, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2),
                                 st.integers(0, 2)),
                       st.fractions(min_value=-4, max_value=4,
                                    max_denominator=3).filter(bool),
                       max_size=3))
def test_finite_action_composes(terms):
    G = make_finite_group([(CYCLE3, CYCLE3), (SWAP3, SWAP3)])
    p = Poly(G.x_vars, terms)
    for g in G.elements():
        for h in G.elements():
            assert G.act_on_poly(g, G.act_on_poly(h, p)) == \
                G.act_on_poly(G.mul(g, h), p)


def test_scalar_action_on_variable():
    S = symbolic_general_linear(1, "scalar", "scalar", x_copies=2, w_copies=1)
    x1 = Poly.var("x1", S.x_vars)
    moved = S.act_on_poly(x1)
    ring = moved.vars
    assert moved == RatFn(Poly.var("x1", ring), Poly.var("g11", ring))


def test_symbolic_templates_dimensions():
    C = symbolic_general_linear(2, "gl_conjugation", "gl_conjugation",
                                x_copies=2, w_copies=1)
    assert len(C.x_vars) == 8 and len(C.w_vars) == 4 and len(C.g_vars) == 4
    N = symbolic_general_linear(3, "gl_natural", "gl_natural", x_copies=4)
    assert len(N.x_vars) == 12 and len(N.w_vars) == 3


def test_unknown_template_rejected():
    with pytest.raises(ActionError, match="unknown template"):
        symbolic_general_linear(2, "so_adjoint", "gl_natural")


def test_scalar_template_needs_n_equal_one():
    with pytest.raises(ActionError):
        symbolic_general_linear(2, "scalar", "scalar")


@pytest.mark.parametrize("kind,n,copies", [
    ("conjugation", 2, 1), ("conjugation", 3, 1), ("natural", 2, 3),
    ("scalar", 1, 2), ("trivial", 2, 2),
])
def test_template_operator_is_multiplicative(kind, n, copies):
    spec = TemplateSpec(kind, copies)
    g_vars = tuple(f"g{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1))
    h_vars = tuple(f"h{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1))
    ring = g_vars + h_vars
    g = generic_matrix(n, ring, "g")
    h = generic_matrix(n, ring, "h")
    Ng = spec.operator(g, g.adjugate())
    Nh = spec.operator(h, h.adjugate())
    gh = g * h
    Ngh = spec.operator(gh, gh.adjugate())
    assert Ng * Nh == Ngh


def test_symbolic_identity_specialization():
    C = symbolic_general_linear(2, "gl_conjugation", "gl_natural", x_copies=1)
    ident = qmat([["1", "0"], ["0", "1"]])
    mx, mw = C.specialize(ident)
    assert mx == Matrix.identity(4, mx.entries[0][0])
    assert mw == Matrix.identity(2, mw.entries[0][0])


def test_specialize_requires_invertible():
    C = symbolic_general_linear(2, "gl_natural", "gl_natural")
    with pytest.raises(ActionError):
        C.specialize(qmat([["1", "1"], ["1", "1"]]))


def test_conjugation_fixes_trace_and_det():
    C = symbolic_general_linear(2, "gl_conjugation", "gl_conjugation", x_copies=1)
    for text in ("a11 + a22", "a11*a22 - a12*a21"):
        p = Poly.parse(text, C.x_vars)
        num, k = C.act_cleared(p, "x")
        det = C.det_poly.embed(num.vars)
        assert num == p.embed(num.vars) * det**k


def test_act_cleared_inverse_composition():
    C = symbolic_general_linear(2, "gl_conjugation", "gl_conjugation", x_copies=1)
    p = Poly.parse("a11^2 - a12*a21", C.x_vars)
    fwd, kf = C.act_cleared(p, "x", inverse=False)
    # applying g then g^{-1} returns p up to the cleared determinant powers
    ring = fwd.vars
    det = C.det_poly.embed(ring)
    # evaluate both composition orders at a specialization instead of
    # composing symbolically: g = [[1,2],[3,4]] is invertible
    mx, _ = C.specialize(qmat([["1", "2"], ["3", "4"]]))
    point = {"a11": 2, "a12": -1, "a21": 5, "a22": 3}
    moved_point = {}
    vals = [Fraction(point[v]) for v in C.x_vars]
    for i, name in enumerate(C.x_vars):
        moved_point[name] = sum(mx.entries[i][j].constant_value() * vals[j]
                                for j in range(4))
    spec_point = dict(moved_point)
    spec_point.update({g: (1 if g in ("g11",) else 2 if g == "g12" else
                           3 if g == "g21" else 4) for g in C.g_vars})
    lhs = fwd.eval({**point, **{"g11": 1, "g12": 2, "g21": 3, "g22": 4}})
    det_val = C.det_poly.eval({"g11": 1, "g12": 2, "g21": 3, "g22": 4})
    assert lhs == p.eval(moved_point) * det_val**kf


def test_two_generic_elements_compose():
    """Substituting one generic action after another matches the action of
    the product matrix, after clearing determinant powers."""
    C = symbolic_general_linear(2, "gl_natural", "gl_natural")
    x1 = Poly.var("x11", C.x_vars)
    g_point = {"g11": 1, "g12": 2, "g21": 0, "g22": 1}
    h_point = {"g11": 3, "g12": 0, "g21": 1, "g22": 1}
    gh = [[5, 2], [1, 1]]  # g * h for the two matrices above

    def act_at(point, p):
        num, k = C.act_cleared(p, "x")
        vals = {**{v: point[v] for v in C.g_vars},
                **{v: Poly.var(v, C.x_vars) for v in C.x_vars}}
        det_val = C.det_poly.eval(point)
        out = Poly.zero(C.x_vars)
        for exps, coeff in num.terms.items():
            term = Poly.const(coeff, C.x_vars)
            for name, e in zip(num.vars, exps):
                if not e:
                    continue
                v = vals[name]
                term = term * (v**e if isinstance(v, Poly)
                               else Poly.const(v**e, C.x_vars))
            out = out + term
        return out * Fraction(1, int(det_val**k))

    p = x1
    one_then_other = act_at(g_point, act_at(h_point, p))
    combined = act_at({"g11": gh[0][0], "g12": gh[0][1],
                       "g21": gh[1][0], "g22": gh[1][1]}, p)
    assert one_then_other == combined


def test_character_multiplicative_finite():
    G = make_finite_group([(SWAP, SWAP)])
    theta = det_w_inverse_character(G)
    assert theta.table == [Fraction(1), Fraction(-1)]
    assert theta.check_multiplicative()
    with pytest.raises(ActionError):
        Character(G, table=[Fraction(1), Fraction(0)])


def test_character_multiplicative_symbolic():
    C = symbolic_general_linear(2, "gl_conjugation", "gl_conjugation", x_copies=2)
    theta = det_w_inverse_character(C)
    assert theta.is_trivial()
    assert theta.check_multiplicative()
    N = symbolic_general_linear(2, "gl_natural", "gl_natural")
    theta_n = det_w_inverse_character(N)
    assert not theta_n.is_trivial()
    assert theta_n.check_multiplicative()


def test_symbolic_character_must_avoid_space_variables():
    N = symbolic_general_linear(2, "gl_natural", "gl_natural")
    bad = RatFn(Poly.var("g11", N.g_vars))
    ok = Character(N, ratfn=bad)  # depends only on g-variables
    assert ok.ratfn == bad
    mixed_ring = N.x_vars + N.g_vars
    with pytest.raises(ActionError):
        Character(N, ratfn=RatFn(Poly.var("x11", mixed_ring)))


def test_extend_finite_action_product_blocks():
    G = make_finite_group([(SWAP, SWAP)])
    ext = extend_finite_action(G, ("y1", "y2"), [
        [["1", "0"], ["0", "1"]], [["0", "1"], ["1", "0"]]])
    assert ext.x_vars == ("x1", "x2", "y1", "y2")
    assert ext.order == G.order
    p = Poly.parse("y1 - x1", ext.x_vars)
    assert ext.act_on_poly(1, p) == Poly.parse("y2 - x2", ext.x_vars)
    with pytest.raises(ActionError, match="collision"):
        extend_finite_action(G, ("x1", "y2"), [
            [["1", "0"], ["0", "1"]], [["0", "1"], ["1", "0"]]])
