"""Covariant production: averaging, greedy generation, clearing, lifting,
and the built-in families."""

import random
from fractions import Fraction

import pytest

from covar.action import extend_finite_action, make_finite_group
from covar.covariant import (
    Covariant,
    det_relative_invariant,
    evaluate_matrix,
    generic_independence,
    verified,
)
from covar.exactalg import Matrix, Poly, PrimeField, RatFn, qmat_rank
from covar.forge import (
    GenerationExhaustedError,
    ModularObstructionError,
    clear_denominators,
    example_family,
    generate_covariants,
    lift_through_projection,
    matrix_word_family,
    power_map_family,
    projection_family,
    reynolds_project,
    _symmetric_group_action,
)

from conftest import SWAP


def test_average_of_non_equivariant_seed(s2):
    x1, x2 = Poly.gens(s2.x_vars)
    F = reynolds_project([x1**2, Poly.zero(s2.x_vars)], s2)
    half = Fraction(1, 2)
    assert F.coords[0] == x1**2 * half
    assert F.coords[1] == x2**2 * half
    assert F.status == "equivariant"


def test_average_fixes_equivariant_maps(s3):
    xs = Poly.gens(s3.x_vars)
    F = reynolds_project(list(xs), s3)
    assert F.poly_coords() == list(xs)


def test_average_of_constant_seed(s2):
    one = Poly.one(s2.x_vars)
    zero = Poly.zero(s2.x_vars)
    F = reynolds_project([one, zero], s2)
    half = Fraction(1, 2)
    assert F.coords[0] == one * half and F.coords[1] == one * half


def random_seed_map(G, rng):
    coords = []
    for _ in range(G.w_dim):
        terms = {}
        for _ in range(rng.randint(1, 3)):
            exps = tuple(rng.randint(0, 2) for _ in G.x_vars)
            c = Fraction(rng.randint(-5, 5))
            if c:
                terms[exps] = terms.get(exps, Fraction(0)) + c
        coords.append(Poly(G.x_vars, {e: c for e, c in terms.items() if c}))
    return coords


@pytest.mark.parametrize("group_fixture", ["s2", "s3"])
def test_average_is_idempotent_and_linear(group_fixture, request):
    G = request.getfixturevalue(group_fixture)
    rng = random.Random(7)
    for _ in range(20):
        H1 = random_seed_map(G, rng)
        H2 = random_seed_map(G, rng)
        P1 = reynolds_project(H1, G)
        P2 = reynolds_project(H2, G)
        again = reynolds_project(P1.poly_coords(), G)
        assert again.poly_coords() == P1.poly_coords()
        summed = reynolds_project([a + 3 * b for a, b in zip(H1, H2)], G)
        expect = [a + 3 * b for a, b in zip(P1.poly_coords(), P2.poly_coords())]
        assert summed.poly_coords() == expect


def test_generate_s2_bound_two(s2):
    fam = generate_covariants(s2, 2)
    assert len(fam) == 2
    ri = det_relative_invariant(fam)
    assert not ri.is_zero
    assert generic_independence(fam).ok


def test_generate_s3_bound_three(s3):
    fam = generate_covariants(s3, 3)
    assert len(fam) == 3
    assert not det_relative_invariant(fam).is_zero


def test_generate_is_deterministic(s2):
    a = generate_covariants(s2, 2)
    b = generate_covariants(s2, 2)
    for F, G2 in zip(a, b):
        assert F.same_coords(G2)


def test_generate_trivial_and_sign_modules():
    pm_triv = make_finite_group([([["-1"]], [["1"]])],
                                x_vars=("x1",), w_vars=("w1",))
    fam = generate_covariants(pm_triv, 2)
    assert len(fam) == 1 and fam[0].coords[0].is_constant()
    pm_sign = make_finite_group([([["-1"]], [["-1"]])],
                                x_vars=("x1",), w_vars=("w1",))
    fam2 = generate_covariants(pm_sign, 1)
    assert fam2[0].coords[0] == Poly.var("x1", ("x1",))


def test_generate_reports_achieved_rank_on_failure():
    pm_sign = make_finite_group([([["-1"]], [["-1"]])],
                                x_vars=("x1",), w_vars=("w1",))
    with pytest.raises(GenerationExhaustedError) as info:
        generate_covariants(pm_sign, 0)  # degree 0 cannot be sign-equivariant
    assert info.value.achieved_rank == 0


def test_modular_obstruction():
    F2 = PrimeField(2)
    G = make_finite_group([(SWAP, SWAP)], field=F2)
    with pytest.raises(ModularObstructionError):
        reynolds_project([Poly.var("x1", G.x_vars, F2),
                          Poly.zero(G.x_vars, F2)], G)


def test_generate_over_odd_prime_field():
    F5 = PrimeField(5)
    G = make_finite_group([(SWAP, SWAP)], field=F5)
    fam = generate_covariants(G, 2)
    assert len(fam) == 2
    assert not det_relative_invariant(fam).is_zero


def test_clear_denominators_swap_example(s2):
    x1, x2 = Poly.gens(s2.x_vars)
    den = x1 + x2
    F = verified(s2, [RatFn(x1, den), RatFn(x2, den)])
    f, cleared = clear_denominators([F], s2)
    assert f == den**2
    assert cleared[0].coords[0] == den * x1
    assert cleared[0].coords[1] == den * x2
    from covar.covariant import weight_of

    assert weight_of(s2, f).is_trivial()


def test_clear_denominators_integral_input(s2, vandermonde_pair):
    f, out = clear_denominators(vandermonde_pair, s2)
    assert f == 1
    for a, b in zip(out, vandermonde_pair):
        assert a.same_coords(b)


def test_clear_denominators_coprime_pair(s2):
    x1, x2 = Poly.gens(s2.x_vars)
    F1 = verified(s2, [RatFn(x1, x1 + x2), RatFn(x2, x1 + x2)])
    F2 = verified(s2, [RatFn(x1**2, x1 * x2), RatFn(x2**2, x1 * x2)])
    f, cleared = clear_denominators([F1, F2], s2)
    # one shared invariant factor clears both denominators
    for F in cleared:
        assert not F.is_rational
    before = generic_independence([F1, F2])
    after = generic_independence(cleared)
    assert before.data["verdict"] == after.data["verdict"]


def test_clear_preserves_independence_verdicts(s2):
    x1, x2 = Poly.gens(s2.x_vars)
    den = x1 + x2
    fam_one = [verified(s2, [RatFn(x1, den), RatFn(x2, den)])]
    fam_two = fam_one + [verified(s2, [RatFn(x1**2, den**2), RatFn(x2**2, den**2)])]
    dependent = fam_one + [verified(s2, [RatFn(x1 * x1 * 2, den * x1),
                                         RatFn(x2 * x1 * 2, den * x1)])]
    for fam in (fam_one, fam_two, dependent):
        before = generic_independence(fam)
        f, cleared = clear_denominators(fam, s2)
        after = generic_independence(cleared)
        assert before.data["verdict"] == after.data["verdict"]


def test_lift_through_projection(s2, vandermonde_pair):
    ext = extend_finite_action(s2, ("y1", "y2"),
                               [[["1", "0"], ["0", "1"]], [["0", "1"], ["1", "0"]]])
    lifted = lift_through_projection(vandermonde_pair, ext)
    for orig, new in zip(vandermonde_pair, lifted):
        assert new.coords[0].vars == ext.x_vars
        assert new.status == "equivariant"
        assert set(new.coords[0].support_vars()) <= set(s2.x_vars)
    assert generic_independence(lifted).ok


def test_lift_then_build_uses_only_first_factor(s2, vandermonde_pair):
    from covar.noname import build_isomorphism

    ext = extend_finite_action(s2, ("y1", "y2"),
                               [[["1", "0"], ["0", "1"]], [["0", "1"], ["1", "0"]]])
    lifted = lift_through_projection(vandermonde_pair, ext)
    m = build_isomorphism(lifted)
    for gen in m.generators():
        assert not (gen.support_vars() & {"y1", "y2"})


def test_lift_rejects_non_product_action(s2, vandermonde_pair):
    other = make_finite_group([(SWAP, SWAP)], x_vars=("y1", "y2"))
    with pytest.raises(Exception):
        lift_through_projection(vandermonde_pair, other)


def test_lift_word_covariants_to_more_copies():
    """Word covariants on pairs of matrices stay independent when viewed on
    longer tuples through the projection onto the first two factors."""
    from covar.action import symbolic_general_linear

    fam = matrix_word_family(2, [(0, 0), (1, 0), (0, 1), (1, 1)])
    bigger = symbolic_general_linear(2, "gl_conjugation", "gl_conjugation",
                                     x_copies=3, w_copies=1)
    lifted = lift_through_projection(fam, bigger)
    assert lifted[0].action is bigger
    for F in lifted:
        assert F.status == "equivariant"
        assert not (set().union(*(c.support_vars() for c in F.coords))
                    & {v for v in bigger.x_vars if v.startswith("c")})
    assert generic_independence(lifted).ok


def test_word_family_sizes_and_independence():
    fam = matrix_word_family(2)
    assert len(fam) == 4
    assert generic_independence(fam).ok
    for F in fam:
        assert F.status == "equivariant"


def test_word_family_rejects_bad_words():
    with pytest.raises(Exception):
        matrix_word_family(2, [(0, -1)])


def test_word_family_witness_evaluation_n2_n3():
    for n in (2, 3):
        fam = matrix_word_family(n)
        point = {}
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                point[f"a{i}{j}"] = Fraction(i) if i == j else Fraction(0)
                point[f"b{i}{j}"] = Fraction(1) if i == (j % n) + 1 else Fraction(0)
        rows = evaluate_matrix(fam, point)
        assert qmat_rank(rows) == n * n


def test_word_family_direct_vs_product_verification():
    direct = matrix_word_family(2, verify="direct")
    threaded = matrix_word_family(2, verify="product")
    for a, b in zip(direct, threaded):
        assert a.same_coords(b)
        assert a.status == b.status == "equivariant"


def test_projection_family_shape():
    fam, action = projection_family(3, 5)
    assert len(fam) == 3 and action.x_dim == 15
    assert generic_independence(fam).ok


def test_power_map_family_defaults():
    fam = power_map_family(3)
    xs = Poly.gens(fam[0].action.x_vars)
    assert fam[0].poly_coords() == [x**1 for x in xs]
    assert fam[2].poly_coords() == [x**3 for x in xs]
    assert generic_independence(fam).ok


def test_example_family_dispatch():
    assert len(example_family("matrix_words", n=2)) == 4
    assert len(example_family("projections", n=3, m=5)) == 3
    assert len(example_family("power_maps", n=2)) == 2
    with pytest.raises(Exception, match="unknown"):
        example_family("mystery", n=2)
