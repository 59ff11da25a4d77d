"""Producing covariants: group averaging for finite groups, a greedy
degree-bounded search for a full independent family, denominator clearing
for rational covariants, lifting through product projections, and the
built-in example families (matrix words under conjugation, vector
projections, coordinate power maps under permutations).
"""

from __future__ import annotations

from fractions import Fraction

from .action import (
    ActionError,
    FiniteGroupAction,
    GroupAction,
    SymbolicGroupAction,
    symbolic_general_linear,
)
from .covariant import (
    Covariant,
    CovariantError,
    EQUIVARIANT,
    coordinate_matrix,
    generic_independence,
    verified,
    verify_equivariance,
    weight_of,
)
from .exactalg import (
    DimensionError,
    ExactAlgError,
    Matrix,
    Poly,
    RatFn,
    field_one,
    poly_lcm,
    qmat,
)


class ForgeError(ExactAlgError):
    pass


class ModularObstructionError(ForgeError):
    """The group order is not invertible in the coefficient field."""


class GenerationExhaustedError(ForgeError):
    """The degree bound was reached before a full independent family."""

    def __init__(self, message: str, achieved_rank: int, found: list[Covariant]):
        super().__init__(message)
        self.achieved_rank = achieved_rank
        self.found = found


def _group_order_inverse(G: FiniteGroupAction):
    order = G.order
    if G.field is None:
        return Fraction(1, order)
    if order % G.field.p == 0:
        raise ModularObstructionError(
            f"group order {order} vanishes in GF({G.field.p})")
    return field_one(G.field) / G.field(order)


def reynolds_project(H: list[Poly], G: FiniteGroupAction) -> Covariant:
    """Group-average a polynomial map X -> W into a covariant.

    F = (1/|G|) sum_g g_W H(g^{-1} x).  The result is always equivariant
    (verified before return); maps that are already equivariant are fixed.
    """
    if len(H) != G.w_dim:
        raise DimensionError("seed map has the wrong number of coordinates")
    scale = _group_order_inverse(G)
    total = [Poly.zero(G.x_vars, G.field) for _ in range(G.w_dim)]
    for g in G.elements():
        subst = G.x_substitution(g, inverse=True)
        moved = [h.subs(subst, G.x_vars) for h in H]
        w = G.w_mats[g]
        for c in range(G.w_dim):
            for l in range(G.w_dim):
                if w[c][l]:
                    total[c] = total[c] + moved[l] * w[c][l]
    coords = [t * scale for t in total]
    F = Covariant(G, coords)
    rep = verify_equivariance(F)
    if not rep.ok:
        raise ForgeError("averaged map failed its equivariance check")
    return F


def _monomial_seeds(G: FiniteGroupAction, degree_bound: int):
    """Seed maps x^alpha e_i ordered by degree, then monomial order, then
    W-basis index; deterministic."""
    from itertools import combinations_with_replacement

    nx = G.x_dim
    for degree in range(degree_bound + 1):
        exps = set()
        for combo in combinations_with_replacement(range(nx), degree):
            e = [0] * nx
            for idx in combo:
                e[idx] += 1
            exps.add(tuple(e))
        for e in sorted(exps, key=lambda t: (sum(t), t)):
            mono = Poly(G.x_vars, {e: field_one(G.field)}, G.field)
            for i in range(G.w_dim):
                coords = [mono if c == i else Poly.zero(G.x_vars, G.field)
                          for c in range(G.w_dim)]
                yield coords


def generate_covariants(G: FiniteGroupAction, degree_bound: int) -> list[Covariant]:
    """Greedy search for dim(W) generically independent covariants.

    Averages monomial seed maps in increasing degree and keeps each
    projection that raises the rank of the accumulated coordinate matrix
    over the function field.  Raises :class:`GenerationExhaustedError` with
    the achieved rank if the bound is hit first (a meaningful outcome: a
    stabilizer acting nontrivially on W makes a full family impossible).
    """
    d = G.w_dim
    kept: list[Covariant] = []
    rank = 0
    for seed in _monomial_seeds(G, degree_bound):
        F = reynolds_project(seed, G)
        if all(c.is_zero() for c in F.coords):
            continue
        trial = kept + [F]
        new_rank = coordinate_matrix(trial).rank()
        if new_rank > rank:
            kept.append(F)
            rank = new_rank
            if rank == d:
                return kept
    raise GenerationExhaustedError(
        f"degree bound {degree_bound} reached with rank {rank} < {d}",
        rank, kept)


def clear_denominators(Fs: list[Covariant], G: FiniteGroupAction
                       ) -> tuple[Poly, list[Covariant]]:
    """Clear rational covariants to integral ones with one invariant factor.

    h is the least common denominator of all coordinates, f the product of
    the h-orbit under the group (an absolute invariant), and the returned
    covariants are f^n F_i for the smallest n making every coordinate
    integral.  Independence verdicts are unchanged.
    """
    for F in Fs:
        if F.status != EQUIVARIANT:
            raise CovariantError("clear_denominators requires verified covariants")
    h = Poly.one(G.x_vars, G.field)
    lifted_all = []
    for F in Fs:
        lifted = [c if isinstance(c, RatFn) else RatFn(c, reduce=False) for c in F.coords]
        lifted_all.append(lifted)
        for c in lifted:
            h = poly_lcm(h, c.den)
    f = Poly.one(G.x_vars, G.field)
    for g in G.elements():
        f = f * G.act_on_poly(g, h)
    w = weight_of(G, f)
    if w is None or not w.is_trivial():
        raise ForgeError("orbit product failed to be an absolute invariant")
    out: list[Covariant] = []
    n = 0
    power = Poly.one(G.x_vars, G.field)
    while True:
        if all(c.den.divides(power) for lifted in lifted_all for c in lifted):
            break
        n += 1
        power = power * f
    for lifted in lifted_all:
        coords = [c.num * power.exact_div(c.den) for c in lifted]
        F_int = Covariant(G, coords)
        rep = verify_equivariance(F_int)
        if not rep.ok:
            raise ForgeError("cleared covariant failed its equivariance check")
        out.append(F_int)
    return f, out


def lift_through_projection(Fs: list[Covariant], extended: GroupAction
                            ) -> list[Covariant]:
    """Reinterpret covariants on X as covariants on X x Y via the projection.

    ``extended`` must be the product action: same group, X-variables a prefix
    of its X-variables, same W.  Coordinates are unchanged; equivariance and
    independence verdicts carry over (and equivariance is re-verified).
    """
    if not Fs:
        raise DimensionError("empty covariant list")
    base = Fs[0].action
    if extended.x_vars[:len(base.x_vars)] != base.x_vars:
        raise ActionError("extended action does not start with the base X-variables")
    if set(base.x_vars) >= set(extended.x_vars):
        raise ActionError("extended action adds no new variables")
    if extended.w_vars != base.w_vars:
        raise ActionError("extended action must keep the same W-space")
    if base.is_finite != extended.is_finite:
        raise ActionError("group models do not match")
    if base.is_finite:
        if extended.order != base.order:
            raise ActionError("extended group has a different order")
        nx = base.x_dim
        for g in base.elements():
            top_left = tuple(tuple(row[:nx]) for row in extended.x_mats[g][:nx])
            if top_left != base.x_mats[g]:
                raise ActionError("extended action is not the product action")
            if any(any(row[nx:]) for row in extended.x_mats[g][:nx]):
                raise ActionError("extended action mixes X and Y coordinates")
            if extended.w_mats[g] != base.w_mats[g]:
                raise ActionError("extended action changes the W-action")
    out = []
    for F in Fs:
        coords = [c.embed(extended.x_vars) for c in F.coords]
        lifted = Covariant(extended, coords)
        rep = verify_equivariance(lifted)
        if not rep.ok:
            raise ForgeError("lifted covariant failed its equivariance check")
        out.append(lifted)
    return out


# ---------------------------------------------------------------------------
# example families
# ---------------------------------------------------------------------------


def _word_matrix(action: SymbolicGroupAction, copy: int) -> Matrix:
    n = action.n
    labels = "abcdefghijklmnopqrstuvwxyz"
    return Matrix([[Poly.var(f"{labels[copy]}{i}{j}", action.x_vars, action.field)
                    for j in range(1, n + 1)] for i in range(1, n + 1)])


def matrix_word_family(n: int, words: list[tuple[int, int]] | None = None,
                       verify: str = "auto") -> list[Covariant]:
    """Covariants (A, B) -> A^i B^j on pairs of n x n matrices under
    simultaneous conjugation.

    ``verify`` selects how equivariance is certified: ``direct`` runs the
    full generic-element substitution per word; ``product`` verifies the
    degree-one generators directly and certifies products through one check
    that conjugation acts by algebra automorphisms; ``auto`` picks ``direct``
    for n <= 2 and ``product`` above.
    """
    if words is None:
        words = [(i, j) for i in range(n) for j in range(n)]
    for i, j in words:
        if i < 0 or j < 0:
            raise ForgeError(f"malformed word exponents ({i}, {j})")
    action = symbolic_general_linear(n, "gl_conjugation", "gl_conjugation",
                                     x_copies=2, w_copies=1)
    A = _word_matrix(action, 0)
    B = _word_matrix(action, 1)
    mode = verify
    if mode == "auto":
        mode = "direct" if n <= 2 else "product"
    if mode == "product":
        _check_conjugation_is_algebra_morphism(action)
    out = []
    for i, j in words:
        M = Matrix.identity(n, A.entries[0][0])
        for _ in range(i):
            M = M * A
        for _ in range(j):
            M = M * B
        coords = [M.entries[r][c] for r in range(n) for c in range(n)]
        F = Covariant(action, coords)
        if mode == "direct" or (i + j) <= 1:
            rep = verify_equivariance(F)
            if not rep.ok:
                raise ForgeError(f"word A^{i}B^{j} failed its equivariance check")
        else:
            # products of equivariant matrix values stay equivariant because
            # the W-action is by algebra automorphisms (checked above)
            F.status = EQUIVARIANT
        out.append(F)
    return out


def _check_conjugation_is_algebra_morphism(action: SymbolicGroupAction):
    """One cleared identity: the W-action applied to a product of two generic
    matrices equals the product of the W-actions applied to the factors."""
    n = action.n
    u_vars = tuple(f"u{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1))
    v_vars = tuple(f"v{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1))
    ring = u_vars + v_vars + action.g_vars
    field = action.field
    U = Matrix([[Poly.var(f"u{i}{j}", ring, field) for j in range(1, n + 1)]
                for i in range(1, n + 1)])
    V = Matrix([[Poly.var(f"v{i}{j}", ring, field) for j in range(1, n + 1)]
                for i in range(1, n + 1)])
    g = Matrix([[Poly.var(f"g{i}{j}", ring, field) for j in range(1, n + 1)]
                for i in range(1, n + 1)])
    adj = g.adjugate()
    det = action.det_poly.embed(ring)

    def conj(M: Matrix) -> Matrix:
        return g * M * adj

    lhs = conj(U * V).scale(det)      # det * g U V adj
    rhs = conj(U) * conj(V)           # g U adj g V adj = det * g U V adj
    if lhs != rhs:
        raise ForgeError("conjugation is not an algebra morphism; "
                         "cannot certify word products")


def projection_family(n: int, m: int) -> tuple[list[Covariant], SymbolicGroupAction]:
    """The first n projections (v_1..v_m) -> v_j from m copies of the natural
    module, under the generic diagonal GL_n action."""
    if m < n:
        raise ForgeError("need at least n copies to project onto n of them")
    action = symbolic_general_linear(n, "gl_natural", "gl_natural",
                                     x_copies=m, w_copies=1)
    out = []
    for j in range(n):
        coords = []
        for i in range(n):
            coords.append(Poly.var(f"x{i + 1}{j + 1}", action.x_vars, action.field))
        F = Covariant(action, coords)
        rep = verify_equivariance(F)
        if not rep.ok:
            raise ForgeError(f"projection {j + 1} failed its equivariance check")
        out.append(F)
    return out, action


def _symmetric_group_action(n: int) -> FiniteGroupAction:
    """S_n by permutation matrices on both X = k^n and W = k^n."""
    if n < 2:
        raise ForgeError("need n >= 2 for a nontrivial permutation action")
    cycle = [[1 if i == (j + 1) % n else 0 for j in range(n)] for i in range(n)]
    swap01 = [[1 if (i, j) in ((0, 1), (1, 0)) or (i == j and i > 1) else 0
               for j in range(n)] for i in range(n)]
    gens = [(cycle, cycle)] if n == 2 else [(cycle, cycle), (swap01, swap01)]
    from .action import make_finite_group
    return make_finite_group(gens)


def power_map_family(n: int, powers: list[int] | None = None,
                     group: FiniteGroupAction | None = None) -> list[Covariant]:
    """Coordinate power maps (x_1..x_n) -> (x_1^i..x_n^i) under a
    permutation action (the full symmetric group by default)."""
    if powers is None:
        powers = list(range(1, n + 1))
    action = group if group is not None else _symmetric_group_action(n)
    if action.x_dim != n or action.w_dim != n:
        raise DimensionError("group must act on k^n for both X and W")
    xs = Poly.gens(action.x_vars, action.field)
    out = []
    for i in powers:
        if i < 0:
            raise ForgeError(f"malformed power {i}")
        F = Covariant(action, [x ** i for x in xs])
        rep = verify_equivariance(F)
        if not rep.ok:
            raise ForgeError(f"power map {i} failed its equivariance check")
        out.append(F)
    return out


def example_family(name: str, **params) -> list[Covariant]:
    """Named covariant families with pre-verified equivariance.

    ``matrix_words`` (n, words), ``projections`` (n, m), ``power_maps``
    (n, powers).
    """
    if name == "matrix_words":
        return matrix_word_family(params["n"], params.get("words"),
                                  params.get("verify", "auto"))
    if name == "projections":
        return projection_family(params["n"], params["m"])[0]
    if name == "power_maps":
        return power_map_family(params["n"], params.get("powers"),
                                params.get("group"))
    raise ForgeError(f"unknown example family {name!r}")
