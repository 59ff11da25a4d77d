"""Covariants: W-valued polynomial (or rational) maps on the X-space,
equivariance verification, the covariant coordinate matrix, determinant
relative invariants with their weights, and generic-independence testing
over the function field.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field

from .action import Character, GroupAction, det_w_inverse_character
from .exactalg import (
    DimensionError,
    ExactAlgError,
    Matrix,
    Poly,
    RatFn,
    field_one,
    lift_coeff,
    qmat_det,
    qmat_rank,
)
from .report import Report, Stopwatch


class CovariantError(ExactAlgError):
    pass


class UnverifiedCovariantError(CovariantError):
    """An operation required covariants whose equivariance is verified."""


class DependentCovariantsError(CovariantError):
    """The covariant family is generically dependent where independence is
    required."""


UNCHECKED = "unchecked"
EQUIVARIANT = "equivariant"
REFUTED = "refuted"


class Covariant:
    """A W-valued map on the X-space stored as a coordinate vector.

    ``coords[i]`` is the coefficient of the i-th W-basis vector, a polynomial
    (integral covariant) or rational function (rational covariant) in the
    X-variables.  ``status`` is one of ``unchecked`` / ``equivariant`` /
    ``refuted`` and is only promoted by :func:`verify_equivariance`.
    """

    def __init__(self, action: GroupAction, coords, status: str = UNCHECKED,
                 refutation: dict | None = None):
        self.action = action
        fixed = []
        for c in coords:
            if not isinstance(c, (Poly, RatFn)):
                raise CovariantError("coordinates must be Poly or RatFn")
            if set(c.support_vars()) - set(action.x_vars):
                raise DimensionError("coordinate uses variables outside the X-space")
            if tuple(c.vars) != tuple(action.x_vars):
                c = c.embed(action.x_vars) if set(c.vars) <= set(action.x_vars) \
                    else _restrict(c, action.x_vars)
            fixed.append(c)
        if len(fixed) != action.w_dim:
            raise DimensionError(
                f"covariant has {len(fixed)} coordinates, W has dimension {action.w_dim}")
        self.coords = fixed
        self.status = status
        self.refutation = refutation

    @property
    def is_rational(self) -> bool:
        return any(isinstance(c, RatFn) and not c.is_poly() for c in self.coords)

    def poly_coords(self) -> list[Poly]:
        out = []
        for c in self.coords:
            out.append(c.as_poly() if isinstance(c, RatFn) else c)
        return out

    def same_coords(self, other: "Covariant") -> bool:
        return all(a == b for a, b in zip(self.coords, other.coords))

    def evaluate(self, point) -> list:
        return [c.eval(point) for c in self.coords]

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"

    def __repr__(self):
        return f"Covariant({self})"


def _restrict(value, target_vars):
    """Project a Poly/RatFn whose extra variables are unused onto target_vars."""
    if isinstance(value, RatFn):
        return RatFn(_restrict(value.num, target_vars),
                     _restrict(value.den, target_vars), reduce=False)
    terms = {}
    pos = [value.vars.index(v) for v in target_vars]
    for exps, coeff in value.terms.items():
        terms[tuple(exps[p] for p in pos)] = coeff
    return Poly(target_vars, terms, value.field)


# ---------------------------------------------------------------------------
# witness point search
# ---------------------------------------------------------------------------

SPIRAL_MAX_VARS = 6
SPIRAL_MAX_SHELL = 3


def candidate_points(n_vars: int, rng: random.Random):
    """Candidate integer points: smallest first (full shells in low
    dimension), then seeded random draws of growing range.  Every consumer
    confirms candidates exactly, so the stream only affects which witness is
    found, not correctness."""
    if n_vars <= SPIRAL_MAX_VARS:
        for shell in range(SPIRAL_MAX_SHELL + 1):
            for point in itertools.product(range(-shell, shell + 1), repeat=n_vars):
                if max((abs(c) for c in point), default=0) == shell:
                    yield point
    for bound in (9, 99, 10**6):
        for _ in range(80):
            yield tuple(rng.randint(-bound, bound) for _ in range(n_vars))


def _point_dict(vars, point, field):
    return {v: lift_coeff(int(c), field) for v, c in zip(vars, point)}


# ---------------------------------------------------------------------------
# equivariance
# ---------------------------------------------------------------------------


def _common_denominator(F: Covariant) -> tuple[list[Poly], Poly]:
    """Write the coordinates over one denominator: coords = nums / den."""
    from .exactalg import poly_lcm

    den = Poly.one(F.action.x_vars, F.action.field)
    lifted = [c if isinstance(c, RatFn) else RatFn(c, reduce=False) for c in F.coords]
    for c in lifted:
        den = poly_lcm(den, c.den)
    nums = [c.num * den.exact_div(c.den) for c in lifted]
    return nums, den


def _finite_equivariance_witness(F: Covariant) -> dict | None:
    """None if F(gx) = g_W F(x) for every element, else a witness dict."""
    action = F.action
    nums, den = _common_denominator(F)
    for i in action.elements():
        subst = action.x_substitution(i, inverse=False)
        lhs_nums = [p.subs(subst, action.x_vars) for p in nums]
        lhs_den = den.subs(subst, action.x_vars)
        w = action.w_mats[i]
        # F(gx)_c = lhs_nums[c]/lhs_den ; (g_W F(x))_c = sum w[c][l] nums[l] / den
        for c in range(action.w_dim):
            rhs = Poly.zero(action.x_vars, action.field)
            for l in range(action.w_dim):
                if w[c][l]:
                    rhs = rhs + nums[l] * w[c][l]
            if lhs_nums[c] * den != rhs * lhs_den:
                point = _separating_point(lhs_nums[c], lhs_den, rhs, den, action)
                return {"element": i, "coordinate": c, "point": point}
    return None


def _separating_point(lnum, lden, rnum, rden, action) -> str | None:
    rng = random.Random(17)
    for point in candidate_points(len(action.x_vars), rng):
        vals = _point_dict(action.x_vars, point, action.field)
        dl, dr = lden.eval(vals), rden.eval(vals)
        if not dl or not dr:
            continue
        if lnum.eval(vals) * dr != rnum.eval(vals) * dl:
            return str(dict(zip(action.x_vars, point)))
    return None


def _symbolic_equivariance_witness(F: Covariant) -> dict | None:
    """Cleared polynomial identity F(gx) det^{p_w} ... = g_W F(x) det^{k}."""
    action = F.action
    nums, den = _common_denominator(F)
    ring = action.xg_vars
    det = action.det_poly.embed(ring)
    num_subs = []
    for p in nums:
        n, k = action.act_cleared(p, "x", inverse=False, out_vars=ring)
        num_subs.append((n, k))
    den_sub, k_den = action.act_cleared(den, "x", inverse=False, out_vars=ring)
    den_emb = den.embed(ring)
    nums_emb = [p.embed(ring) for p in nums]
    w = action.w_num
    pw = action.w_detpow
    for c in range(action.w_dim):
        rhs = Poly.zero(ring, action.field)
        for l in range(action.w_dim):
            e = w.entries[c][l]
            if e:
                rhs = rhs + e.embed(ring) * nums_emb[l]
        ln, lk = num_subs[c]
        # ln/det^lk / (den_sub/det^k_den) == rhs/(det^pw * den_emb)
        lhs_poly = ln * det ** k_den * det ** pw * den_emb
        rhs_poly = rhs * den_sub * det ** lk
        if lhs_poly != rhs_poly:
            return {"element": "generic", "coordinate": c,
                    "point": _symbolic_separating_point(F, c)}
    return None


def _symbolic_separating_point(F: Covariant, coord: int) -> str | None:
    action = F.action
    rng = random.Random(23)
    n = action.n
    for flat in candidate_points(n * n, rng):
        mat = tuple(tuple(flat[i * n + j] for j in range(n)) for i in range(n))
        try:
            mx, mw = action.specialize(mat)
        except Exception:
            continue
        for point in itertools.islice(candidate_points(action.x_dim, rng), 40):
            vals = _point_dict(action.x_vars, point, action.field)
            try:
                fx = [c.eval(vals) for c in F.coords]
                gx_point = {v: sum(mx.entries[k][l].constant_value() * vals[action.x_vars[l]]
                                   for l in range(action.x_dim))
                            for k, v in enumerate(action.x_vars)}
                f_gx = [c.eval(gx_point) for c in F.coords]
            except ZeroDivisionError:
                continue
            rhs = sum(mw.entries[coord][l].constant_value() * fx[l]
                      for l in range(action.w_dim))
            if f_gx[coord] != rhs:
                return f"g={mat}, x={dict(zip(action.x_vars, point))}"
    return None


def verify_equivariance(F: Covariant) -> Report:
    """Exact identity check of F(gx) = g_W F(x); promotes F.status."""
    report = Report("equivariance")
    with Stopwatch(report):
        if F.action.is_finite:
            witness = _finite_equivariance_witness(F)
        else:
            witness = _symbolic_equivariance_witness(F)
        if witness is None:
            F.status = EQUIVARIANT
            kind = ("all %d elements" % F.action.order) if F.action.is_finite \
                else "the generic element"
            report.add("equivariant", True, f"identity holds for {kind}")
        else:
            F.status = REFUTED
            F.refutation = witness
            report.add("equivariant", False, "equivariance refuted", witness)
        report.data["status"] = F.status
    return report


def verified(action: GroupAction, coords, expect: bool = True) -> Covariant:
    """Build a covariant and verify it; raise if refuted and expect=True."""
    F = Covariant(action, coords)
    rep = verify_equivariance(F)
    if expect and not rep.ok:
        raise CovariantError(f"covariant is not equivariant: {rep.failed_checks()[0].witness}")
    return F


# ---------------------------------------------------------------------------
# coordinate matrices and the determinant relative invariant
# ---------------------------------------------------------------------------


def coordinate_matrix(Fs: list[Covariant]) -> Matrix:
    """d x e matrix whose column j holds the coordinates of Fs[j]."""
    if not Fs:
        raise DimensionError("empty covariant list")
    action = Fs[0].action
    for F in Fs:
        if F.action is not action:
            raise CovariantError("covariants do not share one action")
    rational = any(F.is_rational for F in Fs)
    cols = []
    for F in Fs:
        if rational:
            cols.append([c if isinstance(c, RatFn) else RatFn(c, reduce=False)
                         for c in F.coords])
        else:
            cols.append(F.poly_coords())
    return Matrix([[cols[j][i] for j in range(len(Fs))]
                   for i in range(action.w_dim)])


def covariant_matrix(Fs: list[Covariant]) -> Matrix:
    """The square coordinate matrix (count must equal dim W)."""
    action = Fs[0].action
    if len(Fs) != action.w_dim:
        raise DimensionError(
            f"need exactly {action.w_dim} covariants, got {len(Fs)}")
    return coordinate_matrix(Fs)


@dataclass
class RelativeInvariant:
    """A polynomial f with g.f = weight(g) f, exactly."""

    f: Poly | RatFn
    weight: Character
    action: GroupAction = dc_field(repr=False, default=None)

    @property
    def is_zero(self) -> bool:
        return self.f.is_zero()

    def verify(self) -> bool:
        return _is_relative_invariant(self.action, self.f, self.weight)


def _is_relative_invariant(action: GroupAction, f: Poly | RatFn,
                           weight: Character) -> bool:
    if f.is_zero():
        return True
    if action.is_finite:
        for i in action.elements():
            if action.act_on_poly(i, f) != f * weight.value(i):
                return False
        return True
    if isinstance(f, RatFn):
        moved = action.act_on_poly(f, "x")
        return moved == f.embed(moved.vars) * weight.ratfn.embed(moved.vars)
    num, k = action.act_cleared(f, "x")
    ring = num.vars
    det = action.det_poly.embed(ring)
    theta = weight.ratfn.embed(ring)
    # num/det^k == theta * f
    return num * theta.den == f.embed(ring) * theta.num * det ** k


def weight_of(action: GroupAction, f: Poly) -> Character | None:
    """The character theta with g.f = theta(g) f, or None if f is not a
    relative invariant."""
    if f.is_zero():
        return Character.trivial(action)
    if action.is_finite:
        values = []
        for i in action.elements():
            moved = action.act_on_poly(i, f)
            if moved.terms.keys() != f.terms.keys():
                return None
            exps, coeff = f.leading()
            theta = moved.terms[exps] / coeff
            if moved != f * theta:
                return None
            values.append(theta)
        return Character(action, table=values)
    moved = action.act_on_poly(f, "x")
    ring = moved.vars
    theta = moved / RatFn(f.embed(ring), reduce=False)
    if set(theta.support_vars()) - set(action.g_vars):
        return None
    return Character(action, ratfn=_restrict(theta, action.g_vars))


def det_relative_invariant(Fs: list[Covariant]) -> RelativeInvariant:
    """Determinant of the covariant matrix with its weight g -> det(g_W)^{-1}.

    Requires every covariant verified equivariant.  A zero determinant is a
    legal outcome (the family is generically dependent); the caller can test
    ``result.is_zero``.
    """
    for F in Fs:
        if F.status != EQUIVARIANT:
            raise UnverifiedCovariantError(
                "det_relative_invariant requires verified covariants")
    action = Fs[0].action
    mat = covariant_matrix(Fs)
    f = mat.det()
    if isinstance(f, RatFn) and f.is_poly():
        f = f.as_poly()
    weight = det_w_inverse_character(action)
    if not _is_relative_invariant(action, f, weight):
        raise CovariantError("determinant failed its weight identity")
    return RelativeInvariant(f, weight, action)


# ---------------------------------------------------------------------------
# generic independence
# ---------------------------------------------------------------------------


def evaluate_matrix(Fs: list[Covariant], point: dict) -> list[list]:
    """Evaluate the coordinate matrix at a point (rows = W basis)."""
    cols = [F.evaluate(point) for F in Fs]
    return [[cols[j][i] for j in range(len(Fs))] for i in range(len(cols[0]))]


def generic_independence(Fs: list[Covariant], seed: int = 0) -> Report:
    """Rank of the coordinate matrix over the function field.

    If the rank equals the family size, a rational witness point with
    exactly confirmed independent values is reported as well.
    """
    report = Report("generic independence")
    with Stopwatch(report):
        action = Fs[0].action
        e = len(Fs)
        d = action.w_dim
        report.data["family_size"] = e
        report.data["w_dim"] = d
        mat = coordinate_matrix(Fs)
        if any(isinstance(x, RatFn) for row in mat.entries for x in row):
            mat = mat.clear_row_denominators()
        rank = mat.rank()
        report.data["rank"] = rank
        if e > d:
            report.data["verdict"] = "dependent"
            report.add("independent", False,
                       f"{e} covariants into a {d}-dimensional module are "
                       f"automatically dependent (rank {rank} < {e})")
            return report
        if rank < e:
            report.data["verdict"] = "dependent"
            report.add("independent", False, f"rank {rank} < family size {e}")
            return report
        report.data["verdict"] = "independent"
        witness = _independence_witness(Fs, seed)
        if witness is None:
            report.add("independent", True,
                       f"rank {rank} = family size; no rational witness found "
                       "in the search budget")
        else:
            point, minor = witness
            report.data["witness_point"] = {v: str(c) for v, c in point.items()}
            if minor is not None:
                report.data["witness_minor"] = str(minor)
            report.add("independent", True,
                       f"rank {rank} = family size; witness point confirmed exactly")
    return report


def _independence_witness(Fs: list[Covariant], seed: int):
    action = Fs[0].action
    rng = random.Random(seed)
    e = len(Fs)
    for point in candidate_points(action.x_dim, rng):
        vals = _point_dict(action.x_vars, point, action.field)
        try:
            rows = evaluate_matrix(Fs, vals)
        except ZeroDivisionError:
            continue
        if qmat_rank(rows) == e:
            minor = None
            if e == len(rows):
                minor = qmat_det(tuple(tuple(r) for r in rows), action.field)
            return vals, minor
    return None
