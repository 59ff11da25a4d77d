"""Independence theory for covariant families: relations over the function
field, relations with relative-invariant coefficients, the reflection
degree-lowering descent, and the bridges between module-level and generic
independence.

Whether module-level conclusions are available depends on global geometric
hypotheses (the invariant field being the fraction field of the invariant
ring, or the group being generated by pseudo-reflections).  Those hypotheses
are caller-asserted flags recorded in every report, never inferred.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .action import FiniteGroupAction, GroupAction
from .covariant import (
    Covariant,
    CovariantError,
    coordinate_matrix,
    generic_independence,
    weight_of,
)
from .exactalg import (
    DimensionError,
    ExactAlgError,
    ExactDivisionError,
    Matrix,
    Poly,
    RatFn,
    field_one,
    qmat_rank,
)
from .report import Report, Stopwatch


class ReflectError(ExactAlgError):
    pass


class NoDependenceError(ReflectError):
    """The family is generically independent; no relation exists."""


class HypothesisError(ReflectError):
    """Caller-asserted hypotheses are contradictory or visibly violated."""


@dataclass
class Relation:
    """Coefficients h_1..h_e with sum_i h_i F_i = 0 as a vector of
    polynomials (or rational functions)."""

    coeffs: list
    covariants: list[Covariant]
    verified: bool = False

    @property
    def is_zero(self) -> bool:
        return all(h.is_zero() for h in self.coeffs)

    def max_degree(self) -> int:
        degs = []
        for h in self.coeffs:
            if isinstance(h, RatFn):
                h = h.as_poly()
            degs.append(h.total_degree())
        return max(degs)

    def check(self) -> bool:
        """Exact verification that sum h_i F_i is the zero vector."""
        action = self.covariants[0].action
        d = action.w_dim
        for c in range(d):
            acc = None
            for h, F in zip(self.coeffs, self.covariants):
                term = h * F.coords[c] if not isinstance(F.coords[c], RatFn) \
                    else (h if isinstance(h, RatFn) else RatFn(h, reduce=False)) * F.coords[c]
                acc = term if acc is None else acc + term
            if not acc.is_zero():
                return False
        return True

    def verify(self) -> "Relation":
        self.verified = self.check()
        if not self.verified:
            raise ReflectError("relation coefficients do not annihilate the family")
        return self


@dataclass
class IndependenceCertificate:
    """A nonvanishing maximal minor certifying full column rank."""

    rows: list[int]
    cols: list[int]
    minor: object  # Poly | RatFn

    def __str__(self):
        return (f"minor on rows {self.rows}, columns {self.cols}: {self.minor}")


def relation_over_function_field(Fs: list[Covariant]):
    """A kernel vector of the coordinate matrix over k(X), normalized so the
    last nonzero coefficient is 1, or an :class:`IndependenceCertificate`.

    Coefficients that happen to be polynomial are returned as Poly.
    """
    mat = coordinate_matrix(Fs)
    work = mat
    if any(isinstance(x, RatFn) for row in mat.entries for x in row):
        work = mat.clear_row_denominators()
    kernel = work.kernel_vector()
    if kernel is None:
        return _independence_certificate(work)
    coeffs = []
    for v in kernel:
        v = v.reduced()
        coeffs.append(v.as_poly() if v.is_poly() else v)
    rel = Relation(coeffs, list(Fs)).verify()
    return rel


def _independence_certificate(mat: Matrix) -> IndependenceCertificate:
    echelon, pivots = mat._echelon_ff()
    # recover pivot rows of the original matrix by rank-tracking rows greedily
    e = len(pivots)
    chosen_rows: list[int] = []
    rows_so_far: list[list] = []
    for r in range(mat.rows):
        trial = rows_so_far + [[mat.entries[r][c] for c in pivots]]
        if Matrix(trial).rank() > len(rows_so_far):
            chosen_rows.append(r)
            rows_so_far = trial
        if len(chosen_rows) == e:
            break
    minor = Matrix([[mat.entries[r][c] for c in pivots] for r in chosen_rows]).det()
    if minor.is_zero():
        raise ReflectError("internal: certificate minor vanished")
    return IndependenceCertificate(chosen_rows, list(pivots), minor)


@dataclass
class XSpaceFlags:
    """Caller-asserted hypotheses on X: factorial affine coordinate ring with
    only scalar units."""

    factorial_affine: bool = False
    scalar_units: bool = False
    note: str = ""


def relative_invariant_relation(Fs: list[Covariant], flags: XSpaceFlags) -> Relation:
    """Clear a function-field relation into one whose coefficients are
    relative invariants of one common weight.

    Requires the caller to assert that X is factorial affine with only
    scalar units; under those hypotheses the numerator and denominator of
    each invariant kernel coefficient are themselves relative invariants,
    and multiplying the relation through by the product of denominators
    leaves relative-invariant coefficients of equal weight.
    """
    if not (flags.factorial_affine and flags.scalar_units):
        raise HypothesisError(
            "relative_invariant_relation needs the factorial-affine and "
            "scalar-units hypotheses asserted")
    found = relation_over_function_field(Fs)
    if isinstance(found, IndependenceCertificate):
        raise NoDependenceError(
            f"family is generically independent ({found})")
    action = Fs[0].action
    lifted = [h if isinstance(h, RatFn) else RatFn(h, reduce=False) for h in found.coeffs]
    product = Poly.one(action.x_vars, action.field)
    for h in lifted:
        product = product * h.den
    coeffs: list[Poly] = []
    for h in lifted:
        coeffs.append(h.num * product.exact_div(h.den))
    weights = []
    for i, h in enumerate(coeffs):
        if h.is_zero():
            weights.append(None)
            continue
        w = weight_of(action, h)
        if w is None:
            raise HypothesisError(
                f"coefficient {i + 1} is not a relative invariant; the "
                "asserted hypotheses on X are violated")
        weights.append(w)
    nonzero = [w for w in weights if w is not None]
    if any(w != nonzero[0] for w in nonzero[1:]):
        raise HypothesisError("coefficient weights differ; the asserted "
                              "hypotheses on X are violated")
    rel = Relation(coeffs, list(Fs)).verify()
    return rel


# ---------------------------------------------------------------------------
# reflections and the degree-lowering descent
# ---------------------------------------------------------------------------


@dataclass
class Reflection:
    """A group element fixing a hyperplane pointwise, with a linear form l
    cutting out that hyperplane."""

    element: int
    hyperplane_form: Poly
    action: FiniteGroupAction = dc_field(repr=False, default=None)

    def validate(self) -> bool:
        mat = self.action.x_mats[self.element]
        n = len(mat)
        one = field_one(self.action.field)
        diff = [[mat[i][j] - (one if i == j else one - one) for j in range(n)]
                for i in range(n)]
        if qmat_rank(diff) != 1:
            return False
        # l must vanish on the fixed space: l rows combos... check l * v = 0
        # for a kernel basis of (M - I); equivalently l lies in the row space
        # of (M - I), which for rank one means proportional to a nonzero row.
        l_coeffs = _linear_form_coeffs(self.hyperplane_form, self.action)
        if l_coeffs is None:
            return False
        for row in diff:
            if any(row):
                return _proportional(l_coeffs, row)
        return False


def _linear_form_coeffs(l: Poly, action: FiniteGroupAction):
    n = action.x_dim
    coeffs = [None] * n
    zero = field_one(action.field) - field_one(action.field)
    coeffs = [zero] * n
    for exps, c in l.terms.items():
        if sum(exps) != 1:
            return None
        coeffs[list(exps).index(1)] = c
    return coeffs


def _proportional(a: list, b: list) -> bool:
    pivot = next((i for i, x in enumerate(b) if x), None)
    if pivot is None:
        return not any(a)
    if not a[pivot]:
        return False
    ratio = a[pivot] / b[pivot]
    return all(x == ratio * y for x, y in zip(a, b))


def find_reflections(action: FiniteGroupAction) -> list[Reflection]:
    """Scan the element list for pseudo-reflections on the X-space.

    The hyperplane form is the first nonzero row of (M - I), scaled so its
    leading coefficient is 1.
    """
    out = []
    one = field_one(action.field)
    zero = one - one
    n = action.x_dim
    for g in action.elements():
        if g == action.identity:
            continue
        mat = action.x_mats[g]
        diff = [[mat[i][j] - (one if i == j else zero) for j in range(n)]
                for i in range(n)]
        if qmat_rank(diff) != 1:
            continue
        row = next(r for r in diff if any(r))
        l = Poly.zero(action.x_vars, action.field)
        for name, c in zip(action.x_vars, row):
            if c:
                l = l + Poly.var(name, action.x_vars, action.field) * c
        l = l.monic()
        refl = Reflection(g, l, action)
        if not refl.validate():
            raise ReflectError("internal: reflection detection produced an "
                               "invalid hyperplane form")
        out.append(refl)
    return out


def lower_relation(rel: Relation, s: Reflection) -> Relation:
    """One descent step: replace each coefficient h_j by (h_j - s.h_j) / l.

    The divisions must be exact (h - s.h vanishes on the fixed hyperplane);
    a remainder signals that s is not a reflection for this action.  The
    zero relation is a legal output and means every coefficient is fixed by
    s.  A nonzero output has strictly smaller maximal degree (checked).
    """
    if not rel.verified:
        raise ReflectError("lower_relation requires a verified relation")
    action = rel.covariants[0].action
    if s.action is not action:
        raise ReflectError("reflection belongs to a different action")
    if not s.validate():
        raise ReflectError("element does not fix a hyperplane pointwise")
    l = s.hyperplane_form
    new_coeffs = []
    for h in rel.coeffs:
        if isinstance(h, RatFn):
            h = h.as_poly()
        moved = action.act_on_poly(s.element, h)
        diff = h - moved
        try:
            new_coeffs.append(diff.exact_div(l) if not diff.is_zero() else diff)
        except ExactDivisionError:
            raise ReflectError(
                "difference is not divisible by the hyperplane form; the "
                "element is not a reflection for this action") from None
    out = Relation(new_coeffs, rel.covariants)
    if out.is_zero:
        out.verified = True
        return out
    out.verify()
    if out.max_degree() >= rel.max_degree():
        raise ReflectError("internal: descent step failed to lower the degree")
    return out


def descend_to_invariant_relation(rel: Relation) -> Relation:
    """Iterate the descent across all reflections until no step changes the
    relation; for reflection-generated groups the result has invariant
    coefficients."""
    action = rel.covariants[0].action
    reflections = find_reflections(action)
    current = rel
    changed = True
    while changed:
        changed = False
        for s in reflections:
            lowered = lower_relation(current, s)
            if not lowered.is_zero:
                current = lowered
                changed = True
                break
    return current


# ---------------------------------------------------------------------------
# module-independence verdicts
# ---------------------------------------------------------------------------


@dataclass
class BridgeFlags:
    """Which bridge between generic and module independence the caller
    asserts.  ``fraction_field``: the invariant field is the fraction field
    of the invariant ring (finite group on affine X, or commutator-group /
    factorial conditions).  ``reflection``: the group is generated by
    pseudo-reflections."""

    fraction_field: bool = False
    reflection: bool = False
    note: str = ""


def module_independence_verdict(Fs: list[Covariant], flags: BridgeFlags,
                                seed: int = 0) -> Report:
    """Decide independence in the module of covariants over the invariant
    ring, as far as the asserted hypotheses allow.

    With a bridge flagged, the module verdict coincides with generic
    independence.  With no bridge, generic independence still implies module
    independence (one direction holds unconditionally); generic dependence
    leaves the module question open and the verdict abstains.
    """
    report = Report("module independence")
    with Stopwatch(report):
        if flags.fraction_field and flags.reflection:
            raise HypothesisError("flag exactly one bridge, not both")
        generic = generic_independence(Fs, seed=seed)
        report.data["generic"] = generic.data.get("verdict")
        report.data["rank"] = generic.data.get("rank")
        if flags.note:
            report.data["hypothesis_note"] = flags.note
        independent = generic.ok
        if flags.fraction_field or flags.reflection:
            bridge = ("invariant field is the fraction field of the invariant ring"
                      if flags.fraction_field else
                      "group is generated by pseudo-reflections")
            report.data["bridge"] = bridge
            report.data["verdict"] = "independent" if independent else "dependent"
            report.add("module_independent", independent,
                       f"generic verdict transfers through the bridge: {bridge}")
        elif independent:
            report.data["bridge"] = None
            report.data["verdict"] = "independent"
            report.add("module_independent", True,
                       "generic independence implies independence over the "
                       "invariant ring unconditionally")
        else:
            report.data["bridge"] = None
            report.data["verdict"] = "abstain"
            report.add("module_independent", False,
                       "generically dependent; without a bridge hypothesis the "
                       "module-level question stays open (families independent "
                       "over a trivial invariant ring can still be generically "
                       "dependent)")
    return report
