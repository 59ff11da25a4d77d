"""Explicit localized isomorphisms from independent covariants.

Given d verified, generically independent covariants F_1..F_d into a
d-dimensional module W, the map

    (x, w)  ->  (x, Phi(x, w)),      Phi = adj(F)/det(F) applied to w,

is an equivariant isomorphism between X_f x W and X_f x k^d over the open
set X_f where f = det(F) does not vanish, with inverse
(x, a) -> (x, sum_i a_i F_i(x)).  The coordinates Phi_i are invariant
rational functions and generate the invariant field of X x W over that of X.

This module builds the map, verifies it, and runs the converse
constructions: recovering covariants from a matrix of invariant generators,
and extracting covariants from the linear component of an invariant
polynomial map.

Internally every identity is checked on cleared data: rows of rational
matrices are written as polynomial rows over one denominator per row, so no
gcd computation happens inside the hot verification loops.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .action import GroupAction, det_w_inverse_character
from .covariant import (
    Covariant,
    DependentCovariantsError,
    EQUIVARIANT,
    RelativeInvariant,
    UnverifiedCovariantError,
    covariant_matrix,
    det_relative_invariant,
    verify_equivariance,
)
from .exactalg import (
    DimensionError,
    ExactAlgError,
    ExactDivisionError,
    Matrix,
    Poly,
    RatFn,
    field_one,
    poly_lcm,
)
from .report import Report, Stopwatch


class IsomorphismError(ExactAlgError):
    pass


def _pick_out_vars(action: GroupAction, d: int) -> tuple[str, ...]:
    taken = set(action.x_vars) | set(action.w_vars)
    if not action.is_finite:
        taken |= set(action.g_vars)
    for prefix in ("a", "t", "u", "aa"):
        names = tuple(f"{prefix}{i}" for i in range(1, d + 1))
        if not (set(names) & taken):
            return names
    raise IsomorphismError("could not pick fresh output coordinate names")


def _ratfn_quotient(num: Poly, den: Poly) -> Poly | RatFn:
    """num/den, preferring the exact polynomial quotient when it exists."""
    try:
        return num.exact_div(den)
    except ExactDivisionError:
        return RatFn(num, den)


def _cleared_rows(mat: Matrix) -> tuple[list[list[Poly]], list[Poly]]:
    """Write each row over one denominator: row i equals nums[i] / dens[i]."""
    nums: list[list[Poly]] = []
    dens: list[Poly] = []
    for row in mat.entries:
        lifted = [x if isinstance(x, RatFn) else RatFn(x, reduce=False) for x in row]
        den = lifted[0].den.ring_one()
        for x in lifted:
            den = poly_lcm(den, x.den)
        nums.append([x.num * den.exact_div(x.den) for x in lifted])
        dens.append(den)
    return nums, dens


def _dot(row: list[Poly], vec: list[Poly]) -> Poly:
    acc = None
    for a, b in zip(row, vec):
        term = a * b
        acc = term if acc is None else acc + term
    return acc


@dataclass
class NoNameMap:
    """The pair of mutually inverse equivariant maps over X_f.

    ``phi`` is the d x d matrix of invariant rational functions, stored with
    the relative invariant f as one shared denominator (the adjugate shape),
    and ``phi_inv`` is the covariant matrix F, so that phi * phi_inv is the
    identity over the localization at f.
    """

    action: GroupAction
    invariant: RelativeInvariant
    phi: Matrix
    phi_inv: Matrix
    w_vars: tuple[str, ...]
    out_vars: tuple[str, ...]
    covariants: list[Covariant] = dc_field(default_factory=list)

    @property
    def f(self):
        return self.invariant.f

    @property
    def dim(self) -> int:
        return self.phi.rows

    def generators(self) -> list[RatFn]:
        """The invariant generators Phi_i = sum_j phi_ij w_j in the
        (x, w)-ring, each over its row denominator."""
        ring = self.action.x_vars + self.w_vars
        field = self.action.field
        nums, dens = _cleared_rows(self.phi)
        out = []
        for i in range(self.dim):
            acc = Poly.zero(ring, field)
            for j in range(self.dim):
                w_j = Poly.var(self.w_vars[j], ring, field)
                acc = acc + nums[i][j].embed(ring) * w_j
            out.append(RatFn(acc, dens[i].embed(ring), reduce=False))
        return out


def build_isomorphism(Fs: list[Covariant], out_vars: tuple[str, ...] | None = None) -> NoNameMap:
    """Construct the localized isomorphism from d independent covariants.

    All structural identities (two-sided inverse over the localization,
    invariance of every generator, and both substitution round trips) are
    verified before the map is returned.
    """
    if not Fs:
        raise DimensionError("empty covariant list")
    action = Fs[0].action
    for F in Fs:
        if F.status != EQUIVARIANT:
            raise UnverifiedCovariantError("build_isomorphism requires verified covariants")
    ri = det_relative_invariant(Fs)
    if ri.is_zero:
        raise DependentCovariantsError(
            "covariants are generically dependent (determinant vanishes)")
    F_mat = covariant_matrix(Fs)
    adj = F_mat.adjugate()
    f = ri.f
    if isinstance(f, RatFn):
        phi = adj.map(lambda e: (e if isinstance(e, RatFn) else RatFn(e, reduce=False)) / f)
    else:
        phi = adj.map(lambda e: RatFn(e, f, reduce=False))
    out_vars = tuple(out_vars) if out_vars else _pick_out_vars(action, len(Fs))
    m = NoNameMap(action, ri, phi, F_mat, action.w_vars, out_vars, list(Fs))

    problems = []
    if not _two_sided_inverse(m):
        problems.append("phi and phi_inv are not mutually inverse")
    bad = _generator_invariance(m)
    if bad is not None:
        problems.append(f"generator {bad[0] + 1} is not invariant (witness: {bad[1]})")
    problems.extend(_round_trip_failures(m))
    if problems:
        raise IsomorphismError("; ".join(problems))
    return m


# ---------------------------------------------------------------------------
# structural checks (all on cleared rows)
# ---------------------------------------------------------------------------


def _product_is_identity(left: Matrix, right: Matrix) -> bool:
    """left * right == I over the fraction field, checked on cleared rows."""
    ln, ld = _cleared_rows(left)
    rn, rd = _cleared_rows(right)
    d = len(ln)
    rd_equal = all(den == rd[0] for den in rd)
    for i in range(d):
        for j in range(d):
            acc = None
            if rd_equal:
                for k in range(d):
                    term = ln[i][k] * rn[k][j]
                    acc = term if acc is None else acc + term
                expect = ld[i] * rd[0] if i == j else None
            else:
                for k in range(d):
                    term = ln[i][k] * rn[k][j]
                    for l in range(d):
                        if l != k:
                            term = term * rd[l]
                    acc = term if acc is None else acc + term
                if i == j:
                    expect = ld[i]
                    for l in range(d):
                        expect = expect * rd[l]
                else:
                    expect = None
            if expect is None:
                if not acc.is_zero():
                    return False
            elif acc != expect:
                return False
    return True


def _two_sided_inverse(m: NoNameMap) -> bool:
    return (_product_is_identity(m.phi, m.phi_inv)
            and _product_is_identity(m.phi_inv, m.phi))


def _round_trip_failures(m: NoNameMap) -> list[str]:
    """Both substitution round trips, exactly, on cleared rows.

    (1) w := sum_i a_i F_i(x) substituted into Phi must return a;
    (2) a := Phi(x, w) substituted into sum_i a_i F_i(x) must return w.
    """
    action = m.action
    d = m.dim
    field = action.field
    failures: list[str] = []

    pn, pd = _cleared_rows(m.phi)
    fn, fd = _cleared_rows(m.phi_inv)

    ring_a = action.x_vars + m.out_vars
    a_vec = [Poly.var(v, ring_a, field) for v in m.out_vars]
    p_a = [[e.embed(ring_a) for e in row] for row in pn]
    f_a = [[e.embed(ring_a) for e in row] for row in fn]
    fd_a = [e.embed(ring_a) for e in fd]
    pd_a = [e.embed(ring_a) for e in pd]
    # w_c = (fn_c . a)/fd_c ; Phi_i(x, w) = sum_c pn_ic w_c / pd_i
    fd_equal = all(e == fd_a[0] for e in fd_a)
    for i in range(d):
        if fd_equal:
            lhs = _dot(p_a[i], [_dot(f_a[c], a_vec) for c in range(d)])
            rhs = a_vec[i] * pd_a[i] * fd_a[0]
        else:
            lhs = None
            for c in range(d):
                term = p_a[i][c] * _dot(f_a[c], a_vec)
                for l in range(d):
                    if l != c:
                        term = term * fd_a[l]
                lhs = term if lhs is None else lhs + term
            rhs = a_vec[i] * pd_a[i]
            for l in range(d):
                rhs = rhs * fd_a[l]
        if lhs != rhs:
            failures.append(f"round trip through phi fails at output {i + 1}")

    ring_w = action.x_vars + m.w_vars
    w_vec = [Poly.var(v, ring_w, field) for v in m.w_vars]
    p_w = [[e.embed(ring_w) for e in row] for row in pn]
    f_w = [[e.embed(ring_w) for e in row] for row in fn]
    fd_w = [e.embed(ring_w) for e in fd]
    pd_w = [e.embed(ring_w) for e in pd]
    pd_equal = all(e == pd_w[0] for e in pd_w)
    for c in range(d):
        if pd_equal:
            lhs = _dot(f_w[c], [_dot(p_w[i], w_vec) for i in range(d)])
            rhs = w_vec[c] * fd_w[c] * pd_w[0]
        else:
            lhs = None
            for i in range(d):
                term = f_w[c][i] * _dot(p_w[i], w_vec)
                for l in range(d):
                    if l != i:
                        term = term * pd_w[l]
                lhs = term if lhs is None else lhs + term
            rhs = w_vec[c] * fd_w[c]
            for l in range(d):
                rhs = rhs * pd_w[l]
        if lhs != rhs:
            failures.append(f"round trip through the frame fails at coordinate {c + 1}")
    return failures


def _generator_invariance(m: NoNameMap):
    """Invariance of every generator row: for finite groups the matrix
    identity (g . phi) = phi * g_W per element; for the generic element the
    cleared row-wise substitution identity.  Returns (row, witness) on
    failure, None when all rows are invariant."""
    action = m.action
    d = m.dim
    pn, pd = _cleared_rows(m.phi)
    if action.is_finite:
        for g in action.elements():
            subst = action.x_substitution(g, inverse=True)
            w = action.w_mats[g]
            for i in range(d):
                num_moved = [p.subs(subst, action.x_vars) for p in pn[i]]
                den_moved = pd[i].subs(subst, action.x_vars)
                for j in range(d):
                    rhs = Poly.zero(action.x_vars, action.field)
                    for l in range(d):
                        if w[l][j]:
                            rhs = rhs + pn[i][l] * w[l][j]
                    # num_moved[j]/den_moved == rhs/pd[i]
                    if num_moved[j] * pd[i] != rhs * den_moved:
                        return i, f"element {g}"
        return None
    return _generator_invariance_generic(action, pn, pd, m.w_vars)


def _generator_invariance_generic(action, pn, pd, w_vars):
    """Cleared substitution check that each generator is fixed by the
    generic element, row by row."""
    ring = action.x_vars + tuple(w_vars) + action.g_vars
    det = action.det_poly.embed(ring)
    field = action.field
    den_cache: dict[int, tuple[Poly, int]] = {}
    for i in range(len(pn)):
        gen_ring = action.x_vars + tuple(w_vars)
        num = Poly.zero(gen_ring, field)
        for j, name in enumerate(w_vars):
            num = num + pn[i][j].embed(gen_ring) * Poly.var(name, gen_ring, field)
        num_moved, kn = action.act_cleared(num, "xw", out_vars=ring)
        key = id(pd[i])
        if key not in den_cache:
            den_cache[key] = action.act_cleared(pd[i], "x", out_vars=ring)
        den_moved, kd = den_cache[key]
        # num_moved/det^kn / (den_moved/det^kd) == num/pd[i]
        k = min(kn, kd)
        lhs = num_moved * pd[i].embed(ring) * det ** (kd - k)
        rhs = num.embed(ring) * den_moved * det ** (kn - k)
        if lhs != rhs:
            return i, "the generic element"
    return None


def verify_isomorphism(m: NoNameMap) -> Report:
    """Re-derive and check every structural property of the map, each as a
    named check."""
    report = Report("no-name isomorphism verification")
    with Stopwatch(report):
        action = m.action
        d = m.dim

        linear = all(
            not (m.phi.entries[i][j].support_vars() - set(action.x_vars))
            for i in range(d) for j in range(d))
        report.add("phi_linear_in_w", linear,
                   "phi entries depend only on the X-variables")

        report.add("f_nonzero", not m.f.is_zero(), "denominator is not zero")
        det_frame = m.phi_inv.det()
        if isinstance(m.f, RatFn) or isinstance(det_frame, RatFn):
            f_ok = (m.f if isinstance(m.f, RatFn) else RatFn(m.f, reduce=False)) == det_frame
        else:
            f_ok = m.f == det_frame
        report.add("f_equals_det_of_frame", bool(f_ok),
                   "localization denominator equals the frame determinant")

        expected = det_w_inverse_character(action)
        report.add("weight_is_det_w_inverse", m.invariant.weight == expected,
                   "weight of f matches the inverse W-determinant character")
        report.add("f_relative_invariant", m.invariant.verify(),
                   "f transforms by its weight under the whole group")

        report.add("phi_times_frame_is_identity",
                   _product_is_identity(m.phi, m.phi_inv))
        report.add("frame_times_phi_is_identity",
                   _product_is_identity(m.phi_inv, m.phi))

        rt_failures = _round_trip_failures(m)
        if rt_failures:
            for msg in rt_failures:
                report.add("round_trips", False, msg)
        else:
            report.add("round_trips", True,
                       "both substitution round trips return the inputs exactly")

        if linear:
            bad = (_generator_invariance_direct(m) if action.is_finite
                   else _generator_invariance(m))
            report.add("generators_invariant", bad is None,
                       "every generator is fixed by the group action" if bad is None
                       else f"generator {bad[0] + 1} moves under {bad[1]}")
        else:
            report.add("generators_invariant", False,
                       "phi entries must depend only on the X-variables")

        report.data["f"] = str(m.f)
        report.data["dim"] = d
    return report


def _generator_invariance_direct(m: NoNameMap):
    """Finite-group route through the full (x, w)-ring substitution, kept
    separate from the matrix-identity route used at build time."""
    action = m.action
    gens = m.generators()
    ring = action.x_vars + m.w_vars
    for g in action.elements():
        subst = dict(action.x_substitution(g, inverse=True, out_vars=ring))
        subst.update(action.w_substitution(g, inverse=True, out_vars=ring))
        for i, gen in enumerate(gens):
            num_moved = gen.num.subs(subst, ring)
            den_moved = gen.den.subs(subst, ring)
            if num_moved * gen.den != gen.num * den_moved:
                return i, f"element {g}"
    return None


# ---------------------------------------------------------------------------
# converse constructions
# ---------------------------------------------------------------------------


def covariants_from_generators(phi: Matrix, action: GroupAction) -> list[Covariant]:
    """Recover d generically independent covariants from a d x d matrix of
    invariant-generator coefficients over the function field of X.

    Row i of ``phi`` holds the coefficients of the generator
    sum_j phi_ij w_j; the rows must be invariant (checked), the matrix
    invertible over k(X).  The returned covariants are the columns of the
    inverse matrix, each verified equivariant.
    """
    if phi.rows != phi.cols:
        raise DimensionError("generator matrix must be square")
    if phi.rows != action.w_dim:
        raise DimensionError("generator matrix size must match dim W")
    d = phi.rows
    probe = NoNameMap(
        action,
        RelativeInvariant(Poly.one(action.x_vars, action.field),
                          _trivial_weight(action), action),
        phi.map(lambda e: e if isinstance(e, RatFn) else RatFn(e, reduce=False)),
        Matrix.identity(d, RatFn.one(action.x_vars, action.field)),
        action.w_vars, _pick_out_vars(action, d))
    bad = _generator_invariance(probe)
    if bad is not None:
        raise IsomorphismError(
            f"generator row {bad[0] + 1} is not invariant (witness: {bad[1]})")

    nums, dens = _cleared_rows(phi)
    P = Matrix(nums)
    detP = P.det()
    if detP.is_zero():
        raise IsomorphismError("generator matrix is singular over k(X)")
    adjP = P.adjugate()
    # phi = diag(1/dens) * P, so phi^{-1} = adj(P) * diag(dens) / det(P)
    out = []
    for j in range(d):
        coords = []
        for i in range(d):
            coords.append(_ratfn_quotient(adjP.entries[i][j] * dens[j], detP))
        F = Covariant(action, coords)
        rep = verify_equivariance(F)
        if not rep.ok:
            raise IsomorphismError(f"recovered column {j + 1} is not equivariant")
        out.append(F)
    return out


def _trivial_weight(action: GroupAction):
    from .action import Character
    return Character.trivial(action)


def linearize_isomorphism(coords: list[Poly], action: GroupAction,
                          unit_denominator: Poly | None = None
                          ) -> tuple[Matrix, list[Covariant]]:
    """Extract covariants from an invariant polynomial map X x W -> k^d.

    Each coordinate must be an invariant polynomial in the (x, w)-ring; its
    degree-one-in-w component sum_j L_ij w_j is collected into the matrix L,
    whose determinant must be a unit (a nonzero constant, or, when
    ``unit_denominator`` f is given, an exact divisor of a power of f).  The
    covariants are the columns of L^{-1}.
    """
    d = action.w_dim
    if len(coords) != d:
        raise DimensionError(f"need {d} coordinates, got {len(coords)}")
    ring = action.x_vars + action.w_vars
    field = action.field
    fixed = [c.embed(ring) if c.vars != ring else c for c in coords]

    bad = _map_invariance_failure(fixed, action, ring)
    if bad is not None:
        raise IsomorphismError(
            f"coordinate {bad[0] + 1} is not invariant (witness: {bad[1]})")

    x_positions = [ring.index(v) for v in action.x_vars]
    w_positions = [ring.index(v) for v in action.w_vars]
    L_entries = [[Poly.zero(action.x_vars, field) for _ in range(d)] for _ in range(d)]
    for i, p in enumerate(fixed):
        for exps, coeff in p.terms.items():
            w_deg = sum(exps[pos] for pos in w_positions)
            if w_deg != 1:
                continue
            j = next(k for k, pos in enumerate(w_positions) if exps[pos] == 1)
            x_exps = tuple(exps[pos] for pos in x_positions)
            L_entries[i][j] = L_entries[i][j] + Poly(action.x_vars, {x_exps: coeff}, field)
    L = Matrix(L_entries)
    det = L.det()
    inv_scale = _unit_inverse(det, unit_denominator, action)
    if inv_scale is None:
        raise IsomorphismError(
            f"linear component determinant is not a unit: {det}")
    adjL = L.adjugate()
    out = []
    for j in range(d):
        coords_j = []
        for i in range(d):
            entry = _ratfn_quotient(adjL.entries[i][j] * inv_scale.num, inv_scale.den)
            coords_j.append(entry)
        F = Covariant(action, coords_j)
        rep = verify_equivariance(F)
        if not rep.ok:
            raise IsomorphismError(f"extracted column {j + 1} is not equivariant")
        out.append(F)
    return L, out


def _map_invariance_failure(coords: list[Poly], action: GroupAction, ring):
    if action.is_finite:
        for g in action.elements():
            subst = dict(action.x_substitution(g, inverse=True, out_vars=ring))
            subst.update(action.w_substitution(g, inverse=True, out_vars=ring))
            for i, p in enumerate(coords):
                if p.subs(subst, ring) != p:
                    return i, f"element {g}"
        return None
    big_ring = action.xwg_vars
    det = action.det_poly.embed(big_ring)
    for i, p in enumerate(coords):
        moved, k = action.act_cleared(p, "xw", out_vars=big_ring)
        if moved != p.embed(big_ring) * det ** k:
            return i, "the generic element"
    return None


def _unit_inverse(det: Poly | RatFn, f: Poly | None, action: GroupAction) -> RatFn | None:
    """1/det as a RatFn when det is a unit in k[X] (constant) or in the
    localization k[X]_f (an exact divisor of some f^k); None otherwise."""
    if isinstance(det, RatFn):
        det = det.as_poly() if det.is_poly() else None
        if det is None:
            return None
    if det.is_zero():
        return None
    one = Poly.one(action.x_vars, action.field)
    if det.is_constant():
        return RatFn(one, reduce=False) * (field_one(action.field) / det.constant_value())
    if f is None or f.is_zero() or f.is_constant():
        return None
    f = f if f.vars == det.vars else f.embed(det.vars)
    power = one
    for _ in range(det.total_degree() + 1):
        power = power * f
        if det.divides(power):
            return RatFn(power.exact_div(det), power, reduce=False)
    return None
