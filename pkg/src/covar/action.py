"""Linear group actions on affine spaces.

Two group models share one interface:

* :class:`FiniteGroupAction` holds an explicit element list (closed under
  products and inverses) of invertible scalar matrices acting on the X-space,
  with a matching list acting on the W-space.
* :class:`SymbolicGroupAction` holds one generic matrix ``g`` with
  indeterminate entries; the action matrices on X and W have entries
  polynomial in the ``g``-variables divided by a power of ``det(g)``.
  Identities are checked by clearing those determinant powers and comparing
  polynomials.

Conventions (fixed throughout the package):

* points transform by ``x -> M_g x`` (column vectors);
* functions transform by ``(g . f)(x) = f(g^{-1} x)``;
* maps ``F : X -> W`` transform by ``(g . F)(x) = g_W F(g^{-1} x)``, so the
  equivariant maps are exactly the fixed points.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactalg import (
    DimensionError,
    ExactAlgError,
    Matrix,
    Poly,
    PrimeField,
    QMat,
    RatFn,
    field_one,
    lift_coeff,
    qmat,
    qmat_det,
    qmat_identity,
)


class ActionError(ExactAlgError):
    """Invalid group data (non-invertible generator, broken homomorphism...)."""


class ClosureCapError(ActionError):
    """Group closure exceeded the configured order cap."""


def default_x_vars(n: int) -> tuple[str, ...]:
    return tuple(f"x{i}" for i in range(1, n + 1))


def default_w_vars(d: int) -> tuple[str, ...]:
    return tuple(f"w{i}" for i in range(1, d + 1))


class FiniteGroupAction:
    """A finite matrix group with linear actions on the X- and W-spaces.

    Elements are indexed 0..order-1 with index 0 the identity; the element
    order is the breadth-first closure order of the generators, so it is
    reproducible from the generator list.
    """

    is_finite = True

    def __init__(self, x_mats: list[QMat], w_mats: list[QMat],
                 x_vars: tuple[str, ...], w_vars: tuple[str, ...],
                 generators: list[int], field: PrimeField | None = None):
        self.x_mats = x_mats
        self.w_mats = w_mats
        self.x_vars = x_vars
        self.w_vars = w_vars
        self.generators = generators
        self.field = field
        self.identity = 0
        self._index = {m: i for i, m in enumerate(x_mats)}
        self._mul_cache: dict[tuple[int, int], int] = {}
        self.inv = [self._find_inverse(i) for i in range(len(x_mats))]

    # -- structure -----------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.x_mats)

    @property
    def x_dim(self) -> int:
        return len(self.x_vars)

    @property
    def w_dim(self) -> int:
        return len(self.w_vars)

    def elements(self) -> range:
        return range(self.order)

    def mul(self, i: int, j: int) -> int:
        key = (i, j)
        hit = self._mul_cache.get(key)
        if hit is None:
            from .exactalg import qmat_mul
            hit = self._index[qmat_mul(self.x_mats[i], self.x_mats[j])]
            self._mul_cache[key] = hit
        return hit

    def _find_inverse(self, i: int) -> int:
        from .exactalg import qmat_mul
        ident = self.x_mats[self.identity]
        for j in range(self.order):
            if qmat_mul(self.x_mats[i], self.x_mats[j]) == ident:
                return j
        raise ActionError("element without inverse; closure is corrupt")

    # -- actions on polynomials ------------------------------------------------

    def _subst_from_matrix(self, mat: QMat, vars: tuple[str, ...],
                           out_vars: tuple[str, ...]) -> dict[str, Poly]:
        images = {}
        for k, name in enumerate(vars):
            img = Poly.zero(out_vars, self.field)
            for l, coeff in enumerate(mat[k]):
                if coeff:
                    img = img + Poly.var(vars[l], out_vars, self.field) * coeff
            images[name] = img
        return images

    def x_substitution(self, i: int, inverse: bool = True,
                       out_vars: tuple[str, ...] | None = None) -> dict[str, Poly]:
        """Map x_k -> sum_l (M)_{kl} x_l with M the (inverse) element matrix."""
        mat = self.x_mats[self.inv[i] if inverse else i]
        return self._subst_from_matrix(mat, self.x_vars, out_vars or self.x_vars)

    def w_substitution(self, i: int, inverse: bool = True,
                       out_vars: tuple[str, ...] | None = None) -> dict[str, Poly]:
        mat = self.w_mats[self.inv[i] if inverse else i]
        return self._subst_from_matrix(mat, self.w_vars, out_vars or self.w_vars)

    def act_on_poly(self, i: int, p: Poly | RatFn) -> Poly | RatFn:
        """Function action (g . p)(x) = p(g^{-1} x) on the X-space."""
        if set(p.vars) != set(self.x_vars):
            raise DimensionError("polynomial does not live on the X-space")
        images = self.x_substitution(i, inverse=True, out_vars=p.vars)
        return p.subs(images, p.vars)

    def act_matrix_w(self, i: int) -> Matrix:
        """W-action of element i as a matrix over constant polynomials in x."""
        return Matrix([[Poly.const(c, self.x_vars, self.field) for c in row]
                       for row in self.w_mats[i]])

    def describe(self) -> str:
        return f"finite group of order {self.order} on {self.x_dim}-dim X, {self.w_dim}-dim W"


def make_finite_group(generators: list[tuple], x_vars: tuple[str, ...] | None = None,
                      w_vars: tuple[str, ...] | None = None, max_order: int = 10_000,
                      field: PrimeField | None = None) -> FiniteGroupAction:
    """Breadth-first closure of (x-matrix, w-matrix) generator pairs.

    The w-images must define a homomorphism from the generated matrix group;
    a collision (same x-matrix reached with two different w-matrices) is
    reported as an error.  Closure past ``max_order`` pairs aborts.
    """
    from .exactalg import qmat_mul

    if not generators:
        raise ActionError("at least one generator pair is required")
    gen_pairs = [(qmat(x, field), qmat(w, field)) for x, w in generators]
    nx = len(gen_pairs[0][0])
    nw = len(gen_pairs[0][1])
    for gx, gw in gen_pairs:
        if len(gx) != nx or any(len(r) != nx for r in gx):
            raise DimensionError("x-generators must be square and of equal size")
        if len(gw) != nw or any(len(r) != nw for r in gw):
            raise DimensionError("w-generators must be square and of equal size")
        if not qmat_det(gx, field):
            raise ActionError("x-generator is not invertible")
        if not qmat_det(gw, field):
            raise ActionError("w-generator is not invertible")
    x_vars = tuple(x_vars) if x_vars else default_x_vars(nx)
    w_vars = tuple(w_vars) if w_vars else default_w_vars(nw)
    if len(x_vars) != nx or len(w_vars) != nw:
        raise DimensionError("variable names do not match matrix sizes")
    if set(x_vars) & set(w_vars):
        raise ActionError("X and W variable names overlap")

    ident = (qmat_identity(nx, field), qmat_identity(nw, field))
    seen: dict[QMat, QMat] = {ident[0]: ident[1]}
    order: list[tuple[QMat, QMat]] = [ident]
    queue = [ident]
    while queue:
        cur = queue.pop(0)
        for gx, gw in gen_pairs:
            nxt = (qmat_mul(cur[0], gx), qmat_mul(cur[1], gw))
            known = seen.get(nxt[0])
            if known is None:
                if len(order) >= max_order:
                    raise ClosureCapError(
                        f"closure exceeded the cap of {max_order} elements")
                seen[nxt[0]] = nxt[1]
                order.append(nxt)
                queue.append(nxt)
            elif known != nxt[1]:
                raise ActionError(
                    "w-images do not define a homomorphism: one x-matrix "
                    "carries two distinct w-matrices")
    x_mats = [p[0] for p in order]
    w_mats = [p[1] for p in order]
    gen_indices = [x_mats.index(g[0]) for g in gen_pairs]
    return FiniteGroupAction(x_mats, w_mats, x_vars, w_vars, gen_indices, field)


# ---------------------------------------------------------------------------
# symbolic (generic-element) actions
# ---------------------------------------------------------------------------


@dataclass
class TemplateSpec:
    """How a space carries the generic GL_n element.

    ``kind`` is one of ``conjugation`` (m-tuples of n x n matrices, acted on
    by simultaneous conjugation), ``natural`` (m-tuples of column vectors),
    ``scalar`` (n must be 1; scaling on a dim-m space), or ``trivial``
    (dim-m space with no action).
    """

    kind: str
    m: int = 1

    def dim(self, n: int) -> int:
        if self.kind == "conjugation":
            return n * n * self.m
        if self.kind == "natural":
            return n * self.m
        if self.kind in ("scalar", "trivial"):
            return self.m
        raise ActionError(f"unknown action template {self.kind!r}")

    def var_names(self, n: int, role: str) -> tuple[str, ...]:
        if self.kind == "conjugation":
            if role == "w":
                return tuple(f"w{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1))
            labels = "abcdefghijklmnopqrstuvwxyz"
            if self.m > len(labels):
                raise ActionError("too many matrix copies for letter labels")
            return tuple(f"{labels[c]}{i}{j}" for c in range(self.m)
                         for i in range(1, n + 1) for j in range(1, n + 1))
        if self.kind == "natural":
            if role == "w":
                return default_w_vars(n) if self.m == 1 else tuple(
                    f"w{i}{j}" for j in range(1, self.m + 1) for i in range(1, n + 1))
            return tuple(f"x{i}{j}" for j in range(1, self.m + 1) for i in range(1, n + 1))
        if role == "w":
            return default_w_vars(self.m)
        return default_x_vars(self.m)

    def homogeneity(self, n: int) -> int:
        if self.kind == "conjugation":
            return n
        if self.kind in ("natural", "scalar"):
            return 1
        return 0

    def det_power(self, n: int) -> int:
        return 1 if self.kind == "conjugation" else 0

    def operator(self, g: Matrix, adj_g: Matrix) -> Matrix:
        """Numerator matrix N with action = N / det^det_power, block per copy."""
        n = g.rows
        like = g.entries[0][0]
        if self.kind == "trivial":
            return Matrix.identity(self.m, like)
        if self.kind == "scalar":
            if n != 1:
                raise ActionError("scalar template requires a 1x1 generic element")
            s = g.entries[0][0]
            zero = like.ring_zero()
            return Matrix([[s if i == j else zero for j in range(self.m)]
                           for i in range(self.m)])
        if self.kind == "natural":
            block = g
        elif self.kind == "conjugation":
            # coordinates a_{ij} row-major: (g A adj_g)_{ij} = sum g_{ik} a_{kl} adj_{lj}
            entries = []
            for i in range(n):
                for j in range(n):
                    row = []
                    for k in range(n):
                        for l in range(n):
                            row.append(g.entries[i][k] * adj_g.entries[l][j])
                    entries.append(row)
            block = Matrix(entries)
        else:
            raise ActionError(f"unknown action template {self.kind!r}")
        size = block.rows
        zero = like.ring_zero()
        total = size * self.m
        out = [[zero] * total for _ in range(total)]
        for c in range(self.m):
            for i in range(size):
                for j in range(size):
                    out[c * size + i][c * size + j] = block.entries[i][j]
        return Matrix(out)


def generic_matrix(n: int, vars: tuple[str, ...], prefix: str = "g",
                   field: PrimeField | None = None) -> Matrix:
    return Matrix([[Poly.var(f"{prefix}{i}{j}", vars, field)
                    for j in range(1, n + 1)] for i in range(1, n + 1)])


class SymbolicGroupAction:
    """The generic element of GL_n acting through declared templates.

    The X- and W-side action matrices are stored cleared: a numerator matrix
    of polynomials in the g-variables together with the power of ``det(g)``
    it is implicitly divided by.  All identity checks compare cleared
    polynomials, never rational functions.
    """

    is_finite = False

    def __init__(self, n: int, x_spec: TemplateSpec, w_spec: TemplateSpec,
                 field: PrimeField | None = None):
        self.n = n
        self.x_spec = x_spec
        self.w_spec = w_spec
        self.field = field
        self.g_vars = tuple(f"g{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1))
        self.x_vars = x_spec.var_names(n, "x")
        self.w_vars = w_spec.var_names(n, "w")
        if set(self.x_vars) & set(self.w_vars):
            raise ActionError("X and W variable names overlap")
        if (set(self.x_vars) | set(self.w_vars)) & set(self.g_vars):
            raise ActionError("space variables collide with g-variables")

        g = generic_matrix(n, self.g_vars, "g", field)
        self.g_mat = g
        self.det_poly = g.det()
        adj = g.adjugate()
        self.adj_mat = adj

        self.x_num = x_spec.operator(g, adj)          # action = x_num / det^x_detpow
        self.x_detpow = x_spec.det_power(n)
        self.w_num = w_spec.operator(g, adj)
        self.w_detpow = w_spec.det_power(n)
        # inverse action = template(adj g) / det^{h - p}: substituting
        # g^{-1} = adj(g)/det into an h-homogeneous template.
        adj_of_adj = adj.adjugate()
        self.x_inv_num = x_spec.operator(adj, adj_of_adj)
        self.x_inv_detpow = x_spec.homogeneity(n) - self.x_detpow
        self.w_inv_num = w_spec.operator(adj, adj_of_adj)
        self.w_inv_detpow = w_spec.homogeneity(n) - self.w_detpow
        self._check_construction()

    # -- sanity at construction ------------------------------------------------

    def _identity_point(self) -> dict[str, int]:
        return {f"g{i}{j}": (1 if i == j else 0)
                for i in range(1, self.n + 1) for j in range(1, self.n + 1)}

    def _check_construction(self):
        ident = self._identity_point()
        for num, size in ((self.x_num, len(self.x_vars)), (self.w_num, len(self.w_vars))):
            for i in range(size):
                for j in range(size):
                    val = num.entries[i][j].eval(ident)
                    expect = field_one(self.field) if i == j else 0
                    if val != expect:
                        raise ActionError("template does not specialize to the "
                                          "identity at g = id")
        # x_num(g) * x_num(adj g) must equal a det power times the identity
        for num, inv_num, p, q in ((self.x_num, self.x_inv_num, self.x_detpow,
                                    self.x_inv_detpow),
                                   (self.w_num, self.w_inv_num, self.w_detpow,
                                    self.w_inv_detpow)):
            prod = num * inv_num
            size = prod.rows
            factor = self.det_poly ** (p + q)
            ident_m = Matrix.identity(size, self.det_poly).scale(factor)
            if prod != ident_m:
                raise ActionError("inverse template check failed")

    # -- dimensions --------------------------------------------------------------

    @property
    def x_dim(self) -> int:
        return len(self.x_vars)

    @property
    def w_dim(self) -> int:
        return len(self.w_vars)

    @property
    def xg_vars(self) -> tuple[str, ...]:
        return self.x_vars + self.g_vars

    @property
    def xwg_vars(self) -> tuple[str, ...]:
        return self.x_vars + self.w_vars + self.g_vars

    # -- cleared actions -----------------------------------------------------------

    def _linear_images(self, num: Matrix, space_vars: tuple[str, ...],
                       out_vars: tuple[str, ...]) -> list[Poly]:
        imgs = []
        for k in range(len(space_vars)):
            acc = Poly.zero(out_vars, self.field)
            for l, name in enumerate(space_vars):
                c = num.entries[k][l]
                if c:
                    acc = acc + c.embed(out_vars) * Poly.var(name, out_vars, self.field)
            imgs.append(acc)
        return imgs

    def act_cleared(self, p: Poly, side: str = "x", inverse: bool = True,
                    out_vars: tuple[str, ...] | None = None) -> tuple[Poly, int]:
        """Apply the generic substitution to p with determinant powers cleared.

        Returns (num, k) with the substituted function equal to num / det^k.
        ``inverse=True`` gives the function action p(g^{-1} x) (and, with
        side ``xw``, p(g^{-1} x, g_W^{-1} w)); ``inverse=False`` substitutes
        the forward point maps instead.
        """
        spaces: list[tuple[tuple[str, ...], Matrix, int]] = []
        if side in ("x", "xw"):
            spaces.append((self.x_vars,
                           self.x_inv_num if inverse else self.x_num,
                           self.x_inv_detpow if inverse else self.x_detpow))
        if side in ("w", "xw"):
            spaces.append((self.w_vars,
                           self.w_inv_num if inverse else self.w_num,
                           self.w_inv_detpow if inverse else self.w_detpow))
        if not spaces:
            raise ActionError(f"unknown side {side!r}")
        out_vars = out_vars or tuple(dict.fromkeys(p.vars + self.g_vars))
        allowed = set().union(*(set(s[0]) for s in spaces))
        if not set(p.support_vars()) <= allowed:
            raise DimensionError("polynomial does not live on the declared space")
        table: dict[str, Poly] = {}
        space_of: dict[str, int] = {}
        for s_idx, (space_vars, num, _) in enumerate(spaces):
            images = self._linear_images(num, space_vars, out_vars)
            for name, img in zip(space_vars, images):
                table[name] = img
                space_of[name] = s_idx
        p_emb = p.embed(out_vars) if p.vars != out_vars else p
        # per-space maximal degrees fix the shared denominator det^k
        max_deg = [0] * len(spaces)
        for exps in p_emb.terms:
            per = [0] * len(spaces)
            for name, e in zip(out_vars, exps):
                if e and name in space_of:
                    per[space_of[name]] += e
            for s_idx in range(len(spaces)):
                max_deg[s_idx] = max(max_deg[s_idx], per[s_idx])
        k_total = sum(m * s[2] for m, s in zip(max_deg, spaces))
        det = self.det_poly.embed(out_vars)
        det_powers: dict[int, Poly] = {0: Poly.one(out_vars, self.field)}

        def det_pow(k: int) -> Poly:
            if k not in det_powers:
                det_powers[k] = det ** k
            return det_powers[k]

        powers: dict[str, dict[int, Poly]] = {}
        total = Poly.zero(out_vars, self.field)
        for exps, coeff in p_emb.terms.items():
            term = Poly.const(coeff, out_vars, self.field)
            per = [0] * len(spaces)
            for name, e in zip(out_vars, exps):
                if not e:
                    continue
                if name not in table:
                    term = term * Poly.var(name, out_vars, self.field) ** e
                    continue
                cache = powers.setdefault(name, {})
                if e not in cache:
                    cache[e] = table[name] ** e
                term = term * cache[e]
                per[space_of[name]] += e
            pad = sum((m - d) * s[2] for m, d, s in zip(max_deg, per, spaces))
            if pad:
                term = term * det_pow(pad)
            total = total + term
        return total, k_total

    def act_on_poly(self, p: Poly | RatFn, side: str = "x") -> RatFn:
        """Function action by the generic element, as a rational function
        in the space variables extended by the g-variables."""
        out_vars = tuple(dict.fromkeys(p.vars + self.g_vars))
        if isinstance(p, RatFn):
            num_n, kn = self.act_cleared(p.num, side, out_vars=out_vars)
            den_n, kd = self.act_cleared(p.den, side, out_vars=out_vars)
            det = self.det_poly.embed(out_vars)
            return RatFn(num_n * det ** kd, den_n * det ** kn)
        num, k = self.act_cleared(p, side, out_vars=out_vars)
        det = self.det_poly.embed(out_vars)
        return RatFn(num, det ** k)

    # -- rational specializations ----------------------------------------------

    def specialize(self, mat: QMat) -> tuple[Matrix, Matrix]:
        """X- and W-action matrices of a concrete invertible matrix, over
        constant polynomials in the X-ring."""
        mat = qmat(mat, self.field)
        det = qmat_det(mat, self.field)
        if not det:
            raise ActionError("specialization matrix is not invertible")
        point = {f"g{i}{j}": mat[i - 1][j - 1]
                 for i in range(1, self.n + 1) for j in range(1, self.n + 1)}
        inv_scale = field_one(self.field) / det

        def eval_num(num: Matrix, detpow: int) -> Matrix:
            scale = inv_scale ** detpow
            return Matrix([[Poly.const(num.entries[i][j].eval(point) * scale,
                                       self.x_vars, self.field)
                            for j in range(num.cols)] for i in range(num.rows)])

        return eval_num(self.x_num, self.x_detpow), eval_num(self.w_num, self.w_detpow)

    def describe(self) -> str:
        return (f"generic GL_{self.n} element ({self.x_spec.kind} on X, "
                f"{self.w_spec.kind} on W)")


_TEMPLATES = {"gl_conjugation": "conjugation", "gl_natural": "natural",
              "scalar": "scalar", "trivial": "trivial"}


def symbolic_general_linear(n: int, x_template: str, w_template: str,
                            x_copies: int = 1, w_copies: int = 1,
                            field: PrimeField | None = None) -> SymbolicGroupAction:
    """Build a symbolic action from named templates.

    Template names: ``gl_conjugation`` (simultaneous conjugation on tuples of
    n x n matrices), ``gl_natural`` (tuples of column vectors), ``scalar``
    (n = 1 scaling), ``trivial``.
    """
    for name in (x_template, w_template):
        if name not in _TEMPLATES:
            raise ActionError(
                f"unknown template {name!r}; expected one of {sorted(_TEMPLATES)}")
    x_spec = TemplateSpec(_TEMPLATES[x_template], x_copies)
    w_spec = TemplateSpec(_TEMPLATES[w_template], w_copies)
    return SymbolicGroupAction(n, x_spec, w_spec, field)


GroupAction = FiniteGroupAction | SymbolicGroupAction


# ---------------------------------------------------------------------------
# characters
# ---------------------------------------------------------------------------


class Character:
    """A multiplicative character of the group model.

    Finite model: a table of nonzero field values aligned with the element
    indices.  Symbolic model: a rational function of the g-variables (in
    practice, a power of det(g)).
    """

    def __init__(self, action: GroupAction, table: list | None = None,
                 ratfn: RatFn | None = None):
        self.action = action
        if action.is_finite:
            if table is None:
                raise ActionError("finite characters need a value table")
            if len(table) != action.order:
                raise DimensionError("character table length mismatch")
            if any(not v for v in table):
                raise ActionError("character values must be nonzero")
            self.table = list(table)
            self.ratfn = None
        else:
            if ratfn is None:
                raise ActionError("symbolic characters need a rational function")
            if not set(ratfn.support_vars()) <= set(action.g_vars):
                raise ActionError("symbolic character must depend only on the "
                                  "g-variables")
            self.table = None
            self.ratfn = ratfn

    @classmethod
    def trivial(cls, action: GroupAction) -> "Character":
        if action.is_finite:
            return cls(action, table=[field_one(action.field)] * action.order)
        return cls(action, ratfn=RatFn.one(action.g_vars, action.field))

    def value(self, i: int):
        return self.table[i]

    def is_trivial(self) -> bool:
        if self.table is not None:
            one = field_one(self.action.field)
            return all(v == one for v in self.table)
        return self.ratfn == 1

    def __eq__(self, other):
        if not isinstance(other, Character):
            return NotImplemented
        if self.table is not None and other.table is not None:
            return self.table == other.table
        if self.ratfn is not None and other.ratfn is not None:
            return self.ratfn == other.ratfn
        return False

    __hash__ = None

    def check_multiplicative(self) -> bool:
        """theta(gh) = theta(g) theta(h); all pairs for finite groups, a
        two-generic-element polynomial identity for symbolic ones."""
        action = self.action
        if action.is_finite:
            ident_ok = self.table[action.identity] == field_one(action.field)
            return ident_ok and all(
                self.table[action.mul(i, j)] == self.table[i] * self.table[j]
                for i in range(action.order) for j in range(action.order))
        n = action.n
        h_vars = tuple(f"h{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1))
        ring = action.g_vars + h_vars
        g = generic_matrix(n, ring, "g", action.field)
        h = generic_matrix(n, ring, "h", action.field)
        gh = g * h
        theta = self.ratfn.embed(ring)

        def at(mat: Matrix) -> RatFn:
            images = {f"g{i}{j}": mat.entries[i - 1][j - 1]
                      for i in range(1, n + 1) for j in range(1, n + 1)}
            return theta.subs(images, ring)

        ident_point = {v: 0 for v in ring}
        for i in range(1, n + 1):
            ident_point[f"g{i}{i}"] = 1
            ident_point[f"h{i}{i}"] = 1
        at_identity = self.ratfn.eval({v: (1 if v[1] == v[2] and v[0] == "g" else 0)
                                       for v in action.g_vars})
        return (at(gh) == at(g) * at(h)) and at_identity == field_one(action.field)

    def __str__(self):
        if self.table is not None:
            return "[" + ", ".join(str(v) for v in self.table) + "]"
        return str(self.ratfn)

    def __repr__(self):
        return f"Character({self})"


def det_w_inverse_character(action: GroupAction) -> Character:
    """The character g -> det(g_W)^{-1} attached to determinant invariants."""
    if action.is_finite:
        one = field_one(action.field)
        return Character(action, table=[one / qmat_det(m, action.field)
                                        for m in action.w_mats])
    det_w = action.w_num.det()  # Poly in g-vars
    power = action.w_detpow * action.w_dim
    theta = RatFn(action.det_poly ** power, det_w)
    return Character(action, ratfn=theta)


# ---------------------------------------------------------------------------
# product spaces (X x Y with the same group)
# ---------------------------------------------------------------------------


def extend_finite_action(action: FiniteGroupAction, y_vars: tuple[str, ...],
                         y_mats: list[QMat]) -> FiniteGroupAction:
    """Product action on X x Y: same elements, block-diagonal x-matrices.

    ``y_mats`` must be aligned with the element indices of ``action``.
    """
    if len(y_mats) != action.order:
        raise DimensionError("need one Y-matrix per group element")
    y_vars = tuple(y_vars)
    if set(y_vars) & (set(action.x_vars) | set(action.w_vars)):
        raise ActionError("variable-name collision between X and Y")
    ny = len(y_vars)
    zero = Fraction(0) if action.field is None else action.field.zero
    new_mats = []
    for m, y in zip(action.x_mats, y_mats):
        y = qmat(y, action.field)
        if len(y) != ny or any(len(r) != ny for r in y):
            raise DimensionError("Y-matrix size does not match y_vars")
        nx = len(m)
        top = [tuple(row) + (zero,) * ny for row in m]
        bottom = [(zero,) * nx + tuple(row) for row in y]
        new_mats.append(tuple(top + bottom))
    return FiniteGroupAction(new_mats, action.w_mats, action.x_vars + y_vars,
                             action.w_vars, action.generators, action.field)
