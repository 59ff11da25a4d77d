"""Command-line front end.

Problem files are JSON.  Matrices are row-major arrays of rational strings,
polynomials are strings in the canonical grammar, symbolic groups are named
by template.  See README.md for the full schema.

Exit codes: 0 every check passed; 1 a mathematical check failed (dependence,
refuted equivariance, failed verification); 2 usage errors (bad arguments,
missing or malformed files, dimension or reference errors).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field as dc_field
from importlib import resources

from .action import (
    ActionError,
    Character,
    FiniteGroupAction,
    GroupAction,
    SymbolicGroupAction,
    make_finite_group,
    symbolic_general_linear,
)
from .covariant import (
    Covariant,
    CovariantError,
    DependentCovariantsError,
    RelativeInvariant,
    generic_independence,
    verify_equivariance,
)
from .exactalg import (
    DimensionError,
    ExactAlgError,
    Matrix,
    ParseError,
    Poly,
    PrimeField,
    RatFn,
)
from .forge import (
    GenerationExhaustedError,
    clear_denominators,
    example_family,
    generate_covariants,
)
from .noname import NoNameMap, build_isomorphism, verify_isomorphism
from .reflect import (
    BridgeFlags,
    IndependenceCertificate,
    Reflection,
    Relation,
    XSpaceFlags,
    find_reflections,
    lower_relation,
    module_independence_verdict,
    relation_over_function_field,
    relative_invariant_relation,
)
from .report import Report

USAGE_EXIT = 2
MATH_EXIT = 1


class ProblemError(ExactAlgError):
    """A problem file is malformed; message carries the offending field."""


@dataclass
class ProblemFile:
    """Validated problem description."""

    group: GroupAction
    covariants: list[Covariant] = dc_field(default_factory=list)
    raw: dict = dc_field(default_factory=dict)
    path: str = ""

    @property
    def hypotheses(self) -> dict:
        return self.raw.get("hypotheses", {})

    def canonical_text(self) -> str:
        """Canonical serialization; parsing then serializing a canonical
        file reproduces it byte for byte."""
        return json.dumps(self.raw, indent=2, sort_keys=True) + "\n"


def _expect(cond: bool, message: str):
    if not cond:
        raise ProblemError(message)


def _parse_field(raw: dict) -> PrimeField | None:
    block = raw.get("field")
    if block is None:
        return None
    _expect(isinstance(block, dict) and "prime" in block,
            "field: expected an object with a 'prime' entry")
    return PrimeField(int(block["prime"]))


def _parse_matrix(rows, where: str) -> list[list[str]]:
    _expect(isinstance(rows, list) and rows and all(isinstance(r, list) for r in rows),
            f"{where}: expected a non-empty array of rows")
    width = len(rows[0])
    for i, r in enumerate(rows):
        _expect(len(r) == width, f"{where}: row {i} has {len(r)} entries, expected {width}")
    _expect(len(rows) == width, f"{where}: matrix must be square "
            f"({len(rows)}x{width} given)")
    return [[str(x) for x in r] for r in rows]


def parse_problem(source: str | dict, path: str = "") -> ProblemFile:
    """Load and validate a problem file (path, preset name, or dict)."""
    if isinstance(source, dict):
        raw = source
    else:
        text, path = _read_problem_text(source)
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ProblemError(f"invalid JSON: {exc}") from None
    _expect(isinstance(raw, dict), "top level: expected a JSON object")
    field = _parse_field(raw)
    group_block = raw.get("group")
    _expect(isinstance(group_block, dict), "group: required object missing")
    kind = group_block.get("type")
    space = raw.get("space", {})
    if kind == "finite":
        gens_block = group_block.get("generators")
        _expect(isinstance(gens_block, list) and gens_block,
                "group.generators: non-empty array required")
        gens = []
        for k, pair in enumerate(gens_block):
            _expect(isinstance(pair, dict) and "x" in pair and "w" in pair,
                    f"group.generators[{k}]: expected an object with 'x' and 'w'")
            gens.append((_parse_matrix(pair["x"], f"group.generators[{k}].x"),
                         _parse_matrix(pair["w"], f"group.generators[{k}].w")))
        x_vars = tuple(space.get("x_vars", ())) or None
        w_vars = tuple(space.get("w_vars", ())) or None
        try:
            group = make_finite_group(gens, x_vars=x_vars, w_vars=w_vars,
                                      max_order=int(group_block.get("max_order", 10_000)),
                                      field=field)
        except (ActionError, DimensionError) as exc:
            raise ProblemError(f"group: {exc}") from None
    elif kind == "symbolic":
        for key in ("n", "x_template", "w_template"):
            _expect(key in group_block, f"group.{key}: required for symbolic groups")
        try:
            group = symbolic_general_linear(
                int(group_block["n"]), group_block["x_template"],
                group_block["w_template"],
                x_copies=int(group_block.get("x_copies", 1)),
                w_copies=int(group_block.get("w_copies", 1)), field=field)
        except (ActionError, DimensionError) as exc:
            raise ProblemError(f"group: {exc}") from None
        if space.get("x_vars"):
            _expect(tuple(space["x_vars"]) == group.x_vars,
                    "space.x_vars: does not match the template's variables "
                    f"{list(group.x_vars)}")
        if space.get("w_vars"):
            _expect(tuple(space["w_vars"]) == group.w_vars,
                    "space.w_vars: does not match the template's variables "
                    f"{list(group.w_vars)}")
    else:
        raise ProblemError("group.type: must be 'finite' or 'symbolic'")

    covariants = []
    cov_block = raw.get("covariants", [])
    _expect(isinstance(cov_block, list), "covariants: expected an array")
    for k, coords in enumerate(cov_block):
        _expect(isinstance(coords, list) and len(coords) == group.w_dim,
                f"covariants[{k}]: expected {group.w_dim} coordinate strings")
        parsed = []
        for c_idx, text in enumerate(coords):
            try:
                parsed.append(RatFn.parse(str(text), group.x_vars, group.field))
            except ParseError as exc:
                raise ProblemError(
                    f"covariants[{k}][{c_idx}]: {exc}") from None
        parsed = [p.as_poly() if p.is_poly() else p for p in parsed]
        covariants.append(Covariant(group, parsed))

    family = raw.get("family")
    if family is not None:
        _expect(isinstance(family, dict) and "name" in family,
                "family: expected an object with a 'name'")
        _expect(not covariants, "covariants and family cannot both be given")
        covariants = _family_from_block(family, group)

    return ProblemFile(group, covariants, raw, path)


def _family_from_block(block: dict, group: GroupAction) -> list[Covariant]:
    name = block["name"]
    params = {k: v for k, v in block.items() if k != "name"}
    if name == "matrix_words":
        words = params.get("words")
        if words is not None:
            words = [tuple(int(x) for x in w) for w in words]
        fam = example_family("matrix_words", n=int(params["n"]), words=words,
                             verify=params.get("verify", "auto"))
    elif name == "projections":
        fam = example_family("projections", n=int(params["n"]), m=int(params["m"]))
    elif name == "power_maps":
        powers = params.get("powers")
        group_arg = group if isinstance(group, FiniteGroupAction) else None
        fam = example_family("power_maps", n=int(params["n"]),
                             powers=[int(p) for p in powers] if powers else None,
                             group=group_arg)
    else:
        raise ProblemError(f"family.name: unknown family {name!r}")
    _expect(fam[0].action.x_vars == group.x_vars
            and fam[0].action.w_vars == group.w_vars,
            "family: generated family does not live on the declared spaces")
    if fam[0].action is not group:
        # rebuild on the problem's group object so later ops share one action
        fam = [Covariant(group, F.coords, F.status) for F in fam]
    return fam


def _read_problem_text(source: str) -> tuple[str, str]:
    import os

    if os.path.exists(source):
        with open(source, "r", encoding="utf-8") as fh:
            return fh.read(), source
    name = source if source.endswith(".json") else source + ".json"
    try:
        ref = resources.files("covar").joinpath("presets").joinpath(name)
        if ref.is_file():
            return ref.read_text(encoding="utf-8"), f"preset:{name}"
    except (FileNotFoundError, ModuleNotFoundError):
        pass
    raise ProblemError(f"no such problem file or preset: {source}")


def list_presets() -> list[str]:
    out = []
    for entry in resources.files("covar").joinpath("presets").iterdir():
        if entry.name.endswith(".json"):
            out.append(entry.name[:-5])
    return sorted(out)


# ---------------------------------------------------------------------------
# serialization of results
# ---------------------------------------------------------------------------


def _serialize_group(problem: ProblemFile) -> dict:
    block = dict(problem.raw.get("group", {}))
    return block


def _serialize_space(group: GroupAction) -> dict:
    return {"x_vars": list(group.x_vars), "w_vars": list(group.w_vars)}


def _serialize_weight(weight: Character) -> dict:
    if weight.table is not None:
        return {"type": "finite", "values": [str(v) for v in weight.table]}
    return {"type": "symbolic", "value": str(weight.ratfn)}


def _parse_weight(block: dict, group: GroupAction) -> Character:
    if block.get("type") == "finite":
        from .exactalg import lift_coeff
        values = [lift_coeff(v, group.field) for v in block["values"]]
        return Character(group, table=values)
    return Character(group, ratfn=RatFn.parse(block["value"], group.g_vars, group.field))


def certificate_payload(m: NoNameMap, problem: ProblemFile, report: Report) -> dict:
    return {
        "kind": "noname-certificate",
        "group": _serialize_group(problem),
        "space": _serialize_space(m.action),
        "field": problem.raw.get("field"),
        "f": str(m.f),
        "weight": _serialize_weight(m.invariant.weight),
        "phi": [[str(e) for e in row] for row in m.phi.entries],
        "phi_inv": [[str(e) for e in row] for row in m.phi_inv.entries],
        "covariants": [[str(c) for c in F.coords] for F in m.covariants],
        "out_vars": list(m.out_vars),
        "checks": [c.to_dict() for c in report.checks],
    }


def load_certificate(path: str) -> tuple[NoNameMap, ProblemFile]:
    text, path = _read_problem_text(path)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"invalid JSON: {exc}") from None
    _expect(raw.get("kind") == "noname-certificate",
            "kind: expected 'noname-certificate'")
    problem = parse_problem({"group": raw["group"], "space": raw.get("space", {}),
                             "field": raw.get("field")}, path)
    group = problem.group
    f = RatFn.parse(raw["f"], group.x_vars, group.field)
    f = f.as_poly() if f.is_poly() else f
    weight = _parse_weight(raw["weight"], group)
    phi = Matrix([[RatFn.parse(e, group.x_vars, group.field) for e in row]
                  for row in raw["phi"]])
    phi_inv_entries = [[RatFn.parse(e, group.x_vars, group.field) for e in row]
                       for row in raw["phi_inv"]]
    phi_inv = Matrix([[e.as_poly() if e.is_poly() else e for e in row]
                      for row in phi_inv_entries])
    covs = []
    for coords in raw.get("covariants", []):
        parsed = [RatFn.parse(c, group.x_vars, group.field) for c in coords]
        parsed = [p.as_poly() if p.is_poly() else p for p in parsed]
        covs.append(Covariant(group, parsed))
    invariant = RelativeInvariant(f, weight, group)
    out_vars = tuple(raw.get("out_vars", ()))
    if not out_vars:
        from .noname import _pick_out_vars
        out_vars = _pick_out_vars(group, phi.rows)
    m = NoNameMap(group, invariant, phi, phi_inv, group.w_vars, out_vars, covs)
    return m, problem


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _note_assumptions(report: Report, problem: ProblemFile) -> None:
    """Record caller-side hypotheses the library cannot decide."""
    notes = []
    if problem.group.field is not None:
        notes.append("positive characteristic: generic separability of the "
                     "action is assumed, not verified")
    if problem.hypotheses.get("note"):
        notes.append(str(problem.hypotheses["note"]))
    if notes:
        report.data["assumptions"] = notes


def _emit(report: Report, args, extra: dict | None = None) -> None:
    if args.format == "machine":
        payload = {"report": report.to_dict()}
        if extra:
            payload.update(extra)
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(report.render_text())
        if extra and "certificate_path" in extra:
            print(f"certificate written to {extra['certificate_path']}")


def _write_out(args, payload: dict) -> dict:
    if not args.out:
        return {}
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {"certificate_path": args.out}


def _need_covariants(problem: ProblemFile) -> list[Covariant]:
    if not problem.covariants:
        raise ProblemError("this command needs covariants (or a family) "
                           "in the problem file")
    return problem.covariants


def cmd_verify(args) -> int:
    problem = parse_problem(args.problem)
    Fs = _need_covariants(problem)
    report = Report("equivariance of the covariant family")
    for i, F in enumerate(Fs):
        if F.status == "equivariant":
            # already certified while building the family (e.g. word products
            # through the algebra-morphism route); do not redo the slow path
            report.add(f"covariant_{i + 1}_equivariant", True,
                       "certified during family construction")
            continue
        sub = verify_equivariance(F)
        check = sub.checks[0]
        report.add(f"covariant_{i + 1}_equivariant", check.passed, check.detail,
                   check.witness)
        report.seconds += sub.seconds
    report.data["count"] = len(Fs)
    _note_assumptions(report, problem)
    _emit(report, args)
    return 0 if report.ok else MATH_EXIT


def cmd_independence(args) -> int:
    problem = parse_problem(args.problem)
    Fs = _need_covariants(problem)
    for F in Fs:
        verify_equivariance(F)
    report = generic_independence(Fs, seed=args.seed)
    _note_assumptions(report, problem)
    _emit(report, args)
    return 0 if report.ok else MATH_EXIT


def cmd_noname_build(args) -> int:
    problem = parse_problem(args.problem)
    Fs = _need_covariants(problem)
    for i, F in enumerate(Fs):
        rep = verify_equivariance(F)
        if not rep.ok:
            out = Report("no-name construction")
            out.add("covariants_equivariant", False,
                    f"covariant {i + 1} is not equivariant")
            _emit(out, args)
            return MATH_EXIT
    try:
        m = build_isomorphism(Fs)
    except DependentCovariantsError as exc:
        out = Report("no-name construction")
        out.add("covariants_independent", False, str(exc))
        _emit(out, args)
        return MATH_EXIT
    report = verify_isomorphism(m)
    report.title = "no-name construction"
    report.data["weight"] = str(m.invariant.weight)
    _note_assumptions(report, problem)
    payload = certificate_payload(m, problem, report)
    extra = _write_out(args, payload)
    if args.format == "machine":
        extra["certificate"] = payload
    _emit(report, args, extra)
    return 0 if report.ok else MATH_EXIT


def cmd_noname_verify(args) -> int:
    m, _problem = load_certificate(args.problem)
    report = verify_isomorphism(m)
    _emit(report, args)
    return 0 if report.ok else MATH_EXIT


def cmd_generate(args) -> int:
    problem = parse_problem(args.problem)
    if not isinstance(problem.group, FiniteGroupAction):
        raise ProblemError("generate works on finite groups only")
    report = Report("covariant generation")
    try:
        fam = generate_covariants(problem.group, args.degree_bound)
    except GenerationExhaustedError as exc:
        report.add("full_family_found", False, str(exc))
        report.data["achieved_rank"] = exc.achieved_rank
        report.data["covariants"] = [[str(c) for c in F.coords] for F in exc.found]
        _emit(report, args)
        return MATH_EXIT
    rep_ind = generic_independence(fam, seed=args.seed)
    report.add("full_family_found", True,
               f"{len(fam)} generically independent covariants")
    report.add("family_independent", rep_ind.ok)
    report.data["covariants"] = [[str(c) for c in F.coords] for F in fam]
    report.data.update({k: v for k, v in rep_ind.data.items()
                        if k in ("rank", "witness_point", "witness_minor")})
    _note_assumptions(report, problem)
    _write_out(args, {"kind": "covariant-family",
                      "covariants": report.data["covariants"]})
    _emit(report, args)
    return 0 if report.ok else MATH_EXIT


def cmd_clear(args) -> int:
    problem = parse_problem(args.problem)
    Fs = _need_covariants(problem)
    if not isinstance(problem.group, FiniteGroupAction):
        raise ProblemError("clear works on finite groups only")
    for F in Fs:
        rep = verify_equivariance(F)
        if not rep.ok:
            raise ProblemError("clear requires equivariant covariants")
    before = generic_independence(Fs, seed=args.seed)
    f, cleared = clear_denominators(Fs, problem.group)
    after = generic_independence(cleared, seed=args.seed)
    report = Report("denominator clearing")
    report.add("integral_outputs", all(not F.is_rational for F in cleared))
    report.add("factor_is_absolute_invariant", True, f"f = {f}")
    report.add("independence_preserved",
               before.data["verdict"] == after.data["verdict"],
               f"before: {before.data['verdict']}, after: {after.data['verdict']}")
    report.data["f"] = str(f)
    report.data["covariants"] = [[str(c) for c in F.coords] for F in cleared]
    _note_assumptions(report, problem)
    _emit(report, args)
    return 0 if report.ok else MATH_EXIT


def cmd_relation(args) -> int:
    problem = parse_problem(args.problem)
    Fs = _need_covariants(problem)
    for F in Fs:
        verify_equivariance(F)
    report = Report("relation over the function field")
    found = relation_over_function_field(Fs)
    if isinstance(found, IndependenceCertificate):
        report.add("relation_or_certificate", True,
                   f"independent; certificate {found}")
        report.data["outcome"] = "independent"
        report.data["certificate_minor"] = str(found.minor)
        _emit(report, args)
        return 0
    report.data["outcome"] = "relation"
    report.data["coefficients"] = [str(h) for h in found.coeffs]
    report.add("relation_or_certificate", found.verified,
               "kernel relation verified by expansion")
    hyp = problem.hypotheses
    if hyp.get("factorial_affine") and hyp.get("scalar_units"):
        flags = XSpaceFlags(True, True, hyp.get("note", ""))
        cleared = relative_invariant_relation(Fs, flags)
        report.add("relative_invariant_coefficients", cleared.verified,
                   "coefficients are relative invariants of one weight")
        report.data["invariant_coefficients"] = [str(h) for h in cleared.coeffs]
    _note_assumptions(report, problem)
    _emit(report, args)
    return 0 if report.ok else MATH_EXIT


def _reflection_from_block(block, group: FiniteGroupAction) -> Reflection:
    refls = find_reflections(group)
    if block is None:
        raise ProblemError("lower needs a 'reflection' object in the problem file")
    if "element" in block:
        idx = int(block["element"])
        for r in refls:
            if r.element == idx:
                return r
        raise ProblemError(f"reflection.element: element {idx} does not fix a "
                           "hyperplane pointwise")
    if "x" in block:
        from .exactalg import qmat
        mat = qmat(_parse_matrix(block["x"], "reflection.x"), group.field)
        for r in refls:
            if group.x_mats[r.element] == mat:
                return r
        raise ProblemError("reflection.x: matrix is not a reflection of the group")
    raise ProblemError("reflection: expected 'element' or 'x'")


def cmd_lower(args) -> int:
    problem = parse_problem(args.problem)
    Fs = _need_covariants(problem)
    if not isinstance(problem.group, FiniteGroupAction):
        raise ProblemError("lower works on finite groups only")
    for F in Fs:
        verify_equivariance(F)
    rel_block = problem.raw.get("relation")
    if not isinstance(rel_block, list) or len(rel_block) != len(Fs):
        raise ProblemError("relation: expected one coefficient string per covariant")
    coeffs = [Poly.parse(str(t), problem.group.x_vars, problem.group.field)
              for t in rel_block]
    rel = Relation(coeffs, Fs).verify()
    s = _reflection_from_block(problem.raw.get("reflection"), problem.group)
    lowered = lower_relation(rel, s)
    report = Report("reflection descent step")
    report.add("division_exact", True,
               f"hyperplane form {s.hyperplane_form} divides every difference")
    report.add("output_verified", lowered.verified)
    if not lowered.is_zero:
        report.add("degree_lowered", lowered.max_degree() < rel.max_degree(),
                   f"{rel.max_degree()} -> {lowered.max_degree()}")
    report.data["coefficients"] = [str(h) for h in lowered.coeffs]
    report.data["zero_relation"] = lowered.is_zero
    _note_assumptions(report, problem)
    _emit(report, args)
    return 0 if report.ok else MATH_EXIT


def cmd_module_verdict(args) -> int:
    problem = parse_problem(args.problem)
    Fs = _need_covariants(problem)
    for F in Fs:
        verify_equivariance(F)
    hyp = problem.hypotheses
    flags = BridgeFlags(bool(hyp.get("fraction_field")), bool(hyp.get("reflection")),
                        hyp.get("note", ""))
    report = module_independence_verdict(Fs, flags, seed=args.seed)
    _note_assumptions(report, problem)
    _emit(report, args)
    return 0 if report.ok else MATH_EXIT


def cmd_example(args) -> int:
    if args.problem is None:
        print("available presets:")
        for name in list_presets():
            print(f"  {name}")
        return 0
    problem = parse_problem(args.problem)
    Fs = _need_covariants(problem)
    report = Report("example family")
    report.add("family_built", True, f"{len(Fs)} covariants")
    report.data["covariants"] = [[str(c) for c in F.coords] for F in Fs]
    report.data["x_vars"] = list(problem.group.x_vars)
    report.data["w_vars"] = list(problem.group.w_vars)
    _emit(report, args)
    return 0


COMMANDS = {
    "verify": cmd_verify,
    "independence": cmd_independence,
    "noname-build": cmd_noname_build,
    "noname-verify": cmd_noname_verify,
    "generate": cmd_generate,
    "clear": cmd_clear,
    "relation": cmd_relation,
    "lower": cmd_lower,
    "module-verdict": cmd_module_verdict,
    "example": cmd_example,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covar",
        description="construct and verify explicit localized isomorphisms "
                    "from generically independent covariants")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        if name == "example":
            p.add_argument("problem", nargs="?", default=None,
                           help="problem file, preset name, or omit to list presets")
        else:
            p.add_argument("problem", help="problem file or preset name "
                           "(certificate file for noname-verify)")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for randomized witness search (default 0)")
        p.add_argument("--degree-bound", type=int, default=3, dest="degree_bound",
                       help="degree bound for generate (default 3)")
        p.add_argument("--out", default=None,
                       help="write the certificate / result payload to this path")
        p.add_argument("--format", choices=("text", "machine"), default="text",
                       help="report format on stdout")
        p.set_defaults(fn=fn)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ProblemError, ParseError, DimensionError, ActionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except ExactAlgError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return MATH_EXIT


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
