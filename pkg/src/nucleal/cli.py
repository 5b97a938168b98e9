"""Command-line front end.

Morphism files are JSON manifests {"schema", "category", "value"} or
bare module documents accompanied by --category.  Exit codes: 0 success
(documented findings included), 1 verification failures, 2 parse errors
or unknown suites, 3 shape mismatches, 4 invariant violations, 5
operations outside the distinguished or trace class.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from importlib import resources

from nucleal import cjsl, drelnum, finhilb, finrel, finstoch, pinj, xrel
from nucleal.core import harness, scalars
from nucleal.core.errors import (
    InvariantViolation,
    ParseError,
    ShapeMismatch,
    TraceClassError,
    UnsupportedCheck,
)

SCHEMA = "nucleal/1"
REPORT_SCHEMA = "nucleal-report/1"

EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_SHAPE = 3
EXIT_INVARIANT = 4
EXIT_CLASS = 5


class Category:
    """Per-instance hooks for file parsing and structure access."""

    def __init__(self, name, parse, dump, parse_obj, make):
        self.name = name
        self.parse = parse
        self.dump = dump
        self.parse_obj = parse_obj
        self.make = make
        self._made = None

    def structures(self):
        if self._made is None:
            self._made = self.make()
        return self._made


def _xrel_parse_obj(data):
    if not isinstance(data, dict) or "monoid" not in data or "object" not in data:
        raise ParseError("crossed-set object document needs monoid and object")
    mon = xrel.monoid_from_json(data["monoid"])
    return xrel.object_from_json(data["object"], mon)


def _hilb_parse_obj(data):
    if not isinstance(data, int) or isinstance(data, bool) or data < 0:
        raise ParseError("a dimension object must be a nonnegative integer")
    return data


CATEGORIES = {
    "finrel": Category(
        "finrel", finrel.from_json, finrel.to_json,
        finrel.finset_from_json, finrel.structures,
    ),
    "pinj": Category(
        "pinj", pinj.from_json, pinj.to_json,
        finrel.finset_from_json, pinj.structures,
    ),
    "xrel": Category(
        "xrel", xrel.from_json, xrel.to_json,
        _xrel_parse_obj, xrel.structures,
    ),
    "finhilb": Category(
        "finhilb", finhilb.from_json, finhilb.to_json,
        _hilb_parse_obj, finhilb.structures,
    ),
    "finstoch": Category(
        "finstoch", finstoch.from_json, finstoch.to_json,
        finstoch.space_from_json, finstoch.structures,
    ),
    "drelnum": Category(
        "drelnum", drelnum.from_json, drelnum.to_json,
        drelnum.interval_from_json, drelnum.structures,
    ),
    "cjsl": Category(
        "cjsl", cjsl.supmap_from_json, cjsl.supmap_to_json,
        cjsl.lattice_from_json, None,
    ),
}

SUITES = (
    "star-laws", "nuclear", "sliding", "traced", "trace-axioms",
    "param-trace", "cjsl-hr", "xrel-audit", "stoch-monad", "drel-numeric",
    "all",
)


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def _category_of(doc, flag_value):
    name = None
    if isinstance(doc, dict) and "category" in doc:
        name = doc["category"]
        if flag_value and flag_value != name:
            raise ParseError(
                f"file says category {name!r} but --category is {flag_value!r}"
            )
    else:
        name = flag_value
    if name is None:
        raise ParseError("no category: pass --category or use a manifest file")
    if name not in CATEGORIES:
        raise ParseError(f"unknown category {name!r}")
    return CATEGORIES[name]


def _payload(doc):
    if isinstance(doc, dict) and "value" in doc:
        return doc["value"]
    return doc


def _read_morphism(path, flag_value):
    doc = _load_json(path)
    cat = _category_of(doc, flag_value)
    return cat, cat.parse(_payload(doc))


def _read_object(path, cat: Category):
    doc = _load_json(path)
    return cat.parse_obj(_payload(doc))


def _write_out(doc, out):
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _manifest(cat: Category, value) -> dict:
    return {"schema": SCHEMA, "category": cat.name, "value": value}


def _render_trace(kind: str, value) -> str:
    # boolean traces print as the unit scalar they denote
    if kind == scalars.BOOL:
        return "id" if value else "0"
    return scalars.render(kind, value)


def fixtures_dir():
    override = os.environ.get("NUCLEAL_FIXTURES")
    if override:
        return override
    return str(resources.files("nucleal") / "fixtures")


def _fixture(name: str):
    return _load_json(os.path.join(fixtures_dir(), name))


# -- commands ---------------------------------------------------------------


def cmd_compose(args) -> int:
    cat, f = _read_morphism(args.f, args.category)
    cat2, g = _read_morphism(args.g, args.category or cat.name)
    if cat2 is not cat:
        raise ParseError("the two morphisms live in different categories")
    if cat.name == "cjsl":
        out = cjsl.compose_sup(f, g)
        _write_out(_manifest(cat, cat.dump(out)), args.out)
        return 0
    inst, _, _ = cat.structures()
    if not inst.obj_eq(inst.target(f), inst.source(g)):
        raise ShapeMismatch(
            "cannot compose: first target is "
            f"{inst.describe_obj(inst.target(f))}, second source is "
            f"{inst.describe_obj(inst.source(g))}"
        )
    out = inst.compose(g, f)
    _write_out(_manifest(cat, cat.dump(out)), args.out)
    return 0


def cmd_trace(args) -> int:
    cat, h = _read_morphism(args.h, args.category)
    if cat.name == "cjsl":
        raise UnsupportedCheck("the lattice instance carries no trace operator")
    inst, nuc, tr = cat.structures()
    if not inst.obj_eq(inst.source(h), inst.target(h)):
        raise ShapeMismatch(
            f"trace needs an endomorphism: source is "
            f"{inst.describe_obj(inst.source(h))}, target is "
            f"{inst.describe_obj(inst.target(h))}"
        )
    if args.tol is not None and hasattr(inst, "tol"):
        inst.tol = args.tol
    if tr.in_trace_class(h):
        print(_render_trace(inst.scalar_kind, tr.trace(h)))
        return 0
    found = harness.find_nuclear_factorization(inst, nuc, h, bound=args.bound)
    if found.found:
        value = nuc.derived_trace(found.left, found.right)
        print(_render_trace(inst.scalar_kind, value))
        print(
            f"derived from a factorization through "
            f"{inst.describe_obj(found.middle)}"
        )
        return 0
    detail = (
        "no nuclear factorization exists"
        if found.conclusive
        else f"no nuclear factorization found through middles of size <= {args.bound}"
    )
    raise TraceClassError(f"endomorphism is outside the trace class: {detail}")


def cmd_transpose(args) -> int:
    cat, m = _read_morphism(args.m, args.category)
    if cat.name in ("cjsl", "drelnum"):
        raise UnsupportedCheck(
            f"the {cat.name} instance has no transpose (no unit object)"
        )
    inst, nuc, _ = cat.structures()
    if args.inverse:
        if not args.left or not args.right:
            raise ParseError("--inverse needs --left and --right object files")
        a = _read_object(args.left, cat)
        b = _read_object(args.right, cat)
        out = nuc.theta_inv(m, a, b)
    else:
        if not nuc.is_nuclear(m):
            raise UnsupportedCheck(
                "morphism is not in the distinguished ideal; no transpose"
            )
        out = nuc.theta(m)
    _write_out(_manifest(cat, cat.dump(out)), args.out)
    return 0


def cmd_check_nuclear(args) -> int:
    cat, f = _read_morphism(args.f, args.category)
    if cat.name == "cjsl":
        bound = cjsl.BRUTE_FORCE_BOUND if args.bound is None else args.bound
        res = cjsl.hr_nuclear(f, bound=bound)
        if not res.conclusive:
            print("inconclusive: lattices exceed the brute-force bound")
        elif res.nuclear:
            kind = "sup-map" if res.witness_is_sup_map else "plain function"
            print(f"nuclear: yes (witness {list(res.witness_values)}, {kind})")
        else:
            print("nuclear: no (exhaustive witness search)")
        return 0
    inst, nuc, _ = cat.structures()
    if nuc.is_nuclear(f):
        print("nuclear: yes")
        return 0
    print("nuclear: no")
    if inst.obj_eq(inst.source(f), inst.target(f)):
        mid_bound = 3 if args.bound is None else args.bound
        found = harness.find_nuclear_factorization(inst, nuc, f, bound=mid_bound)
        if found.found:
            print(
                "but it factors through nuclear maps via "
                f"{inst.describe_obj(found.middle)}"
            )
        elif found.conclusive:
            print("and it admits no nuclear factorization")
        else:
            print(
                f"and no nuclear factorization was found "
                f"(middles of size <= {mid_bound})"
            )
    return 0


def cmd_disintegrate(args) -> int:
    cat, m = _read_morphism(args.m, args.category or "finstoch")
    if cat.name != "finstoch":
        raise ParseError("disintegrate applies to the stochastic instance only")
    q1, q2 = finstoch.disintegrate(m)
    doc = {
        "schema": SCHEMA,
        "category": "finstoch",
        "forward": finstoch.kernel_to_json(q1),
        "backward": finstoch.kernel_to_json(q2),
    }
    _write_out(doc, args.out)
    return 0


# -- verification suites ----------------------------------------------------


def _suite_instances():
    out = [finrel.structures(), pinj.structures()]
    for nmod in (2, 3, 4):
        out.append(xrel.structures(xrel.cyclic_monoid(nmod)))
    out.append(finhilb.structures())
    out.append(finstoch.structures())
    out.append(drelnum.structures())
    return out


def _xrel_audit_reports():
    doc = _fixture("z4_audit.json")
    mon = xrel.monoid_from_json(doc["monoid"])
    left = xrel.object_from_json(doc["left"], mon)
    right = xrel.object_from_json(doc["right"], mon)
    reports = [xrel.theta_bijectivity_report(left, right)]
    z2 = xrel.cyclic_monoid(2)
    small = [xrel.trivial_object(z2, ("p",), (d,)) for d in (0, 1)]
    small.append(xrel.trivial_object(z2, ("p", "q"), (0, 1)))
    for a in small:
        for b in small:
            reports.append(xrel.theta_bijectivity_report(a, b))
    return reports


def _stoch_monad_reports(budget, seed):
    doc = _fixture("massloss.json")
    f = finstoch.from_json(doc["first"])
    g = finstoch.from_json(doc["second"])
    return [
        finstoch.check_giry_laws(budget, seed),
        finstoch.mass_loss_report(f, g),
    ]


def _drel_numeric_reports(n, tol):
    doc = _fixture("gaussians.json")
    box = doc.get("interval", {})
    if (box.get("lo"), box.get("hi")) != (-1.0, 1.0):
        raise ParseError("gaussian fixtures must live on [-1, 1]")
    kparams = [tuple(p) for p in doc["kernels"]]
    fparams = [tuple(p) for p in doc["test_fns"]]
    return drelnum.fixture_reports(
        n or int(doc.get("n", drelnum.FIXTURE_N)),
        tol or float(doc.get("tol", drelnum.DEFAULT_TOL)),
        kparams,
        fparams,
    )


def run_suite(name, budget=200, seed=1, tol=None, n=None):
    reports = []
    if name in ("star-laws", "all"):
        for inst, _, _ in _suite_instances():
            reports.append(harness.check_star_laws(inst, budget, seed, tol=tol))
    if name in ("nuclear", "all"):
        for inst, nuc, _ in _suite_instances():
            reports.append(
                harness.check_nuclear_axioms(inst, nuc, budget, seed, tol=tol)
            )
    if name in ("sliding", "all"):
        for inst, nuc, _ in _suite_instances():
            reports.append(harness.check_sliding(inst, nuc, budget, seed, tol=tol))
    if name in ("traced", "all"):
        for inst, nuc, tr in _suite_instances():
            reports.append(
                harness.check_tracedness(inst, nuc, tr, budget, seed, tol=tol)
            )
    if name in ("trace-axioms", "all"):
        for inst, nuc, tr in _suite_instances():
            reports.append(
                harness.check_trace_axioms(inst, nuc, tr, budget, seed, tol=tol)
            )
    if name in ("param-trace", "all"):
        # exhaustive member streams explode above two-element sets
        for inst, nuc, tr in _suite_instances():
            if tr.has_param:
                reports.append(
                    harness.check_param_trace_axioms(
                        inst, tr, budget, seed, max_size=2, tol=tol
                    )
                )
    if name in ("cjsl-hr", "all"):
        reports.append(cjsl.check_characterization(5))
        reports.append(cjsl.check_closure_lemma(4))
        reports.append(cjsl.check_hr_wellformed(4))
        reports.append(cjsl.check_galois(5))
    if name in ("xrel-audit", "all"):
        reports.extend(_xrel_audit_reports())
    if name in ("stoch-monad", "all"):
        reports.extend(_stoch_monad_reports(budget, seed))
    if name in ("drel-numeric", "all"):
        reports.extend(_drel_numeric_reports(n, tol))
    return reports


def _emit_reports(reports, fmt, out=None, extra=None):
    failed = [r for r in reports if not r.ok and not r.is_finding]
    if fmt == "json":
        doc = {
            "schema": REPORT_SCHEMA,
            "reports": [r.to_dict() for r in reports],
            "failures": len(failed),
        }
        if extra:
            doc.update(extra)
        _write_out(doc, out)
    else:
        for r in reports:
            print(r.summary())
        findings = sum(1 for r in reports if r.is_finding)
        print(
            f"{len(reports)} reports, {len(failed)} failed, "
            f"{findings} documented findings"
        )
    return EXIT_FAIL if failed else 0


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        raise ParseError(
            f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}"
        )
    t0 = time.perf_counter()
    reports = run_suite(args.suite, args.budget, args.seed, args.tol, args.n)
    code = _emit_reports(reports, args.format)
    if args.format == "text":
        print(f"total time {time.perf_counter() - t0:.1f}s")
    return code


def cmd_report(args) -> int:
    reports = run_suite("all", args.budget, args.seed)
    return _emit_reports(
        reports, "json", args.out,
        extra={"budget": args.budget, "seed": args.seed},
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nucleal",
        description="compose, trace, transpose, and verify categorical models",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def cat_flag(p):
        p.add_argument("--category", choices=sorted(CATEGORIES), default=None)

    p = sub.add_parser("compose", help="compose two morphism files")
    cat_flag(p)
    p.add_argument("f")
    p.add_argument("g")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_compose)

    p = sub.add_parser("trace", help="trace of an endomorphism")
    cat_flag(p)
    p.add_argument("h")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--bound", type=int, default=3)
    p.set_defaults(fn=cmd_trace)

    p = sub.add_parser("transpose", help="transpose a distinguished morphism")
    cat_flag(p)
    p.add_argument("m")
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--left", default=None, help="left object file (inverse)")
    p.add_argument("--right", default=None, help="right object file (inverse)")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_transpose)

    p = sub.add_parser("check-nuclear", help="membership in the distinguished ideal")
    cat_flag(p)
    p.add_argument("f")
    p.add_argument("--bound", type=int, default=None)
    p.set_defaults(fn=cmd_check_nuclear)

    p = sub.add_parser("disintegrate", help="conditional kernels of a joint measure")
    cat_flag(p)
    p.add_argument("m")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_disintegrate)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite")
    p.add_argument("--budget", type=int, default=200)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("report", help="write the full JSON verification report")
    p.add_argument("--budget", type=int, default=200)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_report)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ShapeMismatch as exc:
        print(f"shape mismatch: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except (TraceClassError, UnsupportedCheck) as exc:
        print(f"outside the supported class: {exc}", file=sys.stderr)
        return EXIT_CLASS
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
