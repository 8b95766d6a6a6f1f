"""``projinv`` command line: every pipeline as a subcommand with JSON output.

Exit codes: 0 success, 2 malformed input, 3 precondition violation,
4 internal invariant breach.  The JSON payload on stdout is deterministic;
timing and diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
import traceback
from fractions import Fraction

from . import __version__
from .errors import InvariantBreach, MalformedInput, PreconditionError, ProjinvError
from .jets import (
    INFINITY_UP_TO_TRUNCATION,
    SCHEMA as JET_SCHEMA,
    JetGraph,
    cone_ideal,
    contact_order,
    fundamental_forms,
    projectively_empty,
    terms_to_json,
    variety_rank,
)
from .kostant import (
    build_root_system,
    cohomology_degree,
    dominant_for_levi,
    dual_weight,
    grade_of_weight,
    kostant_weight,
    levi_dimension,
)
from .models import CATALOG, build
from .prolongation import (
    POLYSPACE_SCHEMA,
    bertini_test,
    ii_polyspace,
    polyspace_from_json,
    polyspace_to_json,
    prolong,
    prolongation_property_check,
)
from .rigidity import cohomology, ii_from_json, perp_complex

RUN_SCHEMA = "projinv-run-v1"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise MalformedInput(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise MalformedInput(f"expected comma-separated integers, got {text!r}") from None


def _fraction_list(text: str) -> list[Fraction]:
    try:
        return [Fraction(x.strip()) for x in text.split(",") if x.strip()]
    except ValueError:
        raise MalformedInput(f"expected comma-separated rationals, got {text!r}") from None


def _load(path: str | None):
    if path is None:
        raise MalformedInput("--input is required")
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc


def _graph(doc, kmax: int | None = None) -> JetGraph:
    """Accept a bare jetgraph document or catalog output wrapping one."""
    if isinstance(doc, dict) and "result" in doc and isinstance(doc["result"], dict):
        doc = doc["result"]
    if isinstance(doc, dict) and isinstance(doc.get("graph"), dict):
        doc = doc["graph"]
    g = JetGraph.from_json(doc)
    return g.with_kmax(kmax) if kmax is not None else g


def _is_jetgraph(doc) -> bool:
    try:
        _graph(doc)
    except MalformedInput:
        return False
    return True


def _fr(x) -> str:
    return str(x)


def _contact_json(order):
    return "infinity_up_to_truncation" if order is INFINITY_UP_TO_TRUNCATION else order


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_catalog(args, doc):
    if args.name is None:
        return {"entries": sorted(CATALOG)}
    kw = {"kmax": args.kmax} if args.kmax is not None and args.name not in ("spinor10", "cayley_plane") else {}
    try:
        fx = build(args.name, *args.params, **kw)
    except TypeError as exc:
        raise MalformedInput(f"wrong parameters for {args.name}: {exc}") from exc
    return fx.to_json()


def cmd_invariants(args, doc):
    g = _graph(doc, args.kmax)
    F = fundamental_forms(g)
    return {
        "n": g.n, "a": g.a, "kmax": g.kmax,
        "dim_ii": F.dim_ii,
        "osculating_dims": {str(k): v for k, v in sorted(F.osculating_dims().items())},
        "reduced_dims": {str(k): len(F.reduced_space(k)) for k in range(3, g.kmax + 1)},
        "variety_rank": variety_rank(F),
        "prolongation_property": [c.to_json() for c in prolongation_property_check(F)],
    }


def cmd_cone(args, doc):
    g = _graph(doc, args.kmax)
    ideal = cone_ideal(g, args.k)
    return {
        "k": ideal.k,
        "generator_count": len(ideal.generators),
        "generators": [terms_to_json(p) for p in ideal.generators],
        "empty_certificate_degree": projectively_empty(ideal),
    }


def cmd_contact(args, doc):
    g = _graph(doc, args.kmax)
    if args.dir is None:
        raise MalformedInput("--dir is required")
    return {"direction": [_fr(x) for x in args.dir], "contact_order": _contact_json(contact_order(g, args.dir))}


def _space(doc):
    if isinstance(doc, dict) and doc.get("schema") == POLYSPACE_SCHEMA:
        return polyspace_from_json(doc)
    return ii_polyspace(fundamental_forms(_graph(doc)))


def cmd_prolong(args, doc):
    A = _space(doc)
    P = prolong(A, args.j)
    return {"input_dim": A.dimension, "j": args.j, "dimension": P.dimension, "space": polyspace_to_json(P)}


def cmd_bertini(args, doc):
    A = _space(doc)
    return bertini_test(A, trials=args.trials, seed=args.seed).to_json()


def cmd_rigidity(args, doc):
    if isinstance(doc, dict) and "quadrics" in doc:
        ii = ii_from_json(doc)
    else:
        ii = _graph(doc).second_fundamental_form()
    return cohomology(perp_complex(ii)).to_json()


def cmd_kostant(args, doc):
    if args.type is None or args.node is None or args.lambda_ is None:
        raise MalformedInput("kostant needs --type, --node and --lambda")
    rs = build_root_system(args.type, args.rank) if args.rank is not None else build_root_system(args.type)
    lam = tuple(args.lambda_)
    if len(lam) != rs.rank:
        raise PreconditionError(f"--lambda needs {rs.rank} entries")
    if any(x < 0 for x in lam):
        raise PreconditionError("--lambda must be dominant")
    mu = kostant_weight(rs, lam, args.node)
    dual_mu = kostant_weight(rs, dual_weight(rs, lam), args.node)
    out = {
        "root_system": rs.label,
        "node": args.node,
        "lambda": list(lam),
        "weight": list(mu),
        "weight_root_coords": [_fr(x) for x in rs.to_root_coords(mu)],
        "grade": _fr(grade_of_weight(rs, mu, args.node)),
        "dominant_for_levi": dominant_for_levi(rs, mu, args.node),
        "cohomology_degree": _fr(cohomology_degree(rs, lam, args.node)),
    }
    if dominant_for_levi(rs, dual_mu, args.node):
        out["levi_dimension"] = levi_dimension(rs, dual_mu, args.node)
    return out


COMMANDS = {
    "catalog": cmd_catalog,
    "invariants": cmd_invariants,
    "cone": cmd_cone,
    "contact": cmd_contact,
    "prolong": cmd_prolong,
    "bertini": cmd_bertini,
    "rigidity": cmd_rigidity,
    "kostant": cmd_kostant,
}
NEEDS_INPUT = {"invariants", "cone", "contact", "prolong", "bertini", "rigidity"}
RANDOMIZED = {"bertini"}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--input", help="JSON input path, or - for stdin")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized steps")
    common.add_argument("--kmax", type=int, help="truncation order")
    common.add_argument("--trials", type=int, default=8, help="random trials (bertini)")
    common.add_argument("--json-indent", type=int, default=None, help="pretty-print JSON")

    p = _Parser(prog="projinv", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("catalog", parents=[common], help="dump a model fixture")
    s.add_argument("name", nargs="?", help=f"one of {', '.join(sorted(CATALOG))}")
    s.add_argument("params", nargs="*", type=int)
    sub.add_parser("invariants", parents=[common], help="fundamental forms, rank, prolongation property")
    s = sub.add_parser("cone", parents=[common], help="asymptotic cone ideal")
    s.add_argument("--k", type=int, default=2)
    s = sub.add_parser("contact", parents=[common], help="contact order along a direction")
    s.add_argument("--dir", type=_fraction_list)
    s = sub.add_parser("prolong", parents=[common], help="j-th prolongation of a polyspace or of II")
    s.add_argument("--j", type=int, default=1)
    sub.add_parser("bertini", parents=[common], help="generic quadric of a system and its singular locus")
    sub.add_parser("rigidity", parents=[common], help="H^{p,1} of the g-perp complex")
    s = sub.add_parser("kostant", parents=[common], help="Kostant weight and grade")
    s.add_argument("--type")
    s.add_argument("--rank", type=int)
    s.add_argument("--node", type=int)
    s.add_argument("--lambda", dest="lambda_", type=_int_list)
    return p


def _digest(args, doc) -> str:
    skip = {"json_indent", "input"}
    payload = {
        "args": {k: (list(map(str, v)) if isinstance(v, list) else v)
                 for k, v in sorted(vars(args).items()) if k not in skip},
        "input": doc,
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        doc = _load(args.input) if args.command in NEEDS_INPUT else None
        result = COMMANDS[args.command](args, doc)
        report = {
            "schema": RUN_SCHEMA,
            "subcommand": args.command,
            "engine_version": __version__,
            "input_digest": _digest(args, doc),
            "seed": args.seed if args.command in RANDOMIZED else None,
            "result": result,
        }
        stdout.write(json.dumps(report, indent=args.json_indent, sort_keys=True) + "\n")
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except ProjinvError as exc:
        print(f"projinv: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception:  # noqa: BLE001
        traceback.print_exc(file=sys.stderr)
        return InvariantBreach.exit_code
    print(f"projinv: {args.command} finished in {time.perf_counter() - start:.3f}s", file=sys.stderr)
    return 0


def main(argv: list[str] | None = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
