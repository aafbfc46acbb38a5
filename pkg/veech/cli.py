"""Command-line surface: dz, enumerate, search-relations, classify, verify-flat.

Every command builds a storage.Report, writes it in the requested format and
returns a process exit code. Flags override VEECH_* environment variables,
which override the built-in defaults.
"""
import argparse
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from veech.config import RunConfig, debug_print
from veech.errors import InvalidQueryError, VeechError
from veech.flatmodel import (
    GAMMA0,
    GAMMA0_PRIME,
    SIDE_C1,
    SIDE_C3,
    ChainSurface,
    VerticalCylinder,
    build_chain_surface,
    build_veech_14gon,
    moduli_ratio_check,
    predicted_decomposition,
    vertical_side_decomposition,
)
from veech.monitoring import StageMonitor
from veech.relations import (
    OrderBoundQuery,
    audit_pairs,
    audit_triples,
    det_search_async,
    dz_enumerate_maximal,
    pair_search_63,
)
from veech.search import EnumerationResult, RootTuple, build_candidate, enumerate_candidates, run_order_scan_async
from veech.storage import Report, save_timings, write_report
from veech.twist import (
    EXPECTED_SURVIVORS,
    CaseReport,
    ClassificationReport,
    Survivor,
    classify_all_async,
    matches_veech_14gon,
)
from veech.utils import parse_fraction

VEECH_CANDIDATE = "14gon"
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REGRESSION = 2


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _global_flags() -> argparse.ArgumentParser:
    # SUPPRESS keeps an unset flag out of the namespace, so it may sit before or after the subcommand
    flags = argparse.ArgumentParser(add_help=False)
    flags.add_argument("--q-max", type=int, default=argparse.SUPPRESS, help="largest q for the direct twist check")
    flags.add_argument("--prec-bits", type=int, default=argparse.SUPPRESS, help="starting precision for signs")
    flags.add_argument("--workers", type=int, default=argparse.SUPPRESS)
    flags.add_argument("--tolerance", default=argparse.SUPPRESS, help="float prefilter tolerance")
    flags.add_argument("--out", default=argparse.SUPPRESS, help="report path, stdout when empty")
    flags.add_argument("--format", choices=("json", "csv", "text"), default=argparse.SUPPRESS)
    return flags


def build_parser() -> argparse.ArgumentParser:
    flags = _global_flags()
    parser = argparse.ArgumentParser(prog="veech", parents=[flags],
                                     description="Exact classification of algebraically primitive "
                                                 "Teichmueller curves in genus 3, hyperelliptic stratum (2,2)")
    sub = parser.add_subparsers(dest="command", required=True)

    dz = sub.add_parser("dz", parents=[flags], help="maximal orders of short vanishing sums")
    dz.add_argument("--k", type=int, required=True, help="number of roots in the relation")
    dz.add_argument("--d", type=int, required=True, help="degree of the coefficient field")
    dz.add_argument("--prime-cap", type=int, default=100)

    enum = sub.add_parser("enumerate", parents=[flags], help="symmetric and asymmetric root tuples")
    enum.add_argument("--n", type=int, help="one modulus; every divisor of 56 and 72 when omitted")

    rel = sub.add_parser("search-relations", parents=[flags], help="searches over roots of order 63 or 819")
    rel.add_argument("which", choices=("pair63", "det819"))
    rel.add_argument("--m1", type=int, nargs="+", help="restrict det819 to these leading exponents")

    sub.add_parser("classify", parents=[flags], help="full pipeline with the final orbit list")

    flat = sub.add_parser("verify-flat", parents=[flags], help="vertical decomposition of a chain surface")
    flat.add_argument("--candidate", required=True, help=f"n:e1,e2,e3 or {VEECH_CANDIDATE}")
    flat.add_argument("--t1", type=parse_fraction, default=Fraction(0))
    flat.add_argument("--t3", type=parse_fraction, default=Fraction(0))
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """CLI flag > VEECH_* environment > default"""
    return RunConfig.from_env().with_overrides(
        q_max=getattr(args, "q_max", None),
        precision_start_bits=getattr(args, "prec_bits", None),
        workers=getattr(args, "workers", None),
        prefilter_tolerance=getattr(args, "tolerance", None),
        output_path=getattr(args, "out", None),
        format=getattr(args, "format", None),
    )


def parse_candidate(text: str) -> RootTuple:
    try:
        n, exponents = text.split(":")
        return RootTuple(int(n), tuple(int(e) for e in exponents.split(",")))
    except ValueError:
        raise InvalidQueryError(f"candidate {text!r} is not of the form n:e1,e2,e3") from None


# ---------------------------------------------------------------------------
# dz
# ---------------------------------------------------------------------------

async def cmd_dz(args: argparse.Namespace, config: RunConfig, monitor: StageMonitor) -> Tuple[Report, int]:
    query = OrderBoundQuery(args.k, args.d)
    with monitor.stage("dz"):
        maximal = sorted(dz_enumerate_maximal(query, args.prime_cap))
    payload = {"k": args.k, "d": args.d, "prime_cap": args.prime_cap, "maximal": maximal}
    return Report("dz", payload, {"maximal": (("order",), [(m,) for m in maximal])},
                  [" ".join(str(m) for m in maximal)]), EXIT_OK


# ---------------------------------------------------------------------------
# enumerate
# ---------------------------------------------------------------------------

def _enumeration_record(result: EnumerationResult) -> Dict[str, Any]:
    return {
        "symmetric": result.symmetric,
        "asymmetric": [
            {"tuple": t, "field": result.candidates[t].K.label, "s": result.candidates[t].s,
             "c": result.candidates[t].c, "h": result.candidates[t].h}
            for t in result.asymmetric
        ],
        "reasons": dict(sorted(result.reasons.items())),
        "flags": result.flags,
    }


def _enumeration_tables(results: Sequence[EnumerationResult]) -> Dict[str, Any]:
    return {
        "symmetric": (("n", "exponents"), [(r.n, t.exponents) for r in results for t in r.symmetric]),
        "asymmetric": (("n", "exponents", "field"),
                       [(r.n, t.exponents, r.candidates[t].K.label) for r in results for t in r.asymmetric]),
        "reasons": (("n", "reason", "count"),
                    [(r.n, reason, count) for r in results for reason, count in sorted(r.reasons.items())]),
    }


async def cmd_enumerate(args: argparse.Namespace, config: RunConfig, monitor: StageMonitor) -> Tuple[Report, int]:
    with monitor.stage("enumerate"):
        if args.n is not None:
            results = [enumerate_candidates(args.n, config.precision_start_bits)]
            flags = list(results[0].flags)
        else:
            scan = await run_order_scan_async(config.workers, config.precision_start_bits)
            results = [scan.results[n] for n in sorted(scan.results)]
            flags = scan.flags
    monitor.record_size("asymmetric tuples", sum(len(r.asymmetric) for r in results))
    payload = {"moduli": {str(r.n): _enumeration_record(r) for r in results}, "flags": flags}
    lines = [f"n={r.n}: {len(r.symmetric)} symmetric, {len(r.asymmetric)} asymmetric" for r in results]
    return Report("enumerate", payload, _enumeration_tables(results), lines + flags), EXIT_OK


# ---------------------------------------------------------------------------
# search-relations
# ---------------------------------------------------------------------------

async def cmd_search_relations(args: argparse.Namespace, config: RunConfig,
                               monitor: StageMonitor) -> Tuple[Report, int]:
    if args.which == "pair63":
        with monitor.stage("pair63"):
            hits = pair_search_63()
        audit = audit_pairs(hits)
        monitor.record_size("pair63 hits", len(hits))
        payload = {
            "pairs": [{"exponents": [h.a, h.b], "degree": h.degree, "orders": h.orders,
                       "class": h.classification} for h in hits],
            "audit": {"classes": audit.classes, "strict_pass": audit.strict_pass,
                      "extended_pass": audit.extended_pass,
                      "order_21_cosine_degree": audit.order_21_cosine_degree},
        }
        rows = [(h.a, h.b, h.degree, h.orders, h.classification) for h in hits]
        table = {"pairs": (("a", "b", "degree", "orders", "class"), rows)}
        return Report("search-relations pair63", payload, table, audit.lines()), \
            EXIT_OK if audit.extended_pass else EXIT_REGRESSION

    with monitor.stage("det819"):
        report = await det_search_async(m1_values=args.m1, tolerance=config.tolerance, workers=config.workers)
    with monitor.stage("det819 audit"):
        audit = audit_triples(report.n0, report.triples)
    monitor.record_size("det819 searched", report.searched)
    monitor.record_size("det819 float survivors", report.float_survivors)
    payload = {
        "n0": report.n0,
        "m1": args.m1 or "all",
        "triples": report.triples,
        "searched": report.searched,
        "float_survivors": report.float_survivors,
        "exact_confirmed": len(report.triples),
        "spot_checked": report.spot_checked,
        "spot_mismatches": report.spot_mismatches,
        "per_divisor": report.per_divisor,
        "audit": {"branch_counts": audit.branch_counts, "dichotomy_pass": audit.dichotomy_pass,
                  "cubic_followups": audit.cubic_followups, "followup_pass": audit.followup_pass},
    }
    lines = [
        f"searched: {report.searched}",
        f"float survivors: {report.float_survivors}",
        f"spot checks: {report.spot_checked}, mismatches: {report.spot_mismatches}",
    ] + audit.lines()
    ok = audit.dichotomy_pass and audit.followup_pass and report.prefilter_sound
    table = {"triples": (("m1", "m2", "m3"), report.triples)}
    return Report("search-relations det819", payload, table, lines), EXIT_OK if ok else EXIT_REGRESSION


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------

def _case_record(report: Optional[CaseReport]) -> Optional[Dict[str, Any]]:
    if report is None:
        return None
    record: Dict[str, Any] = {"candidate": report.candidate.label(), "dependence": report.dependence}
    if report.case is not None:
        case = report.case
        record["expansions"] = {"s": case.a, "h2": case.b, "s*h2": case.k}
        record["M_L"] = case.M_L
        record["M_R"] = case.M_R
    if report.elimination is not None:
        elim = report.elimination
        record["lambda"] = elim.lam
        record["inverse_u"] = str(elim.inverse_u) if elim.inverse_u is not None else None
        record["constraints"] = [str(c) for c in elim.constraints]
        record["minors_in_ideal"] = elim.minors_in_ideal
    if report.solve is not None:
        solve = report.solve
        record["solutions"] = [{"p": s.p, "q": s.q, "u": s.u} for s in solve.solutions]
        record["rejected"] = [{"p": s.p, "q": s.q, "reason": s.reason} for s in solve.rejected]
        record["discriminant"] = solve.discriminant
        record["q_bound"] = solve.q_bound
        record["complete"] = solve.complete
        record["routes_agree"] = solve.routes_agree
        record["direct"] = [{"q": row.q, "p": row.p, "ratio": row.ratio} for row in solve.direct]
        record["note"] = solve.note
    return record


def _survivor_record(survivor: Survivor) -> Dict[str, Any]:
    return {"candidate": survivor.candidate.label(), "t1": survivor.t1, "t3": survivor.t3}


def _classification_payload(report: ClassificationReport) -> Dict[str, Any]:
    return {
        "scan": {str(n): {"symmetric": len(r.symmetric), "asymmetric": len(r.asymmetric),
                          "reasons": dict(sorted(r.reasons.items()))}
                 for n, r in sorted(report.scan.results.items())},
        "candidates": [
            {"candidate": v.candidate.label(), "field": v.candidate.K.label, "reason": v.reason,
             "forward": _case_record(v.forward), "reverse": _case_record(v.reverse)}
            for v in report.verdicts
        ],
        "dependence_survivors": [c.label() for c in report.dependence_survivors],
        "survivors": [_survivor_record(s) for s in report.survivors],
        "orbits": [{"label": o.label, "members": [_survivor_record(s) for s in o.members]}
                   for o in report.orbits],
        "orbit_count": len(report.orbits),
        "flags": report.flags,
        "complete": report.complete,
        "exit_code": report.exit_code(),
    }


def _classification_tables(report: ClassificationReport) -> Dict[str, Any]:
    candidates = [(v.candidate.root_tuple.n, v.candidate.root_tuple.exponents, v.reason,
                   v.forward.dependence or "") for v in report.verdicts]
    direct = []
    for v in report.verdicts:
        for side, case in (("forward", v.forward), ("reverse", v.reverse)):
            if case is None or case.solve is None:
                continue
            direct.extend((v.candidate.label(), side, row.q, row.p, row.ratio if row.rational else "irrational")
                          for row in case.solve.direct)
    survivors = [(s.candidate.label(), s.t1, s.t3) for s in report.survivors]
    return {
        "candidates": (("n", "exponents", "reason", "dependence"), candidates),
        "direct": (("candidate", "side", "q", "p", "ratio"), direct),
        "survivors": (("candidate", "t1", "t3"), survivors),
    }


async def cmd_classify(args: argparse.Namespace, config: RunConfig, monitor: StageMonitor) -> Tuple[Report, int]:
    with monitor.stage("classify"):
        report = await classify_all_async(config.q_max, config.workers, config.precision_start_bits)
    monitor.record_size("candidates", len(report.verdicts))
    monitor.record_size("survivors", len(report.survivors))
    lines = [f"{v.candidate.label()}: {v.reason.value}" for v in report.verdicts]
    lines += [f"orbit {o.label}: {', '.join(s.candidate.label() for s in o.members)}" for o in report.orbits]
    lines += report.flags
    lines.append(f"final orbit count: {len(report.orbits)}")
    return Report("classify", _classification_payload(report), _classification_tables(report), lines), \
        report.exit_code()


# ---------------------------------------------------------------------------
# verify-flat
# ---------------------------------------------------------------------------

def _cylinder_record(cyl: VerticalCylinder) -> Dict[str, Any]:
    return {"height": cyl.height, "circumference": cyl.circumference, "crossings": cyl.crossings}


def _side_record(surf: ChainSurface, side: str, config: RunConfig) -> Tuple[Dict[str, Any], bool]:
    cyls = vertical_side_decomposition(surf, side, config.precision_start_bits)
    ratios = moduli_ratio_check(cyls)
    parabolic = all(rational for _, rational in ratios)
    record = {
        "cylinders": [_cylinder_record(c) for c in cyls],
        "crossings": [(c.crossings[GAMMA0], c.crossings[GAMMA0_PRIME]) for c in cyls],
        "moduli_ratios": [{"ratio": r.rational_value() if ok else r, "rational": ok} for r, ok in ratios],
        "parabolic": parabolic,
    }
    if side == SIDE_C1:
        predicted = predicted_decomposition(surf, config.precision_start_bits)
        record["closed_forms_agree"] = all(a.same_as(b) for a, b in zip(cyls, predicted))
    return record, parabolic


def _veech_agreement() -> bool:
    polygon = build_veech_14gon()
    for n, exponents in EXPECTED_SURVIVORS:
        cand, verdict = build_candidate(RootTuple(n, exponents))
        if verdict.passed and matches_veech_14gon(Survivor(cand, Fraction(0), Fraction(0)), polygon):
            return True
    return False


async def cmd_verify_flat(args: argparse.Namespace, config: RunConfig, monitor: StageMonitor) -> Tuple[Report, int]:
    payload: Dict[str, Any] = {"candidate": args.candidate}
    lines: List[str] = []
    with monitor.stage("verify-flat"):
        if args.candidate == VEECH_CANDIDATE:
            polygon = build_veech_14gon(config.precision_start_bits)
            surf = polygon.surface()
            agrees = _veech_agreement()
            payload["polygon"] = {"c": polygon.c, "h": polygon.h, "s": polygon.s, "twists": polygon.twists,
                                  "shear": polygon.shear}
            payload["agrees_with_survivor"] = agrees
            lines.append(f"agreement with classify survivor: {'PASS' if agrees else 'FAIL'}")
        else:
            cand, verdict = build_candidate(parse_candidate(args.candidate), config.precision_start_bits)
            if not verdict.passed:
                raise InvalidQueryError(f"{args.candidate} is not a candidate: {verdict.reason.value} {verdict.detail}")
            surf = build_chain_surface(cand, args.t1, args.t3, config.precision_start_bits)
            agrees = True
        payload["twists"] = {"t1": surf.twists[0], "t3": surf.twists[2]}
        passed = agrees
        for side in (SIDE_C1, SIDE_C3):
            record, parabolic = _side_record(surf, side, config)
            payload[side] = record
            passed = passed and parabolic
            crossings = ", ".join(f"({a}, {b})" for a, b in record["crossings"])
            lines.append(f"{side}-side crossings {crossings}; "
                         f"moduli ratio rational: {'PASS' if parabolic else 'FAIL'}")
    payload["pass"] = passed
    return Report("verify-flat", payload, {}, lines), EXIT_OK if passed else EXIT_REGRESSION


# ---------------------------------------------------------------------------
# Entry
# ---------------------------------------------------------------------------

HANDLERS = {
    "dz": cmd_dz,
    "enumerate": cmd_enumerate,
    "search-relations": cmd_search_relations,
    "classify": cmd_classify,
    "verify-flat": cmd_verify_flat,
}


async def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "dz":
        try:
            OrderBoundQuery(args.k, args.d)
        except InvalidQueryError as e:
            parser.error(str(e))
    try:
        config = resolve_config(args)
        debug_print(f"[DEBUG] run - {args.command} with {config.echo()}")
        monitor = StageMonitor(args.command)
        report, code = await HANDLERS[args.command](args, config, monitor)
        if not write_report(report, config.format, config.output_path, config.echo()):
            return EXIT_ERROR
        save_timings(monitor, config.output_path)
        return code
    except VeechError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_ERROR
