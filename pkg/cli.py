"""
Command-line interface: construct, verify, spectrum, prank, classify, hadamard, latin
"""

import argparse
import json
import logging
import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from algebra import certify_spectrum, hadamard_to_srg, p_rank, srg_to_hadamard
from config import settings, setup_logging
from construct import BuildResult, build_from_spec
from designs import read_hadamard, write_hadamard
from errors import CertificationError, DdgError, ParameterMismatch, SpecError
from exporter import classes_to_frame, export_table, spectrum_to_frame, write_report
from graph import Graph, Partition, discover_partition, fixture_graph, fixture_graph_names, intersection_array
from graph import verify_ddg, verify_srg
from graph6 import read_graph6, write_graph6
from iso import automorphism_group, canonical_form, classify
from latin import LatinSquare, enumerate_reduced_symmetric, read_square, write_square
from models import ConstructionSpec, Report, parse_numbering_file
from utils import hash_content, report_builder

logger = logging.getLogger(__name__)


class Timer:
    """Collects named wall-clock timings for the report."""

    def __init__(self):
        self.timings: Dict[str, float] = {}

    @contextmanager
    def measure(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = round(time.perf_counter() - start, 6)


def load_graphs(reference: str) -> List[Graph]:
    """Graphs from a graph6 file, or a built-in reference graph by name."""
    path = Path(reference)
    if not path.is_file() and reference in fixture_graph_names():
        return [fixture_graph(reference)]
    if not path.is_file():
        raise SpecError(f"no graph6 file or reference graph named {reference!r}")
    return [Graph(matrix) for matrix in read_graph6(path)]


def _certify_build(result: BuildResult) -> Dict[str, Any]:
    """Certify a constructed graph against the closed-form parameters."""
    G, expected = result.graph, result.expected
    if result.partition_labels is not None:
        certified = verify_ddg(G, Partition.from_labels(result.partition_labels))
    else:
        certified = None
        candidates = discover_partition(G)
        for _, partition in candidates:
            attempt = verify_ddg(G, partition)
            if attempt.params == expected.ddg:
                certified = attempt
                break
        if certified is None:
            certified = verify_ddg(G, candidates[0][1])
    if certified.params != expected.ddg:
        raise ParameterMismatch(
            f"construction {expected.which} certified {certified.params.as_tuple()}, "
            f"closed form gives {expected.ddg.as_tuple()}",
            {"certified": list(certified.params.as_tuple()), "expected": list(expected.ddg.as_tuple())},
        )
    params: Dict[str, Any] = {"ddg": list(certified.params.as_tuple()), "class_size": certified.params.n}
    if expected.srg is not None:
        params["srg"] = list(verify_srg(G).as_tuple())
    return {"params": params, "expected": expected.as_dict(), "certified": certified}


def _graph_extras(G: Graph, args, report: Dict[str, Any], timer: Timer) -> None:
    for p in args.prank or []:
        with timer.measure(f"prank_{p}"):
            report["p_ranks"][str(p)] = p_rank(G, p)
    if G.n <= settings.CANONICAL_REPORT_MAX:
        with timer.measure("canonical"):
            report["canonical_hash"] = canonical_form(G).digest
    if getattr(args, "aut", False):
        with timer.measure("automorphisms"):
            report["aut_order"] = automorphism_group(G).order


def cmd_construct(args) -> Dict[str, Any]:
    if args.spec:
        spec = ConstructionSpec.from_ini(args.spec)
    else:
        missing = [flag for flag in ("construction", "q", "d", "latin") if getattr(args, flag) is None]
        if missing:
            raise SpecError(f"missing --{', --'.join(missing)} (or pass --spec)")
        fields = {"which": args.construction, "q": args.q, "d": args.d, "latin": args.latin,
                  "h": args.h, "mask": args.mask, "seed": args.seed, "bijections": args.bijections}
        if args.numbering:
            fields["numbering"] = parse_numbering_file(args.numbering)
        spec = ConstructionSpec.build(**{k: v for k, v in fields.items() if v is not None})

    timer = Timer()
    with timer.measure("construct"):
        result = build_from_spec(spec)
    G = result.graph
    report: Dict[str, Any] = {"spec": spec.echo(), "vertices": G.n, "p_ranks": {}}
    with timer.measure("verify"):
        certification = _certify_build(result)
    report["params"] = certification["params"]
    report["expected"] = certification["expected"]
    with timer.measure("spectrum"):
        report["spectrum"] = certify_spectrum(G, certification["certified"].params).as_dict()
    _graph_extras(G, args, report, timer)

    if args.out:
        write_graph6(args.out, [G.adjacency])
        reread = Graph(read_graph6(args.out)[0])
        if verify_ddg(reread, certification["certified"].partition).params != certification["certified"].params:
            raise ParameterMismatch(f"{args.out} does not reproduce the certified parameters")
        report["graph_file"] = str(args.out)
        report["graph_sha256"] = hash_content(Path(args.out).read_bytes())
    report["timings"] = timer.timings
    return report_builder.success_report(report, f"construction {spec.which} verified")


def cmd_verify(args) -> Dict[str, Any]:
    graphs = load_graphs(args.graph)
    timer = Timer()
    results = []
    with timer.measure("verify"):
        for G in graphs:
            entry: Dict[str, Any] = {"vertices": G.n}
            if args.srg:
                entry["srg"] = list(verify_srg(G).as_tuple())
            elif args.drg:
                entry["intersection_array"] = str(intersection_array(G))
            else:
                candidates = discover_partition(G, strict=args.strict)
                certified = verify_ddg(G, candidates[0][1])
                entry["ddg"] = list(certified.params.as_tuple())
                entry["classes"] = certified.partition.classes
                entry["alternatives"] = len(candidates) - 1
            results.append(entry)
    report = {"graphs": results, "timings": timer.timings}
    if len(results) == 1:
        report["params"] = results[0]
    return report_builder.success_report(report)


def cmd_spectrum(args) -> Dict[str, Any]:
    G = load_graphs(args.graph)[0]
    timer = Timer()
    with timer.measure("spectrum"):
        spectrum = certify_spectrum(G)
    if args.table:
        export_table(spectrum_to_frame(spectrum), args.table)
    return report_builder.success_report({"params": {"ddg": list(spectrum.params.as_tuple())},
                                          "spectrum": spectrum.as_dict(), "timings": timer.timings},
                                         f"spectrum {spectrum}")


def cmd_prank(args) -> Dict[str, Any]:
    timer = Timer()
    results = []
    for G in load_graphs(args.graph):
        ranks = {}
        for p in args.p:
            with timer.measure(f"prank_{p}"):
                ranks[str(p)] = p_rank(G, p)
        results.append(ranks)
    return report_builder.success_report({"p_ranks": results[0], "graphs": results, "timings": timer.timings})


def cmd_classify(args) -> Dict[str, Any]:
    graphs: List[Graph] = []
    sources = []
    for reference in args.graphs:
        for index, G in enumerate(load_graphs(reference)):
            graphs.append(G)
            sources.append(f"{reference}#{index}")
    timer = Timer()
    with timer.measure("classify"):
        classes = classify(graphs, workers=args.workers, progress=args.verbose)
    if args.table:
        export_table(classes_to_frame(classes), args.table)
    return report_builder.success_report(
        {"inputs": sources, "class_count": len(classes), "classes": [c.as_dict() for c in classes],
         "timings": timer.timings},
        f"{len(graphs)} graphs in {len(classes)} classes",
    )


def cmd_hadamard(args) -> Dict[str, Any]:
    if args.from_srg:
        G = load_graphs(args.from_srg)[0]
        H = srg_to_hadamard(G, args.sign)
        if args.out:
            write_hadamard(args.out, H.matrix)
        return report_builder.success_report({"order": H.order, "sign": H.sign, "row_sum": H.row_sum,
                                              "graphical": H.graphical, "regular": H.regular,
                                              "srg": list(verify_srg(G).as_tuple())})
    if not args.sign:
        raise SpecError("--to-srg needs --sign + or -")
    G = hadamard_to_srg(read_hadamard(args.to_srg), args.sign)
    if args.out:
        write_graph6(args.out, [G.adjacency])
    return report_builder.success_report({"order": G.n, "sign": args.sign, "srg": list(verify_srg(G).as_tuple())})


def cmd_latin(args) -> Dict[str, Any]:
    if args.check:
        square = read_square(args.check)
        latin = isinstance(square, LatinSquare)
        return report_builder.success_report({
            "side": square.side, "latin": latin, "symmetric": square.symmetric,
            "reduced": bool(latin and square.reduced),
        })
    squares = enumerate_reduced_symmetric(args.enumerate)
    if args.out_dir:
        directory = Path(args.out_dir)
        directory.mkdir(parents=True, exist_ok=True)
        for index, square in enumerate(squares, 1):
            write_square(directory / f"sym{args.enumerate}_{index}", square)
    return report_builder.success_report({"side": args.enumerate, "classes": len(squares),
                                          "squares": [s.one_based() for s in squares]})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=settings.APP_NAME,
                                     description="Construct and certify divisible design graphs")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", help="write the JSON report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    construct = sub.add_parser("construct", parents=[common], help="build and certify a graph")
    construct.add_argument("--spec", help="INI construction spec")
    construct.add_argument("--construction", type=int, choices=[1, 2, 3, 4])
    construct.add_argument("--q", type=int)
    construct.add_argument("--d", type=int)
    construct.add_argument("--latin", help="square file or fixture name")
    construct.add_argument("--h", type=int, help="construction 2: deleted index, 1-based")
    construct.add_argument("--mask", help="construction 2: diagonal swap bits")
    construct.add_argument("--bijections", help="file of 'i j : p_0 ... p_{q-1}' lines")
    construct.add_argument("--numbering", help="file of 'i : c1 ... cm' lines")
    construct.add_argument("--seed", type=int, help="random bijections")
    construct.add_argument("--out", help="graph6 output")
    construct.add_argument("--prank", type=int, action="append")
    construct.add_argument("--aut", action="store_true", help="report |Aut|")
    construct.set_defaults(handler=cmd_construct)

    verify = sub.add_parser("verify", parents=[common], help="certify a graph6 file")
    verify.add_argument("graph")
    mode = verify.add_mutually_exclusive_group()
    mode.add_argument("--ddg", action="store_true", help="divisible design graph (default)")
    mode.add_argument("--srg", action="store_true")
    mode.add_argument("--drg", action="store_true", help="intersection array")
    verify.add_argument("--strict", action="store_true", help="fail on ambiguous partitions")
    verify.set_defaults(handler=cmd_verify)

    spectrum = sub.add_parser("spectrum", parents=[common], help="certified spectrum")
    spectrum.add_argument("graph")
    spectrum.add_argument("--table", help="CSV or JSON eigenvalue table")
    spectrum.set_defaults(handler=cmd_spectrum)

    prank = sub.add_parser("prank", parents=[common], help="adjacency rank over GF(p)")
    prank.add_argument("graph")
    prank.add_argument("--p", type=int, action="append", required=True)
    prank.set_defaults(handler=cmd_prank)

    classify_parser = sub.add_parser("classify", parents=[common], help="isomorphism classes")
    classify_parser.add_argument("graphs", nargs="+")
    classify_parser.add_argument("--workers", type=int, default=None)
    classify_parser.add_argument("--table", help="CSV or JSON class table")
    classify_parser.set_defaults(handler=cmd_classify)

    hadamard = sub.add_parser("hadamard", parents=[common], help="SRG <-> regular Hadamard matrix")
    direction = hadamard.add_mutually_exclusive_group(required=True)
    direction.add_argument("--from-srg", dest="from_srg")
    direction.add_argument("--to-srg", dest="to_srg")
    hadamard.add_argument("--sign", choices=["+", "-"])
    hadamard.add_argument("--out")
    hadamard.set_defaults(handler=cmd_hadamard)

    latin = sub.add_parser("latin", parents=[common], help="check or enumerate squares")
    action = latin.add_mutually_exclusive_group(required=True)
    action.add_argument("--check", help="square file")
    action.add_argument("--enumerate", type=int, help="side of reduced symmetric squares")
    latin.add_argument("--out-dir", dest="out_dir")
    latin.set_defaults(handler=cmd_latin)
    return parser


def emit(report: Dict[str, Any], destination: Optional[str]) -> None:
    if destination:
        write_report(report, destination)
    else:
        print(json.dumps(report, indent=2, sort_keys=True))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging("DEBUG" if args.verbose else None)

    try:
        data = args.handler(args)
    except DdgError as e:
        level = logging.ERROR if isinstance(e, CertificationError) else logging.WARNING
        logger.log(level, f"{args.command}: {type(e).__name__}: {e.message}")
        data = report_builder.error_report(e)
    except Exception as e:
        logger.exception(f"{args.command} failed unexpectedly")
        data = {"schema": settings.REPORT_SCHEMA, "success": False, "exit_code": 1,
                "message": f"internal error: {e}"}
    data["command"] = args.command
    report = Report.model_validate(data).to_json_dict()
    emit(report, getattr(args, "report", None))
    return report["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
