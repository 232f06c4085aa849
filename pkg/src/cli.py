"""Command-line interface: python -m src.cli <command> ..."""
import argparse
import json
import logging
import sys
from typing import List, Optional, Sequence

from pydantic import ValidationError

from src.arrangement import build_arrangement, census_via_faces, dump_arrangement, euler_check
from src.census import CentersGraph, DigonCensus, centers_graph, check_bounds, digon_census, lune_graph
from src.errors import DegenerateInputError, FalsificationError, InternalConsistencyError, InvalidInputError, LensKitError
from src.generators import GenConfig, gen_pencil, gen_random, gen_tight, gen_touching_quad, gen_unit
from src.geometry import Family, Point, invert_family
from src.graphs import find_avoiding_pairs, is_bipartite, is_plane_embedding, klv_check, klv_pipeline, verify_main_theorem
from src.kernel import parse_rational
from src.render import render_svg
from src.schemas import (
    BoundsOut, CensusReport, ChargeOut, ErrorOut, FamilyFile, InvertResult, OracleAgreement,
    SearchReport, TangentPairOut, TheoremVerdicts, VerifyReport, dump_family, parse_family,
)
from src.search import SearchConfig, extremal_search
from src.settings import settings
from src.storage import StorageAdapter, get_storage_adapter

logger = logging.getLogger("src.cli")

THEOREMS = ("lenses", "lunes", "main", "klv")


def _pairs(pairs) -> List[List[int]]:
    return [list(p) for p in sorted(pairs)]


def _oracle(f: Family, exact: DigonCensus) -> OracleAgreement:
    try:
        arr = build_arrangement(f)
    except DegenerateInputError as e:
        return OracleAgreement(engine="float", agreement=None, note=str(e))
    faces = census_via_faces(arr)
    euler = euler_check(arr)
    agreement = faces.lens_pairs == exact.lens_pairs and faces.lune_pairs == exact.lune_pairs
    if not agreement:
        raise InternalConsistencyError(
            "exact census and arrangement oracle disagree",
            {"exact": {"lenses": _pairs(exact.lens_pairs), "lunes": _pairs(exact.lune_pairs)},
             "float": {"lenses": _pairs(faces.lens_pairs), "lunes": _pairs(faces.lune_pairs)},
             "arrangement": dump_arrangement(arr)},
        )
    return OracleAgreement(
        engine="float", agreement=True,
        euler=None if euler.skipped else euler.characteristic, euler_skipped=euler.skipped,
    )


def build_census_report(f: Family, census: DigonCensus, engine: str = "exact") -> CensusReport:
    """Census report with theorem verdicts; lens and lune bound failures are reported, not raised."""
    bounds = check_bounds(census)
    graph = centers_graph(f, census)
    avoiding = find_avoiding_pairs(graph)
    verdicts = TheoremVerdicts(
        lenses="pass" if bounds.lens_ok else "fail",
        lunes="vacuous" if bounds.lune_vacuous else ("pass" if bounds.lune_ok else "fail"),
        main=_main_verdict(f, graph),
        klv=klv_check(graph).status,
    )
    return CensusReport(
        n=f.n,
        engine=engine,
        lens_pairs=_pairs(census.lens_pairs),
        lune_pairs=_pairs(census.lune_pairs),
        tangent_pairs=[
            TangentPairOut(i=i, j=j, point=list(p.to_float())) for i, j, p in census.tangent_pairs
        ],
        lens_count=census.lens_count,
        lune_count=census.lune_count,
        lune_edge_count=census.lune_edge_count,
        bounds=BoundsOut(
            lens_max=bounds.lens_max, lens_ok=bounds.lens_ok, lune_max=bounds.lune_max,
            lune_ok=bounds.lune_ok, vacuous=bounds.lune_vacuous,
        ),
        avoiding_pairs=[[list(e.key), list(h.key)] for e, h in avoiding],
        theorem_verdicts=verdicts,
    )


def _main_verdict(f: Family, graph: CentersGraph) -> str:
    verify_main_theorem(f, graph)
    return "pass"


def _raise_on_failed(report_verdicts: TheoremVerdicts, witness: dict) -> None:
    failed = [name for name in THEOREMS if getattr(report_verdicts, name) == "fail"]
    if failed:
        raise FalsificationError(",".join(failed), "theorem verdict failed", witness)


def cmd_census(args, storage: StorageAdapter) -> str:
    f = parse_family(storage.load(args.path))
    lenient = args.lenient_tangency_faces or None
    exact = None
    if args.engine == "float":
        arr = build_arrangement(f)
        euler_check(arr)
        report = build_census_report(f, census_via_faces(arr), engine="float")
    else:
        exact = digon_census(f, lenient=lenient)
        report = build_census_report(f, exact)
    if args.oracle:
        if exact is None:
            exact = digon_census(f, lenient=lenient)
        report.oracle = _oracle(f, exact)
    _raise_on_failed(report.theorem_verdicts, json.loads(report.model_dump_json()))
    return report.model_dump_json(indent=2)


def cmd_verify(args, storage: StorageAdapter) -> str:
    f = parse_family(storage.load(args.path))
    selected = [t.strip() for t in args.theorems.split(",") if t.strip()]
    unknown = set(selected) - set(THEOREMS)
    if unknown:
        raise InvalidInputError(f"unknown theorems {sorted(unknown)}; choose from {THEOREMS}")
    census = digon_census(f)
    bounds = check_bounds(census)
    graph = centers_graph(f, census)
    verdicts = TheoremVerdicts()
    report = VerifyReport(
        n=f.n, theorem_verdicts=verdicts, lens_count=census.lens_count,
        lune_count=census.lune_count, avoiding_pairs=len(find_avoiding_pairs(graph)),
    )
    if "main" in selected:
        verify_main_theorem(f, graph)
        verdicts.main = "pass"
    if "lenses" in selected or "klv" in selected:
        pipeline = klv_pipeline(f, graph)
        report.charges = [
            ChargeOut(e=list(c.e.key), f=list(c.f.key), removed=list(c.removed.key), blue=list(c.blue_edge))
            for c in pipeline.resolution.charges
        ]
        report.resolved_edges = pipeline.resolution.graph.edge_count
        report.perturbed = pipeline.perturbed
        if "klv" in selected:
            verdicts.klv = pipeline.klv.status
        if "lenses" in selected:
            if not bounds.lens_ok:
                raise FalsificationError("lenses", "more than 2n-2 lenses", {"lens_pairs": _pairs(census.lens_pairs)})
            verdicts.lenses = "pass"
    if "lunes" in selected:
        if bounds.lune_vacuous:
            verdicts.lunes = "vacuous"
        else:
            lunes = lune_graph(f, census)
            if not (bounds.lune_ok and is_bipartite(lunes) and is_plane_embedding(lunes)):
                raise FalsificationError(
                    "lunes", "lune bound or lune-graph structure violated",
                    {"lune_pairs": _pairs(census.lune_pairs)},
                )
            verdicts.lunes = "pass"
    return report.model_dump_json(indent=2)


def _generate(args) -> Family:
    kind = args.kind
    if kind == "random":
        return gen_random(GenConfig(n=args.n, seed=args.seed, tangent_pairs=args.tangent_pairs))
    if kind == "unit":
        return gen_unit(GenConfig(n=args.n, seed=args.seed))
    if kind == "pencil":
        abscissas = [parse_rational(a) for a in args.abscissas] if args.abscissas else None
        n = len(abscissas) if abscissas else args.n
        return gen_pencil(n, abscissas)
    if kind == "touching-quad":
        params = args.params or ["1", "1", "2", "2"]
        if len(params) != 4:
            raise InvalidInputError("touching-quad takes exactly four parameters a b c d")
        return gen_touching_quad(*(parse_rational(p) for p in params))
    return gen_tight(args.n)


def cmd_generate(args, storage: StorageAdapter) -> str:
    text = dump_family(_generate(args))
    if args.output:
        storage.save(args.output, text + "\n")
    return text


def cmd_search(args, storage: StorageAdapter) -> str:
    cfg = SearchConfig(n=args.n, seed=args.seed, iters=args.iters)
    result = extremal_search(cfg)
    if args.output:
        storage.save(args.output, dump_family(result.family) + "\n")
    if args.trace:
        storage.save(args.trace, "".join(r.model_dump_json() + "\n" for r in result.trace))
    report = SearchReport(
        n=cfg.n, seed=cfg.seed, iters=cfg.iters, lens_count=result.lens_count,
        target=result.target, reached=result.lens_count == result.target,
        family=FamilyFile.from_family(result.family),
    )
    return report.model_dump_json(indent=2, exclude_none=True)


def cmd_render(args, storage: StorageAdapter) -> str:
    f = parse_family(storage.load(args.path))
    census = digon_census(f)
    highlight = [h.strip() for h in args.highlight.split(",") if h.strip()]
    svg = render_svg(f, census, centers_graph(f, census), highlight)
    if args.output:
        storage.save(args.output, svg)
        return json.dumps({"svg": args.output})
    return svg


def cmd_invert(args, storage: StorageAdapter) -> str:
    f = parse_family(storage.load(args.path))
    center = Point(parse_rational(args.cx), parse_rational(args.cy))
    result = invert_family(f, center, parse_rational(args.k))
    if args.output:
        storage.save(args.output, dump_family(result.family) + "\n")
    out = InvertResult(invariance_contract=result.invariance_contract, family=FamilyFile.from_family(result.family))
    return out.model_dump_json(indent=2, exclude_none=True)


COMMANDS = {
    "census": cmd_census,
    "verify": cmd_verify,
    "generate": cmd_generate,
    "search": cmd_search,
    "render": cmd_render,
    "invert": cmd_invert,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lenskit", description="Lenses and lunes in pairwise intersecting circle families")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("census", help="exact lens / lune / tangency census")
    p.add_argument("path")
    p.add_argument("--oracle", action="store_true", help="cross-check with the float arrangement")
    p.add_argument("--engine", choices=("exact", "float"), default="exact")
    p.add_argument("--lenient-tangency-faces", action="store_true")

    p = sub.add_parser("verify", help="check the lens, lune, touching-quad and KLV theorems")
    p.add_argument("path")
    p.add_argument("--theorems", default=",".join(THEOREMS))

    p = sub.add_parser("generate", help="write a generated family")
    p.add_argument("kind", choices=("random", "unit", "pencil", "touching-quad", "tight"))
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tangent-pairs", type=int, default=0)
    p.add_argument("--abscissas", nargs="+", help="pencil abscissas as rationals")
    p.add_argument("--params", nargs="+", help="touching-quad a b c d")
    p.add_argument("-o", "--output")

    p = sub.add_parser("search", help="anneal towards 2n-2 lenses")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--iters", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.add_argument("--trace", help="line-delimited JSON trace file")

    p = sub.add_parser("render", help="SVG picture of a family")
    p.add_argument("path")
    p.add_argument("-o", "--output")
    p.add_argument("--highlight", default="lenses", help="comma list of lenses, lunes, graph")

    p = sub.add_parser("invert", help="invert a family in a circle")
    p.add_argument("path")
    p.add_argument("--cx", required=True)
    p.add_argument("--cy", required=True)
    p.add_argument("--k", default="1")
    p.add_argument("-o", "--output")
    return parser


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else settings.LOG_LEVEL,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[Sequence[str]] = None, storage: Optional[StorageAdapter] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    storage = storage or get_storage_adapter()
    try:
        output = COMMANDS[args.command](args, storage)
    except (FileNotFoundError, ValidationError) as e:
        return _fail(InvalidInputError(str(e)))
    except LensKitError as e:
        return _fail(e)
    print(output)
    return 0


def _fail(e: LensKitError) -> int:
    logger.error("%s: %s", type(e).__name__, e)
    details = {k: v for k, v in e.to_dict().items() if k not in ("error", "message")}
    out = ErrorOut(error=type(e).__name__, message=str(e), exit_code=e.exit_code, details=details)
    print(out.model_dump_json(indent=2), file=sys.stderr)
    return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
