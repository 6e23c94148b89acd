"""``sugraph`` command line: ingest, query and plot a software universe.

Exit codes: 0 ok, 1 I/O error, 2 bad input, 3 unknown node or project.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import statistics
import sys
from pathlib import Path

import numpy as np

from . import __version__, ingest, metrics, plots, recommend
from .errors import InputSyntax, NeedTwoProjects, SugError, UnknownEntity, UnknownProject
from .timeutil import format_time, parse_time
from .universe import NodeKey, Universe

log = logging.getLogger("sugraph")

EXIT_OK, EXIT_IO, EXIT_SYNTAX, EXIT_UNKNOWN = 0, 1, 2, 3


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--universe", metavar="PATH", help="universe snapshot (JSON lines)")
    p.add_argument("-o", "--output", metavar="PATH", help="write here instead of stdout")
    p.add_argument("--format", choices=("csv", "svg"), default="csv")
    p.add_argument("--strict", action="store_true", help="treat malformed input lines as fatal")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="sugraph", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="build a universe snapshot from POMs or a universe file")
    p.add_argument("--pom-dir", metavar="DIR", help="directory tree of *.pom / pom.xml files")
    p.add_argument("--time-index", metavar="CSV", help="path,ISO-timestamp upload times for POM files")

    p = sub.add_parser("diffusion", parents=[common], help="popularity_t / variety_t series")
    p.add_argument("--release", action="append", default=[], metavar="NAME@RELEASE")
    p.add_argument("--project", action="append", default=[], metavar="PROJECT", help="all releases of a project")
    p.add_argument("--since", type=parse_time, metavar="TIME")
    p.add_argument("--until", type=parse_time, metavar="TIME")

    p = sub.add_parser("pairs", parents=[common], help="project pair intensity matrix")
    p.add_argument("--project", action="append", default=[], metavar="PROJECT")

    p = sub.add_parser("release-pairs", parents=[common], help="release pair popularity grid of two projects")
    p.add_argument("--project", action="append", default=[], metavar="PROJECT")

    p = sub.add_parser("recommend", parents=[common], help="top-k co-dependency list for a project")
    p.add_argument("--anchor", required=True, metavar="PROJECT")
    p.add_argument("-k", type=int, default=10)

    p = sub.add_parser("accuracy", parents=[common], help="top-k accuracy of system profiles")
    p.add_argument("--profiles", required=True, metavar="PATH")
    p.add_argument("-k", type=int, default=10)

    sub.add_parser("stats", parents=[common], help="node, project and reuse counts")
    return parser


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(args) -> Universe:
    if not args.universe:
        raise InputSyntax("--universe is required")
    u, report = ingest.read_universe(args.universe, strict=True)
    if report.skipped_unresolvable:
        log.warning("%d dangling dependency references ignored", report.skipped_unresolvable)
    return u


def _csv_only(args) -> None:
    if args.format != "csv":
        raise InputSyntax(f"{args.command} only produces CSV")


def cmd_ingest(args) -> int:
    report = ingest.IngestReport()
    if args.pom_dir:
        index = ingest.read_time_index(args.time_index) if args.time_index else None
        if not Path(args.pom_dir).is_dir():
            raise FileNotFoundError(f"no such directory: {args.pom_dir}")
        records = ingest.load_pom_tree(args.pom_dir, index, report)
    elif args.universe:
        with open(args.universe, encoding="utf-8") as fh:
            records = ingest.parse_universe_file(fh, strict=args.strict, report=report, source=args.universe)
    else:
        raise InputSyntax("ingest needs --pom-dir or --universe")
    u, report = ingest.build_universe(records, report)
    buf = io.StringIO()
    ingest.write_universe(u, buf)
    _emit(args, buf.getvalue())
    json.dump(report.as_dict(), sys.stderr, indent=2)
    sys.stderr.write("\n")
    return EXIT_OK


def cmd_diffusion(args) -> int:
    u = _load(args)
    pv = u.aggregate()
    releases = [NodeKey.parse(r) for r in args.release]
    for pid in args.project:
        if pid not in pv:
            raise UnknownProject(f"unknown project {pid!r}")
        releases.extend(pv.members[pid])
    if not releases:
        raise InputSyntax("select at least one --release or --project")
    for r in releases:
        u.node(r)
    if args.since and args.until and not args.since < args.until:
        raise InputSyntax("--since must be earlier than --until")
    d = plots.diffusion(u, releases, (args.since, args.until))
    _emit(args, plots.diffusion_svg(d) if args.format == "svg" else plots.diffusion_csv(d))
    return EXIT_OK


def cmd_pairs(args) -> int:
    u = _load(args)
    pv = u.aggregate()
    selected = list(dict.fromkeys(args.project))
    if len(selected) < 2:
        raise NeedTwoProjects("select at least two --project values")
    m = metrics.project_pair_matrix(pv, selected)
    _emit(args, plots.project_pairs_svg(m) if args.format == "svg" else plots.project_pairs_csv(m))
    return EXIT_OK


def cmd_release_pairs(args) -> int:
    u = _load(args)
    if len(args.project) != 2:
        raise InputSyntax("release-pairs needs exactly two --project values")
    m = metrics.release_pair_matrix(u, *args.project)
    _emit(args, plots.release_pairs_svg(m) if args.format == "svg" else plots.release_pairs_csv(m))
    return EXIT_OK


def cmd_recommend(args) -> int:
    _csv_only(args)
    u = _load(args)
    ranked = recommend.codependency_rank(u.aggregate(), args.anchor, args.k)
    rows = [(i, c, s) for i, (c, s) in enumerate(ranked.entries, 1)]
    _emit(args, plots.write_csv(rows, ["rank", "project", "score"]))
    return EXIT_OK


def cmd_accuracy(args) -> int:
    _csv_only(args)
    u = _load(args)
    with open(args.profiles, encoding="utf-8") as fh:
        profiles = recommend.parse_profiles(fh)
    report = recommend.cross_repo_report(u.aggregate(), profiles, args.k)
    rows = [(r.system, r.libraries, r.hits, r.accuracy) for r in report.results]
    _emit(args, plots.write_csv(rows, ["system", "libraries", "hits", "accuracy"]))
    sys.stderr.write(
        f"systems={len(rows)} min={report.minimum!r} q1={report.q1!r} median={report.median!r} "
        f"q3={report.q3!r} max={report.maximum!r}\n"
    )
    return EXIT_OK


def cmd_stats(args) -> int:
    _csv_only(args)
    u = _load(args)
    pv = u.aggregate()
    times = [n.time for n in u]
    rows = [
        ("nodes", len(u)),
        ("dependency_edges", u.n_dep_edges),
        ("update_edges", len(u.up_edges)),
        ("projects", len(pv)),
        ("project_dependency_edges", len(pv.dep_edges)),
        ("reuse", metrics.reuse(u)),
        ("time_start", format_time(min(times)) if times else ""),
        ("time_end", format_time(max(times)) if times else ""),
    ]
    pops = {p: v for p, v in metrics.project_popularities(pv).items() if v > 0}
    if pops:
        values = list(pops.values())
        q1, med, q3 = (float(v) for v in np.percentile(values, [25, 50, 75]))
        top = min(pops, key=lambda p: (-pops[p], p))
        rows += [
            ("project_popularity_min", min(values)),
            ("project_popularity_q1", q1),
            ("project_popularity_median", med),
            ("project_popularity_mean", statistics.fmean(values)),
            ("project_popularity_q3", q3),
            ("project_popularity_max", max(values)),
            ("most_popular_project", top),
        ]
    _emit(args, plots.write_csv(rows, ["metric", "value"]))
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "diffusion": cmd_diffusion,
    "pairs": cmd_pairs,
    "release-pairs": cmd_release_pairs,
    "recommend": cmd_recommend,
    "accuracy": cmd_accuracy,
    "stats": cmd_stats,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UnknownEntity as exc:
        print(f"sugraph: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    except OSError as exc:
        print(f"sugraph: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SugError, ValueError) as exc:
        print(f"sugraph: {exc}", file=sys.stderr)
        return EXIT_SYNTAX


if __name__ == "__main__":
    sys.exit(main())
