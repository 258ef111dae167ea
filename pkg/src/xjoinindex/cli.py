"""Command-line entry point.

Exit codes: 0 success, 1 data error (bad document, query, profile or
validation failure), 2 usage error.  Data goes to stdout or ``-o``;
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import cost as costmod
from .bench import load_workload, reports_to_csv, size_sweep
from .errors import DataError, UsageError, XJoinIndexError
from .executor import run_plan
from .generator import FIGURE2_QUERY, load_profile, table1_profile, generate
from .join_index import build_index
from .model import validate
from .query import bind, parse_query, plan_join, rewrite_for_index
from . import xcube_io

PROG = "xjoinindex"
SEED_ENV = "XJOININDEX_SEED"


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _err(message: str) -> None:
    print(f"{PROG}: error: {message}", file=sys.stderr)


def _info(message: str) -> None:
    print(f"{PROG}: {message}", file=sys.stderr)


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(x)) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _default_seed() -> int | None:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise _Fail(2, f"{SEED_ENV}={raw!r} is not an integer") from None


def _read(path: Path, what: str, parse):
    """Run ``parse(path)`` and prefix any data error with the file name."""
    if not path.exists():
        raise _Fail(2, f"{what} not found: {path}")
    try:
        return parse(path)
    except DataError as exc:
        raise _Fail(1, f"{path}: {exc}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_warehouse(directory: Path):
    schema = _read(directory / xcube_io.SCHEMA_FILE, "schema document", xcube_io.parse_schema)
    _, members = _read(directory / xcube_io.DIMENSIONS_FILE, "dimensions document", xcube_io.parse_dimensions)
    facts = _read(directory / xcube_io.FACTS_FILE, "facts document", xcube_io.parse_facts)
    from .model import Warehouse

    return Warehouse(schema, members, facts)


def _profile(args):
    seed = args.seed if args.seed is not None else _default_seed()
    if args.profile in (None, "table1"):
        profile = table1_profile(seed or 0)
    else:
        profile = _read(Path(args.profile), "profile", lambda p: load_profile(p, seed))
    return profile


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    profile = _profile(args)
    if args.scale is not None:
        profile = profile.scaled(args.scale)
    if args.cells is not None:
        profile = profile.with_size(args.cells)
    warehouse = generate(profile)
    out = Path(args.out)
    written = xcube_io.save_warehouse(warehouse, out)
    if args.with_index:
        path = out / xcube_io.INDEX_FILE
        path.write_bytes(xcube_io.serialize_index(build_index(warehouse)))
        written.append(path)
    for p in written:
        _info(f"wrote {p}")
    _info(f"{len(warehouse.facts)} cells, seed {profile.seed}")
    return 0


def cmd_validate(args) -> int:
    warehouse = _load_warehouse(Path(args.warehouse))
    report = validate(warehouse)
    for v in report:
        print(f"{v.kind}: {v.message}")
    print(f"{len(report)} violations")
    return 1 if len(report) else 0


def cmd_build_index(args) -> int:
    directory = Path(args.warehouse)
    warehouse = _load_warehouse(directory)
    report = validate(warehouse)
    if len(report):
        first = report.violations[0]
        raise _Fail(1, f"{directory}: warehouse has {len(report)} violations; first: {first.message}")
    index = build_index(warehouse)
    out = Path(args.out) if args.out else directory / xcube_io.INDEX_FILE
    out.write_bytes(xcube_io.serialize_index(index))
    _info(f"wrote {out} ({len(index.cells)} cells)")
    return 0


def cmd_query(args) -> int:
    if args.q is None and args.query_file is None:
        raise _Fail(2, "one of --q or --query-file is required")
    text = args.q if args.q is not None else Path(args.query_file).read_text(encoding="utf-8")
    try:
        query = parse_query(text)
    except DataError as exc:
        raise _Fail(1, f"query: {exc}") from None

    path = args.path
    if path == "auto":
        path = "index" if args.index else "join"
    if path == "index" and not args.index:
        if not args.warehouse:
            raise _Fail(2, "--path index needs --index or --warehouse")
        candidate = Path(args.warehouse) / xcube_io.INDEX_FILE
        if not candidate.exists():
            raise _Fail(2, f"--path index: no {candidate}; run build-index first")
        args.index = str(candidate)
    if path == "join" and not args.warehouse:
        raise _Fail(2, "--path join needs --warehouse")

    if path == "index":
        index_path = Path(args.index)
        schema = None
        schema_dir = Path(args.warehouse) if args.warehouse else index_path.parent
        schema_file = schema_dir / xcube_io.SCHEMA_FILE
        if schema_file.exists():
            schema = _read(schema_file, "schema document", xcube_io.parse_schema)
        index = _read(index_path, "index document", lambda p: xcube_io.parse_index(p, schema))
        plan = rewrite_for_index(_bind(query, index.schema))
        table, counters = run_plan(plan, index=index)
    else:
        warehouse = _load_warehouse(Path(args.warehouse))
        plan = plan_join(_bind(query, warehouse.schema))
        table, counters = run_plan(plan, warehouse=warehouse)
    if args.explain:
        _info(plan.explain())
        _info(" ".join(f"{k}={v}" for k, v in counters.as_dict().items()))
    _emit(table.to_csv(), args.out)
    return 0


def _bind(query, schema):
    try:
        return bind(query, schema)
    except DataError as exc:
        raise _Fail(1, f"query: {exc}") from None


def cmd_cost(args) -> int:
    if args.sweep is not None:
        start, stop, num = args.sweep
        cells = costmod.log_spaced(int(start), int(stop), int(num))
    elif args.cells is not None:
        cells = args.cells
    else:
        raise _Fail(2, "one of --cells or --sweep is required")
    rows = costmod.sweep(cells, args.dims, args.members, args.attrs)
    _emit(costmod.sweep_to_csv(rows), args.out)
    if args.plot:
        from .plotting import plot_cost_sweep

        _info(f"wrote {plot_cost_sweep(rows, args.plot)}")
    return 0


def cmd_bench(args) -> int:
    profile = _profile(args)
    if args.workload:
        workload = _read(Path(args.workload), "workload", lambda p: load_workload(p.read_text(encoding="utf-8")))
    elif args.q:
        try:
            workload = [("q1", parse_query(args.q))]
        except DataError as exc:
            raise _Fail(1, f"query: {exc}") from None
    else:
        workload = [("q1", parse_query(FIGURE2_QUERY))]
    reports = size_sweep(profile, args.sizes, workload, args.runs, args.memo, progress=_info)
    _emit(reports_to_csv(reports, args.memo), args.out)
    if args.plot:
        from .plotting import plot_size_sweep

        _info(f"wrote {plot_size_sweep(reports, args.plot)}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description="Join index for XML star-schema warehouses.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("generate", help="generate Schema.xml, Dimensions.xml and Facts.xml from a profile")
    p.add_argument("--profile", help="profile file (default: built-in table1 profile)")
    p.add_argument("--scale", type=float, help="scale every count by this factor")
    p.add_argument("--cells", type=int, help="rescale the warehouse to this many cells")
    p.add_argument("--seed", type=int, help=f"override the profile seed (default: ${SEED_ENV} or profile)")
    p.add_argument("--with-index", action="store_true", help="also write Index.xml")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("validate", help="check warehouse documents for integrity violations")
    p.add_argument("warehouse", help="directory holding the warehouse documents")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("build-index", help="build Index.xml from a warehouse directory")
    p.add_argument("warehouse", help="directory holding the warehouse documents")
    p.add_argument("-o", "--out", help="output path (default: <warehouse>/Index.xml)")
    p.set_defaults(func=cmd_build_index)

    p = sub.add_parser("query", help="run a query and print the result as CSV")
    p.add_argument("--warehouse", help="directory holding the warehouse documents")
    p.add_argument("--index", help="Index.xml to query")
    p.add_argument("--q", help="query text")
    p.add_argument("--query-file", help="file holding the query text")
    p.add_argument("--path", choices=("auto", "join", "index"), default="auto")
    p.add_argument("--explain", action="store_true", help="print the plan and visit counters to stderr")
    p.add_argument("-o", "--out", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("cost", help="evaluate the closed-form costs, CSV output")
    p.add_argument("--cells", type=_int_list, help="comma-separated cell counts")
    p.add_argument("--sweep", nargs=3, type=float, metavar=("START", "STOP", "N"), help="log-spaced cell counts")
    p.add_argument("--dims", type=int, default=5)
    p.add_argument("--members", type=int, default=100, help="members per dimension")
    p.add_argument("--attrs", type=int, default=4, help="attributes per dimension")
    p.add_argument("-o", "--out", help="write CSV here instead of stdout")
    p.add_argument("--plot", help="render the sweep to this image file")
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("bench", help="time queries with and without the index across warehouse sizes")
    p.add_argument("--profile", help="profile file (default: built-in table1 profile)")
    p.add_argument("--sizes", type=_int_list, default=[100, 1000, 10000], help="comma-separated cell counts")
    p.add_argument("--workload", help="workload file, one query per line")
    p.add_argument("--q", help="single query (default: the sample decision-support query)")
    p.add_argument("--runs", type=int, default=5, help="timed runs per path (median reported)")
    p.add_argument("--seed", type=int)
    p.add_argument("--memo", action="store_true", help="also time a hash-join baseline (extra CSV column)")
    p.add_argument("-o", "--out", help="write CSV here instead of stdout")
    p.add_argument("--plot", help="render time against size to this image file")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _Fail as exc:
        _err(str(exc))
        return exc.code
    except UsageError as exc:
        _err(str(exc))
        return 2
    except (XJoinIndexError, ValueError, OverflowError, ZeroDivisionError) as exc:
        _err(str(exc))
        return 1
    except OSError as exc:
        _err(str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
