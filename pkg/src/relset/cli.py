"""Command-line interface: dataset ingestion, discovery/search runs, TSV
and JSON emission.

Exit codes: 0 success, 1 input/parse failure, 2 configuration or usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from .engine import (
    ConfigError,
    PassStats,
    RelatednessConfig,
    brute_force,
    discover,
    normalize,
    search,
)
from .matching import CONTAINMENT, METRICS, SIMILARITY
from .signature import SCHEMES
from .simfn import EDS, JACCARD, NEDS, SimConfig
from .tokens import PAD, SetRecord, TokenDictionary, make_set

PHI_NAMES = {"jac": JACCARD, "eds": EDS, "neds": NEDS}
LINES = "lines"
CSV_COLUMNS = "csv-columns"


class IngestError(Exception):
    """Raised for unreadable or malformed input data."""


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            return fh.read()
    except OSError as e:
        raise IngestError(f"cannot read {path}: {e}") from None


def _check_clean(value: str, where: str) -> None:
    if PAD in value:
        raise IngestError(f"{where}: reserved sentinel character in input")


def _parse_lines(text: str, delimiter: str, source: str) -> list[tuple[str, list[str]]]:
    """`set_id<TAB>elem<DELIM>elem...` per line; lines without the delimiter
    are whole sets of whitespace-word elements keyed by 0-based line number."""
    rows = []
    for lineno, line in enumerate(text.splitlines()):
        if not line.strip():
            continue
        where = f"{source}:{lineno + 1}"
        if delimiter in line:
            fields = line.split(delimiter)
            sid = fields[0].strip()
            if not sid:
                raise IngestError(f"{where}: missing set id")
            raws = [f.strip() for f in fields[1:] if f.strip()]
        else:
            sid = str(lineno)
            raws = line.split()
        _check_clean(sid, where)
        for raw in raws:
            _check_clean(raw, where)
        rows.append((sid, raws))
    return rows


def _parse_csv(text: str, source: str) -> list[tuple[str, list[str]]]:
    """Each CSV column is one set `file:header`; non-empty cells are its
    elements."""
    name = os.path.basename(source) if source != "-" else "-"
    try:
        records = list(csv.reader(io.StringIO(text)))
    except csv.Error as e:
        raise IngestError(f"{source}: malformed CSV: {e}") from None
    if not records:
        return []
    headers = [h.strip() for h in records[0]]
    columns: list[list[str]] = [[] for _ in headers]
    for row in records[1:]:
        for col, cell in enumerate(row):
            if col >= len(headers):
                raise IngestError(f"{source}: row has more cells than headers")
            cell = cell.strip()
            if cell:
                _check_clean(cell, f"{source}: column {headers[col]!r}")
                columns[col].append(cell)
    rows = []
    for header, cells in zip(headers, columns):
        _check_clean(header, f"{source}: header row")
        rows.append((f"{name}:{header}", cells))
    return rows


def ingest(
    path: str,
    fmt: str,
    delimiter: str,
    min_distinct: int,
    mode: str,
    q: int | None,
    dictionary: TokenDictionary,
) -> list[SetRecord]:
    text = _read_text(path)
    if fmt == LINES:
        rows = _parse_lines(text, delimiter, path)
    elif fmt == CSV_COLUMNS:
        rows = _parse_csv(text, path)
    else:
        raise IngestError(f"unknown format {fmt!r}")

    sets = []
    seen: set[str] = set()
    for sid, raws in rows:
        if sid in seen:
            raise IngestError(f"{path}: duplicate set id {sid!r}")
        seen.add(sid)
        deduped = list(dict.fromkeys(raws))
        if len(deduped) < max(min_distinct, 1):
            continue
        sets.append(make_set(sid, deduped, mode, q, dictionary))
    return sets


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--input", required=True, help="collection file ('-' for stdin)")
    sp.add_argument("--format", choices=(LINES, CSV_COLUMNS), default=LINES)
    sp.add_argument(
        "--element-delimiter",
        default="\t",
        help="element separator for the lines format (default: tab)",
    )
    sp.add_argument(
        "--min-distinct-elements",
        type=int,
        default=0,
        help="drop sets with fewer distinct elements",
    )
    sp.add_argument("--metric", choices=tuple(METRICS), default=CONTAINMENT)
    sp.add_argument("--phi", choices=tuple(PHI_NAMES), default="jac")
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--q", type=int, default=None)
    sp.add_argument("--scheme", choices=tuple(SCHEMES), default=None)
    sp.add_argument("--no-size-filter", action="store_true")
    sp.add_argument("--no-check-filter", action="store_true")
    sp.add_argument("--no-nn-filter", action="store_true")
    sp.add_argument("--no-reduction", action="store_true")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--output", default="-", help="result TSV path ('-' for stdout)")
    sp.add_argument("--stats", default=None, help="stats JSON path ('-' for stderr)")


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="relset",
        description="Exact discovery of related sets under fuzzy matching.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("discover", help="all related pairs between collections")
    _add_common(d)
    d.add_argument("--input2", default=None, help="reference collection (default: self-join)")

    s = sub.add_parser("search", help="all sets related to one reference")
    _add_common(s)
    s.add_argument("--ref-id", default=None, help="reference set id within --input")
    s.add_argument("--ref-file", default=None, help="file holding exactly one reference set")

    o = sub.add_parser("oracle", help="brute-force ground truth, same flags")
    _add_common(o)
    o.add_argument("--input2", default=None)
    o.add_argument("--ref-id", default=None)
    o.add_argument("--ref-file", default=None)
    return p


def _make_config(args: argparse.Namespace) -> RelatednessConfig:
    return normalize(
        RelatednessConfig(
            metric=args.metric,
            sim=SimConfig(kind=PHI_NAMES[args.phi], alpha=args.alpha),
            delta=args.delta,
            q=args.q,
            scheme=args.scheme,
            size_filter=not args.no_size_filter,
            check_filter=not args.no_check_filter,
            nn_filter=not args.no_nn_filter,
            reduction=False if args.no_reduction else None,
            workers=args.workers,
        )
    )


def _resolve_reference(args, coll, cfg, dictionary) -> SetRecord:
    if (args.ref_id is None) == (args.ref_file is None):
        raise ConfigError("exactly one of --ref-id/--ref-file is required")
    if args.ref_id is not None:
        for rec in coll:
            if rec.sid == args.ref_id:
                return rec
        raise IngestError(f"set id {args.ref_id!r} not found in {args.input}")
    refs = ingest(
        args.ref_file,
        args.format,
        args.element_delimiter,
        args.min_distinct_elements,
        cfg.mode,
        cfg.q,
        dictionary,
    )
    if len(refs) != 1:
        raise IngestError(f"{args.ref_file}: expected exactly one reference set, got {len(refs)}")
    return refs[0]


def _write_pairs(pairs, path: str) -> None:
    body = "".join(
        f"{p.r_id}\t{p.s_id}\t{p.matching_score:.6f}\t{p.relatedness:.6f}\t{p.metric}\n"
        for p in pairs
    )
    if path == "-":
        sys.stdout.write(body)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(body)


def _write_stats(stats: PassStats, path: str) -> None:
    body = json.dumps(stats.as_dict(), indent=2, sort_keys=True) + "\n"
    if path == "-":
        sys.stderr.write(body)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(body)


def run(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        cfg = _make_config(args)
    except ValueError as e:
        print(f"relset: configuration error: {e}", file=sys.stderr)
        return 2

    try:
        dictionary = TokenDictionary()
        coll = ingest(
            args.input,
            args.format,
            args.element_delimiter,
            args.min_distinct_elements,
            cfg.mode,
            cfg.q,
            dictionary,
        )
        second = getattr(args, "input2", None)
        rcoll = None
        if second is not None:
            rcoll = ingest(
                second,
                args.format,
                args.element_delimiter,
                args.min_distinct_elements,
                cfg.mode,
                cfg.q,
                dictionary,
            )

        stats = PassStats()
        if args.command == "discover":
            if rcoll is None:
                pairs, stats = discover(coll, None, cfg)
            else:
                pairs, stats = discover(rcoll, coll, cfg)
        elif args.command == "search":
            ref = _resolve_reference(args, coll, cfg, dictionary)
            pairs, stats = search(ref, coll, cfg)
        else:
            if args.ref_id is not None or args.ref_file is not None:
                ref = _resolve_reference(args, coll, cfg, dictionary)
                pairs = brute_force([ref], coll, cfg)
            elif rcoll is not None:
                pairs = brute_force(rcoll, coll, cfg)
            else:
                pairs = brute_force(coll, None, cfg)

        _write_pairs(pairs, args.output)
        if args.stats is not None:
            _write_stats(stats, args.stats)
    except ConfigError as e:
        print(f"relset: configuration error: {e}", file=sys.stderr)
        return 2
    except (IngestError, OSError) as e:
        print(f"relset: input error: {e}", file=sys.stderr)
        return 1
    return 0


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
