"""Command line: ``lensiso search``, ``lensiso compare``, ``lensiso selftest``.

Exit codes: 0 success, 1 usage or validation error, 2 checkpoint/IO
failure, 3 selftest failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import re
import sys
import time
from dataclasses import asdict, dataclass, field, fields

from . import __version__
from .chartables import GeneratorChoice, InvalidChoiceError
from .numtheory import classify_shape, euler_phi
from .oracle import SAMPLE_POINTS, classify_delta, delta_F
from .search import FILTERS, CheckpointError, SearchTask, canonicalize, passes_filter, run_search
from .spectra import MatchReport, build_profile, compare_profiles

log = logging.getLogger("lensiso")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_SELFTEST = 0, 1, 2, 3


@dataclass
class MatchRecord:
    first: list[int]
    second: list[int]
    equal_degrees: list[int]
    runs: list[list[int]]
    form_degrees: list[int]
    verdicts: dict[str, bool]
    oracle: list[dict] | None = None

    @classmethod
    def from_report(cls, r: MatchReport) -> "MatchRecord":
        return cls(list(r.choice_a), list(r.choice_b), r.equal_degrees,
                   [list(x) for x in r.runs], r.form_degrees,
                   {f: passes_filter(r.equal, f) for f in FILTERS})


class _LazyRecords:
    """Re-iterable view turning search reports into records on the fly."""

    def __init__(self, result):
        self._result = result

    def __len__(self):
        return len(self._result)

    def __iter__(self):
        return (MatchRecord.from_report(r) for r in self._result.iter_reports())


@dataclass
class ResultDocument:
    version: str
    command: str
    q: int
    k: int
    shape: str
    filter: str | None
    degrees: int
    class_count: int
    complete: bool
    elapsed: float
    records: list[MatchRecord] = field(default_factory=list)

    def _head(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "records"}

    def to_dict(self) -> dict:
        d = self._head()
        d["records"] = [asdict(r) for r in self.records]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ResultDocument":
        d = dict(d)
        d["records"] = [MatchRecord(**r) for r in d.get("records", [])]
        return cls(**d)

    def write(self, fh, fmt: str) -> None:
        """Stream the document; records are visited once per pass."""
        if fmt == "json":
            self._write_json(fh)
        elif fmt == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["q", "k", "degrees", "first set", "second set"])
            for r in self.records:
                w.writerow([self.q, self.k, ",".join(map(str, r.equal_degrees)),
                            " ".join(map(str, r.first)), " ".join(map(str, r.second))])
        else:
            self._write_table(fh)

    def _write_json(self, fh) -> None:
        """Pretty at the top level, one line per record."""
        fh.write(json.dumps(self._head(), indent=2)[:-2] + ',\n  "records": [')
        sep = "\n    "
        any_rec = False
        for r in self.records:
            fh.write(sep + json.dumps(asdict(r), sort_keys=True))
            sep = ",\n    "
            any_rec = True
        fh.write(("\n  " if any_rec else "") + "]\n}\n")

    def _write_table(self, fh) -> None:
        def cells(r):
            return (str(self.q), str(self.k), ",".join(map(str, r.equal_degrees)),
                    "[" + ",".join(map(str, r.first)) + "]",
                    "[" + ",".join(map(str, r.second)) + "]")
        title = ("q", "k", "degrees", "first set", "second set")
        widths = [len(c) for c in title]
        count = 0
        for r in self.records:
            widths = [max(w, len(c)) for w, c in zip(widths, cells(r))]
            count += 1

        def line(row):
            return " | ".join(c.ljust(wd) for c, wd in zip(row, widths)).rstrip() + "\n"
        fh.write(line(title))
        fh.write("-+-".join("-" * wd for wd in widths) + "\n")
        for r in self.records:
            fh.write(line(cells(r)))
        fh.write(f"# {count} record(s), {self.class_count} classes, {self.elapsed:.2f}s\n")

    def render(self, fmt: str) -> str:
        buf = io.StringIO()
        self.write(buf, fmt)
        return buf.getvalue()

    def to_json(self) -> str:
        return self.render("json").rstrip("\n")

    @classmethod
    def from_json(cls, text: str) -> "ResultDocument":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        return self.render("csv")

    def to_table(self) -> str:
        return self.render("table")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _chunk(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", text)
    if not m or int(m.group(1)) > int(m.group(2)):
        raise argparse.ArgumentTypeError(f"chunk must look like a..b with a <= b, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def _residues(tokens) -> list[int]:
    out = []
    for tok in tokens:
        for part in re.split(r"[\s,\[\]]+", tok):
            if part:
                try:
                    out.append(int(part))
                except ValueError:
                    raise ValueError(f"not an integer residue: {part!r}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lensiso", description="Search for and verify p-form isospectral lens spaces.")
    p.add_argument("--version", action="version", version=f"lensiso {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="progress logging on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("search", help="all-pairs search over the classes of (q, k)")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--filter", choices=FILTERS, default="nontrivial",
                   help="which matching pairs to report (default: nontrivial)")
    s.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    s.add_argument("--chunk", type=_chunk, help="enumeration index range a..b (end exclusive)")
    s.add_argument("--resume", metavar="FILE", help="checkpoint file, created or resumed")
    s.add_argument("--out", metavar="FILE")
    s.add_argument("--format", choices=("json", "csv", "table"), default="json")
    s.add_argument("--allow-even", action="store_true", help="accept q = 2p as Semiprime(2, p)")

    c = sub.add_parser("compare", help="compare two explicit +/-S sets")
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--set", dest="sets", action="append", nargs="+", required=True,
                   metavar="R", help="2k residues (give --set twice)")
    c.add_argument("--oracle", action="store_true", help="append floating-point F residuals")
    c.add_argument("--out", metavar="FILE")
    c.add_argument("--format", choices=("json", "csv", "table"), default="json")
    c.add_argument("--allow-even", action="store_true")

    t = sub.add_parser("selftest", help="run the oracle property suites")
    t.add_argument("--quick", action="store_true", help="restrict to q <= 9")
    t.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return p


def _emit(doc: ResultDocument, fmt: str, out: str | None) -> int:
    if not out:
        doc.write(sys.stdout, fmt)
        return EXIT_OK
    try:
        with open(out, "w", encoding="utf-8") as fh:
            doc.write(fh, fmt)
    except OSError as exc:
        print(f"lensiso: cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_search(args) -> int:
    t0 = time.perf_counter()
    try:
        task = SearchTask(args.q, args.k, filter=args.filter, chunk=args.chunk, jobs=args.jobs,
                          checkpoint=args.resume, allow_even=args.allow_even)
    except ValueError as exc:
        print(f"lensiso: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        result = run_search(task)
    except CheckpointError as exc:
        print(f"lensiso: {exc}", file=sys.stderr)
        return EXIT_IO
    doc = ResultDocument(__version__, "search", task.q, task.k, str(task.shape), task.filter,
                         euler_phi(task.q) // 2 - task.k + 1, result.class_count,
                         result.complete, round(time.perf_counter() - t0, 3),
                         _LazyRecords(result))
    log.info("%d record(s)", len(result))
    return _emit(doc, args.format, args.out)


def cmd_compare(args) -> int:
    t0 = time.perf_counter()
    if len(args.sets) != 2:
        print(f"lensiso: compare needs exactly two --set options, got {len(args.sets)}",
              file=sys.stderr)
        return EXIT_USAGE
    shape = classify_shape(args.q, allow_even=args.allow_even)
    if not shape.supported:
        print(f"lensiso: unsupported q-shape: {shape}", file=sys.stderr)
        return EXIT_USAGE
    choices = []
    for which, tokens in zip(("first", "second"), args.sets):
        try:
            choices.append(canonicalize(GeneratorChoice.from_s(args.q, _residues(tokens))))
        except InvalidChoiceError as exc:
            print(f"lensiso: {which} set invalid ({exc.invariant}): {exc}", file=sys.stderr)
            return EXIT_USAGE
        except ValueError as exc:
            print(f"lensiso: {which} set: {exc}", file=sys.stderr)
            return EXIT_USAGE
    a, b = choices
    if a.k != b.k:
        print(f"lensiso: sets differ in size ({2 * a.k} vs {2 * b.k})", file=sys.stderr)
        return EXIT_USAGE
    report = compare_profiles(build_profile(a, shape), build_profile(b, shape))
    rec = MatchRecord.from_report(report)
    if args.oracle:
        ca, cb = (a, b) if a.s_pm == report.choice_a else (b, a)
        rec.oracle = []
        for p in range(a.n + 1):
            deltas = [delta_F(ca, cb, p, z) for z in SAMPLE_POINTS]
            rec.oracle.append({"p": p, "max_abs_dF": max(abs(d) for d in deltas),
                               "verdict": classify_delta(deltas)})
    doc = ResultDocument(__version__, "compare", args.q, a.k, str(shape), None, a.n + 1, 2, True,
                         round(time.perf_counter() - t0, 3), [rec])
    return _emit(doc, args.format, args.out)


def cmd_selftest(args) -> int:
    from .oracle import check_consistency, check_prop2, check_root_of_unity
    if args.quick:
        plan = [("root-of-unity", check_root_of_unity, ((5, 7, 9),)),
                ("prop2", check_prop2, ((5, 7, 9),)),
                ("consistency", check_consistency, ((5, 7, 9), args.inject_fault))]
    else:
        plan = [("root-of-unity", check_root_of_unity, ((7, 9, 15, 25, 27, 35, 49, 65),)),
                ("prop2", check_prop2, ((15, 25, 27, 35, 49),)),
                ("consistency", check_consistency,
                 ((7, 9, 11, 13, 15, 25, 27), args.inject_fault))]
    for name, fn, fargs in plan:
        t0 = time.perf_counter()
        bad = fn(*fargs)
        if bad is not None:
            print(f"FAIL {name}")
            print(json.dumps(bad, default=str))
            return EXIT_SELFTEST
        print(f"ok   {name} ({time.perf_counter() - t0:.1f}s)")
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help, --version, usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"search": cmd_search, "compare": cmd_compare, "selftest": cmd_selftest}
    return handler[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
