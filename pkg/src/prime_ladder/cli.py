"""Command line interface.

Exit codes: 0 success, 1 verification failure, 2 bad input or construction error.

    prime-ladder generate --n 10 --stage prime --format json
    prime-ladder verify labeling.json
    prime-ladder sweep --from 4 --to 25000 --jobs 8
    prime-ladder compare --n 12
    prime-ladder export labeling.json --format dot
    prime-ladder bench --n 1000000
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path

from .construct import construct_cross_labeling, fixup_table
from .core import LadderLabeling, PatternMismatch, Stage
from .oracle import DEFAULT_BUDGET, BudgetExhausted, backtrack_prime_labeling
from .transform import flip_alternate
from .verify import VerificationReport, check_cross, check_permutation, check_prime, verify

log = logging.getLogger("prime_ladder")

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_ERROR = 2

FORMATS = ("json", "csv", "dot")


class ParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# serialization


def to_json(ladder: LadderLabeling) -> str:
    return json.dumps(
        {
            "n": ladder.n,
            "stage": ladder.stage.value,
            "bottom": ladder.bottom.tolist(),
            "top": ladder.top.tolist(),
        },
        separators=(",", ":"),
    )


def to_csv(ladder: LadderLabeling) -> str:
    return ",".join(map(str, ladder.bottom.tolist())) + "\n" + ",".join(map(str, ladder.top.tolist())) + "\n"


def to_dot(ladder: LadderLabeling) -> str:
    n = ladder.n
    lines = [f'graph ladder {{', f'  label="{n}-ladder ({ladder.stage.value})";']
    for row, labels in ((0, ladder.bottom.tolist()), (1, ladder.top.tolist())):
        for i, v in enumerate(labels):
            lines.append(f'  r{row}c{i} [label="{v}"];')
    for i in range(n):
        lines.append(f"  r0c{i} -- r1c{i};")
    for row in (0, 1):
        for i in range(n - 1):
            lines.append(f"  r{row}c{i} -- r{row}c{i + 1};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit(ladder: LadderLabeling, fmt: str) -> str:
    if fmt == "json":
        return to_json(ladder) + "\n"
    if fmt == "csv":
        return to_csv(ladder)
    if fmt == "dot":
        return to_dot(ladder)
    raise ValueError(f"unknown format {fmt!r}")


def _int_row(values, what: str) -> list[int]:
    if not isinstance(values, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in values):
        raise ParseError(f"{what} must be a list of integers")
    return values


def parse_json(text: str) -> LadderLabeling:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not {"n", "stage", "bottom", "top"} <= doc.keys():
        raise ParseError('expected an object with keys "n", "stage", "bottom", "top"')
    bottom = _int_row(doc["bottom"], "bottom")
    top = _int_row(doc["top"], "top")
    if doc["stage"] not in ("cross", "prime"):
        raise ParseError(f"unknown stage {doc['stage']!r}")
    if doc["n"] != len(bottom) or len(bottom) != len(top):
        raise ParseError(f"n={doc['n']} does not match row lengths {len(bottom)}/{len(top)}")
    try:
        return LadderLabeling(bottom, top, Stage(doc["stage"]))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def parse_csv(text: str, stage: Stage | str = Stage.PRIME) -> LadderLabeling:
    rows = [line.strip() for line in text.strip().splitlines() if line.strip()]
    if len(rows) != 2:
        raise ParseError(f"expected two CSV lines (bottom, top), got {len(rows)}")
    try:
        bottom, top = ([int(x) for x in row.split(",")] for row in rows)
    except ValueError as exc:
        raise ParseError(f"non-integer CSV field: {exc}") from exc
    if len(bottom) != len(top):
        raise ParseError("CSV rows differ in length")
    try:
        return LadderLabeling(bottom, top, Stage(stage))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def load(path: str, stage: str | None = None) -> LadderLabeling:
    """Read a labeling from a JSON or CSV file ('-' for stdin)."""
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    if text.lstrip().startswith("{"):
        ladder = parse_json(text)
        return ladder if stage is None else ladder.with_stage(stage)
    return parse_csv(text, stage or Stage.PRIME)


# ---------------------------------------------------------------------------
# sweep


@dataclass
class InstanceResult:
    n: int
    ok: bool
    histogram: dict[str, int]
    error: str = ""
    oracle_ok: bool | None = None


@dataclass
class SweepResult:
    start: int
    stop: int
    failures: list[int] = field(default_factory=list)
    errors: dict[int, str] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)
    first_fired: dict[str, int] = field(default_factory=dict)
    oracle_failures: list[int] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures and not self.oracle_failures

    def to_dict(self) -> dict:
        return {
            "from": self.start,
            "to": self.stop,
            "ok": self.ok,
            "failures": self.failures,
            "errors": {str(k): v for k, v in self.errors.items()},
            "oracle_failures": self.oracle_failures,
            "counts": self.counts,
            "first_fired": self.first_fired,
            "elapsed_s": round(self.elapsed, 3),
        }


def fixup_histogram(n: int) -> dict[str, int]:
    """Firings per kind/case for the n-ladder, plus chain lengths as '<kind>-chain-t<t>'."""
    if n < 4:
        return {}
    table = fixup_table(n)
    hist = table.histogram()
    for kind, t in zip(table.kind.tolist(), table.t.tolist()):
        if t:
            key = f"{'AB'[kind]}-chain-t{t}"
            hist[key] = hist.get(key, 0) + 1
    return hist


def check_instance(n: int, oracle: bool = False, budget: int = DEFAULT_BUDGET) -> InstanceResult:
    try:
        cross = construct_cross_labeling(n)
    except PatternMismatch as exc:
        return InstanceResult(n, False, {}, error=str(exc))
    prime = flip_alternate(cross)
    ok = check_permutation(cross).ok and check_cross(cross).ok and check_prime(prime).ok
    result = InstanceResult(n, ok, fixup_histogram(n))
    if oracle:
        try:
            found = backtrack_prime_labeling(n, budget)
            result.oracle_ok = found is not None and verify(found).ok
        except BudgetExhausted:
            result.oracle_ok = False
    return result


def _check_instance_args(args):
    return check_instance(*args)


def run_sweep(
    start: int, stop: int, jobs: int = 1, oracle: bool = False, budget: int = DEFAULT_BUDGET
) -> SweepResult:
    if not 1 <= start <= stop:
        raise ValueError("need 1 <= from <= to")
    t0 = time.perf_counter()
    work = [(n, oracle, budget) for n in range(start, stop + 1)]
    if jobs > 1:
        with Pool(jobs) as pool:
            results = pool.map(_check_instance_args, work, chunksize=max(1, len(work) // (jobs * 16)))
    else:
        results = map(_check_instance_args, work)
    summary = SweepResult(start, stop)
    for res in sorted(results, key=lambda r: r.n):
        if not res.ok:
            summary.failures.append(res.n)
            if res.error:
                summary.errors[res.n] = res.error
        if res.oracle_ok is False:
            summary.oracle_failures.append(res.n)
        for key, count in res.histogram.items():
            summary.counts[key] = summary.counts.get(key, 0) + count
            summary.first_fired.setdefault(key, res.n)
    summary.elapsed = time.perf_counter() - t0
    return summary


# ---------------------------------------------------------------------------
# commands


def _write(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_generate(args) -> int:
    if args.n < 1:
        print("error: --n must be >= 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        ladder = construct_cross_labeling(args.n)
    except PatternMismatch as exc:
        print(f"error: construction failed: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.stage == "prime":
        ladder = flip_alternate(ladder)
    _write(emit(ladder, args.format), args.output)
    return EXIT_OK


def _print_report(report: VerificationReport, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report.to_dict()))
        return
    status = "OK" if report.ok else "FAIL"
    print(f"{status} n={report.n} stage={report.stage} edges_checked={report.checked_edges} "
          f"violations={len(report.violations)}")
    for v in report.violations:
        print(f"  {v}")


def cmd_verify(args) -> int:
    try:
        ladder = load(args.input, args.stage)
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    report = verify(ladder)
    _print_report(report, args.json)
    return EXIT_OK if report.ok else EXIT_VIOLATION


def _sweep_cap(start: int, stop: int) -> int:
    cap = os.environ.get("LADDER_SWEEP_MAX")
    if cap:
        limit = int(cap)
        if stop - start + 1 > limit:
            log.warning("LADDER_SWEEP_MAX=%d caps the sweep at n=%d", limit, start + limit - 1)
            return start + limit - 1
    return stop


def cmd_sweep(args) -> int:
    if not 1 <= args.start <= args.stop:
        print("error: need 1 <= --from <= --to", file=sys.stderr)
        return EXIT_ERROR
    stop = _sweep_cap(args.start, args.stop)
    result = run_sweep(args.start, stop, args.jobs, args.oracle, args.budget)
    if args.json:
        print(json.dumps(result.to_dict()))
    else:
        print(f"sweep n={result.start}..{result.stop}: {'PASS' if result.ok else 'FAIL'} "
              f"({result.elapsed:.1f}s)")
        for key in sorted(result.counts):
            print(f"  {key:<20} fired {result.counts[key]:>8}  first at n={result.first_fired[key]}")
        if result.failures:
            print(f"  first failure at n={result.failures[0]}; failing n: {result.failures}")
            for n, err in result.errors.items():
                print(f"  n={n}: {err}", file=sys.stderr)
        if args.oracle:
            print(f"  oracle: {'all found' if not result.oracle_failures else result.oracle_failures}")
    return EXIT_OK if result.ok else EXIT_VIOLATION


def cmd_compare(args) -> int:
    try:
        ours = flip_alternate(construct_cross_labeling(args.n))
    except PatternMismatch as exc:
        print(f"error: construction failed: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        theirs = backtrack_prime_labeling(args.n, args.budget)
    except BudgetExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    ok = True
    for name, ladder in (("construction", ours), ("oracle", theirs)):
        if ladder is None:
            print(f"{name}: no labeling")
            ok = False
            continue
        report = verify(ladder)
        ok = ok and report.ok
        print(f"{name}: {'OK' if report.ok else 'FAIL'} bottom={ladder.bottom.tolist()} top={ladder.top.tolist()}")
    print("identical" if theirs is not None and ours == theirs else "different labelings")
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_export(args) -> int:
    try:
        ladder = load(args.input, args.stage)
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _write(emit(ladder, args.format), args.output)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.n < 4:
        print("error: --n must be >= 4", file=sys.stderr)
        return EXIT_ERROR
    t0 = time.perf_counter()
    cross = construct_cross_labeling(args.n)
    t1 = time.perf_counter()
    prime = flip_alternate(cross)
    t2 = time.perf_counter()
    report = verify(prime)
    t3 = time.perf_counter()
    print(f"n={args.n}")
    print(f"  construct {t1 - t0:9.3f}s")
    print(f"  flip      {t2 - t1:9.3f}s")
    print(f"  verify    {t3 - t2:9.3f}s  ({report.checked_edges} edges, {len(report.violations)} violations)")
    print(f"  labels    {(cross.bottom.nbytes + cross.top.nbytes) / 2**20:9.1f} MiB")
    return EXIT_OK if report.ok else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prime-ladder", description="Prime labelings of ladder graphs")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="construct a labeling")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--stage", choices=("cross", "prime"), default="prime")
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="check a labeling file (JSON or CSV)")
    p.add_argument("input", help="path, or - for stdin")
    p.add_argument("--stage", choices=("cross", "prime"), help="override the stage (CSV default: prime)")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="construct, flip and verify every n in a range")
    p.add_argument("--from", dest="start", type=int, default=4)
    p.add_argument("--to", dest="stop", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--oracle", action="store_true", help="also run the backtracking oracle per n")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="construction vs backtracking oracle")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("export", help="convert a labeling file to another format")
    p.add_argument("input")
    p.add_argument("--format", choices=FORMATS, default="dot")
    p.add_argument("--stage", choices=("cross", "prime"))
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("bench", help="time construct, flip and verify")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
