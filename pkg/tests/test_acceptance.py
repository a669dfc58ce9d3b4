"""Acceptance criteria, one recorded PASS/FAIL line each.

Run alone with ``pytest tests/test_acceptance.py -s`` to see the lines as
they are produced; they are also repeated in the terminal summary.
"""

import json
import os
import time

import pytest

from prime_ladder import LadderLabeling, Stage, construct_cross_labeling, flip_alternate
from prime_ladder.cli import EXIT_VIOLATION, fixup_histogram, main, run_sweep
from prime_ladder.oracle import backtrack_prime_labeling, count_prime_labelings
from prime_ladder.verify import check_permutation, check_prime, verify

SWEEP_FROM, SWEEP_TO = 4, 25000
N10 = [(19, 20), (17, 18), (11, 12), (5, 6), (7, 8), (3, 4), (9, 10), (13, 14), (15, 16), (1, 2)]
SMALL_PRIME = {
    1: ([1], [2]),
    2: ([1, 4], [2, 3]),
    3: ([2, 1, 6], [3, 4, 5]),
}


@pytest.fixture(scope="module")
def sweep():
    return run_sweep(SWEEP_FROM, SWEEP_TO, jobs=max(1, os.cpu_count() or 1))


@pytest.mark.slow
def test_full_sweep(sweep, record):
    passed = sweep.ok and not sweep.failures
    detail = f"n={SWEEP_FROM}..{SWEEP_TO} failures={len(sweep.failures)} ({sweep.elapsed:.1f}s)"
    if sweep.failures:
        detail += f" first={sweep.failures[0]}"
    assert record("full sweep 4..25000", passed, detail)


@pytest.mark.slow
def test_branch_coverage(sweep, record):
    first = sweep.first_fired
    fires = {n: fixup_histogram(n) for n in (56, 57, 58, 1155)}
    checks = {
        "A-Case1b fires at 56 and 57": fires[56].get("A-Case1b") and fires[57].get("A-Case1b"),
        "A-Case1b first at 56": first.get("A-Case1b") == 56,
        "A-Case1a first at 58": first.get("A-Case1a") == 58,
        "B-Case1a first at 105": first.get("B-Case1a") == 105,
        "A-Case2a first by 581": first.get("A-Case2a", 10**9) <= 581,
        "A-Case3 first by 581": first.get("A-Case3", 10**9) <= 581,
        "B-Case3insert1 fires at 1155": bool(fires[1155].get("B-Case3insert1")),
        "B-Case2a first at 1156": first.get("B-Case2a") == 1156,
        "A-Case2b first by 7508": first.get("A-Case2b", 10**9) <= 7508,
        "B-Case2b first by 11551": first.get("B-Case2b", 10**9) <= 11551,
        "A-chain t=2 first by 6353": first.get("A-chain-t2", 10**9) <= 6353,
    }
    failed = [k for k, ok in checks.items() if not ok]
    shown = {k: first.get(k) for k in sorted(first) if not k.startswith("B-chain")}
    assert record("branch coverage", not failed, f"first_fired={json.dumps(shown)} failed={failed}")


def test_oracle_agreement(record):
    bad = []
    for n in range(1, 13):
        found = backtrack_prime_labeling(n)
        ours = flip_alternate(construct_cross_labeling(n))
        if found is None or not verify(found).ok or not verify(ours).ok:
            bad.append(n)
    for n, (bottom, top) in SMALL_PRIME.items():
        ours = flip_alternate(construct_cross_labeling(n))
        fixture = LadderLabeling(bottom, top, Stage.PRIME)
        if ours != fixture or not (check_permutation(fixture).ok and check_prime(fixture).ok):
            bad.append(f"fixture {n}")
    assert record("oracle agreement n=1..12 and n<=3 fixtures", not bad, f"bad={bad}")


def test_brute_force_counts(record):
    c2, c3 = count_prime_labelings(2), count_prime_labelings(3)
    assert record("count regression", c2 == 8 and c3 == 16, f"count(2)={c2} count(3)={c3}")


def test_worked_fixture(record):
    first, second = construct_cross_labeling(10), construct_cross_labeling(10)
    same = first.bottom.tobytes() == second.bottom.tobytes() and first.top.tobytes() == second.top.tobytes()
    passed = first.pairs() == N10 and same
    assert record("n=10 worked fixture", passed, f"columns={first.pairs()} deterministic={same}")


def test_scale_smoke(record):
    t0 = time.perf_counter()
    prime = flip_alternate(construct_cross_labeling(10**6))
    report = verify(prime)
    elapsed = time.perf_counter() - t0
    passed = report.ok and elapsed < 10
    assert record("scale smoke n=10^6", passed, f"{elapsed:.2f}s violations={len(report.violations)}")


def test_negative_controls(record, tmp_path, capsys):
    good = flip_alternate(construct_cross_labeling(10))
    results = {}

    # swap the first two bottom labels: 18 now sits next to 20 on the top-left rung
    bottom = good.bottom.copy()
    bottom[0], bottom[1] = bottom[1], bottom[0]
    swapped = tmp_path / "swapped.json"
    swapped.write_text(json.dumps({"n": 10, "stage": "prime", "bottom": bottom.tolist(), "top": good.top.tolist()}))
    code = main(["verify", str(swapped), "--json"])
    report = json.loads(capsys.readouterr().out)
    results["gcd-2 swap"] = code == EXIT_VIOLATION and any(
        v["kind"] == "EdgeFail" and v["gcd"] == 2 for v in report["violations"]
    ) and all(v["kind"] == "EdgeFail" for v in report["violations"])

    top = good.top.copy()
    top[-1] = top[0]
    dup = tmp_path / "dup.json"
    dup.write_text(json.dumps({"n": 10, "stage": "prime", "bottom": good.bottom.tolist(), "top": top.tolist()}))
    code = main(["verify", str(dup), "--json"])
    report = json.loads(capsys.readouterr().out)
    results["duplicate label"] = code == EXIT_VIOLATION and any(
        v["kind"] == "NotPermutation" and v["where"] == "duplicate" for v in report["violations"]
    )
    failed = [k for k, ok in results.items() if not ok]
    assert record("negative controls", not failed, f"{results}")
