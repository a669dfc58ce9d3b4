from math import gcd

import numpy as np
from hypothesis import given, settings, strategies as st
import pytest

from prime_ladder import LadderLabeling, Stage, construct_cross_labeling, flip_alternate
from prime_ladder.verify import (
    Violation,
    ViolationKind,
    check_cross,
    check_permutation,
    check_prime,
    verify,
)


def L(cols, stage=Stage.PRIME):
    return LadderLabeling.from_columns(cols, stage)


def test_permutation_examples():
    assert check_permutation(L([(1, 2), (4, 3)])).ok
    assert check_permutation(L([(1, 2), (3, 4), (5, 6)])).ok
    report = check_permutation(L([(1, 2), (4, 5)]))
    assert {v.kind for v in report.violations} == {ViolationKind.NOT_PERMUTATION}
    wheres = {v.where: v.labels for v in report.violations}
    assert wheres["out of range"] == (5,) and wheres["missing"] == (3,)


def test_duplicate_reported_at_second_occurrence():
    report = check_permutation(L([(1, 2), (3, 1)]))
    dup = [v for v in report.violations if v.where == "duplicate"]
    assert len(dup) == 1 and dup[0].location == 2 and dup[0].labels == (1,)


def test_cross_examples():
    # corners a=bottom-left, b=bottom-right, c=top-right, d=top-left
    assert check_cross(L([(3, 4), (9, 10)], Stage.CROSS)).ok
    report = check_cross(L([(3, 4), (5, 6)], Stage.CROSS))
    assert [(v.where, v.gcd) for v in report.violations] == [("a-c", 3)]
    assert report.violations[0].kind is ViolationKind.CROSS_FAIL
    report = check_cross(L([(105, 106), (111, 112)], Stage.CROSS))
    assert [(v.where, v.labels, v.gcd) for v in report.violations] == [("a-c", (105, 112), 7)]


def test_prime_examples():
    report = check_prime(L([(1, 2), (4, 3)]))
    assert report.ok and report.checked_edges == 4
    report = check_prime(L([(2, 1), (4, 3)]))
    assert len(report.violations) == 1
    v = report.violations[0]
    assert (v.kind, v.where, v.labels, v.gcd) == (ViolationKind.EDGE_FAIL, "bottom", (2, 4), 2)


def test_stage_preconditions():
    with pytest.raises(ValueError):
        check_cross(L([(1, 2)]))
    with pytest.raises(ValueError):
        check_prime(L([(1, 2)], Stage.CROSS))


def test_violation_needs_common_divisor():
    with pytest.raises(ValueError):
        Violation(ViolationKind.EDGE_FAIL, 1, (1, 2), 1)
    Violation(ViolationKind.NOT_PERMUTATION, None, (3,))


def test_verify_dispatches_on_stage():
    cross = construct_cross_labeling(10)
    assert verify(cross).ok and verify(cross).stage == "cross"
    prime = flip_alternate(cross)
    report = verify(prime)
    assert report.ok and report.stage == "prime" and report.checked_edges == 28


def test_report_to_dict():
    d = verify(L([(2, 1), (4, 3)])).to_dict()
    assert d["ok"] is False
    assert d["violations"][0]["kind"] == "EdgeFail"


def test_swapping_a_pair_breaks_a_valid_labeling():
    prime = flip_alternate(construct_cross_labeling(10))
    bottom, top = prime.bottom.copy(), prime.top.copy()
    # column 1 is (19, 20); swapping 19 with the 18 next to it joins 20 and 18
    bottom[0], bottom[1] = bottom[1], bottom[0]
    report = verify(LadderLabeling(bottom, top, Stage.PRIME))
    assert not report.ok
    assert all(v.kind is ViolationKind.EDGE_FAIL for v in report.violations)
    assert any(v.gcd == 2 for v in report.violations)


def _naive_prime_failures(bottom, top):
    out = set()
    for i in range(len(bottom)):
        if gcd(bottom[i], top[i]) > 1:
            out.add(("rung", i + 1))
        if i + 1 < len(bottom):
            if gcd(bottom[i], bottom[i + 1]) > 1:
                out.add(("bottom", i + 1))
            if gcd(top[i], top[i + 1]) > 1:
                out.add(("top", i + 1))
    return out


def _naive_cross_failures(bottom, top):
    out = set()
    for i in range(len(bottom) - 1):
        a, b, c, d = bottom[i], bottom[i + 1], top[i + 1], top[i]
        for where, x, y in (("a-d", a, d), ("b-c", b, c), ("a-c", a, c), ("b-d", b, d)):
            if gcd(x, y) > 1:
                out.add((where, i + 1))
    return out


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 12).flatmap(lambda n: st.permutations(range(1, 2 * n + 1))))
def test_matches_naive_gcd(perm):
    perm = list(perm)
    n = len(perm) // 2
    bottom, top = perm[:n], perm[n:]
    prime = check_prime(LadderLabeling(bottom, top, Stage.PRIME))
    assert {(v.where, v.location) for v in prime.violations} == _naive_prime_failures(bottom, top)
    cross = check_cross(LadderLabeling(bottom, top, Stage.CROSS))
    assert {(v.where, v.location) for v in cross.violations} == _naive_cross_failures(bottom, top)
    assert check_permutation(LadderLabeling(bottom, top)).ok


def test_large_labels_do_not_overflow():
    n = 10**6
    prime = flip_alternate(construct_cross_labeling(n))
    assert prime.labels().max() == 2 * n
    assert check_prime(prime).checked_edges == 3 * n - 2
