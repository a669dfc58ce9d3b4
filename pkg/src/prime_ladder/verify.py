"""Independent checks of a ladder labeling.

Nothing here depends on how the labeling was built; the checks work from
the definition only (distinct labels 1..2n, coprime neighbours).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .core import LadderLabeling, Stage


class ViolationKind(str, enum.Enum):
    NOT_PERMUTATION = "NotPermutation"
    CROSS_FAIL = "CrossFail"
    EDGE_FAIL = "EdgeFail"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    location: int | None  # 1-based column (or left column of a square)
    labels: tuple[int, ...]
    gcd: int | None = None
    where: str = ""

    def __post_init__(self) -> None:
        if self.kind is not ViolationKind.NOT_PERMUTATION and (self.gcd is None or self.gcd < 2):
            raise ValueError("gcd failures need a common divisor >= 2")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "location": self.location,
            "labels": list(self.labels),
            "gcd": self.gcd,
            "where": self.where,
        }

    def __str__(self) -> str:
        loc = "-" if self.location is None else self.location
        extra = f" gcd={self.gcd}" if self.gcd is not None else ""
        return f"{self.kind.value} at {loc} {self.where} labels={list(self.labels)}{extra}".replace("  ", " ")


@dataclass
class VerificationReport:
    n: int
    stage: str
    violations: list[Violation] = field(default_factory=list)
    checked_edges: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        return VerificationReport(
            self.n,
            self.stage if self.stage == other.stage else f"{self.stage}+{other.stage}",
            self.violations + other.violations,
            self.checked_edges + other.checked_edges,
        )

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "stage": self.stage,
            "ok": self.ok,
            "checked_edges": self.checked_edges,
            "violations": [v.to_dict() for v in self.violations],
        }


def check_permutation(ladder: LadderLabeling) -> VerificationReport:
    n = ladder.n
    labels = ladder.labels()
    cols = np.concatenate([np.arange(1, n + 1), np.arange(1, n + 1)])
    report = VerificationReport(n, "permutation")
    out_of_range = np.flatnonzero((labels < 1) | (labels > 2 * n))
    for i in out_of_range.tolist():
        report.violations.append(
            Violation(ViolationKind.NOT_PERMUTATION, int(cols[i]), (int(labels[i]),), where="out of range")
        )
    inside = labels[(labels >= 1) & (labels <= 2 * n)]
    counts = np.bincount(inside, minlength=2 * n + 1)
    if (counts[1:] > 1).any():
        seen = np.zeros(2 * n + 1, dtype=bool)
        # report each repeat at the column of its second and later occurrences
        for i, v in enumerate(labels.tolist()):
            if 1 <= v <= 2 * n:
                if seen[v]:
                    report.violations.append(
                        Violation(ViolationKind.NOT_PERMUTATION, int(cols[i]), (v,), where="duplicate")
                    )
                seen[v] = True
    missing = np.flatnonzero(counts[1:] == 0) + 1
    if missing.size:
        report.violations.append(
            Violation(ViolationKind.NOT_PERMUTATION, None, tuple(missing.tolist()), where="missing")
        )
    return report


def _pair_failures(x: np.ndarray, y: np.ndarray, kind: ViolationKind, where: str, offset: int = 1):
    g = np.gcd(x, y)
    bad = np.flatnonzero(g > 1)
    return [
        Violation(kind, int(i) + offset, (int(x[i]), int(y[i])), int(g[i]), where)
        for i in bad.tolist()
    ]


def check_cross(ladder: LadderLabeling) -> VerificationReport:
    """gcd(a,d) = gcd(b,c) = gcd(a,c) = gcd(b,d) = 1 for every square."""
    if ladder.stage is not Stage.CROSS:
        raise ValueError("check_cross expects a cross-stage ladder")
    a, b = ladder.bottom[:-1], ladder.bottom[1:]
    c, d = ladder.top[1:], ladder.top[:-1]
    report = VerificationReport(ladder.n, Stage.CROSS.value, checked_edges=4 * (ladder.n - 1))
    for x, y, where in ((a, d, "a-d"), (b, c, "b-c"), (a, c, "a-c"), (b, d, "b-d")):
        report.violations.extend(_pair_failures(x, y, ViolationKind.CROSS_FAIL, where))
    report.violations.sort(key=lambda v: v.location)
    return report


def check_prime(ladder: LadderLabeling) -> VerificationReport:
    """Every edge of the ladder (n rungs, 2(n-1) rails) joins coprime labels."""
    if ladder.stage is not Stage.PRIME:
        raise ValueError("check_prime expects a prime-stage ladder")
    bottom, top = ladder.bottom, ladder.top
    report = VerificationReport(ladder.n, Stage.PRIME.value, checked_edges=3 * ladder.n - 2)
    report.violations.extend(_pair_failures(bottom, top, ViolationKind.EDGE_FAIL, "rung"))
    report.violations.extend(_pair_failures(bottom[:-1], bottom[1:], ViolationKind.EDGE_FAIL, "bottom"))
    report.violations.extend(_pair_failures(top[:-1], top[1:], ViolationKind.EDGE_FAIL, "top"))
    report.violations.sort(key=lambda v: v.location)
    return report


def verify(ladder: LadderLabeling) -> VerificationReport:
    """Permutation check plus the check matching the ladder's stage."""
    stage_check = check_cross if ladder.stage is Stage.CROSS else check_prime
    report = check_permutation(ladder).merge(stage_check(ladder))
    report.stage = ladder.stage.value
    return report
