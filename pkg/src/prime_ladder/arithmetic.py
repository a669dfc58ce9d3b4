"""Label sequences, the two insertion predicates and the insertion sets.

``a(k) = 6k - 3`` and ``b(k) = 6k - 1`` are the base bottom labels. The
remaining odd labels ``6l + 1`` (and ``7``) are inserted as extra columns;
where each one goes is decided by :func:`satisfies_p1` / :func:`satisfies_p3`.

The predicates work on Python ints and, elementwise, on numpy integer arrays.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import LABEL_DTYPE

PERIOD = 35


class Side(str, enum.Enum):
    A = "A"
    B = "B"


class Source(str, enum.Enum):
    C = "C"
    D = "D"
    SEVEN = "seven"


@dataclass(frozen=True, order=True)
class InsertionPlan:
    label: int
    side: Side
    ell: int
    source: Source

    def __post_init__(self) -> None:
        if self.source is Source.C and self.label != 6 * self.ell - 5:
            raise ValueError(f"C-plan label must be 6*ell-5: {self}")
        if self.source is Source.D and (self.label != 6 * self.ell + 1 or self.label < 13):
            raise ValueError(f"D-plan label must be 6*ell+1 >= 13: {self}")
        if self.source is Source.SEVEN and self.label != 7:
            raise ValueError(f"seven-plan must insert 7: {self}")


class InsertionTable(NamedTuple):
    """Column-wise form of a set of insertion plans, sorted by label."""

    label: np.ndarray
    side_a: np.ndarray  # bool; False means side B
    ell: np.ndarray
    source: np.ndarray  # 0 = C, 1 = D, 2 = seven

    def plans(self) -> list[InsertionPlan]:
        sources = (Source.C, Source.D, Source.SEVEN)
        return [
            InsertionPlan(lab, Side.A if sa else Side.B, ell, sources[src])
            for lab, sa, ell, src in zip(
                self.label.tolist(), self.side_a.tolist(), self.ell.tolist(), self.source.tolist()
            )
        ]

    @classmethod
    def from_plans(cls, plans) -> "InsertionTable":
        plans = sorted(plans)
        codes = {Source.C: 0, Source.D: 1, Source.SEVEN: 2}
        return cls(
            np.array([p.label for p in plans], dtype=LABEL_DTYPE),
            np.array([p.side is Side.A for p in plans], dtype=bool),
            np.array([p.ell for p in plans], dtype=LABEL_DTYPE),
            np.array([codes[p.source] for p in plans], dtype=np.int8),
        )


def a(k):
    return 6 * k - 3


def b(k):
    return 6 * k - 1


def satisfies_p1(ell):
    """(5 | l+3 and 7 | l+1) or (5 | l and 7 | l+3)."""
    return (((ell + 3) % 5 == 0) & ((ell + 1) % 7 == 0)) | ((ell % 5 == 0) & ((ell + 3) % 7 == 0))


def satisfies_p3(ell):
    """5 | l+1, or (5 | l+3 and 7 does not divide l+1), or (7 | l+3 and 5 divides neither l nor l+2)."""
    return (
        ((ell + 1) % 5 == 0)
        | (((ell + 3) % 5 == 0) & ((ell + 1) % 7 != 0))
        | (((ell + 3) % 7 == 0) & (ell % 5 != 0) & ((ell + 2) % 5 != 0))
    )


def _c_ells(n: int) -> np.ndarray:
    # c_l = 6l - 5 <= 2n - 1
    ell = np.arange(1, (2 * n + 4) // 6 + 1, dtype=LABEL_DTYPE)
    return ell[satisfies_p1(ell)]


def _d_ells(n: int) -> tuple[np.ndarray, np.ndarray]:
    # 13 <= 6l + 1 <= 2n - 1
    ell = np.arange(2, (2 * n - 2) // 6 + 1, dtype=LABEL_DTYPE)
    label = 6 * ell + 1
    in_c = satisfies_p1(ell + 1)  # 6l + 1 = c_{l+1}; the bound already holds
    return ell[~in_c], label[~in_c]


def insertion_table(n: int) -> InsertionTable:
    """All insertions for the n-ladder: C, D and the column holding 7."""
    if n < 4:
        raise ValueError("insertions are defined for n >= 4")
    c_ell = _c_ells(n)
    d_ell, d_label = _d_ells(n)
    label = np.concatenate([6 * c_ell - 5, d_label, [7]]).astype(LABEL_DTYPE)
    side_a = np.concatenate([np.ones(c_ell.size, bool), satisfies_p3(d_ell), [False]])
    ell = np.concatenate([c_ell, d_ell, [1]]).astype(LABEL_DTYPE)
    source = np.concatenate(
        [np.zeros(c_ell.size, np.int8), np.ones(d_ell.size, np.int8), [np.int8(2)]]
    ).astype(np.int8)
    order = np.argsort(label, kind="stable")
    return InsertionTable(label[order], side_a[order], ell[order], source[order])


def c_set(n: int) -> list[InsertionPlan]:
    ell = _c_ells(n)
    return [InsertionPlan(6 * l - 5, Side.A, l, Source.C) for l in ell.tolist()]


def d_set(n: int) -> list[InsertionPlan]:
    ell, label = _d_ells(n)
    side_a = satisfies_p3(ell)
    return [
        InsertionPlan(lab, Side.A if sa else Side.B, l, Source.D)
        for l, lab, sa in zip(ell.tolist(), label.tolist(), side_a.tolist())
    ]


SEVEN_PLAN = InsertionPlan(7, Side.B, 1, Source.SEVEN)
