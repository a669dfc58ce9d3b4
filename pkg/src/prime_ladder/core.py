"""Ladder data model shared by the construction, the verifier and the oracle.

A ladder with ``n`` columns is stored as two integer arrays, ``bottom`` and
``top``, read left to right. Columns are numbered from 1 in public APIs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

LABEL_DTYPE = np.int64


class Stage(str, enum.Enum):
    CROSS = "cross"
    PRIME = "prime"


class PatternMismatch(RuntimeError):
    """A rewrite found the ladder in a state other than the one it expects."""


class DuplicateLabel(ValueError):
    pass


class UnitAlreadyPlaced(RuntimeError):
    pass


@dataclass(frozen=True)
class Column:
    bottom: int
    top: int

    def __post_init__(self) -> None:
        if self.bottom < 1 or self.top < 1:
            raise ValueError(f"labels must be positive, got {self}")
        if self.bottom == self.top:
            raise ValueError(f"column carries the same label twice: {self.bottom}")

    def __iter__(self):
        yield self.bottom
        yield self.top


class SquareView(NamedTuple):
    """Corners of the square whose left column is ``index`` (1-based).

    ``a``/``b`` are bottom-left/bottom-right, ``c``/``d`` top-right/top-left.
    """

    a: int
    b: int
    c: int
    d: int
    index: int


def _as_label_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=LABEL_DTYPE)
    if arr.ndim != 1:
        raise ValueError("label rows must be one-dimensional")
    return arr


@dataclass(frozen=True, eq=False)
class LadderLabeling:
    """An immutable labeling of the n-ladder.

    The permutation property is *not* enforced here so that the verifier can
    report on broken inputs; use ``verify.check_permutation`` for that.
    """

    bottom: np.ndarray
    top: np.ndarray
    stage: Stage = Stage.CROSS

    def __post_init__(self) -> None:
        bottom = _as_label_array(self.bottom)
        top = _as_label_array(self.top)
        if bottom.shape != top.shape:
            raise ValueError(f"row lengths differ: {bottom.size} != {top.size}")
        if bottom.size == 0:
            raise ValueError("a ladder needs at least one column")
        if (bottom < 1).any() or (top < 1).any():
            raise ValueError("labels must be positive")
        same = np.flatnonzero(bottom == top)
        if same.size:
            raise ValueError(f"column {same[0] + 1} carries label {bottom[same[0]]} twice")
        bottom.flags.writeable = False
        top.flags.writeable = False
        object.__setattr__(self, "bottom", bottom)
        object.__setattr__(self, "top", top)
        object.__setattr__(self, "stage", Stage(self.stage))

    @classmethod
    def from_columns(cls, columns: Iterable[Sequence[int]], stage: Stage | str = Stage.CROSS) -> "LadderLabeling":
        pairs = [tuple(c) for c in columns]
        return cls(
            np.array([p[0] for p in pairs], dtype=LABEL_DTYPE),
            np.array([p[1] for p in pairs], dtype=LABEL_DTYPE),
            Stage(stage),
        )

    @property
    def n(self) -> int:
        return int(self.bottom.size)

    @property
    def columns(self) -> tuple[Column, ...]:
        return tuple(Column(b, t) for b, t in zip(self.bottom.tolist(), self.top.tolist()))

    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.bottom.tolist(), self.top.tolist()))

    def labels(self) -> np.ndarray:
        return np.concatenate([self.bottom, self.top])

    def with_stage(self, stage: Stage | str) -> "LadderLabeling":
        return LadderLabeling(self.bottom, self.top, Stage(stage))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LadderLabeling):
            return NotImplemented
        return (
            self.stage == other.stage
            and np.array_equal(self.bottom, other.bottom)
            and np.array_equal(self.top, other.top)
        )

    def __hash__(self) -> int:
        return hash((self.stage, self.bottom.tobytes(), self.top.tobytes()))

    def __repr__(self) -> str:
        shown = self.pairs() if self.n <= 12 else f"<{self.n} columns>"
        return f"LadderLabeling(stage={self.stage.value}, columns={shown})"


def squares(ladder: LadderLabeling) -> list[SquareView]:
    b = ladder.bottom.tolist()
    t = ladder.top.tolist()
    return [SquareView(b[i], b[i + 1], t[i + 1], t[i], i + 1) for i in range(len(b) - 1)]


@dataclass(frozen=True)
class RewriteStep:
    """A batch of identical window rewrites, one row per site.

    Row ``i`` replaces columns ``start[i] .. start[i] + L - 1`` of the builder,
    which must read exactly ``expected_*[i]``, by ``replacement_*[i]``.
    ``claims`` are labels this step moves out of their original columns;
    ``releases`` are labels whose original columns this step removes, each of
    which must already have been claimed.
    """

    description: str
    sites: tuple[str, ...]
    start: np.ndarray
    expected_bottom: np.ndarray
    expected_top: np.ndarray
    replacement_bottom: np.ndarray
    replacement_top: np.ndarray
    claims: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=LABEL_DTYPE))
    releases: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=LABEL_DTYPE))
    uses_unit: bool = False

    @property
    def expected(self) -> list[list[tuple[int, Column]]]:
        L = self.expected_bottom.shape[1]
        return [
            [(int(s) + j + 1, Column(int(bb[j]), int(tt[j]))) for j in range(L)]
            for s, bb, tt in zip(self.start, self.expected_bottom, self.expected_top)
        ]

    @property
    def replacement(self) -> list[list[Column]]:
        return [
            [Column(int(x), int(y)) for x, y in zip(bb, tt)]
            for bb, tt in zip(self.replacement_bottom, self.replacement_top)
        ]


class BuilderLadder:
    """Mutable ladder under construction.

    Window rewrites are recorded against the current column positions and
    applied together by :meth:`materialize`. Windows of pending rewrites may
    not overlap. Between a chain claim and the matching release a label is
    present twice (in the pending chain and at its original column); the
    uniqueness invariant is checked once the rewrites are materialized.
    """

    def __init__(self, n: int, bottom, top=None, used_unit: bool = False):
        self.n = int(n)
        self.bottom = np.array(bottom, dtype=LABEL_DTYPE)
        self.top = self.bottom + 1 if top is None else np.array(top, dtype=LABEL_DTYPE)
        self.used_unit = used_unit
        self._pos: np.ndarray | None = None
        self._reset_pending()
        self._claimed: list[np.ndarray] = []
        self._released: list[np.ndarray] = []

    def _reset_pending(self) -> None:
        self._touched = np.zeros(self.bottom.size, dtype=bool)
        self._drop: list[np.ndarray] = []
        self._ins_at: list[np.ndarray] = []
        self._ins_bottom: list[np.ndarray] = []
        self._ins_top: list[np.ndarray] = []

    def __len__(self) -> int:
        return int(self.bottom.size)

    @property
    def pending(self) -> bool:
        return bool(self._drop)

    def columns(self) -> list[tuple[int, int]]:
        return list(zip(self.bottom.tolist(), self.top.tolist()))

    def position_of(self, labels) -> np.ndarray:
        """0-based column index of each bottom label, -1 where absent."""
        if self._pos is None:
            pos = np.full(2 * self.n + 2, -1, dtype=np.int64)
            ok = (self.bottom >= 1) & (self.bottom < pos.size)
            pos[self.bottom[ok]] = np.flatnonzero(ok)
            self._pos = pos
        labels = np.asarray(labels, dtype=LABEL_DTYPE)
        out = np.full(labels.shape, -1, dtype=np.int64)
        inside = (labels >= 1) & (labels < self._pos.size)
        out[inside] = self._pos[labels[inside]]
        return out

    def insert_columns(self, at, bottom, top=None) -> None:
        """Insert columns before the given 0-based positions (no pending rewrites allowed)."""
        if self.pending:
            raise RuntimeError("materialize pending rewrites before inserting")
        at = np.asarray(at, dtype=np.int64)
        bottom = np.asarray(bottom, dtype=LABEL_DTYPE)
        top = bottom + 1 if top is None else np.asarray(top, dtype=LABEL_DTYPE)
        self.bottom = np.insert(self.bottom, at, bottom)
        self.top = np.insert(self.top, at, top)
        self._pos = None
        self._touched = np.zeros(self.bottom.size, dtype=bool)

    def rewrite(self, step: RewriteStep) -> None:
        L = step.expected_bottom.shape[1]
        start = np.asarray(step.start, dtype=np.int64)
        if start.size == 0:
            return
        size = len(self)
        bad = np.flatnonzero((start < 0) | (start + L > size))
        if bad.size:
            i = int(bad[0])
            raise PatternMismatch(
                f"{step.description} at {step.sites[i]}: window of {L} columns starting at "
                f"{int(start[i]) + 1} does not fit in a ladder of {size} columns"
            )
        idx = start[:, None] + np.arange(L)
        got_b = self.bottom[idx]
        got_t = self.top[idx]
        mismatch = ~((got_b == step.expected_bottom) & (got_t == step.expected_top)).all(axis=1)
        if mismatch.any():
            i = int(np.flatnonzero(mismatch)[0])
            raise PatternMismatch(
                f"{step.description} at {step.sites[i]}: expected columns "
                f"{list(zip(step.expected_bottom[i].tolist(), step.expected_top[i].tolist()))} "
                f"at positions {int(start[i]) + 1}..{int(start[i]) + L}, found "
                f"{list(zip(got_b[i].tolist(), got_t[i].tolist()))}"
            )
        flat = idx.ravel()
        if self._touched[flat].any() or np.unique(flat).size != flat.size:
            raise PatternMismatch(f"{step.description}: window overlaps another pending rewrite")
        if step.releases.size:
            claimed = np.concatenate(self._claimed) if self._claimed else np.empty(0, LABEL_DTYPE)
            missing = step.releases[~np.isin(step.releases, claimed)]
            if missing.size:
                raise PatternMismatch(
                    f"{step.description}: labels {missing.tolist()[:6]} were never claimed by a chain"
                )
        if step.uses_unit:
            if self.used_unit or start.size != 1:
                raise UnitAlreadyPlaced(f"{step.description}: labels 1 and 2 are already in use")
            self.used_unit = True

        self._touched[flat] = True
        self._drop.append(flat)
        R = step.replacement_bottom.shape[1]
        self._ins_at.append(np.repeat(start, R))
        self._ins_bottom.append(step.replacement_bottom.ravel())
        self._ins_top.append(step.replacement_top.ravel())
        if step.claims.size:
            self._claimed.append(step.claims)
        if step.releases.size:
            self._released.append(step.releases)

    def materialize(self, strict: bool = True) -> None:
        """Apply all pending rewrites.

        With ``strict`` every label claimed by a chain must have been released
        by the rewrite of its original column, which restores uniqueness.
        """
        if self.pending:
            keep = np.ones(len(self), dtype=bool)
            keep[np.concatenate(self._drop)] = False
            at = np.concatenate(self._ins_at)
            order = np.argsort(at, kind="stable")
            at = at[order]
            new_b = np.insert(self.bottom, at, np.concatenate(self._ins_bottom)[order])
            new_t = np.insert(self.top, at, np.concatenate(self._ins_top)[order])
            new_keep = np.insert(keep, at, True)
            self.bottom = new_b[new_keep]
            self.top = new_t[new_keep]
            self._pos = None
        self._reset_pending()
        if not strict:
            return
        claimed = np.sort(np.concatenate(self._claimed)) if self._claimed else np.empty(0, LABEL_DTYPE)
        released = np.sort(np.concatenate(self._released)) if self._released else np.empty(0, LABEL_DTYPE)
        if not np.array_equal(claimed, released):
            stray = np.setxor1d(claimed, released)
            raise PatternMismatch(f"chain labels claimed but not released (or vice versa): {stray.tolist()[:6]}")

    def freeze(self, stage: Stage = Stage.CROSS) -> LadderLabeling:
        if self.pending:
            self.materialize()
        return LadderLabeling(self.bottom.copy(), self.top.copy(), stage)
