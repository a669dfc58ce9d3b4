"""Construction of a cross-condition labeling of the n-ladder.

Pipeline for ``n >= 4``::

    base_rows -> apply_insertions -> fixups (A and B sites) -> place_unit_column

Only two kinds of square can fail the cross condition after the insertions:
the square between ``a_k`` and ``a_{k+1}`` for ``k = 35q - 17`` (an *A site*,
``m = 210q - 105``) and the square between ``b_{k+1}`` and ``b_k`` for
``k = 35q - 1`` (a *B site*, ``m = 210q``). Each site is repaired by a local
rewrite of a few consecutive columns. When ``11m < 2n`` the rewrite also
inserts a chain of columns carrying ``11^j m`` (and a neighbour); those labels
are taken from the sites ``11^j m``, whose own rewrite (Case 3) then drops
the two vacated labels by merging two columns into one.

All rewrites of one kind, case and chain length are applied as a single
vectorized :class:`~prime_ladder.core.RewriteStep`, which first checks that
every window reads exactly as expected.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from . import arithmetic
from .arithmetic import InsertionPlan, InsertionTable, insertion_table
from .core import (
    LABEL_DTYPE,
    BuilderLadder,
    DuplicateLabel,
    LadderLabeling,
    PatternMismatch,
    RewriteStep,
    Stage,
    UnitAlreadyPlaced,
)


class Kind(str, enum.Enum):
    A = "A"
    B = "B"


class Case(str, enum.Enum):
    CASE1A = "Case1a"
    CASE1B = "Case1b"
    CASE2A = "Case2a"
    CASE2B = "Case2b"
    CASE3 = "Case3"
    CASE3_INSERT1 = "Case3insert1"


KINDS = (Kind.A, Kind.B)
CASES = tuple(Case)

# Cross labelings for n <= 3; flip_alternate turns them into
# [(1,2)], [(1,2),(4,3)] and [(2,3),(1,4),(6,5)].
SMALL_CROSS = {
    1: ((1, 2),),
    2: ((1, 2), (3, 4)),
    3: ((2, 3), (4, 1), (6, 5)),
}


@dataclass(frozen=True)
class FixupSite:
    kind: Kind
    q: int
    k: int
    m: int
    case: Case
    t: int = 0

    def __post_init__(self) -> None:
        if self.kind is Kind.A and (self.m != 210 * self.q - 105 or self.k != 35 * self.q - 17):
            raise ValueError(f"inconsistent A site {self}")
        if self.kind is Kind.B and (self.m != 210 * self.q or self.k != 35 * self.q - 1):
            raise ValueError(f"inconsistent B site {self}")
        if self.case in (Case.CASE2A, Case.CASE2B) and self.t < 1:
            raise ValueError(f"a Case 2 site needs a chain: {self}")

    def label(self) -> str:
        return f"{self.kind.value}-{self.case.value}"


class FixupTable(NamedTuple):
    """Column-wise fixup sites, ordered by ascending ``m``."""

    kind: np.ndarray  # 0 = A, 1 = B
    q: np.ndarray
    m: np.ndarray
    case: np.ndarray  # index into CASES
    t: np.ndarray

    def __len__(self) -> int:
        return int(self.q.size)

    def sites(self) -> list[FixupSite]:
        out = []
        for kind, q, m, case, t in zip(
            self.kind.tolist(), self.q.tolist(), self.m.tolist(), self.case.tolist(), self.t.tolist()
        ):
            k = 35 * q - 17 if kind == 0 else 35 * q - 1
            out.append(FixupSite(KINDS[kind], q, k, m, CASES[case], t))
        return out

    def histogram(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for kind in (0, 1):
            for ci, case in enumerate(CASES):
                c = int(np.count_nonzero((self.kind == kind) & (self.case == ci)))
                if c:
                    counts[f"{KINDS[kind].value}-{case.value}"] = c
        return counts


def _chain_length(m: np.ndarray, two_n: int) -> np.ndarray:
    """Largest t with 11**t * m < 2n (0 if 11m >= 2n)."""
    t = np.zeros(m.shape, dtype=np.int64)
    p = m * 11
    while True:
        grow = p < two_n
        if not grow.any():
            return t
        t += grow
        p = np.where(grow, p * 11, p)


def fixup_table(n: int) -> FixupTable:
    two_n = 2 * n
    ci = {c: i for i, c in enumerate(CASES)}

    qa = np.arange(1, (two_n + 104) // 210 + 1, dtype=LABEL_DTYPE)
    ma = 210 * qa - 105
    div11 = ma % 11 == 0
    # A Case 3 needs only its own column (m <= 2n-1); other cases need the a_k-square (m+7 <= 2n)
    keep = np.where(div11, ma <= two_n - 1, ma + 7 <= two_n)
    qa, ma, div11 = qa[keep], ma[keep], div11[keep]
    case_a = np.select(
        [
            div11,
            11 * ma > two_n,
            (ma - 1) % 11 == 0,
        ],
        [
            ci[Case.CASE3],
            np.where(210 * qa - 94 <= two_n, ci[Case.CASE1A], ci[Case.CASE1B]),
            ci[Case.CASE2B],
        ],
        default=ci[Case.CASE2A],
    )

    qb = np.arange(1, two_n // 210 + 1, dtype=LABEL_DTYPE)
    mb = 210 * qb
    case_b = np.select(
        [
            (mb % 11 == 0) & (mb < two_n),
            mb % 11 == 0,
            11 * mb >= two_n,
            (mb + 1) % 11 == 0,
        ],
        [ci[Case.CASE3], ci[Case.CASE3_INSERT1], ci[Case.CASE1A], ci[Case.CASE2B]],
        default=ci[Case.CASE2A],
    )

    m = np.concatenate([ma, mb])
    is_chain = np.isin(
        np.concatenate([case_a, case_b]), [ci[Case.CASE2A], ci[Case.CASE2B]]
    )
    t = np.where(is_chain, _chain_length(m, two_n), 0)
    kind = np.concatenate([np.zeros(ma.size, np.int8), np.ones(mb.size, np.int8)])
    q = np.concatenate([qa, qb])
    case = np.concatenate([case_a, case_b]).astype(np.int8)
    order = np.argsort(m, kind="stable")
    return FixupTable(kind[order], q[order], m[order], case[order], t[order])


def find_fixups(n: int) -> list[FixupSite]:
    if n < 4:
        raise ValueError("fixups are defined for n >= 4")
    return fixup_table(n).sites()


# ---------------------------------------------------------------------------
# base rows and insertions


def _row_counts(n: int) -> tuple[int, int]:
    """(r, s): number of a-columns and b-columns in the base rows."""
    return (n + 1) // 3, n // 3


def base_rows(n: int) -> BuilderLadder:
    if n < 4:
        raise ValueError("the construction starts at n = 4")
    r, s = _row_counts(n)
    bottom = np.concatenate(
        [arithmetic.b(np.arange(s, 0, -1, dtype=LABEL_DTYPE)), arithmetic.a(np.arange(1, r + 1, dtype=LABEL_DTYPE))]
    )
    return BuilderLadder(n, bottom)


def apply_insertions(
    builder: BuilderLadder, plans: InsertionTable | Iterable[InsertionPlan]
) -> BuilderLadder:
    """Insert one column (x, x+1) per plan into the base rows.

    Side A goes right of ``a_l`` and side B left of ``b_l``; 7 goes between
    ``b_1`` and ``a_1``. A missing outer neighbour puts the column at the row end.
    """
    if not isinstance(plans, InsertionTable):
        plans = InsertionTable.from_plans(plans)
    r, s = _row_counts(builder.n)
    if len(builder) != r + s:
        raise ValueError("insertions apply to the base rows only")
    present = np.concatenate([builder.bottom, builder.top])
    clash = np.concatenate([plans.label[np.isin(plans.label, present)], plans.label[np.isin(plans.label + 1, present)]])
    if clash.size or np.unique(plans.label).size != plans.label.size:
        dup = clash.tolist() if clash.size else sorted(set(plans.label.tolist()))
        raise DuplicateLabel(f"insertion would duplicate labels {dup[:6]}")
    if (plans.label + 1 > 2 * builder.n).any():
        raise ValueError("insertion labels must stay within 1..2n")
    at = np.where(
        plans.source == 2,
        s,
        np.where(plans.side_a, np.minimum(s + plans.ell, s + r), s - plans.ell),
    )
    if (at < 0).any():
        raise ValueError("side-B insertion beyond the last b column")
    order = np.argsort(at, kind="stable")
    builder.insert_columns(at[order], plans.label[order])
    return builder


# ---------------------------------------------------------------------------
# fixup rewrites
#
# Columns are (bottom, top) offsets from M = 210q. CHAIN_UP / CHAIN_DOWN
# expand to the chain columns in ascending / descending powers of 11;
# UNIT is the column (1, 2).

CHAIN_UP = "chain_up"
CHAIN_DOWN = "chain_down"
UNIT = "unit"

TEMPLATES: dict[tuple[Kind, Case], tuple[list, list]] = {
    (Kind.A, Case.CASE1A): (
        [(-105, -104), (-99, -98), (-95, -94)],
        [(-105, -104), (-99, -94), (-95, -98)],
    ),
    (Kind.A, Case.CASE1B): (
        [(-105, -104), (-99, -98)],
        [(-105, -104), UNIT, (-99, -98)],
    ),
    (Kind.A, Case.CASE2A): (
        [(-107, -106), (-105, -104), (-99, -98), (-95, -94)],
        [(-107, -106), CHAIN_UP, (-105, -94), (-99, -104), (-95, -98)],
    ),
    (Kind.A, Case.CASE2B): (
        [(-111, -110), (-107, -106), (-105, -104), (-99, -98), (-95, -94)],
        [(-111, -110), (-99, -106), (-105, -94), CHAIN_DOWN, (-107, -104), (-95, -98)],
    ),
    (Kind.A, Case.CASE3): (
        [(-107, -106), (-105, -104)],
        [(-107, -104)],
    ),
    # the printed diagram shows 210q-2 on top of the 210q-13 column; that label
    # belongs to a_{35q}, so the top stays 210q-12
    (Kind.B, Case.CASE1A): (
        [(-1, 0), (-7, -6), (-11, -10), (-13, -12)],
        [(-1, 0), (-11, -6), (-7, -10), (-13, -12)],
    ),
    (Kind.B, Case.CASE2A): (
        [(1, 2), (-1, 0), (-7, -6), (-11, -10)],
        [(1, 2), CHAIN_UP, (-11, 0), (-1, -6), (-7, -10)],
    ),
    (Kind.B, Case.CASE2B): (
        [(5, 6), (1, 2), (-1, 0), (-7, -6), (-11, -10)],
        [(5, 6), (1, -6), (-11, 0), CHAIN_DOWN, (-1, 2), (-7, -10)],
    ),
    (Kind.B, Case.CASE3): (
        [(1, 2), (-1, 0)],
        [(-1, 2)],
    ),
    (Kind.B, Case.CASE3_INSERT1): (
        [(-1, 0), (-7, -6)],
        [(-1, 0), UNIT, (-7, -6)],
    ),
}


def _chain_columns(kind: Kind, m: np.ndarray, t: int) -> list[tuple[np.ndarray, np.ndarray]]:
    cols = []
    for j in range(1, t + 1):
        v = m * 11**j
        cols.append((v, v - 1) if kind is Kind.A else (v + 1, v))
    return cols


def _check_a_side_conditions(q: np.ndarray) -> None:
    k = 35 * q - 17
    ok = ~arithmetic.satisfies_p1(k + 1) & ~arithmetic.satisfies_p1(k + 2) & arithmetic.satisfies_p3(k + 1)
    if not ok.all():
        raise PatternMismatch(f"A-site side conditions fail for q={q[~ok].tolist()[:6]}")


def rewrite_step(kind: Kind, case: Case, q, t: int, builder: BuilderLadder) -> RewriteStep:
    """The batched rewrite for all sites ``q`` sharing kind, case and chain length."""
    q = np.atleast_1d(np.asarray(q, dtype=LABEL_DTYPE))
    before, after = TEMPLATES[(kind, case)]
    M = 210 * q
    m = M - 105 if kind is Kind.A else M
    if case in (Case.CASE2A, Case.CASE2B) and t < 1:
        raise ValueError("Case 2 rewrites need t >= 1")
    if kind is Kind.A:
        _check_a_side_conditions(q)

    exp_b = M[:, None] + np.array([c[0] for c in before], dtype=LABEL_DTYPE)
    exp_t = M[:, None] + np.array([c[1] for c in before], dtype=LABEL_DTYPE)

    chain = _chain_columns(kind, m, t)
    rep: list[tuple[np.ndarray, np.ndarray]] = []
    for item in after:
        if item == CHAIN_UP:
            rep.extend(chain)
        elif item == CHAIN_DOWN:
            rep.extend(reversed(chain))
        elif item == UNIT:
            rep.append((np.ones_like(M), np.full_like(M, 2)))
        else:
            rep.append((M + item[0], M + item[1]))
    rep_b = np.stack([c[0] for c in rep], axis=1)
    rep_t = np.stack([c[1] for c in rep], axis=1)

    claims = np.concatenate([np.concatenate(c) for c in chain]) if chain else np.empty(0, LABEL_DTYPE)
    releases = np.empty(0, LABEL_DTYPE)
    if case is Case.CASE3:
        releases = np.concatenate([m, m - 1]) if kind is Kind.A else np.concatenate([m, m + 1])

    start = builder.position_of(exp_b[:, 0])
    missing = np.flatnonzero(start < 0)
    if missing.size:
        i = int(missing[0])
        raise PatternMismatch(
            f"{kind.value}-{case.value} at q={int(q[i])}: anchor label {int(exp_b[i, 0])} is not a bottom label"
        )
    return RewriteStep(
        description=f"{kind.value}-{case.value} (t={t})",
        sites=tuple(f"q={qq} (m={mm})" for qq, mm in zip(q.tolist(), m.tolist())),
        start=start,
        expected_bottom=exp_b,
        expected_top=exp_t,
        replacement_bottom=rep_b,
        replacement_top=rep_t,
        claims=claims,
        releases=releases,
        uses_unit=UNIT in after,
    )


def apply_a_fixup(builder: BuilderLadder, site: FixupSite) -> BuilderLadder:
    if site.kind is not Kind.A:
        raise ValueError(f"not an A site: {site}")
    builder.rewrite(rewrite_step(Kind.A, site.case, [site.q], site.t, builder))
    return builder


def apply_b_fixup(builder: BuilderLadder, site: FixupSite) -> BuilderLadder:
    if site.kind is not Kind.B:
        raise ValueError(f"not a B site: {site}")
    builder.rewrite(rewrite_step(Kind.B, site.case, [site.q], site.t, builder))
    return builder


def apply_fixups(builder: BuilderLadder, table: FixupTable) -> BuilderLadder:
    """Apply every site of ``table`` in batches.

    Windows never overlap, so the only ordering constraint is that a chain
    claims its labels before the Case 3 site releases them; running Case 3
    batches last satisfies it.
    """
    groups: dict[tuple[int, int, int], list[int]] = {}
    for i, key in enumerate(zip(table.kind.tolist(), table.case.tolist(), table.t.tolist())):
        groups.setdefault(key, []).append(i)
    case3 = CASES.index(Case.CASE3)
    for (kind, case, t), idx in sorted(groups.items(), key=lambda kv: (kv[0][1] == case3, kv[0])):
        step = rewrite_step(KINDS[kind], CASES[case], table.q[idx], t, builder)
        builder.rewrite(step)
    return builder


def place_unit_column(builder: BuilderLadder) -> BuilderLadder:
    """Append the column (1, 2) at the right end."""
    if builder.used_unit:
        raise UnitAlreadyPlaced("labels 1 and 2 were consumed by a fixup")
    builder.materialize()
    last = int(builder.bottom[-1])
    if last % 2 == 0:
        raise PatternMismatch(f"rightmost bottom label {last} is even; (1, 2) cannot follow it")
    builder.insert_columns([len(builder)], [1], [2])
    builder.used_unit = True
    return builder


def construct_cross_labeling(n: int) -> LadderLabeling:
    if n < 1:
        raise ValueError("n must be positive")
    if n in SMALL_CROSS:
        return LadderLabeling.from_columns(SMALL_CROSS[n], Stage.CROSS)
    builder = apply_insertions(base_rows(n), insertion_table(n))
    apply_fixups(builder, fixup_table(n))
    builder.materialize()
    if not builder.used_unit:
        place_unit_column(builder)
    if len(builder) != n:
        raise PatternMismatch(f"constructed {len(builder)} columns, expected {n}")
    return builder.freeze(Stage.CROSS)
