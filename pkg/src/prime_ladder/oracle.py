"""Brute-force ground truth for small ladders."""

from __future__ import annotations

from functools import lru_cache
from math import gcd

from .core import LadderLabeling, Stage

DEFAULT_BUDGET = 10**8


class BudgetExhausted(RuntimeError):
    pass


def coprime_adjacent(u: int, v: int) -> bool:
    """Adjacency in the coprime graph on {1, 2, ...}."""
    if u < 1 or v < 1:
        raise ValueError("labels must be positive")
    return gcd(u, v) == 1


def _coprime_table(size: int) -> list[list[bool]]:
    return [[gcd(u, v) == 1 for v in range(size + 1)] for u in range(size + 1)]


def backtrack_prime_labeling(n: int, budget: int = DEFAULT_BUDGET) -> LadderLabeling | None:
    """First prime labeling of the n-ladder in a fixed search order.

    Cells are filled column by column, bottom before top, trying labels in
    ascending order and pruning as soon as a placed edge is not coprime.
    Returns ``None`` if the search space is exhausted without a labeling.

    Besides the edge test the search uses one counting fact: the n even
    labels need n pairwise non-adjacent cells, so every column holds exactly
    one even label and consecutive columns hold it in opposite rows. Once the
    first cell is labeled, the parity of every other cell is fixed. This only
    discards dead branches, so the first labeling found is unchanged.
    """
    if n < 1:
        raise ValueError("n must be positive")
    size = 2 * n
    cop = _coprime_table(size)
    cells = [0] * size  # cell 2i is bottom of column i, 2i+1 its top
    used = [False] * (size + 1)
    nodes = 0

    def fits(cell: int, v: int) -> bool:
        col, is_top = divmod(cell, 2)
        if cell and (v + cells[0] + col + is_top) % 2:
            return False
        if is_top and not cop[v][cells[cell - 1]]:
            return False
        if col and not cop[v][cells[cell - 2]]:
            return False
        return True

    def search(cell: int) -> bool:
        nonlocal nodes
        if cell == size:
            return True
        for v in range(1, size + 1):
            if used[v] or not fits(cell, v):
                continue
            nodes += 1
            if nodes > budget:
                raise BudgetExhausted(f"node budget {budget} exhausted at n={n}")
            used[v] = True
            cells[cell] = v
            if search(cell + 1):
                return True
            used[v] = False
        return False

    if not search(0):
        return None
    return LadderLabeling(cells[0::2], cells[1::2], Stage.PRIME)


def count_prime_labelings(n: int) -> int:
    """Exact number of prime labelings of the n-ladder.

    Dynamic programming over (labels used so far, last column); equivalent to
    enumerating every labeling, but feasible up to n = 7.
    """
    if n < 1:
        raise ValueError("n must be positive")
    size = 2 * n
    cop = _coprime_table(size)
    full = (1 << size) - 1

    @lru_cache(maxsize=None)
    def extend(used: int, bottom: int, top: int) -> int:
        if used == full:
            return 1
        total = 0
        for u in range(1, size + 1):
            if used >> (u - 1) & 1 or not cop[u][bottom]:
                continue
            for v in range(1, size + 1):
                if v == u or used >> (v - 1) & 1 or not cop[v][top] or not cop[u][v]:
                    continue
                total += extend(used | 1 << (u - 1) | 1 << (v - 1), u, v)
        return total

    total = 0
    for u in range(1, size + 1):
        for v in range(1, size + 1):
            if u != v and cop[u][v]:
                total += extend(1 << (u - 1) | 1 << (v - 1), u, v)
    extend.cache_clear()
    return total
