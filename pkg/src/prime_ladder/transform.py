"""Cross-condition labeling -> prime labeling."""

from __future__ import annotations

from .core import LadderLabeling, Stage


def flip_alternate(ladder: LadderLabeling) -> LadderLabeling:
    """Swap bottom and top of every even-numbered column (2, 4, 6, ...).

    Vertical pairs are unchanged as sets, and after the swap each horizontal
    edge joins two labels that were diagonal corners of a square, so a ladder
    satisfying the cross condition becomes a prime labeling.
    """
    if ladder.stage is not Stage.CROSS:
        raise ValueError(f"flip_alternate expects a cross-stage ladder, got {ladder.stage.value}")
    bottom = ladder.bottom.copy()
    top = ladder.top.copy()
    bottom[1::2] = ladder.top[1::2]
    top[1::2] = ladder.bottom[1::2]
    return LadderLabeling(bottom, top, Stage.PRIME)
