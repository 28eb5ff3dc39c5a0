"""Local moves on tilings: flips, trits, and difference cycles.

A flip rotates two parallel dominoes inside a 2x2x1 window; a trit permutes
three pairwise-orthogonal dominoes inside a 2x2x2 window and carries a sign
(the twist steps by that sign).  Moves are listed in deterministic order:
window corner lexicographic, then axes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable

from .core import Cell, Domino, Tiling, domino_cells
from .errors import MoveNotApplicable, RegionMismatch


@dataclass(frozen=True)
class FlipMove:
    """2x2 window in the (axes[0], axes[1]) plane at `corner`; the two
    parallel dominoes currently run along before_axis."""

    corner: Cell
    axes: tuple[int, int]
    before_axis: int

    @property
    def after_axis(self) -> int:
        a, b = self.axes
        return b if self.before_axis == a else a


@dataclass(frozen=True)
class TritMove:
    """2x2x2 window spanning `axes` at `corner`, holding one domino per
    axis; applying it swaps in the only other such configuration."""

    corner: Cell
    axes: tuple[int, int, int]
    removed: tuple[Domino, Domino, Domino]


def _shift(cell: Cell, axis: int, delta: int = 1) -> Cell:
    return cell[:axis] + (cell[axis] + delta,) + cell[axis + 1 :]


def _flip_window(tiling: Tiling, corner: Cell, a: int, b: int):
    """The four window cell indices, or None if the window leaves the region."""
    idx = tiling.region.index
    c00 = corner
    c10 = _shift(corner, a)
    c01 = _shift(corner, b)
    c11 = _shift(c10, b)
    try:
        return idx[c00], idx[c10], idx[c01], idx[c11]
    except KeyError:
        return None


def list_flips(tiling: Tiling) -> list[FlipMove]:
    """Every applicable flip, duplicate-free, in deterministic order."""
    region = tiling.region
    partner = tiling.partner
    out = []
    for corner in region.cells:
        for a, b in combinations(range(region.d), 2):
            window = _flip_window(tiling, corner, a, b)
            if window is None:
                continue
            i00, i10, i01, i11 = window
            if partner[i00] == i10 and partner[i01] == i11:
                out.append(FlipMove(corner, (a, b), a))
            elif partner[i00] == i01 and partner[i10] == i11:
                out.append(FlipMove(corner, (a, b), b))
    return out


def apply_flip(tiling: Tiling, move: FlipMove) -> Tiling:
    """Rotate the window's dominoes; involutive via the reverse move."""
    a, b = move.axes
    window = _flip_window(tiling, move.corner, a, b)
    if window is None:
        raise MoveNotApplicable(f"flip window {move.corner} leaves the region")
    i00, i10, i01, i11 = window
    partner = list(tiling.partner)
    if move.before_axis == a and partner[i00] == i10 and partner[i01] == i11:
        partner[i00], partner[i01] = i01, i00
        partner[i10], partner[i11] = i11, i10
    elif move.before_axis == b and partner[i00] == i01 and partner[i10] == i11:
        partner[i00], partner[i10] = i10, i00
        partner[i01], partner[i11] = i11, i01
    else:
        raise MoveNotApplicable(f"no parallel pair along axis {move.before_axis}")
    return Tiling(tiling.region, tuple(partner))


def _window_dominoes(tiling: Tiling, cell_ids: set[int]) -> list[Domino]:
    """Dominoes of the tiling lying entirely inside the given cell set."""
    region = tiling.region
    cells = region.cells
    out = []
    for i in cell_ids:
        j = tiling.partner[i]
        if j in cell_ids and i < j:
            low, high = cells[i], cells[j]
            axis = next(k for k in range(region.d) if low[k] != high[k])
            out.append(Domino(low, axis))
    return out


def _trit_window_ids(tiling: Tiling, corner: Cell, axes: tuple[int, int, int]):
    idx = tiling.region.index
    ids = set()
    for deltas in product((0, 1), repeat=3):
        cell = corner
        for axis, delta in zip(axes, deltas):
            if delta:
                cell = _shift(cell, axis)
        i = idx.get(cell)
        if i is None:
            return None
        ids.add(i)
    return ids


def _orthogonal_matchings(
    covered: list[Cell], axes: tuple[int, int, int]
) -> list[tuple[Domino, Domino, Domino]]:
    """All ways to match the six covered cells with one domino per axis.

    Brute force over the at most 15 pairings; the covered cells already
    lie inside the window, so any domino between them does too.
    """
    cells = list(covered)
    results = []

    def rec(remaining: list[Cell], acc: list[Domino], used_axes: set[int]):
        if not remaining:
            results.append(tuple(sorted(acc)))
            return
        head = remaining[0]
        for other in remaining[1:]:
            diffs = [i for i in range(len(head)) if head[i] != other[i]]
            if len(diffs) != 1:
                continue
            axis = diffs[0]
            if axis not in axes or axis in used_axes:
                continue
            if abs(head[axis] - other[axis]) != 1:
                continue
            low = head if head[axis] < other[axis] else other
            rec(
                [c for c in remaining[1:] if c is not other],
                acc + [Domino(low, axis)],
                used_axes | {axis},
            )

    rec(cells, [], set())
    return sorted(set(results))


def list_trits(tiling: Tiling) -> list[TritMove]:
    """Every 2x2x2 window holding three pairwise-orthogonal dominoes of the
    tiling.  Empty in 2D so generic pipelines run unchanged."""
    region = tiling.region
    if region.d < 3:
        return []
    out = []
    for corner in region.cells:
        for axes in combinations(range(region.d), 3):
            ids = _trit_window_ids(tiling, corner, axes)
            if ids is None:
                continue
            inside = _window_dominoes(tiling, ids)
            if len(inside) != 3:
                continue
            if {d.axis for d in inside} != set(axes):
                continue
            out.append(TritMove(corner, axes, tuple(sorted(inside))))
    return out


def _trit_replacement(tiling: Tiling, move: TritMove) -> tuple[Domino, ...]:
    """The unique other matching of the trit's six cells, one per axis."""
    ids = _trit_window_ids(tiling, move.corner, move.axes)
    if ids is None:
        raise MoveNotApplicable(f"trit window {move.corner} leaves the region")
    inside = _window_dominoes(tiling, ids)
    if tuple(sorted(inside)) != move.removed or {d.axis for d in inside} != set(
        move.axes
    ):
        raise MoveNotApplicable("tiling does not hold the trit's three dominoes")
    covered = [c for d in inside for c in domino_cells(d)]
    matchings = _orthogonal_matchings(covered, move.axes)
    others = [m for m in matchings if m != move.removed]
    if len(matchings) != 2 or len(others) != 1:
        raise MoveNotApplicable(
            f"trit window admits {len(matchings)} matchings, expected 2"
        )
    return others[0]


def _apply_trit_structural(tiling: Tiling, move: TritMove) -> Tiling:
    """Apply the rearrangement without computing its sign."""
    added = _trit_replacement(tiling, move)
    idx = tiling.region.index
    partner = list(tiling.partner)
    for dom in added:
        low, high = domino_cells(dom)
        i, j = idx[low], idx[high]
        partner[i], partner[j] = j, i
    return Tiling(tiling.region, tuple(partner))


def apply_trit(tiling: Tiling, move: TritMove) -> tuple[Tiling, int]:
    """Apply the trit and return (new tiling, sign).

    In 3D the sign is the calibrated twist step, +1 or -1, negated by the
    inverse move.  In dimension 4 and up the twist lives in Z/2, every
    trit flips it, and the sign is reported as +1.
    """
    # late import: the twist module calibrates itself using trits
    from .twist import trit_sign

    after = _apply_trit_structural(tiling, move)
    if tiling.region.d >= 4:
        return after, 1
    sign = trit_sign(tiling, after, move)
    return after, sign


def difference_cycles(t0: Tiling, t1: Tiling) -> list[list[Cell]]:
    """Disjoint closed cycles covering the cells where the tilings differ.

    Each cycle alternates dominoes of t0 and t1; trivial 2-cycles (shared
    dominoes) are dropped.
    """
    if t0.region != t1.region:
        raise RegionMismatch("difference of tilings needs a common region")
    cells = t0.region.cells
    n = len(cells)
    seen = [False] * n
    cycles = []
    for start in range(n):
        if seen[start] or t0.partner[start] == t1.partner[start]:
            continue
        cycle = []
        i = start
        take_t0 = True
        while not seen[i]:
            seen[i] = True
            cycle.append(cells[i])
            i = t0.partner[i] if take_t0 else t1.partner[i]
            take_t0 = not take_t0
        cycles.append(cycle)
    return cycles


# ---------------------------------------------------------------------------
# JSON-lines move log, for replay and audit


def move_to_record(move: FlipMove | TritMove, sign: int = 0) -> dict:
    if isinstance(move, FlipMove):
        return {
            "kind": "flip",
            "block": list(move.corner),
            "axes": [move.axes[0], move.axes[1], move.before_axis],
            "sign": 0,
        }
    return {
        "kind": "trit",
        "block": list(move.corner),
        "axes": list(move.axes),
        "sign": sign,
    }


def move_from_record(rec: dict, tiling: Tiling) -> FlipMove | TritMove:
    corner = tuple(rec["block"])
    if rec["kind"] == "flip":
        a, b, before = rec["axes"]
        return FlipMove(corner, (a, b), before)
    axes = tuple(rec["axes"])
    ids = _trit_window_ids(tiling, corner, axes)
    if ids is None:
        raise MoveNotApplicable(f"trit window {corner} leaves the region")
    inside = _window_dominoes(tiling, ids)
    return TritMove(corner, axes, tuple(sorted(inside)))


def write_move_log(path, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


def read_move_log(path) -> list[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def replay(tiling: Tiling, records: Iterable[dict]) -> Tiling:
    """Apply a logged move sequence; signs in the log are re-checked."""
    current = tiling
    for rec in records:
        move = move_from_record(rec, current)
        if isinstance(move, FlipMove):
            current = apply_flip(current, move)
        else:
            current, sign = apply_trit(current, move)
            if rec.get("sign") and rec["sign"] != sign:
                raise MoveNotApplicable(
                    f"logged trit sign {rec['sign']} disagrees with {sign}"
                )
    return current
