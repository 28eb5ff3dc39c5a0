"""Slab (2x2x1 block) tilings and the triple twist.

Cells carry one of four colors determined by the parities of x+z and y+z,
so that every slab, whatever its normal, covers each color exactly once.
Keeping one pair of colors and collapsing the other two squeezes the
region along a diagonal; each slab's two surviving cells land on adjacent
cells of the squeezed region, turning the slab tiling into a domino
tiling whose twist is a slab-flip invariant.  Three independent color
pairs give the triple twist.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator

from .core import Cell, Domino, Region, Tiling, make_region, tiling_from_dominoes
from .errors import CapExceeded, InflationError, InvalidRegion, MoveNotApplicable
from .twist import pretwist

COLORS = ("R", "Y", "G", "B")

_COLOR_OF_PARITY = {(0, 0): "R", (1, 0): "Y", (0, 1): "G", (1, 1): "B"}

# color pair -> the two coordinates whose diagonal the deflation collapses
_PAIR_AXES = {
    frozenset(("R", "G")): (0, 2),
    frozenset(("Y", "B")): (0, 2),
    frozenset(("R", "B")): (0, 1),
    frozenset(("G", "Y")): (0, 1),
    frozenset(("R", "Y")): (1, 2),
    frozenset(("G", "B")): (1, 2),
}

TRIPLE_TWIST_PAIRS = (("R", "G"), ("R", "B"), ("R", "Y"))
_OTHER_PAIRS = (("Y", "B"), ("G", "Y"), ("G", "B"))


def four_color(cell: Cell) -> str:
    """Color of a cell; 2-periodic in every coordinate, (0,0,0) is red."""
    x, y, z = cell
    return _COLOR_OF_PARITY[((x + z) % 2, (y + z) % 2)]


@dataclass(frozen=True)
class Slab:
    """2x2x1 block named by its min corner and its thin (normal) axis."""

    corner: Cell
    normal: int


def slab_cells(slab: Slab) -> tuple[Cell, ...]:
    a, b = (axis for axis in range(3) if axis != slab.normal)
    cells = []
    for da, db in product((0, 1), repeat=2):
        cell = list(slab.corner)
        cell[a] += da
        cell[b] += db
        cells.append(tuple(cell))
    return tuple(cells)


@dataclass(frozen=True)
class SlabTiling:
    region: Region
    slabs: tuple[Slab, ...]


def validate_slab_tiling(tiling: SlabTiling) -> str | None:
    """None when the slabs cover the region exactly once."""
    covered: set[Cell] = set()
    for slab in tiling.slabs:
        for cell in slab_cells(slab):
            if not tiling.region.contains(cell):
                return f"slab {slab} leaves the region at {cell}"
            if cell in covered:
                return f"cell {cell} covered twice"
            covered.add(cell)
    if len(covered) != tiling.region.n_cells:
        return f"{tiling.region.n_cells - len(covered)} cells uncovered"
    return None


def enumerate_slab_tilings(
    region: Region, cap: int | None = 1_000_000
) -> Iterator[SlabTiling]:
    """Every slab tiling exactly once, deterministic order.

    The first uncovered cell is always the corner of the next slab, so
    each position offers at most three candidates (one per normal).
    """
    if region.d != 3:
        raise InvalidRegion("slab tilings are defined for d=3")
    cells = region.cells
    n = len(cells)
    covered = [False] * n
    idx = region.index
    yielded = 0

    candidates: list[list[tuple[int, ...]]] = []
    for i, cell in enumerate(cells):
        per_cell = []
        for normal in range(3):
            ids = [idx.get(c, -1) for c in slab_cells(Slab(cell, normal))]
            if all(j >= 0 for j in ids):
                per_cell.append((normal, tuple(ids)))
        candidates.append(per_cell)

    def rec(start: int, acc: list[Slab]) -> Iterator[SlabTiling]:
        nonlocal yielded
        i = start
        while i < n and covered[i]:
            i += 1
        if i == n:
            yielded += 1
            if cap is not None and yielded > cap:
                raise CapExceeded(f"more than {cap} slab tilings")
            yield SlabTiling(region, tuple(acc))
            return
        for normal, ids in candidates[i]:
            if any(covered[j] for j in ids):
                continue
            for j in ids:
                covered[j] = True
            acc.append(Slab(cells[i], normal))
            yield from rec(i + 1, acc)
            acc.pop()
            for j in ids:
                covered[j] = False

    yield from rec(0, [])


def horizontal_slab_tiling(region: Region) -> SlabTiling:
    """All slabs flat (normal z), corners on the even sublattice."""
    slabs = [
        Slab(cell, 2)
        for cell in region.cells
        if cell[0] % 2 == 0 and cell[1] % 2 == 0
    ]
    tiling = SlabTiling(region, tuple(slabs))
    report = validate_slab_tiling(tiling)
    if report is not None:
        raise InvalidRegion(f"region has no horizontal slab tiling: {report}")
    return tiling


# ---------------------------------------------------------------------------
# inflation


def _deflate_cell(cell: Cell, axes: tuple[int, int]) -> Cell:
    i, j = axes
    out = list(cell)
    out[i] = (cell[i] + cell[j]) // 2
    out[j] = (cell[j] - cell[i]) // 2
    return tuple(out)


@lru_cache(maxsize=64)
def _derived_region(region: Region, pair: frozenset) -> tuple[Region, tuple[int, ...]]:
    """Squeezed region of the surviving color pair plus the translation
    that made its coordinates non-negative."""
    axes = _PAIR_AXES[pair]
    mapped = [
        _deflate_cell(cell, axes)
        for cell in region.cells
        if four_color(cell) in pair
    ]
    lo = tuple(min(c[a] for c in mapped) for a in range(3))
    shifted = [tuple(x - m for x, m in zip(c, lo)) for c in mapped]
    if len(set(shifted)) != len(shifted):
        raise InflationError("deflation map is not injective on the survivors")
    return make_region(shifted), lo


def inflate(tiling: SlabTiling, pair: Iterable[str] = ("R", "G")) -> Tiling:
    """Domino tiling of the squeezed region; one domino per slab."""
    pair_set = frozenset(pair)
    if pair_set not in _PAIR_AXES:
        raise InflationError(f"unknown color pair {sorted(pair_set)}")
    report = validate_slab_tiling(tiling)
    if report is not None:
        raise InflationError(report)
    axes = _PAIR_AXES[pair_set]
    derived, lo = _derived_region(tiling.region, pair_set)
    dominoes = []
    for slab in tiling.slabs:
        survivors = [c for c in slab_cells(slab) if four_color(c) in pair_set]
        if len(survivors) != 2:
            raise InflationError(
                f"slab {slab} keeps {len(survivors)} cells of pair "
                f"{sorted(pair_set)}, expected 2"
            )
        a, b = (
            tuple(x - m for x, m in zip(_deflate_cell(c, axes), lo))
            for c in survivors
        )
        diffs = [k for k in range(3) if a[k] != b[k]]
        if len(diffs) != 1 or abs(a[diffs[0]] - b[diffs[0]]) != 1:
            raise InflationError(
                f"slab {slab} deflates to non-adjacent cells {a}, {b}"
            )
        dominoes.append(Domino(min(a, b), diffs[0]))
    return tiling_from_dominoes(derived, dominoes)


def pair_twist(tiling: SlabTiling, pair: Iterable[str] = ("R", "G")) -> int:
    """Twist of the inflated tiling, relative to the inflated horizontal
    slab tiling (which therefore scores 0)."""
    inflated = inflate(tiling, pair)
    value = pretwist(inflated, 2) - _reference_pretwist(
        tiling.region, frozenset(pair)
    )
    if value.denominator != 1:
        raise InflationError(f"non-integral pair twist {value}")
    return int(value)


@lru_cache(maxsize=64)
def _reference_pretwist(region: Region, pair: frozenset):
    return pretwist(inflate(_reference_slab_tiling(region), pair), 2)


@lru_cache(maxsize=64)
def _reference_slab_tiling(region: Region) -> SlabTiling:
    try:
        return horizontal_slab_tiling(region)
    except InvalidRegion:
        for tiling in enumerate_slab_tilings(region, cap=None):
            return tiling
        raise InvalidRegion("region has no slab tilings")


def all_pair_twists(tiling: SlabTiling) -> dict[tuple[str, str], int]:
    values = {}
    for pair in TRIPLE_TWIST_PAIRS + _OTHER_PAIRS:
        values[pair] = pair_twist(tiling, pair)
    return values


def triple_twist(tiling: SlabTiling) -> tuple[int, int, int]:
    """Pair twists of (R,G), (R,B), (R,Y).

    The six pair twists are not independent; each complementary pair
    twist is the negation of its partner, which is asserted here.  The
    relations were found by exhausting small boxes and are frozen as
    oracles.
    """
    values = all_pair_twists(tiling)
    relations = (
        (("R", "G"), ("Y", "B")),
        (("R", "B"), ("G", "Y")),
        (("R", "Y"), ("G", "B")),
    )
    for first, second in relations:
        if values[first] + values[second] != 0:
            raise InflationError(
                f"pair twists {first}={values[first]} and {second}="
                f"{values[second]} break the frozen relation"
            )
    return tuple(values[pair] for pair in TRIPLE_TWIST_PAIRS)


# ---------------------------------------------------------------------------
# slab flips


@dataclass(frozen=True)
class SlabFlip:
    """Swap the two `from_normal` slabs filling the 2x2x2 box at `corner`
    for the two `to_normal` slabs filling the same box."""

    corner: Cell
    from_normal: int
    to_normal: int


def _stacked_pair(corner: Cell, normal: int) -> tuple[Slab, Slab]:
    upper = list(corner)
    upper[normal] += 1
    return Slab(corner, normal), Slab(tuple(upper), normal)


def list_slab_flips(tiling: SlabTiling) -> list[SlabFlip]:
    present = set(tiling.slabs)
    out = []
    for corner in tiling.region.cells:
        for normal in range(3):
            pair = _stacked_pair(corner, normal)
            if pair[0] in present and pair[1] in present:
                for to_normal in range(3):
                    if to_normal != normal:
                        out.append(SlabFlip(corner, normal, to_normal))
    return out


def apply_slab_flip(tiling: SlabTiling, move: SlabFlip) -> SlabTiling:
    old = _stacked_pair(move.corner, move.from_normal)
    new = _stacked_pair(move.corner, move.to_normal)
    present = set(tiling.slabs)
    if old[0] not in present or old[1] not in present:
        raise MoveNotApplicable(f"no stacked pair with normal {move.from_normal}")
    present.difference_update(old)
    present.update(new)
    result = SlabTiling(tiling.region, tuple(sorted(present, key=lambda s: (s.corner, s.normal))))
    report = validate_slab_tiling(result)
    if report is not None:
        raise MoveNotApplicable(report)
    return result


# ---------------------------------------------------------------------------
# JSON-lines slab tiling files, mirroring the domino format


def slab_tiling_to_record(tiling: SlabTiling) -> dict:
    return {"slabs": [[list(s.corner), s.normal] for s in tiling.slabs]}


def slab_tiling_from_record(rec: dict, region: Region) -> SlabTiling:
    slabs = tuple(Slab(tuple(corner), normal) for corner, normal in rec["slabs"])
    tiling = SlabTiling(region, slabs)
    report = validate_slab_tiling(tiling)
    if report is not None:
        raise InvalidRegion(report)
    return tiling


def write_slab_tilings(path, region: Region, tilings: Iterable[SlabTiling]) -> int:
    from .core import region_to_record

    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(region_to_record(region)) + "\n")
        for t in tilings:
            fh.write(json.dumps(slab_tiling_to_record(t)) + "\n")
            count += 1
    return count


def read_slab_tilings(path) -> tuple[Region, list[SlabTiling]]:
    from .core import region_from_record

    with open(path, "r", encoding="utf-8") as fh:
        region = region_from_record(json.loads(fh.readline()))
        tilings = [
            slab_tiling_from_record(json.loads(line), region)
            for line in fh
            if line.strip()
        ]
    return region, tilings
