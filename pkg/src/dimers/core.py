"""Regions, dominoes and tilings on the cubic lattice.

A cell is the integer min-corner of a unit cube in Z^d.  Regions are
immutable collections of cells; a tiling is an immutable perfect matching
stored as a fixed-point-free involution on cell indices.  Everything
downstream (moves, counting, twist, sampling) works on these two values,
so both are safe to share between workers.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, NamedTuple

from .errors import (
    DecodeError,
    InvalidRegion,
    InvalidTiling,
    NoBaseTiling,
    RegionMismatch,
)

Cell = tuple[int, ...]

WHITE = 1
BLACK = -1

REFINE_FACTOR = 5  # each cube splits into 5x5x5; no other factor is exposed


def color_sign(cell: Cell) -> int:
    """+1 (white) when the coordinate sum is even, -1 (black) otherwise."""
    return WHITE if sum(cell) % 2 == 0 else BLACK


@dataclass(frozen=True)
class Region:
    """Immutable finite set of unit cells in Z^d.

    kind is "box", "cylinder" (disk x [0, height)) or "general".  Box and
    cylinder regions keep enough structure to build the all-vertical base
    tiling; general regions are plain sorted cell lists.
    """

    d: int
    cells: tuple[Cell, ...]
    kind: str = "general"
    dims: tuple[int, ...] | None = None
    height: int | None = None
    disk_cells: tuple[Cell, ...] | None = None

    @cached_property
    def index(self) -> dict[Cell, int]:
        return {c: i for i, c in enumerate(self.cells)}

    @cached_property
    def neighbor_table(self) -> tuple[tuple[int, ...], ...]:
        """neighbor_table[i][2*axis + s]: cell index one step along +axis
        (s=0) or -axis (s=1), or -1 when that cell is outside the region."""
        idx = self.index
        rows = []
        for cell in self.cells:
            row = []
            for axis in range(self.d):
                for delta in (1, -1):
                    nb = cell[:axis] + (cell[axis] + delta,) + cell[axis + 1 :]
                    row.append(idx.get(nb, -1))
            rows.append(tuple(row))
        return tuple(rows)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @cached_property
    def white_count(self) -> int:
        return sum(1 for c in self.cells if color_sign(c) == WHITE)

    @property
    def black_count(self) -> int:
        return self.n_cells - self.white_count

    def balanced(self) -> bool:
        return self.white_count * 2 == self.n_cells

    def contains(self, cell: Cell) -> bool:
        return cell in self.index

    @cached_property
    def bounding_box(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """(min corner, max corner) over all cells; raises on empty regions."""
        if not self.cells:
            raise InvalidRegion("empty region has no bounding box")
        lo = tuple(min(c[a] for c in self.cells) for a in range(self.d))
        hi = tuple(max(c[a] for c in self.cells) for a in range(self.d))
        return lo, hi


def make_region(cells: Iterable[Cell], d: int | None = None) -> Region:
    """General region from an iterable of cells (sorted, deduplicated)."""
    cell_list = sorted(set(tuple(int(x) for x in c) for c in cells))
    if d is None:
        if not cell_list:
            raise InvalidRegion("dimension required for an empty region")
        d = len(cell_list[0])
    if d < 2:
        raise InvalidRegion(f"dimension must be >= 2, got {d}")
    for c in cell_list:
        if len(c) != d:
            raise InvalidRegion(f"cell {c} does not have {d} coordinates")
        if any(x < 0 for x in c):
            raise InvalidRegion(f"cell {c} has a negative coordinate")
    return Region(d=d, cells=tuple(cell_list))


def make_box(dims: Iterable[int]) -> Region:
    """Full L x M x ... product region."""
    dims = tuple(int(s) for s in dims)
    if len(dims) < 2:
        raise InvalidRegion("a box needs at least two dimensions")
    if any(s < 1 for s in dims):
        raise InvalidRegion(f"box dimensions must be >= 1, got {dims}")
    cells = tuple(sorted(product(*(range(s) for s in dims))))
    disk = tuple(sorted(product(*(range(s) for s in dims[:-1]))))
    return Region(
        d=len(dims),
        cells=cells,
        kind="box",
        dims=dims,
        height=dims[-1],
        disk_cells=disk,
    )


def is_connected(region: Region) -> bool:
    """Face-connectivity of the region's cells."""
    n = region.n_cells
    if n <= 1:
        return True
    table = region.neighbor_table
    seen = bytearray(n)
    seen[0] = 1
    stack = [0]
    reached = 1
    while stack:
        i = stack.pop()
        for j in table[i]:
            if j >= 0 and not seen[j]:
                seen[j] = 1
                reached += 1
                stack.append(j)
    return reached == n


def make_cylinder(disk: Region, height: int) -> Region:
    """Product region disk x [0, height); the disk must be connected."""
    if height < 1:
        raise InvalidRegion(f"cylinder height must be >= 1, got {height}")
    if not is_connected(disk):
        raise InvalidRegion("cylinder disk must be connected")
    cells = tuple(sorted(c + (z,) for c in disk.cells for z in range(height)))
    dims = disk.dims + (height,) if disk.kind == "box" and disk.dims else None
    return Region(
        d=disk.d + 1,
        cells=cells,
        kind="cylinder",
        dims=dims,
        height=height,
        disk_cells=disk.cells,
    )


class Domino(NamedTuple):
    """A domino named by its lexicographically smaller cell and its axis."""

    low: Cell
    axis: int


def domino_cells(domino: Domino) -> tuple[Cell, Cell]:
    low, axis = domino
    high = low[:axis] + (low[axis] + 1,) + low[axis + 1 :]
    return low, high


def domino_orientation(domino: Domino) -> int:
    """+1 when the white-to-black arrow points along +axis, else -1."""
    return 1 if color_sign(domino.low) == WHITE else -1


@dataclass(frozen=True)
class Tiling:
    """Perfect matching of a region, as an involution on cell indices."""

    region: Region
    partner: tuple[int, ...]

    def partner_cell(self, cell: Cell) -> Cell:
        return self.region.cells[self.partner[self.region.index[cell]]]

    def dominoes(self) -> list[Domino]:
        cells = self.region.cells
        out = []
        for i, j in enumerate(self.partner):
            if i < j:
                low, high = cells[i], cells[j]
                axis = next(a for a in range(self.region.d) if low[a] != high[a])
                out.append(Domino(low, axis))
        return out

    @property
    def n_dominoes(self) -> int:
        return len(self.partner) // 2


def tiling_from_dominoes(region: Region, dominoes: Iterable[Domino]) -> Tiling:
    """Build and validate a tiling from (low cell, axis) pairs."""
    partner = [-1] * region.n_cells
    idx = region.index
    for dom in dominoes:
        low, high = domino_cells(Domino(tuple(dom[0]), int(dom[1])))
        if low not in idx or high not in idx:
            raise InvalidTiling(f"domino {dom} leaves the region")
        i, j = idx[low], idx[high]
        if partner[i] != -1 or partner[j] != -1:
            raise InvalidTiling(f"domino {dom} overlaps another domino")
        partner[i], partner[j] = j, i
    tiling = Tiling(region, tuple(partner))
    report = validate(tiling)
    if report is not None:
        raise InvalidTiling(report)
    return tiling


def validate(tiling: Tiling, region: Region | None = None) -> str | None:
    """None when the tiling is a valid perfect matching, else a report
    naming the first violating cell."""
    if region is not None and region != tiling.region:
        return "tiling belongs to a different region"
    reg = tiling.region
    cells = reg.cells
    n = len(cells)
    if len(tiling.partner) != n:
        return f"pairing covers {len(tiling.partner)} of {n} cells"
    for i, j in enumerate(tiling.partner):
        if not 0 <= j < n:
            return f"cell {cells[i]}: unmatched"
        if j == i:
            return f"cell {cells[i]}: matched to itself"
        if tiling.partner[j] != i:
            return f"cell {cells[i]}: pairing is not mutual"
        diffs = [abs(a - b) for a, b in zip(cells[i], cells[j])]
        if sorted(diffs) != [0] * (reg.d - 1) + [1]:
            return f"cell {cells[i]}: partner {cells[j]} is not adjacent"
    return None


def base_vertical_tiling(region: Region) -> Tiling:
    """All-vertical tiling of a box or cylinder of even height, pairing
    floor 2k with floor 2k+1."""
    if region.kind not in ("box", "cylinder") or region.height is None:
        raise NoBaseTiling("all-vertical tiling needs a box or cylinder")
    if region.height % 2 != 0:
        raise NoBaseTiling(f"height {region.height} is odd")
    idx = region.index
    partner = [-1] * region.n_cells
    for i, cell in enumerate(region.cells):
        z = cell[-1]
        mate = cell[:-1] + (z + 1 if z % 2 == 0 else z - 1,)
        partner[i] = idx[mate]
    return Tiling(region, tuple(partner))


def refine_region(region: Region) -> Region:
    """Split every cube into 5x5x5 smaller cubes (3D only)."""
    if region.d != 3:
        raise InvalidRegion("refinement is defined for d=3 only")
    f = REFINE_FACTOR
    if region.kind == "box" and region.dims:
        return make_box(tuple(f * s for s in region.dims))
    cells = [
        (f * x + i, f * y + j, f * z + k)
        for (x, y, z) in region.cells
        for i in range(f)
        for j in range(f)
        for k in range(f)
    ]
    if region.kind == "cylinder" and region.disk_cells and region.height:
        disk = make_region(
            [
                (f * x + i, f * y + j)
                for (x, y) in region.disk_cells
                for i in range(f)
                for j in range(f)
            ]
        )
        return make_cylinder(disk, f * region.height)
    return make_region(cells)


def refine_tiling(tiling: Tiling) -> Tiling:
    """Split every domino into 125 parallel dominoes on the refined region."""
    report = validate(tiling)
    if report is not None:
        raise InvalidTiling(report)
    f = REFINE_FACTOR
    refined = refine_region(tiling.region)
    dominoes = []
    for dom in tiling.dominoes():
        low, axis = dom
        base = tuple(f * x for x in low)
        # the refined block is 2f long on `axis` and f wide on the others
        spans = [range(f)] * 3
        spans[axis] = range(0, 2 * f, 2)
        for off in product(*spans):
            cell = tuple(b + o for b, o in zip(base, off))
            dominoes.append(Domino(cell, axis))
    return tiling_from_dominoes(refined, dominoes)


def add_vertical_floors(tiling: Tiling, extra: int) -> Tiling:
    """Extend a cylinder tiling by `extra` (even) floors of vertical
    dominoes on top; the original dominoes are untouched."""
    if extra % 2 != 0 or extra < 0:
        raise InvalidRegion(f"extra floor count must be even and >= 0, got {extra}")
    if extra == 0:
        return tiling
    region = tiling.region
    if region.kind not in ("box", "cylinder") or region.height is None:
        raise InvalidRegion("vertical extension needs a box or cylinder")
    h = region.height
    if region.kind == "box" and region.dims:
        new_region = make_box(region.dims[:-1] + (h + extra,))
    else:
        disk = make_region(region.disk_cells, d=region.d - 1)
        new_region = make_cylinder(disk, h + extra)
    dominoes = tiling.dominoes()
    vertical = region.d - 1
    for base in region.disk_cells:
        for z in range(h, h + extra, 2):
            dominoes.append(Domino(base + (z,), vertical))
    return tiling_from_dominoes(new_region, dominoes)


# ---------------------------------------------------------------------------
# canonical byte encoding
#
# Three bits per cell, cells in lexicographic order, little-endian bit
# packing.  The code of a cell is 2*axis + (0 if the partner sits at +axis
# else 1), which caps the supported dimension at 4.

_MAX_ENCODE_D = 4


def encode(tiling: Tiling) -> bytes:
    region = tiling.region
    if region.d > _MAX_ENCODE_D:
        raise InvalidRegion("canonical encoding supports d <= 4")
    cells = region.cells
    acc = 0
    for i, j in enumerate(tiling.partner):
        a, b = cells[i], cells[j]
        axis = next(k for k in range(region.d) if a[k] != b[k])
        code = 2 * axis + (0 if b[axis] > a[axis] else 1)
        acc |= code << (3 * i)
    n = len(cells)
    return acc.to_bytes((3 * n + 7) // 8, "little")


def decode(data: bytes, region: Region) -> Tiling:
    if region.d > _MAX_ENCODE_D:
        raise InvalidRegion("canonical encoding supports d <= 4")
    n = region.n_cells
    if len(data) != (3 * n + 7) // 8:
        raise DecodeError(f"expected {(3 * n + 7) // 8} bytes, got {len(data)}")
    acc = int.from_bytes(data, "little")
    if acc >> (3 * n):
        raise DecodeError("nonzero padding bits")
    table = region.neighbor_table
    partner = []
    for i in range(n):
        code = (acc >> (3 * i)) & 7
        if code >= 2 * region.d:
            raise DecodeError(f"cell {region.cells[i]}: direction code {code}")
        j = table[i][code]
        if j < 0:
            raise DecodeError(f"cell {region.cells[i]}: partner outside region")
        partner.append(j)
    for i, j in enumerate(partner):
        if partner[j] != i:
            raise DecodeError(f"cell {region.cells[i]}: pairing is not mutual")
    return Tiling(region, tuple(partner))


# ---------------------------------------------------------------------------
# floor rendering
#
# One character per cell, one grid per floor.  The glyph gives the direction
# of the cell's partner: > < along x, ^ v along y, U D along z (partner on
# the floor above / below).  Rows are printed with y decreasing so that ^
# points up on screen.

_GLYPHS = "><^vUD"


def _direction_code(region: Region, i: int, j: int) -> int:
    a, b = region.cells[i], region.cells[j]
    axis = next(k for k in range(region.d) if a[k] != b[k])
    return 2 * axis + (0 if b[axis] > a[axis] else 1)


def render_floors(tiling: Tiling) -> str:
    """Text diagram of a 2D or 3D tiling, floor by floor."""
    region = tiling.region
    if region.d not in (2, 3):
        raise InvalidRegion("floor rendering supports d=2 and d=3")
    lo, hi = region.bounding_box
    idx = region.index
    z_range = range(lo[2], hi[2] + 1) if region.d == 3 else range(0, 1)
    lines = []
    for z in z_range:
        if region.d == 3:
            lines.append(f"floor {z}")
        for y in range(hi[1], lo[1] - 1, -1):
            row = []
            for x in range(lo[0], hi[0] + 1):
                cell = (x, y, z)[: region.d]
                if cell in idx:
                    i = idx[cell]
                    row.append(_GLYPHS[_direction_code(region, i, tiling.partner[i])])
                else:
                    row.append(".")
            lines.append("".join(row))
        lines.append("")
    return "\n".join(lines).rstrip("\n") + "\n"


def parse_floors(text: str, region: Region) -> Tiling:
    """Inverse of render_floors for the given region."""
    lo, hi = region.bounding_box
    z_range = range(lo[2], hi[2] + 1) if region.d == 3 else range(0, 1)
    rows_per_floor = hi[1] - lo[1] + 1
    lines = [ln for ln in text.splitlines()]
    glyph_at = {}
    pos = 0
    for z in z_range:
        if region.d == 3:
            if pos >= len(lines) or not lines[pos].startswith("floor"):
                raise DecodeError(f"missing floor header before floor {z}")
            pos += 1
        for r in range(rows_per_floor):
            y = hi[1] - r
            row = lines[pos]
            pos += 1
            for k, ch in enumerate(row):
                if ch != ".":
                    glyph_at[(lo[0] + k, y, z)[: region.d]] = ch
        while pos < len(lines) and lines[pos] == "":
            pos += 1
    table = region.neighbor_table
    partner = []
    for i, cell in enumerate(region.cells):
        if cell not in glyph_at:
            raise DecodeError(f"cell {cell}: no glyph in diagram")
        code = _GLYPHS.index(glyph_at[cell])
        j = table[i][code]
        if j < 0:
            raise DecodeError(f"cell {cell}: partner outside region")
        partner.append(j)
    for i, j in enumerate(partner):
        if partner[j] != i:
            raise DecodeError(f"cell {region.cells[i]}: pairing is not mutual")
    return Tiling(region, tuple(partner))


# ---------------------------------------------------------------------------
# JSON-lines tiling files: a header record describing the region, then one
# record per tiling listing its dominoes as [low cell, axis] pairs.


def region_to_record(region: Region) -> dict:
    rec: dict = {"d": region.d, "kind": region.kind}
    if region.kind == "box" and region.dims:
        rec["dims"] = list(region.dims)
    elif region.kind == "cylinder":
        rec["disk_cells"] = [list(c) for c in region.disk_cells]
        rec["height"] = region.height
    else:
        rec["cells"] = [list(c) for c in region.cells]
    return rec


def region_from_record(rec: dict) -> Region:
    kind = rec.get("kind", "general")
    if kind == "box":
        return make_box(rec["dims"])
    if kind == "cylinder":
        disk = make_region([tuple(c) for c in rec["disk_cells"]], d=rec["d"] - 1)
        return make_cylinder(disk, rec["height"])
    return make_region([tuple(c) for c in rec["cells"]], d=rec["d"])


def tiling_to_record(tiling: Tiling) -> dict:
    return {"dominoes": [[list(d.low), d.axis] for d in tiling.dominoes()]}


def tiling_from_record(rec: dict, region: Region) -> Tiling:
    dominoes = [Domino(tuple(low), axis) for low, axis in rec["dominoes"]]
    return tiling_from_dominoes(region, dominoes)


def write_tilings(path, region: Region, tilings: Iterable[Tiling]) -> int:
    """Write a JSON-lines tiling file; returns the number of tilings."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(region_to_record(region)) + "\n")
        for t in tilings:
            if t.region != region:
                raise RegionMismatch("tiling does not live on the header region")
            fh.write(json.dumps(tiling_to_record(t)) + "\n")
            count += 1
    return count


def read_tilings(path) -> tuple[Region, list[Tiling]]:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline()
        if not header:
            raise DecodeError("empty tiling file")
        region = region_from_record(json.loads(header))
        tilings = [
            tiling_from_record(json.loads(line), region)
            for line in fh
            if line.strip()
        ]
    return region, tilings
