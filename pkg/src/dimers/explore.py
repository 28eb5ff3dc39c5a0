"""Exhaustive enumeration and censuses of the move graph.

Enumeration backtracks on the lexicographically first uncovered cell,
trying +axis partners in axis order, so runs are deterministic and
restartable.  Censuses hash canonical encodings; the extended path for
billion-tiling regions spills its visited set to a SQLite file.
"""
from __future__ import annotations

import csv
import sqlite3
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterator

from .core import Region, Tiling, decode, encode
from .counting import count_region
from .errors import CapExceeded
from .moves import apply_flip, list_flips, list_trits, _apply_trit_structural

DEFAULT_CAP = 10_000_000


def enumerate_tilings(region: Region, cap: int | None = DEFAULT_CAP) -> Iterator[Tiling]:
    """Yield every tiling exactly once, in deterministic order.

    The cap is checked against the exact count up front; pass cap=None for
    extended runs.
    """
    if cap is not None:
        total = count_region(region)
        if total > cap:
            raise CapExceeded(f"{total} tilings exceed the cap of {cap}")
    n = region.n_cells
    if n == 0:
        yield Tiling(region, ())
        return
    if n % 2:
        return
    table = region.neighbor_table
    forward = [
        tuple(table[i][2 * a] for a in range(region.d) if table[i][2 * a] >= 0)
        for i in range(n)
    ]
    partner = [-1] * n

    def rec(start: int) -> Iterator[Tiling]:
        i = start
        while i < n and partner[i] >= 0:
            i += 1
        if i == n:
            yield Tiling(region, tuple(partner))
            return
        for j in forward[i]:
            if partner[j] < 0:
                partner[i], partner[j] = j, i
                yield from rec(i + 1)
                partner[i] = partner[j] = -1

    yield from rec(0)


class UnionFind:
    """Array-based disjoint sets with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


@dataclass
class ComponentCensus:
    """Flip components: per-component size and a canonical representative
    (the smallest encoding), plus the size multiset."""

    region: Region
    components: list[tuple[int, bytes]]
    multiplicity: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.multiplicity:
            self.multiplicity = dict(Counter(size for size, _ in self.components))

    @property
    def sizes(self) -> list[int]:
        return sorted((size for size, _ in self.components), reverse=True)

    @property
    def total(self) -> int:
        return sum(size for size, _ in self.components)

    def representative(self, component_id: int) -> Tiling:
        return decode(self.components[component_id][1], self.region)


def _enumerate_encoded(region: Region, cap: int | None) -> tuple[list[Tiling], dict[bytes, int]]:
    tilings = list(enumerate_tilings(region, cap))
    return tilings, {encode(t): i for i, t in enumerate(tilings)}


def flip_components(region: Region, cap: int | None = DEFAULT_CAP) -> ComponentCensus:
    """Union-find census over the flip edges of the full tiling set."""
    tilings, index = _enumerate_encoded(region, cap)
    uf = UnionFind(len(tilings))
    for i, t in enumerate(tilings):
        for move in list_flips(t):
            uf.union(i, index[encode(apply_flip(t, move))])
    groups: dict[int, list[int]] = {}
    for i in range(len(tilings)):
        groups.setdefault(uf.find(i), []).append(i)
    components = sorted(
        (
            (len(members), min(encode(tilings[i]) for i in members))
            for members in groups.values()
        ),
        key=lambda pair: (-pair[0], pair[1]),
    )
    return ComponentCensus(region=region, components=components)


def flip_free_tilings(region: Region, cap: int | None = DEFAULT_CAP) -> list[Tiling]:
    """Exactly the tilings admitting no flip."""
    return [t for t in enumerate_tilings(region, cap) if not list_flips(t)]


def flip_connected(region: Region, cap: int | None = DEFAULT_CAP) -> bool:
    """Whether all tilings form a single flip component (vacuously true
    for regions with at most one tiling)."""
    census = flip_components(region, cap)
    return len(census.components) <= 1


@dataclass
class ComponentTritGraph:
    """Flip components as vertices, trit connections as edges, one twist
    level per vertex."""

    census: ComponentCensus
    twists: list[int]
    edges: set[tuple[int, int]]

    def is_connected(self) -> bool:
        n = len(self.census.components)
        if n <= 1:
            return True
        adjacency: dict[int, list[int]] = {i: [] for i in range(n)}
        for a, b in self.edges:
            adjacency[a].append(b)
            adjacency[b].append(a)
        seen = {0}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for w in adjacency[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == n


def component_trit_graph(region: Region, cap: int | None = DEFAULT_CAP) -> ComponentTritGraph:
    from .twist import twist as _twist_of

    tilings, index = _enumerate_encoded(region, cap)
    uf = UnionFind(len(tilings))
    for i, t in enumerate(tilings):
        for move in list_flips(t):
            uf.union(i, index[encode(apply_flip(t, move))])
    roots: dict[int, int] = {}
    members: dict[int, list[int]] = {}
    for i in range(len(tilings)):
        members.setdefault(uf.find(i), []).append(i)
    components = sorted(
        (
            (len(ids), min(encode(tilings[i]) for i in ids), ids)
            for ids in members.values()
        ),
        key=lambda triple: (-triple[0], triple[1]),
    )
    for comp_id, (_, _, ids) in enumerate(components):
        for i in ids:
            roots[i] = comp_id
    edges: set[tuple[int, int]] = set()
    for i, t in enumerate(tilings):
        for move in list_trits(t):
            j = index[encode(_apply_trit_structural(t, move))]
            a, b = roots[i], roots[j]
            if a != b:
                edges.add((min(a, b), max(a, b)))
    twists = [_twist_of(tilings[ids[0]]) for _, _, ids in components]
    census = ComponentCensus(
        region=region,
        components=[(size, rep) for size, rep, _ in components],
    )
    return ComponentTritGraph(census=census, twists=twists, edges=edges)


def twist_census(region: Region, cap: int | None = DEFAULT_CAP) -> dict[int, int]:
    """Exact tiling count per twist value."""
    from .twist import twist as _twist_of

    counts: Counter[int] = Counter()
    for t in enumerate_tilings(region, cap):
        counts[_twist_of(t)] += 1
    return dict(sorted(counts.items()))


def tw_max(region: Region, cap: int | None = DEFAULT_CAP) -> int:
    """Maximum twist over all tilings."""
    return max(twist_census(region, cap))


def census_csv(graph: ComponentTritGraph, path) -> None:
    """component_id,size,twist,representative_hex rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["component_id", "size", "twist", "representative_hex"])
        for comp_id, (size, rep) in enumerate(graph.census.components):
            writer.writerow([comp_id, size, graph.twists[comp_id], rep.hex()])


# ---------------------------------------------------------------------------
# 2D flip connectivity sweep (Thurston's theorem as a property check)


def _nbrs4(cell):
    x, y = cell
    return ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1))


def _fixed_polyominoes(max_cells: int) -> Iterator[tuple]:
    """Redelmeier enumeration of fixed polyominoes up to max_cells.

    Cells live in the half-plane y > 0 or (y == 0 and x >= 0), rooted at
    the origin, which yields each fixed shape exactly once up to
    translation.
    """

    def admissible(c):
        return c[1] > 0 or (c[1] == 0 and c[0] >= 0)

    def rec(cells: list, untried: list, seen: set) -> Iterator[tuple]:
        while untried:
            c = untried.pop()
            cells.append(c)
            yield tuple(cells)
            if len(cells) < max_cells:
                new = [nb for nb in _nbrs4(c) if admissible(nb) and nb not in seen]
                seen.update(new)
                yield from rec(cells, untried + new, seen)
                seen.difference_update(new)
            cells.pop()

    yield from rec([], [(0, 0)], {(0, 0)})


def _poly_normalize(cells) -> tuple:
    mx = min(x for x, _ in cells)
    my = min(y for _, y in cells)
    return tuple(sorted((x - mx, y - my) for x, y in cells))


_TRANSFORMS = (
    lambda x, y: (x, y),
    lambda x, y: (-y, x),
    lambda x, y: (-x, -y),
    lambda x, y: (y, -x),
    lambda x, y: (-x, y),
    lambda x, y: (y, x),
    lambda x, y: (x, -y),
    lambda x, y: (-y, -x),
)


def _poly_canonical(cells) -> tuple:
    return min(_poly_normalize([t(x, y) for x, y in cells]) for t in _TRANSFORMS)


def _simply_connected(cells: frozenset) -> bool:
    """No holes: the complement of the shape is connected within an
    inflated bounding box."""
    xs = [x for x, _ in cells]
    ys = [y for _, y in cells]
    x0, x1 = min(xs) - 1, max(xs) + 1
    y0, y1 = min(ys) - 1, max(ys) + 1
    outside = {(x0, y0)}
    queue = deque(outside)
    while queue:
        cx, cy = queue.popleft()
        for nx, ny in _nbrs4((cx, cy)):
            if x0 <= nx <= x1 and y0 <= ny <= y1:
                if (nx, ny) not in cells and (nx, ny) not in outside:
                    outside.add((nx, ny))
                    queue.append((nx, ny))
    total = (x1 - x0 + 1) * (y1 - y0 + 1)
    return len(outside) + len(cells) == total


def iter_free_simply_connected_polyominoes(
    max_cells: int, *, even_only: bool = True
) -> Iterator[tuple]:
    """One representative per free simply connected polyomino class.

    A fixed shape is kept only when it equals its own dihedral canonical
    form, so no dedup set is needed.
    """
    for cells in _fixed_polyominoes(max_cells):
        if even_only and len(cells) % 2:
            continue
        normalized = _poly_normalize(cells)
        if normalized != _poly_canonical(cells):
            continue
        if not _simply_connected(frozenset(normalized)):
            continue
        yield normalized


def flip_connected_2d(cells: tuple) -> bool:
    """Lightweight flip-connectivity check for a small 2D cell set.

    Enumerates all tilings directly (no Region machinery) and joins pairs
    that differ in exactly four cells, which characterizes a single flip.
    """
    order = sorted(cells)
    index = {c: i for i, c in enumerate(order)}
    n = len(order)
    if n % 2:
        return True
    forward = [
        tuple(
            index[nb]
            for nb in ((order[i][0] + 1, order[i][1]), (order[i][0], order[i][1] + 1))
            if nb in index
        )
        for i in range(n)
    ]
    tilings: list[tuple[int, ...]] = []
    partner = [-1] * n

    def rec(start: int) -> None:
        i = start
        while i < n and partner[i] >= 0:
            i += 1
        if i == n:
            tilings.append(tuple(partner))
            return
        for j in forward[i]:
            if partner[j] < 0:
                partner[i], partner[j] = j, i
                rec(i + 1)
                partner[i] = partner[j] = -1

    rec(0)
    if len(tilings) <= 1:
        return True
    uf = UnionFind(len(tilings))
    for i in range(len(tilings)):
        for j in range(i + 1, len(tilings)):
            diff = sum(1 for a, b in zip(tilings[i], tilings[j]) if a != b)
            if diff == 4:
                uf.union(i, j)
    root = uf.find(0)
    return all(uf.find(i) == root for i in range(len(tilings)))


# ---------------------------------------------------------------------------
# extended-scale machinery: a disk-backed visited set so the census of
# billion-tiling regions is bounded by scratch space, not RAM


class DiskBackedSet:
    """Insert-once byte-string set backed by SQLite.

    add() returns True exactly once per key; the file can be reopened to
    resume an interrupted run.
    """

    def __init__(self, path):
        self._conn = sqlite3.connect(str(path))
        self._conn.execute("PRAGMA journal_mode=OFF")
        self._conn.execute("PRAGMA synchronous=OFF")
        self._conn.execute("CREATE TABLE IF NOT EXISTS seen (key BLOB PRIMARY KEY)")
        self._pending = 0

    def add(self, key: bytes) -> bool:
        cur = self._conn.execute(
            "INSERT OR IGNORE INTO seen (key) VALUES (?)", (key,)
        )
        self._pending += 1
        if self._pending >= 10_000:
            self._conn.commit()
            self._pending = 0
        return cur.rowcount == 1

    def __contains__(self, key: bytes) -> bool:
        row = self._conn.execute(
            "SELECT 1 FROM seen WHERE key = ?", (key,)
        ).fetchone()
        return row is not None

    def __len__(self) -> int:
        return self._conn.execute("SELECT COUNT(*) FROM seen").fetchone()[0]

    def close(self) -> None:
        self._conn.commit()
        self._conn.close()


def flip_components_extended(region: Region, scratch_dir) -> ComponentCensus:
    """Streaming flip census with a disk-backed visited set.

    Tilings are enumerated in deterministic order; each unvisited one
    seeds a breadth-first sweep of its whole flip component.  Intended for
    opt-in runs where the tiling count exceeds RAM: runtime is hours and
    scratch is of the order of the state space.
    """
    from pathlib import Path

    visited = DiskBackedSet(Path(scratch_dir) / "visited.sqlite")
    components: list[tuple[int, bytes]] = []
    try:
        for t in enumerate_tilings(region, cap=None):
            key = encode(t)
            if not visited.add(key):
                continue
            size = 1
            smallest = key
            frontier = [t]
            while frontier:
                nxt = []
                for cur in frontier:
                    for move in list_flips(cur):
                        neighbor = apply_flip(cur, move)
                        nkey = encode(neighbor)
                        if visited.add(nkey):
                            size += 1
                            if nkey < smallest:
                                smallest = nkey
                            nxt.append(neighbor)
                frontier = nxt
            components.append((size, smallest))
    finally:
        visited.close()
    components.sort(key=lambda pair: (-pair[0], pair[1]))
    return ComponentCensus(region=region, components=components)
