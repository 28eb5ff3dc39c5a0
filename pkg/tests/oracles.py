"""Independent oracles the tests check the library against.

Deliberately different algorithms from the package: the permanent of the
white/black biadjacency via Ryser's formula counts matchings without any
profile DP, and the naive enumerator matches cells recursively over an
explicit adjacency list with no canonical ordering tricks.
"""
from itertools import combinations

from dimers.core import color_sign


def _biadjacency(region):
    whites = [c for c in region.cells if color_sign(c) == 1]
    blacks = [c for c in region.cells if color_sign(c) == -1]
    black_index = {c: j for j, c in enumerate(blacks)}
    rows = []
    for w in whites:
        row = [0] * len(blacks)
        for axis in range(region.d):
            for delta in (1, -1):
                nb = w[:axis] + (w[axis] + delta,) + w[axis + 1 :]
                if nb in black_index:
                    row[black_index[nb]] = 1
        rows.append(row)
    return rows


def permanent_count(region) -> int:
    """Number of perfect matchings as a permanent, by Ryser's formula."""
    if region.n_cells == 0:
        return 1
    matrix = _biadjacency(region)
    n = len(matrix)
    if n == 0 or n != len(matrix[0]):
        return 0
    total = 0
    for r in range(1, n + 1):
        for cols in combinations(range(n), r):
            prod = 1
            for row in matrix:
                s = sum(row[c] for c in cols)
                prod *= s
                if prod == 0:
                    break
            total += (-1) ** (n - r) * prod
    return total


def naive_tilings(region) -> list[frozenset]:
    """All perfect matchings as frozensets of cell-pair frozensets."""
    cells = list(region.cells)
    if len(cells) % 2:
        return []
    adjacency = {c: [] for c in cells}
    cell_set = set(cells)
    for c in cells:
        for axis in range(region.d):
            for delta in (1, -1):
                nb = c[:axis] + (c[axis] + delta,) + c[axis + 1 :]
                if nb in cell_set:
                    adjacency[c].append(nb)
    results = []

    def rec(remaining: frozenset, acc):
        if not remaining:
            results.append(frozenset(acc))
            return
        cell = min(remaining)
        for nb in adjacency[cell]:
            if nb in remaining:
                rec(remaining - {cell, nb}, acc | {frozenset((cell, nb))})

    rec(frozenset(cells), frozenset())
    return results


def tiling_to_pairset(tiling) -> frozenset:
    cells = tiling.region.cells
    return frozenset(
        frozenset((cells[i], cells[j]))
        for i, j in enumerate(tiling.partner)
        if i < j
    )
