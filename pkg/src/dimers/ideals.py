"""Flip-ideal and tiling-ideal generators, exported for external CAS work.

One variable per dual-graph edge, indexed lexicographically by (lesser
cell, axis).  Flip generators are the quadratic binomials of the grid's
unit squares; tiling binomials subtract the edge monomials of two
tilings.  Flip connectivity of enumerated regions yields an explicit
telescoping certificate expressing a tiling binomial over the flip
generators.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .core import Region, Tiling
from .errors import DecodeError, IdenticalTilings, RegionMismatch

Edge = tuple[tuple[int, ...], int]  # (lesser cell, axis)


def edges(region: Region) -> list[Edge]:
    """All dual-graph edges in lexicographic order."""
    table = region.neighbor_table
    out = []
    for i, cell in enumerate(region.cells):
        for axis in range(region.d):
            if table[i][2 * axis] >= 0:
                out.append((cell, axis))
    return sorted(out)


def edge_index(region: Region) -> dict[Edge, int]:
    return {e: k for k, e in enumerate(edges(region))}


@dataclass(frozen=True)
class Binomial:
    """pos - neg, each a sorted tuple of edge ids (a monomial)."""

    pos: tuple[int, ...]
    neg: tuple[int, ...]

    def __post_init__(self):
        if self.pos == self.neg:
            raise IdenticalTilings("binomial monomials must differ")


def flip_ideal_generators(region: Region) -> list[Binomial]:
    """One quadratic binomial per 4-cycle of the dual graph.

    The cycle at `corner` in the (a, b) plane pairs its two a-parallel
    edges against its two b-parallel edges; orientation is fixed by
    putting the a-pair in the positive monomial.
    """
    index = edge_index(region)
    idx = region.index
    out = []
    for corner in region.cells:
        for a, b in combinations(range(region.d), 2):
            ea = corner[:a] + (corner[a] + 1,) + corner[a + 1 :]
            eb = corner[:b] + (corner[b] + 1,) + corner[b + 1 :]
            far = ea[:b] + (ea[b] + 1,) + ea[b + 1 :]
            if not (ea in idx and eb in idx and far in idx):
                continue
            pos = tuple(sorted((index[(corner, a)], index[(eb, a)])))
            neg = tuple(sorted((index[(corner, b)], index[(ea, b)])))
            out.append(Binomial(pos, neg))
    return out


def _tiling_monomial(tiling: Tiling, index: dict[Edge, int]) -> tuple[int, ...]:
    return tuple(sorted(index[(d.low, d.axis)] for d in tiling.dominoes()))


def tiling_binomial(t0: Tiling, t1: Tiling) -> Binomial:
    """x^{t0} - x^{t1}."""
    if t0.region != t1.region:
        raise RegionMismatch("tiling binomial needs a common region")
    index = edge_index(t0.region)
    pos = _tiling_monomial(t0, index)
    neg = _tiling_monomial(t1, index)
    if pos == neg:
        raise IdenticalTilings("the two tilings are identical")
    return Binomial(pos, neg)


def containment_certificate(t0: Tiling, t1: Tiling) -> list[tuple[tuple[int, ...], Binomial]]:
    """Telescoping certificate that x^{t0} - x^{t1} lies in the flip ideal.

    Walks a flip path from t0 to t1; each step contributes (stabilized
    monomial, flip generator) with the generator oriented so the signed
    sum of monomial*generator equals the tiling binomial exactly.
    """
    from collections import deque

    from .core import encode
    from .moves import apply_flip, list_flips

    if t0.region != t1.region:
        raise RegionMismatch("certificate needs a common region")
    index = edge_index(t0.region)
    target = encode(t1)
    start = encode(t0)
    parents: dict[bytes, tuple[bytes, Tiling] | None] = {start: None}
    states = {start: t0}
    queue = deque([t0])
    found = start == target
    while queue and not found:
        current = queue.popleft()
        key = encode(current)
        for move in list_flips(current):
            nxt = apply_flip(current, move)
            nkey = encode(nxt)
            if nkey in parents:
                continue
            parents[nkey] = (key, current)
            states[nkey] = nxt
            if nkey == target:
                found = True
                break
            queue.append(nxt)
    if not found:
        raise DecodeError("tilings are not flip connected; no certificate")
    path = [states[target]]
    key = target
    while parents[key] is not None:
        key, previous = parents[key]
        path.append(previous)
    path.reverse()  # t0 .. t1
    terms = []
    for first, second in zip(path, path[1:]):
        m0 = _tiling_monomial(first, index)
        m1 = _tiling_monomial(second, index)
        common = sorted(set(m0) & set(m1))
        gen_pos = tuple(sorted(set(m0) - set(m1)))
        gen_neg = tuple(sorted(set(m1) - set(m0)))
        terms.append((tuple(common), Binomial(gen_pos, gen_neg)))
    return terms


# ---------------------------------------------------------------------------
# text export


def _monomial_str(ids: tuple[int, ...]) -> str:
    return "*".join(f"e{k}" for k in ids)


def binomial_str(binomial: Binomial) -> str:
    return f"+{_monomial_str(binomial.pos)} -{_monomial_str(binomial.neg)}"


def parse_binomial(line: str) -> Binomial:
    try:
        plus, minus = line.split()
        if not plus.startswith("+") or not minus.startswith("-"):
            raise ValueError(line)
        pos = tuple(int(v[1:]) for v in plus[1:].split("*"))
        neg = tuple(int(v[1:]) for v in minus[1:].split("*"))
    except ValueError as exc:
        raise DecodeError(f"bad binomial line {line!r}") from exc
    return Binomial(pos, neg)


def export_ideals(
    region: Region,
    out,
    *,
    with_tiling_ideal: bool = False,
    cap: int | None = 100_000,
) -> None:
    """Write variable declarations and generators as plain text.

    Tiling binomials (optional) cover all unordered pairs of enumerated
    tilings, so the file is valid CAS input for the containment question.
    """
    from .explore import enumerate_tilings

    edge_list = edges(region)
    flips = flip_ideal_generators(region)
    lines = [
        f"# region kind={region.kind} d={region.d} "
        + (
            "dims=" + "x".join(map(str, region.dims))
            if region.dims
            else f"cells={region.n_cells}"
        ),
        f"# edges {len(edge_list)}",
    ]
    for k, (cell, axis) in enumerate(edge_list):
        coords = ",".join(map(str, cell))
        lines.append(f"var e{k} = cell ({coords}) axis {axis}")
    lines.append(f"# flip generators {len(flips)}")
    lines.extend(binomial_str(g) for g in flips)
    if with_tiling_ideal:
        tilings = list(enumerate_tilings(region, cap))
        index = edge_index(region)
        monomials = [_tiling_monomial(t, index) for t in tilings]
        pairs = [
            Binomial(monomials[i], monomials[j])
            for i, j in combinations(range(len(monomials)), 2)
            if monomials[i] != monomials[j]
        ]
        lines.append(f"# tiling binomials {len(pairs)}")
        lines.extend(binomial_str(b) for b in pairs)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_ideals(path) -> dict:
    """Inverse of export_ideals; returns declarations and generator lists."""
    result: dict = {"variables": [], "flip": [], "tiling": []}
    section = None
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("# flip generators"):
                section = "flip"
            elif line.startswith("# tiling binomials"):
                section = "tiling"
            elif line.startswith("#"):
                continue
            elif line.startswith("var "):
                result["variables"].append(line)
            elif section is not None:
                result[section].append(parse_binomial(line))
            else:
                raise DecodeError(f"unexpected line {line!r}")
    return result
