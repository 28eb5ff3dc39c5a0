"""Markov chain sampling of tilings by window proposals.

Each proposal picks a uniformly random window (2x2x1, plus 2x2x2 when
trits are enabled) and applies the unique local move there if one exists,
staying put otherwise.  The window set does not depend on the state and
every local move is an involution, so the kernel is symmetric and the
stationary distribution is uniform on the reachable component of the
start.  The RNG is mt19937 (random.Random), which streams identically
across platforms for a fixed seed.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations, product

from .core import Domino, Region, Tiling, validate
from .errors import InvalidRegion, InvalidTiling

RNG_FAMILY = "mt19937"

ERGODICITY_NOTE = (
    "uniform on the flip(+trit) component of the start; whether these moves "
    "connect all box tilings is open"
)


@dataclass(frozen=True)
class ChainConfig:
    moves: str = "flips"  # "flips" or "flips+trits"
    steps: int = 0
    seed: int = 0
    burn_in: int = 0

    def __post_init__(self):
        if self.moves not in ("flips", "flips+trits"):
            raise InvalidRegion(f"unknown move set {self.moves!r}")
        if not 0 <= self.burn_in <= self.steps:
            raise InvalidRegion("need steps >= burn_in >= 0")


def _flip_windows(region: Region) -> list[tuple[int, int, int, int]]:
    idx = region.index
    out = []
    for corner in region.cells:
        for a, b in combinations(range(region.d), 2):
            try:
                ids = (
                    idx[corner],
                    idx[corner[:a] + (corner[a] + 1,) + corner[a + 1 :]],
                    idx[corner[:b] + (corner[b] + 1,) + corner[b + 1 :]],
                )
                far = list(corner)
                far[a] += 1
                far[b] += 1
                out.append(ids + (idx[tuple(far)],))
            except KeyError:
                continue
    return out


def _trit_windows(region: Region):
    """Per 2x2x2 window: its twelve potential dominoes and, for each
    admissible triple, the replacement triple."""
    if region.d < 3:
        return []
    idx = region.index
    out = []
    for corner in region.cells:
        for axes in combinations(range(region.d), 3):
            cells = {}
            ok = True
            for deltas in product((0, 1), repeat=3):
                cell = list(corner)
                for axis, delta in zip(axes, deltas):
                    cell[axis] += delta
                cell = tuple(cell)
                if cell not in idx:
                    ok = False
                    break
                cells[deltas] = idx[cell]
            if not ok:
                continue
            edges = []
            for deltas, i in cells.items():
                for pos in range(3):
                    if deltas[pos] == 0:
                        other = list(deltas)
                        other[pos] = 1
                        j = cells[tuple(other)]
                        edges.append((min(i, j), max(i, j), axes[pos]))
            swaps = _matching_swaps(edges)
            out.append((tuple(sorted(cells.values())), swaps))
    return out


def _matching_swaps(edges):
    """Map each one-domino-per-axis matching of six window cells to the
    only other such matching of the same cells."""
    matchings = []
    for triple in combinations(edges, 3):
        used = [i for e in triple for i in e[:2]]
        if len(set(used)) != 6:
            continue
        if len({axis for _, _, axis in triple}) != 3:
            continue
        matchings.append(tuple(sorted((i, j) for i, j, _ in triple)))
    swaps = {}
    by_cells = {}
    for m in matchings:
        key = tuple(sorted(i for pair in m for i in pair))
        by_cells.setdefault(key, []).append(m)
    for group in by_cells.values():
        if len(group) == 2:
            swaps[group[0]] = group[1]
            swaps[group[1]] = group[0]
    return swaps


class _Chain:
    """Mutable chain state; tracks the twist incrementally in 3D."""

    def __init__(self, region: Region, start: Tiling, config: ChainConfig):
        report = validate(start)
        if report is not None:
            raise InvalidTiling(report)
        if start.region != region:
            raise InvalidTiling("start tiling is not a tiling of the region")
        self.region = region
        self.partner = list(start.partner)
        self.rng = random.Random(config.seed)
        self.windows: list = [("flip", w) for w in _flip_windows(region)]
        self.with_trits = config.moves == "flips+trits"
        if self.with_trits:
            self.windows += [("trit", w) for w in _trit_windows(region)]
        if not self.windows:
            raise InvalidRegion("region admits no move windows")
        self.twist_offset = 0  # twist relative to the start tiling

    def step(self) -> None:
        kind, window = self.windows[self.rng.randrange(len(self.windows))]
        partner = self.partner
        if kind == "flip":
            i00, i10, i01, i11 = window
            if partner[i00] == i10 and partner[i01] == i11:
                partner[i00], partner[i01] = i01, i00
                partner[i10], partner[i11] = i11, i10
            elif partner[i00] == i01 and partner[i10] == i11:
                partner[i00], partner[i10] = i10, i00
                partner[i01], partner[i11] = i11, i01
            return
        ids, swaps = window
        inside = tuple(
            sorted((i, partner[i]) for i in ids if partner[i] in ids and i < partner[i])
        )
        replacement = swaps.get(inside)
        if replacement is None:
            return
        if self.region.d == 3:
            self.twist_offset += self._twist_delta(inside, replacement)
        # the replacement covers exactly the same six cells
        for i, j in replacement:
            partner[i], partner[j] = j, i

    def _twist_delta(self, removed_pairs, added_pairs) -> int:
        from .twist import _tau_cross, _tau_within, calibration

        removed = [self._domino(i, j) for i, j in removed_pairs]
        added = [self._domino(i, j) for i, j in added_pairs]
        removed_set = set(removed_pairs)
        rest = [
            self._domino(i, j)
            for i, j in enumerate(self.partner)
            if i < j and (i, j) not in removed_set
        ]
        cal = calibration()
        delta = (
            _tau_within(added, 2)
            + _tau_cross(added, rest, 2)
            - _tau_within(removed, 2)
            - _tau_cross(removed, rest, 2)
        )
        value = cal.sign * 2 * cal.kappa * delta
        if value not in (1, -1):
            raise InvalidTiling(f"trit changed the twist by {value}")
        return int(value)

    def _domino(self, i: int, j: int) -> Domino:
        low, high = self.region.cells[i], self.region.cells[j]
        axis = next(a for a in range(self.region.d) if low[a] != high[a])
        return Domino(low, axis)

    def tiling(self) -> Tiling:
        return Tiling(self.region, tuple(self.partner))


def mcmc_run(region: Region, start: Tiling, config: ChainConfig) -> Tiling:
    """Final state after config.steps window proposals."""
    chain = _Chain(region, start, config)
    for _ in range(config.steps):
        chain.step()
    return chain.tiling()


@dataclass
class TwistHistogram:
    counts: dict[int, int]
    meta: dict = field(default_factory=dict)

    @property
    def n_samples(self) -> int:
        return sum(self.counts.values())

    def _moment(self, power: int, center: float) -> float:
        n = self.n_samples
        return sum(c * (v - center) ** power for v, c in self.counts.items()) / n

    @property
    def mean(self) -> float:
        return self._moment(1, 0.0)

    @property
    def variance(self) -> float:
        return self._moment(2, self.mean)

    @property
    def skewness(self) -> float:
        var = self.variance
        if var == 0:
            return 0.0
        return self._moment(3, self.mean) / var**1.5

    @property
    def excess_kurtosis(self) -> float:
        var = self.variance
        if var == 0:
            return 0.0
        return self._moment(4, self.mean) / var**2 - 3.0

    @property
    def moments(self) -> tuple[float, float, float, float]:
        return (self.mean, self.variance, self.skewness, self.excess_kurtosis)


def twist_distribution(
    region: Region,
    config: ChainConfig,
    samples: int,
    *,
    start: Tiling | None = None,
    thin: int | None = None,
    chains: int = 1,
) -> TwistHistogram:
    """Histogram of the twist over thinned chain samples (3D only).

    Burn-in defaults to 100x the cell count and thinning to the cell
    count.  Chains are independent with derived seeds and their counts
    merge associatively, so the result does not depend on scheduling.
    """
    from .core import base_vertical_tiling
    from .twist import twist as _twist_of

    if region.d != 3:
        raise InvalidRegion("twist histograms are defined for d=3")
    if start is None:
        start = base_vertical_tiling(region)
    thin = region.n_cells if thin is None else thin
    burn_in = config.burn_in if config.burn_in else 100 * region.n_cells
    base_twist = _twist_of(start)
    counts: dict[int, int] = {}
    per_chain = [samples // chains] * chains
    for k in range(samples % chains):
        per_chain[k] += 1
    for chain_id, chain_samples in enumerate(per_chain):
        if chain_samples == 0:
            continue
        chain = _Chain(
            region,
            start,
            ChainConfig(
                moves=config.moves,
                steps=config.steps,
                seed=config.seed + chain_id,
                burn_in=config.burn_in,
            ),
        )
        for _ in range(burn_in):
            chain.step()
        for _ in range(chain_samples):
            for _ in range(thin):
                chain.step()
            value = base_twist + chain.twist_offset
            counts[value] = counts.get(value, 0) + 1
    meta = {
        "moves": config.moves,
        "seed": config.seed,
        "chains": chains,
        "burn_in": burn_in,
        "thinning": thin,
        "rng": RNG_FAMILY,
        "ergodicity": ERGODICITY_NOTE,
    }
    return TwistHistogram(counts=dict(sorted(counts.items())), meta=meta)


def histogram_csv(hist: TwistHistogram, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("twist,count\n")
        for value, count in sorted(hist.counts.items()):
            fh.write(f"{value},{count}\n")


def histogram_svg(hist: TwistHistogram) -> str:
    """Static SVG bar plot of the histogram."""
    counts = sorted(hist.counts.items())
    if not counts:
        return '<svg xmlns="http://www.w3.org/2000/svg" width="10" height="10"/>'
    bar_w, gap, height, margin = 28, 6, 160, 24
    peak = max(c for _, c in counts)
    width = margin * 2 + len(counts) * (bar_w + gap)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height + 2 * margin}" font-family="monospace" font-size="10">'
    ]
    for k, (value, count) in enumerate(counts):
        h = max(1, round(height * count / peak))
        x = margin + k * (bar_w + gap)
        y = margin + height - h
        parts.append(
            f'<rect x="{x}" y="{y}" width="{bar_w}" height="{h}" fill="#4477aa"/>'
        )
        parts.append(
            f'<text x="{x + bar_w // 2}" y="{margin + height + 12}" '
            f'text-anchor="middle">{value}</text>'
        )
        parts.append(
            f'<text x="{x + bar_w // 2}" y="{y - 3}" text-anchor="middle">{count}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
