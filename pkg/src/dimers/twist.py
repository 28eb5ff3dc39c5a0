"""The twist invariant, three independent ways.

* pretwist: a pairwise shadow-crossing sum over the dominoes.  For each
  axis k, two dominoes running along the other two axes whose shadows on
  the plane perpendicular to k cross in one unit square contribute the
  sign of the crossing times the sign of their separation along k.  The
  normalization kappa and the global sign are pinned once by
  self-calibration on the 3x3x2 box, never adjusted silently.
* twist_by_path: signed trit count along a flip/trit path from the base
  tiling; telescopes to the formula value and cross-checks it.
* pfaffian_alternating_sum: determinant of the signed white/black
  biadjacency, which equals the census alternating sum up to a global
  sign.

twist is an integer in 3D and a mod-2 residue in dimension 4 and up.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .core import (
    BLACK,
    Cell,
    Domino,
    Region,
    Tiling,
    WHITE,
    base_vertical_tiling,
    color_sign,
    domino_orientation,
    encode,
)
from .errors import (
    CalibrationError,
    InvalidRegion,
    NoBaseTiling,
    NotReachable,
    UnbalancedRegion,
)

KASTELEYN_RULE_ID = "x:+1 y:(-1)^x z:(-1)^(x+y)"

_PATH_CAP = 1_000_000

# Levi-Civita signs for permutations of (0, 1, 2)
_EPS = {
    (0, 1, 2): 1,
    (1, 2, 0): 1,
    (2, 0, 1): 1,
    (0, 2, 1): -1,
    (2, 1, 0): -1,
    (1, 0, 2): -1,
}


@dataclass(frozen=True)
class Calibration:
    kappa: Fraction
    sign: int
    kasteleyn_rule: str

    def as_dict(self) -> dict:
        return {
            "kappa": str(self.kappa),
            "sign": self.sign,
            "kasteleyn_rule": self.kasteleyn_rule,
        }


def _tau_pair(d0: Domino, d1: Domino, k: int) -> int:
    """Crossing contribution of an unordered domino pair along axis k."""
    a0, a1 = d0.axis, d1.axis
    if a0 == k or a1 == k or a0 == a1:
        return 0
    # shadows on the plane perpendicular to k must cross in one square
    if d1.low[a0] not in (d0.low[a0], d0.low[a0] + 1):
        return 0
    if d0.low[a1] not in (d1.low[a1], d1.low[a1] + 1):
        return 0
    dz = d1.low[k] - d0.low[k]
    if dz == 0:
        return 0
    return (
        _EPS[(a0, a1, k)]
        * domino_orientation(d0)
        * domino_orientation(d1)
        * (1 if dz > 0 else -1)
    )


def _tau_sum(dominoes: list[Domino], k: int) -> int:
    """Sum of crossing signs over unordered pairs, via shadow buckets.

    Each domino perpendicular to k shadows two unit squares; only pairs
    sharing a square interact, so bucketing by square makes the sum
    near-linear for the long-box tilings the sampler produces.
    """
    axes = [a for a in range(3) if a != k]
    a, b = axes
    eps = _EPS[(a, b, k)]
    buckets: dict[tuple[int, int], tuple[list, list]] = {}
    for dom in dominoes:
        if dom.axis == k:
            continue
        slot = 0 if dom.axis == a else 1
        entry = (dom.low[k], domino_orientation(dom))
        sq = (dom.low[a], dom.low[b])
        other = (sq[0] + 1, sq[1]) if dom.axis == a else (sq[0], sq[1] + 1)
        for key in (sq, other):
            buckets.setdefault(key, ([], []))[slot].append(entry)
    total = 0
    for first, second in buckets.values():
        if first and second:
            for k0, s0 in first:
                for k1, s1 in second:
                    if k1 != k0:
                        total += s0 * s1 * (1 if k1 > k0 else -1)
    return eps * total


def _tau_cross(group_a, group_b, k: int) -> int:
    return sum(_tau_pair(d0, d1, k) for d0 in group_a for d1 in group_b)


def _tau_within(group, k: int) -> int:
    group = list(group)
    return sum(
        _tau_pair(group[i], group[j], k)
        for i in range(len(group))
        for j in range(i + 1, len(group))
    )


# ---------------------------------------------------------------------------
# calibration
#
# The pairwise formula is fixed up to a normalization kappa (over ordered
# pairs) and a global sign.  Candidates are tried against three invariants
# on the 3x3x2 box: twist values must be integers, every trit must step the
# twist by exactly one, and the three axis pretwists must agree.  The first
# candidate passing all three is frozen; the global sign is declared +1, so
# a positive trit is by definition one the formula scores +1.
#
# 1/8 is the value the invariants select: on the 3x3x2 box the ordered sum
# is 0 on the large flip component and -8/+8 on the two flip-free tilings,
# and every trit steps it by exactly 8.

_KAPPA_CANDIDATES = (Fraction(1, 8), Fraction(1, 4), Fraction(1, 2))


@lru_cache(maxsize=1)
def calibration() -> Calibration:
    from .explore import enumerate_tilings
    from .moves import _apply_trit_structural, list_trits

    from .core import make_box

    region = make_box((3, 3, 2))
    tilings = list(enumerate_tilings(region, cap=None))
    base = base_vertical_tiling(region)
    for kappa in _KAPPA_CANDIDATES:
        scale = 2 * kappa  # ordered-pair sum is twice the unordered sum

        def pt(t: Tiling, k: int) -> Fraction:
            return scale * _tau_sum(t.dominoes(), k)

        base_pt = pt(base, 2)
        ok = True
        for t in tilings:
            values = [pt(t, k) for k in range(3)]
            if len(set(values)) != 1:
                ok = False
                break
            if (values[2] - base_pt).denominator != 1:
                ok = False
                break
            for move in list_trits(t):
                after = _apply_trit_structural(t, move)
                if abs(pt(after, 2) - values[2]) != 1:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return Calibration(kappa=kappa, sign=1, kasteleyn_rule=KASTELEYN_RULE_ID)
    raise CalibrationError(
        "no normalization in {1/4, 1/2} satisfies the twist invariants"
    )


def pretwist(tiling: Tiling, axis: int) -> Fraction:
    """Calibrated pairwise sum along one axis (3D only)."""
    if tiling.region.d != 3:
        raise InvalidRegion("pretwist is defined for d=3 only")
    if axis not in (0, 1, 2):
        raise InvalidRegion(f"axis must be 0, 1 or 2, got {axis}")
    cal = calibration()
    return cal.sign * 2 * cal.kappa * _tau_sum(tiling.dominoes(), axis)


@lru_cache(maxsize=256)
def _reference_tiling(region: Region) -> Tiling:
    """Base of the twist: the all-vertical tiling when it exists, else the
    first tiling in enumeration order."""
    try:
        return base_vertical_tiling(region)
    except NoBaseTiling:
        from .explore import enumerate_tilings

        for t in enumerate_tilings(region, cap=None):
            return t
        raise InvalidRegion("region has no tilings, twist is undefined")


@lru_cache(maxsize=256)
def _reference_pretwist(region: Region) -> Fraction:
    return pretwist(_reference_tiling(region), 2)


def twist(tiling: Tiling) -> int:
    """Integer twist of a 3D tiling relative to the region's base tiling."""
    value = pretwist(tiling, 2) - _reference_pretwist(tiling.region)
    if value.denominator != 1:
        raise CalibrationError(f"non-integral twist {value}")
    return int(value)


def trit_sign(before: Tiling, after: Tiling, move) -> int:
    """Twist step of a trit, from the local change in the pairwise sum."""
    cal = calibration()
    removed = set(move.removed)
    before_doms = before.dominoes()
    added = set(after.dominoes()) - set(before_doms)
    rest = [d for d in before_doms if d not in removed]
    delta = (
        _tau_within(added, 2)
        + _tau_cross(added, rest, 2)
        - _tau_within(removed, 2)
        - _tau_cross(removed, rest, 2)
    )
    value = cal.sign * 2 * cal.kappa * delta
    if value not in (1, -1):
        raise CalibrationError(f"trit changed the twist by {value}")
    return int(value)


# ---------------------------------------------------------------------------
# the path oracle


def _signed_neighbors(tiling: Tiling):
    from .moves import apply_flip, apply_trit, list_flips, list_trits

    for move in list_flips(tiling):
        yield apply_flip(tiling, move), 0
    for move in list_trits(tiling):
        after, sign = apply_trit(tiling, move)
        yield after, sign


def twist_by_path(
    tiling: Tiling, base: Tiling | None = None, *, cap: int = _PATH_CAP
) -> int:
    """Sum of trit signs along a flip/trit path from the base tiling.

    Breadth-first search; path independence is checked separately by the
    test suite's cycle-space sweep.  Raises NotReachable when the search
    cap is hit first.
    """
    if base is None:
        base = _reference_tiling(tiling.region)
    target = encode(tiling)
    start = encode(base)
    if target == start:
        return 0
    potentials = {start: 0}
    queue = deque([base])
    while queue:
        current = queue.popleft()
        level = potentials[encode(current)]
        for nxt, sign in _signed_neighbors(current):
            key = encode(nxt)
            if key in potentials:
                continue
            potentials[key] = level + sign
            if key == target:
                return level + sign
            if len(potentials) > cap:
                raise NotReachable(f"no path found within {cap} visited tilings")
            queue.append(nxt)
    raise NotReachable("target tiling is not flip/trit reachable from the base")


def twist_mod2(tiling: Tiling, *, cap: int = _PATH_CAP) -> int:
    """Parity of the trit count along any path from the base (d >= 4)."""
    from .moves import apply_flip, list_flips, list_trits, _apply_trit_structural

    if tiling.region.d < 4:
        raise InvalidRegion("twist_mod2 is the d >= 4 invariant; use twist in 3D")
    base = _reference_tiling(tiling.region)
    target = encode(tiling)
    start = encode(base)
    if target == start:
        return 0
    parities = {start: 0}
    queue = deque([base])
    while queue:
        current = queue.popleft()
        level = parities[encode(current)]
        neighbors = [(apply_flip(current, m), 0) for m in list_flips(current)]
        neighbors += [
            (_apply_trit_structural(current, m), 1) for m in list_trits(current)
        ]
        for nxt, step in neighbors:
            key = encode(nxt)
            if key in parities:
                continue
            parities[key] = (level + step) % 2
            if key == target:
                return parities[key]
            if len(parities) > cap:
                raise NotReachable(f"no path found within {cap} visited tilings")
            queue.append(nxt)
    raise NotReachable("target tiling is not flip/trit reachable from the base")


# ---------------------------------------------------------------------------
# Kasteleyn matrix and the alternating-sum determinant


@dataclass(frozen=True)
class KasteleynMatrix:
    whites: tuple[Cell, ...]
    blacks: tuple[Cell, ...]
    entries: tuple[tuple[int, ...], ...]


def _edge_sign(low: Cell, axis: int) -> int:
    if axis == 0:
        return 1
    if axis == 1:
        return -1 if low[0] % 2 else 1
    return -1 if (low[0] + low[1]) % 2 else 1


def kasteleyn_matrix(region: Region) -> KasteleynMatrix:
    """Signed white/black biadjacency with the monomial sign rule
    x: +1, y: (-1)^x, z: (-1)^(x+y) evaluated at the lesser endpoint."""
    if region.d not in (2, 3):
        raise InvalidRegion("Kasteleyn matrix supports d=2 and d=3")
    if not region.balanced():
        raise UnbalancedRegion(
            f"{region.white_count} white vs {region.black_count} black cells"
        )
    whites = tuple(c for c in region.cells if color_sign(c) == WHITE)
    blacks = tuple(c for c in region.cells if color_sign(c) == BLACK)
    black_index = {c: i for i, c in enumerate(blacks)}
    rows = []
    for w in whites:
        row = [0] * len(blacks)
        for axis in range(region.d):
            for delta in (1, -1):
                nb = w[:axis] + (w[axis] + delta,) + w[axis + 1 :]
                j = black_index.get(nb)
                if j is not None:
                    low = w if delta == 1 else nb
                    row[j] = _edge_sign(low, axis)
        rows.append(tuple(row))
    return KasteleynMatrix(whites, blacks, tuple(rows))


def _det_bareiss(matrix: list[list[int]]) -> int:
    """Exact integer determinant by fraction-free elimination."""
    m = [list(row) for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            pivot = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if pivot is None:
                return 0
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def pfaffian_alternating_sum(region: Region) -> int:
    """Signed determinant of the Kasteleyn biadjacency.

    Its absolute value equals |sum over tilings of (-1)^twist|; the global
    sign of the Pfaffian is left unresolved.
    """
    k = kasteleyn_matrix(region)
    return _det_bareiss([list(row) for row in k.entries])
