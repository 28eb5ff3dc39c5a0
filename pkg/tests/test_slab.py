from itertools import product

import pytest

from dimers.core import make_box, validate
from dimers.errors import InflationError, InvalidRegion, MoveNotApplicable
from dimers.explore import UnionFind
from dimers.slab import (
    Slab,
    SlabFlip,
    SlabTiling,
    all_pair_twists,
    apply_slab_flip,
    enumerate_slab_tilings,
    four_color,
    horizontal_slab_tiling,
    inflate,
    list_slab_flips,
    pair_twist,
    read_slab_tilings,
    slab_cells,
    triple_twist,
    validate_slab_tiling,
    write_slab_tilings,
    TRIPLE_TWIST_PAIRS,
    _OTHER_PAIRS,
)

ALL_PAIRS = TRIPLE_TWIST_PAIRS + _OTHER_PAIRS


def test_four_color_anchor_and_periodicity():
    assert four_color((0, 0, 0)) == "R"
    for cell in product(range(4), repeat=3):
        x, y, z = cell
        assert four_color(cell) == four_color((x + 2, y, z))
        assert four_color(cell) == four_color((x, y + 2, z))
        assert four_color(cell) == four_color((x, y, z + 2))


def test_every_slab_covers_all_four_colors():
    # the structural property behind inflation, checked over every slab
    # placement in the 4x4x2 box and for every normal
    region = make_box((4, 4, 2))
    placements = 0
    for corner in region.cells:
        for normal in range(3):
            slab = Slab(corner, normal)
            cells = slab_cells(slab)
            if all(region.contains(c) for c in cells):
                placements += 1
                assert sorted(four_color(c) for c in cells) == ["B", "G", "R", "Y"]
    assert placements > 0


def test_enumerate_slab_tilings_counts():
    assert sum(1 for _ in enumerate_slab_tilings(make_box((4, 2, 2)))) == 11
    assert sum(1 for _ in enumerate_slab_tilings(make_box((4, 4, 2)))) == 165
    assert sum(1 for _ in enumerate_slab_tilings(make_box((2, 2, 2)))) == 3


def test_enumerate_slab_tilings_are_valid_and_distinct():
    seen = set()
    for tiling in enumerate_slab_tilings(make_box((4, 2, 2))):
        assert validate_slab_tiling(tiling) is None
        assert tiling.slabs not in seen
        seen.add(tiling.slabs)


def test_slab_tilings_need_3d():
    with pytest.raises(InvalidRegion):
        next(enumerate_slab_tilings(make_box((4, 4))))


def test_horizontal_slab_tiling():
    tiling = horizontal_slab_tiling(make_box((4, 4, 2)))
    assert validate_slab_tiling(tiling) is None
    assert all(s.normal == 2 for s in tiling.slabs)
    with pytest.raises(InvalidRegion):
        horizontal_slab_tiling(make_box((3, 4, 2)))


def test_inflate_produces_valid_domino_tilings():
    for dims in [(4, 2, 2), (4, 4, 2)]:
        for tiling in enumerate_slab_tilings(make_box(dims)):
            for pair in ALL_PAIRS:
                inflated = inflate(tiling, pair)
                assert validate(inflated) is None
                assert inflated.n_dominoes == len(tiling.slabs)


def test_inflate_horizontal_of_442():
    tiling = horizontal_slab_tiling(make_box((4, 4, 2)))
    inflated = inflate(tiling, ("R", "G"))
    assert validate(inflated) is None


def test_inflate_rejects_unknown_pair():
    tiling = horizontal_slab_tiling(make_box((4, 4, 2)))
    with pytest.raises(InflationError):
        inflate(tiling, ("R", "R"))
    with pytest.raises(InflationError):
        inflate(tiling, ("R", "X"))


def test_inflation_collapses_some_distinct_tilings():
    # the survivor pairs of different slabs can coincide, so inflation is
    # a well-defined but non-injective map; these counts are frozen from
    # the exhaustive sweep
    tilings = list(enumerate_slab_tilings(make_box((4, 2, 2))))
    images = {inflate(t, ("R", "G")).partner for t in tilings}
    assert len(tilings) == 11
    assert len(images) == 5

    tilings = list(enumerate_slab_tilings(make_box((4, 4, 2))))
    images = {inflate(t, ("R", "G")).partner for t in tilings}
    assert len(tilings) == 165
    assert len(images) == 36


def test_pair_twist_of_horizontal_is_zero():
    for dims in [(4, 2, 2), (4, 4, 2)]:
        tiling = horizontal_slab_tiling(make_box(dims))
        for pair in ALL_PAIRS:
            assert pair_twist(tiling, pair) == 0


def test_pair_twist_invariant_under_slab_flips():
    for dims in [(4, 2, 2), (4, 4, 2)]:
        for tiling in enumerate_slab_tilings(make_box(dims)):
            value = pair_twist(tiling, ("R", "G"))
            for move in list_slab_flips(tiling):
                assert pair_twist(apply_slab_flip(tiling, move), ("R", "G")) == value


def _mirror_y(tiling):
    height = tiling.region.dims[1]
    slabs = []
    for s in tiling.slabs:
        extent = 0 if s.normal == 1 else 1
        new_y = height - 1 - (s.corner[1] + extent)
        slabs.append(Slab((s.corner[0], new_y, s.corner[2]), s.normal))
    mirrored = SlabTiling(tiling.region, tuple(sorted(slabs, key=lambda s: (s.corner, s.normal))))
    assert validate_slab_tiling(mirrored) is None
    return mirrored


def test_pair_twist_negates_under_mirror():
    # the y-mirror fixes the pair {R, G} setwise and reverses orientation
    for tiling in enumerate_slab_tilings(make_box((4, 4, 2))):
        assert pair_twist(_mirror_y(tiling), ("R", "G")) == -pair_twist(
            tiling, ("R", "G")
        )


def test_triple_twist_horizontal_is_zero_vector():
    assert triple_twist(horizontal_slab_tiling(make_box((4, 4, 2)))) == (0, 0, 0)


def test_triple_twist_relations_hold_exhaustively():
    # complementary color pairs give opposite twists; triple_twist raises
    # if the frozen relations ever break
    for dims in [(4, 2, 2), (4, 4, 2)]:
        for tiling in enumerate_slab_tilings(make_box(dims)):
            values = all_pair_twists(tiling)
            assert values[("R", "G")] + values[("Y", "B")] == 0
            assert values[("R", "B")] + values[("G", "Y")] == 0
            assert values[("R", "Y")] + values[("G", "B")] == 0
            triple_twist(tiling)


def test_triple_twist_constant_on_flip_components():
    for dims in [(4, 2, 2), (4, 4, 2)]:
        tilings = list(enumerate_slab_tilings(make_box(dims)))
        index = {t.slabs: i for i, t in enumerate(tilings)}
        uf = UnionFind(len(tilings))
        for i, t in enumerate(tilings):
            for move in list_slab_flips(t):
                uf.union(i, index[apply_slab_flip(t, move).slabs])
        for i, t in enumerate(tilings):
            assert triple_twist(t) == triple_twist(tilings[uf.find(i)])


def test_slab_flip_census_matches_brute_force():
    # brute force: two slab tilings are flip-adjacent iff they differ in
    # exactly two slabs filling a common 2x2x2 block
    tilings = list(enumerate_slab_tilings(make_box((4, 2, 2))))
    index = {t.slabs: i for i, t in enumerate(tilings)}
    bfs_edges = set()
    for i, t in enumerate(tilings):
        for move in list_slab_flips(t):
            j = index[apply_slab_flip(t, move).slabs]
            bfs_edges.add((min(i, j), max(i, j)))
    brute_edges = set()
    for i in range(len(tilings)):
        for j in range(i + 1, len(tilings)):
            diff = set(tilings[i].slabs) ^ set(tilings[j].slabs)
            if len(diff) == 4:
                cells = sorted(c for s in diff if s in tilings[i].slabs for c in slab_cells(s))
                other = sorted(c for s in diff if s in tilings[j].slabs for c in slab_cells(s))
                if cells == other and len(set(cells)) == 8:
                    brute_edges.add((i, j))
    assert bfs_edges == brute_edges
    uf = UnionFind(len(tilings))
    for i, j in bfs_edges:
        uf.union(i, j)
    assert len({uf.find(i) for i in range(len(tilings))}) == 1


def test_stacked_slabs_flip_to_both_other_normals():
    region = make_box((2, 2, 2))
    stacked = SlabTiling(region, (Slab((0, 0, 0), 2), Slab((0, 0, 1), 2)))
    assert validate_slab_tiling(stacked) is None
    moves = list_slab_flips(stacked)
    assert {(m.from_normal, m.to_normal) for m in moves} == {(2, 0), (2, 1)}
    for move in moves:
        flipped = apply_slab_flip(stacked, move)
        assert all(s.normal == move.to_normal for s in flipped.slabs)
        back = SlabFlip(move.corner, move.to_normal, move.from_normal)
        assert apply_slab_flip(flipped, back).slabs == stacked.slabs


def test_apply_slab_flip_rejects_missing_pair():
    region = make_box((2, 2, 2))
    stacked = SlabTiling(region, (Slab((0, 0, 0), 2), Slab((0, 0, 1), 2)))
    with pytest.raises(MoveNotApplicable):
        apply_slab_flip(stacked, SlabFlip((0, 0, 0), 0, 1))


def test_slab_file_roundtrip(tmp_path):
    region = make_box((4, 2, 2))
    tilings = list(enumerate_slab_tilings(region))
    path = tmp_path / "slabs.jsonl"
    assert write_slab_tilings(path, region, tilings) == 11
    back_region, back = read_slab_tilings(path)
    assert back_region == region
    assert [t.slabs for t in back] == [t.slabs for t in tilings]
