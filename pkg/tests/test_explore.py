import pytest

from dimers.core import decode, encode, make_box, make_region, validate
from dimers.errors import CapExceeded
from dimers.explore import (
    DiskBackedSet,
    component_trit_graph,
    enumerate_tilings,
    flip_components,
    flip_components_extended,
    flip_connected_2d,
    flip_free_tilings,
    iter_free_simply_connected_polyominoes,
    tw_max,
    twist_census,
)
from dimers.moves import list_flips
from dimers.twist import pfaffian_alternating_sum


def test_enumerate_counts():
    assert sum(1 for _ in enumerate_tilings(make_box((3, 3, 2)))) == 229
    assert sum(1 for _ in enumerate_tilings(make_box((2, 2, 2)))) == 9
    assert sum(1 for _ in enumerate_tilings(make_box((1, 1, 2)))) == 1


def test_enumerate_is_deterministic_and_duplicate_free():
    region = make_box((2, 2, 4))
    first = [encode(t) for t in enumerate_tilings(region)]
    second = [encode(t) for t in enumerate_tilings(region)]
    assert first == second
    assert len(first) == len(set(first)) == 121


def test_enumerate_cap():
    with pytest.raises(CapExceeded):
        list(enumerate_tilings(make_box((3, 3, 2)), cap=100))
    assert sum(1 for _ in enumerate_tilings(make_box((3, 3, 2)), cap=None)) == 229


def test_flip_components_332():
    census = flip_components(make_box((3, 3, 2)))
    assert census.sizes == [227, 1, 1]
    assert census.total == 229
    assert census.multiplicity == {227: 1, 1: 2}
    # the two singleton components are exactly the flip-free tilings
    singleton_reps = {rep for size, rep in census.components if size == 1}
    free = {encode(t) for t in flip_free_tilings(make_box((3, 3, 2)))}
    assert singleton_reps == free


def test_flip_components_222():
    census = flip_components(make_box((2, 2, 2)))
    assert census.sizes == [9]


def test_component_representatives_decode_and_validate():
    census = flip_components(make_box((3, 3, 2)))
    for comp_id, (size, rep) in enumerate(census.components):
        t = census.representative(comp_id)
        assert validate(t) is None
        assert encode(t) == rep


def test_flip_free_tilings_counts():
    assert len(flip_free_tilings(make_box((3, 3, 2)))) == 2
    assert len(flip_free_tilings(make_box((2, 2, 2)))) == 0


def test_component_trit_graph_332():
    graph = component_trit_graph(make_box((3, 3, 2)))
    assert len(graph.census.components) == 3
    assert graph.is_connected()
    assert sorted(graph.twists) == [-1, 0, 1]
    # the large component sits at twist 0; singletons attach to it by trits
    assert graph.twists[0] == 0
    assert graph.edges == {(0, 1), (0, 2)}
    for a, b in graph.edges:
        assert abs(graph.twists[a] - graph.twists[b]) == 1


def test_twist_census_332():
    census = twist_census(make_box((3, 3, 2)))
    assert census == {-1: 1, 0: 227, 1: 1}
    assert sum(census.values()) == 229
    assert census == {-k: v for k, v in census.items()}  # mirror symmetry


def test_twist_census_222_point_mass():
    assert twist_census(make_box((2, 2, 2))) == {0: 9}


def test_alternating_sum_matches_pfaffian():
    region = make_box((3, 3, 2))
    census = twist_census(region)
    alternating = sum(count * (-1) ** value for value, count in census.items())
    assert abs(alternating) == abs(pfaffian_alternating_sum(region)) == 225


def test_tw_max_values_and_bound():
    assert tw_max(make_box((2, 2, 2))) == 0
    assert tw_max(make_box((3, 3, 2))) == 1
    for dims in [(2, 2, 2), (3, 3, 2), (2, 2, 4)]:
        l, m, n = dims
        assert tw_max(make_box(dims)) / (l * m * n * min(dims)) <= 1 / 16


@pytest.mark.slow
def test_tw_max_334():
    census = twist_census(make_box((3, 3, 4)))
    assert census == {-2: 1, -1: 4011, 0: 109781, 1: 4011, 2: 1}
    assert tw_max(make_box((3, 3, 4))) == 2
    assert 2 / (3 * 3 * 4 * 3) <= 1 / 16


def test_census_csv(tmp_path):
    graph = component_trit_graph(make_box((3, 3, 2)))
    path = tmp_path / "census.csv"
    from dimers.explore import census_csv

    census_csv(graph, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "component_id,size,twist,representative_hex"
    assert len(lines) == 4
    comp_id, size, twist_value, rep_hex = lines[1].split(",")
    assert (comp_id, size, twist_value) == ("0", "227", "0")
    assert decode(bytes.fromhex(rep_hex), make_box((3, 3, 2)))


def test_disk_backed_set_insert_once(tmp_path):
    s = DiskBackedSet(tmp_path / "seen.sqlite")
    assert s.add(b"abc") is True
    assert s.add(b"abc") is False
    assert b"abc" in s and b"xyz" not in s
    assert len(s) == 1
    s.close()
    # reopening resumes the same set
    s2 = DiskBackedSet(tmp_path / "seen.sqlite")
    assert s2.add(b"abc") is False
    assert s2.add(b"xyz") is True
    s2.close()


def test_extended_census_matches_in_memory(tmp_path):
    region = make_box((3, 3, 2))
    extended = flip_components_extended(region, tmp_path)
    in_memory = flip_components(region)
    assert extended.sizes == in_memory.sizes
    assert [rep for _, rep in extended.components] == [
        rep for _, rep in in_memory.components
    ]


def test_polyomino_counts_match_literature():
    counts = {}
    for cells in iter_free_simply_connected_polyominoes(8, even_only=False):
        counts[len(cells)] = counts.get(len(cells), 0) + 1
    # free polyomino counts 1,1,2,5,12,35,108,369 minus the holey ones
    # (one heptomino, six octominoes)
    assert [counts.get(n, 0) for n in range(1, 9)] == [1, 1, 2, 5, 12, 35, 107, 363]


def test_flip_connected_2d_agrees_with_library_bfs():
    cells = tuple((x, y) for x in range(3) for y in range(2))
    assert flip_connected_2d(cells)
    region = make_region(list(cells))
    tilings = list(enumerate_tilings(region))
    assert len(tilings) == 3
    assert all(len(list_flips(t)) >= 1 for t in tilings)


def test_thurston_small_regions_flip_connected():
    for cells in iter_free_simply_connected_polyominoes(8):
        if sum(1 if (x + y) % 2 == 0 else -1 for x, y in cells) == 0:
            assert flip_connected_2d(cells)
