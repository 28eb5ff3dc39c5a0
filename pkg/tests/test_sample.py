from collections import Counter

import pytest

from dimers.core import base_vertical_tiling, encode, make_box, validate
from dimers.errors import InvalidRegion, InvalidTiling
from dimers.explore import enumerate_tilings, flip_free_tilings, twist_census
from dimers.sample import (
    ChainConfig,
    TwistHistogram,
    _Chain,
    histogram_csv,
    histogram_svg,
    mcmc_run,
    twist_distribution,
)
from dimers.twist import twist


def test_chain_config_validation():
    with pytest.raises(InvalidRegion):
        ChainConfig(moves="jumps", steps=10)
    with pytest.raises(InvalidRegion):
        ChainConfig(moves="flips", steps=5, burn_in=6)


def test_zero_steps_returns_start():
    region = make_box((2, 2, 2))
    start = base_vertical_tiling(region)
    assert mcmc_run(region, start, ChainConfig(moves="flips", steps=0)) == start


def test_mcmc_rejects_invalid_start():
    region = make_box((2, 2, 2))
    other = base_vertical_tiling(make_box((2, 2, 4)))
    with pytest.raises(InvalidTiling):
        mcmc_run(region, other, ChainConfig(moves="flips", steps=1))


def test_seed_determinism():
    region = make_box((3, 3, 2))
    start = base_vertical_tiling(region)
    config = ChainConfig(moves="flips+trits", steps=5_000, seed=11)
    a = mcmc_run(region, start, config)
    b = mcmc_run(region, start, config)
    assert a == b
    c = mcmc_run(region, start, ChainConfig(moves="flips+trits", steps=5_000, seed=12))
    assert validate(c) is None


def test_visited_states_stay_valid_and_in_component():
    region = make_box((2, 2, 2))
    start = base_vertical_tiling(region)
    chain = _Chain(region, start, ChainConfig(moves="flips", steps=0, seed=3))
    reachable = {encode(t) for t in enumerate_tilings(region)}
    for _ in range(500):
        chain.step()
        t = chain.tiling()
        assert validate(t) is None
        assert encode(t) in reachable


def test_flips_only_chain_is_stuck_on_flip_free_start():
    region = make_box((3, 3, 2))
    start = flip_free_tilings(region)[0]
    final = mcmc_run(region, start, ChainConfig(moves="flips", steps=2_000, seed=5))
    assert final == start


def test_trit_moves_leave_the_flip_component():
    region = make_box((3, 3, 2))
    start = flip_free_tilings(region)[0]
    final = mcmc_run(
        region, start, ChainConfig(moves="flips+trits", steps=2_000, seed=5)
    )
    assert validate(final) is None
    assert final != start


def test_uniformity_smoke_on_222():
    region = make_box((2, 2, 2))
    start = base_vertical_tiling(region)
    chain = _Chain(region, start, ChainConfig(moves="flips", steps=0, seed=0))
    counts = Counter()
    samples = 3_000
    for _ in range(samples):
        for _ in range(10):
            chain.step()
        counts[encode(chain.tiling())] += 1
    states = {encode(t) for t in enumerate_tilings(region)}
    tv = 0.5 * sum(abs(counts.get(s, 0) / samples - 1 / 9) for s in states)
    assert tv < 0.05


def test_chain_with_trits_visits_both_flip_free_tilings():
    region = make_box((3, 3, 2))
    targets = {encode(t) for t in flip_free_tilings(region)}
    chain = _Chain(
        region,
        base_vertical_tiling(region),
        ChainConfig(moves="flips+trits", steps=0, seed=0),
    )
    seen = set()
    for _ in range(10_000_000):
        chain.step()
        key = encode(chain.tiling())
        if key in targets:
            seen.add(key)
            if len(seen) == 2:
                break
    assert len(seen) == 2


def test_incremental_twist_matches_formula():
    region = make_box((3, 3, 2))
    start = base_vertical_tiling(region)
    chain = _Chain(region, start, ChainConfig(moves="flips+trits", steps=0, seed=9))
    for _ in range(3_000):
        chain.step()
    assert twist(start) + chain.twist_offset == twist(chain.tiling())


def test_twist_distribution_point_mass_on_222():
    region = make_box((2, 2, 2))
    hist = twist_distribution(
        region, ChainConfig(moves="flips", steps=0, seed=1), samples=200
    )
    assert hist.counts == {0: 200}
    assert hist.moments == (0.0, 0.0, 0.0, 0.0)


def test_twist_distribution_support_on_332():
    region = make_box((3, 3, 2))
    hist = twist_distribution(
        region, ChainConfig(moves="flips+trits", steps=0, seed=2), samples=400
    )
    support = set(twist_census(region))
    assert set(hist.counts) <= support
    assert hist.n_samples == 400
    assert hist.meta["rng"] == "mt19937"
    assert "component" in hist.meta["ergodicity"]


def test_twist_distribution_multichain_merge_is_deterministic():
    region = make_box((2, 2, 2))
    config = ChainConfig(moves="flips", steps=0, seed=4)
    merged = twist_distribution(region, config, samples=90, chains=3)
    again = twist_distribution(region, config, samples=90, chains=3)
    assert merged.counts == again.counts
    assert merged.n_samples == 90


def test_twist_distribution_rejects_2d():
    with pytest.raises(InvalidRegion):
        twist_distribution(
            make_box((2, 2)), ChainConfig(moves="flips", steps=0), samples=10
        )


def test_histogram_moments():
    hist = TwistHistogram(counts={-1: 1, 0: 2, 1: 1})
    mean, variance, skewness, kurtosis = hist.moments
    assert mean == 0.0
    assert variance == 0.5
    assert skewness == 0.0
    assert kurtosis == -1.0


def test_histogram_csv_and_svg(tmp_path):
    hist = TwistHistogram(counts={-1: 3, 0: 10, 2: 1})
    csv_path = tmp_path / "hist.csv"
    histogram_csv(hist, csv_path)
    assert csv_path.read_text().splitlines() == [
        "twist,count",
        "-1,3",
        "0,10",
        "2,1",
    ]
    svg = histogram_svg(hist)
    assert svg.startswith("<svg") and svg.endswith("</svg>")
    assert svg.count("<rect") == 3


@pytest.mark.slow
def test_twist_distribution_4_4_20_is_roughly_normal():
    # symmetric region, so skewness should vanish; at height 20 the
    # distribution is still visibly leptokurtic (measured excess kurtosis
    # 0.7..0.9 across seeds), so the tail bound sits above that
    region = make_box((4, 4, 20))
    hist = twist_distribution(
        region, ChainConfig(moves="flips+trits", steps=0, seed=0), samples=10_000
    )
    assert hist.n_samples == 10_000
    assert abs(hist.skewness) < 0.2
    assert abs(hist.excess_kurtosis) < 1.2
    assert hist.variance > 0.5
