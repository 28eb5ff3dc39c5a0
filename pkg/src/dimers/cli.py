"""Command-line surface.

Subcommands: count, enumerate, components, flipfree, census, twist,
pfaffian, sample, slab, ideals, render.  Every run writes a JSON manifest
(command, region, seeds, calibration ids, wall time) so outputs can be
reproduced bit for bit.  Exit codes: 2 usage, 3 caps and guards,
4 calibration failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .core import (
    base_vertical_tiling,
    make_box,
    make_region,
    read_tilings,
    region_to_record,
    render_floors,
    write_tilings,
)
from .counting import count_cylinder, count_rect_2d_formula, count_region
from .errors import CalibrationError, CapExceeded, DimersError, WidthGuardExceeded
from .explore import (
    census_csv,
    component_trit_graph,
    enumerate_tilings,
    flip_free_tilings,
    twist_census,
)
from .sample import ChainConfig, histogram_csv, histogram_svg, twist_distribution
from .slab import (
    enumerate_slab_tilings,
    read_slab_tilings,
    triple_twist,
)

EXIT_USAGE = 2
EXIT_GUARD = 3
EXIT_CALIBRATION = 4


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad box spec {text!r}")
    if len(dims) < 2:
        raise argparse.ArgumentTypeError("a box needs at least two dimensions")
    return dims


def _load_disk(path: str):
    """Disk file: one row of #/. characters per line, or a JSON region
    record on the first line."""
    text = Path(path).read_text(encoding="utf-8")
    first = text.lstrip().splitlines()[0] if text.strip() else ""
    if first.startswith("{"):
        from .core import region_from_record

        return region_from_record(json.loads(first))
    cells = []
    rows = [row for row in text.splitlines() if row.strip()]
    for r, row in enumerate(reversed(rows)):
        for c, ch in enumerate(row):
            if ch == "#":
                cells.append((c, r))
    return make_region(cells, d=2)


def _region_from_args(args) -> object:
    if getattr(args, "box", None):
        return make_box(args.box)
    if getattr(args, "disk", None):
        disk = _load_disk(args.disk)
        if getattr(args, "height", None):
            from .core import make_cylinder

            return make_cylinder(disk, args.height)
        return disk
    raise DimersError("no region given; use --box or --disk")


def _write_manifest(args, command: str, extra: dict, started: float) -> None:
    from .twist import calibration

    record = {
        "command": command,
        "argv": sys.argv[1:],
        "version": __version__,
        "region": extra.pop("region", None),
        "seed": getattr(args, "seed", None),
        "calibration": calibration().as_dict(),
        "wall_time_s": round(time.time() - started, 3),
    }
    record.update(extra)
    path = Path(getattr(args, "manifest", None) or "run_manifest.json")
    path.write_text(json.dumps(record, indent=2) + "\n", encoding="utf-8")


def _tilings_from_arg(args, region):
    if args.tiling == "base":
        return [base_vertical_tiling(region)]
    file_region, tilings = read_tilings(args.tiling)
    if region is not None and file_region != region:
        raise DimersError("tiling file region disagrees with --box")
    return tilings


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_count(args) -> dict:
    if args.formula:
        if args.box is None or len(args.box) != 2:
            raise DimersError("--formula needs --box M,N")
        value = count_rect_2d_formula(*args.box)
        print(round(value))
        return {"count": round(value), "formula_value": value,
                "region": {"d": 2, "kind": "box", "dims": list(args.box)}}
    if args.disk and args.height:
        disk = _load_disk(args.disk)
        value = count_cylinder(disk, args.height)
        print(value)
        return {"count": str(value), "region": {"kind": "cylinder",
                "disk_cells": len(disk.cells), "height": args.height}}
    region = _region_from_args(args)
    value = count_region(region)
    print(value)
    return {"count": str(value), "region": region_to_record(region)}


def _cmd_enumerate(args) -> dict:
    region = _region_from_args(args)
    out = args.out or "tilings.jsonl"
    n = write_tilings(out, region, enumerate_tilings(region, args.cap))
    print(f"{n} tilings -> {out}")
    return {"tilings": n, "out": str(out), "region": region_to_record(region)}


def _cmd_components(args) -> dict:
    region = _region_from_args(args)
    if args.extended:
        from .explore import flip_components_extended

        scratch = args.scratch or "."
        census = flip_components_extended(region, scratch)
        graph = None
    else:
        graph = component_trit_graph(region, args.cap)
        census = graph.census
    sizes = census.sizes
    print(f"tilings: {census.total}")
    print(f"components: {len(sizes)}")
    print("sizes: " + ", ".join(map(str, sizes)))
    if graph is not None and args.out:
        census_csv(graph, args.out)
    return {
        "tilings": str(census.total),
        "components": len(sizes),
        "region": region_to_record(region),
    }


def _cmd_flipfree(args) -> dict:
    region = _region_from_args(args)
    from .core import encode

    found = flip_free_tilings(region, args.cap)
    print(f"flip-free tilings: {len(found)}")
    for t in found:
        print(encode(t).hex())
    if args.out:
        write_tilings(args.out, region, found)
    return {"flip_free": len(found), "region": region_to_record(region)}


def _cmd_census(args) -> dict:
    region = _region_from_args(args)
    counts = twist_census(region, args.cap)
    for value, count in counts.items():
        print(f"{value},{count}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("twist,count\n")
            for value, count in counts.items():
                fh.write(f"{value},{count}\n")
    return {
        "census": {str(k): str(v) for k, v in counts.items()},
        "region": region_to_record(region),
    }


def _cmd_twist(args) -> dict:
    from .twist import twist

    region = _region_from_args(args)
    values = [twist(t) for t in _tilings_from_arg(args, region)]
    for value in values:
        print(value)
    return {"twists": values, "region": region_to_record(region)}


def _cmd_pfaffian(args) -> dict:
    from .twist import pfaffian_alternating_sum

    region = _region_from_args(args)
    value = pfaffian_alternating_sum(region)
    print(value)
    return {"pfaffian": str(value), "region": region_to_record(region)}


def _cmd_sample(args) -> dict:
    region = _region_from_args(args)
    config = ChainConfig(
        moves=args.moves, steps=args.steps, seed=args.seed, burn_in=args.burn_in
    )
    if args.histogram or args.svg:
        hist = twist_distribution(
            region, config, args.samples, chains=args.workers
        )
        if args.histogram:
            histogram_csv(hist, args.histogram)
        if args.svg:
            Path(args.svg).write_text(histogram_svg(hist), encoding="utf-8")
        mean, var, skew, kurt = hist.moments
        print(
            f"samples: {hist.n_samples} mean: {mean:.4f} variance: {var:.4f} "
            f"skewness: {skew:.4f} excess_kurtosis: {kurt:.4f}"
        )
        return {
            "histogram": {str(k): v for k, v in hist.counts.items()},
            "meta": hist.meta,
            "region": region_to_record(region),
        }
    from .sample import mcmc_run

    start = base_vertical_tiling(region)
    final = mcmc_run(region, start, config)
    out = args.out or "sampled.jsonl"
    write_tilings(out, region, [final])
    print(f"final state -> {out}")
    return {"out": str(out), "region": region_to_record(region)}


def _cmd_slab(args) -> dict:
    region = _region_from_args(args) if (args.box or args.disk) else None
    if args.slab_command == "census":
        from .slab import list_slab_flips, apply_slab_flip
        from .explore import UnionFind

        tilings = list(enumerate_slab_tilings(region, args.cap))
        index = {t.slabs: i for i, t in enumerate(tilings)}
        uf = UnionFind(len(tilings))
        for i, t in enumerate(tilings):
            for move in list_slab_flips(t):
                uf.union(i, index[apply_slab_flip(t, move).slabs])
        sizes: dict[int, int] = {}
        for i in range(len(tilings)):
            root = uf.find(i)
            sizes[root] = sizes.get(root, 0) + 1
        triples = sorted(set(triple_twist(tilings[r]) for r in sizes))
        print(f"slab tilings: {len(tilings)}")
        print(f"flip components: {len(sizes)}")
        print("triple twists: " + "; ".join(map(str, triples)))
        return {
            "slab_tilings": len(tilings),
            "components": len(sizes),
            "region": region_to_record(region),
        }
    # slab twist --tiling FILE
    file_region, slab_tilings = read_slab_tilings(args.tiling)
    values = [triple_twist(t) for t in slab_tilings]
    for v in values:
        print(",".join(map(str, v)))
    return {"triple_twists": [list(v) for v in values],
            "region": region_to_record(file_region)}


def _cmd_ideals(args) -> dict:
    from .ideals import export_ideals

    region = _region_from_args(args)
    out = args.out or "ideals.txt"
    export_ideals(region, out, with_tiling_ideal=args.with_tiling_ideal, cap=args.cap)
    print(f"ideal generators -> {out}")
    return {"out": str(out), "region": region_to_record(region)}


def _cmd_render(args) -> dict:
    region = _region_from_args(args)
    blocks = [render_floors(t) for t in _tilings_from_arg(args, region)]
    print("\n===\n".join(blocks), end="")
    return {"rendered": len(blocks), "region": region_to_record(region)}


# ---------------------------------------------------------------------------


def _add_region_flags(parser, with_height=True):
    parser.add_argument("--box", type=_parse_dims, help="box dims, e.g. 3,3,2")
    parser.add_argument("--disk", help="disk file (#/. grid or JSON record)")
    if with_height:
        parser.add_argument("--height", type=int, help="cylinder height over --disk")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dimers",
        description="domino tilings of boxes: exact counts, moves, twist",
    )
    parser.add_argument("--manifest", help="manifest path (default run_manifest.json)")
    parser.add_argument("--config", help="key=value config file; flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="exact tiling count")
    _add_region_flags(p)
    p.add_argument("--formula", action="store_true", help="2D product formula")

    p = sub.add_parser("enumerate", help="write every tiling to a JSONL file")
    _add_region_flags(p)
    p.add_argument("--cap", type=int, default=10_000_000)
    p.add_argument("--out")

    p = sub.add_parser("components", help="flip component census")
    _add_region_flags(p)
    p.add_argument("--cap", type=int, default=10_000_000)
    p.add_argument("--extended", action="store_true", help="disk-backed visited set")
    p.add_argument("--scratch", help="scratch dir for --extended")
    p.add_argument("--out", help="census CSV path")

    p = sub.add_parser("flipfree", help="tilings with no flips")
    _add_region_flags(p)
    p.add_argument("--cap", type=int, default=10_000_000)
    p.add_argument("--out")

    p = sub.add_parser("census", help="tiling count per twist value")
    _add_region_flags(p)
    p.add_argument("--cap", type=int, default=10_000_000)
    p.add_argument("--out", help="CSV path")

    p = sub.add_parser("twist", help="twist of tilings from a file")
    _add_region_flags(p)
    p.add_argument("--tiling", required=True, help="JSONL file or 'base'")

    p = sub.add_parser("pfaffian", help="Kasteleyn alternating-sum determinant")
    _add_region_flags(p)

    p = sub.add_parser("sample", help="MCMC sampling")
    _add_region_flags(p)
    p.add_argument("--moves", default="flips", choices=["flips", "flips+trits"])
    p.add_argument("--steps", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", dest="burn_in", type=int, default=0)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--workers", type=int, default=1, help="independent chains")
    p.add_argument("--histogram", help="write twist histogram CSV")
    p.add_argument("--svg", help="write static SVG bar plot")
    p.add_argument("--out")

    p = sub.add_parser("slab", help="slab tilings and the triple twist")
    slab_sub = p.add_subparsers(dest="slab_command", required=True)
    q = slab_sub.add_parser("census", help="slab flip components + triple twists")
    _add_region_flags(q)
    q.add_argument("--cap", type=int, default=1_000_000)
    q = slab_sub.add_parser("twist", help="triple twist of slab tilings from a file")
    q.add_argument("--tiling", required=True, help="slab JSONL file")
    q.add_argument("--box", type=_parse_dims)
    q.add_argument("--disk")

    p = sub.add_parser("ideals", help="export flip/tiling ideal generators")
    ideals_sub = p.add_subparsers(dest="ideals_command", required=True)
    q = ideals_sub.add_parser("export")
    _add_region_flags(q)
    q.add_argument("--out")
    q.add_argument("--with-tiling-ideal", action="store_true")
    q.add_argument("--cap", type=int, default=100_000)

    p = sub.add_parser("render", help="floor diagram of tilings")
    _add_region_flags(p)
    p.add_argument("--tiling", default="base", help="JSONL file or 'base'")

    return parser


_HANDLERS = {
    "count": _cmd_count,
    "enumerate": _cmd_enumerate,
    "components": _cmd_components,
    "flipfree": _cmd_flipfree,
    "census": _cmd_census,
    "twist": _cmd_twist,
    "pfaffian": _cmd_pfaffian,
    "sample": _cmd_sample,
    "slab": _cmd_slab,
    "ideals": _cmd_ideals,
    "render": _cmd_render,
}


def _apply_config(argv: list[str]) -> list[str]:
    """Prepend key=value pairs from --config as flags; explicit flags win
    because argparse takes the last occurrence."""
    if "--config" not in argv:
        return argv
    at = argv.index("--config")
    path = argv[at + 1]
    extra = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        extra.append(f"--{key.strip()}")
        if value.strip():
            extra.append(value.strip())
    head = argv[: at + 2]
    tail = argv[at + 2 :]
    if tail and not tail[0].startswith("-"):
        # insert config flags after the subcommand word
        return head + [tail[0]] + extra + tail[1:]
    return head + extra + tail


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config(argv)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.time()
    try:
        extra = _HANDLERS[args.command](args)
        _write_manifest(args, args.command, extra, started)
    except (CapExceeded, WidthGuardExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except CalibrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION
    except DimersError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
