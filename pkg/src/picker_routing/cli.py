"""Command-line surface: instance generation, solving, comparison, rendering.

Every command is deterministic for fixed flags and seeds; wall-clock timings
are only emitted when explicitly requested so that default outputs stay
byte-identical across reruns.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .model import (
    Instance,
    InstanceError,
    generate_instance,
    parse_instance,
    parse_solution,
    serialize_instance,
    serialize_solution,
    tour_length,
)
from .oracle import brute_force_config_opt, held_karp_opt, validate_tour_subgraph
from .solver import (
    TABLE_COLUMNS,
    TABLE_ROWS,
    Solution,
    derive_singleblock_table,
    published_singleblock_table,
    solve_baseline,
    solve_reduced,
    walk_edge_usage,
)

SOLVER_MAX_CROSS_AISLES = 3
COMPARE_BRUTE_LIMIT = 200_000


def _parse_range(text: str, what: str) -> tuple[int, int]:
    try:
        lo, hi = (int(part) for part in text.split(":"))
    except ValueError as exc:
        raise InstanceError(f"{what} must look like LO:HI, got {text!r}") from exc
    if lo > hi:
        raise InstanceError(f"{what} has LO > HI: {text!r}")
    return lo, hi


def cmd_gen(args: argparse.Namespace) -> int:
    instance = generate_instance(args.m, args.n, args.W, args.H, args.k, args.seed)
    Path(args.out).write_text(serialize_instance(instance))
    if args.n > SOLVER_MAX_CROSS_AISLES:
        print(
            f"note: n={args.n} accepted by the model; solvers support n <= "
            f"{SOLVER_MAX_CROSS_AISLES}",
            file=sys.stderr,
        )
    print(f"wrote {args.out}")
    return 0


def _solve_with(instance: Instance, method: str) -> Solution:
    if method == "reduced":
        return solve_reduced(instance)
    if method == "baseline":
        return solve_baseline(instance)
    if method == "oracle":
        cost = held_karp_opt(instance)
        from .model import EdgeMultiset

        return Solution(cost, EdgeMultiset(), {}, {}, [], 0, 0)
    raise InstanceError(f"unknown method {method!r}")


def cmd_solve(args: argparse.Namespace) -> int:
    instance = parse_instance(Path(args.instance).read_text())
    solution = _solve_with(instance, args.method)
    out = args.out or str(Path(args.instance).with_suffix(".solution.json"))
    Path(out).write_text(serialize_solution(solution))
    print(
        f"cost={solution.cost} stages={solution.stages} "
        f"expansions={solution.expansions} method={args.method}"
    )
    return 0


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------


def _compare_single(spec: tuple) -> dict:
    index, m, n, W, H, k, seed, timings = spec
    instance = generate_instance(m, n, W, H, k, seed)
    record: dict = {
        "index": index,
        "digest": instance.digest(),
        "m": m,
        "n": n,
        "W": W,
        "H": H,
        "k": len(instance.picks),
        "seed": seed,
    }
    costs: dict = {}
    stages: dict = {}
    expansions: dict = {}
    clock: dict = {}
    failures: list[str] = []

    for name, solve in (("reduced", solve_reduced), ("baseline", solve_baseline)):
        start = time.perf_counter()
        solution = solve(instance)
        clock[name] = round((time.perf_counter() - start) * 1000, 3)
        costs[name] = solution.cost
        stages[name] = solution.stages
        expansions[name] = solution.expansions
        verdict = validate_tour_subgraph(instance, solution.edges)
        if not verdict:
            failures.append(f"{name}: {verdict.violations[:2]}")
        used = walk_edge_usage(instance, solution.walk)
        if not (
            used.horizontal == solution.edges.horizontal
            and used.vertical == solution.edges.vertical
        ):
            failures.append(f"{name}: walk does not match edges")

    if len(instance.picks) + 1 <= 15:
        start = time.perf_counter()
        costs["held_karp"] = held_karp_opt(instance)
        clock["held_karp"] = round((time.perf_counter() - start) * 1000, 3)
    else:
        costs["held_karp"] = None
    try:
        start = time.perf_counter()
        bf_cost, _ = brute_force_config_opt(instance, limit=COMPARE_BRUTE_LIMIT)
        clock["brute_force"] = round((time.perf_counter() - start) * 1000, 3)
        costs["brute_force"] = bf_cost
    except ValueError:
        costs["brute_force"] = None

    computed = [c for c in costs.values() if c is not None]
    record["costs"] = costs
    record["stages"] = stages
    record["expansions"] = expansions
    record["valid"] = not failures
    record["agree"] = len(set(computed)) == 1
    if failures:
        record["failures"] = failures
    if timings:
        record["ms"] = clock
    return record


def _print_golden_table() -> int:
    derived = derive_singleblock_table()
    published = published_singleblock_table()

    def fmt(cell) -> str:
        return "-" if cell is None else f"{cell[0]}({cell[1]})"

    header = "state  " + "  ".join(f"{col:>12}" for col in TABLE_COLUMNS)
    print("derived single-block transitions:")
    print(header)
    for row in TABLE_ROWS:
        cells = "  ".join(f"{fmt(derived.cells[(row, col)]):>12}" for col in TABLE_COLUMNS)
        print(f"{row:6} {cells}")
    diff = derived.diff(published)
    print(f"cells differing from the published table: {len(diff)}")
    for row, col in diff:
        print(
            f"  ({row}, {col}): derived {fmt(derived.cells[(row, col)])}, "
            f"published {fmt(published.cells[(row, col)])}"
        )
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    if args.golden_table:
        return _print_golden_table()

    import random

    m_lo, m_hi = _parse_range(args.m_range, "--m-range")
    k_lo, k_hi = _parse_range(args.k_range, "--k-range")
    w_lo, w_hi = _parse_range(args.W_range, "--W-range")
    h_lo, h_hi = _parse_range(args.H_range, "--H-range")
    n_set = [int(part) for part in args.n_set.split(",")]
    for n in n_set:
        if n > SOLVER_MAX_CROSS_AISLES:
            raise InstanceError(f"solvers support n <= {SOLVER_MAX_CROSS_AISLES}")

    rng = random.Random(args.seed)
    specs = []
    for index in range(args.count):
        m = rng.randint(m_lo, m_hi)
        n = rng.choice(n_set)
        W = rng.randint(w_lo, w_hi)
        H = rng.randint(max(h_lo, 2), h_hi)
        k = min(rng.randint(k_lo, k_hi), m * (n - 1) * (H - 1))
        specs.append((index, m, n, W, H, k, rng.getrandbits(48), args.timings))

    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            records = list(pool.map(_compare_single, specs, chunksize=8))
    else:
        records = [_compare_single(spec) for spec in specs]

    disagreements = 0
    validation_failures = 0
    for record in records:
        if not record["agree"]:
            disagreements += 1
        if not record["valid"]:
            validation_failures += 1
        print(json.dumps(record))
    summary = {
        "instances": len(records),
        "disagreements": disagreements,
        "validation_failures": validation_failures,
    }
    print(json.dumps(summary))
    return 0 if disagreements == 0 and validation_failures == 0 else 1


# ---------------------------------------------------------------------------
# render
# ---------------------------------------------------------------------------


def _render_svg(instance: Instance, cost: int, edges, walk) -> str:
    lay = instance.layout
    m, n = lay.aisles, lay.cross_aisles
    width_units = max((m - 1) * lay.aisle_pitch, 1)
    height_units = (n - 1) * lay.subaisle_height
    scale = max(3, min(60, 720 // max(width_units, height_units)))
    margin = 40

    def x(aisle: int) -> int:
        return margin + (aisle - 1) * lay.aisle_pitch * scale

    def y(pos: int) -> int:
        return margin + (height_units - pos) * scale

    width = margin * 2 + width_units * scale
    height = margin * 2 + height_units * scale
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for i in range(1, m + 1):
        parts.append(
            f'<line x1="{x(i)}" y1="{y(0)}" x2="{x(i)}" y2="{y(height_units)}" '
            'stroke="#cccccc" stroke-width="1"/>'
        )
    for j in range(1, n + 1):
        pos = lay.vertex_pos(j)
        parts.append(
            f'<line x1="{x(1)}" y1="{y(pos)}" x2="{x(m)}" y2="{y(pos)}" '
            'stroke="#cccccc" stroke-width="1"/>'
        )

    def stroke(x1: int, y1: int, x2: int, y2: int) -> None:
        parts.append(
            f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
            'stroke="black" stroke-width="2"/>'
        )

    for (aisle, lo, hi), mult in sorted(edges.vertical.items()):
        if mult == 1:
            stroke(x(aisle), y(lo), x(aisle), y(hi))
        else:
            for offset in (-3, 3):
                stroke(x(aisle) + offset, y(lo), x(aisle) + offset, y(hi))
    for (gap, j), mult in sorted(edges.horizontal.items()):
        pos = lay.vertex_pos(j)
        if mult == 1:
            stroke(x(gap), y(pos), x(gap + 1), y(pos))
        else:
            for offset in (-3, 3):
                stroke(x(gap), y(pos) + offset, x(gap + 1), y(pos) + offset)

    depot_x, depot_y = x(instance.depot.aisle), y(instance.depot_pos)
    parts.append(
        f'<rect x="{depot_x - 6}" y="{depot_y - 6}" width="12" height="12" '
        'fill="black"/>'
    )
    parts.append(
        f'<text x="{depot_x + 9}" y="{depot_y - 9}" font-size="12" '
        'font-family="monospace">depot</text>'
    )
    for idx, pick in enumerate(instance.picks, start=1):
        px, py = x(pick.aisle), y(pick.position(lay))
        parts.append(
            f'<circle cx="{px}" cy="{py}" r="5" fill="white" stroke="black" '
            'stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{px + 8}" y="{py + 4}" font-size="12" '
            f'font-family="monospace">p{idx}</text>'
        )
    parts.append(
        f'<text x="{margin}" y="{height - 12}" font-size="12" '
        f'font-family="monospace">cost={cost}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_render(args: argparse.Namespace) -> int:
    instance = parse_instance(Path(args.instance).read_text())
    cost, edges, walk, _, _ = parse_solution(Path(args.solution).read_text())
    if not edges.is_empty():
        try:
            length = tour_length(instance, edges)
        except InstanceError as exc:
            raise InstanceError(f"solution does not match instance: {exc}") from exc
        if length != cost:
            raise InstanceError(
                f"solution does not match instance: recorded cost {cost}, "
                f"edges measure {length}"
            )
    out = args.out or str(Path(args.solution).with_suffix(".svg"))
    Path(out).write_text(_render_svg(instance, cost, edges, walk))
    print(f"wrote {out}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="picker-routing",
        description="Exact picker-routing solvers for rectangular warehouses.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a random instance file")
    p_gen.add_argument("--m", type=int, required=True, help="aisle count")
    p_gen.add_argument("--n", type=int, required=True, help="cross-aisle count")
    p_gen.add_argument("--W", type=int, required=True, help="aisle pitch")
    p_gen.add_argument("--H", type=int, required=True, help="subaisle height")
    p_gen.add_argument("--k", type=int, required=True, help="pick count")
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_gen)

    p_solve = sub.add_parser("solve", help="solve an instance file")
    p_solve.add_argument("instance")
    p_solve.add_argument(
        "--method", choices=("reduced", "baseline", "oracle"), default="reduced"
    )
    p_solve.add_argument("--out", default=None)
    p_solve.set_defaults(func=cmd_solve)

    p_cmp = sub.add_parser("compare", help="cross-check solvers and oracles")
    p_cmp.add_argument("--count", type=int, default=100)
    p_cmp.add_argument("--seed", type=int, default=0)
    p_cmp.add_argument("--m-range", default="1:5")
    p_cmp.add_argument("--n-set", default="2,3")
    p_cmp.add_argument("--k-range", default="0:10")
    p_cmp.add_argument("--W-range", default="1:10")
    p_cmp.add_argument("--H-range", default="2:20")
    p_cmp.add_argument("--threads", type=int, default=1)
    p_cmp.add_argument("--timings", action="store_true")
    p_cmp.add_argument(
        "--golden-table",
        action="store_true",
        help="print the derived transition table and its diff from the published one",
    )
    p_cmp.set_defaults(func=cmd_compare)

    p_render = sub.add_parser("render", help="render an instance + solution to SVG")
    p_render.add_argument("instance")
    p_render.add_argument("solution")
    p_render.add_argument("--out", default=None)
    p_render.set_defaults(func=cmd_render)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
