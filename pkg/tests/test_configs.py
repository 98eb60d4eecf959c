"""Configuration shapes, segment merging and the vertical resolver."""

from __future__ import annotations

import itertools
import random

import pytest

from picker_routing import (
    DepotLocation,
    Instance,
    PickLocation,
    Segment,
    VerticalConfig,
    WarehouseLayout,
    aisle_points,
    config_edges,
    merge_segments,
    resolve_vertical,
)
from picker_routing.configs import (
    TAG_BOTTOM,
    TAG_DOUBLE_PASS,
    TAG_LARGEST_GAP,
    TAG_NONE,
    TAG_TOP,
    TAG_TRAVERSAL,
)


def _segment(lo, hi, required, aisle=1, j_lo=1, j_hi=2):
    return Segment(aisle, j_lo, j_hi, lo, hi, tuple(sorted(required)))


def test_config_edges_shapes_and_costs():
    seg = _segment(0, 10, [3, 7])
    pieces, cost = config_edges(VerticalConfig(TAG_TRAVERSAL), seg)
    assert (pieces, cost) == ([(0, 10, 1)], 10)

    pieces, cost = config_edges(VerticalConfig(TAG_LARGEST_GAP), seg)
    assert cost == 12  # gaps (3, 4, 3): doubles everywhere except [3, 7]
    assert pieces == [(0, 3, 2), (7, 10, 2)]

    pieces, cost = config_edges(VerticalConfig(TAG_BOTTOM), seg)
    assert cost == 14
    assert pieces == [(0, 7, 2)]  # top endpoint untouched

    pieces, cost = config_edges(VerticalConfig(TAG_TOP), seg)
    assert (pieces, cost) == ([(3, 10, 2)], 14)

    pieces, cost = config_edges(VerticalConfig(TAG_DOUBLE_PASS), seg)
    assert (pieces, cost) == ([(0, 10, 2)], 20)

    pieces, cost = config_edges(VerticalConfig(TAG_NONE), _segment(0, 10, []))
    assert (pieces, cost) == ([], 0)


def test_config_edges_rejects_none_on_required():
    with pytest.raises(ValueError, match="empty configuration"):
        config_edges(VerticalConfig(TAG_NONE), _segment(0, 10, [4]))


def test_config_edges_largest_gap_degenerates_at_endpoints():
    seg = _segment(0, 10, [7, 8])  # largest gap is the bottom one
    pieces, cost = config_edges(VerticalConfig(TAG_LARGEST_GAP), seg)
    assert pieces == [(7, 10, 2)]  # same shape as the top configuration
    assert cost == 6


def _instance(m=1, n=2, H=10, picks=(), depot=(1, 1), W=1):
    return Instance.build(
        WarehouseLayout(m, n, W, H),
        DepotLocation(*depot),
        [PickLocation(*p) for p in picks],
    )


def test_merge_segments_single_block_is_whole_aisle():
    inst = _instance(picks=[(1, 1, 4)])
    points = aisle_points(inst, 1)
    segs = merge_segments(1, points, [2, 2])
    assert [(s.j_lo, s.j_hi) for s in segs] == [(1, 2)]
    assert segs[0].required == (4,)


def test_merge_segments_two_block():
    inst = _instance(n=3, picks=[(1, 1, 4), (1, 2, 6)])
    points = aisle_points(inst, 1)
    merged = merge_segments(1, points, [2, 0, 2])
    assert [(s.j_lo, s.j_hi) for s in merged] == [(1, 3)]
    assert merged[0].required == (4, 16)

    split = merge_segments(1, points, [2, 2, 2])
    assert [(s.j_lo, s.j_hi) for s in split] == [(1, 2), (2, 3)]
    assert split[0].required == (4,)
    assert split[1].required == (16,)


def test_resolver_traversal_on_odd_pair():
    inst = _instance(picks=[(1, 1, 3), (1, 1, 7)], depot=(1, 1))
    points = aisle_points(inst, 1)
    (res,) = resolve_vertical(1, points, [1, 1], whole_instance=False)
    assert [cfg.tag for _, cfg in res.items] == [TAG_TRAVERSAL]
    assert res.cost == 10
    assert res.links == (frozenset({1, 2}),)


def test_resolver_one_sided_incidence_reaches_past_all_picks():
    inst = _instance(picks=[(1, 1, 3), (1, 1, 7)], depot=(1, 1))
    points = aisle_points(inst, 1)
    # only the top vertex carries horizontal edges; depot at the bottom
    # vertex must also be reached, so the doubles run the whole aisle
    (res,) = resolve_vertical(1, points, [0, 2], whole_instance=False)
    assert [cfg.tag for _, cfg in res.items] == [TAG_TOP]
    assert res.cost == 20

    # with the depot elsewhere the doubles stop at the lowest pick
    inst2 = _instance(m=2, picks=[(1, 1, 3), (1, 1, 7)], depot=(2, 1))
    points2 = aisle_points(inst2, 1)
    (res2,) = resolve_vertical(1, points2, [0, 2], whole_instance=False)
    assert [cfg.tag for _, cfg in res2.items] == [TAG_TOP]
    assert res2.cost == 2 * (10 - 3)
    (res3,) = resolve_vertical(1, points2, [2, 0], whole_instance=False)
    assert [cfg.tag for _, cfg in res3.items] == [TAG_BOTTOM]
    assert res3.cost == 2 * 7


def test_resolver_both_even_uses_largest_gap():
    inst = _instance(m=2, picks=[(1, 1, 3), (1, 1, 7)], depot=(2, 1))
    points = aisle_points(inst, 1)
    (res,) = resolve_vertical(1, points, [2, 2], whole_instance=False)
    assert [cfg.tag for _, cfg in res.items] == [TAG_LARGEST_GAP]
    assert res.cost == 12
    assert res.pieces == ((0, 3, 2), (7, 10, 2))


def test_resolver_pairs_odd_vertices_across_interior_zero():
    inst = _instance(n=3, m=2, picks=[(1, 1, 4)], depot=(2, 1))
    points = aisle_points(inst, 1)
    (res,) = resolve_vertical(1, points, [1, 0, 1], whole_instance=False)
    assert [cfg.tag for _, cfg in res.items] == [TAG_TRAVERSAL]
    segment = res.items[0][0]
    assert (segment.j_lo, segment.j_hi) == (1, 3)
    assert res.links == (frozenset({1, 2, 3}),)  # middle vertex gains degree 2


def test_resolver_isolated_aisle_doubles_to_farthest():
    inst = _instance(picks=[(1, 1, 4), (1, 1, 9)], depot=(1, 1))
    points = aisle_points(inst, 1)
    (res,) = resolve_vertical(1, points, [0, 0], whole_instance=True)
    assert [cfg.tag for _, cfg in res.items] == [TAG_BOTTOM]
    assert res.cost == 18
    assert res.pieces == ((0, 9, 2),)


def test_resolver_isolated_aisle_middle_depot_reaches_both_sides():
    inst = _instance(n=3, picks=[(1, 1, 4), (1, 2, 7)], depot=(1, 2))
    points = aisle_points(inst, 1)
    (res,) = resolve_vertical(1, points, [0, 0, 0], whole_instance=True)
    assert [cfg.tag for _, cfg in res.items] == [TAG_TOP, TAG_BOTTOM]
    assert res.cost == 2 * (10 - 4) + 2 * (17 - 10)
    # both reaches stop at their farthest pick and share only the depot vertex
    assert res.links == (frozenset({2}),)


def test_resolver_rejects_unconnectable_required_points():
    inst = _instance(m=2, picks=[(1, 1, 4)], depot=(2, 1))
    points = aisle_points(inst, 1)
    with pytest.raises(ValueError, match="no horizontal edges"):
        resolve_vertical(1, points, [0, 0], whole_instance=False)


def test_resolver_empty_aisle_yields_empty_resolution():
    inst = _instance(m=2, picks=[(2, 1, 4)], depot=(2, 1))
    points = aisle_points(inst, 1)
    (res,) = resolve_vertical(1, points, [0, 0], whole_instance=False)
    assert res.items == () and res.cost == 0


def test_resolver_returns_all_attachment_distinct_ties():
    inst = _instance(m=2, H=9, picks=[(1, 1, 3), (1, 1, 6)], depot=(2, 1))
    points = aisle_points(inst, 1)
    resolutions = resolve_vertical(1, points, [2, 2], whole_instance=False)
    assert len(resolutions) == 3  # gaps (3, 3, 3) all tie
    assert len({res.cost for res in resolutions}) == 1
    attachments = {res.links for res in resolutions}
    assert len(attachments) == 3


def test_resolver_never_emits_double_pass():
    rng = random.Random(31)
    for _ in range(300):
        n = rng.choice([2, 3])
        H = rng.randint(2, 9)
        inst, incidence, whole = _random_resolver_input(rng, n, H)
        if inst is None:
            continue
        for res in resolve_vertical(1, aisle_points(inst, 1), incidence, whole):
            assert all(cfg.tag != TAG_DOUBLE_PASS for _, cfg in res.items)


def _vertical_degree(pieces, pos):
    degree = 0
    for lo, hi, mult in pieces:
        if pos in (lo, hi):
            degree += mult
        elif lo < pos < hi:
            degree += 2 * mult
    return degree


def _random_resolver_input(rng, n, H, m=2):
    """A consistent (instance, incidence, whole) triple, or (None, ..) to skip."""
    depot_here = rng.random() < 0.5
    depot = (1, rng.randint(1, n)) if depot_here else (2, 1)
    picks = []
    for layer in range(1, n):
        for _ in range(rng.randint(0, 3)):
            picks.append((1, layer, rng.randint(1, H - 1)))
    inst = _instance(m=m, n=n, H=H, picks=picks, depot=depot)
    counts = [rng.choice([0, 0, 1, 2, 3, 4]) for _ in range(n)]
    if sum(c % 2 for c in counts) % 2 == 1:
        counts[rng.randrange(n)] += 1
    if all(c == 0 for c in counts):
        if depot_here:
            return inst, counts, True
        return (None, None, None) if (picks or depot_here) else (inst, counts, False)
    return inst, counts, False


def test_resolver_parity_and_coverage_properties():
    rng = random.Random(97)
    for _ in range(500):
        n = rng.choice([2, 3])
        H = rng.randint(2, 12)
        inst, incidence, whole = _random_resolver_input(rng, n, H)
        if inst is None:
            continue
        points = aisle_points(inst, 1)
        vpos = [p.pos for p in points if p.kind != "pick"]
        required = {p.pos for p in points if p.kind == "pick"}
        depot = next((p for p in points if p.kind == "depot"), None)
        empty_tour = not inst.picks and all(c == 0 for c in incidence)
        if depot is not None and incidence[depot.cross_aisle - 1] == 0 and not empty_tour:
            required.add(depot.pos)
        for res in resolve_vertical(1, points, incidence, whole):
            for j, pos in enumerate(vpos, start=1):
                total = incidence[j - 1] + _vertical_degree(res.pieces, pos)
                assert total % 2 == 0, (incidence, res.pieces, j)
            for r in required:
                assert _vertical_degree(res.pieces, r) > 0, (incidence, r, res.pieces)


# ---------------------------------------------------------------------------
# Minimality against an independent exhaustive enumeration
# ---------------------------------------------------------------------------


def _layer_shapes(lo, hi, items):
    """Hand-rolled shape family for the enumeration oracle (no package code)."""
    shapes = [[]]
    shapes.append([(lo, hi, 1)])
    shapes.append([(lo, hi, 2)])
    bounds = [lo, *sorted(items), hi]
    for t in range(len(bounds) - 1):
        spans = []
        if bounds[t] > lo:
            spans.append((lo, bounds[t], 2))
        if bounds[t + 1] < hi:
            spans.append((bounds[t + 1], hi, 2))
        shapes.append(spans)
    unique = []
    for spans in shapes:
        if spans not in unique:
            unique.append(spans)
    return unique


def _enumeration_min_cost(n, H, incidence, layer_items, depot_j, whole):
    """Cheapest per-subaisle assignment meeting parity, coverage, attachment."""
    vpos = [j * H for j in range(n)]
    per_layer = [
        _layer_shapes(vpos[layer - 1], vpos[layer], layer_items[layer - 1])
        for layer in range(1, n)
    ]
    best = None
    for assignment in itertools.product(*per_layer):
        pieces = [span for spans in assignment for span in spans]
        ok = True
        for j, pos in enumerate(vpos, start=1):
            if (incidence[j - 1] + _vertical_degree(pieces, pos)) % 2 == 1:
                ok = False
                break
        if not ok:
            continue
        for layer in range(1, n):
            for item in layer_items[layer - 1]:
                if _vertical_degree(pieces, item) == 0:
                    ok = False
        if not ok:
            continue
        if depot_j is not None and incidence[depot_j - 1] == 0:
            if _vertical_degree(pieces, vpos[depot_j - 1]) == 0:
                ok = False
        if not ok:
            continue
        units = _units(pieces)
        if any(incidence):
            anchored = {pos for j, pos in enumerate(vpos, 1) if incidence[j - 1] > 0}
            for unit in units:
                if not (unit & anchored):
                    ok = False
                    break
        elif pieces:
            # nothing anchors the aisle: only a single all-containing unit
            # around the depot can stand alone (the one-aisle instance)
            if not whole or len(units) > 1:
                ok = False
            elif depot_j is not None and vpos[depot_j - 1] not in units[0]:
                ok = False
        if not ok:
            continue
        cost = sum((hi - lo) * mult for lo, hi, mult in pieces)
        if best is None or cost < best:
            best = cost
    return best


def _units(pieces):
    groups = []
    for lo, hi, _ in pieces:
        touch = {lo, hi}
        merged = [g for g in groups if g & touch]
        for g in merged:
            touch |= g
            groups.remove(g)
        groups.append(touch)
    return groups


def test_resolver_cost_matches_exhaustive_enumeration():
    rng = random.Random(555)
    checked = 0
    trials = 0
    while checked < 1000 and trials < 4000:
        trials += 1
        n = rng.choice([2, 3])
        H = rng.randint(2, 8)
        inst, incidence, whole = _random_resolver_input(rng, n, H)
        if inst is None:
            continue
        if all(c == 0 for c in incidence) and whole and not inst.picks:
            continue  # the trivial empty aisle: nothing to compare
        points = aisle_points(inst, 1)
        resolutions = resolve_vertical(1, points, incidence, whole)
        layer_items = [
            tuple(p for p in inst.pick_positions(1) if (layer - 1) * H < p < layer * H)
            for layer in range(1, n)
        ]
        depot = next((p for p in points if p.kind == "depot"), None)
        expected = _enumeration_min_cost(
            n, H, incidence, layer_items,
            depot.cross_aisle if depot is not None else None, whole,
        )
        assert expected is not None, (incidence, layer_items)
        assert resolutions[0].cost == expected, (
            n, H, incidence, layer_items, resolutions[0], expected,
        )
        checked += 1
    assert checked == 1000


def test_resolver_mirror_symmetry():
    rng = random.Random(808)
    for _ in range(300):
        n = rng.choice([2, 3])
        H = rng.randint(2, 10)
        inst, incidence, whole = _random_resolver_input(rng, n, H)
        if inst is None:
            continue
        from picker_routing import mirror_instance

        flipped = mirror_instance(inst)
        fwd = resolve_vertical(1, aisle_points(inst, 1), incidence, whole)
        back = resolve_vertical(
            1, aisle_points(flipped, 1), list(reversed(incidence)), whole
        )
        assert {r.cost for r in fwd} == {r.cost for r in back}
        top = (n - 1) * H
        fwd_pieces = {
            tuple(sorted((top - hi, top - lo, m) for lo, hi, m in r.pieces))
            for r in fwd
        }
        back_pieces = {tuple(sorted(r.pieces)) for r in back}
        assert fwd_pieces == back_pieces
