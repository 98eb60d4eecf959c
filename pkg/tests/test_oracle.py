"""Validator, metric-closure TSP oracle and exhaustive enumeration oracle."""

from __future__ import annotations

import random

import pytest

from picker_routing import (
    DepotLocation,
    EdgeMultiset,
    Instance,
    PickLocation,
    WarehouseLayout,
    brute_force_config_opt,
    generate_instance,
    held_karp_opt,
    mirror_instance,
    validate_tour_subgraph,
)


def _instance(m=1, n=2, H=10, picks=(), depot=(1, 1), W=1):
    return Instance.build(
        WarehouseLayout(m, n, W, H),
        DepotLocation(*depot),
        [PickLocation(*p) for p in picks],
    )


def test_validator_accepts_degenerate_depot_tour():
    verdict = validate_tour_subgraph(_instance(), EdgeMultiset())
    assert verdict.ok and verdict.violations == []


def test_validator_flags_odd_degrees_with_witnesses():
    inst = _instance(picks=[(1, 1, 4)])
    edges = EdgeMultiset()
    edges.add_vertical_span(inst, 1, 0, 4, 1)
    verdict = validate_tour_subgraph(inst, edges)
    assert not verdict.ok
    odd = [v for v in verdict.violations if "odd degree" in v]
    assert len(odd) == 2  # both endpoints of the single edge


def test_validator_flags_disconnection():
    inst = _instance(m=2, picks=[(1, 1, 4), (2, 1, 6)], depot=(1, 1))
    edges = EdgeMultiset()
    edges.add_vertical_span(inst, 1, 0, 4, 2)
    edges.add_vertical_span(inst, 2, 0, 6, 2)
    verdict = validate_tour_subgraph(inst, edges)
    assert not verdict.ok
    assert any("disconnected" in v for v in verdict.violations)


def test_validator_flags_unvisited_required_points():
    inst = _instance(picks=[(1, 1, 4), (1, 1, 7)])
    edges = EdgeMultiset()
    edges.add_vertical_span(inst, 1, 0, 4, 2)  # second pick and nothing else
    verdict = validate_tour_subgraph(inst, edges)
    assert not verdict.ok
    assert any("not visited" in v for v in verdict.violations)

    empty_with_picks = validate_tour_subgraph(inst, EdgeMultiset())
    assert not empty_with_picks.ok


def test_validator_flags_malformed_edges():
    inst = _instance()
    verdict = validate_tour_subgraph(inst, EdgeMultiset(horizontal={(1, 1): 1}))
    assert not verdict.ok  # m=1 has no gaps
    assert any("malformed" in v for v in verdict.violations)


def test_held_karp_out_and_back():
    inst = _instance(m=2, n=2, W=7, picks=[(2, 1, 6)], depot=(1, 1))
    # depot (1,0) to pick (2,6): shortest path 7 + 6
    assert held_karp_opt(inst) == 2 * 13


def test_held_karp_mirror_invariance():
    rng = random.Random(88)
    for _ in range(40):
        inst = generate_instance(3, 3, 4, 8, rng.randint(0, 6), rng.getrandbits(40))
        assert held_karp_opt(mirror_instance(inst)) == held_karp_opt(inst)


def test_held_karp_guard():
    inst = generate_instance(4, 2, 1, 20, 16, seed=1)
    with pytest.raises(ValueError, match="oracle limit"):
        held_karp_opt(inst)
    assert held_karp_opt(inst, limit=17) > 0


def test_held_karp_invariant_under_pick_relabeling():
    layout = WarehouseLayout(3, 2, 4, 9)
    picks = [PickLocation(1, 1, 2), PickLocation(2, 1, 8), PickLocation(3, 1, 5)]
    a = Instance.build(layout, DepotLocation(1, 1), picks)
    b = Instance.build(layout, DepotLocation(1, 1), list(reversed(picks)))
    assert a == b
    assert held_karp_opt(a) == held_karp_opt(b)


def test_brute_force_trivial_cases():
    cost, edges = brute_force_config_opt(_instance())
    assert cost == 0 and edges.is_empty()

    inst = _instance(picks=[(1, 1, 4), (1, 1, 9)])
    cost, edges = brute_force_config_opt(inst)
    assert cost == 18
    assert validate_tour_subgraph(inst, edges)


def test_brute_force_guard():
    inst = generate_instance(5, 3, 2, 6, 10, seed=3)
    with pytest.raises(ValueError, match="enumeration guard"):
        brute_force_config_opt(inst, limit=1000)


def test_cross_oracle_agreement():
    rng = random.Random(404)
    for _ in range(60):
        m = rng.randint(1, 3)
        H = rng.randint(2, 12)
        k = min(rng.randint(0, 6), m * (H - 1))
        inst = generate_instance(m, 2, rng.randint(1, 6), H, k, rng.getrandbits(44))
        bf_cost, bf_edges = brute_force_config_opt(inst)
        assert bf_cost == held_karp_opt(inst)
        assert validate_tour_subgraph(inst, bf_edges)


def test_cross_oracle_agreement_two_block():
    rng = random.Random(405)
    for _ in range(15):
        H = rng.randint(2, 8)
        m = rng.randint(1, 2)
        k = min(rng.randint(0, 4), 2 * m * (H - 1))
        inst = generate_instance(m, 3, rng.randint(1, 5), H, k, rng.getrandbits(44))
        bf_cost, _ = brute_force_config_opt(inst)
        assert bf_cost == held_karp_opt(inst)
