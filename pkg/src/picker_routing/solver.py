"""Frontier-state dynamic programs for exact picker routing.

``solve_reduced`` sweeps the m-1 gaps between adjacent aisles left to right.
Choosing the horizontal edge counts of the next gap fixes every horizontal
edge incident to the current aisle, which makes that aisle's vertical edges
deterministic; the vertical enumeration stage of the classic algorithm
disappears and only max(m-1, 1) stages remain.

``solve_baseline`` is the classic alternation for comparison: one vertical
stage per subaisle layer enumerating the per-subaisle shapes, one horizontal
stage per gap (2m-1 stages for single-block layouts, 3m-1 for two-block).

Both operate on the same state algebra: degree-parity marks for the frontier
aisle's vertices plus the partition of those vertices into connected
components of the partial subgraph built so far.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .configs import (
    MARK_EVEN,
    MARK_ODD,
    MARK_ZERO,
    TAG_NONE,
    Resolution,
    Segment,
    VerticalConfig,
    combine_marks,
    mark_of,
    resolve_vertical,
    subaisle_options,
)
from .model import EdgeMultiset, Instance, Solution, aisle_points, tour_length
from .oracle import validate_tour_subgraph


@dataclass(frozen=True)
class FrontierState:
    """Degree parity and connectivity of the frontier aisle's vertices.

    ``marks`` is indexed bottom-to-top (cross-aisle 1 first).  ``partition``
    groups the nonzero-mark vertices into connected components of the partial
    subgraph; ``finished`` counts components that no longer touch the
    frontier, which is 1 exactly in the closed (completed-tour) state.
    """

    marks: tuple[str, ...]
    partition: tuple[tuple[int, ...], ...]
    finished: int

    @property
    def is_closed(self) -> bool:
        return self.finished == 1 and not self.partition

    def sort_key(self):
        return (self.marks, self.partition, self.finished)


def empty_state(n: int) -> FrontierState:
    return FrontierState((MARK_ZERO,) * n, (), 0)


def closed_state(n: int) -> FrontierState:
    return FrontierState((MARK_ZERO,) * n, (), 1)


GapChoice = tuple[int, ...]


def enumerate_gap_choices(n: int) -> list[GapChoice]:
    """All per-cross-aisle edge count vectors with an even total (cut parity)."""
    if n not in (2, 3):
        raise ValueError(f"gap enumeration supports n in {{2, 3}}, got {n}")
    return [
        combo
        for combo in itertools.product((0, 1, 2), repeat=n)
        if sum(combo) % 2 == 0
    ]


_MARK_COUNT = {MARK_ZERO: 0, MARK_ODD: 1, MARK_EVEN: 2}


def counts_from_marks(marks: Sequence[str]) -> tuple[int, ...]:
    """Canonical edge counts realizing the given parity marks."""
    return tuple(_MARK_COUNT[m] for m in marks)


class Successor(NamedTuple):
    state: FrontierState
    cost: int
    resolution: Resolution


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict = {}

    def add(self, x) -> None:
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> None:
        self.add(a)
        self.add(b)
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def classes(self) -> list[set]:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), set()).add(x)
        return list(out.values())


def _regroup(
    state: FrontierState,
    in_tour: set[int],
    links: Sequence[frozenset[int]],
    choice: GapChoice,
) -> tuple[tuple[tuple[int, ...], ...], int] | None:
    """Partition after adding one aisle's verticals and one gap's horizontals.

    Returns (frontier partition, finished component count), or None when the
    result strands a component that can never reconnect.
    """
    uf = _UnionFind()
    for j in in_tour:
        uf.add(("a", j))
    for j, count in enumerate(choice, start=1):
        if count > 0:
            uf.add(("f", j))
            uf.union(("a", j), ("f", j))
    for block in state.partition:
        for j in block[1:]:
            uf.union(("a", block[0]), ("a", j))
    for group in links:
        members = sorted(group)
        for j in members[1:]:
            uf.union(("a", members[0]), ("a", j))

    blocks = []
    newly_finished = 0
    for cls in uf.classes():
        frontier = tuple(sorted(j for kind, j in cls if kind == "f"))
        if frontier:
            blocks.append(frontier)
        else:
            newly_finished += 1
    finished = state.finished + newly_finished
    blocks.sort()
    if finished == 0:
        return tuple(blocks), 0
    if finished == 1 and not blocks:
        return (), 1
    return None


def transition(
    state: FrontierState,
    left_incidence: Sequence[int],
    choice: GapChoice,
    instance: Instance,
    aisle: int,
) -> list[Successor]:
    """Apply one gap choice at the given aisle and resolve its verticals.

    The frontier moves from this aisle to the next; the returned states carry
    the parity of the chosen gap counts alone.  Dead successors (a component
    stranded behind the frontier) are dropped.
    """
    lay = instance.layout
    n = lay.cross_aisles
    assert len(left_incidence) == n and len(choice) == n
    assert tuple(mark_of(c) for c in left_incidence) == state.marks, (
        "left incidence inconsistent with the frontier parity vector"
    )
    total = [left_incidence[j] + choice[j] for j in range(n)]
    points = aisle_points(instance, aisle)
    whole = (
        state == empty_state(n)
        and all(c == 0 for c in choice)
        and instance.all_in_aisle(aisle)
    )
    if all(t == 0 for t in total):
        has_required = any(p.kind != "vertex" for p in points)
        if has_required and not whole:
            return []

    successors = []
    for res in resolve_vertical(aisle, points, total, whole):
        in_tour = {j for j in range(1, n + 1) if total[j - 1] > 0}
        in_tour.update(res.touched_vertices())
        regrouped = _regroup(state, in_tour, res.links, choice)
        if regrouped is None:
            continue
        blocks, finished = regrouped
        succ = FrontierState(tuple(mark_of(c) for c in choice), blocks, finished)
        cost = res.cost + lay.aisle_pitch * sum(choice)
        successors.append(Successor(succ, cost, res))
    return successors


# ---------------------------------------------------------------------------
# Reduced (horizontal-only) dynamic program
# ---------------------------------------------------------------------------


def solve_reduced(instance: Instance) -> Solution:
    """Exact optimum via the gap-stage sweep with deterministic verticals."""
    lay = instance.layout
    m, n = lay.aisles, lay.cross_aisles
    if n not in (2, 3):
        raise ValueError(f"solver supports n in {{2, 3}}, got {n}")
    choices = enumerate_gap_choices(n)
    init = empty_state(n)
    entries: dict[FrontierState, tuple[int, tuple | None]] = {init: (0, None)}
    history: list[dict] = []
    expansions = 0

    for gap in range(1, m):
        nxt: dict[FrontierState, tuple[int, tuple]] = {}
        for state in sorted(entries, key=FrontierState.sort_key):
            base_cost = entries[state][0]
            left = counts_from_marks(state.marks)
            for choice in choices:
                expansions += 1
                for succ in transition(state, left, choice, instance, gap):
                    total = base_cost + succ.cost
                    cur = nxt.get(succ.state)
                    if cur is None or total < cur[0]:
                        nxt[succ.state] = (total, (state, choice, succ.resolution))
        assert nxt, "frontier died mid-sweep on a valid instance"
        history.append(entries)
        entries = nxt

    terminal = closed_state(n)
    accept_empty = not instance.picks
    zeros = (0,) * n
    best: tuple[int, FrontierState, Resolution] | None = None
    for state in sorted(entries, key=FrontierState.sort_key):
        base_cost = entries[state][0]
        left = counts_from_marks(state.marks)
        expansions += 1
        for succ in transition(state, left, zeros, instance, m):
            if succ.state == terminal or (accept_empty and succ.state == init):
                total = base_cost + succ.cost
                if best is None or total < best[0]:
                    best = (total, state, succ.resolution)
    assert best is not None, "no closing state found on a valid instance"

    cost, state, last_res = best
    per_aisle = {m: last_res}
    per_gap: dict[int, GapChoice] = {}
    stage_entries = entries
    for gap in range(m - 1, 0, -1):
        _, back = stage_entries[state]
        prev_state, choice, res = back
        per_gap[gap] = choice
        per_aisle[gap] = res
        state = prev_state
        stage_entries = history[gap - 1]

    return _assemble(
        instance,
        cost,
        {a: list(res.items) for a, res in per_aisle.items() if res.items},
        per_gap,
        {a: res.pieces for a, res in per_aisle.items()},
        stages=max(m - 1, 1),
        expansions=expansions,
    )


def _assemble(
    instance: Instance,
    cost: int,
    vertical_choices: dict[int, list],
    horizontal_choices: dict[int, GapChoice],
    pieces_per_aisle: dict[int, Sequence[tuple[int, int, int]]],
    stages: int,
    expansions: int,
) -> Solution:
    edges = EdgeMultiset()
    for aisle, pieces in pieces_per_aisle.items():
        for lo, hi, mult in pieces:
            edges.add_vertical_span(instance, aisle, lo, hi, mult)
    for gap, choice in horizontal_choices.items():
        for j, count in enumerate(choice, start=1):
            edges.add_horizontal(gap, j, count)
    assert tour_length(instance, edges) == cost, "edge assembly disagrees with DP cost"
    walk = extract_walk(instance, edges)
    return Solution(
        cost=cost,
        edges=edges,
        vertical_choices=vertical_choices,
        horizontal_choices=horizontal_choices,
        walk=walk,
        stages=stages,
        expansions=expansions,
    )


# ---------------------------------------------------------------------------
# Classic stage-alternating dynamic program
# ---------------------------------------------------------------------------


def solve_baseline(instance: Instance) -> Solution:
    """Classic alternation: per-subaisle vertical stages, then gap stages."""
    lay = instance.layout
    m, n, H = lay.aisles, lay.cross_aisles, lay.subaisle_height
    if n not in (2, 3):
        raise ValueError(f"solver supports n in {{2, 3}}, got {n}")
    choices = enumerate_gap_choices(n)
    init = empty_state(n)
    entries: dict[FrontierState, tuple[int, tuple | None]] = {init: (0, None)}
    history: list[dict] = []
    expansions = 0
    stages = 0

    for aisle in range(1, m + 1):
        positions = instance.pick_positions(aisle)
        for layer in range(1, n):
            lo, hi = (layer - 1) * H, layer * H
            items = tuple(p for p in positions if lo < p < hi)
            options = subaisle_options(
                aisle, layer, lo, hi, items, include_double_pass=(n == 3)
            )
            stages += 1
            nxt: dict[FrontierState, tuple[int, tuple]] = {}
            for state in sorted(entries, key=FrontierState.sort_key):
                base_cost = entries[state][0]
                for segment, config, pieces, ocost in options:
                    expansions += 1
                    succ = _apply_layer(state, layer, lo, hi, pieces)
                    if succ is None:
                        continue
                    total = base_cost + ocost
                    cur = nxt.get(succ)
                    if cur is None or total < cur[0]:
                        nxt[succ] = (
                            total,
                            (state, ("v", aisle, segment, config, pieces)),
                        )
            history.append(entries)
            entries = nxt
        if aisle < m:
            stages += 1
            nxt = {}
            for state in sorted(entries, key=FrontierState.sort_key):
                base_cost = entries[state][0]
                for choice in choices:
                    expansions += 1
                    succ = _apply_gap(instance, state, aisle, choice)
                    if succ is None:
                        continue
                    total = base_cost + lay.aisle_pitch * sum(choice)
                    cur = nxt.get(succ)
                    if cur is None or total < cur[0]:
                        nxt[succ] = (total, (state, ("h", aisle, choice)))
            assert nxt, "frontier died mid-sweep on a valid instance"
            history.append(entries)
            entries = nxt

    best: tuple[int, FrontierState] | None = None
    for state in sorted(entries, key=FrontierState.sort_key):
        if not _terminal_ok(instance, state):
            continue
        base_cost = entries[state][0]
        if best is None or base_cost < best[0]:
            best = (base_cost, state)
    assert best is not None, "no closing state found on a valid instance"

    cost, state = best
    vertical_choices: dict[int, list] = {}
    horizontal_choices: dict[int, GapChoice] = {}
    pieces_per_aisle: dict[int, list] = {}
    stage_entries = entries
    for stage_history in reversed(history):
        _, back = stage_entries[state]
        prev_state, action = back
        if action[0] == "v":
            _, aisle, segment, config, pieces = action
            vertical_choices.setdefault(aisle, []).insert(0, (segment, config))
            pieces_per_aisle.setdefault(aisle, []).extend(pieces)
        else:
            _, gap, choice = action
            horizontal_choices[gap] = choice
        state = prev_state
        stage_entries = stage_history

    vertical_choices = {
        a: [(s, c) for s, c in items if c.tag != TAG_NONE]
        for a, items in vertical_choices.items()
    }
    vertical_choices = {a: items for a, items in vertical_choices.items() if items}
    return _assemble(
        instance,
        cost,
        vertical_choices,
        horizontal_choices,
        pieces_per_aisle,
        stages=stages,
        expansions=expansions,
    )


def _apply_layer(
    state: FrontierState,
    layer: int,
    lo: int,
    hi: int,
    pieces: Sequence[tuple[int, int, int]],
) -> FrontierState | None:
    """Fold one subaisle's vertical pieces into the current-aisle state."""
    degree = {layer: 0, layer + 1: 0}
    links = []
    for plo, phi, mult in pieces:
        touch = set()
        if plo == lo:
            degree[layer] += mult
            touch.add(layer)
        if phi == hi:
            degree[layer + 1] += mult
            touch.add(layer + 1)
        assert touch, "subaisle piece anchored at neither endpoint"
        links.append(touch)

    marks = list(state.marks)
    marks[layer - 1] = combine_marks(marks[layer - 1], degree[layer])
    marks[layer] = combine_marks(marks[layer], degree[layer + 1])

    uf = _UnionFind()
    for j, mark in enumerate(marks, start=1):
        if mark != MARK_ZERO:
            uf.add(j)
    for block in state.partition:
        for j in block[1:]:
            uf.union(block[0], j)
    for touch in links:
        members = sorted(touch)
        for j in members[1:]:
            uf.union(members[0], j)
    blocks = tuple(sorted(tuple(sorted(cls)) for cls in uf.classes()))
    if state.finished and blocks:
        return None  # a finished component can never reconnect
    return FrontierState(tuple(marks), blocks, state.finished)


def _apply_gap(
    instance: Instance, state: FrontierState, aisle: int, choice: GapChoice
) -> FrontierState | None:
    """Close out the current aisle with a gap choice, moving the frontier."""
    n = instance.layout.cross_aisles
    for j in range(1, n + 1):
        odd_needed = state.marks[j - 1] == MARK_ODD
        if odd_needed != (choice[j - 1] % 2 == 1):
            return None  # final degree at this aisle's vertex would be odd
    if instance.picks and instance.depot.aisle == aisle:
        j = instance.depot.cross_aisle
        if state.marks[j - 1] == MARK_ZERO and choice[j - 1] == 0:
            return None  # depot vertex would be left out of the tour
    in_tour = {j for j in range(1, n + 1) if state.marks[j - 1] != MARK_ZERO}
    in_tour.update(j for j in range(1, n + 1) if choice[j - 1] > 0)
    regrouped = _regroup(state, in_tour, (), choice)
    if regrouped is None:
        return None
    blocks, finished = regrouped
    return FrontierState(tuple(mark_of(c) for c in choice), blocks, finished)


def _terminal_ok(instance: Instance, state: FrontierState) -> bool:
    m = instance.layout.aisles
    components = state.finished + len(state.partition)
    if components == 0:
        return not instance.picks  # the degenerate stay-at-depot tour
    if components != 1:
        return False
    if any(mark == MARK_ODD for mark in state.marks):
        return False
    if instance.depot.aisle == m:
        if state.marks[instance.depot.cross_aisle - 1] == MARK_ZERO:
            return False
    return True


# ---------------------------------------------------------------------------
# Transition table derivation and the published reference
# ---------------------------------------------------------------------------

TABLE_ROWS = ("UU1C", "E01C", "0E1C", "EE1C", "EE2C", "000C", "001C")
TABLE_COLUMNS = ("11", "20", "02", "22", "00")

_CHAR_TO_MARK = {"0": MARK_ZERO, "E": MARK_EVEN, "U": MARK_ODD}
_MARK_TO_CHAR = {v: k for k, v in _CHAR_TO_MARK.items()}


def state_label(state: FrontierState) -> str:
    """Single-block label: top mark, bottom mark, component count."""
    assert len(state.marks) == 2
    chars = _MARK_TO_CHAR[state.marks[1]] + _MARK_TO_CHAR[state.marks[0]]
    return f"{chars}{state.finished + len(state.partition)}C"


def state_from_label(label: str) -> FrontierState:
    marks = (_CHAR_TO_MARK[label[1]], _CHAR_TO_MARK[label[0]])
    components = int(label[2])
    nonzero = tuple(j for j in (1, 2) if marks[j - 1] != MARK_ZERO)
    if not nonzero:
        return FrontierState(marks, (), components)
    if components == 1:
        return FrontierState(marks, (nonzero,), 0)
    assert components == 2 and len(nonzero) == 2
    return FrontierState(marks, ((1,), (2,)), 0)


def gap_choice_label(choice: GapChoice) -> str:
    """Digits top cross-aisle first, matching the published table's columns."""
    return "".join(str(c) for c in reversed(choice))


def gap_choice_from_label(label: str) -> GapChoice:
    return tuple(int(c) for c in reversed(label))


@dataclass
class TransitionTable:
    """Single-block transitions: (state, pair) -> (next state, vertical tag)."""

    cells: dict[tuple[str, str], tuple[str, str] | None]

    def diff(self, other: "TransitionTable") -> list[tuple[str, str]]:
        return [
            (row, col)
            for row in TABLE_ROWS
            for col in TABLE_COLUMNS
            if self.cells[(row, col)] != other.cells[(row, col)]
        ]


def published_singleblock_table() -> TransitionTable:
    """The single-block transition table as tabulated in the prior literature.

    First-principles derivation disagrees at exactly one cell, (EE1C, 20):
    the tabulated EE1C target breaks the table's own top-bottom mirror
    symmetry (compare the 02 column), and the parity algebra yields E01C.
    """
    rows = {
        "UU1C": (("UU1C", "iv"), ("E01C", "i"), ("0E1C", "i"), ("EE1C", "i"), ("001C", "i")),
        "E01C": (("UU1C", "i"), ("E01C", "ii"), None, ("EE2C", "iv"), ("001C", "ii")),
        "0E1C": (("UU1C", "i"), None, ("0E1C", "iii"), ("EE2C", "iv"), ("001C", "iii")),
        "EE1C": (("UU1C", "i"), ("EE1C", "iv"), ("0E1C", "iv"), ("EE1C", "iv"), ("001C", "iv")),
        "EE2C": (("UU1C", "i"), None, None, ("EE2C", "iv"), None),
        "000C": (("UU1C", "i"), ("E01C", "ii"), ("0E1C", "iii"), ("EE2C", "iv"), ("001C", "iii")),
        "001C": (None, None, None, None, ("001C", "vi")),
    }
    cells = {
        (row, col): rows[row][idx]
        for row in TABLE_ROWS
        for idx, col in enumerate(TABLE_COLUMNS)
    }
    return TransitionTable(cells)


def derive_singleblock_table() -> TransitionTable:
    """Derive the n=2 transition table from the parity/connectivity algebra.

    Each state is instantiated against a generic item-bearing aisle (with a
    unique interior largest gap) and pushed through ``transition`` for all
    five gap pairs.  The all-empty start state with the 00 pair is derived on
    an aisle holding the whole instance, and the closed state on an empty
    aisle, matching the situations in which those rows can occur.
    """
    from .model import DepotLocation, Instance as _Instance, PickLocation, WarehouseLayout

    layout = WarehouseLayout(aisles=2, cross_aisles=2, aisle_pitch=1, subaisle_height=12)
    picks = [PickLocation(1, 1, 3), PickLocation(1, 1, 8)]
    generic = _Instance.build(layout, DepotLocation(2, 1), picks)
    isolated = _Instance.build(layout, DepotLocation(1, 1), picks)
    empty_aisle = _Instance.build(layout, DepotLocation(2, 1), [])

    cells: dict[tuple[str, str], tuple[str, str] | None] = {}
    for row in TABLE_ROWS:
        for col in TABLE_COLUMNS:
            if row == "001C":
                instance = empty_aisle
            elif row == "000C" and col == "00":
                instance = isolated
            else:
                instance = generic
            state = state_from_label(row)
            choice = gap_choice_from_label(col)
            left = counts_from_marks(state.marks)
            successors = transition(state, left, choice, instance, aisle=1)
            if not successors:
                cells[(row, col)] = None
                continue
            assert len(successors) == 1, "generic derivation must be unambiguous"
            succ = successors[0]
            real = [cfg for _, cfg in succ.resolution.items if cfg.tag != TAG_NONE]
            roman = real[0].roman if real else "vi"
            assert len(real) <= 1
            cells[(row, col)] = (state_label(succ.state), roman)
    return TransitionTable(cells)


# ---------------------------------------------------------------------------
# Euler walk extraction
# ---------------------------------------------------------------------------

Node = tuple[int, int]


def extract_walk(instance: Instance, edges: EdgeMultiset) -> list[Node]:
    """Closed depot-to-depot walk using each edge exactly its multiplicity.

    Hierholzer's algorithm on the multigraph; neighbor choice is
    smallest-first so the walk is deterministic.
    """
    verdict = validate_tour_subgraph(instance, edges)
    if not verdict:
        raise ValueError(f"not a tour subgraph: {verdict.violations}")
    depot_node = (instance.depot.aisle, instance.depot_pos)
    if edges.is_empty():
        return [depot_node]

    lay = instance.layout
    remaining: dict[Node, dict[Node, int]] = {}

    def link(u: Node, v: Node, mult: int) -> None:
        remaining.setdefault(u, {})[v] = remaining.get(u, {}).get(v, 0) + mult
        remaining.setdefault(v, {})[u] = remaining.get(v, {}).get(u, 0) + mult

    for (gap, j), mult in edges.horizontal.items():
        pos = lay.vertex_pos(j)
        link((gap, pos), (gap + 1, pos), mult)
    for (aisle, lo, hi), mult in edges.vertical.items():
        link((aisle, lo), (aisle, hi), mult)

    edge_count = sum(edges.horizontal.values()) + sum(edges.vertical.values())
    stack = [depot_node]
    circuit: list[Node] = []
    while stack:
        u = stack[-1]
        neighbors = remaining.get(u)
        nxt = None
        if neighbors:
            for v in sorted(neighbors):
                if neighbors[v] > 0:
                    nxt = v
                    break
        if nxt is None:
            circuit.append(stack.pop())
        else:
            remaining[u][nxt] -= 1
            remaining[nxt][u] -= 1
            if remaining[u][nxt] == 0:
                del remaining[u][nxt]
                if nxt != u:
                    del remaining[nxt][u]
            stack.append(nxt)
    circuit.reverse()
    assert len(circuit) == edge_count + 1, "walk must use every edge exactly once"
    assert circuit[0] == circuit[-1] == depot_node
    return circuit


def walk_edge_usage(instance: Instance, walk: Sequence[Node]) -> EdgeMultiset:
    """Edge multiset traversed by a walk, for cross-checking solutions."""
    lay = instance.layout
    used = EdgeMultiset()
    for (a1, p1), (a2, p2) in zip(walk, walk[1:]):
        if a1 == a2:
            lo, hi = min(p1, p2), max(p1, p2)
            key = (a1, lo, hi)
            used.vertical[key] = used.vertical.get(key, 0) + 1
        else:
            assert abs(a1 - a2) == 1 and p1 == p2, "walk step is not a warehouse edge"
            j = p1 // lay.subaisle_height + 1
            key = (min(a1, a2), j)
            used.horizontal[key] = used.horizontal.get(key, 0) + 1
    return used
