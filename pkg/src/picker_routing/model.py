"""Warehouse geometry, instances, edge multisets and cost evaluation.

A rectangular warehouse has ``m`` vertical aisles and ``n`` horizontal
cross-aisles with uniform spacing: adjacent aisles are ``aisle_pitch``
apart along any cross-aisle, adjacent cross-aisles are ``subaisle_height``
apart along any aisle.  Cross-aisle ``j = 1`` is the bottom one; the vertex
where aisle ``i`` meets cross-aisle ``j`` sits at absolute vertical
position ``(j - 1) * subaisle_height``.

All distances are integers and all arithmetic is exact, so solver/oracle
comparisons use equality rather than tolerances.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple


class InstanceError(ValueError):
    """Raised for malformed or out-of-range instance data."""


@dataclass(frozen=True)
class WarehouseLayout:
    """Rectangular grid: m aisles x n cross-aisles, uniform integer spacing."""

    aisles: int
    cross_aisles: int
    aisle_pitch: int
    subaisle_height: int

    def __post_init__(self) -> None:
        if self.aisles < 1:
            raise InstanceError(f"aisle count must be >= 1, got {self.aisles}")
        if self.cross_aisles < 2:
            raise InstanceError(
                f"cross-aisle count must be >= 2, got {self.cross_aisles}"
            )
        if self.aisle_pitch < 1:
            raise InstanceError(f"aisle pitch must be >= 1, got {self.aisle_pitch}")
        if self.subaisle_height < 1:
            raise InstanceError(
                f"subaisle height must be >= 1, got {self.subaisle_height}"
            )

    def vertex_pos(self, cross_aisle: int) -> int:
        """Absolute vertical position of any vertex on the given cross-aisle."""
        return (cross_aisle - 1) * self.subaisle_height

    @property
    def top_pos(self) -> int:
        return self.vertex_pos(self.cross_aisles)


@dataclass(frozen=True, order=True)
class PickLocation:
    """A pick strictly inside a subaisle: 0 < offset < subaisle height."""

    aisle: int
    subaisle: int
    offset: int

    def position(self, layout: WarehouseLayout) -> int:
        return (self.subaisle - 1) * layout.subaisle_height + self.offset


@dataclass(frozen=True)
class DepotLocation:
    """The depot sits on a cross-aisle vertex."""

    aisle: int
    cross_aisle: int

    def position(self, layout: WarehouseLayout) -> int:
        return layout.vertex_pos(self.cross_aisle)


class AislePoint(NamedTuple):
    """One point of an aisle's bottom-to-top discretization."""

    pos: int
    kind: str  # "vertex" | "pick" | "depot"
    cross_aisle: int | None


@dataclass(frozen=True)
class Instance:
    """A validated, canonically ordered routing instance."""

    layout: WarehouseLayout
    depot: DepotLocation
    picks: tuple[PickLocation, ...]

    def __post_init__(self) -> None:
        lay = self.layout
        if not (1 <= self.depot.aisle <= lay.aisles):
            raise InstanceError(f"depot aisle {self.depot.aisle} out of range")
        if not (1 <= self.depot.cross_aisle <= lay.cross_aisles):
            raise InstanceError(
                f"depot cross-aisle {self.depot.cross_aisle} out of range"
            )
        for p in self.picks:
            if not (1 <= p.aisle <= lay.aisles):
                raise InstanceError(f"pick aisle {p.aisle} out of range")
            if not (1 <= p.subaisle <= lay.cross_aisles - 1):
                raise InstanceError(f"pick subaisle {p.subaisle} out of range")
            if p.offset <= 0 or p.offset >= lay.subaisle_height:
                raise InstanceError(
                    "pick on cross-aisle vertex: offset "
                    f"{p.offset} not strictly inside (0, {lay.subaisle_height})"
                )
        canon = tuple(sorted(set(self.picks)))
        if canon != self.picks:
            raise InstanceError("picks must be sorted and duplicate-free")

    @staticmethod
    def build(
        layout: WarehouseLayout, depot: DepotLocation, picks: Iterable[PickLocation]
    ) -> "Instance":
        """Construct with canonical ordering; duplicate picks are dropped."""
        return Instance(layout, depot, tuple(sorted(set(picks))))

    def pick_positions(self, aisle: int) -> tuple[int, ...]:
        """Sorted absolute positions of the picks in one aisle."""
        return tuple(
            sorted(p.position(self.layout) for p in self.picks if p.aisle == aisle)
        )

    @property
    def depot_pos(self) -> int:
        return self.depot.position(self.layout)

    def required_in_aisle(self, aisle: int) -> tuple[int, ...]:
        """Pick positions plus the depot position when the depot is here."""
        req = list(self.pick_positions(aisle))
        if self.depot.aisle == aisle:
            req.append(self.depot_pos)
        return tuple(sorted(set(req)))

    def all_in_aisle(self, aisle: int) -> bool:
        """True when the depot and every pick sit in the given aisle."""
        return self.depot.aisle == aisle and all(p.aisle == aisle for p in self.picks)

    def digest(self) -> str:
        return hashlib.sha256(serialize_instance(self).encode()).hexdigest()[:16]


def aisle_points(instance: Instance, aisle: int) -> list[AislePoint]:
    """Bottom-to-top discretization of one aisle.

    Contains the n cross-aisle vertices plus this aisle's pick offsets; the
    depot's vertex is re-kinded "depot" so required points are visible.
    """
    lay = instance.layout
    if not (1 <= aisle <= lay.aisles):
        raise InstanceError(f"aisle {aisle} out of range")
    points: dict[int, AislePoint] = {}
    for j in range(1, lay.cross_aisles + 1):
        kind = (
            "depot"
            if (instance.depot.aisle == aisle and instance.depot.cross_aisle == j)
            else "vertex"
        )
        points[lay.vertex_pos(j)] = AislePoint(lay.vertex_pos(j), kind, j)
    for pos in instance.pick_positions(aisle):
        points[pos] = AislePoint(pos, "pick", None)
    return [points[pos] for pos in sorted(points)]


@dataclass
class EdgeMultiset:
    """Multiplicity map over primitive warehouse segments.

    ``horizontal`` keys are (gap g, cross_aisle j): the cross-aisle segment
    between aisles g and g+1, length = aisle pitch.  ``vertical`` keys are
    (aisle, lo_pos, hi_pos) over *adjacent* aisle points, length = hi - lo.
    Zero multiplicities are never stored.
    """

    horizontal: dict[tuple[int, int], int] = field(default_factory=dict)
    vertical: dict[tuple[int, int, int], int] = field(default_factory=dict)

    def add_horizontal(self, gap: int, cross_aisle: int, mult: int = 1) -> None:
        if mult == 0:
            return
        key = (gap, cross_aisle)
        self.horizontal[key] = self.horizontal.get(key, 0) + mult

    def add_vertical_span(
        self, instance: Instance, aisle: int, lo: int, hi: int, mult: int = 1
    ) -> None:
        """Add a vertical span, split into primitive segments at aisle points."""
        if mult == 0 or lo == hi:
            return
        pts = [p.pos for p in aisle_points(instance, aisle) if lo <= p.pos <= hi]
        if pts[0] != lo or pts[-1] != hi:
            raise InstanceError(
                f"span [{lo}, {hi}] does not end on aisle points of aisle {aisle}"
            )
        for a, b in zip(pts, pts[1:]):
            key = (aisle, a, b)
            self.vertical[key] = self.vertical.get(key, 0) + mult

    def copy(self) -> "EdgeMultiset":
        return EdgeMultiset(dict(self.horizontal), dict(self.vertical))

    def is_empty(self) -> bool:
        return not self.horizontal and not self.vertical

    def scaled(self, factor: int) -> "EdgeMultiset":
        return EdgeMultiset(
            dict(self.horizontal),
            {(a, lo * factor, hi * factor): k for (a, lo, hi), k in self.vertical.items()},
        )


def tour_length(instance: Instance, edges: EdgeMultiset) -> int:
    """Sum of multiplicity x segment length over the multiset."""
    lay = instance.layout
    total = 0
    for (gap, j), mult in edges.horizontal.items():
        if not (1 <= gap <= lay.aisles - 1 and 1 <= j <= lay.cross_aisles):
            raise InstanceError(f"horizontal edge ({gap}, {j}) out of range")
        if mult < 0:
            raise InstanceError("negative multiplicity")
        total += mult * lay.aisle_pitch
    points_cache: dict[int, list[int]] = {}
    for (aisle, lo, hi), mult in edges.vertical.items():
        if aisle not in points_cache:
            points_cache[aisle] = [p.pos for p in aisle_points(instance, aisle)]
        pts = points_cache[aisle]
        if lo not in pts or hi not in pts:
            raise InstanceError(
                f"vertical edge ({aisle}, {lo}, {hi}) refers to a nonexistent aisle point"
            )
        if pts.index(hi) != pts.index(lo) + 1:
            raise InstanceError(
                f"vertical edge ({aisle}, {lo}, {hi}) is not a primitive segment"
            )
        if mult < 0:
            raise InstanceError("negative multiplicity")
        total += mult * (hi - lo)
    return total


@dataclass
class Solution:
    """Solver output: cost, tour subgraph, per-stage choices and the walk."""

    cost: int
    edges: EdgeMultiset
    vertical_choices: dict[int, list]  # aisle -> [(Segment, VerticalConfig), ...]
    horizontal_choices: dict[int, tuple[int, ...]]  # gap -> per-cross-aisle counts
    walk: list[tuple[int, int]]  # [(aisle, pos), ...], closed depot-to-depot
    stages: int
    expansions: int


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise InstanceError(message)


def _as_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceError(f"{what} must be an integer, got {value!r}")
    return value


def parse_instance(text: str) -> Instance:
    """Parse the JSON instance format; validates and canonicalizes."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed instance file: {exc}") from exc
    _require(isinstance(raw, dict), "instance file must hold a JSON object")
    for key in ("m", "n", "W", "H", "depot", "picks"):
        _require(key in raw, f"missing field {key!r}")
    layout = WarehouseLayout(
        aisles=_as_int(raw["m"], "m"),
        cross_aisles=_as_int(raw["n"], "n"),
        aisle_pitch=_as_int(raw["W"], "W"),
        subaisle_height=_as_int(raw["H"], "H"),
    )
    dep = raw["depot"]
    _require(isinstance(dep, dict), "depot must be an object")
    depot = DepotLocation(
        aisle=_as_int(dep.get("aisle"), "depot.aisle"),
        cross_aisle=_as_int(dep.get("cross_aisle"), "depot.cross_aisle"),
    )
    _require(isinstance(raw["picks"], list), "picks must be a list")
    picks = []
    for entry in raw["picks"]:
        _require(isinstance(entry, dict), "each pick must be an object")
        picks.append(
            PickLocation(
                aisle=_as_int(entry.get("aisle"), "pick.aisle"),
                subaisle=_as_int(entry.get("subaisle"), "pick.subaisle"),
                offset=_as_int(entry.get("offset"), "pick.offset"),
            )
        )
    return Instance.build(layout, depot, picks)


def serialize_instance(instance: Instance) -> str:
    lay = instance.layout
    doc = {
        "m": lay.aisles,
        "n": lay.cross_aisles,
        "W": lay.aisle_pitch,
        "H": lay.subaisle_height,
        "depot": {
            "aisle": instance.depot.aisle,
            "cross_aisle": instance.depot.cross_aisle,
        },
        "picks": [
            {"aisle": p.aisle, "subaisle": p.subaisle, "offset": p.offset}
            for p in instance.picks
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def serialize_solution(solution: Solution) -> str:
    doc = {
        "cost": solution.cost,
        "horizontal": [
            [g, j, mult] for (g, j), mult in sorted(solution.edges.horizontal.items())
        ],
        "vertical": [
            [a, lo, hi, mult]
            for (a, lo, hi), mult in sorted(solution.edges.vertical.items())
        ],
        "walk": [[a, pos] for a, pos in solution.walk],
        "stages": solution.stages,
        "expansions": solution.expansions,
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_solution(text: str) -> tuple[int, EdgeMultiset, list[tuple[int, int]], int, int]:
    """Parse a solution file back into (cost, edges, walk, stages, expansions)."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed solution file: {exc}") from exc
    _require(isinstance(raw, dict), "solution file must hold a JSON object")
    for key in ("cost", "horizontal", "vertical", "walk", "stages", "expansions"):
        _require(key in raw, f"missing field {key!r}")
    edges = EdgeMultiset()
    for g, j, mult in raw["horizontal"]:
        edges.horizontal[(g, j)] = mult
    for a, lo, hi, mult in raw["vertical"]:
        edges.vertical[(a, lo, hi)] = mult
    walk = [(a, pos) for a, pos in raw["walk"]]
    return raw["cost"], edges, walk, raw["stages"], raw["expansions"]


# ---------------------------------------------------------------------------
# Instance generation and symmetry helpers
# ---------------------------------------------------------------------------


def generate_instance(
    m: int, n: int, W: int, H: int, k: int, seed: int
) -> Instance:
    """Deterministic random instance: k distinct picks, depot on the bottom row."""
    import random

    layout = WarehouseLayout(m, n, W, H)
    if k < 0:
        raise InstanceError(f"pick count must be >= 0, got {k}")
    if k >= 1 and H < 2:
        raise InstanceError("subaisle height must be >= 2 to place interior picks")
    per_subaisle = H - 1
    total = m * (n - 1) * per_subaisle
    if k > total:
        raise InstanceError(
            f"cannot place {k} distinct picks in {total} available positions"
        )
    rng = random.Random(seed)
    depot = DepotLocation(aisle=rng.randint(1, m), cross_aisle=1)
    picks = []
    for idx in rng.sample(range(total), k):
        aisle, rem = divmod(idx, (n - 1) * per_subaisle)
        sub, off = divmod(rem, per_subaisle)
        picks.append(PickLocation(aisle + 1, sub + 1, off + 1))
    return Instance.build(layout, depot, picks)


def mirror_instance(instance: Instance) -> Instance:
    """Flip the warehouse top-to-bottom."""
    lay = instance.layout
    n, H = lay.cross_aisles, lay.subaisle_height
    depot = DepotLocation(instance.depot.aisle, n + 1 - instance.depot.cross_aisle)
    picks = [
        PickLocation(p.aisle, n - p.subaisle, H - p.offset) for p in instance.picks
    ]
    return Instance.build(lay, depot, picks)


def mirror_edges(instance: Instance, edges: EdgeMultiset) -> EdgeMultiset:
    """Map an edge multiset through the top-to-bottom flip of its instance."""
    lay = instance.layout
    n, top = lay.cross_aisles, lay.top_pos
    out = EdgeMultiset()
    for (g, j), mult in edges.horizontal.items():
        out.horizontal[(g, n + 1 - j)] = mult
    for (a, lo, hi), mult in edges.vertical.items():
        out.vertical[(a, top - hi, top - lo)] = mult
    return out


def scale_instance(instance: Instance, factor: int) -> Instance:
    """Multiply all distances (pitch, height, offsets) by an integer factor."""
    if factor < 1:
        raise InstanceError(f"scale factor must be >= 1, got {factor}")
    lay = instance.layout
    layout = WarehouseLayout(
        lay.aisles, lay.cross_aisles, lay.aisle_pitch * factor,
        lay.subaisle_height * factor,
    )
    picks = [
        PickLocation(p.aisle, p.subaisle, p.offset * factor) for p in instance.picks
    ]
    return Instance.build(layout, instance.depot, picks)
