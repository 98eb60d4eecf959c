"""Vertical/horizontal edge configurations and the deterministic resolver.

Within a subaisle (or a merged span of subaisles) a minimal tour uses one of
six vertical edge shapes: a single traversal, doubles from the top down to
the lowest required point, doubles from the bottom up to the highest one,
doubles everywhere except one largest gap, a full double pass, or nothing.
Between adjacent aisles each cross-aisle segment carries 0, 1 or 2 edges.

``resolve_vertical`` turns a known horizontal incidence profile of one aisle
into the unique minimal vertical edge choice for that aisle: odd-incidence
vertices are paired bottom-to-top with single traversals, the leftover spans
are merged across zero-incidence vertices, and each merged segment receives
the shape dictated by its endpoint incidences.  When several largest gaps
tie, every attachment-distinct resolution is returned so callers can keep
exact connectivity bookkeeping.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .model import AislePoint

MARK_ZERO = "0"
MARK_EVEN = "E"
MARK_ODD = "U"

TAG_TRAVERSAL = "traversal"
TAG_TOP = "top"
TAG_BOTTOM = "bottom"
TAG_LARGEST_GAP = "largest_gap"
TAG_DOUBLE_PASS = "double_pass"
TAG_NONE = "none"

TAG_TO_ROMAN = {
    TAG_TRAVERSAL: "i",
    TAG_TOP: "ii",
    TAG_BOTTOM: "iii",
    TAG_LARGEST_GAP: "iv",
    TAG_DOUBLE_PASS: "v",
    TAG_NONE: "vi",
}


def mark_of(count: int) -> str:
    if count == 0:
        return MARK_ZERO
    return MARK_ODD if count % 2 else MARK_EVEN


def combine_marks(mark: str, added_degree: int) -> str:
    """Mark after adding edges of the given total degree to a vertex."""
    if added_degree == 0:
        return mark
    if added_degree % 2 == 0:
        return MARK_EVEN if mark == MARK_ZERO else mark
    return MARK_EVEN if mark == MARK_ODD else MARK_ODD


@dataclass(frozen=True)
class VerticalConfig:
    """One vertical edge shape; largest-gap carries its excluded gap."""

    tag: str
    gap: tuple[int, int] | None = None

    @property
    def roman(self) -> str:
        return TAG_TO_ROMAN[self.tag]


@dataclass(frozen=True)
class Segment:
    """A vertical span of one aisle between two cross-aisle vertices."""

    aisle: int
    j_lo: int
    j_hi: int
    lo_pos: int
    hi_pos: int
    required: tuple[int, ...]  # absolute positions needing coverage

    @property
    def length(self) -> int:
        return self.hi_pos - self.lo_pos


# A piece is one contiguous run of vertical edges: (lo_pos, hi_pos, multiplicity).
Piece = tuple[int, int, int]


def config_edges(config: VerticalConfig, segment: Segment) -> tuple[list[Piece], int]:
    """Edge pieces and cost of applying a configuration to a segment."""
    lo, hi = segment.lo_pos, segment.hi_pos
    req = segment.required
    tag = config.tag
    if tag == TAG_TRAVERSAL:
        return [(lo, hi, 1)], segment.length
    if tag == TAG_BOTTOM:
        if not req:
            return [], 0
        top = max(req)
        return ([(lo, top, 2)] if top > lo else []), 2 * (top - lo)
    if tag == TAG_TOP:
        if not req:
            return [], 0
        bot = min(req)
        return ([(bot, hi, 2)] if bot < hi else []), 2 * (hi - bot)
    if tag == TAG_LARGEST_GAP:
        if not req:
            return [], 0
        if config.gap is not None:
            glo, ghi = config.gap
        else:
            positions = [lo, *req, hi]
            widths = [
                (positions[t + 1] - positions[t], positions[t], positions[t + 1])
                for t in range(len(positions) - 1)
            ]
            _, glo, ghi = max(widths)
        pieces = []
        if glo > lo:
            pieces.append((lo, glo, 2))
        if ghi < hi:
            pieces.append((ghi, hi, 2))
        return pieces, 2 * (segment.length - (ghi - glo))
    if tag == TAG_DOUBLE_PASS:
        return [(lo, hi, 2)], 2 * segment.length
    if tag == TAG_NONE:
        if req:
            raise ValueError("the empty configuration is invalid on a segment with required points")
        return [], 0
    raise ValueError(f"unknown configuration tag {tag!r}")


@dataclass(frozen=True)
class Resolution:
    """One complete vertical edge choice for an aisle.

    ``links`` groups the aisle's cross-aisle vertices that the vertical
    pieces weld together (one frozenset per connected run of pieces).
    """

    items: tuple[tuple[Segment, VerticalConfig], ...]
    pieces: tuple[Piece, ...]
    cost: int
    links: tuple[frozenset[int], ...]

    def touched_vertices(self) -> frozenset[int]:
        out: set[int] = set()
        for group in self.links:
            out |= group
        return frozenset(out)


def _vertex_positions(points: Sequence[AislePoint]) -> list[int]:
    return [p.pos for p in points if p.kind in ("vertex", "depot")]


def _touched(vpos: list[int], lo: int, hi: int) -> frozenset[int]:
    """1-based cross-aisle indices whose vertex lies within [lo, hi]."""
    return frozenset(j + 1 for j, pos in enumerate(vpos) if lo <= pos <= hi)


def _link_groups(vpos: list[int], pieces: Sequence[Piece]) -> tuple[frozenset[int], ...]:
    groups: list[set[int]] = []
    for lo, hi, _ in pieces:
        touch = set(_touched(vpos, lo, hi))
        assert touch, "a vertical piece must touch at least one cross-aisle vertex"
        merged = [g for g in groups if g & touch]
        for g in merged:
            touch |= g
            groups.remove(g)
        groups.append(touch)
    return tuple(sorted((frozenset(g) for g in groups), key=min))


def merge_segments(
    aisle: int, points: Sequence[AislePoint], incidence: Sequence[int]
) -> list[Segment]:
    """Maximal vertical spans whose interior vertices carry no horizontal edges."""
    vpos = _vertex_positions(points)
    n = len(vpos)
    assert len(incidence) == n, "incidence must cover every cross-aisle vertex"
    required = _required_positions(points, incidence)
    return _merge_interval(aisle, vpos, incidence, 1, n, required)


def _required_positions(
    points: Sequence[AislePoint], incidence: Sequence[int]
) -> set[int]:
    """Positions the aisle's verticals must cover: picks, plus a depot whose
    vertex has no horizontal edges (otherwise the depot is already in the tour)."""
    required = {p.pos for p in points if p.kind == "pick"}
    for p in points:
        if p.kind == "depot" and incidence[p.cross_aisle - 1] == 0:
            required.add(p.pos)
    return required


def _merge_interval(
    aisle: int,
    vpos: list[int],
    incidence: Sequence[int],
    j_lo: int,
    j_hi: int,
    required: set[int],
) -> list[Segment]:
    cuts = [j_lo]
    cuts += [j for j in range(j_lo + 1, j_hi) if incidence[j - 1] > 0]
    cuts.append(j_hi)
    segments = []
    for a, b in zip(cuts, cuts[1:]):
        lo, hi = vpos[a - 1], vpos[b - 1]
        inside = tuple(sorted(r for r in required if lo <= r <= hi))
        segments.append(Segment(aisle, a, b, lo, hi, inside))
    return segments


def _largest_gap_options(
    segment: Segment, vpos: list[int]
) -> list[tuple[VerticalConfig, list[Piece], int]]:
    """All cost-equal, attachment-distinct largest-gap choices for a segment."""
    positions = [segment.lo_pos, *segment.required, segment.hi_pos]
    gaps = [
        (positions[t + 1] - positions[t], positions[t], positions[t + 1])
        for t in range(len(positions) - 1)
    ]
    best = max(width for width, _, _ in gaps)
    options = []
    seen: set[tuple] = set()
    for width, glo, ghi in gaps:
        if width != best:
            continue
        config = VerticalConfig(TAG_LARGEST_GAP, (glo, ghi))
        pieces, cost = config_edges(config, segment)
        attach = tuple(_touched(vpos, lo, hi) for lo, hi, _ in pieces)
        if attach in seen:
            continue
        seen.add(attach)
        options.append((config, pieces, cost))
    return options


def resolve_vertical(
    aisle: int,
    points: Sequence[AislePoint],
    incidence: Sequence[int],
    whole_instance: bool,
) -> list[Resolution]:
    """Minimal vertical edges of one aisle given its horizontal incidence.

    Returns one resolution, or several cost-equal ones when largest-gap ties
    produce distinct endpoint attachments.
    """
    vpos = _vertex_positions(points)
    n = len(vpos)
    assert len(incidence) == n, "incidence must cover every cross-aisle vertex"
    required = _required_positions(points, incidence)

    if all(c == 0 for c in incidence):
        if not required:
            return [Resolution((), (), 0, ())]
        if not whole_instance:
            raise ValueError(
                "aisle has required points but no horizontal edges anywhere; "
                "only valid when the whole instance sits in this aisle"
            )
        return [_resolve_isolated_aisle(aisle, points, vpos, required)]

    odd = [j for j in range(1, n + 1) if incidence[j - 1] % 2 == 1]
    assert len(odd) % 2 == 0, "odd-parity vertices must come in pairs (cut parity)"
    if n <= 3:
        assert len(odd) <= 2, "at most one odd pair can occur per aisle for n <= 3"

    fixed: list[tuple[Segment, VerticalConfig, list[Piece], int]] = []
    uncovered = set(required)
    spans = [(odd[t], odd[t + 1]) for t in range(0, len(odd), 2)]
    for a, b in spans:
        lo, hi = vpos[a - 1], vpos[b - 1]
        inside = tuple(sorted(r for r in required if lo <= r <= hi))
        segment = Segment(aisle, a, b, lo, hi, inside)
        config = VerticalConfig(TAG_TRAVERSAL)
        pieces, cost = config_edges(config, segment)
        fixed.append((segment, config, pieces, cost))
        uncovered -= set(inside)

    remaining: list[tuple[int, int]] = []
    start = 1
    for a, b in spans:
        if start < a:
            remaining.append((start, a))
        start = b
    if start < n:
        remaining.append((start, n))

    choice_lists: list[list[tuple[Segment, VerticalConfig, list[Piece], int]]] = []
    for a, b in remaining:
        for segment in _merge_interval(aisle, vpos, incidence, a, b, uncovered):
            at_lo = incidence[segment.j_lo - 1] > 0
            at_hi = incidence[segment.j_hi - 1] > 0
            if not segment.required:
                fixed.append((segment, VerticalConfig(TAG_NONE), [], 0))
                continue
            if at_lo and at_hi:
                choice_lists.append(
                    [
                        (segment, config, pieces, cost)
                        for config, pieces, cost in _largest_gap_options(segment, vpos)
                    ]
                )
            elif at_lo:
                config = VerticalConfig(TAG_BOTTOM)
                pieces, cost = config_edges(config, segment)
                fixed.append((segment, config, pieces, cost))
            elif at_hi:
                config = VerticalConfig(TAG_TOP)
                pieces, cost = config_edges(config, segment)
                fixed.append((segment, config, pieces, cost))
            else:
                raise AssertionError(
                    "segment with required points detached from all horizontal edges"
                )

    resolutions = []
    for combo in itertools.product(*choice_lists):
        chosen = fixed + [entry for entry in combo]
        chosen.sort(key=lambda entry: (entry[0].lo_pos, entry[0].hi_pos))
        items = tuple((seg, cfg) for seg, cfg, _, _ in chosen)
        pieces = tuple(pc for _, _, plist, _ in chosen for pc in plist)
        cost = sum(c for _, _, _, c in chosen)
        resolutions.append(
            Resolution(items, pieces, cost, _link_groups(vpos, pieces))
        )
    return resolutions


def _resolve_isolated_aisle(
    aisle: int,
    points: Sequence[AislePoint],
    vpos: list[int],
    required: set[int],
) -> Resolution:
    """No horizontal edges at all: double out-and-back from the depot."""
    depot = next(p for p in points if p.kind == "depot")
    depot_j, depot_pos = depot.cross_aisle, depot.pos
    n = len(vpos)
    below = sorted(r for r in required if r < depot_pos)
    above = sorted(r for r in required if r > depot_pos)
    chosen: list[tuple[Segment, VerticalConfig, list[Piece], int]] = []
    if below:
        segment = Segment(aisle, 1, depot_j, vpos[0], depot_pos, tuple(below))
        config = VerticalConfig(TAG_TOP)
        pieces, cost = config_edges(config, segment)
        chosen.append((segment, config, pieces, cost))
    if above:
        segment = Segment(aisle, depot_j, n, depot_pos, vpos[-1], tuple(above))
        config = VerticalConfig(TAG_BOTTOM)
        pieces, cost = config_edges(config, segment)
        chosen.append((segment, config, pieces, cost))
    items = tuple((seg, cfg) for seg, cfg, _, _ in chosen)
    pieces = tuple(pc for _, _, plist, _ in chosen for pc in plist)
    cost = sum(c for _, _, _, c in chosen)
    return Resolution(items, pieces, cost, _link_groups(vpos, pieces))


def subaisle_options(
    aisle: int,
    layer: int,
    lo_pos: int,
    hi_pos: int,
    required: Sequence[int],
    include_double_pass: bool,
) -> list[tuple[Segment, VerticalConfig, tuple[Piece, ...], int]]:
    """Every distinct vertical shape for one subaisle, for stagewise solvers.

    Shapes are item-dependent; duplicates (a largest gap that degenerates to
    a pure top or bottom reach) are collapsed onto the earlier tag.
    """
    segment = Segment(aisle, layer, layer + 1, lo_pos, hi_pos, tuple(sorted(required)))
    vpos = [lo_pos, hi_pos]
    candidates: list[tuple[VerticalConfig, list[Piece], int]] = []
    if segment.required:
        for tag in (TAG_TRAVERSAL, TAG_TOP, TAG_BOTTOM):
            config = VerticalConfig(tag)
            candidates.append((config, *config_edges(config, segment)))
        candidates.extend(_largest_gap_options(segment, vpos))
    else:
        config = VerticalConfig(TAG_NONE)
        candidates.append((config, *config_edges(config, segment)))
        config = VerticalConfig(TAG_TRAVERSAL)
        candidates.append((config, *config_edges(config, segment)))
    if include_double_pass:
        config = VerticalConfig(TAG_DOUBLE_PASS)
        candidates.append((config, *config_edges(config, segment)))
    options = []
    seen: set[tuple] = set()
    for config, pieces, cost in candidates:
        key = tuple(pieces)
        if key in seen:
            continue
        seen.add(key)
        options.append((segment, config, tuple(pieces), cost))
    return options
