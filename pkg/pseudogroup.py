"""Band systems: pseudogroups of orientation-preserving partial translations.

A band system is a finite union of closed intervals (components) carrying
paired bases. Each base has a support and a partner; the translation by
``offset`` carries the support onto the partner's support. All coordinates
are exact Fractions.

This module holds the system type, its coverage profile and associated
graph, the four Rips moves and their scheduler, entire transformations and
positive-side Dehn twists, generator extraction with positive expressions,
and the weight/dual-position diagnostics.
"""

import logging
import random
from collections import deque
from enum import Enum
from fractions import Fraction
from typing import (Dict, FrozenSet, Iterable, List, Optional, Sequence, Set,
                    Tuple)

import networkx as nx

from errors import (BudgetExceeded, DegenerateOverlap, InvalidBandSystem,
                    NoOverlap, NotIsolated, NotPositivelyExpressible,
                    PreconditionViolated)

logger = logging.getLogger(__name__)

# Periodicity bound c_p used by the weight classification.
DEFAULT_PERIODICITY_BOUND = 4
# Word length D for bounded orbit and stationarity searches.
DEFAULT_ORBIT_DEPTH = 6
# Cap on points visited by one orbit closure.
DEFAULT_ORBIT_POINTS = 20_000
# Cap on words visited by the stationary-word search.
DEFAULT_WORD_NODES = 200_000
# Denominator of sample points; prime and larger than any fixture denominator.
SAMPLE_DENOMINATOR = 1009

Interval = Tuple[Fraction, Fraction]


class MoveType(Enum):
    """Moves of the machine and the two positive-end transformations."""
    REMOVE_ISOLATED = "remove_isolated"          # (1)
    TRIM_SEMI_ISOLATED = "trim_semi_isolated"    # (2)
    SPLIT_INTERIOR = "split_interior"            # (3)
    REMOVE_DOUBLE = "remove_double"              # (4)
    ENTIRE_TRANSFORMATION = "entire_transformation"
    DEHN_TWIST = "dehn_twist"


class StepStatus(Enum):
    MOVED = "moved"
    TERMINAL = "terminal"
    TERMINAL_RATIONAL = "terminal_rational"


class WeightTag(Enum):
    LONG = "long"
    SHORT = "short"
    SECONDARY_SHORT = "secondary_short"


def to_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction or "p/q" string. Floats are refused."""
    if isinstance(value, float):
        raise InvalidBandSystem(f"Float coordinate {value!r}; use exact rationals such as '3/7'")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidBandSystem(f"Not a rational number: {value!r}") from exc


def _interval(value: Sequence) -> Interval:
    if len(value) != 2:
        raise InvalidBandSystem(f"Interval needs two endpoints, got {value!r}")
    lo, hi = to_fraction(value[0]), to_fraction(value[1])
    if not lo < hi:
        raise InvalidBandSystem(f"Interval [{lo}, {hi}] has no interior")
    return lo, hi


def _fmt(interval: Interval) -> str:
    return f"[{interval[0]}, {interval[1]}]"


class Base:
    """One base: support, partner id and the translation onto the partner."""

    __slots__ = ('id', 'lo', 'hi', 'partner', 'offset')

    def __init__(self, base_id: str, support: Sequence, partner: str, offset):
        self.id = base_id
        self.lo, self.hi = _interval(support)
        self.partner = partner
        self.offset = to_fraction(offset)

    @property
    def support(self) -> Interval:
        return (self.lo, self.hi)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, t: Fraction) -> bool:
        return self.lo <= t <= self.hi

    def to_dict(self) -> Dict:
        return {'id': self.id, 'support': [str(self.lo), str(self.hi)],
                'partner': self.partner, 'offset': str(self.offset)}

    def __eq__(self, other) -> bool:
        return (isinstance(other, Base) and self.id == other.id and self.support == other.support
                and self.partner == other.partner and self.offset == other.offset)

    def __hash__(self) -> int:
        return hash((self.id, self.lo, self.hi, self.partner, self.offset))

    def __repr__(self) -> str:
        return f"Base({self.id}={_fmt(self.support)}↔{self.partner}, offset={self.offset})"


def partner_id(base_id: str) -> str:
    """Default partner naming: ``A`` pairs with ``A'``."""
    return base_id[:-1] if base_id.endswith("'") else base_id + "'"


class BandSystem:
    """Immutable band system. Every move returns a new instance."""

    def __init__(self, components: Iterable[Sequence], bases: Iterable[Base],
                 marks: Iterable = (), validate: bool = True):
        """
        Initialize a band system.

        Args:
            components: Disjoint closed intervals
            bases: Paired bases; partner relation must be a perfect matching
            marks: Marked rational points, carried verbatim through moves
            validate: Check all invariants (on by default)
        """
        self.components: List[Interval] = sorted(_interval(c) for c in components)
        ordered = sorted(bases, key=lambda b: (b.lo, b.hi, b.id))
        self.bases: Dict[str, Base] = {}
        for b in ordered:
            if b.id in self.bases:
                raise InvalidBandSystem(f"Duplicate base id {b.id}")
            self.bases[b.id] = b
        self.marks: Tuple[Fraction, ...] = tuple(sorted(to_fraction(m) for m in marks))
        if validate:
            self.validate()

    @classmethod
    def from_pairs(cls, components: Iterable[Sequence],
                   pairs: Iterable[Tuple[str, Sequence, Sequence]], marks: Iterable = ()) -> "BandSystem":
        """
        Build from (id, support, partner_support) triples; partners are named ``id'``.
        """
        bases = []
        for base_id, support, partner_support in pairs:
            lo, hi = _interval(support)
            plo, phi = _interval(partner_support)
            if phi - plo != hi - lo:
                raise InvalidBandSystem(f"Base {base_id} and its partner have different lengths")
            bases.append(Base(base_id, (lo, hi), partner_id(base_id), plo - lo))
            bases.append(Base(partner_id(base_id), (plo, phi), base_id, lo - plo))
        return cls(components, bases, marks)

    def validate(self) -> None:
        """Raise InvalidBandSystem on any broken invariant."""
        for (_, hi), (lo, _) in zip(self.components, self.components[1:]):
            if lo <= hi:
                raise InvalidBandSystem("Components must be disjoint")
        for b in self.bases.values():
            p = self.bases.get(b.partner)
            if p is None or p.id == b.id:
                raise InvalidBandSystem(f"Base {b.id} has no valid partner ({b.partner})")
            if p.partner != b.id:
                raise InvalidBandSystem(f"Partner relation is not a matching at {b.id}")
            if p.length != b.length:
                raise InvalidBandSystem(f"Base {b.id} and partner {p.id} have different lengths")
            if p.lo - b.lo != b.offset or p.offset != -b.offset:
                raise InvalidBandSystem(f"Offset of {b.id} is inconsistent with partner {p.id}")
            if self.component_index(b.support) is None:
                raise InvalidBandSystem(f"Base {b.id} {_fmt(b.support)} is not inside a component")

    def component_index(self, interval: Interval) -> Optional[int]:
        for i, (lo, hi) in enumerate(self.components):
            if lo <= interval[0] and interval[1] <= hi:
                return i
        return None

    def base(self, base_id: str) -> Base:
        if base_id not in self.bases:
            raise PreconditionViolated(f"No base named {base_id}")
        return self.bases[base_id]

    @property
    def pair_count(self) -> int:
        return len(self.bases) // 2

    def pairs(self) -> List[Tuple[str, str]]:
        """One (base, partner) tuple per pair, in support order."""
        seen: Set[str] = set()
        out = []
        for b in self.bases.values():
            if b.id not in seen:
                seen.update((b.id, b.partner))
                out.append((b.id, b.partner))
        return out

    def total_length(self) -> Fraction:
        return sum((b.length for b in self.bases.values()), Fraction(0))

    def is_empty(self) -> bool:
        return not self.bases

    def covers(self, t: Fraction) -> bool:
        return any(b.contains(t) for b in self.bases.values())

    def replace(self, bases: Iterable[Base], components: Optional[Iterable[Interval]] = None) -> "BandSystem":
        """New system with the given bases; components without bases are dropped."""
        bases = list(bases)
        kept = []
        for comp in (components if components is not None else self.components):
            if any(comp[0] <= b.lo and b.hi <= comp[1] for b in bases):
                kept.append(comp)
        return BandSystem(kept, bases, self.marks)

    def to_dict(self) -> Dict:
        return {
            'components': [[str(lo), str(hi)] for lo, hi in self.components],
            'bases': [b.to_dict() for b in self.bases.values()],
            'marks': [str(m) for m in self.marks],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "BandSystem":
        bases = []
        for entry in data.get('bases', []):
            orientation = entry.get('orientation', 1)
            if orientation in (-1, "-1", "reversing", "reversed"):
                raise InvalidBandSystem(f"Base {entry.get('id')} is orientation-reversing")
            bases.append(Base(str(entry['id']), entry['support'], str(entry['partner']), entry['offset']))
        return cls(data['components'], bases, data.get('marks', []))

    def __eq__(self, other) -> bool:
        return (isinstance(other, BandSystem) and self.components == other.components
                and self.bases == other.bases and self.marks == other.marks)

    def __repr__(self) -> str:
        comps = ", ".join(_fmt(c) for c in self.components)
        return f"BandSystem(components=[{comps}], pairs={self.pair_count}, total_length={self.total_length()})"


# --- coverage and the associated graph ------------------------------------

class CoverageSegment:
    __slots__ = ('lo', 'hi', 'covering')

    def __init__(self, lo: Fraction, hi: Fraction, covering: Tuple[str, ...]):
        self.lo = lo
        self.hi = hi
        self.covering = covering

    @property
    def multiplicity(self) -> int:
        return len(self.covering)

    def __repr__(self) -> str:
        return f"({self.lo}, {self.hi})×{self.multiplicity}"


class CoverageProfile:
    """Step function of cover multiplicity on open segments between breakpoints."""

    def __init__(self, bs: BandSystem, segments: List[CoverageSegment]):
        self.bs = bs
        self.segments = segments

    def multiplicity_at(self, t: Fraction) -> int:
        """Number of bases whose open interior contains t."""
        return sum(1 for b in self.bs.bases.values() if b.lo < t < b.hi)

    def once_covered(self) -> List[CoverageSegment]:
        return [s for s in self.segments if s.multiplicity == 1]

    def twice_covered(self) -> List[CoverageSegment]:
        return [s for s in self.segments if s.multiplicity == 2]

    def __repr__(self) -> str:
        return f"CoverageProfile({self.segments})"


def pieces(bs: BandSystem, lo: Fraction, hi: Fraction) -> List[CoverageSegment]:
    """Refine [lo, hi] at every base endpoint inside it; record which bases cover each piece."""
    cuts = {lo, hi}
    for b in bs.bases.values():
        for x in (b.lo, b.hi):
            if lo < x < hi:
                cuts.add(x)
    points = sorted(cuts)
    out = []
    for x, y in zip(points, points[1:]):
        covering = tuple(b.id for b in bs.bases.values() if b.lo <= x and y <= b.hi)
        out.append(CoverageSegment(x, y, covering))
    return out


def coverage_profile(bs: BandSystem) -> CoverageProfile:
    """Exact multiplicity function of the system, segment by segment."""
    segments: List[CoverageSegment] = []
    for lo, hi in bs.components:
        segments.extend(pieces(bs, lo, hi))
    return CoverageProfile(bs, segments)


def covered_vertices(bs: BandSystem) -> List[Interval]:
    """Maximal closed subintervals covered at least once; touching supports merge."""
    vertices: List[List[Fraction]] = []
    for b in sorted(bs.bases.values(), key=lambda b: (b.lo, b.hi)):
        if vertices and b.lo <= vertices[-1][1]:
            vertices[-1][1] = max(vertices[-1][1], b.hi)
        else:
            vertices.append([b.lo, b.hi])
    return [(lo, hi) for lo, hi in vertices]


class AssociatedGraph:
    """Covered subintervals as vertices, one edge per base pair."""

    def __init__(self, graph: nx.MultiGraph):
        self.graph = graph

    @property
    def vertices(self) -> List[Interval]:
        return list(self.graph.nodes)

    @property
    def euler_characteristic(self) -> int:
        return self.graph.number_of_nodes() - self.graph.number_of_edges()

    def components(self) -> List[Set[Interval]]:
        return [set(c) for c in nx.connected_components(self.graph)]

    def __repr__(self) -> str:
        return (f"AssociatedGraph(V={self.graph.number_of_nodes()}, "
                f"E={self.graph.number_of_edges()}, chi={self.euler_characteristic})")


def associated_graph(bs: BandSystem) -> AssociatedGraph:
    graph = nx.MultiGraph()
    vertices = covered_vertices(bs)
    graph.add_nodes_from(vertices)

    def vertex_of(b: Base) -> Interval:
        return next(v for v in vertices if v[0] <= b.lo and b.hi <= v[1])

    for base_id, other_id in bs.pairs():
        graph.add_edge(vertex_of(bs.bases[base_id]), vertex_of(bs.bases[other_id]), key=base_id)
    return AssociatedGraph(graph)


def euler_characteristic(bs: BandSystem) -> int:
    return associated_graph(bs).euler_characteristic


def dumbbell_contribution(bs: BandSystem, base_id: str) -> int:
    """
    χ lost when move (1) removes the pair of ``base_id``.

    A pair whose graph component is a single edge between two distinct
    vertices contributes 1 and disappears with the move; every other removal
    keeps χ.
    """
    graph = associated_graph(bs).graph
    b = bs.base(base_id)
    for comp in nx.connected_components(graph):
        sub = graph.subgraph(comp)
        if sub.number_of_edges() == 1 and sub.number_of_nodes() == 2:
            (_, _, key), = sub.edges(keys=True)
            if key in (b.id, b.partner):
                return 1
    return 0


# --- the four moves -------------------------------------------------------

def _single_cover(bs: BandSystem, lo: Fraction, hi: Fraction) -> Optional[Base]:
    """The base covering every piece of [lo, hi] alone, if there is one."""
    parts = pieces(bs, lo, hi)
    owners = {p.covering for p in parts}
    if len(owners) != 1:
        return None
    (covering,) = owners
    if len(covering) != 1:
        return None
    return bs.bases[covering[0]]


def _is_isolated(bs: BandSystem, b: Base) -> bool:
    return _single_cover(bs, b.lo, b.hi) is b


def _resized(b: Base, lo: Fraction, hi: Fraction, base_id: Optional[str] = None,
             partner: Optional[str] = None) -> Base:
    return Base(base_id or b.id, (lo, hi), partner or b.partner, b.offset)


def move_remove_isolated(bs: BandSystem, base_id: str) -> BandSystem:
    """Move (1): drop a base whose interior meets no other base, with its partner."""
    b = bs.base(base_id)
    if not _is_isolated(bs, b):
        raise NotIsolated(base_id)
    kept = [x for x in bs.bases.values() if x.id not in (b.id, b.partner)]
    logger.debug("move (1): removed pair %s/%s", b.id, b.partner)
    return bs.replace(kept)


def _check_subinterval(subinterval: Sequence) -> Interval:
    try:
        return _interval(subinterval)
    except InvalidBandSystem as exc:
        raise PreconditionViolated(str(exc)) from exc


def move_trim_semi_isolated(bs: BandSystem, subinterval: Sequence) -> BandSystem:
    """
    Move (2): cut a once-covered end J off a base and the matching end off its partner.
    """
    lo, hi = _check_subinterval(subinterval)
    b = _single_cover(bs, lo, hi)
    if b is None:
        raise PreconditionViolated(f"{_fmt((lo, hi))} is not covered exactly once by one base")
    if (lo, hi) == b.support:
        raise PreconditionViolated(f"{_fmt((lo, hi))} is all of base {b.id}; remove it with move (1)")
    if lo == b.lo:
        new_lo, new_hi = hi, b.hi
    elif hi == b.hi:
        new_lo, new_hi = b.lo, lo
    else:
        raise PreconditionViolated(f"{_fmt((lo, hi))} contains no endpoint of {b.id}; that is move (3)")
    p = bs.bases[b.partner]
    changed = {
        b.id: _resized(b, new_lo, new_hi),
        p.id: _resized(p, new_lo + b.offset, new_hi + b.offset),
    }
    logger.debug("move (2): trimmed %s from %s", _fmt((lo, hi)), b.id)
    return bs.replace(changed.get(x.id, x) for x in bs.bases.values())


def move_split_interior(bs: BandSystem, subinterval: Sequence) -> BandSystem:
    """
    Move (3): erase a once-covered J strictly inside a base, splitting the pair in two.

    ``A`` becomes ``A.1`` (left of J) and ``A.2`` (right of J); the partner is
    cut at the translated locus the same way.
    """
    lo, hi = _check_subinterval(subinterval)
    b = _single_cover(bs, lo, hi)
    if b is None:
        raise PreconditionViolated(f"{_fmt((lo, hi))} is not covered exactly once by one base")
    if not (b.lo < lo and hi < b.hi):
        raise PreconditionViolated(f"{_fmt((lo, hi))} touches an endpoint of {b.id}")
    p = bs.bases[b.partner]
    o = b.offset
    left, right = f"{b.id}.1", f"{b.id}.2"
    pleft, pright = f"{p.id}.1", f"{p.id}.2"
    new = [
        Base(left, (b.lo, lo), pleft, o),
        Base(right, (hi, b.hi), pright, o),
        Base(pleft, (b.lo + o, lo + o), left, -o),
        Base(pright, (hi + o, b.hi + o), right, -o),
    ]
    kept = [x for x in bs.bases.values() if x.id not in (b.id, p.id)]
    logger.debug("move (3): split %s around %s", b.id, _fmt((lo, hi)))
    return bs.replace(kept + new)


def move_remove_double(bs: BandSystem, subinterval: Sequence) -> BandSystem:
    """
    Move (4): J is the support of exactly two bases and nothing else covers it.

    Partnered bases are erased; otherwise their former partners are paired
    with each other, the new offset being the sum of the two translations.
    """
    lo, hi = _check_subinterval(subinterval)
    on_j = [b for b in bs.bases.values() if b.support == (lo, hi)]
    if len(on_j) != 2 or any(len(p.covering) != 2 for p in pieces(bs, lo, hi)):
        raise PreconditionViolated(f"{_fmt((lo, hi))} does not support exactly two bases")
    beta, gamma = on_j
    kept = [x for x in bs.bases.values() if x.id not in (beta.id, gamma.id)]
    if beta.partner == gamma.id:
        logger.debug("move (4): erased partnered %s/%s", beta.id, gamma.id)
        return bs.replace(kept)
    bp, gp = bs.bases[beta.partner], bs.bases[gamma.partner]
    offset = bp.offset + gamma.offset
    relinked = {
        bp.id: Base(bp.id, bp.support, gp.id, offset),
        gp.id: Base(gp.id, gp.support, bp.id, -offset),
    }
    logger.debug("move (4): paired %s with %s", bp.id, gp.id)
    return bs.replace(relinked.get(x.id, x) for x in kept)


def isolated_bases(bs: BandSystem) -> List[str]:
    return [b.id for b in bs.bases.values() if _is_isolated(bs, b)]


def double_supports(bs: BandSystem) -> List[Interval]:
    """Supports carrying exactly two bases and covered exactly twice."""
    by_support: Dict[Interval, int] = {}
    for b in bs.bases.values():
        by_support[b.support] = by_support.get(b.support, 0) + 1
    out = []
    for support, count in by_support.items():
        if count == 2 and all(len(p.covering) == 2 for p in pieces(bs, *support)):
            out.append(support)
    return sorted(out)


def _once_runs(bs: BandSystem) -> List[Tuple[Base, Fraction, Fraction]]:
    """Maximal runs of once-covered segments, grouped by the covering base."""
    runs: List[Tuple[Base, Fraction, Fraction]] = []
    for seg in coverage_profile(bs).once_covered():
        owner = bs.bases[seg.covering[0]]
        if runs and runs[-1][0] is owner and runs[-1][2] == seg.lo:
            runs[-1] = (owner, runs[-1][1], seg.hi)
        else:
            runs.append((owner, seg.lo, seg.hi))
    return runs


def semi_isolated_ends(bs: BandSystem) -> List[Interval]:
    """Once-covered ends of bases that are a proper part of the base."""
    out = []
    for owner, lo, hi in _once_runs(bs):
        if (lo, hi) != owner.support and (lo == owner.lo or hi == owner.hi):
            out.append((lo, hi))
    return out


def interior_once_covered(bs: BandSystem) -> List[Interval]:
    """Once-covered runs strictly inside a base, left to right."""
    return [(lo, hi) for owner, lo, hi in _once_runs(bs) if owner.lo < lo and hi < owner.hi]


class MoveRecord:
    """What one machine step did."""

    def __init__(self, move: Optional[MoveType], args: Dict, status: StepStatus,
                 chi_before: int, chi_after: int, total_length: Fraction, chi_dropped: int = 0):
        self.move = move
        self.args = args
        self.status = status
        self.chi_before = chi_before
        self.chi_after = chi_after
        self.total_length = total_length
        self.chi_dropped = chi_dropped

    def to_dict(self) -> Dict:
        return {
            'move': self.move.value if self.move else None,
            'args': self.args,
            'status': self.status.value,
            'chi_before': self.chi_before,
            'chi_after': self.chi_after,
            'total_length': str(self.total_length),
        }

    def __repr__(self) -> str:
        name = self.move.value if self.move else self.status.value
        return f"MoveRecord({name}, {self.args}, chi {self.chi_before}->{self.chi_after})"


def rips_step(bs: BandSystem) -> Tuple[BandSystem, MoveRecord]:
    """
    Apply one move with the machine's priority.

    Moves (1) and (4) come first, then (2), then one (3) on the leftmost
    interior once-covered run. With no move available the system is
    TERMINAL (no bases) or TERMINAL_RATIONAL (bases left, every point
    covered at least twice).
    """
    chi = euler_characteristic(bs)
    length = bs.total_length()

    def record(move: MoveType, args: Dict, new: BandSystem, dropped: int = 0) -> Tuple[BandSystem, MoveRecord]:
        return new, MoveRecord(move, args, StepStatus.MOVED, chi, euler_characteristic(new),
                               new.total_length(), dropped)

    isolated = isolated_bases(bs)
    if isolated:
        target = isolated[0]
        dropped = dumbbell_contribution(bs, target)
        return record(MoveType.REMOVE_ISOLATED, {'base': target}, move_remove_isolated(bs, target), dropped)
    doubles = double_supports(bs)
    if doubles:
        j = doubles[0]
        return record(MoveType.REMOVE_DOUBLE, {'subinterval': [str(j[0]), str(j[1])]}, move_remove_double(bs, j))
    ends = semi_isolated_ends(bs)
    if ends:
        j = ends[0]
        return record(MoveType.TRIM_SEMI_ISOLATED, {'subinterval': [str(j[0]), str(j[1])]},
                      move_trim_semi_isolated(bs, j))
    interior = interior_once_covered(bs)
    if interior:
        j = interior[0]
        return record(MoveType.SPLIT_INTERIOR, {'subinterval': [str(j[0]), str(j[1])]},
                      move_split_interior(bs, j))
    status = StepStatus.TERMINAL if bs.is_empty() else StepStatus.TERMINAL_RATIONAL
    return bs, MoveRecord(None, {}, status, chi, chi, length)


# --- positive end transformations ------------------------------------------

def _with_offsets(bases: Dict[str, Interval], partners: Dict[str, str]) -> List[Base]:
    return [Base(i, support, partners[i], bases[partners[i]][0] - support[0])
            for i, support in bases.items()]


def entire_transformation(bs: BandSystem, carrier_id: str) -> BandSystem:
    """
    Transfer every base carried by the carrier onto the carrier's partner.

    The carrier must end at the positive (right) end of its component and
    be the longest base ending there. Each base contained in the carrier is
    translated by the carrier's offset; the carrier is then cut back to the
    furthest point q reached by the bases that still meet it, or removed
    when none do. With nothing to transfer the system is returned as is.
    """
    c = bs.base(carrier_id)
    index = bs.component_index(c.support)
    comp = bs.components[index]
    if c.hi != comp[1]:
        raise PreconditionViolated(f"Carrier {c.id} does not reach the positive end {comp[1]}")
    for b in bs.bases.values():
        if b.id != c.id and b.hi == comp[1] and b.lo >= comp[0]:
            if b.length > c.length:
                raise PreconditionViolated(f"Base {b.id} is longer than the carrier {c.id}")
            if b.length == c.length:
                raise DegenerateOverlap(f"Bases {b.id} and {c.id} overlap exactly at the positive end")

    carried = [b for b in bs.bases.values()
               if b.id not in (c.id, c.partner) and c.lo <= b.lo and b.hi <= c.hi]
    if not carried:
        return bs

    supports = {b.id: b.support for b in bs.bases.values()}
    partners = {b.id: b.partner for b in bs.bases.values()}
    for b in carried:
        supports[b.id] = (b.lo + c.offset, b.hi + c.offset)
    moved = {b.id for b in carried}
    meeting = [b for b in bs.bases.values()
               if b.id not in moved and b.id != c.id and b.lo < c.hi and b.hi > c.lo]
    q = max((b.hi for b in meeting), default=None)
    if q is None or q <= c.lo:
        del supports[c.id], supports[c.partner]
        del partners[c.id], partners[c.partner]
    else:
        supports[c.id] = (c.lo, q)
        supports[c.partner] = (c.lo + c.offset, q + c.offset)
    logger.debug("entire transformation through %s moved %s, cut at %s", c.id, sorted(moved), q)
    return bs.replace(_with_offsets(supports, partners))


def positive_end_carrier(bs: BandSystem, component: int = 0) -> Optional[str]:
    """Longest base ending at the positive end of a component, if unique."""
    comp = bs.components[component]
    ending = sorted((b for b in bs.bases.values() if b.hi == comp[1] and b.lo >= comp[0]),
                    key=lambda b: (-b.length, b.id))
    if not ending or (len(ending) > 1 and ending[0].length == ending[1].length):
        return None
    return ending[0].id


def dehn_twist_positive_end(bs: BandSystem, component: int = 0) -> BandSystem:
    """
    One twist at the positive end r of a component.

    Exactly two bases end at r, the longer L and the shorter S, and
    [r - |S|, r] is covered by them alone. S is carried through L, then L,
    its partner and the component are all cut by |S| at the right.
    """
    if not 0 <= component < len(bs.components):
        raise PreconditionViolated(f"No component {component}")
    lo, r = bs.components[component]
    ending = sorted((b for b in bs.bases.values() if b.hi == r and b.lo >= lo), key=lambda b: (-b.length, b.id))
    if len(ending) != 2:
        raise PreconditionViolated(f"{len(ending)} bases end at {r}; a twist needs exactly two")
    longer, shorter = ending
    if longer.length == shorter.length:
        raise DegenerateOverlap(f"Bases {longer.id} and {shorter.id} end at {r} with equal length")
    if shorter.partner == longer.id:
        raise PreconditionViolated(f"Bases {longer.id} and {shorter.id} are partners")
    cut = r - shorter.length
    if any(len(p.covering) != 2 for p in pieces(bs, cut, r)):
        raise PreconditionViolated(f"{_fmt((cut, r))} is not covered exactly twice")

    supports = {b.id: b.support for b in bs.bases.values()}
    partners = {b.id: b.partner for b in bs.bases.values()}
    supports[shorter.id] = (shorter.lo + longer.offset, shorter.hi + longer.offset)
    supports[longer.id] = (longer.lo, cut)
    supports[longer.partner] = (longer.lo + longer.offset, cut + longer.offset)
    components = list(bs.components)
    components[component] = (lo, cut)
    logger.debug("dehn twist at %s: %s carried through %s", r, shorter.id, longer.id)
    return bs.replace(_with_offsets(supports, partners), components)


# --- generators and positive expressions -----------------------------------

class Generator:
    __slots__ = ('id', 'lo', 'hi', 'covering')

    def __init__(self, gen_id: str, lo: Fraction, hi: Fraction, covering: Tuple[str, ...] = ()):
        self.id = gen_id
        self.lo = lo
        self.hi = hi
        self.covering = covering

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def __repr__(self) -> str:
        return f"Generator({self.id}={_fmt((self.lo, self.hi))})"


class GeneratorSet:
    """Segments between consecutive base endpoints on each covered subinterval."""

    def __init__(self, elements: List[Generator]):
        self.elements = elements
        self.by_id: Dict[str, Generator] = {g.id: g for g in elements}

    @property
    def lengths(self) -> List[Fraction]:
        return [g.length for g in self.elements]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __repr__(self) -> str:
        return f"GeneratorSet({self.elements})"


def extract_generators(bs: BandSystem) -> GeneratorSet:
    elements = []
    for lo, hi in covered_vertices(bs):
        for seg in pieces(bs, lo, hi):
            elements.append(Generator(f"v{len(elements) + 1}", seg.lo, seg.hi, seg.covering))
    return GeneratorSet(elements)


def reachable_translations(bs: BandSystem, lo: Fraction, hi: Fraction,
                           depth: int = DEFAULT_ORBIT_DEPTH) -> Dict[Fraction, Tuple[str, ...]]:
    """
    Translations t such that some word of length <= depth in the bases maps
    all of [lo, hi] to [lo + t, hi + t], each step inside a base support.

    Returns:
        translation -> shortest word realizing it
    """
    found: Dict[Fraction, Tuple[str, ...]] = {Fraction(0): ()}
    frontier = deque([(Fraction(0), ())])
    while frontier:
        t, word = frontier.popleft()
        if len(word) >= depth:
            continue
        for b in bs.bases.values():
            if b.lo <= lo + t and hi + t <= b.hi:
                nxt = t + b.offset
                if nxt not in found:
                    found[nxt] = word + (b.id,)
                    frontier.append((nxt, word + (b.id,)))
    return found


# A piece is (new generator id, start of the piece in old coordinates, translation onto the generator).
Piece = Tuple[str, Fraction, Fraction]


class PositiveExpressions:
    """Old generators written as positive words in new ones."""

    def __init__(self, expressions: Dict[str, List[Piece]], dropped: List[str]):
        self.expressions = expressions
        self.dropped = dropped

    def word(self, old_id: str) -> List[str]:
        return [gen for gen, _, _ in self.expressions[old_id]]

    def to_dict(self) -> Dict:
        return {
            'expressions': {k: [[g, str(s), str(t)] for g, s, t in v] for k, v in self.expressions.items()},
            'dropped': self.dropped,
        }

    def __repr__(self) -> str:
        body = ", ".join(f"{k}={'·'.join(self.word(k))}" for k in self.expressions)
        return f"PositiveExpressions({body}; dropped={self.dropped})"


def _express(old: Generator, new: GeneratorSet, bs_old: BandSystem, depth: int) -> Optional[List[Piece]]:
    def search(position: Fraction) -> Optional[List[Piece]]:
        if position == old.hi:
            return []
        # the generator starting here, untranslated, is tried first
        for g in sorted(new.elements, key=lambda g: (g.lo != position, g.lo, g.id)):
            end = position + g.length
            if end > old.hi:
                continue
            reach = reachable_translations(bs_old, position, end, depth)
            t = g.lo - position
            if t in reach:
                rest = search(end)
                if rest is not None:
                    return [(g.id, position, t)] + rest
        return None

    return search(old.lo)


def positive_expression(old: GeneratorSet, new: GeneratorSet, bs_old: BandSystem, bs_new: BandSystem,
                        depth: int = DEFAULT_ORBIT_DEPTH) -> PositiveExpressions:
    """
    Write each old generator as a positive word in the new generators.

    Each piece of the old segment is carried onto a new generator by a
    word of the old system. Old generators meeting the region the move
    uncovered may have no expression and are listed as dropped; any other
    failure raises NotPositivelyExpressible.
    """
    expressions: Dict[str, List[Piece]] = {}
    dropped: List[str] = []
    for g in old:
        pieces_found = _express(g, new, bs_old, depth)
        if pieces_found is not None:
            expressions[g.id] = pieces_found
            continue
        if all(seg.covering for seg in pieces(bs_new, g.lo, g.hi)):
            raise NotPositivelyExpressible(g.id)
        dropped.append(g.id)
    return PositiveExpressions(expressions, dropped)


def replay_expression(old: Generator, expression: List[Piece], new: GeneratorSet) -> bool:
    """True iff the pieces tile the old segment exactly and land on their generators."""
    position = old.lo
    for gen_id, start, translation in expression:
        g = new.by_id.get(gen_id)
        if g is None or start != position or start + translation != g.lo:
            return False
        position = start + g.length
    return position == old.hi


def compose_expressions(first: PositiveExpressions, second: PositiveExpressions) -> PositiveExpressions:
    """Substitute the second set of expressions into the first."""
    composed: Dict[str, List[Piece]] = {}
    dropped = list(first.dropped)
    for old_id, word in first.expressions.items():
        out: List[Piece] = []
        for mid_id, start, t in word:
            if mid_id not in second.expressions:
                out = None
                break
            for new_id, s, u in second.expressions[mid_id]:
                out.append((new_id, s - t, t + u))
        if out is None:
            dropped.append(old_id)
        else:
            composed[old_id] = out
    return PositiveExpressions(composed, dropped)


# --- diagnostics ---------------------------------------------------------

class WeightClassification:
    """Generators ordered by length and split at large length ratios."""

    def __init__(self, classes: List[List[str]], separators: List[int], c1: int, c_p: int,
                 tags: Dict[str, WeightTag], f: int):
        self.classes = classes
        self.separators = separators
        self.c1 = c1
        self.c_p = c_p
        self.tags = tags
        self.f = f

    @property
    def d1(self) -> int:
        """Number of long elements."""
        return sum(1 for t in self.tags.values() if t is WeightTag.LONG)

    @property
    def d2(self) -> int:
        """Number of short elements, secondary short included."""
        return sum(1 for t in self.tags.values() if t is not WeightTag.LONG)

    @property
    def cap(self) -> int:
        """e(f) = 4^f · f."""
        return 4 ** self.f * self.f

    def to_dict(self) -> Dict:
        return {'classes': self.classes, 'separators': self.separators, 'c1': self.c1,
                'c_p': self.c_p, 'tags': {k: v.value for k, v in self.tags.items()},
                'd1': self.d1, 'd2': self.d2, 'cap': self.cap}

    def __repr__(self) -> str:
        return f"WeightClassification(c1={self.c1}, classes={self.classes})"


def classify_weights(g: GeneratorSet, c_p: int = DEFAULT_PERIODICITY_BOUND,
                     previous: Optional[WeightClassification] = None) -> WeightClassification:
    """
    Place a separator between consecutive lengths whenever len_i >= c1 · len_{i+1}.

    c1 = 4 · f · c_p with f the number of generators. The first class is
    long and every later class is short. On a later pass, given the
    previous classification, a short generator that was long before is
    tagged secondary short.
    """
    if c_p < 1:
        raise ValueError(f"c_p must be a positive integer, got {c_p}")
    f = len(g)
    c1 = 4 * f * c_p
    ordered = sorted(g.elements, key=lambda e: (-e.length, e.lo, e.id))
    classes: List[List[str]] = []
    separators: List[int] = []
    for i, e in enumerate(ordered):
        if i > 0 and ordered[i - 1].length >= c1 * e.length:
            separators.append(i)
            classes.append([])
        if not classes:
            classes.append([])
        classes[-1].append(e.id)
    tags = {}
    for index, cls in enumerate(classes):
        for gen_id in cls:
            if index == 0:
                tags[gen_id] = WeightTag.LONG
            elif previous is not None and previous.tags.get(gen_id) is WeightTag.LONG:
                tags[gen_id] = WeightTag.SECONDARY_SHORT
            else:
                tags[gen_id] = WeightTag.SHORT
    return WeightClassification(classes, separators, c1, c_p, tags, f)


class DualPositionReport:
    def __init__(self, pair_counts: Dict[Tuple[str, str], int], db_count: int, eliminated: int):
        self.pair_counts = pair_counts
        self.db_count = db_count
        self.eliminated = eliminated

    def to_dict(self) -> Dict:
        return {'pair_counts': {f"{a},{b}": n for (a, b), n in sorted(self.pair_counts.items())},
                'db_count': self.db_count, 'eliminated': self.eliminated}

    def __repr__(self) -> str:
        return f"DualPositionReport(pairs={self.pair_counts}, DB={self.db_count})"


Path = Tuple[Fraction, Sequence[str]]


def _lay_out(g: GeneratorSet, start: Fraction, word: Sequence[str]) -> List[Tuple[str, Fraction, Fraction]]:
    out = []
    position = start
    for gen_id in word:
        if gen_id not in g.by_id:
            raise PreconditionViolated(f"Unknown generator {gen_id}")
        length = g.by_id[gen_id].length
        out.append((gen_id, position, position + length))
        position += length
    return out


def dual_positions(bs: BandSystem, g: GeneratorSet, path1, path2) -> DualPositionReport:
    """
    Compare two generator paths laid along a line.

    Each path is a word of generator ids or a (start, word) pair; a bare
    word starts at 0. path2 is the inverse path, so its letters are laid
    out in reverse order. Occurrences of the same generator at the same
    place on both paths cancel in pairs. Among the rest, each overlapping
    pair of occurrences gives a dual position b - a for its generator pair,
    and DB counts the refinement pieces still covered by both paths.

    Raises:
        NoOverlap: a path is empty
        PreconditionViolated: a path uses a generator that is not in g or
            does not lie inside a component of bs
    """
    def normalize(path) -> Path:
        if isinstance(path, tuple) and len(path) == 2 and not isinstance(path[0], str):
            return to_fraction(path[0]), list(path[1])
        return Fraction(0), list(path)

    start1, word1 = normalize(path1)
    start2, word2 = normalize(path2)
    if not word1 or not word2:
        raise NoOverlap("Both paths must be nonempty")
    for gen_id in set(word1) | set(word2):
        gen = g.by_id.get(gen_id)
        if gen is None:
            raise PreconditionViolated(f"Unknown generator {gen_id}")
        if not any(lo <= gen.lo and gen.hi <= hi for lo, hi in bs.components):
            raise PreconditionViolated(f"Generator {gen_id} is not supported by the band system")
    occ1 = _lay_out(g, start1, word1)
    occ2 = _lay_out(g, start2, list(reversed(word2)))

    remaining2 = list(occ2)
    kept1 = []
    eliminated = 0
    for occ in occ1:
        if occ in remaining2:
            remaining2.remove(occ)
            eliminated += 1
        else:
            kept1.append(occ)

    counts: Dict[Tuple[str, str], Set[Fraction]] = {}
    for a_id, a_lo, a_hi in kept1:
        for b_id, b_lo, b_hi in remaining2:
            if min(a_hi, b_hi) > max(a_lo, b_lo):
                counts.setdefault((a_id, b_id), set()).add(b_lo - a_lo)

    cuts = sorted({x for _, lo, hi in kept1 + remaining2 for x in (lo, hi)})
    db = 0
    for x, y in zip(cuts, cuts[1:]):
        cover = sum(1 for _, lo, hi in kept1 + remaining2 if lo <= x and y <= hi)
        if cover >= 2:
            db += 1
    return DualPositionReport({k: len(v) for k, v in counts.items()}, db, eliminated)


# --- orbits and stationary words ---------------------------------------------

def orbit(bs: BandSystem, t: Fraction, depth: Optional[int] = None,
          max_points: int = DEFAULT_ORBIT_POINTS) -> FrozenSet[Fraction]:
    """
    Points reachable from t by words of length <= depth (all words when depth is None).

    Closed supports are used. Rational systems have finite orbits, so the
    unbounded closure terminates; max_points guards against mistakes.
    """
    seen = {t}
    frontier = deque([(t, 0)])
    while frontier:
        x, d = frontier.popleft()
        if depth is not None and d >= depth:
            continue
        for b in bs.bases.values():
            if b.lo <= x <= b.hi:
                y = x + b.offset
                if y not in seen:
                    seen.add(y)
                    if len(seen) > max_points:
                        raise BudgetExceeded(f"orbit of {t} exceeds {max_points} points")
                    frontier.append((y, d + 1))
    return frozenset(seen)


def orbit_partition(bs: BandSystem, points: Sequence[Fraction],
                    depth: Optional[int] = None) -> FrozenSet[FrozenSet[Fraction]]:
    """Partition of the sample points by orbit."""
    sample = set(points)
    classes = []
    assigned: Set[Fraction] = set()
    for p in points:
        if p in assigned:
            continue
        members = frozenset(orbit(bs, p, depth) & sample)
        assigned |= members
        classes.append(members)
    return frozenset(classes)


def surviving_points(old: BandSystem, new: BandSystem, points: Sequence[Fraction]) -> List[Fraction]:
    """Sample points not uncovered by the move (covered before and not after are dropped)."""
    return [p for p in points if new.covers(p) or not old.covers(p)]


def sample_points(bs: BandSystem, count: int, seed: int = 0) -> List[Fraction]:
    """Seeded rational points in the components, never on a base endpoint."""
    rng = random.Random(seed)
    points: List[Fraction] = []
    while len(points) < count and bs.components:
        lo, hi = rng.choice(bs.components)
        t = lo + (hi - lo) * Fraction(rng.randint(1, SAMPLE_DENOMINATOR - 1), SAMPLE_DENOMINATOR)
        if t.denominator % SAMPLE_DENOMINATOR == 0 and t not in points:
            points.append(t)
    return points


class StationaryWord:
    """A reduced word in the bases acting as the identity on an interval."""

    def __init__(self, word: Tuple[str, ...], domain: Interval):
        self.word = word
        self.domain = domain

    def __repr__(self) -> str:
        return f"StationaryWord({'·'.join(self.word)} on {_fmt(self.domain)})"


def stationary_words(bs: BandSystem, depth: int = DEFAULT_ORBIT_DEPTH,
                     max_nodes: int = DEFAULT_WORD_NODES) -> List[StationaryWord]:
    """
    Nontrivial reduced words of length <= depth with zero total translation
    on a domain of positive length.
    """
    found: List[StationaryWord] = []
    frontier = deque()
    for b in bs.bases.values():
        frontier.append(((b.id,), b.lo, b.hi, b.offset))
    nodes = 0
    while frontier:
        word, lo, hi, t = frontier.popleft()
        nodes += 1
        if nodes > max_nodes:
            raise BudgetExceeded(f"stationary word search exceeds {max_nodes} words")
        if t == 0:
            found.append(StationaryWord(word, (lo, hi)))
        if len(word) >= depth:
            continue
        last = bs.bases[word[-1]]
        for b in bs.bases.values():
            if b.id == last.partner:
                continue
            new_lo, new_hi = max(lo, b.lo - t), min(hi, b.hi - t)
            if new_lo < new_hi:
                frontier.append((word + (b.id,), new_lo, new_hi, t + b.offset))
    return found


def random_band_system(rng: random.Random, max_pairs: int = 6, denominator: int = 64) -> BandSystem:
    """
    Random valid system: one or two unit components, up to max_pairs pairs,
    endpoints on the grid (1/denominator)Z.
    """
    components = [(Fraction(0), Fraction(1))]
    if rng.random() < 0.3:
        components.append((Fraction(2), Fraction(3)))
    pairs = []
    for i in range(rng.randint(1, max_pairs)):
        size = rng.randint(1, denominator // 2)
        spots = []
        for _ in range(2):
            lo, _ = rng.choice(components)
            start = lo + Fraction(rng.randint(0, denominator - size), denominator)
            spots.append((start, start + Fraction(size, denominator)))
        pairs.append((f"B{i + 1}", spots[0], spots[1]))
    return BandSystem.from_pairs(components, pairs)
