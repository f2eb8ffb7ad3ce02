"""Solution graphs, twists, resolutions and Makanin-Razborov diagrams as checkable data.

Diagrams are not synthesized here. They are authored (see fixtures.py) or
loaded from JSON, and every claim they make is verified: graph identities
formally or by sampling, twists by re-checking each twisted substitution,
and coverage against the bounded oracle.
"""

import itertools
import logging
import random
from collections import deque
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx

from errors import (BudgetExceeded, NotSeparable, PreconditionViolated,
                    TwistBreaksSolution, TwistNotApplicable, UnboundLabel,
                    UnboundVariable)
from oracle import SearchBudget, enumerate_solutions
from systems import EquationSystem, Substitution, is_solution
from words import Alphabet, PositiveWord, positive_words, primitive_root

logger = logging.getLogger(__name__)

# Assignments sampled when a graph fails the formal identity check.
DEFAULT_GRAPH_SAMPLES = 200
# Longest label image used by sampling.
SAMPLE_LABEL_LENGTH = 3


class GraphValidity(Enum):
    FORMAL = "formal"          # equations hold as identities in the labels
    EMPIRICAL = "empirical"    # not an identity, yet every sample solved the system
    INVALID = "invalid"


class TwistKind(Enum):
    DEHN_TWIST = "dehn_twist_on_cyclic_edge"
    GENERALIZED_ABELIAN = "generalized_abelian"
    LABEL_TWIST = "label_twist"


def _closed_path_errors(base: str, path: Sequence[str],
                        ends: Dict[str, Tuple[str, str]]) -> Optional[str]:
    if not path:
        return "empty path"
    position = base
    for label in path:
        if label not in ends:
            return f"unknown edge {label}"
        tail, head = ends[label]
        if tail != position:
            return f"edge {label} leaves {tail}, not {position}"
        position = head
    if position != base:
        return f"ends at {position}, not at the base point {base}"
    return None


class SolutionGraph:
    """Directed graph with distinct edge labels and one closed positive path per variable."""

    def __init__(self, vertices: Iterable[str], edges: Iterable[Tuple[str, str, str]],
                 base_point: str, generator_paths: Dict[str, Sequence[str]]):
        """
        Initialize a solution graph.

        Args:
            vertices: Vertex names
            edges: (label, tail, head) triples; labels must be distinct
            base_point: Vertex every path starts and ends at
            generator_paths: Variable name -> list of edge labels
        """
        self.graph = nx.MultiDiGraph()
        self.graph.add_nodes_from(vertices)
        self.ends: Dict[str, Tuple[str, str]] = {}
        for label, tail, head in edges:
            if label in self.ends:
                raise PreconditionViolated(f"Edge label {label} is used twice")
            for v in (tail, head):
                if v not in self.graph:
                    raise PreconditionViolated(f"Edge {label} touches unknown vertex {v}")
            self.ends[label] = (tail, head)
            self.graph.add_edge(tail, head, key=label)
        if base_point not in self.graph:
            raise PreconditionViolated(f"Base point {base_point} is not a vertex")
        if not nx.is_weakly_connected(self.graph):
            raise PreconditionViolated("Solution graph must be connected")
        self.base_point = base_point
        self.generator_paths: Dict[str, List[str]] = {}
        for var, path in generator_paths.items():
            problem = _closed_path_errors(base_point, path, self.ends)
            if problem:
                raise PreconditionViolated(f"Path of {var} is not a closed positive path: {problem}")
            self.generator_paths[var] = list(path)

    @property
    def labels(self) -> List[str]:
        return list(self.ends)

    @property
    def longest_path(self) -> int:
        return max((len(p) for p in self.generator_paths.values()), default=0)

    def to_dict(self) -> Dict:
        return {
            'vertices': list(self.graph.nodes),
            'edges': [{'label': l, 'tail': t, 'head': h} for l, (t, h) in self.ends.items()],
            'base_point': self.base_point,
            'paths': {var: list(p) for var, p in self.generator_paths.items()},
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "SolutionGraph":
        edges = [(e['label'], e['tail'], e['head']) for e in data['edges']]
        return cls(data['vertices'], edges, data['base_point'], data['paths'])

    def __repr__(self) -> str:
        paths = ", ".join(f"{v}={'·'.join(p)}" for v, p in self.generator_paths.items())
        return f"SolutionGraph({paths})"


class LabelAssignment:
    """Edge label -> nonempty positive word over the coefficients."""

    def __init__(self, alphabet: Alphabet, images: Dict[str, PositiveWord]):
        self.alphabet = alphabet
        for label, word in images.items():
            if len(word) == 0 or any(sym >= alphabet.k for sym in word):
                raise ValueError(f"Image of label {label} must be a nonempty coefficient word")
        self.images = dict(images)

    @property
    def k(self) -> int:
        return self.alphabet.k

    @classmethod
    def from_strings(cls, alphabet: Alphabet, images: Dict[str, str]) -> "LabelAssignment":
        return cls(alphabet, {label: alphabet.parse_positive(text) for label, text in images.items()})

    def to_dict(self) -> Dict[str, str]:
        return {label: self.alphabet.format(w) for label, w in sorted(self.images.items())}

    def __repr__(self) -> str:
        return f"LabelAssignment({self.to_dict()})"


def substitute(g: SolutionGraph, a: LabelAssignment) -> Substitution:
    """Each variable maps to the concatenated label images along its path."""
    images = {}
    for var, path in g.generator_paths.items():
        letters: List[int] = []
        for label in path:
            if label not in a.images:
                raise UnboundLabel(label)
            letters.extend(a.images[label].letters)
        images[var] = PositiveWord(letters)
    return Substitution(a.alphabet, images)


def _first_failure(s: Substitution, system: EquationSystem) -> Optional[int]:
    table = s.symbol_table()
    for index, (lhs, rhs) in enumerate(system.equations):
        left, right = [], []
        for word, out in ((lhs, left), (rhs, right)):
            for sym in word:
                image = table[sym]
                if image is None:
                    raise UnboundVariable(system.alphabet.name(sym))
                out.extend(image)
        if left != right:
            return index
    return None


def verify_graph(g: SolutionGraph, system: EquationSystem, samples: int = DEFAULT_GRAPH_SAMPLES,
                 seed: int = 0) -> GraphValidity:
    """
    Check that every label assignment gives a solution.

    First each equation is compared as an identity in the free semigroup on
    labels and coefficients. If that fails, seeded random assignments are
    tried; passing all of them only earns EMPIRICAL.
    """
    alpha = system.alphabet

    def expand(word: PositiveWord) -> List[Tuple[str, object]]:
        out: List[Tuple[str, object]] = []
        for sym in word:
            if alpha.is_coefficient(sym):
                out.append(('c', sym))
            else:
                name = alpha.name(sym)
                if name not in g.generator_paths:
                    raise UnboundVariable(name)
                out.extend(('l', label) for label in g.generator_paths[name])
        return out

    if all(expand(lhs) == expand(rhs) for lhs, rhs in system.equations):
        return GraphValidity.FORMAL
    rng = random.Random(seed)
    for _ in range(samples):
        images = {label: PositiveWord(rng.randrange(alpha.k) for _ in range(rng.randint(1, SAMPLE_LABEL_LENGTH)))
                  for label in g.labels}
        if _first_failure(substitute(g, LabelAssignment(alpha, images)), system) is not None:
            return GraphValidity.INVALID
    return GraphValidity.EMPIRICAL


# --- twists ---------------------------------------------------------------

class TwistGenerator:
    """A modular move on solutions. Subclasses say how a substitution changes."""

    kind: TwistKind

    def exponents(self, s: Substitution, cap: int) -> Iterable[int]:
        return (1,)

    def describe(self) -> str:
        raise NotImplementedError

    def transform(self, s: Substitution, system: EquationSystem, exponent: int,
                  context: Optional[Tuple[SolutionGraph, LabelAssignment]]) -> Substitution:
        raise NotImplementedError

    def to_dict(self) -> Dict:
        raise NotImplementedError

    @staticmethod
    def from_dict(data: Dict) -> "TwistGenerator":
        kind = TwistKind(data['kind'])
        if kind is TwistKind.DEHN_TWIST:
            return DehnTwist(data['target'], data['word'], data.get('side', 'left'))
        if kind is TwistKind.GENERALIZED_ABELIAN:
            return GeneralizedAbelian(data['variables'], data['slot'])
        return LabelTwist(data['label'], data['word'])

    def __repr__(self) -> str:
        return self.describe()


def _word_of(names: Sequence[str], s: Substitution) -> List[int]:
    letters: List[int] = []
    for name in names:
        if name in s.alphabet.coefficients:
            letters.append(s.alphabet.symbol(name))
        else:
            letters.extend(s.image(name).letters)
    return letters


class DehnTwist(TwistGenerator):
    """target ↦ word · target (or target · word), the word read off the current solution."""

    kind = TwistKind.DEHN_TWIST

    def __init__(self, target: str, word: Sequence[str], side: str = "left"):
        if side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', got {side}")
        if not word:
            raise ValueError("A Dehn twist needs a nonempty twisting word")
        self.target = target
        self.word = list(word)
        self.side = side

    def describe(self) -> str:
        w = "·".join(self.word)
        return f"{self.target}↦({w})·{self.target}" if self.side == "left" else f"{self.target}↦{self.target}·({w})"

    def transform(self, s, system, exponent, context):
        twist = _word_of(self.word, s) * exponent
        current = list(s.image(self.target).letters)
        images = dict(s.images)
        images[self.target] = PositiveWord(twist + current if self.side == "left" else current + twist)
        return Substitution(s.alphabet, images)

    def to_dict(self) -> Dict:
        return {'kind': self.kind.value, 'target': self.target, 'word': self.word, 'side': self.side}


class GeneralizedAbelian(TwistGenerator):
    """
    Variables whose values share one primitive root r; the slot variables
    are reset to r^m for a chosen m >= 1.
    """

    kind = TwistKind.GENERALIZED_ABELIAN

    def __init__(self, variables: Sequence[str], slot: Sequence[str]):
        if not set(slot) <= set(variables) or not slot:
            raise ValueError(f"Slot {list(slot)} must be a nonempty subset of {list(variables)}")
        self.variables = list(variables)
        self.slot = list(slot)

    def root(self, s: Substitution) -> PositiveWord:
        roots = {primitive_root(s.image(v))[0] for v in self.variables}
        if len(roots) != 1:
            raise TwistNotApplicable(f"{', '.join(self.variables)} do not commute in {s}")
        return roots.pop()

    def exponents(self, s: Substitution, cap: int) -> Iterable[int]:
        try:
            r = self.root(s)
        except TwistNotApplicable:
            return ()
        return range(1, cap // len(r) + 1)

    def describe(self) -> str:
        return f"abelian{{{','.join(self.variables)}}}[{','.join(self.slot)}]"

    def transform(self, s, system, exponent, context):
        if exponent < 1:
            raise ValueError(f"Exponent must be at least 1, got {exponent}")
        r = self.root(s)
        images = dict(s.images)
        for v in self.slot:
            images[v] = PositiveWord(r.letters * exponent)
        return Substitution(s.alphabet, images)

    def to_dict(self) -> Dict:
        return {'kind': self.kind.value, 'variables': self.variables, 'slot': self.slot}


class LabelTwist(TwistGenerator):
    """label ↦ word · label on the label assignment, with the word made of labels."""

    kind = TwistKind.LABEL_TWIST

    def __init__(self, label: str, word: Sequence[str]):
        if not word:
            raise ValueError("A label twist needs a nonempty word")
        self.label = label
        self.word = list(word)

    def describe(self) -> str:
        return f"{self.label}↦({'·'.join(self.word)})·{self.label}"

    def twist_assignment(self, a: LabelAssignment, exponent: int = 1) -> LabelAssignment:
        for label in self.word + [self.label]:
            if label not in a.images:
                raise UnboundLabel(label)
        prefix = [sym for label in self.word for sym in a.images[label].letters] * exponent
        images = dict(a.images)
        images[self.label] = PositiveWord(prefix + list(a.images[self.label].letters))
        return LabelAssignment(a.alphabet, images)

    def transform(self, s, system, exponent, context):
        if context is None:
            raise TwistNotApplicable(f"{self.describe()} needs the graph and its label assignment")
        graph, assignment = context
        twisted = substitute(graph, self.twist_assignment(assignment, exponent))
        images = dict(s.images)
        images.update(twisted.images)
        return Substitution(s.alphabet, images)

    def to_dict(self) -> Dict:
        return {'kind': self.kind.value, 'label': self.label, 'word': self.word}


def apply_twist(t: TwistGenerator, s: Substitution, system: EquationSystem, exponent: int = 1,
                context: Optional[Tuple[SolutionGraph, LabelAssignment]] = None) -> Substitution:
    """
    Twist a solution and check the result still solves the system.

    Raises:
        TwistNotApplicable: the twist does not act on this solution
        TwistBreaksSolution: the twisted substitution is not a solution
    """
    twisted = t.transform(s, system, exponent, context)
    failure = _first_failure(twisted, system)
    if failure is not None:
        raise TwistBreaksSolution(t.describe(), failure)
    return twisted


# --- resolutions and coverage ------------------------------------------------

class ResolutionLevel:
    def __init__(self, twists: Sequence[TwistGenerator], note: str = "",
                 decomposition: Optional["SeparableDecomposition"] = None):
        self.twists = list(twists)
        self.note = note
        self.decomposition = decomposition

    def to_dict(self) -> Dict:
        data = {'twists': [t.to_dict() for t in self.twists], 'note': self.note}
        if self.decomposition is not None:
            data['decomposition'] = self.decomposition.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "ResolutionLevel":
        decomposition = data.get('decomposition')
        return cls([TwistGenerator.from_dict(t) for t in data.get('twists', [])], data.get('note', ""),
                   SeparableDecomposition.from_dict(decomposition) if decomposition else None)


class Resolution:
    """Levels of twists, outermost first, over a terminal solution graph."""

    def __init__(self, name: str, terminal: SolutionGraph, levels: Sequence[ResolutionLevel]):
        self.name = name
        self.terminal = terminal
        self.levels = list(levels)

    @property
    def twists(self) -> List[TwistGenerator]:
        return [t for level in self.levels for t in level.twists]

    def to_dict(self) -> Dict:
        return {'name': self.name, 'terminal': self.terminal.to_dict(),
                'levels': [level.to_dict() for level in self.levels]}

    @classmethod
    def from_dict(cls, data: Dict) -> "Resolution":
        return cls(data['name'], SolutionGraph.from_dict(data['terminal']),
                   [ResolutionLevel.from_dict(level) for level in data.get('levels', [])])

    def __repr__(self) -> str:
        return f"Resolution({self.name}, {self.terminal}, twists={self.twists})"


class CoverageReport:
    def __init__(self, name: str, covered: List[Substitution], uncovered: List[Substitution],
                 family_size: int, non_solutions: int, oracle_complete: bool):
        self.name = name
        self.covered = covered
        self.uncovered = uncovered
        self.family_size = family_size
        self.non_solutions = non_solutions
        self.oracle_complete = oracle_complete

    @property
    def ok(self) -> bool:
        return not self.uncovered

    def to_dict(self) -> Dict:
        return {
            'resolution': self.name,
            'covered': len(self.covered),
            'uncovered': [s.to_dict() for s in self.uncovered],
            'family_size': self.family_size,
            'non_solutions': self.non_solutions,
            'oracle_complete': self.oracle_complete,
        }

    def __repr__(self) -> str:
        return f"CoverageReport({self.name}: covered={len(self.covered)}, uncovered={len(self.uncovered)})"


def _assignments(labels: List[str], alphabet: Alphabet, max_len: int) -> Iterator[LabelAssignment]:
    words = list(positive_words(alphabet.k, max_len))
    for choice in itertools.product(words, repeat=len(labels)):
        yield LabelAssignment(alphabet, dict(zip(labels, choice)))


def family(r: Resolution, system: EquationSystem, max_len: int, twist_depth: int,
           max_nodes: Optional[int] = None) -> Tuple[Set[Substitution], int]:
    """
    Solutions produced by the resolution: graph substitutions with label
    images of length <= max_len, then every twist word of length <= twist_depth.

    Intermediate images may reach max_len times the longest generator path.
    Graph substitutions that do not solve the system are counted and dropped.

    Substitutions are deduplicated by value only. A label twist continues
    from the label assignment of the first path that reached a substitution,
    so another assignment giving the same substitution is not expanded
    further. The returned set can miss solutions reachable only through
    such a second assignment; none of the bundled resolutions has one.

    Returns:
        (set of solutions with every image of length <= max_len, number of non-solutions)
    """
    missing = set(system.alphabet.variables) - set(r.terminal.generator_paths)
    if missing:
        raise PreconditionViolated(f"Terminal graph has no path for {sorted(missing)}")
    cap = max_len * max(r.terminal.longest_path, 1)
    twists = r.twists
    # substitution -> shallowest twist depth it was reached at
    seen: Dict[Substitution, int] = {}
    unreached = twist_depth + 1
    non_solutions = 0
    result: Set[Substitution] = set()

    for a in _assignments(r.terminal.labels, system.alphabet, max_len):
        s = substitute(r.terminal, a)
        if _first_failure(s, system) is not None:
            non_solutions += 1
            continue
        if seen.get(s, unreached) == 0:
            continue
        seen[s] = 0
        frontier = deque([(s, a, 0)])
        while frontier:
            current, assignment, depth = frontier.popleft()
            if current.max_image_length() <= max_len:
                result.add(current)
            if depth >= twist_depth:
                continue
            for t in twists:
                for m in t.exponents(current, cap):
                    try:
                        twisted = apply_twist(t, current, system, m, (r.terminal, assignment))
                    except TwistNotApplicable:
                        continue
                    if twisted.max_image_length() > cap or seen.get(twisted, unreached) <= depth + 1:
                        continue
                    seen[twisted] = depth + 1
                    if max_nodes is not None and len(seen) > max_nodes:
                        raise BudgetExceeded(f"family of {r.name} exceeds {max_nodes} substitutions")
                    next_assignment = t.twist_assignment(assignment, m) if isinstance(t, LabelTwist) else assignment
                    frontier.append((twisted, next_assignment, depth + 1))
    logger.info("family of %s: %d solutions, %d non-solutions", r.name, len(result), non_solutions)
    return result, non_solutions


def family_cover_check(r: Resolution, system: EquationSystem, budget: SearchBudget,
                       twist_depth: int) -> CoverageReport:
    """Compare the resolution's family with the oracle's solutions at the same bound."""
    oracle = enumerate_solutions(system, budget)
    produced, non_solutions = family(r, system, budget.max_len, twist_depth, budget.max_nodes)
    covered = [s for s in oracle if s in produced]
    uncovered = [s for s in oracle if s not in produced]
    return CoverageReport(r.name, covered, uncovered, len(produced), non_solutions, oracle.complete)


# --- separable decompositions ------------------------------------------------

class SeparableDecomposition:
    """
    Vertices carrying (possibly empty) vertex systems, oriented separating edges.

    Variables listed in a vertex system keep their values. Every other
    variable is read as a path of edge labels and vertex variables.
    """

    def __init__(self, vertex_systems: Dict[str, Sequence[str]], edges: Iterable[Tuple[str, str, str]],
                 base_point: str, variable_paths: Dict[str, Sequence[str]]):
        self.graph = nx.MultiDiGraph()
        self.vertex_systems = {v: list(vs) for v, vs in vertex_systems.items()}
        self.graph.add_nodes_from(self.vertex_systems)
        self.ends: Dict[str, Tuple[str, str]] = {}
        for label, tail, head in edges:
            if label in self.ends:
                raise PreconditionViolated(f"Edge label {label} is used twice")
            for v in (tail, head):
                if v not in self.graph:
                    raise PreconditionViolated(f"Edge {label} touches unknown vertex {v}")
            self.ends[label] = (tail, head)
            self.graph.add_edge(tail, head, key=label)
        if base_point not in self.graph:
            raise PreconditionViolated(f"Base point {base_point} is not a vertex")
        self.base_point = base_point
        self.variable_paths = {v: list(p) for v, p in variable_paths.items()}
        in_vertices = {x for vs in self.vertex_systems.values() for x in vs}
        for var, path in self.variable_paths.items():
            if var in in_vertices:
                raise PreconditionViolated(f"{var} is both a vertex variable and a path")
            for item in path:
                if item not in self.ends and item not in in_vertices:
                    raise PreconditionViolated(f"Path of {var} uses unknown item {item}")

    @property
    def labels(self) -> List[str]:
        return list(self.ends)

    @property
    def vertex_variables(self) -> List[str]:
        return [x for vs in self.vertex_systems.values() for x in vs]

    def to_dict(self) -> Dict:
        return {
            'vertex_systems': self.vertex_systems,
            'edges': [{'label': l, 'tail': t, 'head': h} for l, (t, h) in self.ends.items()],
            'base_point': self.base_point,
            'paths': self.variable_paths,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "SeparableDecomposition":
        edges = [(e['label'], e['tail'], e['head']) for e in data.get('edges', [])]
        return cls(data['vertex_systems'], edges, data['base_point'], data.get('paths', {}))

    def __repr__(self) -> str:
        return f"SeparableDecomposition(vertices={self.vertex_systems}, labels={self.labels})"


class MarkedSubstitution:
    """A solution over the alphabet extended by one marker letter per label."""

    def __init__(self, substitution: Substitution, original: Alphabet, markers: Dict[str, str],
                 label_values: Dict[str, Optional[PositiveWord]], positions: Dict[str, int]):
        self.substitution = substitution
        self.original = original
        self.markers = markers
        self.label_values = label_values
        self.positions = positions

    def erase(self) -> Substitution:
        """Delete every marker letter, giving a substitution over the original alphabet."""
        k = self.original.k
        images = {name: PositiveWord(sym for sym in word if sym < k)
                  for name, word in self.substitution.images.items()}
        return Substitution(self.original, images)

    def to_dict(self) -> Dict:
        return {'images': self.substitution.to_dict(), 'markers': self.markers, 'positions': self.positions}

    def __repr__(self) -> str:
        return f"MarkedSubstitution({self.substitution.to_dict()})"


def _recover_labels(d: SeparableDecomposition, s: Substitution) -> Optional[Dict[str, Tuple[int, ...]]]:
    """Label values making every path variable read its value in s, by backtracking."""
    fixed = {v: s.image(v).letters for v in d.vertex_variables}
    targets = [(var, s.image(var).letters, path) for var, path in d.variable_paths.items()]

    def match(i: int, item_index: int, position: int, values: Dict[str, Tuple[int, ...]]):
        if i == len(targets):
            return dict(values)
        var, target, path = targets[i]
        if item_index == len(path):
            return match(i + 1, 0, 0, values) if position == len(target) else None
        item = path[item_index]
        known = fixed.get(item, values.get(item))
        if known is not None:
            if target[position:position + len(known)] != known:
                return None
            return match(i, item_index + 1, position + len(known), values)
        for end in range(position + 1, len(target) + 1):
            values[item] = target[position:end]
            found = match(i, item_index + 1, end, values)
            if found is not None:
                return found
            del values[item]
        return None

    return match(0, 0, 0, {})


def _fresh_markers(alphabet: Alphabet, count: int) -> List[str]:
    taken = set(alphabet.names)
    out = []
    n = 1
    while len(out) < count:
        name = f"m{n}"
        if name not in taken:
            out.append(name)
        n += 1
    return out


def _reencode(system: EquationSystem, extended: Alphabet) -> EquationSystem:
    shift = extended.k - system.alphabet.k
    equations = []
    for lhs, rhs in system.equations:
        equations.append(tuple(PositiveWord(sym + shift if system.alphabet.is_variable(sym) else sym for sym in w)
                               for w in (lhs, rhs)))
    return EquationSystem(extended, equations)


def separability_check(d: SeparableDecomposition, s: Substitution, system: EquationSystem) -> MarkedSubstitution:
    """
    Insert one fresh marker letter into each label value so that the
    rewritten assignment still solves the system over the extended alphabet.

    Every placement of every marker is tried. Erasing the markers from the
    result gives back s exactly.

    Raises:
        NotSeparable: no placement works; carries the first equation broken
            by the last placement tried
        PreconditionViolated: s does not solve the system, labels clash with
            coefficients, or no label values reproduce s
    """
    alpha = system.alphabet
    if not is_solution(s, system):
        raise PreconditionViolated(f"{s} does not solve the system")
    clash = set(d.labels) & set(alpha.coefficients)
    if clash:
        raise PreconditionViolated(f"Labels {sorted(clash)} collide with coefficient letters")
    values = _recover_labels(d, s)
    if values is None:
        raise PreconditionViolated(f"No label values reproduce {s} along the paths")

    used = [label for label in d.labels if label in values]
    markers = dict(zip(d.labels, _fresh_markers(alpha, len(d.labels))))
    extended = alpha.extended(coefficients=[markers[label] for label in d.labels])
    marked_system = _reencode(system, extended)
    marker_sym = {label: extended.symbol(markers[label]) for label in d.labels}
    label_values = {label: PositiveWord(values[label]) if label in values else None for label in d.labels}

    last_failure = 0
    for placement in itertools.product(*(range(len(values[label]) + 1) for label in used)):
        marked = {}
        for label, position in zip(used, placement):
            value = values[label]
            marked[label] = value[:position] + (marker_sym[label],) + value[position:]
        images = {}
        for v in d.vertex_variables:
            images[v] = s.image(v)
        for var, path in d.variable_paths.items():
            letters: List[int] = []
            for item in path:
                letters.extend(marked[item] if item in marked else s.image(item).letters)
            images[var] = PositiveWord(letters)
        for var, word in s.images.items():
            images.setdefault(var, word)
        candidate = Substitution(extended, images)
        failure = _first_failure(candidate, marked_system)
        if failure is None:
            logger.debug("markers placed at %s", dict(zip(used, placement)))
            return MarkedSubstitution(candidate, alpha, markers, label_values, dict(zip(used, placement)))
        last_failure = failure
    raise NotSeparable(last_failure)


# --- diagrams -------------------------------------------------------------

class MRDiagram:
    """A system with a finite list of resolutions meant to cover all its solutions."""

    def __init__(self, system: EquationSystem, resolutions: Sequence[Resolution]):
        self.system = system
        self.resolutions = list(resolutions)

    def to_dict(self) -> Dict:
        alpha = self.system.alphabet
        return {
            'system': {
                'alphabet': alpha.to_dict(),
                'equations': [[alpha.format(l), alpha.format(r)] for l, r in self.system.equations],
            },
            'resolutions': [r.to_dict() for r in self.resolutions],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "MRDiagram":
        alpha = Alphabet.from_dict(data['system']['alphabet'])
        equations = [(alpha.parse_positive(l), alpha.parse_positive(r)) for l, r in data['system']['equations']]
        return cls(EquationSystem(alpha, equations), [Resolution.from_dict(r) for r in data.get('resolutions', [])])

    def __repr__(self) -> str:
        return f"MRDiagram({self.system}, {len(self.resolutions)} resolution(s))"


class DiagramReport:
    def __init__(self, per_resolution: Dict[str, CoverageReport], uncovered: List[Substitution], total: int,
                 complete: bool):
        self.per_resolution = per_resolution
        self.uncovered = uncovered
        self.total = total
        self.complete = complete

    @property
    def ok(self) -> bool:
        return not self.uncovered

    def to_dict(self) -> Dict:
        return {
            'total': self.total,
            'covered': self.total - len(self.uncovered),
            'uncovered': [s.to_dict() for s in self.uncovered],
            'oracle_complete': self.complete,
            'resolutions': {name: r.to_dict() for name, r in self.per_resolution.items()},
        }

    def __repr__(self) -> str:
        return f"DiagramReport(total={self.total}, uncovered={len(self.uncovered)})"


def diagram_check(m: MRDiagram, budget: SearchBudget, twist_depth: int) -> DiagramReport:
    """Every oracle solution must be produced by at least one resolution."""
    oracle = enumerate_solutions(m.system, budget)
    reports = {}
    remaining = list(oracle)
    for r in m.resolutions:
        report = family_cover_check(r, m.system, budget, twist_depth)
        reports[r.name] = report
        covered = set(report.covered)
        remaining = [s for s in remaining if s not in covered]
    return DiagramReport(reports, remaining, len(oracle), oracle.complete)


def to_dot(g, name: str = "G") -> str:
    """
    DOT text for a solution graph or a separable decomposition.

    Separating edges of a decomposition are dashed arrows; the base point
    is drawn as a double circle.
    """
    dashed = isinstance(g, SeparableDecomposition)
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for v in g.graph.nodes:
        shape = "doublecircle" if v == g.base_point else "circle"
        extra = ""
        if dashed and g.vertex_systems.get(v):
            extra = f', xlabel="{{{",".join(g.vertex_systems[v])}}}"'
        lines.append(f'  "{v}" [shape={shape}{extra}];')
    for label, (tail, head) in g.ends.items():
        style = ", style=dashed" if dashed else ""
        lines.append(f'  "{tail}" -> "{head}" [label="{label}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
