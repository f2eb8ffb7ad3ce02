"""Bounded solution enumeration with two independent strategies.

``enumerate_exhaustive`` walks the product of all short words;
``enumerate_levi`` case-splits on the leading symbols of each equation and
substitutes prefixes (Levi's lemma / Nielsen transformations). The two must
return the same set on the same budget; every bounded claim about solutions
elsewhere in the package is checked against them.
"""

import itertools
import logging
from collections import Counter
from typing import Dict, Iterator, List, Optional, Set, Tuple

from errors import BudgetExceeded
from systems import EquationSystem, Substitution, strip_common
from words import PositiveWord, positive_words, primitive_root

logger = logging.getLogger(__name__)

# Per-variable image length bound (letters).
DEFAULT_MAX_LEN = 4
# Cap on the number of solutions returned.
DEFAULT_MAX_SOLUTIONS = 100_000
# Cap on candidates (exhaustive) or search-tree nodes (Levi).
DEFAULT_MAX_NODES = 5_000_000

RawEquation = Tuple[Tuple[int, ...], Tuple[int, ...]]


class SearchBudget:
    """Bounds for one enumeration."""

    def __init__(self, max_len: int = DEFAULT_MAX_LEN,
                 max_solutions: int = DEFAULT_MAX_SOLUTIONS,
                 max_nodes: int = DEFAULT_MAX_NODES):
        for label, value in (('max_len', max_len), ('max_solutions', max_solutions), ('max_nodes', max_nodes)):
            if value < 1:
                raise ValueError(f"{label} must be at least 1, got {value}")
        self.max_len = max_len
        self.max_solutions = max_solutions
        self.max_nodes = max_nodes

    def __repr__(self) -> str:
        return (f"SearchBudget(max_len={self.max_len}, max_solutions={self.max_solutions}, "
                f"max_nodes={self.max_nodes})")


class SolutionSet:
    """Canonically ordered, duplicate-free solutions plus a completeness flag."""

    def __init__(self, solutions, complete: bool = True, nodes: int = 0):
        unique = {s: None for s in solutions}
        self.solutions: List[Substitution] = sorted(unique, key=lambda s: s.sort_key())
        self.complete = complete
        self.nodes = nodes

    def __len__(self) -> int:
        return len(self.solutions)

    def __iter__(self) -> Iterator[Substitution]:
        return iter(self.solutions)

    def as_set(self) -> Set[Substitution]:
        return set(self.solutions)

    def to_dict(self) -> Dict:
        return {
            'complete': self.complete,
            'count': len(self.solutions),
            'solutions': [s.to_dict() for s in self.solutions],
        }

    def __repr__(self) -> str:
        return f"SolutionSet({len(self.solutions)} solutions, complete={self.complete}, nodes={self.nodes})"


def _image(table: List[Tuple[int, ...]], word: Tuple[int, ...]) -> Tuple[int, ...]:
    return tuple(itertools.chain.from_iterable(table[sym] for sym in word))


def _budget_hit(what: str, found: List[Substitution], nodes: int, allow_partial: bool,
                max_solutions: int) -> SolutionSet:
    partial = SolutionSet(found[:max_solutions], complete=False, nodes=nodes)
    logger.info("budget hit (%s) after %d nodes, %d solutions kept", what, nodes, len(partial))
    if allow_partial:
        return partial
    raise BudgetExceeded(what, partial)


def enumerate_exhaustive(system: EquationSystem, budget: SearchBudget,
                         allow_partial: bool = False) -> SolutionSet:
    """
    All solutions with every image length in [1, max_len], by direct product enumeration.

    Args:
        system: System to solve over FS_k
        budget: Search bounds
        allow_partial: Return an incomplete set instead of raising BudgetExceeded

    Returns:
        SolutionSet in canonical order
    """
    alphabet = system.alphabet
    names = list(alphabet.variables)
    candidates = list(positive_words(alphabet.k, budget.max_len))
    coefficient_table: List[Tuple[int, ...]] = [(c,) for c in range(alphabet.k)]
    raw = [(lhs.letters, rhs.letters) for lhs, rhs in system.equations]
    found: List[Substitution] = []
    nodes = 0
    for images in itertools.product(candidates, repeat=len(names)):
        nodes += 1
        if nodes > budget.max_nodes:
            return _budget_hit("max_nodes", found, nodes - 1, allow_partial, budget.max_solutions)
        table = coefficient_table + [w.letters for w in images]
        if all(_image(table, lhs) == _image(table, rhs) for lhs, rhs in raw):
            found.append(Substitution(alphabet, dict(zip(names, images))))
            if len(found) > budget.max_solutions:
                return _budget_hit("max_solutions", found, nodes, allow_partial, budget.max_solutions)
    logger.info("exhaustive search: %d candidates, %d solutions", nodes, len(found))
    return SolutionSet(found, complete=True, nodes=nodes)


def _substitute(word: Tuple[int, ...], var: int, image: Tuple[int, ...]) -> Tuple[int, ...]:
    if var not in word:
        return word
    out: List[int] = []
    for sym in word:
        if sym == var:
            out.extend(image)
        else:
            out.append(sym)
    return tuple(out)


def count_infeasible(equation: RawEquation, k: int) -> bool:
    """
    Letter-count prune.

    With δ_x the occurrence difference of x between the sides, each
    coefficient c needs count_c(lhs) - count_c(rhs) + Σ δ_x·|x|_c = 0 with
    |x|_c ≥ 0, and total length needs the same with |x| ≥ 1. When all δ_x
    share a sign these have no solution for the wrong sign of the constant.
    """
    lhs, rhs = equation
    delta = Counter(lhs)
    delta.subtract(rhs)
    var_deltas = [d for sym, d in delta.items() if sym >= k and d != 0]
    nonneg = all(d >= 0 for d in var_deltas)
    nonpos = all(d <= 0 for d in var_deltas)
    for c in range(k):
        const = delta.get(c, 0)
        if (const > 0 and nonneg) or (const < 0 and nonpos):
            return True
    lowest = sum(delta.get(c, 0) for c in range(k)) + sum(var_deltas)
    return (nonneg and lowest > 0) or (nonpos and lowest < 0)


class _LeviSearch:
    """Depth-first Levi splitting over the stripped equations."""

    def __init__(self, system: EquationSystem, budget: SearchBudget):
        self.system = system
        self.alphabet = system.alphabet
        self.k = system.alphabet.k
        self.budget = budget
        self.nodes = 0
        self.found: List[Substitution] = []
        self.seen: Set[Substitution] = set()
        self.stopped: Optional[str] = None

    def run(self) -> None:
        equations = [(lhs.letters, rhs.letters) for lhs, rhs in self.system.equations]
        # expression of each original variable over coefficients and live variables
        exprs = {sym: (sym,) for sym in self.alphabet.variable_symbols()}
        self._search(equations, exprs)

    def _clean(self, equations: List[RawEquation]) -> Optional[List[RawEquation]]:
        cleaned = []
        for lhs, rhs in equations:
            lhs, rhs = strip_common(lhs, rhs)
            if not lhs and not rhs:
                continue
            if not lhs or not rhs:
                return None
            if lhs[0] < self.k and rhs[0] < self.k:
                return None
            if count_infeasible((lhs, rhs), self.k):
                return None
            cleaned.append((lhs, rhs))
        return cleaned

    def _search(self, equations: List[RawEquation], exprs: Dict[int, Tuple[int, ...]]) -> None:
        if self.stopped:
            return
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            self.stopped = "max_nodes"
            return
        if any(len(e) > self.budget.max_len for e in exprs.values()):
            return
        equations = self._clean(equations)
        if equations is None:
            logger.debug("pruned at node %d", self.nodes)
            return
        if not equations:
            self._emit_free(exprs)
            return

        lhs, rhs = equations[0]
        head_l, head_r = lhs[0], rhs[0]
        if head_l < self.k:
            head_l, head_r = head_r, head_l
        x = head_l
        branches: List[Tuple[int, Tuple[int, ...]]]
        if head_r < self.k:
            branches = [(x, (head_r,)), (x, (head_r, x))]
        else:
            y = head_r
            branches = [(x, (y,)), (x, (y, x)), (y, (x, y))]
        for var, image in branches:
            new_equations = [(_substitute(l, var, image), _substitute(r, var, image)) for l, r in equations]
            new_exprs = {orig: _substitute(e, var, image) for orig, e in exprs.items()}
            self._search(new_equations, new_exprs)

    def _emit_free(self, exprs: Dict[int, Tuple[int, ...]]) -> None:
        live = sorted({sym for e in exprs.values() for sym in e if sym >= self.k})
        for values in self._free_values(live, exprs, 0, {}):
            images = {}
            for orig, expr in exprs.items():
                letters: List[int] = []
                for sym in expr:
                    letters.extend(values[sym] if sym >= self.k else (sym,))
                images[self.alphabet.name(orig)] = PositiveWord(letters)
            s = Substitution(self.alphabet, images)
            if s in self.seen:
                continue
            self.seen.add(s)
            self.found.append(s)
            if len(self.found) > self.budget.max_solutions:
                self.stopped = "max_solutions"
                return

    def _free_values(self, live: List[int], exprs: Dict[int, Tuple[int, ...]], i: int,
                     chosen: Dict[int, Tuple[int, ...]]) -> Iterator[Dict[int, Tuple[int, ...]]]:
        if i == len(live):
            yield dict(chosen)
            return
        var = live[i]
        # slack: the longest image var can take without pushing any expression past max_len
        slack = self.budget.max_len
        for expr in exprs.values():
            if var not in expr:
                continue
            fixed = sum(len(chosen[s]) if s in chosen else 1 for s in expr if s != var)
            slack = min(slack, (self.budget.max_len - fixed) // expr.count(var))
        for word in positive_words(self.k, slack):
            chosen[var] = word.letters
            yield from self._free_values(live, exprs, i + 1, chosen)
            if self.stopped:
                break
        chosen.pop(var, None)


def enumerate_levi(system: EquationSystem, budget: SearchBudget,
                   allow_partial: bool = False) -> SolutionSet:
    """
    Same set as enumerate_exhaustive, found by Levi/Nielsen case splitting.

    When the leading symbols of an equation differ, either a variable equals
    the other head (x = a, x = y) or it properly starts with it (x ↦ a·x,
    x ↦ y·x, y ↦ x·y). Branches exceeding max_len on any original variable
    are cut, and so are equations failing the letter-count test.
    """
    search = _LeviSearch(system, budget)
    search.run()
    if search.stopped:
        return _budget_hit(search.stopped, search.found, search.nodes, allow_partial, budget.max_solutions)
    logger.info("levi search: %d nodes, %d solutions", search.nodes, len(search.found))
    return SolutionSet(search.found, complete=True, nodes=search.nodes)


def enumerate_solutions(system: EquationSystem, budget: SearchBudget, strategy: str = "levi",
                        allow_partial: bool = False) -> SolutionSet:
    """Dispatch on strategy name: ``levi`` or ``exhaustive``."""
    if strategy == "levi":
        return enumerate_levi(system, budget, allow_partial)
    if strategy == "exhaustive":
        return enumerate_exhaustive(system, budget, allow_partial)
    raise ValueError(f"Unknown strategy: {strategy}")


def cross_check(system: EquationSystem, budget: SearchBudget) -> Tuple[Set[Substitution], Set[Substitution]]:
    """
    Run both strategies.

    Returns:
        (found only by exhaustive search, found only by Levi search); both empty on agreement
    """
    exhaustive = enumerate_exhaustive(system, budget).as_set()
    levi = enumerate_levi(system, budget).as_set()
    return exhaustive - levi, levi - exhaustive


def commutation_witness(x: PositiveWord, y: PositiveWord) -> Optional[PositiveWord]:
    """Common primitive root of x and y if xy = yx, else None."""
    if len(x) == 0 or len(y) == 0:
        raise ValueError("commutation_witness needs nonempty words")
    if x.letters + y.letters != y.letters + x.letters:
        return None
    root, _ = primitive_root(x)
    return root
