"""Positive bases for abelian pairs.

Given semigroup generators s_1..s_r spanning Z^l and a positive length
functional (the translation lengths α of the current basis), find a new
basis of Z^l in which every generator is a nonnegative combination and
every basis vector still has positive length.

The search is the iterative descent: while a generator has a negative
coordinate at p, either shorten a longer basis vector a_j with a positive
coordinate (a_j <- a_j - a_p) or, if none is longer, shorten a_p itself
(a_p <- a_p - a_j). The sum of basis lengths drops at every replacement and
stays in (1/D)Z_{>0}, so the loop ends.
"""

import itertools
import logging
import random
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from errors import (BudgetExceeded, DegenerateLengths, NonPositiveGenerator,
                    NotSpanning)

logger = logging.getLogger(__name__)

# Cap on elementary basis replacements per run.
DEFAULT_STEP_BUDGET = 10 ** 6
# Entry bound of the exhaustive 2x2 witness search.
WITNESS_ENTRY_BOUND = 6

Vector = List[int]


class LatticeInstance:
    """Generators of Z^rank with a generic positive length functional."""

    def __init__(self, rank: int, generators: Sequence[Sequence[int]], lengths: Sequence):
        """
        Initialize an instance.

        Args:
            rank: l >= 1
            generators: Integer vectors of length rank
            lengths: Positive rationals, one per standard basis vector
        """
        if rank < 1:
            raise ValueError(f"Rank must be at least 1, got {rank}")
        if len(lengths) != rank:
            raise ValueError(f"Expected {rank} lengths, got {len(lengths)}")
        self.rank = rank
        self.generators: List[Vector] = []
        for j, g in enumerate(generators):
            if len(g) != rank:
                raise ValueError(f"Generator {j} has {len(g)} entries, expected {rank}")
            self.generators.append([int(x) for x in g])
        self.lengths: List[Fraction] = [Fraction(x) for x in lengths]
        for i, alpha in enumerate(self.lengths):
            if alpha <= 0:
                raise ValueError(f"Length {i} must be positive, got {alpha}")

    def length_of(self, v: Sequence[int]) -> Fraction:
        return sum((c * a for c, a in zip(v, self.lengths)), Fraction(0))

    def scaled(self, factor) -> "LatticeInstance":
        factor = Fraction(factor)
        return LatticeInstance(self.rank, self.generators, [a * factor for a in self.lengths])

    def to_dict(self) -> Dict:
        return {
            'rank': self.rank,
            'generators': [list(g) for g in self.generators],
            'lengths': [str(a) for a in self.lengths],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "LatticeInstance":
        return cls(int(data['rank']), data['generators'], [Fraction(x) for x in data['lengths']])

    def __repr__(self) -> str:
        return f"LatticeInstance(rank={self.rank}, generators={self.generators}, lengths={[str(a) for a in self.lengths]})"


class PositiveBasis:
    """Change of basis U (rows are the new basis) and nonnegative expressions."""

    def __init__(self, change_of_basis: List[Vector], expressions: List[Vector], steps: int = 0):
        self.change_of_basis = change_of_basis
        self.expressions = expressions
        self.steps = steps

    def key(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(row) for row in self.change_of_basis)

    def to_dict(self) -> Dict:
        return {
            'change_of_basis': self.change_of_basis,
            'expressions': self.expressions,
            'steps': self.steps,
        }

    def __eq__(self, other) -> bool:
        return isinstance(other, PositiveBasis) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"PositiveBasis(U={self.change_of_basis}, steps={self.steps})"


def spans(rank: int, generators: Sequence[Sequence[int]]) -> bool:
    """
    True iff the generators span Z^rank as a group.

    The span is everything iff the gcd of the rank x rank minors (the last
    determinantal divisor) is 1.
    """
    if len(generators) < rank:
        return False
    matrix = sympy.Matrix(generators)
    if matrix.rank() < rank:
        return False
    divisor = 0
    for rows in itertools.combinations(range(len(generators)), rank):
        divisor = sympy.igcd(divisor, int(matrix.extract(list(rows), list(range(rank))).det()))
        if divisor == 1:
            return True
    return False


def is_unimodular(matrix: Sequence[Sequence[int]]) -> bool:
    return abs(int(sympy.Matrix(matrix).det())) == 1


def positive_basis(inst: LatticeInstance, step_budget: int = DEFAULT_STEP_BUDGET) -> PositiveBasis:
    """
    Find a basis in which every generator is a nonnegative combination.

    Args:
        inst: Spanning generators with positive lengths
        step_budget: Maximum number of elementary replacements

    Returns:
        PositiveBasis with unimodular U and nonnegative expressions

    Raises:
        NotSpanning, NonPositiveGenerator, DegenerateLengths, BudgetExceeded
    """
    for j, g in enumerate(inst.generators):
        if inst.length_of(g) <= 0:
            raise NonPositiveGenerator(j)
    if not spans(inst.rank, inst.generators):
        raise NotSpanning(f"Generators do not span Z^{inst.rank}")

    rank = inst.rank
    basis: List[Vector] = [[1 if i == j else 0 for j in range(rank)] for i in range(rank)]
    lam: List[Fraction] = list(inst.lengths)
    coords: List[Vector] = [list(g) for g in inst.generators]
    steps = 0

    for current in range(len(coords)):
        c = coords[current]
        while min(c) < 0:
            steps += 1
            if steps > step_budget:
                raise BudgetExceeded(f"{step_budget} basis replacements")
            # most negative coordinate, smallest index on ties
            p = min(range(rank), key=lambda i: (c[i], i))
            positive = [j for j in range(rank) if c[j] > 0]
            longer = [j for j in positive if lam[j] > lam[p]]
            if longer:
                j = max(longer, key=lambda i: (lam[i], -i))
                # a_j <- a_j - a_p: every generator gains coords[j] at p
                basis[j] = [x - y for x, y in zip(basis[j], basis[p])]
                lam[j] -= lam[p]
                for other in coords:
                    other[p] += other[j]
                logger.debug("step %d: a%d <- a%d - a%d", steps, j, j, p)
                continue
            shorter = [j for j in positive if lam[j] < lam[p]]
            if not shorter:
                raise DegenerateLengths(
                    f"Basis vectors {p} and {positive} have equal length {lam[p]}")
            j = shorter[0]
            # a_p <- a_p - a_j: every generator gains coords[p] at j
            basis[p] = [x - y for x, y in zip(basis[p], basis[j])]
            lam[p] -= lam[j]
            for other in coords:
                other[j] += other[p]
            logger.debug("step %d: a%d <- a%d - a%d", steps, p, p, j)

    logger.info("positive basis found after %d replacements", steps)
    return PositiveBasis(basis, coords, steps)


def positive_basis_family(instances: Sequence[LatticeInstance],
                          step_budget: int = DEFAULT_STEP_BUDGET) -> List[PositiveBasis]:
    """One positive basis per functional, deduplicated by change of basis."""
    if not instances:
        return []
    generators = instances[0].generators
    for inst in instances[1:]:
        if inst.generators != generators:
            raise ValueError("Instances in a family must share their generators")
    family: List[PositiveBasis] = []
    seen = set()
    for inst in instances:
        basis = positive_basis(inst, step_budget)
        if basis.key() not in seen:
            seen.add(basis.key())
            family.append(basis)
    return family


def verify_positive_basis(inst: LatticeInstance, basis: PositiveBasis) -> bool:
    """
    Check every property a positive basis must have.

    Unimodular U, nonnegative expressions that reproduce each generator
    exactly (also through U⁻¹), and positive length on every new basis vector.
    """
    u = basis.change_of_basis
    if len(u) != inst.rank or not is_unimodular(u):
        return False
    if any(inst.length_of(row) <= 0 for row in u):
        return False
    inverse = sympy.Matrix(u).inv()
    for g, m in zip(inst.generators, basis.expressions):
        if any(x < 0 for x in m):
            return False
        rebuilt = [sum(m[i] * u[i][col] for i in range(inst.rank)) for col in range(inst.rank)]
        if rebuilt != g:
            return False
        if list(sympy.Matrix([g]) * inverse) != m:
            return False
    return len(basis.expressions) == len(inst.generators)


def unimodular_witness(inst: LatticeInstance, bound: int = WITNESS_ENTRY_BOUND) -> Optional[PositiveBasis]:
    """
    Exhaustive search over 2x2 integer matrices with entries in [-bound, bound].

    Returns the first unimodular W (in lexicographic order) whose rows have
    positive length and express every generator nonnegatively, or None.
    """
    if inst.rank != 2:
        raise ValueError("unimodular_witness only handles rank 2")
    entries = range(-bound, bound + 1)
    rows = [(x, y) for x in entries for y in entries if inst.length_of((x, y)) > 0]
    for a, b in rows:
        for c, d in rows:
            det = a * d - b * c
            if det not in (1, -1):
                continue
            expressions = []
            for s1, s2 in inst.generators:
                m1 = (s1 * d - s2 * c) * det
                m2 = (s2 * a - s1 * b) * det
                if m1 < 0 or m2 < 0:
                    break
                expressions.append([m1, m2])
            else:
                return PositiveBasis([[a, b], [c, d]], expressions)
    return None


def random_instance(rng: random.Random, max_rank: int = 4, entry_bound: int = 5,
                    extra_generators: int = 2) -> LatticeInstance:
    """
    Seeded random spanning instance with generic rational lengths.

    Generators with negative length are negated; zero-length draws and
    non-spanning sets are redrawn.
    """
    rank = rng.randint(1, max_rank)
    while True:
        lengths = [Fraction(rng.randint(1000, 99999), rng.randint(1000, 9999)) for _ in range(rank)]
        generators = []
        count = rank + rng.randint(0, extra_generators)
        while len(generators) < count:
            v = [rng.randint(-entry_bound, entry_bound) for _ in range(rank)]
            value = sum(c * a for c, a in zip(v, lengths))
            if value == 0:
                continue
            generators.append(v if value > 0 else [-x for x in v])
        if spans(rank, generators):
            return LatticeInstance(rank, generators, lengths)
