"""Equation systems, their pair presentations, and substitutions."""

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from errors import InvalidSystem, RelationViolated, UnboundVariable
from words import (Alphabet, GroupWord, PositiveWord, as_group_word, inverse,
                   is_positive)

Equation = Tuple[PositiveWord, PositiveWord]


def strip_common(lhs: Tuple[int, ...], rhs: Tuple[int, ...]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Remove the longest common prefix and then the longest common suffix."""
    i = 0
    while i < len(lhs) and i < len(rhs) and lhs[i] == rhs[i]:
        i += 1
    lhs, rhs = lhs[i:], rhs[i:]
    j = 0
    while j < len(lhs) and j < len(rhs) and lhs[-1 - j] == rhs[-1 - j]:
        j += 1
    if j:
        lhs, rhs = lhs[:-j], rhs[:-j]
    return lhs, rhs


class EquationSystem:
    """A finite system of equations u_i = v_i over coefficients and variables."""

    def __init__(self, alphabet: Alphabet, equations: Iterable[Equation]):
        """
        Initialize a system.

        Args:
            alphabet: Alphabet holding the coefficients and variables
            equations: (lhs, rhs) pairs of nonempty positive words
        """
        self.alphabet = alphabet
        self.equations: List[Equation] = []
        size = len(alphabet.names)
        for index, (lhs, rhs) in enumerate(equations):
            if len(lhs) == 0 or len(rhs) == 0:
                raise InvalidSystem(f"Equation {index} has an empty side")
            for sym in lhs.letters + rhs.letters:
                if not 0 <= sym < size:
                    raise InvalidSystem(f"Equation {index} uses symbol {sym} outside the alphabet")
            self.equations.append((lhs, rhs))

    @property
    def k(self) -> int:
        return self.alphabet.k

    def canonical(self) -> List[Equation]:
        """Equations with common prefixes and suffixes stripped. Sides may become empty."""
        stripped = []
        for lhs, rhs in self.equations:
            left, right = strip_common(lhs.letters, rhs.letters)
            stripped.append((PositiveWord(left), PositiveWord(right)))
        return stripped

    def variables_in_use(self) -> List[str]:
        used = set()
        for lhs, rhs in self.equations:
            used.update(sym for sym in lhs.letters + rhs.letters if self.alphabet.is_variable(sym))
        return [self.alphabet.name(sym) for sym in sorted(used)]

    def presentation(self) -> "PairPresentation":
        return PairPresentation(self.alphabet, self.equations)

    def rename_variables(self, renaming: Dict[str, str]) -> "EquationSystem":
        """Same system with variables renamed; unnamed variables keep their names."""
        new_names = [renaming.get(name, name) for name in self.alphabet.variables]
        alphabet = Alphabet(self.alphabet.coefficients, new_names)
        # Symbols are positional, so the words carry over unchanged.
        return EquationSystem(alphabet, self.equations)

    def unrestricted(self) -> "EquationSystem":
        """
        The system with every coefficient replaced by a fresh variable.

        Solutions of the result are the unrestricted semigroup homomorphisms
        S -> FS_k, with the images of the coefficients free to vary.
        """
        taken = set(self.alphabet.names)
        fresh = []
        for name in self.alphabet.coefficients:
            candidate = name.upper()
            suffix = 1
            while candidate in taken:
                candidate = f"{name[0].upper()}{suffix}"
                suffix += 1
            taken.add(candidate)
            fresh.append(candidate)
        alphabet = self.alphabet.extended(variables=fresh)
        k, n = self.alphabet.k, self.alphabet.n

        def lift(sym: int) -> int:
            return k + n + sym if sym < k else sym

        equations = [(PositiveWord(map(lift, lhs)), PositiveWord(map(lift, rhs)))
                     for lhs, rhs in self.equations]
        return EquationSystem(alphabet, equations)

    def format_equation(self, index: int) -> str:
        lhs, rhs = self.equations[index]
        return f"{self.alphabet.format(lhs)} = {self.alphabet.format(rhs)}"

    def __len__(self) -> int:
        return len(self.equations)

    def __repr__(self) -> str:
        body = ", ".join(self.format_equation(i) for i in range(len(self.equations)))
        return f"EquationSystem(k={self.k}, {{{body}}})"


class PairPresentation:
    """S(Σ) and Gr(S): one generator list and one relation list, read twice."""

    def __init__(self, alphabet: Alphabet, relations: Sequence[Equation]):
        self.alphabet = alphabet
        self.generators: List[str] = list(alphabet.names)
        self.relations: List[Equation] = list(relations)

    @property
    def semigroup_presentation(self) -> Dict:
        return {'generators': self.generators, 'relations': self.relations}

    @property
    def group_presentation(self) -> Dict:
        return {'generators': self.generators, 'relators': self.group_relators()}

    def group_relators(self) -> List[GroupWord]:
        """Each relation u = v read as the group relator u·v⁻¹."""
        return [as_group_word(lhs) * inverse(as_group_word(rhs)) for lhs, rhs in self.relations]

    def __repr__(self) -> str:
        return f"PairPresentation({len(self.generators)} generators, {len(self.relations)} relations)"


class Substitution:
    """Assignment of nonempty coefficient words to variables (a pair homomorphism)."""

    def __init__(self, alphabet: Alphabet, images: Dict[str, PositiveWord]):
        """
        Initialize a substitution.

        Args:
            alphabet: Alphabet of the system; images use its coefficients only
            images: Variable name -> nonempty positive word over coefficients
        """
        self.alphabet = alphabet
        self.images: Dict[str, PositiveWord] = {}
        for name, word in images.items():
            if name not in alphabet.variables:
                raise ValueError(f"{name} is not a variable of {alphabet}")
            if len(word) == 0:
                raise ValueError(f"Image of {name} is empty")
            if any(sym >= alphabet.k for sym in word):
                raise ValueError(f"Image of {name} uses a non-coefficient letter")
            self.images[name] = word

    @property
    def k(self) -> int:
        return self.alphabet.k

    def image(self, name: str) -> PositiveWord:
        if name not in self.images:
            raise UnboundVariable(name)
        return self.images[name]

    def symbol_table(self) -> List[Optional[Tuple[int, ...]]]:
        """Per-symbol image tuples; coefficients map to themselves, unbound variables to None."""
        table: List[Optional[Tuple[int, ...]]] = [(sym,) for sym in range(self.alphabet.k)]
        for name in self.alphabet.variables:
            word = self.images.get(name)
            table.append(word.letters if word is not None else None)
        return table

    def sort_key(self) -> Tuple:
        """Canonical order: variable order, then shortlex on each image."""
        return tuple(self.images[name].sort_key() if name in self.images else (0, ())
                     for name in self.alphabet.variables)

    def max_image_length(self) -> int:
        return max((len(w) for w in self.images.values()), default=0)

    def renamed(self, alphabet: Alphabet, renaming: Dict[str, str]) -> "Substitution":
        return Substitution(alphabet, {renaming.get(name, name): word for name, word in self.images.items()})

    def to_dict(self) -> Dict[str, str]:
        return {name: self.alphabet.format(word) for name, word in sorted(self.images.items())}

    @classmethod
    def from_strings(cls, alphabet: Alphabet, images: Dict[str, str]) -> "Substitution":
        return cls(alphabet, {name: alphabet.parse_positive(text) for name, text in images.items()})

    def __eq__(self, other) -> bool:
        return (isinstance(other, Substitution) and self.alphabet.k == other.alphabet.k
                and self.images == other.images)

    def __hash__(self) -> int:
        return hash(tuple(sorted((name, word.letters) for name, word in self.images.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"{name}↦{text}" for name, text in self.to_dict().items())
        return f"Substitution({body})"


class GroupHomReport:
    """Outcome of extending a pair solution to a group homomorphism."""

    def __init__(self, images: Dict[str, GroupWord], relator_images: List[GroupWord]):
        self.images = images
        self.relator_images = relator_images

    @property
    def ok(self) -> bool:
        return all(r.is_identity() for r in self.relator_images)

    def __repr__(self) -> str:
        return f"GroupHomReport({len(self.images)} generators, {len(self.relator_images)} relators, ok={self.ok})"


def apply(s: Substitution, w) -> GroupWord:
    """
    Image of a positive or group word under s, reduced.

    Coefficients are fixed; variables are replaced by their images.
    """
    table = s.symbol_table()
    signed = w.letters if isinstance(w, GroupWord) else tuple((sym, 1) for sym in w)
    out: List[Tuple[int, int]] = []
    for sym, exp in signed:
        image = table[sym]
        if image is None:
            raise UnboundVariable(s.alphabet.name(sym))
        if exp > 0:
            out.extend((c, 1) for c in image)
        else:
            out.extend((c, -1) for c in reversed(image))
    return GroupWord(out)


def _expand(table: List[Optional[Tuple[int, ...]]], word: PositiveWord, alphabet: Alphabet) -> Tuple[int, ...]:
    out: List[int] = []
    for sym in word.letters:
        image = table[sym]
        if image is None:
            raise UnboundVariable(alphabet.name(sym))
        out.extend(image)
    return tuple(out)


def is_solution(s: Substitution, system: EquationSystem) -> bool:
    """True iff both sides of every equation have letter-for-letter equal images."""
    table = s.symbol_table()
    for lhs, rhs in system.equations:
        if _expand(table, lhs, system.alphabet) != _expand(table, rhs, system.alphabet):
            return False
    return True


def extend_to_group(s: Substitution, p: PairPresentation) -> GroupHomReport:
    """
    Extend s to Gr(S) and confirm every relator maps to the identity.

    Raises:
        RelationViolated: the first relator whose image does not reduce to ε
    """
    images = {name: apply(s, as_group_word(PositiveWord([p.alphabet.symbol(name)])))
              for name in p.generators
              if p.alphabet.is_coefficient(p.alphabet.symbol(name)) or name in s.images}
    relator_images = []
    for index, relator in enumerate(p.group_relators()):
        image = apply(s, relator)
        if not image.is_identity():
            raise RelationViolated(index, p.alphabet.format(image))
        relator_images.append(image)
    return GroupHomReport(images, relator_images)


def positive_cone_check(s: Substitution, elements: Sequence[GroupWord]) -> bool:
    """True iff every element maps into the positive cone."""
    return all(is_positive(apply(s, e)) for e in elements)
