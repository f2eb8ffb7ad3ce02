"""Alphabets, positive words and reduced group words.

Symbols are interned integers: coefficients take 0..k-1, variables follow.
The alphabet keeps the name table used for display and parsing. In the
display syntax lowercase tokens are coefficients, uppercase tokens are
variables, and a trailing ``'`` marks an inverse (``aB'a``).
"""

import itertools
import re
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from errors import EquationSyntaxError

# A token is one letter followed by optional digits, e.g. ``a``, ``X2``, ``m10``.
TOKEN_PATTERN = re.compile(r"([A-Za-z][0-9]*)('?)")

Signed = Tuple[int, int]


class Alphabet:
    """Ranked alphabet of coefficients a_1..a_k and variables x_1..x_n."""

    def __init__(self, coefficients: Sequence[str], variables: Sequence[str] = ()):
        """
        Initialize an alphabet.

        Args:
            coefficients: Coefficient names, lowercase tokens, in rank order
            variables: Variable names, uppercase tokens, in rank order
        """
        for name in coefficients:
            if not TOKEN_PATTERN.fullmatch(name) or not name[0].islower():
                raise ValueError(f"Invalid coefficient name: {name!r}")
        for name in variables:
            if not TOKEN_PATTERN.fullmatch(name) or not name[0].isupper():
                raise ValueError(f"Invalid variable name: {name!r}")
        names = list(coefficients) + list(variables)
        if len(set(names)) != len(names):
            raise ValueError(f"Duplicate names in alphabet: {names}")

        self.coefficients: Tuple[str, ...] = tuple(coefficients)
        self.variables: Tuple[str, ...] = tuple(variables)
        self.names: Tuple[str, ...] = tuple(names)
        self._index: Dict[str, int] = {name: i for i, name in enumerate(names)}

    @property
    def k(self) -> int:
        return len(self.coefficients)

    @property
    def n(self) -> int:
        return len(self.variables)

    def symbol(self, name: str) -> int:
        """Interned symbol of a name."""
        if name not in self._index:
            raise KeyError(f"Letter {name} is not in the alphabet")
        return self._index[name]

    def name(self, symbol: int) -> str:
        return self.names[symbol]

    def is_coefficient(self, symbol: int) -> bool:
        return symbol < self.k

    def is_variable(self, symbol: int) -> bool:
        return self.k <= symbol < len(self.names)

    def variable_symbols(self) -> range:
        return range(self.k, len(self.names))

    def extended(self, coefficients: Sequence[str] = (), variables: Sequence[str] = ()) -> "Alphabet":
        """New alphabet with extra coefficients and variables appended to each block."""
        return Alphabet(list(self.coefficients) + list(coefficients),
                        list(self.variables) + list(variables))

    def parse_signed(self, text: str, line: int = 1, col_offset: int = 0) -> List[Signed]:
        """
        Parse display syntax into a raw signed sequence (not reduced).

        Args:
            text: Word text such as ``X'aX``; whitespace is ignored
            line: Line number used in syntax errors
            col_offset: Column of ``text`` inside its line, zero based

        Returns:
            List of (symbol, exponent) pairs
        """
        letters: List[Signed] = []
        pos = 0
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            match = TOKEN_PATTERN.match(text, pos)
            if not match:
                raise EquationSyntaxError(line, col_offset + pos + 1, "a letter")
            name, prime = match.group(1), match.group(2)
            if name not in self._index:
                raise EquationSyntaxError(line, col_offset + pos + 1, f"a letter of the alphabet, got {name}")
            letters.append((self._index[name], -1 if prime else 1))
            pos = match.end()
        return letters

    def parse_positive(self, text: str, line: int = 1, col_offset: int = 0) -> "PositiveWord":
        signed = self.parse_signed(text, line, col_offset)
        if any(exp < 0 for _, exp in signed):
            raise EquationSyntaxError(line, col_offset + text.index("'") + 1, "a positive word without inverses")
        return PositiveWord(sym for sym, _ in signed)

    def parse_group(self, text: str, line: int = 1) -> "GroupWord":
        return GroupWord(self.parse_signed(text, line))

    def format(self, word) -> str:
        """Display a PositiveWord or GroupWord; the empty word prints as ``1``."""
        if isinstance(word, GroupWord):
            parts = [self.names[sym] + ("'" if exp < 0 else "") for sym, exp in word.letters]
        else:
            parts = [self.names[sym] for sym in word]
        return "".join(parts) if parts else "1"

    def to_dict(self) -> Dict:
        return {'coefficients': list(self.coefficients), 'variables': list(self.variables)}

    @classmethod
    def from_dict(cls, data: Dict) -> "Alphabet":
        return cls(data['coefficients'], data.get('variables', []))

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.names == other.names and self.k == other.k

    def __hash__(self) -> int:
        return hash((self.coefficients, self.variables))

    def __repr__(self) -> str:
        return f"Alphabet(coefficients={list(self.coefficients)}, variables={list(self.variables)})"


def standard_alphabet(k: int, variables: Sequence[str] = ()) -> Alphabet:
    """Alphabet with coefficients a, b, c, ... (a1, a2, ... past 26)."""
    if k <= 26:
        coefficients = [chr(ord('a') + i) for i in range(k)]
    else:
        coefficients = [f"a{i + 1}" for i in range(k)]
    return Alphabet(coefficients, variables)


class PositiveWord:
    """Immutable word over interned symbols, no inverses. Hashable."""

    __slots__ = ('letters',)

    def __init__(self, letters: Iterable[int] = ()):
        self.letters: Tuple[int, ...] = tuple(letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return PositiveWord(self.letters[item])
        return self.letters[item]

    def __add__(self, other: "PositiveWord") -> "PositiveWord":
        return concat(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, PositiveWord) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(('P', self.letters))

    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        """Shortlex key: length first, then letters."""
        return (len(self.letters), self.letters)

    def __lt__(self, other: "PositiveWord") -> bool:
        return self.sort_key() < other.sort_key()

    def __repr__(self) -> str:
        return f"PositiveWord({list(self.letters)})"


class GroupWord:
    """Reduced word over signed symbols. Construction always reduces."""

    __slots__ = ('letters',)

    def __init__(self, letters: Iterable[Signed] = ()):
        self.letters: Tuple[Signed, ...] = _free_reduce(letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        return GroupWord(self.letters + other.letters)

    def __invert__(self) -> "GroupWord":
        return inverse(self)

    def __pow__(self, m: int) -> "GroupWord":
        return power(self, m)

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupWord) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(('G', self.letters))

    def is_identity(self) -> bool:
        return not self.letters

    def to_positive(self) -> Optional[PositiveWord]:
        """The same word as a PositiveWord, or None if it has an inverse letter."""
        if any(exp < 0 for _, exp in self.letters):
            return None
        return PositiveWord(sym for sym, _ in self.letters)

    def __repr__(self) -> str:
        return f"GroupWord({list(self.letters)})"


def _free_reduce(letters: Iterable[Signed]) -> Tuple[Signed, ...]:
    stack: List[Signed] = []
    for sym, exp in letters:
        if exp not in (1, -1):
            raise ValueError(f"Exponent must be +1 or -1, got {exp}")
        if stack and stack[-1][0] == sym and stack[-1][1] == -exp:
            stack.pop()
        else:
            stack.append((sym, exp))
    return tuple(stack)


def concat(u: PositiveWord, v: PositiveWord) -> PositiveWord:
    return PositiveWord(u.letters + v.letters)


def reduce(w: Iterable[Signed]) -> GroupWord:
    """Free reduction of a raw signed sequence (or of a GroupWord's letters)."""
    if isinstance(w, GroupWord):
        return w
    return GroupWord(w)


def is_positive(w: GroupWord) -> bool:
    """True iff w is a nonempty word with every exponent +1."""
    return len(w.letters) >= 1 and all(exp == 1 for _, exp in w.letters)


def as_group_word(w: PositiveWord) -> GroupWord:
    return GroupWord((sym, 1) for sym in w)


def inverse(w: GroupWord) -> GroupWord:
    return GroupWord((sym, -exp) for sym, exp in reversed(w.letters))


def power(w, m: int):
    """w^m. Positive words need m >= 0; group words accept any integer."""
    if isinstance(w, PositiveWord):
        if m < 0:
            raise ValueError(f"Positive words have no negative powers (m={m})")
        return PositiveWord(w.letters * m)
    if m < 0:
        return power(inverse(w), -m)
    return GroupWord(w.letters * m)


def primitive_root(w: PositiveWord) -> Tuple[PositiveWord, int]:
    """
    Decompose w = root^exponent with root not a proper power.

    Args:
        w: Nonempty positive word

    Returns:
        (root, exponent)
    """
    n = len(w)
    if n == 0:
        raise ValueError("The empty word has no primitive root")
    letters = w.letters
    for p in range(1, n + 1):
        if n % p == 0 and letters[:p] * (n // p) == letters:
            return PositiveWord(letters[:p]), n // p
    raise AssertionError("unreachable: the whole word is always a period")


def positive_words(k: int, max_len: int, min_len: int = 1) -> Iterator[PositiveWord]:
    """All words over coefficients 0..k-1 with lengths in [min_len, max_len], shortlex order."""
    for length in range(min_len, max_len + 1):
        for letters in itertools.product(range(k), repeat=length):
            yield PositiveWord(letters)
