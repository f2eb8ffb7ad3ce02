"""Bundled equation corpus and band-system fixtures."""

from fractions import Fraction
from typing import Dict, Optional, Sequence

from diagrams import (DehnTwist, GeneralizedAbelian, MRDiagram, Resolution,
                      ResolutionLevel, SeparableDecomposition, SolutionGraph)
from pseudogroup import BandSystem
from systems import EquationSystem
from words import standard_alphabet


def create_system(equations: Sequence[str], variables: Sequence[str] = ("X", "Y", "Z"), k: int = 2) -> EquationSystem:
    """
    Build a system from 'LHS=RHS' strings.

    Args:
        equations: Equations over the first k lowercase letters and the variables
        variables: Exactly the variables of the system, in order
        k: Number of coefficient letters

    Returns:
        EquationSystem over standard_alphabet(k, variables)
    """
    alpha = standard_alphabet(k, list(variables))
    pairs = []
    for text in equations:
        lhs, rhs = text.split("=")
        pairs.append((alpha.parse_positive(lhs.strip()), alpha.parse_positive(rhs.strip())))
    return EquationSystem(alpha, pairs)


def create_equation_corpus() -> Dict[str, EquationSystem]:
    """
    Small systems with known solution structure, all over k = 2 unless noted.

    commute      XY = YX          powers of a common root
    conjugacy    XZ = ZY          X = uv, Y = vu, Z = (uv)^m u
    centralizer  Xa = aX          X = a^m
    no_solution  Xa = bX          last letters differ
    two_block    Xa = aX, Yb = bY two independent centralizers
    tautology    X = X            every word (k = 1)
    squares      XX = YY          X = Y
    middle       XaY = YaX        X and Y in a common cyclic family
    three_cycle  XYZ = ZYX        mixed commutation
    """
    return {
        'commute': create_system(["XY=YX"], ("X", "Y")),
        'conjugacy': create_system(["XZ=ZY"], ("X", "Y", "Z")),
        'centralizer': create_system(["Xa=aX"], ("X",)),
        'no_solution': create_system(["Xa=bX"], ("X",)),
        'two_block': create_system(["Xa=aX", "Yb=bY"], ("X", "Y")),
        'tautology': create_system(["X=X"], ("X",), k=1),
        'squares': create_system(["XX=YY"], ("X", "Y")),
        'middle': create_system(["XaY=YaX"], ("X", "Y")),
        'three_cycle': create_system(["XYZ=ZYX"], ("X", "Y", "Z")),
    }


def create_fixture_f1() -> BandSystem:
    """
    Two components; A is isolated, B is not.

        [0, 2]          [3 .............. 9]
        A               B=[3,5]
                           A'=[4,6]
                                 B'=[6,8]
    """
    return BandSystem.from_pairs(
        [(0, 2), (3, 9)],
        [("A", (0, 2), (4, 6)), ("B", (3, 5), (6, 8))],
    )


def create_fixture_f2() -> BandSystem:
    """
    One component [0, 10]; [0, 2] is a once-covered prefix of A.

        A=[0,4]      A'=[6,10]
        C=[2,6]      C'=[4,8]
    """
    return BandSystem.from_pairs(
        [(0, 10)],
        [("A", (0, 4), (6, 10)), ("C", (2, 6), (4, 8))],
    )


def create_fixture_f3() -> BandSystem:
    """
    One component [0, 12]; [2, 4] is once covered and strictly inside A.

        A=[0,6]      A'=[6,12]
        C=[0,2]      C'=[4,6]
    """
    return BandSystem.from_pairs(
        [(0, 12)],
        [("A", (0, 6), (6, 12)), ("C", (0, 2), (4, 6))],
    )


def create_fixture_f4() -> BandSystem:
    """[0, 2] carries A and its own partner A' (offset 0)."""
    return BandSystem.from_pairs(
        [(0, 6)],
        [("A", (0, 2), (0, 2)), ("C", (2, 4), (4, 6))],
    )


def create_fixture_f4b() -> BandSystem:
    """[0, 2] carries A and C, which are not partners; A' and C' get paired with offset 3."""
    return BandSystem.from_pairs(
        [(0, 9)],
        [("A", (0, 2), (3, 5)), ("C", (0, 2), (6, 8))],
    )


def create_fixture_f5() -> BandSystem:
    """
    Carrier B reaches the positive end 12 and carries C.

        B=[6,12]  ↔ B'=[0,6]
        C=[9,11]  ↔ C'=[1,3]
        E=[4,8]   ↔ E'=[0,4]
    """
    return BandSystem.from_pairs(
        [(0, 12)],
        [("B", (6, 12), (0, 6)), ("C", (9, 11), (1, 3)), ("E", (4, 8), (0, 4))],
    )


def create_fixture_f6() -> BandSystem:
    """A four-pair system on [0, 24] that runs several machine rounds."""
    return BandSystem.from_pairs(
        [(0, 24)],
        [
            ("A", (0, 8), (10, 18)),
            ("B", (3, 12), (14, 23)),
            ("C", (6, 10), (18, 22)),
            ("D", (11, 15), (19, 23)),
        ],
    )


def create_rotation_fixture(alpha: Fraction = Fraction(89, 233)) -> BandSystem:
    """
    Rotation of [0, 1] by alpha, written as two pairs.

        A=[0, 1-alpha]   ↔ A'=[alpha, 1]
        C=[1-alpha, 1]   ↔ C'=[0, alpha]
    """
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ValueError(f"Rotation number must lie in (0, 1), got {alpha}")
    one = Fraction(1)
    return BandSystem.from_pairs(
        [(0, 1)],
        [("A", (0, one - alpha), (alpha, one)), ("C", (one - alpha, one), (0, alpha))],
    )


def create_fixture_f7() -> BandSystem:
    """Rotation by 89/233: ten positive-end twists before the lengths tie."""
    return create_rotation_fixture(Fraction(89, 233))


def create_periodic_fixture(period: int = 3, repeats: int = 4) -> BandSystem:
    """The shift by ``period`` on [0, period * repeats]; its first generator has length ``period``."""
    top = period * repeats
    return BandSystem.from_pairs([(0, top)], [("P", (0, top - period), (period, top))])


def create_band_fixtures() -> Dict[str, BandSystem]:
    return {
        'F1': create_fixture_f1(),
        'F2': create_fixture_f2(),
        'F3': create_fixture_f3(),
        'F4': create_fixture_f4(),
        'F4b': create_fixture_f4b(),
        'F5': create_fixture_f5(),
        'F6': create_fixture_f6(),
        'F7': create_fixture_f7(),
    }


# --- solution graphs and diagrams ----------------------------------------------

def create_conjugacy_graph() -> SolutionGraph:
    """
    Rose with two loops at o, for XZ = ZY.

         u
       ↻ o ↺ v        X = u·v   Y = v·u   Z = u
    """
    return SolutionGraph(["o"], [("u", "o", "o"), ("v", "o", "o")], "o",
                         {"X": ["u", "v"], "Y": ["v", "u"], "Z": ["u"]})


def create_broken_conjugacy_graph() -> SolutionGraph:
    """Same rose with Y read the wrong way round; most assignments are not solutions."""
    return SolutionGraph(["o"], [("u", "o", "o"), ("v", "o", "o")], "o",
                         {"X": ["u", "v"], "Y": ["u", "v"], "Z": ["u"]})


def create_conjugacy_resolution(graph: Optional[SolutionGraph] = None) -> Resolution:
    """Z ↦ X·Z grows the conjugator; the abelian twists handle X, Y, Z with a common root."""
    levels = [
        ResolutionLevel([DehnTwist("Z", ["X"])], note="cyclic edge carrying Z"),
        ResolutionLevel([GeneralizedAbelian(["X", "Y", "Z"], ["X", "Y"]),
                         GeneralizedAbelian(["X", "Y", "Z"], ["Z"])], note="abelian vertex"),
    ]
    return Resolution("conjugacy", graph or create_conjugacy_graph(), levels)


def create_commutation_graph() -> SolutionGraph:
    """One loop w at o: X = w, Y = w·w."""
    return SolutionGraph(["o"], [("w", "o", "o")], "o", {"X": ["w"], "Y": ["w", "w"]})


def create_commutation_resolution() -> Resolution:
    levels = [ResolutionLevel([GeneralizedAbelian(["X", "Y"], ["X"]),
                               GeneralizedAbelian(["X", "Y"], ["Y"])], note="abelian vertex")]
    return Resolution("commutation", create_commutation_graph(), levels)


def create_independent_loops_graph() -> SolutionGraph:
    """X = u, Y = v: covers every solution of XY = YX but produces non-solutions too."""
    return SolutionGraph(["o"], [("u", "o", "o"), ("v", "o", "o")], "o", {"X": ["u"], "Y": ["v"]})


def create_two_block_decomposition() -> SeparableDecomposition:
    """
    Two vertex systems joined by one separating edge, no paths.

      {X} --l--> {Y}
    """
    return SeparableDecomposition({"p": ["X"], "q": ["Y"]}, [("l", "p", "q")], "p", {})


def create_conjugacy_decomposition() -> SeparableDecomposition:
    """
    Rose with two loops and empty vertex system, read as the conjugacy family.

      X = u·v, Y = v·u, Z = u
    """
    return SeparableDecomposition({"o": []}, [("u", "o", "o"), ("v", "o", "o")], "o",
                                  {"X": ["u", "v"], "Y": ["v", "u"], "Z": ["u"]})


def create_splitting_decomposition() -> SeparableDecomposition:
    """Vertex {X} with a loop l and Y read along l; fails to separate X ↦ a, Y ↦ aa in XY = YX."""
    return SeparableDecomposition({"p": ["X"]}, [("l", "p", "p")], "p", {"Y": ["l"]})


def create_conjugacy_diagram() -> MRDiagram:
    return MRDiagram(create_equation_corpus()['conjugacy'], [create_conjugacy_resolution()])


def create_commutation_diagram() -> MRDiagram:
    return MRDiagram(create_equation_corpus()['commute'], [create_commutation_resolution()])
