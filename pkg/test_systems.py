#!/usr/bin/env python3
"""
Tests for equation systems, pair presentations and substitution checks.
"""

import random

import pytest

from errors import InvalidSystem, RelationViolated, UnboundVariable
from fixtures import create_system
from systems import (EquationSystem, Substitution, apply, extend_to_group,
                     is_solution, positive_cone_check)
from words import PositiveWord, is_positive, standard_alphabet


def subst(system: EquationSystem, **images) -> Substitution:
    return Substitution.from_strings(system.alphabet, images)


def test_apply():
    system = create_system(["XY=YX"])
    alpha = system.alphabet
    s = subst(system, X="ab")
    assert alpha.format(apply(s, alpha.parse_positive("Xa"))) == "aba"
    s = subst(system, X="ab", Y="abab")
    assert alpha.format(apply(s, alpha.parse_positive("XY"))) == "ababab"
    s = subst(system, X="a")
    assert alpha.format(apply(s, alpha.parse_group("X'aX"))) == "a"


def test_apply_unbound_variable():
    system = create_system(["XY=YX"])
    s = subst(system, X="ab")
    with pytest.raises(UnboundVariable) as info:
        apply(s, system.alphabet.parse_positive("XY"))
    assert info.value.name == "Y"


def test_apply_is_homomorphism():
    system = create_system(["XY=YX"])
    alpha = system.alphabet
    s = subst(system, X="ab", Y="b", Z="aab")
    rng = random.Random(0)
    letters = ["a", "b", "X", "Y", "Z", "X'", "a'"]
    for _ in range(200):
        u = alpha.parse_group("".join(rng.choice(letters) for _ in range(rng.randint(0, 5))))
        v = alpha.parse_group("".join(rng.choice(letters) for _ in range(rng.randint(0, 5))))
        assert apply(s, u * v) == apply(s, u) * apply(s, v)
    w = alpha.parse_positive("XaZY")
    assert is_positive(apply(s, w))


def test_is_solution():
    commute = create_system(["XY=YX"])
    assert is_solution(subst(commute, X="ab", Y="abab", Z="a"), commute)
    assert not is_solution(subst(commute, X="ab", Y="ba", Z="a"), commute)
    conj = create_system(["XZ=ZY"])
    s = subst(conj, X="ab", Y="ba", Z="aba")
    assert is_solution(s, conj)
    # independent letter-by-letter comparison
    lhs = "ab" + "aba"
    rhs = "aba" + "ba"
    assert lhs == rhs


def test_is_solution_requires_bound_variables():
    system = create_system(["XY=YX"])
    with pytest.raises(UnboundVariable):
        is_solution(subst(system, X="a"), system)


def test_renaming_invariance():
    system = create_system(["XZ=ZY"])
    renaming = {"X": "P", "Y": "Q", "Z": "R"}
    renamed = system.rename_variables(renaming)
    for images in [dict(X="ab", Y="ba", Z="a"), dict(X="ab", Y="ab", Z="b")]:
        s = subst(system, **images)
        assert is_solution(s, system) == is_solution(s.renamed(renamed.alphabet, renaming), renamed)


def test_extend_to_group():
    system = create_system(["XY=YX"])
    report = extend_to_group(subst(system, X="ab", Y="abab", Z="a"), system.presentation())
    assert report.ok
    assert all(r.is_identity() for r in report.relator_images)
    assert system.alphabet.format(report.images["Y"]) == "abab"
    with pytest.raises(RelationViolated) as info:
        extend_to_group(subst(system, X="ab", Y="ba", Z="a"), system.presentation())
    assert info.value.index == 0


def test_extend_to_group_without_relations():
    alpha = standard_alphabet(2, ["X"])
    system = EquationSystem(alpha, [])
    report = extend_to_group(Substitution.from_strings(alpha, {"X": "a"}), system.presentation())
    assert report.ok and report.relator_images == []


def test_positive_cone_check():
    system = create_system(["XY=YX"])
    alpha = system.alphabet
    assert positive_cone_check(subst(system, X="ab", Y="b", Z="a"),
                               [alpha.parse_group("X"), alpha.parse_group("Y")])
    assert not positive_cone_check(subst(system, X="a", Y="a", Z="a"), [alpha.parse_group("XY'")])
    assert positive_cone_check(subst(system, X="ab", Y="b", Z="a"), [alpha.parse_group("XY'")])


def test_pair_presentation_readings_agree():
    system = create_system(["XZ=ZY", "XY=YX"])
    p = system.presentation()
    assert p.semigroup_presentation['generators'] == p.group_presentation['generators']
    assert len(p.semigroup_presentation['relations']) == len(p.group_presentation['relators']) == 2


def test_canonical_strips_prefix_and_suffix():
    system = create_system(["aXYb=aYXb", "XaY=XbY"])
    alpha = system.alphabet
    (l0, r0), (l1, r1) = system.canonical()
    assert (alpha.format(l0), alpha.format(r0)) == ("XY", "YX")
    assert (alpha.format(l1), alpha.format(r1)) == ("a", "b")
    # raw form kept for error messages
    assert system.format_equation(0) == "aXYb = aYXb"


def test_unrestricted():
    system = create_system(["Xa=aX"], variables=("X",))
    free = system.unrestricted()
    assert free.alphabet.variables == ("X", "A", "B")
    s = Substitution.from_strings(free.alphabet, {"X": "bb", "A": "b", "B": "a"})
    assert is_solution(s, free)


def test_invalid_systems():
    alpha = standard_alphabet(1, ["X"])
    with pytest.raises(InvalidSystem):
        EquationSystem(alpha, [(PositiveWord(), alpha.parse_positive("X"))])
    with pytest.raises(ValueError):
        Substitution(alpha, {"X": PositiveWord()})
    with pytest.raises(ValueError):
        Substitution(alpha, {"X": alpha.parse_positive("X")})


if __name__ == "__main__":
    print("\n" + "=" * 70)
    print("SYSTEMS TESTS")
    print("=" * 70)
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"✓ {name}")
