#!/usr/bin/env python3
"""
Tests for solution graphs, twists, coverage checks and separability.
"""

import json

import pytest

from diagrams import (DehnTwist, GeneralizedAbelian, GraphValidity,
                      LabelAssignment, LabelTwist, MRDiagram, Resolution,
                      ResolutionLevel, SeparableDecomposition, SolutionGraph,
                      apply_twist, diagram_check, family_cover_check,
                      separability_check, substitute, to_dot, verify_graph)
from errors import (NotSeparable, PreconditionViolated, TwistBreaksSolution,
                    TwistNotApplicable, UnboundLabel)
from fixtures import (create_broken_conjugacy_graph,
                      create_commutation_diagram, create_commutation_graph,
                      create_commutation_resolution, create_conjugacy_diagram,
                      create_conjugacy_decomposition,
                      create_conjugacy_graph, create_conjugacy_resolution,
                      create_equation_corpus, create_independent_loops_graph,
                      create_splitting_decomposition, create_system,
                      create_two_block_decomposition)
from oracle import SearchBudget, enumerate_solutions
from systems import Substitution, is_solution


def conjugacy():
    return create_equation_corpus()['conjugacy']


def commute():
    return create_equation_corpus()['commute']


def solution(system, **images):
    return Substitution.from_strings(system.alphabet, images)


def test_substitute_conjugacy_graph():
    system = conjugacy()
    g = create_conjugacy_graph()
    s = substitute(g, LabelAssignment.from_strings(system.alphabet, {"u": "a", "v": "b"}))
    assert s.to_dict() == {"X": "ab", "Y": "ba", "Z": "a"}
    assert is_solution(s, system)

    s = substitute(g, LabelAssignment.from_strings(system.alphabet, {"u": "ab", "v": "ba"}))
    assert s.to_dict() == {"X": "abba", "Y": "baab", "Z": "ab"}
    assert is_solution(s, system)


def test_substitute_commutation_loop():
    system = commute()
    s = substitute(create_commutation_graph(), LabelAssignment.from_strings(system.alphabet, {"w": "aab"}))
    assert s.to_dict() == {"X": "aab", "Y": "aabaab"}
    assert is_solution(s, system)


def test_substitute_unbound_label():
    system = conjugacy()
    with pytest.raises(UnboundLabel):
        substitute(create_conjugacy_graph(), LabelAssignment.from_strings(system.alphabet, {"u": "a"}))


def test_graph_validation():
    with pytest.raises(PreconditionViolated):
        SolutionGraph(["o", "p"], [("u", "o", "p")], "o", {"X": ["u"]})
    with pytest.raises(PreconditionViolated):
        SolutionGraph(["o"], [("u", "o", "o"), ("u", "o", "o")], "o", {"X": ["u"]})
    with pytest.raises(PreconditionViolated):
        SolutionGraph(["o", "p"], [("u", "o", "o")], "o", {"X": ["u"]})
    with pytest.raises(PreconditionViolated):
        SolutionGraph(["o"], [("u", "o", "o")], "o", {"X": []})
    # o -> p -> o is a closed positive path
    g = SolutionGraph(["o", "p"], [("s", "o", "p"), ("t", "p", "o")], "o", {"X": ["s", "t"]})
    assert g.longest_path == 2


def test_verify_graph():
    assert verify_graph(create_conjugacy_graph(), conjugacy()) is GraphValidity.FORMAL
    assert verify_graph(create_commutation_graph(), commute()) is GraphValidity.FORMAL
    assert verify_graph(create_broken_conjugacy_graph(), conjugacy(), seed=3) is GraphValidity.INVALID
    assert verify_graph(create_independent_loops_graph(), commute(), seed=3) is GraphValidity.INVALID


def test_verify_graph_empirical():
    """Over one letter every pair commutes, so X = u, Y = v is valid but not an identity."""
    system = create_equation_corpus()["commute"]
    unary = create_system(["XY=YX"], ("X", "Y"), k=1)
    assert verify_graph(create_independent_loops_graph(), unary) is GraphValidity.EMPIRICAL
    assert verify_graph(create_independent_loops_graph(), system, seed=0) is GraphValidity.INVALID


def test_dehn_twist_on_conjugacy_solution():
    system = conjugacy()
    s = solution(system, X="ab", Y="ba", Z="a")
    twisted = apply_twist(DehnTwist("Z", ["X"]), s, system)
    assert twisted.to_dict() == {"X": "ab", "Y": "ba", "Z": "aba"}
    assert apply_twist(DehnTwist("Z", ["X"]), s, system, exponent=2).image("Z") == \
        system.alphabet.parse_positive("ababa")


def test_generalized_abelian_exponent():
    system = commute()
    s = solution(system, X="a", Y="aa")
    twisted = apply_twist(GeneralizedAbelian(["X", "Y"], ["Y"]), s, system, exponent=5)
    assert twisted.to_dict() == {"X": "a", "Y": "aaaaa"}


def test_generalized_abelian_needs_common_root():
    system = conjugacy()
    s = solution(system, X="ab", Y="ba", Z="a")
    with pytest.raises(TwistNotApplicable):
        apply_twist(GeneralizedAbelian(["X", "Y", "Z"], ["Z"]), s, system, exponent=2)
    assert list(GeneralizedAbelian(["X", "Y", "Z"], ["Z"]).exponents(s, 10)) == []


def test_wrong_twist_breaks_solution():
    system = conjugacy()
    s = solution(system, X="ab", Y="ba", Z="a")
    with pytest.raises(TwistBreaksSolution) as info:
        apply_twist(DehnTwist("Z", ["Y"]), s, system)
    assert info.value.equation == 0


def test_label_twist_needs_context():
    system = conjugacy()
    g = create_conjugacy_graph()
    a = LabelAssignment.from_strings(system.alphabet, {"u": "a", "v": "b"})
    s = substitute(g, a)
    twist = LabelTwist("u", ["u", "v"])
    with pytest.raises(TwistNotApplicable):
        apply_twist(twist, s, system)
    twisted = apply_twist(twist, s, system, context=(g, a))
    assert twisted.to_dict() == {"X": "abab", "Y": "baba", "Z": "aba"}


def test_label_twist_family_deduplicates_by_substitution():
    """u ↦ (uv)·u lands on graph substitutions already produced, so the family does not grow."""
    system = conjugacy()
    r = Resolution("label", create_conjugacy_graph(), [ResolutionLevel([LabelTwist("u", ["u", "v"])])])
    budget = SearchBudget(max_len=4)
    flat = family_cover_check(r, system, budget, twist_depth=0)
    twisted = family_cover_check(r, system, budget, twist_depth=2)
    assert twisted.family_size == flat.family_size
    assert twisted.covered == flat.covered
    assert solution(system, X="abab", Y="baba", Z="aba") in twisted.covered


def test_twist_closure_on_oracle_solutions():
    """Every bundled twist maps bound-4 solutions to solutions."""
    for system, resolution in ((conjugacy(), create_conjugacy_resolution()),
                               (commute(), create_commutation_resolution())):
        for s in enumerate_solutions(system, SearchBudget(max_len=4)):
            for t in resolution.twists:
                for m in list(t.exponents(s, 8))[:3]:
                    assert is_solution(apply_twist(t, s, system, m), system)


def test_conjugacy_coverage():
    system = conjugacy()
    budget = SearchBudget(max_len=5)
    report = family_cover_check(create_conjugacy_resolution(), system, budget, twist_depth=4)
    assert report.ok
    assert report.non_solutions == 0
    assert len(report.covered) == len(enumerate_solutions(system, budget))

    broken = family_cover_check(create_conjugacy_resolution(create_broken_conjugacy_graph()), system, budget,
                                twist_depth=4)
    assert not broken.ok
    assert len(broken.covered) < len(report.covered)
    assert broken.non_solutions > 0


def test_commutation_coverage():
    report = family_cover_check(create_commutation_resolution(), commute(), SearchBudget(max_len=6), twist_depth=2)
    assert report.ok and report.covered


def test_independent_loops_coverage():
    """X = u, Y = v produces every solution, but only among many non-solutions."""
    system = commute()
    r = Resolution("loops", create_independent_loops_graph(), [])
    report = family_cover_check(r, system, SearchBudget(max_len=3), twist_depth=0)
    assert report.ok
    assert report.non_solutions > 0
    assert verify_graph(r.terminal, system) is GraphValidity.INVALID


def test_twistless_loop_misses_solutions():
    system = commute()
    r = Resolution("loop only", create_commutation_graph(), [])
    report = family_cover_check(r, system, SearchBudget(max_len=4), twist_depth=3)
    uncovered = {tuple(sorted(s.to_dict().items())) for s in report.uncovered}
    assert (("X", "a"), ("Y", "a")) in uncovered


def test_coverage_monotone():
    system = conjugacy()
    previous = set()
    for depth in range(0, 4):
        report = family_cover_check(create_conjugacy_resolution(), system, SearchBudget(max_len=4), depth)
        covered = set(report.covered)
        assert previous <= covered
        previous = covered
    shorter = set(family_cover_check(create_conjugacy_resolution(), system, SearchBudget(max_len=3), 2).covered)
    longer = set(family_cover_check(create_conjugacy_resolution(), system, SearchBudget(max_len=4), 2).covered)
    assert shorter <= longer


def test_graph_must_bind_every_variable():
    system = conjugacy()
    r = Resolution("partial", SolutionGraph(["o"], [("u", "o", "o")], "o", {"X": ["u"]}), [])
    with pytest.raises(PreconditionViolated):
        family_cover_check(r, system, SearchBudget(max_len=2), twist_depth=0)


def test_separability_two_block():
    system = create_equation_corpus()['two_block']
    s = solution(system, X="aa", Y="b")
    marked = separability_check(create_two_block_decomposition(), s, system)
    assert marked.erase() == s
    assert marked.label_values == {"l": None}
    assert marked.markers == {"l": "m1"}


def test_separability_two_block_exhaustive():
    system = create_equation_corpus()['two_block']
    for s in enumerate_solutions(system, SearchBudget(max_len=4)):
        assert separability_check(create_two_block_decomposition(), s, system).erase() == s


def test_separability_places_markers():
    system = conjugacy()
    s = solution(system, X="ab", Y="ba", Z="a")
    marked = separability_check(create_conjugacy_decomposition(), s, system)
    alpha = marked.substitution.alphabet
    assert marked.markers == {"u": "m1", "v": "m2"}
    assert {label: system.alphabet.format(w) for label, w in marked.label_values.items()} == {"u": "a", "v": "b"}
    assert marked.positions == {"u": 0, "v": 0}
    assert alpha.format(marked.substitution.image("X")) == "m1am2b"
    assert alpha.format(marked.substitution.image("Y")) == "m2bm1a"
    assert alpha.format(marked.substitution.image("Z")) == "m1a"
    assert marked.erase() == s


def test_separability_places_markers_exhaustive():
    system = conjugacy()
    separable = 0
    for s in enumerate_solutions(system, SearchBudget(max_len=4)):
        try:
            marked = separability_check(create_conjugacy_decomposition(), s, system)
        except PreconditionViolated:
            continue
        separable += 1
        assert marked.positions == {"u": 0, "v": 0}
        assert all(w is not None for w in marked.label_values.values())
        assert marked.erase() == s
    assert separable > 0


def test_splitting_decomposition_not_separable():
    system = commute()
    with pytest.raises(NotSeparable) as info:
        separability_check(create_splitting_decomposition(), solution(system, X="a", Y="aa"), system)
    assert info.value.equation == 0
    for s in enumerate_solutions(system, SearchBudget(max_len=4)):
        with pytest.raises(NotSeparable):
            separability_check(create_splitting_decomposition(), s, system)


def test_separable_marker_placement():
    """A marker inside Y breaks Yb = bY, the second equation."""
    system = create_equation_corpus()['two_block']
    d = SeparableDecomposition({"p": ["X"]}, [("l", "p", "p")], "p", {"Y": ["l"]})
    s = solution(system, X="a", Y="bb")
    with pytest.raises(NotSeparable) as info:
        separability_check(d, s, system)
    assert info.value.equation == 1


def test_separability_empty_decomposition():
    system = commute()
    s = solution(system, X="a", Y="aa")
    d = SeparableDecomposition({"p": ["X", "Y"]}, [], "p", {})
    marked = separability_check(d, s, system)
    assert marked.erase() == s and marked.markers == {}


def test_separability_rejects_non_solution():
    system = commute()
    with pytest.raises(PreconditionViolated):
        separability_check(create_splitting_decomposition(), solution(system, X="a", Y="b"), system)


def test_diagram_checks():
    report = diagram_check(create_conjugacy_diagram(), SearchBudget(max_len=5), twist_depth=4)
    assert report.ok and report.total > 0
    assert diagram_check(create_commutation_diagram(), SearchBudget(max_len=6), twist_depth=2).ok

    empty = MRDiagram(conjugacy(), [])
    report = diagram_check(empty, SearchBudget(max_len=3), twist_depth=1)
    assert len(report.uncovered) == report.total > 0


def test_diagram_json_round_trip():
    m = create_conjugacy_diagram()
    m.resolutions[0].levels.append(ResolutionLevel([], note="separating", decomposition=create_two_block_decomposition()))
    text = json.dumps(m.to_dict(), sort_keys=True)
    again = MRDiagram.from_dict(json.loads(text))
    assert json.dumps(again.to_dict(), sort_keys=True) == text
    assert [t.describe() for t in again.resolutions[0].twists] == [t.describe() for t in m.resolutions[0].twists]


def test_dot_export():
    dot = to_dot(create_conjugacy_graph())
    assert dot.startswith("digraph") and '"o" -> "o" [label="u"];' in dot
    dot = to_dot(create_two_block_decomposition(), name="D")
    assert 'style=dashed' in dot and 'xlabel="{X}"' in dot


if __name__ == "__main__":
    print("\n" + "=" * 70)
    print("DIAGRAM TESTS")
    print("=" * 70)
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"✓ {name}")
