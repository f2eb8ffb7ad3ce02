#!/usr/bin/env python3
"""
Tests for band systems: coverage, the associated graph, the four moves,
positive-end transformations, generators and the diagnostics.
"""

import random
from fractions import Fraction

import pytest

from errors import (DegenerateOverlap, InvalidBandSystem, NoOverlap,
                    NotIsolated, PreconditionViolated)
from fixtures import (create_band_fixtures, create_fixture_f1,
                      create_fixture_f2, create_fixture_f3, create_fixture_f4,
                      create_fixture_f4b, create_fixture_f5, create_fixture_f6,
                      create_fixture_f7, create_periodic_fixture,
                      create_rotation_fixture)
from pseudogroup import (BandSystem, Generator, GeneratorSet, MoveType,
                         StepStatus, WeightTag, associated_graph,
                         classify_weights, compose_expressions,
                         coverage_profile, dehn_twist_positive_end,
                         dual_positions, entire_transformation,
                         euler_characteristic, extract_generators,
                         move_remove_double, move_remove_isolated,
                         move_split_interior, move_trim_semi_isolated,
                         orbit_partition, positive_expression,
                         replay_expression, rips_step, sample_points,
                         stationary_words, surviving_points)

F = Fraction


def create_interior_only_system() -> BandSystem:
    """Every base end is covered twice; the only once-covered runs are interior."""
    return BandSystem.from_pairs(
        [(0, 10)],
        [("A", (0, 5), (5, 10)), ("C", (0, 1), (9, 10)), ("D", (4, 5), (5, 6))],
    )


def create_two_split_system() -> BandSystem:
    """A carries two interior once-covered runs, (1, 4) and (6, 9)."""
    return BandSystem.from_pairs(
        [(0, 20)],
        [("A", (0, 10), (10, 20)), ("C", (0, 1), (4, 5)), ("D", (9, 10), (5, 6))],
    )


def assert_orbits_preserved(old: BandSystem, new: BandSystem, seed: int = 0):
    points = sample_points(old, 200, seed)
    kept = surviving_points(old, new, points)
    assert orbit_partition(old, kept) == orbit_partition(new, kept)


def test_associated_graph_examples():
    loop = BandSystem.from_pairs([(0, 2)], [("A", (0, 1), (1, 2))])
    graph = associated_graph(loop)
    assert len(graph.vertices) == 1 and graph.graph.number_of_edges() == 1
    assert graph.euler_characteristic == 0

    f6 = create_fixture_f6()
    assert euler_characteristic(f6) == 1 - f6.pair_count

    dumbbell = BandSystem.from_pairs([(0, 5)], [("A", (0, 2), (3, 5))])
    assert euler_characteristic(dumbbell) == 1


def test_coverage_profile():
    empty = BandSystem([(0, 1)], [])
    assert all(s.multiplicity == 0 for s in coverage_profile(empty).segments)

    disjoint = BandSystem.from_pairs([(0, 5)], [("A", (0, 2), (3, 5))])
    profile = coverage_profile(disjoint)
    assert profile.multiplicity_at(F(1)) == 1 and profile.multiplicity_at(F(4)) == 1
    assert profile.multiplicity_at(F(5, 2)) == 0

    f6 = create_fixture_f6()
    profile = coverage_profile(f6)
    for t in sample_points(f6, 1000, seed=1):
        segment = next(s for s in profile.segments if s.lo < t < s.hi)
        assert segment.multiplicity == profile.multiplicity_at(t)
    assert max(s.multiplicity for s in profile.segments) >= 2


def test_remove_isolated():
    f1 = create_fixture_f1()
    after = move_remove_isolated(f1, "A")
    assert after.pair_count == f1.pair_count - 1
    assert after.components == [(F(3), F(9))]
    assert euler_characteristic(after) >= euler_characteristic(f1)
    with pytest.raises(NotIsolated):
        move_remove_isolated(f1, "B")


def test_trim_semi_isolated():
    f2 = create_fixture_f2()
    after = move_trim_semi_isolated(f2, (0, 2))
    assert after.bases["A"].support == (F(2), F(4))
    assert after.bases["A'"].support == (F(8), F(10))
    assert f2.total_length() == 16 and after.total_length() == 12
    assert after.pair_count == f2.pair_count
    with pytest.raises(PreconditionViolated):
        move_trim_semi_isolated(f2, (2, 4))
    with pytest.raises(PreconditionViolated):
        move_trim_semi_isolated(create_fixture_f3(), (2, 4))


def test_split_interior():
    f3 = create_fixture_f3()
    after = move_split_interior(f3, (2, 4))
    assert after.pair_count == f3.pair_count + 1
    assert len(associated_graph(after).vertices) == len(associated_graph(f3).vertices) + 2
    assert euler_characteristic(f3) == -1 and euler_characteristic(after) == 0
    after.validate()
    assert after.bases["A.1"].support == (F(0), F(2)) and after.bases["A'.2"].support == (F(10), F(12))
    with pytest.raises(PreconditionViolated):
        move_split_interior(f3, (6, 8))


def test_remove_double():
    f4 = create_fixture_f4()
    after = move_remove_double(f4, (0, 2))
    assert after.pair_count == f4.pair_count - 1

    f4b = create_fixture_f4b()
    after = move_remove_double(f4b, (0, 2))
    assert after.pair_count == 1
    a, c = after.bases["A'"], after.bases["C'"]
    assert a.partner == "C'" and a.offset == 3
    for t in (F(3) + F(k, 7) for k in range(15)):
        # A' then C composed: t -> t - 3 -> t - 3 + 6
        assert c.lo <= t + a.offset <= c.hi
        assert t + a.offset == t - 3 + 6

    triple = BandSystem.from_pairs(
        [(0, 12)], [("A", (0, 2), (3, 5)), ("C", (0, 2), (6, 8)), ("E", (0, 2), (9, 11))])
    with pytest.raises(PreconditionViolated):
        move_remove_double(triple, (0, 2))


def test_entire_transformation():
    f5 = create_fixture_f5()
    after = entire_transformation(f5, "B")
    assert after.bases["C"].support == (f5.bases["C"].lo + f5.bases["B"].offset,
                                        f5.bases["C"].hi + f5.bases["B"].offset)
    assert after.bases["C"].support == (F(3), F(5))
    assert after.bases["B"].support == (F(6), F(8))
    assert after.bases["B'"].support == (F(0), F(2))
    assert after.total_length() == 16
    assert_orbits_preserved(f5, after)

    f2 = create_fixture_f2()
    assert entire_transformation(f2, "A'") == f2
    with pytest.raises(PreconditionViolated):
        entire_transformation(f5, "E")


def test_rips_step_priority():
    step, record = rips_step(create_fixture_f1())
    assert record.move is MoveType.REMOVE_ISOLATED and record.args == {'base': 'A'}

    system = create_interior_only_system()
    step, record = rips_step(system)
    assert record.move is MoveType.SPLIT_INTERIOR
    assert record.args == {'subinterval': ['1', '4']}

    empty, record = rips_step(BandSystem([], []))
    assert record.status is StepStatus.TERMINAL


def test_rips_terminal_rational():
    rotation = create_fixture_f7()
    same, record = rips_step(rotation)
    assert record.status is StepStatus.TERMINAL_RATIONAL and same == rotation


def test_fixture6_length_decreases():
    system = create_fixture_f6()
    lengths = [system.total_length()]
    for _ in range(50):
        system, record = rips_step(system)
        if record.status is not StepStatus.MOVED:
            break
        system.validate()
        assert record.chi_after >= record.chi_before - record.chi_dropped
        lengths.append(system.total_length())
    assert all(a > b for a, b in zip(lengths, lengths[1:]))
    assert len(lengths) > 3


def test_extract_generators():
    system = BandSystem.from_pairs([(0, 3)], [("A", (0, 2), (1, 3))])
    gens = extract_generators(system)
    assert [(g.lo, g.hi) for g in gens] == [(0, 1), (1, 2), (2, 3)]
    f6 = create_fixture_f6()
    assert sum(extract_generators(f6).lengths) == 23
    assert len(extract_generators(BandSystem([], []))) == 0


def test_positive_expression_identity():
    f7 = create_fixture_f7()
    gens = extract_generators(f7)
    result = positive_expression(gens, gens, f7, f7)
    assert not result.dropped
    for g in gens:
        assert result.word(g.id) == [g.id]


def test_dehn_twists_on_rotation():
    system = create_fixture_f7()
    size = len(extract_generators(system))
    for _ in range(10):
        old_gens = extract_generators(system)
        shorter = min(b.length for b in system.bases.values() if b.hi == system.components[0][1])
        new = dehn_twist_positive_end(system)
        new_gens = extract_generators(new)
        assert new.components[0] == (F(0), system.components[0][1] - shorter)
        assert len(new_gens) <= size
        result = positive_expression(old_gens, new_gens, system, new)
        assert not result.dropped
        for g in old_gens:
            assert replay_expression(g, result.expressions[g.id], new_gens)
        system = new
    assert system.components[0] == (F(0), F(2, 233))
    with pytest.raises(DegenerateOverlap):
        dehn_twist_positive_end(system)


def test_dehn_twists_terminate_like_euclid():
    system = create_rotation_fixture(F(2, 5))
    twists = 0
    while True:
        try:
            system = dehn_twist_positive_end(system)
        except DegenerateOverlap:
            break
        twists += 1
    assert twists == 2


def test_expressions_compose_over_two_splits():
    bs0 = create_two_split_system()
    bs1 = move_split_interior(bs0, (1, 4))
    bs2 = move_split_interior(bs1, (6, 9))
    g0, g1, g2 = (extract_generators(b) for b in (bs0, bs1, bs2))
    first = positive_expression(g0, g1, bs0, bs1)
    second = positive_expression(g1, g2, bs1, bs2)
    composed = compose_expressions(first, second)
    assert composed.expressions
    for old_id, pieces in composed.expressions.items():
        assert replay_expression(g0.by_id[old_id], pieces, g2)


def create_generator_set(lengths) -> GeneratorSet:
    elements = []
    position = F(0)
    for i, length in enumerate(lengths):
        elements.append(Generator(f"v{i + 1}", position, position + F(length)))
        position += F(length)
    return GeneratorSet(elements)


def test_classify_weights():
    equal = classify_weights(create_generator_set([2, 2, 2]), c_p=1)
    assert len(equal.classes) == 1 and not equal.separators
    assert set(equal.tags.values()) == {WeightTag.LONG}

    split = classify_weights(create_generator_set([100, 1]), c_p=1)
    assert split.c1 == 8
    assert split.classes == [["v1"], ["v2"]]
    assert split.tags == {"v1": WeightTag.LONG, "v2": WeightTag.SHORT}

    three = classify_weights(create_generator_set([10000, 100, 1]), c_p=1)
    assert three.c1 == 12
    assert three.classes == [["v1"], ["v2"], ["v3"]]
    assert three.tags == {"v1": WeightTag.LONG, "v2": WeightTag.SHORT, "v3": WeightTag.SHORT}
    assert (three.d1, three.d2) == (1, 2)


def test_classify_weights_later_pass():
    before = classify_weights(create_generator_set([100, 100, 1]), c_p=1)
    assert before.classes == [["v1", "v2"], ["v3"]]

    after = classify_weights(create_generator_set([10000, 100, 1]), c_p=1, previous=before)
    assert after.tags == {"v1": WeightTag.LONG, "v2": WeightTag.SECONDARY_SHORT, "v3": WeightTag.SHORT}
    assert (after.d1, after.d2) == (1, 2)


def test_classify_weights_brute_force(seed: int = 0):
    rng = random.Random(seed)
    for _ in range(50):
        lengths = [F(rng.randint(1, 10 ** rng.randint(0, 4)), rng.randint(1, 9)) for _ in range(6)]
        gens = create_generator_set(lengths)
        result = classify_weights(gens, c_p=1)
        order = sorted(gens, key=lambda e: (-e.length, e.lo, e.id))
        index = {e.id: i for i, e in enumerate(order)}
        class_of = {g: n for n, cls in enumerate(result.classes) for g in cls}
        for a in order:
            for b in order:
                i, j = sorted((index[a.id], index[b.id]))
                split = any(order[k].length >= result.c1 * order[k + 1].length for k in range(i, j))
                assert (class_of[a.id] != class_of[b.id]) == split


def test_dual_positions():
    periodic = create_periodic_fixture(period=3, repeats=4)
    gens = extract_generators(periodic)
    u = gens.elements[0]
    assert u.length == 3

    disjoint = dual_positions(periodic, gens, (0, [u.id]), (10, [u.id]))
    assert disjoint.db_count == 0 and not disjoint.pair_counts

    word = [g.id for g in gens]
    cancelled = dual_positions(periodic, gens, word, list(reversed(word)))
    assert cancelled.db_count == 0 and cancelled.eliminated == len(word)

    start = 1
    report = dual_positions(periodic, gens, (0, [u.id] * 4), (start, [u.id] * 4))
    offsets = {start + 3 * j - 3 * i for i in range(4) for j in range(4)
               if abs(start + 3 * j - 3 * i) < 3}
    overlap = 12 - start
    assert report.pair_counts[(u.id, u.id)] == len(offsets)
    assert len(offsets) <= overlap // 3 + 1
    assert report.db_count > 0

    with pytest.raises(NoOverlap):
        dual_positions(periodic, gens, [], [u.id])


def test_dual_positions_checks_generators_against_band_system():
    periodic = create_periodic_fixture(period=3, repeats=4)
    gens = extract_generators(periodic)
    u = gens.elements[0]
    with pytest.raises(PreconditionViolated):
        dual_positions(periodic, gens, [u.id], ["missing"])

    outside = create_generator_set([100])
    with pytest.raises(PreconditionViolated):
        dual_positions(periodic, outside, ["v1"], ["v1"])


def test_stationary_words():
    assert stationary_words(create_fixture_f4(), depth=2)
    assert stationary_words(create_fixture_f7(), depth=6) == []


def test_orbit_preservation_on_fixtures():
    fixtures = create_band_fixtures()
    moves = {
        'F1': lambda bs: move_remove_isolated(bs, "A"),
        'F2': lambda bs: move_trim_semi_isolated(bs, (0, 2)),
        'F3': lambda bs: move_split_interior(bs, (2, 4)),
        'F4': lambda bs: move_remove_double(bs, (0, 2)),
        'F4b': lambda bs: move_remove_double(bs, (0, 2)),
        'F5': lambda bs: entire_transformation(bs, "B"),
        'F6': lambda bs: rips_step(bs)[0],
        'F7': dehn_twist_positive_end,
    }
    for name, bs in fixtures.items():
        current = bs
        for _ in range(3 if name == 'F6' else 1):
            new = moves[name](current)
            assert_orbits_preserved(current, new)
            current = new


def test_json_round_trip_and_validation():
    f5 = create_fixture_f5()
    assert BandSystem.from_dict(f5.to_dict()) == f5
    data = f5.to_dict()
    data['bases'][0]['orientation'] = 'reversing'
    with pytest.raises(InvalidBandSystem):
        BandSystem.from_dict(data)
    with pytest.raises(InvalidBandSystem):
        BandSystem.from_pairs([(0, 1)], [("A", (0, 0.5), (0.5, 1))])
    with pytest.raises(InvalidBandSystem):
        BandSystem.from_pairs([(0, 1)], [("A", (0, 1), (1, 2))])


if __name__ == "__main__":
    print("\n" + "=" * 70)
    print("PSEUDOGROUP TESTS")
    print("=" * 70)
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"✓ {name}")
