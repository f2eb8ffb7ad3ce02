#!/usr/bin/env python3
"""
Tests for the positive-basis algorithm and its exhaustive rank-2 witness.
"""

import random
from fractions import Fraction

import pytest

from errors import DegenerateLengths, NonPositiveGenerator, NotSpanning
from lattice import (DEFAULT_STEP_BUDGET, WITNESS_ENTRY_BOUND, LatticeInstance,
                     is_unimodular, positive_basis, positive_basis_family,
                     random_instance, spans, unimodular_witness,
                     verify_positive_basis)


def create_rank2_instance(lengths=(1, Fraction(7, 5))) -> LatticeInstance:
    return LatticeInstance(2, [[2, -1], [-1, 1]], list(lengths))


def test_already_positive():
    inst = LatticeInstance(2, [[1, 0], [0, 1]], [1, Fraction(2, 3)])
    basis = positive_basis(inst)
    assert basis.change_of_basis == [[1, 0], [0, 1]]
    assert basis.expressions == [[1, 0], [0, 1]]
    assert basis.steps == 0


def test_rank_one():
    inst = LatticeInstance(1, [[3], [5]], [1])
    basis = positive_basis(inst)
    assert basis.change_of_basis == [[1]]
    assert basis.expressions == [[3], [5]]


def test_rank_two_against_witness():
    inst = create_rank2_instance()
    basis = positive_basis(inst)
    assert verify_positive_basis(inst, basis)
    assert basis.change_of_basis == [[2, -1], [-1, 1]]
    assert basis.expressions == [[1, 0], [0, 1]]
    witness = unimodular_witness(inst)
    assert witness is not None
    assert verify_positive_basis(inst, witness)


def test_errors():
    with pytest.raises(NonPositiveGenerator) as info:
        positive_basis(LatticeInstance(2, [[1, 0], [-1, 0]], [1, 1]))
    assert info.value.index == 1
    with pytest.raises(NotSpanning):
        positive_basis(LatticeInstance(2, [[2, 0], [0, 1]], [1, 1]))
    with pytest.raises(NotSpanning):
        positive_basis(LatticeInstance(2, [[1, 1]], [1, 1]))
    with pytest.raises(ValueError):
        LatticeInstance(2, [[1, 0]], [1, 0])


def test_degenerate_lengths():
    # a_0 and a_1 have equal length and (2, -1) needs a strict comparison between them
    inst = LatticeInstance(2, [[2, -1], [1, 0]], [1, 1])
    with pytest.raises(DegenerateLengths):
        positive_basis(inst)


def test_scaling_invariance():
    inst = create_rank2_instance()
    for factor in (Fraction(1, 3), 2, Fraction(17, 4)):
        assert positive_basis(inst.scaled(factor)).change_of_basis == positive_basis(inst).change_of_basis


def test_family():
    inst = create_rank2_instance()
    assert len(positive_basis_family([inst])) == 1
    assert len(positive_basis_family([inst, inst.scaled(3)])) == 1
    other = create_rank2_instance((1, Fraction(8, 5)))
    family = positive_basis_family([inst, other])
    assert 1 <= len(family) <= 2
    for basis in family:
        assert verify_positive_basis(inst, basis)
    with pytest.raises(ValueError):
        positive_basis_family([inst, LatticeInstance(2, [[1, 0], [0, 1]], [1, 1])])


def test_spans_and_unimodular():
    assert spans(2, [[2, 1], [1, 1]])
    assert spans(2, [[2, 0], [3, 0], [0, 1]])
    assert not spans(2, [[2, 0], [4, 0], [0, 1]])
    assert is_unimodular([[2, 1], [1, 1]])
    assert not is_unimodular([[2, 0], [0, 1]])


def test_random_instances(seed: int = 0):
    """100 seeded instances: termination, unimodularity, exact nonnegative expressions."""
    rng = random.Random(seed)
    rank_two = 0
    for _ in range(100):
        inst = random_instance(rng)
        basis = positive_basis(inst)
        assert basis.steps <= DEFAULT_STEP_BUDGET
        assert verify_positive_basis(inst, basis)
        assert all(inst.length_of(row) > 0 for row in basis.change_of_basis)
        if inst.rank == 2:
            rank_two += 1
            witness = unimodular_witness(inst)
            in_scope = all(abs(x) <= WITNESS_ENTRY_BOUND for row in basis.change_of_basis for x in row)
            if in_scope:
                # the algorithm's own basis lies in the search box, so the box is not empty
                assert witness is not None
            if witness is not None:
                assert verify_positive_basis(inst, witness)
    assert rank_two > 0


def test_json_round_trip():
    inst = create_rank2_instance()
    data = inst.to_dict()
    assert data['lengths'] == ['1', '7/5']
    again = LatticeInstance.from_dict(data)
    assert again.generators == inst.generators and again.lengths == inst.lengths


if __name__ == "__main__":
    print("\n" + "=" * 70)
    print("LATTICE TESTS")
    print("=" * 70)
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"✓ {name}")
