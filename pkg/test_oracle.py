#!/usr/bin/env python3
"""
Tests for the bounded solution oracle: both strategies and their agreement.
"""

import time

import pytest

from errors import BudgetExceeded
from fixtures import create_equation_corpus, create_system
from oracle import (SearchBudget, SolutionSet, commutation_witness,
                    count_infeasible, cross_check, enumerate_exhaustive,
                    enumerate_levi)
from systems import is_solution
from words import standard_alphabet


def test_commute_has_ten_solutions_at_length_two():
    system = create_system(["XY=YX"], variables=("X", "Y"))
    budget = SearchBudget(max_len=2)
    exhaustive = enumerate_exhaustive(system, budget)
    levi = enumerate_levi(system, budget)
    assert len(exhaustive) == 10
    assert exhaustive.solutions == levi.solutions
    assert exhaustive.complete and levi.complete


def test_tautology():
    system = create_system(["X=X"], variables=("X",), k=1)
    result = enumerate_exhaustive(system, SearchBudget(max_len=2))
    assert [s.to_dict() for s in result] == [{"X": "a"}, {"X": "aa"}]
    assert enumerate_levi(system, SearchBudget(max_len=2)).solutions == result.solutions


def test_no_solution_pruned_at_root():
    system = create_system(["Xa=bX"], variables=("X",))
    assert count_infeasible((system.equations[0][0].letters, system.equations[0][1].letters), 2)
    for max_len in (1, 3, 5):
        assert len(enumerate_exhaustive(system, SearchBudget(max_len=max_len))) == 0
        levi = enumerate_levi(system, SearchBudget(max_len=max_len))
        assert len(levi) == 0
        assert levi.nodes == 1


def test_conjugacy_strategies_agree():
    system = create_system(["XZ=ZY"])
    budget = SearchBudget(max_len=3)
    only_exhaustive, only_levi = cross_check(system, budget)
    assert not only_exhaustive and not only_levi
    result = enumerate_levi(system, budget)
    s = next(s for s in result if s.to_dict() == {"X": "ab", "Y": "ba", "Z": "a"})
    assert is_solution(s, system)


def test_corpus_agreement():
    """Both strategies agree on every bundled system, k <= 2 and max_len <= 4."""
    started = time.time()
    corpus = create_equation_corpus()
    assert len(corpus) >= 8
    for name, system in corpus.items():
        for max_len in (1, 2, 4):
            budget = SearchBudget(max_len=max_len)
            exhaustive = enumerate_exhaustive(system, budget)
            levi = enumerate_levi(system, budget)
            assert exhaustive.solutions == levi.solutions, (name, max_len)
            assert all(is_solution(s, system) for s in levi), name
    assert time.time() - started < 60


def test_commuting_solutions_share_a_root():
    system = create_system(["XY=YX"], variables=("X", "Y"))
    solutions = enumerate_levi(system, SearchBudget(max_len=6))
    assert len(solutions) > 0
    for s in solutions:
        root = commutation_witness(s.image("X"), s.image("Y"))
        assert root is not None
        assert len(s.image("X")) % len(root) == 0 and len(s.image("Y")) % len(root) == 0


def test_commutation_witness():
    alpha = standard_alphabet(2)
    p = alpha.parse_positive
    assert commutation_witness(p("ab"), p("abab")) == p("ab")
    assert commutation_witness(p("ab"), p("ba")) is None
    assert commutation_witness(p("aaa"), p("aa")) == p("a")


def test_canonical_order_is_deterministic():
    system = create_system(["XZ=ZY"])
    first = enumerate_levi(system, SearchBudget(max_len=3))
    second = enumerate_levi(system, SearchBudget(max_len=3))
    assert [s.to_dict() for s in first] == [s.to_dict() for s in second]
    keys = [s.sort_key() for s in first]
    assert keys == sorted(keys)


def test_budget_exceeded_carries_partial_set():
    system = create_system(["XY=YX"], variables=("X", "Y"))
    with pytest.raises(BudgetExceeded) as info:
        enumerate_exhaustive(system, SearchBudget(max_len=3, max_solutions=3))
    partial = info.value.partial
    assert isinstance(partial, SolutionSet)
    assert not partial.complete and len(partial) == 3
    with pytest.raises(BudgetExceeded):
        enumerate_levi(system, SearchBudget(max_len=3, max_nodes=5))
    partial = enumerate_levi(system, SearchBudget(max_len=3, max_solutions=3), allow_partial=True)
    assert not partial.complete and len(partial) == 3


def test_budget_validation():
    with pytest.raises(ValueError):
        SearchBudget(max_len=0)


if __name__ == "__main__":
    print("\n" + "=" * 70)
    print("ORACLE TESTS")
    print("=" * 70)
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"✓ {name}")
