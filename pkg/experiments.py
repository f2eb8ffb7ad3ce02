"""Seeded experiments that rerun the acceptance checks at full size and print tables."""

import argparse
import random
import time

from diagrams import diagram_check, family_cover_check, separability_check
from errors import NotSeparable
from fixtures import (create_band_fixtures, create_broken_conjugacy_graph,
                      create_commutation_diagram, create_conjugacy_diagram,
                      create_conjugacy_resolution, create_equation_corpus,
                      create_fixture_f7, create_splitting_decomposition,
                      create_two_block_decomposition)
from lattice import (WITNESS_ENTRY_BOUND, positive_basis, random_instance,
                     unimodular_witness, verify_positive_basis)
from machine import RipsMachine
from oracle import (SearchBudget, commutation_witness, cross_check,
                    enumerate_exhaustive, enumerate_solutions)
from pseudogroup import (StepStatus, orbit_partition, random_band_system,
                         rips_step, sample_points, surviving_points)
from visualization import create_summary_report

DEFAULT_SEED = 0


def _header(title: str):
    print("\n" + "=" * 70)
    print(f"EXPERIMENT: {title}")
    print("=" * 70)


def experiment_oracle_agreement(max_len: int = 4):
    """Both enumeration strategies on the bundled corpus."""
    _header(f"Oracle agreement (max length {max_len})")
    start = time.perf_counter()
    rows = []
    for name, system in create_equation_corpus().items():
        t0 = time.perf_counter()
        only_exhaustive, only_levi = cross_check(system, SearchBudget(max_len=max_len))
        count = len(enumerate_solutions(system, SearchBudget(max_len=max_len)))
        rows.append((name, count, not only_exhaustive and not only_levi, time.perf_counter() - t0))
    for name, count, agree, seconds in rows:
        mark = "✓" if agree else "✗"
        print(f"  {mark} {name:14s} {count:6d} solutions  {seconds:6.2f}s")
    print(f"\n⏱️  Total: {time.perf_counter() - start:.1f}s")
    return rows


def experiment_commutation_structure(max_len: int = 6):
    """Every solution of XY = YX has a common primitive root."""
    _header(f"Commutation structure (max length {max_len})")
    solutions = enumerate_exhaustive(create_equation_corpus()['commute'], SearchBudget(max_len=max_len))
    missing = [s for s in solutions if commutation_witness(s.image("X"), s.image("Y")) is None]
    print(f"  solutions: {len(solutions)}, without a common root: {len(missing)}")
    return len(solutions), len(missing)


def experiment_coverage():
    """Resolution coverage for the bundled diagrams and the broken conjugacy graph."""
    _header("Resolution coverage")
    conjugacy = create_equation_corpus()['conjugacy']
    budget = SearchBudget(max_len=5)
    good = family_cover_check(create_conjugacy_resolution(), conjugacy, budget, twist_depth=4)
    broken = family_cover_check(create_conjugacy_resolution(create_broken_conjugacy_graph()), conjugacy, budget,
                                twist_depth=4)
    print(f"  {'resolution':24s} {'covered':>8s} {'uncovered':>10s} {'non-solutions':>14s}")
    for label, r in (("conjugacy", good), ("conjugacy (broken graph)", broken)):
        print(f"  {label:24s} {len(r.covered):8d} {len(r.uncovered):10d} {r.non_solutions:14d}")
    for label, diagram, check in (("XZ = ZY", create_conjugacy_diagram(), SearchBudget(max_len=5)),
                                  ("XY = YX", create_commutation_diagram(), SearchBudget(max_len=6))):
        report = diagram_check(diagram, check, twist_depth=4)
        print(f"  diagram {label}: {report.total} solutions, uncovered {len(report.uncovered)}")
    return good, broken


def experiment_positive_basis(seed: int = DEFAULT_SEED, count: int = 100):
    """Random spanning instances through the positive-basis algorithm."""
    _header(f"Positive basis ({count} instances, seed {seed})")
    rng = random.Random(seed)
    by_rank = {}
    disagreements = 0
    for _ in range(count):
        inst = random_instance(rng)
        basis = positive_basis(inst)
        ok = verify_positive_basis(inst, basis)
        entry = by_rank.setdefault(inst.rank, {'runs': 0, 'verified': 0, 'steps': 0})
        entry['runs'] += 1
        entry['verified'] += ok
        entry['steps'] = max(entry['steps'], basis.steps)
        if inst.rank == 2:
            in_box = all(abs(x) <= WITNESS_ENTRY_BOUND for row in basis.change_of_basis for x in row)
            if in_box and unimodular_witness(inst) is None:
                disagreements += 1
    print(f"  {'rank':>4s} {'runs':>6s} {'verified':>9s} {'max steps':>10s}")
    for rank in sorted(by_rank):
        e = by_rank[rank]
        print(f"  {rank:4d} {e['runs']:6d} {e['verified']:9d} {e['steps']:10d}")
    print(f"\n  rank-2 disagreements with the exhaustive witness: {disagreements}")
    return by_rank, disagreements


def experiment_band_invariants(seed: int = DEFAULT_SEED, count: int = 50):
    """Random band systems run to the end with invariant checks."""
    _header(f"Band engine invariants ({count} systems, seed {seed})")
    rng = random.Random(seed)
    statuses = {}
    violations = 0
    longest = None
    for i in range(count):
        machine = RipsMachine(random_band_system(rng), name=f"random-{i}")
        results = machine.run(steps=2000)
        statuses[results['status']] = statuses.get(results['status'], 0) + 1
        violations += len(results['violations'])
        if longest is None or results['moves'] > longest['moves']:
            longest = results
    for status, n in sorted(statuses.items()):
        print(f"  {status:20s} {n}")
    print(f"  invariant violations: {violations}")
    if longest is not None:
        print(create_summary_report(longest))
    return statuses, violations


def experiment_orbit_preservation(seed: int = DEFAULT_SEED, samples: int = 200, depth: int = 6):
    """Orbit partitions of sample points before and after each move on every fixture."""
    _header(f"Orbit preservation ({samples} points, depth {depth})")
    for name, bs in create_band_fixtures().items():
        moves = failures = 0
        current = bs
        while moves < 50:
            after, record = rips_step(current)
            if record.status is not StepStatus.MOVED:
                break
            moves += 1
            kept = surviving_points(current, after, sample_points(current, samples, seed))
            if orbit_partition(current, kept) != orbit_partition(after, kept):
                failures += 1
            current = after
        mark = "✓" if failures == 0 else "✗"
        print(f"  {mark} {name:4s} {moves:3d} move(s), {failures} failure(s)")


def experiment_dehn_twists(iterations: int = 10):
    """Positive-end twisting on the 89/233 rotation."""
    _header(f"Positive-end Dehn twists ({iterations} iterations)")
    results = RipsMachine(create_fixture_f7(), name="F7").run_dehn_twists(iterations)
    print(f"  twists: {results['twists']}, stopped: {results['stopped']}")
    print("  support lengths: " + " -> ".join(results['support_lengths']))
    dropped = sum(len(e['dropped']) for e in results['expressions'])
    print(f"  dropped generators: {dropped}, violations: {len(results['violations'])}")
    return results


def experiment_separability(max_len: int = 4):
    """Marker insertion on the two-block and splitting decompositions."""
    _header(f"Separability (max length {max_len})")
    corpus = create_equation_corpus()
    rows = []
    for label, system, decomposition in (("two-block", corpus['two_block'], create_two_block_decomposition()),
                                         ("splitting", corpus['commute'], create_splitting_decomposition())):
        separable = 0
        solutions = enumerate_solutions(system, SearchBudget(max_len=max_len))
        for s in solutions:
            try:
                separability_check(decomposition, s, system)
                separable += 1
            except NotSeparable:
                pass
        rows.append((label, len(solutions), separable))
        print(f"  {label:10s} {separable:4d} of {len(solutions)} solutions separable")
    return rows


def run_all(seed: int = DEFAULT_SEED):
    experiment_oracle_agreement()
    experiment_commutation_structure()
    experiment_coverage()
    experiment_positive_basis(seed)
    experiment_band_invariants(seed)
    experiment_orbit_preservation(seed)
    experiment_dehn_twists()
    experiment_separability()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Run the seeded experiments and print their tables.")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for the random instances")
    return parser


if __name__ == "__main__":
    run_all(build_parser().parse_args().seed)
