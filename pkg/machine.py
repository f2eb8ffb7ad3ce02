"""Rips machine driver: runs the move scheduler and the positive-end processes on a band system."""

import logging
from fractions import Fraction
from typing import Dict, List, Optional

from errors import PreconditionViolated
from pseudogroup import (BandSystem, MoveRecord, MoveType, StepStatus,
                         dehn_twist_positive_end, entire_transformation,
                         euler_characteristic, extract_generators,
                         positive_end_carrier, positive_expression,
                         replay_expression, rips_step)

logger = logging.getLogger(__name__)

DEFAULT_STEPS = 50


class RipsMachine:
    """Applies moves to a band system and records a trace of every move."""

    def __init__(self, system: BandSystem, name: str = "band system"):
        """
        Initialize a machine.

        Args:
            system: Starting band system (kept unchanged)
            name: Label used in summaries
        """
        self.initial = system
        self.name = name
        self.system = system
        self.events: List[Dict] = []
        self.violations: List[str] = []

    def reset(self):
        """Return to the starting system and clear the trace."""
        self.system = self.initial
        self.events = []
        self.violations = []

    def log_event(self, step: int, record: MoveRecord):
        """Log one move."""
        entry = record.to_dict()
        entry['step'] = step
        self.events.append(entry)

    def _violation(self, step: int, message: str):
        logger.warning("step %d: %s", step, message)
        self.violations.append(f"step {step}: {message}")

    def _check_move(self, step: int, before: BandSystem, after: BandSystem, record: MoveRecord):
        try:
            after.validate()
        except ValueError as exc:
            self._violation(step, f"invalid system after {record.move.value}: {exc}")
        if record.chi_after < record.chi_before - record.chi_dropped:
            self._violation(step, f"chi dropped from {record.chi_before} to {record.chi_after}")
        if after.pair_count and record.chi_after < 1 - after.pair_count:
            self._violation(step, f"chi {record.chi_after} below 1 - b = {1 - after.pair_count}")
        if not after.total_length() < before.total_length():
            self._violation(step, f"total length did not decrease ({before.total_length()} -> {after.total_length()})")

    def run(self, steps: int = DEFAULT_STEPS) -> Dict:
        """
        Run the scheduler until the system is terminal or the step budget runs out.

        A round ends with a move (3); total base length must drop across
        every round, and χ may only fall by what a dropped free-standing pair
        contributes.

        Args:
            steps: Maximum number of moves

        Returns:
            Dictionary with the final system, status, round lengths and the trace
        """
        status = StepStatus.MOVED
        moves = 0
        round_lengths = [self.system.total_length()]
        counts = {m.value: 0 for m in MoveType if m not in (MoveType.ENTIRE_TRANSFORMATION, MoveType.DEHN_TWIST)}

        while moves < steps:
            before = self.system
            after, record = rips_step(before)
            if record.status is not StepStatus.MOVED:
                status = record.status
                break
            moves += 1
            counts[record.move.value] += 1
            self._check_move(moves, before, after, record)
            self.log_event(moves, record)
            self.system = after
            if record.move is MoveType.SPLIT_INTERIOR:
                round_lengths.append(after.total_length())

        if round_lengths[-1] != self.system.total_length():
            round_lengths.append(self.system.total_length())
        for i, (a, b) in enumerate(zip(round_lengths, round_lengths[1:])):
            if not b < a:
                self._violation(moves, f"round {i + 1} did not shorten the bases ({a} -> {b})")

        logger.info("%s: %d moves, status %s", self.name, moves, status.value)
        return {
            'name': self.name,
            'status': status.value,
            'moves': moves,
            'move_counts': counts,
            'rounds': len(round_lengths) - 1,
            'round_lengths': [str(x) for x in round_lengths],
            'chi': euler_characteristic(self.system),
            'pairs': self.system.pair_count,
            'total_length': str(self.system.total_length()),
            'violations': list(self.violations),
            'final_system': self.system.to_dict(),
            'events': self.events,
        }

    def run_entire_transformations(self, steps: int = DEFAULT_STEPS, component: int = 0) -> Dict:
        """
        Repeat entire transformations through the longest base at the positive end.

        Stops when no unique carrier exists, a transformation changes
        nothing, or the step budget runs out.
        """
        applied = 0
        reason = "budget"
        while applied < steps:
            if component >= len(self.system.components):
                reason = "empty"
                break
            carrier = positive_end_carrier(self.system, component)
            if carrier is None:
                reason = "no_carrier"
                break
            before = self.system
            try:
                after = entire_transformation(before, carrier)
            except PreconditionViolated as exc:
                logger.debug("entire transformation stopped: %s", exc)
                reason = "precondition"
                break
            if after == before:
                reason = "fixed"
                break
            applied += 1
            record = MoveRecord(MoveType.ENTIRE_TRANSFORMATION, {'carrier': carrier}, StepStatus.MOVED,
                                euler_characteristic(before), euler_characteristic(after), after.total_length())
            self.log_event(applied, record)
            self.system = after
        return {
            'name': self.name,
            'transformations': applied,
            'stopped': reason,
            'total_length': str(self.system.total_length()),
            'final_system': self.system.to_dict(),
            'events': self.events,
        }

    def run_dehn_twists(self, iterations: int = 10, component: int = 0) -> Dict:
        """
        Twist at the positive end repeatedly, writing the generators of each
        system as positive words in the generators of the next.

        Returns:
            Dictionary with support lengths per twist and the expressions
        """
        twists = 0
        lengths: List[Fraction] = [self._support_length(component)]
        expressions = []
        reason = "budget"
        while twists < iterations:
            before = self.system
            try:
                after = dehn_twist_positive_end(before, component)
            except PreconditionViolated as exc:
                logger.debug("twisting stopped: %s", exc)
                reason = "degenerate"
                break
            old_gens, new_gens = extract_generators(before), extract_generators(after)
            result = positive_expression(old_gens, new_gens, before, after)
            replayed = all(replay_expression(g, result.expressions[g.id], new_gens)
                           for g in old_gens if g.id in result.expressions)
            if not replayed:
                self._violation(twists + 1, "positive expression does not replay its segment")
            twists += 1
            record = MoveRecord(MoveType.DEHN_TWIST, {'component': component}, StepStatus.MOVED,
                                euler_characteristic(before), euler_characteristic(after), after.total_length())
            self.log_event(twists, record)
            expressions.append(result.to_dict())
            self.system = after
            lengths.append(self._support_length(component))
        return {
            'name': self.name,
            'twists': twists,
            'stopped': reason,
            'support_lengths': [str(x) for x in lengths],
            'expressions': expressions,
            'violations': list(self.violations),
            'final_system': self.system.to_dict(),
        }

    def _support_length(self, component: int) -> Optional[Fraction]:
        if component >= len(self.system.components):
            return Fraction(0)
        lo, hi = self.system.components[component]
        return hi - lo

    def print_summary(self, results: Dict):
        """Print a summary of a scheduler run."""
        print("\n" + "=" * 70)
        print(f"RIPS MACHINE RESULTS - {results['name']}")
        print("=" * 70)

        print(f"\n📊 Overall:")
        print(f"  Status: {results['status']}")
        print(f"  Moves: {results['moves']} in {results['rounds']} round(s)")
        print(f"  Pairs left: {results['pairs']}   χ: {results['chi']}")
        print(f"  Total base length: {results['total_length']}")
        print(f"  Invariant violations: {len(results['violations'])}")
        for v in results['violations']:
            print(f"    ✗ {v}")

        print(f"\n🔧 Moves fired:")
        for move, count in results['move_counts'].items():
            print(f"  {move:20s} {count}")

        print(f"\n📝 Trace (first 20 moves):")
        for event in results['events'][:20]:
            print(f"  {event['step']:4d}  {event['move']:20s} χ {event['chi_before']:3d} -> {event['chi_after']:3d}"
                  f"  length {event['total_length']}")
        if len(results['events']) > 20:
            print(f"  ... ({len(results['events']) - 20} more moves)")

        print("\n" + "=" * 70 + "\n")
