"""Command-line front end: equation files and JSON artifacts in, tables or JSON out.

Exit status is 0 on success, 2 on validation failures, 3 when a search
budget runs out and 4 when a coverage check finds uncovered solutions.
"""

import argparse
import json
import logging
import sys
from typing import Dict, List, Optional, Sequence

from diagrams import (DEFAULT_GRAPH_SAMPLES, LabelAssignment, MRDiagram,
                      SeparableDecomposition, SolutionGraph, diagram_check,
                      family_cover_check, separability_check, substitute,
                      verify_graph)
from errors import EquationSyntaxError, ExitCode, MRError, NotSeparable
from lattice import (DEFAULT_STEP_BUDGET, LatticeInstance, positive_basis,
                     verify_positive_basis)
from machine import DEFAULT_STEPS, RipsMachine
from oracle import (DEFAULT_MAX_LEN, DEFAULT_MAX_NODES, DEFAULT_MAX_SOLUTIONS,
                    SearchBudget, cross_check, enumerate_solutions)
from pseudogroup import (DEFAULT_ORBIT_DEPTH, BandSystem, StepStatus,
                         classify_weights, coverage_profile,
                         euler_characteristic, extract_generators,
                         orbit_partition, rips_step, sample_points,
                         stationary_words, surviving_points)
from systems import EquationSystem, Substitution, is_solution
from visualization import (export_results_json, graph_to_dot,
                           plot_associated_graph, plot_band_system, plot_trace,
                           visualize_band_ascii, write_trace)
from words import TOKEN_PATTERN, Alphabet

logger = logging.getLogger(__name__)

DEFAULT_SEED = 0
DEFAULT_TWIST_DEPTH = 4
DEFAULT_SAMPLES = 200
# Coefficients used when an equation file has no header and no lowercase letters.
DEFAULT_COEFFICIENTS = ("a", "b")

# --- equation files -----------------------------------------------------------

def _tokens(text: str, line: int, col_offset: int) -> List[str]:
    names = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = TOKEN_PATTERN.match(text, pos)
        if not match:
            raise EquationSyntaxError(line, col_offset + pos + 1, "a letter")
        if match.group(2):
            raise EquationSyntaxError(line, col_offset + match.end(), "a positive word without inverses")
        names.append(match.group(1))
        pos = match.end()
    return names


def parse_equations(text: str) -> EquationSystem:
    """
    Parse an equation file.

    An optional first line ``alphabet: a b ...`` fixes the coefficients;
    otherwise they are the lowercase letters used, sorted (``a b`` if none).
    Variables are the uppercase letters in order of first appearance. Each
    further line is ``LHS = RHS``; ``#`` starts a comment. Repeated
    equations are kept once.

    Raises:
        EquationSyntaxError: with the 1-based line and column of the problem
    """
    header: Optional[List[str]] = None
    raw = []
    for number, full in enumerate(text.splitlines(), start=1):
        line = full.split("#", 1)[0]
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("alphabet:"):
            if header is not None or raw:
                raise EquationSyntaxError(number, line.index("alphabet:") + 1, "the alphabet header on the first line")
            header = stripped[len("alphabet:"):].split()
            continue
        if line.count("=") != 1:
            col = line.index("=", line.index("=") + 1) + 1 if "=" in line else len(line.rstrip()) + 1
            raise EquationSyntaxError(number, col, "exactly one '='")
        eq = line.index("=")
        sides = [(line[:eq], 0), (line[eq + 1:], eq + 1)]
        for side, offset in sides:
            if not side.strip():
                raise EquationSyntaxError(number, offset + len(side) + 1 if offset else 1, "a nonempty word")
        raw.append((number, sides, [_tokens(side, number, offset) for side, offset in sides]))

    variables: List[str] = []
    lowercase = set()
    for _, _, token_lists in raw:
        for names in token_lists:
            for name in names:
                if name[0].isupper():
                    if name not in variables:
                        variables.append(name)
                else:
                    lowercase.add(name)
    if header is not None:
        coefficients = header
    else:
        coefficients = sorted(lowercase) or list(DEFAULT_COEFFICIENTS)
    try:
        alphabet = Alphabet(coefficients, variables)
    except ValueError as exc:
        raise EquationSyntaxError(1, 1, f"a valid alphabet ({exc})")

    equations = []
    seen = set()
    for number, sides, _ in raw:
        pair = tuple(alphabet.parse_positive(side, number, offset) for side, offset in sides)
        key = (pair[0].letters, pair[1].letters)
        if key in seen:
            logger.debug("line %d repeats an earlier equation", number)
            continue
        seen.add(key)
        equations.append(pair)
    return EquationSystem(alphabet, equations)


def format_system(system: EquationSystem) -> str:
    """Equation-file text that parses back to the same system."""
    alpha = system.alphabet
    lines = ["alphabet: " + " ".join(alpha.coefficients)]
    for lhs, rhs in system.equations:
        lines.append(f"{alpha.format(lhs)} = {alpha.format(rhs)}")
    return "\n".join(lines) + "\n"


def _parse_bindings(items: Sequence[str]) -> Dict[str, str]:
    out = {}
    for item in items:
        if item.count("=") != 1:
            raise EquationSyntaxError(1, 1, f"NAME=WORD, got {item!r}")
        name, word = item.split("=")
        out[name.strip()] = word.strip()
    return out


def _read_text(path: str) -> str:
    with open(path, encoding="utf-8") as f:
        return f.read()


def _read_json(path: str) -> Dict:
    return json.loads(_read_text(path))


# --- output helpers -------------------------------------------------------------

def _emit(args, payload: Dict, human: List[str]):
    if args.json:
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print("\n".join(human))


def _banner(title: str) -> List[str]:
    return ["", "=" * 70, title, "=" * 70]


# --- commands -------------------------------------------------------------------

def _budget(args) -> SearchBudget:
    return SearchBudget(args.max_len, args.max_solutions, args.max_nodes)


def cmd_solve(args) -> int:
    system = parse_equations(_read_text(args.file))
    budget = _budget(args)
    solutions = enumerate_solutions(system, budget, strategy=args.strategy)
    payload = solutions.to_dict()
    human = _banner(f"SOLUTIONS (max length {budget.max_len})")
    for i in range(len(system.equations)):
        human.append(f"  {system.format_equation(i)}")
    human.append(f"\n📊 {len(solutions)} solution(s), complete: {solutions.complete}")
    for s in solutions:
        human.append("  " + ", ".join(f"{name}↦{word}" for name, word in s.to_dict().items()))
    status = ExitCode.SUCCESS
    if args.cross_check:
        only_exhaustive, only_levi = cross_check(system, budget)
        payload['cross_check'] = {
            'only_exhaustive': [s.to_dict() for s in sorted(only_exhaustive, key=lambda s: s.sort_key())],
            'only_levi': [s.to_dict() for s in sorted(only_levi, key=lambda s: s.sort_key())],
        }
        agree = not only_exhaustive and not only_levi
        human.append(f"\n🔍 Strategies agree: {agree}")
        if not agree:
            status = ExitCode.VALIDATION
    _emit(args, payload, human)
    return status


def cmd_basis(args) -> int:
    inst = LatticeInstance.from_dict(_read_json(args.file))
    basis = positive_basis(inst, args.step_budget)
    ok = verify_positive_basis(inst, basis)
    payload = dict(basis.to_dict(), verified=ok)
    human = _banner("POSITIVE BASIS")
    human.append(f"  rank {inst.rank}, {len(inst.generators)} generator(s), {basis.steps} step(s)")
    human.append("\n  new basis (rows):")
    human.extend(f"    {row}" for row in basis.change_of_basis)
    human.append("\n  generator expressions:")
    human.extend(f"    {g} = {e}" for g, e in zip(inst.generators, basis.expressions))
    human.append(f"\n  verified: {ok}")
    _emit(args, payload, human)
    return ExitCode.SUCCESS if ok else ExitCode.VALIDATION


def cmd_band_run(args) -> int:
    bs = BandSystem.from_dict(_read_json(args.file))
    machine = RipsMachine(bs, name=args.file)
    results = machine.run(args.steps)
    if args.trace:
        write_trace(results['events'], args.trace)
    if args.output:
        export_results_json(results, args.output)
    if args.plot:
        plot_trace(results, save_path=args.plot)
    if args.json:
        print(json.dumps(results, sort_keys=True, indent=2))
    else:
        machine.print_summary(results)
    return ExitCode.VALIDATION if results['violations'] else ExitCode.SUCCESS


def band_report(bs: BandSystem, samples: int, seed: int, steps: int) -> Dict:
    """Structure of a band system plus orbit preservation along its first moves."""
    generators = extract_generators(bs)
    weights = classify_weights(generators) if len(generators) else None
    orbit_failures = []
    current = bs
    moves = 0
    while moves < steps:
        after, record = rips_step(current)
        if record.status is not StepStatus.MOVED:
            break
        moves += 1
        points = sample_points(current, samples, seed)
        kept = surviving_points(current, after, points)
        if orbit_partition(current, kept) != orbit_partition(after, kept):
            orbit_failures.append({'step': moves, 'move': record.move.value})
        current = after
    return {
        'pairs': bs.pair_count,
        'chi': euler_characteristic(bs),
        'total_length': str(bs.total_length()),
        'coverage': [{'lo': str(s.lo), 'hi': str(s.hi), 'covering': list(s.covering)}
                     for s in coverage_profile(bs).segments],
        'generators': [{'id': g.id, 'lo': str(g.lo), 'hi': str(g.hi)} for g in generators],
        'weights': weights.to_dict() if weights else None,
        'stationary_words': [{'word': list(w.word), 'domain': [str(x) for x in w.domain]}
                             for w in stationary_words(bs, DEFAULT_ORBIT_DEPTH)],
        'orbit_moves_checked': moves,
        'orbit_failures': orbit_failures,
    }


def cmd_band_check(args) -> int:
    bs = BandSystem.from_dict(_read_json(args.file))
    report = band_report(bs, args.samples, args.seed, args.steps)
    if args.plot:
        plot_band_system(bs, save_path=args.plot, title=args.file)
    if args.graph_plot:
        plot_associated_graph(bs, save_path=args.graph_plot)
    human = _banner(f"BAND SYSTEM CHECK - {args.file}")
    human.append(f"\n📊 {report['pairs']} pair(s), χ = {report['chi']}, total length {report['total_length']}")
    human.append(f"  generators: {', '.join(g['id'] + ' [' + g['lo'] + ', ' + g['hi'] + ']' for g in report['generators'])}")
    human.append(f"  stationary words up to length {DEFAULT_ORBIT_DEPTH}: {len(report['stationary_words'])}")
    human.append(f"  orbit checks: {report['orbit_moves_checked']} move(s), {len(report['orbit_failures'])} failure(s)")
    human.append(visualize_band_ascii(bs))
    _emit(args, report, human)
    return ExitCode.VALIDATION if report['orbit_failures'] else ExitCode.SUCCESS


def cmd_graph_subst(args) -> int:
    graph = SolutionGraph.from_dict(_read_json(args.graph))
    system = parse_equations(_read_text(args.equations))
    assignment = LabelAssignment.from_strings(system.alphabet, _parse_bindings(args.assign))
    s = substitute(graph, assignment)
    solves = is_solution(s, system)
    validity = verify_graph(graph, system, DEFAULT_GRAPH_SAMPLES, args.seed)
    if args.dot:
        graph_to_dot(graph, args.dot)
    payload = {'substitution': s.to_dict(), 'is_solution': solves, 'graph': validity.value}
    human = _banner("GRAPH SUBSTITUTION")
    human.extend(f"  {name}↦{word}" for name, word in s.to_dict().items())
    human.append(f"\n  solves the system: {solves}")
    human.append(f"  graph validity: {validity.value}")
    _emit(args, payload, human)
    return ExitCode.SUCCESS if solves else ExitCode.VALIDATION


def _coverage_lines(name: str, report) -> List[str]:
    lines = [f"  {name}: covered {len(report.covered)}, uncovered {len(report.uncovered)}, "
             f"family {report.family_size}, non-solutions {report.non_solutions}"]
    for s in report.uncovered[:10]:
        lines.append("    ✗ " + ", ".join(f"{v}↦{w}" for v, w in s.to_dict().items()))
    return lines


def cmd_graph_cover(args) -> int:
    diagram = MRDiagram.from_dict(_read_json(args.file))
    resolutions = [r for r in diagram.resolutions if args.resolution in (None, r.name)]
    if not resolutions:
        raise MRError(f"No resolution named {args.resolution}")
    budget = _budget(args)
    reports = {r.name: family_cover_check(r, diagram.system, budget, args.twist_depth) for r in resolutions}
    if args.dot:
        graph_to_dot(resolutions[0].terminal, args.dot)
    human = _banner(f"RESOLUTION COVERAGE (max length {budget.max_len}, twist depth {args.twist_depth})")
    for name, report in reports.items():
        human.extend(_coverage_lines(name, report))
    _emit(args, {name: r.to_dict() for name, r in reports.items()}, human)
    return ExitCode.SUCCESS if all(r.ok for r in reports.values()) else ExitCode.COVERAGE


def cmd_diagram_check(args) -> int:
    diagram = MRDiagram.from_dict(_read_json(args.file))
    budget = _budget(args)
    report = diagram_check(diagram, budget, args.twist_depth)
    human = _banner(f"DIAGRAM CHECK (max length {budget.max_len}, twist depth {args.twist_depth})")
    for i in range(len(diagram.system.equations)):
        human.append(f"  {diagram.system.format_equation(i)}")
    human.append(f"\n📊 solutions: {report.total}")
    for name, r in report.per_resolution.items():
        human.extend(_coverage_lines(name, r))
    human.append(f"\nuncovered: {len(report.uncovered)}")
    _emit(args, report.to_dict(), human)
    return ExitCode.SUCCESS if report.ok else ExitCode.COVERAGE


def cmd_separability(args) -> int:
    decomposition = SeparableDecomposition.from_dict(_read_json(args.decomposition))
    system = parse_equations(_read_text(args.equations))
    s = Substitution.from_strings(system.alphabet, _parse_bindings(args.subst))
    if args.dot:
        graph_to_dot(decomposition, args.dot, name="D")
    try:
        marked = separability_check(decomposition, s, system)
    except NotSeparable as exc:
        payload = exc.to_dict()
        payload['equation'] = exc.equation
        _emit(args, payload, _banner("SEPARABILITY") + [f"  not separable: equation {exc.equation} breaks"])
        return exc.exit_code
    erased = marked.erase()
    payload = dict(marked.to_dict(), erased=erased.to_dict(), recovers_input=erased == s)
    human = _banner("SEPARABILITY")
    human.extend(f"  {name}↦{word}" for name, word in marked.substitution.to_dict().items())
    human.append(f"\n  markers: {marked.markers}")
    human.append(f"  erasing markers gives the input back: {erased == s}")
    _emit(args, payload, human)
    return ExitCode.SUCCESS


HANDLERS = {
    "solve": cmd_solve,
    "basis": cmd_basis,
    "band-run": cmd_band_run,
    "band-check": cmd_band_check,
    "graph-subst": cmd_graph_subst,
    "graph-cover": cmd_graph_cover,
    "diagram-check": cmd_diagram_check,
    "separability": cmd_separability,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output on stdout")
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--max-len", type=int, default=DEFAULT_MAX_LEN)
    common.add_argument("--max-solutions", type=int, default=DEFAULT_MAX_SOLUTIONS)
    common.add_argument("--max-nodes", type=int, default=DEFAULT_MAX_NODES)
    common.add_argument("--twist-depth", type=int, default=DEFAULT_TWIST_DEPTH)
    common.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    common.add_argument("--dot", metavar="OUT", help="write a DOT drawing of the graph")

    parser = argparse.ArgumentParser(prog="mrdiagrams", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="enumerate solutions up to --max-len")
    p.add_argument("file")
    p.add_argument("--strategy", choices=("levi", "exhaustive"), default="levi")
    p.add_argument("--cross-check", action="store_true", help="compare both strategies")

    p = sub.add_parser("basis", parents=[common], help="positive basis of a lattice instance")
    p.add_argument("file")
    p.add_argument("--step-budget", type=int, default=DEFAULT_STEP_BUDGET)

    p = sub.add_parser("band-run", parents=[common], help="run the Rips machine on a band system")
    p.add_argument("file")
    p.add_argument("--trace", metavar="OUT", help="write the move trace as JSON lines")
    p.add_argument("--output", metavar="OUT", help="write the full results as JSON")
    p.add_argument("--plot", metavar="OUT", help="plot χ and length per move")

    p = sub.add_parser("band-check", parents=[common], help="structure and orbit checks of a band system")
    p.add_argument("file")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--plot", metavar="OUT", help="plot the band system")
    p.add_argument("--graph-plot", metavar="OUT", help="plot the associated graph")

    p = sub.add_parser("graph-subst", parents=[common], help="substitute label values into a solution graph")
    p.add_argument("graph")
    p.add_argument("equations")
    p.add_argument("--assign", nargs="+", default=[], metavar="LABEL=WORD")

    p = sub.add_parser("graph-cover", parents=[common], help="coverage of each resolution of a diagram")
    p.add_argument("file")
    p.add_argument("--resolution", help="check only this resolution")

    p = sub.add_parser("diagram-check", parents=[common], help="does the diagram cover every solution")
    p.add_argument("file")

    p = sub.add_parser("separability", parents=[common], help="insert marker letters along a decomposition")
    p.add_argument("decomposition")
    p.add_argument("equations")
    p.add_argument("--subst", nargs="+", default=[], metavar="VAR=WORD")
    return parser


def run(args) -> int:
    """Run one parsed command; library errors become their exit codes."""
    try:
        return int(HANDLERS[args.command](args))
    except MRError as exc:
        logger.debug("command failed", exc_info=True)
        if args.json:
            print(json.dumps(exc.to_dict(), sort_keys=True, indent=2))
        else:
            print(f"❌ {exc}", file=sys.stderr)
        return int(exc.exit_code)
    except (OSError, ValueError, KeyError) as exc:
        if args.json:
            print(json.dumps({'error': 'invalid_input', 'message': str(exc)}, sort_keys=True, indent=2))
        else:
            print(f"❌ {exc}", file=sys.stderr)
        return int(ExitCode.VALIDATION)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return run(args)
