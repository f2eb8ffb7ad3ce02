"""Visualization utilities for band systems, machine traces and solution graphs."""

import json
import logging
from fractions import Fraction
from typing import Dict, List, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import networkx as nx

from diagrams import to_dot
from pseudogroup import BandSystem, associated_graph, coverage_profile

logger = logging.getLogger(__name__)


def visualize_band_ascii(bs: BandSystem) -> str:
    """
    Create a text listing of a band system.

    Args:
        bs: Band system to describe

    Returns:
        String with one line per component and per base pair
    """
    output = []
    output.append("\nBand system:")
    output.append("=" * 60)

    output.append("\nComponents:")
    for i, (lo, hi) in enumerate(bs.components):
        output.append(f"  [{i}] [{lo}, {hi}]  length {hi - lo}")

    output.append("\nBase pairs:")
    for base_id, other_id in bs.pairs():
        b, p = bs.bases[base_id], bs.bases[other_id]
        output.append(f"  {b.id:8s} [{b.lo}, {b.hi}]  <-->  {p.id:8s} [{p.lo}, {p.hi}]"
                      f"   shift {b.offset}")

    profile = coverage_profile(bs)
    output.append("\nCoverage:")
    for seg in profile.segments:
        marks = ",".join(seg.covering) if seg.covering else "-"
        output.append(f"  [{seg.lo}, {seg.hi}]  x{seg.multiplicity}  {marks}")

    output.append("=" * 60)
    return "\n".join(output)


def export_results_json(results: dict, filename: str = "results.json"):
    """
    Export run results to a JSON file with sorted keys.

    Args:
        results: Results dictionary from a machine run or a check
        filename: Output filename
    """
    with open(filename, 'w') as f:
        json.dump(results, f, indent=2, sort_keys=True)
    logger.info("results exported to %s", filename)


def write_trace(events: List[Dict], filename: str):
    """Write one JSON object per move, one per line."""
    with open(filename, 'w') as f:
        for event in events:
            f.write(json.dumps(event, sort_keys=True) + "\n")
    logger.info("%d trace events written to %s", len(events), filename)


def graph_to_dot(g, filename: Optional[str] = None, name: str = "G") -> str:
    """
    DOT text for a solution graph or separable decomposition, optionally saved.

    Args:
        g: SolutionGraph or SeparableDecomposition
        filename: Where to write the text, if given
        name: Graph name in the DOT header
    """
    text = to_dot(g, name)
    if filename:
        with open(filename, 'w') as f:
            f.write(text)
        logger.info("DOT written to %s", filename)
    return text


def create_summary_report(results: dict) -> str:
    """
    Create a text summary report of a machine run.

    Args:
        results: Dictionary returned by RipsMachine.run

    Returns:
        Formatted report string
    """
    report = []
    report.append("\n" + "=" * 70)
    report.append(f"RIPS MACHINE - SUMMARY ({results['name']})")
    report.append("=" * 70)

    report.append(f"\nStatus: {results['status']}")
    report.append(f"Moves: {results['moves']} in {results['rounds']} round(s)")
    report.append(f"Pairs left: {results['pairs']}")
    report.append(f"Euler characteristic: {results['chi']}")
    report.append(f"Total base length: {results['total_length']}")

    report.append("\nMoves by type:")
    for move, count in results['move_counts'].items():
        if count:
            report.append(f"  {move}: {count}")

    report.append("\nBase length after each round:")
    report.append("  " + " -> ".join(results['round_lengths']))

    if results['violations']:
        report.append("\n⚠️  Invariant violations:")
        for v in results['violations']:
            report.append(f"  {v}")
    else:
        report.append("\n✓ No invariant violations")

    report.append("=" * 70)
    return "\n".join(report)


def _pair_colors(bs: BandSystem) -> Dict[str, str]:
    cmap = plt.get_cmap("tab10")
    colors = {}
    for i, (base_id, other_id) in enumerate(bs.pairs()):
        colors[base_id] = colors[other_id] = matplotlib.colors.to_hex(cmap(i % 10))
    return colors


def plot_band_system(bs: BandSystem, save_path: str = None, show: bool = False, title: str = "Band system"):
    """
    Draw components as a line, each base as a bar above it and each
    pairing as an arc from base to partner.

    Args:
        bs: Band system to draw
        save_path: Optional path to save the plot
        show: Whether to display the plot
        title: Plot title
    """
    fig, ax = plt.subplots(figsize=(14, 6))
    colors = _pair_colors(bs)

    for lo, hi in bs.components:
        ax.plot([float(lo), float(hi)], [0, 0], color='black', linewidth=4, solid_capstyle='butt')

    # stack overlapping bases on separate rows
    rows: List[Fraction] = []
    level = {}
    for b in bs.bases.values():
        for r, end in enumerate(rows):
            if end <= b.lo:
                rows[r] = b.hi
                level[b.id] = r
                break
        else:
            rows.append(b.hi)
            level[b.id] = len(rows) - 1

    for b in bs.bases.values():
        y = 0.5 + 0.4 * level[b.id]
        ax.barh(y, float(b.length), left=float(b.lo), height=0.3, color=colors[b.id],
                edgecolor='black', alpha=0.8)
        ax.text(float(b.lo + b.hi) / 2, y, b.id, ha='center', va='center', fontsize=9, fontweight='bold')

    for base_id, other_id in bs.pairs():
        b, p = bs.bases[base_id], bs.bases[other_id]
        x0, x1 = float(b.lo + b.hi) / 2, float(p.lo + p.hi) / 2
        y0, y1 = 0.5 + 0.4 * level[b.id], 0.5 + 0.4 * level[p.id]
        top = max(y0, y1) + 0.4 + 0.1 * abs(x1 - x0) / max(float(bs.total_length()), 1)
        ax.plot([x0, x0, x1, x1], [y0 + 0.15, top, top, y1 + 0.15], color=colors[b.id], linestyle='--')

    ax.set_title(f"{title}\n{len(bs.components)} component(s), {bs.pair_count} pair(s), "
                 f"total length {bs.total_length()}", fontsize=14, fontweight='bold')
    ax.set_yticks([])
    ax.set_xlabel("position")
    plt.tight_layout()

    if save_path:
        plt.savefig(save_path, dpi=150, bbox_inches='tight')
        logger.info("band plot saved to %s", save_path)
    if show:
        plt.show()
    return fig, ax


def plot_associated_graph(bs: BandSystem, save_path: str = None, show: bool = False):
    """Network plot of the associated graph: one vertex per covered interval, one edge per pair."""
    g = associated_graph(bs)
    fig, ax = plt.subplots(figsize=(8, 6))
    pos = nx.circular_layout(g.graph)
    nx.draw_networkx_nodes(g.graph, pos, node_color='lightblue', node_size=2000,
                           edgecolors='blue', linewidths=2, ax=ax)
    nx.draw_networkx_edges(g.graph, pos, width=2, alpha=0.6, edge_color='gray', ax=ax)
    nx.draw_networkx_labels(g.graph, pos, {v: f"[{v[0]}, {v[1]}]" for v in g.graph.nodes}, font_size=8, ax=ax)
    ax.set_title(f"Associated graph, χ = {g.euler_characteristic}", fontsize=14, fontweight='bold')
    ax.axis('off')
    plt.tight_layout()
    if save_path:
        plt.savefig(save_path, dpi=150, bbox_inches='tight')
        logger.info("graph plot saved to %s", save_path)
    if show:
        plt.show()
    return fig, ax


def plot_trace(results: dict, save_path: str = None, show: bool = False):
    """
    Plot χ and total base length after every move of a machine run.

    Args:
        results: Dictionary returned by RipsMachine.run
        save_path: Optional path to save the plot
        show: Whether to display the plot
    """
    events = results['events']
    steps = [e['step'] for e in events]
    chi = [e['chi_after'] for e in events]
    lengths = [float(Fraction(e['total_length'])) for e in events]

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(12, 8), sharex=True)
    ax1.step(steps, chi, where='post', color='darkred', linewidth=2)
    ax1.set_ylabel("χ")
    ax1.grid(True, alpha=0.3)
    ax2.plot(steps, lengths, marker='o', color='navy', linewidth=2)
    ax2.set_ylabel("total base length")
    ax2.set_xlabel("move")
    ax2.grid(True, alpha=0.3)
    ax1.set_title(f"Rips machine trace - {results['name']} ({results['status']})", fontsize=14, fontweight='bold')
    plt.tight_layout()
    if save_path:
        plt.savefig(save_path, dpi=150, bbox_inches='tight')
        logger.info("trace plot saved to %s", save_path)
    if show:
        plt.show()
    return fig, (ax1, ax2)
