"""Indirect-link pruning and graph export."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import CausalGraph, DimensionMismatch, Edge, StrengthMatrix


def remove_indirect(mre: StrengthMatrix) -> StrengthMatrix:
    """Drop ``i -> k`` when some ``j`` gives ``i -> j -> k`` with both hops stronger.

    All triples are judged against the input matrix, so the result does not
    depend on the order in which triples are visited.
    """
    s = mre.s
    n = mre.n
    marked = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for k in range(n):
            if i == k or s[i, k] <= 0:
                continue
            for j in range(n):
                if j == i or j == k:
                    continue
                if s[i, j] > s[i, k] and s[j, k] > s[i, k]:
                    marked[i, k] = True
                    break
    out = np.array(s)
    out[marked] = 0.0
    return StrengthMatrix(out)


def to_graph(mre_bar: StrengthMatrix, names: Sequence[str]) -> CausalGraph:
    if len(names) != mre_bar.n:
        raise DimensionMismatch(f"{len(names)} names for a {mre_bar.n}-variable matrix")
    edges = tuple(Edge(names[i], names[j], float(mre_bar.s[i, j]))
                  for i, j in zip(*np.nonzero(mre_bar.s)))
    return CausalGraph(tuple(names), edges)


def from_graph(graph: CausalGraph) -> StrengthMatrix:
    index = {name: i for i, name in enumerate(graph.nodes)}
    m = np.zeros((len(graph.nodes), len(graph.nodes)))
    for e in graph.edges:
        m[index[e.source], index[e.target]] = e.strength
    return StrengthMatrix(m)


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(graph: CausalGraph) -> str:
    """DOT digraph; edge labels carry the strength, pen width grows from 1 to 4."""
    lines = ["digraph causal {"]
    lines += [f"  {_quote(v)};" for v in graph.nodes]
    for e in graph.edges:
        width = 1.0 + 3.0 * e.strength
        lines.append(f"  {_quote(e.source)} -> {_quote(e.target)} "
                     f'[label="{e.strength:.2f}", penwidth={width:.2f}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
