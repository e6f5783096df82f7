"""Unhackability graphs and simplification digraphs over sets of orderings.

Edge direction: ``(i, j)`` in ``directed_edges`` means node j simplifies node
i, i.e. arrows run from the refined ordering (tail) to its simplification
(head).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Sequence

from .errors import SetMismatch, UnknownFormat
from .ordering import NOT_SIMPLIFICATION, PolicyOrdering, check_hackable, check_simplification


@dataclass(frozen=True)
class OrderingGraph:
    nodes: tuple[PolicyOrdering, ...]
    undirected_edges: frozenset[tuple[int, int]]
    directed_edges: frozenset[tuple[int, int]]
    names: tuple[str, ...] | None = None

    def undirected_projection(self) -> set[tuple[int, int]]:
        return {(min(i, j), max(i, j)) for i, j in self.directed_edges}

    def subgraph_law_holds(self) -> bool:
        return self.undirected_projection() <= self.undirected_edges


def _canonical_nodes(orderings: Sequence[PolicyOrdering]) -> tuple[PolicyOrdering, ...]:
    unique = {o.classes: PolicyOrdering(o.classes) for o in orderings}
    nodes = tuple(sorted(unique.values(), key=PolicyOrdering.sort_key))
    if nodes and len({o.n for o in nodes}) > 1:
        raise SetMismatch("orderings are over policy sets of different size")
    return nodes


def build_unhackability_graph(orderings: Sequence[PolicyOrdering], names=None) -> OrderingGraph:
    """Nodes are deduplicated and sorted; (i, j) with i < j is an edge iff unhackable."""
    nodes = _canonical_nodes(orderings)
    edges = frozenset(
        (i, j) for i, j in itertools.combinations(range(len(nodes)), 2) if check_hackable(nodes[i], nodes[j]) is None
    )
    return OrderingGraph(nodes, edges, frozenset(), tuple(names) if names is not None else None)


def build_simplification_digraph(orderings: Sequence[PolicyOrdering], names=None) -> OrderingGraph:
    """Directed edge (i, j) iff node j is a (possibly trivial) simplification of node i.

    ``undirected_edges`` is filled with the unhackable pairs too, so the
    subgraph law can be checked on the returned object.
    """
    base = build_unhackability_graph(orderings, names)
    nodes = base.nodes
    directed = frozenset(
        (i, j)
        for i in range(len(nodes))
        for j in range(len(nodes))
        if i != j and check_simplification(nodes[i], nodes[j]) != NOT_SIMPLIFICATION
    )
    graph = OrderingGraph(nodes, base.undirected_edges, directed, base.names)
    assert graph.subgraph_law_holds(), "simplification edge between hackable orderings"
    return graph


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def emit_graph(graph: OrderingGraph, fmt: str = "dot", kind: str | None = None) -> str:
    """Serialize deterministically. ``kind`` picks which edge set DOT draws;
    by default directed edges if there are any, else undirected ones."""
    if kind is None:
        kind = "simplification" if graph.directed_edges else "unhackability"
    labels = [o.label(graph.names) for o in graph.nodes]
    if fmt == "json":
        doc = {
            "kind": kind,
            "names": list(graph.names) if graph.names is not None else None,
            "nodes": [{"id": i, "label": lab, "classes": o.to_list()} for i, (o, lab) in enumerate(zip(graph.nodes, labels))],
            "undirected_edges": [list(e) for e in sorted(graph.undirected_edges)],
            "directed_edges": [list(e) for e in sorted(graph.directed_edges)],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if fmt == "dot":
        directed = kind == "simplification"
        lines = ["digraph simplification {" if directed else "graph unhackability {"]
        for i, lab in enumerate(labels):
            lines.append(f'  n{i} [label="{_dot_escape(lab)}"];')
        if directed:
            for i, j in sorted(graph.directed_edges):
                lines.append(f"  n{i} -> n{j};")
        else:
            for i, j in sorted(graph.undirected_edges):
                lines.append(f"  n{i} -- n{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise UnknownFormat(f"unknown graph format {fmt!r} (expected dot or json)")


def graph_from_json(text: str) -> OrderingGraph:
    doc = json.loads(text)
    nodes = tuple(PolicyOrdering.build(n["classes"]) for n in doc["nodes"])
    return OrderingGraph(
        nodes,
        frozenset(tuple(e) for e in doc["undirected_edges"]),
        frozenset(tuple(e) for e in doc["directed_edges"]),
        tuple(doc["names"]) if doc["names"] is not None else None,
    )
