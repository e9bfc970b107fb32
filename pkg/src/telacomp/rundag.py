"""Folded run DAGs over lasso words and their rank/model labelling.

The run structure of an automaton over an ultimately periodic word is
folded into a finite graph of (state, position) nodes.  A node is finite
when it cannot reach any cycle.  The labelling procedure peels the graph
in rounds: it finds a set of nodes that are jointly starved of some
minimal model of the dual condition, gives them the next odd rank, then
gives the nodes that became finite the following even rank.  If a
non-empty remainder has no starved nodes, the word is accepted and no
labelling exists.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import acceptance as ac
from .errors import EmptyModelFamilyError, ValidationError
from .lasso import FoldedGraph, LassoWord, Node, fold, strongly_connected_components
from .tela import Tela


@dataclass(frozen=True)
class FoldedRunDag:
    graph: FoldedGraph
    finite: frozenset[Node]
    nstates: int

    @property
    def nodes(self) -> tuple[Node, ...]:
        return self.graph.nodes

    def successors(self, node: Node):
        return self.graph.edges.get(node, ())


@dataclass
class Labelling:
    ranks: dict[Node, int]
    models: dict[Node, frozenset[int]]

    def max_rank(self) -> int:
        return max(self.ranks.values(), default=0)


def _cycle_bound_nodes(nodes, edges) -> set[Node]:
    """Nodes that can reach a cycle of the (sub)graph."""
    adj = {node: [dst for dst, _ in edges.get(node, ()) if dst in nodes]
           for node in nodes}
    cyclic: set[Node] = set()
    for component in strongly_connected_components(sorted(nodes), adj.__getitem__):
        members = set(component)
        if len(component) > 1 or any(
            dst in members for dst in adj[component[0]]
        ):
            cyclic.update(members)
    # Backward closure over the subgraph.
    rev: dict[Node, list[Node]] = {node: [] for node in nodes}
    for src in nodes:
        for dst in adj[src]:
            rev[dst].append(src)
    reach_cycle = set(cyclic)
    work = sorted(cyclic)
    while work:
        node = work.pop()
        for prev in rev[node]:
            if prev not in reach_cycle:
                reach_cycle.add(prev)
                work.append(prev)
    return reach_cycle


def build_rundag(a: Tela, word: LassoWord) -> FoldedRunDag:
    """Folded run DAG with finite/infinite node classification."""
    graph = fold(a, word)
    nodes = set(graph.nodes)
    infinite = _cycle_bound_nodes(nodes, graph.edges)
    return FoldedRunDag(graph=graph, finite=frozenset(nodes - infinite),
                        nstates=a.n)


def endangered(dag: FoldedRunDag, node: Node, colour_set) -> bool:
    """True iff no edge carrying any of the colours is reachable from the
    node (the node itself included)."""
    colour_set = frozenset(colour_set)
    if node not in set(dag.nodes):
        raise ValidationError(f"node {node} not in the run DAG")
    seen = {node}
    work = [node]
    while work:
        current = work.pop()
        for dst, colours in dag.successors(current):
            if colours & colour_set:
                return False
            if dst not in seen:
                seen.add(dst)
                work.append(dst)
    return True


def _starved_nodes(nodes: set[Node], edges, model: frozenset[int]) -> set[Node]:
    """Nodes of the subgraph that cannot reach any edge coloured by the
    model: the complement of the backward closure of such edges."""
    rev: dict[Node, list[Node]] = {node: [] for node in nodes}
    sources: list[Node] = []
    for src in nodes:
        for dst, colours in edges.get(src, ()):
            if dst not in nodes:
                continue
            rev[dst].append(src)
            if colours & model:
                sources.append(src)
    can_reach = set(sources)
    work = list(can_reach)
    while work:
        node = work.pop()
        for prev in rev[node]:
            if prev not in can_reach:
                can_reach.add(prev)
                work.append(prev)
    # A node with a model-coloured out-edge reaches it trivially.
    return nodes - can_reach


def label(a: Tela, word: LassoWord) -> Labelling | None:
    """Rank/model labelling of the folded run DAG, or None when the word
    is in the language (no labelling exists).

    Round i assigns rank i+1 to every node starved of the first minimal
    model that starves anything (a constant mapping, which trivially
    satisfies the convergence requirement), removes them, then assigns
    rank i+2 to the newly finite nodes.
    """
    if a.acceptance.has_fin():
        raise ValidationError("labelling needs a Fin-free condition")
    mm = ac.minimal_models(a.acceptance, a.ncolours)
    if not mm:
        raise EmptyModelFamilyError("dual condition has no models")
    lex = mm[0]
    dag = build_rundag(a, word)
    edges = dag.graph.edges
    ranks: dict[Node, int] = {}
    models: dict[Node, frozenset[int]] = {}
    for node in dag.finite:
        ranks[node] = 0
        models[node] = lex
    remaining = set(dag.nodes) - dag.finite
    i = 0
    while remaining:
        starved: set[Node] | None = None
        chosen: frozenset[int] | None = None
        for model in mm:
            found = _starved_nodes(remaining, edges, model)
            if found:
                starved, chosen = found, model
                break
        if starved is None:
            return None
        for node in starved:
            ranks[node] = i + 1
            models[node] = chosen
        remaining -= starved
        still_infinite = _cycle_bound_nodes(remaining, edges)
        for node in remaining - still_infinite:
            ranks[node] = i + 2
            models[node] = lex
        remaining = still_infinite
        i += 2
    return Labelling(ranks=ranks, models=models)


def export_dot(dag: FoldedRunDag, labelling: Labelling | None = None) -> str:
    """Deterministic DOT rendering; ranked nodes show rank and model."""
    lines = ["digraph rundag {", "  rankdir=LR;"]
    for node in dag.nodes:
        q, pos = node
        name = f"q{q}_{pos}"
        text = f"q{q},{pos}"
        if labelling is not None and node in labelling.ranks:
            model = ",".join(map(str, sorted(labelling.models[node])))
            text += f" | r={labelling.ranks[node]} m={{{model}}}"
        shape = "box" if node in dag.finite else "ellipse"
        start = " style=bold" if node in dag.graph.initial else ""
        lines.append(f'  q{q}_{pos} [label="{text}" shape={shape}{start}];')
    for node in dag.nodes:
        q, pos = node
        for dst, colours in dag.successors(node):
            q2, pos2 = dst
            mark = ",".join(map(str, sorted(colours)))
            lines.append(f'  q{q}_{pos} -> q{q2}_{pos2} [label="{{{mark}}}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
