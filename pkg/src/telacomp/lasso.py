"""Ground-truth semantics on ultimately periodic words.

Membership of a lasso word u.v^omega is decided on a folded graph whose
nodes are (state, position) pairs with the periodic positions wrapping
around.  Acceptance enumerates colour subsets and inspects the strongly
connected components of the restricted graph; emptiness runs the same
analysis on the automaton graph itself.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import acceptance as ac
from .errors import OracleLimitError, ValidationError
from .tela import Tela

MAX_ORACLE_COLOURS = 12

Node = tuple[int, int]


@dataclass(frozen=True)
class LassoWord:
    """Finite presentation (prefix, period) of the word prefix.period^omega."""

    prefix: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        if len(self.period) < 1:
            raise ValidationError("lasso period must be non-empty")

    def symbol_at(self, position: int) -> int:
        if position < len(self.prefix):
            return self.prefix[position]
        return self.period[(position - len(self.prefix)) % len(self.period)]

    def render(self, alphabet: tuple[str, ...]) -> str:
        pre = ",".join(alphabet[s] for s in self.prefix)
        per = ",".join(alphabet[s] for s in self.period)
        return f"{pre}({per})^w" if pre else f"({per})^w"


def check_word(a: Tela, word: LassoWord) -> None:
    for s in word.prefix + word.period:
        if not 0 <= s < a.nsymbols:
            raise ValidationError(f"symbol {s} outside the alphabet")


@dataclass(frozen=True)
class FoldedGraph:
    """Finite quotient of the runs of an automaton over a lasso word.

    Nodes are (state, position) pairs reachable from the initial states;
    positions past the prefix wrap from the last periodic slot back to the
    first one.  Every infinite run on the word corresponds to an infinite
    path from an initial node and vice versa.
    """

    word: LassoWord
    prefix_len: int
    fold_len: int
    nodes: tuple[Node, ...]
    initial: tuple[Node, ...]
    edges: dict[Node, tuple[tuple[Node, frozenset[int]], ...]]

    def next_position(self, position: int) -> int:
        nxt = position + 1
        if nxt == self.fold_len:
            return self.prefix_len
        return nxt

    def edge_list(self) -> list[tuple[Node, Node, frozenset[int]]]:
        out = []
        for src in self.nodes:
            for dst, colours in self.edges.get(src, ()):
                out.append((src, dst, colours))
        return out

    def periodic_positions(self) -> range:
        return range(self.prefix_len, self.fold_len)


def fold(a: Tela, word: LassoWord) -> FoldedGraph:
    check_word(a, word)
    prefix_len = len(word.prefix)
    fold_len = prefix_len + len(word.period)
    initial = tuple((q, 0) for q in sorted(a.initial))
    edges: dict[Node, tuple[tuple[Node, frozenset[int]], ...]] = {}
    seen: set[Node] = set(initial)
    work: list[Node] = list(initial)
    while work:
        node = work.pop(0)
        q, pos = node
        nxt = pos + 1 if pos + 1 < fold_len else prefix_len
        symbol = word.symbol_at(pos)
        outs = []
        for dst, colours in a.out(q, symbol):
            target = (dst, nxt)
            outs.append((target, colours))
            if target not in seen:
                seen.add(target)
                work.append(target)
        edges[node] = tuple(outs)
    return FoldedGraph(
        word=word,
        prefix_len=prefix_len,
        fold_len=fold_len,
        nodes=tuple(sorted(seen)),
        initial=initial,
        edges=edges,
    )


def strongly_connected_components(nodes, succ) -> list[list]:
    """Iterative Tarjan; components come back in a deterministic order."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    components: list[list] = []
    counter = itertools.count()

    for root in nodes:
        if root in index:
            continue
        call = [(root, iter(succ(root)))]
        index[root] = low[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        while call:
            node, it = call[-1]
            advanced = False
            for dst in it:
                if dst not in index:
                    index[dst] = low[dst] = next(counter)
                    stack.append(dst)
                    on_stack.add(dst)
                    call.append((dst, iter(succ(dst))))
                    advanced = True
                    break
                if dst in on_stack:
                    low[node] = min(low[node], index[dst])
            if advanced:
                continue
            call.pop()
            if call:
                parent = call[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                component.sort()
                components.append(component)
    return components


def _colour_subsets(used: frozenset[int]):
    if len(used) > MAX_ORACLE_COLOURS:
        raise OracleLimitError(
            f"{len(used)} colours in play, oracle capped at {MAX_ORACLE_COLOURS}"
        )
    ordered = sorted(used)
    for size in range(len(ordered) + 1):
        for combo in itertools.combinations(ordered, size):
            yield frozenset(combo)


def _satisfying_cycle(edge_list, alpha: ac.Acceptance,
                      collect_states: bool = False):
    """Search the SCCs of colour-restricted subgraphs for a cycle whose
    colour set satisfies the condition.

    Returns a bool, or the set of nodes lying on a satisfying cycle when
    ``collect_states`` is set.
    """
    used = frozenset(c for _, _, colours in edge_list for c in colours)
    hits: set = set()
    for m in _colour_subsets(used):
        filtered = [e for e in edge_list if e[2] <= m]
        if not filtered:
            continue
        adj: dict = {}
        for src, dst, _ in filtered:
            adj.setdefault(src, []).append(dst)
        nodes = sorted({src for src, _, _ in filtered}
                       | {dst for _, dst, _ in filtered})
        components = strongly_connected_components(
            nodes, lambda v: adj.get(v, ())
        )
        comp_id: dict = {}
        for idx, component in enumerate(components):
            for node in component:
                comp_id[node] = idx
        colour_union: list[set[int]] = [set() for _ in components]
        has_internal = [False] * len(components)
        for src, dst, colours in filtered:
            idx = comp_id[src]
            if comp_id[dst] == idx:
                has_internal[idx] = True
                colour_union[idx].update(colours)
        for idx, component in enumerate(components):
            if not has_internal[idx]:
                continue
            if ac.evaluate(frozenset(colour_union[idx]), alpha):
                if not collect_states:
                    return True
                hits.update(component)
    if collect_states:
        return hits
    return False


def accepts(a: Tela, word: LassoWord) -> bool:
    """Membership of the lasso word in the automaton's language."""
    graph = fold(a, word)
    return bool(_satisfying_cycle(graph.edge_list(), a.acceptance))


def is_empty(a: Tela) -> bool:
    """Exact emptiness of the automaton's language."""
    reach = set(a.initial)
    work = sorted(a.initial)
    edge_list = []
    while work:
        q = work.pop()
        for symbol in range(a.nsymbols):
            for dst, colours in a.out(q, symbol):
                edge_list.append((q, dst, colours))
                if dst not in reach:
                    reach.add(dst)
                    work.append(dst)
    return not _satisfying_cycle(edge_list, a.acceptance)


def accepting_cycle_states(a: Tela) -> frozenset[int]:
    """States lying on some cycle whose colour set satisfies the condition,
    ignoring reachability from the initial states."""
    edge_list = [(t.src, t.dst, t.colours) for t in sorted(
        a.transitions, key=lambda t: t.sort_key())]
    return frozenset(_satisfying_cycle(edge_list, a.acceptance,
                                       collect_states=True))


def enumerate_lassos(nsymbols: int, max_u: int, max_v: int):
    """All lasso words with bounded prefix/period, canonically ordered."""
    symbols = range(nsymbols)
    for lu in range(max_u + 1):
        for prefix in itertools.product(symbols, repeat=lu):
            for lv in range(1, max_v + 1):
                for period in itertools.product(symbols, repeat=lv):
                    yield LassoWord(prefix, period)


@dataclass(frozen=True)
class XorReport:
    """Outcome of the complement cross-check over enumerated lassos."""

    checked: int
    violations: tuple[LassoWord, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def xor_suite(a: Tela, c: Tela, max_u: int, max_v: int) -> XorReport:
    """For every enumerated lasso, exactly one of the automata accepts.

    Violating lassos are reported in enumeration order.
    """
    if a.aps != c.aps:
        raise ValidationError("xor_suite needs a shared alphabet")
    violations = []
    checked = 0
    for word in enumerate_lassos(a.nsymbols, max_u, max_v):
        checked += 1
        if accepts(a, word) == accepts(c, word):
            violations.append(word)
    return XorReport(checked=checked, violations=tuple(violations))
