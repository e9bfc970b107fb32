"""Shared worklist machinery for macrostate constructions.

Builders supply initial macrostates and a successor function yielding
(target, accepting) pairs in a deterministic order; exploration assigns
dense ids in discovery order, which keeps every construction reproducible.
"""

from __future__ import annotations

from . import acceptance as ac
from .errors import BudgetExceededError
from .tela import Tela, Transition


def explore(initials, successors, nsymbols: int, budget: int):
    """Breadth-first closure; returns (macrostate order, transition list)."""
    index: dict = {}
    order: list = []
    for macro in initials:
        if macro not in index:
            index[macro] = len(order)
            order.append(macro)
    transitions = []
    pos = 0
    while pos < len(order):
        macro = order[pos]
        src = pos
        pos += 1
        for symbol in range(nsymbols):
            for target, accepting in successors(macro, symbol):
                tid = index.get(target)
                if tid is None:
                    if len(order) >= budget:
                        raise BudgetExceededError(budget)
                    tid = len(order)
                    index[target] = tid
                    order.append(target)
                transitions.append((src, symbol, accepting, tid))
    return order, transitions


def assemble_ba(aps: tuple[str, ...], order, transitions, ninitial: int,
                label_of) -> Tela:
    """Package explored macrostates as a transition-based Büchi automaton;
    accepting transitions carry colour 0."""
    marks = frozenset([0])
    trans = frozenset(
        Transition(src, symbol, marks if accepting else frozenset(), dst)
        for src, symbol, accepting, dst in transitions
    )
    labels = tuple(label_of(m) for m in order)
    return Tela(len(order), aps, trans, frozenset(range(ninitial)), 1,
                ac.inf(0), labels)
