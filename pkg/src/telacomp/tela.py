"""Automaton data model and structural transformations.

States are dense integers, symbols are indices into the minterm alphabet
spanned by the atomic propositions.  Automata are immutable; every
transformation builds a fresh value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

from . import acceptance as ac
from .acceptance import Acceptance, GenRabinPair
from .errors import ValidationError

MAX_APS = 8


def minterm_names(aps: tuple[str, ...]) -> tuple[str, ...]:
    """Symbol names for all total valuations of the propositions.

    Bit i of the symbol index is the truth value of aps[i].
    """
    if not aps:
        return ("t",)
    names = []
    for s in range(1 << len(aps)):
        lits = [ap if (s >> i) & 1 else "!" + ap for i, ap in enumerate(aps)]
        names.append("&".join(lits))
    return tuple(names)


@dataclass(frozen=True)
class Transition:
    src: int
    symbol: int
    colours: frozenset[int]
    dst: int

    def sort_key(self):
        return (self.src, self.symbol, self.dst, tuple(sorted(self.colours)))


@dataclass(frozen=True)
class Tela:
    """Transition-based Emerson-Lei automaton over a minterm alphabet."""

    n: int
    aps: tuple[str, ...]
    transitions: frozenset[Transition]
    initial: frozenset[int]
    ncolours: int
    acceptance: Acceptance
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("automaton needs at least one state")
        if len(self.aps) > MAX_APS:
            raise ValidationError(f"at most {MAX_APS} atomic propositions supported")
        if len(set(self.aps)) != len(self.aps):
            raise ValidationError("duplicate atomic proposition names")
        nsym = 1 << len(self.aps)
        for t in self.transitions:
            if not (0 <= t.src < self.n and 0 <= t.dst < self.n):
                raise ValidationError(f"transition state out of range: {t}")
            if not 0 <= t.symbol < nsym:
                raise ValidationError(f"transition symbol out of range: {t}")
            for c in t.colours:
                if not 0 <= c < self.ncolours:
                    raise ValidationError(f"transition colour out of range: {t}")
        for q in self.initial:
            if not 0 <= q < self.n:
                raise ValidationError(f"initial state out of range: {q}")
        ac.validate_colours(self.acceptance, self.ncolours)
        if self.labels is not None and len(self.labels) != self.n:
            raise ValidationError("labels must cover every state")

    @property
    def nsymbols(self) -> int:
        return 1 << len(self.aps)

    @cached_property
    def alphabet(self) -> tuple[str, ...]:
        return minterm_names(self.aps)

    @cached_property
    def _out(self) -> dict[tuple[int, int], tuple[tuple[int, frozenset[int]], ...]]:
        table: dict[tuple[int, int], list[tuple[int, frozenset[int]]]] = {}
        for t in sorted(self.transitions, key=Transition.sort_key):
            table.setdefault((t.src, t.symbol), []).append((t.dst, t.colours))
        return {k: tuple(v) for k, v in table.items()}

    def out(self, q: int, symbol: int) -> tuple[tuple[int, frozenset[int]], ...]:
        """(dst, colours) pairs for one state and symbol, sorted."""
        return self._out.get((q, symbol), ())

    def delta(self, q: int, symbol: int) -> frozenset[int]:
        return frozenset(dst for dst, _ in self.out(q, symbol))

    def delta_set(self, states, symbol: int) -> frozenset[int]:
        dsts: set[int] = set()
        for q in states:
            dsts.update(dst for dst, _ in self.out(q, symbol))
        return frozenset(dsts)

    def symbol_index(self, name: str) -> int:
        try:
            return self.alphabet.index(name)
        except ValueError:
            raise ValidationError(f"unknown symbol {name!r}") from None


def relabel(a: Tela, labels: tuple[str, ...] | None) -> Tela:
    return Tela(a.n, a.aps, a.transitions, a.initial, a.ncolours, a.acceptance, labels)


def restrict_delta(a: Tela, colours: int | frozenset[int] | set[int]) -> frozenset[Transition]:
    """Transitions whose label avoids the given colour(s)."""
    if isinstance(colours, int):
        colours = frozenset([colours])
    else:
        colours = frozenset(colours)
    for c in colours:
        if not 0 <= c < a.ncolours:
            raise ValidationError(f"colour {c} out of range")
    return frozenset(t for t in a.transitions if not (t.colours & colours))


def restricted_out(a: Tela, colours) -> dict[tuple[int, int], tuple[tuple[int, frozenset[int]], ...]]:
    """Successor table of restrict_delta, same layout as Tela.out."""
    table: dict[tuple[int, int], list[tuple[int, frozenset[int]]]] = {}
    for t in sorted(restrict_delta(a, colours), key=Transition.sort_key):
        table.setdefault((t.src, t.symbol), []).append((t.dst, t.colours))
    return {k: tuple(v) for k, v in table.items()}


# --------------------------------------------------------------------------
# DNF rewriting with colour fusion


def to_gen_rabin(alpha: Acceptance, a: Tela) -> tuple[Tela, tuple[GenRabinPair, ...]]:
    """Rewrite the condition into generalized Rabin pairs.

    The automaton keeps its state/transition structure; every clause with
    two or more Fin colours gets a fresh fused colour added to each
    transition carrying any of them, so each pair needs at most one Fin
    colour.  Language is preserved.
    """
    ac.validate_colours(alpha, a.ncolours)
    clauses = ac.dnf_clauses(alpha)
    fused: dict[frozenset[int], int] = {}
    next_colour = a.ncolours
    pairs = []
    for fins, infs in clauses:
        if len(fins) >= 2:
            if fins not in fused:
                fused[fins] = next_colour
                next_colour += 1
            fin_part = frozenset([fused[fins]])
        else:
            fin_part = fins
        pairs.append(
            GenRabinPair(fin=fin_part, infs=tuple(frozenset([g]) for g in sorted(infs)))
        )
    transitions = a.transitions
    if fused:
        new_transitions = []
        for t in a.transitions:
            extra = {cid for members, cid in fused.items() if t.colours & members}
            new_transitions.append(
                Transition(t.src, t.symbol, t.colours | frozenset(extra), t.dst)
            )
        transitions = frozenset(new_transitions)
    condition = ac.disj(*(p.formula() for p in pairs))
    out = Tela(a.n, a.aps, transitions, a.initial, next_colour, condition, a.labels)
    return out, tuple(pairs)


# --------------------------------------------------------------------------
# Fin-removal


def fin_removal(a: Tela, pairs: tuple[GenRabinPair, ...]) -> Tela:
    """Turn a generalized-Rabin automaton into a GBA by copying.

    Copy 0 carries the full transition relation uncoloured; copy j >= 1
    drops the transitions hitting pair j's Fin colours.  Every original
    transition also jumps nondeterministically from copy 0 into each copy.
    The copies share one block of colours; copies with fewer Inf groups
    pad the missing colours onto all of their transitions.  The result has
    exactly n*(k+1) states.
    """
    n, k = a.n, len(pairs)
    if k == 0:
        # No satisfiable clause: an n-state GBA with one colour that never
        # occurs, hence the empty language.
        return Tela(
            n, a.aps,
            frozenset(Transition(t.src, t.symbol, frozenset(), t.dst)
                      for t in a.transitions),
            a.initial, 1, ac.inf(0), a.labels,
        )
    shared = max(1, max(len(p.infs) for p in pairs))

    def copy_state(copy: int, q: int) -> int:
        return copy * n + q

    transitions: set[Transition] = set()
    for t in a.transitions:
        # Copy 0: structure only, plus stay-or-jump nondeterminism.
        transitions.add(Transition(t.src, t.symbol, frozenset(), t.dst))
        for j, pair in enumerate(pairs, start=1):
            if t.colours & pair.fin:
                continue
            cols = {i for i, group in enumerate(pair.infs) if t.colours & group}
            cols.update(range(len(pair.infs), shared))
            transitions.add(
                Transition(copy_state(j, t.src), t.symbol, frozenset(cols),
                           copy_state(j, t.dst))
            )
            # Jump edges occur at most once per run, so they stay uncoloured.
            transitions.add(Transition(t.src, t.symbol, frozenset(),
                                       copy_state(j, t.dst)))
    condition = ac.conj(*(ac.inf(i) for i in range(shared)))
    base = a.labels or tuple(str(q) for q in range(n))
    labels = tuple(
        f"{base[q]}#{copy}" for copy in range(k + 1) for q in range(n)
    )
    return Tela(n * (k + 1), a.aps, frozenset(transitions), a.initial,
                shared, condition, labels)


# --------------------------------------------------------------------------
# Products and degeneralization


def _check_same_alphabet(automata):
    aps = automata[0].aps
    for b in automata[1:]:
        if b.aps != aps:
            raise ValidationError("product needs a shared alphabet")


def gba_product(automata: list[Tela]) -> Tela:
    """Synchronized product of generalized Büchi automata.

    Colours are offset to stay disjoint, so the product condition is the
    conjunction of all the inputs' Inf atoms; the state count is the full
    product of the inputs' state counts.
    """
    if not automata:
        raise ValidationError("product of zero automata")
    _check_same_alphabet(automata)
    for b in automata:
        cls = ac.classify(b.acceptance)
        if cls not in (ac.ConditionClass.GBA, ac.ConditionClass.BUCHI,
                       ac.ConditionClass.INF_ONLY):
            raise ValidationError("gba_product needs Inf-only inputs")
    sizes = [b.n for b in automata]
    offsets = []
    total_colours = 0
    for b in automata:
        offsets.append(total_colours)
        total_colours += b.ncolours

    def state_id(vector) -> int:
        sid = 0
        for q, size in zip(vector, sizes):
            sid = sid * size + q
        return sid

    transitions: set[Transition] = set()
    nsym = automata[0].nsymbols
    for vector in itertools.product(*(range(size) for size in sizes)):
        src = state_id(vector)
        for symbol in range(nsym):
            per_part = [b.out(q, symbol) for q, b in zip(vector, automata)]
            for choice in itertools.product(*per_part):
                dst_vec = tuple(dst for dst, _ in choice)
                cols: set[int] = set()
                for (dst, colours), off in zip(choice, offsets):
                    cols.update(c + off for c in colours)
                transitions.add(
                    Transition(src, symbol, frozenset(cols), state_id(dst_vec))
                )
    initial = frozenset(
        state_id(vec)
        for vec in itertools.product(*(sorted(b.initial) for b in automata))
    )
    condition = ac.conj(*(ac.inf(c) for c in range(total_colours)))
    labels = tuple(
        "|".join(
            (b.labels[q] if b.labels else str(q))
            for q, b in zip(vec, automata)
        )
        for vec in itertools.product(*(range(size) for size in sizes))
    )
    total = 1
    for size in sizes:
        total *= size
    return Tela(total, automata[0].aps, frozenset(transitions), initial,
                total_colours, condition, labels)


def product_conjunction(a: Tela, b: Tela) -> Tela:
    """Reachable synchronized product with condition alpha_a & alpha_b
    over colour-disjoint marks.  Used for exact disjointness checks."""
    _check_same_alphabet([a, b])
    off = a.ncolours
    start = sorted(
        (qa, qb) for qa in sorted(a.initial) for qb in sorted(b.initial)
    )
    index: dict[tuple[int, int], int] = {}
    order: list[tuple[int, int]] = []
    for pair in start:
        if pair not in index:
            index[pair] = len(order)
            order.append(pair)
    transitions: set[Transition] = set()
    work = list(start)
    while work:
        qa, qb = work.pop(0)
        src = index[(qa, qb)]
        for symbol in range(a.nsymbols):
            for da, ca in a.out(qa, symbol):
                for db, cb in b.out(qb, symbol):
                    pair = (da, db)
                    if pair not in index:
                        index[pair] = len(order)
                        order.append(pair)
                        work.append(pair)
                    cols = frozenset(ca) | frozenset(c + off for c in cb)
                    transitions.add(Transition(src, symbol, cols, index[pair]))
    shifted = _shift_colours(b.acceptance, off)
    condition = ac.conj(a.acceptance, shifted)
    ncolours = max(1, a.ncolours + b.ncolours)
    if not order:
        return Tela(1, a.aps, frozenset(), frozenset(), ncolours, condition)
    labels = tuple(f"{qa}|{qb}" for qa, qb in order)
    initial = frozenset(index[p] for p in start)
    return Tela(len(order), a.aps, frozenset(transitions), initial,
                ncolours, condition, labels)


def _shift_colours(alpha: Acceptance, off: int) -> Acceptance:
    if alpha.kind in (ac.INF, ac.FIN):
        return Acceptance(alpha.kind, colour=alpha.colour + off)
    if alpha.kind in (ac.AND, ac.OR):
        return Acceptance(
            alpha.kind, children=tuple(_shift_colours(c, off) for c in alpha.children)
        )
    return alpha


def degeneralize(g: Tela) -> Tela:
    """Round-robin counter conversion of a GBA into a Büchi automaton."""
    k = g.ncolours
    if k < 1:
        raise ValidationError("degeneralize needs at least one colour")
    cls = ac.classify(g.acceptance)
    if cls not in (ac.ConditionClass.GBA, ac.ConditionClass.BUCHI):
        raise ValidationError("degeneralize needs a generalized Büchi condition")
    n = g.n

    def state_id(q: int, level: int) -> int:
        return q * k + level

    transitions: set[Transition] = set()
    for t in g.transitions:
        for level in range(k):
            nxt = level
            while nxt < k and nxt in t.colours:
                nxt += 1
            if nxt == k:
                transitions.add(
                    Transition(state_id(t.src, level), t.symbol,
                               frozenset([0]), state_id(t.dst, 0))
                )
            else:
                transitions.add(
                    Transition(state_id(t.src, level), t.symbol,
                               frozenset(), state_id(t.dst, nxt))
                )
    initial = frozenset(state_id(q, 0) for q in g.initial)
    base = g.labels or tuple(str(q) for q in range(n))
    labels = tuple(f"{base[q]}@{level}" for q in range(n) for level in range(k))
    return Tela(n * k, g.aps, frozenset(transitions), initial, 1,
                ac.inf(0), labels)


# --------------------------------------------------------------------------
# Trimming


def reachable_states(a: Tela) -> frozenset[int]:
    seen = set(a.initial)
    work = sorted(a.initial)
    while work:
        q = work.pop()
        for symbol in range(a.nsymbols):
            for dst, _ in a.out(q, symbol):
                if dst not in seen:
                    seen.add(dst)
                    work.append(dst)
    return frozenset(seen)


def trim(a: Tela) -> Tela:
    """Drop states that cannot lie on any accepting run.

    Keeps states both reachable from the initial set and able to reach an
    accepting cycle; the language is unchanged.  Returns a one-state
    automaton with an unsatisfiable condition when nothing survives.
    """
    from .lasso import accepting_cycle_states  # local import, no cycle at runtime

    reach = reachable_states(a)
    seeds = accepting_cycle_states(a)
    # Backward closure of the accepting-cycle states.
    rev: dict[int, set[int]] = {q: set() for q in range(a.n)}
    for t in a.transitions:
        rev[t.dst].add(t.src)
    live = set(seeds)
    work = sorted(live)
    while work:
        q = work.pop()
        for p in rev[q]:
            if p not in live:
                live.add(p)
                work.append(p)
    keep = sorted(reach & live)
    if not keep:
        return Tela(1, a.aps, frozenset(), frozenset(), a.ncolours, ac.ff())
    remap = {q: i for i, q in enumerate(keep)}
    transitions = frozenset(
        Transition(remap[t.src], t.symbol, t.colours, remap[t.dst])
        for t in a.transitions
        if t.src in remap and t.dst in remap
    )
    initial = frozenset(remap[q] for q in a.initial if q in remap)
    labels = None
    if a.labels:
        labels = tuple(a.labels[q] for q in keep)
    return Tela(len(keep), a.aps, transitions, initial, a.ncolours,
                a.acceptance, labels)


def universal_ba(aps: tuple[str, ...]) -> Tela:
    """One-state Büchi automaton accepting every word."""
    nsym = 1 << len(aps)
    transitions = frozenset(
        Transition(0, s, frozenset([0]), 0) for s in range(nsym)
    )
    return Tela(1, aps, transitions, frozenset([0]), 1, ac.inf(0))
