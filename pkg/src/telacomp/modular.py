"""Modular complementation for conditions of the form Fin(c) & phi.

The framework states are triples (S, P, m): S runs the plain subset
construction, P holds the runs that still have to die or see the Fin
colour again, and m is the macrostate of a pluggable subprocedure for phi
executed over the restricted transition relation.  Whenever the
subprocedure clears its breakpoint, P is resampled from S and fresh runs
flow into the subprocedure.

Three subprocedures are provided: the trivial one for phi = true (a
breakpoint construction), a tight-ranking one for a single Inf atom, and
a model-enriched tight-ranking one for conjunctions of Inf atoms.  The
last two are kept as independent code paths so they can be cross-checked
against each other.
"""

from __future__ import annotations

import itertools

from . import acceptance as ac
from .acceptance import GenRabinPair
from .complement_inf import complement_inf, complement_no_run
from .construction import assemble_ba, explore
from .errors import ValidationError
from .ranking import evenceil, generate_tight, odd_ranks_up_to
from .tela import Tela, gba_product, restricted_out, trim

DEFAULT_BUDGET = 200_000

# Subprocedure macrostates (all nested tuples, hence orderable/hashable):
#   ('s', P)                 set state mirroring the framework's P
#   ('a', dom, f, O, i)      active ranked state; dom == current P
#   ('t', dom, f, i)         tracking ranked state
# The model-enriched variants append the model tuple after f.


class TrueSub:
    """Subprocedure for phi = true: the macrostate just mirrors P."""

    def __init__(self, a: Tela, fin_colours: frozenset[int]):
        self.initial = (("s", tuple(sorted(a.initial))),)

    def breakempty(self, m) -> bool:
        return m[0] == "s" and not m[1]

    def succ_act(self, p2: tuple[int, ...], symbol: int, m):
        return (("s", p2),)

    def succ_track(self, p2, symbol, m):
        return ()

    def label(self, m) -> str:
        return "{" + ",".join(map(str, m[1])) + "}"


class _RankedSub:
    """Shared plumbing for the ranked subprocedures: the restricted
    successor table and the jump enumeration cache."""

    def __init__(self, a: Tela, fin_colours: frozenset[int]):
        self.a = a
        self.dout = restricted_out(a, fin_colours)
        self.maxrank = 2 * a.n
        self.initial = (("s", tuple(sorted(a.initial))),)
        self._jump_cache: dict[tuple[int, ...], list] = {}

    def _preds(self, dom: tuple[int, ...], symbol: int):
        preds: dict[int, list[tuple[int, frozenset[int]]]] = {}
        for pos, q in enumerate(dom):
            for dst, colours in self.dout.get((q, symbol), ()):
                preds.setdefault(dst, []).append((pos, colours))
        return preds

    def _image(self, states, symbol: int) -> set[int]:
        out: set[int] = set()
        for q in states:
            out.update(dst for dst, _ in self.dout.get((q, symbol), ()))
        return out

    def label(self, m) -> str:
        if m[0] == "s":
            return "{" + ",".join(map(str, m[1])) + "}"
        dom, ranks = m[1], m[2]
        body = " ".join(f"{q}:{v}" for q, v in zip(dom, ranks))
        if m[0] == "a":
            oset = ",".join(map(str, m[-2]))
            return f"<{body}|O={{{oset}}}|i={m[-1]}>"
        return f"[{body}|i={m[-1]}]"


class InfSub(_RankedSub):
    """Subprocedure for phi = Inf(g), built on tight partial rankings."""

    def __init__(self, a: Tela, fin_colours: frozenset[int], g: int):
        super().__init__(a, fin_colours)
        if not 0 <= g < a.ncolours:
            raise ValidationError(f"colour {g} out of range")
        self.g = frozenset([g])

    def breakempty(self, m) -> bool:
        tag = m[0]
        if tag == "s":
            return not m[1]
        if tag == "a":
            return not m[3]
        return False

    def _jumps(self, dom: tuple[int, ...]):
        cached = self._jump_cache.get(dom)
        if cached is None:
            cached = []
            for rank in odd_ranks_up_to(len(dom), self.maxrank):
                allowed = [tuple(range(rank + 1))] * len(dom)
                cached.extend(
                    (values, rank) for values in generate_tight(rank, allowed)
                )
            self._jump_cache[dom] = cached
        return cached

    def _steps(self, m, p2: tuple[int, ...], symbol: int):
        """Rank-preserving consistent successors with domain p2."""
        dom, ranks = m[1], m[2]
        rank = max(ranks)
        preds = self._preds(dom, symbol)
        p2_set = set(p2)
        if any(dst not in p2_set for dst in preds):
            return []
        allowed = []
        for q2 in p2:
            cap = rank
            for pos, colours in preds.get(q2, ()):
                fv = ranks[pos]
                cap = min(cap, evenceil(fv) if colours & self.g else fv)
            allowed.append(tuple(range(cap + 1)))
        return [(values, rank) for values in generate_tight(rank, allowed)]

    def succ_act(self, p2, symbol, m):
        tag = m[0]
        if tag == "s":
            return (("s", p2),)
        if tag == "t":
            return ()
        _, dom, ranks, o, i = m
        out = []
        if o:
            o_image = self._image(o, symbol)
            for values, _rank in self._steps(m, p2, symbol):
                o2 = tuple(q for idx, q in enumerate(p2)
                           if values[idx] == i and q in o_image)
                out.append(("a", p2, values, o2, i))
        else:
            for values, rank in self._steps(m, p2, symbol):
                out.append(("t", p2, values, (i + 2) % (rank + 1)))
        return out

    def succ_track(self, p2, symbol, m):
        tag = m[0]
        if tag == "s":
            return [("t", p2, values, 0) for values, _ in self._jumps(p2)]
        if tag == "a":
            return ()
        _, dom, ranks, i = m
        out = []
        for values, _rank in self._steps(m, p2, symbol):
            out.append(("t", p2, values, i))
            o2 = tuple(q for idx, q in enumerate(p2) if values[idx] == i)
            out.append(("a", p2, values, o2, i))
        return out


class ConjInfSub(_RankedSub):
    """Subprocedure for phi = a conjunction of Inf groups; rankings carry
    a minimal model of the dual condition per tracked state."""

    def __init__(self, a: Tela, fin_colours: frozenset[int],
                 groups: tuple[frozenset[int], ...]):
        super().__init__(a, fin_colours)
        if not groups:
            raise ValidationError("conjunction subprocedure needs Inf groups")
        phi = ac.conj(
            *(ac.disj(*(ac.inf(c) for c in sorted(group))) for group in groups)
        )
        self.phi = phi
        self.mm = ac.minimal_models(phi, a.ncolours)
        if not self.mm:
            raise ValidationError("dual of the Inf conjunction has no models")
        self.lex = 0
        self.nmodels = len(self.mm)

    def breakempty(self, m) -> bool:
        tag = m[0]
        if tag == "s":
            return not m[1]
        if tag == "a":
            return not m[4]
        return False

    def _jumps(self, dom: tuple[int, ...]):
        cached = self._jump_cache.get(dom)
        if cached is None:
            cached = []
            model_ids = tuple(range(self.nmodels))
            lex_only = (self.lex,)
            for rank in odd_ranks_up_to(len(dom), self.maxrank):
                allowed = [tuple(range(rank + 1))] * len(dom)
                for values in generate_tight(rank, allowed):
                    pools = [model_ids if v % 2 == 1 else lex_only
                             for v in values]
                    cached.extend(
                        (values, mus, rank)
                        for mus in itertools.product(*pools)
                    )
            self._jump_cache[dom] = cached
        return cached

    def _steps(self, m, p2: tuple[int, ...], symbol: int):
        dom, ranks, mus = m[1], m[2], m[3]
        rank = max(ranks)
        nm = self.nmodels
        preds = self._preds(dom, symbol)
        p2_set = set(p2)
        if any(dst not in p2_set for dst in preds):
            return []
        bounds = []
        for q2 in p2:
            per_model = [rank] * nm
            for pos, colours in preds.get(q2, ()):
                fv = ranks[pos]
                ceiling = evenceil(fv)
                src_model = mus[pos]
                hit = bool(colours & self.mm[src_model])
                for mi in range(nm):
                    cap = fv if (mi == src_model and not hit) else ceiling
                    if cap < per_model[mi]:
                        per_model[mi] = cap
            bounds.append(per_model)
        allowed = []
        for per_model in bounds:
            best = max(per_model)
            lex_cap = per_model[self.lex]
            vals = [v for v in range(rank + 1)
                    if (v % 2 == 1 and v <= best) or (v % 2 == 0 and v <= lex_cap)]
            if not vals:
                return []
            allowed.append(tuple(vals))
        lex_pool = (self.lex,)
        out = []
        for values in generate_tight(rank, allowed):
            pools = []
            feasible = True
            for idx, v in enumerate(values):
                if v % 2 == 0:
                    pools.append(lex_pool)
                else:
                    opts = tuple(mi for mi in range(nm) if bounds[idx][mi] >= v)
                    if not opts:
                        feasible = False
                        break
                    pools.append(opts)
            if not feasible:
                continue
            out.extend(
                (values, mus, rank) for mus in itertools.product(*pools)
            )
        return out

    def succ_act(self, p2, symbol, m):
        tag = m[0]
        if tag == "s":
            return (("s", p2),)
        if tag == "t":
            return ()
        _, dom, ranks, mus, o, i = m
        out = []
        if o:
            o_image = self._image(o, symbol)
            for values, mus2, _rank in self._steps(m, p2, symbol):
                o2 = tuple(q for idx, q in enumerate(p2)
                           if values[idx] == i and q in o_image)
                out.append(("a", p2, values, mus2, o2, i))
        else:
            for values, mus2, rank in self._steps(m, p2, symbol):
                out.append(("t", p2, values, mus2, (i + 2) % (rank + 1)))
        return out

    def succ_track(self, p2, symbol, m):
        # Note: a set state persisting under the tracking function would
        # create an accepting sink once P empties (the framework would
        # never resample P), so set states only persist via succ_act.
        tag = m[0]
        if tag == "s":
            return [("t", p2, values, mus, 0) for values, mus, _ in self._jumps(p2)]
        if tag == "a":
            return ()
        _, dom, ranks, mus, i = m
        out = []
        for values, mus2, _rank in self._steps(m, p2, symbol):
            out.append(("t", p2, values, mus2, i))
            o2 = tuple(q for idx, q in enumerate(p2) if values[idx] == i)
            out.append(("a", p2, values, mus2, o2, i))
        return out

    def label(self, m) -> str:
        if m[0] == "s":
            return "{" + ",".join(map(str, m[1])) + "}"
        dom, ranks, mus = m[1], m[2], m[3]
        body = " ".join(
            f"{q}:{v}:{{{','.join(map(str, sorted(self.mm[mi])))}}}"
            for q, v, mi in zip(dom, ranks, mus)
        )
        if m[0] == "a":
            oset = ",".join(map(str, m[4]))
            return f"<{body}|O={{{oset}}}|i={m[5]}>"
        return f"[{body}|i={m[4]}]"


def mod_compl(sub, a: Tela, fin_colours: frozenset[int],
              budget: int = DEFAULT_BUDGET) -> Tela:
    """Run the framework around a subprocedure; the result is a Büchi
    automaton for the complement of Fin(fin_colours) & phi."""
    restricted = restricted_out(a, fin_colours)

    def delta_restricted(states, symbol):
        out: set[int] = set()
        for q in states:
            out.update(dst for dst, _ in restricted.get((q, symbol), ()))
        return tuple(sorted(out))

    def successors(macro, symbol):
        s, p, m = macro
        s2 = tuple(sorted(a.delta_set(s, symbol)))
        p_tracked = delta_restricted(p, symbol)
        p_active = s2 if sub.breakempty(m) else p_tracked
        result = []
        for m2 in sub.succ_act(p_active, symbol, m):
            result.append(((s2, p_active, m2), sub.breakempty(m2)))
        for m2 in sub.succ_track(p_tracked, symbol, m):
            result.append(((s2, p_tracked, m2), sub.breakempty(m2)))
        return result

    start = tuple(sorted(a.initial))
    firsts = [(start, start, m0) for m0 in sub.initial]
    order, transitions = explore(firsts, successors, a.nsymbols, budget)

    def label_of(macro):
        s, p, m = macro
        return ("{" + ",".join(map(str, s)) + "}|{"
                + ",".join(map(str, p)) + "}|" + sub.label(m))

    return assemble_ba(a.aps, order, transitions, len(firsts), label_of)


def sub_true(a: Tela, fin_colours: frozenset[int]) -> TrueSub:
    return TrueSub(a, fin_colours)


def sub_inf(a: Tela, fin_colours: frozenset[int], g: int) -> InfSub:
    return InfSub(a, fin_colours, g)


def sub_conj_inf(a: Tela, fin_colours: frozenset[int],
                 groups: tuple[frozenset[int], ...]) -> ConjInfSub:
    return ConjInfSub(a, fin_colours, groups)


def _complement_pair(a: Tela, pair: GenRabinPair, budget: int) -> Tela:
    """Complement of the language of one generalized Rabin clause."""
    if not pair.fin and not pair.infs:
        # A true clause: the complement holds exactly the run-free words.
        return complement_no_run(a, budget)
    if not pair.fin:
        phi = ac.conj(
            *(ac.disj(*(ac.inf(c) for c in sorted(g))) for g in pair.infs)
        )
        clause_aut = Tela(a.n, a.aps, a.transitions, a.initial, a.ncolours,
                          phi, a.labels)
        return complement_inf(clause_aut, budget)
    if not pair.infs:
        return mod_compl(sub_true(a, pair.fin), a, pair.fin, budget)
    return mod_compl(sub_conj_inf(a, pair.fin, pair.infs), a, pair.fin, budget)


def complement_rabin(a: Tela, budget: int = DEFAULT_BUDGET,
                     trim_parts: bool = True) -> Tela:
    """Complement a Rabin automaton: one ranked subprocedure per pair,
    composed by the synchronized product."""
    if ac.classify(a.acceptance) not in (ac.ConditionClass.RABIN,
                                         ac.ConditionClass.PARITY_MIN_ODD):
        raise ValidationError("complement_rabin needs a Rabin-shaped condition")
    pairs = ac.pairs_from_condition(a.acceptance)
    if pairs is None or any(len(p.fin) != 1 or len(p.infs) != 1 or
                            any(len(g) != 1 for g in p.infs) for p in pairs):
        raise ValidationError("complement_rabin needs plain Fin/Inf pairs")
    parts = []
    for pair in pairs:
        (g,) = tuple(pair.infs[0])
        piece = mod_compl(sub_inf(a, pair.fin, g), a, pair.fin, budget)
        parts.append(trim(piece) if trim_parts else piece)
    return gba_product(parts)


def complement_gen_rabin(a: Tela,
                         pairs: tuple[GenRabinPair, ...] | None = None,
                         budget: int = DEFAULT_BUDGET,
                         trim_parts: bool = True) -> Tela:
    """Complement a generalized Rabin automaton clause by clause."""
    from .tela import universal_ba

    if pairs is None:
        pairs = ac.pairs_from_condition(a.acceptance)
        if pairs is None:
            raise ValidationError(
                "condition is not a disjunction of generalized Rabin pairs"
            )
    if not pairs:
        return universal_ba(a.aps)
    parts = []
    for pair in pairs:
        piece = _complement_pair(a, pair, budget)
        parts.append(trim(piece) if trim_parts else piece)
    return gba_product(parts)


def complement_tela(a: Tela, budget: int = DEFAULT_BUDGET,
                    trim_parts: bool = True) -> Tela:
    """Complement an arbitrary condition: rewrite to generalized Rabin
    pairs first, then complement clause by clause."""
    from .tela import to_gen_rabin

    rewritten, pairs = to_gen_rabin(a.acceptance, a)
    return complement_gen_rabin(rewritten, pairs, budget, trim_parts)
