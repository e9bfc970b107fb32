"""Complementation of automata whose condition has no Fin atoms.

The complement Büchi automaton guesses, level by level, a tight ranking of
the input's run DAG together with a per-state minimal model of the dual
condition.  A waiting phase runs the plain subset construction; at any
point the automaton may jump into the ranked phase, where a rotating
breakpoint set tracks the states of one even rank until they all drop.
"""

from __future__ import annotations

import itertools

from . import acceptance as ac
from .construction import assemble_ba, explore
from .errors import EmptyModelFamilyError, ValidationError
from .ranking import evenceil, generate_tight, odd_ranks_up_to, count_tight
from .tela import Tela

__all__ = [
    "complement_inf",
    "complement_no_run",
    "is_smu_tight",
    "successor_ok",
    "consistent_wrt",
    "count_tight",
]

DEFAULT_BUDGET = 200_000


def consistent_wrt(mu: dict, f: dict, mm, lex) -> bool:
    """Model map valid for a ranking: odd ranks pick any minimal model,
    even ranks are pinned to the canonical one."""
    for q, rank in f.items():
        if q not in mu:
            return False
        if rank % 2 == 1:
            if mu[q] not in mm:
                return False
        elif mu[q] != lex:
            return False
    return True


def is_smu_tight(f: dict, s_set, mu: dict, mm, lex) -> bool:
    """Tightness of a total ranking relative to a state set and model map:
    odd rank, every odd value up to it taken inside the set, zero outside,
    and the model map consistent."""
    s_set = set(s_set)
    values = set(f.values())
    rank = max(values) if values else 0
    if rank % 2 == 0:
        return False
    inside = {f[q] for q in f if q in s_set}
    if not set(range(1, rank + 1, 2)) <= inside:
        return False
    if any(f[q] != 0 for q in f if q not in s_set):
        return False
    return consistent_wrt(mu, f, mm, lex)


def successor_ok(f: dict, mu: dict, symbol: int, f2: dict, mu2: dict,
                 rel) -> bool:
    """Check the consistent-successor conditions between two ranked levels
    over the given transition subset.

    For every transition q -> q' on the symbol with q ranked: the rank may
    not grow; hitting a colour of q's model forces a drop to the even
    ceiling, and so does changing the model.
    """
    for t in rel:
        if t.symbol != symbol or t.src not in f:
            continue
        if t.dst not in f2:
            return False
        fv, fv2 = f[t.src], f2[t.dst]
        if fv2 > fv:
            return False
        ceiling = evenceil(fv)
        if (t.colours & mu[t.src]) and fv2 > ceiling:
            return False
        if mu2[t.dst] != mu[t.src] and fv2 > ceiling:
            return False
    return True


class _InfBuilder:
    """Reachability-driven construction of the ranked complement."""

    def __init__(self, a: Tela):
        if a.acceptance.has_fin():
            raise ValidationError("complement_inf needs a Fin-free condition")
        self.a = a
        self.mm = ac.minimal_models(a.acceptance, a.ncolours)
        if not self.mm:
            raise EmptyModelFamilyError(
                "condition holds on every colour set; complement via the "
                "no-infinite-run construction instead"
            )
        self.lex = 0  # canonical order puts the lexicographic minimum first
        self.nmodels = len(self.mm)
        self.maxrank = 2 * a.n
        self._jump_cache: dict[tuple[int, ...], list] = {}
        self._step_cache: dict[tuple[tuple[int, ...], int], tuple] = {}

    # -- macrostates -------------------------------------------------------
    # ('w', S)                  waiting: plain subset construction
    # ('t', S, O, f, i, m)      ranked: S sorted tuple, O sorted tuple,
    #                           f/m value tuples parallel to S

    def initial(self):
        return ("w", tuple(sorted(self.a.initial)))

    def _step(self, s: tuple[int, ...], symbol: int):
        """Successor set and reversed edge map for one macro step."""
        key = (s, symbol)
        cached = self._step_cache.get(key)
        if cached is not None:
            return cached
        preds: dict[int, list[tuple[int, frozenset[int]]]] = {}
        for pos, q in enumerate(s):
            for dst, colours in self.a.out(q, symbol):
                preds.setdefault(dst, []).append((pos, colours))
        s2 = tuple(sorted(preds))
        result = (s2, preds)
        self._step_cache[key] = result
        return result

    def _jump_targets(self, s2: tuple[int, ...]):
        """All tight ranking/model pairs over a fresh domain (cached)."""
        cached = self._jump_cache.get(s2)
        if cached is not None:
            return cached
        out = []
        size = len(s2)
        model_ids = tuple(range(self.nmodels))
        lex_only = (self.lex,)
        for rank in odd_ranks_up_to(size, self.maxrank):
            allowed = [tuple(range(rank + 1))] * size
            for values in generate_tight(rank, allowed):
                pools = [model_ids if v % 2 == 1 else lex_only for v in values]
                for mus in itertools.product(*pools):
                    out.append((values, mus, rank))
        self._jump_cache[s2] = out
        return out

    def _ranked_successors(self, macro, symbol: int):
        _, s, o, f, i, mu = macro
        s2, preds = self._step(s, symbol)
        if not s2:
            return []
        rank = max(f)
        nm = self.nmodels
        # Per new state and per candidate model: the rank ceiling imposed by
        # its ranked predecessors.
        bounds = []
        for q2 in s2:
            per_model = [rank] * nm
            for pos, colours in preds[q2]:
                fv = f[pos]
                ceiling = evenceil(fv)
                src_model = mu[pos]
                hit = bool(colours & self.mm[src_model])
                for m in range(nm):
                    cap = fv if (m == src_model and not hit) else ceiling
                    if cap < per_model[m]:
                        per_model[m] = cap
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
        o_image: set[int] = set()
        if o:
            o_set = set(o)
            for q in s:
                if q in o_set:
                    for dst, _ in self.a.out(q, symbol):
                        o_image.add(dst)
        lex_pool = (self.lex,)
        out = []
        for values in generate_tight(rank, allowed):
            pools = []
            feasible = True
            for idx, v in enumerate(values):
                if v % 2 == 0:
                    pools.append(lex_pool)
                else:
                    opts = tuple(m for m in range(nm) if bounds[idx][m] >= v)
                    if not opts:
                        feasible = False
                        break
                    pools.append(opts)
            if not feasible:
                continue
            for mus in itertools.product(*pools):
                if o:
                    i2 = i
                    o2 = tuple(q for idx, q in enumerate(s2)
                               if values[idx] == i and q in o_image)
                else:
                    i2 = (i + 2) % (rank + 1)
                    o2 = tuple(q for idx, q in enumerate(s2)
                               if values[idx] == i2)
                out.append(("t", s2, o2, values, i2, mus))
        return out

    def successors(self, macro, symbol: int):
        """(target, accepting) pairs, deterministically ordered."""
        if macro[0] == "w":
            s = macro[1]
            s2, _ = self._step(s, symbol)
            accepting = not s
            result = [(("w", s2), accepting)]
            for values, mus, _rank in self._jump_targets(s2):
                result.append((("t", s2, (), values, 0, mus), False))
            return result
        accepting = not macro[2]
        return [(t, accepting) for t in self._ranked_successors(macro, symbol)]

    def label(self, macro) -> str:
        if macro[0] == "w":
            return "{" + ",".join(map(str, macro[1])) + "}"
        _, s, o, f, i, mu = macro
        ranks = " ".join(f"{q}:{v}" for q, v in zip(s, f))
        models = " ".join(
            f"{q}:{{{','.join(map(str, sorted(self.mm[m])))}}}"
            for q, v, m in zip(s, f, mu)
            if v % 2 == 1
        )
        oset = ",".join(map(str, o))
        return f"<{{{oset}}}|{ranks}|i={i}|{models}>"


def complement_inf(a: Tela, budget: int = DEFAULT_BUDGET) -> Tela:
    """Complement an automaton with a Fin-free condition into a Büchi
    automaton via tight rankings enriched with level models."""
    builder = _InfBuilder(a)
    order, transitions = explore(
        [builder.initial()], builder.successors, a.nsymbols, budget
    )
    return assemble_ba(a.aps, order, transitions, 1, builder.label)


def complement_no_run(a: Tela, budget: int = DEFAULT_BUDGET) -> Tela:
    """Büchi automaton accepting exactly the words on which the input has
    no infinite run at all (the complement when the condition is valid)."""

    def successors(macro, symbol):
        dsts = tuple(sorted(a.delta_set(macro, symbol)))
        return [(dsts, not macro)]

    initial = tuple(sorted(a.initial))
    order, transitions = explore([initial], successors, a.nsymbols, budget)
    return assemble_ba(
        a.aps, order, transitions, 1,
        lambda s: "{" + ",".join(map(str, s)) + "}",
    )
