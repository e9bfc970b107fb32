"""Acceptance-condition algebra for transition-based Emerson-Lei automata.

An acceptance condition is a Boolean formula over ``Inf(c)`` / ``Fin(c)``
atoms on transition colours.  This module evaluates such formulas against
colour sets, dualizes them into propositional formulas over bare colours,
computes (minimal) models of the dual, classifies conditions into the
classical families, and rewrites arbitrary conditions into a disjunction
of generalized Rabin pairs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from .errors import EmptyModelFamilyError, ValidationError

# Formula node kinds.
TT = "tt"
FF = "ff"
INF = "inf"
FIN = "fin"
AND = "and"
OR = "or"
# Extra kinds used by propositional (dual) formulas.
ATOM = "atom"
NATOM = "natom"

# Brute-force model enumeration walks all colour subsets.
MAX_MODEL_COLOURS = 16


@dataclass(frozen=True)
class Acceptance:
    """Immutable acceptance-formula tree.

    ``colour`` is set for inf/fin leaves, ``children`` for and/or nodes.
    """

    kind: str
    colour: int | None = None
    children: tuple["Acceptance", ...] = ()

    def __post_init__(self):
        if self.kind in (INF, FIN):
            if self.colour is None or self.colour < 0:
                raise ValidationError(f"{self.kind} atom needs a non-negative colour")
        elif self.kind in (AND, OR):
            if len(self.children) < 1:
                raise ValidationError(f"{self.kind} node needs children")
        elif self.kind not in (TT, FF):
            raise ValidationError(f"unknown formula kind {self.kind!r}")

    def atoms(self) -> Iterator["Acceptance"]:
        if self.kind in (INF, FIN):
            yield self
        for child in self.children:
            yield from child.atoms()

    @property
    def size(self) -> int:
        """Number of atomic conditions, counting repeats."""
        return sum(1 for _ in self.atoms())

    def colours(self) -> frozenset[int]:
        return frozenset(a.colour for a in self.atoms())

    def has_fin(self) -> bool:
        return any(a.kind == FIN for a in self.atoms())

    def has_inf(self) -> bool:
        return any(a.kind == INF for a in self.atoms())

    def __str__(self) -> str:
        return format_acceptance(self)


def tt() -> Acceptance:
    return Acceptance(TT)


def ff() -> Acceptance:
    return Acceptance(FF)


def inf(colour: int) -> Acceptance:
    return Acceptance(INF, colour=colour)


def fin(colour: int) -> Acceptance:
    return Acceptance(FIN, colour=colour)


def conj(*parts: Acceptance) -> Acceptance:
    if not parts:
        return tt()
    if len(parts) == 1:
        return parts[0]
    return Acceptance(AND, children=tuple(parts))


def disj(*parts: Acceptance) -> Acceptance:
    if not parts:
        return ff()
    if len(parts) == 1:
        return parts[0]
    return Acceptance(OR, children=tuple(parts))


def format_acceptance(alpha: Acceptance) -> str:
    """Render in HOA Acceptance-line syntax, fully parenthesized inside."""
    if alpha.kind == TT:
        return "t"
    if alpha.kind == FF:
        return "f"
    if alpha.kind == INF:
        return f"Inf({alpha.colour})"
    if alpha.kind == FIN:
        return f"Fin({alpha.colour})"
    sep = " & " if alpha.kind == AND else " | "
    parts = []
    for child in alpha.children:
        text = format_acceptance(child)
        if child.kind in (AND, OR):
            text = f"({text})"
        parts.append(text)
    return sep.join(parts)


def validate_colours(alpha: Acceptance, ncolours: int) -> None:
    for atom in alpha.atoms():
        if atom.colour >= ncolours:
            raise ValidationError(
                f"colour {atom.colour} out of range (have {ncolours} colours)"
            )


def evaluate(colour_set: frozenset[int] | set[int], alpha: Acceptance,
             ncolours: int | None = None) -> bool:
    """Decide whether a colour set satisfies the condition.

    ``Inf(c)`` holds iff c is in the set, ``Fin(c)`` iff it is not.
    """
    if ncolours is not None:
        validate_colours(alpha, ncolours)
        for c in colour_set:
            if c < 0 or c >= ncolours:
                raise ValidationError(f"colour {c} out of range")
    return _evaluate(frozenset(colour_set), alpha)


def _evaluate(m: frozenset[int], alpha: Acceptance) -> bool:
    kind = alpha.kind
    if kind == TT:
        return True
    if kind == FF:
        return False
    if kind == INF:
        return alpha.colour in m
    if kind == FIN:
        return alpha.colour not in m
    if kind == AND:
        return all(_evaluate(m, c) for c in alpha.children)
    return any(_evaluate(m, c) for c in alpha.children)


@dataclass(frozen=True)
class Prop:
    """Propositional formula over colours, produced by dualization.

    ``natom`` (negated colour) only appears when dualizing Fin atoms.
    """

    kind: str
    colour: int | None = None
    children: tuple["Prop", ...] = ()

    def __str__(self) -> str:
        if self.kind == TT:
            return "t"
        if self.kind == FF:
            return "f"
        if self.kind == ATOM:
            return str(self.colour)
        if self.kind == NATOM:
            return f"!{self.colour}"
        sep = " & " if self.kind == AND else " | "
        parts = []
        for child in self.children:
            text = str(child)
            if child.kind in (AND, OR):
                text = f"({text})"
            parts.append(text)
        return sep.join(parts)


def dual(alpha: Acceptance, allow_fin: bool = False) -> Prop:
    """Dualize a condition: swap and/or, Inf(c) becomes the colour atom c.

    The result describes which colour sets have to be starved to break the
    condition.  Constants flip (negation reading).  Fin atoms are only
    accepted with ``allow_fin``; they dualize to negated colour atoms.
    """
    if not allow_fin and alpha.has_fin():
        raise ValidationError("dual of a Fin-containing condition needs allow_fin")
    return _dual(alpha, allow_fin)


def _dual(alpha: Acceptance, allow_fin: bool) -> Prop:
    kind = alpha.kind
    if kind == TT:
        return Prop(FF)
    if kind == FF:
        return Prop(TT)
    if kind == INF:
        return Prop(ATOM, colour=alpha.colour)
    if kind == FIN:
        return Prop(NATOM, colour=alpha.colour)
    children = tuple(_dual(c, allow_fin) for c in alpha.children)
    return Prop(OR if kind == AND else AND, children=children)


def evaluate_prop(colour_set: frozenset[int] | set[int], prop: Prop) -> bool:
    m = frozenset(colour_set)
    return _evaluate_prop(m, prop)


def _evaluate_prop(m: frozenset[int], prop: Prop) -> bool:
    kind = prop.kind
    if kind == TT:
        return True
    if kind == FF:
        return False
    if kind == ATOM:
        return prop.colour in m
    if kind == NATOM:
        return prop.colour not in m
    if kind == AND:
        return all(_evaluate_prop(m, c) for c in prop.children)
    return any(_evaluate_prop(m, c) for c in prop.children)


def model_key(m: frozenset[int]) -> tuple[int, ...]:
    """Canonical ordering key for colour sets: element-wise on the sorted
    sequence, a strict prefix ordering first."""
    return tuple(sorted(m))


def sort_models(family) -> tuple[frozenset[int], ...]:
    return tuple(sorted(family, key=model_key))


def models(alpha: Acceptance, ncolours: int) -> tuple[frozenset[int], ...]:
    """All colour sets satisfying the dual formula, in canonical order."""
    if ncolours > MAX_MODEL_COLOURS:
        raise ValidationError(
            f"model enumeration capped at {MAX_MODEL_COLOURS} colours"
        )
    validate_colours(alpha, ncolours)
    bar = dual(alpha, allow_fin=True)
    found = []
    for size in range(ncolours + 1):
        for combo in itertools.combinations(range(ncolours), size):
            m = frozenset(combo)
            if _evaluate_prop(m, bar):
                found.append(m)
    return sort_models(found)


def minimal_models(alpha: Acceptance, ncolours: int) -> tuple[frozenset[int], ...]:
    """Inclusion-minimal models of the dual formula (an antichain)."""
    fam = models(alpha, ncolours)
    out = []
    for m in fam:
        if not any(other < m for other in fam):
            out.append(m)
    return sort_models(out)


def lex_min_model(alpha: Acceptance, ncolours: int) -> frozenset[int]:
    """Smallest minimal model under the canonical colour-set order."""
    fam = minimal_models(alpha, ncolours)
    if not fam:
        raise EmptyModelFamilyError(
            "the dual formula has no models (condition holds on every colour set)"
        )
    return fam[0]


def lex_min_of(family) -> frozenset[int]:
    fam = sort_models(family)
    if not fam:
        raise EmptyModelFamilyError("empty model family")
    return fam[0]


def is_satisfiable(alpha: Acceptance, ncolours: int) -> bool:
    """True iff some colour set satisfies the condition itself."""
    if ncolours > MAX_MODEL_COLOURS:
        raise ValidationError(
            f"model enumeration capped at {MAX_MODEL_COLOURS} colours"
        )
    return any(
        _evaluate(frozenset(combo), alpha)
        for size in range(ncolours + 1)
        for combo in itertools.combinations(range(ncolours), size)
    )


# --------------------------------------------------------------------------
# Normalization and classification


class ConditionClass(Enum):
    BUCHI = "Buchi"
    CO_BUCHI = "CoBuchi"
    GBA = "GBA"
    GCBA = "GCBA"
    RABIN = "Rabin"
    GEN_RABIN = "GenRabin"
    PARITY_MIN_ODD = "ParityMinOdd"
    INF_ONLY = "InfOnly"
    FIN_ONLY = "FinOnly"
    GENERAL_EL = "GeneralEL"


_KIND_RANK = {TT: 0, FF: 1, INF: 2, FIN: 3, AND: 4, OR: 5}


def _formula_key(alpha: Acceptance):
    return (
        _KIND_RANK[alpha.kind],
        alpha.colour if alpha.colour is not None else -1,
        tuple(_formula_key(c) for c in alpha.children),
    )


def normalize(alpha: Acceptance) -> Acceptance:
    """Flatten nested and/or chains and sort children canonically."""
    if alpha.kind in (AND, OR):
        flat: list[Acceptance] = []
        for child in alpha.children:
            norm = normalize(child)
            if norm.kind == alpha.kind:
                flat.extend(norm.children)
            else:
                flat.append(norm)
        flat.sort(key=_formula_key)
        if len(flat) == 1:
            return flat[0]
        return Acceptance(alpha.kind, children=tuple(flat))
    return alpha


def _is_parity_min_odd(alpha: Acceptance, start: int) -> bool:
    # Matches Fin(start) & (Inf(start+1) | <tail>) with the tail again
    # parity-shaped; the two-colour base case is Fin(start) & Inf(start+1).
    # Children arrive in normalized (sorted) order, so match set-wise.
    if alpha.kind == FIN:
        return alpha.colour == start
    if alpha.kind != AND or len(alpha.children) != 2:
        return False
    fins = [c for c in alpha.children if c.kind == FIN and c.colour == start]
    if len(fins) != 1:
        return False
    (second,) = [c for c in alpha.children if c is not fins[0]]
    if second.kind == INF:
        return second.colour == start + 1
    if second.kind == OR and len(second.children) == 2:
        infs = [c for c in second.children
                if c.kind == INF and c.colour == start + 1]
        if len(infs) != 1:
            return False
        (tail,) = [c for c in second.children if c is not infs[0]]
        return _is_parity_min_odd(tail, start + 2)
    return False


def _rabin_clause(alpha: Acceptance) -> bool:
    if alpha.kind != AND or len(alpha.children) != 2:
        return False
    kinds = sorted(c.kind for c in alpha.children)
    return kinds == [FIN, INF]


def _gen_rabin_clause(alpha: Acceptance) -> bool:
    if alpha.kind == FIN:
        return True
    if alpha.kind != AND:
        return False
    fins = [c for c in alpha.children if c.kind == FIN]
    infs = [c for c in alpha.children if c.kind == INF]
    return len(fins) == 1 and len(infs) == len(alpha.children) - 1


def classify(alpha: Acceptance) -> ConditionClass:
    """Most specific syntactic class of the condition, up to associativity."""
    norm = normalize(alpha)
    if norm.kind == INF:
        return ConditionClass.BUCHI
    if norm.kind == FIN:
        return ConditionClass.CO_BUCHI
    if norm.kind == AND and all(c.kind == INF for c in norm.children):
        return ConditionClass.GBA
    if norm.kind == OR and all(c.kind == FIN for c in norm.children):
        return ConditionClass.GCBA
    if _is_parity_min_odd(norm, 0):
        return ConditionClass.PARITY_MIN_ODD
    if _rabin_clause(norm) or (
        norm.kind == OR and all(_rabin_clause(c) for c in norm.children)
    ):
        return ConditionClass.RABIN
    if _gen_rabin_clause(norm) or (
        norm.kind == OR and all(_gen_rabin_clause(c) for c in norm.children)
    ):
        return ConditionClass.GEN_RABIN
    if not norm.has_fin():
        return ConditionClass.INF_ONLY
    if not norm.has_inf():
        return ConditionClass.FIN_ONLY
    return ConditionClass.GENERAL_EL


# --------------------------------------------------------------------------
# DNF and generalized Rabin pairs


@dataclass(frozen=True)
class GenRabinPair:
    """One clause of a DNF condition: finitely many of every colour in
    ``fin``, infinitely many of (some colour of) each group in ``infs``."""

    fin: frozenset[int]
    infs: tuple[frozenset[int], ...]

    def formula(self) -> Acceptance:
        parts: list[Acceptance] = [fin(c) for c in sorted(self.fin)]
        for group in self.infs:
            parts.append(disj(*(inf(c) for c in sorted(group))))
        return conj(*parts)


def dnf_clauses(alpha: Acceptance) -> list[tuple[frozenset[int], frozenset[int]]]:
    """DNF of the condition as (fin colours, inf colours) clauses.

    Contradictory clauses are dropped, subsumed clauses absorbed; the
    result is empty iff the condition is equivalent to f over atoms.
    """
    clauses = _dnf(alpha)
    return sorted(clauses, key=lambda fc: (model_key(fc[0]), model_key(fc[1])))


def _absorb(clauses: set[tuple[frozenset[int], frozenset[int]]]):
    kept = set()
    for fins, infs in clauses:
        if any(
            (ofins, oinfs) != (fins, infs) and ofins <= fins and oinfs <= infs
            for ofins, oinfs in clauses
        ):
            continue
        kept.add((fins, infs))
    return kept


def _dnf(alpha: Acceptance) -> set[tuple[frozenset[int], frozenset[int]]]:
    kind = alpha.kind
    empty = frozenset()
    if kind == TT:
        return {(empty, empty)}
    if kind == FF:
        return set()
    if kind == INF:
        return {(empty, frozenset([alpha.colour]))}
    if kind == FIN:
        return {(frozenset([alpha.colour]), empty)}
    if kind == OR:
        out: set[tuple[frozenset[int], frozenset[int]]] = set()
        for child in alpha.children:
            out |= _dnf(child)
        return _absorb(out)
    # AND: distribute children pairwise, dropping Fin(c) & Inf(c) clashes.
    acc = {(empty, empty)}
    for child in alpha.children:
        nxt = set()
        for fins, infs in acc:
            for cfins, cinfs in _dnf(child):
                mf, mi = fins | cfins, infs | cinfs
                if mf & mi:
                    continue
                nxt.add((mf, mi))
        acc = _absorb(nxt)
    return acc


def pairs_from_condition(alpha: Acceptance) -> tuple[GenRabinPair, ...] | None:
    """Read generalized Rabin pairs off a condition already in that shape,
    without touching colours.  Returns None when the shape does not match."""
    norm = normalize(alpha)
    clauses = norm.children if norm.kind == OR else (norm,)
    pairs = []
    for clause in clauses:
        parts = clause.children if clause.kind == AND else (clause,)
        fins = [p for p in parts if p.kind == FIN]
        infs = [p for p in parts if p.kind == INF]
        if len(fins) + len(infs) != len(parts) or len(fins) > 1:
            return None
        pairs.append(
            GenRabinPair(
                fin=frozenset(p.colour for p in fins),
                infs=tuple(frozenset([p.colour]) for p in infs),
            )
        )
    return tuple(pairs)
