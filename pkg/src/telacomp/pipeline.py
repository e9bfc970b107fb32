"""Top-level dispatch, size reporting, and the randomized self test."""

from __future__ import annotations

import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import acceptance as ac
from .complement_inf import complement_inf, complement_no_run
from .errors import BudgetExceededError, ValidationError
from .lasso import is_empty, xor_suite
from .modular import (
    DEFAULT_BUDGET,
    complement_gen_rabin,
    complement_rabin,
    complement_tela,
    mod_compl,
    sub_true,
)
from .ranking import COUNT_TIGHT_LIMIT, count_tight
from .tela import (
    Tela,
    Transition,
    degeneralize,
    fin_removal,
    product_conjunction,
    to_gen_rabin,
    trim,
    universal_ba,
)

BACKENDS = ("auto", "inf", "modular", "fin-removal")
SELFTEST_CLASSES = ("ba", "cba", "gba", "gcba", "rabin", "parity",
                    "genrabin", "el")


@dataclass
class ComplementOptions:
    backend: str = "auto"
    to_ba: bool = False
    budget: int = DEFAULT_BUDGET
    trim_parts: bool = True

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ValidationError(f"unknown backend {self.backend!r}")
        if self.budget < 1:
            raise ValidationError("budget must be at least 1")


@dataclass
class SizeReport:
    input_states: int
    input_colours: int
    input_class: str
    backend: str
    route: str
    output_states: int
    output_colours: int
    bounds: dict[str, int] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)


def _tight_figure(n: int) -> int | None:
    if 1 <= n <= COUNT_TIGHT_LIMIT:
        return count_tight(n)
    return None


def dispatch(a: Tela, opts: ComplementOptions | None = None) -> tuple[Tela, SizeReport]:
    """Complement an automaton along the cheapest applicable route and
    report the reachable size against the matching bound figures."""
    opts = opts or ComplementOptions()
    cls = ac.classify(a.acceptance)
    bounds: dict[str, int] = {}
    route = opts.backend
    comp: Tela | None = None

    decidable = a.ncolours <= ac.MAX_MODEL_COLOURS
    if opts.backend in ("auto", "inf") and decidable:
        if not ac.is_satisfiable(a.acceptance, a.ncolours):
            comp = universal_ba(a.aps)
            route = "empty-language"
        elif not ac.models(a.acceptance, a.ncolours):
            comp = complement_no_run(a, opts.budget)
            route = "no-infinite-run"

    if comp is None and opts.backend == "inf":
        if a.acceptance.has_fin():
            raise ValidationError(
                "backend 'inf' needs a Fin-free condition"
            )
        comp = complement_inf(a, opts.budget)
        route = "complement-inf"
    elif comp is None and opts.backend == "modular":
        comp = complement_tela(a, opts.budget, opts.trim_parts)
        route = "dnf-gen-rabin"
    elif comp is None and opts.backend == "fin-removal":
        rewritten, pairs = to_gen_rabin(a.acceptance, a)
        gba = fin_removal(rewritten, pairs)
        bounds["n(k+1)"] = gba.n
        trimmed = trim(gba) if opts.trim_parts else gba
        comp = complement_inf(trimmed, opts.budget)
        route = "fin-removal"
    elif comp is None:
        if cls in (ac.ConditionClass.BUCHI, ac.ConditionClass.GBA,
                   ac.ConditionClass.INF_ONLY):
            comp = complement_inf(a, opts.budget)
            route = "complement-inf"
        elif cls == ac.ConditionClass.CO_BUCHI:
            (c,) = tuple(a.acceptance.colours())
            fins = frozenset([c])
            comp = mod_compl(sub_true(a, fins), a, fins, opts.budget)
            route = "sub-true"
            bounds["3^n"] = 3 ** a.n
            if comp.n > 3 ** a.n:
                raise AssertionError("breakpoint construction exceeded 3^n")
        elif cls == ac.ConditionClass.RABIN:
            comp = complement_rabin(a, opts.budget, opts.trim_parts)
            route = "rabin-product"
        elif cls == ac.ConditionClass.GEN_RABIN:
            comp = complement_gen_rabin(a, None, opts.budget, opts.trim_parts)
            route = "gen-rabin-product"
        else:
            # Parity, GCBA, FinOnly and general conditions all go through
            # the DNF rewriting.
            comp = complement_tela(a, opts.budget, opts.trim_parts)
            route = "dnf-gen-rabin"

    n = a.n
    mm_size = None
    if decidable and not a.acceptance.has_fin():
        mm_size = len(ac.minimal_models(a.acceptance, a.ncolours))
    if route == "complement-inf" and mm_size:
        figure = _tight_figure(n + 1)
        if figure is not None:
            bounds["k^n*tight(n+1)"] = (mm_size ** n) * figure
    if route == "rabin-product":
        figure = _tight_figure(n + 1)
        npairs = len(ac.pairs_from_condition(a.acceptance) or ())
        if figure is not None and npairs:
            bounds["tight(n+1)^k"] = figure ** npairs
    if route == "gen-rabin-product":
        pairs = ac.pairs_from_condition(a.acceptance) or ()
        npairs = len(pairs)
        max_infs = max((len(p.infs) for p in pairs), default=0)
        figure = _tight_figure(n + 1)
        if figure is not None and npairs and max_infs:
            bounds["l^(nk)*tight(n+1)^k"] = (
                max_infs ** (n * npairs) * figure ** npairs
            )

    if opts.to_ba and ac.classify(comp.acceptance) != ac.ConditionClass.BUCHI:
        comp = degeneralize(comp)

    report = SizeReport(
        input_states=a.n,
        input_colours=a.ncolours,
        input_class=cls.value,
        backend=opts.backend,
        route=route,
        output_states=comp.n,
        output_colours=comp.ncolours,
        bounds=bounds,
    )
    return comp, report


# --------------------------------------------------------------------------
# Random automaton generation (seeded; used by the self test)
#
# Distribution: state count uniform in 1..max_states, one atomic
# proposition (two symbols); per state and symbol the out-degree is drawn
# from (0, 1, 1, 1, 2, 2) capped by n, destinations sampled without
# replacement; each colour joins a transition's set independently with the
# class-specific probability; the initial set keeps every state with
# probability 1/2 and falls back to state 0 when empty.


_COLOUR_PROB = {
    "ba": 0.45, "cba": 0.45, "gba": 0.4, "gcba": 0.4,
    "rabin": 0.3, "parity": 0.3, "genrabin": 0.3, "el": 0.35,
}


def _parity_formula(k: int) -> ac.Acceptance:
    # Min-odd nesting: Fin(0) & (Inf(1) | (Fin(2) & (Inf(3) | ...)))
    def tail(c: int) -> ac.Acceptance:
        if c == k - 1:
            return ac.fin(c) if (c % 2 == 0) else ac.inf(c)
        if c % 2 == 0:
            return ac.conj(ac.fin(c), tail(c + 1))
        return ac.disj(ac.inf(c), tail(c + 1))

    return tail(0)


def _random_el_formula(rng: random.Random, k: int, depth: int) -> ac.Acceptance:
    roll = rng.random()
    if depth == 0 or roll < 0.45:
        atom_roll = rng.random()
        if atom_roll < 0.04:
            return ac.tt()
        if atom_roll < 0.08:
            return ac.ff()
        colour = rng.randrange(k)
        return ac.inf(colour) if rng.random() < 0.5 else ac.fin(colour)
    left = _random_el_formula(rng, k, depth - 1)
    right = _random_el_formula(rng, k, depth - 1)
    return ac.conj(left, right) if rng.random() < 0.5 else ac.disj(left, right)


def random_tela(rng: random.Random, cls: str, max_states: int = 4,
                naps: int = 1) -> Tela:
    """One random automaton of the requested condition class."""
    n = rng.randint(1, max_states)
    if cls == "ba":
        k, condition = 1, ac.inf(0)
    elif cls == "cba":
        k, condition = 1, ac.fin(0)
    elif cls == "gba":
        k = rng.randint(1, 3)
        condition = ac.conj(*(ac.inf(j) for j in range(k)))
    elif cls == "gcba":
        k = rng.randint(1, 3)
        condition = ac.disj(*(ac.fin(j) for j in range(k)))
    elif cls == "rabin":
        npairs = rng.randint(1, 2)
        k = 2 * npairs
        condition = ac.disj(
            *(ac.conj(ac.fin(2 * j), ac.inf(2 * j + 1)) for j in range(npairs))
        )
    elif cls == "parity":
        k = rng.randint(2, 4)
        condition = _parity_formula(k)
    elif cls == "genrabin":
        npairs = rng.randint(1, 2)
        parts = []
        colour = 0
        for _ in range(npairs):
            fin_colour = colour
            colour += 1
            ninfs = rng.randint(1, 2)
            infs = list(range(colour, colour + ninfs))
            colour += ninfs
            parts.append(
                ac.conj(ac.fin(fin_colour), *(ac.inf(g) for g in infs))
            )
        k = colour
        condition = ac.disj(*parts)
    elif cls == "el":
        k = rng.randint(1, 3)
        condition = _random_el_formula(rng, k, 2)
    else:
        raise ValidationError(f"unknown automaton class {cls!r}")

    prob = _COLOUR_PROB[cls]
    nsym = 1 << naps
    transitions: set[Transition] = set()
    for q in range(n):
        for symbol in range(nsym):
            degree = min(n, rng.choice((0, 1, 1, 1, 2, 2)))
            for dst in rng.sample(range(n), degree):
                colours = frozenset(
                    c for c in range(k) if rng.random() < prob
                )
                transitions.add(Transition(q, symbol, colours, dst))
    initial = frozenset(q for q in range(n) if rng.random() < 0.5)
    if not initial:
        initial = frozenset([0])
    aps = tuple(f"p{i}" for i in range(naps))
    return Tela(n, aps, frozenset(transitions), initial, k, condition)


# --------------------------------------------------------------------------
# Self test


@dataclass
class SelftestResult:
    cls: str
    index: int
    states_in: int
    colours_in: int
    states_out: int
    route: str
    checked: int
    xor_violations: int
    first_violation: str | None
    disjoint: bool
    status: str  # ok | xor | disjoint | budget

    def text_line(self) -> str:
        parts = [
            f"class={self.cls}",
            f"index={self.index}",
            f"n={self.states_in}",
            f"k={self.colours_in}",
            f"out={self.states_out}",
            f"route={self.route}",
            f"lassos={self.checked}",
            f"status={self.status}",
        ]
        if self.first_violation:
            parts.append(f"violation={self.first_violation}")
        return " ".join(parts)

    def json_line(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)


def _run_instance(cls: str, index: int, seed: int, max_u: int, max_v: int,
                  opts: ComplementOptions) -> SelftestResult:
    rng = random.Random(f"{seed}:{cls}:{index}")
    a = random_tela(rng, cls)
    try:
        comp, report = dispatch(a, opts)
    except BudgetExceededError:
        return SelftestResult(cls, index, a.n, a.ncolours, -1, "budget",
                              0, 0, None, False, "budget")
    xor = xor_suite(a, comp, max_u, max_v)
    disjoint = is_empty(product_conjunction(a, comp))
    status = "ok"
    if xor.violations:
        status = "xor"
    elif not disjoint:
        status = "disjoint"
    first = (xor.violations[0].render(a.alphabet) if xor.violations else None)
    return SelftestResult(cls, index, a.n, a.ncolours, comp.n, report.route,
                          xor.checked, len(xor.violations), first, disjoint,
                          status)


def selftest(classes, count: int, seed: int, max_u: int = 2, max_v: int = 3,
             budget: int = DEFAULT_BUDGET, jobs: int = 1,
             json_mode: bool = False) -> tuple[list[str], int]:
    """Random complement-and-verify loop; returns report lines and the
    process exit code (0 ok, 1 property violation, 3 budget)."""
    opts = ComplementOptions(budget=budget)
    tasks = [(cls, index) for cls in classes for index in range(count)]

    def run(task):
        cls, index = task
        return _run_instance(cls, index, seed, max_u, max_v, opts)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(task) for task in tasks]

    lines = [r.json_line() if json_mode else r.text_line() for r in results]
    bad = sum(1 for r in results if r.status in ("xor", "disjoint"))
    budgeted = sum(1 for r in results if r.status == "budget")
    summary = (
        f"instances={len(results)} failures={bad} budget-aborts={budgeted}"
    )
    if json_mode:
        lines.append(json.dumps(
            {"summary": True, "instances": len(results), "failures": bad,
             "budget_aborts": budgeted},
            sort_keys=True,
        ))
    else:
        lines.append(summary)
    code = 0
    if bad:
        code = 1
    elif budgeted:
        code = 3
    return lines, code
