"""Complementation of transition-based Emerson-Lei automata.

The package bundles an acceptance-condition algebra, an automaton model
with structural transformations, HOA v1 input/output, a lasso-word oracle
for desk-scale verification, a run-DAG labelling lab, and two families of
complement constructions (tight rankings for Fin-free conditions and a
modular breakpoint framework for Fin-guarded ones) behind one dispatcher.
"""

from .acceptance import (
    Acceptance,
    ConditionClass,
    GenRabinPair,
    classify,
    conj,
    disj,
    dual,
    evaluate,
    ff,
    fin,
    inf,
    lex_min_model,
    minimal_models,
    models,
    normalize,
    tt,
)
from .complement_inf import complement_inf, complement_no_run, count_tight
from .errors import (
    BudgetExceededError,
    EmptyModelFamilyError,
    HoaParseError,
    OracleLimitError,
    TelacompError,
    UnsupportedFeatureError,
    ValidationError,
)
from .hoa import parse_hoa, print_hoa
from .lasso import LassoWord, XorReport, accepts, enumerate_lassos, is_empty, xor_suite
from .modular import (
    complement_gen_rabin,
    complement_rabin,
    complement_tela,
    mod_compl,
    sub_conj_inf,
    sub_inf,
    sub_true,
)
from .pipeline import ComplementOptions, SizeReport, dispatch, random_tela, selftest
from .rundag import FoldedRunDag, Labelling, build_rundag, endangered, export_dot, label
from .tela import (
    Tela,
    Transition,
    degeneralize,
    fin_removal,
    gba_product,
    product_conjunction,
    restrict_delta,
    to_gen_rabin,
    trim,
    universal_ba,
)

__version__ = "0.1.0"
