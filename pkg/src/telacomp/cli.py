"""Command-line interface.

Exit codes: 0 success, 1 property violation (violating lasso printed),
2 usage or parse error, 3 macrostate budget exceeded.
"""

from __future__ import annotations

import argparse
import sys

from . import acceptance as ac
from .errors import (
    BudgetExceededError,
    HoaParseError,
    TelacompError,
    UnsupportedFeatureError,
    ValidationError,
)
from .hoa import parse_hoa, print_hoa
from .lasso import LassoWord, accepts, xor_suite
from .pipeline import (
    BACKENDS,
    SELFTEST_CLASSES,
    ComplementOptions,
    dispatch,
    selftest,
)
from .rundag import build_rundag, export_dot, label
from .tela import Tela


def _read_automaton(path: str) -> Tela:
    with open(path, encoding="utf-8") as handle:
        return parse_hoa(handle.read())


def _parse_word_part(a: Tela, text: str) -> tuple[int, ...]:
    if not text:
        return ()
    if "," in text:
        names = [part for part in text.split(",") if part]
    elif all(ch in a.alphabet for ch in text):
        names = list(text)
    else:
        names = [text]
    return tuple(a.symbol_index(name) for name in names)


def cmd_complement(args) -> int:
    a = _read_automaton(args.input)
    opts = ComplementOptions(backend=args.backend, to_ba=args.to_ba,
                             budget=args.budget)
    comp, report = dispatch(a, opts)
    text = print_hoa(comp)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    if args.json:
        print(report.to_json())
    else:
        bounds = " ".join(f"{k}={v}" for k, v in sorted(report.bounds.items()))
        print(
            f"route={report.route} in={report.input_states} "
            f"out={report.output_states} class={report.input_class}"
            + (f" {bounds}" if bounds else "")
        )
    return 0


def cmd_classify(args) -> int:
    a = _read_automaton(args.input)
    print(ac.classify(a.acceptance).value)
    return 0


def cmd_member(args) -> int:
    a = _read_automaton(args.input)
    word = LassoWord(_parse_word_part(a, args.prefix),
                     _parse_word_part(a, args.period))
    print("accepted" if accepts(a, word) else "rejected")
    return 0


def cmd_check(args) -> int:
    a = _read_automaton(args.input)
    c = _read_automaton(args.complement)
    report = xor_suite(a, c, args.max_u, args.max_v)
    print(f"{len(report.violations)} violations ({report.checked} lassos)")
    for word in report.violations:
        print(f"  {word.render(a.alphabet)}")
    return 1 if report.violations else 0


def cmd_selftest(args) -> int:
    classes = tuple(args.classes.split(","))
    for cls in classes:
        if cls not in SELFTEST_CLASSES:
            raise ValidationError(
                f"unknown class {cls!r}; choose from {','.join(SELFTEST_CLASSES)}"
            )
    lines, code = selftest(classes, args.count, args.seed,
                           max_u=args.max_u, max_v=args.max_v,
                           budget=args.budget, jobs=args.jobs,
                           json_mode=args.json)
    for line in lines:
        print(line)
    return code


def cmd_rundag(args) -> int:
    a = _read_automaton(args.input)
    word = LassoWord(_parse_word_part(a, args.prefix),
                     _parse_word_part(a, args.period))
    dag = build_rundag(a, word)
    labelling = None
    if not a.acceptance.has_fin():
        labelling = label(a, word)
        if labelling is None:
            print("word accepted: no labelling exists")
    text = export_dot(dag, labelling)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_stats(args) -> int:
    a = _read_automaton(args.input)
    cls = ac.classify(a.acceptance)
    print(f"states={a.n}")
    print(f"colours={a.ncolours}")
    print(f"aps={len(a.aps)}")
    print(f"symbols={a.nsymbols}")
    print(f"transitions={len(a.transitions)}")
    print(f"initial={len(a.initial)}")
    print(f"class={cls.value}")
    print(f"acceptance={ac.format_acceptance(a.acceptance)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="telacomp",
        description="Complement transition-based Emerson-Lei automata "
                    "and verify the results on lasso words.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("complement", help="complement a HOA automaton")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--backend", choices=BACKENDS, default="auto",
                   help="auto picks the most specific construction")
    p.add_argument("--to-ba", action="store_true",
                   help="degeneralize the result into a Büchi automaton")
    p.add_argument("--budget", type=int, default=200_000)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_complement)

    p = sub.add_parser("classify", help="print the condition class")
    p.add_argument("-i", "--input", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("member", help="lasso-word membership")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--prefix", default="")
    p.add_argument("--period", required=True)
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("check", help="exhaustive XOR check of a complement")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-c", "--complement", required=True)
    p.add_argument("--max-u", type=int, default=2)
    p.add_argument("--max-v", type=int, default=3)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("selftest", help="randomized complement-and-verify")
    p.add_argument("--classes", default=",".join(SELFTEST_CLASSES))
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--max-u", type=int, default=2)
    p.add_argument("--max-v", type=int, default=3)
    p.add_argument("--budget", type=int, default=200_000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("rundag", help="export a labelled run DAG as DOT")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--prefix", default="")
    p.add_argument("--period", required=True)
    p.add_argument("--dot")
    p.set_defaults(func=cmd_rundag)

    p = sub.add_parser("stats", help="structural figures of an automaton")
    p.add_argument("-i", "--input", required=True)
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (HoaParseError, UnsupportedFeatureError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TelacompError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
