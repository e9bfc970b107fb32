"""Reading and writing automata in the HOA v1 textual format.

Supported fragment: explicit transition-based acceptance marks, labels as
Boolean expressions over AP indices (expanded over the full minterm
alphabet), one state per Start header.  Aliases, implicit labels,
state-based acceptance marks and Start conjunctions are rejected with an
explicit code.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import acceptance as ac
from .acceptance import Acceptance
from .errors import HoaParseError, UnsupportedFeatureError, ValidationError
from .tela import MAX_APS, Tela, Transition


@dataclass(frozen=True)
class _Token:
    kind: str  # int | string | ident | header | punct
    text: str
    line: int
    column: int


_PUNCT = "[](){}!&|"


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("/*", i):
            depth = 1
            start_line, start_col = line, col
            i += 2
            col += 2
            while i < n and depth:
                if text.startswith("/*", i):
                    depth += 1
                    i += 2
                    col += 2
                elif text.startswith("*/", i):
                    depth -= 1
                    i += 2
                    col += 2
                elif text[i] == "\n":
                    line += 1
                    col = 1
                    i += 1
                else:
                    i += 1
                    col += 1
            if depth:
                raise HoaParseError("unterminated comment", start_line, start_col)
            continue
        if text.startswith("--", i):
            j = i + 2
            while j < n and (text[j].isalnum() or text[j] == "-"):
                j += 1
            tokens.append(_Token("marker", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch == '"':
            j = i + 1
            buf = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n:
                    buf.append(text[j + 1])
                    j += 2
                else:
                    buf.append(text[j])
                    j += 1
            if j >= n:
                raise HoaParseError("unterminated string", line, col)
            tokens.append(_Token("string", "".join(buf), line, col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch in "_@":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_-@."):
                j += 1
            word = text[i:j]
            if j < n and text[j] == ":":
                tokens.append(_Token("header", word, line, col))
                j += 1
            else:
                tokens.append(_Token("ident", word, line, col))
            col += j - i
            i = j
            continue
        if ch in _PUNCT:
            tokens.append(_Token("punct", ch, line, col))
            i += 1
            col += 1
            continue
        raise HoaParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise HoaParseError(message, tok.line, tok.column)

    def expect_int(self, what: str) -> int:
        tok = self.take()
        if tok.kind != "int":
            self.error(f"expected {what}", tok)
        return int(tok.text)

    def expect_punct(self, ch: str):
        tok = self.take()
        if tok.kind != "punct" or tok.text != ch:
            self.error(f"expected {ch!r}", tok)

    # -- acceptance formulas ------------------------------------------------

    def parse_acceptance(self, nsets: int) -> Acceptance:
        formula = self._acc_or(nsets)
        return formula

    def _acc_or(self, nsets: int) -> Acceptance:
        parts = [self._acc_and(nsets)]
        while self.peek().kind == "punct" and self.peek().text == "|":
            self.take()
            parts.append(self._acc_and(nsets))
        return parts[0] if len(parts) == 1 else Acceptance(ac.OR, children=tuple(parts))

    def _acc_and(self, nsets: int) -> Acceptance:
        parts = [self._acc_atom(nsets)]
        while self.peek().kind == "punct" and self.peek().text == "&":
            self.take()
            parts.append(self._acc_atom(nsets))
        return parts[0] if len(parts) == 1 else Acceptance(ac.AND, children=tuple(parts))

    def _acc_atom(self, nsets: int) -> Acceptance:
        tok = self.take()
        if tok.kind == "punct" and tok.text == "(":
            inner = self._acc_or(nsets)
            self.expect_punct(")")
            return inner
        if tok.kind == "ident" and tok.text in ("t", "f"):
            return ac.tt() if tok.text == "t" else ac.ff()
        if tok.kind == "ident" and tok.text in ("Inf", "Fin"):
            self.expect_punct("(")
            if self.peek().kind == "punct" and self.peek().text == "!":
                raise UnsupportedFeatureError(
                    "negated acceptance sets are not supported", "negated-set"
                )
            colour = self.expect_int("acceptance set number")
            self.expect_punct(")")
            if colour >= nsets:
                self.error(f"acceptance set {colour} out of range", tok)
            return ac.inf(colour) if tok.text == "Inf" else ac.fin(colour)
        self.error("expected acceptance atom", tok)

    # -- label expressions --------------------------------------------------

    def parse_label(self, naps: int):
        """Boolean expression over AP indices, as an evaluatable closure."""
        expr = self._label_or(naps)
        return expr

    def _label_or(self, naps: int):
        left = self._label_and(naps)
        while self.peek().kind == "punct" and self.peek().text == "|":
            self.take()
            right = self._label_and(naps)
            left = (lambda a, b: lambda v: a(v) or b(v))(left, right)
        return left

    def _label_and(self, naps: int):
        left = self._label_not(naps)
        while self.peek().kind == "punct" and self.peek().text == "&":
            self.take()
            right = self._label_not(naps)
            left = (lambda a, b: lambda v: a(v) and b(v))(left, right)
        return left

    def _label_not(self, naps: int):
        tok = self.peek()
        if tok.kind == "punct" and tok.text == "!":
            self.take()
            inner = self._label_not(naps)
            return lambda v: not inner(v)
        return self._label_atom(naps)

    def _label_atom(self, naps: int):
        tok = self.take()
        if tok.kind == "punct" and tok.text == "(":
            inner = self._label_or(naps)
            self.expect_punct(")")
            return inner
        if tok.kind == "ident" and tok.text == "t":
            return lambda v: True
        if tok.kind == "ident" and tok.text == "f":
            return lambda v: False
        if tok.kind == "int":
            index = int(tok.text)
            if index >= naps:
                self.error(f"AP index {index} out of range", tok)
            return lambda v, i=index: bool((v >> i) & 1)
        if tok.kind == "ident" and tok.text.startswith("@"):
            raise UnsupportedFeatureError("aliases are not supported", "alias")
        self.error("expected label atom", tok)


def parse_hoa(text: str) -> Tela:
    """Parse a HOA v1 document into an automaton over the minterm
    alphabet of its atomic propositions."""
    p = _Parser(text)
    tok = p.take()
    if tok.kind != "header" or tok.text != "HOA":
        p.error("expected HOA: header", tok)
    version = p.take()
    if version.kind != "ident" or version.text != "v1":
        p.error("only HOA v1 is supported", version)

    nstates: int | None = None
    naps = 0
    aps: tuple[str, ...] = ()
    saw_aps = False
    nsets: int | None = None
    condition: Acceptance | None = None
    initial: set[int] = set()

    while True:
        tok = p.peek()
        if tok.kind == "marker":
            break
        if tok.kind != "header":
            p.error("expected a header item", tok)
        p.take()
        name = tok.text
        if name == "States":
            nstates = p.expect_int("state count")
        elif name == "Start":
            state = p.expect_int("start state")
            nxt = p.peek()
            if nxt.kind == "punct" and nxt.text == "&":
                raise UnsupportedFeatureError(
                    "Start conjunctions are not supported", "multi-start"
                )
            if nxt.kind == "int":
                raise UnsupportedFeatureError(
                    "only one state per Start header", "multi-start"
                )
            initial.add(state)
        elif name == "AP":
            saw_aps = True
            naps = p.expect_int("AP count")
            if naps > MAX_APS:
                raise UnsupportedFeatureError(
                    f"at most {MAX_APS} atomic propositions supported", "ap-limit"
                )
            names = []
            for _ in range(naps):
                s = p.take()
                if s.kind != "string":
                    p.error("expected AP name string", s)
                names.append(s.text)
            aps = tuple(names)
        elif name == "Acceptance":
            nsets = p.expect_int("acceptance set count")
            condition = p.parse_acceptance(nsets)
        elif name == "Alias":
            raise UnsupportedFeatureError("aliases are not supported", "alias")
        elif name in ("acc-name", "tool"):
            while p.peek().kind in ("ident", "int", "string"):
                p.take()
        elif name in ("name",):
            if p.peek().kind == "string":
                p.take()
        elif name == "properties":
            while p.peek().kind == "ident":
                p.take()
        elif name[0].isupper():
            raise UnsupportedFeatureError(
                f"unsupported header {name}:", "unknown-header"
            )
        else:
            # Unknown lowercase headers are skippable by the format's rules.
            while p.peek().kind in ("ident", "int", "string"):
                p.take()

    if nstates is None:
        p.error("missing States: header")
    if nsets is None or condition is None:
        p.error("missing Acceptance: header")
    if saw_aps is False and naps == 0:
        aps = ()

    tok = p.take()
    if tok.kind != "marker" or tok.text != "--BODY--":
        p.error("expected --BODY--", tok)

    transitions: set[Transition] = set()
    nsym = 1 << naps
    current: int | None = None
    while True:
        tok = p.peek()
        if tok.kind == "marker" and tok.text == "--END--":
            p.take()
            break
        if tok.kind == "header" and tok.text == "State":
            p.take()
            current = p.expect_int("state id")
            if current >= nstates:
                p.error(f"state {current} out of range", tok)
            if p.peek().kind == "string":
                p.take()  # state name, ignored
            if p.peek().kind == "punct" and p.peek().text == "{":
                raise UnsupportedFeatureError(
                    "state-based acceptance marks are not supported",
                    "state-acceptance",
                )
            continue
        if tok.kind == "punct" and tok.text == "[":
            if current is None:
                p.error("edge before any State:", tok)
            p.take()
            labelfn = p.parse_label(naps)
            p.expect_punct("]")
            dst = p.expect_int("destination state")
            if dst >= nstates:
                p.error(f"state {dst} out of range", tok)
            colours: set[int] = set()
            if p.peek().kind == "punct" and p.peek().text == "{":
                p.take()
                while p.peek().kind == "int":
                    colour = p.expect_int("acceptance set")
                    if colour >= nsets:
                        p.error(f"acceptance set {colour} out of range", tok)
                    colours.add(colour)
                p.expect_punct("}")
            for symbol in range(nsym):
                if labelfn(symbol):
                    transitions.add(
                        Transition(current, symbol, frozenset(colours), dst)
                    )
            continue
        if tok.kind == "int":
            raise UnsupportedFeatureError(
                "implicit edge labels are not supported", "implicit-labels"
            )
        p.error("unexpected token in body", tok)

    if p.peek().kind != "eof":
        p.error("trailing input after --END--")
    for q in initial:
        if q >= nstates:
            raise HoaParseError(f"start state {q} out of range", 1, 1)
    try:
        return Tela(nstates, aps, frozenset(transitions), frozenset(initial),
                    nsets, condition)
    except ValidationError as exc:
        raise HoaParseError(str(exc), 1, 1) from exc


def _label_text(symbol: int, naps: int) -> str:
    if naps == 0:
        return "t"
    lits = []
    for i in range(naps):
        lits.append(str(i) if (symbol >> i) & 1 else f"!{i}")
    return "&".join(lits)


def print_hoa(a: Tela) -> str:
    """Canonical HOA text: sorted start states, per-state edges sorted by
    symbol, destination and colours.  Stable under reparse/reprint."""
    lines = ["HOA: v1", f"States: {a.n}"]
    if a.initial:
        for q in sorted(a.initial):
            lines.append(f"Start: {q}")
    else:
        lines.append("/* Start: none (empty initial set) */")
    ap_text = " ".join(f'"{name}"' for name in a.aps)
    lines.append(f"AP: {len(a.aps)}" + (f" {ap_text}" if a.aps else ""))
    lines.append(f"Acceptance: {a.ncolours} {ac.format_acceptance(a.acceptance)}")
    lines.append("--BODY--")
    by_src: dict[int, list[Transition]] = {}
    for t in a.transitions:
        by_src.setdefault(t.src, []).append(t)
    naps = len(a.aps)
    for q in range(a.n):
        lines.append(f"State: {q}")
        for t in sorted(by_src.get(q, []), key=Transition.sort_key):
            entry = f"[{_label_text(t.symbol, naps)}] {t.dst}"
            if t.colours:
                entry += " {" + " ".join(map(str, sorted(t.colours))) + "}"
            lines.append(entry)
    lines.append("--END--")
    return "\n".join(lines) + "\n"
