"""Surface syntax: a readable term and statement notation.

The core languages only have the raw 6- and 5-letter string forms; this
layer is an invented, documented front end.  Grammar (informal):

    stmt    ::= term ( ":" term | "|>" term | "|>=" term )?
    term    ::= binder | arrow
    binder  ::= ("lam" | "pi" | "pi[m,n]" | "forall") name ":" term "." term
    arrow   ::= "(" name ":" term ")" ARROW term
              | conj ( ARROW term )?                  (right associative)
    ARROW   ::= "->" | "->[m,n]"
    conj    ::= prefix ( "and" prefix )*              (left associative)
    prefix  ::= ("neg" | "rho") prefix | app
    app     ::= atom atom*                            (left associative)
    atom    ::= name | "v<k>" | "c<k>" | "u<k>" | "p[m,n]"
              | "bot" | "top" | "(" term ")"

Named binders get indices by nesting depth above every explicit `v<k>`
index in the source, so equal surface terms desugar identically.  Named
atoms resolve through an atom table (`atom name = c0` header lines in
`.dtt` files).  In system 2, `c<k>` denotes the k-th user constant; `u`
and `p` spellings are system 2 only, as are indexed arrows; `bot`,
`top`, `neg`, `and`, `forall` and un-indexed `pi`/`->`/`rho` are
system 1 only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from . import syntax
from .syntax import (
    App,
    Const,
    Lam,
    Rho,
    SugarConstants,
    Term,
    TermSyntaxError,
    Var,
    decode_operator,
    decode_sort,
    free_vars,
    least_var_outside,
    mk_pi,
    operator,
    parse_raw,
    render_raw,
    sort,
    user_const,
)

__all__ = [
    "SugarTerm",
    "AtomTable",
    "parse_sugar",
    "desugar",
    "parse_term",
    "parse_statement",
    "render_sugar",
    "read_dtt",
    "DttFile",
]


# --- surface AST -------------------------------------------------------------


@dataclass(frozen=True)
class SName:
    name: str


@dataclass(frozen=True)
class SVar:
    index: int


@dataclass(frozen=True)
class SConst:
    index: int


@dataclass(frozen=True)
class SSort:
    level: int


@dataclass(frozen=True)
class SOp:
    m: int
    n: int


@dataclass(frozen=True)
class SBot:
    pass


@dataclass(frozen=True)
class STop:
    pass


@dataclass(frozen=True)
class SNeg:
    body: "SugarTerm"


@dataclass(frozen=True)
class SRho:
    body: "SugarTerm"


@dataclass(frozen=True)
class SAnd:
    left: "SugarTerm"
    right: "SugarTerm"


@dataclass(frozen=True)
class SApp:
    fun: "SugarTerm"
    arg: "SugarTerm"


@dataclass(frozen=True)
class SArrow:
    dom: "SugarTerm"
    cod: "SugarTerm"
    var: Optional[str] = None
    mn: Optional[tuple[int, int]] = None


@dataclass(frozen=True)
class SBinder:
    kind: str  # "lam" | "pi" | "forall"
    var: str
    dom: "SugarTerm"
    body: "SugarTerm"
    mn: Optional[tuple[int, int]] = None


SugarTerm = Union[
    SName, SVar, SConst, SSort, SOp, SBot, STop, SNeg, SRho, SAnd, SApp, SArrow, SBinder
]


# --- tokenizer ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<arrow_idx>->\[\s*\d+\s*,\s*\d+\s*\])
      | (?P<arrow>->)
      | (?P<subred>\|>=)
      | (?P<red>\|>)
      | (?P<indexed>(?:p|pi)\[\s*\d+\s*,\s*\d+\s*\])
      | (?P<ident>[A-Za-z_*□][A-Za-z0-9_*'□]*)
      | (?P<punct>[():.,])
    )""",
    re.VERBOSE,
)

_KEYWORDS = {"lam", "pi", "forall", "bot", "top", "neg", "and", "rho"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == m.start():
            rest = text[pos:].lstrip()
            if not rest:
                break
            at = len(text) - len(rest)
            raise TermSyntaxError(f"unexpected character {rest[0]!r}", at)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind).replace(" ", ""), m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


def _parse_indices(text: str) -> tuple[int, int]:
    inner = text[text.index("[") + 1 : -1]
    m, n = inner.split(",")
    return (int(m), int(n))


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_punct(self, ch: str) -> None:
        kind, val, pos = self.next()
        if kind != "punct" or val != ch:
            raise TermSyntaxError(f"expected {ch!r}, found {val or 'end of input'}", pos)

    def at_punct(self, ch: str) -> bool:
        kind, val, _ = self.peek()
        return kind == "punct" and val == ch

    def at_ident(self, name: Optional[str] = None) -> bool:
        kind, val, _ = self.peek()
        return kind == "ident" and (name is None or val == name)

    # term ::= binder | arrow
    def parse_term(self) -> SugarTerm:
        kind, val, pos = self.peek()
        if kind == "ident" and val in ("lam", "pi", "forall"):
            return self.parse_binder(val, None)
        if kind == "indexed" and val.startswith("pi["):
            self.next()
            return self.parse_binder("pi", _parse_indices(val))
        return self.parse_arrow()

    def parse_binder(self, keyword: str, mn: Optional[tuple[int, int]]) -> SugarTerm:
        if mn is None:
            self.next()  # the keyword token
        _, name, pos = self.peek()
        if not self.at_ident() or self.peek()[1] in _KEYWORDS:
            raise TermSyntaxError("expected binder variable", pos)
        self.next()
        self.expect_punct(":")
        dom = self.parse_term()
        self.expect_punct(".")
        body = self.parse_term()
        return SBinder(keyword, name, dom, body, mn)

    def parse_arrow(self) -> SugarTerm:
        dep = self.try_dependent_arrow()
        if dep is not None:
            return dep
        left = self.parse_conj()
        kind, val, _ = self.peek()
        if kind == "arrow":
            self.next()
            return SArrow(left, self.parse_term())
        if kind == "arrow_idx":
            self.next()
            return SArrow(left, self.parse_term(), mn=_parse_indices(val))
        return left

    def try_dependent_arrow(self) -> Optional[SugarTerm]:
        # "(" name ":" distinguishes a dependent domain from grouping
        if not self.at_punct("("):
            return None
        save = self.i
        self.next()
        if not (self.at_ident() and self.peek()[1] not in _KEYWORDS):
            self.i = save
            return None
        _, name, _ = self.next()
        if not self.at_punct(":"):
            self.i = save
            return None
        self.next()
        dom = self.parse_term()
        self.expect_punct(")")
        kind, val, pos = self.next()
        if kind == "arrow":
            mn = None
        elif kind == "arrow_idx":
            mn = _parse_indices(val)
        else:
            raise TermSyntaxError("expected arrow after dependent domain", pos)
        return SArrow(dom, self.parse_term(), var=name, mn=mn)

    def parse_conj(self) -> SugarTerm:
        left = self.parse_prefix()
        while self.at_ident("and"):
            self.next()
            left = SAnd(left, self.parse_prefix())
        return left

    def parse_prefix(self) -> SugarTerm:
        if self.at_ident("neg"):
            self.next()
            return SNeg(self.parse_prefix())
        if self.at_ident("rho"):
            self.next()
            return SRho(self.parse_prefix())
        return self.parse_app()

    def parse_app(self) -> SugarTerm:
        fun = self.parse_atom()
        while True:
            kind, val, _ = self.peek()
            if kind in ("ident", "indexed") and val not in (
                "and",
                "lam",
                "pi",
                "forall",
            ):
                fun = SApp(fun, self.parse_atom())
            elif kind == "punct" and val == "(":
                if self.try_peek_dependent():
                    break
                fun = SApp(fun, self.parse_atom())
            else:
                break
        return fun

    def try_peek_dependent(self) -> bool:
        save = self.i
        try:
            self.next()
            ok = (
                self.at_ident()
                and self.peek()[1] not in _KEYWORDS
                and self.tokens[self.i + 1][:2] == ("punct", ":")
            )
        finally:
            self.i = save
        return ok

    def parse_atom(self) -> SugarTerm:
        kind, val, pos = self.next()
        if kind == "indexed":
            if val.startswith("pi["):
                raise TermSyntaxError("pi[..] must start a binder", pos)
            m, n = _parse_indices(val)
            return SOp(m, n)
        if kind == "ident":
            if val == "bot":
                return SBot()
            if val == "top":
                return STop()
            if val in ("neg", "rho"):
                self.i -= 1
                return self.parse_prefix()
            if val in _KEYWORDS:
                raise TermSyntaxError(f"unexpected keyword {val!r}", pos)
            m = re.fullmatch(r"v(\d+)", val)
            if m:
                return SVar(int(m.group(1)))
            m = re.fullmatch(r"c(\d+)", val)
            if m:
                return SConst(int(m.group(1)))
            m = re.fullmatch(r"u(\d+)", val)
            if m:
                return SSort(int(m.group(1)))
            return SName(val)
        if kind == "punct" and val == "(":
            t = self.parse_term()
            self.expect_punct(")")
            return t
        raise TermSyntaxError(f"expected a term, found {val or 'end of input'}", pos)


def parse_sugar(text: str) -> SugarTerm:
    p = _Parser(text)
    t = p.parse_term()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise TermSyntaxError(f"trailing input {val!r}", pos)
    return t


# --- atom tables -------------------------------------------------------------


@dataclass
class AtomTable:
    """Named atoms for the sugar layer: name -> core term.

    In system 2, `c<k>` on the right-hand side of a binding denotes the
    k-th user constant.
    """

    entries: dict[str, Term] = field(default_factory=dict)

    def bind(self, name: str, value: Term) -> None:
        self.entries[name] = value

    def lookup(self, name: str) -> Optional[Term]:
        return self.entries.get(name)

    def name_of(self, t: Term) -> Optional[str]:
        for name, value in self.entries.items():
            if value == t:
                return name
        return None

    def star(self) -> Const:
        value = self.entries.get("*", Const(0))
        if not isinstance(value, Const):
            raise TermSyntaxError("the propositions atom * must be a constant")
        return value


_ATOM_LINE = re.compile(r"atom\s+(\S+)\s*=\s*(\S+)\s*$")


def parse_atom_line(line: str, system: int, table: AtomTable) -> bool:
    m = _ATOM_LINE.match(line.strip())
    if m is None:
        return False
    name, value = m.group(1), m.group(2)
    table.bind(name, desugar(parse_sugar(value), system, table))
    return True


# --- desugaring --------------------------------------------------------------


def desugar(t: SugarTerm, system: int = 1, atoms: Optional[AtomTable] = None) -> Term:
    atoms = atoms or AtomTable()
    base = 1 + max(_explicit_vars(t), default=-1)
    return _desugar(t, system, atoms, {}, base)


def _explicit_vars(t: SugarTerm) -> set[int]:
    out: set[int] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, SVar):
            out.add(u.index)
        elif isinstance(u, (SNeg, SRho)):
            stack.append(u.body)
        elif isinstance(u, (SAnd, SApp)):
            stack.extend((u.left, u.right) if isinstance(u, SAnd) else (u.fun, u.arg))
        elif isinstance(u, SArrow):
            stack.extend((u.dom, u.cod))
        elif isinstance(u, SBinder):
            stack.extend((u.dom, u.body))
    return out


def _binder_index(name: str, depth: int) -> int:
    # a binder literally named v<k> binds the explicit variable k, since
    # occurrences of v<k> in the body bypass the name environment
    m = re.fullmatch(r"v(\d+)", name)
    return int(m.group(1)) if m else depth


def _part1_only(what: str, system: int) -> None:
    if system != 1:
        raise TermSyntaxError(f"{what} is not available in system 2")


def _part2_only(what: str, system: int) -> None:
    if system != 2:
        raise TermSyntaxError(f"{what} is only available in system 2")


def _desugar(
    t: SugarTerm, system: int, atoms: AtomTable, env: dict[str, int], depth: int
) -> Term:
    sugar = SugarConstants(atoms.star())
    match t:
        case SVar(i):
            return Var(i)
        case SConst(i):
            return Const(i) if system == 1 else user_const(i)
        case SSort(n):
            _part2_only("a sort", system)
            return sort(n)
        case SOp(m, n):
            _part2_only("a product operator", system)
            return operator(m, n)
        case SName(name):
            if name in env:
                return Var(env[name])
            bound = atoms.lookup(name)
            if bound is None:
                raise TermSyntaxError(f"unknown atom {name!r}")
            return bound
        case SBot():
            _part1_only("bot", system)
            return sugar.bot()
        case STop():
            _part1_only("top", system)
            return sugar.top()
        case SNeg(body):
            _part1_only("neg", system)
            return sugar.neg(_desugar(body, system, atoms, env, depth))
        case SRho(body):
            _part1_only("rho", system)
            return Rho(_desugar(body, system, atoms, env, depth))
        case SAnd(left, right):
            _part1_only("and", system)
            return sugar.and_(
                _desugar(left, system, atoms, env, depth),
                _desugar(right, system, atoms, env, depth),
            )
        case SApp(fun, arg):
            return App(
                _desugar(fun, system, atoms, env, depth),
                _desugar(arg, system, atoms, env, depth),
            )
        case SArrow(dom, cod, var, mn):
            d = _desugar(dom, system, atoms, env, depth)
            if var is None:
                c = _desugar(cod, system, atoms, env, depth)
                x = least_var_outside(free_vars(c))
                if mn is None:
                    _part1_only("an un-indexed arrow", system)
                    return mk_pi(x, d, c)
                _part2_only("an indexed arrow", system)
                return App(App(operator(*mn), d), Lam(x, d, c))
            x = _binder_index(var, depth)
            inner = dict(env)
            inner[var] = x
            c = _desugar(cod, system, atoms, inner, depth + 1)
            if mn is None:
                _part1_only("an un-indexed arrow", system)
                return mk_pi(x, d, c)
            _part2_only("an indexed arrow", system)
            return App(App(operator(*mn), d), Lam(x, d, c))
        case SBinder(kind, var, dom, body, mn):
            d = _desugar(dom, system, atoms, env, depth)
            x = _binder_index(var, depth)
            inner = dict(env)
            inner[var] = x
            b = _desugar(body, system, atoms, inner, depth + 1)
            if kind == "lam":
                return Lam(x, d, b)
            if kind == "forall":
                _part1_only("forall", system)
                return sugar.forall(x, d, b)
            if mn is None:
                _part1_only("an un-indexed pi", system)
                return mk_pi(x, d, b)
            _part2_only("an indexed pi", system)
            return App(App(operator(*mn), d), Lam(x, d, b))
    raise TypeError(f"not a sugar term: {t!r}")


def parse_term(text: str, system: int = 1, atoms: Optional[AtomTable] = None) -> Term:
    text = text.strip()
    return desugar(parse_sugar(text), system, atoms)


def parse_statement(
    text: str, system: int = 1, atoms: Optional[AtomTable] = None
) -> tuple[str, Term, Term]:
    """Parse `S : P`, `R |> C`, or `R |>= C` into (kind, left, right)."""
    p = _Parser(text)
    left = p.parse_term()
    kind, val, pos = p.next()
    if kind == "punct" and val == ":":
        stmt_kind = "typing"
    elif kind == "red":
        stmt_kind = "reduction"
    elif kind == "subred":
        stmt_kind = "subreduction"
    else:
        raise TermSyntaxError("expected ':', '|>' or '|>=' ", pos)
    right = p.parse_term()
    k2, v2, pos2 = p.peek()
    if k2 != "eof":
        raise TermSyntaxError(f"trailing input {v2!r}", pos2)
    atoms = atoms or AtomTable()
    return (
        stmt_kind,
        _desugar(left, 1 if system == 1 else 2, atoms, {}, _base_of(left)),
        _desugar(right, 1 if system == 1 else 2, atoms, {}, _base_of(right)),
    )


def _base_of(t: SugarTerm) -> int:
    return 1 + max(_explicit_vars(t), default=-1)


# --- rendering ---------------------------------------------------------------


def render_sugar(
    t: Term,
    system: int = 1,
    atoms: Optional[AtomTable] = None,
    explicit_binders: bool = False,
) -> str:
    """Readable form; explicit_binders keeps every binder index in the
    output so the result re-parses to the identical term."""
    atoms = atoms or AtomTable()
    return _render(t, system, atoms, top=True, explicit=explicit_binders)


def _atom_str(t: Term, system: int, atoms: AtomTable) -> Optional[str]:
    name = atoms.name_of(t)
    if name is not None:
        return name
    match t:
        case Var(i):
            return f"v{i}"
        case Const(i):
            if system == 2:
                n = decode_sort(i)
                if n is not None:
                    return f"u{n}"
                mn = decode_operator(i)
                if mn is not None:
                    return f"p[{mn[0]},{mn[1]}]"
                if i % 4 == 0:
                    return f"c{i // 4}"
                return f"c?{i}"
            return f"c{i}"
    return None


def _render(t: Term, system: int, atoms: AtomTable, top: bool, explicit: bool = False) -> str:
    s = _atom_str(t, system, atoms)
    if s is not None:
        return s
    match t:
        case Rho(Lam(x, dom, body)):
            d = _render_operand(dom, system, atoms, explicit)
            if x not in free_vars(body) and not explicit:
                return _wrap(f"{d} -> {_render(body, system, atoms, True, explicit)}", top)
            b = _render(body, system, atoms, True, explicit)
            return _wrap(
                f"(v{x}:{_render(dom, system, atoms, True, explicit)}) -> {b}", top
            )
        case Rho(body):
            return _wrap(f"rho {_render_arg(body, system, atoms, explicit)}", top)
        case App(App(Const(k), dom), Lam(x, dom2, body)) if (
            system == 2 and decode_operator(k) is not None and dom == dom2
        ):
            m, n = decode_operator(k)
            d = _render_operand(dom, system, atoms, explicit)
            if x not in free_vars(body) and not explicit:
                return _wrap(
                    f"{d} ->[{m},{n}] {_render(body, system, atoms, True, explicit)}", top
                )
            b = _render(body, system, atoms, True, explicit)
            return _wrap(
                f"(v{x}:{_render(dom, system, atoms, True, explicit)}) ->[{m},{n}] {b}",
                top,
            )
        case App(fun, arg):
            return _wrap(
                f"{_render_fun(fun, system, atoms, explicit)} "
                f"{_render_arg(arg, system, atoms, explicit)}",
                top,
            )
        case Lam(x, dom, body):
            d = _render(dom, system, atoms, True, explicit)
            return _wrap(
                f"lam v{x} : {d} . {_render(body, system, atoms, True, explicit)}", top
            )
    raise TypeError(f"not a term: {t!r}")


def _wrap(s: str, top: bool) -> str:
    return s if top else f"({s})"


def _render_fun(t: Term, system: int, atoms: AtomTable, explicit: bool = False) -> str:
    # application functions keep bare nested applications (left associative)
    if isinstance(t, App) and not _is_arrow_shape(t, system):
        return _render(t, system, atoms, top=True, explicit=explicit)
    return _render(t, system, atoms, top=False, explicit=explicit)


def _is_arrow_shape(t: Term, system: int) -> bool:
    match t:
        case App(App(Const(k), dom), Lam(_, dom2, _)):
            return system == 2 and decode_operator(k) is not None and dom == dom2
    return False


def _render_operand(t: Term, system: int, atoms: AtomTable, explicit: bool = False) -> str:
    return _render(t, system, atoms, top=False, explicit=explicit)


def _render_arg(t: Term, system: int, atoms: AtomTable, explicit: bool = False) -> str:
    return _render(t, system, atoms, top=False, explicit=explicit)


# --- .dtt files --------------------------------------------------------------


@dataclass
class DttFile:
    """A parsed term file: atom-table header plus one term per line."""

    atoms: AtomTable
    terms: list[Term]
    raw_lines: list[str]


def read_dtt(text: str, system: int = 1, raw: bool = False) -> DttFile:
    table = AtomTable()
    terms: list[Term] = []
    kept: list[str] = []
    for line in text.splitlines():
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if parse_atom_line(stripped, system, table):
            continue
        if raw:
            terms.append(parse_raw(stripped, system))
        else:
            terms.append(parse_term(stripped, system, table))
        kept.append(stripped)
    return DttFile(table, terms, kept)


def read_statements(
    text: str, system: int = 1
) -> tuple[AtomTable, list[tuple[str, Term, Term]]]:
    """Statement files: atom header plus `S : P` / `R |> C` / `R |>= C` lines."""
    table = AtomTable()
    stmts = []
    for line in text.splitlines():
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if parse_atom_line(stripped, system, table):
            continue
        stmts.append(parse_statement(stripped, system, table))
    return table, stmts
