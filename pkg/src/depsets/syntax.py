"""Term syntax for both languages.

System 1 terms are strings over {c, v, ', r, b, l} (ASCII aliases for
c, v, prime, rho, beta, lambda); system 2 drops the r productions and
reserves constant indices for sorts u_n and product operators p_m^n.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union


@dataclass(frozen=True)
class Const:
    index: int


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Rho:
    body: "Term"


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Lam:
    var: int
    dom: "Term"
    body: "Term"


Term = Union[Const, Var, Rho, App, Lam]


class TermSyntaxError(ValueError):
    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)


# --- sort / operator coding for system 2 ------------------------------------
#
# Odd constant indices are sorts, indices = 2 mod 4 are product operators,
# indices = 0 mod 4 remain for user constants, so the user pool stays
# open-ended while sorts and operators are decodable.


def sort_index(n: int) -> int:
    return 2 * n + 1


def decode_sort(index: int) -> Optional[int]:
    return (index - 1) // 2 if index % 2 == 1 else None


def _cantor(m: int, n: int) -> int:
    return (m + n) * (m + n + 1) // 2 + n


def _uncantor(z: int) -> tuple[int, int]:
    w = 0
    while (w + 1) * (w + 2) // 2 <= z:
        w += 1
    n = z - w * (w + 1) // 2
    return (w - n, n)


def operator_index(m: int, n: int) -> int:
    return 4 * _cantor(m, n) + 2


def decode_operator(index: int) -> Optional[tuple[int, int]]:
    return _uncantor((index - 2) // 4) if index % 4 == 2 else None


def user_const(k: int) -> Const:
    """The k-th constant available for user atoms in system 2."""
    return Const(4 * k)


def sort(n: int) -> Const:
    return Const(sort_index(n))


def operator(m: int, n: int) -> Const:
    return Const(operator_index(m, n))


# --- raw string form --------------------------------------------------------


def parse_raw(text: str, system: int = 1) -> Term:
    term, pos = _parse_raw_at(text, 0, system)
    if pos != len(text):
        raise TermSyntaxError("trailing input", pos)
    return term


def _parse_raw_at(text: str, pos: int, system: int) -> tuple[Term, int]:
    if pos >= len(text):
        raise TermSyntaxError("unexpected end of input", pos)
    ch = text[pos]
    if ch in ("c", "v"):
        primes = 0
        pos += 1
        while pos < len(text) and text[pos] == "'":
            primes += 1
            pos += 1
        return (Const(primes) if ch == "c" else Var(primes)), pos
    if ch == "r":
        if system == 2:
            raise TermSyntaxError("rho terms are not part of system 2", pos)
        body, pos = _parse_raw_at(text, pos + 1, system)
        return Rho(body), pos
    if ch == "b":
        fun, pos = _parse_raw_at(text, pos + 1, system)
        arg, pos = _parse_raw_at(text, pos, system)
        return App(fun, arg), pos
    if ch == "l":
        pos += 1
        if pos >= len(text) or text[pos] != "v":
            raise TermSyntaxError("lambda binder must be a variable", pos)
        var, pos = _parse_raw_at(text, pos, system)
        dom, pos = _parse_raw_at(text, pos, system)
        body, pos = _parse_raw_at(text, pos, system)
        return Lam(var.index, dom, body), pos
    raise TermSyntaxError(f"unexpected character {ch!r}", pos)


def render_raw(t: Term) -> str:
    match t:
        case Const(i):
            return "c" + "'" * i
        case Var(i):
            return "v" + "'" * i
        case Rho(body):
            return "r" + render_raw(body)
        case App(fun, arg):
            return "b" + render_raw(fun) + render_raw(arg)
        case Lam(var, dom, body):
            return "l" + render_raw(Var(var)) + render_raw(dom) + render_raw(body)
    raise TypeError(f"not a term: {t!r}")


def stratum(t: Term) -> int:
    """Least n with t in T^n: 0 for atoms, 1 + max over children otherwise."""
    match t:
        case Const(_) | Var(_):
            return 0
        case Rho(body):
            return 1 + stratum(body)
        case App(fun, arg):
            return 1 + max(stratum(fun), stratum(arg))
        case Lam(_, dom, body):
            return 1 + max(stratum(dom), stratum(body))
    raise TypeError(f"not a term: {t!r}")


def subterms(t: Term):
    yield t
    match t:
        case Rho(body):
            yield from subterms(body)
        case App(fun, arg):
            yield from subterms(fun)
            yield from subterms(arg)
        case Lam(_, dom, body):
            yield from subterms(dom)
            yield from subterms(body)


def check_system2(t: Term) -> None:
    """Reject terms containing rho nodes."""
    for s in subterms(t):
        if isinstance(s, Rho):
            raise TermSyntaxError("rho terms are not part of system 2")


# --- abbreviation layer (term builders) -------------------------------------


def free_vars(t: Term) -> frozenset[int]:
    # duplicated from binding to avoid a cycle; binding re-exports this
    match t:
        case Const(_):
            return frozenset()
        case Var(i):
            return frozenset((i,))
        case Rho(body):
            return free_vars(body)
        case App(fun, arg):
            return free_vars(fun) | free_vars(arg)
        case Lam(var, dom, body):
            return free_vars(dom) | (free_vars(body) - {var})
    raise TypeError(f"not a term: {t!r}")


def least_var_outside(avoid: frozenset[int]) -> int:
    i = 0
    while i in avoid:
        i += 1
    return i


def mk_pi(x: int, r: Term, s: Term) -> Term:
    """pi x R S := rho lambda x R S."""
    return Rho(Lam(x, r, s))


def mk_arrow(r: Term, s: Term) -> Term:
    """R -> S := pi x R S for the least x not free in S."""
    return mk_pi(least_var_outside(free_vars(s)), r, s)


def mk_pi2(m: int, n: int, x: int, r: Term, s: Term) -> Term:
    """pi_m^n x R S := p_m^n R (lambda x R S)."""
    return App(App(operator(m, n), r), Lam(x, r, s))


def mk_arrow2(m: int, n: int, r: Term, s: Term) -> Term:
    return mk_pi2(m, n, least_var_outside(free_vars(s)), r, s)


def apps(fun: Term, *args: Term) -> Term:
    """Left-associated application (t0 t1 ... tn) = beta^n t0 ... tn."""
    for a in args:
        fun = App(fun, a)
    return fun


class SugarConstants:
    """Part-1 abbreviations over a designated propositions constant."""

    def __init__(self, star: Const = Const(0)):
        self.star = star

    def bot(self) -> Term:
        return mk_pi(0, self.star, Var(0))

    def top(self) -> Term:
        return mk_arrow(self.bot(), self.bot())

    def neg(self, s: Term) -> Term:
        return mk_arrow(s, self.bot())

    def and_(self, r: Term, s: Term) -> Term:
        return self.neg(mk_arrow(r, self.neg(s)))

    def forall(self, x: int, r: Term, s: Term) -> Term:
        """forall x R S := neg neg (pi x R S)."""
        return self.neg(self.neg(mk_pi(x, r, s)))
