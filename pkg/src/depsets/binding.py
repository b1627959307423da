"""Free and bound variables, substitution, and alpha-conversion.

Substitution follows the three-case lambda clause with a deterministic
fresh variable: when renaming is forced, the binder becomes the least
index outside V(T) + V(S).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .syntax import App, Const, Lam, Rho, Term, Var, free_vars

__all__ = [
    "free_vars",
    "bound_vars",
    "all_vars",
    "substitute",
    "free_char_check",
    "head_alpha",
    "alpha_eq",
    "canonicalize",
    "AlphaClass",
    "alpha_closure",
]


def bound_vars(t: Term) -> frozenset[int]:
    match t:
        case Const(_) | Var(_):
            return frozenset()
        case Rho(body):
            return bound_vars(body)
        case App(fun, arg):
            return bound_vars(fun) | bound_vars(arg)
        case Lam(var, dom, body):
            return bound_vars(dom) | bound_vars(body) | {var}
    raise TypeError(f"not a term: {t!r}")


def all_vars(t: Term) -> frozenset[int]:
    return free_vars(t) | bound_vars(t)


def substitute(s: Term, t: Term, x: int) -> Term:
    """S[T/x], renaming bound variables only when capture would occur."""
    match s:
        case Var(i):
            return t if i == x else s
        case Const(_):
            return s
        case Rho(body):
            return Rho(substitute(body, t, x))
        case App(fun, arg):
            return App(substitute(fun, t, x), substitute(arg, t, x))
        case Lam(y, dom, body):
            if y == x or x not in free_vars(body):
                return Lam(y, substitute(dom, t, x), body)
            if y not in free_vars(t):
                return Lam(y, substitute(dom, t, x), substitute(body, t, x))
            z = _fresh(all_vars(t) | all_vars(body))
            renamed = substitute(body, Var(z), y)
            return Lam(z, substitute(dom, t, x), substitute(renamed, t, x))
    raise TypeError(f"not a term: {s!r}")


def _fresh(avoid: frozenset[int]) -> int:
    z = 0
    while z in avoid:
        z += 1
    return z


def free_char_check(s: Term, t: Term, x: int) -> tuple[bool, bool]:
    """Both sides of: T != x free in S  <=>  S[T/x] != S."""
    lhs = t != Var(x) and x in free_vars(s)
    rhs = substitute(s, t, x) != s
    return (lhs, rhs)


def head_alpha(t: Term, extra_window: int = 3) -> list[Term]:
    """All one-step head alpha-variants of a top-level lambda term.

    Produces lambda y R S[y/x] for every y outside V(S) in a bounded
    window, provided x is not bound in S.  Non-lambda terms have none.
    """
    hi = max(all_vars(t) | {0}) + extra_window
    return _head_alpha_candidates(t, range(hi + 1))


def _head_alpha_candidates(t: Term, candidates: Iterable[int]) -> list[Term]:
    if not isinstance(t, Lam):
        return []
    x, dom, body = t.var, t.dom, t.body
    if x in bound_vars(body):
        return []
    vs = all_vars(body)
    out = []
    for y in candidates:
        if y not in vs:
            out.append(Lam(y, dom, substitute(body, Var(y), x)))
    return out


# --- canonical representatives ----------------------------------------------


@dataclass(frozen=True)
class AlphaClass:
    """An alpha-equivalence class, keyed by its canonical representative."""

    rep: Term

    @staticmethod
    def of(t: Term) -> "AlphaClass":
        return AlphaClass(canonicalize(t))

    def __repr__(self) -> str:
        from .syntax import render_raw

        return f"[{render_raw(self.rep)}]a"


def canonicalize(t: Term) -> Term:
    """A named canonical representative of [t]_alpha.

    Binders are renamed to base + depth where base exceeds every free
    variable of the whole term, so the result is a pure function of the
    alpha-class and remains a term of the formal language.
    """
    base = max(free_vars(t), default=-1) + 1
    return _canon(t, base, {})

def _canon(t: Term, next_name: int, env: dict[int, int]) -> Term:
    match t:
        case Const(_):
            return t
        case Var(i):
            return Var(env.get(i, i))
        case Rho(body):
            return Rho(_canon(body, next_name, env))
        case App(fun, arg):
            return App(_canon(fun, next_name, env), _canon(arg, next_name, env))
        case Lam(x, dom, body):
            dom2 = _canon(dom, next_name, env)
            inner = dict(env)
            inner[x] = next_name
            return Lam(next_name, dom2, _canon(body, next_name + 1, inner))
    raise TypeError(f"not a term: {t!r}")


def alpha_eq(s: Term, t: Term) -> bool:
    return canonicalize(s) == canonicalize(t)


def _contextual_steps(t: Term, candidates: Iterable[int]) -> Iterable[Term]:
    """One-step contextual closure of head alpha-conversion."""
    yield from _head_alpha_candidates(t, candidates)
    match t:
        case Rho(body):
            for b in _contextual_steps(body, candidates):
                yield Rho(b)
        case App(fun, arg):
            for f in _contextual_steps(fun, candidates):
                yield App(f, arg)
            for a in _contextual_steps(arg, candidates):
                yield App(fun, a)
        case Lam(x, dom, body):
            for d in _contextual_steps(dom, candidates):
                yield Lam(x, d, body)
            for b in _contextual_steps(body, candidates):
                yield Lam(x, dom, b)


def alpha_closure(t: Term, extra_window: int = 3, budget: int = 100_000) -> set[Term]:
    """Breadth-first reflexive transitive contextual closure of head alpha.

    A literal-definition oracle for alpha_eq; exponential, small terms
    only.  Renaming targets are fixed up front (every index up to the
    original term's maximum plus the window), keeping the closure finite.
    """
    hi = max(all_vars(t) | {0}) + extra_window
    candidates = range(hi + 1)
    seen = {t}
    frontier = [t]
    while frontier:
        nxt = []
        for u in frontier:
            for v in _contextual_steps(u, candidates):
                if v not in seen:
                    if len(seen) >= budget:
                        raise RuntimeError("alpha closure budget exceeded")
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return seen
