"""Evaluation of terms over hereditarily finite sets and finite
consequence checking.

An assignment gives every atom a set (default: the empty set).  The
consequence relation is checked only over a finite pool of candidate
values, so a "holds" verdict is relative to the pool while a
counterexample refutes the consequence outright.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from . import hfset
from .binding import AlphaClass, canonicalize
from .hfset import EMPTY, HFSet, ResourceError
from .syntax import App, Const, Lam, Rho, Term, Var

__all__ = [
    "Assignment",
    "Statement1",
    "Verdict",
    "eval_term",
    "eval_override",
    "satisfies",
    "atoms_of",
    "enumerate_models",
    "check_consequence",
]

DEFAULT_SIZE_GUARD = 10**6


@dataclass(frozen=True)
class Assignment:
    """A total map from atoms to sets; unlisted atoms denote the empty set."""

    consts: tuple[tuple[int, HFSet], ...] = ()
    vars: tuple[tuple[int, HFSet], ...] = ()

    @staticmethod
    def make(
        consts: Optional[dict[int, HFSet]] = None,
        vars: Optional[dict[int, HFSet]] = None,
    ) -> "Assignment":
        return Assignment(
            tuple(sorted((consts or {}).items())),
            tuple(sorted((vars or {}).items())),
        )

    def const(self, i: int) -> HFSet:
        return dict(self.consts).get(i, EMPTY)

    def var(self, i: int) -> HFSet:
        return dict(self.vars).get(i, EMPTY)

    def override(self, bindings: Iterable[tuple[HFSet, int]]) -> "Assignment":
        """Rebind variables; later bindings shadow earlier ones."""
        d = dict(self.vars)
        for value, x in bindings:
            d[x] = value
        return Assignment(self.consts, tuple(sorted(d.items())))

    def describe(self) -> str:
        parts = [f"c{i}={hfset.render(s)}" for i, s in self.consts]
        parts += [f"v{i}={hfset.render(s)}" for i, s in self.vars]
        return "{" + ", ".join(parts) + "}"


def eval_term(a: Assignment, t: Term, size_guard: int = DEFAULT_SIZE_GUARD) -> HFSet:
    match t:
        case Const(i):
            return a.const(i)
        case Var(i):
            return a.var(i)
        case Rho(body):
            return hfset.dep_product(eval_term(a, body, size_guard), size_guard)
        case App(fun, arg):
            return hfset.apply(
                eval_term(a, fun, size_guard), eval_term(a, arg, size_guard)
            )
        case Lam(x, dom, body):
            graph = set()
            for r in eval_term(a, dom, size_guard):
                value = eval_term(a.override([(r, x)]), body, size_guard)
                graph.add(hfset.pair(value, r))
                if len(graph) > size_guard:
                    raise ResourceError("lambda graph exceeds the size guard")
            return HFSet(graph)
    raise TypeError(f"not a term: {t!r}")


def eval_override(
    a: Assignment,
    bindings: Sequence[tuple[HFSet, int]],
    t: Term,
    size_guard: int = DEFAULT_SIZE_GUARD,
) -> HFSet:
    return eval_term(a.override(bindings), t, size_guard)


@dataclass(frozen=True)
class Statement1:
    """A typing statement: a pair of alpha-classes, read `subject : predicate`."""

    subject: AlphaClass
    predicate: AlphaClass

    @staticmethod
    def of(subject: Term, predicate: Term) -> "Statement1":
        return Statement1(AlphaClass.of(subject), AlphaClass.of(predicate))

    def __repr__(self) -> str:
        return f"({self.subject!r} : {self.predicate!r})"


def satisfies(a: Assignment, stmt: Statement1, size_guard: int = DEFAULT_SIZE_GUARD) -> bool:
    return eval_term(a, stmt.subject.rep, size_guard) in eval_term(
        a, stmt.predicate.rep, size_guard
    )


def atoms_of(t: Term) -> tuple[frozenset[int], frozenset[int]]:
    """The (constant indices, free variable indices) of t.

    Bound variables are excluded: evaluation quantifies them itself, so
    models need not assign them.
    """
    from .binding import free_vars

    consts: set[int] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        match u:
            case Const(i):
                consts.add(i)
            case Var(_):
                pass
            case Rho(body):
                stack.append(body)
            case App(fun, arg):
                stack.extend((fun, arg))
            case Lam(_, dom, body):
                stack.extend((dom, body))
    return frozenset(consts), free_vars(t)


def statement_atoms(stmts: Iterable[Statement1]) -> tuple[frozenset[int], frozenset[int]]:
    consts: set[int] = set()
    vars_: set[int] = set()
    for s in stmts:
        for t in (s.subject.rep, s.predicate.rep):
            c, v = atoms_of(t)
            consts |= c
            vars_ |= v
    return frozenset(consts), frozenset(vars_)


def _check_coverage(
    consts: Sequence[int], vars_: Sequence[int], stmts: Iterable[Statement1]
) -> None:
    c_needed, v_needed = statement_atoms(stmts)
    missing_c = sorted(c_needed - set(consts))
    missing_v = sorted(v_needed - set(vars_))
    if missing_c or missing_v:
        names = [f"c{i}" for i in missing_c] + [f"v{i}" for i in missing_v]
        raise ValueError(f"atoms not covered by the enumeration: {', '.join(names)}")


def enumerate_models(
    pool: Sequence[HFSet],
    consts: Sequence[int],
    vars_: Sequence[int],
    gamma: Iterable[Statement1],
    size_guard: int = DEFAULT_SIZE_GUARD,
) -> Iterator[Assignment]:
    """All assignments over pool^atoms satisfying gamma, in a fixed order.

    Free variables of statements range over the pool exactly like
    constants; bound variables are handled by evaluation itself.
    """
    gamma = list(gamma)
    _check_coverage(consts, vars_, gamma)
    consts = sorted(consts)
    vars_ = sorted(vars_)
    n = len(consts) + len(vars_)
    for combo in itertools.product(pool, repeat=n):
        a = Assignment.make(
            dict(zip(consts, combo[: len(consts)])),
            dict(zip(vars_, combo[len(consts) :])),
        )
        if all(satisfies(a, s, size_guard) for s in gamma):
            yield a


@dataclass(frozen=True)
class Verdict:
    holds: bool
    pool_label: str
    counterexample: Optional[Assignment] = None
    models_checked: int = 0

    def trailer(self) -> str:
        if self.holds:
            return f"HOLDS(pool={self.pool_label})"
        assert self.counterexample is not None
        return f"COUNTEREXAMPLE {self.counterexample.describe()}"


def check_consequence(
    pool: Sequence[HFSet],
    consts: Sequence[int],
    vars_: Sequence[int],
    gamma: Iterable[Statement1],
    stmt: Statement1,
    pool_label: str = "pool",
    size_guard: int = DEFAULT_SIZE_GUARD,
) -> Verdict:
    """Pool-relative consequence: no pool-model of gamma may violate stmt."""
    gamma = list(gamma)
    _check_coverage(consts, vars_, gamma + [stmt])
    count = 0
    for a in enumerate_models(pool, consts, vars_, gamma, size_guard):
        count += 1
        if not satisfies(a, stmt, size_guard):
            return Verdict(False, pool_label, a, count)
    return Verdict(True, pool_label, None, count)
