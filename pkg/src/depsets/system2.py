"""Semantics of the second system: product operators, well-formedness,
reduction and sub-reduction statements, and finite universe towers.

Product operators have a fixed meaning derived from the sort carriers:
p applied to a domain D from the m-th carrier yields the function
sending each family over D into the n-th carrier to its dependent
product.  The universal quantifier in (sub-)reduction satisfaction is
approximated over a declared finite variable pool; refutations remain
absolute, positive verdicts are pool-relative.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import hfset
from .binding import alpha_eq, canonicalize, free_vars, substitute
from .hfset import EMPTY, HFSet, ResourceError
from .semantics1 import DEFAULT_SIZE_GUARD, Assignment
from .syntax import (
    App,
    Const,
    Lam,
    Rho,
    Term,
    Var,
    decode_operator,
    decode_sort,
)

__all__ = [
    "Interpretation2",
    "Statement2",
    "eval2",
    "wf",
    "satisfies2",
    "head_beta",
    "head_alpha_steps",
    "beta_reduce_all",
    "closures",
    "eta_check",
    "FiniteUniverses",
    "build_finite_universes",
]


@dataclass(frozen=True)
class Statement2:
    kind: str  # "typing" | "reduction" | "subreduction"
    left: Term
    right: Term

    def render(self) -> str:
        from .syntax import render_raw

        sep = {"typing": ":", "reduction": "|>", "subreduction": "|>="}[self.kind]
        return f"{render_raw(self.left)} {sep} {render_raw(self.right)}"


@dataclass(frozen=True)
class Interpretation2:
    """An assignment on variables and non-operator constants, together
    with the sort carriers the operator meaning is derived from.

    Carrier n is the value of the n-th sort; operators are computed on
    demand and never stored or overridden.
    """

    assignment: Assignment
    carriers: tuple[HFSet, ...]
    size_guard: int = DEFAULT_SIZE_GUARD

    def carrier(self, n: int) -> HFSet:
        if n < len(self.carriers):
            return self.carriers[n]
        return EMPTY

    def override(self, bindings: Iterable[tuple[HFSet, int]]) -> "Interpretation2":
        return Interpretation2(
            self.assignment.override(bindings), self.carriers, self.size_guard
        )


_P_MEMO: dict[tuple, HFSet] = {}


def _p_value(i: Interpretation2, m: int, n: int) -> HFSet:
    """The full operator value {<{<prod(phi),phi> | phi in Un^D}, D> | D in Um}."""
    key = (i.carriers, m, n, i.size_guard)
    got = _P_MEMO.get(key)
    if got is not None:
        return got
    outer = []
    for d in i.carrier(m):
        outer.append(hfset.pair(_p_applied(i, n, d), d))
    value = HFSet(outer)
    _P_MEMO[key] = value
    return value


def _p_applied(i: Interpretation2, n: int, d: HFSet) -> HFSet:
    """{<prod(phi), phi> | phi in carrier(n)^d}, memoized per (n, d)."""
    key = (i.carriers, n, d, i.size_guard)
    got = _P_MEMO.get(key)
    if got is not None:
        return got
    inner = []
    for phi in hfset.function_space(i.carrier(n), d, i.size_guard):
        inner.append(hfset.pair(hfset.dep_product(phi, i.size_guard), phi))
    value = HFSet(inner)
    _P_MEMO[key] = value
    return value


def eval2(i: Interpretation2, t: Term) -> HFSet:
    match t:
        case Const(k):
            n = decode_sort(k)
            if n is not None:
                return i.carrier(n)
            mn = decode_operator(k)
            if mn is not None:
                return _p_value(i, *mn)
            return i.assignment.const(k)
        case Var(k):
            return i.assignment.var(k)
        case App(App(Const(k), r), s) if decode_operator(k) is not None:
            # shortcut keeps the huge operator value unmaterialized: the
            # applied operator sends exactly the families over its domain
            # into the n-th carrier to their dependent products
            mn = decode_operator(k)
            d = eval2(i, r)
            if d not in i.carrier(mn[0]):
                return EMPTY
            phi = eval2(i, s)
            if not hfset.is_function(phi) or hfset.domain(phi) != d:
                return EMPTY
            target = i.carrier(mn[1])
            if any(v not in target for v in hfset.as_dict(phi).values()):
                return EMPTY
            return hfset.dep_product(phi, i.size_guard)
        case App(Const(k), r) if decode_operator(k) is not None:
            mn = decode_operator(k)
            d = eval2(i, r)
            return _p_applied(i, mn[1], d) if d in i.carrier(mn[0]) else EMPTY
        case App(fun, arg):
            return hfset.apply(eval2(i, fun), eval2(i, arg))
        case Lam(x, dom, body):
            graph = set()
            for r in eval2(i, dom):
                graph.add(hfset.pair(eval2(i.override([(r, x)]), body), r))
                if len(graph) > i.size_guard:
                    raise ResourceError("lambda graph exceeds the size guard")
            return HFSet(graph)
        case Rho(_):
            raise ValueError("rho terms are not part of system 2")
    raise TypeError(f"not a term: {t!r}")


def wf(i: Interpretation2, t: Term) -> bool:
    """Only functions are applied, and only to members of their domain."""
    match t:
        case Const(_) | Var(_):
            return True
        case App(fun, arg):
            if not (wf(i, fun) and wf(i, arg)):
                return False
            f = eval2(i, fun)
            return hfset.is_function(f) and eval2(i, arg) in hfset.domain(f)
        case Lam(x, dom, body):
            if not wf(i, dom):
                return False
            return all(wf(i.override([(r, x)]), body) for r in eval2(i, dom))
        case Rho(_):
            raise ValueError("rho terms are not part of system 2")
    raise TypeError(f"not a term: {t!r}")


def _var_maps(
    stmt_vars: Sequence[int], var_pool: Sequence[HFSet]
) -> Iterable[list[tuple[HFSet, int]]]:
    for combo in itertools.product(var_pool, repeat=len(stmt_vars)):
        yield [(value, x) for value, x in zip(combo, stmt_vars)]


def satisfies2(
    i: Interpretation2, stmt: Statement2, var_pool: Sequence[HFSet] = ()
) -> bool:
    """Satisfaction; the reduction quantifier ranges over var_pool maps.

    Typing: both sides well formed and the subject a member of the
    predicate.  Reduction: under every pool override where the redex is
    well formed, the contractum is well formed with equal value.
    Sub-reduction: likewise with inclusion.
    """
    if stmt.kind == "typing":
        return (
            wf(i, stmt.left)
            and wf(i, stmt.right)
            and eval2(i, stmt.left) in eval2(i, stmt.right)
        )
    stmt_vars = sorted(free_vars(stmt.left) | free_vars(stmt.right))
    for bindings in _var_maps(stmt_vars, var_pool):
        j = i.override(bindings)
        if not wf(j, stmt.left):
            continue
        if not wf(j, stmt.right):
            return False
        lv, rv = eval2(j, stmt.left), eval2(j, stmt.right)
        if stmt.kind == "reduction":
            if lv != rv:
                return False
        elif stmt.kind == "subreduction":
            if not all(e in rv.elements for e in lv):
                return False
        else:
            raise ValueError(f"unknown statement kind {stmt.kind!r}")
    return True


# --- reduction relations -----------------------------------------------------


def head_beta(t: Term) -> Optional[Term]:
    """Contract a top-level redex (lam x R S) T to S[T/x]."""
    match t:
        case App(Lam(x, _, body), arg):
            return substitute(body, arg, x)
    return None


def head_alpha_steps(t: Term, extra_window: int = 3) -> list[Term]:
    from .binding import head_alpha

    return head_alpha(t, extra_window)


def beta_reduce_all(t: Term) -> list[Term]:
    """All one-step contextual beta contractions, in a fixed order."""
    out: list[Term] = []
    head = head_beta(t)
    if head is not None:
        out.append(head)
    match t:
        case App(fun, arg):
            out.extend(App(f, arg) for f in beta_reduce_all(fun))
            out.extend(App(fun, a) for a in beta_reduce_all(arg))
        case Lam(x, dom, body):
            out.extend(Lam(x, d, body) for d in beta_reduce_all(dom))
            out.extend(Lam(x, dom, b) for b in beta_reduce_all(body))
        case Rho(body):
            out.extend(Rho(b) for b in beta_reduce_all(body))
    return out


def _contexts_of(t: Term):
    """All (subterm, rebuild) pairs for one-hole contexts of t."""
    yield t, lambda c: c
    match t:
        case App(fun, arg):
            for sub, rebuild in _contexts_of(fun):
                yield sub, (lambda c, rb=rebuild: App(rb(c), arg))
            for sub, rebuild in _contexts_of(arg):
                yield sub, (lambda c, rb=rebuild: App(fun, rb(c)))
        case Lam(x, dom, body):
            for sub, rebuild in _contexts_of(dom):
                yield sub, (lambda c, rb=rebuild: Lam(x, rb(c), body))
            for sub, rebuild in _contexts_of(body):
                yield sub, (lambda c, rb=rebuild: Lam(x, dom, rb(c)))
        case Rho(body):
            for sub, rebuild in _contexts_of(body):
                yield sub, (lambda c, rb=rebuild: Rho(rb(c)))


def closures(
    stmts: Iterable[Statement2],
    which: Sequence[str],
    term_window: Sequence[Term] = (),
    budget: int = 64,
) -> list[Statement2]:
    """Closure of reduction/sub-reduction statement sets.

    which is drawn from {"contextual", "reflexive", "transitive"}.  The
    contextual closure embeds each statement into every one-hole context
    over the declared term window; the reflexive closure adds R ? R for
    window terms; the transitive closure chains statements of the same
    kind up to the step budget.  Results are deduplicated modulo alpha
    on both sides.
    """
    current: list[Statement2] = list(stmts)
    for mode in which:
        if mode == "contextual":
            added = list(current)
            for s in current:
                if s.kind == "typing":
                    continue
                for host in term_window:
                    for sub, rebuild in _contexts_of(host):
                        if sub == s.left:
                            added.append(Statement2(s.kind, host, rebuild(s.right)))
            current = added
        elif mode == "reflexive":
            added = list(current)
            kinds = {s.kind for s in current if s.kind != "typing"} or {"reduction"}
            for host in term_window:
                for k in kinds:
                    added.append(Statement2(k, host, host))
            current = added
        elif mode == "transitive":
            current = _transitive(current, budget)
        else:
            raise ValueError(f"unknown closure mode {mode!r}")
        current = _dedup_alpha(current)
        if len(current) > budget * max(1, len(list(term_window)) + 1) + 10000:
            raise ResourceError("closure exceeds budget")
    return current


def _transitive(stmts: list[Statement2], budget: int) -> list[Statement2]:
    out = list(stmts)
    seen = {_alpha_key(s) for s in out}
    steps = 0
    changed = True
    while changed:
        changed = False
        for a in list(out):
            for b in list(out):
                if a.kind != "typing" and a.kind == b.kind and alpha_eq(a.right, b.left):
                    c = Statement2(a.kind, a.left, b.right)
                    k = _alpha_key(c)
                    if k not in seen:
                        seen.add(k)
                        out.append(c)
                        changed = True
                        steps += 1
                        if steps > budget:
                            raise ResourceError("transitive closure exceeds budget")
    return out


def _alpha_key(s: Statement2):
    return (s.kind, canonicalize(s.left), canonicalize(s.right))


def _dedup_alpha(stmts: list[Statement2]) -> list[Statement2]:
    seen = set()
    out = []
    for s in stmts:
        k = _alpha_key(s)
        if k not in seen:
            seen.add(k)
            out.append(s)
    return out


def eta_check(
    i: Interpretation2,
    r: Term,
    f: Term,
    x: int,
    var_pool: Sequence[HFSet] = (),
) -> tuple[bool, bool]:
    """Check (lam x R (F x)  |>=  F); x must not be free in F.

    Returns (sub-reduction holds, value equality observed whenever the
    redex was well formed).  Equality is informational; only the
    inclusion is claimed in general.
    """
    if x in free_vars(f):
        raise ValueError("eta requires the bound variable not free in F")
    redex = Lam(x, r, App(f, Var(x)))
    stmt = Statement2("subreduction", redex, f)
    holds = satisfies2(i, stmt, var_pool)
    equal = True
    stmt_vars = sorted(free_vars(redex) | free_vars(f))
    for bindings in _var_maps(stmt_vars, var_pool):
        j = i.override(bindings)
        if wf(j, redex) and eval2(j, redex) != eval2(j, f):
            equal = False
    return holds, equal


# --- finite universe towers --------------------------------------------------


@dataclass
class FiniteUniverses:
    """Nested finite sort carriers standing in for canonical universes."""

    carriers: tuple[HFSet, ...]
    proof_irrelevant: bool = False
    prop_extensional: bool = False
    capabilities: dict[str, bool] = field(default_factory=dict)

    def interpretation(
        self,
        consts: Optional[dict[int, HFSet]] = None,
        vars: Optional[dict[int, HFSet]] = None,
        size_guard: int = DEFAULT_SIZE_GUARD,
    ) -> Interpretation2:
        return Interpretation2(
            Assignment.make(consts, vars), self.carriers, size_guard
        )

    def report(self) -> str:
        lines = [f"carriers: {len(self.carriers)}"]
        for n, c in enumerate(self.carriers):
            lines.append(f"  u{n}: {len(c)} members")
        lines.append(f"flags: proofIrrelevant={self.proof_irrelevant}, "
                     f"propExtensional={self.prop_extensional}")
        for name in sorted(self.capabilities):
            lines.append(f"  {name}: {'yes' if self.capabilities[name] else 'no'}")
        return "\n".join(lines)


_BOOL = (EMPTY, hfset.singleton(EMPTY))


def build_finite_universes(
    carriers: Sequence[Iterable[HFSet]],
    proof_irrelevant: bool = False,
    prop_extensional: bool = False,
    product_probe_limit: int = 200,
) -> FiniteUniverses:
    """Validate and package a carrier tower, probing canonical facts.

    Required: {0, {0}} inside the bottom carrier and nesting U_n inside
    U_{n+1} elementwise.  Flag invariants are enforced; closure facts
    (carrier-as-member, product closure) are probed and recorded in the
    capability report rather than assumed.
    """
    sets = tuple(HFSet(c) for c in carriers)
    if not sets:
        raise ValueError("at least one carrier required")
    for b in _BOOL:
        if b not in sets[0]:
            raise ValueError("the bottom carrier must contain 0 and {0}")
    for n in range(len(sets) - 1):
        if not all(e in sets[n + 1] for e in sets[n]):
            raise ValueError(f"carrier u{n} not included in u{n + 1}")
    if proof_irrelevant and any(len(s) > 1 for s in sets[0]):
        raise ValueError("proofIrrelevant requires every proposition to have "
                         "at most one member")
    if prop_extensional and sum(1 for s in sets[0] if len(s) > 0) > 1:
        raise ValueError("propExtensional allows at most one nonempty proposition")

    caps: dict[str, bool] = {}
    for n in range(len(sets) - 1):
        caps[f"u{n} member of u{n + 1}"] = sets[n] in sets[n + 1]
    probes = 0
    closed = True
    for m in range(len(sets)):
        for n in range(len(sets)):
            target = min(max(m + 1, n), len(sets) - 1)
            for d in sets[m]:
                try:
                    space = hfset.function_space(sets[n], d, 10**4)
                except ResourceError:
                    closed = False
                    continue
                for phi in space:
                    probes += 1
                    if probes > product_probe_limit:
                        break
                    if hfset.dep_product(phi) not in sets[target]:
                        closed = False
                if probes > product_probe_limit:
                    break
            if probes > product_probe_limit:
                break
    caps["products land in u_{(m+1) max n}"] = closed
    return FiniteUniverses(sets, proof_irrelevant, prop_extensional, caps)
