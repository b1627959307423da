"""Type inference for the first system.

The inference relation is computed by the typing-set recursion, which
terminates because every recursive call shrinks the subject.  A bounded
forward-closure oracle applies the sequent rules literally and is used
to cross-validate the recursion on small instances.
"""

from __future__ import annotations

from typing import FrozenSet, Iterable, Optional

from .binding import AlphaClass, canonicalize, free_vars, substitute
from .hfset import ResourceError
from .semantics1 import Statement1
from .syntax import App, Const, Lam, Rho, Term, Var, mk_pi

__all__ = [
    "Gamma1",
    "gamma_free_vars",
    "typing_set",
    "derives",
    "derives_bounded_oracle",
    "search_subject",
    "is_context",
    "gamma_subst",
    "subst_inv_check",
]

Gamma1 = FrozenSet[Statement1]
TypeSet = FrozenSet[AlphaClass]


def gamma_free_vars(gamma: Iterable[Statement1]) -> frozenset[int]:
    out: set[int] = set()
    for s in gamma:
        out |= free_vars(s.subject.rep)
        out |= free_vars(s.predicate.rep)
    return frozenset(out)


def _lookup(gamma: Gamma1, subject: AlphaClass) -> set[AlphaClass]:
    return {s.predicate for s in gamma if s.subject == subject}


def typing_set(
    gamma: Iterable[Statement1], subject: Term, subset_scan: bool = False
) -> TypeSet:
    """All predicate classes P with gamma deriving (subject : P).

    The lambda clause existentially quantifies a sub-hypothesis set
    avoiding the binder; renaming the binder to a fresh variable makes
    the full hypothesis set the maximal (hence sufficient) choice.  The
    subset_scan flag instead enumerates all subsets with the binder as
    written, for cross-validation.
    """
    g = frozenset(gamma)
    return _typing(g, AlphaClass.of(subject), subset_scan, {})


def _typing(
    gamma: Gamma1,
    subject: AlphaClass,
    subset_scan: bool,
    memo: dict,
) -> TypeSet:
    key = (gamma, subject)
    got = memo.get(key)
    if got is not None:
        return got
    memo[key] = frozenset()  # guard against accidental cycles
    t = subject.rep
    out: set[AlphaClass] = _lookup(gamma, subject)
    match t:
        case Const(_) | Var(_) | Rho(_):
            pass
        case App(fun, arg):
            fun_types = _typing(gamma, AlphaClass.of(fun), subset_scan, memo)
            arg_types = _typing(gamma, AlphaClass.of(arg), subset_scan, memo)
            for tau in fun_types:
                match tau.rep:
                    case Rho(Lam(x, p, r)):
                        if AlphaClass.of(p) in arg_types:
                            out.add(AlphaClass.of(substitute(r, arg, x)))
        case Lam(x, q, body):
            if subset_scan:
                out |= _lambda_subset_scan(gamma, x, q, body, memo)
            else:
                avoid = gamma_free_vars(gamma) | free_vars(q) | _all_vars(t)
                z = _least_outside(avoid)
                body_z = substitute(body, Var(z), x) if z != x else body
                extended = gamma | {Statement1.of(Var(z), q)}
                for p in _typing(gamma=extended, subject=AlphaClass.of(body_z),
                                 subset_scan=subset_scan, memo=memo):
                    out.add(AlphaClass.of(mk_pi(z, q, p.rep)))
    result = frozenset(out)
    memo[key] = result
    return result


def _lambda_subset_scan(
    gamma: Gamma1, x: int, q: Term, body: Term, memo: dict
) -> set[AlphaClass]:
    # literal existential: every subset of gamma avoiding the written binder
    out: set[AlphaClass] = set()
    if x in free_vars(q):
        return out
    stmts = sorted(gamma, key=repr)
    n = len(stmts)
    for mask in range(1 << n):
        delta = frozenset(stmts[i] for i in range(n) if mask >> i & 1)
        if x in gamma_free_vars(delta):
            continue
        extended = delta | {Statement1.of(Var(x), q)}
        for p in _typing(extended, AlphaClass.of(body), True, memo):
            out.add(AlphaClass.of(mk_pi(x, q, p.rep)))
    return out


def _all_vars(t: Term) -> frozenset[int]:
    from .binding import all_vars

    return all_vars(t)


def _least_outside(avoid: set[int] | frozenset[int]) -> int:
    z = 0
    while z in avoid:
        z += 1
    return z


def derives(gamma: Iterable[Statement1], stmt: Statement1, subset_scan: bool = False) -> bool:
    return stmt.predicate in typing_set(gamma, stmt.subject.rep, subset_scan)


# --- forward-closure oracle --------------------------------------------------


def _q_universe(gamma: Gamma1, stmt: Statement1) -> list[Term]:
    """Candidate binder domains: domains of lambda subterms in play."""
    from .syntax import subterms

    seen: set[AlphaClass] = set()
    out: list[Term] = []
    terms = [s.subject.rep for s in gamma] + [s.predicate.rep for s in gamma]
    terms += [stmt.subject.rep, stmt.predicate.rep]
    for t in terms:
        for u in subterms(t):
            if isinstance(u, Lam):
                c = AlphaClass.of(u.dom)
                if c not in seen:
                    seen.add(c)
                    out.append(c.rep)
    return out


def derives_bounded_oracle(
    gamma: Iterable[Statement1],
    stmt: Statement1,
    depth: int,
    budget: int = 20000,
) -> bool:
    """Literal rule application up to the given depth.

    Sound for the inference relation; complete only up to the depth and
    the bounded binder-domain universe drawn from the instance.
    """
    g = frozenset(gamma)
    qs = _q_universe(g, stmt)
    return stmt in _forward(g, depth, qs, budget, {})


def _forward(
    gamma: Gamma1,
    depth: int,
    q_universe: list[Term],
    budget: int,
    memo: dict,
) -> frozenset[Statement1]:
    key = (gamma, depth)
    got = memo.get(key)
    if got is not None:
        return got
    if depth == 0:
        memo[key] = gamma
        return gamma
    prev = _forward(gamma, depth - 1, q_universe, budget, memo)
    out: set[Statement1] = set(prev)

    # (App): (F : pi x P R), (S : P)  =>  (F S : R[S/x])
    pis = [
        (s.subject, tau)
        for s in prev
        for tau in [s.predicate.rep]
        if isinstance(tau, Rho) and isinstance(tau.body, Lam)
    ]
    for f_subj, tau in pis:
        x, p, r = tau.body.var, tau.body.dom, tau.body.body
        p_class = AlphaClass.of(p)
        for s in prev:
            if s.predicate == p_class:
                arg = s.subject.rep
                out.add(Statement1.of(App(f_subj.rep, arg), substitute(r, arg, x)))
                if len(out) > budget:
                    raise ResourceError("oracle closure exceeds budget")

    # (Ab): gamma, (y:Q) |-_{n-1} (S:P)  =>  (lam y Q S : pi y Q P)
    for q in q_universe:
        y = _least_outside(gamma_free_vars(gamma) | free_vars(q))
        extended = gamma | {Statement1.of(Var(y), q)}
        for s in _forward(extended, depth - 1, q_universe, budget, memo):
            out.add(
                Statement1.of(
                    Lam(y, q, s.subject.rep), mk_pi(y, q, s.predicate.rep)
                )
            )
            if len(out) > budget:
                raise ResourceError("oracle closure exceeds budget")

    result = frozenset(out)
    memo[key] = result
    return result


def search_subject(
    gamma: Iterable[Statement1],
    predicate: Term,
    depth: int,
    budget: int = 100_000,
) -> Optional[Term]:
    """Bounded forward search for a closed subject with the predicate.

    None means `no closed subject found at this depth`, which proves
    nothing; a budget overrun raises ResourceError instead.
    """
    g = frozenset(gamma)
    target = AlphaClass.of(predicate)
    probe = Statement1.of(Const(0), predicate)
    qs = _q_universe(g, probe)
    for s in _forward(g, depth, qs, budget, {}):
        if s.predicate == target and not free_vars(s.subject.rep):
            return s.subject.rep
    return None


# --- contexts and substitution invariance ------------------------------------


def is_context(gamma: Iterable[Statement1]) -> bool:
    """Subjects are atoms or rho-terms and determine predicates uniquely."""
    seen: dict[AlphaClass, AlphaClass] = {}
    for s in gamma:
        if not isinstance(s.subject.rep, (Const, Var, Rho)):
            return False
        prior = seen.get(s.subject)
        if prior is not None and prior != s.predicate:
            return False
        seen[s.subject] = s.predicate
    return True


def gamma_subst(gamma: Iterable[Statement1], t: Term, x: int) -> Gamma1:
    return frozenset(
        Statement1.of(
            substitute(s.subject.rep, t, x), substitute(s.predicate.rep, t, x)
        )
        for s in gamma
    )


def subst_inv_check(
    gamma: Iterable[Statement1], stmt: Statement1, t: Term, x: int
) -> tuple[bool, bool]:
    """Derivability before and after substituting t for x everywhere."""
    g = frozenset(gamma)
    before = derives(g, stmt)
    after_stmt = Statement1.of(
        substitute(stmt.subject.rep, t, x), substitute(stmt.predicate.rep, t, x)
    )
    after = derives(gamma_subst(g, t, x), after_stmt)
    return (before, after)
