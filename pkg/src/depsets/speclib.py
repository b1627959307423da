"""Reusable axiom bundles for specified structures, their intended
finite models, and completeness verifiers.

Typing hypotheses are checked structurally: membership in a product
type is decided pointwise instead of materializing the whole product
set, which is equivalent whenever the carriers are closed under the
family values involved (the builders close them automatically).  The
carrier side conditions of literal well-formedness are exercised
separately on the small statements in the test-suite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import hfset
from .hfset import EMPTY, HFSet
from .semantics1 import Assignment, Statement1
from .sugar import AtomTable
from .syntax import (
    App,
    Const,
    Lam,
    Term,
    Var,
    decode_operator,
    free_vars,
    least_var_outside,
    mk_arrow,
    mk_arrow2,
    mk_pi,
    mk_pi2,
    operator,
    sort,
    user_const,
)
from .system2 import Interpretation2, Statement2, eval2, satisfies2

__all__ = [
    "SpecBundle",
    "VerifyReport",
    "member_of_type",
    "bundle_false",
    "intended_model_false",
    "verify_false",
    "bundle_eq",
    "intended_model_eq",
    "verify_eq",
    "bundle_product",
    "bundle_product_poly",
    "intended_model_product",
    "verify_product",
    "bundle_and",
    "intended_model_and",
    "verify_and",
    "bundle_forall",
    "intended_model_forall",
    "verify_forall",
    "sub_reduction_eq_check",
    "part1_eq_axioms",
    "part1_beta_axiom",
    "poly_eq_axiom",
    "poly_beta_axiom",
    "double_beta_axiom",
    "choice_term",
    "choice_term_enumerate",
]

# fixed variable indices used in bundle statements
X, Y, P_, F_, G_, Z_, V_, W_, Q_ = range(9)

_BOOL = (EMPTY, hfset.singleton(EMPTY))


@dataclass
class SpecBundle:
    name: str
    atoms: AtomTable
    statements: list[Statement2]
    constants: dict[str, Const]

    def export_lines(self, system: int = 2) -> list[str]:
        from .sugar import render_sugar

        lines = []
        for name, c in sorted(self.constants.items(), key=lambda kv: kv[1].index):
            lines.append(f"atom {name} = c{c.index // 4}")
        for s in self.statements:
            sep = {"typing": ":", "reduction": "|>", "subreduction": "|>="}[s.kind]
            lines.append(
                f"{render_sugar(s.left, system, self.atoms)} {sep} "
                f"{render_sugar(s.right, system, self.atoms)}"
            )
        return lines


@dataclass
class VerifyReport:
    ok: bool
    failures: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _consts(names: Sequence[str]) -> tuple[dict[str, Const], AtomTable]:
    table = AtomTable()
    out = {}
    for k, name in enumerate(names):
        c = user_const(k)
        out[name] = c
        table.bind(name, c)
    return out, table


# --- structural membership and carrier closure -------------------------------


def _pi_parts(t: Term) -> Optional[tuple[int, int, Term, int, Term]]:
    match t:
        case App(App(Const(k), r), Lam(x, r2, s)) if r == r2:
            mn = decode_operator(k)
            if mn is not None:
                return (mn[0], mn[1], r, x, s)
    return None


def member_of_type(i: Interpretation2, value: HFSet, type_term: Term) -> bool:
    """Membership in a type, deciding product types pointwise."""
    parts = _pi_parts(type_term)
    if parts is None:
        return value in eval2(i, type_term)
    _, _, r, x, s = parts
    if not hfset.is_function(value):
        return False
    d = eval2(i, r)
    if hfset.domain(value) != d:
        return False
    for elem in d:
        j = i.override([(elem, x)])
        if not member_of_type(j, hfset.apply(value, elem), s):
            return False
    return True


def _scan_term(i: Interpretation2, t: Term, needed: list[set[HFSet]]) -> None:
    """Record the carrier members required for t to evaluate as written."""
    parts = _pi_parts(t)
    if parts is not None:
        m, n, r, x, s = parts
        _scan_term(i, r, needed)
        d = eval2(i, r)
        _grow(needed, m, d)
        for elem in d:
            j = i.override([(elem, x)])
            _scan_term(j, s, needed)
            _grow(needed, n, eval2(j, s))
        return
    match t:
        case App(fun, arg):
            _scan_term(i, fun, needed)
            _scan_term(i, arg, needed)
        case Lam(x, dom, body):
            _scan_term(i, dom, needed)
            for elem in eval2(i, dom):
                _scan_term(i.override([(elem, x)]), body, needed)


def _grow(needed: list[set[HFSet]], level: int, value: HFSet) -> None:
    while len(needed) <= level:
        needed.append(set())
    needed[level].add(value)


def _close_carriers(
    carriers: Sequence[Iterable[HFSet]],
    consts: dict[int, HFSet],
    stmts: Iterable[Statement2],
    rounds: int = 8,
) -> Interpretation2:
    """Grow carriers until every bundle type evaluates as intended."""
    sets = [set(c) for c in carriers]
    stmts = list(stmts)
    for _ in range(rounds):
        i = Interpretation2(
            Assignment.make(consts), tuple(HFSet(s) for s in sets)
        )
        needed: list[set[HFSet]] = [set() for _ in sets]
        for s in stmts:
            if s.kind == "typing":
                _scan_term(i, s.right, needed)
                _scan_term(i, s.left, needed)
        while len(sets) < len(needed):
            sets.append(set())
        if all(n <= sets[k] for k, n in enumerate(needed)):
            return i
        for k, n in enumerate(needed):
            sets[k] |= n
    raise RuntimeError("carrier closure did not converge")


def _check_bundle(
    i: Interpretation2,
    bundle: SpecBundle,
    var_pool: Sequence[HFSet],
) -> list[str]:
    failures = []
    for s in bundle.statements:
        if s.kind == "typing":
            ok = member_of_type(i, eval2(i, s.left), s.right)
        else:
            ok = satisfies2(i, s, var_pool)
        if not ok:
            failures.append(f"hypothesis not satisfied: {s.render()}")
    return failures


# --- false -------------------------------------------------------------------


def bundle_false() -> SpecBundle:
    consts, table = _consts(["ff", "ab"])
    bot, ab = consts["ff"], consts["ab"]
    # (bot : u0) and (ab : bot -> (x:u0) -> x)
    ab_type = mk_arrow2(0, 2, bot, mk_pi2(1, 0, X, sort(0), Var(X)))
    return SpecBundle(
        "false",
        table,
        [
            Statement2("typing", bot, sort(0)),
            Statement2("typing", ab, ab_type),
        ],
        consts,
    )


def intended_model_false() -> Interpretation2:
    b = bundle_false()
    u0 = set(_BOOL)
    consts = {b.constants["ff"].index: EMPTY, b.constants["ab"].index: EMPTY}
    return _close_carriers([u0, u0 | {HFSet(u0)}, set()], consts, b.statements)


def verify_false(i: Interpretation2) -> VerifyReport:
    b = bundle_false()
    failures = _check_bundle(i, b, [])
    if failures:
        return VerifyReport(False, failures)
    if eval2(i, b.constants["ff"]) != EMPTY:
        return VerifyReport(False, ["completeness: value of bot is not empty"])
    return VerifyReport(True)


# --- equality ----------------------------------------------------------------


def bundle_eq(n: int = 1) -> SpecBundle:
    consts, table = _consts(["a", "eq", "rfl", "sub"])
    a, eq, rfl, sub = (consts[k] for k in ("a", "eq", "rfl", "sub"))
    u0 = sort(0)
    eq_type = mk_arrow2(1, 2, a, mk_arrow2(1, 1, a, u0))
    rfl_type = mk_pi2(1, 0, X, a, App(App(eq, Var(X)), Var(X)))
    p_type = mk_arrow2(1, 1, a, u0)  # a -> u0
    sub_type = mk_pi2(
        1,
        2,
        X,
        a,
        mk_pi2(
            1,
            2,
            Y,
            a,
            mk_arrow2(
                0,
                2,
                App(App(eq, Var(X)), Var(Y)),
                mk_pi2(
                    2,
                    2,
                    P_,
                    p_type,
                    mk_arrow2(
                        0, 2, App(Var(P_), Var(X)), App(Var(P_), Var(Y))
                    ),
                ),
            ),
        ),
    )
    return SpecBundle(
        "eq",
        table,
        [
            Statement2("typing", a, sort(n)),
            Statement2("typing", eq, eq_type),
            Statement2("typing", rfl, rfl_type),
            Statement2("typing", sub, sub_type),
        ],
        consts,
    )


def _phis(domain: Sequence[HFSet], values: Sequence[HFSet]) -> list[dict[HFSet, HFSet]]:
    out = []
    for combo in itertools.product(values, repeat=len(domain)):
        out.append(dict(zip(domain, combo)))
    return out


def intended_model_eq(a_elems: Optional[Sequence[HFSet]] = None) -> Interpretation2:
    if a_elems is None:
        a_elems = [EMPTY, hfset.singleton(EMPTY), hfset.singleton(hfset.singleton(EMPTY))]
    a_set = HFSet(a_elems)
    true, u0 = hfset.singleton(EMPTY), set(_BOOL)
    eq_val = hfset.graph(
        {
            r: hfset.graph({s: (true if r == s else EMPTY) for s in a_elems})
            for r in a_elems
        }
    )
    rfl_val = hfset.graph({r: EMPTY for r in a_elems})
    phis = _phis(list(a_elems), _BOOL)
    sub_val = hfset.graph(
        {
            r: hfset.graph(
                {
                    s: (
                        hfset.graph(
                            {
                                EMPTY: hfset.graph(
                                    {
                                        hfset.graph(phi): hfset.graph(
                                            {u: u for u in phi[r]}
                                        )
                                        for phi in phis
                                    }
                                )
                            }
                        )
                        if r == s
                        else EMPTY
                    )
                    for s in a_elems
                }
            )
            for r in a_elems
        }
    )
    b = bundle_eq()
    consts = {
        b.constants["a"].index: a_set,
        b.constants["eq"].index: eq_val,
        b.constants["rfl"].index: rfl_val,
        b.constants["sub"].index: sub_val,
    }
    carriers = [u0, u0 | {HFSet(u0), a_set}, set()]
    return _close_carriers(carriers, consts, b.statements)


def verify_eq(i: Interpretation2) -> VerifyReport:
    b = bundle_eq()
    failures = _check_bundle(i, b, [])
    if failures:
        return VerifyReport(False, failures)
    a_val = eval2(i, b.constants["a"])
    eq_val = eval2(i, b.constants["eq"])
    for r in a_val:
        for s in a_val:
            nonempty = hfset.apply(hfset.apply(eq_val, r), s) != EMPTY
            if nonempty != (r == s):
                return VerifyReport(
                    False,
                    [
                        "completeness: eq "
                        f"{hfset.render(r)} {hfset.render(s)} should be "
                        f"{'inhabited' if r == s else 'empty'}"
                    ],
                )
    return VerifyReport(True)


def sub_reduction_eq_check(
    i: Interpretation2,
    r_term: Term,
    s_term: Term,
    var_pool: Sequence[HFSet] = (),
) -> tuple[bool, bool, bool]:
    """(R:a), (R |>= S)^c  =>  values equal, in an eq-satisfying model.

    Returns (hypotheses hold, contextual statements hold, values equal).
    """
    from .system2 import closures

    b = bundle_eq()
    eq = b.constants["eq"]
    a = b.constants["a"]
    typed = satisfies2(i, Statement2("typing", r_term, a), var_pool)
    host = App(App(eq, r_term), r_term)
    ctx = closures(
        [Statement2("subreduction", r_term, s_term)],
        ["contextual"],
        term_window=[host],
    )
    ctx_ok = all(satisfies2(i, s, var_pool) for s in ctx)
    equal = eval2(i, r_term) == eval2(i, s_term)
    return typed, ctx_ok, equal


# --- cartesian product -------------------------------------------------------


def bundle_product(n: int = 1, rec_sorts: Sequence[int] = (0,)) -> SpecBundle:
    consts, table = _consts(["a", "b", "pr", "mk", "rec"])
    a, b_, pr, mk, rec = (consts[k] for k in ("a", "b", "pr", "mk", "rec"))
    mk_type = mk_arrow2(1, 2, a, mk_arrow2(1, 2, b_, pr))
    stmts = [
        Statement2("typing", a, sort(n)),
        Statement2("typing", b_, sort(n)),
        Statement2("typing", pr, sort(n)),
        Statement2("typing", mk, mk_type),
    ]
    for l in rec_sorts:
        f_type = mk_arrow2(1, 1, pr, sort(l))
        body = mk_pi2(
            1,
            2,
            X,
            a,
            mk_pi2(
                1,
                2,
                Y,
                b_,
                App(Var(F_), App(App(mk, Var(X)), Var(Y))),
            ),
        )
        rec_type = mk_pi2(
            2,
            2,
            F_,
            f_type,
            mk_arrow2(
                2,
                2,
                body,
                mk_pi2(1, 2, Z_, pr, App(Var(F_), Var(Z_))),
            ),
        )
        stmts.append(Statement2("typing", rec, rec_type))
    redex = App(
        App(App(rec, Var(F_)), Var(G_)),
        App(App(mk, Var(X)), Var(Y)),
    )
    stmts.append(Statement2("reduction", redex, App(App(Var(G_), Var(X)), Var(Y))))
    return SpecBundle("product", table, stmts, consts)


def bundle_product_poly(
    m: int, n: int, rec_sorts: Optional[Sequence[int]] = None
) -> SpecBundle:
    """Polymorphic product statements over sort-typed set variables."""
    if rec_sorts is None:
        rec_sorts = sorted({0, m, n})
    consts, table = _consts(["pr", "mk", "rec"])
    pr, mk, rec = consts["pr"], consts["mk"], consts["rec"]
    top = max(m, n)
    pr_type = mk_pi2(
        m + 1, top + 2, V_, sort(m), mk_pi2(n + 1, top + 1, W_, sort(n), sort(top))
    )
    prvw = App(App(pr, Var(V_)), Var(W_))
    mk_type = mk_pi2(
        m + 1,
        top + 2,
        V_,
        sort(m),
        mk_pi2(
            n + 1,
            top + 2,
            W_,
            sort(n),
            mk_arrow2(m, top + 1, Var(V_), mk_arrow2(n, top, Var(W_), prvw)),
        ),
    )
    stmts = [
        Statement2("typing", pr, pr_type),
        Statement2("typing", mk, mk_type),
    ]
    for l in rec_sorts:
        f_type = mk_arrow2(top, l + 1, prvw, sort(l))
        applied = App(Var(F_), App(App(App(App(mk, Var(V_)), Var(W_)), Var(X)), Var(Y)))
        body = mk_pi2(m, l + 1, X, Var(V_), mk_pi2(n, l, Y, Var(W_), applied))
        rec_type = mk_pi2(
            m + 1,
            top + 2,
            V_,
            sort(m),
            mk_pi2(
                n + 1,
                top + 2,
                W_,
                sort(n),
                mk_pi2(
                    l + 1,
                    top + 2,
                    F_,
                    f_type,
                    mk_arrow2(
                        l + 1,
                        top + 1,
                        body,
                        mk_pi2(top, l, Z_, prvw, App(Var(F_), Var(Z_))),
                    ),
                ),
            ),
        )
        stmts.append(Statement2("typing", rec, rec_type))
        redex = App(
            App(App(App(App(rec, Var(V_)), Var(W_)), Var(F_)), Var(G_)),
            App(App(App(App(mk, Var(V_)), Var(W_)), Var(X)), Var(Y)),
        )
        stmts.append(
            Statement2("subreduction", redex, App(App(Var(G_), Var(X)), Var(Y)))
        )
    return SpecBundle("product-poly", table, stmts, consts)


def intended_model_product(
    a_elems: Optional[Sequence[HFSet]] = None,
    b_elems: Optional[Sequence[HFSet]] = None,
) -> Interpretation2:
    one = hfset.singleton(EMPTY)
    if a_elems is None:
        a_elems = [EMPTY, one]
    if b_elems is None:
        b_elems = [EMPTY, one, hfset.singleton(one)]
    a_set, b_set = HFSet(a_elems), HFSet(b_elems)
    pairs = {(r, s): hfset.pair(r, s) for r in a_elems for s in b_elems}
    pr_set = HFSet(pairs.values())
    mk_val = hfset.graph(
        {r: hfset.graph({s: pairs[(r, s)] for s in b_elems}) for r in a_elems}
    )
    # rec over u0-valued families: the only family with any theta is the
    # all-true one, whose unique theta maps every pair to the empty set.
    rec_entries: dict[HFSet, HFSet] = {}
    for phi in _phis(sorted(pr_set.elements), _BOOL):
        phi_graph = hfset.graph(phi)
        if all(phi[p] != EMPTY for p in pairs.values()):
            theta = hfset.graph(
                {
                    r: hfset.graph({s: EMPTY for s in b_elems})
                    for r in a_elems
                }
            )
            flat = hfset.graph({p: EMPTY for p in pairs.values()})
            rec_entries[phi_graph] = hfset.graph({theta: flat})
        else:
            rec_entries[phi_graph] = EMPTY
    rec_val = hfset.graph(rec_entries)
    b = bundle_product()
    consts = {
        b.constants["a"].index: a_set,
        b.constants["b"].index: b_set,
        b.constants["pr"].index: pr_set,
        b.constants["mk"].index: mk_val,
        b.constants["rec"].index: rec_val,
    }
    u0 = set(_BOOL)
    carriers = [u0, u0 | {HFSet(u0), a_set, b_set, pr_set}, set()]
    return _close_carriers(carriers, consts, b.statements)


def _product_var_pool(i: Interpretation2, b: SpecBundle) -> list[HFSet]:
    a_val = eval2(i, b.constants["a"])
    b_val = eval2(i, b.constants["b"])
    rec_val = eval2(i, b.constants["rec"])
    pool = list(a_val) + list(b_val)
    for phi_graph, inner in hfset.as_dict(rec_val).items():
        if inner != EMPTY:
            pool.append(phi_graph)
            pool.extend(hfset.as_dict(inner).keys())
    return pool


def verify_product(i: Interpretation2) -> VerifyReport:
    b = bundle_product()
    pool = _product_var_pool(i, b)
    failures = _check_bundle(i, b, pool)
    if failures:
        return VerifyReport(False, failures)
    a_val = eval2(i, b.constants["a"])
    b_val = eval2(i, b.constants["b"])
    pr_val = eval2(i, b.constants["pr"])
    mk_val = eval2(i, b.constants["mk"])
    images = {}
    for r in a_val:
        for s in b_val:
            t = hfset.apply(hfset.apply(mk_val, r), s)
            if t not in pr_val:
                return VerifyReport(False, ["mk lands outside the product carrier"])
            if t in images.values():
                return VerifyReport(False, ["mk is not injective"])
            images[(r, s)] = t
    if len(images) != len(pr_val):
        return VerifyReport(False, ["mk is not surjective onto the product carrier"])
    # rec applied to the all-true family and its unique theta gives
    # theta-uncurried on every pair
    rec_val = eval2(i, b.constants["rec"])
    true = hfset.singleton(EMPTY)
    phi = hfset.graph({t: true for t in pr_val})
    theta = hfset.graph(
        {r: hfset.graph({s: EMPTY for s in b_val}) for r in a_val}
    )
    uncurried = hfset.apply(hfset.apply(rec_val, phi), theta)
    for (r, s), t in images.items():
        expected = hfset.apply(hfset.apply(theta, r), s)
        if hfset.apply(uncurried, t) != expected:
            return VerifyReport(
                False, ["completeness: rec does not uncurry theta on every pair"]
            )
    return VerifyReport(True)


# --- logical and -------------------------------------------------------------


def bundle_and() -> SpecBundle:
    consts, table = _consts(["conj", "mk", "rec"])
    and_, mk, rec = consts["conj"], consts["mk"], consts["rec"]
    u0 = sort(0)
    andvw = App(App(and_, Var(V_)), Var(W_))
    and_type = mk_arrow2(1, 2, u0, mk_arrow2(1, 1, u0, u0))
    mk_type = mk_pi2(
        1,
        2,
        V_,
        u0,
        mk_pi2(
            1,
            2,
            W_,
            u0,
            mk_arrow2(0, 2, Var(V_), mk_arrow2(0, 0, Var(W_), andvw)),
        ),
    )
    applied = App(Var(F_), App(App(App(App(mk, Var(V_)), Var(W_)), Var(X)), Var(Y)))
    body = mk_pi2(0, 2, X, Var(V_), mk_pi2(0, 0, Y, Var(W_), applied))
    rec_type = mk_pi2(
        1,
        2,
        V_,
        u0,
        mk_pi2(
            1,
            2,
            W_,
            u0,
            mk_pi2(
                1,
                2,
                F_,
                mk_arrow2(0, 1, andvw, u0),
                mk_arrow2(1, 2, body, mk_pi2(0, 0, Z_, andvw, App(Var(F_), Var(Z_)))),
            ),
        ),
    )
    return SpecBundle(
        "and",
        table,
        [
            Statement2("typing", and_, and_type),
            Statement2("typing", mk, mk_type),
            Statement2("typing", rec, rec_type),
        ],
        consts,
    )


def intended_model_and() -> Interpretation2:
    true = hfset.singleton(EMPTY)
    u0 = list(_BOOL)
    and_val = hfset.graph(
        {
            p: hfset.graph(
                {q: (true if p != EMPTY and q != EMPTY else EMPTY) for q in u0}
            )
            for p in u0
        }
    )
    # mk v w x y = the sole proof; rec v w f g z = g's value at the
    # first components, which is forced to be constant on proofs
    mk_val = hfset.graph(
        {
            p: hfset.graph(
                {
                    q: hfset.graph(
                        {x: hfset.graph({y: EMPTY for y in q}) for x in p}
                    )
                    for q in u0
                }
            )
            for p in u0
        }
    )
    rec_val = hfset.graph(
        {
            p: hfset.graph({q: _and_rec_pq(p, q) for q in u0})
            for p in u0
        }
    )
    b = bundle_and()
    consts = {
        b.constants["conj"].index: and_val,
        b.constants["mk"].index: mk_val,
        b.constants["rec"].index: rec_val,
    }
    u0_set = set(_BOOL)
    carriers = [u0_set, u0_set | {HFSet(u0_set)}, set()]
    return _close_carriers(carriers, consts, b.statements)


def _and_rec_pq(p: HFSet, q: HFSet) -> HFSet:
    true = hfset.singleton(EMPTY)
    andpq = true if p != EMPTY and q != EMPTY else EMPTY
    f_entries = {}
    for f in _phis(sorted(andpq.elements), _BOOL):
        f_graph = hfset.graph(f)
        g_entries = {}
        for g_choice in _g_space(p, q, f):
            g_graph = g_choice
            value = _and_rec_value(p, q, f, g_choice)
            g_entries[g_graph] = value
        f_entries[f_graph] = hfset.graph(g_entries)
    return hfset.graph(f_entries)


def _g_space(p: HFSet, q: HFSet, f: dict[HFSet, HFSet]) -> list[HFSet]:
    # g in prod_{x in p} prod_{y in q} f(mk x y) with mk x y = 0
    target = f.get(EMPTY, EMPTY)
    gs = []
    per_x: list[list[HFSet]] = []
    for _x in p:
        options = []
        for combo in itertools.product(list(target) or [], repeat=len(q)):
            options.append(hfset.graph(dict(zip(sorted(q.elements), combo))))
        if len(q) == 0:
            options = [EMPTY]
        per_x.append(options)
    if len(p) == 0:
        return [EMPTY]
    for combo in itertools.product(*per_x):
        gs.append(hfset.graph(dict(zip(sorted(p.elements), combo))))
    return gs


def _and_rec_value(p: HFSet, q: HFSet, f: dict[HFSet, HFSet], g: HFSet) -> HFSet:
    # z ranges over and(p)(q) = {0} when both inhabited; value g x0 y0
    if p == EMPTY or q == EMPTY:
        return EMPTY
    x0 = min(p.elements)
    y0 = min(q.elements)
    val = hfset.apply(hfset.apply(g, x0), y0)
    return hfset.graph({EMPTY: val})


def verify_and(i: Interpretation2) -> VerifyReport:
    b = bundle_and()
    pool = list(_BOOL)
    failures = _check_bundle(i, b, pool)
    if failures:
        return VerifyReport(False, failures)
    and_val = eval2(i, b.constants["conj"])
    for p in _BOOL:
        for q in _BOOL:
            nonempty = hfset.apply(hfset.apply(and_val, p), q) != EMPTY
            if nonempty != (p != EMPTY and q != EMPTY):
                return VerifyReport(
                    False,
                    [
                        f"completeness: and({hfset.render(p)})({hfset.render(q)}) "
                        "has the wrong truth value"
                    ],
                )
    return VerifyReport(True)


# --- universal quantifier ----------------------------------------------------


def bundle_forall(n: int = 1) -> SpecBundle:
    consts, table = _consts(["a", "all", "mk", "rec"])
    a, all_, mk, rec = (consts[k] for k in ("a", "all", "mk", "rec"))
    u0 = sort(0)
    q_type = mk_arrow2(1, 1, a, u0)  # a -> u0
    paq = App(App(operator(1, 0), a), Var(Q_))  # p a q
    allq = App(all_, Var(Q_))
    all_type = mk_arrow2(2, 1, q_type, u0)
    mk_type = mk_pi2(
        2,
        2,
        Q_,
        q_type,
        mk_arrow2(1, 0, paq, allq),
    )
    rec_type = mk_pi2(
        2,
        2,
        Q_,
        q_type,
        mk_pi2(
            1,
            2,
            F_,
            mk_arrow2(0, 1, allq, u0),
            mk_arrow2(
                1,
                2,
                mk_pi2(1, 0, G_, paq, App(Var(F_), App(App(mk, Var(Q_)), Var(G_)))),
                mk_pi2(0, 0, Z_, allq, App(Var(F_), Var(Z_))),
            ),
        ),
    )
    return SpecBundle(
        "forall",
        table,
        [
            Statement2("typing", a, sort(n)),
            Statement2("typing", all_, all_type),
            Statement2("typing", mk, mk_type),
            Statement2("typing", rec, rec_type),
        ],
        consts,
    )


def intended_model_forall(a_elems: Optional[Sequence[HFSet]] = None) -> Interpretation2:
    true = hfset.singleton(EMPTY)
    if a_elems is None:
        a_elems = [EMPTY, true]
    a_set = HFSet(a_elems)
    thetas = [hfset.graph(t) for t in _phis(list(a_elems), _BOOL)]
    all_val = hfset.graph(
        {
            th: (true if hfset.dep_product(th) != EMPTY else EMPTY)
            for th in thetas
        }
    )
    mk_val = hfset.graph(
        {
            th: hfset.graph({g: EMPTY for g in hfset.dep_product(th)})
            for th in thetas
        }
    )
    rec_val = hfset.graph({th: _forall_rec(th) for th in thetas})
    b = bundle_forall()
    consts = {
        b.constants["a"].index: a_set,
        b.constants["all"].index: all_val,
        b.constants["mk"].index: mk_val,
        b.constants["rec"].index: rec_val,
    }
    u0 = set(_BOOL)
    carriers = [u0, u0 | {HFSet(u0), a_set}, set()]
    return _close_carriers(carriers, consts, b.statements)


def _forall_rec(theta: HFSet) -> HFSet:
    true = hfset.singleton(EMPTY)
    prod = hfset.dep_product(theta)
    alltheta = true if prod != EMPTY else EMPTY
    f_entries = {}
    for f in _phis(sorted(alltheta.elements), _BOOL):
        f_graph = hfset.graph(f)
        target = f.get(EMPTY, EMPTY)
        h_entries = {}
        for combo in itertools.product(sorted(target.elements) or [], repeat=len(prod)):
            h = hfset.graph(dict(zip(sorted(prod.elements), combo)))
            if prod == EMPTY:
                h = EMPTY
            val = (
                hfset.graph({EMPTY: hfset.apply(h, min(prod.elements))})
                if prod != EMPTY
                else EMPTY
            )
            h_entries[h] = val
        if prod == EMPTY:
            h_entries[EMPTY] = EMPTY
        f_entries[f_graph] = hfset.graph(h_entries)
    return hfset.graph(f_entries)


def verify_forall(i: Interpretation2) -> VerifyReport:
    b = bundle_forall()
    a_val = eval2(i, b.constants["a"])
    thetas = [hfset.graph(t) for t in _phis(sorted(a_val.elements), _BOOL)]
    pool = list(thetas)
    failures = _check_bundle(i, b, pool)
    if failures:
        return VerifyReport(False, failures)
    all_val = eval2(i, b.constants["all"])
    for th in thetas:
        nonempty = hfset.apply(all_val, th) != EMPTY
        expected = hfset.dep_product(th) != EMPTY
        if nonempty != expected:
            return VerifyReport(
                False, ["completeness: forall has the wrong truth value at a family"]
            )
    return VerifyReport(True)


# --- first-system axiom bundles ----------------------------------------------


def part1_eq_axioms(
    r_term: Term, star: Const, eq_c: Const, sub_c: Const
) -> frozenset[Statement1]:
    """(eq : R->R->*) and the substitution axiom for it."""
    t, u, p = X, Y, P_
    eq_type = mk_arrow(r_term, mk_arrow(r_term, star))
    p_type = mk_arrow(r_term, star)
    sub_type = mk_pi(
        t,
        r_term,
        mk_pi(
            u,
            r_term,
            mk_arrow(
                App(App(eq_c, Var(t)), Var(u)),
                mk_pi(
                    p,
                    p_type,
                    mk_arrow(App(Var(p), Var(t)), App(Var(p), Var(u))),
                ),
            ),
        ),
    )
    return frozenset(
        [Statement1.of(eq_c, eq_type), Statement1.of(sub_c, sub_type)]
    )


def _arrow_avoiding(r: Term, s: Term, avoid: frozenset[int]) -> Term:
    x = least_var_outside(free_vars(s) | avoid)
    return mk_pi(x, r, s)


def part1_beta_axiom(
    r_term: Term, s_term: Term, x: int, beta_c: Const
) -> Statement1:
    """(beta : (x:R) -> (lam x R S) x -> S); x must not be free in R."""
    if x in free_vars(r_term):
        raise ValueError("the bound variable must not be free in the domain")
    inner = _arrow_avoiding(
        App(Lam(x, r_term, s_term), Var(x)), s_term, frozenset({x})
    )
    return Statement1.of(beta_c, mk_pi(x, r_term, inner))


def poly_eq_axiom(box: Const, star: Const, eq_c: Const, r: int = X) -> Statement1:
    """(eq : (r:box) -> r -> r -> *)."""
    return Statement1.of(
        eq_c, mk_pi(r, box, mk_arrow(Var(r), mk_arrow(Var(r), star)))
    )


def poly_beta_axiom(
    s_term: Term, box: Const, beta_c: Const, r: int, x: int
) -> Statement1:
    """(beta : (r:box) -> (x:r) -> (lam x r S) x -> S)."""
    inner = _arrow_avoiding(
        App(Lam(x, Var(r), s_term), Var(x)), s_term, frozenset({x, r})
    )
    return Statement1.of(beta_c, mk_pi(r, box, mk_pi(x, Var(r), inner)))


def double_beta_axiom(box: Const, beta_c: Const, s: int, r: int, x: int) -> Statement1:
    """The naive fully polymorphic beta axiom; a negative fixture.

    Applying it to a subject with the bound variable free changes that
    variable, so it does not give the intended predicate.
    """
    inner = _arrow_avoiding(
        App(Lam(x, Var(r), Var(s)), Var(x)), Var(s), frozenset({x, r, s})
    )
    return Statement1.of(
        beta_c, mk_pi(s, box, mk_pi(r, box, mk_pi(x, Var(r), inner)))
    )


# --- choice / excluded middle ------------------------------------------------


def choice_term(star: Const = Const(0), box: Const = Const(1)) -> Term:
    """(x:box) -> neg neg x -> x, with negation through the star bottom."""
    from .syntax import SugarConstants

    sugar = SugarConstants(star)
    x = least_var_outside(frozenset())
    return mk_pi(x, box, mk_arrow(sugar.neg(sugar.neg(Var(x))), Var(x)))


def choice_term_enumerate(box_value: HFSet) -> list[HFSet]:
    """Members of the choice/excluded-middle type over a finite universe.

    Each member is checked to choose elements: its value at a nonempty
    r, applied to the empty set, lies in r.
    """
    from .semantics1 import eval_term

    star_val = HFSet(_BOOL)
    a = Assignment.make({0: star_val, 1: box_value})
    value = eval_term(a, choice_term())
    members = sorted(value.elements)
    for phi in members:
        for r in box_value:
            got = hfset.apply(phi, r)
            if r == EMPTY:
                if got != EMPTY:
                    raise AssertionError("member does not vanish at the empty set")
            else:
                if hfset.apply(got, EMPTY) not in r:
                    raise AssertionError("member fails to choose an element")
    return members
