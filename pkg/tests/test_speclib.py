"""Specification bundles: verifiers, mutation rejection, axiom helpers."""

import pytest

from conftest import BOOL

from depsets import hfset
from depsets.hfset import EMPTY, HFSet, singleton
from depsets.semantics1 import Assignment, Statement1, check_consequence, eval_term
from depsets.speclib import (
    bundle_and,
    bundle_eq,
    bundle_false,
    bundle_forall,
    bundle_product,
    bundle_product_poly,
    choice_term,
    choice_term_enumerate,
    double_beta_axiom,
    intended_model_and,
    intended_model_eq,
    intended_model_false,
    intended_model_forall,
    intended_model_product,
    member_of_type,
    part1_beta_axiom,
    part1_eq_axioms,
    poly_beta_axiom,
    poly_eq_axiom,
    sub_reduction_eq_check,
    verify_and,
    verify_eq,
    verify_false,
    verify_forall,
    verify_product,
)
from depsets.sugar import read_statements
from depsets.syntax import App, Const, Lam, Rho, Var, sort, user_const
from depsets.system2 import Interpretation2, Statement2, eval2, satisfies2

ONE = singleton(EMPTY)
TWO = HFSet(BOOL)


def _mutate_const(i, index, value):
    consts = dict(i.assignment.consts)
    consts[index] = value
    return Interpretation2(
        Assignment(tuple(sorted(consts.items())), i.assignment.vars),
        i.carriers,
        i.size_guard,
    )


def test_verify_false():
    assert verify_false(intended_model_false()).ok
    # a nonempty bottom is rejected
    i = intended_model_false()
    assert not verify_false(_mutate_const(i, bundle_false().constants["ff"].index, ONE)).ok


def test_verify_eq():
    i = intended_model_eq()
    assert len(eval2(i, bundle_eq().constants["a"])) == 3
    assert verify_eq(i).ok
    # flip one value of eq: reflexivity at one point becomes false
    b = bundle_eq()
    eq_val = eval2(i, b.constants["eq"])
    broken = hfset.as_dict(eq_val)
    first = sorted(broken)[0]
    inner = hfset.as_dict(broken[first])
    inner[first] = EMPTY if inner[first] != EMPTY else ONE
    broken[first] = hfset.graph(inner)
    assert not verify_eq(_mutate_const(i, b.constants["eq"].index, hfset.graph(broken))).ok


def test_verify_product():
    i = intended_model_product()
    b = bundle_product()
    assert len(eval2(i, b.constants["a"])) == 2
    assert len(eval2(i, b.constants["b"])) == 3
    assert len(eval2(i, b.constants["pr"])) == 6
    assert verify_product(i).ok
    # adding a non-pair garbage member breaks the mk bijection
    junk = HFSet((EMPTY, singleton(ONE)))
    assert hfset.unpair(junk) is None
    bigger = HFSet(set(eval2(i, b.constants["pr"]).elements) | {junk})
    assert not verify_product(_mutate_const(i, b.constants["pr"].index, bigger)).ok


def test_verify_and():
    i = intended_model_and()
    assert verify_and(i).ok
    b = bundle_and()
    and_val = eval2(i, b.constants["conj"])
    broken = hfset.as_dict(and_val)
    broken[ONE] = hfset.graph({EMPTY: ONE, ONE: ONE})  # and(1)(0) = 1 is wrong
    assert not verify_and(_mutate_const(i, b.constants["conj"].index, hfset.graph(broken))).ok


def test_verify_forall():
    i = intended_model_forall()
    b = bundle_forall()
    assert len(eval2(i, b.constants["a"])) == 2
    assert verify_forall(i).ok
    all_val = hfset.as_dict(eval2(i, b.constants["all"]))
    flipped = {k: (EMPTY if v != EMPTY else ONE) for k, v in all_val.items()}
    assert not verify_forall(
        _mutate_const(i, b.constants["all"].index, hfset.graph(flipped))
    ).ok


def test_member_of_type_matches_eval_on_small_products():
    i = intended_model_false()
    t = bundle_false().statements[1].right  # the ab type
    value = eval2(i, bundle_false().constants["ab"])
    assert member_of_type(i, value, t)
    # on non-product types it is literal membership
    assert member_of_type(i, EMPTY, sort(0))
    assert not member_of_type(i, TWO, sort(0))


def test_bundle_export_reparses():
    for build in (bundle_false, bundle_eq, bundle_product, bundle_and, bundle_forall):
        bundle = build()
        text = "\n".join(bundle.export_lines())
        table, triples = read_statements(text, system=2)
        got = [Statement2(k, l, r) for k, l, r in triples]
        assert got == bundle.statements, bundle.name
        assert set(table.entries) == set(bundle.constants)


def test_bundle_product_poly_shapes():
    bundle = bundle_product_poly(0, 1)
    kinds = [s.kind for s in bundle.statements]
    assert kinds.count("typing") >= 2
    assert "subreduction" in kinds


def test_sub_reduction_eq_forces_equal_values():
    i = intended_model_eq()
    b = bundle_eq()
    a_val = eval2(i, b.constants["a"])
    elems = sorted(a_val.elements)
    # R and S with equal values: everything holds
    r = user_const(10)
    s = user_const(11)
    j = _mutate_const(_mutate_const(i, r.index, elems[0]), s.index, elems[0])
    typed, ctx_ok, equal = sub_reduction_eq_check(j, r, s)
    assert typed and ctx_ok and equal
    # distinct values: the contextual statements must fail
    j = _mutate_const(_mutate_const(i, r.index, elems[0]), s.index, elems[1])
    typed, ctx_ok, equal = sub_reduction_eq_check(j, r, s)
    assert typed and not equal
    assert not ctx_ok


def test_part1_eq_axioms_consequence():
    star, eq_c, sub_c, r_c = Const(0), Const(3), Const(4), Const(1)
    gamma = sorted(part1_eq_axioms(r_c, star, eq_c, sub_c), key=repr)
    stmt = Statement1.of(Var(0), App(App(eq_c, Var(1)), Var(1)))
    # (rfl-shaped hypothesis): models of the axioms satisfy typability shapes
    pool = hfset.enumerate_pool(2)
    verdict = check_consequence(
        pool, [0, 1, 3, 4], [0, 1],
        gamma + [stmt],
        stmt,
        "rank2",
    )
    assert verdict.holds


def test_part1_beta_axiom_shape():
    r_c, s_c, beta_c = Const(1), Const(2), Const(5)
    stmt = part1_beta_axiom(r_c, App(s_c, Var(0)), 0, beta_c)
    assert stmt.subject.rep == beta_c
    match stmt.predicate.rep:
        case Rho(Lam(0, dom, _)):
            assert dom == r_c
        case other:
            raise AssertionError(other)
    with pytest.raises(ValueError):
        part1_beta_axiom(Var(0), s_c, 0, beta_c)


def test_poly_axioms_shapes():
    box, star = Const(1), Const(0)
    eq_stmt = poly_eq_axiom(box, star, Const(6))
    assert eq_stmt.subject.rep == Const(6)
    match eq_stmt.predicate.rep:
        case Rho(Lam(_, dom, _)):
            assert dom == box
        case other:
            raise AssertionError(other)
    beta_stmt = poly_beta_axiom(Var(3), box, Const(7), 3, 4)
    assert beta_stmt.subject.rep == Const(7)


def test_double_beta_axiom_is_marked_negative():
    stmt = double_beta_axiom(Const(1), Const(5), 2, 3, 4)
    assert stmt.predicate.rep is not None
    assert "negative fixture" in double_beta_axiom.__doc__


def test_choice_counts():
    two = TWO
    three = HFSet((EMPTY, ONE, TWO))
    assert len(choice_term_enumerate(two)) == 1
    assert len(choice_term_enumerate(three)) == 2


def test_choice_members_choose():
    # choice_term_enumerate raises if any member fails phi(r)(0) in r
    members = choice_term_enumerate(HFSet((EMPTY, ONE, TWO)))
    for phi in members:
        for r in (ONE, TWO):
            assert hfset.apply(hfset.apply(phi, r), EMPTY) in r


def test_choice_term_shape():
    t = choice_term()
    star_val = TWO
    a = Assignment.make({0: star_val, 1: TWO})
    value = eval_term(a, t)
    assert len(value) == 1
