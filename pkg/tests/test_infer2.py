"""Derivation checking, search, files, presets, and context legality."""

import pytest

from conftest import model_fleet
from corpus2 import ARROW, build_corpus, rules_used

from depsets.infer2 import (
    BudgetExhausted,
    Derivation,
    Frame,
    Gamma2,
    Step,
    check_derivation,
    check_step,
    is_legal_context,
    parse_derivation,
    preset_allows,
    render_derivation,
    search_derivation,
)
from depsets.sugar import AtomTable
from depsets.syntax import App, Const, Lam, Var, mk_pi2, sort, user_const
from depsets.system2 import Statement2, satisfies2

A, B, b = user_const(1), user_const(2), user_const(3)
T_BA = Statement2("typing", b, A)


def test_corpus_checks_and_covers_all_rules():
    entries = build_corpus()
    assert len(entries) >= 10
    covered = set()
    for e in entries:
        result = check_derivation(Gamma2.of(e.gamma), e.derivation)
        assert result.valid, (e.name, result.diagnostics)
        assert result.root == e.derivation.root()
        covered |= rules_used(e.derivation)
    assert covered == {"Hyp", "RedSubject", "RedPredicate", "App", "Ab", "Cut"}


def test_corpus_conclusions_satisfied_by_models_of_hypotheses():
    fleet = model_fleet(11, 20)
    for e in build_corpus():
        models = [e.model] + fleet
        satisfying = 0
        for i in models:
            if all(satisfies2(i, s, e.var_pool) for s in e.gamma):
                satisfying += 1
                assert satisfies2(i, e.derivation.root(), e.var_pool), e.name
        assert satisfying >= 1, e.name


def test_check_step_rejections():
    gamma = Gamma2.of([T_BA])
    # dangling premise
    d = Derivation(steps=[Step(T_BA, "Hyp", (3,), 0)])
    ok, msg = check_step(gamma, d, 0)
    assert not ok and "dangling" in msg
    # not a hypothesis
    d = Derivation(steps=[Step(Statement2("typing", b, B), "Hyp", (), 0)])
    assert not check_step(gamma, d, 0)[0]
    # unknown rule
    d = Derivation(steps=[Step(T_BA, "Guess", (), 0)])
    assert not check_step(gamma, d, 0)[0]
    # empty derivation is invalid
    assert not check_derivation(gamma, Derivation(steps=[])).valid


def test_ab_freshness_guard():
    # the bound variable occurs in the hypotheses: Ab must refuse it
    gamma = Gamma2.of([Statement2("typing", A, sort(0)), Statement2("typing", Var(0), A)])
    goal = Statement2("typing", Lam(0, A, Var(0)), mk_pi2(0, 0, 0, A, A))
    assert search_derivation(gamma, goal, 3) is None
    # renaming the binder away from the hypotheses succeeds
    goal2 = Statement2("typing", Lam(1, A, Var(1)), mk_pi2(0, 0, 1, A, A))
    assert search_derivation(gamma, goal2, 3) is not None


def test_ab_child_frame_shape_enforced():
    gamma = Gamma2.of([Statement2("typing", A, sort(0))])
    goal = Statement2("typing", Lam(0, A, Var(0)), mk_pi2(0, 0, 0, A, A))
    d = search_derivation(gamma, goal, 3)
    assert d is not None
    ab_index = next(i for i, s in enumerate(d.steps) if s.rule == "Ab")
    broken = Derivation(steps=list(d.steps), frames=dict(d.frames))
    child = d.steps[ab_index].datum("child_frame")
    broken.frames[child] = Frame(0, (Statement2("typing", Var(0), B),))
    assert not check_derivation(gamma, broken).valid


def test_root_must_be_outermost():
    gamma = Gamma2.of([T_BA])
    d = Derivation(
        steps=[Step(T_BA, "Hyp", (), 1)],
        frames={0: Frame(None, ()), 1: Frame(0, ())},
    )
    assert not check_derivation(gamma, d).valid


def test_search_check_coherence(rng):
    # every found derivation passes the checker
    for e in build_corpus():
        d = search_derivation(Gamma2.of(e.gamma), e.derivation.root(), 4)
        if d is not None:
            assert check_derivation(Gamma2.of(e.gamma), d).valid, e.name


def test_search_budget_exhaustion():
    gamma = Gamma2.of([Statement2("typing", A, sort(0)), T_BA])
    goal = Statement2("typing", Lam(0, A, b), mk_pi2(0, 0, 0, A, A))
    with pytest.raises(BudgetExhausted):
        search_derivation(gamma, goal, 4, budget=2)


def test_search_not_found_is_none():
    gamma = Gamma2.of([T_BA])
    assert search_derivation(gamma, Statement2("typing", b, B), 3) is None


def test_derivation_file_roundtrip():
    table = AtomTable()
    table.bind("A", A)
    table.bind("b", b)
    for e in build_corpus():
        text = render_derivation(e.derivation, table)
        back = parse_derivation(text, table)
        assert back.steps == e.derivation.steps, e.name
        assert back.frames == e.derivation.frames, e.name
        assert check_derivation(Gamma2.of(e.gamma), back).valid


def test_derivation_file_comments_and_errors():
    text = "# leading comment\nstep Hyp [] frame 0 :: c3 : c1  # trailing\n"
    d = parse_derivation(text)
    assert d.steps == [Step(T_BA, "Hyp", (), 0)]
    with pytest.raises(ValueError):
        parse_derivation("nonsense line\n")


def test_preset_allows():
    alpha = Statement2("reduction", Lam(0, A, Var(0)), Lam(1, A, Var(1)))
    beta = Statement2("subreduction", App(Lam(0, A, Var(0)), b), b)
    wild_red = Statement2("reduction", b, A)
    wild_sub = Statement2("subreduction", b, A)
    assert preset_allows("pure", alpha)
    assert preset_allows("pure", beta)
    assert not preset_allows("pure", wild_red)
    assert not preset_allows("pure", wild_sub)
    assert not preset_allows("lean-like", wild_red)
    assert preset_allows("lean-like", wild_sub)
    assert preset_allows("extensional", wild_red)
    assert preset_allows("pure", T_BA)  # typing statements always pass
    with pytest.raises(ValueError):
        preset_allows("bogus", wild_red)


def test_legal_context_positive():
    gamma = Gamma2.of(
        [Statement2("typing", Var(0), A), Statement2("typing", A, sort(0))]
    )
    verdict = is_legal_context(gamma, depth=3)
    assert verdict.legal
    assert verdict.trailer() == "LEGAL"
    assert is_legal_context(Gamma2.of([])).legal


def test_legal_context_negative_circular():
    gamma = Gamma2.of(
        [
            Statement2("typing", Var(0), App(A, Var(1))),
            Statement2("typing", Var(1), App(A, Var(0))),
        ]
    )
    verdict = is_legal_context(gamma, depth=2)
    assert not verdict.legal
    assert verdict.trailer() == "NOT-SHOWN-LEGAL"


def test_legal_context_rejects_compound_subject():
    gamma = Gamma2.of([Statement2("typing", App(A, b), sort(0))])
    assert not is_legal_context(gamma, depth=2).legal
