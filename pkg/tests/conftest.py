"""Shared fixtures: random term generators, exhaustive enumerators, and
randomized model fleets."""

from __future__ import annotations

import itertools
import random

import pytest

from depsets import hfset
from depsets.hfset import EMPTY, HFSet
from depsets.semantics1 import Assignment
from depsets.syntax import App, Const, Lam, Rho, Term, Var
from depsets.system2 import Interpretation2

BOOL = (EMPTY, hfset.singleton(EMPTY))


@pytest.fixture
def rng():
    return random.Random(20260824)


# --- random terms ------------------------------------------------------------


def random_term1(rng, size, consts=(0, 1), vars_=(0, 1, 2)):
    """A random first-system term with at most `size` nodes."""
    if size <= 1:
        if rng.random() < 0.5:
            return Const(rng.choice(consts))
        return Var(rng.choice(vars_))
    roll = rng.random()
    if roll < 0.15 or size < 3:
        return Rho(random_term1(rng, size - 1, consts, vars_))
    if roll < 0.55:
        left = rng.randrange(1, size - 1)
        return App(
            random_term1(rng, left, consts, vars_),
            random_term1(rng, size - 1 - left, consts, vars_),
        )
    if roll < 0.85:
        left = rng.randrange(1, size - 1)
        return Lam(
            rng.choice(vars_),
            random_term1(rng, left, consts, vars_),
            random_term1(rng, size - 1 - left, consts, vars_),
        )
    return random_term1(rng, size - 1, consts, vars_)


def random_term2(rng, size, consts=(Const(0), Const(4)), vars_=(0, 1, 2)):
    """A random second-system term (no rho nodes, no bare operators)."""
    if size <= 1:
        roll = rng.random()
        if roll < 0.4:
            return rng.choice(consts)
        if roll < 0.5:
            return Const(2 * rng.randrange(2) + 1)  # a sort
        return Var(rng.choice(vars_))
    roll = rng.random()
    if size < 3:
        return random_term2(rng, 1, consts, vars_)
    if roll < 0.5:
        left = rng.randrange(1, size - 1) if size > 2 else 1
        return App(
            random_term2(rng, left, consts, vars_),
            random_term2(rng, size - 1 - left, consts, vars_),
        )
    if roll < 0.9:
        left = rng.randrange(1, size - 1) if size > 2 else 1
        return Lam(
            rng.choice(vars_),
            random_term2(rng, left, consts, vars_),
            random_term2(rng, size - 1 - left, consts, vars_),
        )
    return random_term2(rng, size - 1, consts, vars_)


# --- exhaustive enumeration by raw string length -----------------------------


def terms_of_length(n, system=1, max_primes=2):
    """All terms whose raw string form has exactly n letters.

    Variable and constant indices are capped at max_primes, which keeps
    the atom alphabet finite without losing shape coverage.
    """
    return list(_terms_len(n, system, max_primes, {}))


def _terms_len(n, system, max_primes, memo):
    key = (n, system)
    got = memo.get(key)
    if got is not None:
        return got
    out = []
    if n >= 1:
        for k in range(min(n - 1, max_primes) + 1):
            if k + 1 == n:
                out.append(Const(k))
                out.append(Var(k))
    if system == 1 and n >= 2:
        out.extend(Rho(b) for b in _terms_len(n - 1, system, max_primes, memo))
    if n >= 3:
        for i in range(1, n - 1):
            for f in _terms_len(i, system, max_primes, memo):
                for a in _terms_len(n - 1 - i, system, max_primes, memo):
                    out.append(App(f, a))
    if n >= 4:
        for p in range(min(n - 3, max_primes + 1)):
            x = p  # binder v with p primes occupies p + 1 letters
            rest = n - 2 - p
            for i in range(1, rest):
                for d in _terms_len(i, system, max_primes, memo):
                    for b in _terms_len(rest - i, system, max_primes, memo):
                        out.append(Lam(x, d, b))
    memo[key] = out
    return out


def terms_up_to(n, system=1, max_primes=2):
    out = []
    for k in range(1, n + 1):
        out.extend(terms_of_length(k, system, max_primes))
    return out


# --- randomized second-system model fleets -----------------------------------


def random_interpretation(rng, size_guard=10**5) -> Interpretation2:
    """Small random carrier tower with random atom values."""
    rank2 = hfset.enumerate_pool(2)
    u0 = set(BOOL) | {rng.choice(rank2) for _ in range(rng.randrange(3))}
    u1 = set(u0) | {HFSet(u0)} | {rng.choice(rank2) for _ in range(rng.randrange(3))}
    values = sorted(u1) + [EMPTY]
    consts = {0: rng.choice(values), 4: rng.choice(values)}
    vars_ = {i: rng.choice(values) for i in range(3)}
    return Interpretation2(
        Assignment.make(consts, vars_), (HFSet(u0), HFSet(u1)), size_guard
    )


def model_fleet(seed, count):
    r = random.Random(seed)
    return [random_interpretation(r) for _ in range(count)]


# --- acceptance criterion verdict lines ---------------------------------------


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion, uncaptured."""
    verdicts = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_criterion_" not in nodeid or rep.when != "call":
                continue
            num = int(nodeid.split("test_criterion_")[1].split("_")[0])
            verdicts[num] = "PASS" if rep.passed else "FAIL"
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for num in sorted(verdicts):
            terminalreporter.write_line(f"criterion {num}: {verdicts[num]}")
