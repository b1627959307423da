"""Checkable derivations for the second system.

The inference relation is the smallest sequent closed under the two
reduction rules, application and abstraction; a derivation reifies it
as a DAG of steps, each carrying its rule, premise indices and a scope
frame.  Frames track hypothesis extensions: abstraction premises live
in a child frame extended by the bound variable's typing statement, and
cut premises live in a child frame extended by an intermediate
hypothesis set whose members are themselves concluded in the parent.

Statements here are raw term pairs, not alpha-classes; rules match
syntactically, and alpha-steps must be supplied as explicit reduction
hypotheses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .binding import free_vars
from .hfset import ResourceError
from .syntax import App, Const, Lam, Term, Var, decode_operator, decode_sort, operator, sort, subterms
from .system2 import Statement2

__all__ = [
    "Step",
    "Derivation",
    "Gamma2",
    "CheckResult",
    "BudgetExhausted",
    "check_step",
    "check_derivation",
    "search_derivation",
    "is_legal_context",
    "PRESETS",
    "preset_allows",
    "render_derivation",
    "parse_derivation",
]

RULES = ("Hyp", "RedSubject", "RedPredicate", "App", "Ab", "Cut")

# Restriction presets for reduction/sub-reduction hypotheses:
#   pure        — alpha steps as reductions; alpha and beta as sub-reductions
#   lean-like   — additionally allows library-generated sub-reduction closures
#   extensional — any statements
PRESETS = ("pure", "lean-like", "extensional")


@dataclass(frozen=True)
class Step:
    conclusion: Statement2
    rule: str
    premises: tuple[int, ...] = ()
    frame: int = 0
    data: tuple[tuple[str, object], ...] = ()

    def datum(self, key: str):
        return dict(self.data).get(key)


@dataclass(frozen=True)
class Frame:
    parent: Optional[int]
    extra: tuple[Statement2, ...]


@dataclass
class Derivation:
    steps: list[Step]
    frames: dict[int, Frame] = field(default_factory=lambda: {0: Frame(None, ())})

    def root(self) -> Statement2:
        return self.steps[-1].conclusion


@dataclass
class Gamma2:
    """A hypothesis set partitioned by statement kind."""

    statements: frozenset[Statement2]

    @staticmethod
    def of(stmts: Iterable[Statement2]) -> "Gamma2":
        return Gamma2(frozenset(stmts))

    @property
    def typing(self) -> frozenset[Statement2]:
        return frozenset(s for s in self.statements if s.kind == "typing")

    @property
    def reductions(self) -> frozenset[Statement2]:
        return frozenset(s for s in self.statements if s.kind == "reduction")

    @property
    def subreductions(self) -> frozenset[Statement2]:
        return frozenset(s for s in self.statements if s.kind == "subreduction")

    def free_vars(self) -> frozenset[int]:
        # only typing statements contribute free variables
        out: set[int] = set()
        for s in self.typing:
            out |= free_vars(s.left) | free_vars(s.right)
        return frozenset(out)


@dataclass
class CheckResult:
    valid: bool
    root: Optional[Statement2] = None
    diagnostics: list[str] = field(default_factory=list)

    def trailer(self) -> str:
        return "VALID" if self.valid else "INVALID"


def _frame_hypotheses(gamma: Gamma2, d: Derivation, frame: int) -> Gamma2:
    stmts = set(gamma.statements)
    f: Optional[int] = frame
    while f is not None:
        fr = d.frames.get(f)
        if fr is None:
            raise ValueError(f"unknown frame {f}")
        stmts.update(fr.extra)
        f = fr.parent
    return Gamma2.of(stmts)


def _is_ancestor(d: Derivation, candidate: int, frame: int) -> bool:
    f: Optional[int] = frame
    while f is not None:
        if f == candidate:
            return True
        fr = d.frames.get(f)
        f = fr.parent if fr else None
    return False


def _pi2_parts(p: Term) -> Optional[tuple[int, int, Term, int, Term]]:
    """Split p_m^n Q (lam x Q P) into (m, n, Q, x, P)."""
    match p:
        case App(App(Const(k), q), Lam(x, q2, body)):
            mn = decode_operator(k)
            if mn is not None and q == q2:
                return (mn[0], mn[1], q, x, body)
    return None


def check_step(gamma: Gamma2, d: Derivation, i: int) -> tuple[bool, str]:
    """Validate step i; returns (ok, diagnostic)."""
    step = d.steps[i]
    if step.rule not in RULES:
        return False, f"step {i}: unknown rule {step.rule!r}"
    for p in step.premises:
        if not (0 <= p < i):
            return False, f"step {i}: dangling premise {p}"
    hyps = _frame_hypotheses(gamma, d, step.frame)
    concl = step.conclusion

    def premise_ok(p: int, same_frame_only: bool = False) -> bool:
        pf = d.steps[p].frame
        if same_frame_only:
            return pf == step.frame
        return _is_ancestor(d, pf, step.frame)

    if step.rule == "Hyp":
        if concl in hyps.statements:
            return True, ""
        return False, f"step {i}: {concl.render()} is not a hypothesis in scope"

    if step.rule in ("RedSubject", "RedPredicate"):
        if len(step.premises) != 2:
            return False, f"step {i}: {step.rule} takes two premises"
        a, b = (d.steps[p].conclusion for p in step.premises)
        if not all(premise_ok(p) for p in step.premises):
            return False, f"step {i}: premise outside the step's scope"
        if step.rule == "RedSubject":
            # (R:P), (R |> S)  =>  (S:P)
            if (
                a.kind == "typing"
                and b.kind == "reduction"
                and a.left == b.left
                and concl == Statement2("typing", b.right, a.right)
            ):
                return True, ""
            return False, f"step {i}: premises do not match (R:P),(R |> S) => (S:P)"
        # (S:R), (R |>= P)  =>  (S:P)
        if (
            a.kind == "typing"
            and b.kind == "subreduction"
            and a.right == b.left
            and concl == Statement2("typing", a.left, b.right)
        ):
            return True, ""
        return False, f"step {i}: premises do not match (S:R),(R |>= P) => (S:P)"

    if step.rule == "App":
        if len(step.premises) != 2:
            return False, f"step {i}: App takes two premises"
        if not all(premise_ok(p) for p in step.premises):
            return False, f"step {i}: premise outside the step's scope"
        a, b = (d.steps[p].conclusion for p in step.premises)
        # (S:R), (F : p_m^n R G)  =>  (F S : G S)
        if a.kind != "typing" or b.kind != "typing":
            return False, f"step {i}: App premises must be typing statements"
        match b.right:
            case App(App(Const(k), r), g) if decode_operator(k) is not None:
                if a.right != r:
                    return False, f"step {i}: argument type does not match the domain"
                expected = Statement2("typing", App(b.left, a.left), App(g, a.left))
                if concl == expected:
                    return True, ""
                return False, (
                    f"step {i}: conclusion should be {expected.render()}"
                )
        return False, f"step {i}: function premise is not operator-typed"

    if step.rule == "Ab":
        # conclusion (lam x Q S : p_m^n Q (lam x Q P)) with premises
        # (S:P) and (P:u_n) under the child frame extended by (x:Q),
        # and (Q:u_m) in the step's own scope.
        parts = _pi2_parts(concl.right)
        if concl.kind != "typing" or not isinstance(concl.left, Lam) or parts is None:
            return False, f"step {i}: Ab conclusion must be (lam x Q S : pi[m,n] x Q P)"
        m, n, q, px, p_body = parts
        lam = concl.left
        if lam.dom != q or lam.var != px:
            return False, f"step {i}: subject and predicate binders disagree"
        x, s_body = lam.var, lam.body
        child = step.datum("child_frame")
        if not isinstance(child, int) or child not in d.frames:
            return False, f"step {i}: Ab needs a child_frame datum"
        fr = d.frames[child]
        if fr.parent != step.frame or fr.extra != (Statement2("typing", Var(x), q),):
            return False, f"step {i}: child frame must extend by (v{x} : Q)"
        if len(step.premises) != 3:
            return False, f"step {i}: Ab takes premises (S:P), (P:u_n), (Q:u_m)"
        sp, pu, qu = (d.steps[p] for p in step.premises)
        if sp.frame != child or pu.frame != child:
            return False, f"step {i}: (S:P) and (P:u_n) must live in the child frame"
        if not _is_ancestor(d, qu.frame, step.frame):
            return False, f"step {i}: (Q:u_m) premise outside the step's scope"
        if sp.conclusion != Statement2("typing", s_body, p_body):
            return False, f"step {i}: first premise must be (S:P)"
        if pu.conclusion != Statement2("typing", p_body, sort(n)):
            return False, f"step {i}: second premise must be (P:u{n})"
        if qu.conclusion != Statement2("typing", q, sort(m)):
            return False, f"step {i}: third premise must be (Q:u{m})"
        if x in hyps.free_vars() | free_vars(q):
            return False, f"step {i}: bound variable v{x} not fresh for the hypotheses"
        return True, ""

    # Cut: premises conclude each member of a delta frame's extra set in
    # the step's own scope, plus one premise concluding X in the delta frame.
    child = step.datum("child_frame")
    if not isinstance(child, int) or child not in d.frames:
        return False, f"step {i}: Cut needs a child_frame datum"
    fr = d.frames[child]
    if fr.parent != step.frame:
        return False, f"step {i}: Cut frame must be a child of the step's frame"
    if not step.premises:
        return False, f"step {i}: Cut takes premises"
    *delta_idx, final = step.premises
    proved = [d.steps[p] for p in delta_idx]
    for st in proved:
        if not _is_ancestor(d, st.frame, step.frame):
            return False, f"step {i}: intermediate premise outside the step's scope"
    needed = set(fr.extra)
    have = {st.conclusion for st in proved}
    if not needed <= have:
        return False, f"step {i}: not every intermediate hypothesis is concluded"
    last = d.steps[final]
    if last.frame != child or last.conclusion != step.conclusion:
        return False, f"step {i}: final Cut premise must conclude the goal in the cut frame"
    return True, ""


def check_derivation(gamma: Gamma2, d: Derivation) -> CheckResult:
    if not d.steps:
        return CheckResult(False, None, ["empty derivation"])
    diags: list[str] = []
    for i in range(len(d.steps)):
        ok, msg = check_step(gamma, d, i)
        if not ok:
            diags.append(msg)
    if d.steps[-1].frame != 0:
        diags.append("root step must live in the outermost frame")
    if diags:
        return CheckResult(False, None, diags)
    return CheckResult(True, d.root(), [])


def preset_allows(preset: str, stmt: Statement2) -> bool:
    """Whether a reduction/sub-reduction hypothesis fits the preset."""
    from .binding import alpha_eq
    from .system2 import head_beta

    if preset == "extensional":
        return True
    if stmt.kind == "typing":
        return True
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}")
    if stmt.kind == "reduction":
        return alpha_eq(stmt.left, stmt.right)
    contr = head_beta(stmt.left)
    if alpha_eq(stmt.left, stmt.right):
        return True
    if contr is not None and alpha_eq(contr, stmt.right):
        return True
    # lean-like additionally admits arbitrary curated sub-reductions
    return preset == "lean-like"


# --- bounded backward search -------------------------------------------------


class BudgetExhausted(ResourceError):
    """Search ran out of node budget (distinct from `no proof found`)."""


class _Search:
    def __init__(self, gamma: Gamma2, budget: int):
        self.gamma = gamma
        self.budget = budget
        self.nodes = 0
        # candidate operator types for App backward steps
        self.op_types: list[Term] = []
        seen = set()
        for s in gamma.statements:
            for t in (s.left, s.right):
                for u in subterms(t):
                    if _pi2_parts(u) is not None and u not in seen:
                        seen.add(u)
                        self.op_types.append(u)

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExhausted("derivation search budget exhausted")

    def prove(
        self, hyps: frozenset[Statement2], goal: Statement2, depth: int
    ) -> Optional[list]:
        """Returns a proof tree: [rule, goal, data, *subtrees]."""
        self.tick()
        if goal in hyps:
            return ["Hyp", goal, {}]
        if depth == 0 or goal.kind != "typing":
            return None
        subject, predicate = goal.left, goal.right

        # Ab
        parts = _pi2_parts(predicate)
        if isinstance(subject, Lam) and parts is not None:
            m, n, q, px, p_body = parts
            if subject.dom == q and subject.var == px:
                x = subject.var
                fvs = _typing_free_vars(hyps) | free_vars(q)
                if x not in fvs:
                    extended = hyps | {Statement2("typing", Var(x), q)}
                    sub1 = self.prove(
                        extended, Statement2("typing", subject.body, p_body), depth - 1
                    )
                    if sub1 is not None:
                        sub2 = self.prove(
                            extended, Statement2("typing", p_body, sort(n)), depth - 1
                        )
                        if sub2 is not None:
                            sub3 = self.prove(
                                hyps, Statement2("typing", q, sort(m)), depth - 1
                            )
                            if sub3 is not None:
                                return [
                                    "Ab",
                                    goal,
                                    {"x": x, "q": q},
                                    sub1,
                                    sub2,
                                    sub3,
                                ]

        # App
        match (subject, predicate):
            case (App(f, s), App(g, s2)) if s == s2:
                for op_type in self.op_types:
                    op_parts = _op_apply_parts(op_type)
                    if op_parts is None:
                        continue
                    r, gee = op_parts
                    if gee != g:
                        continue
                    sub1 = self.prove(hyps, Statement2("typing", s, r), depth - 1)
                    if sub1 is None:
                        continue
                    sub2 = self.prove(hyps, Statement2("typing", f, op_type), depth - 1)
                    if sub2 is not None:
                        return ["App", goal, {}, sub1, sub2]

        # RedSubject: (R:P), (R |> S) => (S:P) for hypothesis reductions
        for red in hyps:
            if red.kind == "reduction" and red.right == subject:
                sub1 = self.prove(
                    hyps, Statement2("typing", red.left, predicate), depth - 1
                )
                if sub1 is not None:
                    return ["RedSubject", goal, {}, sub1, ["Hyp", red, {}]]

        # RedPredicate: (S:R), (R |>= P) => (S:P)
        for red in hyps:
            if red.kind == "subreduction" and red.right == predicate:
                sub1 = self.prove(
                    hyps, Statement2("typing", subject, red.left), depth - 1
                )
                if sub1 is not None:
                    return ["RedPredicate", goal, {}, sub1, ["Hyp", red, {}]]
        return None


def _op_apply_parts(t: Term) -> Optional[tuple[Term, Term]]:
    """Split p_m^n R G into (R, G) for any G, not only lambda forms."""
    match t:
        case App(App(Const(k), r), g) if decode_operator(k) is not None:
            return (r, g)
    return None


def _typing_free_vars(stmts: Iterable[Statement2]) -> frozenset[int]:
    out: set[int] = set()
    for s in stmts:
        if s.kind == "typing":
            out |= free_vars(s.left) | free_vars(s.right)
    return frozenset(out)


def search_derivation(
    gamma: Gamma2, goal: Statement2, depth: int, budget: int = 100_000
) -> Optional[Derivation]:
    """Bounded backward search; raises BudgetExhausted when out of budget.

    Returning None means `no proof at this depth`, which proves nothing.
    """
    searcher = _Search(gamma, budget)
    tree = searcher.prove(gamma.statements, goal, depth)
    if tree is None:
        return None
    d = Derivation(steps=[], frames={0: Frame(None, ())})
    _emit(d, tree, frame=0)
    return d


def _emit(d: Derivation, tree: list, frame: int) -> int:
    rule, goal, data, *subs = tree
    if rule == "Ab":
        x, q = data["x"], data["q"]
        child = max(d.frames) + 1
        d.frames[child] = Frame(frame, (Statement2("typing", Var(x), q),))
        i1 = _emit(d, subs[0], child)
        i2 = _emit(d, subs[1], child)
        i3 = _emit(d, subs[2], frame)
        d.steps.append(
            Step(goal, "Ab", (i1, i2, i3), frame, (("child_frame", child),))
        )
        return len(d.steps) - 1
    idx = tuple(_emit(d, sub, frame) for sub in subs)
    d.steps.append(Step(goal, rule, idx, frame))
    return len(d.steps) - 1


# --- derivation files --------------------------------------------------------
#
# One step per line, implicitly indexed in order:
#   frame <id> parent <pid> :: <stmt> [ ; <stmt> ]...
#   step <rule> [<premise> ...] frame <fid> [child <cid>] :: <stmt>
# Frame 0 (no extra hypotheses) is implicit.  Statements use the sugar
# notation with explicit binder indices, so they re-parse identically.


def _render_stmt(s: Statement2, atoms=None) -> str:
    from .sugar import render_sugar

    sep = {"typing": ":", "reduction": "|>", "subreduction": "|>="}[s.kind]
    return (
        f"{render_sugar(s.left, 2, atoms, explicit_binders=True)} {sep} "
        f"{render_sugar(s.right, 2, atoms, explicit_binders=True)}"
    )


def render_derivation(d: Derivation, atoms=None) -> str:
    lines = []
    for fid in sorted(d.frames):
        if fid == 0:
            continue
        fr = d.frames[fid]
        extras = " ; ".join(_render_stmt(s, atoms) for s in fr.extra)
        lines.append(f"frame {fid} parent {fr.parent} :: {extras}")
    for step in d.steps:
        parts = [f"step {step.rule}"]
        parts.append("[" + " ".join(str(p) for p in step.premises) + "]")
        parts.append(f"frame {step.frame}")
        child = step.datum("child_frame")
        if child is not None:
            parts.append(f"child {child}")
        parts.append(f":: {_render_stmt(step.conclusion, atoms)}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


_FRAME_LINE = re.compile(r"frame\s+(\d+)\s+parent\s+(\d+)\s*::\s*(.*)$")
_STEP_LINE = re.compile(
    r"step\s+(\w+)\s+\[([\d\s]*)\]\s+frame\s+(\d+)(?:\s+child\s+(\d+))?\s*::\s*(.+)$"
)


def parse_derivation(text: str, atoms=None) -> Derivation:
    from .sugar import parse_statement

    d = Derivation(steps=[], frames={0: Frame(None, ())})
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        m = _FRAME_LINE.match(stripped)
        if m:
            fid, parent, rest = int(m.group(1)), int(m.group(2)), m.group(3)
            extras = []
            for part in rest.split(" ; "):
                part = part.strip()
                if part:
                    kind, left, right = parse_statement(part, 2, atoms)
                    extras.append(Statement2(kind, left, right))
            d.frames[fid] = Frame(parent, tuple(extras))
            continue
        m = _STEP_LINE.match(stripped)
        if m:
            rule = m.group(1)
            premises = tuple(int(p) for p in m.group(2).split())
            frame = int(m.group(3))
            data: tuple[tuple[str, object], ...] = ()
            if m.group(4) is not None:
                data = (("child_frame", int(m.group(4))),)
            kind, left, right = parse_statement(m.group(5), 2, atoms)
            d.steps.append(Step(Statement2(kind, left, right), rule, premises, frame, data))
            continue
        raise ValueError(f"line {lineno}: not a frame or step line: {stripped!r}")
    return d


# --- legal contexts ----------------------------------------------------------


@dataclass
class LegalVerdict:
    legal: bool
    witness: list[Statement2] = field(default_factory=list)

    def trailer(self) -> str:
        return "LEGAL" if self.legal else "NOT-SHOWN-LEGAL"


def is_legal_context(
    gamma: Gamma2,
    depth: int = 3,
    max_sort: int = 4,
    budget: int = 100_000,
) -> LegalVerdict:
    """Search for a dependency-respecting enumeration of the typing part.

    Each enumerated subject must be a variable absent from its own and
    all later predicates, and each predicate must be derivable as
    sort-typed from the remaining hypotheses.  Constant-subject typing
    statements are background hypotheses and need no enumeration; any
    other subject shape disqualifies the context.
    """
    typing = sorted(
        (s for s in gamma.typing if isinstance(s.left, Var)),
        key=lambda s: s.render(),
    )
    if any(not isinstance(s.left, (Var, Const)) for s in gamma.typing):
        return LegalVerdict(False)
    others = gamma.statements - frozenset(typing)

    def search(order: list[Statement2], remaining: list[Statement2]) -> Optional[list]:
        if not remaining:
            return order
        for idx, cand in enumerate(remaining):
            rest = remaining[:idx] + remaining[idx + 1 :]
            x = cand.left.index
            if x in free_vars(cand.right) or any(
                x in free_vars(s.right) for s in rest
            ):
                continue
            ctx = Gamma2.of(others | frozenset(rest))
            ok = False
            for k in range(max_sort + 1):
                try:
                    found = search_derivation(
                        ctx, Statement2("typing", cand.right, sort(k)), depth, budget
                    )
                except BudgetExhausted:
                    found = None
                if found is not None:
                    ok = True
                    break
            if not ok:
                continue
            result = search(order + [cand], rest)
            if result is not None:
                return result
        return None

    witness = search([], typing)
    if witness is None:
        return LegalVerdict(False)
    return LegalVerdict(True, witness)
