"""Command-line front end.

Every run prints a config header so reports are reproducible; the
machine report format is deterministic for identical inputs.  Exit
codes: 0 success/holds/valid, 1 refuted/invalid, 2 usage or parse
error, 3 budget or depth exhausted (bounded methods never report
exhaustion as refutation).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

from . import hfset
from .binding import alpha_eq, free_vars, substitute
from .hfset import HFSet, ResourceError, enumerate_pool
from .infer1 import derives_bounded_oracle, typing_set
from .infer2 import (
    BudgetExhausted,
    Gamma2,
    check_derivation,
    is_legal_context,
    parse_derivation,
    preset_allows,
    render_derivation,
    search_derivation,
)
from .semantics1 import Statement1, check_consequence, enumerate_models, statement_atoms
from .speclib import (
    intended_model_and,
    intended_model_eq,
    intended_model_false,
    intended_model_forall,
    intended_model_product,
    verify_and,
    verify_eq,
    verify_false,
    verify_forall,
    verify_product,
)
from .sugar import AtomTable, parse_term, read_statements, render_sugar
from .syntax import TermSyntaxError, parse_raw, render_raw
from .system2 import Statement2, beta_reduce_all, head_alpha_steps, head_beta

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


@dataclass
class RunConfig:
    command: str
    system: int = 1
    pool: str = "rank2"
    depth: int = 3
    budget: int = 100_000
    preset: str = "extensional"
    format: str = "human"

    def header(self) -> str:
        return "# config " + json.dumps(asdict(self), sort_keys=True)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _get_term(args, system: int):
    if getattr(args, "term", None) is not None:
        text = args.term
    elif getattr(args, "file", None):
        text = _read_text(args.file).strip()
    else:
        text = sys.stdin.read().strip()
    if getattr(args, "raw", False):
        return parse_raw(text, system)
    return parse_term(text, system)


def _load_gamma1(path: str) -> tuple[AtomTable, list[Statement1]]:
    table, triples = read_statements(_read_text(path), system=1)
    stmts = []
    for kind, left, right in triples:
        if kind != "typing":
            raise TermSyntaxError("first-system hypotheses must be typing statements")
        stmts.append(Statement1.of(left, right))
    return table, stmts


def _load_gamma2(path: str) -> tuple[AtomTable, list[Statement2]]:
    table, triples = read_statements(_read_text(path), system=2)
    return table, [Statement2(k, l, r) for k, l, r in triples]


def _load_pool(spec: str) -> tuple[list[HFSet], str]:
    if spec.startswith("rank") and spec[4:].isdigit():
        return enumerate_pool(int(spec[4:])), spec
    lines = [ln.strip() for ln in _read_text(spec).splitlines()]
    pool = [hfset.parse(ln) for ln in lines if ln and not ln.startswith("#")]
    return pool, spec


def _parse_stmt1(text: str, table: AtomTable) -> Statement1:
    from .sugar import parse_statement

    kind, left, right = parse_statement(text, 1, table)
    if kind != "typing":
        raise TermSyntaxError("first-system statements must be typing statements")
    return Statement1.of(left, right)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="depsets")
    top.add_argument("--config", help="JSON file of default option values")
    top.add_argument("--format", choices=("human", "machine"), default="human")
    sub = top.add_subparsers(dest="command", required=True)

    def term_cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("term", nargs="?", help="term text (else --file or stdin)")
        p.add_argument("--file", help="read the term from a file")
        p.add_argument("--system", type=int, choices=(1, 2), default=1)
        p.add_argument("--raw", action="store_true", help="raw core notation")
        return p

    term_cmd("parse", "parse a term and print its raw core form")
    p = term_cmd("print", "parse a term and print its sugar form")
    p.add_argument("--explicit", action="store_true", help="keep binder indices")
    term_cmd("fv", "print the free variables of a term")

    p = sub.add_parser("subst", help="substitute a term for a variable")
    p.add_argument("term")
    p.add_argument("--sub", required=True, help="replacement term")
    p.add_argument("--var", type=int, required=True, help="variable index")
    p.add_argument("--system", type=int, choices=(1, 2), default=1)

    p = sub.add_parser("alpha-eq", help="alpha-equivalence of two terms")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--system", type=int, choices=(1, 2), default=1)

    p = sub.add_parser("infer", help="first-system typing set of a subject")
    p.add_argument("--system", type=int, choices=(1,), default=1)
    p.add_argument("--gamma", required=True, help="hypothesis file")
    p.add_argument("--term", required=True, help="subject term text or @file")
    p.add_argument("--oracle-depth", type=int, default=None,
                   help="cross-validate derived statements at this depth")
    p.add_argument("--subset-scan", action="store_true")

    p = sub.add_parser("check", help="check a second-system derivation")
    p.add_argument("--gamma", required=True)
    p.add_argument("--derivation", required=True)
    p.add_argument("--preset", choices=("pure", "lean-like", "extensional"),
                   default="extensional")

    p = sub.add_parser("search", help="bounded derivation or subject search")
    p.add_argument("--system", type=int, choices=(1, 2), default=2)
    p.add_argument("--gamma", required=True)
    p.add_argument("--stmt", help="second-system goal statement text")
    p.add_argument("--predicate", help="first-system predicate for a closed subject")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--budget", type=int, default=100_000)

    p = sub.add_parser("reduce", help="reduce a term")
    p.add_argument("term")
    p.add_argument("--system", type=int, choices=(1, 2), default=2)
    p.add_argument("--mode", choices=("head-beta", "beta", "head-alpha"),
                   default="head-beta")
    p.add_argument("--steps", type=int, default=1)

    p = sub.add_parser("models", help="enumerate first-system pool models")
    p.add_argument("--pool", default="rank2")
    p.add_argument("--gamma", required=True)

    p = sub.add_parser("consequence", help="first-system pool consequence")
    p.add_argument("--pool", default="rank3")
    p.add_argument("--gamma", required=True)
    p.add_argument("--stmt", required=True)

    p = sub.add_parser("verify-spec", help="verify a bundled specification")
    p.add_argument("--name", required=True,
                   choices=("false", "eq", "product", "and", "forall", "all"))
    p.add_argument("--export", action="store_true",
                   help="print the bundle as hypothesis lines instead")

    p = sub.add_parser("legal", help="legality of a second-system context")
    p.add_argument("--gamma", required=True)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--budget", type=int, default=100_000)

    return top


def _config(args) -> RunConfig:
    return RunConfig(
        command=args.command,
        system=getattr(args, "system", 1),
        pool=getattr(args, "pool", "rank2"),
        depth=getattr(args, "depth", 3),
        budget=getattr(args, "budget", 100_000),
        preset=getattr(args, "preset", "extensional"),
        format=args.format,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if "--config" in argv:
        # config values become defaults; explicit flags win
        idx = argv.index("--config")
        defaults = json.loads(_read_text(argv[idx + 1]))
        parser.set_defaults(**defaults)
        for action in parser._subparsers._group_actions[0].choices.values():
            action.set_defaults(**{
                k: v for k, v in defaults.items()
                if any(a.dest == k for a in action._actions)
            })
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    try:
        return _dispatch(args)
    except (TermSyntaxError, hfset.SetSyntaxError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetExhausted, ResourceError) as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def _dispatch(args) -> int:
    cfg = _config(args)
    out = [cfg.header()]
    code = EXIT_OK

    if args.command == "parse":
        t = _get_term(args, args.system)
        out.append(render_raw(t))
    elif args.command == "print":
        t = _get_term(args, args.system)
        out.append(render_sugar(t, args.system, explicit_binders=args.explicit))
    elif args.command == "fv":
        t = _get_term(args, args.system)
        out.append(" ".join(f"v{i}" for i in sorted(free_vars(t))) or "(none)")
    elif args.command == "subst":
        t = parse_term(args.term, args.system)
        s = parse_term(args.sub, args.system)
        out.append(render_sugar(substitute(t, s, args.var), args.system,
                                explicit_binders=True))
    elif args.command == "alpha-eq":
        l = parse_term(args.left, args.system)
        r = parse_term(args.right, args.system)
        equal = alpha_eq(l, r)
        out.append("true" if equal else "false")
        code = EXIT_OK if equal else EXIT_REFUTED
    elif args.command == "infer":
        code = _cmd_infer(args, out)
    elif args.command == "check":
        code = _cmd_check(args, out)
    elif args.command == "search":
        code = _cmd_search(args, out)
    elif args.command == "reduce":
        code = _cmd_reduce(args, out)
    elif args.command == "models":
        code = _cmd_models(args, out)
    elif args.command == "consequence":
        code = _cmd_consequence(args, out)
    elif args.command == "verify-spec":
        code = _cmd_verify_spec(args, out)
    elif args.command == "legal":
        table, stmts = _load_gamma2(args.gamma)
        verdict = is_legal_context(Gamma2.of(stmts), args.depth, budget=args.budget)
        out.append(verdict.trailer())
        code = EXIT_OK if verdict.legal else EXIT_BUDGET
    print("\n".join(out))
    return code


def _cmd_infer(args, out) -> int:
    table, gamma = _load_gamma1(args.gamma)
    if args.term.startswith("@"):
        subject = parse_term(_read_text(args.term[1:]).strip(), 1, table)
    else:
        subject = parse_term(args.term, 1, table)
    types = typing_set(gamma, subject, subset_scan=args.subset_scan)
    rendered = sorted(render_sugar(c.rep, 1, table) for c in types)
    out.append(f"typing set ({len(rendered)} members)")
    out.extend(rendered)
    if args.oracle_depth is not None:
        mismatches = []
        for c in types:
            stmt = Statement1.of(subject, c.rep)
            if not derives_bounded_oracle(gamma, stmt, args.oracle_depth):
                mismatches.append(render_sugar(c.rep, 1, table))
        if mismatches:
            out.append("oracle disagreement on: " + ", ".join(sorted(mismatches)))
            return EXIT_REFUTED
        out.append(f"oracle agreement at depth {args.oracle_depth}")
    return EXIT_OK


def _cmd_check(args, out) -> int:
    table, stmts = _load_gamma2(args.gamma)
    gamma = Gamma2.of(stmts)
    bad = [s for s in stmts if not preset_allows(args.preset, s)]
    if bad:
        out.append("INVALID")
        out.extend(f"hypothesis outside preset {args.preset}: {s.render()}"
                   for s in bad)
        return EXIT_REFUTED
    d = parse_derivation(_read_text(args.derivation), table)
    result = check_derivation(gamma, d)
    out.append(result.trailer())
    out.extend(result.diagnostics)
    return EXIT_OK if result.valid else EXIT_REFUTED


def _cmd_search(args, out) -> int:
    from .sugar import parse_statement

    if args.system == 1:
        from .infer1 import search_subject

        if args.predicate is None:
            raise TermSyntaxError("first-system search needs --predicate")
        table, gamma = _load_gamma1(args.gamma)
        predicate = parse_term(args.predicate, 1, table)
        found = search_subject(gamma, predicate, args.depth, args.budget)
        if found is None:
            out.append(f"NOT-FOUND(depth<={args.depth})")
            return EXIT_BUDGET
        out.append("FOUND")
        out.append(render_sugar(found, 1, table, explicit_binders=True))
        return EXIT_OK
    if args.stmt is None:
        raise TermSyntaxError("second-system search needs --stmt")
    table, stmts = _load_gamma2(args.gamma)
    kind, left, right = parse_statement(args.stmt, 2, table)
    goal = Statement2(kind, left, right)
    d = search_derivation(Gamma2.of(stmts), goal, args.depth, args.budget)
    if d is None:
        out.append(f"NOT-FOUND(depth<={args.depth})")
        return EXIT_BUDGET
    out.append("FOUND")
    out.append(render_derivation(d, table).rstrip("\n"))
    return EXIT_OK


def _cmd_reduce(args, out) -> int:
    t = parse_term(args.term, args.system)
    if args.mode == "head-beta":
        current = t
        for _ in range(args.steps):
            nxt = head_beta(current)
            if nxt is None:
                break
            current = nxt
            out.append(render_sugar(current, args.system, explicit_binders=True))
        if len(out) == 1:
            out.append("(no head redex)")
    elif args.mode == "beta":
        for r in beta_reduce_all(t):
            out.append(render_sugar(r, args.system, explicit_binders=True))
        if len(out) == 1:
            out.append("(no redex)")
    else:
        for r in head_alpha_steps(t):
            out.append(render_sugar(r, args.system, explicit_binders=True))
        if len(out) == 1:
            out.append("(no alpha variants)")
    return EXIT_OK


def _cmd_models(args, out) -> int:
    pool, label = _load_pool(args.pool)
    table, gamma = _load_gamma1(args.gamma)
    consts, vars_ = statement_atoms(gamma)
    count = 0
    for a in enumerate_models(pool, sorted(consts), sorted(vars_), gamma):
        count += 1
        out.append(a.describe())
    out.append(f"{count} model(s) over pool={label}")
    return EXIT_OK


def _cmd_consequence(args, out) -> int:
    pool, label = _load_pool(args.pool)
    table, gamma = _load_gamma1(args.gamma)
    stmt = _parse_stmt1(args.stmt, table)
    consts, vars_ = statement_atoms(gamma + [stmt])
    verdict = check_consequence(pool, sorted(consts), sorted(vars_), gamma, stmt, label)
    out.append(verdict.trailer())
    return EXIT_OK if verdict.holds else EXIT_REFUTED


_SPECS = {
    "false": (intended_model_false, verify_false),
    "eq": (intended_model_eq, verify_eq),
    "product": (intended_model_product, verify_product),
    "and": (intended_model_and, verify_and),
    "forall": (intended_model_forall, verify_forall),
}


def _cmd_verify_spec(args, out) -> int:
    from . import speclib

    names = list(_SPECS) if args.name == "all" else [args.name]
    if args.export:
        builders = {
            "false": speclib.bundle_false,
            "eq": speclib.bundle_eq,
            "product": speclib.bundle_product,
            "and": speclib.bundle_and,
            "forall": speclib.bundle_forall,
        }
        for name in names:
            out.extend(builders[name]().export_lines())
        return EXIT_OK
    code = EXIT_OK
    for name in names:
        build, verify = _SPECS[name]
        report = verify(build())
        out.append(f"{name}: {'PASS' if report.ok else 'FAIL'}")
        out.extend(f"  {f}" for f in report.failures)
        if not report.ok:
            code = EXIT_REFUTED
    return code


if __name__ == "__main__":
    sys.exit(main())
