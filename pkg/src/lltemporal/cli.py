"""Command line entry point."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .closure import check_language
from .core import Instance, LlHornClause, RelationConstraint
from .frontends import clause_to_relation
from .hardness import GenerationError, hard_instance, path_consistency
from .io import InstanceSyntaxError, emit_instance, parse_instance
from .oracle import DEFAULT_LIMIT, LimitExceeded, brute_solve
from .solver import ModelCheckFailed, solve

EXIT_SAT, EXIT_UNSAT, EXIT_ERROR = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _read(path: str) -> Instance:
    if path == "-":
        text = sys.stdin.read()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return parse_instance(text)
    except InstanceSyntaxError as exc:
        for e in exc.errors:
            print(f"{path}:{e}", file=sys.stderr)
        raise _UsageError(f"{path}: {len(exc.errors)} parse error(s)") from None


def _relations(instance: Instance):
    seen = {}
    for rel in instance.language.values():
        seen.setdefault(rel.name, rel)
    for c in instance.constraints:
        if isinstance(c, RelationConstraint):
            seen.setdefault(c.relation.name, c.relation)
    return list(seen.values())


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def cmd_solve(args) -> int:
    inst = _read(args.file)
    if args.dual:
        inst = Instance(inst.variables, inst.constraints, inst.language, "dual")
    if args.check_closure:
        report = check_language(_relations(inst))
        for r in report.relations:
            ok = r.dual_ll if args.dual else r.ll
            if not ok:
                kind = "dual ll" if args.dual else "ll"
                print(
                    f"warning: relation {r.name} is not {kind}-closed; "
                    "the verdict may be wrong",
                    file=sys.stderr,
                )
    trace = None
    if args.dump_graph is not None:
        out = sys.stdout if args.dump_graph == "-" else open(args.dump_graph, "w")
        counter = iter(range(10**9))

        def trace(graph):
            out.write(graph.to_dot(f"iter{next(counter)}"))
            out.flush()

    try:
        result = solve(inst, want_model=args.model or args.classes, trace=trace)
    except ModelCheckFailed as exc:
        raise _UsageError(str(exc)) from None
    finally:
        if args.dump_graph not in (None, "-"):
            out.close()
    if not result.satisfiable:
        print("unsat")
        if result.reason:
            print(f"reason: {result.reason}", file=sys.stderr)
        return EXIT_UNSAT
    print("sat")
    if args.model:
        for name, rank in sorted(result.model.items(), key=lambda kv: (kv[1], kv[0])):
            print(f"{name}={rank}")
    if args.classes:
        for cls in result.classes:
            if len(cls) > 1:
                print("equal " + " ".join(cls))
    return EXIT_SAT


def cmd_closure(args) -> int:
    inst = _read(args.file)
    report = check_language(_relations(inst))
    for r in report.relations:
        print(
            f"{r.name} arity={r.arity} orders={r.size} "
            f"ll={_yes(r.ll)} dual-ll={_yes(r.dual_ll)} lex={_yes(r.lex)}"
        )
    print(
        f"language ll={_yes(report.ll)} dual-ll={_yes(report.dual_ll)} "
        f"lex={_yes(report.lex)}"
    )
    return 0


def cmd_oracle(args) -> int:
    inst = _read(args.file)
    try:
        rep = brute_solve(inst, limit=args.limit)
    except LimitExceeded as exc:
        raise _UsageError(str(exc)) from None
    if not rep.satisfiable:
        print("unsat")
        return EXIT_UNSAT
    print("sat")
    print(f"solutions {rep.solution_count}")
    for cls in rep.forced_equal:
        if len(cls) > 1:
            print("equal " + " ".join(cls))
    print("witness " + " ".join(f"{n}={r}" for n, r in zip(inst.variables, rep.witness)))
    return EXIT_SAT


def cmd_convert(args) -> int:
    inst = _read(args.file)
    constraints = []
    language = dict(inst.language)
    count = 0
    for c in inst.constraints:
        if isinstance(c, LlHornClause):
            count += 1
            name = f"C{count}"
            while name in language:
                count += 1
                name = f"C{count}"
            try:
                rel, scope = clause_to_relation(c, name)
            except ValueError as exc:
                raise _UsageError(str(exc)) from None
            language[name] = rel
            constraints.append(RelationConstraint(scope, rel))
        else:
            constraints.append(c)
    sys.stdout.write(emit_instance(Instance(inst.variables, tuple(constraints), language)))
    return 0


def cmd_gen_hard(args) -> int:
    try:
        inst = hard_instance(args.girth, args.seed, args.vertices)
    except (GenerationError, ValueError) as exc:
        raise _UsageError(str(exc)) from None
    text = emit_instance(inst)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_pc(args) -> int:
    inst = _read(args.file)
    try:
        res = path_consistency(inst)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    if res.consistent:
        print("path-consistent")
        return 0
    print("inconsistency-derived")
    return 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lltemporal", description="ll-closed temporal constraint solver")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="decide satisfiability (exit 0 sat, 1 unsat)")
    s.add_argument("file", help="instance file, '-' for standard input")
    s.add_argument("--dual", action="store_true", help="constraints are dual ll-closed")
    s.add_argument("--model", action="store_true", help="print VAR=RANK lines")
    s.add_argument("--classes", action="store_true", help="print forced-equal classes")
    s.add_argument("--check-closure", action="store_true",
                   help="warn about relations outside the solvable language")
    s.add_argument("--dump-graph", nargs="?", const="-", default=None, metavar="PATH",
                   help="write the constraint graph of every iteration as DOT")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("closure", help="report lex / ll / dual-ll closure of relations")
    c.add_argument("file")
    c.set_defaults(func=cmd_closure)

    o = sub.add_parser("oracle", help="brute-force satisfiability for small instances")
    o.add_argument("file")
    o.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("convert", help="expand clauses into explicit relations")
    v.add_argument("file")
    v.set_defaults(func=cmd_convert)

    g = sub.add_parser("gen-hard", help="generate an unsatisfiable high-girth R^min instance")
    g.add_argument("--girth", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--vertices", type=int, default=None)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen_hard)

    q = sub.add_parser("pc", help="run three-variable path consistency")
    q.add_argument("file")
    q.set_defaults(func=cmd_pc)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError) as exc:
        print(f"lltemporal: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
