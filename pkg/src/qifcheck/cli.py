"""Command-line front end: ``qif <subcommand> ...``.

Exit codes: 0 success or property holds, 1 property violated, 2 usage or
input error, 3 capacity exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import compare, corpus, counting, dist, qif, sat, symbolic
from .errors import CapacityError, NoCounterexampleError, QifError
from .lang import Not, parse_formula, parse_program, render_formula, render_program
from .semantics import DEFAULT_CAPACITY

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3


class _Usage(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Usage(f"cannot read {path}: {exc.strerror}") from None


def _program(path: str):
    return parse_program(_read(path))


def _distribution(args, domain):
    if getattr(args, "dist", None):
        return dist.loads(_read(args.dist), domain)
    if getattr(args, "random_dist", False):
        return dist.sample_random(domain, args.seed)
    return None


class _Out:
    def __init__(self, fmt: str, stream):
        self.fmt, self.stream = fmt, stream

    def emit(self, payload: dict, text: str):
        if self.fmt == "json":
            self.stream.write(json.dumps(payload, indent=2) + "\n")
        else:
            self.stream.write(text.rstrip("\n") + "\n")


def _verdict_text(v: dict, what: str) -> str:
    if v["holds"]:
        return f"{what}: holds"
    c = v["counterexample"]
    return f"{what}: violated\n  l  = {c['l']}\n  h  = {c['h']}\n  h' = {c['h2']}"


# ---------------------------------------------------------------------------
# Subcommands


def cmd_parse(args, out: _Out) -> int:
    p = _program(args.program)
    out.emit({"high": list(p.high), "low": list(p.low), "out": list(p.out),
              "local": list(p.local), "program": render_program(p)}, render_program(p))
    return EXIT_OK


def _kinds(name: str) -> list[str]:
    return list(qif.KINDS) if name.lower() == "all" else [name.upper()]


def cmd_measure(args, out: _Out) -> int:
    p = _program(args.program)
    mu = _distribution(args, p.domain)
    reports = [qif.measure(p, k, mu, args.capacity).to_json() for k in _kinds(args.measure)]
    text = "\n".join(
        f"{r['measure']} = {r['value']:.12g}" + (f"  (exact: {r['exact']})" if r["exact"] else "")
        for r in reports)
    out.emit(reports[0] if len(reports) == 1 else {"reports": reports}, text)
    return EXIT_OK


def cmd_compare(args, out: _Out) -> int:
    m1, m2 = _program(args.left), _program(args.right)
    kind = args.measure.upper()
    mu = _distribution(args, m1.domain)
    if mu is None:
        holds, conclusive = compare.cmp_uniform(m1, m2, kind, args.capacity), True
        where = "U"
    else:
        res = compare.cmp_dist(m1, m2, kind, mu, args.epsilon, args.capacity)
        holds, conclusive = res.holds, res.conclusive
        where = "mu"
    payload = {"measure": kind, "distribution": "uniform" if mu is None else "given",
               "holds": holds, "conclusive": conclusive}
    text = f"{kind}[{where}](left) <= {kind}[{where}](right): {'yes' if holds else 'no'}"
    if not conclusive:
        text += f" (inconclusive within epsilon {args.epsilon:g})"
    out.emit(payload, text)
    return EXIT_OK if holds else EXIT_VIOLATED


def cmd_check_r(args, out: _Out) -> int:
    m1, m2 = _program(args.left), _program(args.right)
    if args.engine == "sat":
        verdict = symbolic.check_r_symbolic(m1, m2)
    else:
        verdict = compare.check_R(m1, m2, args.capacity)
    payload = verdict.to_json()
    out.emit(payload, _verdict_text(payload, "R(left, right)"))
    return EXIT_OK if verdict.holds else EXIT_VIOLATED


def cmd_check_ni(args, out: _Out) -> int:
    p = _program(args.program)
    if args.engine == "sat":
        payload = symbolic.check_ni_symbolic(p).to_json()
    else:
        cex = compare.ni_counterexample(p, args.capacity)
        payload = compare.RVerdict(cex is None, cex, p.domain).to_json()
    out.emit(payload, _verdict_text(payload, "non-interference"))
    return EXIT_OK if payload["holds"] else EXIT_VIOLATED


def cmd_witness(args, out: _Out) -> int:
    m1, m2 = _program(args.left), _program(args.right)
    try:
        mu = compare.witness_distribution(m1, m2, args.capacity)
    except NoCounterexampleError as exc:
        out.emit({"witness": None, "reason": str(exc)}, f"no witness: {exc}")
        return EXIT_VIOLATED
    gaps = {}
    for k in ("SE", "ME", "GE"):
        gaps[k] = [qif.measure(m1, k, mu).value, qif.measure(m2, k, mu).value]
    if args.output:
        dist.dump(mu, args.output)
    text = mu.dumps() + "".join(f"# {k}: left {a:g} > right {b:g}\n" for k, (a, b) in gaps.items())
    out.emit({"witness": mu.dumps(), "gaps": gaps}, text)
    return EXIT_OK


def cmd_count(args, out: _Out) -> int:
    f = parse_formula(_read(args.formula))
    names = args.vars.split(",") if args.vars else None
    run = counting.count_via_oracle(f, args.oracle, names,
                                    capacity=min(args.capacity, counting.MAX_COUNT_VARS + 1))
    payload = run.to_json()
    text = f"count = {run.count}  (oracle {run.kind}, {run.oracle_calls} calls"
    text += f", bound {run.call_bound})" if run.kind != "ENUM" else ")"
    out.emit(payload, text)
    return EXIT_OK


def cmd_gen_formula(args, out: _Out) -> int:
    names = args.vars.split(",") if args.vars else [f"x{i}" for i in range(1, args.nvars + 1)]
    try:
        f = counting.gen_count_formula(args.count, names)
    except ValueError as exc:
        raise _Usage(str(exc)) from None
    text = render_formula(f)
    out.emit({"count": args.count, "vars": names, "formula": text}, text)
    return EXIT_OK


def cmd_corpus(args, out: _Out) -> int:
    if args.which == "intro":
        progs = {"intro_m1": (m := corpus.gen_intro_examples())["M1_intro"],
                 "intro_m2": m["M2_intro"]}
    elif args.which == "zw":
        progs = {"zw": corpus.gen_zw_example()}
    else:
        login = corpus.gen_login_corpus(args.bits)
        progs = {"login_spec" if k == "M_spec" else f"login_{k.lower()}": p for k, p in login.items()}
    target = Path(args.out)
    target.mkdir(parents=True, exist_ok=True)
    written = []
    for name, p in progs.items():
        path = target / f"{name}.qb"
        path.write_text(render_program(p), encoding="utf-8")
        written.append(str(path))
    out.emit({"files": written}, "\n".join(written))
    return EXIT_OK


def cmd_export_dimacs(args, out: _Out) -> int:
    if args.right:
        sc = symbolic.self_compose_r(_program(args.program), _program(args.right))
    else:
        sc = symbolic.self_compose_ni(_program(args.program))
    wp = symbolic.wp_naive if args.naive else symbolic.wp_optimized
    cnf = sat.tseitin_cnf(Not(sc.vc(wp)), sc.input_order())
    text = sat.export_dimacs(cnf)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    out.stream.write(text if out.fmt == "text" else json.dumps({"dimacs": text}, indent=2) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing


def _global_options(parser: argparse.ArgumentParser, defaults: bool) -> None:
    def d(value):
        return value if defaults else argparse.SUPPRESS

    parser.add_argument("--format", choices=("text", "json"), default=d("text"))
    parser.add_argument("--capacity", type=int, default=d(DEFAULT_CAPACITY),
                        help="largest input space to enumerate, in bits")
    parser.add_argument("--epsilon", type=float, default=d(1e-9),
                        help="tolerance for floating comparisons")
    parser.add_argument("--seed", type=int, default=d(0), help="seed for random distributions")
    parser.add_argument("--engine", choices=("brute", "sat"), default=d("brute"),
                        help="decision procedure for check-r and check-ni")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qif", description="Quantitative information flow checks "
                                     "for loop-free boolean programs.")
    _global_options(parser, True)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    def dist_opts(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--dist", help="distribution file (default: uniform)")
        g.add_argument("--random-dist", action="store_true",
                       help="use a random distribution drawn from --seed")

    p = add("parse", cmd_parse, "parse and pretty-print a program")
    p.add_argument("program")

    p = add("measure", cmd_measure, "compute leakage")
    p.add_argument("--program", required=True)
    p.add_argument("--measure", default="all", type=str.lower,
                   choices=("se", "me", "ge", "cc", "all"))
    dist_opts(p)

    p = add("compare", cmd_compare, "is left's leakage at most right's?")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--measure", required=True, type=str.lower, choices=("se", "me", "ge", "cc"))
    dist_opts(p)

    p = add("check-r", cmd_check_r, "is left at least as secure as right for every distribution?")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)

    p = add("check-ni", cmd_check_ni, "non-interference")
    p.add_argument("--program", required=True)

    p = add("witness", cmd_witness, "distribution on which left leaks more than right")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--output", help="also write the distribution to this file")

    p = add("count", cmd_count, "count models of a formula through a leakage oracle")
    p.add_argument("--formula", required=True)
    p.add_argument("--oracle", default="se", type=str.lower,
                   choices=("se", "me", "ge", "cc", "enum"))
    p.add_argument("--vars", help="comma-separated variable list (default: those in the formula)")

    p = add("gen-formula", cmd_gen_formula, "formula with an exact number of models")
    p.add_argument("--count", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--vars", help="comma-separated variable names")
    g.add_argument("--nvars", type=int, help="use x1..xN")

    p = add("corpus", cmd_corpus, "write the example programs as .qb files")
    p.add_argument("which", choices=("intro", "login", "zw"))
    p.add_argument("--bits", type=int, default=8, help="login width")
    p.add_argument("--out", default=".", help="output directory")

    p = add("export-dimacs", cmd_export_dimacs,
            "CNF whose satisfiability refutes non-interference (or R with --right)")
    p.add_argument("--program", required=True, help="the program (left program for R)")
    p.add_argument("--right", help="right program: export the R check instead")
    p.add_argument("--naive", action="store_true", help="use the textbook weakest precondition")
    p.add_argument("--output", help="also write to this file")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    if args.capacity < 1:
        stderr.write("qif: --capacity must be at least 1\n")
        return EXIT_USAGE
    if args.epsilon <= 0:
        stderr.write("qif: --epsilon must be positive\n")
        return EXIT_USAGE
    try:
        return args.func(args, _Out(args.format, stdout))
    except CapacityError as exc:
        stderr.write(f"qif: {exc}\n")
        return EXIT_CAPACITY
    except (QifError, _Usage, ValueError) as exc:
        stderr.write(f"qif: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
