"""Command-line front end.

Commands: solve (pick an algorithm), cert (list certificates), gen
(labeled benchmark instances), sidon, check (verify a model file), bench
(CSV comparison harness).  Decision commands exit 10 for SAT and 20 for
UNSAT; 0 is success for the rest, 1 an input error, 2 a usage or
fragment error.  All output is byte-deterministic for a fixed command
line and input except the wall-clock column of bench.
"""

from __future__ import annotations

import argparse
import itertools
import random
import sys
import time
from collections.abc import Callable, Iterable

from .bounded import solve_bounded
from .core import Atom, Instance, arity, violated_index
from .enumeration import certificate_oracle, list_certificates, solve_enumerate
from .formula import DEFAULT_CNF_CAP, parse_formula, solve_dlsat, to_cnf
from .generators import (
    DcspInstance,
    dcsp_instance,
    dcsp_to_d2k,
    gen_is_d2,
    gen_is_d31,
    gen_is_d40,
    gen_subset_sum,
    grid_graph,
    mcc_to_mpss,
    mpss_to_d21,
    _d31_ruler,
)
from .randgen import random_instance
from .sidon import sidon_set
from .split import solve_dnc
from .structure import decompose, incidence_graph, to_nice
from .textio import ParseError, parse_instance, parse_model, print_model
from .textio import print_instance as _print_instance
from .twdp import solve_tw

EXIT_SAT = 10
EXIT_UNSAT = 20
EXIT_OK = 0
EXIT_INPUT = 1
EXIT_USAGE = 2

DEFAULT_ORACLE_CAP = 1_000_000

# brute-force label search spaces larger than this come out UNKNOWN
LABEL_CAP = 200_000

ALGOS = ("enumerate", "dnc", "treewidth", "bounded", "oracle")


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path!r}: {e.strerror}") from None


def _nice(inst: Instance):
    return to_nice(decompose(incidence_graph(inst)))


# ---------------------------------------------------------------------------
# solve


def _run_algo(algo: str, inst: Instance, width: int | None, cap_oracle: int):
    """(sat, model or None); raises UsageError on a fragment mismatch."""
    if algo == "enumerate":
        model = solve_enumerate(inst)
        return model is not None, model
    if algo == "oracle":
        return certificate_oracle(inst, cap=cap_oracle), None
    if algo == "dnc":
        if arity(inst) > 2:
            raise UsageError("dnc requires a binary instance")
        return solve_dnc(inst), None
    if algo == "treewidth":
        model = solve_tw(inst, _nice(inst), return_model=True)
        return model is not None, model
    if width is None or width < 1:
        raise UsageError("--algo bounded needs --width at least 1")
    if arity(inst) > 2:
        raise UsageError("bounded span requires a binary instance")
    model = solve_bounded(width, inst)
    return model is not None, model


def _cmd_solve(args) -> int:
    text = _read(args.path)
    if args.formula:
        f = parse_formula(text)
        if args.algo == "enumerate":
            model = solve_dlsat(f)
            if model is None or args.output == "status":
                sys.stdout.write("SAT\n" if model is not None else "UNSAT\n")
            else:
                lines = ["SAT"]
                lines += [f"{nm} = {model[i]}" for i, nm in enumerate(f.var_names)]
                sys.stdout.write("\n".join(lines) + "\n")
            return EXIT_SAT if model is not None else EXIT_UNSAT
        if args.algo == "oracle":
            sat = certificate_oracle(to_cnf(f, cap=args.cap_cnf), cap=args.cap_oracle)
            sys.stdout.write("SAT\n" if sat else "UNSAT\n")
            return EXIT_SAT if sat else EXIT_UNSAT
        raise UsageError(f"--algo {args.algo} does not apply to formulas")
    inst = parse_instance(text)
    sat, model = _run_algo(args.algo, inst, args.width, args.cap_oracle)
    if model is not None and args.output == "model":
        sys.stdout.write(print_model(inst, model))
    else:
        sys.stdout.write("SAT\n" if sat else "UNSAT\n")
    return EXIT_SAT if sat else EXIT_UNSAT


# ---------------------------------------------------------------------------
# cert


def _atom_key(a: Atom):
    iv = a.interval
    return (
        a.x,
        a.y,
        iv.lo is None,
        iv.lo if iv.lo is not None else 0,
        iv.hi is None,
        iv.hi if iv.hi is not None else 0,
        iv.lo_open,
        iv.hi_open,
    )


def _cmd_cert(args) -> int:
    inst = parse_instance(_read(args.path))
    size = 1
    for c in inst.constraints:
        size *= len(c.atoms)
        if size > args.cap_oracle:
            raise ValueError("oracle blow-up")
    certs = list_certificates(inst)
    lines = ["SAT" if certs else "UNSAT"]
    for cert in certs:
        atoms = sorted(cert, key=_atom_key)
        lines.append(
            " | ".join(
                f"{inst.var_names[a.x]} - {inst.var_names[a.y]} in {a.interval}"
                for a in atoms
            )
        )
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_SAT if certs else EXIT_UNSAT


# ---------------------------------------------------------------------------
# gen


def _int_arg(tok: str, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise UsageError(f"{what} must be an integer, got {tok!r}") from None


def _parse_cell(tok: str, what: str) -> tuple[int, int]:
    parts = tok.split(",")
    if len(parts) != 2:
        raise UsageError(f"{what} must look like 'row,col', got {tok!r}")
    return _int_arg(parts[0], what), _int_arg(parts[1], what)


def _parse_grid(args: list[str], name: str):
    if not args:
        raise UsageError(f"gen {name} needs a grid size")
    n = _int_arg(args[0], "grid size")
    edges = []
    for tok in args[1:]:
        ends = tok.split("-")
        if len(ends) != 2:
            raise UsageError(f"edge must look like 'r,c-r,c', got {tok!r}")
        edges.append((_parse_cell(ends[0], "edge"), _parse_cell(ends[1], "edge")))
    return grid_graph(n, edges)


def _choice_label(n: int, domain: int, accept: Callable[[tuple[int, ...]], bool]) -> str:
    if domain**n > LABEL_CAP:
        return "UNKNOWN"
    for choice in itertools.product(range(1, domain + 1), repeat=n):
        if accept(choice):
            return "SAT"
    return "UNSAT"


def _grid_is_label(g) -> str:
    def independent(choice):
        picked = {(i, j) for i, j in enumerate(choice, start=1)}
        return all(not (u in picked and v in picked) for u, v in g.edges)

    return _choice_label(g.n, g.n, independent)


def _d31_label(g) -> str:
    ruler = _d31_ruler(g.n)

    def avoids(choice):
        for (c, cc), (d, dc) in g.edges:
            if c == d:
                continue
            if ruler[choice[c - 1]] - ruler[choice[d - 1]] == ruler[cc] - ruler[dc]:
                return False
        return True

    return _choice_label(g.n, g.n, avoids)


def _dcsp_label(inst: DcspInstance) -> str:
    pairs = inst.constrained_pairs()

    def consistent(choice):
        if any(choice[x] == v for x, v in inst.unary):
            return False
        if any(choice[x] == a and choice[y] == b for x, y, a, b in inst.binary):
            return False
        return all(choice[x] != choice[y] for x, y in pairs)

    return _choice_label(inst.var_count, inst.d, consistent)


def _parse_dcsp(args: list[str]) -> DcspInstance:
    if len(args) < 2:
        raise UsageError("gen dcsp-d2k needs a domain size and a variable count")
    d = _int_arg(args[0], "domain size")
    n = _int_arg(args[1], "variable count")
    unary = []
    binary = []
    for tok in args[2:]:
        if "!=" not in tok:
            raise UsageError(f"fact must contain '!=', got {tok!r}")
        left, right = tok.split("!=", 1)
        if "," in left:
            xs = left.split(",")
            vs = right.split(",")
            if len(xs) != 2 or len(vs) != 2:
                raise UsageError(f"binary fact must look like 'x,y!=a,b', got {tok!r}")
            binary.append(
                (
                    _int_arg(xs[0], "variable"),
                    _int_arg(xs[1], "variable"),
                    _int_arg(vs[0], "value"),
                    _int_arg(vs[1], "value"),
                )
            )
        else:
            unary.append((_int_arg(left, "variable"), _int_arg(right, "value")))
    return dcsp_instance(d, n, unary=unary, binary=binary)


def _parse_mcc(args: list[str]):
    if not args:
        raise UsageError("gen mcc-d21 needs a vertex partition")
    parts = []
    for chunk in args[0].split("/"):
        if not chunk:
            raise UsageError("empty part in partition")
        parts.append([_int_arg(v, "vertex") for v in chunk.split(",")])
    edges = []
    for tok in args[1:]:
        ends = tok.split("-")
        if len(ends) != 2:
            raise UsageError(f"edge must look like 'u-v', got {tok!r}")
        edges.append((_int_arg(ends[0], "vertex"), _int_arg(ends[1], "vertex")))
    return parts, edges


def _mcc_label(parts, edges) -> str:
    size = 1
    for p in parts:
        size *= len(p)
    if size > LABEL_CAP:
        return "UNKNOWN"
    es = {(min(u, v), max(u, v)) for u, v in edges}
    for combo in itertools.product(*parts):
        if all((min(a, b), max(a, b)) in es for a, b in itertools.combinations(combo, 2)):
            return "SAT"
    return "UNSAT"


def _gen_random(args: list[str], seed: int, cap_oracle: int):
    if len(args) != 4:
        raise UsageError("gen random needs: n k constraints max-disjuncts")
    n, k, m, w = (_int_arg(a, "gen random argument") for a in args)
    inst = random_instance(random.Random(seed), n, k, m, w)
    try:
        label = "SAT" if certificate_oracle(inst, cap=cap_oracle) else "UNSAT"
    except ValueError:
        label = "UNKNOWN"
    return inst, label


def _cmd_gen(args) -> int:
    problem = args.problem
    rest = args.args
    if problem == "subset-sum":
        if len(rest) != 2:
            raise UsageError("gen subset-sum needs: <values,comma,separated> <target>")
        values = [_int_arg(v, "value") for v in rest[0].split(",")]
        target = _int_arg(rest[1], "target")
        try:
            inst = gen_subset_sum(values, target)
        except ValueError as e:
            raise UsageError(str(e)) from None
        sums = {0}
        for s in values:
            sums |= {t + s for t in sums}
        label = "SAT" if target in sums else "UNSAT"
    elif problem in ("is-d40", "is-d2", "is-d31"):
        try:
            g = _parse_grid(rest, problem)
            if problem == "is-d40":
                inst, label = gen_is_d40(g), _grid_is_label(g)
            elif problem == "is-d2":
                inst, label = gen_is_d2(g), _grid_is_label(g)
            else:
                inst = gen_is_d31(g, closed_edges=args.closed_edges)
                label = _d31_label(g)
        except ValueError as e:
            raise UsageError(str(e)) from None
    elif problem == "dcsp-d2k":
        try:
            src = _parse_dcsp(rest)
            inst = dcsp_to_d2k(src)
        except ValueError as e:
            raise UsageError(str(e)) from None
        label = _dcsp_label(src)
    elif problem == "mcc-d21":
        try:
            parts, edges = _parse_mcc(rest)
            inst = mpss_to_d21(mcc_to_mpss(parts, edges))
        except ValueError as e:
            raise UsageError(str(e)) from None
        label = _mcc_label(parts, edges)
    else:  # random
        inst, label = _gen_random(rest, args.seed, args.cap_oracle)
    source = {
        "is-d40": "grid-is-d40",
        "is-d2": "grid-is-d2",
        "is-d31": "grid-is-d31",
        "dcsp-d2k": "dcsp",
        "mcc-d21": "multicolored-clique",
    }.get(problem, problem)
    try:
        body = _print_instance(inst)
    except ValueError:
        raise UsageError(
            "these arguments produce an instance with an empty constraint, "
            "which has no text form"
        ) from None
    sys.stdout.write(f"# label: {label} source={source}\n" + body)
    return EXIT_OK


# ---------------------------------------------------------------------------
# sidon / check / bench


def _cmd_sidon(args) -> int:
    s = sidon_set(args.n)
    sys.stdout.write(" ".join(str(e) for e in s.elements) + "\n")
    return EXIT_OK


def _cmd_check(args) -> int:
    inst = parse_instance(_read(args.instance))
    model = parse_model(_read(args.model), inst)
    if model is None:
        print("error: model file contains no assignment", file=sys.stderr)
        return EXIT_INPUT
    for i, name in enumerate(inst.var_names):
        if i not in model:
            print(f"error: unbound variable {name!r}", file=sys.stderr)
            return EXIT_INPUT
    bad = violated_index(inst, model)
    sys.stdout.write("ok\n" if bad is None else f"violated: {bad}\n")
    return EXIT_OK


def _bench_status(algo: str, inst: Instance, width: int | None, cap: int) -> str:
    try:
        sat, _ = _run_algo(algo, inst, width, cap)
    except (UsageError, ValueError):
        return "skipped"
    return "SAT" if sat else "UNSAT"


def _cmd_bench(args) -> int:
    algos = args.algo or ["enumerate"]
    for a in algos:
        if a not in ALGOS:
            raise UsageError(f"unknown algorithm {a!r}")
    rows = ["instance,algorithm,status,agrees_with_oracle,millis"]
    for path in args.paths:
        inst = parse_instance(_read(path))
        try:
            reference = certificate_oracle(inst, cap=args.cap_oracle)
        except ValueError:
            reference = None
        for algo in algos:
            t0 = time.perf_counter()
            status = _bench_status(algo, inst, args.width, args.cap_oracle)
            millis = round((time.perf_counter() - t0) * 1000)
            if status == "skipped" or reference is None:
                agrees = "na"
            else:
                agrees = "yes" if (status == "SAT") == reference else "no"
            rows.append(f"{path},{algo},{status},{agrees},{millis}")
    sys.stdout.write("\n".join(rows) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument wiring


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="dlkit", description="difference-logic solving and benchmark toolkit"
    )
    sub = top.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="decide an instance or formula file")
    solve.add_argument("path", help="input file, or - for stdin")
    solve.add_argument("--algo", choices=ALGOS, default="enumerate")
    solve.add_argument("--width", type=int, help="span for --algo bounded")
    solve.add_argument("--formula", action="store_true", help="input is a formula file")
    solve.add_argument("--output", choices=("status", "model"), default="model")
    solve.add_argument("--cap-oracle", type=int, default=DEFAULT_ORACLE_CAP)
    solve.add_argument("--cap-cnf", type=int, default=DEFAULT_CNF_CAP)
    solve.set_defaults(func=_cmd_solve)

    cert = sub.add_parser("cert", help="list satisfiability certificates")
    cert.add_argument("path")
    cert.add_argument("--cap-oracle", type=int, default=DEFAULT_ORACLE_CAP)
    cert.set_defaults(func=_cmd_cert)

    gen = sub.add_parser("gen", help="emit a labeled benchmark instance")
    gen.add_argument(
        "problem",
        choices=("subset-sum", "is-d40", "is-d31", "is-d2", "dcsp-d2k", "mcc-d21", "random"),
    )
    gen.add_argument("args", nargs="*")
    gen.add_argument("--seed", type=int, default=0, help="rng seed for gen random")
    gen.add_argument("--closed-edges", action="store_true", help="is-d31 integer variant")
    gen.add_argument("--cap-oracle", type=int, default=DEFAULT_ORACLE_CAP)
    gen.set_defaults(func=_cmd_gen)

    sidon = sub.add_parser("sidon", help="print the order-n construction")
    sidon.add_argument("n", type=int)
    sidon.set_defaults(func=_cmd_sidon)

    check = sub.add_parser("check", help="verify a model file against an instance")
    check.add_argument("instance")
    check.add_argument("model")
    check.set_defaults(func=_cmd_check)

    bench = sub.add_parser("bench", help="compare algorithms over instance files")
    bench.add_argument("paths", nargs="+")
    bench.add_argument("--algo", action="append", choices=ALGOS)
    bench.add_argument("--width", type=int)
    bench.add_argument("--cap-oracle", type=int, default=DEFAULT_ORACLE_CAP)
    bench.set_defaults(func=_cmd_bench)

    return top


def main(argv: Iterable[str] | None = None) -> int:
    args = _parser().parse_args(argv if argv is None else list(argv))
    try:
        return args.func(args)
    except (ParseError, InputError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        # library-level caps and fragment guards
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
