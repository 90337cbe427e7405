"""Command-line front end: evaluation, Gram matrices, connection
coefficients, and the identity-verification suites, all as JSON.

Exit codes: 0 success (and all checks pass), 1 a verification suite
found a failing identity, 2 configuration error, 3 arithmetic error,
4 the requested tree pair is not reachable by right-to-left moves.
Output on stdout is byte-deterministic for a fixed configuration;
timing goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .connect import (
    connection_by_path,
    connection_oracle,
    gr_correspondence_check,
    three_dim_racah_example_check,
)
from .hahn1d import verify_hahn_recurrences, vandermonde_sum_check
from .lattice import GridFunction, ParamSet, inner_product
from .multihahn import basis, eval_Q, norm_Q, verify_eigen
from .qnum import QContext
from .qops import spectral_decomposition_check, verify_operator_algebra
from .trees import (
    NotRightReachable,
    all_trees,
    enumerate_labelings,
    find_rl_path,
    parse_tree,
)

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_CONFIG = 2
EXIT_ARITHMETIC = 3
EXIT_REACHABILITY = 4

DEMO_ALPHAS = ("1/2", "1/3", "2/3", "3/5", "4/7")


class ConfigError(ValueError):
    """Bad command-line configuration."""


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a rational number: {text!r}") from exc


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"not a comma-separated integer list: {text!r}") from exc


def _build_params(args, h: int) -> ParamSet:
    sqrt_q = _parse_rational(args.sqrt_q)
    try:
        ctx = QContext(sqrt_q)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.alphas is None:
        if h > len(DEMO_ALPHAS):
            raise ConfigError(
                f"no default parameters for {h} leaves; pass --alphas"
            )
        alphas = tuple(Fraction(a) for a in DEMO_ALPHAS[:h])
    else:
        alphas = tuple(_parse_rational(a) for a in args.alphas.split(","))
        if len(alphas) != h:
            raise ConfigError(
                f"need {h} parameters for {h} leaves, got {len(alphas)}"
            )
    try:
        return ParamSet(ctx, alphas, unchecked=args.allow_any_params)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _emit(args, obj) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _parse_tree_arg(text: str):
    return parse_tree(text)


def cmd_eval(args) -> int:
    tree = _parse_tree_arg(args.tree)
    params = _build_params(args, tree.h)
    if args.labels is None:
        raise ConfigError("eval requires --labels")
    labels = _parse_int_list(args.labels)
    if len(labels) != tree.n_internal:
        raise ConfigError(
            f"tree has {tree.n_internal} internal vertices, got "
            f"{len(labels)} labels"
        )
    if any(v < 0 for v in labels):
        raise ConfigError("labels must be nonnegative")
    N = args.N
    if N is None:
        raise ConfigError("eval requires --N")
    if sum(labels) > N:
        raise ConfigError(f"degree {sum(labels)} exceeds level {N}")
    if args.all:
        points = GridFunction.zero(tree.h, N).domain()
    elif args.x is not None:
        point = _parse_int_list(args.x)
        if len(point) != tree.h or any(v < 0 for v in point):
            raise ConfigError(f"point must be {tree.h} nonnegative integers")
        if sum(point) != N:
            raise ConfigError(f"point must sum to N={N}")
        points = [point]
    else:
        raise ConfigError("eval requires --x or --all")
    values = [
        {"x": list(x), "v": str(eval_Q(tree, labels, params, x))}
        for x in points
    ]
    _emit(
        args,
        {
            "tree": tree.serialize(),
            "labels": list(labels),
            "sqrt_q": str(params.ctx.s),
            "alphas": [str(a) for a in params.alphas],
            "N": N,
            "values": values,
        },
    )
    return EXIT_OK


def cmd_gram(args) -> int:
    tree = _parse_tree_arg(args.tree)
    params = _build_params(args, tree.h)
    N = args.N
    if N is None:
        raise ConfigError("gram requires --N")
    if N < 0:
        raise ConfigError("--N must be nonnegative")
    elements = []
    degrees = []
    for n in range(N + 1):
        level = basis(tree, params, n, N)
        degrees.append({"n": n, "count": len(level)})
        elements.extend(level)
    entries = []
    diagonal = True
    norms_match = True
    for i, ei in enumerate(elements):
        for j in range(i, len(elements)):
            value = inner_product(ei.grid, elements[j].grid, params)
            if value != 0:
                entries.append({"i": i, "j": j, "value": str(value)})
                if i != j:
                    diagonal = False
            if i == j and value != ei.norm_squared():
                norms_match = False
    _emit(
        args,
        {
            "tree": tree.serialize(),
            "N": N,
            "dimension": len(elements),
            "degrees": degrees,
            "entries": entries,
            "diagonal": diagonal,
            "norms_match_closed_form": norms_match,
        },
    )
    return EXIT_OK


def cmd_connect(args) -> int:
    source = _parse_tree_arg(args.source)
    target = _parse_tree_arg(args.target)
    if source.h != target.h:
        raise ConfigError("source and target must have the same leaf count")
    params = _build_params(args, source.h)
    n = args.n
    if n is None or n < 0:
        raise ConfigError("connect requires a nonnegative --n")
    if args.oracle_only:
        matrix = connection_oracle(source, target, n, params)
        oracle_checked = True
    else:
        matrix = connection_by_path(source, target, n, params)
        oracle = connection_oracle(source, target, n, params)
        if matrix.rows != oracle.rows:
            raise ArithmeticError(
                "path product disagrees with the inner-product oracle"
            )
        oracle_checked = True
    obj = matrix.to_json_obj()
    obj["oracle_checked"] = oracle_checked
    _emit(args, obj)
    return EXIT_OK


def _suite_operator_algebra(params, h, N, seed):
    return verify_operator_algebra(h, N, params, seed=seed)


def _suite_spectral(params, h, N, seed):
    return [spectral_decomposition_check(h, N, params)]


def _suite_hahn_recurrences(params, h, N, seed):
    ctx = params.ctx
    return verify_hahn_recurrences(ctx, params.alphas[0], params.alphas[1], N)


def _suite_vandermonde(params, h, N, seed):
    ctx = params.ctx
    cases = 0
    ok = True
    for n in range(N + 1):
        for j in range(n + 1):
            cases += 1
            if not vandermonde_sum_check(
                ctx, n, j, params.alphas[0], params.alphas[1]
            ):
                ok = False
    return [
        {
            "identity": "alternating-seed-sum",
            "cases": cases,
            "status": "pass" if ok else "fail",
        }
    ]


def _suite_eigen(params, h, N, seed):
    reports = []
    for tree in all_trees(h):
        ok = True
        cases = 0
        for n in range(min(N, 2) + 1):
            for labeling in enumerate_labelings(tree, n):
                cases += 1
                rep = verify_eigen(tree, labeling, params, N)
                if rep["status"] != "pass":
                    ok = False
        reports.append(
            {
                "identity": "vertex-eigenvalues",
                "tree": tree.serialize(),
                "cases": cases,
                "status": "pass" if ok else "fail",
            }
        )
    return reports


def _suite_connections(params, h, N, seed):
    trees = all_trees(h)
    n_max = min(N, 2)
    pairs = 0
    ok = True
    for src in trees:
        for tgt in trees:
            try:
                path = find_rl_path(src, tgt)
            except NotRightReachable:
                continue
            pairs += 1
            for n in range(n_max + 1):
                by_path = connection_by_path(src, tgt, n, params, path=path)
                oracle = connection_oracle(src, tgt, n, params)
                if by_path.rows != oracle.rows:
                    ok = False
                if not by_path.orthogonality_check():
                    ok = False
    return [
        {
            "identity": "connection-path-vs-oracle",
            "reachable_pairs": pairs,
            "degrees": n_max + 1,
            "status": "pass" if ok else "fail",
        }
    ]


def _suite_classical_bridge(params, h, N, seed):
    return [gr_correspondence_check(params, n) for n in range(min(N, 2) + 1)]


def _suite_worked_example(params, h, N, seed):
    return [
        three_dim_racah_example_check(params, n) for n in range(min(N, 2) + 1)
    ]


SUITES = {
    "operator-algebra": (_suite_operator_algebra, None),
    "spectral": (_suite_spectral, None),
    "hahn-recurrences": (_suite_hahn_recurrences, None),
    "vandermonde": (_suite_vandermonde, None),
    "eigen": (_suite_eigen, None),
    "connections": (_suite_connections, None),
    "classical-bridge": (_suite_classical_bridge, None),
    "worked-example": (_suite_worked_example, 5),
}


def cmd_verify(args) -> int:
    h = args.h
    N = args.N
    if h < 2:
        raise ConfigError("--h must be at least 2")
    if N < 0:
        raise ConfigError("--N must be nonnegative")
    params = _build_params(args, h)
    if args.suite == "all":
        names = [
            name
            for name, (_, need_h) in SUITES.items()
            if need_h is None or need_h == h
        ]
    else:
        if args.suite not in SUITES:
            raise ConfigError(
                f"unknown suite {args.suite!r}; choose from "
                f"{', '.join(sorted(SUITES))} or 'all'"
            )
        runner, need_h = SUITES[args.suite]
        if need_h is not None and need_h != h:
            raise ConfigError(
                f"suite {args.suite!r} requires --h {need_h}"
            )
        names = [args.suite]
    threads = int(os.environ.get("QTREE_THREADS", "1"))
    started = time.monotonic()

    def run(name):
        return SUITES[name][0](params, h, N, args.seed)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, names))
    else:
        results = [run(name) for name in names]
    elapsed = time.monotonic() - started
    suites = []
    all_pass = True
    for name, reports in zip(names, results):
        suite_pass = all(r.get("status") == "pass" for r in reports)
        if not suite_pass:
            all_pass = False
        suites.append(
            {
                "suite": name,
                "reports": reports,
                "status": "pass" if suite_pass else "fail",
            }
        )
    _emit(
        args,
        {
            "h": h,
            "N": N,
            "sqrt_q": str(params.ctx.s),
            "alphas": [str(a) for a in params.alphas],
            "suites": suites,
            "status": "pass" if all_pass else "fail",
        },
    )
    print(f"verify: {len(names)} suite(s) in {elapsed:.2f}s", file=sys.stderr)
    return EXIT_OK if all_pass else EXIT_CHECKS_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtree",
        description="Exact tree-indexed q-Hahn bases and q-Racah "
        "connection coefficients.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--sqrt-q", default="1/2", help="rational square root of q (default 1/2)")
        p.add_argument("--alphas", default=None, help="comma-separated rational parameters, one per leaf")
        p.add_argument("--allow-any-params", action="store_true", help="skip the positivity band check on the parameters")
        p.add_argument("--out", default=None, help="write JSON here instead of stdout")

    p_eval = sub.add_parser("eval", help="evaluate one basis function")
    p_eval.add_argument("--tree", required=True)
    p_eval.add_argument("--labels", default=None, help="comma-separated vertex labels in pre-order")
    p_eval.add_argument("--N", type=int, default=None)
    p_eval.add_argument("--x", default=None, help="one lattice point, comma-separated")
    p_eval.add_argument("--all", action="store_true", help="evaluate on the whole level")
    common(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_gram = sub.add_parser("gram", help="Gram matrix of the full level-N basis")
    p_gram.add_argument("--tree", required=True)
    p_gram.add_argument("--N", type=int, default=None)
    common(p_gram)
    p_gram.set_defaults(func=cmd_gram)

    p_conn = sub.add_parser("connect", help="connection coefficients between two trees")
    p_conn.add_argument("--source", required=True)
    p_conn.add_argument("--target", required=True)
    p_conn.add_argument("--n", type=int, default=None)
    p_conn.add_argument("--oracle-only", action="store_true", help="use the inner-product definition only (works for unreachable pairs)")
    common(p_conn)
    p_conn.set_defaults(func=cmd_connect)

    p_ver = sub.add_parser("verify", help="run identity-verification suites")
    p_ver.add_argument("--suite", default="all")
    p_ver.add_argument("--h", type=int, default=3)
    p_ver.add_argument("--N", type=int, default=3)
    p_ver.add_argument("--seed", type=int, default=0)
    common(p_ver)
    p_ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NotRightReachable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REACHABILITY
    except ArithmeticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARITHMETIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
