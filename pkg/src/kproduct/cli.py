"""Command-line front end.

Exit codes: 0 for yes/success, 1 for no, 2 for errors and exceeded caps.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .decompose import DEFAULT_TOL, factorize, recognize_kproduct
from .matrix_core import MatrixFormatError, RationalMatrix, format_fraction, format_matrix, parse_matrix
from .matroid import MatroidSumTree, base_polytope_slack, hypersimplex_slack, recognize_matroid_slack
from .perfect_graph import GraphFormatError, parse_graph, recognize_stab_slack, stab_slack
from .polyhedra import DEFAULT_MAX_BASES, is_slack_matrix
from .products import k_product

YES, NO, ERROR = 0, 1, 2


class CliError(Exception):
    pass


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}") from None


def _read_matrix(path: str) -> RationalMatrix:
    try:
        return parse_matrix(_read_text(path))
    except MatrixFormatError as exc:
        raise CliError(f"{path}: {exc}") from None


def _indices(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise CliError(f"bad index list {text!r}") from None


def _matrix_json(S: RationalMatrix) -> list[list[str]]:
    return [[format_fraction(x) for x in r] for r in S.rows]


def _shuffle(S: RationalMatrix, seed: int | None) -> RationalMatrix:
    rng = random.Random(seed)
    rows, cols = list(range(S.m)), list(range(S.n))
    rng.shuffle(rows)
    rng.shuffle(cols)
    return S.permuted(rows, cols)


def _emit(args, doc: dict, text: str) -> None:
    out = json.dumps(doc, indent=2, sort_keys=True) + "\n" if args.format == "json" else text
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------


def cmd_decompose(args) -> int:
    S = _read_matrix(args.file)
    if args.k < 1:
        raise CliError("--k must be at least 1")
    tree = recognize_kproduct(S, args.k, tol=args.tol)
    if tree is None:
        _emit(args, {"schema_version": 1, "verdict": "no", "k": args.k}, f"no {args.k}-product decomposition\n")
        return NO
    S1, S2 = tree.left.matrix, tree.right.matrix
    doc = {"verdict": "yes", "k": args.k, **tree.to_json()}
    text = (
        f"yes: {args.k}-product\n"
        f"left factor (special rows {list(tree.special_left)}):\n{format_matrix(S1)}"
        f"right factor (special rows {list(tree.special_right)}):\n{format_matrix(S2)}"
        f"row order: {tree.row_perm}\ncolumn order: {tree.col_perm}\n"
    )
    _emit(args, doc, text)
    return YES


def cmd_factorize(args) -> int:
    S = _read_matrix(args.file)
    blocks, factors = factorize(S, tol=args.tol)
    doc = {
        "schema_version": 1,
        "blocks": [sorted(b) for b in blocks],
        "factors": [_matrix_json(F) for F in factors],
    }
    lines = [f"{len(blocks)} irreducible block(s)"]
    for b, F in zip(blocks, factors):
        lines.append(f"rows {sorted(b)}:")
        lines.append(format_matrix(F).rstrip("\n"))
    _emit(args, doc, "\n".join(lines) + "\n")
    return YES


def cmd_verify_slack(args) -> int:
    S = _read_matrix(args.file)
    if not S.is_nonnegative():
        raise CliError("slack matrices are nonnegative")
    v = is_slack_matrix(S, max_bases=args.max_bases)
    doc = {"schema_version": 1, **v.to_json()}
    text = f"{v.verdict}"
    if v.dimension is not None:
        text += f" (dimension {v.dimension})"
    if v.witness is not None:
        text += "\nwitness: " + " ".join(format_fraction(x) for x in v.witness)
    if v.reason:
        text += f"\n{v.reason}"
    _emit(args, doc, text + "\n")
    return {"yes": YES, "no": NO}.get(v.verdict, ERROR)


def cmd_recognize(args) -> int:
    S = _read_matrix(args.file)
    if not S.is_binary():
        raise CliError("input must be a 0/1 matrix")
    if args.kind == "matroid":
        tree = recognize_matroid_slack(S, tol=args.tol)
        if tree is None:
            _emit(args, {"schema_version": 1, "verdict": "no"}, "no\n")
            return NO
        _emit(args, {"verdict": "yes", **tree.to_json()}, f"yes: {tree}\n")
        return YES
    w = recognize_stab_slack(S)
    if w is None:
        _emit(args, {"schema_version": 1, "verdict": "no"}, "no\n")
        return NO
    edges = " ".join(f"{u}-{v}" for u, v in w.graph.edge_list())
    _emit(args, {"verdict": "yes", **w.to_json()}, f"yes: graph on {w.graph.d} vertices, edges {edges or '(none)'}\n")
    return YES


def _generated(args, S: RationalMatrix) -> int:
    if args.shuffle:
        S = _shuffle(S, args.seed)
    out = format_matrix(S)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return YES


def cmd_generate(args) -> int:
    if args.what == "hypersimplex":
        try:
            return _generated(args, hypersimplex_slack(args.n, args.k))
        except ValueError as exc:
            raise CliError(str(exc)) from None
    if args.what == "stab":
        try:
            G = parse_graph(_read_text(args.graph))
        except GraphFormatError as exc:
            raise CliError(f"{args.graph}: {exc}") from None
        return _generated(args, stab_slack(G))
    if args.what == "matroid-slack":
        try:
            tree = MatroidSumTree.from_json(json.loads(_read_text(args.tree)))
        except (ValueError, KeyError, TypeError) as exc:
            raise CliError(f"{args.tree}: bad matroid tree: {exc}") from None
        return _generated(args, base_polytope_slack(tree))
    S1, S2 = _read_matrix(args.left), _read_matrix(args.right)
    t1, t2 = _indices(args.special_left), _indices(args.special_right)
    if len(t1) != args.k - 1 or len(t2) != args.k - 1:
        raise CliError(f"--k {args.k} needs {args.k - 1} special rows on each side")
    return _generated(args, k_product(S1, t1, S2, t2))


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="float-phase tolerance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1, help="worker cap (computation is single-threaded)")
    common.add_argument("-o", "--output", help="write to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="kproduct", description="k-product decomposition and slack-matrix recognition")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("decompose", parents=[common], help="recognise a k-product")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("file")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("factorize", parents=[common], help="irreducible 1-product factorisation")
    p.add_argument("file")
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("verify-slack", parents=[common], help="decide whether a matrix is a slack matrix")
    p.add_argument("--max-bases", type=int, default=DEFAULT_MAX_BASES)
    p.add_argument("file")
    p.set_defaults(func=cmd_verify_slack)

    p = sub.add_parser("recognize", parents=[common], help="recognise matroid or stable-set slack matrices")
    p.add_argument("kind", choices=("matroid", "perfect-stab"))
    p.add_argument("file")
    p.set_defaults(func=cmd_recognize)

    gen = sub.add_parser("generate", help="generate matrices")
    gsub = gen.add_subparsers(dest="what", required=True)
    shuffle = argparse.ArgumentParser(add_help=False)
    shuffle.add_argument("--shuffle", action="store_true", help="permute rows and columns using --seed")
    g = gsub.add_parser("hypersimplex", parents=[common, shuffle])
    g.add_argument("n", type=int)
    g.add_argument("k", type=int)
    g = gsub.add_parser("stab", parents=[common, shuffle])
    g.add_argument("graph")
    g = gsub.add_parser("matroid-slack", parents=[common, shuffle])
    g.add_argument("tree")
    g = gsub.add_parser("product", parents=[common, shuffle])
    g.add_argument("left")
    g.add_argument("right")
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--special-left")
    g.add_argument("--special-right")
    gen.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ERROR if exc.code else YES
    if args.tol <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return ERROR
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return ERROR
    try:
        return args.func(args)
    except (CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
