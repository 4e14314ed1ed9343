"""Command-line interface.

Exit codes: 0 success / yes / valid, 1 no / invalid, 2 unknown (a search
limit was hit), 64 usage error, 65 malformed input, 66 unreadable file.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable

from . import formats
from .bramble import min_hitting_set, verify_bramble
from .constructions import (
    GridParams,
    grid_bramble,
    grid_display_graph,
    grid_embedding,
    grid_network,
    grid_path_decomposition,
    grid_suppressed_display_graph,
    grid_tree,
)
from .core import (
    LabeledGraph,
    PhyloNetwork,
    PhyloTree,
    build_display_graph,
    level,
    reticulation_number,
    suppress,
)
from .display import displays_via_quartets, find_display, quartet_set, verify_embedding
from .errors import BudgetExceeded, DisplayGraphError, LimitExceeded
from .recognition import is_display_graph
from .transforms import bound_bundle
from .treewidth import exact_treewidth, validate_decomposition

EX_USAGE, EX_DATAERR, EX_NOINPUT = 64, 65, 66


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EX_USAGE)


# ---------------------------------------------------------------------------
# input / output helpers


class _Ctx:
    def __init__(self, args):
        self.args = args
        self._stdin = None
        self.text: list[str] = []

    def read(self, path: str) -> str:
        if path == "-":
            if self._stdin is None:
                self._stdin = sys.stdin.read()
            return self._stdin
        try:
            with open(path, encoding="utf-8") as fh:
                return fh.read()
        except (OSError, UnicodeDecodeError) as exc:
            raise InputError(f"cannot read {path}: {exc}") from None

    def emit(self, kind: str, text: str | None = None, **fields) -> None:
        """One output record; text mode prints ``text`` (or key=value)."""
        if self.args.format == "json-lines":
            rec = {"record": kind, **fields}
            self.text.append(json.dumps(rec, sort_keys=True, default=_jsonable))
        else:
            if text is None:
                text = " ".join(f"{k}={_plain(v)}" for k, v in fields.items())
                text = f"{kind} {text}".rstrip()
            self.text.append(text)

    def raw(self, text: str) -> None:
        self.text.append(text.rstrip("\n"))

    def flush(self) -> None:
        out = "\n".join(self.text)
        if out:
            out += "\n"
        if self.args.out and self.args.out != "-":
            try:
                with open(self.args.out, "w", encoding="utf-8") as fh:
                    fh.write(out)
            except OSError as exc:
                raise InputError(f"cannot write {self.args.out}: {exc}") from None
        else:
            sys.stdout.write(out)


def _jsonable(x):
    if isinstance(x, (set, frozenset, tuple)):
        return sorted(x, key=str) if isinstance(x, (set, frozenset)) else list(x)
    return str(x)


def _plain(v) -> str:
    if isinstance(v, (set, frozenset)):
        return ",".join(sorted(map(str, v)))
    if isinstance(v, (list, tuple)):
        return ",".join(map(str, v))
    return str(v)


def _load_structure(ctx: _Ctx, path: str):
    """Edge-list network (``#taxa`` header) or Newick tree."""
    text = ctx.read(path)
    if text.lstrip().lower().startswith("#taxa"):
        return formats.parse_network_edgelist(text)
    return formats.parse_newick(text.strip())


def _load_tree(ctx: _Ctx, path: str) -> PhyloTree:
    obj = _load_structure(ctx, path)
    if isinstance(obj, PhyloNetwork):
        return PhyloTree(obj.graph)
    return obj


def _load_network(ctx: _Ctx, path: str) -> PhyloNetwork:
    obj = _load_structure(ctx, path)
    return obj if isinstance(obj, PhyloNetwork) else PhyloNetwork.from_tree(obj)


def _split_bundle(text: str) -> tuple[str, str | None]:
    """A stream holding a .gr block followed by a .td block."""
    lines = text.splitlines()
    for i, line in enumerate(lines):
        if line.strip().startswith("s td"):
            gr = "\n".join(lines[:i])
            if "p tw" in gr:
                return gr, "\n".join(lines[i:])
            return text, None
    return text, None


def _load_graph(ctx: _Ctx, path: str) -> LabeledGraph:
    text = ctx.read(path)
    gr, _ = _split_bundle(text)
    return formats.read_graph(gr)


def _grid(args) -> GridParams:
    return GridParams(args.r, args.n)


# ---------------------------------------------------------------------------
# subcommands


def cmd_build_display(ctx: _Ctx) -> int:
    a = _load_structure(ctx, ctx.args.first)
    b = _load_structure(ctx, ctx.args.second)
    d = build_display_graph(a, b).graph
    if ctx.args.suppress:
        d = suppress(d)
    if ctx.args.emit == "edgelist":
        ctx.raw(formats.write_network_edgelist(d))
    else:
        ctx.raw(formats.write_gr(d, names=True))
    return 0


def cmd_treewidth(ctx: _Ctx) -> int:
    g = _load_graph(ctx, ctx.args.graph)
    try:
        w, td = exact_treewidth(
            g, budget=ctx.args.budget, node_limit=ctx.args.limit_nodes, time_limit=ctx.args.time_limit
        )
    except BudgetExceeded as exc:
        ctx.emit("treewidth", status="unknown", lb=exc.lb, ub=exc.ub)
        return 2
    ctx.emit("treewidth", status="exact", width=w, vertices=g.n, edges=g.m)
    if ctx.args.td_out:
        _write_file(ctx.args.td_out, formats.write_td(td, g))
    return 0


def _write_file(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from None


def cmd_validate_td(ctx: _Ctx) -> int:
    gtext = ctx.read(ctx.args.graph)
    gr, td_text = _split_bundle(gtext)
    g = formats.read_graph(gr)
    if ctx.args.td not in (None, "-") or td_text is None:
        td_text = ctx.read(ctx.args.td or "-")
        _, inner = _split_bundle(td_text)
        td_text = inner if inner is not None else td_text
    td = formats.read_td(td_text, g)
    rep = validate_decomposition(g, td)
    for v in rep.violations:
        ctx.emit("violation", kind=v.kind, witness=_plain(v.witness), detail=v.detail)
    ctx.emit("decomposition", status="valid" if rep.valid else "invalid", width=td.width, bags=len(td.bags))
    return 0 if rep.valid else 1


def cmd_check_display(ctx: _Ctx) -> int:
    n = _load_network(ctx, ctx.args.network)
    t = _load_tree(ctx, ctx.args.tree)
    try:
        cert = find_display(n, t, node_limit=ctx.args.limit_nodes)
    except LimitExceeded as exc:
        ctx.emit("display", status="unknown", **{k: v for k, v in exc.stats.items()})
        return 2
    if cert is None:
        ctx.emit("display", status="no")
        return 1
    ok = verify_embedding(n, t, cert).valid
    ctx.emit("display", status="yes", verified=ok, image_edges=len(cert.image_edges))
    if ctx.args.certificate_out:
        _write_file(ctx.args.certificate_out, formats.write_certificate(cert, n, t))
    return 0


def cmd_bounds(ctx: _Ctx) -> int:
    a = ctx.args
    bramble = None
    if a.r is not None or a.n is not None:
        if a.r is None or a.n is None:
            raise UsageError("--r and --n go together")
        p = _grid(a)
        n, t = grid_network(p), grid_tree(p)
        cert = grid_embedding(p)
        td_n = grid_path_decomposition(p)
        bramble = grid_bramble(p)
    else:
        if not a.network or not a.tree:
            raise UsageError("bounds needs --network and --tree, or --r and --n")
        n, t = _load_network(ctx, a.network), _load_tree(ctx, a.tree)
        try:
            cert = find_display(n, t, node_limit=a.limit_nodes)
        except LimitExceeded:
            ctx.emit("bounds", status="unknown", reason="display search limit")
            return 2
        if cert is None:
            ctx.emit("bounds", status="not-displayed")
            return 1
        td_n = None
        if a.bramble:
            bramble = formats.read_bramble(ctx.read(a.bramble))
    b = bound_bundle(n, t, cert, td_n=td_n)
    ctx.emit(
        "bounds",
        two_tw_plus_1=b.two_tw_plus_1,
        retic_plus_2=b.retic_plus_2,
        level_plus_2=b.level_plus_2,
        min=b.min,
        lemma2_width=b.lemma2_width,
        lemma3_width=b.lemma3_width,
        r=reticulation_number(n),
        level=level(n),
    )
    if bramble is not None:
        d = build_display_graph(n, t).graph
        host = d if verify_bramble(d, bramble).valid else suppress(d)
        rep = verify_bramble(host, bramble)
        if not rep.valid:
            ctx.emit("bramble", status="invalid", violations=len(rep.violations))
            return 1
        try:
            order, _ = min_hitting_set(host, bramble, node_limit=a.limit_nodes)
        except LimitExceeded:
            ctx.emit("bramble", status="unknown")
            return 2
        ctx.emit("bramble", status="valid", order=order, tw_lower_bound=order - 1)
    return 0


def _bramble_inputs(ctx: _Ctx):
    g = _load_graph(ctx, ctx.args.graph)
    b = formats.read_bramble(ctx.read(ctx.args.bramble))
    return g, b


def cmd_verify_bramble(ctx: _Ctx) -> int:
    g, b = _bramble_inputs(ctx)
    rep = verify_bramble(g, b)
    for v in rep.violations:
        ctx.emit("violation", kind=v.kind, witness=_plain(v.witness), detail=v.detail)
    ctx.emit("bramble", status="valid" if rep.valid else "invalid", elements=len(b))
    return 0 if rep.valid else 1


def cmd_hitting_set(ctx: _Ctx) -> int:
    g, b = _bramble_inputs(ctx)
    try:
        k, hs = min_hitting_set(g, b, node_limit=ctx.args.limit_nodes)
    except LimitExceeded as exc:
        ctx.emit("hitting-set", status="unknown", **exc.stats)
        return 2
    names = sorted(g.display_name(v) for v in hs)
    ctx.emit("hitting-set", status="exact", order=k, tw_lower_bound=k - 1, vertices=names)
    return 0


def cmd_generate_grid(ctx: _Ctx) -> int:
    p = _grid(ctx.args)
    emit = ctx.args.emit
    if emit == "network":
        ctx.raw(formats.write_network_edgelist(grid_network(p)))
    elif emit == "tree":
        ctx.raw(formats.write_newick(grid_tree(p)))
    elif emit == "embedding":
        ctx.raw(formats.write_certificate(grid_embedding(p), grid_network(p), grid_tree(p)))
    elif emit == "td":
        g = grid_network(p).graph
        ctx.raw(formats.write_gr(g, names=True))
        ctx.raw(formats.write_td(grid_path_decomposition(p), g))
    elif emit == "bramble":
        ctx.raw(formats.write_bramble(grid_bramble(p)))
    elif emit == "display":
        ctx.raw(formats.write_gr(grid_display_graph(p).graph, names=True))
    elif emit == "display-suppressed":
        ctx.raw(formats.write_gr(grid_suppressed_display_graph(p), names=True))
    return 0


def cmd_recognize(ctx: _Ctx) -> int:
    g = _load_graph(ctx, ctx.args.graph)
    v = is_display_graph(g, node_limit=ctx.args.limit_nodes)
    if v.status == "yes":
        t1, t2 = v.trees
        ctx.emit("recognize", status="yes", taxa=len(v.taxa))
        ctx.emit("tree", formats.write_newick(t1), side=1, newick=formats.write_newick(t1))
        ctx.emit("tree", formats.write_newick(t2), side=2, newick=formats.write_newick(t2))
        return 0
    ctx.emit("recognize", status=v.status, reason=v.reason)
    return 1 if v.status == "no" else 2


def cmd_quartets(ctx: _Ctx) -> int:
    t = _load_tree(ctx, ctx.args.tree)
    if ctx.args.network:
        n = _load_network(ctx, ctx.args.network)
        try:
            ok = displays_via_quartets(n, t, limit=ctx.args.limit_nodes)
        except LimitExceeded:
            ctx.emit("quartets", status="unknown")
            return 2
        ctx.emit("quartets", status="yes" if ok else "no")
        return 0 if ok else 1
    qs = sorted(quartet_set(t))
    for q in qs:
        ctx.emit("quartet", str(q), quartet=str(q))
    ctx.emit("quartets", f"# {len(qs)} quartets", count=len(qs))
    return 0


def cmd_generate_random(ctx: _Ctx) -> int:
    from .generators import random_displayed_tree, random_network, random_tree

    a = ctx.args
    if a.taxa < 3:
        raise UsageError("--taxa must be at least 3")
    n = random_network(a.taxa, a.reticulations, a.seed)
    if a.emit == "network":
        ctx.raw(formats.write_network_edgelist(n))
    elif a.emit == "displayed-tree":
        ctx.raw(formats.write_newick(random_displayed_tree(n, a.seed)))
    else:
        ctx.raw(formats.write_newick(random_tree(n.taxa, a.seed)))
    return 0


# ---------------------------------------------------------------------------
# parser


def _global_options(p: argparse.ArgumentParser, default) -> None:
    p.add_argument("--limit-nodes", type=int, default=default(1_000_000), help="search node budget")
    p.add_argument("--seed", type=int, default=default(0), help="seed for random generators")
    p.add_argument("--format", choices=("text", "json-lines"), default=default("text"))
    p.add_argument("--out", default=default(None), help="write output here instead of stdout")
    p.add_argument("--threads", type=int, default=default(1), help="parallelism cap (searches are sequential)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="displaygraph", description="Display graphs of phylogenetic trees and networks.")
    _global_options(parser, lambda v: v)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    suppressed = lambda v: argparse.SUPPRESS  # noqa: E731

    def add(name: str, fn: Callable, help: str):
        p = sub.add_parser(name, help=help)
        _global_options(p, suppressed)
        p.set_defaults(func=fn)
        return p

    p = add("build-display", cmd_build_display, "display graph of two trees/networks")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--suppress", action="store_true", help="erase labels and suppress degree-2 vertices")
    p.add_argument("--emit", choices=("gr", "edgelist"), default="gr")

    p = add("treewidth", cmd_treewidth, "exact treewidth of a graph")
    p.add_argument("graph")
    p.add_argument("--budget", type=int, default=24, help="largest block solved by subset DP")
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--td-out", default=None, help="write the witnessing decomposition (.td)")

    p = add("validate-td", cmd_validate_td, "check a tree decomposition")
    p.add_argument("td", nargs="?", default=None, help=".td file (default: stdin or the --graph bundle)")
    p.add_argument("--graph", required=True)

    p = add("check-display", cmd_check_display, "does the network display the tree?")
    p.add_argument("--network", required=True)
    p.add_argument("--tree", required=True)
    p.add_argument("--certificate-out", default=None)

    p = add("bounds", cmd_bounds, "upper-bound bundle and optional bramble lower bound")
    p.add_argument("--network")
    p.add_argument("--tree")
    p.add_argument("--bramble")
    p.add_argument("--r", type=int)
    p.add_argument("--n", type=int)

    p = add("verify-bramble", cmd_verify_bramble, "check a bramble against a graph")
    p.add_argument("bramble")
    p.add_argument("--graph", required=True)

    p = add("hitting-set", cmd_hitting_set, "bramble order by exact minimum hitting set")
    p.add_argument("bramble")
    p.add_argument("--graph", required=True)

    p = add("generate-grid", cmd_generate_grid, "grid-family instances")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument(
        "--emit",
        required=True,
        choices=("network", "tree", "embedding", "td", "bramble", "display", "display-suppressed"),
    )

    p = add("generate-random", cmd_generate_random, "seeded random network and trees")
    p.add_argument("--taxa", type=int, required=True)
    p.add_argument("--reticulations", type=int, default=1)
    p.add_argument("--emit", choices=("network", "displayed-tree", "tree"), default="network")

    p = add("recognize", cmd_recognize, "is a cubic graph a suppressed display graph?")
    p.add_argument("graph")

    p = add("quartets", cmd_quartets, "quartets of a tree, or the quartet display oracle")
    p.add_argument("--tree", required=True)
    p.add_argument("--network", default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    ctx = _Ctx(args)
    try:
        code = args.func(ctx)
    except UsageError as exc:
        print(f"displaygraph: error: {exc}", file=sys.stderr)
        return EX_USAGE
    except InputError as exc:
        print(f"displaygraph: {exc}", file=sys.stderr)
        return EX_NOINPUT
    except (DisplayGraphError, ValueError) as exc:
        print(f"displaygraph: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EX_DATAERR
    try:
        ctx.flush()
    except InputError as exc:
        print(f"displaygraph: {exc}", file=sys.stderr)
        return EX_NOINPUT
    return code


if __name__ == "__main__":
    sys.exit(main())
