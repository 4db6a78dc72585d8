"""Command-line entry point: ``exactsparse <verb> ...``.

Exit status is 0 when every requested check passes, 1 when a check fails
and 2 for unusable input. The ``EXACTSPARSE_WORKERS`` environment variable
(or ``--workers``) sets the number of worker processes.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import io
from .acceptance import SUITES, run_acceptance
from .bipartite import bucket_stars, class_count_report, sparsify_cut_contraction, sparsify_flow_contraction
from .cones import GuardrailError, caratheodory_decompose, enumerate_basic_stars
from .extensions import plan_vertex_integrity, sparsify_vertex_cover, sparsify_vertex_integrity
from .generators import KINDS, InstanceSpec, generate, parse_capacity_spec
from .mcf import Demand, verify_flow_sparsifier
from .mincut import verify_cut_sparsifier
from .parallel import WORKERS_ENV
from .signatures import cut_signature, strong_signature
from .splitting import SplitError, split_demand_detailed
from .treewidth import BLACKBOXES, reduce_detailed
from .validation import as_rational

__all__ = ["main", "build_parser"]


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _vector(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(as_rational(x, nonnegative=True) for x in text.replace(",", " ").split())
    except (TypeError, ValueError) as exc:
        raise UsageError(f"cannot parse capacity vector {text!r}: {exc}") from None


def _ids_or_file(text: str) -> tuple[list[int], int | None]:
    """A vertex list given inline (``1,2,3``) or as a separator sidecar file."""
    if os.path.isfile(text):
        return io.read_separator(text)
    return io.parse_id_list(text), None


def _write_map(path: str, labels: dict[int, int]) -> None:
    lines = "".join(f"m {v} {r}\n" for v, r in sorted(labels.items()))
    Path(path).write_text("# m <original vertex> <vertex in the sparsifier>\n" + lines)


# -- verbs ----------------------------------------------------------------


def _cmd_sparsify(args, strong: bool) -> int:
    g = io.read_network(args.network)
    h = sparsify_flow_contraction(g) if strong else sparsify_cut_contraction(g)
    _emit(io.dump_network(h), args.output)
    if args.output:
        _write_map(args.output + ".map", bucket_stars(g, strong=strong))
    if args.report:
        counts = class_count_report(g)
        print(
            f"stars={len(g.steiner_vertices())} weak_classes={counts.weak_classes} "
            f"strong_classes={counts.strong_classes} output_vertices={h.n}",
            file=sys.stderr,
        )
    return 0


def cmd_sparsify_cut(args) -> int:
    return _cmd_sparsify(args, strong=False)


def cmd_sparsify_flow(args) -> int:
    return _cmd_sparsify(args, strong=True)


def cmd_sparsify_vc(args) -> int:
    g = io.read_network(args.network)
    cover, _ = _ids_or_file(args.cover)
    h = sparsify_vertex_cover(g, cover, mode="flow" if args.flow else "cut")
    _emit(io.dump_network(h), args.output)
    return 0


def cmd_sparsify_vi(args) -> int:
    g = io.read_network(args.network)
    sep, b = _ids_or_file(args.separator)
    b = args.b if args.b is not None else b
    if b is None:
        raise UsageError("the component bound is missing: pass --b or a separator file with a 'b' line")
    h = sparsify_vertex_integrity(g, sep, b, canonicalize=args.canonicalize)
    _emit(io.dump_network(h), args.output)
    if args.report:
        plan = plan_vertex_integrity(g, sep, b, canonicalize=args.canonicalize)
        print(
            f"components={len(plan.instance.components)} signatures={plan.n_signatures} output_vertices={h.n}",
            file=sys.stderr,
        )
    return 0


def cmd_tw_reduce(args) -> int:
    g = io.read_network(args.network)
    td = io.read_tree_decomposition(args.decomposition)
    res = reduce_detailed(g, td, blackbox=args.blackbox, mode="flow" if args.flow else "cut")
    _emit(io.dump_network(res.network), args.output)
    if args.report:
        part = res.partition
        print(
            f"width={res.decomposition.width} y_nodes={len(part.y_set)} regions={len(part.regions)} "
            f"max_region_terminals={max((len(t) for t in res.region_terminals), default=0)} "
            f"output_vertices={res.network.n}",
            file=sys.stderr,
        )
    return 0


def cmd_verify_cut(args) -> int:
    g, h = io.read_network(args.g), io.read_network(args.h)
    rep = verify_cut_sparsifier(g, h, args.quality)
    for v in rep.violations:
        print(f"violation {v}")
    print(f"{'PASS' if rep.passed else 'FAIL'} bipartitions={rep.checked} violations={len(rep.violations)}")
    return 0 if rep.passed else 1


def cmd_verify_flow(args) -> int:
    g, h = io.read_network(args.g), io.read_network(args.h)
    if args.demands:
        demands = io.read_demands(args.demands)
    else:
        from itertools import combinations

        demands = [Demand({p: 1}) for p in combinations(g.terminals, 2)]
    rep = verify_flow_sparsifier(g, h, demands, args.quality)
    for v in rep.violations:
        print(f"violation {v}")
    print(f"{'PASS' if rep.passed else 'FAIL'} demands={rep.checked} violations={len(rep.violations)}")
    return 0 if rep.passed else 1


def cmd_signature(args) -> int:
    g = io.read_network(args.network)
    for v in g.steiner_vertices():
        c = g.capacity_vector(v)
        sig = strong_signature(c) if args.strong else cut_signature(c)
        print(f"{v} {sig.hex()}")
    return 0


def _fmt_vec(vec) -> str:
    return "(" + ", ".join(io.format_rational(x) for x in vec) + ")"


def cmd_decompose(args) -> int:
    g = io.read_network(args.network)
    for v in g.steiner_vertices():
        c = g.capacity_vector(v)
        if not any(c):
            continue
        dec = caratheodory_decompose(c, strong=args.strong, unsafe=args.unsafe)
        terms = " + ".join(f"{io.format_rational(lam)}*{_fmt_vec(r.coords)}" for r, lam in dec.terms)
        print(f"{v} {_fmt_vec(c)} = {terms}")
    return 0


def cmd_enumerate_rays(args) -> int:
    rays = enumerate_basic_stars(args.k, strong=args.strong, unsafe=args.unsafe)
    for r in rays:
        print(" ".join(io.format_rational(x) for x in r.coords))
    print(f"# {len(rays)} rays", file=sys.stderr)
    return 0


def cmd_split_demand(args) -> int:
    c1, c2 = _vector(args.c1), _vector(args.c2)
    demands = io.read_demands(args.demands)
    if len(demands) != 1:
        raise UsageError("split-demand takes a file with exactly one demand")
    res = split_demand_detailed(c1, c2, demands[0])
    _emit(io.dump_demands([res.d1, res.d2]), args.output)
    print(f"iterations={res.iterations} rotations={res.rotations} bound={res.bound}", file=sys.stderr)
    return 0


def cmd_generate(args) -> int:
    spec = InstanceSpec(
        kind=args.kind,
        k=args.k,
        n=args.n,
        a=args.a,
        b=args.b,
        w=args.w,
        capacity=parse_capacity_spec(args.capacity),
        seed=args.seed,
    )
    inst = generate(spec)
    if args.output:
        for p in inst.write(args.output):
            print(p)
    else:
        sys.stdout.write(inst.files()[".net"])
    return 0


def cmd_accept(args) -> int:
    report = run_acceptance(
        args.suite,
        scale=args.scale,
        fault_injection=args.fault_injection,
        summary_path=args.summary,
        echo=print,
    )
    print("ALL PASS" if report.passed else "SOME CRITERIA FAILED")
    return 0 if report.passed else 1


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="exactsparse", description="Exact cut and flow sparsifiers with exact verification.")
    p.add_argument("--workers", type=int, help=f"worker processes (overrides {WORKERS_ENV}; 0 = all cores)")
    sub = p.add_subparsers(dest="verb", required=True, metavar="verb")

    def network_cmd(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("network", help="network file")
        sp.add_argument("-o", "--output", help="write the result here instead of standard output")
        sp.set_defaults(fn=fn)
        return sp

    for name, fn, what in (
        ("sparsify-cut", cmd_sparsify_cut, "cut signatures"),
        ("sparsify-flow", cmd_sparsify_flow, "strong signatures"),
    ):
        sp = network_cmd(name, fn, f"contract stars with equal {what} (quasi-bipartite input)")
        sp.add_argument("--report", action="store_true", help="print class counts to standard error")

    sp = network_cmd("sparsify-vc", cmd_sparsify_vc, "sparsify around a vertex cover")
    sp.add_argument("--cover", required=True, help="cover ids (comma separated) or a separator file")
    sp.add_argument("--flow", action="store_true", help="use strong signatures (flow sparsifier)")

    sp = network_cmd("sparsify-vi", cmd_sparsify_vi, "sparsify around a separator with small components")
    sp.add_argument("--separator", required=True, help="separator ids (comma separated) or a separator file")
    sp.add_argument("--b", type=int, help="component size bound")
    sp.add_argument("--canonicalize", action="store_true", help="merge differently labeled isomorphic components")
    sp.add_argument("--report", action="store_true", help="print component counts to standard error")

    sp = network_cmd("tw-reduce", cmd_tw_reduce, "region-wise sparsification along a tree decomposition")
    sp.add_argument("decomposition", help="tree decomposition in PACE .td format")
    sp.add_argument("--blackbox", choices=sorted(BLACKBOXES), default="mimick")
    sp.add_argument("--flow", action="store_true", help="flow mode (identity black box only)")
    sp.add_argument("--report", action="store_true", help="print Y-set and region statistics to standard error")

    sp = sub.add_parser("verify-cut", help="check every terminal bipartition exactly")
    sp.add_argument("g")
    sp.add_argument("h")
    sp.add_argument("--quality", type=Fraction, default=Fraction(1))
    sp.set_defaults(fn=cmd_verify_cut)

    sp = sub.add_parser("verify-flow", help="compare exact flow factors on demands")
    sp.add_argument("g")
    sp.add_argument("h")
    sp.add_argument("demands", nargs="?", help="demand file (default: every single-pair unit demand)")
    sp.add_argument("--quality", type=Fraction, default=Fraction(1))
    sp.set_defaults(fn=cmd_verify_flow)

    sp = sub.add_parser("signature", help="hex signature of every Steiner vertex")
    sp.add_argument("network")
    sp.add_argument("--strong", action="store_true")
    sp.set_defaults(fn=cmd_signature)

    sp = sub.add_parser("decompose", help="conic decomposition of every star into basic stars")
    sp.add_argument("network")
    sp.add_argument("--strong", action="store_true")
    sp.add_argument("--unsafe", action="store_true", help="lift the size guardrail")
    sp.set_defaults(fn=cmd_decompose)

    sp = sub.add_parser("enumerate-rays", help="list all basic stars for k terminals")
    sp.add_argument("k", type=int)
    sp.add_argument("--strong", action="store_true")
    sp.add_argument("--unsafe", action="store_true", help="lift the size guardrail")
    sp.set_defaults(fn=cmd_enumerate_rays)

    sp = sub.add_parser("split-demand", help="split a merged-star demand between two agreeing stars")
    sp.add_argument("c1", help="first capacity vector, e.g. 1,2,3/2")
    sp.add_argument("c2", help="second capacity vector")
    sp.add_argument("demands", help="demand file over terminal indices 0..k-1")
    sp.add_argument("-o", "--output")
    sp.set_defaults(fn=cmd_split_demand)

    sp = sub.add_parser("generate", help="write a seeded random instance")
    sp.add_argument("kind", choices=KINDS)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--a", type=int)
    sp.add_argument("--b", type=int)
    sp.add_argument("--w", type=int)
    sp.add_argument("--capacity", default="uniform-rational(1,64,16)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output", help="file prefix; writes <prefix>.net and any sidecar")
    sp.set_defaults(fn=cmd_generate)

    sp = sub.add_parser("accept", help="run the acceptance suite")
    sp.add_argument("suite", nargs="?", default="all", choices=sorted(SUITES))
    sp.add_argument("--fault-injection", action="store_true", help="corrupt contraction outputs (negative control)")
    sp.add_argument("--summary", help="write one JSON record per criterion to this file")
    sp.add_argument("--scale", type=float, default=1.0, help="instance count multiplier")
    sp.set_defaults(fn=cmd_accept)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers is not None:
        os.environ[WORKERS_ENV] = str(args.workers)
    try:
        return args.fn(args)
    except (UsageError, io.FormatError, GuardrailError, SplitError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"exactsparse {args.verb}: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
