"""``svnkit`` command line.

Every command writes into an output directory together with a
``manifest.json`` describing the run.  Exit status: 0 success, 2 usage or
input validation error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import math
import os
import sys
import warnings
from pathlib import Path

from . import __version__
from .benchmark import BenchmarkSpec, RewirePlan, generate, rewire, robustness_experiment
from .community import (
    MetricUndefinedError,
    Partition,
    adjusted_rand,
    adjusted_wallace,
    louvain,
    modularity,
    pair_contingency,
    read_partition,
    write_partition,
)
from .disparity import disparity_backbone, write_backbone
from .graph import FormatError, load_bipartite, load_weighted, project, write_bipartite, write_node_index
from .svn import validate_one_tail, validate_two_tail, write_validated

DEFAULT_SEED = 1729


# ---------------------------------------------------------------------------
# argument types
# ---------------------------------------------------------------------------


def _open_unit(text):
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not 0.0 < val < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return val


def _closed_unit(text):
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not 0.0 <= val <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {text}")
    return val


def _positive_int(text):
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if val < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return val


def _side(text):
    s = text.upper()
    if s not in ("A", "B"):
        raise argparse.ArgumentTypeError("must be A or B")
    return s


def _default_threads():
    env = os.environ.get("SVNKIT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# manifest and output helpers
# ---------------------------------------------------------------------------


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    now = _dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc) if epoch else _dt.datetime.now(_dt.timezone.utc)
    return now.replace(microsecond=0).isoformat()


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_manifest(out: Path, command: str, parameters: dict, inputs=(), results=None, seed=None) -> None:
    manifest = {
        "command": command,
        "parameters": parameters,
        "inputs": {str(p): file_sha256(p) for p in inputs},
        "tool_version": __version__,
        "timestamp": _timestamp(),
        "seed": seed,
    }
    if results is not None:
        manifest["results"] = results
    _write_json(out / "manifest.json", manifest)


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _log(args, msg):
    if not args.quiet:
        print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_backbone(args) -> int:
    wn = load_weighted(args.input, directed=args.directed)
    bb = disparity_backbone(wn, args.alpha, args.correction, args.degree_one)
    out = _outdir(args.out)
    write_backbone(bb, out / "backbone.tsv")
    write_node_index(wn.labels, out / "nodes.tsv")
    if args.symmetrize != "none":
        with open(out / f"backbone_{args.symmetrize}.tsv", "w", encoding="utf-8", newline="\n") as fh:
            for u, v, w in bb.symmetrize(args.symmetrize):
                fh.write(f"{u}\t{v}\t{w!r}\n")
    params = {
        "alpha": args.alpha,
        "correction": args.correction,
        "degree_one": args.degree_one,
        "directed": args.directed,
        "symmetrize": args.symmetrize,
    }
    results = {"n_tests": bb.n_tests, "threshold": bb.threshold, "n_retained": len(bb.edges), "n_arcs": wn.n_arcs}
    write_manifest(out, "backbone", params, [args.input], results)
    _log(args, f"backbone: kept {len(bb.edges)} of {wn.n_arcs} arcs ({bb.n_tests} tests)")
    return 0


def cmd_validate(args) -> int:
    bn = load_bipartite(args.input, strict=args.strict)
    if args.tails == "one":
        vn = validate_one_tail(bn, args.side, args.alpha, args.method)
    else:
        vn = validate_two_tail(bn, args.side, args.alpha, args.method, args.family)
    out = _outdir(args.out)
    write_validated(vn, out / "validated.tsv")
    write_node_index(bn.labels(args.side), out / "nodes.tsv")
    params = {
        "side": args.side,
        "tails": args.tails,
        "alpha": args.alpha,
        "method": args.method,
        "family": args.family if args.tails == "two" else "tests",
        "strict": args.strict,
    }
    results = vn.summary()
    results["excluded_nodes"] = list(vn.excluded)
    write_manifest(out, "validate", params, [args.input], results)
    _log(args, f"validate: {vn.n_edges} validated links, N_t = {vn.n_tests}")
    return 0


def cmd_communities(args) -> int:
    bn = load_bipartite(args.input, strict=args.strict)
    if args.network == "full":
        net = project(bn, args.side)
        weights = "nij"
    else:
        net = validate_one_tail(bn, args.side, args.alpha, args.network)
        weights = args.weights
    out = _outdir(args.out)
    try:
        part = louvain(net, seed=args.seed, weights=weights)
        q = modularity(net, part, weights=weights)
    except ValueError as exc:
        if "at least one edge" not in str(exc):
            raise
        warnings.warn("network has no edges; writing an empty partition")
        part, q = Partition.empty(), None
    write_partition(part, out / "partition.tsv")
    metrics = {"modularity": q, "n_communities": part.n_communities, "coverage": len(part)}
    _write_json(out / "metrics.json", metrics)
    params = {"side": args.side, "network": args.network, "alpha": args.alpha, "weights": weights}
    write_manifest(out, "communities", params, [args.input], metrics, seed=args.seed)
    _log(args, f"communities: {part.n_communities} communities over {len(part)} nodes")
    return 0


def cmd_compare(args) -> int:
    cand = read_partition(args.candidate)
    ref = read_partition(args.reference)
    metrics = {}
    try:
        t = pair_contingency(cand, ref)
        metrics["contingency"] = t._asdict()
        metrics["r_adj"] = adjusted_rand(cand, ref)
    except MetricUndefinedError as exc:
        metrics["r_adj"] = None
        metrics["r_adj_error"] = str(exc)
    try:
        metrics["w_adj"] = adjusted_wallace(cand, ref)
    except MetricUndefinedError as exc:
        metrics["w_adj"] = None
        metrics["w_adj_error"] = str(exc)
    metrics["n_common"] = len(cand.coverage & ref.coverage)
    out = _outdir(args.out)
    _write_json(out / "metrics.json", metrics)
    write_manifest(out, "compare", {}, [args.candidate, args.reference], metrics)
    _log(args, f"compare: r_adj={metrics['r_adj']} w_adj={metrics['w_adj']}")
    return 0


def _spec_from_args(args) -> BenchmarkSpec:
    return BenchmarkSpec(args.blocks, args.a_per_block, args.b_per_block, args.intra, args.inter, args.seed)


def cmd_benchmark(args) -> int:
    spec = _spec_from_args(args)
    bn, planted = generate(spec)
    if args.rewire > 0:
        bn = rewire(bn, RewirePlan(args.rewire, args.seed, args.swap))
    out = _outdir(args.out)
    write_bipartite(bn, out / "bipartite.tsv")
    write_partition(planted, out / "planted.tsv")
    params = {
        "blocks": spec.n_blocks,
        "a_per_block": spec.a_nodes_per_block,
        "b_per_block": spec.b_nodes_per_block,
        "intra": spec.intra_link_prob,
        "inter": spec.inter_link_prob,
        "rewire": args.rewire,
        "swap": args.swap,
    }
    write_manifest(out, "benchmark", params, [], {"n_links": bn.n_links}, seed=args.seed)
    _log(args, f"benchmark: {bn.n_a} A nodes, {bn.n_b} B nodes, {bn.n_links} links")
    return 0


def cmd_experiment(args) -> int:
    inputs = []
    if args.input:
        bn = load_bipartite(args.input, strict=args.strict)
        inputs.append(args.input)
        source = {"input": str(args.input)}
    else:
        spec = _spec_from_args(args)
        bn, _ = generate(spec)
        source = {
            "benchmark": {
                "blocks": spec.n_blocks,
                "a_per_block": spec.a_nodes_per_block,
                "b_per_block": spec.b_nodes_per_block,
                "intra": spec.intra_link_prob,
                "inter": spec.inter_link_prob,
                "seed": spec.seed,
            }
        }
    res = robustness_experiment(
        bn,
        args.p_r,
        realizations=args.realizations,
        alpha=args.alpha,
        seed=args.seed,
        side=args.side,
        swap=args.swap,
        weights=args.weights,
        workers=args.threads,
    )
    out = _outdir(args.out)
    res.write_tsv(out / "experiment.tsv")
    params = dict(res.parameters)
    params.update(source)
    write_manifest(out, "experiment", params, inputs, seed=args.seed)
    _log(args, f"experiment: {len(res.p_r_values)} noise levels x {res.realizations} realizations")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(p, seed=False):
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--quiet", action="store_true", help="suppress progress messages")
    p.add_argument("--threads", type=_positive_int, default=None, help="worker cap (default: SVNKIT_THREADS or all cores)")
    if seed:
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"master seed (default {DEFAULT_SEED})")


def _add_benchmark_flags(p):
    p.add_argument("--blocks", type=_positive_int, default=4)
    p.add_argument("--a-per-block", type=_positive_int, default=50)
    p.add_argument("--b-per-block", type=_positive_int, default=100)
    p.add_argument("--intra", type=_closed_unit, default=0.3)
    p.add_argument("--inter", type=_closed_unit, default=0.02)
    p.add_argument("--swap", choices=("degree", "any"), default="degree")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="svnkit", description="Statistically validated networks toolkit")
    parser.add_argument("--version", action="version", version=f"svnkit {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("backbone", help="disparity-filter backbone of a weighted network")
    p.add_argument("--input", required=True, help="TSV source<TAB>target<TAB>weight")
    p.add_argument("--directed", action="store_true", help="treat the edge list as directed")
    p.add_argument("--alpha", type=_open_unit, default=0.05)
    p.add_argument("--correction", choices=("none", "bonferroni", "fdr"), default="fdr")
    p.add_argument("--degree-one", choices=("drop", "keep"), default="drop")
    p.add_argument("--symmetrize", choices=("none", "union", "intersection"), default="none")
    _add_common(p)
    p.set_defaults(func=cmd_backbone)

    p = sub.add_parser("validate", help="statistically validated network of a bipartite projection")
    p.add_argument("--input", required=True, help="TSV nodeA<TAB>nodeB")
    p.add_argument("--side", type=_side, default="A")
    p.add_argument("--tails", choices=("one", "two"), default="one")
    p.add_argument("--alpha", type=_open_unit, default=0.05)
    p.add_argument("--method", choices=("bonferroni", "fdr"), default="fdr")
    p.add_argument("--family", choices=("tests", "pairs"), default="tests")
    p.add_argument("--strict", action="store_true", help="reject duplicate links instead of ignoring them")
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("communities", help="Louvain communities of a projection or its validated network")
    p.add_argument("--input", required=True, help="TSV nodeA<TAB>nodeB")
    p.add_argument("--side", type=_side, default="A")
    p.add_argument("--network", choices=("full", "fdr", "bonferroni"), default="fdr")
    p.add_argument("--alpha", type=_open_unit, default=0.05)
    p.add_argument("--weights", choices=("binary", "nij"), default="binary")
    p.add_argument("--strict", action="store_true")
    _add_common(p, seed=True)
    p.set_defaults(func=cmd_communities)

    p = sub.add_parser("compare", help="adjusted Rand and adjusted Wallace of two partitions")
    p.add_argument("--candidate", required=True, help="TSV node<TAB>community")
    p.add_argument("--reference", required=True, help="TSV node<TAB>community")
    _add_common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("benchmark", help="generate a planted-block bipartite benchmark")
    _add_benchmark_flags(p)
    p.add_argument("--rewire", type=_closed_unit, default=0.0, help="rewiring fraction p_r")
    _add_common(p, seed=True)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("experiment", help="noise-robustness experiment of community cores")
    p.add_argument("--input", default=None, help="bipartite TSV; a benchmark is generated when omitted")
    _add_benchmark_flags(p)
    p.add_argument("--p-r", type=_closed_unit, nargs="+", default=[0.05, 0.1, 0.2, 0.3])
    p.add_argument("--realizations", type=_positive_int, default=100)
    p.add_argument("--alpha", type=_open_unit, default=0.05)
    p.add_argument("--side", type=_side, default="A")
    p.add_argument("--weights", choices=("binary", "nij"), default="binary")
    p.add_argument("--strict", action="store_true")
    _add_common(p, seed=True)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is None:
        args.threads = _default_threads()
    try:
        with warnings.catch_warnings():
            if args.quiet:
                warnings.simplefilter("ignore")
            return args.func(args)
    except (FormatError, FileNotFoundError, IsADirectoryError, UnicodeDecodeError) as exc:
        print(f"svnkit {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"svnkit {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"svnkit {args.command}: runtime failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
