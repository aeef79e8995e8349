"""Command-line surface.

Subcommands map one-to-one onto library calls and emit JSON (and CSV where a
tabular summary exists).  Exit codes: 0 success, 2 verification failure,
3 genericity failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import fixtures
from .atlas import build_atlas, check_genericity
from .errors import GenericityError, MagtorusError, VerificationError
from .experiments import (
    band_edges,
    cp_census,
    ks_report,
    random_3regular,
    surplus_sweep,
)
from .graphs import graph_from_json, spanning_tree_count, whole_graph_partition
from .linalg import eig_herm, herm_from_json
from .magnetic import BaseMatrix, assemble, normalized_cycle_hessian, zero_point
from .oracles import grid_search_critical


def _load_graph(path):
    with open(path) as fh:
        return graph_from_json(fh.read())


def _load_base(graph, path):
    if path is None:
        return fixtures.experiment_matrix(graph)
    with open(path) as fh:
        mat = herm_from_json(fh.read())
    return BaseMatrix(graph, np.real(mat))


def _emit(payload, out):
    text = json.dumps(payload, indent=2, default=_json_default)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj)}")


def _atlas_csv(reports):
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        ["support_size", "beta_GN", "k_N", "lambda", "nonempty", "dim",
         "components", "sample_count", "min_index", "max_index"]
    )
    for rep in reports:
        indices = [s.morse_index for s in rep.samples if s.morse_index is not None]
        writer.writerow([
            len(rep.data.support),
            rep.data.partition.support_betti,
            rep.data.eig_index,
            f"{rep.data.value:.12g}",
            int(rep.nonempty),
            rep.dim if rep.dim is not None else "",
            rep.components if rep.components is not None else "",
            len(rep.samples),
            min(indices) if indices else "",
            max(indices) if indices else "",
        ])
    return buf.getvalue()


def cmd_atlas(args):
    g = _load_graph(args.graph)
    base = _load_base(g, args.matrix)
    reports, skipped = build_atlas(base, samples=args.samples, seed=args.seed)
    payload = {
        "betti": g.betti,
        "reports": [r.to_json() for r in reports],
        "skipped": len(skipped),
    }
    _emit(payload, args.out)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(_atlas_csv(reports))
    return 0


def cmd_grid_search(args):
    g = _load_graph(args.graph)
    base = _load_base(g, args.matrix)
    res = grid_search_critical(
        base, k=args.k, resolution=args.resolution, refine_tol=args.tol
    )
    _emit(res.to_json(), args.out)
    return 0


def cmd_signings_sweep(args):
    g = _load_graph(args.graph)
    base = _load_base(g, args.matrix)
    dists = surplus_sweep(base, threads=args.threads)
    total = g.n * 2 ** g.betti
    tallied = sum(d.n_tallied for d in dists)
    skipped = sum(d.n_skipped for d in dists)
    payload = {
        "betti": g.betti,
        "tallied": tallied,
        "skipped": skipped,
        "distributions": [d.to_json() for d in dists],
    }
    _emit(payload, args.out)
    if args.csv:
        with open(args.csv, "w") as fh:
            writer = csv.writer(fh)
            writer.writerow(["k", "mean", "std", "ks_distance", "tallied", "skipped"]
                            + [f"sigma{j}" for j in range(g.betti + 1)])
            for d in dists:
                writer.writerow([d.k, d.mean, d.std, d.ks_distance,
                                 d.n_tallied, d.n_skipped] + list(d.counts))
    if tallied + skipped != total:
        raise VerificationError(
            f"sweep total {tallied}+{skipped} != {total}"
        )
    return 0


def cmd_ks_report(args):
    rows = []
    for j in range(args.graphs):
        g = random_3regular(args.n, seed=args.seed + j)
        base = fixtures.experiment_matrix(g)
        dists = surplus_sweep(base, threads=args.threads)
        rep = ks_report(dists)
        rows.append({
            "graph": j,
            "betti": g.betti,
            "max_ks": rep.max_ks,
            "per_k": rep.per_k,
        })
    _emit({"n": args.n, "graphs": rows}, args.out)
    return 0


def cmd_cp_census(args):
    g = _load_graph(args.graph)
    base = _load_base(g, args.matrix)
    rep = cp_census(base)
    _emit(rep.to_json(), args.out)
    return 0


def cmd_band_edges(args):
    g = _load_graph(args.graph)
    base = _load_base(g, args.matrix)
    rep = band_edges(base, mode=args.mode, resolution=args.resolution, seed=args.seed)
    _emit(rep.to_json(), args.out)
    return 0


def cmd_gen_3reg(args):
    g = random_3regular(args.n, seed=args.seed)
    _emit(g.to_json(), args.out)
    return 0


def cmd_example(args):
    name = args.name
    if name in ("8.1", "index-jump"):
        payload = _example_index_jump(args)
    elif name in ("8.2", "label-switch"):
        payload = _example_label_switch(args)
    elif name == "laplacian":
        payload = _example_laplacian(args)
    else:
        raise MagtorusError(f"unknown example {name!r}")
    _emit(payload, args.out)
    return 0


def _example_index_jump(args):
    base = fixtures.index_jump_fixture()
    switch = fixtures.index_jump_switch_angle(base)
    from .atlas import build_manifold, enumerate_critical_data

    enum = enumerate_critical_data(base)
    data = [
        d for d in enum.valid_entries()
        if d.support == fixtures.index_jump_support()
        and d.eig_index == 1
        and abs(d.value) < 1e-9
    ][0]
    rep = build_manifold(base, data, samples=8, seed=args.seed)
    indices = {}
    from .magnetic import hessian

    for a3, tag in ((0.0, "angle_0"), (math.pi, "angle_pi")):
        p = fixtures.index_jump_point(base, a3)
        evals = np.linalg.eigvalsh(hessian(base, p, 2).matrix)
        indices[tag] = int(np.sum(evals < -1e-7))
    ok = rep.components == 2 and rep.dim == 1 and indices["angle_0"] == 2 and indices["angle_pi"] == 0
    if not ok:
        raise VerificationError("bridge example failed its built-in checks")
    return {
        "fixture": "index-jump",
        "manifold": rep.to_json(),
        "switch_angle": switch,
        "normal_index": indices,
    }


def _example_label_switch(args):
    base = fixtures.label_switch_fixture(gamma=3.0)
    p = fixtures.label_switch_point(base, 2 * math.pi / 3, math.pi, -2 * math.pi / 3)
    es = eig_herm(assemble(base, p))
    gap = float(es.values[1] - es.values[0])
    from .atlas import build_manifold, enumerate_critical_data

    enum = enumerate_critical_data(base)
    data = [
        d for d in enum.valid_entries()
        if d.support == fixtures.label_switch_support()
        and abs(d.value) < 1e-9
    ][0]
    rep = build_manifold(base, data, samples=30, seed=args.seed)
    labels = sorted(set(s.k for s in rep.samples))
    if gap > 1e-8 or labels != [1, 2]:
        raise VerificationError("label-switch example failed its built-in checks")
    return {
        "fixture": "label-switch",
        "multiplicity_gap": gap,
        "labels_along_circle": labels,
        "manifold": rep.to_json(),
    }


def _example_laplacian(args):
    rows = []
    for g in (
        fixtures.flower(2),
        fixtures.index_jump_fixture().graph,
        random_3regular(6, seed=args.seed),
    ):
        base = fixtures.standard_laplacian(g)
        part = whole_graph_partition(g)
        mat = normalized_cycle_hessian(base, zero_point(part), 1)
        det = float(np.linalg.det(mat))
        trees = spanning_tree_count(g)
        rows.append({
            "n": g.n,
            "betti": g.betti,
            "cycle_hessian_det": det,
            "spanning_trees": trees,
            "match": bool(abs(det - trees) <= 1e-6 * max(1, trees)),
        })
    if not all(r["match"] for r in rows):
        raise VerificationError("cycle Hessian determinant mismatch")
    return {"fixture": "laplacian", "cases": rows}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="magtorus",
        description="critical submanifolds of eigenvalues on magnetic tori of graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, matrix=True, csv_flag=False):
        p.add_argument("graph", help="graph JSON file")
        if matrix:
            p.add_argument("matrix", nargs="?", default=None,
                           help="matrix JSON file (default: adjacency + quasirandom diagonal)")
        p.add_argument("--out", default=None, help="write JSON here instead of stdout")
        if csv_flag:
            p.add_argument("--csv", default=None, help="also write a CSV summary")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--tol", type=float, default=1e-8,
                       help="refinement tolerance where applicable")

    p = sub.add_parser("atlas", help="enumerate and build all critical manifolds")
    common(p, csv_flag=True)
    p.add_argument("--samples", type=int, default=8)
    p.set_defaults(func=cmd_atlas)

    p = sub.add_parser("grid-search", help="brute-force critical point scan")
    common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--resolution", type=int, default=12)
    p.set_defaults(func=cmd_grid_search)

    p = sub.add_parser("signings-sweep", help="nodal surplus over all signings")
    common(p, csv_flag=True)
    p.set_defaults(func=cmd_signings_sweep)

    p = sub.add_parser("ks-report", help="KS distances for random 3-regular graphs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--graphs", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_ks_report)

    p = sub.add_parser("cp-census", help="critical point census by support size")
    common(p)
    p.set_defaults(func=cmd_cp_census)

    p = sub.add_parser("band-edges", help="per-label eigenvalue ranges over the torus")
    common(p)
    p.add_argument("--mode", choices=["auto", "grid", "atlas"], default="auto")
    p.add_argument("--resolution", type=int, default=16)
    p.set_defaults(func=cmd_band_edges)

    p = sub.add_parser("example", help="run a built-in fixture with its checks")
    p.add_argument("name", choices=["8.1", "8.2", "index-jump", "label-switch", "laplacian"],
                   help="fixture id")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("gen-3reg", help="generate a random 3-regular graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen_3reg)

    p = sub.add_parser("check-genericity", help="genericity report for a matrix")
    common(p)
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=cmd_check_genericity)

    return parser


def cmd_check_genericity(args):
    g = _load_graph(args.graph)
    base = _load_base(g, args.matrix)
    rep = check_genericity(base, subgraph_budget=args.budget)
    _emit(rep.to_json(), args.out)
    if not rep.passed:
        raise GenericityError("genericity check failed")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GenericityError as exc:
        print(f"genericity failure: {exc}", file=sys.stderr)
        return 3
    except MagtorusError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
