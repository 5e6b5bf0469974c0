"""Command-line interface.

Subcommands: stats, homophily, compat, synth (pa | task), train, wl.  JSON on
stdout is the machine contract (full float precision); human-readable tables
round to 6 significant digits and always precede the JSON line.  On failure a
single JSON error object goes to stderr and the exit code is nonzero.

DIRGNN_NUM_THREADS, when set, is exported to the BLAS thread-count variables
before numpy loads.
"""

from __future__ import annotations

import argparse
import json
import os
import sys


def _fmt(v) -> str:
    if v is None:
        return "-"
    return f"{v:.6g}"


def _print_json(payload: dict) -> None:
    print(json.dumps(payload))


# -- subcommand handlers (heavy imports stay inside) -------------------------


def cmd_stats(args) -> int:
    from .graph import structural_stats
    from .io import read_edge_list

    graph, _ = read_edge_list(args.graph, args.nodes)
    _print_json(structural_stats(graph).to_dict())
    return 0


def cmd_homophily(args) -> int:
    from .homophily import edge_homophily, effective_homophily, node_homophily
    from .io import load_dataset

    graph, data, _ = load_dataset(args.graph, args.labels, num_nodes=args.nodes)
    report = effective_homophily(graph, data.labels)
    payload = report.to_dict()
    payload["node_homophily"] = node_homophily(graph, data.labels)
    payload["edge_homophily"] = edge_homophily(graph, data.labels)
    payload["num_nodes"] = graph.num_nodes
    payload["num_edges"] = graph.num_edges
    if not args.json_only:
        print(f"{'operator':>10} {'homophily':>12} {'excluded':>9}")
        for kind, value in report.per_operator.items():
            print(f"{kind.value:>10} {_fmt(value):>12} {report.excluded_nodes[kind]:>9}")
        print(f"{'h_eff_u':>10} {_fmt(report.h_eff_u):>12}")
        print(f"{'h_eff_d':>10} {_fmt(report.h_eff_d):>12}")
        gain_pct = None if report.gain is None else 100.0 * report.gain
        print(f"{'gain_pct':>10} {_fmt(gain_pct):>12}")
    _print_json(payload)
    return 0


def cmd_compat(args) -> int:
    from .homophily import weighted_compatibility_matrix
    from .io import load_dataset
    from .operators import OperatorKind, build_operator

    graph, data, _ = load_dataset(args.graph, args.labels, num_nodes=args.nodes)
    kind = OperatorKind(args.op)
    op = build_operator(graph, kind)
    compat = weighted_compatibility_matrix(op, data.labels, data.num_classes)
    c = compat.num_classes
    print("class," + ",".join(str(k) for k in range(c)) + ",valid")
    for k in range(c):
        if compat.row_valid[k]:
            cells = ",".join(repr(float(v)) for v in compat.values[k])
            print(f"{k},{cells},true")
        else:
            print(f"{k}," + ",".join([""] * c) + ",false")
    return 0


def cmd_synth(args) -> int:
    from .graph import structural_stats
    from .io import write_edge_list, write_features, write_labels
    from .synth import (DirectionTaskConfig, PAConfig, direction_task,
                        preferential_attachment, target_compatibility)

    if args.mode == "pa":
        cfg = PAConfig(num_nodes=args.nodes, num_classes=args.classes, m=args.m,
                       compat=target_compatibility(args.target_hom, args.classes),
                       seed=args.seed)
        graph, data = preferential_attachment(cfg)
    else:
        cfg = DirectionTaskConfig(num_nodes=args.nodes, p=args.p, seed=args.seed)
        graph, data = direction_task(cfg)
    prefix = args.out_prefix
    files = {"edges": f"{prefix}_edges.txt", "labels": f"{prefix}_labels.csv"}
    write_edge_list(files["edges"], graph)
    write_labels(files["labels"], data.labels)
    if data.features is not None:
        files["features"] = f"{prefix}_features.csv"
        write_features(files["features"], data.features)
    payload = {"files": files, "stats": structural_stats(graph).to_dict(),
               "num_classes": data.num_classes}
    _print_json(payload)
    return 0


def cmd_train(args) -> int:
    import numpy as np

    from .io import load_dataset, read_splits
    from .nn import ModelConfig
    from .training import TrainConfig, repeat_train, train

    graph, data, _ = load_dataset(args.graph, args.labels, args.features,
                                  num_nodes=args.nodes)
    model_cfg = ModelConfig(kind=args.model, num_layers=args.layers,
                            hidden_dim=args.hidden, alpha=args.alpha, jk=args.jk,
                            l2_normalize=args.norm, dropout=args.dropout)
    splits = None
    if args.splits:
        splits = read_splits(args.splits, graph.num_nodes)
    train_cfg = TrainConfig(lr=args.lr, max_epochs=args.epochs, patience=args.patience,
                            seed=args.seed, splits=splits)
    if args.repeat > 1:
        payload = repeat_train(model_cfg, graph, data, train_cfg, args.repeat)
    else:
        result, model = train(model_cfg, graph, data, train_cfg)
        payload = result.to_dict()
        if args.checkpoint:
            from .nn import save_checkpoint
            save_checkpoint(args.checkpoint, model)
            payload["checkpoint"] = args.checkpoint
    _print_json(payload)
    return 0


def cmd_wl(args) -> int:
    from .io import read_edge_list
    from .wl import compare_pair, refine, search_counterexamples

    if args.mode == "search":
        for name in ("max_n", "weak", "strong"):
            if getattr(args, name) is None:
                raise ValueError(f"wl search requires --{name.replace('_', '-')}")
        pairs = search_counterexamples(args.max_n, args.weak, args.strong)
        payload = {
            "count": len(pairs),
            "pairs": [{
                "num_nodes": p.g1.num_nodes,
                "g1_edges": [[int(a), int(b)] for a, b in p.g1.edge_array()],
                "g2_edges": [[int(a), int(b)] for a, b in p.g2.edge_array()],
                "verdicts": p.verdicts,
                "note": p.note,
            } for p in pairs],
        }
        _print_json(payload)
        return 0

    if args.variant is None or args.g1 is None:
        raise ValueError("wl requires --variant and --g1")
    g1, _ = read_edge_list(args.g1, args.nodes)
    if args.g2 is None:
        coloring = refine(g1, args.variant, args.rounds)
        _print_json({"variant": args.variant, "rounds": coloring.rounds,
                     "stable_round": coloring.stable_round})
        return 0
    g2, _ = read_edge_list(args.g2, args.nodes)
    result = compare_pair(g1, g2, args.variant, args.rounds)
    _print_json({
        "variant": args.variant,
        "verdict": result.verdict,
        "distinguishing_round": result.distinguishing_round,
        "rounds_g1": result.coloring1.rounds,
        "rounds_g2": result.coloring2.rounds,
        "stable_round": result.coloring1.stable_round,
    })
    return 0


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dirgnn",
        description="Directed-graph homophily analysis and reference training")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="structural summary of an edge list")
    p.add_argument("--graph", required=True)
    p.add_argument("--nodes", type=int, default=None)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("homophily", help="effective homophily report")
    p.add_argument("--graph", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--nodes", type=int, default=None)
    p.add_argument("--json-only", action="store_true")
    p.set_defaults(func=cmd_homophily)

    p = sub.add_parser("compat", help="class compatibility matrix as CSV")
    p.add_argument("--graph", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--op", default="a",
                   help="operator kind: a at au a2 at2 ata aat au2 s_fwd_gcn s_row_fwd s_row_bwd")
    p.add_argument("--nodes", type=int, default=None)
    p.set_defaults(func=cmd_compat)

    p = sub.add_parser("synth", help="synthetic graph generators")
    synth_sub = p.add_subparsers(dest="mode", required=True)
    pa = synth_sub.add_parser("pa", help="label-aware preferential attachment")
    pa.add_argument("--nodes", type=int, default=1000)
    pa.add_argument("--classes", type=int, default=5)
    pa.add_argument("--m", type=int, default=2)
    pa.add_argument("--target-hom", type=float, default=0.5)
    pa.add_argument("--seed", type=int, default=0)
    pa.add_argument("--out-prefix", required=True)
    pa.set_defaults(func=cmd_synth)
    task = synth_sub.add_parser("task", help="in-mean vs out-mean direction task")
    task.add_argument("--nodes", type=int, default=5000)
    task.add_argument("--p", type=float, default=0.001)
    task.add_argument("--seed", type=int, default=0)
    task.add_argument("--out-prefix", required=True)
    task.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train a node classifier")
    p.add_argument("--model", required=True, choices=["dir-gcn", "dir-sage", "gcn", "sage"])
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--layers", type=int, default=3)
    p.add_argument("--hidden", type=int, default=64)
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--jk", choices=["none", "max", "cat"], default="max")
    p.add_argument("--norm", action="store_true")
    p.add_argument("--dropout", type=float, default=0.0)
    p.add_argument("--patience", type=int, default=200)
    p.add_argument("--epochs", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--graph", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--features", default=None)
    p.add_argument("--splits", default=None)
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--nodes", type=int, default=None)
    p.add_argument("--checkpoint", default=None,
                   help="write the best model parameters to this CSV")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("wl", help="color refinement / counterexample search")
    p.add_argument("mode", nargs="?", choices=["search"], default=None)
    p.add_argument("--variant", choices=["1wl", "uwl", "dwl", "outwl"], default=None)
    p.add_argument("--g1", default=None)
    p.add_argument("--g2", default=None)
    p.add_argument("--rounds", type=int, default=None)
    p.add_argument("--nodes", type=int, default=None)
    p.add_argument("--max-n", type=int, default=None)
    p.add_argument("--weak", choices=["1wl", "uwl", "dwl", "outwl"], default=None)
    p.add_argument("--strong", choices=["1wl", "uwl", "dwl", "outwl"], default=None)
    p.set_defaults(func=cmd_wl)

    return parser


def main(argv=None) -> int:
    from .errors import DirgnnError

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DirgnnError, ValueError, OSError) as exc:
        print(json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}),
              file=sys.stderr)
        return 1


def entrypoint() -> None:
    threads = os.environ.get("DIRGNN_NUM_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
