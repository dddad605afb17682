"""Batch command-line front end.

Exit codes: 0 success, 1 usage/runtime error, 2 empty result.  Every output
artifact embeds the resolved run configuration and the tool version so reruns
are verifiable byte-for-byte.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .clustering import kmedoids, sweep
from .counterfactual import CfQuery, find_counterfactual
from .distance import DistanceConfig, LEVENSHTEIN, KERNELS, StageWeights, distance_matrix
from .embedding import mds
from .errors import EmptyDataset, JourneyMapError
from .ingestion import cleanse, cooccurrence, describe, load
from .model import Dataset, Journey
from .prediction import KnnModel, evaluate
from .svg import scatter_svg


def _env_seed() -> int:
    return int(os.environ.get("JM_SEED", "0"))


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="input file path")
    parser.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    parser.add_argument("--out-dir", default=".", help="directory for output artifacts")


def _add_weights(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--w1", default="2")
    parser.add_argument("--w2", default="1")
    parser.add_argument("--w3", default="10")
    parser.add_argument("--kernel", choices=KERNELS, default=LEVENSHTEIN)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="journeymap", description="staged-journey analytics")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="cleanse a raw record file")
    _add_common(p)

    p = sub.add_parser("describe", help="descriptive statistics and co-occurrence")
    _add_common(p)

    p = sub.add_parser("cluster", help="k-medoids sweep and prototypes")
    _add_common(p)
    _add_weights(p)
    p.add_argument("--k", type=int, default=6, help="k used for the prototype listing")
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("embed", help="classical MDS map as JSON + SVG")
    _add_common(p)
    _add_weights(p)
    p.add_argument("--k", type=int, default=6, help="clusters used for coloring")
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("predict", help="repeated-split k-NN evaluation")
    _add_common(p)
    _add_weights(p)
    p.add_argument("--knn-k", default="1,2,3,4,5", help="comma-separated k' values")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("explain", help="counterfactual for one journey")
    _add_common(p)
    _add_weights(p)
    p.add_argument("--journey-id", help="id of a journey in the input")
    p.add_argument("--items", help="literal comma-separated item codes")
    p.add_argument("--y-obj", type=int, choices=(0, 1), default=1)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--knn-k", type=int, default=5)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("serve", help="run the HTTP service")
    _add_common(p)
    p.add_argument("--bind", default="127.0.0.1:8000")

    return parser


def _weights(args) -> StageWeights:
    try:
        return StageWeights(Fraction(args.w1), Fraction(args.w2), Fraction(args.w3))
    except (ValueError, ZeroDivisionError) as exc:
        raise JourneyMapError(f"invalid weights: {exc}") from exc


def _config(args) -> DistanceConfig:
    return DistanceConfig(weights=_weights(args), kernel=args.kernel)


def _load_dataset(args) -> tuple[Dataset, "object"]:
    with open(args.input, "rb") as fh:
        records = load(fh, format=args.format)
    return cleanse(records, provenance=args.input)


def _run_config(args) -> dict:
    skip = {"command", "func"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return {"tool": "journeymap", "version": __version__, "command": args.command, "config": cfg}


def _write_json(args, name: str, payload: dict) -> Path:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    body = {"run": _run_config(args), **payload}
    path.write_text(json.dumps(body, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def cmd_validate(args) -> int:
    try:
        dataset, report = _load_dataset(args)
    except EmptyDataset:
        with open(args.input, "rb") as fh:
            records = load(fh, format=args.format)
        from .ingestion import validate as validate_record

        rejected = [(r.id, validate_record(r)) for r in records]
        payload = {
            "report": {
                "accepted": 0,
                "rejected": [{"id": rid, "reason": reason} for rid, reason in rejected],
            }
        }
        _write_json(args, "cleansing_report.json", payload)
        print("no records accepted", file=sys.stderr)
        return 2
    _write_json(args, "cleansing_report.json", {"report": report.to_jsonable()})
    print(f"accepted {report.accepted}, rejected {len(report.rejected)}")
    return 0


def cmd_describe(args) -> int:
    dataset, _ = _load_dataset(args)
    stats = describe(dataset)
    cooc = cooccurrence(dataset)
    _write_json(args, "describe.json", {"stats": stats.to_jsonable(), "cooccurrence": cooc.to_jsonable()})
    print(json.dumps(stats.to_jsonable(), indent=2, sort_keys=True))
    return 0


def cmd_cluster(args) -> int:
    dataset, _ = _load_dataset(args)
    seed = args.seed if args.seed is not None else _env_seed()
    config = _config(args)
    ks = list(range(args.k_min, args.k_max + 1))
    report = sweep(dataset, [config], ks, seed=seed)
    chosen = report.result_for(config.label(), args.k) if args.k in ks else kmedoids(
        distance_matrix(dataset, config), args.k, seed
    )
    prototypes = [
        {
            "cluster": c,
            "journey_id": dataset.journeys[m].id,
            "items": list(dataset.journeys[m].canonical_items),
            "size": chosen.cluster_sizes()[c],
        }
        for c, m in enumerate(chosen.medoid_indices)
    ]
    _write_json(
        args,
        "cluster.json",
        {"sweep": report.to_jsonable(), "chosen": chosen.to_jsonable(), "prototypes": prototypes},
    )
    print(report.render_text())
    print()
    for proto in prototypes:
        print(f"cluster {proto['cluster']}: {proto['items']} (size {proto['size']})")
    return 0


def cmd_embed(args) -> int:
    dataset, _ = _load_dataset(args)
    seed = args.seed if args.seed is not None else _env_seed()
    config = _config(args)
    matrix = distance_matrix(dataset, config)
    embedding = mds(matrix)
    clusters = kmedoids(matrix, args.k, seed)
    _write_json(
        args,
        "embedding.json",
        {"embedding": embedding.to_jsonable(), "clusters": clusters.to_jsonable()},
    )
    svg = scatter_svg(
        [(float(x), float(y)) for x, y in embedding.coordinates],
        clusters.assignment,
        [j.outcome_label() for j in dataset.journeys],
        medoids=clusters.medoid_indices,
        ids=dataset.ids,
    )
    out = Path(args.out_dir) / "embedding.svg"
    out.write_text(svg, encoding="utf-8")
    print(f"wrote {out}")
    return 0


def cmd_predict(args) -> int:
    dataset, _ = _load_dataset(args)
    seed = args.seed if args.seed is not None else _env_seed()
    k_values = [int(v) for v in args.knn_k.split(",")]
    report = evaluate(
        dataset,
        k_values=k_values,
        repetitions=args.reps,
        base_seed=seed,
        config=_config(args),
    )
    _write_json(args, "predict.json", {"report": report.to_jsonable()})
    print(report.render_text())
    return 0


def cmd_explain(args) -> int:
    dataset, _ = _load_dataset(args)
    if args.journey_id:
        try:
            base = dataset.by_id(args.journey_id)
        except KeyError:
            print(f"journey id not found: {args.journey_id}", file=sys.stderr)
            return 1
    elif args.items:
        base = Journey.from_items("query", [s.strip() for s in args.items.split(",")])
    else:
        print("provide --journey-id or --items", file=sys.stderr)
        return 1
    if base.label is not None and base.label == args.y_obj:
        print("warning: base journey already has the desired outcome", file=sys.stderr)
    model = KnnModel(k_prime=args.knn_k, config=_config(args)).fit(dataset.journeys)
    query = CfQuery(base=base, y_obj=args.y_obj, lam=args.lam)
    result = find_counterfactual(dataset, model, query)
    _write_json(
        args,
        "counterfactual.json",
        {"base": {"id": base.id, "items": list(base.canonical_items)}, "result": result.to_jsonable()},
    )
    print(f"base:           {list(base.canonical_items)}")
    print(f"counterfactual: {list(result.counterfactual.canonical_items)}")
    for op in result.edits:
        print(f"  {op.narrative()}")
    print(f"objective={result.objective} distance={result.distance} "
          f"loss={result.loss} model_check={result.model_check}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    dataset, _ = _load_dataset(args)
    host, _, port = args.bind.partition(":")
    app = create_app(initial_dataset=dataset)
    try:
        uvicorn.run(app, host=host or "127.0.0.1", port=int(port or "8000"), log_level="warning")
    except OSError as exc:
        print(f"cannot bind {args.bind}: {exc}", file=sys.stderr)
        return 1
    return 0


HANDLERS = {
    "validate": cmd_validate,
    "describe": cmd_describe,
    "cluster": cmd_cluster,
    "embed": cmd_embed,
    "predict": cmd_predict,
    "explain": cmd_explain,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return HANDLERS[args.command](args)
    except JourneyMapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
