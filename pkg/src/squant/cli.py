"""Command-line surface: quantization runs, classical baselines, evaluation,
lower bounds, and diagnostics.

Exit codes: 0 success, 1 usage error, 2 input-format error, 3 divergence.
Every command is deterministic under a fixed --seed, and each run writes a
manifest (all defaults materialized) that reproduces its outputs bit-exactly
via --from-manifest.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import fileio
from .driver import (
    AVERAGE_CESARO,
    AVERAGE_NONE,
    EPOCH_SHUFFLE,
    IID_WEIGHTED,
    INIT_PER_LABEL,
    INIT_SAMPLE,
    SQConfig,
    run_multistart,
    run_sq,
)
from .errors import DivergenceError, FormatError, InvalidConfigError, InvalidScheduleError
from .evaluation import contrast_ratio, evaluate, label_quants
from .kmeans import (
    EMPTY_KEEP,
    EMPTY_RESEED,
    SEED_KMEANSPP,
    SEED_UNIFORM,
    KMeansConfig,
    run_generalized_gradient,
    run_lloyd,
    run_minibatch,
    run_stochastic_kmeans,
)
from .model import Codebook, FeatureSet, LearningSchedule, ProjectionRegion
from .objective import assign, empirical_objective, interchange_lower_bound
from .optimizers import DEFAULT_RATES, VARIANTS
from .synthetic import MixtureSpec, generate


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors must exit 1, not argparse's 2
        raise UsageError(message)


def _parse_schedule(spec: str, rate: float) -> LearningSchedule:
    """--schedule accepts 'constant' or 'poly:<exponent>'."""
    if spec == "constant":
        return LearningSchedule.constant(rate)
    if spec.startswith("poly:"):
        return LearningSchedule.polynomial(rate, float(spec.split(":", 1)[1]))
    raise UsageError(f"bad --schedule {spec!r}: expected 'constant' or 'poly:<exponent>'")


def _load_input(path: str, points_labeled: bool, n_classes: int) -> FeatureSet:
    if not path:
        raise UsageError("--input is required")
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"input file not found: {path}")
    with open(p, "rb") as fh:
        magic = fh.read(6)
    if magic == fileio.EMBEDDING_MAGIC:
        return fileio.read_embeddings(p)
    return fileio.read_points(p, labeled=points_labeled, n_classes=n_classes)


def _build_region(mode: str, margin: float, data: FeatureSet) -> ProjectionRegion:
    if mode == "none":
        return ProjectionRegion.unbounded()
    if mode == "auto-box":
        return data.bounding_box(margin)
    raise UsageError(f"bad --region {mode!r}: expected 'auto-box' or 'none'")


def _write_manifest(path: Path, command: str, resolved: dict, extra: dict) -> None:
    manifest = {"command": command, "args": resolved}
    manifest.update(extra)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_scatter(path: str, data: FeatureSet, codebook: Codebook) -> None:
    idx = assign(data, codebook).nearest_index
    lines = []
    for i in range(data.count):
        coords = ",".join(repr(float(x)) for x in data.points[i])
        lines.append(f"{coords},point,{int(idx[i])}")
    for k in range(codebook.size):
        coords = ",".join(repr(float(x)) for x in codebook.centers[k])
        lines.append(f"{coords},center,{k}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")


# ----------------------------------------------------------------------------
# quantize


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    # not required at parse time: --from-manifest may supply it
    p.add_argument("--input", default=None, help="embeddings file or plain points text")
    p.add_argument("--points-labeled", action="store_true",
                   help="plain-point input carries a trailing label column")
    p.add_argument("--classes", type=int, default=0, help="class count for labeled plain points")


def _add_quantize_flags(p: argparse.ArgumentParser) -> None:
    _add_input_flags(p)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--rank", type=float, default=2.0)
    p.add_argument("--norm", type=float, default=2.0)
    p.add_argument("--variant", choices=VARIANTS, default="sgd")
    p.add_argument("--rate", type=float, default=None,
                   help="base learning rate (default: the variant's convention)")
    p.add_argument("--schedule", default="constant", help="'constant' or 'poly:<exponent>'")
    p.add_argument("--iters", type=int, default=None,
                   help="iteration count (default: 5 passes over the data)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--region", choices=["auto-box", "none"], default="auto-box")
    p.add_argument("--region-margin", type=float, default=0.0)
    p.add_argument("--average", choices=[AVERAGE_NONE, AVERAGE_CESARO], default=AVERAGE_NONE)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--init", choices=["sample", "per-label"], default="sample")
    p.add_argument("--sampling", choices=["iid", "shuffle"], default="iid")
    p.add_argument("--eval-stride", type=int, default=None)
    p.add_argument("--gamma", type=float, default=0.9)
    p.add_argument("--beta", type=float, default=0.9)
    p.add_argument("--beta1", type=float, default=0.9)
    p.add_argument("--beta2", type=float, default=0.999)
    p.add_argument("--eps", type=float, default=1e-8)
    p.add_argument("--out", default=None, help="output prefix (default: input stem + '.sq')")
    p.add_argument("--scatter", default=None, help="optional plot-ready points/centers CSV")


def cmd_quantize(args: argparse.Namespace) -> int:
    started = time.monotonic()
    data = _load_input(args.input, args.points_labeled, args.classes)
    rate = DEFAULT_RATES[args.variant] if args.rate is None else args.rate
    iters = 5 * data.count if args.iters is None else args.iters
    stride = args.eval_stride if args.eval_stride else data.count
    out = args.out if args.out else str(Path(args.input).with_suffix("")) + ".sq"

    config = SQConfig(
        n_centers=args.k,
        rank=args.rank,
        norm_order=args.norm,
        variant=args.variant,
        schedule=_parse_schedule(args.schedule, rate),
        iterations=iters,
        region=_build_region(args.region, args.region_margin, data),
        sampling=IID_WEIGHTED if args.sampling == "iid" else EPOCH_SHUFFLE,
        seed=args.seed,
        init=INIT_SAMPLE if args.init == "sample" else INIT_PER_LABEL,
        averaging=args.average,
        eval_stride=stride,
        restarts=args.restarts,
        gamma=args.gamma,
        beta=args.beta,
        beta1=args.beta1,
        beta2=args.beta2,
        eps=args.eps,
    )
    if args.restarts > 1:
        result = run_multistart(data, config)
        codebook, trace = result.codebook, result.trace
        for value in result.final_objectives:
            print(f"restart objective {value!r}")
    else:
        codebook, trace = run_sq(data, config)

    quant_labels = None
    if data.labels is not None and data.labeled_mask().any():
        quant_labels = label_quants(codebook, data)

    final_objective = empirical_objective(data, codebook)
    fileio.write_codebook(out + ".codebook", codebook, quant_labels)
    fileio.write_trace(out + ".trace", trace)
    if args.scatter:
        _write_scatter(args.scatter, data, codebook)

    resolved = {
        "input": args.input, "points_labeled": args.points_labeled, "classes": args.classes,
        "k": args.k, "rank": args.rank, "norm": args.norm, "variant": args.variant,
        "rate": rate, "schedule": args.schedule, "iters": iters, "seed": args.seed,
        "region": args.region, "region_margin": args.region_margin,
        "average": args.average, "restarts": args.restarts, "init": args.init,
        "sampling": args.sampling, "eval_stride": stride,
        "gamma": args.gamma, "beta": args.beta, "beta1": args.beta1, "beta2": args.beta2,
        "eps": args.eps, "out": out, "scatter": args.scatter,
    }
    _write_manifest(
        Path(out + ".manifest.json"), "quantize", resolved,
        {
            "outputs": [out + ".codebook", out + ".trace"],
            "final_objective": final_objective,
            "wall_clock_s": time.monotonic() - started,
        },
    )
    print(f"final objective {final_objective!r}")
    return 0


# ----------------------------------------------------------------------------
# kmeans


def _add_kmeans_flags(p: argparse.ArgumentParser) -> None:
    _add_input_flags(p)
    p.add_argument("--mode", choices=["lloyd", "minibatch", "gradient", "stochastic"],
                   default="lloyd")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seeding", choices=["random", "kmeanspp"], default="random")
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--rank", type=float, default=2.0)
    p.add_argument("--rate", type=float, default=0.5)
    p.add_argument("--schedule", default="poly:0.75")
    p.add_argument("--empty", choices=[EMPTY_KEEP, EMPTY_RESEED], default=EMPTY_KEEP)
    p.add_argument("--sampling", choices=["iid", "shuffle"], default="iid")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--scatter", default=None)


def cmd_kmeans(args: argparse.Namespace) -> int:
    started = time.monotonic()
    data = _load_input(args.input, args.points_labeled, args.classes)
    out = args.out if args.out else str(Path(args.input).with_suffix("")) + ".km"
    config = KMeansConfig(
        n_centers=args.k,
        max_epochs=args.epochs,
        tol=args.tol,
        seeding=SEED_UNIFORM if args.seeding == "random" else SEED_KMEANSPP,
        empty_policy=args.empty,
        rank=args.rank,
        schedule=_parse_schedule(args.schedule, args.rate),
        batch_size=args.batch,
        sampling=IID_WEIGHTED if args.sampling == "iid" else EPOCH_SHUFFLE,
        seed=args.seed,
    )
    runner = {
        "lloyd": run_lloyd,
        "minibatch": run_minibatch,
        "gradient": run_generalized_gradient,
        "stochastic": run_stochastic_kmeans,
    }[args.mode]
    codebook, trace = runner(data, config)

    quant_labels = None
    if data.labels is not None and data.labeled_mask().any():
        quant_labels = label_quants(codebook, data)

    final_objective = empirical_objective(data, codebook)
    fileio.write_codebook(out + ".codebook", codebook, quant_labels)
    fileio.write_trace(out + ".trace", trace)
    if args.scatter:
        _write_scatter(args.scatter, data, codebook)

    resolved = {
        "input": args.input, "points_labeled": args.points_labeled, "classes": args.classes,
        "mode": args.mode, "k": args.k, "seeding": args.seeding, "epochs": args.epochs,
        "tol": args.tol, "batch": args.batch, "rank": args.rank, "rate": args.rate,
        "schedule": args.schedule, "empty": args.empty, "sampling": args.sampling,
        "seed": args.seed, "out": out, "scatter": args.scatter,
    }
    _write_manifest(
        Path(out + ".manifest.json"), "kmeans", resolved,
        {
            "outputs": [out + ".codebook", out + ".trace"],
            "final_objective": final_objective,
            "wall_clock_s": time.monotonic() - started,
        },
    )
    print(f"final objective {final_objective!r}")
    return 0


# ----------------------------------------------------------------------------
# evaluate / bound / diagnose / generate


def cmd_evaluate(args: argparse.Namespace) -> int:
    data = _load_input(args.input, args.points_labeled, args.classes)
    if data.labels is None or not data.labeled_mask().any():
        raise FormatError(f"evaluation input {args.input} carries no labels", 0)
    codebook, stored_labels = fileio.read_codebook(args.codebook)
    quant_labels = stored_labels if (stored_labels is not None and args.labels_from != "data") else None
    report = evaluate(codebook, data, quant_labels)
    if args.format == "json":
        payload = {
            "weighted_f1": report.weighted_f1,
            "macro_f1": report.macro_f1,
            "micro_f1": report.micro_f1,
            "quant_labels": report.quant_labels.tolist(),
            "confusion": report.confusion.tolist(),
            "precision": report.precision.tolist(),
            "recall": report.recall.tolist(),
            "f1": report.f1.tolist(),
            "support": report.support.tolist(),
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"weighted F1 {report.weighted_f1:.6f}")
        print(f"macro F1    {report.macro_f1:.6f}")
        print(f"micro F1    {report.micro_f1:.6f}")
        print("class  precision  recall  f1      support")
        for c in range(len(report.support)):
            print(
                f"{c:<6d} {report.precision[c]:<10.4f} {report.recall[c]:<7.4f} "
                f"{report.f1[c]:<7.4f} {int(report.support[c])}"
            )
    return 0


def cmd_bound(args: argparse.Namespace) -> int:
    data = _load_input(args.input, args.points_labeled, args.classes)
    spec = json.loads(Path(args.regions).read_text(encoding="utf-8"))
    regions = [ProjectionRegion.box(r["lower"], r["upper"]) for r in spec["regions"]]
    bound = interchange_lower_bound(data, regions, rank=args.rank, norm_order=args.norm)
    print(f"lower bound {bound!r}")
    return 0


def cmd_diagnose(args: argparse.Namespace) -> int:
    data = _load_input(args.input, args.points_labeled, args.classes)
    codebook, _ = fileio.read_codebook(args.codebook)
    print(f"contrast ratio {contrast_ratio(data, codebook)!r}")
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    if args.spec:
        payload = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        spec = MixtureSpec(
            means=np.array(payload["means"]),
            scales=np.array(payload["scales"]),
            weights=np.array(payload["weights"]),
            count=int(payload["count"]),
            seed=int(payload.get("seed", args.seed)),
        )
    else:
        rng = np.random.default_rng(args.seed)
        means = rng.uniform(0.0, args.separation * args.clusters, size=(args.clusters, args.dim))
        spec = MixtureSpec(
            means=means,
            scales=np.full(args.clusters, args.spread),
            weights=np.full(args.clusters, 1.0 / args.clusters),
            count=args.clusters * args.per_cluster,
            seed=args.seed + 1,
        )
    data = generate(spec)
    if args.format == "embeddings":
        fileio.write_feature_set(args.out, data)
    else:
        fileio.write_points(args.out, data, labeled=True)
    print(f"wrote {data.count} points to {args.out}")
    return 0


# ----------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="squant", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("quantize", help="train a codebook with sampled one-center updates")
    _add_quantize_flags(p)
    p.add_argument("--from-manifest", default=None, help="re-run a recorded configuration")
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("kmeans", help="classical baselines: lloyd, minibatch, gradient, stochastic")
    _add_kmeans_flags(p)
    p.add_argument("--from-manifest", default=None)
    p.set_defaults(func=cmd_kmeans)

    p = sub.add_parser("evaluate", help="score a codebook against labeled data")
    _add_input_flags(p)
    p.add_argument("--codebook", required=True)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--labels-from", choices=["codebook", "data"], default="codebook")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bound", help="interchange-relaxation lower bound for boxed centers")
    _add_input_flags(p)
    p.add_argument("--regions", required=True, help="JSON file with K lower/upper boxes")
    p.add_argument("--rank", type=float, default=2.0)
    p.add_argument("--norm", type=float, default=2.0)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("diagnose", help="distance-contrast diagnostic")
    _add_input_flags(p)
    p.add_argument("--codebook", required=True)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("generate", help="write a deterministic synthetic fixture")
    p.add_argument("--spec", default=None, help="mixture spec JSON")
    p.add_argument("--clusters", type=int, default=3)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--per-cluster", type=int, default=50)
    p.add_argument("--spread", type=float, default=0.05)
    p.add_argument("--separation", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["points", "embeddings"], default="points")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    return parser


def _apply_manifest(args: argparse.Namespace) -> argparse.Namespace:
    manifest = json.loads(Path(args.from_manifest).read_text(encoding="utf-8"))
    for key, value in manifest["args"].items():
        setattr(args, key, value)
    return args


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "from_manifest", None):
            args = _apply_manifest(args)
        return args.func(args)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 1
    except (InvalidConfigError, InvalidScheduleError) as err:
        print(f"invalid configuration: {err}", file=sys.stderr)
        return 1
    except (FormatError, FileNotFoundError, json.JSONDecodeError, KeyError) as err:
        print(f"input error: {err}", file=sys.stderr)
        return 2
    except DivergenceError as err:
        print(f"diverged: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
