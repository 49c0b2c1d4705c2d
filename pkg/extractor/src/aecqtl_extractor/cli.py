"""CLI: extract frozen-backbone features from a benchmark dataset to AEFV files."""
from __future__ import annotations

import argparse
import sys

from .extraction import DATASETS, FEATURE_DIMS, ExtractionSpec, extract


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aecqtl-extract", description=__doc__)
    parser.add_argument("--dataset", choices=DATASETS, required=True)
    parser.add_argument("--classes", required=True,
                        help="comma-separated class pair, e.g. 0,1 or 3,8")
    parser.add_argument("--model", choices=sorted(FEATURE_DIMS), required=True)
    parser.add_argument("--train-out", required=True, dest="train_out")
    parser.add_argument("--test-out", required=True, dest="test_out")
    parser.add_argument("--per-class-train", type=int, default=256, dest="per_class_train")
    parser.add_argument("--per-class-test", type=int, default=128, dest="per_class_test")
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--data-root", default="./datasets", dest="data_root")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        a, b = (int(v) for v in args.classes.split(","))
    except ValueError:
        build_parser().error(f"--classes must be two integers, got {args.classes!r}")
    spec = ExtractionSpec(
        dataset=args.dataset, class_pair=(a, b), source_model=args.model,
        train_out=args.train_out, test_out=args.test_out,
        per_class_train=args.per_class_train, per_class_test=args.per_class_test,
        seed=args.seed, data_root=args.data_root)
    try:
        n_train, n_test = extract(spec)
    except Exception as exc:  # download/IO failures surface with context
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {n_train} train and {n_test} test samples "
          f"(dim {FEATURE_DIMS[spec.source_model]})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
