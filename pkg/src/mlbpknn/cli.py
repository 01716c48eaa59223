"""Command-line front end: ``mlbpknn {extract,classify,crossval,bench,inspect}``.

Exit status: 0 on success, 1 for usage errors, 2 for data errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import datastore
from .classify import METRICS, KnnClassifier, KnnConfig
from .errors import DataError
from .evaluate import benchmark_runtime, cross_validate, sweep
from .imageprep import PreprocessConfig, load_image, preprocess
from .mlbp import NeighborhoodSpec, extract, histogram_features, label_image

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

_PRE = PreprocessConfig()
_KNN = KnnConfig()
DEFAULT_FOLDS = 10
DEFAULT_SEED = 42


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _descriptor_flags():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("descriptor")
    g.add_argument("--neighbors", type=int, nargs="+", default=[NeighborhoodSpec().P],
                   metavar="P", help="neighbour count per scale (default: %(default)s)")
    g.add_argument("--radius", type=float, nargs="+", default=[NeighborhoodSpec().R],
                   metavar="R", help="sampling radius per scale (default: %(default)s)")
    g.add_argument("--uniformity-threshold", type=int, nargs="+", default=None, metavar="U",
                   help="uniformity threshold per scale (default: floor(P/4), i.e. 2 for P=8)")
    g.add_argument("--size", type=int, default=_PRE.target_size, metavar="W",
                   help="resize images to W x W (default: %(default)s)")
    g.add_argument("--sigma", type=float, default=_PRE.gaussian_sigma, metavar="S",
                   help="Gaussian smoothing sigma (default: %(default)s)")
    g.add_argument("--kernel-radius", type=int, default=_PRE.kernel_radius, metavar="K",
                   help="Gaussian kernel half-width (default: %(default)s)")
    g.add_argument("--no-smooth", action="store_true",
                   help="skip Gaussian smoothing (default: smoothing on)")
    return p


def _knn_flags():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("classifier")
    g.add_argument("--knn", type=int, default=_KNN.T, metavar="T",
                   help="number of nearest neighbours (default: %(default)s)")
    g.add_argument("--metric", choices=METRICS, default=_KNN.metric,
                   help="distance metric (default: %(default)s)")
    return p


def _specs(args):
    Ps, Rs, Us = args.neighbors, args.radius, args.uniformity_threshold
    if len(Rs) == 1 and len(Ps) > 1:
        Rs = Rs * len(Ps)
    if Us is None:
        Us = [None] * len(Ps)
    if not len(Ps) == len(Rs) == len(Us):
        raise ValueError("--neighbors, --radius and --uniformity-threshold need one value per scale")
    return tuple(NeighborhoodSpec(P, R, U) for P, R, U in zip(Ps, Rs, Us))


def _pre(args):
    return PreprocessConfig(args.size, args.sigma, args.kernel_radius, not args.no_smooth)


def _is_store(path: Path) -> bool:
    if not path.is_file():
        return False
    with open(path, encoding="utf-8", errors="replace") as fh:
        return fh.readline().startswith("# mlbp")


def _manifest(path):
    path = Path(path)
    if path.is_dir():
        return datastore.scan_directory(path)
    return datastore.read_manifest(path)


def _err(msg):
    print(f"error: {msg}", file=sys.stderr)


def _warn(msg):
    print(f"warning: {msg}", file=sys.stderr)


def _extract_manifest(manifest, specs, pre, skip_errors=False, jobs=1, quiet=False):
    def work(entry):
        path, _ = entry
        try:
            return extract(load_image(path), specs, pre), None
        except DataError as exc:
            return None, exc

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        results = list(pool.map(work, manifest.entries))

    ids, labels, rows, failures = [], [], [], []
    for i, ((path, label), (vec, exc)) in enumerate(zip(manifest.entries, results)):
        if exc is not None:
            failures.append((path, exc))
            continue
        ids.append(i)
        labels.append(label)
        rows.append(vec)
    for path, exc in failures:
        (_warn if skip_errors else _err)(f"{path}: {exc}")
    if failures and not skip_errors:
        raise DataError(f"{len(failures)} image(s) failed; rerun with --skip-errors to ignore")
    if not quiet:
        print(f"extracted {len(rows)} of {len(manifest)} images", file=sys.stderr)
    dim = sum(s.P + 2 for s in specs)
    feats = np.array(rows) if rows else np.empty((0, dim))
    return datastore.FeatureStore(specs, pre, ids, labels, feats)


def cmd_extract(args):
    manifest = _manifest(args.input)
    store = _extract_manifest(manifest, _specs(args), _pre(args), args.skip_errors, args.jobs)
    datastore.write_features(args.output, store)
    return EXIT_OK


def cmd_classify(args):
    specs, pre = _specs(args), _pre(args)
    store = datastore.read_features(args.store, specs, pre)
    if len(store) == 0:
        raise DataError(f"{args.store}: feature store is empty")
    cfg = KnnConfig(args.knn, args.metric)
    if cfg.T > len(store):
        raise DataError(f"T={cfg.T} exceeds the {len(store)} stored samples")
    model = KnnClassifier(store.samples())
    for q in args.queries:
        pred = model.predict(extract(load_image(q), specs, pre), cfg)
        nn = " ".join(f"{i}:{d:.6f}" for i, d in zip(pred.neighbor_ids, pred.neighbor_distances))
        print(f"{q}\t{pred.label}\t{nn}")
    return EXIT_OK


def _load_samples(args):
    path = Path(args.input)
    if _is_store(path):
        store = datastore.read_features(path)
        return store.samples(), store.specs, store.preprocess
    specs, pre = _specs(args), _pre(args)
    store = _extract_manifest(_manifest(path), specs, pre, args.skip_errors, args.jobs)
    return store.samples(), specs, pre


def cmd_crossval(args):
    samples, specs, pre = _load_samples(args)
    if len(samples) < args.folds:
        raise DataError(f"{len(samples)} samples are fewer than {args.folds} folds")
    if args.sweep:
        reports = sweep(samples, args.folds, args.seed)
        lines = [f"{args.folds}-fold cross-validation sweep, seed={args.seed}",
                 "   T  metric     mean_accuracy"]
        lines += [f"{r.knn.T:>4}  {r.knn.metric:<9}  {r.mean_accuracy:.4f}" for r in reports]
        text = "\n".join(lines) + "\n"
        payload = json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n"
    else:
        report = cross_validate(samples, args.folds, KnnConfig(args.knn, args.metric),
                                args.seed, specs, pre)
        text = report.format_table()
        payload = report.to_json()
    sys.stdout.write(text)
    if args.output:
        Path(args.output).write_text(payload, encoding="utf-8")
    return EXIT_OK


def cmd_bench(args):
    stats = benchmark_runtime(args.images, _specs(args), _pre(args), args.repetitions)
    sys.stdout.write(stats.format_table())
    return EXIT_OK


def cmd_inspect(args):
    img = preprocess(load_image(args.image), _pre(args))
    out = []
    for spec in _specs(args):
        labels = label_image(img, spec)
        hist = histogram_features(labels, spec)
        out.append(f"# labels P={spec.P} R={spec.R} UT={spec.U_T} "
                   f"({labels.shape[1]}x{labels.shape[0]})")
        out.extend(" ".join(str(v) for v in row) for row in labels)
        out.append(" ".join(f"f{i}={v:.12g}" for i, v in enumerate(hist)))
    text = "\n".join(out) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser():
    desc, knn = _descriptor_flags(), _knn_flags()
    parser = _Parser(prog="mlbpknn", description="MLBP texture features and Tanimoto k-NN.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", parents=[desc], help="extract a feature store")
    p.add_argument("input", help="manifest CSV (path,label) or class-per-directory root")
    p.add_argument("--output", required=True, metavar="PATH", help="feature store CSV to write")
    p.add_argument("--skip-errors", action="store_true",
                   help="warn and skip unreadable images (default: fail)")
    p.add_argument("--jobs", type=int, default=1, help="worker threads (default: %(default)s)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("classify", parents=[desc, knn], help="classify query images")
    p.add_argument("store", help="training feature store CSV")
    p.add_argument("queries", nargs="+", help="query images")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("crossval", parents=[desc, knn], help="k-fold cross-validation")
    p.add_argument("input", help="feature store, manifest CSV or class-per-directory root")
    p.add_argument("--folds", type=int, default=DEFAULT_FOLDS, metavar="K",
                   help="number of folds (default: %(default)s)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, metavar="N",
                   help="fold shuffling seed (default: %(default)s)")
    p.add_argument("--sweep", action="store_true",
                   help="evaluate T in {1,3,5} x {tanimoto,euclidean}")
    p.add_argument("--skip-errors", action="store_true",
                   help="warn and skip unreadable images (default: fail)")
    p.add_argument("--jobs", type=int, default=1, help="worker threads (default: %(default)s)")
    p.add_argument("--output", metavar="PATH", help="write the JSON report here")
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("bench", parents=[desc], help="time feature extraction per image")
    p.add_argument("images", nargs="+")
    p.add_argument("--repetitions", type=int, default=1, metavar="N",
                   help="runs per image (default: %(default)s)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("inspect", parents=[desc], help="dump the label map and histogram")
    p.add_argument("image")
    p.add_argument("--output", metavar="PATH", help="write here instead of stdout")
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        _err(str(exc))
        return EXIT_DATA
    except OSError as exc:
        _err(f"{exc.filename or ''}: {exc.strerror or exc}")
        return EXIT_DATA
    except ValueError as exc:
        _err(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
