"""Dataset manifests and CSV feature stores.

Feature store layout::

    # mlbp P=8 R=1.0 UT=2 W=128 sigma=1.0 kernel_radius=2 smooth=1
    id,label,f0,f1,...,f9
    0,female,0.0123,...

Multi-scale stores list one value per scale, e.g. ``P=8,16 R=1.0,2.0``.
"""
from __future__ import annotations

import csv
import io
import os
import tempfile
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classify import Sample
from .errors import FeatureStoreError, ManifestError, SpecMismatchError
from .imageprep import PreprocessConfig
from .mlbp import NeighborhoodSpec, SpecLike, as_specs

IMAGE_SUFFIXES = (".png", ".pgm")
ROW_SUM_TOL = 1e-6


@dataclass
class Manifest:
    entries: list = field(default_factory=list)  # (Path, label) pairs

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def paths(self) -> list:
        return [p for p, _ in self.entries]

    @property
    def labels(self) -> list:
        return [lab for _, lab in self.entries]


def read_manifest(path) -> Manifest:
    """Read a ``path,label`` CSV; relative paths resolve against its folder."""
    path = Path(path)
    base = path.parent
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["path", "label"]:
            raise ManifestError("expected header 'path,label'", line=1)
        entries = []
        seen: dict = {}
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ManifestError(f"expected 2 fields, got {len(row)}", line=line)
            p, label = row[0].strip(), row[1].strip()
            if not p:
                raise ManifestError("empty path", line=line)
            if not label:
                raise ManifestError("empty label", line=line)
            resolved = Path(p) if Path(p).is_absolute() else base / p
            key = os.path.normpath(resolved)
            if key in seen:
                raise ManifestError(f"duplicate path {p!r} (first on line {seen[key]})",
                                    line=line)
            seen[key] = line
            entries.append((resolved, label))
    return Manifest(entries)


def scan_directory(root) -> Manifest:
    """One class per immediate subdirectory; deeper levels are ignored."""
    root = Path(root)
    if not root.is_dir():
        raise ManifestError(f"{root} is not a directory")
    classes = sorted(d for d in root.iterdir() if d.is_dir())
    if not classes:
        raise ManifestError(f"{root} has no class subdirectories")
    entries = []
    for d in classes:
        files = sorted(f for f in d.iterdir()
                       if f.is_file() and f.suffix.lower() in IMAGE_SUFFIXES)
        if not files:
            warnings.warn(f"class directory {d} contains no images", stacklevel=2)
        entries.extend((f, d.name) for f in files)
    return Manifest(entries)


@dataclass
class FeatureStore:
    specs: tuple
    preprocess: PreprocessConfig
    ids: list
    labels: list
    features: np.ndarray  # (n_rows, dim)

    def __post_init__(self):
        self.specs = as_specs(self.specs)
        self.features = np.asarray(self.features, dtype=np.float64)
        if len(self.labels) != len(self.ids):
            raise FeatureStoreError("ids and labels differ in length")
        if self.features.shape != (len(self.ids), self.dim):
            raise FeatureStoreError(
                f"feature array has shape {self.features.shape}, "
                f"expected ({len(self.ids)}, {self.dim})")

    @property
    def dim(self) -> int:
        return sum(s.P + 2 for s in self.specs)

    def __len__(self):
        return len(self.ids)

    def samples(self) -> list:
        return [Sample(f, lab, i) for i, lab, f in zip(self.ids, self.labels, self.features)]


def _header_line(specs, pre: PreprocessConfig) -> str:
    def join(vals):
        return ",".join(str(v) for v in vals)

    return (f"# mlbp P={join(s.P for s in specs)} R={join(s.R for s in specs)} "
            f"UT={join(s.U_T for s in specs)} W={pre.target_size} sigma={pre.gaussian_sigma} "
            f"kernel_radius={pre.kernel_radius} smooth={int(pre.smoothing_enabled)}")


def _parse_header(line: str):
    parts = line.lstrip("#").split()
    if not parts or parts[0] != "mlbp":
        raise FeatureStoreError("missing '# mlbp ...' header", row=1)
    kv = {}
    for p in parts[1:]:
        key, sep, val = p.partition("=")
        if not sep:
            raise FeatureStoreError(f"bad header field {p!r}", row=1)
        kv[key] = val
    try:
        Ps = [int(v) for v in kv["P"].split(",")]
        Rs = [float(v) for v in kv["R"].split(",")]
        UTs = [int(v) for v in kv["UT"].split(",")]
        if not len(Ps) == len(Rs) == len(UTs):
            raise FeatureStoreError("P, R and UT list different numbers of scales", row=1)
        specs = tuple(NeighborhoodSpec(P, R, u) for P, R, u in zip(Ps, Rs, UTs))
        pre = PreprocessConfig(
            target_size=int(kv["W"]),
            gaussian_sigma=float(kv["sigma"]),
            kernel_radius=int(kv.get("kernel_radius", PreprocessConfig.kernel_radius)),
            smoothing_enabled=kv.get("smooth", "1") not in ("0", "off", "false"),
        )
    except KeyError as exc:
        raise FeatureStoreError(f"header lacks {exc.args[0]}", row=1) from None
    except ValueError as exc:
        raise FeatureStoreError(f"bad header value: {exc}", row=1) from None
    return specs, pre


def write_features(path, store: FeatureStore) -> None:
    """Write ``store`` as CSV, atomically (temp file + rename)."""
    path = Path(path)
    buf = io.StringIO()
    buf.write(_header_line(store.specs, store.preprocess) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "label"] + [f"f{i}" for i in range(store.dim)])
    for i, lab, row in zip(store.ids, store.labels, store.features):
        w.writerow([i, lab] + [repr(float(v)) for v in row])

    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_features(path, spec: SpecLike = None,
                  preprocess: PreprocessConfig | None = None) -> FeatureStore:
    """Load a feature store, optionally checking it matches ``spec``/``preprocess``."""
    with open(path, newline="", encoding="utf-8") as fh:
        text = fh.read()
    lines = text.splitlines()
    if not lines:
        raise FeatureStoreError("empty feature store")
    specs, pre = _parse_header(lines[0])
    if spec is not None and as_specs(spec) != specs:
        raise SpecMismatchError(f"store built with {specs}, requested {as_specs(spec)}")
    if preprocess is not None and preprocess != pre:
        raise SpecMismatchError(f"store built with {pre}, requested {preprocess}")

    dim = sum(s.P + 2 for s in specs)
    bounds = np.cumsum([0] + [s.P + 2 for s in specs])
    reader = csv.reader(lines[1:])
    header = next(reader, None)
    expected = ["id", "label"] + [f"f{i}" for i in range(dim)]
    if header != expected:
        raise FeatureStoreError(f"column header does not match a {dim}-value store", row=2)

    ids, labels, rows = [], [], []
    for n, rec in enumerate(reader, start=3):
        if not rec:
            continue
        if len(rec) != dim + 2:
            raise FeatureStoreError(f"expected {dim + 2} fields, got {len(rec)}", row=n)
        try:
            ids.append(int(rec[0]))
            vals = [float(v) for v in rec[2:]]
        except ValueError as exc:
            raise FeatureStoreError(str(exc), row=n) from None
        if not rec[1]:
            raise FeatureStoreError("empty label", row=n)
        v = np.array(vals)
        if not np.all(np.isfinite(v)) or (v < 0).any():
            raise FeatureStoreError("values must be finite and nonnegative", row=n)
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            if abs(v[lo:hi].sum() - 1.0) > ROW_SUM_TOL:
                raise FeatureStoreError("histogram does not sum to 1", row=n)
        labels.append(rec[1])
        rows.append(v)
    if len(set(ids)) != len(ids):
        raise FeatureStoreError("duplicate sample ids")
    feats = np.array(rows) if rows else np.empty((0, dim))
    return FeatureStore(specs, pre, ids, labels, feats)
