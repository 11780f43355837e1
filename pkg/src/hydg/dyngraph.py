"""Discrete dynamic graphs: data model, text-format I/O, synthetic generator.

A dynamic graph is an ordered list of snapshots over one fixed node universe.
Nodes may appear and disappear; a per-slice presence mask encodes both without
re-indexing. Edges are undirected and unweighted.

Dataset directory format (UTF-8 text):
  meta              one line "n d C T"
  edges_<t>.txt     one "u v" pair per line
  feat_<t>.csv      n rows of d comma-separated reals (optional)
  labels_<t>.txt    one class id or "?" per node
  presence_<t>.txt  one 0/1 per node (optional; default all-present)

When feature files are absent, features are synthesized as one-hot degree
buckets: node degree capped at d-1 selects the hot column, so the meta line's
d doubles as the bucket count (write d=16 for the conventional default).
"""

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ParseError, SchemaError, ShapeError
from .numcore import Rng, SparseMatrix

UNKNOWN_LABEL = -1


@dataclass
class SnapshotGraph:
    """One time slice: adjacency, features, labels, presence."""

    t: int
    adjacency: SparseMatrix
    features: np.ndarray
    labels: np.ndarray
    presence: np.ndarray

    def validate(self, n, d, num_classes):
        if self.adjacency.shape != (n, n):
            raise ShapeError(f"slice {self.t}: adjacency shape {self.adjacency.shape}")
        if self.features.shape != (n, d):
            raise ShapeError(f"slice {self.t}: feature shape {self.features.shape}")
        if self.labels.shape != (n,) or self.presence.shape != (n,):
            raise ShapeError(f"slice {self.t}: label/presence length")
        if not self.adjacency.is_symmetric():
            raise SchemaError(f"slice {self.t}: adjacency not symmetric")
        if not np.all(np.isfinite(self.features)):
            raise SchemaError(f"slice {self.t}: non-finite features")
        known = self.labels != UNKNOWN_LABEL
        if np.any((self.labels[known] < 0) | (self.labels[known] >= num_classes)):
            raise SchemaError(f"slice {self.t}: label out of range")
        rows, cols = self.adjacency.csr.nonzero()
        if rows.size and not (self.presence[rows].all() and self.presence[cols].all()):
            raise SchemaError(f"slice {self.t}: edge touches an absent node")

    def edge_count(self):
        """Undirected edge count (self-loops would count once)."""
        nnz = self.adjacency.nnz
        diag = int(np.count_nonzero(self.adjacency.csr.diagonal()))
        return (nnz - diag) // 2 + diag

    def edge_list(self):
        """Sorted unique undirected pairs (u <= v)."""
        rows, cols = self.adjacency.csr.nonzero()
        keep = rows <= cols
        pairs = sorted(zip(rows[keep].tolist(), cols[keep].tolist()))
        return pairs


@dataclass
class DynamicGraph:
    """Ordered snapshots sharing node universe size n, feature dim d, C classes."""

    snapshots: list
    n: int
    d: int
    num_classes: int

    @property
    def T(self):
        return len(self.snapshots)

    def validate(self):
        if not self.snapshots:
            raise SchemaError("dynamic graph has no snapshots")
        for t, snap in enumerate(self.snapshots):
            if snap.t != t:
                raise SchemaError(f"slice index {snap.t} at position {t}")
            snap.validate(self.n, self.d, self.num_classes)
        return self

    def total_edges(self):
        return sum(s.edge_count() for s in self.snapshots)

    def stats(self):
        return {
            "nodes": self.n,
            "edges": self.total_edges(),
            "time_steps": self.T,
            "classes": self.num_classes,
            "attributes": self.d,
        }


@dataclass(frozen=True)
class SplitSpec:
    """Train on slices [0, t], evaluate on the strictly later slices."""

    train_slices: tuple
    test_slices: tuple

    @property
    def last_train(self):
        return self.train_slices[-1]


def split(g, t):
    """Split at slice t: train = {0..t}, test = {t+1..T-1}; both nonempty."""
    t = int(t)
    if not 0 <= t <= g.T - 2:
        raise ParameterError(f"split t={t} needs 0 <= t <= T-2 (T={g.T})")
    return SplitSpec(tuple(range(0, t + 1)), tuple(range(t + 1, g.T)))


# ---------------------------------------------------------------------------
# loading and saving


def _read_lines(path):
    with open(path, "r", encoding="utf-8") as f:
        return f.read().splitlines()


def _parse_meta(path):
    lines = _read_lines(path)
    if not lines:
        raise ParseError(path, 1, "empty meta file")
    parts = lines[0].split()
    if len(parts) != 4:
        raise ParseError(path, 1, f"meta line needs 'n d C T', got {lines[0]!r}")
    try:
        n, d, c, t = (int(p) for p in parts)
    except ValueError:
        raise ParseError(path, 1, f"non-integer meta field in {lines[0]!r}") from None
    if min(n, d, c, t) < 1:
        raise SchemaError("meta fields must be positive")
    return n, d, c, t


def _load_edges(path, n):
    """Unique undirected pairs from an edge file; duplicates collapse."""
    pairs = set()
    for lineno, line in enumerate(_read_lines(path), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(path, lineno, f"expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(path, lineno, f"non-integer endpoint in {line!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(path, lineno, f"endpoint out of range in {line!r}")
        pairs.add((min(u, v), max(u, v)))
    return sorted(pairs)


def _adjacency_from_pairs(pairs, n):
    if not pairs:
        return SparseMatrix.zeros(n, n)
    arr = np.asarray(pairs, dtype=np.intp)
    u, v = arr[:, 0], arr[:, 1]
    off = u != v
    rows = np.concatenate([u, v[off]])
    cols = np.concatenate([v, u[off]])
    return SparseMatrix.from_coo(n, n, rows, cols, np.ones(rows.size))


def _load_features(path, n, d):
    rows = []
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != d:
            raise ParseError(path, lineno, f"expected {d} values, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise ParseError(path, lineno, "non-numeric feature value") from None
    if len(rows) != n:
        raise SchemaError(f"{path}: expected {n} feature rows, got {len(rows)}")
    return np.asarray(rows, dtype=np.float64)


def _load_labels(path, n, num_classes):
    labels = []
    for lineno, line in enumerate(_read_lines(path), start=1):
        tok = line.strip()
        if not tok:
            continue
        if tok == "?":
            labels.append(UNKNOWN_LABEL)
            continue
        try:
            val = int(tok)
        except ValueError:
            raise ParseError(path, lineno, f"label must be int or '?', got {tok!r}") from None
        if not 0 <= val < num_classes:
            raise ParseError(path, lineno, f"label {val} outside [0, {num_classes})")
        labels.append(val)
    if len(labels) != n:
        raise SchemaError(f"{path}: expected {n} labels, got {len(labels)}")
    return np.asarray(labels, dtype=np.int64)


def _load_presence(path, n):
    vals = []
    for lineno, line in enumerate(_read_lines(path), start=1):
        tok = line.strip()
        if not tok:
            continue
        if tok not in ("0", "1"):
            raise ParseError(path, lineno, f"presence must be 0 or 1, got {tok!r}")
        vals.append(tok == "1")
    if len(vals) != n:
        raise SchemaError(f"{path}: expected {n} presence flags, got {len(vals)}")
    return np.asarray(vals, dtype=bool)


def _degree_bucket_features(adjacency, d):
    deg = np.asarray(adjacency.csr.sum(axis=1)).ravel().astype(np.int64)
    bucket = np.minimum(deg, d - 1)
    feats = np.zeros((adjacency.rows, d), dtype=np.float64)
    feats[np.arange(adjacency.rows), bucket] = 1.0
    return feats


def load_dataset(path):
    """Read a dataset directory into a validated DynamicGraph."""
    meta_path = os.path.join(path, "meta")
    if not os.path.exists(meta_path):
        raise SchemaError(f"missing meta file under {path}")
    n, d, num_classes, T = _parse_meta(meta_path)
    snaps = []
    for t in range(T):
        edges_path = os.path.join(path, f"edges_{t}.txt")
        if not os.path.exists(edges_path):
            raise SchemaError(f"missing {edges_path}")
        adjacency = _adjacency_from_pairs(_load_edges(edges_path, n), n)
        feat_path = os.path.join(path, f"feat_{t}.csv")
        if os.path.exists(feat_path):
            features = _load_features(feat_path, n, d)
        else:
            features = _degree_bucket_features(adjacency, d)
        labels_path = os.path.join(path, f"labels_{t}.txt")
        if not os.path.exists(labels_path):
            raise SchemaError(f"missing {labels_path}")
        labels = _load_labels(labels_path, n, num_classes)
        pres_path = os.path.join(path, f"presence_{t}.txt")
        presence = _load_presence(pres_path, n) if os.path.exists(pres_path) else np.ones(n, dtype=bool)
        snaps.append(SnapshotGraph(t, adjacency, features, labels, presence))
    return DynamicGraph(snaps, n, d, num_classes).validate()


def save_dataset(g, path, write_features=True):
    """Write the dataset directory format; inverse of load_dataset."""
    os.makedirs(path, exist_ok=True)
    with open(os.path.join(path, "meta"), "w", encoding="utf-8") as f:
        f.write(f"{g.n} {g.d} {g.num_classes} {g.T}\n")
    for snap in g.snapshots:
        with open(os.path.join(path, f"edges_{snap.t}.txt"), "w", encoding="utf-8") as f:
            for u, v in snap.edge_list():
                f.write(f"{u} {v}\n")
        if write_features:
            with open(os.path.join(path, f"feat_{snap.t}.csv"), "w", encoding="utf-8") as f:
                for row in snap.features:
                    f.write(",".join(repr(float(x)) for x in row) + "\n")
        with open(os.path.join(path, f"labels_{snap.t}.txt"), "w", encoding="utf-8") as f:
            for lab in snap.labels:
                f.write("?\n" if lab == UNKNOWN_LABEL else f"{lab}\n")
        with open(os.path.join(path, f"presence_{snap.t}.txt"), "w", encoding="utf-8") as f:
            for p in snap.presence:
                f.write(f"{int(p)}\n")


# ---------------------------------------------------------------------------
# synthetic generator


def generate_sbm(
    n,
    T,
    num_classes,
    p_in,
    p_out,
    drift_rate,
    feature_noise=2.0,
    seed=0,
    feature_dim=8,
):
    """Drifting stochastic block model.

    Slice 0 assigns each node one of `num_classes` blocks uniformly; at every
    later slice each node redraws its block uniformly with probability
    `drift_rate` (the redraw may land on the same block). Edges within a block
    appear with p_in, across blocks with p_out. Features are the node's
    current block mean plus isotropic Gaussian noise; labels are the block.
    """
    if not (0.0 <= p_out < p_in <= 1.0):
        raise ParameterError(f"need 0 <= p_out < p_in <= 1, got p_in={p_in} p_out={p_out}")
    if not 0.0 <= drift_rate <= 1.0:
        raise ParameterError(f"drift_rate {drift_rate} outside [0, 1]")
    if min(n, T, num_classes, feature_dim) < 1:
        raise ParameterError("n, T, C, feature_dim must be positive")
    rng = Rng(seed)
    means = rng.stream("sbm/means").normal(size=(num_classes, feature_dim))

    blocks = rng.stream("sbm/blocks0").integers(0, num_classes, size=n)
    snaps = []
    for t in range(T):
        if t > 0:
            st = rng.stream(f"sbm/drift{t}")
            moves = st.random(n) < drift_rate
            redraw = st.integers(0, num_classes, size=n)
            blocks = np.where(moves, redraw, blocks)
        same = blocks[:, None] == blocks[None, :]
        prob = np.where(same, p_in, p_out)
        coin = rng.stream(f"sbm/edges{t}").random((n, n))
        upper = np.triu(coin < prob, k=1)
        u, v = np.nonzero(upper)
        adjacency = _adjacency_from_pairs(list(zip(u.tolist(), v.tolist())), n)
        noise = rng.stream(f"sbm/feat{t}").normal(size=(n, feature_dim))
        features = means[blocks] + feature_noise * noise
        snaps.append(
            SnapshotGraph(
                t,
                adjacency,
                features,
                blocks.astype(np.int64).copy(),
                np.ones(n, dtype=bool),
            )
        )
    return DynamicGraph(snaps, n, feature_dim, num_classes).validate()
