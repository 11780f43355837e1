"""Hypergraph construction.

Individual level: every present (node, slice) vertex anchors one hyperedge
per temporal scale, connecting it to its K nearest embedding-space neighbours
drawn from *other* slices within the scale's radius tau. Group level: per
class and slice, labelled embeddings are k-means clustered and aggregated
into prototypes, and the same KNN construction runs over each class's
prototypes separately.

Neighbour ranking uses squared metric values with a deterministic tie-break:
(distance, |slice gap|, slice index, node/cluster index), all ascending.
Construction always runs on detached embeddings; topology carries no
gradient.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._kernels import topk_temporal
from .errors import ContractError, ParameterError

SCALES = ("short", "mid", "long")
METRICS = ("euclidean", "cosine", "chebyshev")

_CHUNK = 256


class IndividualVertex(NamedTuple):
    node: int
    t: int


class GroupVertex(NamedTuple):
    cls: int
    cluster: int
    t: int


@dataclass(frozen=True)
class Hyperedge:
    """Anchor plus selected neighbours; members lists the anchor first,
    then neighbours in rank order. Positions index the owning hypergraph's
    vertex list."""

    anchor: int
    members: tuple
    scale: str


@dataclass
class Hypergraph:
    vertices: list
    slices: np.ndarray
    keys: np.ndarray
    feature_rows: np.ndarray
    edges: list

    @property
    def num_vertices(self):
        return len(self.vertices)

    @property
    def num_edges(self):
        return len(self.edges)

    def member_ids(self, edge):
        return {self.vertices[p] for p in edge.members}

    def anchor_id(self, edge):
        return self.vertices[edge.anchor]


def format_hypergraph(hg):
    """Debug dump: one line per edge, 'scale anchor: member member ...'."""

    def name(v):
        if isinstance(v, IndividualVertex):
            return f"v{v.node}t{v.t}"
        return f"c{v.cls}m{v.cluster}t{v.t}"

    lines = []
    for e in hg.edges:
        members = " ".join(name(hg.vertices[p]) for p in e.members)
        lines.append(f"{e.scale} {name(hg.vertices[e.anchor])}: {members}")
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# distances


def pairwise_rank_distance(x, metric="euclidean", y=None):
    """Ranking distances between rows of x and y (squared L2 for euclidean,
    1 - cos for cosine, max |diff| for chebyshev)."""
    if metric not in METRICS:
        raise ParameterError(f"unknown metric {metric!r}")
    y = x if y is None else y
    if metric == "cosine":
        nx = np.linalg.norm(x, axis=1, keepdims=True)
        ny = np.linalg.norm(y, axis=1, keepdims=True)
        xn = np.where(nx > 0, x / np.where(nx > 0, nx, 1.0), 0.0)
        yn = np.where(ny > 0, y / np.where(ny > 0, ny, 1.0), 0.0)
        return np.maximum(1.0 - xn @ yn.T, 0.0)
    out = np.empty((x.shape[0], y.shape[0]))
    for lo in range(0, x.shape[0], _CHUNK):
        hi = min(lo + _CHUNK, x.shape[0])
        diff = x[lo:hi, None, :] - y[None, :, :]
        if metric == "euclidean":
            out[lo:hi] = np.einsum("ijk,ijk->ij", diff, diff)
        else:
            out[lo:hi] = np.abs(diff).max(axis=2)
    return out


def rank_to_distance(vals, metric="euclidean"):
    """Map ranking values back to plain distances (sqrt for euclidean)."""
    if metric == "euclidean":
        return np.sqrt(vals)
    return vals


# ---------------------------------------------------------------------------
# temporal KNN

def _individual_universe(table):
    verts = []
    rows = []
    for pos, t in enumerate(table.slice_ids):
        for i in np.flatnonzero(table.presence[pos]):
            verts.append(IndividualVertex(int(i), int(t)))
            rows.append(pos * table.n + int(i))
    slices = np.array([v.t for v in verts], dtype=np.int64)
    keys = np.array([v.node for v in verts], dtype=np.int64)
    return verts, slices, keys, np.array(rows, dtype=np.intp)


def knn_temporal(anchor, table, K, tau, metric="euclidean", scale="short"):
    """Hyperedge for one anchor over the table's present-vertex universe."""
    if K < 0 or tau < 0:
        raise ParameterError("K and tau must be nonnegative")
    verts, slices, keys, rows = _individual_universe(table)
    try:
        a = verts.index(IndividualVertex(int(anchor[0]), int(anchor[1])))
    except ValueError:
        raise ContractError(f"anchor {anchor} is not a present vertex") from None
    x = table.detached()[rows]
    d_row = pairwise_rank_distance(x[a : a + 1], metric, x)
    members, counts = topk_temporal(d_row, slices[a : a + 1], slices, keys, int(K), int(tau))
    sel = tuple(int(m) for m in members[0, : counts[0]])
    edge = Hyperedge(anchor=a, members=(a,) + sel, scale=scale)
    return edge, Hypergraph(verts, slices, keys, rows, [edge])


def _build_edges(slices, keys, dist, K, taus, scale_names):
    edges = [None] * (len(slices) * len(scale_names))
    per_scale = []
    for tau in taus:
        members, counts = topk_temporal(dist, slices, slices, keys, int(K), int(tau))
        per_scale.append((members, counts))
    nscales = len(scale_names)
    for a in range(len(slices)):
        for s, name in enumerate(scale_names):
            members, counts = per_scale[s]
            sel = tuple(int(m) for m in members[a, : counts[a]])
            edges[a * nscales + s] = Hyperedge(anchor=a, members=(a,) + sel, scale=name)
    return edges


def build_individual(table, K, tau_short, tau_mid, tau_long, metric="euclidean"):
    """Union hypergraph of the three per-scale hyperedge sets, one edge per
    (present vertex, scale), edge list ordered by (anchor, scale)."""
    if not 0 <= tau_short <= tau_mid <= tau_long:
        raise ParameterError(
            f"tau scales must be ordered, got ({tau_short}, {tau_mid}, {tau_long})"
        )
    if K < 0:
        raise ParameterError("K must be nonnegative")
    verts, slices, keys, rows = _individual_universe(table)
    x = table.detached()[rows]
    dist = pairwise_rank_distance(x, metric)
    edges = _build_edges(slices, keys, dist, K, (tau_short, tau_mid, tau_long), SCALES)
    return Hypergraph(verts, slices, keys, rows, edges)


# ---------------------------------------------------------------------------
# k-means


def kmeans(points, M, seed):
    """Lloyd's iterations from k-means++ seeding.

    Runs at most 100 iterations, stopping once assignments are stable.
    The effective cluster count is min(M, number of distinct points); empty
    clusters keep their previous centroid. Returns (assignments, centroids).
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ContractError("kmeans needs a nonempty 2-D point set")
    if M < 1:
        raise ParameterError("M must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = points.shape[0]
    m_eff = min(int(M), np.unique(points, axis=0).shape[0])

    centroids = np.empty((m_eff, points.shape[1]))
    centroids[0] = points[int(rng.integers(n))]
    d2 = ((points - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, m_eff):
        probs = d2 / d2.sum()
        centroids[j] = points[int(rng.choice(n, p=probs))]
        d2 = np.minimum(d2, ((points - centroids[j]) ** 2).sum(axis=1))

    assign = np.full(n, -1, dtype=np.int64)
    for _ in range(100):
        dists = pairwise_rank_distance(points, "euclidean", centroids)
        new_assign = np.argmin(dists, axis=1)
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for j in range(m_eff):
            sel = assign == j
            if np.any(sel):
                centroids[j] = points[sel].mean(axis=0)
    return assign, centroids


# ---------------------------------------------------------------------------
# group prototypes


@dataclass(frozen=True)
class GroupPrototype:
    """One cluster of same-class embeddings in one slice, aggregated.

    `member_rows` holds the stacked-table rows that formed the cluster, so a
    differentiable copy of `vector` can be rebuilt on the tape.
    """

    cls: int
    cluster: int
    t: int
    vector: np.ndarray
    member_rows: np.ndarray


AGGS = ("avg", "max", "min")


def _aggregate(block, agg):
    if agg == "avg":
        return block.mean(axis=0)
    if agg == "max":
        return block.max(axis=0)
    return block.min(axis=0)


def group_prototypes(table, labels, M, agg, rng, salt=""):
    """Cluster labelled embeddings per (class, slice) and aggregate.

    labels: one label array per entry of table.slice_ids (UNKNOWN entries and
    absent nodes are skipped). rng is an hydg Rng; each (class, slice) cell
    draws its k-means seeding from its own substream.
    """
    if agg not in AGGS:
        raise ParameterError(f"unknown agg {agg!r}")
    if M < 1:
        raise ParameterError("M must be >= 1")
    stacked = table.detached()
    classes = set()
    for lab in labels:
        classes.update(int(c) for c in np.unique(lab) if c >= 0)
    protos = []
    for c in sorted(classes):
        for pos, t in enumerate(table.slice_ids):
            lab = labels[pos]
            sel = np.flatnonzero((lab == c) & table.presence[pos])
            if sel.size == 0:
                continue
            rows = pos * table.n + sel
            pts = stacked[rows]
            assign, _ = kmeans(pts, M, rng.stream(f"kmeans/{salt}/c{c}/t{t}"))
            m_out = 0
            for j in range(int(assign.max()) + 1):
                mask = assign == j
                if not np.any(mask):
                    continue
                block = pts[mask]
                protos.append(
                    GroupPrototype(
                        cls=c,
                        cluster=m_out,
                        t=int(t),
                        vector=_aggregate(block, agg),
                        member_rows=rows[mask].astype(np.intp),
                    )
                )
                m_out += 1
    return protos


def build_group(protos, K, tau_short, tau_mid, tau_long, metric="euclidean", positions=None):
    """KNN hypergraph over one class's prototypes (same construction and
    tie-break as the individual level, cluster index as the key).

    `positions` optionally maps each prototype to its row in a larger
    prototype matrix (used when several classes share one feature table)."""
    if not protos:
        raise ContractError("build_group needs at least one prototype")
    if len({p.cls for p in protos}) != 1:
        raise ContractError("build_group operates on a single class")
    if not 0 <= tau_short <= tau_mid <= tau_long:
        raise ParameterError("tau scales must be ordered")
    order = sorted(range(len(protos)), key=lambda i: (protos[i].t, protos[i].cluster))
    protos = [protos[i] for i in order]
    if positions is None:
        rows = np.arange(len(protos), dtype=np.intp)
    else:
        positions = np.asarray(positions, dtype=np.intp)
        rows = positions[order]
    verts = [GroupVertex(p.cls, p.cluster, p.t) for p in protos]
    slices = np.array([p.t for p in protos], dtype=np.int64)
    keys = np.array([p.cluster for p in protos], dtype=np.int64)
    x = np.vstack([p.vector for p in protos])
    dist = pairwise_rank_distance(x, metric)
    edges = _build_edges(slices, keys, dist, K, (tau_short, tau_mid, tau_long), SCALES)
    return Hypergraph(verts, slices, keys, rows, edges)


def build_group_all(protos, K, tau_short, tau_mid, tau_long, metric="euclidean"):
    """Per-class group hypergraphs merged over one shared prototype list.

    Vertices keep the prototype list's order ((class, t, cluster) ascending);
    edges never mix classes. feature_rows index the prototype list itself.
    """
    if not protos:
        raise ContractError("no prototypes to build from")
    verts, slices, keys, rows, edges = [], [], [], [], []
    by_class = {}
    for i, p in enumerate(protos):
        by_class.setdefault(p.cls, []).append(i)
    offset = 0
    for c in sorted(by_class):
        idx = by_class[c]
        sub = build_group(
            [protos[i] for i in idx],
            K,
            tau_short,
            tau_mid,
            tau_long,
            metric,
            positions=idx,
        )
        verts.extend(sub.vertices)
        slices.append(sub.slices)
        keys.append(sub.keys)
        rows.append(sub.feature_rows)
        for e in sub.edges:
            edges.append(
                Hyperedge(
                    anchor=e.anchor + offset,
                    members=tuple(m + offset for m in e.members),
                    scale=e.scale,
                )
            )
        offset += sub.num_vertices
    return Hypergraph(
        verts,
        np.concatenate(slices),
        np.concatenate(keys),
        np.concatenate(rows),
        edges,
    )
