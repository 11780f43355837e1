"""Per-snapshot GNN feature extraction.

Two interchangeable two-layer backbones produce an (n, h) embedding matrix
per slice: a symmetric-normalized GCN and a mean-aggregator GraphSAGE. One
parameter set is shared across all slices; slices are processed
independently. Rows of absent nodes are forced to zero so they never leak
into neighbour aggregation.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ParameterError, ShapeError
from .numcore import SparseMatrix, Tensor, add, matmul, mul, relu, spmm, vstack

BACKBONE_KINDS = ("gcn", "sage")


@dataclass
class BackboneParams:
    """Shared-across-slices layer weights for one backbone kind."""

    kind: str
    tensors: dict

    def all_params(self):
        return [(f"backbone.{name}", t) for name, t in sorted(self.tensors.items())]


def glorot(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return Tensor(rng.uniform(-limit, limit, size=(fan_in, fan_out)), requires_grad=True)


def init_backbone(kind, d, h, rng):
    """Glorot-uniform init from the given numpy Generator."""
    if kind == "gcn":
        tensors = {"w1": glorot(rng, d, h), "w2": glorot(rng, h, h)}
    elif kind == "sage":
        tensors = {
            "w1_self": glorot(rng, d, h),
            "w1_nbr": glorot(rng, d, h),
            "w2_self": glorot(rng, h, h),
            "w2_nbr": glorot(rng, h, h),
        }
    else:
        raise ParameterError(f"unknown backbone kind {kind!r}")
    return BackboneParams(kind, tensors)


def _presence_mask(n, presence):
    if presence is None:
        return np.ones(n, dtype=bool)
    presence = np.asarray(presence, dtype=bool)
    if presence.shape != (n,):
        raise ShapeError(f"presence length {presence.shape} for n={n}")
    return presence


def gcn_operator(adjacency, presence=None):
    """Constant D^{-1/2} (A + I) D^{-1/2} with self-loops on present nodes only."""
    n = adjacency.rows
    mask = _presence_mask(n, presence)
    a = adjacency.csr + sp.diags(mask.astype(np.float64), format="csr")
    deg = np.asarray(a.sum(axis=1)).ravel()
    dinv = np.where(deg > 0, 1.0 / np.sqrt(np.where(deg > 0, deg, 1.0)), 0.0)
    norm = sp.diags(dinv) @ a @ sp.diags(dinv)
    return SparseMatrix(norm.tocsr())


def sage_operator(adjacency, presence=None):
    """Constant row-normalized adjacency (neighbour mean); zero rows if isolated."""
    n = adjacency.rows
    _presence_mask(n, presence)
    a = adjacency.csr
    deg = np.asarray(a.sum(axis=1)).ravel()
    dinv = np.where(deg > 0, 1.0 / np.where(deg > 0, deg, 1.0), 0.0)
    return SparseMatrix((sp.diags(dinv) @ a).tocsr())


def _mask_tensor(n, presence):
    return Tensor(_presence_mask(n, presence).astype(np.float64).reshape(n, 1))


def gcn_layer(adjacency, z, theta, presence=None):
    if adjacency.cols != z.rows:
        raise ShapeError(f"gcn_layer: adjacency {adjacency.shape} vs z {z.shape}")
    op = gcn_operator(adjacency, presence)
    mask = _mask_tensor(z.rows, presence)
    out = relu(matmul(spmm(op, mul(z, mask)), theta))
    return mul(out, mask)


def sage_layer(adjacency, z, theta_self, theta_nbr, presence=None):
    if adjacency.cols != z.rows:
        raise ShapeError(f"sage_layer: adjacency {adjacency.shape} vs z {z.shape}")
    op = sage_operator(adjacency, presence)
    mask = _mask_tensor(z.rows, presence)
    zm = mul(z, mask)
    out = relu(add(matmul(zm, theta_self), matmul(spmm(op, zm), theta_nbr)))
    return mul(out, mask)


def _apply_backbone(snap, params):
    z = Tensor(snap.features)
    if params.kind == "gcn":
        t = params.tensors
        z = gcn_layer(snap.adjacency, z, t["w1"], snap.presence)
        z = gcn_layer(snap.adjacency, z, t["w2"], snap.presence)
    else:
        t = params.tensors
        z = sage_layer(snap.adjacency, z, t["w1_self"], t["w1_nbr"], snap.presence)
        z = sage_layer(snap.adjacency, z, t["w2_self"], t["w2_nbr"], snap.presence)
    return z


@dataclass
class EmbeddingTable:
    """Per-slice embeddings plus the presence masks they inherit.

    Rows of the stacked matrix follow slice-major order: position p of
    `slice_ids`, node i maps to row p * n + i.
    """

    slice_ids: list
    z: list
    presence: np.ndarray
    n: int

    @property
    def h(self):
        return self.z[0].cols

    def stacked(self):
        """All slices stacked vertically on the tape."""
        return vstack(self.z)

    def detached(self):
        return np.vstack([zt.data for zt in self.z])

    def row_of(self, slice_id, node):
        return self.slice_ids.index(slice_id) * self.n + node


def embed_snapshots(g, params, slice_ids=None):
    """Run the two-layer backbone on each requested slice independently."""
    if slice_ids is None:
        slice_ids = list(range(g.T))
    zs = []
    pres = []
    for t in slice_ids:
        snap = g.snapshots[t]
        zs.append(_apply_backbone(snap, params))
        pres.append(snap.presence)
    return EmbeddingTable(list(slice_ids), zs, np.asarray(pres, dtype=bool), g.n)
