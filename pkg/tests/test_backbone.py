import numpy as np
import pytest

from hydg import numcore as nc
from hydg.backbone import (
    BackboneParams,
    embed_snapshots,
    gcn_layer,
    init_backbone,
    sage_layer,
)
from hydg.dyngraph import SnapshotGraph, DynamicGraph, generate_sbm
from hydg.numcore import SparseMatrix, Tensor


def adj_from_pairs(n, pairs):
    if not pairs:
        return SparseMatrix.zeros(n, n)
    rows = [u for u, v in pairs] + [v for u, v in pairs]
    cols = [v for u, v in pairs] + [u for u, v in pairs]
    return SparseMatrix.from_coo(n, n, rows, cols, np.ones(len(rows)))


def dense_gcn_oracle(adj_dense, z, theta, presence):
    a = adj_dense + np.diag(presence.astype(float))
    deg = a.sum(axis=1)
    dinv = np.where(deg > 0, np.where(deg > 0, deg, 1.0) ** -0.5, 0.0)
    out = np.maximum((dinv[:, None] * a * dinv[None, :]) @ (z * presence[:, None]) @ theta, 0.0)
    return out * presence[:, None]


def test_gcn_no_edges_self_loop_only():
    out = gcn_layer(SparseMatrix.zeros(1, 1), Tensor([[2.0, -1.0]]), Tensor(np.eye(2)))
    np.testing.assert_array_equal(out.data, [[2.0, 0.0]])


def test_gcn_two_node_hand_normalization():
    adj = adj_from_pairs(2, [(0, 1)])
    out = gcn_layer(adj, Tensor(np.eye(2)), Tensor(np.eye(2)))
    np.testing.assert_allclose(out.data, [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)


def test_gcn_matches_dense_oracle():
    rng = np.random.default_rng(3)
    for _ in range(10):
        n = 8
        mask = np.triu(rng.random((n, n)) < 0.3, k=1)
        pairs = list(zip(*np.nonzero(mask)))
        presence = rng.random(n) < 0.8
        pairs = [(u, v) for u, v in pairs if presence[u] and presence[v]]
        adj = adj_from_pairs(n, pairs)
        z = rng.normal(size=(n, 3))
        theta = rng.normal(size=(3, 4))
        got = gcn_layer(adj, Tensor(z), Tensor(theta), presence).data
        want = dense_gcn_oracle(adj.to_dense(), z, theta, presence)
        assert np.max(np.abs(got - want)) < 1e-12


def test_sage_isolated_node_uses_self_only():
    z = np.array([[1.5, -2.0]])
    out = sage_layer(SparseMatrix.zeros(1, 1), Tensor(z), Tensor(np.eye(2)), Tensor(np.eye(2)))
    np.testing.assert_array_equal(out.data, np.maximum(z, 0.0))


def test_sage_two_node_hand_mean():
    adj = adj_from_pairs(2, [(0, 1)])
    out = sage_layer(adj, Tensor(np.eye(2)), Tensor(np.eye(2)), Tensor(np.eye(2)))
    np.testing.assert_allclose(out.data, [[1.0, 1.0], [1.0, 1.0]], atol=1e-15)


def test_sage_matches_neighbor_mean_oracle():
    rng = np.random.default_rng(11)
    n = 7
    mask = np.triu(rng.random((n, n)) < 0.4, k=1)
    pairs = list(zip(*np.nonzero(mask)))
    adj = adj_from_pairs(n, pairs)
    z = rng.normal(size=(n, 3))
    ts, tn = rng.normal(size=(3, 2)), rng.normal(size=(3, 2))
    got = sage_layer(adj, Tensor(z), Tensor(ts), Tensor(tn)).data
    a = adj.to_dense()
    means = np.zeros_like(z)
    for i in range(n):
        nbrs = np.nonzero(a[i])[0]
        if nbrs.size:
            means[i] = z[nbrs].mean(axis=0)
    want = np.maximum(z @ ts + means @ tn, 0.0)
    assert np.max(np.abs(got - want)) < 1e-12


def test_absent_node_does_not_change_shared_rows():
    rng = np.random.default_rng(5)
    n = 6
    pairs = [(0, 1), (1, 2), (3, 4)]
    z = rng.normal(size=(n, 3))
    theta = rng.normal(size=(3, 3))
    base = gcn_layer(adj_from_pairs(n, pairs), Tensor(z), Tensor(theta)).data

    z_ext = np.vstack([z, rng.normal(size=(1, 3))])
    presence = np.array([True] * n + [False])
    ext = gcn_layer(adj_from_pairs(n + 1, pairs), Tensor(z_ext), Tensor(theta), presence).data
    np.testing.assert_allclose(ext[:n], base, atol=1e-15)
    np.testing.assert_array_equal(ext[n], np.zeros(3))


def make_toy_graph(seed=0, n=9, T=3, d=4):
    return generate_sbm(n, T, 2, 0.6, 0.1, 0.2, feature_noise=1.0, seed=seed, feature_dim=d)


def test_embed_snapshots_slice_independence():
    g = make_toy_graph()
    params = init_backbone("gcn", g.d, 5, np.random.default_rng(1))
    full = embed_snapshots(g, params)
    for order in ([2, 0, 1], [1, 2, 0]):
        perm = embed_snapshots(g, params, order)
        for pos, t in enumerate(order):
            np.testing.assert_array_equal(perm.z[pos].data, full.z[t].data)


def test_embed_snapshots_matches_per_slice_calls():
    g = make_toy_graph(seed=3)
    params = init_backbone("sage", g.d, 5, np.random.default_rng(2))
    table = embed_snapshots(g, params)
    for t, snap in enumerate(g.snapshots):
        t1 = sage_layer(
            snap.adjacency,
            Tensor(snap.features),
            params.tensors["w1_self"],
            params.tensors["w1_nbr"],
            snap.presence,
        )
        t2 = sage_layer(
            snap.adjacency, t1, params.tensors["w2_self"], params.tensors["w2_nbr"], snap.presence
        )
        np.testing.assert_array_equal(table.z[t].data, t2.data)


def test_stacked_row_mapping():
    g = make_toy_graph()
    params = init_backbone("gcn", g.d, 5, np.random.default_rng(1))
    table = embed_snapshots(g, params, [0, 2])
    stacked = table.stacked().data
    assert table.row_of(2, 4) == g.n + 4
    np.testing.assert_array_equal(stacked[table.row_of(2, 4)], table.z[1].data[4])


@pytest.mark.parametrize("kind", ["gcn", "sage"])
def test_backbone_gradients_alive_and_correct(kind):
    g = make_toy_graph(seed=7, n=6, T=2, d=3)
    params = init_backbone(kind, g.d, 4, np.random.default_rng(4))
    probe = Tensor(np.random.default_rng(9).normal(size=(g.n * g.T, 4)))
    tensors = [t for _, t in params.all_params()]

    def f():
        return nc.sum_all(nc.mul(embed_snapshots(g, params).stacked(), probe))

    assert nc.grad_check(f, tensors, eps=1e-5) < 1e-4
    loss = f()
    nc.backward(loss)
    for name, t in params.all_params():
        assert t.grad is not None and np.any(t.grad != 0.0), f"dead parameter {name}"
