import numpy as np
import pytest

from hydg import dyngraph
from hydg.dyngraph import UNKNOWN_LABEL, generate_sbm, load_dataset, save_dataset, split
from hydg.errors import ParameterError, ParseError, SchemaError


def write_tiny_dataset(root, with_features=True):
    root.mkdir(exist_ok=True)
    (root / "meta").write_text("3 2 2 2\n")
    (root / "edges_0.txt").write_text("0 1\n1 2\n")
    (root / "edges_1.txt").write_text("0 2\n")
    if with_features:
        (root / "feat_0.csv").write_text("1.0,0.0\n0.5,0.5\n0.0,1.0\n")
        (root / "feat_1.csv").write_text("1.0,1.0\n0.0,0.0\n0.5,0.5\n")
    (root / "labels_0.txt").write_text("0\n1\n?\n")
    (root / "labels_1.txt").write_text("0\n?\n1\n")
    return root


def test_load_reports_header_stats(tmp_path):
    g = load_dataset(write_tiny_dataset(tmp_path / "ds"))
    assert g.stats() == {
        "nodes": 3,
        "edges": 3,
        "time_steps": 2,
        "classes": 2,
        "attributes": 2,
    }
    assert g.snapshots[0].labels[2] == UNKNOWN_LABEL
    assert g.snapshots[0].adjacency.is_symmetric()


def test_load_empty_edge_file_is_valid(tmp_path):
    root = tmp_path / "ds"
    root.mkdir()
    (root / "meta").write_text("2 1 1 1\n")
    (root / "edges_0.txt").write_text("")
    (root / "feat_0.csv").write_text("0.0\n0.0\n")
    (root / "labels_0.txt").write_text("0\n0\n")
    g = load_dataset(root)
    assert g.total_edges() == 0


def test_duplicate_edges_deduplicated(tmp_path):
    root = tmp_path / "ds"
    root.mkdir()
    (root / "meta").write_text("3 1 1 1\n")
    (root / "edges_0.txt").write_text("0 1\n1 0\n0 1\n2 1\n")
    (root / "feat_0.csv").write_text("0\n0\n0\n")
    (root / "labels_0.txt").write_text("0\n0\n0\n")
    g = load_dataset(root)
    # set-based recount of the raw file
    raw = {(min(u, v), max(u, v)) for u, v in [(0, 1), (1, 0), (0, 1), (2, 1)]}
    assert g.snapshots[0].edge_count() == len(raw)
    assert g.snapshots[0].edge_list() == sorted(raw)


def test_parse_error_carries_line_number(tmp_path):
    root = tmp_path / "ds"
    root.mkdir()
    (root / "meta").write_text("2 1 1 1\n")
    (root / "edges_0.txt").write_text("0 1\nbogus line\n")
    (root / "feat_0.csv").write_text("0\n0\n")
    (root / "labels_0.txt").write_text("0\n0\n")
    with pytest.raises(ParseError) as err:
        load_dataset(root)
    assert err.value.lineno == 2


def test_schema_error_on_row_count(tmp_path):
    root = write_tiny_dataset(tmp_path / "ds")
    (root / "labels_1.txt").write_text("0\n")
    with pytest.raises(SchemaError):
        load_dataset(root)


def test_edge_to_absent_node_rejected(tmp_path):
    root = write_tiny_dataset(tmp_path / "ds")
    (root / "presence_0.txt").write_text("1\n0\n1\n")
    with pytest.raises(SchemaError):
        load_dataset(root)


def test_degree_bucket_features_when_files_absent(tmp_path):
    g = load_dataset(write_tiny_dataset(tmp_path / "ds", with_features=False))
    # slice 0 degrees: 1, 2, 1 -> buckets capped at d-1=1
    np.testing.assert_array_equal(
        g.snapshots[0].features, [[0.0, 1.0], [0.0, 1.0], [0.0, 1.0]]
    )
    # slice 1 degrees: 1, 0, 1
    np.testing.assert_array_equal(
        g.snapshots[1].features, [[0.0, 1.0], [1.0, 0.0], [0.0, 1.0]]
    )


def test_roundtrip_identical(tmp_path):
    g = generate_sbm(12, 3, 2, 0.6, 0.1, 0.2, feature_noise=1.0, seed=5)
    save_dataset(g, tmp_path / "out")
    g2 = load_dataset(tmp_path / "out")
    assert g2.n == g.n and g2.d == g.d and g2.num_classes == g.num_classes and g2.T == g.T
    for a, b in zip(g.snapshots, g2.snapshots):
        assert a.edge_list() == b.edge_list()
        np.testing.assert_array_equal(a.features, b.features)
        np.testing.assert_array_equal(a.labels, b.labels)
        np.testing.assert_array_equal(a.presence, b.presence)


# ---------------------------------------------------------------------------
# SBM generator


def test_sbm_same_seed_bit_identical():
    g1 = generate_sbm(20, 4, 3, 0.5, 0.05, 0.3, seed=9)
    g2 = generate_sbm(20, 4, 3, 0.5, 0.05, 0.3, seed=9)
    for a, b in zip(g1.snapshots, g2.snapshots):
        assert a.edge_list() == b.edge_list()
        np.testing.assert_array_equal(a.features, b.features)
        np.testing.assert_array_equal(a.labels, b.labels)


def test_sbm_zero_drift_keeps_labels_constant():
    g = generate_sbm(15, 5, 3, 0.4, 0.1, 0.0, seed=2)
    base = g.snapshots[0].labels
    for snap in g.snapshots[1:]:
        np.testing.assert_array_equal(snap.labels, base)


def test_sbm_extreme_probabilities_force_two_cliques():
    g = generate_sbm(4, 3, 2, 1.0, 0.0, 0.0, seed=1)
    labels = g.snapshots[0].labels
    for snap in g.snapshots:
        for u, v in snap.edge_list():
            assert labels[u] == labels[v]
        # every same-block pair is connected
        for u in range(4):
            for v in range(u + 1, 4):
                if labels[u] == labels[v]:
                    assert (u, v) in snap.edge_list()


def test_sbm_intra_density_within_3_sigma():
    p_in = 0.1
    edges = 0
    pairs = 0
    for seed in range(5):
        g = generate_sbm(200, 8, 3, p_in, 0.01, 0.1, seed=seed)
        for snap in g.snapshots:
            same = snap.labels[:, None] == snap.labels[None, :]
            iu = np.triu_indices(200, k=1)
            same_mask = same[iu]
            dense = snap.adjacency.to_dense()[iu] > 0
            edges += int(dense[same_mask].sum())
            pairs += int(same_mask.sum())
    sigma = np.sqrt(p_in * (1 - p_in) / pairs)
    assert abs(edges / pairs - p_in) < 3 * sigma


def test_sbm_rejects_bad_probabilities():
    with pytest.raises(ParameterError):
        generate_sbm(10, 2, 2, 0.1, 0.5, 0.0)
    with pytest.raises(ParameterError):
        generate_sbm(10, 2, 2, 0.5, 0.1, 1.5)


# ---------------------------------------------------------------------------
# splits


def test_split_examples():
    g = generate_sbm(5, 10, 2, 0.5, 0.1, 0.0, seed=0)
    s = split(g, 7)
    assert s.train_slices == tuple(range(8))
    assert s.test_slices == (8, 9)

    g2 = generate_sbm(5, 2, 2, 0.5, 0.1, 0.0, seed=0)
    with pytest.raises(ParameterError):
        split(g2, 1)
    s2 = split(g2, 0)
    assert s2.train_slices == (0,) and s2.test_slices == (1,)

    g3 = generate_sbm(5, 11, 2, 0.5, 0.1, 0.0, seed=0)
    assert len(split(g3, 8).test_slices) == 2
