"""Pipeline tests: both training modes, streaming updates, metrics, I/O."""

import numpy as np
import pytest

from hoselm.classifier import fit_node
from hoselm.combine import combine
from hoselm.errors import ModeError, ShapeError
from hoselm.extractor import project
from hoselm.pipeline import (
    FeatureGroup,
    PipelineConfig,
    classification_metrics,
    evaluate,
    fit,
    load_model,
    partial_fit,
    predict,
    save_model,
    scores,
)


def toy_blobs(classes=3, per_class=20, dim=6, spread=0.15, seed=0):
    # Well-separated clusters around unit basis vectors, shuffled.
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(classes), per_class)
    rng.shuffle(labels)
    means = np.eye(dim)[:, :classes]
    x = means[:, labels] + spread * rng.standard_normal((dim, labels.size))
    targets = np.zeros((classes, labels.size))
    targets[labels, np.arange(labels.size)] = 1.0
    return [FeatureGroup(x=x, name="toy")], targets, labels


def small_cfg(**overrides):
    base = dict(
        node_count=2,
        subspace_dim=12,
        coeff=100.0,
        classifier_nodes=6,
        seed=5,
    )
    base.update(overrides)
    return PipelineConfig(**base)


def test_batch_shape_accounting():
    rng = np.random.default_rng(1)
    groups = [FeatureGroup(x=rng.standard_normal((3, 4)))]
    targets = np.vstack([np.eye(2), np.eye(2)]).T
    cfg = PipelineConfig(node_count=1, subspace_dim=2, classifier_nodes=2, seed=0)
    model = fit(groups, targets, cfg)
    assert len(model.extractors) == 1
    assert model.extractors[0][0].weights.shape == (2, 3)
    assert scores(model, groups).shape == (2, 4)


def test_batch_training_scores_reconstruct_targets():
    groups, targets, _ = toy_blobs()
    cfg = small_cfg()
    model = fit(groups, targets, cfg)
    feats = [
        project(node, g.x)
        for nodes, g in zip(model.extractors, groups)
        for node in nodes
    ]
    combined = combine(feats, model.combine_spec)
    e = targets
    for _ in range(len(model.readout.nodes)):
        _, e = fit_node(combined, e, cfg.coeff, cfg.norm_eps)
    assert np.allclose(scores(model, groups) + e, targets, atol=1e-9)


def test_batch_separable_toy_reaches_full_accuracy():
    groups, targets, labels = toy_blobs(per_class=30)
    model = fit(groups, targets, small_cfg())
    assert np.array_equal(predict(model, groups), labels)
    report = evaluate(model, groups, targets)
    assert report.mean_per_class_rate == 1.0
    assert report.accuracy == 1.0


def test_multi_group_fit_and_predict():
    rng = np.random.default_rng(8)
    groups, targets, labels = toy_blobs(per_class=25, seed=3)
    extra = FeatureGroup(x=groups[0].x[:3] + 0.01 * rng.standard_normal((3, 75)), name="b")
    both = [groups[0], extra]
    model = fit(both, targets, small_cfg(operator="concat"))
    assert len(model.extractors) == 2
    assert np.mean(predict(model, both) == labels) > 0.9


def test_lone_group_equivalent_to_singleton_list():
    groups, targets, _ = toy_blobs()
    lone = fit(groups[0], targets, small_cfg())
    listed = fit(groups, targets, small_cfg())
    assert np.array_equal(predict(lone, groups[0]), predict(listed, groups))
    assert np.array_equal(scores(lone, groups[0]), scores(listed, groups))


def test_fit_is_deterministic():
    groups, targets, _ = toy_blobs()
    m1 = fit(groups, targets, small_cfg())
    m2 = fit(groups, targets, small_cfg())
    for n1, n2 in zip(m1.extractors[0], m2.extractors[0]):
        assert np.array_equal(n1.weights, n2.weights)
    for a, b in zip(m1.readout.nodes, m2.readout.nodes):
        assert np.array_equal(a.weights, b.weights) and a.step == b.step


def test_sequential_single_chunk_equals_boot_only():
    groups, targets, _ = toy_blobs()
    samples = targets.shape[1]
    m_none = fit(groups, targets, small_cfg(mode="sequential", chunk_size=None))
    m_full = fit(groups, targets, small_cfg(mode="sequential", chunk_size=samples))
    assert np.array_equal(m_none.readout.beta, m_full.readout.beta)
    assert m_none.readout.seen == m_full.readout.seen == samples


def test_sequential_matches_training_labels():
    groups, targets, labels = toy_blobs(per_class=40, seed=9)
    model = fit(groups, targets, small_cfg(mode="sequential", chunk_size=30))
    assert np.mean(predict(model, groups) == labels) > 0.95


def test_sequential_boot_needs_every_class():
    groups, targets, labels = toy_blobs(per_class=10, seed=2)
    order = np.argsort(labels, kind="stable")
    sorted_groups = [FeatureGroup(x=groups[0].x[:, order])]
    sorted_targets = targets[:, order]
    with pytest.raises(ValueError, match="class"):
        fit(sorted_groups, sorted_targets, small_cfg(mode="sequential", chunk_size=5))


def test_partial_fit_matches_concatenated_chunk():
    groups, targets, _ = toy_blobs(per_class=30, seed=4)
    x = groups[0].x
    boot = [FeatureGroup(x=x[:, :45])]
    model = fit(boot, targets[:, :45], small_cfg(mode="sequential"))
    one = partial_fit(model, [FeatureGroup(x=x[:, 45:90])], targets[:, 45:90])
    two = partial_fit(
        partial_fit(model, [FeatureGroup(x=x[:, 45:70])], targets[:, 45:70]),
        [FeatureGroup(x=x[:, 70:90])],
        targets[:, 70:90],
    )
    rel = np.linalg.norm(one.readout.beta - two.readout.beta) / np.linalg.norm(
        one.readout.beta
    )
    assert rel < 1e-6
    assert one.readout.seen == two.readout.seen == 90


def test_partial_fit_zero_innovation_keeps_beta():
    groups, targets, _ = toy_blobs(seed=6)
    model = fit(groups, targets, small_cfg(mode="sequential"))
    chunk = [FeatureGroup(x=groups[0].x[:, :10])]
    fitted_targets = scores(model, chunk)
    updated = partial_fit(model, chunk, fitted_targets)
    assert np.allclose(updated.readout.beta, model.readout.beta, atol=1e-8)


def test_partial_fit_freezes_extractors_and_dims():
    groups, targets, _ = toy_blobs(seed=7)
    model = fit(groups, targets, small_cfg(mode="sequential"))
    before = [n.weights.copy() for n in model.extractors[0]]
    updated = partial_fit(model, groups, targets)
    assert updated.extractors is model.extractors
    for w, n in zip(before, updated.extractors[0]):
        assert np.array_equal(w, n.weights)
    assert updated.readout.beta.shape == model.readout.beta.shape


def test_partial_fit_rejects_batch_model():
    groups, targets, _ = toy_blobs()
    model = fit(groups, targets, small_cfg())
    with pytest.raises(ModeError):
        partial_fit(model, groups, targets)


def test_predict_single_sample_matches_batch_column():
    groups, targets, _ = toy_blobs(seed=12)
    model = fit(groups, targets, small_cfg())
    full = predict(model, groups)
    for j in (0, 7, 59):
        single = [FeatureGroup(x=groups[0].x[:, j : j + 1])]
        assert predict(model, single)[0] == full[j]


def test_layout_mismatch_rejected():
    groups, targets, _ = toy_blobs()
    model = fit(groups, targets, small_cfg())
    with pytest.raises(ShapeError):
        predict(model, [FeatureGroup(x=np.ones((4, 3)))])
    with pytest.raises(ShapeError):
        predict(model, groups + groups)
    with pytest.raises(ShapeError):
        fit(groups, targets[:, :-1], small_cfg())


def test_metrics_hand_example():
    true_labels = [0, 0, 1, 1]
    predicted = [0, 0, 1, 0]
    confusion, recalls, mean_rate, accuracy, absent = classification_metrics(
        true_labels, predicted, 2
    )
    assert np.array_equal(confusion, [[2, 0], [1, 1]])
    assert recalls == (1.0, 0.5)
    assert mean_rate == 0.75
    assert accuracy == 0.75
    assert absent == ()


def test_metrics_absent_class_excluded_and_flagged():
    confusion, recalls, mean_rate, _, absent = classification_metrics(
        [0, 0, 2, 2], [0, 0, 2, 2], 3
    )
    assert recalls[1] is None
    assert mean_rate == 1.0
    assert absent == (1,)
    assert confusion[1].sum() == 0


def test_metrics_match_counting_oracle():
    rng = np.random.default_rng(44)
    classes = 5
    true_labels = rng.integers(0, classes, size=300)
    predicted = rng.integers(0, classes, size=300)
    confusion, recalls, mean_rate, accuracy, _ = classification_metrics(
        true_labels, predicted, classes
    )
    for i in range(classes):
        for j in range(classes):
            want = int(np.sum((true_labels == i) & (predicted == j)))
            assert confusion[i, j] == want
    per_class = [
        np.mean(predicted[true_labels == k] == k)
        for k in range(classes)
        if np.any(true_labels == k)
    ]
    assert mean_rate == pytest.approx(np.mean(per_class), abs=1e-12)
    assert accuracy == pytest.approx(np.mean(true_labels == predicted), abs=1e-12)


def test_evaluate_reports_timing_fields():
    groups, targets, _ = toy_blobs()
    model = fit(groups, targets, small_cfg())
    report = evaluate(model, groups, targets)
    assert report.infer_seconds >= 0
    assert report.train_seconds == 0.0
    assert report.confusion.sum() == targets.shape[1]


@pytest.mark.parametrize("mode", ["batch", "sequential"])
def test_model_round_trips_through_file(tmp_path, mode):
    groups, targets, _ = toy_blobs(seed=15)
    model = fit(groups, targets, small_cfg(mode=mode, chunk_size=20))
    path = tmp_path / "model.npz"
    save_model(model, path)
    loaded = load_model(path)
    assert loaded.config == model.config
    assert loaded.group_names == model.group_names
    assert np.array_equal(predict(loaded, groups), predict(model, groups))
    assert np.allclose(scores(loaded, groups), scores(model, groups), atol=0)
    if mode == "sequential":
        cont_a = partial_fit(model, groups, targets)
        cont_b = partial_fit(loaded, groups, targets)
        assert np.array_equal(cont_a.readout.beta, cont_b.readout.beta)


def test_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(node_count=0)
    with pytest.raises(ValueError):
        PipelineConfig(coeff=0.0)
    with pytest.raises(ValueError):
        PipelineConfig(mode="stream")
    with pytest.raises(ValueError):
        PipelineConfig(chunk_size=0)
    with pytest.raises(ValueError):
        PipelineConfig(norm_eps=0.0)
