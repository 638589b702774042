"""The full model: extract, combine, classify - batch and streaming.

Trains both readouts on the same synthetic clusters, continues the
sequential model with extra chunks via partial_fit, and round-trips the
batch model through a file.
"""

import tempfile
from pathlib import Path

import numpy as np

from hoselm.data import one_hot, split, synth_blobs
from hoselm.pipeline import (
    FeatureGroup,
    PipelineConfig,
    evaluate,
    fit,
    load_model,
    partial_fit,
    predict,
    save_model,
)


def main():
    classes = 3
    group, labels = synth_blobs(classes, 150, 10, 0.25, seed=4)
    (tr_g, tr_l), (te_g, te_l) = split([group], labels, 0.6, seed=9)
    tr_t = one_hot(tr_l, classes)
    te_t = one_hot(te_l, classes)
    print(f"{tr_l.size} training / {te_l.size} test samples, {classes} classes")

    base = dict(node_count=3, subspace_dim=40, coeff=100.0, classifier_nodes=8, seed=2)
    batch = fit(tr_g, tr_t, PipelineConfig(mode="batch", **base))
    report = evaluate(batch, te_g, te_t)
    print(f"batch readout: test mean per-class rate {report.mean_per_class_rate:.4f}")

    seq = fit(tr_g, tr_t, PipelineConfig(mode="sequential", chunk_size=45, **base))
    report = evaluate(seq, te_g, te_t)
    print(f"sequential readout (chunks of 45): {report.mean_per_class_rate:.4f}")

    print()
    print("streaming more data into the fitted sequential model:")
    extra_group, extra_labels = synth_blobs(classes, 60, 10, 0.25, seed=77)
    for lo in range(0, extra_labels.size, 60):
        chunk = [FeatureGroup(x=extra_group.x[:, lo : lo + 60], name=extra_group.name)]
        chunk_targets = one_hot(extra_labels[lo : lo + 60], classes)
        seq = partial_fit(seq, chunk, chunk_targets)
    report = evaluate(seq, te_g, te_t)
    print(
        f"  after {seq.readout.seen} total samples: "
        f"test rate {report.mean_per_class_rate:.4f}"
    )

    print()
    print("models survive a file round trip:")
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "model.npz"
        save_model(batch, path)
        loaded = load_model(path)
        same = np.array_equal(predict(loaded, te_g), predict(batch, te_g))
        print(f"  wrote {path.stat().st_size} bytes; predictions identical: {same}")


if __name__ == "__main__":
    main()
