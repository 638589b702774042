"""Online-sequential readout: learn from a stream, match the batch solution.

Feeds one dataset through the recursive least-squares readout twice with
completely different chunk sizes, then checks both runs against the batch
ridge solution computed with all data at once.  The chunks are discarded
as they are learned; only the fixed-size state is kept.
"""

import numpy as np

from hoselm.oselm import os_boot, os_predict, os_update


def stream_fit(h, targets, chunk_sizes, coeff):
    pos = chunk_sizes[0]
    state = os_boot(h[:, :pos], targets[:, :pos], coeff)
    for size in chunk_sizes[1:]:
        state = os_update(state, h[:, pos : pos + size], targets[:, pos : pos + size])
        pos += size
    return state


def main():
    rng = np.random.default_rng(7)
    hidden, samples = 12, 90
    h = rng.standard_normal((hidden, samples))
    targets = rng.standard_normal((3, samples))
    coeff = 100.0

    batch = np.linalg.solve(np.eye(hidden) / coeff + h @ h.T, h @ targets.T)

    plans = {
        "three equal chunks": [30, 30, 30],
        "boot then one-by-one": [10] + [1] * 80,
        "wildly uneven": [25, 1, 50, 14],
    }
    print(f"stream of {samples} samples, {hidden} features, ridge coeff {coeff}")
    for name, sizes in plans.items():
        state = stream_fit(h, targets, sizes, coeff)
        gap = np.linalg.norm(state.beta - batch) / np.linalg.norm(batch)
        print(f"  {name:22s} ({len(sizes):3d} chunks): |beta - batch|/|batch| = {gap:.2e}")

    print()
    print("predictions from the streamed state match the batch readout:")
    state = stream_fit(h, targets, [30, 30, 30], coeff)
    x_new = rng.standard_normal((hidden, 5))
    gap = np.abs(os_predict(state, x_new) - batch.T @ x_new).max()
    print(f"  max prediction gap on new samples: {gap:.2e}")


if __name__ == "__main__":
    main()
