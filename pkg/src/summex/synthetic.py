"""Seeded synthetic datasets with planted clusters.

Each cluster is tight on a rotating pair of attributes and wide on the rest,
with uniform within-range noise. Tight attributes land the cluster in one or
two equi-depth bins, so descriptions over them mine into compact itemsets
that align with the planted row groups (the benchmark ground truth); the
wide attributes keep full bin-vector cells below typical support thresholds,
which keeps uniformities finite and utilities on a sane scale.
"""

import numpy as np

from .ingest import RawDataset


def make_synthetic(
    n_items: int = 600,
    n_attrs: int = 4,
    n_clusters: int = 10,
    cluster_fraction: float = 0.7,
    n_tight: int = 2,
    tight_spread: float = 1.0,
    wide_spread: float = 18.0,
    seed: int = 0,
):
    """Returns (RawDataset, ground_truth) where ground_truth is a list of
    (label, sorted row-id list) for the planted clusters."""
    rng = np.random.default_rng(seed)
    n_tight = min(n_tight, n_attrs)
    n_clustered = int(n_items * cluster_fraction)
    sizes = np.full(n_clusters, n_clustered // n_clusters)
    sizes[: n_clustered % n_clusters] += 1

    values = np.empty((n_items, n_attrs))
    row = 0
    groups = []
    for c in range(n_clusters):
        size = int(sizes[c])
        centers = rng.uniform(10.0, 90.0, size=n_attrs)
        tight = [(c + j) % n_attrs for j in range(n_tight)]
        spreads = np.array([tight_spread if j in tight else wide_spread for j in range(n_attrs)])
        block = centers[None, :] + rng.uniform(-1.0, 1.0, size=(size, n_attrs)) * spreads[None, :]
        values[row : row + size] = block
        groups.append((f"cluster{c}", list(range(row, row + size))))
        row += size
    values[row:] = rng.uniform(0.0, 100.0, size=(n_items - row, n_attrs))

    perm = rng.permutation(n_items)
    values = values[perm]
    inverse = np.argsort(perm)
    groups = [(label, sorted(int(inverse[i]) for i in ids)) for label, ids in groups]

    columns = [(f"a{j}", values[:, j].copy()) for j in range(n_attrs)]
    return RawDataset(columns=columns, row_count=n_items), groups


def write_csv(data: RawDataset, path) -> None:
    names = [name for name, _ in data.columns]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(names) + "\n")
        for r in range(data.row_count):
            fh.write(",".join(repr(float(vals[r])) for _, vals in data.columns) + "\n")


def write_ground_truth(groups, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for label, ids in groups:
            fh.write(f"{label}\t{','.join(str(i) for i in ids)}\n")
