import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from summex.catalog import mine_closed_itemsets
from summex.ingest import AttributeSpec, BinnedDataset, equi_depth_bin
from summex.metrics import calibrate_scales
from summex.synthetic import make_synthetic


def binned(items, bin_count, names=None):
    items = np.asarray(items, dtype=np.uint16)
    names = names or [chr(ord("a") + j) for j in range(items.shape[1])]
    specs = [
        AttributeSpec(name=names[j], boundaries=np.arange(1, bin_count, dtype=float), source_index=j)
        for j in range(items.shape[1])
    ]
    return BinnedDataset(attributes=specs, items=items, bin_count=bin_count)


@pytest.fixture(scope="session")
def three_item_data():
    # items 0:(a=1,b=1), 1:(a=1,b=1), 2:(a=1,b=2)
    return binned([[1, 1], [1, 1], [1, 2]], bin_count=3)


@pytest.fixture(scope="session")
def three_item_catalog(three_item_data):
    return mine_closed_itemsets(three_item_data, 2)


@pytest.fixture(scope="session")
def synth():
    raw, groups = make_synthetic(seed=0)
    data = equi_depth_bin(raw, 10)
    catalog = mine_closed_itemsets(data, 10)
    return raw, data, catalog, groups


@pytest.fixture(scope="session")
def synth_scales(synth):
    _, data, catalog, _ = synth
    return calibrate_scales(catalog, data, sample_size=120, seed=11, k=10)


def random_binned(rng, max_items=200, max_attrs=4, max_bins=3):
    n = int(rng.integers(3, max_items + 1))
    m = int(rng.integers(1, max_attrs + 1))
    bc = int(rng.integers(2, max_bins + 1))
    return binned(rng.integers(0, bc, size=(n, m)), bc)
