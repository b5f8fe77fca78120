import numpy as np
import pytest

from oracles import equal_depth_chunks
from summex.ingest import (
    IngestError,
    RawDataset,
    equi_depth_bin,
    load_binned,
    load_table,
    save_binned,
)


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadTable:
    def test_direct_parse(self, tmp_path):
        data = load_table(write(tmp_path, "a,b\n1,2\n3,4\n"))
        assert [name for name, _ in data.columns] == ["a", "b"]
        assert data.row_count == 2
        np.testing.assert_allclose(data.columns[0][1], [1.0, 3.0])

    def test_schema_projection(self, tmp_path):
        data = load_table(write(tmp_path, "id,a,b\n7,1,2\n8,3,4\n"), schema=["a", "b"])
        assert [name for name, _ in data.columns] == ["a", "b"]

    def test_non_numeric_cell_names_row_and_column(self, tmp_path):
        with pytest.raises(IngestError, match="row 1.*'a'"):
            load_table(write(tmp_path, "a\nx\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(IngestError, match="not found"):
            load_table(tmp_path / "nope.csv")

    def test_empty_selection(self, tmp_path):
        with pytest.raises(IngestError, match="not in header"):
            load_table(write(tmp_path, "a\n1\n"), schema=["z"])

    def test_row_order_preserved(self, tmp_path):
        data = load_table(write(tmp_path, "a\n5\n1\n9\n"))
        np.testing.assert_allclose(data.columns[0][1], [5.0, 1.0, 9.0])


class TestEquiDepthBin:
    def test_quantile_example(self):
        # Sorted pairs per bin: {1,2},{3,4},{5,6},{7,8},{9,10}; frozen from
        # the chunking oracle.
        values = [5.0, 1.0, 9.0, 3.0, 7.0, 2.0, 8.0, 4.0, 10.0, 6.0]
        expected = equal_depth_chunks(values, 5)
        data = equi_depth_bin(RawDataset(columns=[("a", np.array(values))], row_count=10), 5)
        for i, v in enumerate(values):
            assert data.items[i, 0] == expected[i]
        assert data.items[0, 0] == 2  # value 5 -> bin 2

    def test_constant_column_single_bin(self):
        with pytest.warns(UserWarning, match="distinct"):
            data = equi_depth_bin(
                RawDataset(columns=[("a", np.array([7.0, 7.0, 7.0]))], row_count=3), 4
            )
        assert set(data.items[:, 0]) == {0}

    def test_degenerate_warns(self):
        raw = RawDataset(columns=[("a", np.array([1.0, 5.0, 1.0, 5.0]))], row_count=4)
        with pytest.warns(UserWarning, match="distinct"):
            data = equi_depth_bin(raw, 3)
        assert sorted(set(int(b) for b in data.items[:, 0])) == [0, 1]

    def test_permutation_invariance(self):
        rng = np.random.default_rng(5)
        values = rng.normal(size=60)
        raw = RawDataset(columns=[("a", values)], row_count=60)
        ref = equi_depth_bin(raw, 7)
        perm = rng.permutation(60)
        shuffled = equi_depth_bin(
            RawDataset(columns=[("a", values[perm])], row_count=60), 7
        )
        np.testing.assert_array_equal(ref.items[perm, 0], shuffled.items[:, 0])
        np.testing.assert_allclose(ref.attributes[0].boundaries, shuffled.attributes[0].boundaries)

    def test_near_equal_populations(self):
        rng = np.random.default_rng(9)
        values = rng.permutation(70).astype(float)  # distinct values
        data = equi_depth_bin(RawDataset(columns=[("a", values)], row_count=70), 7)
        counts = np.bincount(data.items[:, 0], minlength=7)
        assert counts.max() - counts.min() <= 1

    def test_boundary_tie_goes_to_lower_bin(self):
        spec_values = np.array([1.0, 2.0, 3.0, 4.0])
        data = equi_depth_bin(RawDataset(columns=[("a", spec_values)], row_count=4), 2)
        cuts = data.attributes[0].boundaries
        assert len(cuts) == 1 and cuts[0] == 2.0
        assert data.attributes[0].bin_of(2.0) == 0
        assert data.attributes[0].bin_of(2.0001) == 1

    def test_bin_index_counts_strictly_smaller_boundaries(self):
        rng = np.random.default_rng(3)
        values = rng.integers(0, 20, size=100).astype(float)
        data = equi_depth_bin(RawDataset(columns=[("a", values)], row_count=100), 6)
        cuts = data.attributes[0].boundaries
        for i, v in enumerate(values):
            assert data.items[i, 0] == int((cuts < v).sum())

    def test_matches_chunk_oracle_on_random_distinct(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            n = int(rng.integers(5, 60))
            b = int(rng.integers(1, 8))
            values = list(rng.permutation(n * 3)[:n].astype(float))
            if b > len(set(values)):
                continue
            expected = equal_depth_chunks(values, b)
            data = equi_depth_bin(RawDataset(columns=[("a", np.array(values))], row_count=n), b)
            for i in range(n):
                assert data.items[i, 0] == expected[i], (values, b, i)


class TestBinnedRoundTrip:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        raw = RawDataset(
            columns=[("x", rng.normal(size=40)), ("longer name", rng.normal(size=40))],
            row_count=40,
        )
        data = equi_depth_bin(raw, 5)
        path = tmp_path / "data.bin"
        save_binned(data, path)
        loaded = load_binned(path)
        np.testing.assert_array_equal(loaded.items, data.items)
        assert loaded.bin_count == data.bin_count
        assert loaded.attribute_names == data.attribute_names
        for a, b in zip(loaded.attributes, data.attributes):
            np.testing.assert_allclose(a.boundaries, b.boundaries)
            assert a.source_index == b.source_index

    def test_magic_check(self, tmp_path):
        path = tmp_path / "bogus.bin"
        path.write_bytes(b"NOTBIN" + b"\x00" * 20)
        with pytest.raises(IngestError, match="not a binned"):
            load_binned(path)
