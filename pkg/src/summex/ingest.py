"""CSV loading and equi-depth binning.

The binned item matrix produced here is the substrate for mining and for
every catalog operation: row ``r`` of ``BinnedDataset.items`` is the bin
vector of item ``r``.
"""

import csv
import struct
import warnings
from dataclasses import dataclass

import numpy as np

BINNED_MAGIC = b"E4SBIN"
BINNED_VERSION = 1


class IngestError(ValueError):
    pass


@dataclass
class RawDataset:
    columns: list  # list of (name, np.float64 array)
    row_count: int

    def __post_init__(self):
        names = [name for name, _ in self.columns]
        if len(set(names)) != len(names) or any(not n for n in names):
            raise IngestError("column names must be unique and nonempty")
        for name, values in self.columns:
            if len(values) != self.row_count:
                raise IngestError(f"column {name!r} length != row_count")


@dataclass
class AttributeSpec:
    name: str
    boundaries: np.ndarray  # sorted cut values, length bin_count - 1 (or fewer when degenerate)
    source_index: int

    def bin_of(self, value: float) -> int:
        # A value equal to a boundary falls in the lower bin, so the bin
        # index is the count of boundaries strictly below the value.
        return int(np.searchsorted(self.boundaries, value, side="left"))

    def bin_label(self, b: int) -> str:
        cuts = self.boundaries
        if len(cuts) == 0:
            return "all"
        if b <= 0:
            return f"<= {cuts[0]:g}"
        if b >= len(cuts):
            return f"> {cuts[-1]:g}"
        return f"({cuts[b - 1]:g}, {cuts[b]:g}]"


@dataclass
class BinnedDataset:
    attributes: list[AttributeSpec]
    items: np.ndarray  # (n_rows, n_attrs) uint16 bin indices
    bin_count: int

    @property
    def n_rows(self) -> int:
        return self.items.shape[0]

    @property
    def n_attrs(self) -> int:
        return self.items.shape[1]

    @property
    def attribute_names(self) -> list[str]:
        return [a.name for a in self.attributes]

    def attribute_index(self, name: str) -> int:
        for i, a in enumerate(self.attributes):
            if a.name == name:
                return i
        raise KeyError(name)


def load_table(path, schema=None) -> RawDataset:
    """Parse a headered CSV into numeric columns.

    ``schema`` restricts to a subset of header names; anything outside it is
    dropped. Non-numeric cells are hard errors reported by row and column.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise IngestError(f"input file not found: {path}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"empty file: {path}") from None
        header = [h.strip() for h in header]
        if schema is not None:
            missing = [c for c in schema if c not in header]
            if missing:
                raise IngestError(f"columns not in header: {missing}")
            keep = [i for i, h in enumerate(header) if h in set(schema)]
        else:
            keep = list(range(len(header)))
        if not keep:
            raise IngestError("no columns selected")

        cols: list[list[float]] = [[] for _ in keep]
        for row_no, row in enumerate(reader, start=1):
            for out_i, col_i in enumerate(keep):
                cell = row[col_i].strip() if col_i < len(row) else ""
                try:
                    cols[out_i].append(float(cell))
                except ValueError:
                    raise IngestError(
                        f"non-numeric cell at row {row_no}, column {header[col_i]!r}: {cell!r}"
                    ) from None

    columns = [(header[col_i], np.asarray(cols[out_i], dtype=np.float64)) for out_i, col_i in enumerate(keep)]
    return RawDataset(columns=columns, row_count=len(cols[0]) if cols else 0)


def _column_boundaries(values: np.ndarray, bin_count: int, name: str) -> np.ndarray:
    n = len(values)
    sorted_vals = np.sort(values)
    distinct = np.unique(sorted_vals)
    if bin_count > len(distinct):
        warnings.warn(
            f"column {name!r}: bin_count {bin_count} exceeds {len(distinct)} distinct values; "
            "falling back to one bin per distinct value",
            stacklevel=3,
        )
        return distinct[:-1].astype(np.float64)
    # Boundary j is the sorted value at index ceil(n*j/b) - 1: the inclusive
    # upper edge of bin j-1.
    idx = [-(-n * j // bin_count) - 1 for j in range(1, bin_count)]
    return sorted_vals[idx].astype(np.float64)


def equi_depth_bin(data: RawDataset, bin_count: int = 10) -> BinnedDataset:
    """Bin every column at its empirical quantiles into near-equal-count bins.

    Ties share a bin, so populations can be uneven under duplicate values.
    """
    if bin_count < 1:
        raise IngestError("bin_count must be >= 1")
    if data.row_count == 0 or not data.columns:
        raise IngestError("cannot bin an empty dataset")
    specs = []
    items = np.empty((data.row_count, len(data.columns)), dtype=np.uint16)
    for j, (name, values) in enumerate(data.columns):
        cuts = _column_boundaries(values, bin_count, name)
        specs.append(AttributeSpec(name=name, boundaries=cuts, source_index=j))
        items[:, j] = np.searchsorted(cuts, values, side="left").astype(np.uint16)
    return BinnedDataset(attributes=specs, items=items, bin_count=bin_count)


def save_binned(data: BinnedDataset, path) -> None:
    with open(path, "wb") as fh:
        fh.write(BINNED_MAGIC)
        fh.write(struct.pack("<HIIH", BINNED_VERSION, data.n_rows, data.n_attrs, data.bin_count))
        for spec in data.attributes:
            raw = spec.name.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(struct.pack("<IH", spec.source_index, len(spec.boundaries)))
            fh.write(np.asarray(spec.boundaries, dtype="<f8").tobytes())
        fh.write(data.items.astype("<u2").tobytes())


def load_binned(path) -> BinnedDataset:
    with open(path, "rb") as fh:
        magic = fh.read(len(BINNED_MAGIC))
        if magic != BINNED_MAGIC:
            raise IngestError(f"not a binned dataset file: {path}")
        version, n_rows, n_attrs, bin_count = struct.unpack("<HIIH", fh.read(12))
        if version != BINNED_VERSION:
            raise IngestError(f"unsupported binned format version {version}")
        specs = []
        for _ in range(n_attrs):
            (name_len,) = struct.unpack("<H", fh.read(2))
            name = fh.read(name_len).decode("utf-8")
            source_index, n_cuts = struct.unpack("<IH", fh.read(6))
            cuts = np.frombuffer(fh.read(8 * n_cuts), dtype="<f8").copy()
            specs.append(AttributeSpec(name=name, boundaries=cuts, source_index=source_index))
        items = np.frombuffer(fh.read(2 * n_rows * n_attrs), dtype="<u2").copy()
        items = items.reshape(n_rows, n_attrs).astype(np.uint16)
    return BinnedDataset(attributes=specs, items=items, bin_count=bin_count)
