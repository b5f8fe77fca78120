"""Closed-itemset catalog: mining, lookup and lattice indices.

An entry is one (attribute, bin) pair, laid out as ``attr * bin_count + bin``.
Every data row contains exactly one entry per attribute, so a description can
constrain each attribute at most once. Mining enumerates the closed patterns
by prefix-preserving closure extension over entry bitmaps; the per-node
counting work runs in the selected kernel backend.
"""

import struct
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .bitops import bitmap_from_ids, full_bitmap, ids_from_bitmap, n_words
from .ingest import BinnedDataset

CATALOG_MAGIC = b"E4SCAT"
CATALOG_VERSION = 1

Description = tuple  # canonical: ((attr_index, bin_value), ...) sorted by attr


class CatalogError(ValueError):
    pass


class CatalogCapExceeded(RuntimeError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"closed itemset count reached {count}, exceeding the cap of {cap}")
        self.count = count
        self.cap = cap


def canonical_desc(constraints) -> Description:
    """Normalize a {attr: bin} mapping or pair iterable to the canonical tuple."""
    if isinstance(constraints, dict):
        pairs = constraints.items()
    else:
        pairs = constraints
    out = tuple(sorted((int(a), int(v)) for a, v in pairs))
    attrs = [a for a, _ in out]
    if len(set(attrs)) != len(attrs):
        raise CatalogError(f"description constrains an attribute twice: {out}")
    return out


@dataclass(frozen=True)
class Itemset:
    """View over one catalog row; members decode lazily from the bitmap."""

    id: int
    desc: Description
    size: int
    vector: np.ndarray
    sd_sum: float
    member_words: np.ndarray

    @property
    def member_ids(self) -> np.ndarray:
        return ids_from_bitmap(self.member_words)

    def desc_dict(self) -> dict:
        return dict(self.desc)


class PatternCatalog:
    def __init__(
        self,
        attribute_names: list[str],
        bin_count: int,
        min_support: int,
        n_rows: int,
        descs: list[Description],
        members_matrix: np.ndarray,
        sizes: np.ndarray,
        vector_matrix: np.ndarray,
        sd_sums: np.ndarray,
    ):
        self.attribute_names = list(attribute_names)
        self.bin_count = int(bin_count)
        self.min_support = int(min_support)
        self.n_rows = int(n_rows)
        self.descs = descs
        self.members_matrix = np.ascontiguousarray(members_matrix, dtype=np.uint64)
        self.sizes = np.ascontiguousarray(sizes, dtype=np.int64)
        self.vector_matrix = np.ascontiguousarray(vector_matrix, dtype=np.float64)
        self.sd_sums = np.ascontiguousarray(sd_sums, dtype=np.float64)
        self.by_description = {d: i for i, d in enumerate(descs)}
        if len(self.by_description) != len(descs):
            raise CatalogError("duplicate descriptions: catalog is not closure-unique")
        # Scan order for superset queries: size ascending, id ascending.
        self.size_order = np.lexsort((np.arange(len(descs)), self.sizes)).astype(np.int64)
        root = np.flatnonzero(self.sizes == self.n_rows)
        self.root_id = int(root[0]) if root.size else None
        self._occ = None
        self._parents: dict[int, list[int]] = {}
        self._children: dict[int, list[int]] = {}

    def __len__(self) -> int:
        return len(self.descs)

    @property
    def n_attrs(self) -> int:
        return len(self.attribute_names)

    @property
    def occ(self) -> np.ndarray:
        if self._occ is None:
            raise CatalogError("catalog has no attached dataset; call attach_data() first")
        return self._occ

    def attach_data(self, data: BinnedDataset) -> "PatternCatalog":
        if data.n_rows != self.n_rows or data.n_attrs != self.n_attrs:
            raise CatalogError("dataset shape does not match catalog")
        self._occ = build_occurrence_bitmaps(data)
        return self

    def itemset(self, iid: int) -> Itemset:
        if not 0 <= iid < len(self.descs):
            raise CatalogError(f"unknown itemset id {iid}")
        return Itemset(
            id=iid,
            desc=self.descs[iid],
            size=int(self.sizes[iid]),
            vector=self.vector_matrix[iid],
            sd_sum=float(self.sd_sums[iid]),
            member_words=self.members_matrix[iid],
        )

    def entry_index(self, attr: int, bin_value: int) -> int:
        if not 0 <= attr < self.n_attrs:
            raise CatalogError(f"invalid attribute index {attr}")
        if not 0 <= bin_value < self.bin_count:
            raise CatalogError(f"invalid bin value {bin_value}")
        return attr * self.bin_count + bin_value

    # -- lattice adjacency (lazy, cached) -------------------------------

    def parents_of(self, iid: int) -> list[int]:
        """Immediate closed generalizations: minimal strict supersets."""
        if iid not in self._parents:
            sups = self.strict_supersets(iid, limit=len(self))
            kept: list[int] = []
            for sid in sups:  # size-ascending: earlier kept sets are smaller
                row = self.members_matrix[sid]
                if not any(K.is_subset(self.members_matrix[k], row) for k in kept):
                    kept.append(int(sid))
            self._parents[iid] = kept
        return self._parents[iid]

    def children_of(self, iid: int) -> list[int]:
        """Immediate closed specializations: maximal strict subsets."""
        if iid not in self._children:
            query = self.members_matrix[iid]
            inside = np.all((self.members_matrix & query) == self.members_matrix, axis=1)
            inside &= self.sizes < self.sizes[iid]
            cands = np.flatnonzero(inside)
            cands = cands[np.lexsort((cands, -self.sizes[cands]))]  # size descending
            kept: list[int] = []
            for sid in cands:
                row = self.members_matrix[sid]
                if not any(K.is_subset(row, self.members_matrix[k]) for k in kept):
                    kept.append(int(sid))
            self._children[iid] = kept
        return self._children[iid]

    def strict_supersets(self, iid: int, limit: int) -> np.ndarray:
        return K.superset_scan(
            self.members_matrix,
            self.sizes,
            self.size_order,
            self.members_matrix[iid],
            int(self.sizes[iid]),
            int(limit),
        )


def build_occurrence_bitmaps(data: BinnedDataset) -> np.ndarray:
    W = n_words(data.n_rows)
    occ = np.zeros((data.n_attrs * data.bin_count, W), dtype=np.uint64)
    for a in range(data.n_attrs):
        col = data.items[:, a]
        for v in np.unique(col):
            occ[a * data.bin_count + int(v)] = bitmap_from_ids(np.flatnonzero(col == v), data.n_rows)
    return occ


def _vector_stats(counts: np.ndarray, size: int, n_attrs: int, bin_count: int):
    """Aggregate vector and summed per-attribute std dev from entry counts."""
    per_attr = counts.reshape(n_attrs, bin_count).astype(np.float64)
    vals = np.arange(bin_count, dtype=np.float64)
    mean = per_attr @ vals / size
    ex2 = per_attr @ (vals * vals) / size
    var = np.maximum(ex2 - mean * mean, 0.0)
    return mean, float(np.sqrt(var).sum())


def mine_closed_itemsets(
    data: BinnedDataset,
    min_support: int,
    max_itemsets: int | None = None,
) -> PatternCatalog:
    """Enumerate every closed itemset with support >= min_support.

    Depth-first prefix-preserving closure extension: a child branch survives
    only if its closure adds no entry ordered before the extension entry, so
    each closed pattern is produced exactly once.
    """
    if min_support < 1:
        raise CatalogError("min_support must be >= 1")
    n_rows, n_attrs = data.items.shape
    bc = data.bin_count
    occ = build_occurrence_bitmaps(data)
    n_entries = n_attrs * bc

    descs: list[Description] = []
    members: list[np.ndarray] = []
    sizes: list[int] = []
    vectors: list[np.ndarray] = []
    sd_sums: list[float] = []

    def emit(closure_entries: np.ndarray, words: np.ndarray, counts: np.ndarray, size: int):
        if max_itemsets is not None and len(descs) >= max_itemsets:
            raise CatalogCapExceeded(len(descs) + 1, max_itemsets)
        descs.append(tuple((int(j) // bc, int(j) % bc) for j in closure_entries))
        members.append(words)
        sizes.append(size)
        vec, sd_sum = _vector_stats(counts, size, n_attrs, bc)
        vectors.append(vec)
        sd_sums.append(sd_sum)

    def grow(in_closure: np.ndarray, words: np.ndarray, counts: np.ndarray, size: int, core: int):
        viable = np.flatnonzero((counts >= min_support) & (counts < size) & ~in_closure)
        for e in viable[np.searchsorted(viable, core + 1) :]:
            e = int(e)
            child_words = K.intersect(words, occ[e])
            child_counts = K.facet_counts(child_words, occ)
            child_size = int(counts[e])
            closed = child_counts == child_size
            # Prefix-preserving check: the closure must not reach back
            # before the extension entry.
            if np.any(closed[:e] & ~in_closure[:e]):
                continue
            emit(np.flatnonzero(closed), child_words, child_counts, child_size)
            grow(closed, child_words, child_counts, child_size, e)

    root_words = full_bitmap(n_rows)
    root_counts = K.facet_counts(root_words, occ)
    root_closed = root_counts == n_rows
    if n_rows >= min_support:
        emit(np.flatnonzero(root_closed), root_words, root_counts, n_rows)
        grow(root_closed, root_words, root_counts, n_rows, -1)

    W = n_words(n_rows)
    cat = PatternCatalog(
        attribute_names=data.attribute_names,
        bin_count=bc,
        min_support=min_support,
        n_rows=n_rows,
        descs=descs,
        members_matrix=np.asarray(members, dtype=np.uint64).reshape(len(descs), W),
        sizes=np.asarray(sizes, dtype=np.int64),
        vector_matrix=np.asarray(vectors, dtype=np.float64).reshape(len(descs), n_attrs),
        sd_sums=np.asarray(sd_sums, dtype=np.float64),
    )
    cat._occ = occ
    return cat


def closure_of_words(catalog: PatternCatalog, words: np.ndarray, size: int) -> Itemset | None:
    """Map a member bitmap to its closed catalog itemset (None below support)."""
    if size < catalog.min_support or size == 0:
        return None
    counts = K.facet_counts(words, catalog.occ)
    closure = canonical_desc(
        (int(j) // catalog.bin_count, int(j) % catalog.bin_count)
        for j in np.flatnonzero(counts == size)
    )
    iid = catalog.by_description.get(closure)
    if iid is None:
        # Support >= min_support guarantees the closure was mined.
        raise CatalogError(f"closure {closure} missing from catalog; catalog/data mismatch")
    return catalog.itemset(iid)


def members_of_desc(catalog: PatternCatalog, pairs: Description) -> np.ndarray:
    words = full_bitmap(catalog.n_rows)
    for a, v in pairs:
        words = K.intersect(words, catalog.occ[catalog.entry_index(a, v)])
    return words


def closure_lookup(catalog: PatternCatalog, desc) -> Itemset | None:
    """Resolve a description to the catalog itemset holding exactly the items
    that satisfy it; the returned desc is the closure (possibly a superset of
    the query). None when the match has no qualifying support."""
    pairs = canonical_desc(desc)
    for a, v in pairs:
        catalog.entry_index(a, v)  # validates indices
    words = members_of_desc(catalog, pairs)
    return closure_of_words(catalog, words, K.popcount(words))


def minimal_supersets(catalog: PatternCatalog, itemset: Itemset, limit: int) -> list[Itemset]:
    """Itemsets strictly containing the input's members, smallest first."""
    ids = catalog.strict_supersets(itemset.id, limit)
    return [catalog.itemset(int(i)) for i in ids]


def save_catalog(catalog: PatternCatalog, path) -> None:
    with open(path, "wb") as fh:
        fh.write(CATALOG_MAGIC)
        fh.write(
            struct.pack(
                "<HIIIHH",
                CATALOG_VERSION,
                len(catalog),
                catalog.n_rows,
                catalog.min_support,
                catalog.bin_count,
                catalog.n_attrs,
            )
        )
        for name in catalog.attribute_names:
            raw = name.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
        W = catalog.members_matrix.shape[1]
        fh.write(struct.pack("<I", W))
        for iid in range(len(catalog)):
            desc = catalog.descs[iid]
            fh.write(struct.pack("<IH", iid, len(desc)))
            for a, v in desc:
                fh.write(struct.pack("<HH", a, v))
            fh.write(struct.pack("<I", int(catalog.sizes[iid])))
            fh.write(catalog.vector_matrix[iid].astype("<f8").tobytes())
            fh.write(struct.pack("<d", float(catalog.sd_sums[iid])))
            fh.write(catalog.members_matrix[iid].astype("<u8").tobytes())


def load_catalog(path, data: BinnedDataset | None = None) -> PatternCatalog:
    with open(path, "rb") as fh:
        if fh.read(len(CATALOG_MAGIC)) != CATALOG_MAGIC:
            raise CatalogError(f"not a catalog file: {path}")
        version, n_itemsets, n_rows, min_support, bin_count, n_attrs = struct.unpack(
            "<HIIIHH", fh.read(18)
        )
        if version != CATALOG_VERSION:
            raise CatalogError(f"unsupported catalog format version {version}")
        names = []
        for _ in range(n_attrs):
            (ln,) = struct.unpack("<H", fh.read(2))
            names.append(fh.read(ln).decode("utf-8"))
        (W,) = struct.unpack("<I", fh.read(4))
        descs: list[Description] = []
        members = np.empty((n_itemsets, W), dtype=np.uint64)
        sizes = np.empty(n_itemsets, dtype=np.int64)
        vectors = np.empty((n_itemsets, n_attrs), dtype=np.float64)
        sd_sums = np.empty(n_itemsets, dtype=np.float64)
        for i in range(n_itemsets):
            iid, n_desc = struct.unpack("<IH", fh.read(6))
            pairs = []
            for _ in range(n_desc):
                a, v = struct.unpack("<HH", fh.read(4))
                pairs.append((a, v))
            descs.append(tuple(pairs))
            (sizes[i],) = struct.unpack("<I", fh.read(4))
            vectors[i] = np.frombuffer(fh.read(8 * n_attrs), dtype="<f8")
            (sd_sums[i],) = struct.unpack("<d", fh.read(8))
            members[i] = np.frombuffer(fh.read(8 * W), dtype="<u8")
    cat = PatternCatalog(
        attribute_names=names,
        bin_count=bin_count,
        min_support=min_support,
        n_rows=n_rows,
        descs=descs,
        members_matrix=members,
        sizes=sizes,
        vector_matrix=vectors,
        sd_sums=sd_sums,
    )
    if data is not None:
        cat.attach_data(data)
    return cat
