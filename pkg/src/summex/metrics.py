"""Summary scoring: uniformity, diversity, novelty and their weighted utility.

Uniformity of an itemset is the attribute count divided by the summed
per-attribute population standard deviation of its members' bins (floored at
``UNI_EPS`` so perfectly uniform itemsets score the cap instead of dividing
by zero). Summary uniformity is the minimum over its itemsets, diversity the
minimum pairwise Manhattan distance between aggregate vectors, novelty the
fraction of itemsets not seen before. Components can be z-scaled against a
seeded calibration sample so the three are comparable in one weighted sum.
"""

from dataclasses import dataclass, field

import numpy as np

from .catalog import PatternCatalog
from .ingest import BinnedDataset

UNI_EPS = 1e-6
SD_FLOOR = 1e-9

FIXED_PRESETS = {
    "HU": (0.8, 0.1, 0.1),
    "HD": (0.1, 0.8, 0.1),
    "HN": (0.1, 0.1, 0.8),
    "BL": (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
}

SCHEMES = ("fixed", "increasing-novelty", "decreasing-novelty")

SCALES_MAGIC = "E4SSCALES"
SCALES_VERSION = 1


class MetricsError(ValueError):
    pass


@dataclass
class Summary:
    itemset_ids: list[int]

    def __post_init__(self):
        self.itemset_ids = [int(i) for i in self.itemset_ids]
        if len(set(self.itemset_ids)) != len(self.itemset_ids):
            raise MetricsError(f"duplicate itemset ids in summary: {self.itemset_ids}")

    def __len__(self) -> int:
        return len(self.itemset_ids)

    def __iter__(self):
        return iter(self.itemset_ids)


@dataclass
class SeenSet:
    ids: set = field(default_factory=set)

    def add_summary(self, summary) -> None:
        self.ids.update(int(i) for i in summary)

    def __contains__(self, iid) -> bool:
        return int(iid) in self.ids

    def __len__(self) -> int:
        return len(self.ids)

    def snapshot(self) -> "SeenSet":
        return SeenSet(set(self.ids))


@dataclass
class UtilityWeights:
    scheme: str = "fixed"
    preset: str = "BL"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise MetricsError(f"unknown weight scheme {self.scheme!r}")
        if self.scheme == "fixed" and self.preset not in FIXED_PRESETS:
            raise MetricsError(f"unknown weight preset {self.preset!r}")


@dataclass
class UtilityBreakdown:
    uni_raw: float
    div_raw: float
    nov_raw: float
    uni_scaled: float
    div_scaled: float
    nov_scaled: float
    utility: float
    weights: tuple

    def raw(self) -> tuple:
        return (self.uni_raw, self.div_raw, self.nov_raw)

    def scaled(self) -> tuple:
        return (self.uni_scaled, self.div_scaled, self.nov_scaled)


@dataclass
class ComponentScales:
    means: np.ndarray  # (uniformity, diversity, novelty)
    sds: np.ndarray
    enabled: bool = True

    def __post_init__(self):
        self.means = np.asarray(self.means, dtype=np.float64)
        self.sds = np.maximum(np.asarray(self.sds, dtype=np.float64), SD_FLOOR)

    @classmethod
    def disabled(cls) -> "ComponentScales":
        return cls(means=np.zeros(3), sds=np.ones(3), enabled=False)

    def scale(self, raw: tuple) -> tuple:
        if not self.enabled:
            return tuple(float(x) for x in raw)
        return tuple((float(x) - m) / s for x, m, s in zip(raw, self.means, self.sds))


def uniformity_from_sd_sum(sd_sum: float, n_attrs: int) -> float:
    return n_attrs / max(UNI_EPS, sd_sum)


def uniformity_itemset(itemset, data: BinnedDataset) -> float:
    """Recompute uniformity from the raw member rows (the catalog caches the
    summed std dev; this path is the from-scratch definition)."""
    ids = itemset.member_ids
    if ids.size == 0:
        raise MetricsError("uniformity of an empty itemset is undefined")
    bins = data.items[ids].astype(np.float64)
    sd_sum = float(bins.std(axis=0).sum())
    return uniformity_from_sd_sum(sd_sum, data.n_attrs)


def uniformity_summary(catalog: PatternCatalog, summary) -> float:
    ids = list(summary)
    if not ids:
        raise MetricsError("uniformity of an empty summary is undefined")
    return min(uniformity_from_sd_sum(float(catalog.sd_sums[i]), catalog.n_attrs) for i in ids)


def diversity_summary(catalog: PatternCatalog, summary) -> float:
    ids = list(summary)
    if len(ids) <= 1:
        return 0.0
    vectors = catalog.vector_matrix[ids]
    best = np.inf
    for i in range(len(ids) - 1):
        d = np.abs(vectors[i + 1 :] - vectors[i]).sum(axis=1).min()
        best = min(best, float(d))
    return best


def novelty_summary(summary, seen: SeenSet) -> float:
    ids = list(summary)
    if not ids:
        raise MetricsError("novelty of an empty summary is undefined")
    new = sum(1 for i in ids if i not in seen)
    return new / len(ids)


def raw_components(catalog: PatternCatalog, summary, seen: SeenSet) -> tuple:
    return (
        uniformity_summary(catalog, summary),
        diversity_summary(catalog, summary),
        novelty_summary(summary, seen),
    )


def utility(
    catalog: PatternCatalog,
    summary,
    weights: tuple,
    seen: SeenSet,
    scales: ComponentScales,
) -> UtilityBreakdown:
    """Score a summary: components, z-scaling when enabled, weighted sum."""
    alpha, beta, gamma = weights
    if abs(alpha + beta + gamma - 1.0) > 1e-9:
        raise MetricsError(f"weights must sum to 1, got {weights}")
    raw = raw_components(catalog, summary, seen)
    scaled = scales.scale(raw)
    value = alpha * scaled[0] + beta * scaled[1] + gamma * scaled[2]
    return UtilityBreakdown(
        uni_raw=raw[0],
        div_raw=raw[1],
        nov_raw=raw[2],
        uni_scaled=scaled[0],
        div_scaled=scaled[1],
        nov_scaled=scaled[2],
        utility=value,
        weights=(alpha, beta, gamma),
    )


def resolve_weights(w: UtilityWeights, step: int, seen_count: int, k: int, t_total: int) -> tuple:
    """Resolve the (alpha, beta, gamma) simplex point for one step.

    Evolving schemes move the novelty weight with the fraction of the
    pipeline's itemset budget (k * t_total) already seen; the remaining mass
    splits equally between uniformity and diversity.
    """
    if step < 1 or t_total < 1:
        raise MetricsError("step and t_total must be >= 1")
    if w.scheme == "fixed":
        return FIXED_PRESETS[w.preset]
    frac = seen_count / (k * t_total)
    if w.scheme == "decreasing-novelty":
        gamma = 0.8 * max(0.0, 1.0 - frac)
    else:  # increasing-novelty
        gamma = 0.1 + 0.7 * min(1.0, frac)
    rest = (1.0 - gamma) / 2.0
    return (rest, rest, gamma)


def calibrate_scales(
    catalog: PatternCatalog,
    data: BinnedDataset,
    sample_size: int = 200,
    seed: int = 0,
    k: int = 10,
) -> ComponentScales:
    """Estimate per-component mean/sd from seeded random k-summaries.

    Novelty needs variation to calibrate, so each draw simulates a partially
    seen summary: a seen-fraction is drawn uniformly and members are marked
    seen at that rate.
    """
    if sample_size < 30:
        raise MetricsError("sample_size must be >= 30")
    if len(catalog) < k:
        raise MetricsError(f"catalog holds {len(catalog)} itemsets, fewer than k={k}")
    rng = np.random.default_rng(seed)
    rows = np.empty((sample_size, 3), dtype=np.float64)
    for s in range(sample_size):
        ids = rng.choice(len(catalog), size=k, replace=False)
        summary = Summary(list(ids))
        seen_frac = rng.random()
        seen_mask = rng.random(k) < seen_frac
        rows[s, 0] = uniformity_summary(catalog, summary)
        rows[s, 1] = diversity_summary(catalog, summary)
        rows[s, 2] = 1.0 - float(seen_mask.mean())
    return ComponentScales(means=rows.mean(axis=0), sds=rows.std(axis=0))


def save_scales(scales: ComponentScales, path) -> None:
    names = ("uniformity", "diversity", "novelty")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{SCALES_MAGIC} v{SCALES_VERSION}\n")
        fh.write(f"enabled {int(scales.enabled)}\n")
        for i, name in enumerate(names):
            fh.write(f"{name}.mean {float(scales.means[i])!r}\n")
            fh.write(f"{name}.sd {float(scales.sds[i])!r}\n")


def load_scales(path) -> ComponentScales:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if header[:1] != [SCALES_MAGIC] or header[1] != f"v{SCALES_VERSION}":
            raise MetricsError(f"not a scales file: {path}")
        values = {}
        for line in fh:
            key, val = line.split()
            values[key] = val
    names = ("uniformity", "diversity", "novelty")
    return ComponentScales(
        means=np.array([float(values[f"{n}.mean"]) for n in names]),
        sds=np.array([float(values[f"{n}.sd"]) for n in names]),
        enabled=bool(int(values["enabled"])),
    )
