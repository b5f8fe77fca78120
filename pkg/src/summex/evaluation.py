"""Ground-truth relevance, operator usage and multi-variant benchmarks."""

import csv
from dataclasses import dataclass, field

from . import _kernels as K
from .bitops import bitmap_from_ids
from .catalog import PatternCatalog
from .engine import Session, SessionConfig, run_full_pipeline, start_session
from .metrics import ComponentScales, UtilityWeights
from .operators import OPERATORS

CSV_COLUMNS = [
    "variant",
    "seed",
    "step",
    "operator",
    "uni_raw",
    "div_raw",
    "nov_raw",
    "uni_scaled",
    "div_scaled",
    "nov_scaled",
    "utility",
    "cum_utility",
    "cum_relevance",
    "wall_ms",
]


class EvaluationError(ValueError):
    pass


@dataclass
class GroundTruth:
    labels: list[str]
    member_sets: list[frozenset]

    def __post_init__(self):
        if not self.labels:
            raise EvaluationError("ground truth is empty")
        if len(set(self.labels)) != len(self.labels):
            raise EvaluationError("ground-truth labels must be unique")
        seen: set = set()
        for label, members in zip(self.labels, self.member_sets):
            if seen & members:
                raise EvaluationError(f"ground-truth sets overlap at {label!r}")
            seen |= members

    def __len__(self) -> int:
        return len(self.labels)


def load_ground_truth(path) -> GroundTruth:
    labels, sets = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            label, _, ids = line.partition("\t")
            sets.append(frozenset(int(x) for x in ids.split(",") if x))
            labels.append(label)
    return GroundTruth(labels=labels, member_sets=sets)


def save_ground_truth(gt: GroundTruth, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for label, members in zip(gt.labels, gt.member_sets):
            fh.write(f"{label}\t{','.join(str(i) for i in sorted(members))}\n")


def relevance(
    catalog: PatternCatalog,
    displayed: list,
    gt: GroundTruth,
    threshold: float = 0.8,
) -> tuple:
    """Count ground-truth sets discovered by a sequence of displayed summaries
    (bootstrap first). A set is discovered the first time any displayed
    itemset's members reach Jaccard >= threshold with it; each counts once.

    Returns (discovered_count, per-display cumulative trace).
    """
    if not 0.0 < threshold <= 1.0:
        raise EvaluationError("threshold must be in (0, 1]")
    n = catalog.n_rows
    gt_words = [bitmap_from_ids(sorted(members), n) for members in gt.member_sets]
    gt_sizes = [len(members) for members in gt.member_sets]
    found = [False] * len(gt)
    trace = []
    for summary in displayed:
        for iid in summary:
            words = catalog.members_matrix[iid]
            size = int(catalog.sizes[iid])
            for g in range(len(gt)):
                if found[g]:
                    continue
                inter = K.and_popcount(words, gt_words[g])
                union = size + gt_sizes[g] - inter
                if union > 0 and inter / union >= threshold:
                    found[g] = True
        trace.append(sum(found))
    return sum(found), trace


def operator_usage(steps) -> tuple:
    """Proportions per operator over a pipeline's steps, in operator order."""
    if not steps:
        raise EvaluationError("pipeline has no steps")
    counts = {op: 0 for op in OPERATORS}
    for step in steps:
        counts[step.action.operator] += 1
    total = len(steps)
    return tuple(counts[op] / total for op in OPERATORS)


@dataclass
class Variant:
    name: str
    strategy: str
    preset: str = "BL"
    scheme: str = "fixed"
    operators: str = "all"
    checkpoint_path: str | None = None

    def weights(self) -> UtilityWeights:
        return UtilityWeights(scheme=self.scheme, preset=self.preset)


@dataclass
class BenchmarkResult:
    rows: list = field(default_factory=list)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            writer.writeheader()
            for row in self.rows:
                writer.writerow(row)

    @classmethod
    def read_csv(cls, path) -> "BenchmarkResult":
        rows = []
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                for key in row:
                    if key in ("seed", "step"):
                        row[key] = int(row[key])
                    elif key not in ("variant", "operator"):
                        row[key] = float(row[key])
                rows.append(row)
        return cls(rows=rows)


def _session_rows(variant: Variant, seed: int, session: Session, gt: GroundTruth | None, threshold: float) -> list:
    displayed = [entry.ids for entry in session.timeline]
    if gt is not None:
        _, rel_trace = relevance(session.catalog, displayed, gt, threshold)
    else:
        rel_trace = [0] * len(displayed)
    rows = []
    cum_utility = 0.0
    for i, entry in enumerate(session.timeline):
        b = entry.breakdown
        cum_utility += b.utility
        op = "bootstrap" if i == 0 else session.history[i - 1].action.operator
        wall = 0.0 if i == 0 else session.history[i - 1].wall_time * 1000.0
        rows.append(
            {
                "variant": variant.name,
                "seed": seed,
                "step": i,
                "operator": op,
                "uni_raw": b.uni_raw,
                "div_raw": b.div_raw,
                "nov_raw": b.nov_raw,
                "uni_scaled": b.uni_scaled,
                "div_scaled": b.div_scaled,
                "nov_scaled": b.nov_scaled,
                "utility": b.utility,
                "cum_utility": cum_utility,
                "cum_relevance": rel_trace[i],
                "wall_ms": wall,
            }
        )
    return rows


def run_benchmark(
    catalog: PatternCatalog,
    scales: ComponentScales,
    variants: list,
    t: int = 50,
    seeds=(0,),
    k: int = 10,
    gt: GroundTruth | None = None,
    swap_threshold: float = 2.0,
    relevance_threshold: float = 0.8,
) -> BenchmarkResult:
    """Full-guidance pipeline per (variant, seed); traces collected per step."""
    if not variants:
        raise EvaluationError("no variants given")
    result = BenchmarkResult()
    for variant in variants:
        for seed in seeds:
            config = SessionConfig(
                mode="full",
                strategy=variant.strategy,
                weights=variant.weights(),
                k=k,
                t_total=t,
                swap_threshold=swap_threshold,
                operators=variant.operators,
                seed=seed,
                checkpoint_path=variant.checkpoint_path,
            )
            session = start_session(catalog, config, scales)
            run_full_pipeline(session)
            result.rows.extend(_session_rows(variant, seed, session, gt, relevance_threshold))
    return result


def cumulated_utility_by_run(result: BenchmarkResult) -> dict:
    """Final cumulated utility per (variant, seed) from the recorded rows."""
    out = {}
    for row in result.rows:
        key = (row["variant"], row["seed"])
        cur = out.get(key)
        if cur is None or row["step"] >= cur[0]:
            out[key] = (row["step"], row["cum_utility"])
    return {key: val for key, (_, val) in out.items()}
