"""Session state and pipeline execution for the three guidance modes.

A pipeline of length t displays t summaries: the SWAP bootstrap plus t-1
operator steps. Planning is pure (a PipelineStep is a proposal); apply_step
commits it, so partial guidance can preview suggestions without mutating the
session.
"""

import json
import time
import uuid
from dataclasses import dataclass, field

import numpy as np

from .catalog import PatternCatalog
from .metrics import (
    ComponentScales,
    SeenSet,
    Summary,
    UtilityBreakdown,
    UtilityWeights,
    resolve_weights,
    utility,
)
from .operators import (
    OPERATORS,
    OPERATORS_2OP,
    Action,
    InvalidActionError,
    action_from_json,
    enumerate_actions,
    execute_action,
)
from .swap import swap_summary

MODES = ("manual", "partial", "full")
STRATEGIES = ("top1sum", "rlsum", "random")


class EngineError(ValueError):
    pass


class NoValidActionError(RuntimeError):
    pass


class StaleStepError(RuntimeError):
    pass


class SessionExhaustedError(RuntimeError):
    pass


@dataclass
class SessionConfig:
    mode: str = "manual"
    strategy: str = "top1sum"
    weights: UtilityWeights = field(default_factory=UtilityWeights)
    k: int = 10
    t_total: int = 50
    swap_threshold: float = 2.0
    operators: str = "all"  # all | 2op
    seed: int = 0
    checkpoint_path: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise EngineError(f"unknown mode {self.mode!r}")
        if self.strategy not in STRATEGIES:
            raise EngineError(f"unknown strategy {self.strategy!r}")
        if self.operators not in ("all", "2op"):
            raise EngineError(f"operators must be 'all' or '2op', got {self.operators!r}")
        if self.k < 1 or self.t_total < 1:
            raise EngineError("k and t must be >= 1")

    @property
    def operator_set(self):
        return OPERATORS if self.operators == "all" else OPERATORS_2OP


@dataclass
class PipelineStep:
    action: Action
    result: Summary
    breakdown: UtilityBreakdown
    resolved_weights: tuple
    wall_time: float
    planned_at: int  # step_index the step was planned against
    candidates_evaluated: int = 0  # filled by top1sum planning


@dataclass
class TimelineEntry:
    """One displayed summary with its display-time scoring context."""

    ids: list[int]
    breakdown: UtilityBreakdown
    resolved_weights: tuple
    seen_size_after: int
    seen_flags: list[bool] = field(default_factory=list)  # re-display markers, per slot


class Session:
    def __init__(self, catalog: PatternCatalog, config: SessionConfig, scales: ComponentScales):
        self.id = uuid.uuid4().hex[:12]
        self.catalog = catalog
        self.config = config
        self.scales = scales
        self.seen = SeenSet()
        self.history: list[PipelineStep] = []
        self.step_index = 0
        self.truncated = False
        self.rng = np.random.default_rng(config.seed)
        self.policy = None
        if config.strategy == "rlsum":
            if config.checkpoint_path is None:
                raise EngineError("rlsum strategy requires a checkpoint")
            from .rl.checkpoint import load_checkpoint

            self.policy = load_checkpoint(config.checkpoint_path)

        bootstrap = swap_summary(catalog, config.k, config.swap_threshold)
        weights = resolve_weights(config.weights, 1, 0, config.k, config.t_total)
        breakdown = utility(catalog, bootstrap, weights, self.seen, scales)
        self.current = bootstrap
        self.seen.add_summary(bootstrap)
        self.timeline: list[TimelineEntry] = [
            TimelineEntry(list(bootstrap), breakdown, weights, len(self.seen), [False] * len(bootstrap))
        ]

    @property
    def bootstrap_breakdown(self) -> UtilityBreakdown:
        return self.timeline[0].breakdown

    @property
    def max_steps(self) -> int:
        # t_total summaries include the bootstrap.
        return self.config.t_total - 1

    @property
    def done(self) -> bool:
        return self.step_index >= self.max_steps or self.truncated

    def next_weights(self) -> tuple:
        return resolve_weights(
            self.config.weights, self.step_index + 1, len(self.seen), self.config.k, self.config.t_total
        )


def start_session(catalog: PatternCatalog, config: SessionConfig, scales: ComponentScales | None = None) -> Session:
    return Session(catalog, config, scales if scales is not None else ComponentScales.disabled())


def build_step(session: Session, action: Action, weights: tuple | None = None, wall_time: float = 0.0) -> PipelineStep:
    """Execute an action against the current summary and score the result."""
    if action.itemset_id not in set(session.current):
        raise InvalidActionError("action targets an itemset outside the current summary")
    w = weights if weights is not None else session.next_weights()
    t0 = time.perf_counter()
    result = execute_action(session.catalog, action, session.config.k)
    breakdown = utility(session.catalog, result, w, session.seen, session.scales)
    elapsed = time.perf_counter() - t0
    return PipelineStep(
        action=action,
        result=result,
        breakdown=breakdown,
        resolved_weights=w,
        wall_time=wall_time or elapsed,
        planned_at=session.step_index,
    )


def top1sum_next(session: Session) -> PipelineStep:
    """Greedy exhaustive planning: evaluate every candidate action and return
    the one whose summary scores highest (ties: enumeration order)."""
    if session.done:
        raise SessionExhaustedError("pipeline reached its configured length")
    t0 = time.perf_counter()
    weights = session.next_weights()
    best: PipelineStep | None = None
    evaluated = 0
    for action in enumerate_actions(session.catalog, session.current, session.config.operator_set):
        try:
            step = build_step(session, action, weights)
        except InvalidActionError:
            continue
        evaluated += 1
        if best is None or step.breakdown.utility > best.breakdown.utility:
            best = step
    if best is None:
        raise NoValidActionError("no operator applies to any itemset of the current summary")
    best.wall_time = time.perf_counter() - t0
    best.candidates_evaluated = evaluated
    return best


def random_next(session: Session) -> PipelineStep:
    if session.done:
        raise SessionExhaustedError("pipeline reached its configured length")
    t0 = time.perf_counter()
    actions = enumerate_actions(session.catalog, session.current, session.config.operator_set)
    order = session.rng.permutation(len(actions))
    for idx in order:
        try:
            step = build_step(session, actions[int(idx)])
            step.wall_time = time.perf_counter() - t0
            return step
        except InvalidActionError:
            continue
    raise NoValidActionError("no operator applies to any itemset of the current summary")


def rlsum_next(session: Session) -> PipelineStep:
    if session.done:
        raise SessionExhaustedError("pipeline reached its configured length")
    from .rl.infer import policy_next

    return policy_next(session)


def plan_next(session: Session) -> PipelineStep:
    if session.config.strategy == "top1sum":
        return top1sum_next(session)
    if session.config.strategy == "random":
        return random_next(session)
    return rlsum_next(session)


def apply_step(session: Session, step: PipelineStep) -> Session:
    if session.step_index >= session.max_steps:
        raise SessionExhaustedError("pipeline reached its configured length")
    if step.planned_at != session.step_index:
        raise StaleStepError(
            f"step was planned at index {step.planned_at}, session is at {session.step_index}"
        )
    if step.action.itemset_id not in set(session.current):
        raise StaleStepError("action targets an itemset outside the current summary")
    flags = [iid in session.seen for iid in step.result]
    session.current = step.result
    session.seen.add_summary(step.result)
    session.history.append(step)
    session.step_index += 1
    session.timeline.append(
        TimelineEntry(list(step.result), step.breakdown, step.resolved_weights, len(session.seen), flags)
    )
    return session


def run_full_pipeline(session: Session) -> list[PipelineStep]:
    """Plan + apply until the pipeline bound or a dead end (recorded)."""
    while session.step_index < session.max_steps:
        try:
            step = plan_next(session)
        except NoValidActionError:
            session.truncated = True
            break
        apply_step(session, step)
    return session.history


def cumulated_utility(session: Session, include_bootstrap: bool = True) -> float:
    total = sum(s.breakdown.utility for s in session.history)
    if include_bootstrap:
        total += session.bootstrap_breakdown.utility
    return total


def suggest_actions(session: Session, constraints: dict | None = None, n: int = 5) -> list[tuple]:
    """Rank candidate actions under partial constraints.

    top1sum scores by exact candidate utility, rlsum by policy probability,
    random keeps enumeration order. Returns (action, score) pairs, scores
    non-increasing.
    """
    constraints = constraints or {}
    actions = enumerate_actions(session.catalog, session.current, session.config.operator_set)
    if "itemset" in constraints and constraints["itemset"] is not None:
        actions = [a for a in actions if a.itemset_id == int(constraints["itemset"])]
    if "operator" in constraints and constraints["operator"] is not None:
        actions = [a for a in actions if a.operator == constraints["operator"]]
    if "attribute" in constraints and constraints["attribute"] is not None:
        attr = constraints["attribute"]
        if isinstance(attr, str):
            attr = session.catalog.attribute_names.index(attr)
        actions = [a for a in actions if a.attribute == attr]
    if not actions:
        raise NoValidActionError("constraints eliminate all candidate actions")

    scored: list[tuple] = []
    if session.config.strategy == "rlsum":
        from .rl.infer import action_probabilities

        probs = action_probabilities(session)
        for a in actions:
            scored.append((a, probs.get(a, 0.0)))
    elif session.config.strategy == "top1sum":
        weights = session.next_weights()
        for a in actions:
            try:
                step = build_step(session, a, weights)
            except InvalidActionError:
                continue
            scored.append((a, step.breakdown.utility))
        if not scored:
            raise NoValidActionError("constraints eliminate all candidate actions")
    else:
        scored = [(a, 0.0) for a in actions]
    scored.sort(key=lambda pair: -pair[1])
    return scored[:n]


# -- pipeline log ---------------------------------------------------------


def _step_record(index: int, entry: TimelineEntry, action_json) -> dict:
    b = entry.breakdown
    return {
        "type": "bootstrap" if index == 0 else "step",
        "step": index,
        "action": action_json,
        "result": entry.ids,
        "raw": [b.uni_raw, b.div_raw, b.nov_raw],
        "scaled": [b.uni_scaled, b.div_scaled, b.nov_scaled],
        "utility": b.utility,
        "weights": list(entry.resolved_weights),
        "seen": entry.seen_size_after,
    }


def write_pipeline_log(session: Session, path) -> None:
    cfg = session.config
    header = {
        "type": "header",
        "k": cfg.k,
        "t": cfg.t_total,
        "mode": cfg.mode,
        "strategy": cfg.strategy,
        "scheme": cfg.weights.scheme,
        "preset": cfg.weights.preset,
        "swap_threshold": cfg.swap_threshold,
        "operators": cfg.operators,
        "seed": cfg.seed,
        "truncated": session.truncated,
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header) + "\n")
        for i, entry in enumerate(session.timeline):
            action_json = None
            wall = 0.0
            if i > 0:
                step = session.history[i - 1]
                action_json = step.action.to_json(session.catalog)
                wall = step.wall_time
            record = _step_record(i, entry, action_json)
            record["wall_ms"] = wall * 1000.0
            fh.write(json.dumps(record) + "\n")


def replay_pipeline_log(path, catalog: PatternCatalog, scales: ComponentScales) -> tuple:
    """Re-execute a logged pipeline; returns (session, logged_records)."""
    with open(path, encoding="utf-8") as fh:
        records = [json.loads(line) for line in fh if line.strip()]
    header = records[0]
    config = SessionConfig(
        mode=header["mode"],
        strategy="top1sum" if header["strategy"] == "rlsum" else header["strategy"],
        weights=UtilityWeights(scheme=header["scheme"], preset=header["preset"]),
        k=header["k"],
        t_total=header["t"],
        swap_threshold=header["swap_threshold"],
        operators=header["operators"],
        seed=header["seed"],
    )
    session = start_session(catalog, config, scales)
    if list(session.current) != list(records[1]["result"]):
        raise EngineError("replay bootstrap does not match the log")
    for record in records[2:]:
        action = action_from_json(record["action"], catalog)
        step = build_step(session, action)
        apply_step(session, step)
    return session, records
