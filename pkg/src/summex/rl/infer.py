"""Checkpointed policy inference: greedy step planning and evaluation."""

import time

import numpy as np

from ..engine import NoValidActionError, Session, build_step
from .checkpoint import PolicyCheckpoint
from .encoding import action_mask, decode_action, encode_state, layout_for, state_dim
from .env import EnvSpec, SummarizationEnv
from .net import policy_value


def _check_layout(ckpt: PolicyCheckpoint, k: int, n_attrs: int) -> None:
    if ckpt.k != k or ckpt.n_attrs != n_attrs or ckpt.input_dim != state_dim(k):
        raise ValueError(
            f"checkpoint layout (k={ckpt.k}, attrs={ckpt.n_attrs}, in={ckpt.input_dim}) "
            f"does not match the session (k={k}, attrs={n_attrs}, in={state_dim(k)})"
        )


def _masked_distribution(session: Session):
    ckpt: PolicyCheckpoint = session.policy
    _check_layout(ckpt, session.config.k, session.catalog.n_attrs)
    layout = layout_for(session.catalog, session.config.k)
    state = encode_state(session)
    mask = action_mask(session, layout)
    if not mask.any():
        raise NoValidActionError("no operator applies to any itemset of the current summary")
    probs, _ = policy_value(ckpt.params, state[None, :], mask[None, :])
    return layout, mask, probs[0]


def decide(session: Session):
    """Greedy action choice only: encode, mask, forward, argmax.

    Returns (action, decision_seconds); nothing is executed."""
    t0 = time.perf_counter()
    layout, _, probs = _masked_distribution(session)
    best = int(np.argmax(probs))
    action = decode_action(session, layout, best)
    return action, time.perf_counter() - t0


def policy_next(session: Session):
    """Greedy policy decision; the returned step is not yet applied."""
    action, decision_time = decide(session)
    step = build_step(session, action)
    step.wall_time += decision_time
    return step


def action_probabilities(session: Session) -> dict:
    layout, mask, probs = _masked_distribution(session)
    out = {}
    for idx in np.flatnonzero(mask):
        out[decode_action(session, layout, int(idx))] = float(probs[idx])
    return out


def select_action(ckpt: PolicyCheckpoint, state: np.ndarray, mask: np.ndarray, mode: str = "greedy", seed: int = 0):
    """(flat index, probability) under the masked policy."""
    if not mask.any():
        raise NoValidActionError("all actions are masked")
    probs, _ = policy_value(ckpt.params, state[None, :], mask[None, :])
    p = probs[0]
    if mode == "greedy":
        idx = int(np.argmax(p))
    else:
        rng = np.random.default_rng(seed)
        idx = int(rng.choice(len(p), p=p / p.sum()))
    return idx, float(p[idx])


def evaluate_policy(ckpt: PolicyCheckpoint, spec: EnvSpec, episodes: int = 1, greedy: bool = True, seed: int = 0) -> dict:
    """Roll out the policy; reports cumulated reward statistics and per-step
    component traces (one trace per episode)."""
    _check_layout(ckpt, spec.k, spec.catalog.n_attrs)
    env = SummarizationEnv(spec)
    rng = np.random.default_rng(seed)
    totals = []
    traces = []
    decision_times = []
    for _ in range(episodes):
        state = env.reset()
        done = False
        total = 0.0
        trace = []
        while not done:
            mask = env.mask()
            if not mask.any():
                break
            t0 = time.perf_counter()
            probs, _ = policy_value(ckpt.params, state[None, :], mask[None, :])
            p = probs[0]
            idx = int(np.argmax(p)) if greedy else int(rng.choice(len(p), p=p / p.sum()))
            decision_times.append(time.perf_counter() - t0)
            state, reward, done = env.step(idx)
            total += reward
            b = env.session.history[-1].breakdown
            trace.append((b.uni_raw, b.div_raw, b.nov_raw, b.utility))
        totals.append(total)
        traces.append(trace)
    return {
        "episodes": episodes,
        "mean_reward": float(np.mean(totals)),
        "min_reward": float(np.min(totals)),
        "max_reward": float(np.max(totals)),
        "traces": traces,
        "mean_decision_time": float(np.mean(decision_times)) if decision_times else 0.0,
    }
