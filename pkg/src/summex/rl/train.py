"""Asynchronous actor-critic training.

Workers run episodes on private environments, accumulate an update batch
every ``update_interval`` steps, compute exact gradients against their local
parameter snapshot and merge them into the shared store atomically in
arrival order. A single worker with a fixed seed is bit-deterministic.
"""

import threading
from dataclasses import dataclass

import numpy as np

from .checkpoint import PolicyCheckpoint, TrainSettings
from .env import EnvSpec, SummarizationEnv
from .net import PARAM_ORDER, loss_and_grads, policy_value

HIDDEN = 128


@dataclass
class Trajectory:
    states: list
    actions: list
    rewards: list
    values: list
    masks: list
    bootstrap_value: float = 0.0


def advantages(traj: Trajectory, discount: float) -> list:
    """(return, advantage) per step: discounted returns run backward from the
    bootstrap value; advantage subtracts the critic's estimate."""
    if not traj.rewards:
        raise ValueError("empty trajectory")
    out = []
    running = traj.bootstrap_value
    for r, v in zip(reversed(traj.rewards), reversed(traj.values)):
        running = r + discount * running
        out.append((running, running - v))
    out.reverse()
    return out


class ParamStore:
    """Shared parameters; gradient batches apply atomically in arrival order."""

    def __init__(self, params: dict):
        self.params = {k: np.array(v, dtype=np.float64) for k, v in params.items()}
        self.lock = threading.Lock()

    def snapshot(self) -> dict:
        with self.lock:
            return {k: v.copy() for k, v in self.params.items()}

    def apply(self, grads: dict, lr: float, grad_clip: float) -> None:
        norm = np.sqrt(sum(float((g**2).sum()) for g in grads.values()))
        scale = lr if norm <= grad_clip or grad_clip <= 0 else lr * grad_clip / norm
        with self.lock:
            for name in PARAM_ORDER:
                self.params[name] -= scale * grads[name]


def _run_worker(
    worker_id: int,
    episode_ids: list,
    spec: EnvSpec,
    store: ParamStore,
    settings: TrainSettings,
    seed: int,
    reward_log: list,
    log_lock: threading.Lock,
    errors: list,
):
    try:
        rng = np.random.default_rng(seed * 1_000_003 + worker_id)
        env = SummarizationEnv(spec)
        total_actions = spec.layout.total
        for ep in episode_ids:
            state = env.reset()
            done = False
            ep_reward = 0.0
            while not done:
                local = store.snapshot()
                traj = Trajectory([], [], [], [], [])
                while len(traj.rewards) < settings.update_interval and not done:
                    mask = env.mask()
                    if not mask.any():
                        done = True
                        break
                    probs, values = policy_value(local, state[None, :], mask[None, :])
                    p = probs[0] / probs[0].sum()
                    a = int(rng.choice(total_actions, p=p))
                    next_state, reward, done = env.step(a)
                    traj.states.append(state)
                    traj.actions.append(a)
                    traj.rewards.append(reward)
                    traj.values.append(float(values[0]))
                    traj.masks.append(mask)
                    state = next_state
                    ep_reward += reward
                if not traj.rewards:
                    break
                if done:
                    traj.bootstrap_value = 0.0
                else:
                    tail_mask = env.mask()
                    if tail_mask.any():
                        _, tail_v = policy_value(local, state[None, :], tail_mask[None, :])
                        traj.bootstrap_value = float(tail_v[0])
                ra = advantages(traj, settings.discount)
                returns = np.array([r for r, _ in ra])
                advs = np.array([a for _, a in ra])
                _, grads = loss_and_grads(
                    local,
                    np.array(traj.states),
                    np.array(traj.actions),
                    advs,
                    returns,
                    np.array(traj.masks),
                    settings.entropy_coef,
                    settings.value_coef,
                )
                store.apply(grads, settings.lr, settings.grad_clip)
            with log_lock:
                reward_log.append((ep, worker_id, ep_reward))
    except BaseException as exc:  # surfaced by train()
        errors.append(exc)


def train(spec: EnvSpec, settings: TrainSettings | None = None, seed: int = 0) -> tuple:
    """Train a policy; returns (PolicyCheckpoint, reward_log).

    reward_log holds (episode, worker, cumulated_reward) sorted by episode.
    With episodes == 0 the returned checkpoint equals the initialization.
    """
    settings = settings or TrainSettings()
    ckpt = PolicyCheckpoint.fresh(
        input_dim=spec.input_dim,
        hidden1=HIDDEN,
        hidden2=HIDDEN,
        k=spec.k,
        n_attrs=spec.catalog.n_attrs,
        settings=settings,
        seed=seed,
    )
    if settings.episodes <= 0:
        return ckpt, []
    store = ParamStore(ckpt.params)
    n_workers = max(1, min(settings.workers, settings.episodes))
    assignments = [list(range(w, settings.episodes, n_workers)) for w in range(n_workers)]
    reward_log: list = []
    log_lock = threading.Lock()
    errors: list = []
    if n_workers == 1:
        _run_worker(0, assignments[0], spec, store, settings, seed, reward_log, log_lock, errors)
    else:
        threads = [
            threading.Thread(
                target=_run_worker,
                args=(w, assignments[w], spec, store, settings, seed, reward_log, log_lock, errors),
            )
            for w in range(n_workers)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
    if errors:
        raise errors[0]
    reward_log.sort(key=lambda row: row[0])
    ckpt.params = store.snapshot()
    return ckpt, reward_log
