"""Finite-difference validation of the hand-written backpropagation."""

import numpy as np

from .net import PARAM_ORDER, init_params, loss_and_grads, loss_only


def random_batch(input_dim: int, policy_dim: int, batch: int, rng):
    X = rng.normal(size=(batch, input_dim))
    masks = rng.random((batch, policy_dim)) < 0.6
    for b in range(batch):
        if not masks[b].any():
            masks[b, rng.integers(policy_dim)] = True
    actions = np.array([rng.choice(np.flatnonzero(masks[b])) for b in range(batch)])
    advantages = rng.normal(size=batch)
    returns = rng.normal(size=batch)
    return X, actions, advantages, returns, masks


def grad_check(
    input_dim: int = 12,
    hidden1: int = 8,
    hidden2: int = 8,
    policy_dim: int = 10,
    seed: int = 0,
    batch: int = 3,
    h: float = 1e-5,
    entropy_coef: float = 0.01,
    value_coef: float = 0.5,
) -> float:
    """Max relative error between analytic and central-difference gradients."""
    rng = np.random.default_rng(seed)
    params = init_params(input_dim, hidden1, hidden2, policy_dim, seed + 1)
    X, actions, advs, returns, masks = random_batch(input_dim, policy_dim, batch, rng)

    _, grads = loss_and_grads(params, X, actions, advs, returns, masks, entropy_coef, value_coef)

    def f():
        return loss_only(params, X, actions, advs, returns, masks, entropy_coef, value_coef)

    worst = 0.0
    for name in PARAM_ORDER:
        arr = params[name]
        flat = arr.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = f()
            flat[i] = orig - h
            down = f()
            flat[i] = orig
            fd = (up - down) / (2.0 * h)
            a = grads[name].reshape(-1)[i]
            err = abs(a - fd) / max(1.0, abs(a), abs(fd))
            worst = max(worst, err)
    return worst
