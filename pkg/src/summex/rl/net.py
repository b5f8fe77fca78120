"""Feed-forward actor-critic with exact hand-written gradients.

Shared tanh trunk, a policy head over the flattened action space and a
scalar value head. The combined objective per batch is

    sum_b [ -log pi(a_b|s_b) * adv_b  -  entropy_coef * H(pi(s_b)) ]
  + value_coef * sum_b (return_b - V(s_b))^2

Gradients are derived analytically; grad_check verifies them against central
finite differences.
"""

import numpy as np

PARAM_ORDER = ("W1", "b1", "W2", "b2", "Wp", "bp", "Wv", "bv")


def init_params(input_dim: int, hidden1: int, hidden2: int, policy_dim: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)

    def glorot(fan_in, fan_out):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-limit, limit, size=(fan_in, fan_out))

    return {
        "W1": glorot(input_dim, hidden1),
        "b1": np.zeros(hidden1),
        "W2": glorot(hidden1, hidden2),
        "b2": np.zeros(hidden2),
        "Wp": glorot(hidden2, policy_dim),
        "bp": np.zeros(policy_dim),
        "Wv": glorot(hidden2, 1),
        "bv": np.zeros(1),
    }


def forward(params: dict, X: np.ndarray) -> tuple:
    """Returns (logits, values, cache) for a (B, input_dim) batch."""
    Z1 = X @ params["W1"] + params["b1"]
    H1 = np.tanh(Z1)
    Z2 = H1 @ params["W2"] + params["b2"]
    H2 = np.tanh(Z2)
    logits = H2 @ params["Wp"] + params["bp"]
    values = (H2 @ params["Wv"] + params["bv"]).reshape(-1)
    return logits, values, (X, H1, H2)


def masked_policy(logits: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """Softmax over valid entries only; invalid entries get exactly 0."""
    neg = np.where(masks, logits, -np.inf)
    shift = neg - neg.max(axis=1, keepdims=True)
    exp = np.where(masks, np.exp(shift), 0.0)
    return exp / exp.sum(axis=1, keepdims=True)


def policy_value(params: dict, X: np.ndarray, masks: np.ndarray) -> tuple:
    logits, values, _ = forward(params, X)
    return masked_policy(logits, masks), values


def loss_and_grads(
    params: dict,
    X: np.ndarray,
    actions: np.ndarray,
    advantages: np.ndarray,
    returns: np.ndarray,
    masks: np.ndarray,
    entropy_coef: float,
    value_coef: float,
) -> tuple:
    """Combined loss and exact gradients for one update batch."""
    logits, values, (X, H1, H2) = forward(params, X)
    probs = masked_policy(logits, masks)
    B = X.shape[0]
    idx = np.arange(B)

    p_a = probs[idx, actions]
    log_p_a = np.log(np.maximum(p_a, 1e-300))
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(probs > 0.0, probs * np.log(np.maximum(probs, 1e-300)), 0.0)
    entropy = -plogp.sum(axis=1)
    policy_loss = float(-(log_p_a * advantages).sum() - entropy_coef * entropy.sum())
    value_err = values - returns
    value_loss = float((value_err**2).sum())
    loss = policy_loss + value_coef * value_loss

    # d(-log p[a] * adv)/dlogits = adv * (p - onehot_a); masked entries have
    # p = 0 so their gradient vanishes, as it must.
    one_hot = np.zeros_like(probs)
    one_hot[idx, actions] = 1.0
    dlogits = advantages[:, None] * (probs - one_hot)
    # d(-c*H)/dlogits = c * p * (log p + H)
    with np.errstate(divide="ignore", invalid="ignore"):
        logp = np.where(probs > 0.0, np.log(np.maximum(probs, 1e-300)), 0.0)
    dlogits += entropy_coef * probs * (logp + entropy[:, None])
    dvalues = value_coef * 2.0 * value_err

    grads = {}
    grads["Wp"] = H2.T @ dlogits
    grads["bp"] = dlogits.sum(axis=0)
    grads["Wv"] = H2.T @ dvalues[:, None]
    grads["bv"] = np.array([dvalues.sum()])
    dH2 = dlogits @ params["Wp"].T + dvalues[:, None] @ params["Wv"].T
    dZ2 = dH2 * (1.0 - H2**2)
    grads["W2"] = H1.T @ dZ2
    grads["b2"] = dZ2.sum(axis=0)
    dH1 = dZ2 @ params["W2"].T
    dZ1 = dH1 * (1.0 - H1**2)
    grads["W1"] = X.T @ dZ1
    grads["b1"] = dZ1.sum(axis=0)

    if not np.isfinite(loss):
        raise FloatingPointError(
            f"non-finite loss (policy={policy_loss}, value={value_loss}); "
            "check rewards and learning rate"
        )
    return loss, grads


def loss_only(params, X, actions, advantages, returns, masks, entropy_coef, value_coef) -> float:
    logits, values, _ = forward(params, X)
    probs = masked_policy(logits, masks)
    idx = np.arange(X.shape[0])
    log_p_a = np.log(np.maximum(probs[idx, actions], 1e-300))
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(probs > 0.0, probs * np.log(np.maximum(probs, 1e-300)), 0.0)
    entropy = -plogp.sum(axis=1)
    value_err = values - returns
    return float(
        -(log_p_a * advantages).sum()
        - entropy_coef * entropy.sum()
        + value_coef * (value_err**2).sum()
    )
