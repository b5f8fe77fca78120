"""Binary policy checkpoints (magic E4SRL), bit-exact round-trip."""

import struct
from dataclasses import dataclass, field

import numpy as np

from .net import PARAM_ORDER, init_params

CHECKPOINT_MAGIC = b"E4SRL"
CHECKPOINT_VERSION = 1


@dataclass
class TrainSettings:
    discount: float = 0.99
    lr: float = 1e-4
    entropy_coef: float = 0.01
    value_coef: float = 0.5
    grad_clip: float = 10.0
    workers: int = 6
    update_interval: int = 20
    episodes: int = 4000
    steps_per_episode: int = 50


@dataclass
class PolicyCheckpoint:
    input_dim: int
    hidden1: int
    hidden2: int
    k: int
    n_attrs: int
    params: dict
    settings: TrainSettings = field(default_factory=TrainSettings)
    seed: int = 0

    @property
    def policy_dim(self) -> int:
        return self.k * 4 * self.n_attrs

    @classmethod
    def fresh(cls, input_dim, hidden1, hidden2, k, n_attrs, settings=None, seed=0):
        settings = settings or TrainSettings()
        params = init_params(input_dim, hidden1, hidden2, k * 4 * n_attrs, seed)
        return cls(input_dim, hidden1, hidden2, k, n_attrs, params, settings, seed)


def save_checkpoint(ckpt: PolicyCheckpoint, path) -> None:
    s = ckpt.settings
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(
            struct.pack(
                "<HIIIHH",
                CHECKPOINT_VERSION,
                ckpt.input_dim,
                ckpt.hidden1,
                ckpt.hidden2,
                ckpt.k,
                ckpt.n_attrs,
            )
        )
        fh.write(
            struct.pack(
                "<dddddIIIIQ",
                s.discount,
                s.lr,
                s.entropy_coef,
                s.value_coef,
                s.grad_clip,
                s.workers,
                s.update_interval,
                s.episodes,
                s.steps_per_episode,
                ckpt.seed,
            )
        )
        for name in PARAM_ORDER:
            arr = np.ascontiguousarray(ckpt.params[name], dtype="<f8")
            fh.write(struct.pack("<B", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            fh.write(arr.tobytes())


def load_checkpoint(path) -> PolicyCheckpoint:
    with open(path, "rb") as fh:
        if fh.read(len(CHECKPOINT_MAGIC)) != CHECKPOINT_MAGIC:
            raise ValueError(f"not a policy checkpoint: {path}")
        version, input_dim, hidden1, hidden2, k, n_attrs = struct.unpack("<HIIIHH", fh.read(18))
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        discount, lr, ent, vc, clip, workers, interval, episodes, steps, seed = struct.unpack(
            "<dddddIIIIQ", fh.read(64)
        )
        params = {}
        for name in PARAM_ORDER:
            (ndim,) = struct.unpack("<B", fh.read(1))
            shape = struct.unpack(f"<{ndim}I", fh.read(4 * ndim))
            count = int(np.prod(shape))
            params[name] = np.frombuffer(fh.read(8 * count), dtype="<f8").reshape(shape).copy()
    settings = TrainSettings(
        discount=discount,
        lr=lr,
        entropy_coef=ent,
        value_coef=vc,
        grad_clip=clip,
        workers=workers,
        update_interval=interval,
        episodes=episodes,
        steps_per_episode=steps,
    )
    return PolicyCheckpoint(input_dim, hidden1, hidden2, k, n_attrs, params, settings, seed)
