"""Session-backed episode environment for policy training and evaluation."""

from dataclasses import dataclass, field

import numpy as np

from ..catalog import PatternCatalog
from ..engine import Session, SessionConfig, apply_step, build_step, start_session
from ..metrics import ComponentScales, UtilityWeights
from .encoding import ActionSpaceLayout, action_mask, decode_action, encode_state, state_dim


@dataclass
class EnvSpec:
    catalog: PatternCatalog
    scales: ComponentScales
    weights: UtilityWeights = field(default_factory=UtilityWeights)
    k: int = 10
    steps_per_episode: int = 50
    swap_threshold: float = 2.0
    operators: str = "all"

    @property
    def layout(self) -> ActionSpaceLayout:
        return ActionSpaceLayout(k=self.k, n_attrs=self.catalog.n_attrs)

    @property
    def input_dim(self) -> int:
        return state_dim(self.k)


class SummarizationEnv:
    """One private session per episode; reward is the step's utility, the
    same number the pipeline engine reports for that transition."""

    def __init__(self, spec: EnvSpec):
        self.spec = spec
        self.layout = spec.layout
        self.session: Session | None = None

    def reset(self) -> np.ndarray:
        config = SessionConfig(
            mode="full",
            strategy="top1sum",  # planning is driven externally
            weights=self.spec.weights,
            k=self.spec.k,
            t_total=self.spec.steps_per_episode + 1,
            swap_threshold=self.spec.swap_threshold,
            operators=self.spec.operators,
        )
        self.session = start_session(self.spec.catalog, config, self.spec.scales)
        return encode_state(self.session)

    def mask(self) -> np.ndarray:
        return action_mask(self.session, self.layout)

    def step(self, flat_index: int) -> tuple:
        action = decode_action(self.session, self.layout, int(flat_index))
        step = build_step(self.session, action)
        apply_step(self.session, step)
        done = self.session.done
        return encode_state(self.session), float(step.breakdown.utility), done
