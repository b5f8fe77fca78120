"""State featurization and the flattened action space.

A state is the window of the 3 most recent displayed summaries. Each summary
contributes k slot blocks of 6 features (log size, log uniformity, vector
mean, vector extent, re-display flag, occupancy flag) and a global block of 8
(step progress, seen budget fraction, the three resolved weights, the three
raw components at display time). Sizes and uniformities are log-compressed so
the uniformity cap cannot saturate the net. Missing history is zero-padded at
the oldest end.

Actions flatten as slot x operator x attribute with one attribute column
reused as the null slot for attribute-free operators, giving k*4*|A| indices.
"""

from dataclasses import dataclass

import numpy as np

from ..bitops import full_bitmap
from ..catalog import PatternCatalog
from ..engine import Session
from ..metrics import uniformity_from_sd_sum
from ..operators import OPERATORS, Action

SLOT_FEATURES = 6
GLOBAL_FEATURES = 8
WINDOW = 3
N_OPS = len(OPERATORS)


@dataclass(frozen=True)
class ActionSpaceLayout:
    k: int
    n_attrs: int

    @property
    def total(self) -> int:
        return self.k * N_OPS * self.n_attrs

    def encode(self, slot: int, operator: str, attribute: int | None) -> int:
        op = OPERATORS.index(operator)
        attr = 0 if attribute is None else int(attribute)
        if not 0 <= slot < self.k or not 0 <= attr < self.n_attrs:
            raise ValueError(f"action out of layout range: slot={slot} attr={attribute}")
        return (slot * N_OPS + op) * self.n_attrs + attr

    def decode(self, index: int) -> tuple:
        """(slot, operator, attribute or None)."""
        if not 0 <= index < self.total:
            raise ValueError(f"action index {index} out of range")
        attr = index % self.n_attrs
        rest = index // self.n_attrs
        op = OPERATORS[rest % N_OPS]
        slot = rest // N_OPS
        if op in ("by-superset", "by-distrib"):
            return slot, op, None
        return slot, op, int(attr)


def state_dim(k: int) -> int:
    return WINDOW * (SLOT_FEATURES * k + GLOBAL_FEATURES)


def layout_for(catalog: PatternCatalog, k: int) -> ActionSpaceLayout:
    return ActionSpaceLayout(k=k, n_attrs=catalog.n_attrs)


def _state_block(session: Session, entry, position: int, weights: tuple) -> np.ndarray:
    catalog = session.catalog
    k = session.config.k
    block = np.zeros(SLOT_FEATURES * k + GLOBAL_FEATURES)
    for slot, iid in enumerate(entry.ids[:k]):
        uni = uniformity_from_sd_sum(float(catalog.sd_sums[iid]), catalog.n_attrs)
        vec = catalog.vector_matrix[iid]
        base = slot * SLOT_FEATURES
        block[base] = np.log1p(float(catalog.sizes[iid]))
        block[base + 1] = np.log1p(uni)
        block[base + 2] = float(vec.mean())
        block[base + 3] = float(vec.max() - vec.min())
        block[base + 4] = 1.0 if (entry.seen_flags[slot] if slot < len(entry.seen_flags) else False) else 0.0
        block[base + 5] = 1.0
    g = SLOT_FEATURES * k
    t_total = session.config.t_total
    b = entry.breakdown
    block[g] = position / t_total
    block[g + 1] = entry.seen_size_after / (session.config.k * t_total)
    block[g + 2 : g + 5] = weights
    block[g + 5] = np.log1p(max(0.0, b.uni_raw))
    block[g + 6] = b.div_raw
    block[g + 7] = b.nov_raw
    return block


def encode_state(session: Session) -> np.ndarray:
    """Deterministic fixed-dimension feature vector for the decision state."""
    k = session.config.k
    blocks = []
    entries = session.timeline[-WINDOW:]
    pad = WINDOW - len(entries)
    for _ in range(pad):
        blocks.append(np.zeros(SLOT_FEATURES * k + GLOBAL_FEATURES))
    first_pos = len(session.timeline) - len(entries)
    for off, entry in enumerate(entries):
        is_current = off == len(entries) - 1
        weights = session.next_weights() if is_current else entry.resolved_weights
        blocks.append(_state_block(session, entry, first_pos + off, weights))
    return np.concatenate(blocks)


def action_mask(session: Session, layout: ActionSpaceLayout) -> np.ndarray:
    """Execution-level validity per flattened index: a True entry is
    guaranteed to produce a nonempty summary.

    Facet validity for all attributes of a slot comes from one entry-count
    kernel call over the slot's member bitmap; only by-neighbors needs
    per-action support checks.
    """
    from .. import _kernels as K

    catalog = session.catalog
    mask = np.zeros(layout.total, dtype=bool)
    operator_set = session.config.operator_set
    superset_on = "by-superset" in operator_set
    distrib_on = "by-distrib" in operator_set and len(catalog) >= 2
    facet_on = "by-facet" in operator_set
    neighbors_on = "by-neighbors" in operator_set
    bc = catalog.bin_count
    for slot, iid in enumerate(list(session.current)[: layout.k]):
        constrained = dict(catalog.descs[iid])
        if superset_on and iid != catalog.root_id:
            mask[layout.encode(slot, "by-superset", None)] = True
        if distrib_on:
            mask[layout.encode(slot, "by-distrib", None)] = True
        if facet_on:
            counts = K.facet_counts(catalog.members_matrix[iid], catalog.occ)
            per_attr_ok = (counts.reshape(catalog.n_attrs, bc) >= catalog.min_support).any(axis=1)
            for attr in range(layout.n_attrs):
                if attr not in constrained and per_attr_ok[attr]:
                    mask[layout.encode(slot, "by-facet", attr)] = True
        if neighbors_on and constrained:
            # Prefix/suffix AND chains give each attribute's
            # "members of desc minus this constraint" in O(d) intersections.
            pairs = sorted(constrained.items())
            rows = [catalog.occ[catalog.entry_index(a, v)] for a, v in pairs]
            d = len(rows)
            prefix = [full_bitmap(catalog.n_rows)]
            for r in rows[:-1]:
                prefix.append(K.intersect(prefix[-1], r))
            suffix = [full_bitmap(catalog.n_rows)]
            for r in reversed(rows[1:]):
                suffix.append(K.intersect(suffix[-1], r))
            suffix.reverse()
            for i, (attr, v) in enumerate(pairs):
                base = K.intersect(prefix[i], suffix[i])
                ok = False
                for nv in (v - 1, v + 1):
                    if 0 <= nv < bc and K.and_popcount(
                        base, catalog.occ[catalog.entry_index(attr, nv)]
                    ) >= catalog.min_support:
                        ok = True
                        break
                if ok:
                    mask[layout.encode(slot, "by-neighbors", attr)] = True
    return mask


def decode_action(session: Session, layout: ActionSpaceLayout, index: int) -> Action:
    slot, op, attr = layout.decode(index)
    current = list(session.current)
    if slot >= len(current):
        raise ValueError(f"slot {slot} is empty in the current summary")
    return Action(itemset_id=current[slot], operator=op, attribute=attr)
