"""The four exploration operators and candidate-action enumeration.

Each operator maps one itemset of the current summary to the next summary.
An action that cannot produce a nonempty result raises InvalidActionError,
a first-class signal the planners use for masking and skipping.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .catalog import Itemset, PatternCatalog, closure_of_words, minimal_supersets
from .metrics import Summary

OPERATORS = ("by-facet", "by-superset", "by-distrib", "by-neighbors")
OPERATORS_2OP = ("by-facet", "by-superset")
ATTRIBUTE_REQUIRED = {"by-facet": True, "by-superset": False, "by-distrib": False, "by-neighbors": True}


class InvalidActionError(Exception):
    """Raised when an operator cannot apply; carries the failed precondition."""

    def __init__(self, precondition: str):
        super().__init__(precondition)
        self.precondition = precondition


@dataclass(frozen=True)
class Action:
    itemset_id: int
    operator: str
    attribute: int | None = None

    def __post_init__(self):
        if self.operator not in OPERATORS:
            raise ValueError(f"unknown operator {self.operator!r}")
        if ATTRIBUTE_REQUIRED[self.operator] and self.attribute is None:
            raise ValueError(f"{self.operator} requires an attribute")
        if not ATTRIBUTE_REQUIRED[self.operator] and self.attribute is not None:
            raise ValueError(f"{self.operator} takes no attribute")

    def to_json(self, catalog: PatternCatalog) -> dict:
        name = None if self.attribute is None else catalog.attribute_names[self.attribute]
        return {"itemset": self.itemset_id, "operator": self.operator, "attribute": name}


def action_from_json(obj: dict, catalog: PatternCatalog) -> Action:
    attr = obj.get("attribute")
    if isinstance(attr, str):
        try:
            attr = catalog.attribute_names.index(attr)
        except ValueError:
            raise InvalidActionError(f"unknown attribute {attr!r}") from None
    return Action(itemset_id=int(obj["itemset"]), operator=obj["operator"], attribute=attr)


def by_facet(catalog: PatternCatalog, itemset: Itemset, attribute: int, k: int) -> Summary:
    """Drill down: one child per bin value present on the facet attribute."""
    constrained = dict(itemset.desc)
    if attribute in constrained:
        raise InvalidActionError("facet attribute is already constrained in the description")
    children: list[Itemset] = []
    for v in range(catalog.bin_count):
        entry = catalog.occ[catalog.entry_index(attribute, v)]
        size = K.and_popcount(itemset.member_words, entry)
        if size < catalog.min_support or size == 0:
            continue
        child = closure_of_words(catalog, K.intersect(itemset.member_words, entry), size)
        if child is not None and all(c.id != child.id for c in children):
            children.append(child)
    if not children:
        raise InvalidActionError("no facet child meets the minimum support")
    if len(children) > k:
        keep = {c.id for c in sorted(children, key=lambda c: (-c.size, c.id))[:k]}
        children = [c for c in children if c.id in keep]
    return Summary([c.id for c in children])


def by_superset(catalog: PatternCatalog, itemset: Itemset, k: int) -> Summary:
    """Roll up: the k smallest itemsets strictly containing the input."""
    sups = minimal_supersets(catalog, itemset, k)
    if not sups:
        raise InvalidActionError("the root itemset has no strict supersets")
    return Summary([s.id for s in sups])


def by_distrib(catalog: PatternCatalog, itemset: Itemset, k: int) -> Summary:
    """The k itemsets with the closest aggregate vectors (Manhattan)."""
    if len(catalog) < 2:
        raise InvalidActionError("catalog holds no other itemset")
    dists = np.abs(catalog.vector_matrix - itemset.vector).sum(axis=1)
    dists[itemset.id] = np.inf
    order = np.lexsort((np.arange(len(catalog)), dists))
    return Summary([int(i) for i in order[: min(k, len(catalog) - 1)]])


def by_neighbors(catalog: PatternCatalog, itemset: Itemset, attribute: int) -> Summary:
    """The itemsets at the previous and next bin of a constrained attribute."""
    constrained = dict(itemset.desc)
    if attribute not in constrained:
        raise InvalidActionError("neighbor attribute is not constrained in the description")
    v = constrained[attribute]
    found = []
    for nv in (v - 1, v + 1):
        if not 0 <= nv < catalog.bin_count:
            continue
        pairs = dict(itemset.desc)
        pairs[attribute] = nv
        words = _desc_words(catalog, pairs)
        child = closure_of_words(catalog, words, K.popcount(words))
        if child is not None:
            found.append(child.id)
    if not found:
        raise InvalidActionError("neither neighboring bin has a qualifying itemset")
    return Summary(found)


def _desc_words(catalog: PatternCatalog, pairs: dict) -> np.ndarray:
    from .catalog import members_of_desc

    return members_of_desc(catalog, sorted(pairs.items()))


def execute_action(catalog: PatternCatalog, action: Action, k: int) -> Summary:
    itemset = catalog.itemset(action.itemset_id)
    if action.operator == "by-facet":
        return by_facet(catalog, itemset, action.attribute, k)
    if action.operator == "by-superset":
        return by_superset(catalog, itemset, k)
    if action.operator == "by-distrib":
        return by_distrib(catalog, itemset, k)
    return by_neighbors(catalog, itemset, action.attribute)


def enumerate_actions(catalog: PatternCatalog, current, operators=OPERATORS) -> list[Action]:
    """All (itemset, operator, attribute) combinations passing operator
    preconditions, in deterministic order: summary position, operator, attribute."""
    actions: list[Action] = []
    for iid in current:
        constrained = dict(catalog.descs[iid])
        for op in operators:
            if op == "by-facet":
                actions.extend(
                    Action(iid, op, a) for a in range(catalog.n_attrs) if a not in constrained
                )
            elif op == "by-superset":
                if iid != catalog.root_id:
                    actions.append(Action(iid, op))
            elif op == "by-distrib":
                if len(catalog) >= 2:
                    actions.append(Action(iid, op))
            else:  # by-neighbors
                actions.extend(Action(iid, op, a) for a in sorted(constrained))
    return actions


def action_is_valid(catalog: PatternCatalog, action: Action) -> bool:
    """Support-level validity: would execute_action produce a nonempty summary?
    Cheap popcount checks only; no closures are materialized."""
    try:
        itemset = catalog.itemset(action.itemset_id)
    except Exception:
        return False
    constrained = dict(itemset.desc)
    if action.operator == "by-facet":
        if action.attribute in constrained or not 0 <= action.attribute < catalog.n_attrs:
            return False
        return any(
            K.and_popcount(itemset.member_words, catalog.occ[catalog.entry_index(action.attribute, v)])
            >= catalog.min_support
            for v in range(catalog.bin_count)
        )
    if action.operator == "by-superset":
        return action.itemset_id != catalog.root_id
    if action.operator == "by-distrib":
        return len(catalog) >= 2
    # by-neighbors
    if action.attribute not in constrained:
        return False
    v = constrained[action.attribute]
    for nv in (v - 1, v + 1):
        if not 0 <= nv < catalog.bin_count:
            continue
        pairs = dict(constrained)
        pairs[action.attribute] = nv
        if K.popcount(_desc_words(catalog, pairs)) >= catalog.min_support:
            return True
    return False
