"""Two-source fusion rules and Shafer's conditioning rule."""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from enum import StrEnum

from dsmbcr.belief import Bba
from dsmbcr.errors import (
    EmptyConditioningError,
    InvalidBbaError,
    ModelError,
    TotalConflictError,
    UndefinedConditioningError,
)
from dsmbcr.frame import Element, total_element

logger = logging.getLogger(__name__)


class FusionRule(StrEnum):
    DEMPSTER = "dempster"
    DSMC = "dsmc"
    PCR5 = "pcr5"
    DSMH2 = "dsmh2"


def fuse(m1: Bba, m2: Bba, rule: FusionRule | str, *, normalize: bool = False) -> Bba:
    """Combine two sources.

    The conjunctive part m1(X)·m2(Y) goes to X ∩ Y when it is nonempty. The rules
    differ on conflicting products (X ∩ Y = ∅):

    - dsmc keeps them as the output's ``conflict``; ``normalize=True`` divides it out
    - dempster drops them and renormalizes
    - pcr5 gives m1(X)²m2(Y)/(m1(X)+m2(Y)) back to X and m2(Y)²m1(X)/(m1(X)+m2(Y)) to Y
    - dsmh2 moves them to X ∪ Y, or to the total ignorance if that is empty too
    """
    return fuse_with_conflict(m1, m2, rule, normalize=normalize)[0]


def fuse_with_conflict(
    m1: Bba, m2: Bba, rule: FusionRule | str, *, normalize: bool = False
) -> tuple[Bba, float]:
    """Like :func:`fuse`, also returning the mass the conjunctive step put on ∅."""
    rule = FusionRule(rule)
    if m1.model != m2.model:
        raise ModelError("Cannot fuse bbas over different frames or models")
    if m1.conflict or m2.conflict:
        raise InvalidBbaError("Fusion inputs must not carry conflict mass")
    model = m1.model

    parts: defaultdict[Element, list[float]] = defaultdict(list)
    conflict: list[float] = []
    for x, mx in m1.items():
        for y, my in m2.items():
            z = x & y
            if not z.is_empty:
                parts[z].append(mx * my)
                continue
            conflict.append(mx * my)
            if rule is FusionRule.PCR5:
                denominator = mx + my
                if denominator > 0.0:
                    parts[x].append(mx * mx * my / denominator)
                    parts[y].append(my * my * mx / denominator)
            elif rule is FusionRule.DSMH2:
                target = x | y
                parts[target if not target.is_empty else total_element(model)].append(mx * my)

    masses = {z: math.fsum(contributions) for z, contributions in parts.items()}
    conflict_mass = math.fsum(conflict)

    if rule is FusionRule.DSMC:
        result = Bba(model, masses, conflict=conflict_mass)
        if normalize:
            return result.normalized(), conflict_mass
        if conflict_mass > 0.0:
            logger.warning(f"DSmC output carries conflict mass {conflict_mass:.6g}")
        return result, conflict_mass

    if rule is FusionRule.DEMPSTER:
        total = math.fsum(masses.values())
        if total <= 0.0:
            raise TotalConflictError("Total conflict between the sources: Dempster's rule is undefined")
        logger.debug(f"Dempster normalization: conflict {conflict_mass:.6g}")
        return Bba(model, {z: m / total for z, m in masses.items()}), conflict_mass

    return Bba(model, masses), conflict_mass


def fusion_conflict(m1: Bba, m2: Bba) -> float:
    """Mass the conjunctive combination of the two sources puts on ∅."""
    return fuse_with_conflict(m1, m2, FusionRule.DSMC)[1]


def _require_shafer(bba: Bba, a: Element) -> None:
    if a.model != bba.model:
        raise ModelError("The conditioning event and the bba use different models")
    if not bba.model.is_shafer:
        raise ModelError("Shafer's conditioning rule needs Shafer's model")
    if a.is_empty:
        raise EmptyConditioningError("Cannot condition on the empty set")
    if bba.pl(a) <= 0.0:
        raise UndefinedConditioningError("Shafer's conditioning is undefined: Pl(a) = 0")


def scr_condition(bba: Bba, a: Element) -> Bba:
    """Shafer's rule: Dempster-combine with the categorical bba on ``a``."""
    _require_shafer(bba, a)
    return fuse(bba, Bba.categorical(a), FusionRule.DEMPSTER)


def conditional_bel_pl(bba: Bba, a: Element, x: Element) -> tuple[float, float]:
    """Closed-form Bel(x|a) and Pl(x|a) under Shafer's conditioning.

    Bel(x|a) is Σ m(Y) over ∅ ≠ Y ∩ a ⊆ x, and Pl(x|a) is Pl(x ∩ a); both over Pl(a).
    """
    _require_shafer(bba, a)
    pl_a = bba.pl(a)
    inside = math.fsum(
        m for y, m in bba.items() if not (y & a).is_empty and (y & a).issubset(x)
    )
    return inside / pl_a, bba.pl(x & a) / pl_a
