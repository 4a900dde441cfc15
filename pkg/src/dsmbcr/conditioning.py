"""Belief conditioning rules BCR1–BCR31.

Conditioning on a truth ``a`` splits D^Θ∖{∅} into three parts:

- d1: the nonempty parts of ``a``
- d2: elements built only from atoms outside s(a)
- d3: everything else

Mass already in d1 stays. Every other focal element W hands its mass to d1 in one of
three ways, chosen separately for d2 and d3 by the rule:

- ``u`` (pot): into a common pot, shared at the end over d1 proportionally to the
  prior d1 masses
- ``p`` (selected): split equally over the d1 subsets of W picked by the rule's
  selector, falling back to the pot when W has no d1 subset
- ``s`` (proportional): split over the d1 subsets of W proportionally to their prior
  masses, falling back to the selector split when those all have zero mass
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property, lru_cache

from dsmbcr.belief import Bba
from dsmbcr.errors import EmptyConditioningError, InvalidBbaError, ModelError, UnknownRuleError
from dsmbcr.frame import Element, atoms_of, dsm_cardinal, elements_within, enumerate_elements, to_formula

logger = logging.getLogger(__name__)


class RedistributionMode(StrEnum):
    POT = "u"
    SELECTED = "p"
    PROPORTIONAL = "s"


class Selector(StrEnum):
    LARGEST = "largest"
    SMALLEST = "smallest"
    MEDIAN = "median"
    AVERAGE = "average"
    UNIFORM = "uniform"
    NONE = "none"


@dataclass(frozen=True)
class RuleSpec:
    name: str
    d2_mode: RedistributionMode
    d3_mode: RedistributionMode
    selector: Selector


def _build_registry() -> dict[str, RuleSpec]:
    u, p, s = RedistributionMode.POT, RedistributionMode.SELECTED, RedistributionMode.PROPORTIONAL
    selectors = [Selector.LARGEST, Selector.SMALLEST, Selector.MEDIAN, Selector.AVERAGE, Selector.UNIFORM]
    # (first rule number, d2 mode, d3 mode) for each block of five
    blocks = [(2, u, p), (7, u, s), (12, p, p), (17, s, s), (22, p, s), (27, s, p)]

    rules = {"BCR1": RuleSpec("BCR1", u, u, Selector.NONE)}
    for first, d2_mode, d3_mode in blocks:
        for offset, selector in enumerate(selectors):
            name = f"BCR{first + offset}"
            rules[name] = RuleSpec(name, d2_mode, d3_mode, selector)
    return dict(sorted(rules.items(), key=lambda item: int(item[0][3:])))


RULES: dict[str, RuleSpec] = _build_registry()


def get_rule(name: str) -> RuleSpec:
    rule = RULES.get(name.strip().upper())
    if rule is None:
        raise UnknownRuleError(f"Unknown conditioning rule: {name} (expected BCR1..BCR31)")
    return rule


def rule_table() -> list[tuple[str, str, str, str]]:
    """(name, d2 mode, d3 mode, selector) for every registered rule."""
    return [(r.name, str(r.d2_mode), str(r.d3_mode), str(r.selector)) for r in RULES.values()]


# ── Decomposition ─────────────────────────────────────────────────────


@dataclass(frozen=True)
class Decomposition:
    """D^Θ split against ``a``; d2 and d3 are listed only when first asked for."""

    a: Element
    d1: tuple[Element, ...]
    _candidates: dict[Element, tuple[Element, ...]] = field(
        default_factory=dict, repr=False, compare=False
    )

    def part_of(self, x: Element) -> str:
        """'d1', 'd2' or 'd3'."""
        if x.issubset(self.a):
            return "d1"
        if atoms_of(x) <= self._outside:
            return "d2"
        return "d3"

    @cached_property
    def _outside(self) -> frozenset[int]:
        return frozenset(range(self.a.model.n)) - atoms_of(self.a)

    @cached_property
    def d2(self) -> tuple[Element, ...]:
        return tuple(x for x in enumerate_elements(self.a.model) if self.part_of(x) == "d2")

    @cached_property
    def d3(self) -> tuple[Element, ...]:
        return tuple(x for x in enumerate_elements(self.a.model) if self.part_of(x) == "d3")

    def candidates(self, w: Element) -> tuple[Element, ...]:
        """{X ∈ d1 : X ⊆ w}, memoized per element."""
        found = self._candidates.get(w)
        if found is None:
            found = tuple(x for x in self.d1 if x.issubset(w))
            self._candidates[w] = found
        return found


@lru_cache(maxsize=256)
def _decompose(a: Element) -> Decomposition:
    d1 = elements_within(a)
    logger.debug(f"Decomposed D^Θ against {to_formula(a)}: |d1|={len(d1)}")
    return Decomposition(a, d1)


def decompose(a: Element) -> Decomposition:
    if a.is_empty:
        raise EmptyConditioningError("Cannot condition on the empty set")
    return _decompose(a)


# ── Selectors ─────────────────────────────────────────────────────────


def select(candidates: tuple[Element, ...] | list[Element], selector: Selector) -> list[Element]:
    """Pick the recipients of a split among ``candidates``, kept in input order."""
    if not candidates:
        raise ValueError("Cannot select among no candidates")
    candidates = list(candidates)

    if selector is Selector.UNIFORM:
        return candidates
    if selector is Selector.LARGEST:
        return [x for x in candidates if not any(x != y and x.issubset(y) for y in candidates)]
    if selector is Selector.SMALLEST:
        return [x for x in candidates if not any(x != y and y.issubset(x) for y in candidates)]

    cardinals = [dsm_cardinal(x) for x in candidates]
    if selector is Selector.MEDIAN:
        ranked = sorted(cardinals)
        n = len(ranked)
        if n % 2:
            chosen = {ranked[(n + 1) // 2 - 1]}
        else:
            chosen = {ranked[n // 2 - 1], ranked[n // 2]}
        return [x for x, c in zip(candidates, cardinals) if c in chosen]
    if selector is Selector.AVERAGE:
        # |c - Σc/N| compared as |c·N - Σc| to stay in integers; ties go to the larger c
        n, total = len(cardinals), sum(cardinals)
        best = min(set(cardinals), key=lambda c: (abs(c * n - total), -c))
        return [x for x, c in zip(candidates, cardinals) if c == best]
    raise ValueError(f"Selector {selector} does not pick recipients")


# ── Conditioning ──────────────────────────────────────────────────────


def condition(bba: Bba, a: Element, rule: RuleSpec | str) -> Bba:
    """m(·|a) under the given rule; the result is supported by d1 only."""
    if isinstance(rule, str):
        rule = get_rule(rule)
    if a.model != bba.model:
        raise ModelError("The conditioning event and the bba use different models")
    if bba.conflict:
        raise InvalidBbaError("Conditioning needs a bba without conflict mass; normalize it first")
    decomposition = decompose(a)

    prior = dict(bba.items())
    parts = {w: decomposition.part_of(w) for w in prior}
    mass_in_a = math.fsum(m for x, m in prior.items() if parts[x] == "d1")
    if mass_in_a == 0.0:
        logger.info(f"No prior mass inside {to_formula(a)}; returning the categorical bba")
        return Bba.categorical(a)

    shares: dict[Element, list[float]] = {x: [m] for x, m in prior.items() if parts[x] == "d1"}
    pot: list[float] = []

    def split(mass: float, recipients: list[Element]) -> None:
        part = mass / len(recipients)
        for x in recipients:
            shares.setdefault(x, []).append(part)

    for w, mass in prior.items():
        if parts[w] == "d1":
            continue
        mode = rule.d2_mode if parts[w] == "d2" else rule.d3_mode
        if mode is RedistributionMode.POT:
            pot.append(mass)
            continue

        candidates = decomposition.candidates(w)
        if not candidates:
            logger.debug(f"{to_formula(w)} has no subset inside {to_formula(a)}; mass goes to the pot")
            pot.append(mass)
            continue

        if mode is RedistributionMode.PROPORTIONAL:
            weight = math.fsum(prior.get(x, 0.0) for x in candidates)
            if weight > 0.0:
                for x in candidates:
                    if x in prior:
                        shares[x].append(mass * prior[x] / weight)
                continue
        split(mass, select(candidates, rule.selector))

    if pot:
        pot_mass = math.fsum(pot)
        for x, m in prior.items():
            if parts[x] == "d1":
                shares[x].append(m * pot_mass / mass_in_a)

    return Bba(a.model, {x: math.fsum(contributions) for x, contributions in shares.items()})


def condition_all(bba: Bba, a: Element) -> dict[str, Bba]:
    """Every registered rule applied to the same bba and truth."""
    return {name: condition(bba, a, rule) for name, rule in RULES.items()}
