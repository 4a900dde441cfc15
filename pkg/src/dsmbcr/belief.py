"""Basic belief assignments over D^Θ and their belief/plausibility functionals."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Mapping

from dsmbcr.config import get_settings
from dsmbcr.errors import InvalidBbaError, ModelError, TotalConflictError
from dsmbcr.frame import (
    Element,
    Frame,
    Model,
    atom_element,
    canonical_key,
    enumerate_elements,
    to_formula,
    total_element,
)

logger = logging.getLogger(__name__)


class Bba:
    """Immutable mass assignment m: D^Θ → [0, 1].

    Only focal elements (mass > 0) are stored, in canonical order. ``conflict`` is
    the mass a conjunctive fusion sent to ∅; it is kept as metadata so that ∅ never
    appears as a key, and Σ m + conflict = 1 always holds.
    """

    __slots__ = ("model", "_masses", "conflict")

    def __init__(
        self,
        model: Model,
        masses: Mapping[Element, float],
        *,
        conflict: float = 0.0,
        tolerance: float | None = None,
    ):
        tolerance = get_settings().mass_tolerance if tolerance is None else tolerance
        for element, mass in masses.items():
            if element.model != model:
                raise ModelError(f"{to_formula(element)} does not belong to the bba's model")
            if element.is_empty and mass > 0:
                raise InvalidBbaError("The empty set cannot carry mass; use conflict")
            if mass < 0 or not math.isfinite(mass):
                raise InvalidBbaError(f"Invalid mass {mass!r} on {to_formula(element)}")
        if not 0.0 <= conflict <= 1.0 + tolerance:
            raise InvalidBbaError(f"Invalid conflict mass {conflict!r}")
        mass_total = math.fsum(masses.values())
        total = mass_total + conflict
        if abs(total - 1.0) > tolerance:
            raise InvalidBbaError(f"Masses sum to {total:.12g}, expected 1")

        focal = sorted(
            ((x, m) for x, m in masses.items() if m > 0 and not x.is_empty),
            key=lambda item: canonical_key(item[0]),
        )
        conflict = min(conflict, 1.0)
        if total != 1.0 and mass_total > 0.0:
            scale = (1.0 - conflict) / mass_total
            focal = [(x, m * scale) for x, m in focal]
        self.model = model
        self._masses: dict[Element, float] = dict(focal)
        self.conflict = conflict

    # ── Constructors ──

    @classmethod
    def categorical(cls, x: Element) -> Bba:
        """m(x) = 1."""
        if x.is_empty:
            raise InvalidBbaError("A categorical bba cannot focus on the empty set")
        return cls(x.model, {x: 1.0})

    @classmethod
    def vacuous(cls, model: Model) -> Bba:
        """All mass on the total ignorance θ1 ∪ … ∪ θn."""
        return cls(model, {total_element(model): 1.0})

    # ── Mapping-like access ──

    @property
    def frame(self) -> Frame:
        return self.model.frame

    def __len__(self) -> int:
        return len(self._masses)

    def __iter__(self) -> Iterator[Element]:
        return iter(self._masses)

    def __contains__(self, x: object) -> bool:
        return x in self._masses

    def __repr__(self) -> str:
        body = ", ".join(f"{to_formula(x)}: {m:.6g}" for x, m in self._masses.items())
        suffix = f", conflict={self.conflict:.6g}" if self.conflict else ""
        return f"Bba({{{body}}}{suffix})"

    def items(self) -> list[tuple[Element, float]]:
        return list(self._masses.items())

    def focal_elements(self) -> list[Element]:
        return list(self._masses)

    def as_dict(self) -> dict[str, float]:
        """Canonical formula → mass, in canonical order."""
        return {to_formula(x): m for x, m in self._masses.items()}

    # ── Functionals ──

    def mass_of(self, x: Element) -> float:
        return self._masses.get(x, 0.0)

    def bel(self, x: Element) -> float:
        """Σ m(Y) over nonempty Y ⊆ x."""
        return math.fsum(m for y, m in self._masses.items() if y.issubset(x))

    def pl(self, x: Element) -> float:
        """Σ m(Y) over Y with Y ∩ x ≠ ∅."""
        return math.fsum(m for y, m in self._masses.items() if not (y & x).is_empty)

    def is_bayesian(self) -> bool:
        atoms = {atom_element(self.model, i) for i in range(self.model.n)}
        return all(x in atoms for x in self._masses)

    def bel_pl_table(self) -> list[tuple[Element, float, float]]:
        return [(x, self.bel(x), self.pl(x)) for x in enumerate_elements(self.model)]

    def normalized(self) -> Bba:
        """Divide out the conflict mass (Dempster's normalization)."""
        if not self.conflict:
            return self
        total = math.fsum(self._masses.values())
        if total <= 0.0:
            raise TotalConflictError("Total conflict: nothing left to normalize")
        logger.debug(f"Normalizing out conflict {self.conflict:.6g}")
        return Bba(self.model, {x: m / total for x, m in self._masses.items()})


def l1_distance(a: Bba, b: Bba) -> float:
    """Σ_X |a(X) − b(X)| over the union of both focal sets."""
    if a.model != b.model:
        raise ModelError("Cannot compare bbas over different models")
    support = set(a) | set(b)
    return math.fsum(abs(a.mass_of(x) - b.mass_of(x)) for x in support)
