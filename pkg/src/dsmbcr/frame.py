"""Hyper-power set algebra: frames, DSm models and canonical elements.

A Venn region is identified by the nonempty set of atoms it lies inside (a bit mask
over the frame). A model keeps the regions its constraints allow, and an element of
D^Θ is stored as the upward-closed set of allowed regions it covers, one bit per
allowed region. Union and intersection are then bitwise OR and AND, inclusion is a
mask test and the DSm cardinal is a popcount.
"""

from __future__ import annotations

import logging
import re
from collections.abc import Iterable
from dataclasses import dataclass, field
from enum import StrEnum
from functools import lru_cache
from itertools import combinations

from dsmbcr.config import get_settings
from dsmbcr.errors import EnumerationLimitError, FrameError, ModelError, UnknownAtomError

logger = logging.getLogger(__name__)

ATOM_PATTERN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

MIN_ATOMS = 2


# ── Frame and model ───────────────────────────────────────────────────


@dataclass(frozen=True)
class Frame:
    """Ordered, uniquely named atoms θ1..θn."""

    atoms: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", tuple(self.atoms))
        if len(self.atoms) < MIN_ATOMS:
            raise FrameError(
                f"A frame needs at least {MIN_ATOMS} atoms, got {len(self.atoms)}"
            )
        for name in self.atoms:
            if not isinstance(name, str) or not ATOM_PATTERN.fullmatch(name):
                raise FrameError(f"Invalid atom name: {name!r}")
        if len(set(self.atoms)) != len(self.atoms):
            raise FrameError(f"Duplicate atom names in frame: {', '.join(self.atoms)}")

    @property
    def n(self) -> int:
        return len(self.atoms)

    def index(self, name: str) -> int:
        try:
            return self.atoms.index(name)
        except ValueError:
            raise UnknownAtomError(name) from None

    def names(self, mask: int) -> list[str]:
        """Atom names selected by an atom-set mask, in frame order."""
        return [name for i, name in enumerate(self.atoms) if mask >> i & 1]


class ModelKind(StrEnum):
    FREE = "free"
    SHAFER = "shafer"
    HYBRID = "hybrid"


@dataclass(frozen=True, eq=False)
class Model:
    """A DSm model: the frame plus the atom intersections declared empty.

    ``constraints`` holds atom-set masks S meaning ∩_{i∈S} θi = ∅. A region is
    allowed when it contains no constraint. Two models are equal when they have the
    same frame and the same allowed regions, whatever kind they were declared as.
    """

    frame: Frame
    kind: ModelKind
    constraints: tuple[int, ...] = ()
    regions: tuple[int, ...] = field(init=False)
    _position: dict[int, int] = field(init=False, repr=False)
    _up: tuple[int, ...] = field(init=False, repr=False)
    _down: tuple[int, ...] = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        kind = ModelKind(self.kind)
        n = self.frame.n
        constraints = set(self.constraints)

        if kind is ModelKind.FREE and constraints:
            raise ModelError("A free model declares no empty intersections")
        if kind is ModelKind.SHAFER:
            if constraints:
                raise ModelError("Shafer's model takes no explicit constraints")
            constraints = {(1 << i) | (1 << j) for i, j in combinations(range(n), 2)}
        for mask in constraints:
            if not 0 < mask < 1 << n:
                raise ModelError(f"Constraint mask {mask:#b} is outside the frame")
            if mask.bit_count() < 2:
                raise ModelError(
                    f"Constraint on {' & '.join(self.frame.names(mask))} needs at least two atoms"
                )

        # Ascending size, so every strict superset of a region sits at a higher position.
        regions = tuple(
            sorted(
                (r for r in range(1, 1 << n) if not any(c & r == c for c in constraints)),
                key=lambda r: (r.bit_count(), r),
            )
        )
        position = {r: j for j, r in enumerate(regions)}
        up = []
        down = []
        for r in regions:
            up_bits = down_bits = 0
            for j, other in enumerate(regions):
                if other != r and other & r == r:
                    up_bits |= 1 << j
                elif other != r and other & r == other:
                    down_bits |= 1 << j
            up.append(up_bits)
            down.append(down_bits)

        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "constraints", tuple(sorted(constraints)))
        object.__setattr__(self, "regions", regions)
        object.__setattr__(self, "_position", position)
        object.__setattr__(self, "_up", tuple(up))
        object.__setattr__(self, "_down", tuple(down))
        object.__setattr__(self, "_hash", hash((self.frame, regions)))

    # ── Constructors ──

    @classmethod
    def free(cls, frame: Frame) -> Model:
        return cls(frame, ModelKind.FREE)

    @classmethod
    def shafer(cls, frame: Frame) -> Model:
        return cls(frame, ModelKind.SHAFER)

    @classmethod
    def hybrid(cls, frame: Frame, empty: Iterable[Iterable[str]]) -> Model:
        """Build a hybrid model from groups of atom names declared jointly empty."""
        masks = []
        for group in empty:
            mask = 0
            for name in group:
                mask |= 1 << frame.index(name)
            masks.append(mask)
        return cls(frame, ModelKind.HYBRID, tuple(masks))

    # ── Queries ──

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Model):
            return NotImplemented
        return self.frame == other.frame and self.regions == other.regions

    def __hash__(self) -> int:
        return self._hash

    @property
    def n(self) -> int:
        return self.frame.n

    @property
    def full_bits(self) -> int:
        return (1 << len(self.regions)) - 1

    @property
    def is_shafer(self) -> bool:
        """True when only singleton regions survive, i.e. D^Θ is the power set."""
        return all(r.bit_count() == 1 for r in self.regions)

    def constraint_names(self) -> list[list[str]]:
        return [self.frame.names(mask) for mask in self.constraints]


# ── Elements ──────────────────────────────────────────────────────────


@dataclass(frozen=True, slots=True, eq=False)
class Element:
    """Canonical member of D^Θ: a bit per allowed region it covers."""

    model: Model
    bits: int
    _formula: str | None = field(default=None, init=False, repr=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self.bits == other.bits and self.model == other.model

    def __hash__(self) -> int:
        return hash((self.bits, self.model))

    def __repr__(self) -> str:
        return f"Element({to_formula(self)})"

    def __or__(self, other: Element) -> Element:
        return union(self, other)

    def __and__(self, other: Element) -> Element:
        return intersection(self, other)

    def __le__(self, other: Element) -> bool:
        return is_subset(self, other)

    @property
    def is_empty(self) -> bool:
        return self.bits == 0

    def issubset(self, other: Element) -> bool:
        return is_subset(self, other)


def _check_same_model(a: Element, b: Element) -> None:
    if a.model is not b.model and a.model != b.model:
        raise ModelError("Elements belong to different frames or models")


def is_upward_closed(model: Model, bits: int) -> bool:
    """True when every allowed superset of a covered region is covered too."""
    j = 0
    rest = bits
    while rest:
        if rest & 1 and bits & model._up[j] != model._up[j]:
            return False
        rest >>= 1
        j += 1
    return True


def atom_element(model: Model, i: int) -> Element:
    """Embedding of the generator θi: every allowed region containing atom i."""
    if not 0 <= i < model.n:
        raise UnknownAtomError(f"#{i}")
    bits = 0
    for j, region in enumerate(model.regions):
        if region >> i & 1:
            bits |= 1 << j
    return Element(model, bits)


def atom_by_name(model: Model, name: str) -> Element:
    return atom_element(model, model.frame.index(name))


def empty_element(model: Model) -> Element:
    return Element(model, 0)


def total_element(model: Model) -> Element:
    """θ1 ∪ … ∪ θn, the total ignorance."""
    return Element(model, model.full_bits)


def union(a: Element, b: Element) -> Element:
    _check_same_model(a, b)
    return Element(a.model, a.bits | b.bits)


def intersection(a: Element, b: Element) -> Element:
    _check_same_model(a, b)
    return Element(a.model, a.bits & b.bits)


def is_subset(a: Element, b: Element) -> bool:
    _check_same_model(a, b)
    return a.bits & b.bits == a.bits


def dsm_cardinal(x: Element) -> int:
    """Number of Venn regions composing x under its model."""
    return x.bits.bit_count()


def complement(x: Element) -> Element:
    """Power-set complement; only meaningful when the model is Shafer's."""
    if not x.model.is_shafer:
        raise ModelError("Complement is only defined under Shafer's model")
    return Element(x.model, x.model.full_bits & ~x.bits)


def minimal_regions(x: Element) -> list[int]:
    """Region masks of x with no covered strict subset (the canonical antichain)."""
    down = x.model._down
    return [
        r
        for j, r in enumerate(x.model.regions)
        if x.bits >> j & 1 and not x.bits & down[j]
    ]


def atoms_of(x: Element) -> frozenset[int]:
    """s(x): indices of the atoms appearing in the canonical formula of x."""
    if x.is_empty:
        raise ValueError("s(.) is undefined for the empty element")
    mask = 0
    for region in minimal_regions(x):
        mask |= region
    return frozenset(i for i in range(x.model.n) if mask >> i & 1)


def to_formula(x: Element) -> str:
    """Minimal disjunctive form: union of intersections, ``0`` for ∅."""
    if x._formula is not None:
        return x._formula
    frame = x.model.frame
    terms = sorted(
        (tuple(i for i in range(frame.n) if region >> i & 1) for region in minimal_regions(x)),
        key=lambda t: (len(t), t),
    )
    if not terms:
        text = "0"
    elif len(terms) == 1:
        text = " & ".join(frame.atoms[i] for i in terms[0])
    else:
        parts = []
        for term in terms:
            joined = " & ".join(frame.atoms[i] for i in term)
            parts.append(f"({joined})" if len(term) > 1 else joined)
        text = " | ".join(parts)
    object.__setattr__(x, "_formula", text)
    return text


def canonical_key(x: Element) -> tuple[int, str]:
    """Deterministic output order: DSm cardinal, then serialized formula."""
    return dsm_cardinal(x), to_formula(x)


# ── Enumeration ───────────────────────────────────────────────────────


def _up_sets(model: Model, within: int) -> tuple[Element, ...]:
    """Upward-closed subsets of the (upward-closed) region set ``within``, ∅ included."""
    up = model._up
    positions = [j for j in range(len(model.regions)) if within >> j & 1]
    found: list[int] = []

    # Largest regions first: a region may join only once all its supersets have.
    def walk(k: int, bits: int) -> None:
        if k < 0:
            found.append(bits)
            return
        j = positions[k]
        walk(k - 1, bits)
        if bits & up[j] == up[j]:
            walk(k - 1, bits | 1 << j)

    walk(len(positions) - 1, 0)
    return tuple(sorted((Element(model, bits) for bits in found), key=canonical_key))


def _check_size(model: Model) -> None:
    limit = get_settings().max_atoms
    if model.n > limit:
        raise EnumerationLimitError(
            f"Refusing to enumerate D^Θ for {model.n} atoms (limit {limit})"
        )


@lru_cache(maxsize=32)
def _all_elements(model: Model) -> tuple[Element, ...]:
    elements = _up_sets(model, model.full_bits)
    logger.debug(
        f"Enumerated {len(elements)} elements of D^Θ for {model.kind} model "
        f"over {', '.join(model.frame.atoms)}"
    )
    return elements


def enumerate_elements(model: Model, *, include_empty: bool = False) -> tuple[Element, ...]:
    """Every element of D^Θ exactly once, in canonical order."""
    _check_size(model)
    elements = _all_elements(model)
    if include_empty:
        return elements
    return tuple(x for x in elements if not x.is_empty)


@lru_cache(maxsize=256)
def _elements_within(x: Element) -> tuple[Element, ...]:
    return tuple(y for y in _up_sets(x.model, x.bits) if not y.is_empty)


def elements_within(x: Element) -> tuple[Element, ...]:
    """Nonempty elements of D^Θ included in x, in canonical order.

    Only the regions of x are searched, so a small x stays cheap on frames whose full
    hyper-power set is too large to list.
    """
    _check_size(x.model)
    return _elements_within(x)
