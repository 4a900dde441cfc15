"""Set-formula parsing and the line-oriented bba document format.

Formulas use ``|`` for union and ``&`` for intersection (``∪``/``∩`` are accepted
too), ``&`` binding tighter, parentheses for grouping and ``0`` for the empty set::

    expr   := term ('|' term)*
    term   := factor ('&' factor)*
    factor := ATOM | '(' expr ')' | '0'

A bba document is UTF-8 text with ``#`` comments::

    frame: A, B, C
    model: hybrid
    empty: A & B
    A | (B & C) : 0.25
    ...
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path

from pydantic import BaseModel, Field

from dsmbcr.belief import Bba
from dsmbcr.config import get_settings
from dsmbcr.errors import (
    BbaFormatError,
    FormulaSyntaxError,
    FrameError,
    ModelError,
    UnknownAtomError,
    ValidationError,
)
from dsmbcr.frame import (
    ATOM_PATTERN,
    Element,
    Frame,
    Model,
    ModelKind,
    atom_element,
    empty_element,
    to_formula,
)

logger = logging.getLogger(__name__)

_OPERATORS = {"|": "OR", "∪": "OR", "&": "AND", "∩": "AND", "(": "LPAREN", ")": "RPAREN"}
_HEADER = re.compile(r"(frame|model|empty)\s*:(.*)", re.IGNORECASE)


# ── Tokens ────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Token:
    kind: str  # ATOM, ZERO, OR, AND, LPAREN, RPAREN, END
    text: str
    offset: int  # byte offset into the UTF-8 encoded formula


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    offset = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            pass
        elif ch in _OPERATORS:
            tokens.append(Token(_OPERATORS[ch], ch, offset))
        elif ch == "0" and not (i + 1 < len(text) and text[i + 1].isalnum()):
            tokens.append(Token("ZERO", ch, offset))
        elif match := ATOM_PATTERN.match(text, i):
            name = match.group()
            tokens.append(Token("ATOM", name, offset))
            i = match.end()
            offset += len(name.encode())
            continue
        else:
            raise FormulaSyntaxError(f"Unexpected character {ch!r}", offset)
        i += 1
        offset += len(ch.encode())
    tokens.append(Token("END", "", offset))
    return tokens


# ── Recursive descent ─────────────────────────────────────────────────


class _FormulaParser:
    """Evaluates the formula straight into a canonical element of ``model``."""

    def __init__(self, model: Model, tokens: list[Token]):
        self.model = model
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect(self, kind: str, what: str) -> Token:
        if self.current.kind != kind:
            raise FormulaSyntaxError(f"Expected {what}", self.current.offset)
        return self.advance()

    def parse(self) -> Element:
        if self.current.kind == "END":
            raise FormulaSyntaxError("Empty formula", self.current.offset)
        result = self.expr()
        if self.current.kind != "END":
            raise FormulaSyntaxError(
                f"Unexpected {self.current.text!r} after expression", self.current.offset
            )
        return result

    def expr(self) -> Element:
        result = self.term()
        while self.current.kind == "OR":
            self.advance()
            result = result | self.term()
        return result

    def term(self) -> Element:
        result = self.factor()
        while self.current.kind == "AND":
            self.advance()
            result = result & self.factor()
        return result

    def factor(self) -> Element:
        token = self.current
        if token.kind == "LPAREN":
            self.advance()
            inner = self.expr()
            self.expect("RPAREN", "')'")
            return inner
        if token.kind == "ZERO":
            self.advance()
            return empty_element(self.model)
        if token.kind == "ATOM":
            self.advance()
            return atom_element(self.model, self.model.frame.index(token.text))
        if token.kind == "END":
            raise FormulaSyntaxError("Unexpected end of formula", token.offset)
        raise FormulaSyntaxError(f"Unexpected {token.text!r}", token.offset)


def parse_formula(model: Model, text: str) -> Element:
    """Parse a set formula into its canonical element under ``model``."""
    return _FormulaParser(model, tokenize(text)).parse()


def parse_constraint(frame: Frame, text: str) -> int:
    """Parse an ``empty:`` declaration, a pure intersection of distinct atoms.

    Returns the atom-set mask of the declared-empty intersection.
    """
    tokens = tokenize(text)[:-1]
    if not tokens:
        raise FormulaSyntaxError("Empty constraint", 0)
    mask = 0
    for k, token in enumerate(tokens):
        expected = "ATOM" if k % 2 == 0 else "AND"
        if token.kind != expected:
            raise ModelError(
                f"Constraint '{text.strip()}' must be an intersection of atoms joined by '&'"
            )
        if token.kind == "ATOM":
            bit = 1 << frame.index(token.text)
            if mask & bit:
                raise ModelError(f"Atom {token.text} repeated in constraint '{text.strip()}'")
            mask |= bit
    if len(tokens) % 2 == 0:
        raise ModelError(f"Constraint '{text.strip()}' ends with '&'")
    if mask.bit_count() < 2:
        raise ModelError(f"Constraint '{text.strip()}' needs at least two atoms")
    return mask


# ── Documents ─────────────────────────────────────────────────────────


class MassLine(BaseModel):
    formula: str
    mass: float = Field(ge=0.0, le=1.0)
    line: int


class ConstraintLine(BaseModel):
    formula: str
    line: int


class BbaDocument(BaseModel):
    """Syntax-level view of a bba document; formulas are still text."""

    frame: list[str]
    model: ModelKind = ModelKind.FREE
    empty: list[ConstraintLine] = []
    masses: list[MassLine] = []


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def _parse_mass(text: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise BbaFormatError(f"Invalid mass '{text}'", line) from None
    if not math.isfinite(value):
        raise BbaFormatError(f"Invalid mass '{text}'", line)
    if value < 0:
        raise BbaFormatError(f"Negative mass {text}", line)
    if value > 1:
        raise BbaFormatError(f"Mass {text} exceeds 1", line)
    return value


def parse_document(text: str) -> BbaDocument:
    """Split a document into header fields and mass lines, checking line syntax."""
    frame: list[str] | None = None
    model: ModelKind | None = None
    empty: list[ConstraintLine] = []
    masses: list[MassLine] = []

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue

        # "model : 0.4" is a mass line for an atom named model, not a header
        header = _HEADER.fullmatch(line)
        if header and _is_number(header.group(2)):
            header = None
        if header and masses:
            raise BbaFormatError("Header lines must precede the mass lines", number)
        if header:
            key, value = header.group(1).lower(), header.group(2).strip()
            if key == "frame":
                if frame is not None:
                    raise BbaFormatError("Duplicate frame declaration", number)
                frame = [name.strip() for name in value.split(",")]
                try:
                    Frame(tuple(frame))
                except FrameError as exc:
                    raise BbaFormatError(str(exc), number) from exc
            elif frame is None:
                raise BbaFormatError("The frame must be declared first", number)
            elif key == "model":
                if model is not None:
                    raise BbaFormatError("Duplicate model declaration", number)
                try:
                    model = ModelKind(value.lower())
                except ValueError:
                    raise BbaFormatError(
                        f"Unknown model '{value}' (expected free, shafer or hybrid)", number
                    ) from None
            else:
                if model is not ModelKind.HYBRID:
                    raise BbaFormatError("'empty' lines need 'model: hybrid' declared before", number)
                empty.append(ConstraintLine(formula=value, line=number))
            continue

        if frame is None:
            raise BbaFormatError("The frame must be declared first", number)
        if ":" not in line:
            raise BbaFormatError(f"Expected '<formula> : <mass>', got '{line}'", number)
        formula, mass_text = line.rsplit(":", 1)
        if not formula.strip():
            raise BbaFormatError("Missing formula", number)
        masses.append(
            MassLine(formula=formula.strip(), mass=_parse_mass(mass_text.strip(), number), line=number)
        )

    if frame is None:
        raise BbaFormatError("Missing frame declaration", 1)
    if not masses:
        raise BbaFormatError("Document has no mass lines", max(1, len(text.splitlines())))
    return BbaDocument(frame=frame, model=model or ModelKind.FREE, empty=empty, masses=masses)


def build_model(doc: BbaDocument) -> Model:
    frame = Frame(tuple(doc.frame))
    if doc.model is not ModelKind.HYBRID:
        return Model(frame, doc.model)
    masks = []
    for constraint in doc.empty:
        try:
            masks.append(parse_constraint(frame, constraint.formula))
        except ValidationError as exc:
            raise BbaFormatError(str(exc), constraint.line) from exc
    return Model(frame, ModelKind.HYBRID, tuple(masks))


def build_bba(doc: BbaDocument, *, tolerance: float | None = None) -> Bba:
    """Resolve formulas, reject duplicates and renormalize inside the tolerance."""
    tolerance = get_settings().mass_tolerance if tolerance is None else tolerance
    model = build_model(doc)

    masses: dict[Element, float] = {}
    seen: dict[Element, int] = {}
    for entry in doc.masses:
        try:
            element = parse_formula(model, entry.formula)
        except (FormulaSyntaxError, UnknownAtomError) as exc:
            raise BbaFormatError(str(exc), entry.line) from exc
        if element in seen:
            raise BbaFormatError(
                f"'{entry.formula}' repeats {to_formula(element)} from line {seen[element]}",
                entry.line,
            )
        seen[element] = entry.line
        if element.is_empty:
            if entry.mass > 0:
                raise BbaFormatError(
                    f"'{entry.formula}' is empty under the {model.kind} model and cannot carry mass",
                    entry.line,
                )
            continue
        if entry.mass > 0:
            masses[element] = entry.mass

    total = math.fsum(masses.values())
    last_line = doc.masses[-1].line
    if abs(total - 1.0) > tolerance:
        raise BbaFormatError(f"Masses sum to {total:.12g}, expected 1", last_line)
    if total != 1.0:
        logger.info(f"Renormalizing masses summing to {total!r}")
        masses = {x: m / total for x, m in masses.items()}
    return Bba(model, masses)


def load_bba(text: str) -> Bba:
    return build_bba(parse_document(text))


def dump_bba(bba: Bba, *, digits: int | None = None) -> str:
    """Serialize in canonical element order; conflict-free bbas only carry masses."""
    digits = get_settings().mass_digits if digits is None else digits
    model = bba.model
    lines = [f"frame: {', '.join(model.frame.atoms)}", f"model: {model.kind}"]
    if model.kind is ModelKind.HYBRID:
        lines += [f"empty: {' & '.join(names)}" for names in model.constraint_names()]
    for element, mass in bba.items():
        lines.append(f"{to_formula(element)} : {mass:.{digits}g}")
    return "\n".join(lines) + "\n"


def read_bba(path: str | Path) -> Bba:
    return load_bba(Path(path).read_text(encoding="utf-8"))


def write_bba(path: str | Path, bba: Bba) -> None:
    Path(path).write_text(dump_bba(bba), encoding="utf-8")

