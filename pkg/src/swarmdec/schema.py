"""Textual reaction schemas and their mapping to rule sets.

A rule set can be written out as one conversion reaction per group
composition, in a chemical-equation style::

    X1+6X2 -> 7X2
    2X1+5X2 -> X1+6X2
    ...

Grammar (one reaction per line; blank lines and lines starting with
'#' are ignored; whitespace between tokens is free)::

    line     := side ARROW side
    side     := term ("+" term)?
    term     := [1-9][0-9]* species | species
    species  := "X1" | "X2"
    ARROW    := "->" | "→"

A bare species means coefficient 1 and an absent species means 0.
Species names are case-sensitive: ``x2`` is rejected.  Serialization
always emits ``->``, ascending X1 count, bare species for coefficient 1
and omitted species for coefficient 0, so one parse/serialize pass
canonicalizes any accepted text.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import RulePolarity, RuleSet

__all__ = [
    "Reaction",
    "ReactionSchema",
    "SchemaError",
    "SchemaSyntaxError",
    "SchemaValidationError",
    "format_schema",
    "parse_polarity_string",
    "parse_schema",
    "reaction_text",
    "ruleset_of_schema",
    "schema_of_ruleset",
]

_ARROW_ASCII = "->"
_ARROW_GLYPH = "→"


class SchemaError(ValueError):
    """Invalid reaction-schema text or structure."""


class SchemaSyntaxError(SchemaError):
    """Malformed schema text; carries the 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class SchemaValidationError(SchemaError):
    """Well-formed text that violates a schema constraint.

    ``reason`` is a stable machine-readable tag: one of ``arity``,
    ``step``, ``composition``, ``duplicate-composition``,
    ``missing-composition``, ``asymmetry``.
    """

    def __init__(self, message: str, reason: str, line: int | None = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.reason = reason
        self.line = line


@dataclass(frozen=True)
class Reaction:
    """One conversion: a group of fixed size in which one agent flips."""

    lhs_x1: int
    lhs_x2: int
    rhs_x1: int
    rhs_x2: int

    def __post_init__(self) -> None:
        if min(self.lhs_x1, self.lhs_x2, self.rhs_x1, self.rhs_x2) < 0:
            raise ValueError("coefficients must be non-negative")
        if self.lhs_x1 + self.lhs_x2 != self.rhs_x1 + self.rhs_x2:
            raise ValueError("group size must be conserved across the arrow")
        if abs(self.rhs_x1 - self.lhs_x1) != 1:
            raise ValueError("exactly one agent must flip per reaction")

    @property
    def group_size(self) -> int:
        return self.lhs_x1 + self.lhs_x2

    @property
    def composition(self) -> int:
        """Number of X1 opinions in the group before the flip."""
        return self.lhs_x1

    @property
    def delta_x1(self) -> int:
        return self.rhs_x1 - self.lhs_x1


def _implied_polarity(reaction: Reaction) -> RulePolarity:
    # Majority rule <=> the minority side shrinks.
    k, g = reaction.lhs_x1, reaction.group_size
    if k in (0, g):
        raise ValueError("uniform groups imply no rule polarity")
    minority_is_x1 = 2 * k < g
    shrinks = reaction.delta_x1 == (-1 if minority_is_x1 else 1)
    return RulePolarity.MAJORITY if shrinks else RulePolarity.MINORITY


@dataclass(frozen=True)
class ReactionSchema:
    """A complete rule listing: one reaction per composition 1..G-1."""

    group_size: int
    reactions: tuple[Reaction, ...]

    def __post_init__(self) -> None:
        g = self.group_size
        if g < 3 or g % 2 == 0:
            raise SchemaValidationError(
                f"group size must be an odd integer >= 3, got {g}", reason="arity"
            )
        for reaction in self.reactions:
            if reaction.group_size != g:
                raise SchemaValidationError(
                    f"reaction at composition {reaction.composition} has group "
                    f"size {reaction.group_size}, expected {g}",
                    reason="arity",
                )
        seen: dict[int, Reaction] = {}
        for reaction in self.reactions:
            k = reaction.composition
            if not 1 <= k <= g - 1:
                raise SchemaValidationError(
                    f"composition {k} admits no conversion (group is uniform)",
                    reason="composition",
                )
            if k in seen:
                raise SchemaValidationError(
                    f"two reactions share composition {k}",
                    reason="duplicate-composition",
                )
            seen[k] = reaction
        if len(seen) != g - 1:
            missing = sorted(set(range(1, g)) - set(seen))
            raise SchemaValidationError(
                f"schema must cover every composition 1..{g - 1}; "
                f"missing {missing}",
                reason="missing-composition",
            )
        for k in range(1, (g + 1) // 2):
            left, right = _implied_polarity(seen[k]), _implied_polarity(seen[g - k])
            if left is not right:
                raise SchemaValidationError(
                    f"compositions {k} and {g - k} imply different polarities "
                    f"({left.value} vs {right.value})",
                    reason="asymmetry",
                )


def _tokenize(line: str, line_no: int) -> list[tuple[str, str, int]]:
    """Split one line into (kind, text, 1-based column) tokens."""
    tokens: list[tuple[str, str, int]] = []
    i = 0
    while i < len(line):
        ch = line[i]
        if ch.isspace():
            i += 1
            continue
        if line.startswith(_ARROW_ASCII, i):
            tokens.append(("arrow", _ARROW_ASCII, i + 1))
            i += 2
            continue
        if ch == _ARROW_GLYPH:
            tokens.append(("arrow", ch, i + 1))
            i += 1
            continue
        if ch == "+":
            tokens.append(("plus", ch, i + 1))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(line) and line[j].isdigit():
                j += 1
            text = line[i:j]
            if text[0] == "0":
                raise SchemaSyntaxError(
                    "coefficient must not start with 0", line_no, i + 1
                )
            tokens.append(("coef", text, i + 1))
            i = j
            continue
        if line.startswith("X1", i) or line.startswith("X2", i):
            tokens.append(("species", line[i : i + 2], i + 1))
            i += 2
            continue
        raise SchemaSyntaxError(f"unexpected character {ch!r}", line_no, i + 1)
    return tokens


class _LineParser:
    def __init__(self, tokens: list[tuple[str, str, int]], line_no: int, width: int):
        self.tokens = tokens
        self.line_no = line_no
        self.pos = 0
        self.end_column = width + 1

    def _fail(self, message: str) -> SchemaSyntaxError:
        column = (
            self.tokens[self.pos][2] if self.pos < len(self.tokens) else self.end_column
        )
        return SchemaSyntaxError(message, self.line_no, column)

    def peek(self) -> str | None:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def take(self, kind: str, what: str) -> tuple[str, str, int]:
        if self.peek() != kind:
            raise self._fail(f"expected {what}")
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def parse_side(self) -> tuple[int, int]:
        counts = {"X1": 0, "X2": 0}
        seen: set[str] = set()
        while True:
            coefficient = 1
            if self.peek() == "coef":
                coefficient = int(self.take("coef", "coefficient")[1])
            _, species, column = self.take("species", "species X1 or X2")
            if species in seen:
                raise SchemaSyntaxError(
                    f"species {species} listed twice on one side",
                    self.line_no,
                    column,
                )
            seen.add(species)
            counts[species] = coefficient
            if self.peek() == "plus":
                self.pos += 1
                continue
            return counts["X1"], counts["X2"]

    def parse_line(self) -> tuple[int, int, int, int]:
        lhs = self.parse_side()
        self.take("arrow", "'->'")
        rhs = self.parse_side()
        if self.pos != len(self.tokens):
            raise self._fail("unexpected trailing input")
        return (*lhs, *rhs)


def parse_schema(text: str) -> ReactionSchema:
    """Parse schema text into a validated :class:`ReactionSchema`.

    The group size is inferred from the first reaction; every later
    line must conserve it.  Raises :class:`SchemaSyntaxError` for
    malformed text and :class:`SchemaValidationError` (with a ``reason``
    tag) for structurally invalid schemas.
    """
    rows: list[tuple[int, int, int, int, int]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = _tokenize(raw, line_no)
        parsed = _LineParser(tokens, line_no, len(raw)).parse_line()
        rows.append((line_no, *parsed))

    if not rows:
        raise SchemaValidationError(
            "schema contains no reactions", reason="missing-composition"
        )

    group_size = rows[0][1] + rows[0][2]
    if group_size < 3 or group_size % 2 == 0:
        raise SchemaValidationError(
            f"group size must be an odd integer >= 3, got {group_size}",
            reason="arity",
            line=rows[0][0],
        )

    reactions: list[Reaction] = []
    compositions: set[int] = set()
    for line_no, l1, l2, r1, r2 in rows:
        if l1 + l2 != group_size or r1 + r2 != group_size:
            raise SchemaValidationError(
                f"coefficients must sum to the group size {group_size} on "
                f"both sides (got {l1 + l2} -> {r1 + r2})",
                reason="arity",
                line=line_no,
            )
        if abs(r1 - l1) != 1:
            raise SchemaValidationError(
                f"exactly one agent must flip per reaction (X1 count changes "
                f"by {r1 - l1})",
                reason="step",
                line=line_no,
            )
        if l1 in (0, group_size):
            raise SchemaValidationError(
                f"composition {l1} admits no conversion (group is uniform)",
                reason="composition",
                line=line_no,
            )
        if l1 in compositions:
            raise SchemaValidationError(
                f"two reactions share composition {l1}",
                reason="duplicate-composition",
                line=line_no,
            )
        compositions.add(l1)
        reactions.append(Reaction(l1, l2, r1, r2))

    if len(reactions) != group_size - 1:
        missing = sorted(set(range(1, group_size)) - compositions)
        raise SchemaValidationError(
            f"schema must cover every composition 1..{group_size - 1}; "
            f"missing {missing}",
            reason="missing-composition",
        )

    by_composition = {r.composition: r for r in reactions}
    for k in range(1, (group_size + 1) // 2):
        left = _implied_polarity(by_composition[k])
        right = _implied_polarity(by_composition[group_size - k])
        if left is not right:
            raise SchemaValidationError(
                f"compositions {k} and {group_size - k} imply different "
                f"polarities ({left.value} vs {right.value})",
                reason="asymmetry",
            )

    return ReactionSchema(group_size, tuple(reactions))


def ruleset_of_schema(schema: ReactionSchema) -> RuleSet:
    """Extract the polarity assignment of a validated schema."""
    by_composition = {r.composition: r for r in schema.reactions}
    g = schema.group_size
    polarities = tuple(
        _implied_polarity(by_composition[m]) for m in range(1, (g - 1) // 2 + 1)
    )
    return RuleSet(g, polarities)


def schema_of_ruleset(rules: RuleSet) -> ReactionSchema:
    """The canonical reaction listing of a rule set, ascending X1 count."""
    g = rules.group_size
    reactions = []
    for k in range(1, g):
        delta = rules.signed_weight(k)
        reactions.append(Reaction(k, g - k, k + delta, g - k - delta))
    return ReactionSchema(g, tuple(reactions))


def _format_side(c1: int, c2: int) -> str:
    terms = []
    if c1 > 0:
        terms.append("X1" if c1 == 1 else f"{c1}X1")
    if c2 > 0:
        terms.append("X2" if c2 == 1 else f"{c2}X2")
    return "+".join(terms)


def reaction_text(reaction: Reaction) -> str:
    """Canonical single-line rendering of one reaction."""
    lhs = _format_side(reaction.lhs_x1, reaction.lhs_x2)
    rhs = _format_side(reaction.rhs_x1, reaction.rhs_x2)
    return f"{lhs} -> {rhs}"


def format_schema(schema: ReactionSchema) -> str:
    """Canonical multi-line rendering, one reaction per composition."""
    ordered = sorted(schema.reactions, key=lambda r: r.composition)
    return "\n".join(reaction_text(r) for r in ordered) + "\n"


def parse_polarity_string(s: str, group_size: int) -> RuleSet:
    """Rule set encoded as one 'M'/'m' per minority count, e.g. ``MMm``."""
    if group_size < 3 or group_size % 2 == 0:
        raise ValueError(
            f"group size must be an odd integer >= 3, got {group_size}"
        )
    expected = (group_size - 1) // 2
    if len(s) != expected:
        raise ValueError(
            f"polarity string for group size {group_size} must have length "
            f"{expected}, got {len(s)}"
        )
    polarities = []
    for i, ch in enumerate(s):
        if ch == "M":
            polarities.append(RulePolarity.MAJORITY)
        elif ch == "m":
            polarities.append(RulePolarity.MINORITY)
        else:
            raise ValueError(
                f"invalid polarity character {ch!r} at position {i}; "
                "expected 'M' or 'm'"
            )
    return RuleSet(group_size, tuple(polarities))
