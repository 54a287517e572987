"""Homeomorphism type of the closed surface given by a gluing word."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .complex import euler_characteristic, orientability, word_to_complex
from .errors import InternalInvariantViolation
from .words import EdgeLetter, GluingWord


class Kind(str, Enum):
    ORIENTABLE = "orientable"
    NON_ORIENTABLE = "non-orientable"


@dataclass(frozen=True)
class SurfaceType:
    """Orientable surface of genus ``parameter`` or the connected sum of
    ``parameter >= 1`` projective planes."""

    kind: Kind
    parameter: int

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.parameter < 0 or (self.kind is Kind.NON_ORIENTABLE and self.parameter < 1):
            raise ValueError(f"invalid parameter {self.parameter} for {self.kind.value} surface")

    @classmethod
    def orientable(cls, genus: int) -> "SurfaceType":
        return cls(Kind.ORIENTABLE, genus)

    @classmethod
    def non_orientable(cls, crosscaps: int) -> "SurfaceType":
        return cls(Kind.NON_ORIENTABLE, crosscaps)

    @property
    def is_orientable(self) -> bool:
        return self.kind is Kind.ORIENTABLE

    @property
    def euler_characteristic(self) -> int:
        if self.is_orientable:
            return 2 - 2 * self.parameter
        return 2 - self.parameter

    def __str__(self):
        if self.is_orientable:
            return f"orientable genus={self.parameter}"
        return f"non-orientable crosscaps={self.parameter}"

    @classmethod
    def parse(cls, text: str) -> "SurfaceType":
        kind, _, param = text.strip().partition(" ")
        key, _, value = param.partition("=")
        expected = "genus" if kind == Kind.ORIENTABLE.value else "crosscaps"
        if key != expected:
            raise ValueError(f"cannot parse surface type {text!r}")
        return cls(Kind(kind), int(value))


def classify_surface(w: GluingWord) -> SurfaceType:
    # (orientability, chi) is a complete invariant for closed surfaces
    chi = euler_characteristic(word_to_complex(w))
    if chi > 2:
        raise InternalInvariantViolation(f"Euler characteristic {chi} > 2 for {w}")
    if orientability(w):
        if chi % 2:
            raise InternalInvariantViolation(f"odd Euler characteristic {chi} for orientable {w}")
        t = SurfaceType.orientable((2 - chi) // 2)
    else:
        if chi > 1:
            raise InternalInvariantViolation(f"non-orientable word {w} with chi={chi}")
        t = SurfaceType.non_orientable(2 - chi)
    if t.euler_characteristic != chi:
        raise InternalInvariantViolation(f"{t} does not have chi={chi}")
    return t


def canonical_word(t: SurfaceType) -> GluingWord:
    if t.is_orientable:
        if t.parameter == 0:
            return GluingWord((EdgeLetter("a"), EdgeLetter("a", -1)))
        letters = []
        for i in range(1, t.parameter + 1):
            a, b = f"a{i}", f"b{i}"
            letters += [EdgeLetter(a), EdgeLetter(b), EdgeLetter(a, -1), EdgeLetter(b, -1)]
        return GluingWord(tuple(letters))
    letters = []
    for i in range(1, t.parameter + 1):
        letters += [EdgeLetter(f"c{i}")] * 2
    return GluingWord(tuple(letters))


def homeomorphic(w1: GluingWord, w2: GluingWord) -> bool:
    return classify_surface(w1) == classify_surface(w2)
