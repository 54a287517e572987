"""Edge letters, words over them, and polygon gluing words.

Text syntax: ``term+`` where ``term := label ('^-1')?``; labels are maximal
alphanumeric runs, terms may be separated by whitespace.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import MalformedSurfaceWord, WordSyntaxError


@dataclass(frozen=True, order=True)
class EdgeLetter:
    label: str
    exponent: int = 1

    def __post_init__(self):
        if not self.label or not self.label.isalnum():
            raise ValueError(f"bad edge label {self.label!r}")
        if self.exponent not in (1, -1):
            raise ValueError(f"exponent must be +1 or -1, got {self.exponent}")

    def inverse(self) -> "EdgeLetter":
        return EdgeLetter(self.label, -self.exponent)

    def __str__(self):
        return self.label if self.exponent == 1 else f"{self.label}^-1"


Word = tuple  # tuple[EdgeLetter, ...]


def parse_word(text: str) -> tuple[EdgeLetter, ...]:
    """Parse a (possibly empty) word without any surface validity check."""
    letters = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if not ch.isalnum():
            raise WordSyntaxError(f"unexpected character {ch!r}", i)
        j = i
        while j < n and text[j].isalnum():
            j += 1
        label = text[i:j]
        exponent = 1
        if text.startswith("^", j):
            if not text.startswith("^-1", j):
                raise WordSyntaxError("only '^-1' may follow a label", j)
            exponent = -1
            j += 3
        letters.append(EdgeLetter(label, exponent))
        i = j
    return tuple(letters)


def format_word(letters: Iterable[EdgeLetter]) -> str:
    return " ".join(str(x) for x in letters)


def invert_word(letters: Sequence[EdgeLetter]) -> tuple[EdgeLetter, ...]:
    return tuple(x.inverse() for x in reversed(letters))


def free_reduce(letters: Iterable[EdgeLetter]) -> tuple[EdgeLetter, ...]:
    """Cancel adjacent ``x x^-1`` pairs until none remain."""
    out: list[EdgeLetter] = []
    for x in letters:
        if out and out[-1].label == x.label and out[-1].exponent == -x.exponent:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class GluingWord:
    """Boundary word of a polygon whose sides are glued in pairs.

    Every label must occur exactly twice; this is what makes the quotient a
    closed surface.
    """

    letters: tuple[EdgeLetter, ...]

    def __post_init__(self):
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        if not letters:
            raise MalformedSurfaceWord("empty gluing word")
        counts = Counter(x.label for x in letters)
        bad = sorted(label for label, k in counts.items() if k != 2)
        if bad:
            detail = ", ".join(f"{b} x{counts[b]}" for b in bad)
            raise MalformedSurfaceWord(
                f"every label must occur exactly twice; offending: {detail}")

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __str__(self):
        return format_word(self.letters)

    @property
    def labels(self) -> tuple[str, ...]:
        """Distinct labels in order of first appearance."""
        return tuple(dict.fromkeys(x.label for x in self.letters))

    def rotated(self, k: int) -> "GluingWord":
        k %= len(self.letters)
        return GluingWord(self.letters[k:] + self.letters[:k])

    def inverted(self) -> "GluingWord":
        return GluingWord(invert_word(self.letters))

    def relabeled(self, mapping: dict[str, str]) -> "GluingWord":
        return GluingWord(tuple(EdgeLetter(mapping[x.label], x.exponent) for x in self.letters))


def parse_gluing_word(text: str) -> GluingWord:
    letters = parse_word(text)
    if not letters:
        raise WordSyntaxError("empty word", 0)
    return GluingWord(letters)
