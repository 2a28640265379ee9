"""Free-group words: alphabets, freely reduced words, products, homomorphisms.

Letters are ``(index, sign)`` pairs with ``sign in (1, -1)``; the identity is
the empty word.  Words are reduced on construction, so ``len(w)`` is always
the word-metric distance from the identity.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

Letter = tuple[int, int]

__all__ = [
    "Alphabet",
    "ReducedWord",
    "GeneratorMap",
    "WordError",
    "reduce",
    "multiply",
    "invert",
    "apply_map",
    "parse_word",
]


class WordError(ValueError):
    """Invalid letter, token, or alphabet mismatch."""


@dataclass(frozen=True)
class Alphabet:
    name: str
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) < 1:
            raise WordError("alphabet rank must be >= 1")
        if len(set(self.labels)) != len(self.labels):
            raise WordError(f"duplicate labels in alphabet {self.name!r}")

    @classmethod
    def standard(cls, name: str, rank: int, prefix: str | None = None) -> "Alphabet":
        """Alphabet ``prefix1 .. prefix<rank>``; prefix defaults to ``name``."""
        prefix = name if prefix is None else prefix
        if rank < 1:
            raise WordError("alphabet rank must be >= 1")
        return cls(name, tuple(f"{prefix}{i + 1}" for i in range(rank)))

    @property
    def rank(self) -> int:
        return len(self.labels)

    def signed_letters(self) -> list[Letter]:
        """All ``2 * rank`` letters in canonical order (a1, a1^-1, a2, ...)."""
        return [(i, s) for i in range(self.rank) for s in (1, -1)]


def _check_letters(letters: Iterable[Letter], alphabet: Alphabet) -> list[Letter]:
    out = []
    for i, s in letters:
        if not (0 <= i < alphabet.rank) or s not in (1, -1):
            raise WordError(f"invalid letter ({i}, {s}) for alphabet {alphabet.name!r}")
        out.append((i, s))
    return out


def _push(stack: list[Letter], letters: Iterable[Letter]) -> list[Letter]:
    # single stack pass: a letter cancels the top iff it is its inverse
    for i, s in letters:
        if stack and stack[-1] == (i, -s):
            stack.pop()
        else:
            stack.append((i, s))
    return stack


class ReducedWord:
    """A freely reduced word over an :class:`Alphabet`.

    Construct through :func:`reduce`, :func:`parse_word` or the group
    operations; the constructor trusts that ``letters`` is already reduced.
    """

    __slots__ = ("alphabet", "letters")

    def __init__(self, alphabet: Alphabet, letters: Sequence[Letter] = ()):
        self.alphabet = alphabet
        self.letters = tuple(letters)

    @classmethod
    def identity(cls, alphabet: Alphabet) -> "ReducedWord":
        return cls(alphabet, ())

    def __len__(self) -> int:
        return len(self.letters)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ReducedWord):
            return NotImplemented
        return self.alphabet == other.alphabet and self.letters == other.letters

    def __hash__(self) -> int:
        return hash((self.alphabet, self.letters))

    def __mul__(self, other: "ReducedWord") -> "ReducedWord":
        return multiply(self, other)

    def __invert__(self) -> "ReducedWord":
        return invert(self)

    def is_identity(self) -> bool:
        return not self.letters

    def to_literal(self) -> str:
        labels = self.alphabet.labels
        return " ".join(labels[i] if s == 1 else f"{labels[i]}^-1" for i, s in self.letters)

    def __repr__(self) -> str:
        return f"ReducedWord({self.to_literal() or '1'!r})"

    __str__ = to_literal


def reduce(raw: Iterable[Letter], alphabet: Alphabet) -> ReducedWord:
    """Freely reduce a sequence of signed letters."""
    return ReducedWord(alphabet, _push([], _check_letters(raw, alphabet)))


def _same_alphabet(u: ReducedWord, v: ReducedWord) -> None:
    if u.alphabet != v.alphabet:
        raise WordError(f"alphabet mismatch: {u.alphabet.name!r} vs {v.alphabet.name!r}")


def multiply(u: ReducedWord, v: ReducedWord) -> ReducedWord:
    _same_alphabet(u, v)
    # only the junction can cancel
    return ReducedWord(u.alphabet, _push(list(u.letters), v.letters))


def invert(w: ReducedWord) -> ReducedWord:
    return ReducedWord(w.alphabet, tuple((i, -s) for i, s in reversed(w.letters)))


@dataclass(frozen=True)
class GeneratorMap:
    """Homomorphism between free groups given by the images of generators."""

    source: Alphabet
    target: Alphabet
    images: tuple[ReducedWord, ...]

    def __post_init__(self):
        if len(self.images) != self.source.rank:
            raise WordError(
                f"need {self.source.rank} images, got {len(self.images)}"
            )
        for w in self.images:
            if w.alphabet != self.target:
                raise WordError("image word is not over the target alphabet")

    def image_letters(self, letter: Letter) -> tuple[Letter, ...]:
        i, s = letter
        img = self.images[i].letters
        if s == 1:
            return img
        return tuple((j, -t) for j, t in reversed(img))


def apply_map(h: GeneratorMap, w: ReducedWord) -> ReducedWord:
    if w.alphabet != h.source:
        raise WordError(f"word is over {w.alphabet.name!r}, map source is {h.source.name!r}")
    stack: list[Letter] = []
    for letter in w.letters:
        _push(stack, h.image_letters(letter))
    return ReducedWord(h.target, stack)


_TOKEN = re.compile(r"^(?P<label>[^\s^]+)(?:\^(?P<exp>-?\d+))?$")


def parse_word(text: str, alphabet: Alphabet) -> ReducedWord:
    """Parse the literal syntax ``"a1 a2^-1 b3"``; empty text is the identity.

    ``^k`` with any integer ``k`` is accepted as shorthand for ``k`` copies.
    """
    index = {label: i for i, label in enumerate(alphabet.labels)}
    raw: list[Letter] = []
    for tok in text.split():
        if tok == "1":
            continue
        m = _TOKEN.match(tok)
        if m is None or m.group("label") not in index:
            raise WordError(f"unknown token {tok!r} for alphabet {alphabet.name!r}")
        i = index[m.group("label")]
        exp = int(m.group("exp") or 1)
        raw.extend([(i, 1 if exp > 0 else -1)] * abs(exp))
    return reduce(raw, alphabet)
