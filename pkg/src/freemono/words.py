"""Word arithmetic for finitely generated free groups.

A word is a tuple of nonzero ints: the generator x_i is the letter i
(1-based), its inverse is -i.  All public functions return freely reduced
tuples, so words compare and hash structurally.  The ambient rank is not
attached to individual words; pass it explicitly where it matters, or use
a FreeGroup context.

Text syntax (used by the CLI and tests): lowercase a..z denote x1..x26,
uppercase letters their inverses, and "1" (or the empty string) is the
identity.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

Word = tuple  # tuple[int, ...], freely reduced


class WordError(ValueError):
    """Raised for malformed word text or letters outside the ambient rank."""


def reduce(letters: Iterable[int]) -> Word:
    """Freely reduce a letter sequence (single stack pass)."""
    out: list[int] = []
    for a in letters:
        if a == 0:
            raise WordError("0 is not a letter")
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def is_reduced(letters: Sequence[int]) -> bool:
    return all(a != 0 for a in letters) and not any(
        letters[i] == -letters[i + 1] for i in range(len(letters) - 1)
    )


def invert(w: Word) -> Word:
    return tuple(-a for a in reversed(w))


def concat(*parts: Word) -> Word:
    """Product of already-reduced words, reduced."""
    return reduce(itertools.chain.from_iterable(parts))


def conjugate(w: Word, g: Word) -> Word:
    """g * w * g^-1."""
    return concat(g, w, invert(g))


def power(w: Word, k: int) -> Word:
    if k < 0:
        return power(invert(w), -k)
    return concat(*([w] * k)) if k else ()


def substitute(template: Word, images: Sequence[Word]) -> Word:
    """Evaluate template(images): letter i maps to images[i-1].

    Every letter index of the template must be <= len(images).
    """
    k = len(images)
    out: list[int] = []
    for t in template:
        idx = t if t > 0 else -t
        if idx > k:
            raise WordError(f"letter x{idx} out of range for {k} image(s)")
        piece = images[idx - 1] if t > 0 else invert(images[idx - 1])
        for a in piece:
            if out and out[-1] == -a:
                out.pop()
            else:
                out.append(a)
    return tuple(out)


def abelianize(w: Word, rank: int) -> tuple:
    """Exponent-sum vector of length `rank`."""
    v = [0] * rank
    for a in w:
        idx = a if a > 0 else -a
        if idx > rank:
            raise WordError(f"letter x{idx} outside rank {rank}")
        v[idx - 1] += 1 if a > 0 else -1
    return tuple(v)


def cyclic_reduce(w: Word) -> tuple:
    """Split w = conj * core * conj^-1 with core cyclically reduced.

    Returns (core, conj).
    """
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j], w[:i]


def cyclic_core(w: Word) -> Word:
    return cyclic_reduce(w)[0]


def rotations(w: Word) -> Iterator[Word]:
    for i in range(max(1, len(w))):
        yield w[i:] + w[:i]


def cyclic_min(w: Word) -> Word:
    """Lexicographically least rotation of the cyclic core of w.

    Canonical representative of the conjugacy class: two words are
    conjugate iff their cyclic_min forms are equal.
    """
    core = cyclic_core(w)
    return min(rotations(core)) if core else ()


def primitive_root(w: Word) -> Word:
    """The generator of the centralizer of a nontrivial w.

    w = p * c^k * p^-1 with c cyclically reduced and not a proper power;
    the centralizer of w is the cyclic group on p * c * p^-1.
    """
    core, conj = cyclic_reduce(w)
    if not core:
        raise WordError("the identity has no primitive root")
    m = len(core)
    for d in range(1, m + 1):
        if m % d == 0 and core == core[:d] * (m // d):
            return concat(conj, core[:d], invert(conj))
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# text syntax

_ORD_A = ord("a")
_ORD_UA = ord("A")


def parse_word(text: str, rank: int) -> Word:
    s = text.strip()
    if s in ("", "1"):
        return ()
    letters = []
    for ch in s:
        if "a" <= ch <= "z":
            idx, sign = ord(ch) - _ORD_A + 1, 1
        elif "A" <= ch <= "Z":
            idx, sign = ord(ch) - _ORD_UA + 1, -1
        else:
            raise WordError(f"unexpected character {ch!r} in word {text!r}")
        if idx > rank:
            raise WordError(f"letter {ch!r} needs rank >= {idx}, ambient rank is {rank}")
        letters.append(sign * idx)
    return reduce(letters)


def format_word(w: Word) -> str:
    if not w:
        return "1"
    out = []
    for a in w:
        idx = a if a > 0 else -a
        if idx > 26:
            raise WordError(f"letter x{idx} has no single-character name")
        base = _ORD_A if a > 0 else _ORD_UA
        out.append(chr(base + idx - 1))
    return "".join(out)


def random_word(rng: random.Random, rank: int, length: int) -> Word:
    """Uniform freely reduced word of exactly `length` letters."""
    if length == 0:
        return ()
    letters = [s * i for i in range(1, rank + 1) for s in (1, -1)]
    w = [rng.choice(letters)]
    while len(w) < length:
        a = rng.choice(letters)
        if a != -w[-1]:
            w.append(a)
    return tuple(w)


@dataclass(frozen=True)
class FreeGroup:
    """Ambient-rank context shared across the higher-level modules."""

    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise WordError("rank must be >= 1")

    def parse(self, text: str) -> Word:
        return parse_word(text, self.rank)

    def format(self, w: Word) -> str:
        return format_word(w)

    def letters(self) -> tuple:
        """The standard basis as length-1 words."""
        return tuple((i,) for i in range(1, self.rank + 1))

    def validate(self, w: Word) -> Word:
        for a in w:
            if a == 0 or abs(a) > self.rank:
                raise WordError(f"letter {a} outside rank {self.rank}")
        if not is_reduced(w):
            raise WordError(f"word {w} is not freely reduced")
        return tuple(w)

    def abelianize(self, w: Word) -> tuple:
        return abelianize(w, self.rank)
