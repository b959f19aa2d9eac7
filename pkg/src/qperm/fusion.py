"""The fusion ring R_s of H_N^{s+}: words over Z_s with concatenation/fusion products."""
from __future__ import annotations

from collections import Counter
from functools import lru_cache
from typing import Iterable, Mapping

from .errors import DomainError
from .partitions import ColoredWord

Word = tuple[int, ...]
MAX_DIMENSION_DEPTH = 64


def involute(w: ColoredWord) -> ColoredWord:
    """a_1 ... a_k -> (-a_k) ... (-a_1)."""
    return ColoredWord(w.s, tuple((-a) % w.s for a in reversed(w.letters)))


def fuse(v: ColoredWord, w: ColoredWord) -> ColoredWord:
    """Concatenate, summing the last letter of v with the first letter of w."""
    _same_modulus(v, w)
    if not v.letters or not w.letters:
        raise DomainError("fusion needs two non-empty words")
    s = v.s
    return ColoredWord(s, v.letters[:-1] + ((v.letters[-1] + w.letters[0]) % s,) + w.letters[1:])


def _same_modulus(*words: ColoredWord) -> int:
    mods = {w.s for w in words}
    if len(mods) != 1:
        raise DomainError(f"words over different moduli {sorted(mods)}")
    return mods.pop()


class FusionElement:
    """Integer combination of basis elements x_w of R_s."""

    __slots__ = ("s", "terms")

    def __init__(self, s: int, terms: Mapping[Word, int] | Iterable[tuple[Word, int]] = ()):
        if s < 1:
            raise DomainError(f"modulus must be positive, got {s}")
        self.s = s
        acc: Counter = Counter()
        items = terms.items() if isinstance(terms, Mapping) else terms
        for word, coeff in items:
            word = tuple(int(a) for a in word)
            if any(not 0 <= a < s for a in word):
                raise DomainError(f"word {word} has letters outside Z_{s}")
            acc[word] += int(coeff)
        self.terms = {w: c for w, c in acc.items() if c != 0}

    @classmethod
    def basis(cls, w: ColoredWord) -> "FusionElement":
        return cls(w.s, {w.letters: 1})

    def __eq__(self, other):
        if not isinstance(other, FusionElement):
            return NotImplemented
        return self.s == other.s and self.terms == other.terms

    def __hash__(self):
        return hash((self.s, frozenset(self.terms.items())))

    def __add__(self, other: "FusionElement") -> "FusionElement":
        if self.s != other.s:
            raise DomainError("cannot add elements of different fusion rings")
        return FusionElement(self.s, list(self.terms.items()) + list(other.terms.items()))

    def __mul__(self, other: "FusionElement") -> "FusionElement":
        if self.s != other.s:
            raise DomainError("cannot multiply elements of different fusion rings")
        acc: Counter = Counter()
        for f, a in self.terms.items():
            for g, b in other.terms.items():
                for word, c in _multiply_words(self.s, f, g).items():
                    acc[word] += a * b * c
        return FusionElement(self.s, acc)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for w in sorted(self.terms, key=lambda w: (-len(w), w)):
            c = self.terms[w]
            label = "x_{" + ",".join(map(str, w)) + "}" if w else "x_∅"
            parts.append(label if c == 1 else f"{c}*{label}")
        return " + ".join(parts)

    def to_json(self) -> dict[str, int]:
        return {",".join(map(str, w)): c for w, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))}

    @classmethod
    def from_json(cls, s: int, data: Mapping[str, int]) -> "FusionElement":
        return cls(s, {tuple(int(a) for a in k.split(",")) if k else (): v for k, v in data.items()})


@lru_cache(maxsize=100_000)
def _multiply_words(s: int, f: Word, g: Word) -> Counter:
    out: Counter = Counter()
    for n in range(min(len(f), len(g)) + 1):
        v, z = f[: len(f) - n], f[len(f) - n:]
        zbar = tuple((-a) % s for a in reversed(z))
        if g[:n] != zbar:
            continue
        w = g[n:]
        out[v + w] += 1
        # the fusion term needs a last letter of v and a first letter of w
        if v and w:
            out[v[:-1] + ((v[-1] + w[0]) % s,) + w[1:]] += 1
    return out


def multiply(f: ColoredWord, g: ColoredWord) -> FusionElement:
    """x_f x_g = sum over f = vz, g = z̄w of x_{vw} + x_{v·w}."""
    s = _same_modulus(f, g)
    return FusionElement(s, _multiply_words(s, f.letters, g.letters))


def reduce_letters(f: FusionElement | ColoredWord, s: int) -> FusionElement:
    """Reduce every letter mod s. Not multiplicative; see ``restrict``."""
    if isinstance(f, ColoredWord):
        f = FusionElement.basis(f)
    _check_divisor(f.s, s)
    return FusionElement(s, [(tuple(a % s for a in w), c) for w, c in f.terms.items()])


def _check_divisor(source: int, s: int) -> None:
    if s < 1 or source % s != 0:
        raise DomainError(f"target modulus {s} does not divide {source}")


@lru_cache(maxsize=100_000)
def _restrict_word(source: int, s: int, word: Word) -> FusionElement:
    if not word:
        return FusionElement(s, {(): 1})
    if len(word) == 1:
        a = word[0]
        b = a % s
        # u^(a) becomes u^(0) = x_(0) + x_∅ when a is a nonzero multiple of s
        if a != 0 and b == 0:
            return FusionElement(s, {(0,): 1, (): 1})
        return FusionElement(s, {(b,): 1})
    head, rest = word[:1], word[1:]
    result = _restrict_word(source, s, head) * _restrict_word(source, s, rest)
    for w, c in _multiply_words(source, head, rest).items():
        if w != word:
            result = result + FusionElement(s, [(v, -c * d) for v, d in _restrict_word(source, s, w).terms.items()])
    return result


def restrict(f: FusionElement | ColoredWord, s: int) -> FusionElement:
    """Ring morphism R_{st} -> R_s induced by restricting representations to H_N^{s+}.

    Generators map by reducing the letter mod s, except that a nonzero letter
    divisible by s maps to x_(0) + x_∅; longer words follow by peeling off the
    first letter, as in ``dimension``.
    """
    if isinstance(f, ColoredWord):
        f = FusionElement.basis(f)
    _check_divisor(f.s, s)
    acc: Counter = Counter()
    for w, c in f.terms.items():
        for v, d in _restrict_word(f.s, s, w).terms.items():
            acc[v] += c * d
    return FusionElement(s, acc)


def base_dimension(a: int, N: int) -> int:
    """Dimension of x_(a): N for a != 0, N - 1 for a = 0."""
    return N - 1 if a == 0 else N


@lru_cache(maxsize=None)
def _dimension(s: int, word: Word, N: int) -> int:
    if len(word) > MAX_DIMENSION_DEPTH:
        raise DomainError(f"dimension recursion is capped at words of length {MAX_DIMENSION_DEPTH}")
    if not word:
        return 1
    if len(word) == 1:
        return base_dimension(word[0], N)
    head, rest = word[:1], word[1:]
    product = _multiply_words(s, head, rest)
    if product[word] != 1:
        raise AssertionError(f"x_{head} x_{rest} does not contain x_{word} exactly once")
    total = base_dimension(head[0], N) * _dimension(s, rest, N)
    for w, c in product.items():
        if w != word:
            total -= c * _dimension(s, w, N)
    return total


def dimension(f: ColoredWord | FusionElement, N: int) -> int:
    """Value of the dimension homomorphism R_s -> Z."""
    if N < 4:
        raise DomainError(f"dimension function needs N >= 4, got {N}")
    if isinstance(f, ColoredWord):
        return _dimension(f.s, f.letters, N)
    return sum(c * _dimension(f.s, w, N) for w, c in f.terms.items())
