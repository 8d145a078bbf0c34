"""Free associative algebra on subset generators.

Words are tuples of letter indices.  An :class:`Alphabet` fixes the meaning of
the indices; letters are numbered so that a larger index is a larger
generator, which makes the degree-lexicographic word order a plain comparison
of ``(len(w), w)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .linalg import QQ

Word = tuple


@dataclass(frozen=True)
class SubsetGen:
    """The generator r_A for a nonempty A in {1..n}, stored as a bitmask."""

    mask: int
    n: int

    def __post_init__(self):
        if self.mask <= 0:
            raise ValueError("generator subset must be nonempty")
        if self.mask >> self.n:
            raise ValueError(f"subset {self.mask:b} not contained in 1..{self.n}")

    @classmethod
    def of(cls, elements: Iterable[int], n: int) -> SubsetGen:
        mask = 0
        for e in elements:
            if not 1 <= e <= n:
                raise ValueError(f"element {e} outside 1..{n}")
            mask |= 1 << (e - 1)
        return cls(mask, n)

    @property
    def elements(self) -> tuple[int, ...]:
        return mask_elements(self.mask)

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    @property
    def label(self) -> str:
        return subset_label(self.mask)

    def __lt__(self, other):
        return cmp_generators(self, other) < 0

    def __le__(self, other):
        return cmp_generators(self, other) <= 0

    def __gt__(self, other):
        return cmp_generators(self, other) > 0

    def __ge__(self, other):
        return cmp_generators(self, other) >= 0

    def __str__(self):
        return self.label


def mask_elements(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def subset_label(mask: int, prefix: str = "r") -> str:
    return prefix + "{" + ",".join(map(str, mask_elements(mask))) + "}"


def cmp_generators(a: SubsetGen, b: SubsetGen) -> int:
    """Three-way comparison of generators.

    Smaller subsets come first; among equal sizes, the first differing sorted
    element decides and the subset holding the LARGER element is smaller.
    """
    if a.n != b.n:
        raise ValueError("generators from different ambient sets")
    if a.size != b.size:
        return -1 if a.size < b.size else 1
    for x, y in zip(a.elements, b.elements):
        if x != y:
            return -1 if x > y else 1
    return 0


def cmp_words(u: Sequence, v: Sequence) -> int:
    """Degree-lexicographic comparison; letters compare by their own order."""
    if len(u) != len(v):
        return -1 if len(u) < len(v) else 1
    for x, y in zip(u, v):
        if x != y:
            return -1 if x < y else 1
    return 0


def word_key(w: Word):
    return (len(w), w)


class Alphabet:
    """Display names (and weights) of the letters 0..size-1."""

    def __init__(self, labels: Sequence[str], weights: Sequence[int] | None = None):
        self.labels = [_canon_label(s) for s in labels]
        self.weights = list(weights) if weights is not None else [1] * len(labels)
        self._index = {s: i for i, s in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            raise ValueError("duplicate generator labels")

    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self):
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[_canon_label(label)]
        except KeyError:
            raise ValueError(f"unknown generator {label!r}") from None

    def word_weight(self, w: Word) -> int:
        return sum(self.weights[x] for x in w)

    def render_word(self, w: Word) -> str:
        return "*".join(self.labels[x] for x in w) if w else "1"

    def render(self, p: Polynomial) -> str:
        if not p:
            return "0"
        F = p.field
        parts = []
        for w, c in p.terms():
            c = F.display(c)
            neg = c < 0
            a = -c if neg else c
            if not w:
                body = str(a)
            elif a == 1:
                body = self.render_word(w)
            else:
                body = f"{a}*{self.render_word(w)}"
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append(("- " if neg else "+ ") + body)
        return " ".join(parts)

    def parse(self, text: str, field=QQ) -> Polynomial:
        return _Parser(self, text, field).polynomial()

    def parse_word(self, text: str) -> Word:
        text = text.strip()
        if text == "1":
            return ()
        return tuple(self.index(tok) for tok in text.split("*"))

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.labels == other.labels

    def __hash__(self):
        return hash(tuple(self.labels))

    def __repr__(self):
        return f"Alphabet({self.labels!r})"


class SubsetAlphabet(Alphabet):
    """All nonempty subsets of {1..n}, indexed in ascending generator order."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be at least 1")
        self.n = n
        self.gens = sorted(SubsetGen(m, n) for m in range(1, 1 << n))
        super().__init__([g.label for g in self.gens], [g.size for g in self.gens])
        self._by_mask = {g.mask: i for i, g in enumerate(self.gens)}

    def letter(self, subset) -> int:
        """Letter index of r_A; accepts a bitmask, a SubsetGen or an iterable of elements."""
        if isinstance(subset, SubsetGen):
            mask = subset.mask
        elif isinstance(subset, int):
            mask = subset
        else:
            mask = SubsetGen.of(subset, self.n).mask
        return self._by_mask[mask]

    def mask(self, letter: int) -> int:
        return self.gens[letter].mask

    @cached_property
    def masks(self) -> list[int]:
        return [g.mask for g in self.gens]


_LABEL_RE = re.compile(r"\{\s*([^}]*)\}")


def _canon_label(s: str) -> str:
    s = s.strip()
    return _LABEL_RE.sub(lambda m: "{" + ",".join(x.strip() for x in m.group(1).split(",") if x.strip()) + "}", s)


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<gen>[A-Za-z_][A-Za-z0-9_]*(?:\{[0-9,\s]*\})?)|(?P<op>[+\-*]))")


class _Parser:
    def __init__(self, alphabet: Alphabet, text: str, field):
        self.alphabet = alphabet
        self.field = field
        self.tokens = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse polynomial at {text[pos:]!r}")
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind)))
            pos = m.end()
            while pos < len(text) and text[pos].isspace():
                pos += 1
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def polynomial(self) -> Polynomial:
        F = self.field
        terms: dict = {}
        if self.peek() == ("num", "0") and len(self.tokens) == 1:
            return Polynomial.zero(F)
        first = True
        while self.i < len(self.tokens) or first:
            sign = 1
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                sign = -1 if val == "-" else 1
            elif not first:
                raise ValueError(f"expected + or - before {val!r}")
            coeff, word = self.term()
            terms[word] = terms.get(word, 0) + sign * coeff
            first = False
        return Polynomial(terms, F)

    def term(self):
        coeff = 1
        word = []
        while True:
            kind, val = self.take()
            if kind == "num":
                coeff = coeff * self.field.convert(val)
            elif kind == "gen":
                word.append(self.alphabet.index(val))
            else:
                raise ValueError(f"unexpected token {val!r}")
            if self.peek() == ("op", "*"):
                self.take()
                continue
            return coeff, tuple(word)


class Polynomial:
    """Exact linear combination of words, kept merged with no zero coefficients."""

    __slots__ = ("_terms", "field")

    def __init__(self, terms=(), field=QQ):
        F = field
        items = terms.items() if isinstance(terms, Mapping) else terms
        data: dict = {}
        for w, c in items:
            w = tuple(w)
            data[w] = data.get(w, 0) + F.convert(c)
        self._terms = {w: c for w, c in ((w, F.reduce(c)) for w, c in data.items()) if c}
        self.field = field

    @classmethod
    def _raw(cls, data: dict, field) -> Polynomial:
        p = object.__new__(cls)
        p._terms = data
        p.field = field
        return p

    @classmethod
    def zero(cls, field=QQ) -> Polynomial:
        return cls._raw({}, field)

    @classmethod
    def monomial(cls, word: Word, coeff=1, field=QQ) -> Polynomial:
        return cls({tuple(word): coeff}, field)

    def terms(self) -> list[tuple[Word, object]]:
        """Terms sorted strictly descending in the word order."""
        return sorted(self._terms.items(), key=lambda t: word_key(t[0]), reverse=True)

    def to_dict(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def words(self):
        return self._terms.keys()

    def coefficient(self, w: Word):
        return self._terms.get(tuple(w), 0)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def leading(self) -> tuple[Word, object]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        w = max(self._terms, key=word_key)
        return w, self._terms[w]

    @property
    def leading_word(self) -> Word:
        return self.leading()[0]

    def degree(self) -> int:
        if not self._terms:
            raise ValueError("zero polynomial has no degree")
        return max(len(w) for w in self._terms)

    def is_homogeneous(self) -> bool:
        return len({len(w) for w in self._terms}) <= 1

    def monic(self) -> Polynomial:
        _, c = self.leading()
        return self.scale(self.field.inv(c))

    def _check(self, other):
        if self.field != other.field:
            raise ValueError("polynomials over different fields")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        F = self.field
        data = dict(self._terms)
        for w, c in other._terms.items():
            x = F.reduce(data.get(w, 0) + c)
            if x:
                data[w] = x
            else:
                data.pop(w, None)
        return Polynomial._raw(data, F)

    def __neg__(self):
        F = self.field
        return Polynomial._raw({w: F.reduce(-c) for w, c in self._terms.items()}, F)

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> Polynomial:
        F = self.field
        c = F.convert(c)
        if not c:
            return Polynomial.zero(F)
        return Polynomial._raw({w: F.reduce(c * a) for w, a in self._terms.items()}, F)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            F = self.field
            data: dict = {}
            for u, a in self._terms.items():
                for v, b in other._terms.items():
                    w = u + v
                    data[w] = data.get(w, 0) + a * b
            return Polynomial._raw({w: c for w, c in ((w, F.reduce(c)) for w, c in data.items()) if c}, F)
        if isinstance(other, tuple):
            return Polynomial._raw({w + other: c for w, c in self._terms.items()}, self.field)
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, tuple):
            return Polynomial._raw({other + w: c for w, c in self._terms.items()}, self.field)
        return self.scale(other)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.field == other.field and self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        body = " + ".join(f"{c}*{w}" for w, c in self.terms()) or "0"
        return f"Polynomial({body})"


def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def poly_scale(c, p: Polynomial) -> Polynomial:
    return p.scale(c)


def leading(p: Polynomial) -> tuple[Word, object]:
    return p.leading()


def weight_top_part(p: Polynomial, alphabet: Alphabet) -> Polynomial:
    """Sub-sum of the terms of maximal weight."""
    if not p:
        raise ValueError("zero polynomial has no top weight part")
    top = max(alphabet.word_weight(w) for w in p.words())
    return Polynomial._raw({w: c for w, c in p.items() if alphabet.word_weight(w) == top}, p.field)
