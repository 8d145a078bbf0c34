"""Degree-truncated noncommutative Buchberger completion.

Rules are monic polynomials; a rule rewrites its leading word to minus its
tail.  Completion works degree by degree, which is exact for homogeneous
ideals: once degree ``d`` is processed, nothing found later can change the
rules of degree <= d.
"""

from __future__ import annotations

import heapq
import os
import random
import tempfile
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .freealg import Alphabet, Polynomial, Word, word_key
from .linalg import QQ, parse_field


class TruncationError(RuntimeError):
    """A computation needs rules beyond the degree a system was completed to."""


@dataclass(frozen=True)
class Overlap:
    """Occurrence of w2 starting at ``offset`` inside w1, or straddling its end."""

    offset: int
    kind: str  # "overlap" or "contain"


@dataclass(frozen=True)
class RewriteStep:
    coeff: object
    left: Word
    rule: int
    right: Word


class RewriteSystem:
    def __init__(self, rules: Iterable[Polynomial] = (), max_degree: int | None = None, field=QQ):
        self.field = field
        self.max_degree = max_degree
        self.rules: list[Polynomial] = []
        self.leading_index: dict[Word, int] = {}
        self._replacement: list[list[tuple[Word, object]]] = []
        self._by_first: dict[int, list[int]] = {}
        self._cache: dict[int, dict] = defaultdict(dict)
        for r in rules:
            self.add_rule(r)

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def leading_words(self) -> list[Word]:
        return [r.leading_word for r in self.rules]

    def add_rule(self, p: Polynomial) -> int:
        if p.field != self.field:
            raise ValueError("rule over a different field")
        lw, c = p.leading()
        if c != 1:
            raise ValueError("rules must be monic")
        if lw in self.leading_index:
            raise ValueError(f"duplicate leading word {lw}")
        idx = len(self.rules)
        self.rules.append(p)
        self.leading_index[lw] = idx
        F = self.field
        self._replacement.append([(w, F.reduce(-a)) for w, a in p.items() if w != lw])
        lengths = self._by_first.setdefault(lw[0], [])
        if len(lw) not in lengths:
            lengths.append(len(lw))
            lengths.sort()
        for d in [d for d in self._cache if d >= len(lw)]:
            del self._cache[d]
        return idx

    def _replace_rule(self, idx: int, p: Polynomial):
        lw = p.leading_word
        if self.rules[idx].leading_word != lw:
            raise ValueError("replacement must keep the leading word")
        self.rules[idx] = p
        F = self.field
        self._replacement[idx] = [(w, F.reduce(-a)) for w, a in p.items() if w != lw]
        for d in [d for d in self._cache if d >= len(lw)]:
            del self._cache[d]

    def find_site(self, w: Word, start: int = 0):
        """Leftmost (position, rule index) at which a leading word occurs in w."""
        index = self.leading_index
        by_first = self._by_first
        n = len(w)
        for i in range(start, n):
            lengths = by_first.get(w[i])
            if lengths:
                for L in lengths:
                    if i + L > n:
                        break
                    r = index.get(w[i:i + L])
                    if r is not None:
                        return i, r
        return None

    def all_sites(self, w: Word) -> list[tuple[int, int]]:
        sites = []
        for i in range(len(w)):
            for L in self._by_first.get(w[i], ()):
                r = self.leading_index.get(w[i:i + L])
                if r is not None:
                    sites.append((i, r))
        return sites

    def is_normal(self, w: Word) -> bool:
        return self.find_site(w) is None

    def word_normal_form(self, w: Word) -> dict:
        """Normal form of a single word as a dict (memoized, iterative)."""
        cache = self._cache
        hit = cache[len(w)].get(w)
        if hit is not None:
            return hit
        F = self.field
        stack = [w]
        while stack:
            x = stack[-1]
            bucket = cache[len(x)]
            if x in bucket:
                stack.pop()
                continue
            site = self.find_site(x)
            if site is None:
                bucket[x] = {x: 1}
                stack.pop()
                continue
            i, r = site
            L = len(self.rules[r].leading_word)
            u, v = x[:i], x[i + L:]
            children = [(u + t + v, a) for t, a in self._replacement[r]]
            missing = [y for y, _ in children if y not in cache[len(y)]]
            if missing:
                stack.extend(missing)
                continue
            res: dict = {}
            for y, a in children:
                for z, b in cache[len(y)][y].items():
                    res[z] = res.get(z, 0) + a * b
            bucket[x] = {z: c for z, c in ((z, F.reduce(c)) for z, c in res.items()) if c}
            stack.pop()
        return cache[len(w)][w]

    def normal_form(self, p: Polynomial) -> Polynomial:
        F = self.field
        out: dict = {}
        for w, c in p.items():
            for z, b in self.word_normal_form(w).items():
                out[z] = out.get(z, 0) + c * b
        return Polynomial._raw({z: c for z, c in ((z, F.reduce(c)) for z, c in out.items()) if c}, F)

    def clear_cache(self):
        self._cache.clear()

    def sorted(self) -> RewriteSystem:
        rs = RewriteSystem(field=self.field, max_degree=self.max_degree)
        for r in sorted(self.rules, key=lambda p: word_key(p.leading_word)):
            rs.add_rule(r)
        return rs


def normal_form(p: Polynomial, rs: RewriteSystem) -> Polynomial:
    return rs.normal_form(p)


def reduce_with_trace(p: Polynomial, rs: RewriteSystem, rng: random.Random | None = None):
    """Reduce p step by step, always rewriting the largest reducible word.

    The site is the leftmost occurrence unless ``rng`` is given, in which case
    a random occurrence is used.  Returns ``(normal form, trace)`` where
    ``p - nf == sum(c * left * rules[i] * right)`` over the trace.
    """
    F = rs.field
    coeffs = dict(p.items())
    heap = [(-len(w), tuple(-x for x in w), w) for w in coeffs]
    heapq.heapify(heap)
    out = {}
    trace = []
    while heap:
        _, _, w = heapq.heappop(heap)
        c = coeffs.pop(w, 0)
        if not c:
            continue
        if rng is None:
            site = rs.find_site(w)
        else:
            sites = rs.all_sites(w)
            site = rng.choice(sites) if sites else None
        if site is None:
            out[w] = c
            continue
        i, r = site
        L = len(rs.rules[r].leading_word)
        u, v = w[:i], w[i + L:]
        trace.append(RewriteStep(c, u, r, v))
        for t, a in rs._replacement[r]:
            y = u + t + v
            if y not in coeffs:
                heapq.heappush(heap, (-len(y), tuple(-x for x in y), y))
            x = F.reduce(coeffs.get(y, 0) + c * a)
            coeffs[y] = x
    return Polynomial(out, F), trace


def overlaps(w1: Word, w2: Word) -> list[Overlap]:
    """Proper suffix/prefix overlaps of w1 with w2 and occurrences of w2 inside w1."""
    if not w1 or not w2:
        raise ValueError("overlaps need nonempty words")
    n1, n2 = len(w1), len(w2)
    out = []
    for off in range(n1):
        if off + n2 <= n1:
            if w1[off:off + n2] == w2 and not (off == 0 and n1 == n2):
                out.append(Overlap(off, "contain"))
        elif off > 0 and w1[off:] == w2[:n1 - off]:
            out.append(Overlap(off, "overlap"))
    return out


def s_polynomial(f: Polynomial, g: Polynomial, ov: Overlap) -> Polynomial:
    w1, w2 = f.leading_word, g.leading_word
    if f.leading()[1] != 1 or g.leading()[1] != 1:
        raise ValueError("s-polynomials need monic inputs")
    if ov not in overlaps(w1, w2):
        raise ValueError(f"{ov} is not an overlap of the leading words")
    k = ov.offset
    if ov.kind == "contain":
        return f - (w1[:k] * g * w1[k + len(w2):])
    return f * w2[len(w1) - k:] - w1[:k] * g


def _check_homogeneous(relations):
    for p in relations:
        if not p.is_homogeneous():
            raise ValueError("completion requires homogeneous relations")


def complete(relations: Sequence[Polynomial], max_degree: int, field=None) -> RewriteSystem:
    """Reduced Groebner basis of the two-sided ideal, truncated at ``max_degree``."""
    relations = [p for p in relations if p]
    if field is None:
        field = relations[0].field if relations else QQ
    _check_homogeneous(relations)
    pending = defaultdict(list)
    for p in relations:
        pending[p.degree()].append(p)
    if pending and max_degree < max(pending):
        raise ValueError("max_degree below the degree of an input relation")
    rs = RewriteSystem(field=field, max_degree=max_degree)
    prefixes: dict[Word, list[int]] = defaultdict(list)
    for d in range(1, max_degree + 1):
        candidates = list(pending.get(d, ()))
        candidates.extend(_degree_spolys(rs, prefixes, d))
        start = len(rs.rules)
        for p in candidates:
            q = rs.normal_form(p)
            if q:
                rs.add_rule(q.monic())
        new = sorted(range(start, len(rs.rules)), key=lambda i: word_key(rs.rules[i].leading_word))
        for i in new:
            r = rs.rules[i]
            lw = r.leading_word
            tail = Polynomial._raw({w: c for w, c in r.items() if w != lw}, field)
            reduced = Polynomial.monomial(lw, 1, field) + rs.normal_form(tail)
            if reduced != r:
                rs._replace_rule(i, reduced)
        for i in range(start, len(rs.rules)):
            lw = rs.rules[i].leading_word
            for k in range(1, len(lw)):
                prefixes[lw[:k]].append(i)
    return rs.sorted()


def _degree_spolys(rs: RewriteSystem, prefixes, d: int) -> Iterator[Polynomial]:
    """s-polynomials of all overlaps whose overlap word has length d."""
    for i, f in enumerate(rs.rules):
        w1 = f.leading_word
        for k in range(1, len(w1)):
            suffix = w1[len(w1) - k:]
            for j in prefixes.get(suffix, ()):
                w2 = rs.rules[j].leading_word
                if len(w1) + len(w2) - k == d:
                    yield s_polynomial(f, rs.rules[j], Overlap(len(w1) - k, "overlap"))


def normal_words(rs: RewriteSystem, n_gens: int, max_degree: int) -> list[list[Word]]:
    """Normal words grouped by degree 0..max_degree."""
    if rs.max_degree is not None and max_degree > rs.max_degree:
        raise TruncationError(f"system completed to degree {rs.max_degree}, need {max_degree}")
    levels = [[()]]
    suffix_lengths = sorted({len(w) for w in rs.leading_index})
    index = rs.leading_index
    for d in range(1, max_degree + 1):
        nxt = []
        for w in levels[-1]:
            for x in range(n_gens):
                y = w + (x,)
                if not any(L <= d and y[d - L:] in index for L in suffix_lengths):
                    nxt.append(y)
        levels.append(nxt)
    return levels


def save_system(rs: RewriteSystem, path: str, alphabet: Alphabet, meta: dict | None = None):
    """Write ``rs`` as text: comment header, generator line, one rule per line.

    The file is written to a temporary name and renamed into place.
    """
    meta = dict(meta or {})
    meta.setdefault("max_degree", rs.max_degree)
    meta["field"] = rs.field.name
    lines = ["# qn-workbench rewrite system"]
    lines += [f"# {k}: {v}" for k, v in meta.items()]
    lines.append("generators: " + ", ".join(alphabet.labels))
    lines += [alphabet.render(r) for r in rs.rules]
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".gb")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_system(path: str) -> tuple[RewriteSystem, Alphabet, dict]:
    meta = {}
    alphabet = None
    rules = []
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    for ln in lines:
        if ln.startswith("# ") and ":" in ln:
            k, v = ln[2:].split(":", 1)
            meta[k.strip()] = v.strip()
    field = parse_field(meta.get("field", "rational"))
    for ln in lines:
        if not ln.strip() or ln.startswith("#"):
            continue
        if ln.startswith("generators:"):
            alphabet = Alphabet(_split_labels(ln.split(":", 1)[1]))
            continue
        if alphabet is None:
            raise ValueError(f"{path}: relation before generators line")
        rules.append(alphabet.parse(ln, field))
    md = meta.get("max_degree")
    rs = RewriteSystem(rules, int(md) if md not in (None, "None") else None, field)
    return rs, alphabet, meta


def _split_labels(text: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur.strip())
            cur = ""
        else:
            cur += ch
    if cur.strip():
        out.append(cur.strip())
    return out
