"""The algebras Q_n and gr Q_n on generators r_A, A a nonempty subset of {1..n}."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator

from .freealg import Polynomial, SubsetAlphabet, SubsetGen, Word, mask_elements, word_key
from .groebner import RewriteSystem, complete
from .linalg import QQ, Echelon


@lru_cache(maxsize=None)
def alphabet(n: int) -> SubsetAlphabet:
    return SubsetAlphabet(n)


def generators(n: int) -> list[SubsetGen]:
    """All 2^n - 1 generators in ascending order."""
    return list(alphabet(n).gens)


def _bit(i: int) -> int:
    return 1 << (i - 1)


def _min_bit(mask: int) -> int:
    return mask & -mask


def _relation_triples(n: int) -> list[tuple[int, int, int]]:
    out = []
    for g in alphabet(n).gens:
        if g.size >= 2:
            for i, j in combinations(g.elements, 2):
                out.append((g.mask, i, j))
    return out


def relation_labels(n: int) -> list[tuple[SubsetGen, int, int]]:
    """The (A, i, j) index of each relation, matching relations_q / relations_gr."""
    return [(SubsetGen(m, n), i, j) for m, i, j in _relation_triples(n)]


def _require(n: int):
    if n < 2:
        raise ValueError("relations are defined for n >= 2")


def h_relation(n: int, A: int, i: int, j: int, field=QQ) -> Polynomial:
    L = alphabet(n).letter
    ri, rj = L(A & ~_bit(i)), L(A & ~_bit(j))
    a = L(A)
    return Polynomial({(a, ri): 1, (a, rj): -1}, field)


def f_relation(n: int, A: int, i: int, j: int, field=QQ) -> Polynomial:
    L = alphabet(n).letter
    ai, aj, aij = A & ~_bit(i), A & ~_bit(j), A & ~_bit(i) & ~_bit(j)
    a, ri, rj = L(A), L(ai), L(aj)
    terms = [((a, ri), 1), ((a, rj), -1), ((ri, ri), -1), ((rj, rj), 1)]
    if aij:  # r_emptyset = 0
        rij = L(aij)
        terms += [((ri, rij), 1), ((rj, rij), -1)]
    return Polynomial(terms, field)


def relations_gr(n: int, field=QQ) -> list[Polynomial]:
    _require(n)
    return [h_relation(n, A, i, j, field) for A, i, j in _relation_triples(n)]


def relations_q(n: int, field=QQ) -> list[Polynomial]:
    _require(n)
    return [f_relation(n, A, i, j, field) for A, i, j in _relation_triples(n)]


def s_mask_chain(A: int, t: int) -> list[int]:
    """Masks A, A minus a_1, ..., A minus {a_1..a_t}."""
    if not 0 <= t <= A.bit_count() - 1:
        raise ValueError(f"t={t} out of range for |A|={A.bit_count()}")
    chain = [A]
    for _ in range(t):
        A &= A - 1  # drop the smallest element
        chain.append(A)
    return chain


def s_monomial(A, t: int, n: int | None = None) -> Word:
    """The word S_A^t = r_A r_{A minus a_1} ... r_{A minus {a_1..a_t}}."""
    if isinstance(A, SubsetGen):
        n, A = A.n, A.mask
    if n is None:
        raise ValueError("n is required when A is a bitmask")
    L = alphabet(n).letter
    return tuple(L(m) for m in s_mask_chain(A, t))


@dataclass(frozen=True)
class GBElement:
    A: int
    B: int
    t: int
    poly: Polynomial


def g_element(n: int, A: int, B: int, field=QQ) -> Polynomial:
    """g^t_{A,B} = S_A^t r_{A minus B} - S_A^{t+1} with t = |B| - 1.

    For B = {a_1} the two words coincide and the result is zero.
    """
    if not B or B & ~A or B.bit_count() >= A.bit_count():
        raise ValueError("need B a nonempty proper subset of A")
    t = B.bit_count() - 1
    L = alphabet(n).letter
    # a term list, not a dict: the two words may coincide and must cancel
    return Polynomial([(s_monomial(A, t, n) + (L(A & ~B),), 1), (s_monomial(A, t + 1, n), -1)], field)


def closed_gb_elements(n: int, field=QQ) -> list[GBElement]:
    _require(n)
    out = []
    for g in alphabet(n).gens:
        A = g.mask
        rest = A & ~_min_bit(A)
        elems = mask_elements(rest)
        for size in range(1, len(elems) + 1):
            for Bs in combinations(elems, size):
                B = sum(_bit(b) for b in Bs)
                out.append(GBElement(A, B, size - 1, g_element(n, A, B, field)))
    out.sort(key=lambda e: word_key(e.poly.leading_word))
    return out


def closed_gb(n: int, field=QQ) -> list[Polynomial]:
    """The reduced Groebner basis of gr Q_n in closed form, sorted by leading word."""
    return [e.poly for e in closed_gb_elements(n, field)]


def closed_gb_count(n: int) -> int:
    from math import comb
    return sum(comb(n, k) * (2 ** (k - 1) - 1) for k in range(1, n + 1))


# -- normal basis from S-blocks ------------------------------------------

def _blocks(n: int) -> list[tuple[int, int]]:
    return [(g.mask, j) for g in alphabet(n).gens for j in range(g.size)]


def _may_follow(prev: tuple[int, int], nxt: tuple[int, int]) -> bool:
    A, j = prev
    B, _ = nxt
    contained = (B & ~A) == 0 and B != A
    return not (contained and B.bit_count() == A.bit_count() - j - 1)


def normal_basis_enum(n: int, degree: int) -> Iterator[Word]:
    """Words S_{A^1}^{j_1} ... S_{A^m}^{j_m} of the given length.

    Consecutive blocks must satisfy: A^{i+1} not inside A^i, or
    |A^{i+1}| != |A^i| - j_i - 1.
    """
    if degree < 0:
        return
    blocks = _blocks(n)
    words = {b: s_monomial(b[0], b[1], n) for b in blocks}

    def rec(prefix: Word, last, remaining: int):
        if remaining == 0:
            yield prefix
            return
        for b in blocks:
            w = words[b]
            if len(w) <= remaining and (last is None or _may_follow(last, b)):
                yield from rec(prefix + w, b, remaining - len(w))

    yield from rec((), None, degree)


def count_normal_basis(n: int, degree: int) -> int:
    """Number of admissible S-block sequences of total length ``degree``."""
    blocks = _blocks(n)

    @lru_cache(maxsize=None)
    def f(last, remaining):
        if remaining == 0:
            return 1
        total = 0
        for b in blocks:
            L = b[1] + 1
            if L <= remaining and (last is None or _may_follow(last, b)):
                total += f(b, remaining - L)
        return total

    return f(None, degree)


# -- subalgebra decomposition -----------------------------------------------

@dataclass
class DecompositionReport:
    passed: bool
    n: int
    subalgebra: list[str]
    degrees: list[dict] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"passed": self.passed, "n": self.n, "subalgebra": self.subalgebra,
                "degrees": self.degrees, "failures": self.failures[:20]}


def _downward_closed(masks: set[int]) -> bool:
    for C in masks:
        sub = (C - 1) & C
        while sub:
            if sub not in masks:
                return False
            sub = (sub - 1) & C
    return True


def decomposition_check(n: int, G: Iterable, max_degree: int,
                        rs: RewriteSystem | None = None) -> DecompositionReport:
    """Check the splitting of gr Q_n along the ideals r_C gr Q_n.

    Verifies degree by degree that (a) NF(r_C w) begins with r_C and the
    ideals r_C gr Q_n have dimensions summing to dim gr Q_n (so they meet
    pairwise in zero), and (b) each normal word factors uniquely as
    u * r_C * w with u a normal word in the letters of G and C outside G,
    and every such concatenation is normal.
    """
    alph = alphabet(n)
    masks = set()
    for g in G:
        masks.add(g.mask if isinstance(g, SubsetGen) else
                  (g if isinstance(g, int) else SubsetGen.of(g, n).mask))
    if not _downward_closed(masks):
        raise ValueError("subalgebra generators must be closed under nonempty subsets")
    if rs is None:
        rs = complete(relations_gr(n), max(max_degree, 2)) if n >= 2 else RewriteSystem(max_degree=max_degree)
    in_G = [alph.mask(x) in masks for x in range(alph.size)]
    report = DecompositionReport(True, n, sorted(SubsetGen(m, n).label for m in masks))

    def fail(msg):
        report.passed = False
        report.failures.append(msg)

    basis = {d: list(normal_basis_enum(n, d)) for d in range(max_degree + 1)}
    for d, ws in basis.items():
        for w in ws:
            if not rs.is_normal(w):
                fail(f"block word {alph.render_word(w)} is not normal")
    U = {d: [w for w in ws if all(in_G[x] for x in w)] for d, ws in basis.items()}
    I = {d: [w for w in ws if w and not in_G[w[0]]] for d, ws in basis.items()}
    for d in range(1, max_degree + 1):
        # (a): the right ideal r_C gr Q_n in degree d
        ideal_total = 0
        for C in range(alph.size):
            ech = Echelon(rs.field)
            for w in basis[d - 1]:
                nf = rs.word_normal_form((C,) + w)
                if any(z[0] != C for z in nf):
                    fail(f"NF(r_C w) leaves r_C gr Q_n for C={alph.labels[C]}, w={alph.render_word(w)}")
                ech.add(nf)
            ideal_total += ech.rank
        if ideal_total != len(basis[d]):
            fail(f"degree {d}: ideal dimensions sum to {ideal_total}, expected {len(basis[d])}")
        # (b): unique factorization u * r_C * w
        for w in basis[d]:
            cuts = [k for k in range(len(w)) if all(in_G[x] for x in w[:k]) and not in_G[w[k]]]
            if all(in_G[x] for x in w):
                if cuts:
                    fail(f"{alph.render_word(w)} lies in U but has a cut")
            elif len(cuts) != 1:
                fail(f"{alph.render_word(w)} has {len(cuts)} factorizations")
        product_count = 0
        for i in range(d):
            for u in U[i]:
                for v in I[d - i]:
                    product_count += 1
                    if not rs.is_normal(u + v):
                        fail(f"{alph.render_word(u + v)} not normal")
        expected = len(U[d]) + product_count
        if expected != len(basis[d]):
            fail(f"degree {d}: dim U + sum dim U_i * dim I_(d-i) = {expected}, expected {len(basis[d])}")
        report.degrees.append({"degree": d, "dim": len(basis[d]), "U": len(U[d]),
                               "ideal_sum": ideal_total, "products": product_count})
    return report
