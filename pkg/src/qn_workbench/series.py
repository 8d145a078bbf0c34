"""Hilbert series, quadratic duals and the Froberg relation."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from . import family
from .freealg import Alphabet, Polynomial, Word
from .groebner import RewriteSystem, complete
from .linalg import QQ, SparseMatrix, kernel_basis, mat_rank


@dataclass(frozen=True)
class SeriesVector:
    coeffs: tuple[int, ...]

    def __getitem__(self, d):
        return self.coeffs[d]

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def render(self, var: str = "t") -> str:
        parts = []
        for d, c in enumerate(self.coeffs):
            if c == 0 and parts:
                continue
            term = str(c) if d == 0 else (f"{var}" if d == 1 else f"{var}^{d}")
            if d > 0 and c != 1:
                term = f"{c}{term}"
            parts.append(term)
        return " + ".join(parts) + " + …"

    def to_json(self) -> list[int]:
        return list(self.coeffs)


@dataclass(frozen=True)
class QuadraticPresentation:
    """Quadratic algebra on letters 0..n_gens-1 ordered by index (plain deglex)."""

    n_gens: int
    gen_labels: tuple[str, ...]
    relations: tuple[Polynomial, ...]
    name: str = ""

    def __post_init__(self):
        for r in self.relations:
            if r and not (r.is_homogeneous() and r.degree() == 2):
                raise ValueError("quadratic presentations need degree-2 homogeneous relations")

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.gen_labels)

    @property
    def field(self):
        return self.relations[0].field if self.relations else QQ

    def render(self) -> str:
        """Presentation file text: generator line plus one relation per line."""
        alph = self.alphabet
        lines = ["generators: " + ", ".join(self.gen_labels)]
        lines += [alph.render(r) for r in self.relations]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str, field=QQ, name: str = "") -> QuadraticPresentation:
        from .groebner import _split_labels
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not lines or not lines[0].startswith("generators:"):
            raise ValueError("presentation must start with a 'generators:' line")
        labels = _split_labels(lines[0].split(":", 1)[1])
        alph = Alphabet(labels)
        rels = tuple(alph.parse(ln, field) for ln in lines[1:])
        return cls(len(labels), tuple(alph.labels), rels, name)


def qn_presentation(n: int, variant: str = "gr", field=QQ) -> QuadraticPresentation:
    """Q_n (variant 'q') or gr Q_n (variant 'gr'); n = 1 is the free algebra on r_{1}."""
    alph = family.alphabet(n)
    if variant not in ("q", "gr"):
        raise ValueError("variant must be 'q' or 'gr'")
    if n == 1:
        rels = ()
    elif variant == "q":
        rels = tuple(family.relations_q(n, field))
    else:
        rels = tuple(family.relations_gr(n, field))
    name = f"{'Q' if variant == 'q' else 'grQ'}_{n}"
    return QuadraticPresentation(alph.size, tuple(alph.labels), rels, name)


def free_presentation(n_gens: int) -> QuadraticPresentation:
    return QuadraticPresentation(n_gens, tuple(f"x{i}" for i in range(n_gens)), (), f"free_{n_gens}")


@lru_cache(maxsize=64)
def groebner_basis(pres: QuadraticPresentation, max_degree: int, field=None) -> RewriteSystem:
    """Memoized truncated completion of a presentation."""
    field = field or pres.field
    rels = [r if r.field == field else Polynomial(r.to_dict(), field) for r in pres.relations]
    return complete(rels, max(max_degree, 2), field)


def forbidden_factor_counts(leading_words: Sequence[Word], n_gens: int, max_degree: int) -> SeriesVector:
    """Number of words of each length avoiding every given word as a factor.

    Runs a dynamic program over the Aho-Corasick automaton of the forbidden
    words; states are the proper prefixes that can still be extended.
    """
    goto: list[dict[int, int]] = [{}]
    terminal = [False]
    for w in leading_words:
        s = 0
        for x in w:
            nxt = goto[s].get(x)
            if nxt is None:
                goto.append({})
                terminal.append(False)
                nxt = len(goto) - 1
                goto[s][x] = nxt
            s = nxt
        terminal[s] = True
    fail = [0] * len(goto)
    delta = [[0] * n_gens for _ in goto]
    queue = deque()
    for x in range(n_gens):
        t = goto[0].get(x, 0)
        delta[0][x] = t
        if t:
            queue.append(t)
    while queue:
        s = queue.popleft()
        terminal[s] = terminal[s] or terminal[fail[s]]
        for x in range(n_gens):
            t = goto[s].get(x)
            if t is None:
                delta[s][x] = delta[fail[s]][x]
            else:
                fail[t] = delta[fail[s]][x]
                delta[s][x] = t
                queue.append(t)
    counts = {0: 1}
    out = [1]
    for _ in range(max_degree):
        nxt: dict[int, int] = {}
        for s, c in counts.items():
            for t in delta[s]:
                if not terminal[t]:
                    nxt[t] = nxt.get(t, 0) + c
        counts = nxt
        out.append(sum(counts.values()))
    return SeriesVector(tuple(out))


def hilbert_series(pres: QuadraticPresentation, max_degree: int, field=None) -> SeriesVector:
    rs = groebner_basis(pres, max_degree, field)
    return forbidden_factor_counts(rs.leading_words(), pres.n_gens, max_degree)


def relation_matrix(pres: QuadraticPresentation) -> SparseMatrix:
    g = pres.n_gens
    entries = {}
    for i, r in enumerate(pres.relations):
        for (a, b), c in r.items():
            entries[i, a * g + b] = c
    return SparseMatrix(len(pres.relations), g * g, entries, pres.field)


def relation_rank(pres: QuadraticPresentation) -> int:
    return mat_rank(relation_matrix(pres)) if pres.relations else 0


def quadratic_dual(pres: QuadraticPresentation) -> QuadraticPresentation:
    """Annihilator of the relation space under <a*b, u*v> = <a,u><b,v>."""
    g = pres.n_gens
    F = pres.field
    if pres.relations:
        basis = kernel_basis(relation_matrix(pres))
    else:
        basis = [{k: 1} for k in range(g * g)]
    rels = []
    for vec in basis:
        p = Polynomial({(k // g, k % g): c for k, c in vec.items()}, F)
        rels.append(p.monic())
    rels.sort(key=lambda p: (len(p.leading_word), p.leading_word), reverse=True)
    name = f"{pres.name}^!" if pres.name else ""
    return QuadraticPresentation(g, pres.gen_labels, tuple(rels), name)


@dataclass
class FrobergResult:
    ok: bool
    first_failure: int | None
    table: list[int]

    def to_json(self):
        return {"ok": self.ok, "first_failure": self.first_failure, "table": self.table}


def froberg_check(h: Sequence[int], h_dual: Sequence[int], max_degree: int) -> FrobergResult:
    """Check h(z) * h_dual(-z) = 1 coefficientwise through ``max_degree``."""
    if len(h) <= max_degree or len(h_dual) <= max_degree:
        raise ValueError("series vectors do not reach max_degree")
    table = []
    first = None
    for d in range(max_degree + 1):
        s = sum((-1) ** j * h[d - j] * h_dual[j] for j in range(d + 1))
        table.append(s)
        if s != (1 if d == 0 else 0) and first is None:
            first = d
    return FrobergResult(first is None, first, table)


def dual_polynomial_check(n: int, max_degree: int, variant: str = "q", field=QQ) -> dict:
    """dim (Q_n^!)_n > 0 and dim (Q_n^!)_d = 0 for n < d <= max_degree."""
    if max_degree < n + 2:
        raise ValueError("max_degree must be at least n + 2")
    dual = quadratic_dual(qn_presentation(n, variant, field))
    h = hilbert_series(dual, max_degree)
    ok = h[n] > 0 and all(h[d] == 0 for d in range(n + 1, max_degree + 1))
    return {"n": n, "dual_series": h.to_json(), "top_degree": n, "passed": ok}
