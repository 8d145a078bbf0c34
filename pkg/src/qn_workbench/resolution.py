"""The complex K^n of right gr Q_n-modules, its homology, and bigraded Tor.

Homology is computed slice by slice: at internal degree d, the module
K_t contributes the span of S(A:B) * w with w a normal word of degree
d - t, and K_0 (the augmentation ideal) contributes the normal words of
degree d.  Slices are further split by the summand label A and by the
multidegree counting letters of each subset size; both gradings are
respected by the differential, and every image coordinate is checked
against the block of its source.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

from . import family
from .freealg import Polynomial, SubsetAlphabet, mask_elements, subset_label
from .groebner import RewriteSystem, TruncationError, normal_words
from .linalg import Echelon, SparseMatrix, kernel_basis
from .series import QuadraticPresentation, groebner_basis


@dataclass(frozen=True)
class ComplexGen:
    A: int
    B: int
    n: int

    def __post_init__(self):
        if not self.A or self.B & ~self.A or self.B & (self.A & -self.A):
            raise ValueError("need min(A) not in B, B inside A")

    @property
    def homological_degree(self) -> int:
        return self.B.bit_count() + 1

    internal_degree = homological_degree

    @property
    def label(self) -> str:
        b = ",".join(map(str, mask_elements(self.B)))
        return f"S({subset_label(self.A, '')}:{{{b}}})"

    def size_profile(self) -> list[int]:
        """Sizes of the letters of S_A^{|B|}, the word this symbol stands for."""
        k = self.A.bit_count()
        return list(range(k, k - self.B.bit_count() - 1, -1))

    def __str__(self):
        return self.label


@dataclass
class GradedComplex:
    n: int
    alphabet: SubsetAlphabet
    modules: dict[int, list[ComplexGen]]
    differential: dict[ComplexGen, list[tuple[ComplexGen | None, Polynomial]]]

    @property
    def top(self) -> int:
        return max(self.modules) if self.modules else 0

    def ranks(self) -> list[int]:
        return [len(self.modules.get(t, [])) for t in range(1, self.top + 1)]

    def summand(self, g: ComplexGen) -> int:
        return g.A

    def dump(self) -> str:
        alph = self.alphabet
        lines = [f"# complex K^{self.n}"]
        for t in sorted(self.modules):
            lines.append(f"K_{t}: " + ", ".join(g.label for g in self.modules[t]))
        for t in sorted(self.modules):
            for g in self.modules[t]:
                for target, p in self.differential[g]:
                    tgt = target.label if target is not None else "K_0"
                    lines.append(f"d {g.label} -> {tgt} * ({alph.render(p)})")
        return "\n".join(lines) + "\n"


def build_paper_complex(n: int) -> GradedComplex:
    """K^n with d S(A:B) = sum_i (-1)^i S(A:B-b_i) (r_{A-B} - r_{(A-a_1)-(B-b_i)})."""
    if n < 1:
        raise ValueError("n must be at least 1")
    alph = family.alphabet(n)
    L = alph.letter
    modules: dict[int, list[ComplexGen]] = defaultdict(list)
    diff = {}
    for gen in alph.gens:
        A = gen.mask
        a1 = A & -A
        rest = A & ~a1
        sub = rest
        Bs = []
        while True:
            Bs.append(sub)
            if sub == 0:
                break
            sub = (sub - 1) & rest
        for B in Bs:
            g = ComplexGen(A, B, n)
            modules[g.homological_degree].append(g)
            if B == 0:
                diff[g] = [(None, Polynomial.monomial((L(A),)))]
                continue
            entries = []
            for i, b in enumerate(mask_elements(B), start=1):
                Bi = B & ~(1 << (b - 1))
                p = Polynomial({(L(A & ~B),): 1, (L(rest & ~Bi),): -1})
                entries.append((ComplexGen(A, Bi, n), p if i % 2 == 0 else -p))
            diff[g] = entries
    for t in modules:
        modules[t].sort(key=lambda g: (alph.letter(g.A), g.B))
    return GradedComplex(n, alph, dict(modules), diff)


@dataclass
class DSquaredResult:
    ok: bool
    checked: int
    witnesses: list[tuple[ComplexGen, ComplexGen | None, Polynomial]] = field(default_factory=list)


def check_d_squared(c: GradedComplex, gb: RewriteSystem) -> DSquaredResult:
    """Reduce every entry of d∘d modulo the Groebner basis."""
    checked = 0
    witnesses = []
    for t in sorted(c.modules):
        if t < 2:
            continue
        for g in c.modules[t]:
            comp: dict = {}
            for mid, p1 in c.differential[g]:
                for tgt, p2 in c.differential[mid]:
                    comp[tgt] = comp.get(tgt, Polynomial.zero(p1.field)) + p2 * p1
            for tgt, p in comp.items():
                checked += 1
                r = gb.normal_form(p)
                if r:
                    witnesses.append((g, tgt, r))
    return DSquaredResult(not witnesses, checked, witnesses)


@dataclass
class HomologyResult:
    n: int
    bound: int
    homology: dict[tuple[int, int], int]
    dims: dict[tuple[int, int], int]
    ranks: dict[tuple[int, int], int]
    by_summand: dict[int, dict[tuple[int, int], tuple[int, int]]]
    elapsed: float = 0.0

    @property
    def acyclic(self) -> bool:
        return all(v == 0 for v in self.homology.values())

    def nonzero(self) -> list[tuple[int, int, int]]:
        return [(t, d, v) for (t, d), v in sorted(self.homology.items()) if v]

    def to_json(self) -> dict:
        return {"n": self.n, "bound": self.bound, "acyclic": self.acyclic,
                "homology": [{"t": t, "d": d, "dim": v} for (t, d), v in sorted(self.homology.items())],
                "slice_dims": [{"t": t, "d": d, "dim": v} for (t, d), v in sorted(self.dims.items())]}


def _profile(alph: SubsetAlphabet, n: int):
    sizes = [g.size for g in alph.gens]

    def md(word, base=None):
        v = [0] * (n + 1)
        for x in word:
            v[sizes[x]] += 1
        if base:
            for s in base:
                v[s] += 1
        return tuple(v)

    return md


def complex_homology(c: GradedComplex, gb: RewriteSystem, bound: int,
                     summands: Sequence[int] | None = None, jobs: int = 1) -> HomologyResult:
    """dim H_t of K at every internal degree d <= bound (t = 0..top)."""
    start = time.time()
    if gb.max_degree is None or gb.max_degree < bound:
        raise TruncationError(f"Groebner basis truncated at {gb.max_degree}, need {bound}")
    if jobs > 1:
        labels = list(summands) if summands is not None else [g.mask for g in c.alphabet.gens]
        chunks = [labels[i::jobs] for i in range(jobs) if labels[i::jobs]]
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(complex_homology, repeat(c), repeat(gb), repeat(bound), chunks))
        return _merge(parts, time.time() - start)
    alph = c.alphabet
    n = c.n
    levels = normal_words(gb, alph.size, bound)
    md = _profile(alph, n)
    gen_profile = {g: tuple(g.size_profile()) for gens in c.modules.values() for g in gens}
    target_index = {g: i for gens in c.modules.values() for i, g in enumerate(gens)}
    by_label = defaultdict(lambda: defaultdict(list))
    for t, gens in c.modules.items():
        for g in gens:
            by_label[c.summand(g)][t].append(g)
    labels = sorted(by_label, key=alph.letter) if summands is None else list(summands)
    top = c.top
    homology = defaultdict(int)
    dims = defaultdict(int)
    ranks = defaultdict(int)
    by_summand = {}
    for A in labels:
        a = alph.letter(A)
        per = {}
        for d in range(0, bound + 1):
            blocks_dim = defaultdict(lambda: [0] * (top + 2))
            blocks_rank = defaultdict(lambda: [0] * (top + 2))
            if d >= 1:
                for w in levels[d]:
                    if w[0] == a:
                        blocks_dim[md(w)][0] += 1
            for t in range(1, top + 1):
                echs = {}
                for g in by_label[A].get(t, ()):
                    if t > d:
                        continue
                    prof = gen_profile[g]
                    for w in levels[d - t]:
                        key = md(w, prof)
                        vec = {}
                        for tgt, p in c.differential[g]:
                            tprof = gen_profile[tgt] if tgt is not None else None
                            ti = target_index[tgt] if tgt is not None else None
                            for u, coef in p.items():
                                for z, b in gb.word_normal_form(u + w).items():
                                    if md(z, tprof) != key:
                                        raise AssertionError(f"differential leaves block at {g.label}")
                                    k = z if ti is None else (ti, z)
                                    vec[k] = vec.get(k, 0) + coef * b
                        vec = {k: x for k, x in ((k, gb.field.reduce(x)) for k, x in vec.items()) if x}
                        blocks_dim[key][t] += 1
                        ech = echs.get(key)
                        if ech is None:
                            ech = echs[key] = Echelon(gb.field)
                        ech.add(vec)
                for key, ech in echs.items():
                    blocks_rank[key][t] = ech.rank
            for key, dv in blocks_dim.items():
                rv = blocks_rank[key]
                for t in range(0, top + 1):
                    h = dv[t] - rv[t] - rv[t + 1]
                    homology[t, d] += h
                    dims[t, d] += dv[t]
                    ranks[t, d] += rv[t]
            for t in range(0, top + 1):
                per[t, d] = (sum(dv[t] for dv in blocks_dim.values()),
                             sum(rv[t] for rv in blocks_rank.values()))
                homology.setdefault((t, d), 0)
                dims.setdefault((t, d), 0)
            gb.clear_cache()
        by_summand[A] = per
    return HomologyResult(n, bound, dict(homology), dict(dims), dict(ranks), by_summand,
                          time.time() - start)


def _merge(parts: list[HomologyResult], elapsed: float) -> HomologyResult:
    homology, dims, ranks, by_summand = defaultdict(int), defaultdict(int), defaultdict(int), {}
    for part in parts:
        for target, source in ((homology, part.homology), (dims, part.dims), (ranks, part.ranks)):
            for k, v in source.items():
                target[k] += v
        by_summand.update(part.by_summand)
    p = parts[0]
    return HomologyResult(p.n, p.bound, dict(homology), dict(dims), dict(ranks), by_summand, elapsed)


def euler_characteristics(c: GradedComplex, series: Sequence[int], bound: int) -> list[int]:
    """sum_t (-1)^t dim (K_t)_d from generator counts and the Hilbert series alone."""
    out = []
    for d in range(bound + 1):
        s = series[d] if d >= 1 else 0
        for t, gens in c.modules.items():
            if t <= d:
                s += (-1) ** t * len(gens) * series[d - t]
        out.append(s)
    return out


# -- bigraded Tor via a minimal resolution ------------------------------------

@dataclass
class TorTable:
    i_max: int
    j_max: int
    dims: dict[tuple[int, int], int]
    elapsed: float = 0.0

    def __getitem__(self, ij):
        return self.dims.get(ij, 0)

    def off_diagonal(self) -> list[tuple[int, int, int]]:
        return [(i, j, v) for (i, j), v in sorted(self.dims.items()) if v and i != j]

    def diagonal(self) -> list[int]:
        return [self[i, i] for i in range(self.i_max + 1)]

    def to_json(self) -> list[dict]:
        return [{"i": i, "j": j, "dim": v} for (i, j), v in sorted(self.dims.items())]

    def render(self) -> str:
        width = max(3, *(len(str(v)) for v in self.dims.values())) if self.dims else 3
        head = "i\\j " + " ".join(str(j).rjust(width) for j in range(self.j_max + 1))
        rows = [head]
        for i in range(self.i_max + 1):
            rows.append(str(i).ljust(4) + " ".join(str(self[i, j]).rjust(width)
                                                   for j in range(self.j_max + 1)))
        return "\n".join(rows)


def _apply(img: dict, w, gb: RewriteSystem) -> dict:
    """(image of a generator) * w, with coordinates (generator index, normal word)."""
    F = gb.field
    out = {}
    for (gi, u), c in img.items():
        for z, b in gb.word_normal_form(u + w).items():
            k = (gi, z)
            out[k] = out.get(k, 0) + c * b
    return {k: x for k, x in ((k, F.reduce(x)) for k, x in out.items()) if x}


def tor_bigraded(pres: QuadraticPresentation, i_max: int, j_max: int, field=None,
                 gb: RewriteSystem | None = None) -> TorTable:
    """dim Tor^A_{i,j}(k, k) for i <= i_max, j <= j_max.

    Builds a minimal graded free resolution of the trivial right module
    degree by degree.  At step i and degree j the number of new generators of
    F_{i+1} is dim ker(d_i)_j minus the rank of the images of the generators
    of F_{i+1} found in lower degrees.
    """
    start = time.time()
    gb = gb or groebner_basis(pres, j_max, field)
    if gb.max_degree < j_max:
        raise TruncationError(f"Groebner basis truncated at {gb.max_degree}, need {j_max}")
    F = gb.field
    g = pres.n_gens
    levels = normal_words(gb, g, j_max)
    a = [len(lv) for lv in levels]
    dims = {(0, 0): 1}
    # F_1 = V (x) A; every normal word of positive degree is x * w with x * w
    # normal, so d_1 maps onto the augmentation ideal in each degree >= 1.
    gens = {1: [(1, {(0, (x,)): 1}) for x in range(g)]}
    rank_d = {1: {j: (a[j] if j >= 1 else 0) for j in range(j_max + 1)}}
    if i_max >= 1:
        dims[1, 1] = g
    for i in range(1, i_max):
        nxt: list[tuple[int, dict]] = []
        rank_d[i + 1] = {}
        for j in range(j_max + 1):
            dim_i = sum(a[j - deg] for deg, _ in gens[i] if deg <= j)
            ker_dim = dim_i - rank_d[i][j]
            ech = Echelon(F)
            for deg, img in nxt:
                for w in levels[j - deg]:
                    ech.add(_apply(img, w, gb))
            new = ker_dim - ech.rank
            if new < 0:
                raise AssertionError(f"image exceeds kernel at (i={i}, j={j})")
            if new:
                basis = [(gi, w) for gi, (deg, _) in enumerate(gens[i]) if deg <= j
                         for w in levels[j - deg]]
                rows: dict = {}
                col_vecs = []
                for col, (gi, w) in enumerate(basis):
                    img = gens[i][gi][1]
                    vec = _apply(img, w, gb)
                    col_vecs.append(vec)
                    for key, c in vec.items():
                        rows.setdefault(key, {})[col] = c
                m = SparseMatrix.from_rows(rows.values(), len(basis), F)
                found = 0
                for kv in kernel_basis(m):
                    vec = {basis[col]: c for col, c in kv.items()}
                    if ech.add(vec):
                        nxt.append((j, vec))
                        found += 1
                        if found == new:
                            break
                if found != new:
                    raise AssertionError("kernel basis did not supply the missing generators")
            rank_d[i + 1][j] = ech.rank
            dims[i + 1, j] = new
            gb.clear_cache()
        gens[i + 1] = nxt
    table = {(i, j): dims.get((i, j), 0) for i in range(i_max + 1) for j in range(j_max + 1)}
    return TorTable(i_max, j_max, table, time.time() - start)


def koszulity_verdict(pres: QuadraticPresentation, i_max: int, j_max: int, field=None) -> dict:
    """PASS-to-bound iff Tor vanishes off the diagonal inside the bound."""
    tor = tor_bigraded(pres, i_max, j_max, field)
    off = tor.off_diagonal()
    return {"algebra": pres.name, "verdict": "PASS" if not off else "FAIL",
            "bound": {"i_max": i_max, "j_max": j_max}, "diagonal": tor.diagonal(),
            "off_diagonal": [{"i": i, "j": j, "dim": v} for i, j, v in off],
            "tor": tor.to_json(), "elapsed_s": round(tor.elapsed, 3)}


def anick_chain_counts(tips: Sequence[tuple], n_gens: int, max_chain: int, max_degree: int) -> dict:
    """Count Anick k-chains by degree; k-chains index a (non-minimal) F_{k+1}.

    0-chains are letters.  A k-chain extends a (k-1)-chain with tail s by a
    word t such that s*t ends with a tip that starts inside s, and no shorter
    prefix of s*t contains a tip.
    """
    tipset = set(tips)
    tip_lengths = sorted({len(t) for t in tips})

    def has_tip(w):
        return any(w[i:i + L] in tipset for L in tip_lengths for i in range(len(w) - L + 1))

    counts = defaultdict(int)
    layer = [((x,), (x,)) for x in range(n_gens)]
    counts[0, 1] = n_gens
    for k in range(1, max_chain + 1):
        nxt = []
        for word, tail in layer:
            for tip in tips:
                for split in range(1, min(len(tail), len(tip) - 1) + 1):
                    if tail[len(tail) - split:] != tip[:split]:
                        continue
                    t = tip[split:]
                    if len(word) + len(t) > max_degree:
                        continue
                    st = tail + t
                    if any(has_tip(st[:len(tail) + m]) for m in range(len(t))):
                        continue
                    nxt.append((word + t, t))
        for word, _ in nxt:
            counts[k, len(word)] += 1
        layer = nxt
    return dict(counts)
