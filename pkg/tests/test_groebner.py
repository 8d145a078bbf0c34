import random
from itertools import product

import pytest

from qn_workbench import family
from qn_workbench.freealg import Alphabet, Polynomial, word_key
from qn_workbench.groebner import (Overlap, RewriteSystem, TruncationError, complete,
                                   load_system, normal_form, normal_words, overlaps,
                                   reduce_with_trace, s_polynomial, save_system)
from qn_workbench.linalg import GF

A2 = family.alphabet(2)
A3 = family.alphabet(3)


def P3(text):
    return A3.parse(text)


def random_poly(rng, n_letters, max_deg, n_terms=6):
    terms = {}
    for _ in range(n_terms):
        d = rng.randint(0, max_deg)
        terms[tuple(rng.randrange(n_letters) for _ in range(d))] = rng.randint(-3, 3)
    return Polynomial(terms)


def test_normal_form_examples():
    rs = RewriteSystem([A2.parse("r{1,2}*r{1} - r{1,2}*r{2}")])
    assert normal_form(A2.parse("r{1,2}*r{1}"), rs) == A2.parse("r{1,2}*r{2}")
    p = A2.parse("r{1}*r{1,2} + 2*r{2}")
    assert normal_form(p, rs) == p
    gb3 = RewriteSystem(family.closed_gb(3))
    assert normal_form(P3("r{1,2,3}*r{1,3}"), gb3) == P3("r{1,2,3}*r{2,3}")


def test_rules_must_be_monic_and_distinct():
    with pytest.raises(ValueError):
        RewriteSystem([P3("2*r{1}*r{2}")])
    with pytest.raises(ValueError):
        RewriteSystem([P3("r{1}*r{2} - r{3}*r{3}"), P3("r{1}*r{2} - r{2}*r{2}")])


def test_overlap_examples():
    w = A3.parse_word
    assert overlaps(w("r{1,2}*r{1}"), w("r{1,2}*r{1}")) == []
    ov = overlaps(w("r{1,2,3}*r{2,3}"), w("r{2,3}*r{3}"))
    assert ov == [Overlap(1, "overlap")]
    a, b = 0, 1
    assert overlaps((a, b), (b, a)) == [Overlap(1, "overlap")]
    assert overlaps((b, a), (a, b)) == [Overlap(1, "overlap")]
    assert overlaps((a, b, a), (b,)) == [Overlap(1, "contain")]
    with pytest.raises(ValueError):
        overlaps((), (a,))


def test_s_polynomial_of_paper_overlap_reduces_to_zero():
    gb3 = RewriteSystem(family.closed_gb(3))
    f = family.g_element(3, 0b111, 0b100)   # leading word r{1,2,3} r{1,2}
    g = family.g_element(3, 0b011, 0b010)   # leading word r{1,2} r{1}
    assert f.leading_word == A3.parse_word("r{1,2,3}*r{1,2}")
    assert g.leading_word == A3.parse_word("r{1,2}*r{1}")
    (ov,) = overlaps(f.leading_word, g.leading_word)
    s = s_polynomial(f, g, ov)
    overlap_word = f.leading_word + g.leading_word[1:]
    assert all(word_key(w) < word_key(overlap_word) for w in s.words())
    assert s
    assert normal_form(s, gb3).is_zero()


def test_s_polynomial_rejects_bad_overlap():
    f = family.g_element(3, 0b111, 0b100)
    g = family.g_element(3, 0b011, 0b010)
    with pytest.raises(ValueError):
        s_polynomial(f, g, Overlap(0, "overlap"))
    with pytest.raises(ValueError):
        s_polynomial(f.scale(2), g, Overlap(1, "overlap"))


def test_n2_system_has_no_s_polynomials():
    (rule,) = family.closed_gb(2)
    assert overlaps(rule.leading_word, rule.leading_word) == []


def test_complete_examples():
    rs2 = complete(family.relations_gr(2), 5)
    assert list(rs2.rules) == [A2.parse("r{1,2}*r{1} - r{1,2}*r{2}")]
    rs3 = complete(family.relations_gr(3), 5)
    assert set(rs3.rules) == set(family.closed_gb(3))
    assert len(rs3) == 6
    assert len(complete([], 5)) == 0


def test_complete_rejects_inhomogeneous_and_low_bound():
    with pytest.raises(ValueError):
        complete([P3("r{1}*r{2} - r{3}")], 4)
    with pytest.raises(ValueError):
        complete([P3("r{1}*r{2}*r{3} - r{3}*r{3}*r{3}")], 2)


@pytest.mark.parametrize("n", [2, 3])
def test_complete_is_idempotent_and_reduced(n):
    rs = complete(family.relations_gr(n), 5)
    again = complete(list(rs.rules), 5)
    assert list(again.rules) == list(rs.rules)
    lws = rs.leading_words()
    for r in rs.rules:
        assert r.leading()[1] == 1
        for w in r.words():
            for lw in lws:
                if w == r.leading_word and lw == w:
                    continue
                assert not any(w[i:i + len(lw)] == lw for i in range(len(w) - len(lw) + 1))


def test_complete_q3_leading_words_match_closed_form():
    rs = complete(family.relations_q(3), 5)
    assert sorted(rs.leading_words()) == sorted(p.leading_word for p in family.closed_gb(3))


def test_leading_words_are_s_a_t_times_r_a_minus_b():
    rs = complete(family.relations_gr(3), 5)
    expected = set()
    for e in family.closed_gb_elements(3):
        expected.add(family.s_monomial(e.A, e.t, 3) + (A3.letter(e.A & ~e.B),))
    assert set(rs.leading_words()) == expected


def test_normal_form_idempotent_and_trace_witness():
    rng = random.Random(7)
    rs = complete(family.relations_q(3), 5)
    for _ in range(40):
        p = random_poly(rng, A3.size, 4)
        nf, trace = reduce_with_trace(p, rs)
        assert nf == normal_form(p, rs)
        assert normal_form(nf, rs) == nf
        assert all(rs.is_normal(w) for w in nf.words())
        # p - nf is the explicit ideal combination recorded in the trace
        combo = Polynomial.zero()
        for step in trace:
            combo = combo + (step.left * rs.rules[step.rule] * step.right).scale(step.coeff)
        assert p - nf == combo


@pytest.mark.parametrize("n,variant", [(2, "gr"), (2, "q"), (3, "gr"), (3, "q")])
def test_confluence_under_random_rewrite_sites(n, variant):
    rels = family.relations_gr(n) if variant == "gr" else family.relations_q(n)
    rs = complete(rels, 5)
    rng = random.Random(n * 31 + len(variant))
    size = family.alphabet(n).size
    for _ in range(30):
        p = random_poly(rng, size, 4)
        expected = normal_form(p, rs)
        for seed in range(3):
            nf, _ = reduce_with_trace(p, rs, random.Random(seed))
            assert nf == expected


def test_every_closed_form_element_lies_in_the_ideal():
    for n in (2, 3, 4):
        for e in family.closed_gb_elements(n):
            rs = complete(family.relations_gr(n), e.t + 2)
            assert normal_form(e.poly, rs).is_zero()


def test_normal_words_counts_and_truncation():
    rs = complete(family.relations_gr(2), 4)
    assert [len(x) for x in normal_words(rs, 3, 4)] == [1, 3, 8, 21, 55]
    with pytest.raises(TruncationError):
        normal_words(rs, 3, 5)


def test_cache_round_trip(tmp_path):
    rs = complete(family.relations_q(3), 5)
    path = tmp_path / "q3.gb"
    save_system(rs, str(path), A3, {"n": 3, "algebra": "q"})
    text = path.read_text()
    assert text.splitlines()[0].startswith("#")
    assert "# max_degree: 5" in text and "# field: rational" in text
    back, alph, meta = load_system(str(path))
    assert alph.labels == A3.labels
    assert back.max_degree == 5 and meta["n"] == "3"
    assert list(back.rules) == list(rs.rules)
    rng = random.Random(3)
    for _ in range(30):
        p = random_poly(rng, A3.size, 5)
        assert A3.render(back.normal_form(p)) == A3.render(rs.normal_form(p))
    assert not [f for f in tmp_path.iterdir() if f.name.startswith(".tmp-")]


def test_cache_round_trip_prime_field(tmp_path):
    F = GF(32003)
    rs = complete(family.relations_q(2, F), 4, F)
    path = tmp_path / "q2.gb"
    save_system(rs, str(path), A2)
    back, _, _ = load_system(str(path))
    assert back.field == F
    assert list(back.rules) == list(rs.rules)


def test_load_rejects_rule_before_generators(tmp_path):
    path = tmp_path / "bad.gb"
    path.write_text("x*y\ngenerators: x, y\n")
    with pytest.raises(ValueError):
        load_system(str(path))


def test_generic_completion_finds_new_rule():
    # x*y - y*x and x*x: overlap x*x*y gives y*x*x ... a classical small case
    alph = Alphabet(["y", "x"])
    rs = complete([alph.parse("x*y - y*x"), alph.parse("x*x - y*y")], 4)
    # brute-force dimension check against the commutative quotient k[x,y]/(x^2-y^2)
    words = normal_words(rs, 2, 4)
    assert [len(w) for w in words] == [1, 2, 2, 2, 2]
    for d in range(5):
        assert all(rs.is_normal(w) for w in words[d])
        assert sum(1 for w in product(range(2), repeat=d) if rs.is_normal(w)) == len(words[d])
