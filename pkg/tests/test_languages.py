from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semimix.absorption import expected_tau, propagate, stationary_exact, survival_curve
from semimix.languages import (
    ContainmentNotCertified,
    LanguageError,
    build_test_automaton,
    certify_containment,
    expected_tau_test,
    ideal_principle_compare,
    loop_words,
    pattern_automaton,
    pattern_waiting_time,
    psi_test,
    test_loop_graph,
    words_up_to,
)
from semimix.semigroup import Alphabet
from semimix.series import DivergentLoop, loop_graph_series

from . import oracles

AB = Alphabet(("a", "b"), ("1/2", "1/2"))


def words(letters, n):
    return ["".join(w) for w in product(letters, repeat=n)]


def test_aba_suffix_automaton():
    T = build_test_automaton("aba", "ab")
    assert len(T.step) == 4
    # rows: prefixes "", a, ab, aba; columns a, b
    assert T.step == ((1, 0), (1, 2), (3, 0), (3, 3))


def test_aba_reset_automaton():
    T = build_test_automaton("aba", "ab", rule="reset")
    assert T.step == ((1, 0), (0, 2), (3, 0), (3, 3))


def test_single_letter():
    T = build_test_automaton("a", "ab")
    assert T.step == ((1, 0), (1, 1))
    assert expected_tau_test("a", Alphabet(("a", "b"), ("1/3", "2/3"))) == 3


@pytest.mark.parametrize("t", ["aba", "aab", "abab", "bbab", "a"])
def test_suffix_rule_recognises_factor_ideal(t):
    T = build_test_automaton(t, "ab")
    for L in range(len(t) + 5):
        for w in words("ab", L):
            assert T.accepts(w) == oracles.contains(w, t)


@settings(max_examples=20, deadline=None)
@given(st.text(alphabet="ab", min_size=5, max_size=5))
def test_random_pattern_acceptance(t):
    T = build_test_automaton(t, "ab")
    for w in words("ab", 10):
        assert T.accepts(w) == (t in w)


def test_reset_rule_misses_overlaps():
    T = build_test_automaton("aba", "ab", rule="reset")
    assert oracles.contains("aaba", "aba") and not T.accepts("aaba")


def test_empty_word():
    with pytest.raises(LanguageError):
        build_test_automaton("", "ab")


def test_loop_words():
    assert loop_words("aaa", "ab") == [("b",), ("a", "b"), ("a", "a", "b")]
    assert {"".join(w) for w in loop_words("aba", "ab")} == {"b", "aa", "abb"}
    assert loop_words("a", "abc") == [("b",), ("c",)]
    # prose definition: |w| <= l, w not a prefix of t, w minus last letter a prefix
    t = "abba"
    prefixes = {t[:k] for k in range(len(t) + 1)}
    brute = {w for L in range(1, len(t) + 1) for w in words("ab", L) if w not in prefixes and w[:-1] in prefixes}
    assert {"".join(w) for w in loop_words(t, "ab")} == brute


def test_aba_closed_forms():
    assert psi_test("aba", AB) == 1
    assert expected_tau_test("aba", AB) == 14
    assert expected_tau(build_test_automaton("aba", "ab", rule="reset").semaphore(), AB)[0] == 14


def test_aa_waiting_time():
    x = AB
    assert expected_tau_test("aa", x) == 6
    assert pattern_waiting_time("aa", x) == 6 == oracles.pattern_waiting_time("aa", {"a": Fraction(1, 2), "b": Fraction(1, 2)})


@pytest.mark.parametrize("t", ["aba", "abab", "aab", "abba"])
def test_pattern_waiting_time_oracle(t):
    probs = {"a": Fraction(2, 5), "b": Fraction(3, 5)}
    x = Alphabet(("a", "b"), tuple(probs.values()))
    assert pattern_waiting_time(t, x) == oracles.pattern_waiting_time(t, probs)


@pytest.mark.parametrize("letters", ["ab", "abc"])
def test_psi_is_one_and_routes_agree(letters):
    n = len(letters)
    x = Alphabet(tuple(letters), tuple(Fraction(k + 1, n * (n + 1) // 2) for k in range(n)))
    for L in range(1, 7):
        for t in list(words(letters, L))[:40]:
            assert psi_test(t, x) == 1
            aut = build_test_automaton(t, letters, rule="reset").semaphore()
            assert expected_tau_test(t, x) == expected_tau(aut, x)[0]
            assert stationary_exact(aut, x) == [1]


@pytest.mark.parametrize("t", ["aba", "aab", "bab"])
def test_loop_graph_matches_automaton_paths(t):
    x = {"a": Fraction(1, 3), "b": Fraction(2, 3)}
    G = test_loop_graph(t, "ab")
    series = loop_graph_series(G, 13, weights=x)
    aut = build_test_automaton(t, "ab", rule="reset").semaphore()
    _, absorbed = propagate(aut, tuple(x.values()), 12)
    for L in range(1, 13):
        assert series.coefficient((L,)) == absorbed[L][0]


def test_divergent_denominator():
    # loop words of ab are b and aa, whose mass is 1 when a never occurs
    with pytest.raises(DivergentLoop):
        psi_test("ab", {"a": 0, "b": 1})


def test_ideal_principle_examples():
    x = AB
    rep = ideal_principle_compare(["aa"], ["aa", "aba"], x, 30)
    assert rep.ordering_holds
    same = ideal_principle_compare(["aba"], ["aba"], x, 20)
    assert same.survival1 == same.survival2
    rep = ideal_principle_compare(["aaa"], ["aa"], x, 30)
    assert rep.ordering_holds
    assert rep.survival2 == survival_curve(pattern_automaton(["aa"], x), x, 30)
    with pytest.raises(ContainmentNotCertified):
        ideal_principle_compare(["aa"], ["aaa"], x, 10)


def test_certify_containment():
    assert certify_containment(["abab"], ["ba"])
    assert not certify_containment(["ab", "bb"], ["ab"])


def test_pattern_automaton_union():
    aut = pattern_automaton(["aa", "aba"], "ab")
    for w in words_up_to("ab", 9):
        s = "".join(w)
        hits = [k for k in range(1, len(s) + 1) if "aa" in s[:k] or "aba" in s[:k]]
        assert aut.accepts(w) == (bool(hits) and hits[0] == len(s))
