from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semimix.chains import harmonic, tsetlin_loop_graph
from semimix.series import (
    DivergentLoop,
    Loop,
    LoopGraph,
    SeriesError,
    TruncatedSeries,
    cauchy_euler,
    loop_graph_expectation,
    loop_graph_series,
    loop_graph_survival,
    loop_graph_value,
    series_add,
    series_geometric,
    series_mul,
    single_loop_graph,
)

from . import oracles


def x(i, T=5, n=3):
    return TruncatedSeries.variable(i, n, T)


def test_geometric_of_variable():
    g = series_geometric(x(1))
    assert g.terms == {(0, k, 0): 1 for k in range(5)}


def test_single_loop_expansion():
    s = series_mul(x(0) * x(2), series_geometric(x(1)))
    assert s.terms == {(1, 0, 1): 1, (1, 1, 1): 1, (1, 2, 1): 1}
    assert s == loop_graph_series(single_loop_graph(), 5, letters=["1", "2", "3"])


def test_identities_and_truncation():
    s = x(0) + x(1) * x(2)
    zero = TruncatedSeries(3, 5)
    one = TruncatedSeries.constant(3, 5)
    assert series_add(s, zero) == s
    assert series_mul(s, one) == s
    assert (x(0, T=3) * x(0, T=5)).max_degree == 3
    assert (x(0, T=3) * x(0, T=3) * x(0, T=3)).terms == {}
    assert all(sum(m) < 3 for m in (x(0, T=3) + x(1, T=3) * x(2, T=3)).terms)
    with pytest.raises(SeriesError):
        series_geometric(one)


def test_cauchy_euler():
    assert cauchy_euler(TruncatedSeries.constant(3, 5, 7)).terms == {}
    s = x(0) * x(2) + x(0) * x(1) * x(2)
    assert cauchy_euler(s).terms == {(1, 0, 1): 2, (1, 1, 1): 3}
    assert "x1" in s.format()


@settings(max_examples=30, deadline=None)
@given(
    st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.fractions(-5, 5), max_size=5),
    st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.fractions(-5, 5), max_size=5),
)
def test_cauchy_euler_is_derivation(a, b):
    f = TruncatedSeries(2, 7, a)
    g = TruncatedSeries(2, 7, b)
    assert cauchy_euler(f * g) == cauchy_euler(f) * g + f * cauchy_euler(g)


@pytest.mark.parametrize("p", [Fraction(1, 4), Fraction(1, 2), Fraction(2, 3)])
def test_single_loop_closed_forms(p):
    G = single_loop_graph()
    probs = {"1": (1 - p) / 2, "2": p, "3": (1 - p) / 2}
    assert loop_graph_value(G, probs) == probs["1"] * probs["3"] / (1 - p)
    assert loop_graph_survival(G, probs, 0) == 1
    for t in range(2, 25):
        assert loop_graph_survival(G, probs, t) == p ** (t - 2)
    assert loop_graph_expectation(G, probs) == 1 + 1 / (1 - p)
    # Cauchy-Euler ratio on the truncated series approaches the expectation
    s = loop_graph_series(G, 60, letters=["1", "2", "3"])
    xs = [probs["1"], probs["2"], probs["3"]]
    approx = cauchy_euler(s).evaluate(xs) / s.evaluate(xs)
    assert abs(float(approx) - float(1 + 1 / (1 - p))) < 100 * float(p) ** 55


def test_bare_spine():
    G = LoopGraph(("a", "b", "c"))
    s = loop_graph_series(G, 10)
    assert s.terms == {(1, 1, 1): 1}
    assert loop_graph_expectation(G, {"a": Fraction(1, 3), "b": Fraction(1, 3), "c": Fraction(1, 3)}) == 3


def test_divergent_loop():
    G = LoopGraph(("a",), (Loop(0, ("a",)), Loop(0, ("b",))))
    with pytest.raises(DivergentLoop):
        loop_graph_value(G, {"a": Fraction(1, 2), "b": Fraction(1, 2)})


def test_loop_anchor_validation():
    with pytest.raises(SeriesError):
        LoopGraph(("a",), (Loop(1, ("b",)),))
    with pytest.raises(SeriesError):
        Loop(0, ("a", "b"), (Loop(2, ("c",)),))


def test_json_round_trip():
    G = LoopGraph(("1", "2"), (Loop(1, ("3", "4"), (Loop(1, ("5",)),)),))
    assert LoopGraph.from_json(G.to_json()) == G


def tsetlin_weights(n):
    return {str(i): Fraction(1, n) for i in range(1, n + 1)}


def test_tsetlin_loop_graph_series():
    G = tsetlin_loop_graph((1, 2, 3))
    s = loop_graph_series(G, 9, letters=["1", "2", "3"])
    # closed form x1 x2 x3 / ((1 - x1)(1 - x1 - x2)) expanded independently
    x1, x2, x3 = (TruncatedSeries.variable(i, 3, 9) for i in range(3))
    ref = x1 * x2 * x3 * x1.geometric() * (x1 + x2).geometric()
    assert s == ref


def test_degree_matches_path_length():
    G = LoopGraph(("1", "2", "3"), (Loop(1, ("1",)), Loop(2, ("1", "2"), (Loop(1, ("3",)),)), Loop(2, ("2",))))
    probs = {"1": Fraction(1, 5), "2": Fraction(3, 10), "3": Fraction(1, 2)}
    n, edges, end = G.edges()
    by_len = oracles.paths_by_length(edges, 0, end, probs, 12)
    graded = loop_graph_series(G, 13, weights=probs)
    for L in range(13):
        assert graded.coefficient((L,)) == by_len[L]


def test_tsetlin_survival_and_expectation():
    G = tsetlin_loop_graph((1, 2, 3))
    probs = tsetlin_weights(3)
    n, edges, end = G.edges()
    by_len = oracles.paths_by_length(edges, 0, end, probs, 40)
    total = loop_graph_value(G, probs)
    prev = Fraction(1)
    for t in range(1, 13):
        tail = 1 - sum(by_len[:t]) / total
        surv = loop_graph_survival(G, probs, t)
        assert surv == tail
        assert 0 <= surv <= prev
        prev = surv
    # the whole Tsetlin chain at uniform weights: n H_n, each order contributes the same
    assert loop_graph_expectation(G, probs) == 3 * harmonic(3) == Fraction(11, 2)
