"""Brute-force reference computations, written without the library's solvers."""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb

import sympy


def compose(u: tuple, a: tuple) -> tuple:
    """``(u.a)(x) = u(a(x))``."""
    return tuple(u[a[x]] for x in range(len(a)))


def closure(gens: list[tuple]) -> set[tuple]:
    """Hash-set fixpoint of right multiplication by the generators."""
    seen = set(gens)
    frontier = list(gens)
    while frontier:
        nxt = []
        for u in frontier:
            for a in gens:
                v = compose(u, a)
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return seen


def kernel(elements: set[tuple]) -> set[tuple]:
    """Intersection of all two-sided principal ideals ``S s S``."""
    els = list(elements)
    ideals = []
    for s in els:
        ideals.append({compose(compose(x, s), y) for x in els for y in els} | {compose(x, s) for x in els})
    out = set(els)
    for I in ideals:
        out &= I
    return out


def stationary_sympy(T: list[list]) -> list[Fraction]:
    """Unique probability vector fixed by the column-stochastic ``T``."""
    n = len(T)
    M = sympy.Matrix([[sympy.Rational(str(Fraction(T[i][j]))) for j in range(n)] for i in range(n)])
    ns = (M - sympy.eye(n)).nullspace()
    assert len(ns) == 1, "chain is not ergodic"
    v = ns[0]
    v = v / sum(v)
    return [Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in v]


def left_action_matrix(tables: list[list[int]], probs: list[Fraction], n: int) -> list[list[Fraction]]:
    T = [[Fraction(0)] * n for _ in range(n)]
    for tab, p in zip(tables, probs):
        for s in range(n):
            T[tab[s]][s] += Fraction(p)
    return T


def word_weight(word, probs: dict) -> Fraction:
    w = Fraction(1)
    for a in word:
        w *= probs[a]
    return w


def survival_by_words(gens: dict[str, tuple], probs: dict[str, Fraction], in_kernel, t: int) -> Fraction:
    """``Pr(tau > t)``: total weight of length-``t`` words whose product is outside the kernel.

    Enumerates every word, so keep ``|A|^t`` small.
    """
    if t == 0:
        return Fraction(1)
    letters = list(gens)
    total = Fraction(0)
    for w in product(letters, repeat=t):
        u = gens[w[0]]
        for a in w[1:]:
            u = compose(u, gens[a])
        if not in_kernel(u):
            total += word_weight(w, probs)
    return total


def contains(word, pattern) -> bool:
    m = len(pattern)
    return any(tuple(word[i : i + m]) == tuple(pattern) for i in range(len(word) - m + 1))


def pattern_waiting_time(pattern: str, probs: dict[str, Fraction]) -> Fraction:
    """Mean first-occurrence time of ``pattern`` via sympy on the overlap chain."""
    m = len(pattern)
    states = list(range(m))

    def nxt(k, a):
        s = pattern[:k] + a
        for j in range(min(len(s), m), -1, -1):
            if s.endswith(pattern[:j]) and j <= len(s):
                return j
        return 0

    E = sympy.symbols(f"e0:{m}")
    eqs = []
    for k in states:
        rhs = 1
        for a, p in probs.items():
            j = nxt(k, a)
            if j < m:
                rhs += sympy.Rational(p.numerator, p.denominator) * E[j]
        eqs.append(sympy.Eq(E[k], rhs))
    sol = sympy.solve(eqs, E)
    v = sympy.nsimplify(sol[E[0]])
    return Fraction(int(v.p), int(v.q))


def paths_by_length(edges, start: int, end: int, probs: dict, max_len: int) -> list[Fraction]:
    """Weight of ``start -> end`` walks of each exact length (end is absorbing)."""
    mass = {start: Fraction(1)}
    out = [Fraction(0)] * (max_len + 1)
    for L in range(1, max_len + 1):
        new: dict[int, Fraction] = {}
        for u, m in mass.items():
            if u == end:
                continue
            for (a_u, a, v) in edges:
                if a_u == u:
                    new[v] = new.get(v, Fraction(0)) + m * probs[a]
        out[L] = new.get(end, Fraction(0))
        mass = new
    return out


def binomial_tail(p: Fraction, L: int, t: int) -> Fraction:
    return sum((comb(t, i) * p**i * (1 - p) ** (t - i) for i in range(L)), Fraction(0))
