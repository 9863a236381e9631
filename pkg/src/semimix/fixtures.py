"""Small named models used as regression fixtures and CLI builtins."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from .absorption import SemaphoreAutomaton
from .semigroup import FiniteSemigroup, Transformation, generate_semigroup, left_regular_representation

ZERO = "0"


def markov_linear() -> FiniteSemigroup:
    """Two states; letters 1 and 2 are the constant maps, letter 3 swaps."""
    gens = [Transformation((0, 0)), Transformation((1, 1)), Transformation((1, 0))]
    return generate_semigroup(gens, ["1", "2", "3"])


def min_semigroup(n: int) -> tuple[FiniteSemigroup, list]:
    """``{0, ..., n}`` under minimum, generated by all its elements (letter ``i`` is ``i``)."""
    elements = list(range(n + 1))
    return left_regular_representation(elements, min, elements, [str(i) for i in elements])


def rees_with_zero(
    group: Sequence,
    gmul: Callable,
    sandwich: Sequence[Sequence],
    generators: Sequence[tuple],
    labels: Sequence[str],
) -> tuple[FiniteSemigroup, list]:
    """``I x G x I' ∪ {0}`` with ``(i, g, i')(j, h, j') = (i, g p[i'][j] h, j')`` or 0 when
    ``p[i'][j]`` is ``None``.  Indices are 1-based."""
    rows = range(1, len(sandwich[0]) + 1)
    cols = range(1, len(sandwich) + 1)
    elements = [(i, g, k) for i in rows for g in group for k in cols] + [ZERO]

    def mul(u, v):
        if u == ZERO or v == ZERO:
            return ZERO
        i, g, k = u
        j, h, l = v
        p = sandwich[k - 1][j - 1]
        if p is None:
            return ZERO
        return (i, gmul(gmul(g, p), h), l)

    return left_regular_representation(elements, mul, list(generators), list(labels))


def b2() -> tuple[FiniteSemigroup, list]:
    """Brandt semigroup ``B(2)`` with ``a = (1, 2)``, ``b = (2, 1)``; ``aa = bb = 0``."""
    return rees_with_zero([1], lambda g, h: 1, [[1, None], [None, 1]], [(1, 1, 2), (2, 1, 1)], ["a", "b"])


def rees_aa() -> tuple[FiniteSemigroup, list]:
    """Trivial group, ``P = [[1, 1], [0, 1]]`` with 0 read as the adjoined zero;
    ``a = (1, 2)``, ``b = (2, 1)``.  The ideal sent to zero is ``A* aa A*``."""
    return rees_with_zero([1], lambda g, h: 1, [[1, 1], [None, 1]], [(1, 1, 2), (2, 1, 1)], ["a", "b"])


def rees_z2() -> tuple[FiniteSemigroup, list]:
    """As :func:`rees_aa` over the two-element group, with an extra generator
    ``c = (1, -1, 2)``.  Its syntactic image identifies ``a`` with ``c``."""
    return rees_with_zero(
        [1, -1],
        lambda g, h: g * h,
        [[1, 1], [None, 1]],
        [(1, 1, 2), (2, 1, 1), (1, -1, 2)],
        ["a", "b", "c"],
    )


def single_loop_automaton() -> SemaphoreAutomaton:
    """Code words ``1 2^k 3`` end at target ``s``; every other exit goes to ``z``."""
    return SemaphoreAutomaton.from_transitions(
        ["1", "2", "3"],
        {"𝟙": {"1": "r", "2": "z", "3": "z"}, "r": {"1": "z", "2": "r", "3": "s"}},
        ["s", "z"],
        root="𝟙",
    )


def single_loop_walk() -> SemaphoreAutomaton:
    """Any first letter enters ``r``; letter 2 loops there, so ``Pr(tau >= t) = x_2^{t-2}``."""
    return SemaphoreAutomaton.from_transitions(
        ["1", "2", "3"],
        {"𝟙": {"1": "r", "2": "r", "3": "r"}, "r": {"1": "s", "2": "r", "3": "s"}},
        ["s"],
        root="𝟙",
    )


def point_mass_automaton() -> SemaphoreAutomaton:
    """One letter; the root steps straight to the only target."""
    return SemaphoreAutomaton(("a",), ("𝟙",), ("w",), ((1,),))


def single_loop_probs(p: Fraction) -> tuple[Fraction, Fraction, Fraction]:
    """``x_2 = p`` with the remaining mass split evenly between letters 1 and 3."""
    p = Fraction(p)
    return ((1 - p) / 2, p, (1 - p) / 2)
