"""Factor ideals ``A* t A*``: Test automata, loop words and waiting times.

Two transition rules are provided for the prefix automaton of a word ``t``.

``reset``
    ``q -a-> qa`` when ``qa`` is a prefix of ``t``, otherwise back to the root.
    Its cycles through the root are exactly the loop words ``W_t`` and its
    absorption time has the closed forms ``psi_test`` / ``expected_tau_test``.
    It recognises ``A* t A*`` only when ``t`` has no self-overlap that the
    reset forgets (for example ``t = a^l`` over two letters).

``suffix``
    ``q -a-> `` the longest suffix of ``qa`` that is a prefix of ``t``.  This is
    the pattern-matching automaton and recognises ``A* t A*`` for every ``t``;
    its absorption time is the waiting time for the first occurrence of ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .absorption import SemaphoreAutomaton, expected_tau, survival_curve
from .semigroup import Alphabet
from .series import DivergentLoop, Loop, LoopGraph

RULES = ("suffix", "reset")


class LanguageError(ValueError):
    pass


class ContainmentNotCertified(LanguageError):
    """The first ideal is not shown to lie inside the second."""


def as_word(t) -> tuple[str, ...]:
    """A word is a string of one-character letters or a sequence of labels."""
    if isinstance(t, str):
        return tuple(t)
    return tuple(str(a) for a in t)


def _letters(alphabet) -> tuple[str, ...]:
    if isinstance(alphabet, Alphabet):
        return alphabet.letters
    if isinstance(alphabet, Mapping):
        return tuple(str(a) for a in alphabet)
    return as_word(alphabet)


@dataclass(frozen=True)
class TestAutomaton:
    """States ``0..l``: state ``i`` is the prefix of length ``i``; ``l`` is the sink."""

    __test__ = False  # not a pytest class

    word: tuple[str, ...]
    letters: tuple[str, ...]
    rule: str
    step: tuple[tuple[int, ...], ...]

    @property
    def length(self) -> int:
        return len(self.word)

    def state_label(self, i: int) -> str:
        if i == 0:
            return "𝟙"
        return "".join(self.word[:i]) if all(len(a) == 1 for a in self.word) else ",".join(self.word[:i])

    def accepts(self, w) -> bool:
        q = 0
        for a in as_word(w):
            q = self.step[q][self.letters.index(a)]
        return q == self.length

    def semaphore(self) -> SemaphoreAutomaton:
        """The transient prefix states with the sink as the single target."""
        l = self.length
        return SemaphoreAutomaton(
            letters=self.letters,
            state_labels=tuple(self.state_label(i) for i in range(l)),
            target_labels=(self.state_label(l),),
            step=tuple(self.step[:l]),
        )

    def dot(self, name: str = "Test") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for i in range(self.length + 1):
            shape = ", shape=doublecircle" if i == self.length else ""
            lines.append(f'  s{i} [label="{self.state_label(i)}"{shape}];')
        for i, row in enumerate(self.step):
            grouped: dict[int, list[str]] = {}
            for a, j in enumerate(row):
                grouped.setdefault(j, []).append(self.letters[a])
            for j, labs in grouped.items():
                lines.append(f'  s{i} -> s{j} [label="{",".join(labs)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_test_automaton(t, alphabet, rule: str = "suffix") -> TestAutomaton:
    word = as_word(t)
    letters = _letters(alphabet)
    if not word:
        raise LanguageError("the test word is empty")
    if rule not in RULES:
        raise LanguageError(f"unknown rule {rule!r}; choose from {RULES}")
    missing = set(word) - set(letters)
    if missing:
        raise LanguageError(f"letters {sorted(missing)} are not in the alphabet")
    l = len(word)
    rows = []
    for i in range(l):
        row = []
        for a in letters:
            if word[i] == a:
                row.append(i + 1)
            elif rule == "reset":
                row.append(0)
            else:
                s = word[:i] + (a,)
                k = len(s) - 1
                while k > 0 and s[len(s) - k :] != word[:k]:
                    k -= 1
                row.append(k)
        rows.append(tuple(row))
    rows.append(tuple(l for _ in letters))
    return TestAutomaton(word, letters, rule, tuple(rows))


def pattern_automaton(patterns: Sequence, alphabet) -> SemaphoreAutomaton:
    """First entrance into ``union_i A* t_i A*``: states are proper prefixes of the patterns."""
    pats = [as_word(p) for p in patterns]
    letters = _letters(alphabet)
    if not pats or any(not p for p in pats):
        raise LanguageError("patterns must be nonempty words")
    prefixes = {()}
    for p in pats:
        for k in range(1, len(p)):
            prefixes.add(p[:k])
    prefixes = {s for s in prefixes if not any(_contains(s, p) for p in pats)}
    states = sorted(prefixes, key=lambda s: (len(s), s))
    idx = {s: i for i, s in enumerate(states)}
    n = len(states)
    step = []
    for s in states:
        row = []
        for a in letters:
            u = s + (a,)
            if any(_contains(u, p) for p in pats):
                row.append(n)
                continue
            k = len(u)
            while u[len(u) - k :] not in idx:
                k -= 1
            row.append(idx[u[len(u) - k :]])
        step.append(tuple(row))

    def label(s):
        return "𝟙" if not s else "".join(s)

    return SemaphoreAutomaton(
        letters=letters,
        state_labels=tuple(label(s) for s in states),
        target_labels=("|".join("".join(p) for p in pats),),
        step=tuple(step),
    )


def _contains(u: tuple, p: tuple) -> bool:
    m = len(p)
    return any(u[i : i + m] == p for i in range(len(u) - m + 1))


def loop_words(t, alphabet) -> list[tuple[str, ...]]:
    """``W_t``: words ``w`` with ``|w| <= l``, ``w`` not a prefix of ``t`` but ``w`` minus its last letter is."""
    word = as_word(t)
    letters = _letters(alphabet)
    if not word:
        raise LanguageError("the test word is empty")
    out = []
    for k in range(len(word)):
        for a in letters:
            if a != word[k]:
                out.append(word[:k] + (a,))
    return out


def test_loop_graph(t, alphabet) -> LoopGraph:
    """Spine ``t`` with every loop word of ``W_t`` attached at the root."""
    return LoopGraph(as_word(t), tuple(Loop(0, w) for w in loop_words(t, alphabet)))


test_loop_graph.__test__ = False  # type: ignore[attr-defined]


def _weights(alphabet) -> dict[str, Fraction]:
    """Letter weights from an ``Alphabet`` or a ``{letter: weight}`` mapping."""
    if isinstance(alphabet, Mapping):
        return {str(a): Fraction(p) for a, p in alphabet.items()}
    return dict(zip(alphabet.letters, alphabet.require_stochastic()))


def _loop_mass(t, alphabet) -> tuple[Fraction, Fraction]:
    x = _weights(alphabet)
    u = ce = Fraction(0)
    for w in loop_words(t, alphabet):
        m = Fraction(1)
        for a in w:
            m *= x[a]
        u += m
        ce += len(w) * m
    if u >= 1:
        raise DivergentLoop(f"loop-word mass {u} >= 1")
    return u, ce


def psi_test(t, alphabet: Alphabet) -> Fraction:
    """``x_t / (1 - sum_{w in W_t} x_w)``."""
    x = _weights(alphabet)
    num = Fraction(1)
    for a in as_word(t):
        num *= x[a]
    u, _ = _loop_mass(t, alphabet)
    return num / (1 - u)


def expected_tau_test(t, alphabet: Alphabet) -> Fraction:
    """``l + sum |w| x_w / (1 - sum x_w)`` over ``W_t``."""
    u, ce = _loop_mass(t, alphabet)
    return len(as_word(t)) + ce / (1 - u)


def pattern_waiting_time(t, alphabet: Alphabet) -> Fraction:
    """Expected number of letters until ``t`` first occurs as a factor."""
    return expected_tau(pattern_automaton([t], alphabet), alphabet)[0]


def certify_containment(gens1: Sequence, gens2: Sequence) -> bool:
    """``union A* u A*`` (u in gens1) lies in ``union A* v A*`` (v in gens2)
    iff every ``u`` has some ``v`` as a factor."""
    g1 = [as_word(u) for u in gens1]
    g2 = [as_word(v) for v in gens2]
    return all(any(_contains(u, v) for v in g2) for u in g1)


@dataclass
class IdealComparison:
    gens1: list[tuple[str, ...]]
    gens2: list[tuple[str, ...]]
    survival1: list[Fraction]
    survival2: list[Fraction]
    violations: list[int]

    @property
    def ordering_holds(self) -> bool:
        return not self.violations


def ideal_principle_compare(gens1: Sequence, gens2: Sequence, alphabet: Alphabet, t_max: int) -> IdealComparison:
    """Check ``Pr_2(tau > t) <= Pr_1(tau > t)`` when ``I_1`` is certified inside ``I_2``."""
    if not certify_containment(gens1, gens2):
        raise ContainmentNotCertified(
            "some generator of the first ideal contains no generator of the second as a factor"
        )
    s1 = survival_curve(pattern_automaton(gens1, alphabet), alphabet, t_max)
    s2 = survival_curve(pattern_automaton(gens2, alphabet), alphabet, t_max)
    bad = [t for t in range(t_max + 1) if s2[t] > s1[t]]
    return IdealComparison([as_word(u) for u in gens1], [as_word(v) for v in gens2], s1, s2, bad)


def words_up_to(letters: Sequence[str], max_len: int):
    for l in range(max_len + 1):
        yield from product(letters, repeat=l)


def loop_graph_dot(G: LoopGraph, name: str = "LoopGraph") -> str:
    n, edges, end = G.edges()
    lines = [f"digraph {name} {{"]
    for v in range(n):
        if v == 0:
            lab = "𝟙"
        elif v <= end:
            lab = "".join(G.spine[:v])
        else:
            lab = "•"
        lines.append(f'  v{v} [label="{lab}"];')
    for u, a, v in edges:
        lines.append(f'  v{u} -> v{v} [label="{a}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
