"""Truncated multivariate power series and loop-graph path generating functions."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

DEFAULT_DEGREE = 64


class SeriesError(ValueError):
    pass


class DivergentLoop(ArithmeticError):
    """A geometric factor 1/(1-u) with u >= 1."""


class TruncatedSeries:
    """Sum of ``c * x^m`` over exponent vectors ``m`` with ``|m| < max_degree``.

    Coefficients are ints or Fractions; zero coefficients are never stored.
    Binary operations truncate to the smaller of the two bounds.
    """

    __slots__ = ("num_vars", "max_degree", "terms")

    def __init__(self, num_vars: int, max_degree: int, terms: Mapping | None = None):
        self.num_vars = num_vars
        self.max_degree = max_degree
        self.terms: dict[tuple[int, ...], Rational] = {}
        for m, c in (terms or {}).items():
            m = tuple(m)
            if len(m) != num_vars:
                raise SeriesError(f"exponent {m} has wrong length for {num_vars} variables")
            if c != 0 and sum(m) < max_degree:
                self.terms[m] = c

    @classmethod
    def constant(cls, num_vars: int, max_degree: int, c=1) -> "TruncatedSeries":
        return cls(num_vars, max_degree, {(0,) * num_vars: c})

    @classmethod
    def variable(cls, i: int, num_vars: int, max_degree: int, coef=1) -> "TruncatedSeries":
        m = [0] * num_vars
        m[i] = 1
        return cls(num_vars, max_degree, {tuple(m): coef})

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            if other.num_vars != self.num_vars:
                raise SeriesError("series have different numbers of variables")
            return other
        if isinstance(other, Rational):
            return TruncatedSeries.constant(self.num_vars, self.max_degree, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return TruncatedSeries(self.num_vars, min(self.max_degree, other.max_degree), out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.num_vars, self.max_degree, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Rational):
            return TruncatedSeries(self.num_vars, self.max_degree, {m: c * other for m, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        T = min(self.max_degree, other.max_degree)
        out: dict[tuple[int, ...], Rational] = {}
        right = [(m, sum(m), c) for m, c in other.terms.items()]
        for m1, c1 in self.terms.items():
            d1 = sum(m1)
            for m2, d2, c2 in right:
                if d1 + d2 >= T:
                    continue
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return TruncatedSeries(self.num_vars, T, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (
            self.num_vars == other.num_vars
            and self.max_degree == other.max_degree
            and self.terms == other.terms
        )

    def __repr__(self):
        return f"TruncatedSeries({self.num_vars}, {self.max_degree}, {self.format()!r})"

    def __str__(self):
        return self.format()

    def format(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or [f"x{i + 1}" for i in range(self.num_vars)]
        parts = []
        for m in sorted(self.terms, key=lambda m: (sum(m), tuple(-e for e in m))):
            c = Fraction(self.terms[m])
            coef = str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
            mono = " ".join(
                names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(m) if e
            )
            parts.append(f"{coef} {mono}".strip())
        return " + ".join(parts)

    @property
    def constant_term(self):
        return self.terms.get((0,) * self.num_vars, 0)

    def coefficient(self, m: Sequence[int]):
        return self.terms.get(tuple(m), 0)

    def truncate(self, max_degree: int) -> "TruncatedSeries":
        return TruncatedSeries(self.num_vars, min(max_degree, self.max_degree), self.terms)

    def homogeneous(self, d: int) -> "TruncatedSeries":
        return TruncatedSeries(
            self.num_vars, self.max_degree, {m: c for m, c in self.terms.items() if sum(m) == d}
        )

    def geometric(self) -> "TruncatedSeries":
        """``1 + u + u^2 + ...`` truncated; ``u`` must have zero constant term."""
        if self.constant_term != 0:
            raise SeriesError("geometric series of a series with nonzero constant term")
        one = TruncatedSeries.constant(self.num_vars, self.max_degree)
        total, power = one, one
        while True:
            power = power * self
            if not power.terms:
                return total
            total = total + power

    def cauchy_euler(self) -> "TruncatedSeries":
        """Apply ``sum_i x_i d/dx_i``: each monomial is scaled by its total degree."""
        return TruncatedSeries(
            self.num_vars, self.max_degree, {m: c * sum(m) for m, c in self.terms.items()}
        )

    def graded(self, x: Sequence) -> list[Fraction]:
        """``[value of the degree-d part at x for d < max_degree]``."""
        out = [Fraction(0)] * self.max_degree
        powers = [[Fraction(1)] for _ in range(self.num_vars)]
        for m, c in self.terms.items():
            term = Fraction(c)
            for i, e in enumerate(m):
                if e:
                    p = powers[i]
                    while len(p) <= e:
                        p.append(p[-1] * Fraction(x[i]))
                    term *= p[e]
            out[sum(m)] += term
        return out

    def evaluate(self, x: Sequence) -> Fraction:
        return sum(self.graded(x), Fraction(0))


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a + b


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b


def series_geometric(u: TruncatedSeries) -> TruncatedSeries:
    return u.geometric()


def cauchy_euler(s: TruncatedSeries) -> TruncatedSeries:
    return s.cauchy_euler()


# ---------------------------------------------------------------- loop graphs


@dataclass(frozen=True)
class Loop:
    """A directed cycle of letters leaving and re-entering vertex ``at``.

    ``at`` indexes vertices of the parent path: for a spine of length L,
    0 is the root and L the endpoint; for a loop of length m, sub-loops may
    only sit on its internal vertices 1..m-1.
    """

    at: int
    word: tuple[str, ...]
    loops: tuple["Loop", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(str(a) for a in self.word))
        object.__setattr__(self, "loops", tuple(self.loops))
        if not self.word:
            raise SeriesError("loop of length 0")
        for sub in self.loops:
            if not 1 <= sub.at < len(self.word):
                raise SeriesError(
                    f"sub-loop anchored at {sub.at} outside internal vertices of {self.word}"
                )

    def to_json(self) -> dict:
        return {"at": self.at, "word": list(self.word), "loops": [s.to_json() for s in self.loops]}

    @classmethod
    def from_json(cls, doc: Mapping) -> "Loop":
        return cls(int(doc["at"]), tuple(doc["word"]), tuple(cls.from_json(s) for s in doc.get("loops", ())))


@dataclass(frozen=True)
class LoopGraph:
    """A straight path from the root to an endpoint with loops attached recursively.

    Loops at the root (vertex 0) are accepted: they stand for a unit-probability
    edge into a renamed root, which changes neither degrees nor weights.
    """

    spine: tuple[str, ...]
    loops: tuple[Loop, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "spine", tuple(str(a) for a in self.spine))
        object.__setattr__(self, "loops", tuple(self.loops))
        if not self.spine:
            raise SeriesError("loop graph spine is empty")
        for loop in self.loops:
            if not 0 <= loop.at < len(self.spine):
                raise SeriesError(f"loop anchored at {loop.at}; the endpoint and beyond are not allowed")

    @property
    def letters(self) -> list[str]:
        seen: dict[str, None] = dict.fromkeys(self.spine)

        def walk(loops):
            for lp in loops:
                seen.update(dict.fromkeys(lp.word))
                walk(lp.loops)

        walk(self.loops)
        return list(seen)

    def to_json(self) -> dict:
        return {"spine": list(self.spine), "loops": [lp.to_json() for lp in self.loops]}

    @classmethod
    def from_json(cls, doc) -> "LoopGraph":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(tuple(doc["spine"]), tuple(Loop.from_json(lp) for lp in doc.get("loops", ())))

    def edges(self) -> tuple[int, list[tuple[int, str, int]], int]:
        """Explicit graph: ``(num_vertices, [(u, letter, v)], endpoint)``; root is 0."""
        edges = []
        L = len(self.spine)
        for i, a in enumerate(self.spine):
            edges.append((i, a, i + 1))
        count = L + 1

        def attach(loops, vertex_of):
            nonlocal count
            for lp in loops:
                anchor = vertex_of(lp.at)
                inner = list(range(count, count + len(lp.word) - 1))
                count += len(lp.word) - 1
                path = [anchor] + inner + [anchor]
                for k, a in enumerate(lp.word):
                    edges.append((path[k], a, path[k + 1]))
                attach(lp.loops, lambda j, path=path: path[j])

        attach(self.loops, lambda j: j)
        return count, edges, L


def _var_index(letters: Sequence[str]) -> dict[str, int]:
    return {str(a): i for i, a in enumerate(letters)}


def loop_graph_series(
    G: LoopGraph,
    T: int = DEFAULT_DEGREE,
    letters: Sequence[str] | None = None,
    weights: Mapping[str, Fraction] | None = None,
) -> TruncatedSeries:
    """Path generating function of ``G`` truncated below total degree ``T``.

    Multivariate in ``letters`` by default.  With ``weights`` the result is
    the univariate series in a length variable ``z``, i.e. every ``x_a`` is
    replaced by ``weights[a] * z``.
    """
    if weights is not None:
        nv = 1

        def var(a):
            return TruncatedSeries.variable(0, 1, T, Fraction(weights[a]))
    else:
        letters = list(letters) if letters is not None else G.letters
        idx = _var_index(letters)
        nv = len(letters)

        def var(a):
            return TruncatedSeries.variable(idx[a], nv, T)

    def factor(loops: Iterable[Loop]) -> TruncatedSeries:
        u = TruncatedSeries(nv, T)
        for lp in loops:
            u = u + loop_mass(lp)
        return u.geometric()

    def loop_mass(lp: Loop) -> TruncatedSeries:
        s = TruncatedSeries.constant(nv, T)
        for a in lp.word:
            s = s * var(a)
        for v in sorted({sub.at for sub in lp.loops}):
            s = s * factor(sub for sub in lp.loops if sub.at == v)
        return s

    s = TruncatedSeries.constant(nv, T)
    for a in G.spine:
        s = s * var(a)
    for v in sorted({lp.at for lp in G.loops}):
        s = s * factor(lp for lp in G.loops if lp.at == v)
    return s


def _weights(alphabet) -> dict[str, Fraction]:
    if isinstance(alphabet, Mapping):
        return {str(k): Fraction(v) for k, v in alphabet.items()}
    probs = alphabet.require_stochastic()
    return dict(zip(alphabet.letters, probs))


def _anchor_stats(loops: Sequence[Loop], x: Mapping[str, Fraction]) -> tuple[Fraction, Fraction]:
    """``(u, CE(u))`` for the loops sitting on one vertex."""
    u = Fraction(0)
    ce = Fraction(0)
    for lp in loops:
        mass = Fraction(1)
        length = Fraction(len(lp.word))
        for a in lp.word:
            mass *= x[a]
        for v in sorted({sub.at for sub in lp.loops}):
            su, sce = _anchor_stats([s for s in lp.loops if s.at == v], x)
            mass /= 1 - su
            length += sce / (1 - su)
        u += mass
        ce += mass * length
    if u >= 1:
        raise DivergentLoop(f"loop mass {u} >= 1")
    return u, ce


def loop_graph_value(G: LoopGraph, alphabet) -> Fraction:
    """Closed form of the path sum: spine product times geometric factors."""
    x = _weights(alphabet)
    val = Fraction(1)
    for a in G.spine:
        val *= x[a]
    for v in sorted({lp.at for lp in G.loops}):
        u, _ = _anchor_stats([lp for lp in G.loops if lp.at == v], x)
        val /= 1 - u
    return val


def loop_graph_survival(G: LoopGraph, alphabet, t: int) -> Fraction:
    """``Pr_G(tau >= t) = 1 - Psi_G^{<t}(x) / Psi_G(x)``."""
    if t <= 0:
        return Fraction(1)
    x = _weights(alphabet)
    total = loop_graph_value(G, x)
    head = loop_graph_series(G, t, weights=x).evaluate([1])
    return 1 - head / total


def loop_graph_expectation(G: LoopGraph, alphabet) -> Fraction:
    """``(sum_i x_i d/dx_i) ln Psi_G``, evaluated in closed form."""
    x = _weights(alphabet)
    E = Fraction(len(G.spine))
    for v in sorted({lp.at for lp in G.loops}):
        u, ce = _anchor_stats([lp for lp in G.loops if lp.at == v], x)
        E += ce / (1 - u)
    return E


def single_loop_graph() -> LoopGraph:
    """Root --1--> r --3--> s with the letter 2 looping at r."""
    return LoopGraph(("1", "3"), (Loop(1, ("2",)),))
