"""First-passage analysis of the semaphore automaton.

The transient states are ``S¹ \\ K(S)`` with the adjoined identity as root.  A
random letter ``a`` moves ``s`` to ``s·a``; the first time the product lands
in ``K(S)`` the walk stops and records the landing element.  The prefix read
so far is a semaphore code word and its length is the absorption time tau.

Survival convention: ``survival[t] = Pr(tau > t)``; the quantity
``Pr(tau >= t)`` is ``survival[t-1]``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix, identity
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import spsolve

from .linalg import SingularSystem, nullspace, solve_substochastic
from .semigroup import Alphabet, FiniteSemigroup, IdealInfo, SemigroupError, format_fraction, minimal_ideal
from .series import TruncatedSeries

SERIES_WORK_CAP = 10**8
DEFAULT_S_GRID = tuple(0.01 * k for k in range(1, 501))


class NotLeftZero(SemigroupError):
    """The minimal ideal is not a left zero semigroup."""


class UnreachableTarget(ValueError):
    pass


class NotErgodic(ArithmeticError):
    """The fixed space of the transition matrix is not one-dimensional."""


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class SemaphoreAutomaton:
    """Transient states ``0..n-1`` (0 is the root) and targets ``0..k-1``.

    ``step[q][a]`` is a transient index when ``< n_transient``; otherwise it
    encodes target ``step[q][a] - n_transient``.
    """

    letters: tuple[str, ...]
    state_labels: tuple[str, ...]
    target_labels: tuple[str, ...]
    step: tuple[tuple[int, ...], ...]
    state_elements: tuple[int, ...] | None = None
    target_elements: tuple[int, ...] | None = None

    def __post_init__(self):
        n = len(self.state_labels)
        total = n + len(self.target_labels)
        if n == 0:
            raise SemigroupError("automaton has no root")
        if len(self.step) != n or any(len(r) != len(self.letters) for r in self.step):
            raise SemigroupError("step table must be total over transient states and letters")
        if any(not 0 <= j < total for r in self.step for j in r):
            raise SemigroupError("step entry out of range")
        # every transient state must reach a target
        alive = set()
        changed = True
        while changed:
            changed = False
            for q, row in enumerate(self.step):
                if q not in alive and any(j >= n or j in alive for j in row):
                    alive.add(q)
                    changed = True
        if len(alive) != n:
            dead = sorted(set(range(n)) - alive)
            raise SemigroupError(f"states {dead} never reach the minimal ideal")

    @property
    def n_transient(self) -> int:
        return len(self.state_labels)

    @property
    def n_targets(self) -> int:
        return len(self.target_labels)

    def is_target(self, j: int) -> bool:
        return j >= self.n_transient

    @classmethod
    def from_transitions(
        cls,
        letters: Sequence[str],
        transitions: Mapping[str, Mapping[str, str]],
        targets: Sequence[str],
        root: str,
    ) -> "SemaphoreAutomaton":
        """Build from ``transitions[state][letter] = next`` with named states."""
        letters = tuple(str(a) for a in letters)
        states = [root] + [q for q in transitions if q != root]
        targets = list(targets)
        idx = {q: i for i, q in enumerate(states)}
        idx.update({w: len(states) + k for k, w in enumerate(targets)})
        step = []
        for q in states:
            row = transitions[q]
            step.append(tuple(idx[row[a]] for a in letters))
        return cls(letters, tuple(states), tuple(targets), tuple(step))

    def _letter_index(self, a) -> int:
        if isinstance(a, int):
            return a
        return self.letters.index(str(a))

    def run(self, word: Sequence) -> tuple[int, int]:
        """``(steps_read, position)`` after reading until absorption or word end."""
        q = 0
        for i, a in enumerate(word):
            q = self.step[q][self._letter_index(a)]
            if self.is_target(q):
                return i + 1, q
        return len(word), q

    def accepts(self, word: Sequence) -> bool:
        """True iff ``word`` is a code word: absorption happens at its last letter."""
        steps, q = self.run(word)
        return self.is_target(q) and steps == len(word)

    def target_of(self, word: Sequence) -> str | None:
        _, q = self.run(word)
        return self.target_labels[q - self.n_transient] if self.is_target(q) else None

    def q_rows(self, probs: Sequence[Fraction]) -> tuple[list[dict], list[dict]]:
        """Weighted transient rows ``Q[q] = {q': p}`` and target rows ``R[q] = {k: p}``."""
        n = self.n_transient
        Q: list[dict] = []
        R: list[dict] = []
        for row in self.step:
            qr: dict = {}
            rr: dict = {}
            for a, j in enumerate(row):
                if j < n:
                    qr[j] = qr.get(j, 0) + probs[a]
                else:
                    rr[j - n] = rr.get(j - n, 0) + probs[a]
            Q.append(qr)
            R.append(rr)
        return Q, R

    def dot(self, name: str = "Semaphore") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for q, lab in enumerate(self.state_labels):
            lines.append(f'  q{q} [label="{lab}"];')
        for k, lab in enumerate(self.target_labels):
            lines.append(f'  w{k} [label="{lab}", shape=doublecircle];')
        n = self.n_transient
        for q, row in enumerate(self.step):
            for a, j in enumerate(row):
                dst = f"w{j - n}" if j >= n else f"q{j}"
                lines.append(f'  q{q} -> {dst} [label="{self.letters[a]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_semaphore_automaton(S: FiniteSemigroup, ideal: IdealInfo | None = None) -> SemaphoreAutomaton:
    """Transient part ``S¹ \\ K(S)`` under right multiplication; kernel elements are targets."""
    if not S.identity_adjoined:
        raise SemigroupError("the semaphore automaton needs the adjoined identity as root")
    if ideal is None:
        ideal = minimal_ideal(S)
    if not ideal.is_left_zero:
        raise NotLeftZero("minimal ideal is not left zero; the first-passage bound does not apply")
    transient = [e for e in range(len(S)) if e not in ideal.kernel]
    targets = sorted(ideal.kernel)
    pos = {e: i for i, e in enumerate(transient)}
    pos.update({e: len(transient) + k for k, e in enumerate(targets)})
    step = tuple(tuple(pos[f] for f in S.edges[e]) for e in transient)
    return SemaphoreAutomaton(
        letters=S.letters,
        state_labels=tuple(S.word_label(e) for e in transient),
        target_labels=tuple(S.word_label(e) for e in targets),
        step=step,
        state_elements=tuple(transient),
        target_elements=tuple(targets),
    )


def _probs(aut: SemaphoreAutomaton, x) -> tuple[Fraction, ...]:
    if isinstance(x, Alphabet):
        probs = x.require_stochastic()
    else:
        probs = tuple(Fraction(p) for p in x)
    if len(probs) != len(aut.letters):
        raise ParameterError(f"{len(aut.letters)} letters but {len(probs)} probabilities")
    if sum(probs) != 1 or any(p < 0 for p in probs):
        raise ParameterError("probabilities must be nonnegative and sum to 1")
    return probs


# ---------------------------------------------------------------- exact solves


def stationary_exact(aut: SemaphoreAutomaton, x) -> list[Fraction]:
    """Absorption probability ``Psi_w`` at every target, from ``(I - Q) B = R``."""
    probs = _probs(aut, x)
    Q, R = aut.q_rows(probs)
    k = aut.n_targets
    rhs = [[r.get(w, Fraction(0)) for w in range(k)] for r in R]
    B = solve_substochastic(Q, rhs)
    return [Fraction(v) for v in B[0]]


def _absorption_matrix(aut: SemaphoreAutomaton, probs) -> tuple[list[dict], list[dict], list[list[Fraction]]]:
    Q, R = aut.q_rows(probs)
    k = aut.n_targets
    B = solve_substochastic(Q, [[r.get(w, Fraction(0)) for w in range(k)] for r in R])
    return Q, R, B


def expected_tau(aut: SemaphoreAutomaton, x) -> tuple[Fraction, list[Fraction | None]]:
    """``E[tau]`` from ``(I - Q) n = 1`` and ``E_w[tau]`` from ``(I - Q) m = Q B_w + R_w``.

    ``E_w[tau]`` is ``None`` for a target that is never hit.
    """
    probs = _probs(aut, x)
    Q, R, B = _absorption_matrix(aut, probs)
    k = aut.n_targets
    rhs = []
    for q in range(aut.n_transient):
        row = [Fraction(1)]
        for w in range(k):
            v = R[q].get(w, Fraction(0))
            for j, p in Q[q].items():
                v += p * B[j][w]
            row.append(v)
        rhs.append(row)
    sol = solve_substochastic(Q, rhs)
    E = sol[0][0]
    per = [sol[0][w + 1] / B[0][w] if B[0][w] != 0 else None for w in range(k)]
    return E, per


def propagate(aut: SemaphoreAutomaton, x, t_max: int) -> tuple[list[Fraction], list[list[Fraction]]]:
    """Exact Q-powers from the root.

    Returns ``survival`` with ``survival[t] = Pr(tau > t)`` for ``t = 0..t_max``
    and ``absorbed`` with ``absorbed[l][w] = Pr(tau = l, target w)`` for
    ``l = 0..t_max``.
    """
    probs = _probs(aut, x)
    n = aut.n_transient
    k = aut.n_targets
    v = {0: Fraction(1)}
    survival = [Fraction(1)]
    absorbed = [[Fraction(0)] * k]
    for _ in range(t_max):
        nxt: dict[int, Fraction] = {}
        hit = [Fraction(0)] * k
        for q, mass in v.items():
            for a, j in enumerate(aut.step[q]):
                m = mass * probs[a]
                if not m:
                    continue
                if j < n:
                    nxt[j] = nxt.get(j, 0) + m
                else:
                    hit[j - n] += m
        v = nxt
        survival.append(sum(v.values(), Fraction(0)))
        absorbed.append(hit)
    return survival, absorbed


def survival_curve(aut: SemaphoreAutomaton, x, t_max: int) -> list[Fraction]:
    """``[Pr(tau > t) for t = 0..t_max]`` in exact rationals."""
    return propagate(aut, x, t_max)[0]


def survival_ge(survival: Sequence[Fraction], t: int) -> Fraction:
    """``Pr(tau >= t)`` from a ``Pr(tau > t)`` curve."""
    return Fraction(1) if t <= 0 else survival[t - 1]


def edge_stationary(aut: SemaphoreAutomaton, x) -> dict[tuple[str, str], Fraction]:
    """Probability that the code word ends with the absorbing edge ``(state, letter)``.

    Code words ending through the same transient state and letter are lumped;
    this is the stationary law of the left action on code-word classes.
    """
    probs = _probs(aut, x)
    Q, _ = aut.q_rows(probs)
    # expected visits to each transient state: (I - Q)^T g = e_root
    n = aut.n_transient
    Qt: list[dict] = [dict() for _ in range(n)]
    for i, row in enumerate(Q):
        for j, p in row.items():
            Qt[j][i] = p
    rhs = [[Fraction(1 if i == 0 else 0)] for i in range(n)]
    g = [r[0] for r in solve_substochastic(Qt, rhs)]
    out: dict[tuple[str, str], Fraction] = {}
    for q, row in enumerate(aut.step):
        for a, j in enumerate(row):
            if j >= n and g[q] * probs[a]:
                key = (aut.state_labels[q], aut.letters[a])
                out[key] = out.get(key, 0) + g[q] * probs[a]
    return out


# ---------------------------------------------------------------- series route


def psi_series(aut: SemaphoreAutomaton, w: int, T: int) -> TruncatedSeries:
    """``Psi_w^{<T}``: the generating function of code words with target ``w``
    and length ``< T``, built by degree-graded transfer through the automaton."""
    nv = len(aut.letters)
    n = aut.n_transient
    target = n + w
    frontier: dict[int, dict[tuple[int, ...], int]] = {0: {(0,) * nv: 1}}
    out: dict[tuple[int, ...], int] = {}
    for _ in range(T - 1):
        nxt: dict[int, dict[tuple[int, ...], int]] = {}
        for q, poly in frontier.items():
            for a, j in enumerate(aut.step[q]):
                if j >= n and j != target:
                    continue
                dest = out if j == target else nxt.setdefault(j, {})
                for m, c in poly.items():
                    m2 = m[:a] + (m[a] + 1,) + m[a + 1 :]
                    dest[m2] = dest.get(m2, 0) + c
        frontier = nxt
        if not frontier:
            break
    return TruncatedSeries(nv, T, out)


def _series_work(aut: SemaphoreAutomaton, T: int) -> int:
    return aut.n_transient * T * math.comb(T + len(aut.letters) - 1, len(aut.letters) - 1)


def survival_per_target(aut: SemaphoreAutomaton, x, w: int, t: int, degree: int | None = None) -> Fraction:
    """``Pr_w(tau >= t) = 1 - Psi_w^{<t}(x) / Psi_w(x)``.

    The truncated series is evaluated exactly.  When the graded transfer
    would exceed ``SERIES_WORK_CAP`` entries, ``Psi_w^{<t}`` is read off the
    length-graded absorption masses instead (same value, no multivariate
    expansion).
    """
    probs = _probs(aut, x)
    if degree is not None and degree < t:
        raise ParameterError(f"truncation degree {degree} is below t={t}")
    psi = stationary_exact(aut, probs)[w]
    if psi == 0:
        raise UnreachableTarget(f"target {aut.target_labels[w]} is never hit")
    if t <= 0:
        return Fraction(1)
    if _series_work(aut, t) <= SERIES_WORK_CAP:
        head = psi_series(aut, w, t).evaluate(probs)
    else:
        _, absorbed = propagate(aut, probs, t - 1)
        head = sum((absorbed[l][w] for l in range(t)), Fraction(0))
    return 1 - head / psi


def cauchy_euler_expectation(aut: SemaphoreAutomaton, x, w: int, T: int = 64) -> tuple[Fraction, Fraction, Fraction]:
    """``(estimate, exact, tail_bound)`` for ``E_w[tau]``.

    ``estimate = CE(Psi_w^{<T})(x) / Psi_w^{<T}(x)``.  With ``P`` the tail mass
    ``Pr(tau >= T, w)`` and ``G = sum_{l >= T} l Pr(tau = l, w)``, both exact,
    ``|estimate - exact| <= (exact * P + G) / Psi_w^{<T}(x)``.
    """
    probs = _probs(aut, x)
    s = psi_series(aut, w, T)
    head = s.evaluate(probs)
    ce = s.cauchy_euler().evaluate(probs)
    if head == 0:
        raise UnreachableTarget(f"no code word of length < {T} reaches {aut.target_labels[w]}")
    psi = stationary_exact(aut, probs)[w]
    _, per = expected_tau(aut, probs)
    exact = per[w]
    P = psi - head
    G = exact * psi - ce
    return ce / head, exact, (exact * P + G) / head


# ---------------------------------------------------------------- bounds


def markov_bound(E, t: int):
    """``Pr(tau > t) <= E[tau] / (t + 1)``."""
    if t < 0:
        raise ParameterError("t must be >= 0")
    return E / (t + 1)


def spectral_radius(aut: SemaphoreAutomaton, x) -> float:
    probs = [float(p) for p in _probs(aut, x)]
    n = aut.n_transient
    M = np.zeros((n, n))
    for q, row in enumerate(aut.step):
        for a, j in enumerate(row):
            if j < n:
                M[q, j] += probs[a]
    if n == 0:
        return 0.0
    return float(max(abs(np.linalg.eigvals(M))))


@dataclass(frozen=True)
class ChernoffResult:
    bound: float
    s: float | None
    admissible: bool


def chernoff_bound(aut: SemaphoreAutomaton, x, t: int, s_grid: Sequence[float] = DEFAULT_S_GRID) -> ChernoffResult:
    """``min_s E[exp(s tau)] / exp(s t)`` over admissible ``s``; bounds ``Pr(tau >= t)``.

    ``s`` is admissible when ``exp(s) * rho(Q) < 1``.  A Gershgorin row-sum
    test accepts quickly; otherwise the spectral radius is computed.
    """
    if t <= 0:
        return ChernoffResult(1.0, None, True)
    probs = [float(p) for p in _probs(aut, x)]
    n = aut.n_transient
    rows, cols, vals = [], [], []
    r1 = np.zeros(n)
    for q, row in enumerate(aut.step):
        for a, j in enumerate(row):
            if j < n:
                rows.append(q)
                cols.append(j)
                vals.append(probs[a])
            else:
                r1[q] += probs[a]
    Q = csr_matrix((vals, (rows, cols)), shape=(n, n))
    gersh = float(np.asarray(abs(Q).sum(axis=1)).max()) if n else 0.0
    rho = None
    best, best_s = 1.0, None
    any_ok = False
    I = identity(n, format="csr")
    for s in s_grid:
        es = math.exp(s)
        if es * gersh >= 1:
            if rho is None:
                rho = spectral_radius(aut, x)
            if es * rho >= 1:
                continue
        any_ok = True
        v = spsolve((I - es * Q).tocsc(), es * r1)
        mgf = float(np.atleast_1d(v)[0])
        if not math.isfinite(mgf) or mgf <= 0:
            continue
        val = mgf * math.exp(-s * t)
        if val < best:
            best, best_s = val, s
    if not any_ok:
        warnings.warn("no admissible s in the Chernoff grid", RuntimeWarning, stacklevel=2)
        return ChernoffResult(1.0, None, False)
    return ChernoffResult(min(1.0, best), best_s, True)


@dataclass(frozen=True)
class StatisticBound:
    binomial_tail: Fraction | float
    gaussian_form: float
    kl_form: float


def statistic_bound(p, L: int, t: int) -> StatisticBound:
    """Tail of Binomial(t, p) below ``L`` and its Gaussian and relative-entropy majorants."""
    if not 0 < p <= 1:
        raise ParameterError(f"p={p} outside (0, 1]")
    if L < 1 or t < 0:
        raise ParameterError("need L >= 1 and t >= 0")
    exact = isinstance(p, (int, Fraction))
    pp = Fraction(p) if exact else p
    tail = sum(math.comb(t, i) * pp**i * (1 - pp) ** (t - i) for i in range(min(L, t + 1)))
    pf = float(p)
    if t > 0 and t * pf >= L - 1:
        gauss = math.exp(-((t * pf - (L - 1)) ** 2) / (2 * t * pf))
    else:
        gauss = 1.0
    a = (L - 1) / t if t > 0 else 0.0
    if 0 < a < pf:
        kl = (pf / a) ** (t * a) * ((1 - pf) / (1 - a)) ** (t * (1 - a))
    else:
        kl = 1.0
    return StatisticBound(tail, gauss, kl)


@dataclass(frozen=True)
class DecreasingStatistic:
    values: tuple[int, ...]
    L: int
    p: Fraction


def decreasing_statistic(aut: SemaphoreAutomaton, x) -> DecreasingStatistic | None:
    """Longest descent to the ideal through the condensed right Cayley graph.

    ``f`` never increases under right multiplication and is 0 exactly on the
    targets.  Returns ``None`` if some state has no letter lowering ``f``.
    """
    probs = _probs(aut, x)
    n = aut.n_transient
    src = [q for q, row in enumerate(aut.step) for j in row if j < n]
    dst = [j for row in aut.step for j in row if j < n]
    graph = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="strong")
    labels = labels.tolist()
    comps: dict[int, list[int]] = {}
    for q, c in enumerate(labels):
        comps.setdefault(c, []).append(q)
    f_comp: dict[int, int] = {}

    def height(c: int) -> int:
        if c in f_comp:
            return f_comp[c]
        best = 0
        for q in comps[c]:
            for j in aut.step[q]:
                if j >= n:
                    best = max(best, 1)
                elif labels[j] != c:
                    best = max(best, 1 + height(labels[j]))
        f_comp[c] = best
        return best

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * n + 100))
    f = [height(labels[q]) for q in range(n)]

    def fv(j):
        return 0 if j >= n else f[j]

    for q, row in enumerate(aut.step):
        if not any(fv(j) < f[q] and probs[a] > 0 for a, j in enumerate(row)):
            return None
    return DecreasingStatistic(tuple(f), f[0], min(p for p in probs if p > 0))


# ---------------------------------------------------------------- chains and distances


def left_action_matrix(tables: Sequence[Sequence[int]], probs: Sequence, n: int | None = None) -> list[list[Fraction]]:
    """Column-stochastic ``T`` with ``T[s'][s] = sum of x_a over a with a.s = s'``."""
    if n is None:
        n = len(tables[0])
    T = [[Fraction(0)] * n for _ in range(n)]
    for tab, p in zip(tables, probs):
        for s in range(n):
            T[tab[s]][s] += Fraction(p)
    return T


def kernel_chain(S: FiniteSemigroup, ideal: IdealInfo, x) -> tuple[list[int], list[list[Fraction]]]:
    """Left multiplication by random generators on the elements of ``K(S)``."""
    probs = x.require_stochastic() if isinstance(x, Alphabet) else tuple(Fraction(p) for p in x)
    states = sorted(ideal.kernel)
    pos = {e: i for i, e in enumerate(states)}
    tables = [[pos[S.left_letter_product(a, e)] for e in states] for a in range(len(S.letters))]
    return states, left_action_matrix(tables, probs, len(states))


def stationary_eigen(T: Sequence[Sequence]) -> list[Fraction]:
    """Unique ``Psi`` with ``T Psi = Psi`` and total mass 1, by exact elimination."""
    n = len(T)
    A = [[Fraction(T[i][j]) - (1 if i == j else 0) for j in range(n)] for i in range(n)]
    basis = nullspace(A)
    if len(basis) != 1:
        raise NotErgodic(f"fixed space has dimension {len(basis)}")
    v = basis[0]
    total = sum(v)
    if total == 0:
        raise NotErgodic("fixed vector has zero mass")
    v = [c / total for c in v]
    if any(c < 0 for c in v):
        raise NotErgodic("fixed vector is not a probability vector")
    return v


def mat_vec(T: Sequence[Sequence], v: Sequence) -> list:
    return [sum((a * b for a, b in zip(row, v) if a and b), Fraction(0)) for row in T]


def tv_distance(nu: Sequence, mu: Sequence):
    if len(nu) != len(mu):
        raise ParameterError("distributions have different lengths")
    return sum((abs(a - b) for a, b in zip(nu, mu)), Fraction(0)) / 2


def tv_curves(T: Sequence[Sequence], psi: Sequence, t_max: int) -> list[list[Fraction]]:
    """``curves[s][t] = || T^t delta_s - Psi ||_TV`` exactly, for every start ``s``."""
    n = len(T)
    sparse = [[(j, Fraction(c)) for j, c in enumerate(row) if c] for row in T]
    curves = []
    for s in range(n):
        v = [Fraction(0)] * n
        v[s] = Fraction(1)
        curve = [tv_distance(v, psi)]
        for _ in range(t_max):
            v = [sum((c * v[j] for j, c in row), Fraction(0)) for row in sparse]
            curve.append(tv_distance(v, psi))
        curves.append(curve)
    return curves


def entropy(dist: Sequence) -> float:
    """Shannon entropy in nats, with ``0 log 0 = 0``."""
    total = sum(dist)
    if abs(float(total) - 1) > 1e-12 or any(p < 0 for p in dist):
        raise ParameterError("not a probability vector")
    return -sum(float(p) * math.log(float(p)) for p in dist if p > 0)


def entropy_rate(T: Sequence[Sequence], psi: Sequence) -> float:
    """``-sum_{s, s'} T[s][s'] Psi[s'] log T[s][s']`` for column-stochastic ``T``."""
    n = len(T)
    for j in range(n):
        col = sum(T[i][j] for i in range(n))
        if abs(float(col) - 1) > 1e-12:
            raise ParameterError(f"column {j} of T sums to {col}")
    entropy(psi)
    h = 0.0
    for i in range(n):
        for j in range(n):
            t = float(T[i][j])
            if t > 0:
                h -= t * float(psi[j]) * math.log(t)
    return h


# ---------------------------------------------------------------- reports


CSV_COLUMNS = (
    "t",
    "survival",
    "markov_bound",
    "chernoff_bound",
    "statistic_binomial",
    "statistic_gaussian",
    "statistic_kl",
)


def _fmt(v, as_float: bool) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.15g}"
    if as_float:
        return f"{float(v):.15g}"
    return format_fraction(v)


@dataclass
class FirstPassageReport:
    letters: tuple[str, ...]
    target_labels: tuple[str, ...]
    psi: list[Fraction]
    expected_tau: Fraction
    expected_tau_per_target: list[Fraction | None]
    survival: list[Fraction]
    bounds: list[dict] = field(default_factory=list)

    def to_json(self, as_float: bool = False) -> dict:
        return {
            "letters": list(self.letters),
            "targets": list(self.target_labels),
            "psi": {w: _fmt(p, as_float) for w, p in zip(self.target_labels, self.psi)},
            "expected_tau": _fmt(self.expected_tau, as_float),
            "expected_tau_per_target": {
                w: _fmt(e, as_float) for w, e in zip(self.target_labels, self.expected_tau_per_target)
            },
            "survival": [_fmt(s, as_float) for s in self.survival],
        }

    def dumps(self, as_float: bool = False) -> str:
        return json.dumps(self.to_json(as_float), indent=2, ensure_ascii=False)

    def to_csv(self, as_float: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in self.bounds:
            w.writerow([row["t"]] + [_fmt(row[c], as_float) for c in CSV_COLUMNS[1:]])
        return buf.getvalue()


def analyze(aut: SemaphoreAutomaton, x, t_max: int, chernoff: bool = True) -> FirstPassageReport:
    """Exact first-passage quantities plus every upper bound on ``Pr(tau > t)``."""
    probs = _probs(aut, x)
    psi = stationary_exact(aut, probs)
    E, per = expected_tau(aut, probs)
    survival = survival_curve(aut, probs, t_max)
    stat = decreasing_statistic(aut, probs)
    rows = []
    for t in range(t_max + 1):
        row = {"t": t, "survival": survival[t], "markov_bound": min(Fraction(1), markov_bound(E, t))}
        row["chernoff_bound"] = chernoff_bound(aut, probs, t + 1).bound if chernoff else None
        if stat is not None:
            sb = statistic_bound(stat.p, stat.L, t)
            row.update(
                statistic_binomial=sb.binomial_tail,
                statistic_gaussian=sb.gaussian_form,
                statistic_kl=sb.kl_form,
            )
        else:
            row.update(statistic_binomial=None, statistic_gaussian=None, statistic_kl=None)
        rows.append(row)
    return FirstPassageReport(aut.letters, aut.target_labels, psi, E, per, survival, rows)

