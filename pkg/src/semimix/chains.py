"""Built-in chains: Tsetlin library, edge flipping on a line, promotion, and W(P).

Posets are naturally labelled on ``{1, ..., n}``: ``i < j`` in the poset forces
``i < j`` as integers.  Permutations and words are tuples of ints.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Callable, Hashable, Sequence

from .absorption import SemaphoreAutomaton, left_action_matrix
from .semigroup import (
    Alphabet,
    FiniteSemigroup,
    SizeError,
    Transformation,
    abstract_value,
    generate_semigroup,
    left_regular_representation,
)
from .series import Loop, LoopGraph

EULER_GAMMA = 0.57721566490153286060651209008240243
TSETLIN_MAX_N = 7


class PosetError(ValueError):
    pass


# ---------------------------------------------------------------- posets


@dataclass(frozen=True)
class Poset:
    """``covers`` may be any generating set of relations ``(i, j)`` meaning ``i < j``."""

    n: int
    covers: frozenset = frozenset()
    _less: frozenset = field(default=frozenset(), repr=False, compare=False)

    def __post_init__(self):
        covers = frozenset((int(i), int(j)) for i, j in self.covers)
        object.__setattr__(self, "covers", covers)
        for i, j in covers:
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise PosetError(f"relation ({i}, {j}) outside 1..{self.n}")
            if i >= j:
                raise PosetError(
                    f"relation {i} < {j} breaks the natural labelling; see natural_relabeling()"
                )
        less = set(covers)
        changed = True
        while changed:
            changed = False
            for i, j in list(less):
                for k, l in list(less):
                    if j == k and (i, l) not in less:
                        less.add((i, l))
                        changed = True
        object.__setattr__(self, "_less", frozenset(less))

    def lt(self, i: int, j: int) -> bool:
        return (i, j) in self._less

    def comparable(self, i: int, j: int) -> bool:
        return i == j or (i, j) in self._less or (j, i) in self._less

    @property
    def relations(self) -> frozenset:
        return self._less

    @property
    def hasse(self) -> frozenset:
        return frozenset(
            (i, j)
            for i, j in self._less
            if not any((i, k) in self._less and (k, j) in self._less for k in range(1, self.n + 1))
        )

    @classmethod
    def chain(cls, n: int) -> "Poset":
        return cls(n, frozenset((i, i + 1) for i in range(1, n)))

    @classmethod
    def antichain(cls, n: int) -> "Poset":
        return cls(n)

    @classmethod
    def example(cls) -> "Poset":
        """Four vertices with 1 < 4, 2 < 4, 2 < 3."""
        return cls(4, frozenset({(1, 4), (2, 4), (2, 3)}))

    def to_json(self) -> dict:
        return {"n": self.n, "covers": sorted(map(list, self.hasse))}

    @classmethod
    def from_json(cls, doc) -> "Poset":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(int(doc["n"]), frozenset(tuple(c) for c in doc.get("covers", ())))

    @classmethod
    def load(cls, path: str) -> "Poset":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def natural_relabeling(n: int, relations: Sequence[tuple[int, int]]) -> dict[int, int]:
    """A map old label -> new label making ``relations`` naturally labelled."""
    from graphlib import CycleError, TopologicalSorter

    ts = TopologicalSorter({v: set() for v in range(1, n + 1)})
    for i, j in relations:
        ts.add(j, i)
    try:
        order = list(ts.static_order())
    except CycleError as exc:
        raise PosetError("relations contain a cycle") from exc
    return {old: new for new, old in enumerate(order, start=1)}


def poset_corpus(max_n: int = 4) -> list[Poset]:
    """Every naturally labelled poset on ``1..n`` for ``1 <= n <= max_n``, each order once."""
    out = []
    for n in range(1, max_n + 1):
        pairs = list(combinations(range(1, n + 1), 2))
        seen = set()
        for mask in range(1 << len(pairs)):
            rel = frozenset(p for b, p in enumerate(pairs) if mask >> b & 1)
            closed = all(
                (i, l) in rel for (i, j) in rel for (k, l) in rel if j == k
            )
            if closed and rel not in seen:
                seen.add(rel)
                out.append(Poset(n, rel))
    return out


def linear_extensions(P: Poset) -> list[tuple[int, ...]]:
    """All linear extensions in lexicographic order."""
    out: list[tuple[int, ...]] = []
    preds = {j: {i for i in range(1, P.n + 1) if P.lt(i, j)} for j in range(1, P.n + 1)}

    def rec(prefix: list[int], used: set[int]):
        if len(prefix) == P.n:
            out.append(tuple(prefix))
            return
        for v in range(1, P.n + 1):
            if v not in used and preds[v] <= used:
                prefix.append(v)
                used.add(v)
                rec(prefix, used)
                prefix.pop()
                used.remove(v)

    rec([], set())
    return out


def is_linear_extension(P: Poset, pi: Sequence[int]) -> bool:
    if sorted(pi) != list(range(1, P.n + 1)):
        return False
    pos = {v: k for k, v in enumerate(pi)}
    return all(pos[i] < pos[j] for i, j in P.relations)


def word_str(w: Sequence[int]) -> str:
    return "".join(str(a) for a in w) if all(a < 10 for a in w) else ",".join(map(str, w))


def harmonic(n: int) -> Fraction:
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))


# ---------------------------------------------------------------- generic chain bundle


@dataclass
class ChainModel:
    """A semigroup acting on ``points`` plus the chain's state space inside them.

    Kernel elements act as constant maps on ``states``; ``key(e)`` names the
    state a kernel element sends everything to.
    """

    name: str
    semigroup: FiniteSemigroup
    points: list
    states: list[int]
    letter_probs: Callable[[Sequence], tuple[Fraction, ...]] = field(default=lambda x: tuple(Fraction(p) for p in x))

    @property
    def letters(self) -> tuple[str, ...]:
        return self.semigroup.letters

    def alphabet(self, x: Sequence) -> Alphabet:
        return Alphabet(self.letters, self.letter_probs(x))

    def key(self, e: int):
        return self.points[self.semigroup.elements[e].table[self.states[0]]]

    def state_labels(self) -> list:
        return [self.points[s] for s in self.states]

    def transition_matrix(self, x: Sequence) -> list[list[Fraction]]:
        """Column-stochastic matrix of the random left action on ``states``."""
        probs = self.letter_probs(x)
        pos = {s: i for i, s in enumerate(self.states)}
        tables = [[pos[g.table[s]] for s in self.states] for g in self.semigroup.generators]
        return left_action_matrix(tables, probs, len(self.states))


# ---------------------------------------------------------------- Tsetlin library


def _distinct_sequences(letters: Sequence) -> list[tuple]:
    out = [()]
    for k in range(1, len(letters) + 1):
        out.extend(permutations(letters, k))
    return out


def _prepend(u: tuple, s: tuple) -> tuple:
    return u + tuple(v for v in s if v not in u)


def tsetlin_chain(n: int) -> ChainModel:
    """Move-to-front on shelves of distinct books, including partial shelves.

    The partial shelves make the action faithful on the free left regular
    band, so kernel elements are exactly the full orders.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > TSETLIN_MAX_N:
        raise SizeError(f"n={n} exceeds the exact-mode cap {TSETLIN_MAX_N}")
    books = tuple(range(1, n + 1))
    points = _distinct_sequences(books)
    pos = {s: i for i, s in enumerate(points)}
    gens = [Transformation(tuple(pos[_prepend((a,), s)] for s in points)) for a in books]
    S = generate_semigroup(gens, [str(a) for a in books])
    states = [pos[p] for p in permutations(books)]
    return ChainModel("tsetlin", S, points, states)


def tsetlin_weight(order: Sequence[int], x: Sequence) -> Fraction:
    """``prod_i x_{o_i} / (1 - x_{o_1} - ... - x_{o_{i-1}})`` with ``x`` indexed from letter 1."""
    val = Fraction(1)
    acc = Fraction(0)
    for a in order:
        xa = Fraction(x[a - 1])
        val *= xa / (1 - acc)
        acc += xa
    return val


def tsetlin_stationary(x: Sequence) -> dict[tuple[int, ...], Fraction]:
    n = len(x)
    return {p: tsetlin_weight(p, x) for p in permutations(range(1, n + 1))}


def tsetlin_loop_graph(order: Sequence[int]) -> LoopGraph:
    """Spine ``o_1 ... o_n`` with loops ``o_1, ..., o_i`` at spine vertex ``i``."""
    order = tuple(order)
    loops = tuple(Loop(i, (str(order[j]),)) for i in range(1, len(order)) for j in range(i))
    return LoopGraph(tuple(str(a) for a in order), loops)


def tsetlin_expected_tau(x: Sequence) -> Fraction:
    """``sum_pi Psi_pi E_pi[tau]`` with per-order expectations from the loop graphs."""
    from .series import loop_graph_expectation

    w = {str(i + 1): Fraction(p) for i, p in enumerate(x)}
    return sum(
        (psi * loop_graph_expectation(tsetlin_loop_graph(p), w) for p, psi in tsetlin_stationary(x).items()),
        Fraction(0),
    )


def tsetlin_bound(n: int) -> tuple[Fraction, float]:
    """``(n H_n, n ln n + n gamma)``."""
    return n * harmonic(n), n * math.log(n) + n * EULER_GAMMA


# ---------------------------------------------------------------- edge flipping


def _bits_label(bits: int, n_vertices: int) -> str:
    return "".join(str(bits >> v & 1) for v in range(n_vertices))


def edgeflip_letters(n: int) -> tuple[str, ...]:
    return tuple(f"{i}{s}" for i in range(1, n + 1) for s in "+-")


def edgeflip_probs(x: Sequence) -> tuple[Fraction, ...]:
    """Edge weights ``x_i`` split evenly between the two colours."""
    return tuple(Fraction(p) / 2 for p in x for _ in (0, 1))


def edgeflip_chain(n: int) -> ChainModel:
    """Vertices ``0..n`` on a line; letter ``i+`` (``i-``) colours both ends of edge ``i`` with 1 (0)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    nv = n + 1
    points = [_bits_label(b, nv) for b in range(1 << nv)]
    gens = []
    for i in range(1, n + 1):
        mask = (1 << (i - 1)) | (1 << i)
        for s in (1, 0):
            gens.append(Transformation(tuple((b | mask) if s else (b & ~mask) for b in range(1 << nv))))
    S = generate_semigroup(gens, edgeflip_letters(n))
    return ChainModel("edgeflip", S, points, list(range(1 << nv)), edgeflip_probs)


def signed_weight(pi: Sequence[tuple[int, int]], y: dict) -> Fraction:
    """Stationary weight of a signed permutation ``((e, s), ...)``:
    ``prod_i y_{pi_i} / (1 - sum_{j<i} (y_{+|pi_j|} + y_{-|pi_j|}))``."""
    val = Fraction(1)
    acc = Fraction(0)
    for e, s in pi:
        val *= y[(e, s)] / (1 - acc)
        acc += y[(e, 1)] + y[(e, -1)]
    return val


def signed_permutations(n: int):
    for p in permutations(range(1, n + 1)):
        for signs in range(1 << n):
            yield tuple((e, 1 if signs >> k & 1 else -1) for k, e in enumerate(p))


def edgeflip_lump(pi: Sequence[tuple[int, int]], n: int) -> str:
    """Vertex ``v`` takes the sign of the first ``pi_j`` whose edge touches ``v``."""
    bits = []
    for v in range(n + 1):
        for e, s in pi:
            if e == v or e == v + 1:
                bits.append("1" if s > 0 else "0")
                break
    return "".join(bits)


def edgeflip_stationary(x: Sequence) -> dict[str, Fraction]:
    """Distribution over colourings obtained by lumping the signed-permutation weights."""
    n = len(x)
    y = {(i + 1, s): Fraction(p) / 2 for i, p in enumerate(x) for s in (1, -1)}
    out = {_bits_label(b, n + 1): Fraction(0) for b in range(1 << (n + 1))}
    for pi in signed_permutations(n):
        out[edgeflip_lump(pi, n)] += signed_weight(pi, y)
    return out


def signed_lrb_chain(n: int) -> tuple[FiniteSemigroup, list]:
    """Free left regular band on signed letters ``(e, +-1)``: later copies of ``+-e`` are dropped."""
    letters = [(e, s) for e in range(1, n + 1) for s in (1, -1)]
    elements = [w for w in _signed_sequences(n) if w]

    def mul(u, v):
        out = list(u)
        seen = {e for e, _ in u}
        for g in v:
            if g[0] not in seen:
                out.append(g)
                seen.add(g[0])
        return tuple(out)

    gens = [(g,) for g in letters]
    S, points = left_regular_representation(elements, mul, gens, [f"{e}{'+' if s > 0 else '-'}" for e, s in letters])
    return S, points


def _signed_sequences(n: int) -> list[tuple]:
    out = []
    for k in range(n + 1):
        for p in permutations(range(1, n + 1), k):
            for signs in range(1 << k):
                out.append(tuple((e, 1 if signs >> j & 1 else -1) for j, e in enumerate(p)))
    return out


# ---------------------------------------------------------------- promotion


def tau_op(P: Poset, i: int, pi: tuple[int, ...]) -> tuple[int, ...]:
    """Swap positions ``i`` and ``i+1`` (1-based) when the entries are incomparable."""
    a, b = pi[i - 1], pi[i]
    if P.comparable(a, b):
        return pi
    return pi[: i - 1] + (b, a) + pi[i + 1 :]


def promotion_position(P: Poset, j: int, pi: tuple[int, ...]) -> tuple[int, ...]:
    """``tau_1 tau_2 ... tau_{j-1}`` applied to ``pi``; ``tau_{j-1}`` acts first."""
    for i in range(j - 1, 0, -1):
        pi = tau_op(P, i, pi)
    return pi


def promotion_apply(P: Poset, a: int, pi: Sequence[int]) -> tuple[int, ...]:
    """The generator labelled by the letter ``a``: promote from the position of ``a`` in ``pi``."""
    pi = tuple(pi)
    return promotion_position(P, pi.index(a) + 1, pi)


def promotion_word_apply(P: Poset, word: Sequence[int], pi: Sequence[int]) -> tuple[int, ...]:
    """``d_{w_1} ... d_{w_k} pi``: the last letter acts first."""
    pi = tuple(pi)
    for a in reversed(word):
        pi = promotion_apply(P, a, pi)
    return pi


def promotion_generator_matrix(P: Poset, a: int) -> list[list[int]]:
    """0/1 matrix with entry ``[row][col] = 1`` iff ``d_a`` sends extension ``col`` to ``row``."""
    ext = linear_extensions(P)
    pos = {p: i for i, p in enumerate(ext)}
    M = [[0] * len(ext) for _ in ext]
    for c, p in enumerate(ext):
        M[pos[promotion_apply(P, a, p)]][c] = 1
    return M


def promotion_chain(P: Poset) -> ChainModel:
    ext = linear_extensions(P)
    pos = {p: i for i, p in enumerate(ext)}
    gens = [
        Transformation(tuple(pos[promotion_apply(P, a, p)] for p in ext)) for a in range(1, P.n + 1)
    ]
    S = generate_semigroup(gens, [str(a) for a in range(1, P.n + 1)])
    return ChainModel("promotion", S, ext, list(range(len(ext))))


def promotion_matrix(P: Poset, x: Sequence) -> tuple[list[tuple[int, ...]], list[list[Fraction]]]:
    """From ``pi`` move to ``d_j pi`` with probability ``x_{pi_j}``; coinciding images add."""
    return linear_extensions(P), promotion_chain(P).transition_matrix(x)


def promotion_stationary(P: Poset, x: Sequence) -> dict[tuple[int, ...], Fraction]:
    """``Psi_pi`` proportional to ``prod_i 1 / (1 - (x_{pi_1} + ... + x_{pi_{i-1}}))``."""
    raw = {}
    for p in linear_extensions(P):
        val = Fraction(1)
        acc = Fraction(0)
        for a in p:
            val /= 1 - acc
            acc += Fraction(x[a - 1])
        raw[p] = val
    total = sum(raw.values())
    return {p: v / total for p, v in raw.items()}


def reduced_word_to_ideal(pi: Sequence[int], P: Poset) -> tuple[int, ...]:
    """Distinct letters ``w_1 ... w_{n-1}`` with ``d_{w_1} ... d_{w_{n-1}}`` constant with value ``pi``.

    Each round follows the greedy increasing chain from the first entry,
    records its last element and shifts the chain one step to the right while
    dropping the first entry.
    """
    pi = tuple(pi)
    if not is_linear_extension(P, pi):
        raise PosetError(f"{pi} is not a linear extension")
    word = []
    cur = list(pi)
    while len(cur) > 1:
        chain = [0]
        for i in range(1, len(cur)):
            if P.lt(cur[chain[-1]], cur[i]):
                chain.append(i)
        word.append(cur[chain[-1]])
        nxt = list(cur)
        for j in range(len(chain) - 1, 0, -1):
            nxt[chain[j]] = cur[chain[j - 1]]
        cur = nxt[1:]
    return tuple(word)


# ---------------------------------------------------------------- W(P)


def straighten(P: Poset, w: Sequence[int], a: int) -> tuple[int, ...]:
    """``straight(wa)`` for ``a`` not in ``w``."""
    w = list(w)
    if a in w:
        raise PosetError(f"{a} already occurs in {w}")
    w.append(a)
    pos = len(w) - 1
    j = pos - 1
    while j >= 0:
        if P.lt(a, w[j]):
            w[j], w[pos] = w[pos], w[j]
            pos = j
        j -= 1
    return tuple(w)


def wp_product(P: Poset, w: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
    """``w v`` as the iterated letter product."""
    w = tuple(w)
    for a in v:
        if a not in w:
            w = straighten(P, w, a)
    return w


def subwords_of_extensions(P: Poset) -> list[tuple[int, ...]]:
    """Nonempty subwords of linear extensions, ordered by length then lexicographically."""
    out = set()
    for p in linear_extensions(P):
        for mask in range(1, 1 << P.n):
            out.add(tuple(p[k] for k in range(P.n) if mask >> k & 1))
    return sorted(out, key=lambda w: (len(w), w))


def wp_chain(P: Poset) -> ChainModel:
    """W(P) realised by its left regular representation."""
    elements = subwords_of_extensions(P)
    S, points = left_regular_representation(
        elements, lambda u, v: wp_product(P, u, v), [(a,) for a in range(1, P.n + 1)], [str(a) for a in range(1, P.n + 1)]
    )
    pos = {p: i for i, p in enumerate(points)}
    states = [pos[p] for p in linear_extensions(P)]
    return ChainModel("wp", S, points, states)


def wp_semigroup(P: Poset) -> FiniteSemigroup:
    return wp_chain(P).semigroup


def wp_element(S: FiniteSemigroup, points: list, e: int):
    return abstract_value(S, points, e)


def wp_left_action(P: Poset, a: int, pi: Sequence[int]) -> tuple[int, ...]:
    return wp_product(P, (a,), pi)


def wp_stationary(P: Poset, x: Sequence) -> dict[tuple[int, ...], Fraction]:
    """Sum of Tsetlin weights of all ``sigma`` in ``S_n`` whose product in W(P) is ``pi``."""
    out = {p: Fraction(0) for p in linear_extensions(P)}
    for sigma in permutations(range(1, P.n + 1)):
        out[wp_product(P, (), sigma)] += tsetlin_weight(sigma, x)
    return out


def wp_expected_bound(n: int) -> tuple[Fraction, float]:
    """``n H_n`` exactly and ``n ln n + n gamma`` as a float."""
    return tsetlin_bound(n)


def wp_automaton(P: Poset) -> SemaphoreAutomaton:
    """Semaphore automaton of W(P) built directly on words, without transformation tables."""
    letters = list(range(1, P.n + 1))
    return lrb_automaton(
        [str(a) for a in letters],
        lambda w, a: w if a in w else straighten(P, w, a),
        letters,
        lambda w: len(w) == P.n,
    )


def lrb_automaton(
    labels: Sequence[str],
    right_mul: Callable[[tuple, Hashable], tuple],
    letters: Sequence[Hashable],
    in_kernel: Callable[[tuple], bool],
) -> SemaphoreAutomaton:
    """BFS from the empty word; ``right_mul(w, a)`` is the product ``w a``."""
    root: tuple = ()
    states = [root]
    idx = {root: 0}
    targets: list[tuple] = []
    tidx: dict[tuple, int] = {}
    raw = []
    k = 0
    while k < len(states):
        w = states[k]
        row = []
        for a in letters:
            v = right_mul(w, a)
            if in_kernel(v):
                if v not in tidx:
                    tidx[v] = len(targets)
                    targets.append(v)
                row.append(("t", tidx[v]))
            else:
                if v not in idx:
                    idx[v] = len(states)
                    states.append(v)
                row.append(("s", idx[v]))
        raw.append(row)
        k += 1
    n = len(states)
    step = tuple(tuple(j if kind == "s" else n + j for kind, j in row) for row in raw)
    lab = [("𝟙" if not w else word_str(w)) for w in states]
    return SemaphoreAutomaton(tuple(labels), tuple(lab), tuple(word_str(w) for w in targets), step)


# ---------------------------------------------------------------- diagram spot checks


def wp_diagram_arrows(P: Poset) -> dict[tuple[int, str], str]:
    """``(a, pi) -> a pi`` on the linear extensions: the arrows of the W(P) chain diagram."""
    return {
        (a, word_str(p)): word_str(wp_left_action(P, a, p))
        for p in linear_extensions(P)
        for a in range(1, P.n + 1)
    }

