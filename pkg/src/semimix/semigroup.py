"""Finite transformation semigroups: closure, right Cayley graph, minimal ideal.

Elements are stored as transformation tables on a finite set ``{0, ..., n-1}``.
The right product ``u * a`` acts by first applying ``a`` and then ``u``, so a
word ``a1 a2 ... ak`` acts on a state as ``a1.(a2.(... ak.s))``.  This is the
left-action reading of a random-letter Markov chain: the newest letter is the
leftmost factor of the state, and right multiplication extends the word
backwards in time.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

DEFAULT_MAX_SIZE = 10**6


class SemigroupError(ValueError):
    pass


class SizeError(SemigroupError):
    """The closure exceeded the configured element cap."""


class NoZeroError(SemigroupError):
    pass


class AlphabetError(ValueError):
    pass


def parse_fraction(text) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise AlphabetError(f"refusing inexact probability {text!r}; use 'p/q'")
    return Fraction(str(text).strip())


def parse_probabilities(text: str) -> tuple[Fraction, ...]:
    """Parse ``"1/3,1/3,1/3"`` into exact fractions."""
    parts = [p for p in text.replace(" ", "").split(",") if p]
    try:
        return tuple(parse_fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise AlphabetError(f"cannot parse probabilities {text!r}: {exc}") from None


def format_fraction(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Alphabet:
    """Generator labels with optional exact probabilities.

    Without probabilities the alphabet is *formal*: letter ``i`` is the series
    variable ``x_{i+1}``.
    """

    letters: tuple[str, ...]
    probabilities: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(str(a) for a in self.letters))
        if not self.letters:
            raise AlphabetError("alphabet is empty")
        if len(set(self.letters)) != len(self.letters):
            raise AlphabetError(f"duplicate letter labels in {self.letters}")
        if self.probabilities is not None:
            probs = tuple(parse_fraction(p) for p in self.probabilities)
            object.__setattr__(self, "probabilities", probs)
            if len(probs) != len(self.letters):
                raise AlphabetError(
                    f"{len(self.letters)} letters but {len(probs)} probabilities"
                )
            if any(p <= 0 for p in probs):
                raise AlphabetError("every probability must be > 0")
            if sum(probs) != 1:
                raise AlphabetError(f"probabilities sum to {sum(probs)}, not 1")

    @classmethod
    def uniform(cls, letters: Sequence[str]) -> "Alphabet":
        n = len(letters)
        return cls(tuple(letters), tuple(Fraction(1, n) for _ in letters))

    @property
    def is_stochastic(self) -> bool:
        return self.probabilities is not None

    def __len__(self):
        return len(self.letters)

    def index(self, letter: str) -> int:
        return self.letters.index(str(letter))

    def prob(self, letter) -> Fraction:
        if self.probabilities is None:
            raise AlphabetError("formal alphabet has no probabilities")
        if isinstance(letter, int):
            return self.probabilities[letter]
        return self.probabilities[self.index(letter)]

    def require_stochastic(self) -> tuple[Fraction, ...]:
        if self.probabilities is None:
            raise AlphabetError("operation needs a stochastic alphabet")
        return self.probabilities

    def with_probabilities(self, probs: Iterable) -> "Alphabet":
        return Alphabet(self.letters, tuple(parse_fraction(p) for p in probs))


@dataclass(frozen=True)
class Transformation:
    """A total map on ``{0, ..., degree-1}`` given by its table."""

    table: tuple[int, ...]

    def __post_init__(self):
        table = tuple(int(v) for v in self.table)
        object.__setattr__(self, "table", table)
        n = len(table)
        if n == 0:
            raise SemigroupError("transformation of degree 0")
        if any(v < 0 or v >= n for v in table):
            raise SemigroupError(f"table entries must lie in [0, {n}): {table}")

    @property
    def degree(self) -> int:
        return len(self.table)

    def __call__(self, point: int) -> int:
        return self.table[point]

    def __mul__(self, other: "Transformation") -> "Transformation":
        # (u * a).x = u.(a.x)
        if other.degree != self.degree:
            raise SemigroupError("degree mismatch")
        return Transformation(tuple(self.table[v] for v in other.table))

    @classmethod
    def identity(cls, degree: int) -> "Transformation":
        return cls(tuple(range(degree)))

    @classmethod
    def constant(cls, degree: int, value: int) -> "Transformation":
        return cls((value,) * degree)

    @property
    def is_constant(self) -> bool:
        return len(set(self.table)) == 1

    @property
    def image(self) -> frozenset[int]:
        return frozenset(self.table)


@dataclass(eq=False)
class FiniteSemigroup:
    """The closure of a generating set, discovered by breadth-first search.

    ``edges[e][a]`` is the index of ``elements[e] * generator[a]``; the right
    Cayley graph.  When ``identity_adjoined`` is set, element 0 is a formal
    identity that is kept distinct from any identity transformation already in
    the semigroup.
    """

    letters: tuple[str, ...]
    generators: tuple[Transformation, ...]
    elements: list[Transformation]
    edges: list[tuple[int, ...]]
    reduced_words: list[tuple[int, ...]]
    identity_adjoined: bool
    _index: dict = field(repr=False, default_factory=dict)
    _arrays: list = field(repr=False, default_factory=list)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def degree(self) -> int:
        return self.generators[0].degree

    @property
    def root(self) -> int | None:
        return 0 if self.identity_adjoined else None

    @property
    def proper_elements(self) -> range:
        """Indices of the elements of S (excluding the adjoined identity)."""
        return range(1, len(self)) if self.identity_adjoined else range(len(self))

    def generator_index(self, letter: int) -> int:
        return self._gen_index[letter]

    def find(self, t: Transformation) -> int | None:
        """Index of the element of S with this table (never the adjoined root)."""
        return self._index.get(np.asarray(t.table, dtype=np.int64).tobytes())

    def _find_array(self, arr: np.ndarray) -> int:
        return self._index[arr.tobytes()]

    def product(self, i: int, j: int) -> int:
        if self.identity_adjoined:
            if i == 0:
                return j
            if j == 0:
                return i
        return self._find_array(self._arrays[i][self._arrays[j]])

    def left_letter_product(self, a: int, i: int) -> int:
        """Index of ``generator[a] * elements[i]``."""
        if self.identity_adjoined and i == 0:
            return self._gen_index[a]
        return self._find_array(self._gen_arrays[a][self._arrays[i]])

    def evaluate(self, word: Iterable[int], start: int | None = None) -> int:
        """Follow right-Cayley edges along ``word`` (letter indices)."""
        e = self.root if start is None else start
        word = list(word)
        if e is None:
            if not word:
                raise SemigroupError("empty word without adjoined identity")
            e, word = self._gen_index[word[0]], word[1:]
        for a in word:
            e = self.edges[e][a]
        return e

    def word_label(self, e: int) -> str:
        if self.identity_adjoined and e == 0:
            return "𝟙"
        return "[" + ",".join(self.letters[a] for a in self.reduced_words[e]) + "]"

    def multiplication_table(self) -> np.ndarray:
        """Full Cayley table over all stored elements (including the root)."""
        n = len(self)
        proper = list(self.proper_elements)
        arrays = np.stack([self._arrays[j] for j in proper])
        table = np.empty((n, n), dtype=np.int64)
        for i in proper:
            composed = self._arrays[i][arrays]  # row k is element i * element proper[k]
            for k, j in enumerate(proper):
                table[i, j] = self._index[composed[k].tobytes()]
        if self.identity_adjoined:
            table[0, :] = np.arange(n)
            table[:, 0] = np.arange(n)
        return table


def generate_semigroup(
    generators: Sequence[Transformation],
    letters: Sequence[str] | None = None,
    adjoin_identity: bool = True,
    max_size: int = DEFAULT_MAX_SIZE,
) -> FiniteSemigroup:
    """Close ``generators`` under composition by BFS right multiplication.

    Elements are identified by their tables, so if the action is not faithful,
    abstract elements acting alike are merged without warning.
    """
    generators = tuple(generators)
    if not generators:
        raise SemigroupError("generator list is empty")
    degree = generators[0].degree
    if any(g.degree != degree for g in generators):
        raise SemigroupError("generators act on sets of different sizes")
    if letters is None:
        letters = tuple(str(i + 1) for i in range(len(generators)))
    letters = tuple(str(a) for a in letters)
    if len(letters) != len(generators):
        raise SemigroupError("one label per generator required")
    if len(set(letters)) != len(letters):
        raise SemigroupError(f"duplicate generator labels {letters}")

    gen_arrays = [np.asarray(g.table, dtype=np.int64) for g in generators]
    arrays: list[np.ndarray] = []
    words: list[tuple[int, ...]] = []
    index: dict[bytes, int] = {}
    queue: deque[int] = deque()

    def add(arr: np.ndarray, word: tuple[int, ...]) -> int:
        key = arr.tobytes()
        found = index.get(key)
        if found is not None:
            return found
        if len(arrays) >= max_size:
            raise SizeError(f"semigroup exceeds {max_size} elements")
        index[key] = len(arrays)
        arrays.append(arr)
        words.append(word)
        queue.append(len(arrays) - 1)
        return len(arrays) - 1

    if adjoin_identity:
        arrays.append(np.arange(degree, dtype=np.int64))
        words.append(())
        queue.append(0)
    else:
        for a, g in enumerate(gen_arrays):
            add(g, (a,))

    edges: dict[int, tuple[int, ...]] = {}
    while queue:
        e = queue.popleft()
        row = []
        for a, g in enumerate(gen_arrays):
            if adjoin_identity and e == 0:
                row.append(add(g, (a,)))
            else:
                row.append(add(arrays[e][g], words[e] + (a,)))
        edges[e] = tuple(row)

    S = FiniteSemigroup(
        letters=letters,
        generators=generators,
        elements=[Transformation(tuple(int(v) for v in arr)) for arr in arrays],
        edges=[edges[e] for e in range(len(arrays))],
        reduced_words=words,
        identity_adjoined=adjoin_identity,
        _index=index,
        _arrays=arrays,
    )
    S._gen_arrays = gen_arrays
    S._gen_index = tuple(index[g.tobytes()] for g in gen_arrays)
    return S


@dataclass(frozen=True)
class IdealInfo:
    kernel: frozenset[int]
    is_left_zero: bool
    zero_element: int | None


def _strong_components(n: int, src: list[int], dst: list[int]) -> np.ndarray:
    graph = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="strong")
    return labels


def minimal_ideal(S: FiniteSemigroup) -> IdealInfo:
    """K(S) as the unique bottom strongly connected component of the two-sided
    reachability graph ``s -> s*a``, ``s -> a*s``."""
    nodes = list(S.proper_elements)
    offset = nodes[0]
    src, dst = [], []
    for s in nodes:
        for a in range(len(S.letters)):
            src += [s - offset, s - offset]
            dst += [S.edges[s][a] - offset, S.left_letter_product(a, s) - offset]
    labels = _strong_components(len(nodes), src, dst)
    has_exit = np.zeros(labels.max() + 1, dtype=bool)
    for u, v in zip(src, dst):
        if labels[u] != labels[v]:
            has_exit[labels[u]] = True
    bottoms = np.flatnonzero(~has_exit)
    if len(bottoms) != 1:
        raise SemigroupError(f"expected one bottom component, found {len(bottoms)}")
    kernel = frozenset(int(i) + offset for i in np.flatnonzero(labels == bottoms[0]))

    n_letters = len(S.letters)
    # x*a = x for all generators a  <=>  K(S) is left zero
    left_zero = all(S.edges[k][a] == k for k in kernel for a in range(n_letters))
    zero = None
    if len(kernel) == 1:
        (z,) = kernel
        if all(
            S.edges[z][a] == z and S.left_letter_product(a, z) == z
            for a in range(n_letters)
        ):
            zero = z
    return IdealInfo(kernel=kernel, is_left_zero=left_zero, zero_element=zero)


def is_r_trivial(S: FiniteSemigroup) -> bool:
    """Every strongly connected component of the right Cayley graph is a point."""
    src, dst = [], []
    for e, row in enumerate(S.edges):
        for f in row:
            src.append(e)
            dst.append(f)
    labels = _strong_components(len(S), src, dst)
    return len(set(labels.tolist())) == len(S)


def left_regular_representation(
    elements: Sequence,
    product: Callable,
    generators: Sequence,
    letters: Sequence[str] | None = None,
    max_size: int = DEFAULT_MAX_SIZE,
) -> tuple[FiniteSemigroup, list]:
    """Realise an abstract semigroup faithfully by left multiplication on S ∪ {e}.

    Returns the generated semigroup and ``points`` (the acted-on set, with the
    extra point ``None`` last).  Element ``s`` of the result maps the extra
    point to ``s`` itself, so ``points[table[-1]]`` recovers the abstract
    element.
    """
    elements = list(elements)
    pos = {el: i for i, el in enumerate(elements)}
    extra = len(elements)
    gens = []
    for g in generators:
        table = [pos[product(g, v)] for v in elements] + [pos[g]]
        gens.append(Transformation(tuple(table)))
    if letters is None:
        letters = [str(g) for g in generators]
    S = generate_semigroup(gens, letters, adjoin_identity=True, max_size=max_size)
    return S, elements + [None]


def abstract_value(S: FiniteSemigroup, points: list, e: int):
    """The abstract element represented by ``e`` in a left regular representation."""
    if S.identity_adjoined and e == 0:
        return None
    return points[S.elements[e].table[len(points) - 1]]


@dataclass
class SyntacticQuotient:
    semigroup: FiniteSemigroup
    projection: list[int]
    classes: list[frozenset[int]]
    letter_map: tuple[int, ...]


def syntactic_quotient(S: FiniteSemigroup, ideal: IdealInfo | None = None) -> SyntacticQuotient:
    """Quotient by ``s1 ≡ s2`` iff ``{(x, y) : x s1 y = 0}`` agree over S¹ × S¹."""
    if ideal is None:
        ideal = minimal_ideal(S)
    z = ideal.zero_element
    if z is None:
        raise NoZeroError("semigroup has no zero element")
    if not S.identity_adjoined:
        raise SemigroupError("syntactic quotient needs the adjoined identity")

    M = S.multiplication_table()
    # pattern id of the set {y : u y = 0}, for every u in S¹
    zero_rows = M == z
    pattern_ids: dict[bytes, int] = {}
    row_pattern = np.array(
        [pattern_ids.setdefault(np.packbits(r).tobytes(), len(pattern_ids)) for r in zero_rows]
    )
    profiles: dict[bytes, int] = {}
    cls = np.empty(len(S), dtype=np.int64)
    cls[0] = -1
    for s in S.proper_elements:
        key = row_pattern[M[:, s]].tobytes()
        cls[s] = profiles.setdefault(key, len(profiles))
    k = len(profiles)
    rep = {}
    for s in S.proper_elements:
        rep.setdefault(int(cls[s]), s)

    def class_product(c: int, d: int) -> int:
        return int(cls[M[rep[c], rep[d]]])

    gen_classes = [int(cls[S.generator_index(a)]) for a in range(len(S.letters))]
    distinct = list(dict.fromkeys(gen_classes))
    letter_map = tuple(distinct.index(c) for c in gen_classes)
    labels = [
        "|".join(S.letters[a] for a in range(len(S.letters)) if gen_classes[a] == c)
        for c in distinct
    ]
    Q, points = left_regular_representation(range(k), class_product, distinct, labels)
    to_q = {abstract_value(Q, points, e): e for e in Q.proper_elements}
    projection = [0] + [to_q[int(cls[s])] for s in S.proper_elements]
    classes = [frozenset(s for s in S.proper_elements if cls[s] == c) for c in range(k)]
    return SyntacticQuotient(Q, projection, classes, letter_map)


def push_probabilities(letter_map: Sequence[int], alphabet: Alphabet, letters: Sequence[str]) -> Alphabet:
    """Probability of a quotient generator is the sum over its preimages."""
    probs = alphabet.require_stochastic()
    out = [Fraction(0)] * len(letters)
    for a, b in enumerate(letter_map):
        out[b] += probs[a]
    return Alphabet(tuple(letters), tuple(out))


# ---------------------------------------------------------------- model I/O


def load_model(source) -> tuple[list[Transformation], Alphabet, bool]:
    """Read ``{"omega", "generators": [{"label", "table", "prob"}], "adjoin_identity"}``.

    ``source`` is a path, a JSON string or an already-parsed dict.  The
    alphabet is formal when no generator carries a ``prob``.
    """
    if isinstance(source, dict):
        doc = source
    else:
        text = str(source)
        if text.lstrip().startswith("{"):
            doc = json.loads(text)
        else:
            with open(text) as fh:
                doc = json.load(fh)
    omega = int(doc["omega"])
    gens, labels, probs = [], [], []
    for g in doc["generators"]:
        t = Transformation(tuple(g["table"]))
        if t.degree != omega:
            raise SemigroupError(f"generator {g.get('label')} has degree {t.degree}, omega is {omega}")
        gens.append(t)
        labels.append(str(g["label"]))
        probs.append(g.get("prob"))
    if all(p is None for p in probs):
        alphabet = Alphabet(tuple(labels))
    elif any(p is None for p in probs):
        raise AlphabetError("either every generator has a prob or none does")
    else:
        alphabet = Alphabet(tuple(labels), tuple(parse_fraction(p) for p in probs))
    return gens, alphabet, bool(doc.get("adjoin_identity", True))


def dump_model(generators: Sequence[Transformation], alphabet: Alphabet, adjoin_identity: bool = True) -> dict:
    gens = []
    for i, g in enumerate(generators):
        entry = {"label": alphabet.letters[i], "table": list(g.table)}
        if alphabet.probabilities is not None:
            entry["prob"] = format_fraction(alphabet.probabilities[i])
        gens.append(entry)
    return {"omega": generators[0].degree, "generators": gens, "adjoin_identity": adjoin_identity}


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def cayley_dot(S: FiniteSemigroup, name: str = "RCay", kernel: Iterable[int] = ()) -> str:
    """DOT text for the right Cayley graph, nodes labelled by reduced words."""
    kernel = set(kernel)
    lines = [f"digraph {name} {{"]
    for e in range(len(S)):
        attrs = f'label="{_dot_escape(S.word_label(e))}"'
        if e in kernel:
            attrs += ", style=filled, fillcolor=lightgrey"
        lines.append(f"  n{e} [{attrs}];")
    for e, row in enumerate(S.edges):
        for a, f in enumerate(row):
            lines.append(f'  n{e} -> n{f} [label="{_dot_escape(S.letters[a])}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
