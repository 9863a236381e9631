"""Exact rational linear algebra used by the absorption and stationary solvers."""

from __future__ import annotations

from fractions import Fraction
from graphlib import TopologicalSorter
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


class SingularSystem(ArithmeticError):
    pass


def solve_dense(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list[Fraction]]:
    """Solve ``A X = B`` exactly by Gauss-Jordan elimination.

    ``A`` is n x n, ``B`` is n x k; both are copied.
    """
    n = len(A)
    k = len(B[0]) if n else 0
    M = [[Fraction(v) for v in A[i]] + [Fraction(v) for v in B[i]] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col] != 0), None)
        if pivot is None:
            raise SingularSystem(f"matrix is singular at column {col}")
        M[col], M[pivot] = M[pivot], M[col]
        prow = M[col]
        inv = 1 / prow[col]
        if inv != 1:
            prow = M[col] = [v * inv for v in prow]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                row = M[r]
                M[r] = [a - f * b for a, b in zip(row, prow)]
    return [row[n : n + k] for row in M]


def nullspace(A: Sequence[Sequence]) -> list[list[Fraction]]:
    """Basis of ``{v : A v = 0}`` over the rationals."""
    rows = len(A)
    cols = len(A[0]) if rows else 0
    M = [[Fraction(v) for v in r] for r in A]
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if pivot is None:
            continue
        M[r], M[pivot] = M[pivot], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -M[i][f]
        basis.append(v)
    return basis


def solve_substochastic(rows: Sequence[dict], rhs: Sequence[Sequence]) -> list[list[Fraction]]:
    """Solve ``(I - Q) X = RHS`` for a sparse substochastic ``Q``.

    ``rows[i]`` maps column ``j`` to ``Q[i][j]``.  Strongly connected blocks of
    ``Q`` are solved densely, in an order where every block's successors are
    already known; an R-trivial transient graph reduces to back substitution.
    """
    n = len(rows)
    k = len(rhs[0]) if n else 0
    src = [i for i in range(n) for j in rows[i]]
    dst = [j for i in range(n) for j in rows[i]]
    graph = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="strong")
    labels = labels.tolist()
    members: dict[int, list[int]] = {}
    for i, c in enumerate(labels):
        members.setdefault(c, []).append(i)
    depends: dict[int, set[int]] = {c: set() for c in members}
    for i, j in zip(src, dst):
        if labels[i] != labels[j]:
            depends[labels[i]].add(labels[j])

    X: list[list[Fraction] | None] = [None] * n
    for c in TopologicalSorter(depends).static_order():
        block = members[c]
        local = {s: t for t, s in enumerate(block)}
        b = []
        for i in block:
            vec = [Fraction(v) for v in rhs[i]]
            for j, q in rows[i].items():
                if j not in local:
                    xj = X[j]
                    vec = [v + q * w for v, w in zip(vec, xj)]
            b.append(vec)
        if len(block) == 1:
            i = block[0]
            denom = 1 - Fraction(rows[i].get(i, 0))
            if denom == 0:
                raise SingularSystem(f"state {i} never leaves itself")
            X[i] = [v / denom for v in b[0]]
            continue
        A = [[Fraction(0)] * len(block) for _ in block]
        for t, i in enumerate(block):
            A[t][t] = Fraction(1)
            for j, q in rows[i].items():
                if j in local:
                    A[t][local[j]] -= q
        sol = solve_dense(A, b)
        for t, i in enumerate(block):
            X[i] = sol[t]
    return X  # type: ignore[return-value]
