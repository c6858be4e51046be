"""Linear maps acting on finitely many designated cells of a state vector.

Rows and columns of the matrix are numbered by the mixed-radix value of the
cell pattern, first listed cell most significant, symbols ``1..n`` mapping to
digits ``0..n-1``.
"""

from __future__ import annotations

from typing import Sequence

from .errors import DomainError
from .field import FieldSpec, Scalar
from .fock import StateVector, pattern_index, pattern_symbols
from .lattice import QUIESCENT, Configuration, translate

__all__ = ["LocalMap", "apply", "compose_check", "identity_matrix", "matmul", "dagger", "kron"]


def identity_matrix(field: FieldSpec, size: int) -> list[list[Scalar]]:
    return [[field.one if i == j else field.zero for j in range(size)] for i in range(size)]


def matmul(a: Sequence[Sequence[Scalar]], b: Sequence[Sequence[Scalar]]) -> list[list[Scalar]]:
    field = a[0][0].field
    cols = len(b[0])
    out = []
    for row in a:
        acc = [field.zero] * cols
        for k, x in enumerate(row):
            if x:
                for j, y in enumerate(b[k]):
                    if y:
                        acc[j] = acc[j] + x * y
        out.append(acc)
    return out


def dagger(a: Sequence[Sequence[Scalar]]) -> list[list[Scalar]]:
    return [[a[i][j].conj() for i in range(len(a))] for j in range(len(a[0]))]


def kron(a: Sequence[Sequence[Scalar]], b: Sequence[Sequence[Scalar]]) -> list[list[Scalar]]:
    rb, cb = len(b), len(b[0])
    return [
        [a[i // rb][j // cb] * b[i % rb][j % cb] for j in range(len(a[0]) * cb)]
        for i in range(len(a) * rb)
    ]


class LocalMap:
    """An ``n**p x n**p`` matrix acting on the ordered cells ``cells``."""

    __slots__ = ("cells", "matrix", "n", "field", "_columns")

    def __init__(self, cells: Sequence[Sequence[int]], matrix: Sequence[Sequence], n: int, field: FieldSpec):
        cells = tuple(tuple(c) for c in cells)
        if not cells:
            raise DomainError("a local map needs at least one cell")
        if len(set(cells)) != len(cells):
            raise DomainError("local map cells must be distinct")
        if len({len(c) for c in cells}) != 1:
            raise DomainError("local map cells have mixed dimensions")
        size = n ** len(cells)
        if len(matrix) != size or any(len(row) != size for row in matrix):
            raise DomainError(f"matrix must be {size} x {size} for {len(cells)} cells over {n} symbols")
        self.cells = cells
        self.n = n
        self.field = field
        self.matrix = tuple(tuple(field(x) for x in row) for row in matrix)
        # sparse columns: column i -> [(row, entry)] over nonzero entries
        self._columns = tuple(
            tuple((r, self.matrix[r][i]) for r in range(size) if self.matrix[r][i]) for i in range(size)
        )

    @property
    def p(self) -> int:
        return len(self.cells)

    @property
    def dim(self) -> int:
        return len(self.cells[0])

    def column(self, i: int) -> tuple[tuple[int, Scalar], ...]:
        return self._columns[i]

    def translate(self, t: Sequence[int]) -> "LocalMap":
        out = object.__new__(LocalMap)
        out.cells = tuple(translate(c, t) for c in self.cells)
        out.n, out.field, out.matrix, out._columns = self.n, self.field, self.matrix, self._columns
        return out

    def on(self, cells: Sequence[Sequence[int]]) -> "LocalMap":
        """The same matrix placed on another ordered list of cells."""
        cells = tuple(tuple(c) for c in cells)
        if len(cells) != self.p or len(set(cells)) != len(cells):
            raise DomainError("relocation needs the same number of distinct cells")
        out = object.__new__(LocalMap)
        out.cells = cells
        out.n, out.field, out.matrix, out._columns = self.n, self.field, self.matrix, self._columns
        return out

    def __repr__(self):
        return f"LocalMap(cells={list(self.cells)}, n={self.n})"

    def to_json(self) -> dict:
        return {"cells": [list(c) for c in self.cells], "matrix": [[x.to_json() for x in row] for row in self.matrix]}

    @classmethod
    def from_json(cls, doc: dict, n: int, field: FieldSpec) -> "LocalMap":
        matrix = [[field.scalar(x) for x in row] for row in doc["matrix"]]
        return cls([tuple(c) for c in doc["cells"]], matrix, n, field)


def apply(op: LocalMap, u: StateVector) -> StateVector:
    """Apply ``op`` to ``u``; cells outside ``op.cells`` are left untouched.

    The coefficient of ``e_i' (x) e_j`` in the result is
    ``sum_i L[i'][i] * lambda[i, j]`` where ``j`` ranges over the exterior
    patterns present in ``u``.
    """
    if op.field != u.field:
        raise DomainError("local map and vector are over different fields")
    if op.n != u.n or op.dim != u.dim:
        raise DomainError("local map and vector disagree on alphabet or dimension")
    cells, n, p = op.cells, op.n, op.p
    out: dict[Configuration, Scalar] = {}
    patterns: dict[int, tuple[int, ...]] = {}
    for cfg, lam in u.items():
        i = pattern_index([cfg[c] for c in cells], n)
        exterior = cfg.without(cells)._lookup
        for row, entry in op.column(i):
            if row not in patterns:
                patterns[row] = pattern_symbols(row, n, p)
            store = dict(exterior)
            for c, s in zip(cells, patterns[row]):
                if s != QUIESCENT:
                    store[c] = s
            new = Configuration._raw(u.dim, store)
            term = entry * lam
            out[new] = out[new] + term if new in out else term
    return StateVector._raw(u.field, u.n, u.dim, out)


def compose_check(op1: LocalMap, op2: LocalMap, u: StateVector) -> StateVector:
    """``op1`` applied after ``op2``."""
    return apply(op1, apply(op2, u))
