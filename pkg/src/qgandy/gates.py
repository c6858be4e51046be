"""Exact single- and two-cell unitaries used to build rules and test states."""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import DomainError
from .field import FieldSpec, Scalar, zeta8
from .localop import dagger, identity_matrix, matmul

__all__ = [
    "inv_sqrt2",
    "hadamard",
    "phase",
    "pauli_x",
    "embed",
    "swap_matrix",
    "is_unitary",
    "random_cell_unitary",
]

Matrix = list[list[Scalar]]


@lru_cache(maxsize=None)
def inv_sqrt2(field: FieldSpec) -> Scalar:
    if field == zeta8():
        return field.scalar([0, Fraction(1, 2), 0, Fraction(-1, 2)])
    return field.sqrt(field.scalar(Fraction(1, 2)))


def hadamard(field: FieldSpec) -> Matrix:
    h = inv_sqrt2(field)
    return [[h, h], [h, -h]]


def phase(field: FieldSpec, k: int) -> Scalar:
    """``zeta_8 ** k``; only available in Q(zeta_8) unless ``k`` is a multiple of 4."""
    if k % 4 == 0:
        return field.one if k % 8 == 0 else -field.one
    if field != zeta8():
        raise DomainError("eighth roots of unity need Q(zeta8)")
    return field.gen ** (k % 8)


def pauli_x(field: FieldSpec) -> Matrix:
    return [[field.zero, field.one], [field.one, field.zero]]


def embed(block: Sequence[Sequence[Scalar]], levels: Sequence[int], n: int, field: FieldSpec) -> Matrix:
    """Act with ``block`` on the basis states ``levels`` (1-based) of an n-level cell."""
    if len(set(levels)) != len(levels) or any(not 1 <= lv <= n for lv in levels):
        raise DomainError(f"levels {levels} are not distinct indices in 1..{n}")
    out = identity_matrix(field, n)
    idx = [lv - 1 for lv in levels]
    for a, ia in enumerate(idx):
        for b, ib in enumerate(idx):
            out[ia][ib] = field(block[a][b])
    return out


def swap_matrix(n: int, field: FieldSpec) -> Matrix:
    size = n * n
    out = [[field.zero] * size for _ in range(size)]
    for a in range(n):
        for b in range(n):
            out[b * n + a][a * n + b] = field.one
    return out


def is_unitary(m: Sequence[Sequence[Scalar]]) -> bool:
    field = m[0][0].field
    return matmul(dagger(m), m) == identity_matrix(field, len(m))


def random_cell_unitary(n: int, field: FieldSpec, rng: random.Random, depth: int = 3) -> Matrix:
    """Random unitary on one cell that fixes the quiescent state ``e_1``.

    Built as a product of phases, swaps and (in Q(zeta8)) Hadamards on
    the non-quiescent levels ``2..n``.
    """
    u = identity_matrix(field, n)
    if n < 2:
        return u
    zeta = field == zeta8()
    for _ in range(depth):
        choice = rng.randrange(3)
        if n >= 3 and choice == 0:
            a, b = rng.sample(range(2, n + 1), 2)
            g = embed(hadamard(field) if zeta else pauli_x(field), (a, b), n, field)
        elif n >= 3 and choice == 1:
            a, b = rng.sample(range(2, n + 1), 2)
            g = embed(pauli_x(field), (a, b), n, field)
        else:
            lv = rng.randrange(2, n + 1)
            ph = phase(field, rng.randrange(8)) if zeta else (field.one if rng.random() < 0.5 else -field.one)
            g = embed([[ph]], (lv,), n, field)
        u = matmul(g, u)
    return u
