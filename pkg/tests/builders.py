"""Random instance builders shared by the unit and acceptance tests."""

from __future__ import annotations

import random
from fractions import Fraction

from qgandy.classical_ca import ClassicalRule
from qgandy.field import FieldSpec, zeta8
from qgandy.fock import StateVector
from qgandy.gates import phase, random_cell_unitary
from qgandy.lattice import Configuration, Neighborhood
from qgandy.qca import shift_unitary_rule


def random_classical_rule(rng: random.Random, n: int, offsets: list[int]) -> ClassicalRule:
    nb = Neighborhood(tuple((o,) for o in offsets))
    chi = [1] + [rng.randint(1, n) for _ in range(n ** len(offsets) - 1)]
    return ClassicalRule(n, nb, chi)


def random_offsets(rng: random.Random, r: int, reach: int = 2) -> list[int]:
    others = rng.sample([x for x in range(-reach, reach + 1) if x != 0], r - 1)
    out = [0] + others
    rng.shuffle(out)
    return out


def random_config(rng: random.Random, n: int, lo: int, width: int) -> Configuration:
    return Configuration({(lo + i,): rng.randint(1, n) for i in range(width)}, dim=1)


def scalar_pool(field: FieldSpec):
    pool = [field.one, -field.one, field(2), field(Fraction(1, 3)), field(Fraction(-5, 2))]
    if field.degree > 1:
        z = field.gen
        pool += [z, z * z - 1, z**3 * Fraction(1, 2)]
    return pool


def random_state(rng: random.Random, field: FieldSpec, n: int, cells: list[int], terms: int) -> StateVector:
    pool = scalar_pool(field)
    out = []
    for _ in range(terms):
        cfg = Configuration({(c,): rng.randint(1, n) for c in cells if rng.random() < 0.6}, dim=1)
        out.append((cfg, rng.choice(pool)))
    return StateVector(field, n, 1, out)


def random_valid_rule(rng: random.Random, field: FieldSpec | None = None, n: int = 2):
    """Rule K = (u on C') Swap(C', C + source) for a random cell unitary u fixing e1.

    For n=2 the only such u are diag(1, zeta8**k); larger n mixes the
    non-quiescent levels with Hadamards, swaps and phases.
    """
    f = field if field is not None else zeta8()
    offsets = rng.choice([[0], [0, 1], [-1, 0], [1, 0], [0, -1]])
    nb = Neighborhood(tuple((o,) for o in offsets))
    if n == 2:
        u = [[f.one, f.zero], [f.zero, phase(f, rng.randrange(8))]]
    else:
        u = random_cell_unitary(n, f, rng)
    source = (rng.choice(offsets),)
    return shift_unitary_rule(u, nb, n, f, source=source), u, source
