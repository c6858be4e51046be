"""Godel numbering of pairs, integers, lattice coordinates and finite sequences.

All values are Python ints (arbitrary precision). Sequence indices grow
roughly quadratically per element, so an index of a length-``l`` sequence
has on the order of ``2**l`` bits; ``seq_encode`` accepts a ``max_bits``
guard for callers that must stay bounded.
"""

from __future__ import annotations

import hashlib
from math import isqrt
from typing import Iterable, Sequence

import gmpy2

__all__ = [
    "IndexTooLarge",
    "pair",
    "unpair",
    "succ_pair",
    "succ_unpair",
    "fold_int",
    "unfold_int",
    "coord_index",
    "coord_unindex",
    "seq_encode",
    "seq_decode",
    "index_to_json",
]


class IndexTooLarge(OverflowError):
    """Raised when an index would exceed the caller's ``max_bits`` budget."""


def _check_nat(*values: int) -> None:
    for v in values:
        if v < 0:
            raise ValueError(f"expected a natural number, got {v}")


def pair(n: int, p: int) -> int:
    """Cantor pairing ``(n + p)(n + p + 1)/2 + n``."""
    _check_nat(n, p)
    s = n + p
    return s * (s + 1) // 2 + n


def unpair(k: int) -> tuple[int, int]:
    """Inverse of :func:`pair`."""
    _check_nat(k)
    s = (isqrt(8 * k + 1) - 1) // 2
    n = k - s * (s + 1) // 2
    return n, s - n


def succ_pair(n: int, p: int) -> int:
    """``n;p``, the pairing shifted onto the positive integers."""
    return pair(n, p) + 1


def succ_unpair(k: int) -> tuple[int, int]:
    if k <= 0:
        raise ValueError("0 is not in the image of succ_pair")
    return unpair(k - 1)


def fold_int(x: int) -> int:
    """Bijection Z -> N: ``2x`` for ``x >= 0`` and ``-2x - 1`` otherwise."""
    return 2 * x if x >= 0 else -2 * x - 1


def unfold_int(k: int) -> int:
    _check_nat(k)
    return k // 2 if k % 2 == 0 else -(k + 1) // 2


def coord_index(coord: Sequence[int]) -> int:
    """Index of a cell of Z^d by right-nested pairing of folded components.

    For ``d == 3`` this is ``pair(N(x), pair(N(y), N(z)))``; for ``d == 1``
    it is simply ``N(x)``.
    """
    if len(coord) == 0:
        raise ValueError("coordinates need at least one component")
    acc = fold_int(coord[-1])
    for x in reversed(coord[:-1]):
        acc = pair(fold_int(x), acc)
    return acc


def coord_unindex(k: int, dim: int = 3) -> tuple[int, ...]:
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    out = []
    for _ in range(dim - 1):
        head, k = unpair(k)
        out.append(unfold_int(head))
    out.append(unfold_int(k))
    return tuple(out)


def seq_encode(js: Iterable[int], max_bits: int | None = None) -> int:
    """Encode a finite sequence as ``j1;(j2;(...;(jl;0)...))``.

    The empty sequence encodes to 0 and every other sequence to a positive
    integer. With ``max_bits`` set, :class:`IndexTooLarge` is raised as soon
    as the partial fold grows past that many bits.
    """
    items = list(js)
    _check_nat(*items)
    acc = 0
    for j in reversed(items):
        acc = succ_pair(j, acc)
        if max_bits is not None and acc.bit_length() > max_bits:
            raise IndexTooLarge(f"sequence index exceeds {max_bits} bits")
    return acc


def seq_decode(k: int) -> list[int]:
    _check_nat(k)
    out = []
    while k:
        j, k = succ_unpair(k)
        out.append(j)
    return out


def index_to_json(k: int, max_digits: int | None = None) -> str | dict:
    """Decimal string of ``k``; a digest record once it passes ``max_digits``."""
    digits = gmpy2.mpz(k).digits(10)
    if max_digits is None or len(digits) <= max_digits:
        return digits
    return {
        "sha256": hashlib.sha256(digits.encode("ascii")).hexdigest(),
        "digits": len(digits),
    }
