"""Cells of Z^d, neighbourhoods, regions and finite-support configurations."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import DomainError

__all__ = [
    "Coord",
    "Neighborhood",
    "Configuration",
    "translate",
    "neighborhood_of",
    "grow",
    "read_cone",
    "translate_region",
]

Coord = tuple[int, ...]
QUIESCENT = 1


def _coord(c: Iterable[int]) -> Coord:
    out = tuple(c)
    if not out or not all(isinstance(x, int) and not isinstance(x, bool) for x in out):
        raise DomainError(f"not a lattice coordinate: {c!r}")
    return out


def translate(c: Sequence[int], t: Sequence[int]) -> Coord:
    if len(c) != len(t):
        raise DomainError(f"dimension mismatch: {len(c)} vs {len(t)}")
    return tuple(a + b for a, b in zip(c, t))


@dataclass(frozen=True)
class Neighborhood:
    """Ordered offsets ``sigma_1 .. sigma_r``; a cell ``c`` reads ``c + sigma_i``.

    The order is significant: it fixes the tensor-factor order of local rules.
    """

    offsets: tuple[Coord, ...]

    def __post_init__(self):
        offs = tuple(_coord(o) for o in self.offsets)
        if not offs:
            raise DomainError("a neighbourhood needs at least one offset")
        d = len(offs[0])
        if any(len(o) != d for o in offs):
            raise DomainError("neighbourhood offsets have mixed dimensions")
        if len(set(offs)) != len(offs):
            raise DomainError("neighbourhood offsets must be distinct")
        if (0,) * d not in offs:
            raise DomainError("neighbourhood must contain the zero offset")
        object.__setattr__(self, "offsets", offs)

    @property
    def dim(self) -> int:
        return len(self.offsets[0])

    @property
    def r(self) -> int:
        return len(self.offsets)

    def __len__(self):
        return len(self.offsets)

    def __iter__(self) -> Iterator[Coord]:
        return iter(self.offsets)

    @classmethod
    def moore(cls, dim: int = 3, radius: int = 1) -> "Neighborhood":
        """All offsets with every component in ``[-radius, radius]``, lexicographic."""
        rng = range(-radius, radius + 1)
        return cls(tuple(product(rng, repeat=dim)))

    @classmethod
    def from_json(cls, doc) -> "Neighborhood":
        return cls(tuple(tuple(o) for o in doc))

    def to_json(self) -> list[list[int]]:
        return [list(o) for o in self.offsets]


def neighborhood_of(c: Sequence[int], nb: Neighborhood) -> list[Coord]:
    return [translate(c, s) for s in nb.offsets]


def grow(reg: Iterable[Sequence[int]], nb: Neighborhood) -> frozenset[Coord]:
    """Cells whose neighbourhood meets ``reg`` (together with ``reg`` itself)."""
    cells = {tuple(c) for c in reg}
    out = set(cells)
    for c in cells:
        for s in nb.offsets:
            out.add(tuple(a - b for a, b in zip(c, s)))
    return frozenset(out)


def read_cone(reg: Iterable[Sequence[int]], nb: Neighborhood) -> frozenset[Coord]:
    """Cells read by some cell of ``reg``: the past light cone of ``reg``."""
    cells = {tuple(c) for c in reg}
    out = set(cells)
    for c in cells:
        for s in nb.offsets:
            out.add(tuple(a + b for a, b in zip(c, s)))
    return frozenset(out)


def translate_region(reg: Iterable[Sequence[int]], t: Sequence[int]) -> frozenset[Coord]:
    return frozenset(translate(c, t) for c in reg)


class Configuration:
    """A map from cells to symbols ``1..n`` that is quiescent (1) off a finite set.

    Only non-quiescent cells are stored, sorted, so two configurations are
    equal exactly when they agree on every cell.
    """

    __slots__ = ("dim", "_cells", "_lookup", "_h")

    def __init__(self, cells: Mapping[Sequence[int], int] | Iterable[tuple[Sequence[int], int]] = (), dim: int | None = None):
        items = cells.items() if isinstance(cells, Mapping) else cells
        store: dict[Coord, int] = {}
        for c, s in items:
            c = _coord(c)
            if not isinstance(s, int) or isinstance(s, bool) or s < 1:
                raise DomainError(f"symbols are positive integers, got {s!r}")
            if dim is None:
                dim = len(c)
            elif len(c) != dim:
                raise DomainError(f"cell {c} does not have dimension {dim}")
            if c in store and store[c] != s:
                raise DomainError(f"cell {c} assigned twice")
            if s != QUIESCENT:
                store[c] = s
        if dim is None:
            raise DomainError("dimension of an empty configuration must be given")
        self.dim = dim
        self._cells = tuple(sorted(store.items()))
        self._lookup = store
        self._h = None

    @classmethod
    def _raw(cls, dim: int, store: dict[Coord, int]) -> "Configuration":
        # trusted constructor: store already canonical (no quiescent entries)
        self = object.__new__(cls)
        self.dim = dim
        self._cells = tuple(sorted(store.items()))
        self._lookup = store
        self._h = None
        return self

    @classmethod
    def quiescent(cls, dim: int = 3) -> "Configuration":
        return cls((), dim=dim)

    def __getitem__(self, c: Sequence[int]) -> int:
        return self._lookup.get(tuple(c), QUIESCENT)

    def items(self) -> tuple[tuple[Coord, int], ...]:
        return self._cells

    @property
    def support(self) -> frozenset[Coord]:
        return frozenset(self._lookup)

    def max_symbol(self) -> int:
        return max((s for _, s in self._cells), default=QUIESCENT)

    def replace(self, updates: Mapping[Coord, int]) -> "Configuration":
        """Copy with the given cells overwritten (symbol 1 clears a cell)."""
        store = dict(self._lookup)
        for c, s in updates.items():
            if s == QUIESCENT:
                store.pop(c, None)
            else:
                store[c] = s
        return Configuration._raw(self.dim, store)

    def without(self, cells: Iterable[Coord]) -> "Configuration":
        store = dict(self._lookup)
        for c in cells:
            store.pop(c, None)
        return Configuration._raw(self.dim, store)

    def translate(self, t: Sequence[int]) -> "Configuration":
        return Configuration._raw(self.dim, {translate(c, t): s for c, s in self._cells})

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.dim == other.dim and self._cells == other._cells

    def __hash__(self):
        if self._h is None:
            self._h = hash((self.dim, self._cells))
        return self._h

    def __len__(self):
        return len(self._cells)

    def __lt__(self, other: "Configuration") -> bool:
        # cheap canonical order used for serialization, not the Godel order
        return (len(self._cells), self._cells) < (len(other._cells), other._cells)

    def __repr__(self):
        body = ", ".join(f"{c}: {s}" for c, s in self._cells)
        return f"Configuration({{{body}}}, dim={self.dim})"

    def to_json(self) -> list:
        return [[list(c), s] for c, s in self._cells]

    @classmethod
    def from_json(cls, doc, dim: int | None = None) -> "Configuration":
        return cls(((tuple(c), s) for c, s in doc), dim=dim)
